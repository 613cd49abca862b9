//! Čech cochain complexes of a presheaf relative to an open cover.
//!
//! The alternating complex over strictly increasing index tuples is used:
//! C^n is the direct sum of values on (n+1)-fold intersections, blocks laid
//! out in lexicographic tuple order, and the coboundary alternates signs
//! over omitted indices. Cohomology groups come out of the exact quotient
//! machinery in [`crate::algebra`].

use crate::algebra::{kernel_basis, quotient_group, FGAbelianGroup, IntMatrix};
use crate::presheaf::Presheaf;
use crate::topology::{check_cover, Cover, CoverReport, OpenId};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error("cover is invalid: uncovered points {uncovered:?}, overflowing parts {overflowing:?}")]
    InvalidCover {
        uncovered: Vec<String>,
        overflowing: Vec<OpenId>,
    },
    #[error("coboundary failed δ²=0 at degree {degree}; the presheaf violates the functor laws")]
    CoboundaryNotNilpotent { degree: usize },
}

/// One graded piece of the complex: the tuples of cover-part indices with
/// their intersection opens, plus the coboundary into the next degree.
#[derive(Debug, Clone)]
pub struct CechDegree {
    /// Strictly increasing index tuples in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
    /// Intersection open per tuple.
    pub opens: Vec<OpenId>,
    /// Rank of the presheaf value per tuple.
    pub ranks: Vec<usize>,
    /// Block offset of each tuple inside C^n.
    pub offsets: Vec<usize>,
    /// Total rank of C^n.
    pub total_rank: usize,
    /// δ^n : C^n → C^{n+1}; zero-row matrix at the top degree.
    pub coboundary: IntMatrix,
}

/// The full complex for a presheaf and an ordered cover.
#[derive(Debug, Clone)]
pub struct CechComplex<'p> {
    presheaf: &'p Presheaf,
    cover: Cover,
    degrees: Vec<CechDegree>,
}

/// Cohomology groups per degree, through degree (parts − 1); everything
/// beyond the top degree is zero by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyResult {
    /// The cover the groups were computed against.
    pub cover: Cover,
    pub groups: Vec<FGAbelianGroup>,
}

impl<'p> CechComplex<'p> {
    /// Assembles all cochain modules and coboundaries and verifies δ² = 0.
    pub fn build(presheaf: &'p Presheaf, cover: &Cover) -> Result<Self, CechError> {
        let topology = presheaf.topology();
        let report: CoverReport = check_cover(topology, cover);
        if !report.is_valid() {
            return Err(CechError::InvalidCover {
                uncovered: report.uncovered,
                overflowing: report.overflowing_parts,
            });
        }
        let parts = &cover.parts;
        let m = parts.len();

        let mut layers: Vec<(Vec<Vec<usize>>, Vec<OpenId>)> = Vec::new();
        for n in 0..m {
            let tuples = increasing_tuples(m, n + 1);
            let opens: Vec<OpenId> = tuples
                .iter()
                .map(|t| {
                    let mut acc = parts[t[0]];
                    for &i in &t[1..] {
                        acc = topology.intersection(acc, parts[i]);
                    }
                    acc
                })
                .collect();
            layers.push((tuples, opens));
        }

        let mut degrees = Vec::with_capacity(m);
        for n in 0..m {
            let (tuples, opens) = layers[n].clone();
            let ranks: Vec<usize> = opens.iter().map(|&o| presheaf.rank(o)).collect();
            let mut offsets = Vec::with_capacity(tuples.len());
            let mut total_rank = 0;
            for &r in &ranks {
                offsets.push(total_rank);
                total_rank += r;
            }
            let coboundary = if n + 1 < m {
                let (next_tuples, next_opens) = &layers[n + 1];
                let next_ranks: Vec<usize> =
                    next_opens.iter().map(|&o| presheaf.rank(o)).collect();
                let mut next_offsets = Vec::with_capacity(next_tuples.len());
                let mut next_total = 0;
                for &r in &next_ranks {
                    next_offsets.push(next_total);
                    next_total += r;
                }
                let mut delta = IntMatrix::zeros(next_total, total_rank);
                for (ti, target) in next_tuples.iter().enumerate() {
                    for k in 0..target.len() {
                        let mut source = target.clone();
                        source.remove(k);
                        let si = tuples
                            .binary_search(&source)
                            .expect("face of an increasing tuple is an increasing tuple");
                        let r = presheaf
                            .restriction(next_opens[ti], opens[si])
                            .expect("tuple intersections nest");
                        let negate = k % 2 == 1;
                        for a in 0..next_ranks[ti] {
                            for b in 0..ranks[si] {
                                let val = if negate {
                                    -r[(a, b)].clone()
                                } else {
                                    r[(a, b)].clone()
                                };
                                delta[(next_offsets[ti] + a, offsets[si] + b)] = val;
                            }
                        }
                    }
                }
                delta
            } else {
                IntMatrix::zeros(0, total_rank)
            };
            degrees.push(CechDegree {
                tuples,
                opens,
                ranks,
                offsets,
                total_rank,
                coboundary,
            });
        }

        for n in 0..degrees.len().saturating_sub(1) {
            let square = degrees[n + 1].coboundary.mul(&degrees[n].coboundary);
            if !square.is_zero() {
                return Err(CechError::CoboundaryNotNilpotent { degree: n });
            }
        }

        Ok(CechComplex {
            presheaf,
            cover: cover.clone(),
            degrees,
        })
    }

    pub fn presheaf(&self) -> &'p Presheaf {
        self.presheaf
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn degree_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, n: usize) -> &CechDegree {
        &self.degrees[n]
    }

    /// Hⁿ = ker δⁿ / im δ^{n−1}, with δ^{−1} the zero map.
    pub fn cohomology(&self) -> CohomologyResult {
        let mut groups = Vec::with_capacity(self.degrees.len());
        for n in 0..self.degrees.len() {
            let kernel = kernel_basis(&self.degrees[n].coboundary);
            let group = if n == 0 {
                let image = IntMatrix::zeros(self.degrees[0].total_rank, 0);
                quotient_group(&kernel, &image)
            } else {
                quotient_group(&kernel, &self.degrees[n - 1].coboundary)
            }
            .expect("δ²=0 places the image inside the kernel lattice");
            groups.push(group);
        }
        CohomologyResult {
            cover: self.cover.clone(),
            groups,
        }
    }
}

fn increasing_tuples(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(m: usize, len: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            current.push(i);
            rec(m, len, i + 1, current, out);
            current.pop();
        }
    }
    rec(m, len, 0, &mut current, &mut out);
    out
}

/// Cohomology of a presheaf with respect to an explicit cover.
pub fn cohomology(presheaf: &Presheaf, cover: &Cover) -> Result<CohomologyResult, CechError> {
    Ok(CechComplex::build(presheaf, cover)?.cohomology())
}

/// Cohomology with respect to the minimal-open cover of the whole space;
/// the returned report records the cover that was used.
pub fn cohomology_of_space(presheaf: &Presheaf) -> Result<CohomologyResult, CechError> {
    let cover = presheaf
        .topology()
        .minimal_open_cover(presheaf.topology().full_open());
    cohomology(presheaf, &cover)
}
