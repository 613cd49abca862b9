//! Presheaves of free integer modules on a finite topology.
//!
//! A presheaf assigns a rank (a free module ℤ^r) to every open and an
//! integer matrix to every inclusion. Gluing, the sheaf condition and
//! sheafification are all decided by exact integer linear algebra: the
//! sheaf condition at an open U is the invertibility of the comparison map
//! from F(U) into the limit of stalks over the minimal opens of U's points.

use crate::algebra::{kernel_basis, solve, solve_matrix, IntMatrix, SolveOutcome};
use crate::topology::{check_cover, Cover, FiniteTopology, OpenId, TopologyError};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error("expected one rank per open ({expected}), got {got}")]
    RankCountMismatch { expected: usize, got: usize },
    #[error("missing restriction matrix for {smaller} ⊆ {larger}")]
    MissingRestriction { smaller: OpenId, larger: OpenId },
    #[error(
        "restriction for {smaller} ⊆ {larger} must be {expected_rows}x{expected_cols}, got {got_rows}x{got_cols}"
    )]
    ShapeMismatch {
        smaller: OpenId,
        larger: OpenId,
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("({smaller}, {larger}) is not a Hasse edge of the inclusion poset")]
    NotAHasseEdge { smaller: OpenId, larger: OpenId },
    #[error("{target} is not included in the section's open {section_open}")]
    NotIncluded { section_open: OpenId, target: OpenId },
    #[error("section on {open} must have {expected} coordinates, got {got}")]
    SectionLength {
        open: OpenId,
        expected: usize,
        got: usize,
    },
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// An element of F(U): integer coordinates in the module's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub open: OpenId,
    pub coords: Vec<BigInt>,
}

impl Section {
    pub fn from_i64(open: OpenId, coords: &[i64]) -> Self {
        Section {
            open,
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }
}

/// A presheaf of free ℤ-modules. Immutable after construction; all
/// operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    topology: Arc<FiniteTopology>,
    ranks: Vec<usize>,
    /// Keyed (smaller, larger); the matrix represents F(larger) → F(smaller)
    /// and has shape rank(smaller) × rank(larger).
    maps: BTreeMap<(OpenId, OpenId), IntMatrix>,
}

impl Presheaf {
    /// Builds a presheaf from restriction matrices on every strict inclusion
    /// pair. Identity restrictions may be omitted; they are filled in.
    pub fn from_restrictions(
        topology: Arc<FiniteTopology>,
        ranks: Vec<usize>,
        mut maps: BTreeMap<(OpenId, OpenId), IntMatrix>,
    ) -> Result<Self, PresheafError> {
        if ranks.len() != topology.open_count() {
            return Err(PresheafError::RankCountMismatch {
                expected: topology.open_count(),
                got: ranks.len(),
            });
        }
        for (v, u) in topology.inclusion_pairs() {
            match maps.get(&(v, u)) {
                None if v == u => {
                    maps.insert((v, u), IntMatrix::identity(ranks[u.0]));
                }
                None => return Err(PresheafError::MissingRestriction { smaller: v, larger: u }),
                Some(m) => {
                    if m.rows() != ranks[v.0] || m.cols() != ranks[u.0] {
                        return Err(PresheafError::ShapeMismatch {
                            smaller: v,
                            larger: u,
                            expected_rows: ranks[v.0],
                            expected_cols: ranks[u.0],
                            got_rows: m.rows(),
                            got_cols: m.cols(),
                        });
                    }
                }
            }
        }
        Ok(Presheaf {
            topology,
            ranks,
            maps,
        })
    }

    /// Builds a presheaf from matrices on the Hasse edges of the inclusion
    /// poset only; all other restrictions are derived by composition along
    /// a fixed choice of paths. Run [`Presheaf::validate`] afterwards to
    /// audit path-independence.
    pub fn from_hasse_edges(
        topology: Arc<FiniteTopology>,
        ranks: Vec<usize>,
        edges: BTreeMap<(OpenId, OpenId), IntMatrix>,
    ) -> Result<Self, PresheafError> {
        if ranks.len() != topology.open_count() {
            return Err(PresheafError::RankCountMismatch {
                expected: topology.open_count(),
                got: ranks.len(),
            });
        }
        let hasse: Vec<(OpenId, OpenId)> = topology.hasse_edges();
        for key in edges.keys() {
            if !hasse.contains(key) {
                return Err(PresheafError::NotAHasseEdge {
                    smaller: key.0,
                    larger: key.1,
                });
            }
        }
        let mut maps: BTreeMap<(OpenId, OpenId), IntMatrix> = BTreeMap::new();
        for &(v, u) in &hasse {
            let m = edges
                .get(&(v, u))
                .ok_or(PresheafError::MissingRestriction { smaller: v, larger: u })?;
            if m.rows() != ranks[v.0] || m.cols() != ranks[u.0] {
                return Err(PresheafError::ShapeMismatch {
                    smaller: v,
                    larger: u,
                    expected_rows: ranks[v.0],
                    expected_cols: ranks[u.0],
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                });
            }
            maps.insert((v, u), m.clone());
        }
        for u in topology.open_ids() {
            maps.insert((u, u), IntMatrix::identity(ranks[u.0]));
        }
        // Fill the remaining pairs in order of increasing size gap, composing
        // through the smallest eligible Hasse predecessor of the larger open.
        let mut pairs: Vec<(OpenId, OpenId)> = topology
            .inclusion_pairs()
            .into_iter()
            .filter(|&(v, u)| v != u && !maps.contains_key(&(v, u)))
            .collect();
        pairs.sort_by_key(|&(v, u)| {
            (
                topology.open_size(u) - topology.open_size(v),
                v.0,
                u.0,
            )
        });
        for (v, u) in pairs {
            let w = topology
                .open_ids()
                .find(|&w| {
                    w != u && topology.is_subset(v, w) && hasse.contains(&(w, u))
                })
                .expect("strict inclusion has a Hasse predecessor above the source");
            let via = maps[&(v, w)].mul(&maps[&(w, u)]);
            maps.insert((v, u), via);
        }
        Ok(Presheaf {
            topology,
            ranks,
            maps,
        })
    }

    /// The constant presheaf: every nonempty open gets ℤ^rank with identity
    /// restrictions. The empty set gets the zero module so that agreement on
    /// empty overlaps is vacuous; this is the variant whose gluing fails on
    /// disconnected spaces.
    pub fn constant(topology: Arc<FiniteTopology>, rank: usize) -> Presheaf {
        let empty = topology.empty_open();
        let ranks: Vec<usize> = topology
            .open_ids()
            .map(|u| if u == empty { 0 } else { rank })
            .collect();
        let maps = topology
            .inclusion_pairs()
            .into_iter()
            .map(|(v, u)| {
                let m = if v == empty {
                    IntMatrix::zeros(0, ranks[u.0])
                } else {
                    IntMatrix::identity(rank)
                };
                ((v, u), m)
            })
            .collect();
        Presheaf {
            topology,
            ranks,
            maps,
        }
    }

    pub fn topology(&self) -> &Arc<FiniteTopology> {
        &self.topology
    }

    pub fn rank(&self, u: OpenId) -> usize {
        self.ranks[u.0]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// The restriction matrix F(larger) → F(smaller).
    pub fn restriction(&self, smaller: OpenId, larger: OpenId) -> Result<&IntMatrix, PresheafError> {
        self.maps
            .get(&(smaller, larger))
            .ok_or(PresheafError::NotIncluded {
                section_open: larger,
                target: smaller,
            })
    }

    /// Checks the identity and composition laws over all inclusion chains
    /// and reports every violation.
    pub fn validate(&self) -> PresheafReport {
        let mut identity_violations = Vec::new();
        let mut composition_violations = Vec::new();
        for u in self.topology.open_ids() {
            if !self.maps[&(u, u)].is_identity() {
                identity_violations.push(u);
            }
        }
        let pairs = self.topology.inclusion_pairs();
        for &(w, v) in &pairs {
            for u in self.topology.open_ids() {
                if !self.topology.is_subset(v, u) {
                    continue;
                }
                let lhs = self.maps[&(w, v)].mul(&self.maps[&(v, u)]);
                if lhs != self.maps[&(w, u)] {
                    composition_violations.push((w, v, u));
                }
            }
        }
        PresheafReport {
            identity_violations,
            composition_violations,
        }
    }

    pub fn section(&self, open: OpenId, coords: Vec<BigInt>) -> Result<Section, PresheafError> {
        if coords.len() != self.rank(open) {
            return Err(PresheafError::SectionLength {
                open,
                expected: self.rank(open),
                got: coords.len(),
            });
        }
        Ok(Section { open, coords })
    }

    /// Applies the restriction morphism to a section.
    pub fn restrict(&self, s: &Section, smaller: OpenId) -> Result<Section, PresheafError> {
        if !self.topology.is_subset(smaller, s.open) {
            return Err(PresheafError::NotIncluded {
                section_open: s.open,
                target: smaller,
            });
        }
        let m = &self.maps[&(smaller, s.open)];
        Ok(Section {
            open: smaller,
            coords: m.mul_vec(&s.coords),
        })
    }

    /// Verifies pairwise overlap agreement of one section per cover part.
    pub fn check_compatibility(
        &self,
        cover: &Cover,
        sections: Vec<Section>,
    ) -> Result<CompatibleFamily, CompatibilityError> {
        if sections.len() != cover.parts.len() {
            return Err(CompatibilityError::WrongSectionCount {
                expected: cover.parts.len(),
                got: sections.len(),
            });
        }
        for (i, s) in sections.iter().enumerate() {
            if s.open != cover.parts[i] {
                return Err(CompatibilityError::SectionOpenMismatch {
                    index: i,
                    expected: cover.parts[i],
                    got: s.open,
                });
            }
            if s.coords.len() != self.rank(s.open) {
                return Err(CompatibilityError::Presheaf(PresheafError::SectionLength {
                    open: s.open,
                    expected: self.rank(s.open),
                    got: s.coords.len(),
                }));
            }
        }
        for i in 0..sections.len() {
            for j in (i + 1)..sections.len() {
                let overlap = self.topology.intersection(cover.parts[i], cover.parts[j]);
                let left = self
                    .restrict(&sections[i], overlap)
                    .map_err(CompatibilityError::Presheaf)?;
                let right = self
                    .restrict(&sections[j], overlap)
                    .map_err(CompatibilityError::Presheaf)?;
                if left.coords != right.coords {
                    return Err(CompatibilityError::Conflict(Box::new(OverlapConflict {
                        left_part: i,
                        right_part: j,
                        overlap,
                        left_value: left.coords,
                        right_value: right.coords,
                    })));
                }
            }
        }
        Ok(CompatibleFamily {
            cover: cover.clone(),
            sections,
        })
    }

    /// Solves the gluing system {r(f) = fᵢ} for a compatible family.
    /// Reports uniqueness honestly: a nontrivial kernel yields `Multiple`.
    pub fn glue(&self, family: &CompatibleFamily) -> GlueOutcome {
        let covered = family.cover.covered;
        let blocks: Vec<&IntMatrix> = family
            .cover
            .parts
            .iter()
            .map(|&p| &self.maps[&(p, covered)])
            .collect();
        let stacked = IntMatrix::vstack(&blocks, self.rank(covered));
        let rhs: Vec<BigInt> = family
            .sections
            .iter()
            .flat_map(|s| s.coords.iter().cloned())
            .collect();
        match solve(&stacked, &rhs).expect("stacked gluing system has consistent shape") {
            SolveOutcome::NoSolution => GlueOutcome::NoSolution,
            SolveOutcome::Solution { particular, kernel } => {
                let section = Section {
                    open: covered,
                    coords: particular,
                };
                if kernel.cols() == 0 {
                    GlueOutcome::Unique(section)
                } else {
                    GlueOutcome::Multiple { section, kernel }
                }
            }
        }
    }

    /// Limit of stalks over the minimal opens of the points of `u`,
    /// presented as a saturated kernel basis inside the stalk direct sum.
    fn minimal_limit(&self, u: OpenId) -> MinimalLimit {
        let points = self.topology.open_point_indices(u);
        let stalk_opens: Vec<OpenId> = points
            .iter()
            .map(|&i| {
                let name = self.topology.points()[i].clone();
                self.topology
                    .minimal_open(&name)
                    .expect("point of a validated open")
            })
            .collect();
        let stalk_ranks: Vec<usize> = stalk_opens.iter().map(|&o| self.rank(o)).collect();
        let mut offsets = Vec::with_capacity(points.len());
        let mut total = 0;
        for &r in &stalk_ranks {
            offsets.push(total);
            total += r;
        }
        // Difference map: one block row per ordered pair (x, y) with
        // U_y ⊆ U_x, sending (s_x) to r(s_x) − s_y.
        let mut constraint_rows = 0;
        let mut pairs = Vec::new();
        for i in 0..points.len() {
            for j in 0..points.len() {
                if i != j && self.topology.is_subset(stalk_opens[j], stalk_opens[i]) {
                    pairs.push((i, j));
                    constraint_rows += stalk_ranks[j];
                }
            }
        }
        let mut diff = IntMatrix::zeros(constraint_rows, total);
        let mut at = 0;
        for &(i, j) in &pairs {
            let r = &self.maps[&(stalk_opens[j], stalk_opens[i])];
            for a in 0..stalk_ranks[j] {
                for b in 0..stalk_ranks[i] {
                    diff[(at + a, offsets[i] + b)] = r[(a, b)].clone();
                }
                diff[(at + a, offsets[j] + a)] = BigInt::from(-1);
            }
            at += stalk_ranks[j];
        }
        let basis = kernel_basis(&diff);
        MinimalLimit {
            points,
            stalk_opens,
            stalk_ranks,
            offsets,
            total,
            basis,
        }
    }

    /// Comparison map F(u) → ⊕ₓ F(U_x), the stack of restrictions to the
    /// minimal opens.
    fn comparison_matrix(&self, u: OpenId, limit: &MinimalLimit) -> IntMatrix {
        let blocks: Vec<&IntMatrix> = limit
            .stalk_opens
            .iter()
            .map(|&o| &self.maps[&(o, u)])
            .collect();
        IntMatrix::vstack(&blocks, self.rank(u))
    }

    /// Decides the sheaf condition structurally: F(∅) must vanish and each
    /// comparison map into the limit of minimal-open stalks must be an
    /// isomorphism over ℤ. Lists every failing open with its failure kind.
    pub fn is_sheaf(&self) -> SheafReport {
        let mut failures = Vec::new();
        for u in self.topology.open_ids() {
            if u == self.topology.empty_open() {
                if self.rank(u) != 0 {
                    failures.push(SheafFailure {
                        open: u,
                        kind: SheafFailureKind::EmptySet,
                    });
                }
                continue;
            }
            let limit = self.minimal_limit(u);
            let comparison = self.comparison_matrix(u, &limit);
            let in_limit_coords = solve_matrix(&limit.basis, &comparison)
                .expect("limit basis and comparison share the stalk sum");
            let Some(coords) = in_limit_coords else {
                // The restriction family of F(u) itself violates the limit
                // constraints; only possible for law-violating presheaves.
                failures.push(SheafFailure {
                    open: u,
                    kind: SheafFailureKind::Existence,
                });
                continue;
            };
            let snf = crate::algebra::smith_normal_form(&coords);
            let rank = snf.rank();
            let unit_factors = snf
                .invariant_factors()
                .into_iter()
                .all(|d| d == BigInt::from(1));
            if rank < coords.cols() {
                failures.push(SheafFailure {
                    open: u,
                    kind: SheafFailureKind::Uniqueness,
                });
            }
            if rank < coords.rows() || !unit_factors {
                failures.push(SheafFailure {
                    open: u,
                    kind: SheafFailureKind::Existence,
                });
            }
        }
        SheafReport { failures }
    }

    /// Sheafification: P⁺(U) is the limit of stalks over minimal opens,
    /// restrictions are family projections, and the unit expresses each
    /// restriction family of P in the limit basis. The result satisfies
    /// the sheaf condition.
    pub fn sheafify(&self) -> Sheafification {
        let topology = self.topology.clone();
        let limits: Vec<MinimalLimit> = topology
            .open_ids()
            .map(|u| self.minimal_limit(u))
            .collect();
        let ranks: Vec<usize> = limits.iter().map(|l| l.basis.cols()).collect();
        let mut maps = BTreeMap::new();
        for (v, u) in topology.inclusion_pairs() {
            if v == u {
                maps.insert((u, u), IntMatrix::identity(ranks[u.0]));
                continue;
            }
            let lu = &limits[u.0];
            let lv = &limits[v.0];
            // Project the limit basis of u onto the stalk blocks of v's points.
            let mut projected = IntMatrix::zeros(lv.total, lu.basis.cols());
            for (vi, &p) in lv.points.iter().enumerate() {
                let ui = lu
                    .points
                    .iter()
                    .position(|&q| q == p)
                    .expect("points of v are points of u");
                for a in 0..lv.stalk_ranks[vi] {
                    for c in 0..lu.basis.cols() {
                        projected[(lv.offsets[vi] + a, c)] =
                            lu.basis[(lu.offsets[ui] + a, c)].clone();
                    }
                }
            }
            let coords = solve_matrix(&lv.basis, &projected)
                .expect("shapes agree")
                .expect("projected families satisfy the limit constraints");
            maps.insert((v, u), coords);
        }
        let mut units = Vec::with_capacity(topology.open_count());
        for u in topology.open_ids() {
            let limit = &limits[u.0];
            let comparison = self.comparison_matrix(u, limit);
            let unit = solve_matrix(&limit.basis, &comparison)
                .expect("shapes agree")
                .expect("restriction families of a functorial presheaf satisfy the limit constraints");
            units.push(unit);
        }
        Sheafification {
            sheaf: Presheaf {
                topology,
                ranks,
                maps,
            },
            units,
        }
    }

    /// The stalk at a point: for finite spaces, the value on the point's
    /// minimal open.
    pub fn stalk(&self, point: &str) -> Result<Stalk, PresheafError> {
        let open = self
            .topology
            .minimal_open(point)
            .map_err(|e| match e {
                TopologyError::UnknownPoint(p) => PresheafError::UnknownPoint(p),
                other => PresheafError::Topology(other),
            })?;
        Ok(Stalk {
            point: point.to_string(),
            open,
            rank: self.rank(open),
        })
    }
}

struct MinimalLimit {
    points: Vec<usize>,
    stalk_opens: Vec<OpenId>,
    stalk_ranks: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
    basis: IntMatrix,
}

/// Functor-law audit result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafReport {
    pub identity_violations: Vec<OpenId>,
    /// Triples (W, V, U) with W ⊆ V ⊆ U where r^V_W · r^U_V ≠ r^U_W.
    pub composition_violations: Vec<(OpenId, OpenId, OpenId)>,
}

impl PresheafReport {
    pub fn is_valid(&self) -> bool {
        self.identity_violations.is_empty() && self.composition_violations.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompatibilityError {
    #[error("cover has {expected} parts but {got} sections were given")]
    WrongSectionCount { expected: usize, got: usize },
    #[error("section {index} lives on {got}, expected cover part {expected}")]
    SectionOpenMismatch {
        index: usize,
        expected: OpenId,
        got: OpenId,
    },
    #[error("sections disagree on the overlap {}", .0.overlap)]
    Conflict(Box<OverlapConflict>),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
}

/// First conflicting pair found by the compatibility check, with both
/// restricted values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapConflict {
    pub left_part: usize,
    pub right_part: usize,
    pub overlap: OpenId,
    pub left_value: Vec<BigInt>,
    pub right_value: Vec<BigInt>,
}

/// A family of sections that agrees on all pairwise overlaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleFamily {
    pub cover: Cover,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlueOutcome {
    /// Exactly one section restricts to the family.
    Unique(Section),
    /// A particular gluing plus a kernel basis of the ambiguity.
    Multiple { section: Section, kernel: IntMatrix },
    /// No section restricts to the family.
    NoSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SheafFailureKind {
    /// F(∅) has positive rank; the empty cover forces the zero module.
    EmptySet,
    /// Some compatible family has no gluing.
    Existence,
    /// Some compatible family has more than one gluing.
    Uniqueness,
}

impl SheafFailureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SheafFailureKind::EmptySet => "empty-set",
            SheafFailureKind::Existence => "existence",
            SheafFailureKind::Uniqueness => "uniqueness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafFailure {
    pub open: OpenId,
    pub kind: SheafFailureKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafReport {
    pub failures: Vec<SheafFailure>,
}

impl SheafReport {
    pub fn is_sheaf(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Result of sheafification: the sheaf plus the unit map η_U per open,
/// a rank⁺(U) × rank(U) matrix.
#[derive(Debug, Clone)]
pub struct Sheafification {
    pub sheaf: Presheaf,
    pub units: Vec<IntMatrix>,
}

impl Sheafification {
    /// True when every unit matrix is invertible over ℤ, i.e. the input was
    /// already a sheaf.
    pub fn unit_is_isomorphism(&self) -> bool {
        self.units.iter().all(IntMatrix::is_unimodular)
    }
}

/// Value of a presheaf at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stalk {
    pub point: String,
    pub open: OpenId,
    pub rank: usize,
}

/// Glues after checking compatibility; convenience used by the CLI.
pub fn check_and_glue(
    presheaf: &Presheaf,
    cover: &Cover,
    sections: Vec<Section>,
) -> Result<GlueOutcome, CompatibilityError> {
    let report = check_cover(presheaf.topology(), cover);
    if !report.is_valid() {
        return Err(CompatibilityError::Presheaf(PresheafError::Topology(
            TopologyError::BadOpenIndex {
                index: cover.covered.0,
                count: presheaf.topology().open_count(),
            },
        )));
    }
    let family = presheaf.check_compatibility(cover, sections)?;
    Ok(presheaf.glue(&family))
}
