//! Shared test support: randomized generators for topologies and
//! law-abiding presheaves, plus independent oracles (Bareiss determinants
//! and simplicial cohomology of the order complex) that never touch the
//! production Smith/kernel/quotient code paths.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use sheafkit::presheaf::Presheaf;
use sheafkit::topology::{Cover, FiniteTopology, OpenId};
use sheafkit::IntMatrix;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Random topology on at most `max_points` points with a bounded open count
/// (closures of random generators can explode; oversized draws are retried).
pub fn random_topology(
    rng: &mut impl Rng,
    max_points: usize,
    max_opens: usize,
) -> Arc<FiniteTopology> {
    loop {
        let n = rng.random_range(1..=max_points);
        let full: u64 = (1 << n) - 1;
        let mut masks: BTreeSet<u64> = BTreeSet::new();
        masks.insert(0);
        masks.insert(full);
        for _ in 0..rng.random_range(0..=4) {
            masks.insert(rng.random_range(0..=full));
        }
        // close under union and intersection
        loop {
            let list: Vec<u64> = masks.iter().copied().collect();
            let before = masks.len();
            for (i, &a) in list.iter().enumerate() {
                for &b in &list[i + 1..] {
                    masks.insert(a | b);
                    masks.insert(a & b);
                }
            }
            if masks.len() == before {
                break;
            }
        }
        if masks.len() > max_opens {
            continue;
        }
        let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let opens: Vec<Vec<String>> = masks
            .iter()
            .map(|&m| {
                (0..n)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| points[i].clone())
                    .collect()
            })
            .collect();
        return Arc::new(FiniteTopology::new(points, opens).expect("closure is a topology"));
    }
}

/// Random unimodular matrix with its exact inverse, as a short product of
/// elementary row operations.
pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> (IntMatrix, IntMatrix) {
    let mut b = IntMatrix::identity(n);
    let mut b_inv = IntMatrix::identity(n);
    if n == 0 {
        return (b, b_inv);
    }
    for _ in 0..rng.random_range(0..=4) {
        match rng.random_range(0..3u32) {
            0 => {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i == j {
                    continue;
                }
                let c = rng.random_range(-2..=2i64);
                let mut e = IntMatrix::identity(n);
                e[(j, i)] = BigInt::from(c);
                let mut e_inv = IntMatrix::identity(n);
                e_inv[(j, i)] = BigInt::from(-c);
                b = e.mul(&b);
                b_inv = b_inv.mul(&e_inv);
            }
            1 => {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                let mut e = IntMatrix::zeros(n, n);
                for k in 0..n {
                    let target = if k == i { j } else if k == j { i } else { k };
                    e[(k, target)] = BigInt::one();
                }
                b = e.mul(&b);
                b_inv = b_inv.mul(&e);
            }
            _ => {
                let i = rng.random_range(0..n);
                let mut e = IntMatrix::identity(n);
                e[(i, i)] = BigInt::from(-1);
                b = e.mul(&b);
                b_inv = b_inv.mul(&e);
            }
        }
    }
    (b, b_inv)
}

/// Random presheaf that satisfies the functor laws by construction: a
/// direct sum of up-set indicator presheaves (one ℤ summand alive on the
/// opens above a random weight), conjugated by a random unimodular basis
/// change at every open. Ranks stay ≤ `max_generators` and F(∅) = 0.
pub fn random_presheaf(
    rng: &mut impl Rng,
    topology: &Arc<FiniteTopology>,
    max_generators: usize,
) -> Presheaf {
    let gen_count = rng.random_range(0..=max_generators);
    let nonempty = topology.open_count() - 1;
    let weights: Vec<OpenId> = (0..gen_count)
        .map(|_| OpenId(1 + rng.random_range(0..nonempty)))
        .collect();
    let active: Vec<Vec<usize>> = topology
        .open_ids()
        .map(|u| {
            weights
                .iter()
                .enumerate()
                .filter(|&(_, &w)| topology.is_subset(w, u))
                .map(|(g, _)| g)
                .collect()
        })
        .collect();
    let ranks: Vec<usize> = active.iter().map(Vec::len).collect();
    let bases: Vec<(IntMatrix, IntMatrix)> = ranks
        .iter()
        .map(|&r| random_unimodular(rng, r))
        .collect();
    let mut maps = BTreeMap::new();
    for (v, u) in topology.inclusion_pairs() {
        let mut base = IntMatrix::zeros(ranks[v.0], ranks[u.0]);
        for (vi, &g) in active[v.0].iter().enumerate() {
            if let Some(uj) = active[u.0].iter().position(|&h| h == g) {
                base[(vi, uj)] = BigInt::one();
            }
        }
        let m = bases[v.0].0.mul(&base).mul(&bases[u.0].1);
        maps.insert((v, u), m);
    }
    Presheaf::from_restrictions(topology.clone(), ranks, maps).expect("shapes line up")
}

/// Random cover of `covered`: a random selection of contained opens, padded
/// with minimal opens until every point is hit, capped at `max_parts`.
pub fn random_cover(
    rng: &mut impl Rng,
    topology: &FiniteTopology,
    covered: OpenId,
    max_parts: usize,
) -> Cover {
    let candidates: Vec<OpenId> = topology
        .open_ids()
        .filter(|&v| v != topology.empty_open() && topology.is_subset(v, covered))
        .collect();
    let mut parts: BTreeSet<OpenId> = BTreeSet::new();
    for &c in &candidates {
        if parts.len() + 1 >= max_parts {
            break;
        }
        if rng.random_bool(0.3) {
            parts.insert(c);
        }
    }
    let hit: BTreeSet<usize> = parts
        .iter()
        .flat_map(|&p| topology.open_point_indices(p))
        .collect();
    for i in topology.open_point_indices(covered) {
        if !hit.contains(&i) {
            let point = topology.points()[i].clone();
            parts.insert(topology.minimal_open(&point).expect("point exists"));
        }
    }
    Cover {
        covered,
        parts: parts.into_iter().collect(),
    }
}

/// Exact determinant by fraction-free Bareiss elimination; independent of
/// the Smith-form code under test.
pub fn bareiss_determinant(m: &IntMatrix) -> BigInt {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// The order complex of a finite space: simplices are strict chains in the
/// specialization preorder x ≤ y ⟺ x ∈ U_y. By McCord's theorem its weak
/// homotopy type agrees with the space, which makes its simplicial
/// cohomology an independent oracle for sheaf cohomology of the constant
/// sheaf.
pub fn order_complex(topology: &FiniteTopology) -> Vec<Vec<Vec<usize>>> {
    let n = topology.points().len();
    let mut below = vec![vec![false; n]; n];
    for (y, name) in topology.points().iter().enumerate() {
        let uy = topology.minimal_open(name).expect("point exists");
        for x in topology.open_point_indices(uy) {
            if x != y {
                below[x][y] = true; // x < y strictly
            }
        }
    }
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|v| vec![v]).collect()];
    loop {
        let last = by_dim.last().unwrap();
        let mut next = Vec::new();
        for chain in last {
            let top = *chain.last().unwrap();
            for y in 0..n {
                if below[top][y] {
                    let mut longer = chain.clone();
                    longer.push(y);
                    next.push(longer);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        by_dim.push(next);
    }
    by_dim
}

/// Integer cochain complex of a simplicial complex: returns per degree the
/// coboundary matrix into the next degree, over i128.
fn simplicial_coboundaries(by_dim: &[Vec<Vec<usize>>]) -> Vec<Vec<Vec<i128>>> {
    let mut deltas = Vec::new();
    for k in 0..by_dim.len() {
        let n_k = by_dim[k].len();
        if k + 1 >= by_dim.len() {
            deltas.push(vec![vec![0i128; n_k]; 0]);
            break;
        }
        let next = &by_dim[k + 1];
        let mut delta = vec![vec![0i128; n_k]; next.len()];
        for (ti, tau) in next.iter().enumerate() {
            for drop in 0..tau.len() {
                let mut face = tau.clone();
                face.remove(drop);
                let si = by_dim[k]
                    .binary_search(&face)
                    .expect("faces of simplices are simplices");
                delta[ti][si] += if drop % 2 == 0 { 1 } else { -1 };
            }
        }
        deltas.push(delta);
    }
    deltas
}

/// Rank of an integer matrix over ℚ by fraction-free elimination.
fn rational_rank(m: &[Vec<i128>]) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let rows = a.len();
    let cols = a[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&i| a[i][col] != 0);
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        for i in 0..rows {
            if i != row && a[i][col] != 0 {
                let (pa, pb) = (a[row][col], a[i][col]);
                for j in 0..cols {
                    a[i][j] = a[i][j] * pa - a[row][j] * pb;
                }
            }
        }
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Elementary divisors (diagonal of the Smith form) of a small integer
/// matrix. Written from scratch for the oracle; no transform tracking.
fn naive_elementary_divisors(m: &[Vec<i128>]) -> Vec<i128> {
    if m.is_empty() || m[0].is_empty() {
        return Vec::new();
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let rows = a.len();
    let cols = a[0].len();
    let mut divisors = Vec::new();
    let lim = rows.min(cols);
    for k in 0..lim {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if a[i][j] != 0 {
                        let better = match pivot {
                            None => true,
                            Some((pi, pj)) => a[i][j].abs() < a[pi][pj].abs(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish_divisors(divisors);
            };
            a.swap(k, pi);
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            let p = a[k][k];
            let mut dirty = false;
            for i in k + 1..rows {
                let q = a[i][k].div_euclid(p);
                if q != 0 {
                    for j in k..cols {
                        a[i][j] -= q * a[k][j];
                    }
                }
                if a[i][k] != 0 {
                    dirty = true;
                }
            }
            for j in k + 1..cols {
                let q = a[k][j].div_euclid(p);
                if q != 0 {
                    for i in k..rows {
                        a[i][j] -= q * a[i][k];
                    }
                }
                if a[k][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            let offender = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| a[i][j].rem_euclid(p.abs()) != 0);
            match offender {
                Some((i, _)) => {
                    for j in k..cols {
                        a[k][j] += a[i][j];
                    }
                }
                None => {
                    divisors.push(p.abs());
                    break;
                }
            }
        }
    }
    finish_divisors(divisors)
}

fn finish_divisors(divisors: Vec<i128>) -> Vec<i128> {
    divisors.into_iter().filter(|&d| d != 0).collect()
}

/// Betti number and torsion coefficients per degree of the simplicial
/// cohomology H^k = ker δ^k / im δ^{k−1} with integer coefficients.
/// Ranks are computed twice (elimination and divisor count) as an internal
/// cross-check.
pub fn simplicial_cohomology(by_dim: &[Vec<Vec<usize>>]) -> Vec<(usize, Vec<i128>)> {
    let deltas = simplicial_coboundaries(by_dim);
    let mut out = Vec::new();
    for k in 0..by_dim.len() {
        let n_k = by_dim[k].len();
        let rank_k = rational_rank(&deltas[k]);
        let (rank_prev, torsion) = if k == 0 {
            (0, Vec::new())
        } else {
            let divisors = naive_elementary_divisors(&deltas[k - 1]);
            let rank_prev = rational_rank(&deltas[k - 1]);
            assert_eq!(divisors.len(), rank_prev, "oracle rank routes disagree");
            (
                rank_prev,
                divisors.into_iter().filter(|&d| d > 1).collect(),
            )
        };
        let betti = n_k - rank_k - rank_prev;
        out.push((betti, torsion));
    }
    out
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let entries: Vec<BigInt> = (0..rows * cols)
        .map(|_| BigInt::from(rng.random_range(-bound..=bound)))
        .collect();
    IntMatrix::new(rows, cols, entries).expect("entry count matches")
}

pub fn assert_unimodular_by_bareiss(m: &IntMatrix, label: &str) {
    let det = bareiss_determinant(m);
    assert!(
        det.abs().is_one(),
        "{label}: |det| = {} is not 1",
        det.abs()
    );
}
