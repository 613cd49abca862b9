//! Exact integer linear algebra: Smith normal form, kernel bases, linear
//! system solving and quotients of free abelian groups.
//!
//! Everything works over arbitrary-precision integers; intermediate entries
//! in a Smith reduction can grow far beyond machine words even for small
//! inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("image column {column} does not lie in the span of the kernel basis")]
    ImageNotContained { column: usize },
    #[error("torsion coefficients must each be >= 2 and form a divisibility chain")]
    MalformedTorsion,
}

/// Dense integer matrix in row-major order. Zero-row and zero-column
/// matrices are legal and stand for maps to or from the zero module.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::DimensionMismatch {
                context: format!(
                    "{}x{} matrix needs {} entries, got {}",
                    rows,
                    cols,
                    rows * cols,
                    entries.len()
                ),
            });
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    /// Convenience constructor from machine integers. Panics when the entry
    /// count does not match the shape; meant for literals in tests and demos.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must match shape");
        IntMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Matrix product self · other. Panics on incompatible shapes; callers
    /// that take shapes from external input must validate first.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(
            self.cols, other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length must match column count");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns_range(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let cols = range.len();
        let mut out = IntMatrix::zeros(self.rows, cols);
        for (jo, j) in range.enumerate() {
            for i in 0..self.rows {
                out[(i, jo)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Stacks blocks vertically; all blocks must share a column count.
    pub fn vstack(blocks: &[&IntMatrix], cols: usize) -> IntMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = IntMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack blocks must share column count");
            for i in 0..b.rows {
                for j in 0..cols {
                    out[(at + i, j)] = b[(i, j)].clone();
                }
            }
            at += b.rows;
        }
        out
    }

    pub fn negated(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] -= q * row[source]
    fn row_sub_scaled(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let delta = q * &self[(source, j)];
            self[(target, j)] -= delta;
        }
    }

    /// col[target] -= q * col[source]
    fn col_sub_scaled(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let delta = q * &self[(i, source)];
            self[(i, target)] -= delta;
        }
    }

    /// row[target] += row[source]
    fn row_add(&mut self, target: usize, source: usize) {
        for j in 0..self.cols {
            let v = self[(source, j)].clone();
            self[(target, j)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self[(r, j)].clone();
            self[(r, j)] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self[(i, c)].clone();
            self[(i, c)] = v;
        }
    }

    /// Rank over ℚ, read off the Smith normal form.
    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    /// True for square matrices invertible over ℤ.
    pub fn is_unimodular(&self) -> bool {
        self.is_square() && smith_normal_form(self).diagonal.is_identity()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Decomposition U·A·V = D with U, V unimodular and D diagonal with a
/// nonnegative divisibility chain d₁ | d₂ | …
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub left: IntMatrix,
    pub diagonal: IntMatrix,
    pub right: IntMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        let lim = self.diagonal.rows().min(self.diagonal.cols());
        (0..lim)
            .take_while(|&k| !self.diagonal[(k, k)].is_zero())
            .count()
    }

    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank())
            .map(|k| self.diagonal[(k, k)].clone())
            .collect()
    }
}

fn pivot_position(d: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in k..d.rows() {
        for j in k..d.cols() {
            let e = &d[(i, j)];
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best {
                Some((ba, _, _)) if *ba <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smith normal form by row/column reduction. The pivot is always the
/// entry of smallest nonzero absolute value (ties: lowest row, then column),
/// which keeps the output deterministic and limits entry growth.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let m = a.rows();
    let n = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let limit = m.min(n);

    for k in 0..limit {
        loop {
            let Some((pi, pj)) = pivot_position(&d, k) else {
                break;
            };
            if pi != k {
                d.swap_rows(k, pi);
                u.swap_rows(k, pi);
            }
            if pj != k {
                d.swap_cols(k, pj);
                v.swap_cols(k, pj);
            }
            for i in (k + 1)..m {
                if !d[(i, k)].is_zero() {
                    let q = d[(i, k)].div_floor(&d[(k, k)]);
                    if !q.is_zero() {
                        d.row_sub_scaled(i, k, &q);
                        u.row_sub_scaled(i, k, &q);
                    }
                }
            }
            for j in (k + 1)..n {
                if !d[(k, j)].is_zero() {
                    let q = d[(k, j)].div_floor(&d[(k, k)]);
                    if !q.is_zero() {
                        d.col_sub_scaled(j, k, &q);
                        v.col_sub_scaled(j, k, &q);
                    }
                }
            }
            let col_clean = ((k + 1)..m).all(|i| d[(i, k)].is_zero());
            let row_clean = ((k + 1)..n).all(|j| d[(k, j)].is_zero());
            if !(col_clean && row_clean) {
                continue;
            }
            // Pivot must divide the remaining submatrix for the
            // divisibility chain; fold an offending row in and retry.
            let offender = ((k + 1)..m)
                .flat_map(|i| ((k + 1)..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].mod_floor(&d[(k, k)]).is_zero());
            match offender {
                Some((i, _)) => {
                    d.row_add(k, i);
                    u.row_add(k, i);
                }
                None => break,
            }
        }
    }
    for k in 0..limit {
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
    }
    SnfResult {
        left: u,
        diagonal: d,
        right: v,
    }
}

fn kernel_from_snf(snf: &SnfResult, cols: usize) -> IntMatrix {
    let r = snf.rank();
    let mut k = snf.right.columns_range(r..cols);
    // Sign-normalize each basis column: first nonzero entry positive.
    for j in 0..k.cols() {
        let lead = (0..k.rows()).find(|&i| !k[(i, j)].is_zero());
        if let Some(i) = lead {
            if k[(i, j)].is_negative() {
                k.negate_col(j);
            }
        }
    }
    k
}

/// Basis of the integer kernel {x : A·x = 0}, one basis vector per column.
/// The basis is saturated: every integer point of the rational kernel is an
/// integer combination of the columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    kernel_from_snf(&snf, a.cols())
}

/// Outcome of an exact linear solve A·x = b over ℤ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// One particular solution plus a kernel basis describing all others.
    Solution {
        particular: Vec<BigInt>,
        kernel: IntMatrix,
    },
    /// No integer solution exists.
    NoSolution,
}

fn solve_with_snf(snf: &SnfResult, rows: usize, cols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = snf.left.mul_vec(b);
    let mut y = vec![BigInt::zero(); cols];
    let lim = rows.min(cols);
    for k in 0..lim {
        let dkk = &snf.diagonal[(k, k)];
        if dkk.is_zero() {
            if !c[k].is_zero() {
                return None;
            }
        } else {
            let (q, r) = c[k].div_rem(dkk);
            if !r.is_zero() {
                return None;
            }
            y[k] = q;
        }
    }
    for ck in c.iter().skip(lim) {
        if !ck.is_zero() {
            return None;
        }
    }
    Some(snf.right.mul_vec(&y))
}

pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Result<SolveOutcome, AlgebraError> {
    if b.len() != a.rows() {
        return Err(AlgebraError::DimensionMismatch {
            context: format!(
                "right-hand side has {} entries, matrix has {} rows",
                b.len(),
                a.rows()
            ),
        });
    }
    let snf = smith_normal_form(a);
    match solve_with_snf(&snf, a.rows(), a.cols(), b) {
        None => Ok(SolveOutcome::NoSolution),
        Some(particular) => Ok(SolveOutcome::Solution {
            particular,
            kernel: kernel_from_snf(&snf, a.cols()),
        }),
    }
}

/// Solves A·X = B column by column, returning one particular X.
/// `None` when some column has no integer solution. The Smith form of A is
/// computed once and shared across columns.
pub fn solve_matrix(a: &IntMatrix, b: &IntMatrix) -> Result<Option<IntMatrix>, AlgebraError> {
    if a.rows() != b.rows() {
        return Err(AlgebraError::DimensionMismatch {
            context: format!("A has {} rows, B has {}", a.rows(), b.rows()),
        });
    }
    let snf = smith_normal_form(a);
    let mut x = IntMatrix::zeros(a.cols(), b.cols());
    for j in 0..b.cols() {
        match solve_with_snf(&snf, a.rows(), a.cols(), &b.column(j)) {
            Some(particular) => {
                for i in 0..a.cols() {
                    x[(i, j)] = particular[i].clone();
                }
            }
            None => return Ok(None),
        }
    }
    Ok(Some(x))
}

/// A finitely generated abelian group ℤ^betti ⊕ ⊕ᵢ ℤ/torsionᵢ in canonical
/// divisibility-sorted form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FGAbelianGroup {
    betti: usize,
    torsion: Vec<BigInt>,
}

impl FGAbelianGroup {
    pub fn new(betti: usize, torsion: Vec<BigInt>) -> Result<Self, AlgebraError> {
        let two = BigInt::from(2);
        for w in torsion.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(AlgebraError::MalformedTorsion);
            }
        }
        if torsion.iter().any(|t| t < &two) {
            return Err(AlgebraError::MalformedTorsion);
        }
        Ok(FGAbelianGroup { betti, torsion })
    }

    pub fn free(betti: usize) -> Self {
        FGAbelianGroup {
            betti,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn betti(&self) -> usize {
        self.betti
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Serializes an integer as a JSON number when it fits in i64, falling back
/// to a decimal string for larger magnitudes.
pub fn bigint_to_json(x: &BigInt) -> serde_json::Value {
    match i64::try_from(x.clone()) {
        Ok(n) => serde_json::Value::Number(n.into()),
        Err(_) => serde_json::Value::String(x.to_string()),
    }
}

/// Reads an integer from either JSON form accepted by [`bigint_to_json`].
pub fn bigint_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(BigInt::from(i))
            } else {
                n.as_u64().map(BigInt::from)
            }
        }
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Quotient of the lattice spanned by `ker` by the sublattice generated by
/// the columns of `im`. The `im` columns need not be independent; they must
/// lie in the integer span of `ker` (checked).
pub fn quotient_group(ker: &IntMatrix, im: &IntMatrix) -> Result<FGAbelianGroup, AlgebraError> {
    if ker.rows() != im.rows() {
        return Err(AlgebraError::DimensionMismatch {
            context: format!(
                "kernel basis lives in rank {}, image in rank {}",
                ker.rows(),
                im.rows()
            ),
        });
    }
    let mut coords = IntMatrix::zeros(ker.cols(), im.cols());
    for j in 0..im.cols() {
        match solve(ker, &im.column(j))? {
            SolveOutcome::Solution { particular, .. } => {
                for i in 0..ker.cols() {
                    coords[(i, j)] = particular[i].clone();
                }
            }
            SolveOutcome::NoSolution => {
                return Err(AlgebraError::ImageNotContained { column: j });
            }
        }
    }
    let snf = smith_normal_form(&coords);
    let factors = snf.invariant_factors();
    let betti = ker.cols() - factors.len();
    let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
    FGAbelianGroup::new(betti, torsion)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Independent oracle: invariant factors from gcds of k×k minors.
    /// Exponential in the matrix size; only for small matrices.
    fn minor_gcd_factors(a: &IntMatrix) -> Vec<BigInt> {
        fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in combinations(n, k - 1) {
                    if rest.iter().all(|&r| r > first) {
                        let mut c = vec![first];
                        c.append(&mut rest);
                        out.push(c);
                    }
                }
            }
            out
        }
        fn det(a: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
            if rows.is_empty() {
                return BigInt::one();
            }
            let mut acc = BigInt::zero();
            let rest: Vec<usize> = rows[1..].to_vec();
            for (jj, &c) in cols.iter().enumerate() {
                let mut sub_cols: Vec<usize> = cols.to_vec();
                sub_cols.remove(jj);
                let term = &a[(rows[0], c)] * det(a, &rest, &sub_cols);
                if jj % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let mut factors = Vec::new();
        let mut prev = BigInt::one();
        for k in 1..=a.rows().min(a.cols()) {
            let mut g = BigInt::zero();
            for rows in combinations(a.rows(), k) {
                for cols in combinations(a.cols(), k) {
                    g = g.gcd(&det(a, &rows, &cols));
                }
            }
            if g.is_zero() {
                break;
            }
            factors.push(&g / &prev);
            prev = g;
        }
        factors
    }

    fn assert_snf_invariants(a: &IntMatrix) {
        let snf = smith_normal_form(a);
        assert_eq!(snf.left.mul(a).mul(&snf.right), snf.diagonal);
        assert!(snf.left.is_unimodular(), "left transform not unimodular");
        assert!(snf.right.is_unimodular(), "right transform not unimodular");
        let factors = snf.invariant_factors();
        for w in factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
        }
        assert!(factors.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn snf_diag_2_3() {
        let a = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal, IntMatrix::from_i64(2, 2, &[1, 0, 0, 6]));
        assert_snf_invariants(&a);
        assert_eq!(minor_gcd_factors(&a), vec![big(1), big(6)]);
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(3);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal, IntMatrix::identity(3));
    }

    #[test]
    fn snf_2_4_6_8() {
        let a = IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal, IntMatrix::from_i64(2, 2, &[2, 0, 0, 4]));
        assert_snf_invariants(&a);
        assert_eq!(minor_gcd_factors(&a), vec![big(2), big(4)]);
    }

    #[test]
    fn snf_zero_and_empty_shapes() {
        for a in [
            IntMatrix::zeros(0, 0),
            IntMatrix::zeros(0, 3),
            IntMatrix::zeros(3, 0),
            IntMatrix::zeros(2, 2),
        ] {
            let snf = smith_normal_form(&a);
            assert_eq!(snf.rank(), 0);
            assert_eq!(snf.left.mul(&a).mul(&snf.right), snf.diagonal);
        }
    }

    #[test]
    fn kernel_of_sum_map() {
        let a = IntMatrix::from_i64(1, 2, &[1, 1]);
        let k = kernel_basis(&a);
        assert_eq!(k, IntMatrix::from_i64(2, 1, &[1, -1]));
        assert!(a.mul(&k).is_zero());
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = kernel_basis(&IntMatrix::identity(2));
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn kernel_of_zero_map_is_full() {
        let k = kernel_basis(&IntMatrix::zeros(1, 2));
        assert_eq!(k.cols(), 2);
        assert!(k.is_unimodular());
    }

    #[test]
    fn solve_scalar_cases() {
        let a = IntMatrix::from_i64(1, 1, &[2]);
        match solve(&a, &[big(4)]).unwrap() {
            SolveOutcome::Solution { particular, kernel } => {
                assert_eq!(particular, vec![big(2)]);
                assert_eq!(kernel.cols(), 0);
            }
            SolveOutcome::NoSolution => panic!("2x = 4 is solvable"),
        }
        assert_eq!(solve(&a, &[big(3)]).unwrap(), SolveOutcome::NoSolution);
    }

    #[test]
    fn solve_underdetermined_enumeration_oracle() {
        let a = IntMatrix::from_i64(1, 2, &[1, 1]);
        let SolveOutcome::Solution { particular, kernel } = solve(&a, &[big(5)]).unwrap() else {
            panic!("x + y = 5 is solvable");
        };
        assert_eq!(a.mul_vec(&particular), vec![big(5)]);
        assert_eq!(kernel.cols(), 1);
        // Every small solution must be particular + t * kernel column.
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                if x + y != 5 {
                    continue;
                }
                let dx = big(x) - &particular[0];
                let dy = big(y) - &particular[1];
                let (k0, k1) = (&kernel[(0, 0)], &kernel[(1, 0)]);
                assert_eq!(&dx * k1, &dy * k0, "({x},{y}) not on the solution line");
                assert!((&dx % k0).is_zero());
            }
        }
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = IntMatrix::from_i64(1, 2, &[1, 1]);
        assert!(matches!(
            solve(&a, &[big(1), big(2)]),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quotient_examples() {
        // ℤ² / span{(1,1)} = ℤ
        let ker = IntMatrix::identity(2);
        let im = IntMatrix::from_i64(2, 1, &[1, 1]);
        let g = quotient_group(&ker, &im).unwrap();
        assert_eq!(g, FGAbelianGroup::free(1));

        // ℤ / 2ℤ
        let ker = IntMatrix::identity(1);
        let im = IntMatrix::from_i64(1, 1, &[2]);
        let g = quotient_group(&ker, &im).unwrap();
        assert_eq!(g.betti(), 0);
        assert_eq!(g.torsion(), &[big(2)]);

        // ℤ² / 0 = ℤ²
        let ker = IntMatrix::identity(2);
        let im = IntMatrix::zeros(2, 0);
        assert_eq!(quotient_group(&ker, &im).unwrap(), FGAbelianGroup::free(2));
    }

    #[test]
    fn quotient_rejects_outside_image() {
        let ker = IntMatrix::from_i64(2, 1, &[1, 0]);
        let im = IntMatrix::from_i64(2, 1, &[0, 1]);
        assert_eq!(
            quotient_group(&ker, &im),
            Err(AlgebraError::ImageNotContained { column: 0 })
        );
    }

    #[test]
    fn group_display() {
        assert_eq!(FGAbelianGroup::trivial().to_string(), "0");
        assert_eq!(FGAbelianGroup::free(1).to_string(), "Z");
        let g = FGAbelianGroup::new(2, vec![big(2), big(6)]).unwrap();
        assert_eq!(g.to_string(), "Z^2 + Z/2 + Z/6");
    }

    #[test]
    fn malformed_torsion_rejected() {
        assert!(FGAbelianGroup::new(0, vec![big(1)]).is_err());
        assert!(FGAbelianGroup::new(0, vec![big(4), big(6)]).is_err());
    }
}
