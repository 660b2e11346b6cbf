//! Dense matrices over GF(q): the left/right column split, column-major
//! vectorization, rank computation (plain and leakage-masked), linear solving,
//! and the structured samplers used by the key generators.
//!
//! Storage is row-major; the column-major semantics of the vectorization are
//! confined to [`MatGF::vectorize`] and friends.

use std::sync::Arc;

use crate::gf::{fe_add, fe_inv, fe_mul, fe_neg, fe_sub, Fe, FieldSpec};
use crate::prg::PrgStream;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("invalid split: r = {r} must satisfy 0 < r < {n}")]
    InvalidSplit { r: usize, n: usize },
    #[error("randomness exhausted while rejection-sampling")]
    RandomnessExhausted,
}

/// An m x n matrix over GF(q).
#[derive(Clone, PartialEq, Eq)]
pub struct MatGF {
    rows: usize,
    cols: usize,
    entries: Vec<Fe>,
    field: Arc<FieldSpec>,
}

impl std::fmt::Debug for MatGF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatGF {}x{} over GF({})", self.rows, self.cols, self.field.order())?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.entries[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

/// The output of [`MatGF::sample_rank_r`]: E = S L T with L the fixed matrix
/// carrying I_r in its top-left block.
pub struct RankRSample {
    pub e: MatGF,
    pub s: MatGF,
    pub t: MatGF,
}

/// Outcome of square-system solving; `Singular` is a typed result, not an
/// error, since it drives retry loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearOutcome {
    UniqueSolution(Vec<Fe>),
    Singular,
}

/// Outcome of recovering K with E^L = E^R K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KOutcome {
    Unique(MatGF),
    NoSolution,
}

impl MatGF {
    pub fn zero(rows: usize, cols: usize, field: &Arc<FieldSpec>) -> Self {
        MatGF {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(s: usize, field: &Arc<FieldSpec>) -> Self {
        let mut m = Self::zero(s, s, field);
        for i in 0..s {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>], field: &Arc<FieldSpec>) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut m = Self::zero(r, c, field);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        debug_assert!(self.field.is_valid(v));
        self.entries[i * self.cols + j] = v;
    }

    pub fn add(&self, other: &MatGF) -> Result<MatGF, MatError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(other.entries.iter()) {
            *a = fe_add(*a, b, &self.field);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MatGF) -> Result<MatGF, MatError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(other.entries.iter()) {
            *a = fe_sub(*a, b, &self.field);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MatGF {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = fe_neg(*a, &self.field);
        }
        out
    }

    pub fn scale(&self, c: Fe) -> MatGF {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = fe_mul(c, *a, &self.field);
        }
        out
    }

    pub fn mul(&self, other: &MatGF) -> Result<MatGF, MatError> {
        if self.cols != other.rows {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatGF::zero(self.rows, other.cols, f);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = fe_mul(a, other.get(l, j), f);
                    let cur = out.get(i, j);
                    out.set(i, j, fe_add(cur, prod, f));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> MatGF {
        let mut out = MatGF::zero(self.cols, self.rows, &self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entries in column-major order: first column top-to-bottom, then the
    /// second column, etc.
    pub fn vectorize(&self) -> Vec<Fe> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.get(i, j));
            }
        }
        v
    }

    pub fn devectorize(v: &[Fe], m: usize, n: usize, field: &Arc<FieldSpec>) -> Result<MatGF, MatError> {
        if v.len() != m * n {
            return Err(MatError::DimensionMismatch(format!(
                "vector of length {} for {}x{}",
                v.len(),
                m,
                n
            )));
        }
        let mut out = MatGF::zero(m, n, field);
        for (idx, &x) in v.iter().enumerate() {
            out.set(idx % m, idx / m, x);
        }
        Ok(out)
    }

    /// The i-th entry of the vectorization, 1-based to match the notation at
    /// the API boundary.
    pub fn vec_entry(&self, i: usize) -> Result<Fe, MatError> {
        if i < 1 || i > self.rows * self.cols {
            return Err(MatError::IndexOutOfRange(i));
        }
        let idx = i - 1;
        Ok(self.get(idx % self.rows, idx / self.rows))
    }

    /// Split into the first n - r columns and the last r columns.
    pub fn split_lr(&self, r: usize) -> Result<(MatGF, MatGF), MatError> {
        if r == 0 || r >= self.cols {
            return Err(MatError::InvalidSplit { r, n: self.cols });
        }
        let nl = self.cols - r;
        let mut left = MatGF::zero(self.rows, nl, &self.field);
        let mut right = MatGF::zero(self.rows, r, &self.field);
        for i in 0..self.rows {
            for j in 0..nl {
                left.set(i, j, self.get(i, j));
            }
            for j in 0..r {
                right.set(i, j, self.get(i, nl + j));
            }
        }
        Ok((left, right))
    }

    pub fn join_lr(left: &MatGF, right: &MatGF) -> Result<MatGF, MatError> {
        if left.rows != right.rows {
            return Err(MatError::DimensionMismatch(format!(
                "join {}x{} | {}x{}",
                left.rows, left.cols, right.rows, right.cols
            )));
        }
        let mut out = MatGF::zero(left.rows, left.cols + right.cols, &left.field);
        for i in 0..left.rows {
            for j in 0..left.cols {
                out.set(i, j, left.get(i, j));
            }
            for j in 0..right.cols {
                out.set(i, left.cols + j, right.get(i, j));
            }
        }
        Ok(out)
    }

    /// Row rank via partial-pivot Gaussian elimination. Public data only;
    /// secret-dependent matrices go through [`MatGF::rank_leakfree`].
    pub fn rank(&self) -> usize {
        let mut work = self.entries.clone();
        let (m, n) = (self.rows, self.cols);
        let f = &self.field;
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let pivot = (rank..m).find(|&i| work[i * n + col] != 0);
            let Some(pi) = pivot else { continue };
            if pi != rank {
                for j in 0..n {
                    work.swap(pi * n + j, rank * n + j);
                }
            }
            let inv = fe_inv(work[rank * n + col], f).expect("pivot is nonzero");
            for j in col..n {
                work[rank * n + j] = fe_mul(inv, work[rank * n + j], f);
            }
            for i in 0..m {
                if i == rank {
                    continue;
                }
                let factor = work[i * n + col];
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let sub = fe_mul(factor, work[rank * n + j], f);
                    work[i * n + j] = fe_sub(work[i * n + j], sub, f);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Rank of a secret matrix: mask it as S A T for fresh invertible S, T,
    /// then run the plain elimination on the masked value. The timing of the
    /// plain pass then depends only on the masked (uniformly re-randomized)
    /// matrix, not on A's entries.
    pub fn rank_leakfree(&self, prg: &mut PrgStream) -> Result<usize, MatError> {
        let s = MatGF::sample_invertible(prg, self.rows, &self.field)?;
        let t = MatGF::sample_invertible(prg, self.cols, &self.field)?;
        let masked = s.mul(self)?.mul(&t)?;
        Ok(masked.rank())
    }

    fn check_same_shape(&self, other: &MatGF) -> Result<(), MatError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn sample_uniform(prg: &mut PrgStream, m: usize, n: usize, field: &Arc<FieldSpec>) -> MatGF {
        prg.next_matrix(m, n, field)
    }

    /// Rejection-samples an invertible s x s matrix. The expected attempt
    /// count is below 4 for every supported field; 100 attempts is the hard
    /// cap before reporting exhaustion.
    pub fn sample_invertible(
        prg: &mut PrgStream,
        s: usize,
        field: &Arc<FieldSpec>,
    ) -> Result<MatGF, MatError> {
        for _ in 0..100 {
            let cand = prg.next_matrix(s, s, field);
            if cand.rank() == s {
                return Ok(cand);
            }
        }
        Err(MatError::RandomnessExhausted)
    }

    /// E = S L T with L = (I_r | 0; 0 | 0), so rank(E) = r exactly.
    pub fn sample_rank_r(
        prg: &mut PrgStream,
        m: usize,
        n: usize,
        r: usize,
        field: &Arc<FieldSpec>,
    ) -> Result<RankRSample, MatError> {
        assert!(r <= m.min(n));
        let s = MatGF::sample_invertible(prg, m, field)?;
        let t = MatGF::sample_invertible(prg, n, field)?;
        let mut l = MatGF::zero(m, n, field);
        for i in 0..r {
            l.set(i, i, 1);
        }
        let e = s.mul(&l)?.mul(&t)?;
        Ok(RankRSample { e, s, t })
    }

    /// Solves A x = b for square A with a fixed-shape Gauss-Jordan pass:
    /// pivot repair, normalization, and elimination all run unconditionally
    /// with masked row updates, so the work done is independent of the
    /// entries. Required by the retry loop that handles secret data.
    pub fn solve_linear(&self, b: &[Fe]) -> Result<LinearOutcome, MatError> {
        let k = self.rows;
        if self.cols != k {
            return Err(MatError::DimensionMismatch(format!(
                "solve_linear needs square A, got {}x{}",
                self.rows, self.cols
            )));
        }
        if b.len() != k {
            return Err(MatError::DimensionMismatch(format!(
                "rhs length {} for {}x{} system",
                b.len(),
                k,
                k
            )));
        }
        let f = &self.field;
        let w = k + 1;
        let mut aug = vec![0 as Fe; k * w];
        for i in 0..k {
            for j in 0..k {
                aug[i * w + j] = self.get(i, j);
            }
            aug[i * w + k] = b[i];
        }
        let mut singular: u16 = 0;
        for col in 0..k {
            // pivot repair: fold lower rows into the pivot row whenever the
            // pivot is still zero, via 0/1 field multipliers (no branches on
            // entry values)
            for i in col + 1..k {
                let pivot_zero = (aug[col * w + col] == 0) as Fe;
                let row_nonzero = (aug[i * w + col] != 0) as Fe;
                let flag = fe_mul(pivot_zero, row_nonzero, f);
                for j in col..w {
                    let add = fe_mul(flag, aug[i * w + j], f);
                    aug[col * w + j] = fe_add(aug[col * w + j], add, f);
                }
            }
            let pivot = aug[col * w + col];
            let pivot_zero = (pivot == 0) as Fe;
            singular |= pivot_zero;
            // substitute 1 when singular so the pass keeps its fixed shape
            let safe_pivot = fe_add(pivot, pivot_zero, f);
            let inv = fe_inv(safe_pivot, f).expect("safe pivot is nonzero");
            for j in col..w {
                aug[col * w + j] = fe_mul(inv, aug[col * w + j], f);
            }
            for i in 0..k {
                if i == col {
                    continue;
                }
                let factor = aug[i * w + col];
                for j in col..w {
                    let sub = fe_mul(factor, aug[col * w + j], f);
                    aug[i * w + j] = fe_sub(aug[i * w + j], sub, f);
                }
            }
        }
        if singular != 0 {
            return Ok(LinearOutcome::Singular);
        }
        Ok(LinearOutcome::UniqueSolution(
            (0..k).map(|i| aug[i * w + k]).collect(),
        ))
    }

    /// Inverse of a square matrix, or None when singular. Public data only.
    pub fn inverse(&self) -> Option<MatGF> {
        let s = self.rows;
        if self.cols != s {
            return None;
        }
        let f = &self.field;
        let w = 2 * s;
        let mut work = vec![0 as Fe; s * w];
        for i in 0..s {
            for j in 0..s {
                work[i * w + j] = self.get(i, j);
            }
            work[i * w + s + i] = 1;
        }
        for col in 0..s {
            let pi = (col..s).find(|&i| work[i * w + col] != 0)?;
            if pi != col {
                for j in 0..w {
                    work.swap(pi * w + j, col * w + j);
                }
            }
            let inv = fe_inv(work[col * w + col], f).expect("pivot nonzero");
            for j in 0..w {
                work[col * w + j] = fe_mul(inv, work[col * w + j], f);
            }
            for i in 0..s {
                if i == col {
                    continue;
                }
                let factor = work[i * w + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..w {
                    let sub = fe_mul(factor, work[col * w + j], f);
                    work[i * w + j] = fe_sub(work[i * w + j], sub, f);
                }
            }
        }
        let mut out = MatGF::zero(s, s, f);
        for i in 0..s {
            for j in 0..s {
                out.set(i, j, work[i * w + s + j]);
            }
        }
        Some(out)
    }

    /// Recovers the unique K with E^L = E^R K when E^R has full column rank,
    /// i.e. when E lies in the set of rank-r matrices whose right block spans
    /// the column space.
    pub fn solve_k_matrix(&self, r: usize) -> Result<KOutcome, MatError> {
        let (left, right) = self.split_lr(r)?;
        let m = self.rows;
        let nl = left.cols();
        // eliminate on [E^R | E^L]
        let aug = MatGF::join_lr(&right, &left)?;
        let w = aug.cols();
        let mut work = aug.entries;
        let f = &self.field;
        let mut pivot_row = 0usize;
        for col in 0..r {
            let pi = (pivot_row..m).find(|&i| work[i * w + col] != 0);
            let Some(pi) = pi else {
                return Ok(KOutcome::NoSolution); // column rank below r
            };
            if pi != pivot_row {
                for j in 0..w {
                    work.swap(pi * w + j, pivot_row * w + j);
                }
            }
            let inv = fe_inv(work[pivot_row * w + col], f).expect("pivot nonzero");
            for j in col..w {
                work[pivot_row * w + j] = fe_mul(inv, work[pivot_row * w + j], f);
            }
            for i in 0..m {
                if i == pivot_row {
                    continue;
                }
                let factor = work[i * w + col];
                if factor == 0 {
                    continue;
                }
                for j in col..w {
                    let sub = fe_mul(factor, work[pivot_row * w + j], f);
                    work[i * w + j] = fe_sub(work[i * w + j], sub, f);
                }
            }
            pivot_row += 1;
        }
        // consistency: rows below the r pivots must have vanished entirely
        for i in r..m {
            for j in r..w {
                if work[i * w + j] != 0 {
                    return Ok(KOutcome::NoSolution);
                }
            }
        }
        let mut k_mat = MatGF::zero(r, nl, f);
        for i in 0..r {
            for j in 0..nl {
                k_mat.set(i, j, work[i * w + r + j]);
            }
        }
        Ok(KOutcome::Unique(k_mat))
    }
}

/// Row-vector times matrix, used by the solution transform.
pub fn row_vec_mul(v: &[Fe], m: &MatGF) -> Result<Vec<Fe>, MatError> {
    if v.len() != m.rows() {
        return Err(MatError::DimensionMismatch(format!(
            "row vector of length {} times {}x{}",
            v.len(),
            m.rows(),
            m.cols()
        )));
    }
    let f = m.field();
    let mut out = vec![0 as Fe; m.cols()];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..m.cols() {
            out[j] = fe_add(out[j], fe_mul(vi, m.get(i, j), f), f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prg::Seed;

    fn gf(q: u32) -> Arc<FieldSpec> {
        FieldSpec::of_order(q).unwrap()
    }

    fn stream(tag: &[u8]) -> PrgStream {
        PrgStream::init(&Seed::new(vec![7u8; 16], 128).unwrap(), tag)
    }

    #[test]
    fn mul_examples() {
        let f2 = gf(2);
        let a = MatGF::from_rows(&[vec![1, 1], vec![0, 1]], &f2);
        let b = MatGF::from_rows(&[vec![1, 0], vec![1, 1]], &f2);
        let c = a.mul(&b).unwrap();
        assert_eq!(c, MatGF::from_rows(&[vec![0, 1], vec![1, 1]], &f2));
        let f16 = gf(16);
        let i3 = MatGF::identity(3, &f16);
        let m = stream(b"A").next_matrix(3, 3, &f16);
        assert_eq!(i3.mul(&m).unwrap(), m);
        // char 2: A + A = 0
        assert_eq!(m.add(&m).unwrap(), MatGF::zero(3, 3, &f16));
    }

    #[test]
    fn dimension_mismatch() {
        let f = gf(16);
        let a = MatGF::zero(2, 3, &f);
        let b = MatGF::zero(2, 3, &f);
        assert!(matches!(a.mul(&b), Err(MatError::DimensionMismatch(_))));
        assert!(a.add(&MatGF::zero(3, 2, &f)).is_err());
    }

    #[test]
    fn vectorize_is_column_major() {
        let f = gf(16);
        let a = MatGF::from_rows(&[vec![1, 2], vec![3, 4]], &f);
        assert_eq!(a.vectorize(), vec![1, 3, 2, 4]);
        assert_eq!(a.vec_entry(1).unwrap(), 1);
        assert_eq!(a.vec_entry(2).unwrap(), 3);
        assert!(a.vec_entry(0).is_err());
        assert!(a.vec_entry(5).is_err());
        let b = MatGF::devectorize(&[0, 1, 1, 0], 2, 2, &f).unwrap();
        assert_eq!(b, MatGF::from_rows(&[vec![0, 1], vec![1, 0]], &f));
        let round = MatGF::devectorize(&a.vectorize(), 2, 2, &f).unwrap();
        assert_eq!(round, a);
        assert_eq!(MatGF::identity(3, &f).vec_entry(1).unwrap(), 1);
    }

    #[test]
    fn split_join_round_trip() {
        let f = gf(16);
        let i3 = MatGF::identity(3, &f);
        let (l, r) = i3.split_lr(1).unwrap();
        assert_eq!(l.cols(), 2);
        assert_eq!(r.cols(), 1);
        assert_eq!(MatGF::join_lr(&l, &r).unwrap(), i3);
        assert!(matches!(i3.split_lr(0), Err(MatError::InvalidSplit { .. })));
        assert!(matches!(i3.split_lr(3), Err(MatError::InvalidSplit { .. })));
        let mut prg = stream(b"SJ");
        let a = prg.next_matrix(4, 5, &f);
        let (l, r) = a.split_lr(2).unwrap();
        assert_eq!(MatGF::join_lr(&l, &r).unwrap(), a);
    }

    #[test]
    fn split_lr_with_known_k() {
        // build E = (E^R K | E^R), then verify E^R K = E^L
        let f = gf(16);
        let mut prg = stream(b"EK");
        let er = prg.next_matrix(4, 2, &f);
        let k = prg.next_matrix(2, 3, &f);
        let e = MatGF::join_lr(&er.mul(&k).unwrap(), &er).unwrap();
        let (el, er2) = e.split_lr(2).unwrap();
        assert_eq!(er2.mul(&k).unwrap(), el);
    }

    #[test]
    fn rank_examples() {
        let f2 = gf(2);
        assert_eq!(MatGF::identity(4, &gf(16)).rank(), 4);
        assert_eq!(MatGF::zero(3, 5, &f2).rank(), 0);
        let a = MatGF::from_rows(&[vec![1, 1], vec![1, 1]], &f2);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        for q in [2u32, 3, 16] {
            let f = gf(q);
            let mut prg = stream(b"RT");
            for _ in 0..50 {
                let a = prg.next_matrix(4, 6, &f);
                assert_eq!(a.rank(), a.transpose().rank());
            }
        }
    }

    #[test]
    fn rank_invariant_under_invertible_factors() {
        let f = gf(16);
        let mut prg = stream(b"RI");
        for _ in 0..25 {
            let a = prg.next_matrix(4, 5, &f);
            let s = MatGF::sample_invertible(&mut prg, 4, &f).unwrap();
            let t = MatGF::sample_invertible(&mut prg, 5, &f).unwrap();
            assert_eq!(s.mul(&a).unwrap().mul(&t).unwrap().rank(), a.rank());
        }
    }

    #[test]
    fn rank_leakfree_agrees_with_rank() {
        let f = gf(16);
        let mut prg = stream(b"LF");
        assert_eq!(MatGF::identity(4, &f).rank_leakfree(&mut prg).unwrap(), 4);
        assert_eq!(MatGF::zero(3, 3, &f).rank_leakfree(&mut prg).unwrap(), 0);
        for m in 1..=8usize {
            for n in 1..=8usize {
                for _ in 0..20 {
                    let a = prg.next_matrix(m, n, &f);
                    assert_eq!(a.rank_leakfree(&mut prg).unwrap(), a.rank());
                }
            }
        }
    }

    #[test]
    fn solve_linear_examples() {
        let f3 = gf(3);
        let i = MatGF::identity(3, &f3);
        assert_eq!(
            i.solve_linear(&[1, 2, 0]).unwrap(),
            LinearOutcome::UniqueSolution(vec![1, 2, 0])
        );
        let z = MatGF::zero(2, 2, &f3);
        assert_eq!(z.solve_linear(&[1, 0]).unwrap(), LinearOutcome::Singular);
        let a = MatGF::from_rows(&[vec![2, 1], vec![1, 1]], &f3);
        let LinearOutcome::UniqueSolution(x) = a.solve_linear(&[1, 2]).unwrap() else {
            panic!("expected unique solution");
        };
        assert_eq!(x, vec![2, 0]);
        // substitution oracle
        let xcol = MatGF::from_rows(&[vec![x[0]], vec![x[1]]], &f3);
        let ax = a.mul(&xcol).unwrap();
        assert_eq!(ax.get(0, 0), 1);
        assert_eq!(ax.get(1, 0), 2);
    }

    #[test]
    fn solve_linear_matches_rank_condition() {
        for q in [2u32, 3, 16] {
            let f = gf(q);
            let mut prg = stream(b"SL");
            for _ in 0..100 {
                let a = prg.next_matrix(4, 4, &f);
                let b: Vec<Fe> = (0..4).map(|_| prg.next_fe(&f)).collect();
                match a.solve_linear(&b).unwrap() {
                    LinearOutcome::UniqueSolution(x) => {
                        assert_eq!(a.rank(), 4);
                        let xm = MatGF::from_rows(&x.iter().map(|&v| vec![v]).collect::<Vec<_>>(), &f);
                        let ax = a.mul(&xm).unwrap();
                        for i in 0..4 {
                            assert_eq!(ax.get(i, 0), b[i]);
                        }
                    }
                    LinearOutcome::Singular => assert!(a.rank() < 4),
                }
            }
        }
    }

    #[test]
    fn solve_k_examples() {
        let f = gf(16);
        let e = MatGF::from_rows(&[vec![1, 1], vec![0, 0]], &f);
        match e.solve_k_matrix(1).unwrap() {
            KOutcome::Unique(k) => {
                assert_eq!(k.rows(), 1);
                assert_eq!(k.get(0, 0), 1);
            }
            KOutcome::NoSolution => panic!("expected unique K"),
        }
        // E^L = 0, E^R full rank -> K = 0
        let e = MatGF::from_rows(&[vec![0, 0, 1], vec![0, 0, 0]], &f);
        match e.solve_k_matrix(1).unwrap() {
            KOutcome::Unique(k) => assert_eq!(k, MatGF::zero(1, 2, &f)),
            KOutcome::NoSolution => panic!("expected unique K"),
        }
    }

    #[test]
    fn solve_k_constructive_round_trip() {
        let f = gf(16);
        let mut prg = stream(b"KR");
        for _ in 0..50 {
            let er = loop {
                let c = prg.next_matrix(5, 2, &f);
                if c.rank() == 2 {
                    break c;
                }
            };
            let k0 = prg.next_matrix(2, 3, &f);
            let e = MatGF::join_lr(&er.mul(&k0).unwrap(), &er).unwrap();
            match e.solve_k_matrix(2).unwrap() {
                KOutcome::Unique(k) => assert_eq!(k, k0),
                KOutcome::NoSolution => panic!("constructed E must be in the solvable set"),
            }
        }
    }

    #[test]
    fn solve_k_characterization_exhaustive_gf2() {
        // both directions of the characterization, for every E over GF(2)
        // with small shapes
        let f = gf(2);
        for m in 1..=3usize {
            for n in 2..=3usize {
                for r in 1..n {
                    if r > m {
                        continue;
                    }
                    let total = 1usize << (m * n);
                    for bits in 0..total {
                        let v: Vec<Fe> = (0..m * n).map(|t| ((bits >> t) & 1) as Fe).collect();
                        let e = MatGF::devectorize(&v, m, n, &f).unwrap();
                        let (el, er) = e.split_lr(r).unwrap();
                        let expect = er.rank() == er.cols() && {
                            // does some K exist? since E^R full column rank,
                            // K exists iff columns of E^L lie in span(E^R),
                            // i.e. rank([E^R|E^L]) == r
                            MatGF::join_lr(&er, &el).unwrap().rank() == r
                        };
                        match e.solve_k_matrix(r).unwrap() {
                            KOutcome::Unique(k) => {
                                assert!(expect);
                                assert_eq!(er.mul(&k).unwrap(), el);
                            }
                            KOutcome::NoSolution => assert!(!expect),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn samplers() {
        let f = gf(16);
        let mut prg = stream(b"SA");
        let s = MatGF::sample_invertible(&mut prg, 6, &f).unwrap();
        assert_eq!(s.rank(), 6);
        for r in 0..=4usize {
            let samp = MatGF::sample_rank_r(&mut prg, 5, 4, r, &f).unwrap();
            assert_eq!(samp.e.rank(), r);
            assert_eq!(samp.s.rank(), 5);
            assert_eq!(samp.t.rank(), 4);
        }
        let z = MatGF::sample_rank_r(&mut prg, 5, 4, 0, &f).unwrap();
        assert_eq!(z.e, MatGF::zero(5, 4, &f));
    }
}
