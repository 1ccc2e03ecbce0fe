//! Structured matrix primitives: symmetric tridiagonal-plus-corner 1D factors
//! and matrix-free Kronecker sums of them.

use num_complex::Complex64 as C64;

use crate::error::{check_len, Error, Result};

/// `n x n` tridiagonal matrix with optional wrap-around corners `(1,n)` and `(n,1)`.
///
/// Every 1D stiffness and mass matrix of the discretisation has this shape;
/// only the periodic ones use the corners.
#[derive(Debug, Clone, PartialEq)]
pub struct TriCornerMatrix {
    diag: Vec<C64>,
    sub: Vec<C64>,
    sup: Vec<C64>,
    corner_lo_hi: C64,
    corner_hi_lo: C64,
}

impl TriCornerMatrix {
    /// Symmetric matrix from its diagonal, off-diagonal and corner value.
    pub fn symmetric(diag: Vec<C64>, off: Vec<C64>, corner: C64) -> Self {
        assert!(diag.len() >= 2, "TriCornerMatrix needs n >= 2");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have length n-1");
        Self {
            diag,
            sub: off.clone(),
            sup: off,
            corner_lo_hi: corner,
            corner_hi_lo: corner,
        }
    }

    pub fn general(
        diag: Vec<C64>,
        sub: Vec<C64>,
        sup: Vec<C64>,
        corner_lo_hi: C64,
        corner_hi_lo: C64,
    ) -> Self {
        assert!(diag.len() >= 2, "TriCornerMatrix needs n >= 2");
        assert_eq!(sub.len() + 1, diag.len());
        assert_eq!(sup.len() + 1, diag.len());
        Self {
            diag,
            sub,
            sup,
            corner_lo_hi,
            corner_hi_lo,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::symmetric(
            vec![C64::new(1.0, 0.0); n],
            vec![C64::new(0.0, 0.0); n - 1],
            C64::new(0.0, 0.0),
        )
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[C64] {
        &self.diag
    }

    /// Entries `(i+1, i)`.
    pub fn sub(&self) -> &[C64] {
        &self.sub
    }

    /// Entries `(i, i+1)`.
    pub fn sup(&self) -> &[C64] {
        &self.sup
    }

    /// Entry `(1, n)`.
    pub fn corner_lo_hi(&self) -> C64 {
        self.corner_lo_hi
    }

    /// Entry `(n, 1)`.
    pub fn corner_hi_lo(&self) -> C64 {
        self.corner_hi_lo
    }

    pub fn is_symmetric(&self) -> bool {
        self.sub == self.sup && self.corner_lo_hi == self.corner_hi_lo
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let n = self.n();
        let mut v = C64::new(0.0, 0.0);
        if i == j {
            v += self.diag[i];
        }
        if j + 1 == i {
            v += self.sub[j];
        }
        if i + 1 == j {
            v += self.sup[i];
        }
        // For n == 2 the corners coincide with the off-diagonals and add to them.
        if i == 0 && j == n - 1 {
            v += self.corner_lo_hi;
        }
        if i == n - 1 && j == 0 {
            v += self.corner_hi_lo;
        }
        v
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.sub)
            .chain(&self.sup)
            .chain([&self.corner_lo_hi, &self.corner_hi_lo])
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `alpha * self + beta * other`, entry by entry.
    pub fn combine(&self, alpha: C64, other: &Self, beta: C64) -> Self {
        assert_eq!(self.n(), other.n());
        let lin = |a: &[C64], b: &[C64]| -> Vec<C64> {
            a.iter().zip(b).map(|(&x, &y)| alpha * x + beta * y).collect()
        };
        Self {
            diag: lin(&self.diag, &other.diag),
            sub: lin(&self.sub, &other.sub),
            sup: lin(&self.sup, &other.sup),
            corner_lo_hi: alpha * self.corner_lo_hi + beta * other.corner_lo_hi,
            corner_hi_lo: alpha * self.corner_hi_lo + beta * other.corner_hi_lo,
        }
    }

    /// `y = self * x` for a single vector.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = x.to_vec();
        self.apply_axis_in_place(&mut y, 1, 1);
        y
    }

    /// Applies the matrix along one axis of a row-major array viewed as
    /// `[outer][n][stride]`, in place. Uses `O(stride)` scratch.
    pub fn apply_axis_in_place(&self, data: &mut [C64], outer: usize, stride: usize) {
        let n = self.n();
        debug_assert_eq!(data.len(), outer * n * stride);
        let mut first = vec![C64::new(0.0, 0.0); stride];
        let mut prev = vec![C64::new(0.0, 0.0); stride];
        let mut cur = vec![C64::new(0.0, 0.0); stride];
        let has_corners = self.corner_lo_hi != C64::new(0.0, 0.0)
            || self.corner_hi_lo != C64::new(0.0, 0.0);
        for block in data.chunks_exact_mut(n * stride) {
            first.copy_from_slice(&block[..stride]);
            let last_old: Option<Vec<C64>> =
                has_corners.then(|| block[(n - 1) * stride..].to_vec());
            for i in 0..n {
                cur.copy_from_slice(&block[i * stride..(i + 1) * stride]);
                let (head, tail) = block.split_at_mut((i + 1) * stride);
                let row = &mut head[i * stride..];
                let d = self.diag[i];
                for (r, &c) in row.iter_mut().zip(&cur) {
                    *r = d * c;
                }
                if i > 0 {
                    let s = self.sub[i - 1];
                    for (r, &p) in row.iter_mut().zip(&prev) {
                        *r += s * p;
                    }
                }
                if i + 1 < n {
                    let s = self.sup[i];
                    for (r, &x) in row.iter_mut().zip(&tail[..stride]) {
                        *r += s * x;
                    }
                }
                if i == 0 {
                    if let Some(last) = &last_old {
                        let c = self.corner_lo_hi;
                        for (r, &x) in row.iter_mut().zip(last) {
                            *r += c * x;
                        }
                    }
                }
                if i == n - 1 && has_corners {
                    let c = self.corner_hi_lo;
                    for (r, &x) in row.iter_mut().zip(&first) {
                        *r += c * x;
                    }
                }
                std::mem::swap(&mut prev, &mut cur);
            }
        }
    }
}


/// One summand `coeff * (F_1 ⊗ ... ⊗ F_d)` of a Kronecker operator.
#[derive(Debug, Clone, PartialEq)]
pub struct KronTerm {
    pub coeff: C64,
    pub factors: Vec<TriCornerMatrix>,
}

/// Sum of Kronecker products of 1D factors, applied without forming the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerOperator {
    dims: Vec<usize>,
    terms: Vec<KronTerm>,
}

impl KroneckerOperator {
    pub fn new(dims: Vec<usize>) -> Self {
        Self {
            dims,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, coeff: C64, factors: Vec<TriCornerMatrix>) -> Result<Self> {
        self.push_term(coeff, factors)?;
        Ok(self)
    }

    pub fn push_term(&mut self, coeff: C64, factors: Vec<TriCornerMatrix>) -> Result<()> {
        check_len(self.dims.len(), factors.len())?;
        for (f, &n) in factors.iter().zip(&self.dims) {
            check_len(n, f.n())?;
        }
        self.terms.push(KronTerm { coeff, factors });
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        let mut scratch = Vec::new();
        self.apply_into(x, &mut out, &mut scratch)?;
        Ok(out)
    }

    /// `out = Σ c (F_1 ⊗ ... ⊗ F_d) x`. `scratch` is resized to `N` as needed.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) -> Result<()> {
        let total = self.len();
        check_len(total, x.len())?;
        check_len(total, out.len())?;
        out.fill(C64::new(0.0, 0.0));
        scratch.resize(total, C64::new(0.0, 0.0));
        for term in &self.terms {
            scratch.copy_from_slice(x);
            for (axis, f) in term.factors.iter().enumerate() {
                if is_identity(f) {
                    continue;
                }
                let outer: usize = self.dims[..axis].iter().product();
                let stride: usize = self.dims[axis + 1..].iter().product();
                f.apply_axis_in_place(scratch, outer, stride);
            }
            for (o, &s) in out.iter_mut().zip(scratch.iter()) {
                *o += term.coeff * s;
            }
        }
        Ok(())
    }
}


fn is_identity(f: &TriCornerMatrix) -> bool {
    let zero = C64::new(0.0, 0.0);
    f.diag.iter().all(|&d| d == C64::new(1.0, 0.0))
        && f.sub.iter().chain(&f.sup).all(|&s| s == zero)
        && f.corner_lo_hi == zero
        && f.corner_hi_lo == zero
}

/// Convenience: `kron_apply(op, x)`.
pub fn kron_apply(op: &KroneckerOperator, x: &[C64]) -> Result<Vec<C64>> {
    if op.dims.is_empty() {
        return Err(Error::InvalidGrid("operator without factors".into()));
    }
    op.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn dense_matvec(a: &[C64], n: usize, x: &[C64]) -> Vec<C64> {
        (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
            .collect()
    }

    #[test]
    fn axis_apply_matches_dense_with_corners() {
        let m = TriCornerMatrix::general(
            vec![c(1.0), c(2.0), c(3.0), c(4.0)],
            vec![c(0.5), C64::new(0.0, 1.0), c(-1.0)],
            vec![c(7.0), c(8.0), c(9.0)],
            c(-2.0),
            C64::new(0.3, -0.2),
        );
        let x: Vec<C64> = (0..4).map(|k| C64::new(k as f64 + 1.0, -(k as f64))).collect();
        let dense = m.to_dense();
        let want = dense_matvec(&dense, 4, &x);
        let got = m.matvec(&x);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_operator_is_noop() {
        let op = KroneckerOperator::new(vec![3, 4])
            .with_term(c(1.0), vec![TriCornerMatrix::identity(3), TriCornerMatrix::identity(4)])
            .unwrap();
        let x: Vec<C64> = (0..12).map(|k| C64::new(k as f64, 1.0)).collect();
        assert_eq!(kron_apply(&op, &x).unwrap(), x);
    }

    #[test]
    fn factor_size_mismatch_rejected() {
        let op = KroneckerOperator::new(vec![3, 4]);
        assert!(op
            .with_term(c(1.0), vec![TriCornerMatrix::identity(3), TriCornerMatrix::identity(3)])
            .is_err());
        let op = KroneckerOperator::new(vec![3, 4])
            .with_term(c(1.0), vec![TriCornerMatrix::identity(3), TriCornerMatrix::identity(4)])
            .unwrap();
        assert!(op.apply(&[c(0.0); 11]).is_err());
    }

    #[test]
    fn combine_is_entrywise() {
        let a = TriCornerMatrix::identity(3);
        let b = TriCornerMatrix::symmetric(vec![c(1.0); 3], vec![c(2.0); 2], c(3.0));
        let s = a.combine(c(2.0), &b, C64::new(0.0, 1.0));
        assert_eq!(s.get(0, 0), C64::new(2.0, 1.0));
        assert_eq!(s.get(0, 1), C64::new(0.0, 2.0));
        assert_eq!(s.get(0, 2), C64::new(0.0, 3.0));
        assert!(s.is_symmetric());
    }
}
