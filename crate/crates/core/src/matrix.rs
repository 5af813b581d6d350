//! Dense complex-matrix foundation: arithmetic, norms, rank-revealing SVD,
//! Moore-Penrose pseudoinverse and 2x2 block assembly/partition utilities.
//!
//! Every higher module works exclusively through [`CMatrix`], a row-major
//! dense matrix of `Complex64` scalars. Real inputs are promoted to complex
//! on construction. Decomposition-backed operations (`rank`, `pinv`) go
//! through nalgebra's SVD.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Numerical tolerances used throughout the crate.
///
/// `rank_rtol` is the relative singular-value cutoff for rank decisions and
/// pseudoinverse truncation; `eq_rtol` is the relative residual threshold for
/// matrix-equality and hypothesis checks. Both must be strictly positive and
/// at most 1e-2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    rank_rtol: f64,
    eq_rtol: f64,
}

impl Tolerance {
    pub const DEFAULT_RANK_RTOL: f64 = 1e-11;
    pub const DEFAULT_EQ_RTOL: f64 = 1e-9;

    pub fn new(rank_rtol: f64, eq_rtol: f64) -> Result<Self> {
        for (name, v) in [("rank_rtol", rank_rtol), ("eq_rtol", eq_rtol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must lie in (0, 1e-2], got {v:e}"
                )));
            }
        }
        Ok(Self { rank_rtol, eq_rtol })
    }

    /// Default rank cutoff with a caller-supplied equality tolerance.
    pub fn with_eq_rtol(eq_rtol: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_RANK_RTOL, eq_rtol)
    }

    pub fn rank_rtol(&self) -> f64 {
        self.rank_rtol
    }

    pub fn eq_rtol(&self) -> f64 {
        self.eq_rtol
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rtol: Self::DEFAULT_RANK_RTOL,
            eq_rtol: Self::DEFAULT_EQ_RTOL,
        }
    }
}

/// Dense complex matrix with at least one row and one column.
///
/// Externally the entry order is row-major; internally the data lives in a
/// nalgebra `DMatrix`, which all decompositions run on.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    data: DMatrix<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            data: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    /// Builds a matrix from row-major real entries, promoted to complex.
    pub fn from_real_rows(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        Self::from_rows(
            rows,
            cols,
            entries
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect(),
        )
    }

    /// Entry-wise constructor. Panics on zero dimensions (internal use).
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            data: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            data: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix dimensions must be positive");
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub(crate) fn from_inner(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    pub(crate) fn inner(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let (r, c) = (self.rows(), self.cols());
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.mul_scalar(Complex64::new(s, 0.0))
    }

    pub fn mul_scalar(&self, s: Complex64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
        }
    }

    /// Matrix power by repeated squaring; `pow(0)` is the identity.
    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square(), "pow requires a square matrix");
        let mut result = Self::identity(self.rows());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Relative Frobenius residual `|self − other| / (1 + |other|)`.
    pub fn rel_residual(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "rel_residual requires equal shapes"
        );
        (&self.data - &other.data).norm() / (1.0 + other.data.norm())
    }

    /// Equality at tolerance: `|self − other| <= eq_rtol * (1 + |other|)`.
    pub fn approx_eq(&self, other: &Self, eq_rtol: f64) -> bool {
        self.rel_residual(other) <= eq_rtol
    }

    pub fn is_zero_at(&self, eq_rtol: f64) -> bool {
        self.norm() <= eq_rtol
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CMatrix({}x{}) {:?}",
            self.rows(),
            self.cols(),
            self.data
        )
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows() {
            let row = (0..self.cols())
                .map(|j| {
                    let z = self.get(i, j);
                    if z.im == 0.0 {
                        format!("{:>12.6}", z.re)
                    } else if z.im < 0.0 {
                        format!("{:.6}-{:.6}i", z.re, -z.im)
                    } else {
                        format!("{:.6}+{:.6}i", z.re, z.im)
                    }
                })
                .collect::<Vec<_>>()
                .join("  ");
            writeln!(f, "[ {row} ]")?;
        }
        Ok(())
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt, $label:literal) => {
        impl $trait for &CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &CMatrix) -> CMatrix {
                if $label == "*" {
                    assert_eq!(
                        self.cols(),
                        rhs.rows(),
                        "inner dimensions must agree for multiplication"
                    );
                } else {
                    assert_eq!(
                        (self.rows(), self.cols()),
                        (rhs.rows(), rhs.cols()),
                        "shapes must agree"
                    );
                }
                CMatrix {
                    data: &self.data $op &rhs.data,
                }
            }
        }
    };
}

impl_binop!(Add, add, +, "+");
impl_binop!(Sub, sub, -, "-");
impl_binop!(Mul, mul, *, "*");

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix { data: -&self.data }
    }
}

/// True when a computed product has collapsed to rounding noise relative to
/// its factors. Annihilation identities (projector times stabilized power)
/// produce exact zeros in exact arithmetic; here they leave noise that must
/// not be amplified by later factors, so such products count as zero.
pub(crate) fn product_collapsed(product: &CMatrix, x_norm: f64, y_norm: f64) -> bool {
    // The margin absorbs conditioning of the projector construction: a
    // mathematically vanishing product lands within eps times a moderate
    // condition number of the factor scales.
    product.norm() <= 1024.0 * f64::EPSILON * x_norm * y_norm
}

/// Checked matrix product.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a * b)
}

/// Singular value decomposition `A = U diag(s) V^H` by one-sided Jacobi.
///
/// Returns `(u, s, v_t)` with `u` of shape m x k, `s` descending, `v_t` of
/// shape k x n, where k = min(m, n). Columns of `u` past the numerical rank
/// are zero. One-sided Jacobi is direct and backward stable on complex
/// matrices at the sizes this crate works with, which iterative
/// bidiagonalization codes are not guaranteed to be.
pub(crate) fn svd_parts(a: &CMatrix) -> Result<(DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>)> {
    if a.rows() >= a.cols() {
        jacobi_svd_tall(&a.data)
    } else {
        // Factor the adjoint and swap the roles of U and V.
        let (u, s, v_t) = jacobi_svd_tall(&a.data.adjoint())?;
        Ok((v_t.adjoint(), s, u.adjoint()))
    }
}

/// One-sided Jacobi SVD for m >= n: rotates column pairs until they are
/// mutually orthogonal, then reads off `sigma_j = |col_j|`.
fn jacobi_svd_tall(
    a: &DMatrix<Complex64>,
) -> Result<(DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>)> {
    const MAX_SWEEPS: usize = 128;
    let (m, n) = (a.nrows(), a.ncols());
    let mut b = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    // Columns count as orthogonal once |<p,q>| <= sqrt(m) eps |p||q|;
    // rotating below that level only churns rounding noise.
    let threshold = (m as f64).sqrt() * f64::EPSILON;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        // Columns at rounding-noise level hold sigma ~ 0; rotating them
        // against full-size columns churns forever without progress.
        let max_sq = (0..n)
            .map(|j| b.column(j).norm_squared())
            .fold(0.0, f64::max);
        let col_floor = max_sq * f64::EPSILON * f64::EPSILON;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let col_p = b.column(p);
                let col_q = b.column(q);
                let alpha = col_p.norm_squared();
                let beta = col_q.norm_squared();
                if alpha <= col_floor || beta <= col_floor {
                    continue;
                }
                let gamma: Complex64 = col_p.dotc(&col_q);
                let gnorm = gamma.norm();
                if gnorm <= threshold * (alpha * beta).sqrt() || gnorm == 0.0 {
                    continue;
                }
                rotated = true;
                // Real Jacobi rotation on the phase-aligned pair.
                let phase = gamma / gnorm;
                let tau = (beta - alpha) / (2.0 * gnorm);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let cc = Complex64::new(c, 0.0);
                let sc = Complex64::new(s, 0.0);
                let phase_conj = phase.conj();
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)] * phase_conj;
                    b[(i, p)] = cc * bp - sc * bq;
                    b[(i, q)] = sc * bp + cc * bq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase_conj;
                    v[(i, p)] = cc * vp - sc * vq;
                    v[(i, q)] = sc * vp + cc * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi SVD did not converge on a {m}x{n} matrix"
        )));
    }

    // Sort columns by descending norm; ties keep the original order.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| b.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let mut u = DMatrix::<Complex64>::zeros(m, n);
    let mut v_sorted = DMatrix::<Complex64>::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        if sigma > 0.0 {
            let scaled = b.column(src) / Complex64::new(sigma, 0.0);
            u.set_column(dst, &scaled);
        }
        v_sorted.set_column(dst, &v.column(src));
    }
    Ok((u, s, v_sorted.adjoint()))
}

fn rank_cutoff(a: &CMatrix, tol: Tolerance, s_max: f64) -> f64 {
    tol.rank_rtol() * a.rows().max(a.cols()) as f64 * s_max
}

/// Numerical rank: the number of singular values above
/// `rank_rtol * max(rows, cols) * s_max`. The zero matrix has rank 0.
pub fn rank(a: &CMatrix, tol: Tolerance) -> Result<usize> {
    rank_with_floor(a, tol, 0.0)
}

/// Rank with an additional absolute singular-value floor.
///
/// The floor guards rank decisions on matrices that are numerically zero
/// (for example high powers of nilpotent matrices), where a purely relative
/// cutoff would count rounding noise as signal.
pub fn rank_with_floor(a: &CMatrix, tol: Tolerance, floor: f64) -> Result<usize> {
    let (_, s, _) = svd_parts(a)?;
    let s_max = s.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(a, tol, s_max).max(floor);
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// Moore-Penrose pseudoinverse via singular-value thresholding, using the
/// same cutoff as [`rank`].
pub fn pinv(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    pinv_with_floor(a, tol, 0.0)
}

/// Pseudoinverse with an additional absolute singular-value floor (see
/// [`rank_with_floor`]).
pub fn pinv_with_floor(a: &CMatrix, tol: Tolerance, floor: f64) -> Result<CMatrix> {
    let (u, s, v_t) = svd_parts(a)?;
    let s_max = s.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(a, tol, s_max).max(floor);
    let k = s.len();
    let mut sigma_inv = DMatrix::<Complex64>::zeros(k, k);
    for (i, &x) in s.iter().enumerate() {
        if x > cutoff {
            sigma_inv[(i, i)] = Complex64::new(1.0 / x, 0.0);
        }
    }
    Ok(CMatrix {
        data: v_t.adjoint() * sigma_inv * u.adjoint(),
    })
}

/// Horizontal concatenation `[a | b]`.
pub fn hcat(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "hcat row mismatch: {} vs {}",
            a.rows(),
            b.rows()
        )));
    }
    Ok(CMatrix::from_fn(a.rows(), a.cols() + b.cols(), |i, j| {
        if j < a.cols() {
            a.get(i, j)
        } else {
            b.get(i, j - a.cols())
        }
    }))
}

/// Vertical concatenation `[a; b]`.
pub fn vcat(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "vcat column mismatch: {} vs {}",
            a.cols(),
            b.cols()
        )));
    }
    Ok(CMatrix::from_fn(a.rows() + b.rows(), a.cols(), |i, j| {
        if i < a.rows() {
            a.get(i, j)
        } else {
            b.get(i - a.rows(), j)
        }
    }))
}

/// Assembles `[[a11, a12], [a21, a22]]` from conformal blocks.
pub fn assemble_block2x2(
    a11: &CMatrix,
    a12: &CMatrix,
    a21: &CMatrix,
    a22: &CMatrix,
) -> Result<CMatrix> {
    if a11.rows() != a12.rows()
        || a21.rows() != a22.rows()
        || a11.cols() != a21.cols()
        || a12.cols() != a22.cols()
    {
        return Err(Error::Shape(format!(
            "non-conformal blocks: {}x{}, {}x{}, {}x{}, {}x{}",
            a11.rows(),
            a11.cols(),
            a12.rows(),
            a12.cols(),
            a21.rows(),
            a21.cols(),
            a22.rows(),
            a22.cols()
        )));
    }
    let top = hcat(a11, a12)?;
    let bottom = hcat(a21, a22)?;
    vcat(&top, &bottom)
}

/// Splits `m` at `split_row`/`split_col` into `(a11, a12, a21, a22)`.
/// The round trip with [`assemble_block2x2`] is bit-exact.
pub fn partition_block2x2(
    m: &CMatrix,
    split_row: usize,
    split_col: usize,
) -> Result<(CMatrix, CMatrix, CMatrix, CMatrix)> {
    if split_row == 0 || split_row >= m.rows() || split_col == 0 || split_col >= m.cols() {
        return Err(Error::Shape(format!(
            "split ({split_row}, {split_col}) out of range for a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let a11 = CMatrix::from_fn(split_row, split_col, |i, j| m.get(i, j));
    let a12 = CMatrix::from_fn(split_row, m.cols() - split_col, |i, j| {
        m.get(i, j + split_col)
    });
    let a21 = CMatrix::from_fn(m.rows() - split_row, split_col, |i, j| {
        m.get(i + split_row, j)
    });
    let a22 = CMatrix::from_fn(m.rows() - split_row, m.cols() - split_col, |i, j| {
        m.get(i + split_row, j + split_col)
    });
    Ok((a11, a12, a21, a22))
}
