//! Drazin-inverse engine: matrix index, two independent Drazin algorithms,
//! the group inverse, the spectral projector and axiom residuals.
//!
//! [`drazin`] is the baseline (pseudoinverse-power formula) and
//! [`drazin_oracle`] the cross-check (core-nilpotent basis splitting). The
//! two share no algorithmic path beyond the index computation, so their
//! agreement is a meaningful consistency signal; every closed-form formula
//! in the higher modules is validated against them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{pinv_with_floor, rank_with_floor, svd_parts, CMatrix, Tolerance};

/// Relative residuals of the three Drazin axioms for a candidate inverse X:
/// `AX = XA`, `XAX = X`, `A^{k+1}X = A^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomResiduals {
    /// `|AX - XA| / (1 + |XA|)`
    pub commute: f64,
    /// `|XAX - X| / (1 + |X|)`
    pub inner: f64,
    /// `|A^{k+1}X - A^k| / (1 + |A^k|)`
    pub power: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.commute.max(self.inner).max(self.power)
    }

    pub fn within(&self, eq_rtol: f64) -> bool {
        self.max() <= eq_rtol
    }
}

/// A computed Drazin inverse together with its diagnostics.
#[derive(Debug, Clone)]
pub struct DrazinResult {
    /// The Drazin inverse A^d.
    pub d: CMatrix,
    /// ind(A): the smallest k with rank(A^k) = rank(A^{k+1}).
    pub index: usize,
    /// Spectral projector A^pi = I - A A^d.
    pub projector: CMatrix,
    /// Axiom residuals of `d` as a Drazin inverse of the input.
    pub residuals: AxiomResiduals,
}

fn require_square(a: &CMatrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "{what} requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// First-order rounding-error bound for a product X * Y given bounds for
/// the factors. Frobenius norms make the bound conservative.
fn product_error(x: &CMatrix, ex: f64, y: &CMatrix, ey: f64) -> f64 {
    let inner = x.cols() as f64;
    ex * y.norm() + x.norm() * ey + inner * f64::EPSILON * x.norm() * y.norm()
}

/// Matrix power by repeated squaring with a running rounding-error bound.
/// Rank decisions on computed powers must not trust singular values below
/// this bound: for strongly non-normal matrices the power's entries can sit
/// many orders below |A|^k, so an a-priori bound would be useless.
fn pow_with_error(a: &CMatrix, k: usize) -> (CMatrix, f64) {
    let mut result = CMatrix::identity(a.rows());
    let mut result_err = 0.0;
    let mut base = a.clone();
    let mut base_err = 0.0;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result_err = product_error(&result, result_err, &base, base_err);
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base_err = product_error(&base, base_err, &base, base_err);
            base = &base * &base;
        }
    }
    (result, result_err)
}

/// Safety margin applied to running error bounds when used as singular
/// value floors.
const FLOOR_MARGIN: f64 = 16.0;

/// Smallest k >= 0 with rank(A^k) = rank(A^{k+1}); 0 iff A is invertible at
/// the rank tolerance, and at most n.
pub fn index(a: &CMatrix, tol: Tolerance) -> Result<usize> {
    require_square(a, "index")?;
    let n = a.rows();
    // rank(A^0) = n; walk powers until the rank stabilizes, tracking the
    // accumulated rounding error of each computed power.
    let mut prev_rank = n;
    let mut power = a.clone();
    let mut err = 0.0;
    for k in 1..=n + 1 {
        let r = rank_with_floor(&power, tol, FLOOR_MARGIN * err)?;
        if r == prev_rank {
            return Ok(k - 1);
        }
        prev_rank = r;
        if r == 0 {
            // Nilpotent: the rank is already stable at zero.
            return Ok(k);
        }
        err = product_error(&power, err, a, 0.0);
        power = &power * a;
    }
    // Ranks strictly decrease until they stabilize, so this is unreachable
    // for consistent rank decisions; treat it as an index-n matrix.
    Ok(n)
}

/// Residuals of `x` as a Drazin inverse candidate for `a`, using `k` in the
/// power axiom.
pub fn axiom_residuals(a: &CMatrix, x: &CMatrix, k: usize) -> Result<AxiomResiduals> {
    require_square(a, "axiom_residuals")?;
    require_square(x, "axiom_residuals")?;
    if a.rows() != x.rows() {
        return Err(Error::Shape(format!(
            "axiom_residuals requires equal shapes, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let ax = a * x;
    let xa = x * a;
    let ak = a.pow(k);
    let ak1x = &(&ak * a) * x;
    Ok(AxiomResiduals {
        commute: ax.rel_residual(&xa),
        inner: (&xa * x).rel_residual(x),
        power: ak1x.rel_residual(&ak),
    })
}

fn build_result(a: &CMatrix, d: CMatrix, k: usize, tol: Tolerance) -> Result<DrazinResult> {
    let projector = &CMatrix::identity(a.rows()) - &(a * &d);
    let residuals = axiom_residuals(a, &d, k)?;
    if residuals.max() > 10.0 * tol.eq_rtol() {
        return Err(Error::IllConditioned {
            commute: residuals.commute,
            inner: residuals.inner,
            power: residuals.power,
            limit: 10.0 * tol.eq_rtol(),
        });
    }
    Ok(DrazinResult {
        d,
        index: k,
        projector,
        residuals,
    })
}

/// Baseline Drazin inverse: `A^d = A^k (A^{2k+1})^+ A^k` with k = ind(A).
///
/// The result carries the index, the spectral projector and the axiom
/// residuals. Residuals above ten times `eq_rtol` are reported as an
/// ill-conditioned-instance error instead of a silently wrong matrix.
pub fn drazin(a: &CMatrix, tol: Tolerance) -> Result<DrazinResult> {
    require_square(a, "drazin")?;
    let n = a.rows();
    let k = index(a, tol)?;
    let (ak, ak_err) = pow_with_error(a, k);
    // Stabilized rank zero means A is nilpotent and A^d = 0 exactly.
    if rank_with_floor(&ak, tol, FLOOR_MARGIN * ak_err)? == 0 {
        return build_result(a, CMatrix::zeros(n, n), k, tol);
    }
    let (a2k1, a2k1_err) = pow_with_error(a, 2 * k + 1);
    let p = pinv_with_floor(&a2k1, tol, FLOOR_MARGIN * a2k1_err)?;
    let d = &(&ak * &p) * &ak;
    build_result(a, d, k, tol)
}

/// Independent Drazin oracle via core-nilpotent basis splitting.
///
/// Finds bases of range(A^k) and null(A^k), changes basis so A becomes
/// block-diagonal with an invertible core and a nilpotent part, inverts the
/// core, zeroes the nilpotent block and transforms back.
pub fn drazin_oracle(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    require_square(a, "drazin_oracle")?;
    let n = a.rows();
    let k = index(a, tol)?;
    if k == 0 {
        return a
            .inner()
            .clone()
            .try_inverse()
            .map(CMatrix::from_inner)
            .ok_or_else(|| Error::Numerical("inverse of an index-0 matrix failed".into()));
    }
    let (ak, ak_err) = pow_with_error(a, k);
    let floor = FLOOR_MARGIN * ak_err;
    let r = rank_with_floor(&ak, tol, floor)?;
    if r == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    let (u, s, v_t) = svd_parts(&ak)?;
    let s_max = s.first().copied().unwrap_or(0.0);
    let cutoff = (tol.rank_rtol() * n as f64 * s_max).max(floor);
    debug_assert_eq!(s.iter().filter(|&&x| x > cutoff).count(), r);

    // Basis: columns of U spanning range(A^k), then right singular vectors
    // spanning null(A^k). Their direct sum is all of C^n.
    let v = v_t.adjoint();
    let mut w = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..r {
        w.set_column(j, &u.column(j));
    }
    for j in r..n {
        w.set_column(j, &v.column(j));
    }
    let w_inv = w
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("range/null basis of A^k is singular".into()))?;

    // B = W^{-1} A W is block diagonal: invertible core on the leading r
    // coordinates, nilpotent on the rest.
    let b = &w_inv * a.inner() * &w;
    let core = b.view((0, 0), (r, r)).into_owned();
    let core_inv = core
        .try_inverse()
        .ok_or_else(|| Error::Numerical("core block is numerically singular".into()))?;
    let mut b_d = DMatrix::<Complex64>::zeros(n, n);
    b_d.view_mut((0, 0), (r, r)).copy_from(&core_inv);
    Ok(CMatrix::from_inner(w * b_d * w_inv))
}

/// Group inverse: the Drazin inverse restricted to inputs of index <= 1.
pub fn group_inverse(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    require_square(a, "group_inverse")?;
    let k = index(a, tol)?;
    if k > 1 {
        return Err(Error::GroupIndex { index: k });
    }
    Ok(drazin(a, tol)?.d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::matmul;

    fn mat(rows: usize, cols: usize, re: &[f64]) -> CMatrix {
        CMatrix::from_real_rows(rows, cols, re.to_vec()).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn index_of_identity_is_zero() {
        assert_eq!(index(&CMatrix::identity(3), tol()).unwrap(), 0);
    }

    #[test]
    fn index_of_zero_matrix_is_one() {
        assert_eq!(index(&CMatrix::zeros(2, 2), tol()).unwrap(), 1);
        assert_eq!(index(&CMatrix::zeros(1, 1), tol()).unwrap(), 1);
    }

    #[test]
    fn index_of_upper_shift_is_dimension() {
        // Ranks of powers of the 3x3 upper shift are 2, 1, 0, 0.
        let n = mat(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(index(&n, tol()).unwrap(), 3);
    }

    #[test]
    fn index_rejects_non_square() {
        let a = CMatrix::zeros(2, 3);
        assert!(matches!(index(&a, tol()), Err(Error::Shape(_))));
    }

    #[test]
    fn drazin_of_nilpotent_is_zero() {
        let n = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = drazin(&n, tol()).unwrap();
        assert_eq!(r.index, 2);
        assert_eq!(r.d.norm(), 0.0);
    }

    #[test]
    fn drazin_of_diagonal_core_nilpotent() {
        let a = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let r = drazin(&a, tol()).unwrap();
        assert_eq!(r.index, 1);
        assert!(r.d.approx_eq(&mat(2, 2, &[0.5, 0.0, 0.0, 0.0]), 1e-13));
    }

    #[test]
    fn drazin_of_idempotent_is_itself() {
        let a = mat(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let r = drazin(&a, tol()).unwrap();
        assert_eq!(r.index, 1);
        assert!(r.d.approx_eq(&a, 1e-13));
    }

    #[test]
    fn drazin_projector_is_idempotent() {
        let a = mat(3, 3, &[2.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let r = drazin(&a, tol()).unwrap();
        let pp = matmul(&r.projector, &r.projector).unwrap();
        assert!(pp.approx_eq(&r.projector, 1e-12));
    }

    #[test]
    fn oracle_identity() {
        let d = drazin_oracle(&CMatrix::identity(2), tol()).unwrap();
        assert!(d.approx_eq(&CMatrix::identity(2), 1e-13));
    }

    #[test]
    fn oracle_diagonal() {
        let a = mat(3, 3, &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let expected = mat(3, 3, &[1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(drazin_oracle(&a, tol())
            .unwrap()
            .approx_eq(&expected, 1e-13));
    }

    #[test]
    fn oracle_group_invertible_case() {
        // M = [2 1; 0 0] satisfies M^2 = 2M, so its group inverse is M/4.
        let m = mat(2, 2, &[2.0, 1.0, 0.0, 0.0]);
        let m2 = matmul(&m, &m).unwrap();
        assert!(
            m2.approx_eq(&m.scale(2.0), 1e-15),
            "oracle premise M^2 = 2M"
        );
        let expected = m.scale(0.25);
        let got = drazin_oracle(&m, tol()).unwrap();
        assert!(got.approx_eq(&expected, 1e-12));
        // Verify the axioms directly as an independent check.
        let res = axiom_residuals(&m, &got, 1).unwrap();
        assert!(res.within(1e-12));
    }

    #[test]
    fn oracle_agrees_with_baseline_on_mixed_structure() {
        let a = mat(
            4,
            4,
            &[
                1.5, 0.3, 0.0, 2.0, //
                -0.2, 0.9, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        let base = drazin(&a, tol()).unwrap();
        let orc = drazin_oracle(&a, tol()).unwrap();
        assert!(base.d.approx_eq(&orc, 1e-10));
    }

    #[test]
    fn group_inverse_identity() {
        let g = group_inverse(&CMatrix::identity(2), tol()).unwrap();
        assert!(g.approx_eq(&CMatrix::identity(2), 1e-14));
    }

    #[test]
    fn group_inverse_rank_one() {
        // M = ones(2); M^2 = 2M so M^# = M/4.
        let m = mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let expected = mat(2, 2, &[0.25, 0.25, 0.25, 0.25]);
        assert!(group_inverse(&m, tol())
            .unwrap()
            .approx_eq(&expected, 1e-13));
    }

    #[test]
    fn group_inverse_rejects_index_two() {
        let n = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            group_inverse(&n, tol()),
            Err(Error::GroupIndex { index: 2 })
        ));
    }

    #[test]
    fn residuals_identity_case() {
        let i = CMatrix::identity(2);
        let r = axiom_residuals(&i, &i, 0).unwrap();
        assert_eq!((r.commute, r.inner, r.power), (0.0, 0.0, 0.0));
    }

    #[test]
    fn residuals_zero_candidate_for_nilpotent() {
        let n = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let z = CMatrix::zeros(2, 2);
        let r = axiom_residuals(&n, &z, 2).unwrap();
        assert_eq!((r.commute, r.inner, r.power), (0.0, 0.0, 0.0));
    }

    #[test]
    fn residuals_exact_diagonal() {
        let a = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let x = mat(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        let r = axiom_residuals(&a, &x, 1).unwrap();
        assert!(r.max() <= 1e-15);
    }

    #[test]
    fn residuals_shape_mismatch() {
        let a = CMatrix::identity(2);
        let x = CMatrix::identity(3);
        assert!(matches!(axiom_residuals(&a, &x, 0), Err(Error::Shape(_))));
    }

    #[test]
    fn invertible_drazin_is_inverse() {
        let a = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let r = drazin(&a, tol()).unwrap();
        assert_eq!(r.index, 0);
        let prod = matmul(&a, &r.d).unwrap();
        assert!(prod.approx_eq(&CMatrix::identity(2), 1e-12));
        assert!(r.projector.norm() <= 1e-12);
    }
}
