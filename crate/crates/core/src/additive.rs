//! Additive Drazin-inverse machinery for pseudo-block quadruples.
//!
//! A quadruple (P, Q, R, S) with N = P + Q + R + S and the annihilation
//! pattern `PQ = QP = 0`, `PS = SQ = QR = RP = 0` (plus a family-specific
//! tail) admits closed-form expressions for N^d built from the Drazin data
//! of the individual blocks. This module implements:
//!
//! - the two-term split for a pair with PQ = 0 ([`hartwig_sum`]),
//! - the block-triangular formula ([`triangular_block_drazin`]),
//! - corner compressions by idempotents ([`corner_drazin`], [`pierce_blocks`]),
//! - the core expansion for T = (S+Q) + P^pi (R+P) ([`t_core_drazin`]),
//! - the four-part sum N^d = P^d + X + T^d ([`sum_of_four`]) together with
//!   its nilpotent specialization ([`sum_of_four_nilpotent`]) and transpose
//!   dual ([`sum_of_four_dual`]),
//! - the 2n x 2n lift that reads N^d off the blocks of a doubled matrix
//!   ([`pseudo_block_lift`]).
//!
//! Every operation validates its hypothesis set numerically before touching
//! the formula; formulas never run silently on violating inputs.

use crate::engine::{axiom_residuals, drazin, index, DrazinResult};
use crate::error::{Error, Result};
use crate::hypotheses::{self, ConditionSet};
use crate::matrix::{assemble_block2x2, partition_block2x2, product_collapsed, CMatrix, Tolerance};

/// Hypothesis family a pseudo-block quadruple is declared to satisfy.
///
/// All families share `PQ = QP = 0` and `PS = SQ = QR = RP = 0` except
/// `HartwigPQ`, which only promises `PQ = 0` (and is used for pairs stored
/// with R = S = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PseudoBlockFamily {
    /// The base pattern plus R^d = S^d = 0.
    Basic,
    /// Basic plus R^2 = S^2 = 0.
    NilSquares,
    /// The base pattern plus SP = SR = 0 (no nilpotency required).
    SpSr,
    /// The base pattern plus RS = QS = 0 (transpose mirror of SpSr).
    RsQs,
    /// Only PQ = 0; the two-term split applies to (P, Q).
    HartwigPQ,
}

impl PseudoBlockFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Basic => "Basic",
            Self::NilSquares => "NilSquares",
            Self::SpSr => "SpSr",
            Self::RsQs => "RsQs",
            Self::HartwigPQ => "HartwigPQ",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Basic" => Some(Self::Basic),
            "NilSquares" => Some(Self::NilSquares),
            "SpSr" => Some(Self::SpSr),
            "RsQs" => Some(Self::RsQs),
            "HartwigPQ" => Some(Self::HartwigPQ),
            _ => None,
        }
    }

    /// The condition set that validates this family.
    pub fn condition_set(&self) -> ConditionSet {
        match self {
            Self::Basic => ConditionSet::PseudoBlock,
            Self::NilSquares => ConditionSet::NilSquares,
            Self::SpSr => ConditionSet::SpSr,
            Self::RsQs => ConditionSet::RsQs,
            Self::HartwigPQ => ConditionSet::HartwigPQ,
        }
    }
}

/// A quadruple (P, Q, R, S) of equal-size square matrices with a declared
/// hypothesis family. N = P + Q + R + S is the matrix whose Drazin inverse
/// the formulas produce.
#[derive(Debug, Clone)]
pub struct PseudoBlockInstance {
    pub p: CMatrix,
    pub q: CMatrix,
    pub r: CMatrix,
    pub s: CMatrix,
    pub family: PseudoBlockFamily,
}

impl PseudoBlockInstance {
    pub fn new(
        p: CMatrix,
        q: CMatrix,
        r: CMatrix,
        s: CMatrix,
        family: PseudoBlockFamily,
    ) -> Result<Self> {
        let n = p.rows();
        for (label, m) in [("P", &p), ("Q", &q), ("R", &r), ("S", &s)] {
            if !m.is_square() || m.rows() != n {
                return Err(Error::Shape(format!(
                    "block {label} must be {n}x{n}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self { p, q, r, s, family })
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// N = P + Q + R + S.
    pub fn sum(&self) -> CMatrix {
        &(&self.p + &self.q) + &(&self.r + &self.s)
    }
}

/// Summation limits for the additive expansions. The minimal valid choices
/// are l = max(ind S, ind Q), m = max(ind R, ind P),
/// n = max(ind(S+Q), ind(P^pi (R+P))) and g = ind(T); any larger values give
/// the same result because each extra term carries an annihilating projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummationBounds {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub g: usize,
}

impl SummationBounds {
    /// Multiplies every bound by `factor` (used by the tail-vanishing tests).
    pub fn scaled(&self, factor: usize) -> Self {
        Self {
            l: self.l * factor,
            m: self.m * factor,
            n: self.n * factor,
            g: self.g * factor,
        }
    }
}

/// Intermediate values of [`sum_of_four`]: the result is exactly
/// `pd + x + td`.
#[derive(Debug, Clone)]
pub struct SumOfFourTrace {
    /// T = (S + Q) + P^pi (R + P).
    pub t: CMatrix,
    /// The correction term X.
    pub x: CMatrix,
    /// P^d.
    pub pd: CMatrix,
    /// T^d as produced by the core expansion.
    pub td: CMatrix,
    pub bounds: SummationBounds,
}

/// A pair of idempotents used for corner compressions.
#[derive(Debug, Clone)]
pub struct PierceContext {
    e: CMatrix,
    f: CMatrix,
}

impl PierceContext {
    /// Validates that both matrices are idempotent within `eq_rtol`.
    pub fn new(e: CMatrix, f: CMatrix, tol: Tolerance) -> Result<Self> {
        let mut failures = Vec::new();
        for (label, m) in [("e^2 = e", &e), ("f^2 = f", &f)] {
            if !m.is_square() {
                return Err(Error::Shape(format!(
                    "idempotent must be square, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            let res = (m * m).rel_residual(m);
            if res > tol.eq_rtol() {
                failures.push((label.to_string(), res));
            }
        }
        if !failures.is_empty() {
            return Err(Error::HypothesisViolation {
                set: "PierceIdempotent".into(),
                failures,
            });
        }
        Ok(Self { e, f })
    }

    /// Same idempotent on both sides.
    pub fn symmetric(e: CMatrix, tol: Tolerance) -> Result<Self> {
        Self::new(e.clone(), e, tol)
    }

    pub fn e(&self) -> &CMatrix {
        &self.e
    }

    pub fn f(&self) -> &CMatrix {
        &self.f
    }
}

/// Which triangle the assembled block matrix lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// M = [[A, C], [0, D]].
    Upper,
    /// N = [[D, 0], [C, A]].
    Lower,
}

/// `[I, M, M^2, ..., M^upto]`.
fn power_table(m: &CMatrix, upto: usize) -> Vec<CMatrix> {
    let mut table = Vec::with_capacity(upto + 1);
    table.push(CMatrix::identity(m.rows()));
    for k in 1..=upto {
        table.push(&table[k - 1] * m);
    }
    table
}

fn gate_pseudo(inst: &PseudoBlockInstance, set: ConditionSet, tol: Tolerance) -> Result<()> {
    let report = hypotheses::check_pseudo(inst, set, tol)?;
    if !report.passed() {
        return Err(Error::HypothesisViolation {
            set: set.name().to_string(),
            failures: report.failing(),
        });
    }
    Ok(())
}

fn zero_product_residual(x: &CMatrix, y: &CMatrix) -> f64 {
    (x * y).norm() / (1.0 + x.norm() * y.norm())
}

/// Drazin inverse of P + Q under PQ = 0:
/// `Q^pi sum_{i<t} Q^i (P^d)^{i+1} + sum_{i<s} (Q^d)^{i+1} P^i P^pi`
/// with s = ind(P) and t = ind(Q). Empty sums are zero.
pub fn hartwig_sum(p: &CMatrix, q: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let s_bound = index(p, tol)?;
    let t_bound = index(q, tol)?;
    hartwig_sum_with_bounds(p, q, tol, s_bound, t_bound)
}

/// [`hartwig_sum`] with explicit summation limits `s >= ind(P)`,
/// `t >= ind(Q)`.
pub fn hartwig_sum_with_bounds(
    p: &CMatrix,
    q: &CMatrix,
    tol: Tolerance,
    s_bound: usize,
    t_bound: usize,
) -> Result<CMatrix> {
    if !p.is_square() || p.rows() != q.rows() || !q.is_square() {
        return Err(Error::Shape(format!(
            "hartwig_sum requires equal square shapes, got {}x{} and {}x{}",
            p.rows(),
            p.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let res = zero_product_residual(p, q);
    if res > tol.eq_rtol() {
        return Err(Error::HypothesisViolation {
            set: "HartwigPQ".into(),
            failures: vec![("PQ = 0".into(), res)],
        });
    }
    let dp = drazin(p, tol)?;
    let dq = drazin(q, tol)?;
    let n = p.rows();
    // Each term carries an annihilating factor (Q^pi Q^i or P^i P^pi) that
    // is exactly zero beyond the index; once it collapses to rounding noise
    // the term is skipped instead of being amplified by the inverse powers.
    let mut total = CMatrix::zeros(n, n);
    let mut q_pow = CMatrix::identity(n);
    let mut pd_pow = dp.d.clone();
    for i in 0..t_bound {
        let qpq = &dq.projector * &q_pow;
        if !product_collapsed(&qpq, dq.projector.norm(), q_pow.norm()) {
            total = &total + &(&qpq * &pd_pow);
        }
        if i + 1 < t_bound {
            q_pow = &q_pow * q;
            pd_pow = &pd_pow * &dp.d;
        }
    }
    let mut p_pow = CMatrix::identity(n);
    let mut qd_pow = dq.d.clone();
    for i in 0..s_bound {
        let ppp = &p_pow * &dp.projector;
        if !product_collapsed(&ppp, p_pow.norm(), dp.projector.norm()) {
            total = &total + &(&qd_pow * &ppp);
        }
        if i + 1 < s_bound {
            p_pow = &p_pow * p;
            qd_pow = &qd_pow * &dq.d;
        }
    }
    Ok(total)
}

/// Drazin inverse of a block-triangular matrix.
///
/// With `a` (m x m), `d` (n x n) and `c` (m x n) the operation returns
/// `[[a^d, X], [0, d^d]]` for `Upper` (the matrix `[[a, c], [0, d]]`) and
/// `[[d^d, 0], [X, a^d]]` for `Lower` (the matrix `[[d, 0], [c, a]]`), where
/// `X = sum_{i<s} (a^d)^{i+2} c d^i d^pi + a^pi sum_{i<r} a^i c (d^d)^{i+2}
/// - a^d c d^d`, r = ind(a), s = ind(d).
pub fn triangular_block_drazin(
    a: &CMatrix,
    c: &CMatrix,
    d: &CMatrix,
    orientation: Orientation,
    tol: Tolerance,
) -> Result<CMatrix> {
    let r_bound = index(a, tol)?;
    let s_bound = index(d, tol)?;
    triangular_block_drazin_with_bounds(a, c, d, orientation, tol, r_bound, s_bound)
}

/// [`triangular_block_drazin`] with explicit limits `r >= ind(a)`,
/// `s >= ind(d)`.
pub fn triangular_block_drazin_with_bounds(
    a: &CMatrix,
    c: &CMatrix,
    d: &CMatrix,
    orientation: Orientation,
    tol: Tolerance,
    r_bound: usize,
    s_bound: usize,
) -> Result<CMatrix> {
    if !a.is_square() || !d.is_square() || c.rows() != a.rows() || c.cols() != d.cols() {
        return Err(Error::Shape(format!(
            "triangular blocks must be a: k x k, d: n x n, c: k x n; got a {}x{}, c {}x{}, d {}x{}",
            a.rows(),
            a.cols(),
            c.rows(),
            c.cols(),
            d.rows(),
            d.cols()
        )));
    }
    let da = drazin(a, tol)?;
    let dd = drazin(d, tol)?;
    let x = triangular_coupling(a, &da, c, d, &dd, r_bound, s_bound);
    // Both layouts place the zero block opposite X, with d-rows and a-cols.
    let zero_block = CMatrix::zeros(d.rows(), a.rows());
    match orientation {
        Orientation::Upper => assemble_block2x2(&da.d, &x, &zero_block, &dd.d),
        Orientation::Lower => assemble_block2x2(&dd.d, &zero_block, &x, &da.d),
    }
}

/// The off-diagonal coupling block shared by both triangular orientations.
fn triangular_coupling(
    a: &CMatrix,
    da: &DrazinResult,
    c: &CMatrix,
    d: &CMatrix,
    dd: &DrazinResult,
    r_bound: usize,
    s_bound: usize,
) -> CMatrix {
    let (m, n) = (c.rows(), c.cols());
    let mut x = CMatrix::zeros(m, n);
    let mut ad_pow = &da.d * &da.d;
    let mut d_pow = CMatrix::identity(n);
    for i in 0..s_bound {
        let dpp = &d_pow * &dd.projector;
        if !product_collapsed(&dpp, d_pow.norm(), dd.projector.norm()) {
            x = &x + &(&(&ad_pow * c) * &dpp);
        }
        if i + 1 < s_bound {
            ad_pow = &ad_pow * &da.d;
            d_pow = &d_pow * d;
        }
    }
    let mut a_pow = CMatrix::identity(m);
    let mut dd_pow = &dd.d * &dd.d;
    for i in 0..r_bound {
        let ppa = &da.projector * &a_pow;
        if !product_collapsed(&ppa, da.projector.norm(), a_pow.norm()) {
            x = &x + &(&(&ppa * c) * &dd_pow);
        }
        if i + 1 < r_bound {
            a_pow = &a_pow * a;
            dd_pow = &dd_pow * &dd.d;
        }
    }
    &x - &(&(&da.d * c) * &dd.d)
}

/// Compression of A^d by idempotents: when `(e A f)^i = e A^i f` for every
/// power i >= 1, the Drazin inverse of eAf is e A^d f. The power identity is
/// checked numerically for i = 1..=2n before the result is formed, and the
/// result is verified against the Drazin axioms for eAf.
pub fn corner_drazin(a: &CMatrix, ctx: &PierceContext, tol: Tolerance) -> Result<CMatrix> {
    if !a.is_square() || ctx.e.rows() != a.rows() || ctx.f.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "corner_drazin requires square matrices of equal size, got a {}x{}, e {}x{}, f {}x{}",
            a.rows(),
            a.cols(),
            ctx.e.rows(),
            ctx.e.cols(),
            ctx.f.rows(),
            ctx.f.cols()
        )));
    }
    let n = a.rows();
    let eaf = &(&ctx.e * a) * &ctx.f;
    let mut g_pow = eaf.clone();
    let mut a_pow = a.clone();
    for i in 1..=2 * n {
        let compressed = &(&ctx.e * &a_pow) * &ctx.f;
        let res = g_pow.rel_residual(&compressed);
        if res > tol.eq_rtol() {
            return Err(Error::HypothesisViolation {
                set: "CornerCommutation".into(),
                failures: vec![(format!("(eAf)^{i} = e A^{i} f"), res)],
            });
        }
        if i < 2 * n {
            g_pow = &g_pow * &eaf;
            a_pow = &a_pow * a;
        }
    }
    let da = drazin(a, tol)?;
    let result = &(&ctx.e * &da.d) * &ctx.f;
    let k = index(&eaf, tol)?;
    let res = axiom_residuals(&eaf, &result, k)?;
    if res.max() > 10.0 * tol.eq_rtol() {
        return Err(Error::IllConditioned {
            commute: res.commute,
            inner: res.inner,
            power: res.power,
            limit: 10.0 * tol.eq_rtol(),
        });
    }
    Ok(result)
}

/// The four corner compressions `(eae, ea(1-e), (1-e)ae, (1-e)a(1-e))` for an
/// idempotent e. Their sum reproduces `a` up to floating-point addition.
pub fn pierce_blocks(
    a: &CMatrix,
    e: &CMatrix,
    tol: Tolerance,
) -> Result<(CMatrix, CMatrix, CMatrix, CMatrix)> {
    if !a.is_square() || !e.is_square() || a.rows() != e.rows() {
        return Err(Error::Shape(format!(
            "pierce_blocks requires square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            e.rows(),
            e.cols()
        )));
    }
    let res = (e * e).rel_residual(e);
    if res > tol.eq_rtol() {
        return Err(Error::HypothesisViolation {
            set: "PierceIdempotent".into(),
            failures: vec![("e^2 = e".into(), res)],
        });
    }
    let comp = &CMatrix::identity(e.rows()) - e;
    let ae = a * e;
    let ac = a * &comp;
    Ok((e * &ae, e * &ac, &comp * &ae, &comp * &ac))
}

/// T = (S + Q) + P^pi (R + P).
fn t_matrix(inst: &PseudoBlockInstance, p_proj: &CMatrix) -> CMatrix {
    &(&inst.s + &inst.q) + &(p_proj * &(&inst.r + &inst.p))
}

/// Minimal summation bounds for an SpSr instance.
pub fn summation_bounds(inst: &PseudoBlockInstance, tol: Tolerance) -> Result<SummationBounds> {
    let dp = drazin(&inst.p, tol)?;
    let l = index(&inst.s, tol)?.max(index(&inst.q, tol)?);
    let m = index(&inst.r, tol)?.max(index(&inst.p, tol)?);
    let sq = &inst.s + &inst.q;
    let pprp = &dp.projector * &(&inst.r + &inst.p);
    let n = index(&sq, tol)?.max(index(&pprp, tol)?);
    let t = &sq + &pprp;
    let g = index(&t, tol)?;
    Ok(SummationBounds { l, m, n, g })
}

/// Drazin data of the four blocks, computed once per formula evaluation.
struct BlockDrazin {
    p: DrazinResult,
    q: DrazinResult,
    r: DrazinResult,
    s: DrazinResult,
}

fn block_drazin(inst: &PseudoBlockInstance, tol: Tolerance) -> Result<BlockDrazin> {
    Ok(BlockDrazin {
        p: drazin(&inst.p, tol)?,
        q: drazin(&inst.q, tol)?,
        r: drazin(&inst.r, tol)?,
        s: drazin(&inst.s, tol)?,
    })
}

/// The expanded T^d of the core lemma, shared-j reading: the outer index j
/// couples the left factor (powers of P and R) with the right factor (powers
/// of Q and S) in both double sums.
fn t_core_formula(inst: &PseudoBlockInstance, dz: &BlockDrazin, b: &SummationBounds) -> CMatrix {
    let n_dim = inst.dim();
    let (l_b, m_b, n_b) = (b.l, b.m, b.n);
    let p_pows = power_table(&inst.p, n_b.max(m_b + 1));
    let r_pows = power_table(&inst.r, n_b);
    let rd_pows = power_table(&dz.r.d, m_b + n_b + 1);
    let q_pows = power_table(&inst.q, l_b + n_b + 1);
    let qd_pows = power_table(&dz.q.d, l_b + n_b + 1);
    let s_pows = power_table(&inst.s, l_b.max(n_b));
    let sd_pows = power_table(&dz.s.d, l_b + n_b + 1);

    // sum_{i<m} P^{i+1} (R^d)^{i+1} is independent of j; hoist it.
    let mut p_rd = CMatrix::zeros(n_dim, n_dim);
    for i in 0..m_b {
        p_rd = &p_rd + &(&p_pows[i + 1] * &rd_pows[i + 1]);
    }

    let mut td = CMatrix::zeros(n_dim, n_dim);
    for j in 0..n_b {
        // Left factor: P^pi (sum_{k=1..j} P^k R^{j-k} + R^pi R^j
        //                    - sum_{i<m} P^{i+1} (R^d)^{i+1} R^j).
        // It vanishes identically beyond the minimal bound; track the scale
        // of its summands so its numerical death is recognized and the
        // growing right factor never amplifies leftover noise.
        let mut left = &dz.r.projector * &r_pows[j];
        let mut left_scale = dz.r.projector.norm() * r_pows[j].norm();
        for k in 1..=j {
            left = &left + &(&p_pows[k] * &r_pows[j - k]);
            left_scale += p_pows[k].norm() * r_pows[j - k].norm();
        }
        left = &left - &(&p_rd * &r_pows[j]);
        left_scale += p_rd.norm() * r_pows[j].norm();
        let l_j = &dz.p.projector * &left;
        if !product_collapsed(&l_j, dz.p.projector.norm(), left_scale) {
            // Right factor: Q^pi sum_{h<l} Q^h (S^d)^{h+j+1}
            //               - sum_{k=1..j} (Q^d)^k (S^d)^{j+1-k}
            //               + sum_{h<l} (Q^d)^{h+j+1} S^h S^pi.
            let mut first = CMatrix::zeros(n_dim, n_dim);
            for h in 0..l_b {
                first = &first + &(&q_pows[h] * &sd_pows[h + j + 1]);
            }
            let mut b_j = &dz.q.projector * &first;
            for k in 1..=j {
                b_j = &b_j - &(&qd_pows[k] * &sd_pows[j + 1 - k]);
            }
            for h in 0..l_b {
                b_j = &b_j + &(&(&qd_pows[h + j + 1] * &s_pows[h]) * &dz.s.projector);
            }
            td = &td + &(&l_j * &b_j);
        }

        // Second part: P^pi sum_{i<m} P^i (R^d)^{i+j+1} times
        // (sum_{k=0..j} Q^k S^{j-k} S^pi - Q^pi sum_{h<l} Q^{h+1+j} (S^d)^{h+1}
        //  - sum_{h<l} Q^{j+1} (Q^d)^{h+1} S^h S^pi); the right factor is the
        // vanishing one here.
        let mut c_j = CMatrix::zeros(n_dim, n_dim);
        let mut c_scale = 0.0;
        for k in 0..=j {
            c_j = &c_j + &(&(&q_pows[k] * &s_pows[j - k]) * &dz.s.projector);
            c_scale += q_pows[k].norm() * s_pows[j - k].norm() * dz.s.projector.norm();
        }
        let mut mid = CMatrix::zeros(n_dim, n_dim);
        let mut mid_scale = 0.0;
        for h in 0..l_b {
            mid = &mid + &(&q_pows[h + 1 + j] * &sd_pows[h + 1]);
            mid_scale += q_pows[h + 1 + j].norm() * sd_pows[h + 1].norm();
        }
        c_j = &c_j - &(&dz.q.projector * &mid);
        c_scale += dz.q.projector.norm() * mid_scale;
        let mut last = CMatrix::zeros(n_dim, n_dim);
        let mut last_scale = 0.0;
        for h in 0..l_b {
            last = &last + &(&(&qd_pows[h + 1] * &s_pows[h]) * &dz.s.projector);
            last_scale += qd_pows[h + 1].norm() * s_pows[h].norm() * dz.s.projector.norm();
        }
        c_j = &c_j - &(&q_pows[j + 1] * &last);
        c_scale += q_pows[j + 1].norm() * last_scale;
        if !product_collapsed(&c_j, 1.0, c_scale) {
            let mut f_j = CMatrix::zeros(n_dim, n_dim);
            for i in 0..m_b {
                f_j = &f_j + &(&p_pows[i] * &rd_pows[i + j + 1]);
            }
            td = &td + &(&(&dz.p.projector * &f_j) * &c_j);
        }
    }
    td
}

/// Drazin inverse of T = (S+Q) + P^pi (R+P) under the SpSr hypotheses,
/// via the expanded two-part formula.
pub fn t_core_drazin(inst: &PseudoBlockInstance, tol: Tolerance) -> Result<CMatrix> {
    let bounds = summation_bounds(inst, tol)?;
    t_core_drazin_with_bounds(inst, tol, &bounds)
}

/// [`t_core_drazin`] with explicit bounds.
pub fn t_core_drazin_with_bounds(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
    bounds: &SummationBounds,
) -> Result<CMatrix> {
    gate_pseudo(inst, ConditionSet::SpSr, tol)?;
    let dz = block_drazin(inst, tol)?;
    Ok(t_core_formula(inst, &dz, bounds))
}

/// N^d = P^d + X + T^d for an SpSr instance, where
/// `X = sum_{k<g} (P^d)^{k+2} R T^k T^pi - P^d R T^d`.
pub fn sum_of_four(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
) -> Result<(CMatrix, SumOfFourTrace)> {
    let bounds = summation_bounds(inst, tol)?;
    sum_of_four_with_bounds(inst, tol, &bounds)
}

/// [`sum_of_four`] with explicit bounds.
pub fn sum_of_four_with_bounds(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
    bounds: &SummationBounds,
) -> Result<(CMatrix, SumOfFourTrace)> {
    gate_pseudo(inst, ConditionSet::SpSr, tol)?;
    let dz = block_drazin(inst, tol)?;
    let td = t_core_formula(inst, &dz, bounds);
    let t = t_matrix(inst, &dz.p.projector);
    let n_dim = inst.dim();
    let t_proj = &CMatrix::identity(n_dim) - &(&t * &td);
    let t_pows = power_table(&t, bounds.g.saturating_sub(1));
    let pd_pows = power_table(&dz.p.d, bounds.g + 1);
    let mut x = CMatrix::zeros(n_dim, n_dim);
    for k in 0..bounds.g {
        let tkp = &t_pows[k] * &t_proj;
        if product_collapsed(&tkp, t_pows[k].norm(), t_proj.norm()) {
            continue;
        }
        x = &x + &(&(&pd_pows[k + 2] * &inst.r) * &tkp);
    }
    x = &x - &(&(&dz.p.d * &inst.r) * &td);
    let nd = &(&dz.p.d + &x) + &td;
    let trace = SumOfFourTrace {
        t,
        x,
        pd: dz.p.d,
        td,
        bounds: *bounds,
    };
    Ok((nd, trace))
}

/// Specialization of [`sum_of_four`] to nilpotent R and S (R^d = S^d = 0):
/// `T^d = P^pi sum_j (sum_{k<=j} P^k R^{j-k}) (sum_{h<l} (Q^d)^{h+j+1} S^h)`
/// and `X = sum_{k<g} (P^d)^{k+2} R T^k T^pi
///          - P^d sum_j R^{j+1} sum_{h<l} (Q^d)^{h+j+1} S^h`.
pub fn sum_of_four_nilpotent(inst: &PseudoBlockInstance, tol: Tolerance) -> Result<CMatrix> {
    let bounds = summation_bounds(inst, tol)?;
    sum_of_four_nilpotent_with_bounds(inst, tol, &bounds)
}

/// [`sum_of_four_nilpotent`] with explicit bounds.
pub fn sum_of_four_nilpotent_with_bounds(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
    bounds: &SummationBounds,
) -> Result<CMatrix> {
    gate_pseudo(inst, ConditionSet::SpSr, tol)?;
    let dz = block_drazin(inst, tol)?;
    let mut failures = Vec::new();
    for (label, d) in [("R^d = 0", &dz.r.d), ("S^d = 0", &dz.s.d)] {
        let res = d.norm();
        if res > tol.eq_rtol() {
            failures.push((label.to_string(), res));
        }
    }
    if !failures.is_empty() {
        return Err(Error::HypothesisViolation {
            set: "NilpotentRS".into(),
            failures,
        });
    }
    let n_dim = inst.dim();
    let (l_b, n_b, g_b) = (bounds.l, bounds.n, bounds.g);
    let p_pows = power_table(&inst.p, n_b);
    let r_pows = power_table(&inst.r, n_b);
    let qd_pows = power_table(&dz.q.d, l_b + n_b + 1);
    let s_pows = power_table(&inst.s, l_b);

    // Per-j inner factor sum_{h<l} (Q^d)^{h+j+1} S^h, reused by T^d and X.
    let inner = |j: usize| {
        let mut acc = CMatrix::zeros(n_dim, n_dim);
        for h in 0..l_b {
            acc = &acc + &(&qd_pows[h + j + 1] * &s_pows[h]);
        }
        acc
    };

    let mut td = CMatrix::zeros(n_dim, n_dim);
    let mut x2 = CMatrix::zeros(n_dim, n_dim);
    for j in 0..n_b {
        let rhs = inner(j);
        let mut left = CMatrix::zeros(n_dim, n_dim);
        let mut left_scale = 0.0;
        for k in 0..=j {
            left = &left + &(&p_pows[k] * &r_pows[j - k]);
            left_scale += p_pows[k].norm() * r_pows[j - k].norm();
        }
        let pl = &dz.p.projector * &left;
        if !product_collapsed(&pl, dz.p.projector.norm(), left_scale) {
            td = &td + &(&pl * &rhs);
        }
        // R^{j+1} is nilpotent; skip once it has died to noise.
        if !product_collapsed(&r_pows[j + 1], r_pows[j].norm(), inst.r.norm()) {
            x2 = &x2 + &(&r_pows[j + 1] * &rhs);
        }
    }

    let t = t_matrix(inst, &dz.p.projector);
    let t_proj = &CMatrix::identity(n_dim) - &(&t * &td);
    let t_pows = power_table(&t, g_b.saturating_sub(1));
    let pd_pows = power_table(&dz.p.d, g_b + 1);
    let mut x = CMatrix::zeros(n_dim, n_dim);
    for k in 0..g_b {
        let tkp = &t_pows[k] * &t_proj;
        if product_collapsed(&tkp, t_pows[k].norm(), t_proj.norm()) {
            continue;
        }
        x = &x + &(&(&pd_pows[k + 2] * &inst.r) * &tkp);
    }
    x = &x - &(&dz.p.d * &x2);
    Ok(&(&dz.p.d + &x) + &td)
}

/// The mirrored instance (Q^T, P^T, R^T, S^T), which satisfies the SpSr
/// hypotheses exactly when the original satisfies RS = QS = 0.
fn mirror(inst: &PseudoBlockInstance) -> PseudoBlockInstance {
    PseudoBlockInstance {
        p: inst.q.transpose(),
        q: inst.p.transpose(),
        r: inst.r.transpose(),
        s: inst.s.transpose(),
        family: PseudoBlockFamily::SpSr,
    }
}

/// N^d for an RsQs instance via transpose duality:
/// `(N^T)^d = (N^d)^T` and the substitution P' = Q^T, Q' = P^T, R' = R^T,
/// S' = S^T turns the RsQs conditions into the SpSr conditions.
pub fn sum_of_four_dual(inst: &PseudoBlockInstance, tol: Tolerance) -> Result<CMatrix> {
    gate_pseudo(inst, ConditionSet::RsQs, tol)?;
    let mirrored = mirror(inst);
    let (nd_t, _) = sum_of_four(&mirrored, tol)?;
    Ok(nd_t.transpose())
}

/// [`sum_of_four_dual`] with explicit bounds, interpreted for the mirrored
/// instance.
pub fn sum_of_four_dual_with_bounds(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
    bounds: &SummationBounds,
) -> Result<CMatrix> {
    gate_pseudo(inst, ConditionSet::RsQs, tol)?;
    let mirrored = mirror(inst);
    let (nd_t, _) = sum_of_four_with_bounds(&mirrored, tol, bounds)?;
    Ok(nd_t.transpose())
}

/// Minimal bounds for the mirror of an RsQs instance (for tail tests).
pub fn dual_summation_bounds(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
) -> Result<SummationBounds> {
    summation_bounds(&mirror(inst), tol)
}

/// The four corner blocks of the lifted Drazin inverse, in the layout
/// `[[a1, a3], [a4, a2]]`.
#[derive(Debug, Clone)]
pub struct LiftBlocks {
    pub a1: CMatrix,
    pub a2: CMatrix,
    pub a3: CMatrix,
    pub a4: CMatrix,
}

/// Reads N^d off the doubled matrix T = [[P, R], [S, Q]]: with
/// T^d = [[A1, A3], [A4, A2]], the result is N^d = A1 + A2 + A3 + A4.
/// Requires the base pseudo-block pattern plus R^2 = S^2 = 0.
pub fn pseudo_block_lift(
    inst: &PseudoBlockInstance,
    tol: Tolerance,
) -> Result<(CMatrix, LiftBlocks)> {
    gate_pseudo(inst, ConditionSet::NilSquares, tol)?;
    let n = inst.dim();
    let t = assemble_block2x2(&inst.p, &inst.r, &inst.s, &inst.q)?;
    let td = drazin(&t, tol)?.d;
    let (a1, a3, a4, a2) = partition_block2x2(&td, n, n)?;
    let nd = &(&a1 + &a2) + &(&a3 + &a4);
    Ok((nd, LiftBlocks { a1, a2, a3, a4 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::drazin;
    use num_complex::Complex64;

    fn mat(rows: usize, cols: usize, re: &[f64]) -> CMatrix {
        CMatrix::from_real_rows(rows, cols, re.to_vec()).unwrap()
    }

    fn diag(entries: &[f64]) -> CMatrix {
        let n = entries.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(entries[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn spsr(p: CMatrix, q: CMatrix, r: CMatrix, s: CMatrix) -> PseudoBlockInstance {
        PseudoBlockInstance::new(p, q, r, s, PseudoBlockFamily::SpSr).unwrap()
    }

    fn zero_inst(n: usize) -> PseudoBlockInstance {
        let z = CMatrix::zeros(n, n);
        spsr(z.clone(), z.clone(), z.clone(), z)
    }

    // ---- hartwig_sum ----

    #[test]
    fn hartwig_zero_p_reduces_to_q_drazin_exactly() {
        let q = mat(2, 2, &[1.0, 2.0, 0.5, 3.0]);
        let direct = drazin(&q, tol()).unwrap().d;
        let viasum = hartwig_sum(&CMatrix::zeros(2, 2), &q, tol()).unwrap();
        assert_eq!(viasum.row_major(), direct.row_major());
    }

    #[test]
    fn hartwig_zero_q_reduces_to_p_drazin_exactly() {
        let p = mat(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let direct = drazin(&p, tol()).unwrap().d;
        let viasum = hartwig_sum(&p, &CMatrix::zeros(2, 2), tol()).unwrap();
        assert_eq!(viasum.row_major(), direct.row_major());
    }

    #[test]
    fn hartwig_hand_expansion() {
        // P + Q = [[1,0],[1,0]] is idempotent, so (P+Q)^d = P + Q; the
        // formula expands to Q^pi (P^d + Q (P^d)^2) = P + QP.
        let p = mat(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let q = mat(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let expected = mat(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let got = hartwig_sum(&p, &q, tol()).unwrap();
        assert!(got.approx_eq(&expected, 1e-13));
    }

    #[test]
    fn hartwig_invertible_p() {
        let p = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let expected = mat(2, 2, &[-2.0, 1.0, 1.5, -0.5]);
        let got = hartwig_sum(&p, &CMatrix::zeros(2, 2), tol()).unwrap();
        assert!(got.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn hartwig_rejects_nonzero_pq() {
        let i = CMatrix::identity(2);
        assert!(matches!(
            hartwig_sum(&i, &i, tol()),
            Err(Error::HypothesisViolation { .. })
        ));
    }

    // ---- triangular_block_drazin ----

    #[test]
    fn triangular_identity_blocks() {
        let i = CMatrix::identity(2);
        let z = CMatrix::zeros(2, 2);
        for orientation in [Orientation::Upper, Orientation::Lower] {
            let got = triangular_block_drazin(&i, &z, &i, orientation, tol()).unwrap();
            assert!(got.approx_eq(&CMatrix::identity(4), 1e-14));
        }
    }

    #[test]
    fn triangular_upper_hand_case() {
        // M = [[2,1],[0,0]] satisfies M^2 = 2M so M^# = M/4.
        let a = mat(1, 1, &[2.0]);
        let c = mat(1, 1, &[1.0]);
        let d = mat(1, 1, &[0.0]);
        let got = triangular_block_drazin(&a, &c, &d, Orientation::Upper, tol()).unwrap();
        assert!(got.approx_eq(&mat(2, 2, &[0.5, 0.25, 0.0, 0.0]), 1e-13));
    }

    #[test]
    fn triangular_lower_hand_case() {
        // N = [[0,0],[1,2]] is the transpose-symmetric mirror: N^# = N/4.
        let a = mat(1, 1, &[2.0]);
        let c = mat(1, 1, &[1.0]);
        let d = mat(1, 1, &[0.0]);
        let got = triangular_block_drazin(&a, &c, &d, Orientation::Lower, tol()).unwrap();
        assert!(got.approx_eq(&mat(2, 2, &[0.0, 0.0, 0.25, 0.5]), 1e-13));
    }

    #[test]
    fn triangular_matches_engine_on_mixed_blocks() {
        let a = mat(2, 2, &[1.5, 1.0, 0.0, 0.0]);
        let c = mat(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let d = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let m = crate::matrix::assemble_block2x2(&a, &c, &CMatrix::zeros(2, 2), &d).unwrap();
        let expected = drazin(&m, tol()).unwrap().d;
        let got = triangular_block_drazin(&a, &c, &d, Orientation::Upper, tol()).unwrap();
        assert!(got.approx_eq(&expected, 1e-10));
    }

    // ---- corner_drazin / pierce_blocks ----

    #[test]
    fn corner_identity_context() {
        let a = mat(2, 2, &[2.0, 1.0, 0.0, 0.0]);
        let ctx = PierceContext::symmetric(CMatrix::identity(2), tol()).unwrap();
        let got = corner_drazin(&a, &ctx, tol()).unwrap();
        assert!(got.approx_eq(&drazin(&a, tol()).unwrap().d, 1e-13));
    }

    #[test]
    fn corner_zero_context() {
        let a = mat(2, 2, &[2.0, 1.0, 0.0, 0.0]);
        let ctx = PierceContext::symmetric(CMatrix::zeros(2, 2), tol()).unwrap();
        let got = corner_drazin(&a, &ctx, tol()).unwrap();
        assert_eq!(got.norm(), 0.0);
    }

    #[test]
    fn corner_core_projection() {
        // e = A A^d for A = diag(2, 0): eAe is the core part, with Drazin
        // inverse equal to A^d.
        let a = diag(&[2.0, 0.0]);
        let da = drazin(&a, tol()).unwrap();
        let e = &a * &da.d;
        let ctx = PierceContext::symmetric(e, tol()).unwrap();
        let got = corner_drazin(&a, &ctx, tol()).unwrap();
        assert!(got.approx_eq(&diag(&[0.5, 0.0]), 1e-13));
    }

    #[test]
    fn corner_rejects_noncommuting_powers() {
        let a = mat(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = diag(&[1.0, 0.0]);
        let ctx = PierceContext::new(e, CMatrix::identity(2), tol()).unwrap();
        assert!(matches!(
            corner_drazin(&a, &ctx, tol()),
            Err(Error::HypothesisViolation { .. })
        ));
    }

    #[test]
    fn pierce_identity_and_zero() {
        let a = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let (c11, c12, c21, c22) = pierce_blocks(&a, &CMatrix::identity(2), tol()).unwrap();
        assert_eq!(c11.row_major(), a.row_major());
        assert_eq!((c12.norm(), c21.norm(), c22.norm()), (0.0, 0.0, 0.0));
        let (z11, z12, z21, z22) = pierce_blocks(&a, &CMatrix::zeros(2, 2), tol()).unwrap();
        assert_eq!(z22.row_major(), a.row_major());
        assert_eq!((z11.norm(), z12.norm(), z21.norm()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn pierce_corner_arithmetic() {
        let a = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let e = diag(&[1.0, 0.0]);
        let (c11, c12, c21, c22) = pierce_blocks(&a, &e, tol()).unwrap();
        assert!(c11.approx_eq(&mat(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-15));
        assert!(c12.approx_eq(&mat(2, 2, &[0.0, 2.0, 0.0, 0.0]), 1e-15));
        assert!(c21.approx_eq(&mat(2, 2, &[0.0, 0.0, 3.0, 0.0]), 1e-15));
        assert!(c22.approx_eq(&mat(2, 2, &[0.0, 0.0, 0.0, 4.0]), 1e-15));
        let sum = &(&c11 + &c12) + &(&c21 + &c22);
        assert!(sum.approx_eq(&a, 1e-15));
    }

    #[test]
    fn pierce_rejects_non_idempotent() {
        let a = CMatrix::identity(2);
        let e = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            pierce_blocks(&a, &e, tol()),
            Err(Error::HypothesisViolation { .. })
        ));
    }

    // ---- t_core_drazin ----

    #[test]
    fn t_core_zero_instance() {
        let got = t_core_drazin(&zero_inst(2), tol()).unwrap();
        assert_eq!(got.norm(), 0.0);
    }

    #[test]
    fn t_core_diagonal_collapse() {
        // P = diag(2,0), Q = diag(0,3): P^pi (R+P) = 0 so T = Q.
        let inst = spsr(
            diag(&[2.0, 0.0]),
            diag(&[0.0, 3.0]),
            CMatrix::zeros(2, 2),
            CMatrix::zeros(2, 2),
        );
        let got = t_core_drazin(&inst, tol()).unwrap();
        assert!(got.approx_eq(&diag(&[0.0, 1.0 / 3.0]), 1e-13));
    }

    #[test]
    fn t_core_matches_engine_with_offdiagonal_r() {
        let inst = spsr(
            diag(&[2.0, 0.0]),
            diag(&[0.0, 3.0]),
            mat(2, 2, &[0.0, 5.0, 0.0, 0.0]),
            CMatrix::zeros(2, 2),
        );
        let dp = drazin(&inst.p, tol()).unwrap();
        let t = &(&inst.s + &inst.q) + &(&dp.projector * &(&inst.r + &inst.p));
        let expected = drazin(&t, tol()).unwrap().d;
        let got = t_core_drazin(&inst, tol()).unwrap();
        assert!(got.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn t_core_exercises_non_nilpotent_r() {
        // Disjoint diagonal supports leave R with a genuine core part, so
        // the (R^d)-terms of the expansion carry the answer.
        let inst = spsr(
            diag(&[2.0, 0.0, 0.0]),
            diag(&[0.0, 0.0, 3.0]),
            diag(&[0.0, 5.0, 0.0]),
            CMatrix::zeros(3, 3),
        );
        let got = t_core_drazin(&inst, tol()).unwrap();
        assert!(got.approx_eq(&diag(&[0.0, 0.2, 1.0 / 3.0]), 1e-12));
    }

    // ---- sum_of_four and friends ----

    #[test]
    fn sum_of_four_zero_instance() {
        let (got, _) = sum_of_four(&zero_inst(2), tol()).unwrap();
        assert_eq!(got.norm(), 0.0);
    }

    #[test]
    fn sum_of_four_invertible_hand_case() {
        // N = [[2,5],[0,3]] is invertible; N^d = N^{-1} = [[1/2, -5/6], [0, 1/3]].
        let inst = spsr(
            diag(&[2.0, 0.0]),
            diag(&[0.0, 3.0]),
            mat(2, 2, &[0.0, 5.0, 0.0, 0.0]),
            CMatrix::zeros(2, 2),
        );
        let (got, trace) = sum_of_four(&inst, tol()).unwrap();
        let expected = mat(2, 2, &[0.5, -5.0 / 6.0, 0.0, 1.0 / 3.0]);
        assert!(got.approx_eq(&expected, 1e-12));
        // The trace reproduces the result exactly.
        let recombined = &(&trace.pd + &trace.x) + &trace.td;
        assert_eq!(recombined.row_major(), got.row_major());
    }

    #[test]
    fn sum_of_four_non_nilpotent_r() {
        let inst = spsr(
            diag(&[2.0, 0.0, 0.0]),
            diag(&[0.0, 0.0, 3.0]),
            diag(&[0.0, 5.0, 0.0]),
            CMatrix::zeros(3, 3),
        );
        let (got, _) = sum_of_four(&inst, tol()).unwrap();
        assert!(got.approx_eq(&diag(&[0.5, 0.2, 1.0 / 3.0]), 1e-12));
    }

    #[test]
    fn sum_of_four_rejects_violating_instance() {
        let i = CMatrix::identity(2);
        let inst = PseudoBlockInstance::new(
            i.clone(),
            i.clone(),
            CMatrix::zeros(2, 2),
            CMatrix::zeros(2, 2),
            PseudoBlockFamily::SpSr,
        )
        .unwrap();
        assert!(matches!(
            sum_of_four(&inst, tol()),
            Err(Error::HypothesisViolation { .. })
        ));
    }

    #[test]
    fn nilpotent_variant_collapses_to_pd_plus_qd() {
        let inst = spsr(
            diag(&[2.0, 0.0]),
            diag(&[0.0, 3.0]),
            CMatrix::zeros(2, 2),
            CMatrix::zeros(2, 2),
        );
        let got = sum_of_four_nilpotent(&inst, tol()).unwrap();
        assert!(got.approx_eq(&diag(&[0.5, 1.0 / 3.0]), 1e-13));
    }

    #[test]
    fn nilpotent_variant_triangular_family() {
        // P = diag(p, 0), Q = diag(0, q), R = [[0, r], [0, 0]]: the sum is
        // [[p, r], [0, q]] with inverse [[1/p, -r/(pq)], [0, 1/q]].
        let (p, q, r) = (2.0, 3.0, 5.0);
        let inst = spsr(
            diag(&[p, 0.0]),
            diag(&[0.0, q]),
            mat(2, 2, &[0.0, r, 0.0, 0.0]),
            CMatrix::zeros(2, 2),
        );
        let got = sum_of_four_nilpotent(&inst, tol()).unwrap();
        let expected = mat(2, 2, &[1.0 / p, -r / (p * q), 0.0, 1.0 / q]);
        assert!(got.approx_eq(&expected, 1e-12));
        // The corollary is an algebraic simplification of the theorem.
        let (general, _) = sum_of_four(&inst, tol()).unwrap();
        assert!(got.approx_eq(&general, 1e-12));
    }

    #[test]
    fn nilpotent_variant_rejects_core_r() {
        let inst = spsr(
            diag(&[2.0, 0.0, 0.0]),
            diag(&[0.0, 0.0, 3.0]),
            diag(&[0.0, 5.0, 0.0]),
            CMatrix::zeros(3, 3),
        );
        assert!(matches!(
            sum_of_four_nilpotent(&inst, tol()),
            Err(Error::HypothesisViolation { .. })
        ));
    }

    // ---- sum_of_four_dual ----

    #[test]
    fn dual_zero_instance() {
        let z = CMatrix::zeros(2, 2);
        let inst =
            PseudoBlockInstance::new(z.clone(), z.clone(), z.clone(), z, PseudoBlockFamily::RsQs)
                .unwrap();
        let got = sum_of_four_dual(&inst, tol()).unwrap();
        assert_eq!(got.norm(), 0.0);
    }

    #[test]
    fn dual_is_transpose_of_mirror() {
        let spsr_inst = spsr(
            diag(&[2.0, 0.0]),
            diag(&[0.0, 3.0]),
            mat(2, 2, &[0.0, 5.0, 0.0, 0.0]),
            CMatrix::zeros(2, 2),
        );
        let mirrored = PseudoBlockInstance::new(
            spsr_inst.q.transpose(),
            spsr_inst.p.transpose(),
            spsr_inst.r.transpose(),
            spsr_inst.s.transpose(),
            PseudoBlockFamily::RsQs,
        )
        .unwrap();
        let via_dual = sum_of_four_dual(&mirrored, tol()).unwrap();
        let direct = sum_of_four(&spsr_inst, tol()).unwrap().0.transpose();
        assert_eq!(via_dual.row_major(), direct.row_major());
        // And it is the Drazin inverse of the mirrored sum.
        let expected = drazin(&mirrored.sum(), tol()).unwrap().d;
        assert!(via_dual.approx_eq(&expected, 1e-12));
    }

    // ---- pseudo_block_lift ----

    #[test]
    fn lift_zero_instance() {
        let z = CMatrix::zeros(2, 2);
        let inst = PseudoBlockInstance::new(
            z.clone(),
            z.clone(),
            z.clone(),
            z,
            PseudoBlockFamily::NilSquares,
        )
        .unwrap();
        let (nd, blocks) = pseudo_block_lift(&inst, tol()).unwrap();
        assert_eq!(nd.norm(), 0.0);
        assert_eq!(blocks.a1.norm(), 0.0);
        assert_eq!(blocks.a4.norm(), 0.0);
    }

    #[test]
    fn lift_rank_one_hand_case() {
        // N = ones(2) with N^2 = 2N, so N^d = N/4; the doubled matrix obeys
        // T^2 = 2T as well and every lifted block is a quarter unit.
        let inst = PseudoBlockInstance::new(
            diag(&[1.0, 0.0]),
            diag(&[0.0, 1.0]),
            mat(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            mat(2, 2, &[0.0, 0.0, 1.0, 0.0]),
            PseudoBlockFamily::NilSquares,
        )
        .unwrap();
        let (nd, blocks) = pseudo_block_lift(&inst, tol()).unwrap();
        assert!(nd.approx_eq(&mat(2, 2, &[0.25, 0.25, 0.25, 0.25]), 1e-12));
        assert!(blocks
            .a1
            .approx_eq(&mat(2, 2, &[0.25, 0.0, 0.0, 0.0]), 1e-12));
        assert!(blocks
            .a3
            .approx_eq(&mat(2, 2, &[0.0, 0.25, 0.0, 0.0]), 1e-12));
        assert!(blocks
            .a4
            .approx_eq(&mat(2, 2, &[0.0, 0.0, 0.25, 0.0]), 1e-12));
        assert!(blocks
            .a2
            .approx_eq(&mat(2, 2, &[0.0, 0.0, 0.0, 0.25]), 1e-12));
    }

    #[test]
    fn bounds_scaling_changes_nothing() {
        let inst = spsr(
            diag(&[2.0, 0.0]),
            diag(&[0.0, 3.0]),
            mat(2, 2, &[0.0, 5.0, 0.0, 0.0]),
            CMatrix::zeros(2, 2),
        );
        let bounds = summation_bounds(&inst, tol()).unwrap();
        let (base, _) = sum_of_four_with_bounds(&inst, tol(), &bounds).unwrap();
        let (doubled, _) = sum_of_four_with_bounds(&inst, tol(), &bounds.scaled(2)).unwrap();
        assert!(doubled.rel_residual(&base) <= 1e-12);
    }
}
