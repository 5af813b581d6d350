//! Declarative hypothesis sets with numerical checking.
//!
//! Each closed-form result in [`crate::additive`] and [`crate::block2x2`]
//! only holds under a list of vanishing products (and occasionally a
//! nilpotency requirement). This module names those lists, evaluates them on
//! concrete instances and reports per-condition residuals, so formulas can
//! refuse to run on violating inputs with a useful diagnosis.
//!
//! Residual conventions: a product condition `X1 X2 ... Xr = 0` scores
//! `|prod| / (1 + prod of |Xi|)`; the derived `Z = 0` condition scores
//! `|Z| / (1 + |D| + |C||A^d||B|)`; a nilpotency condition `R^d = 0` scores
//! `|R^d|` directly.

use crate::additive::PseudoBlockInstance;
use crate::block2x2::BlockInstance;
use crate::engine::drazin;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Tolerance};

/// Symbols a condition can reference: instance blocks plus derived values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sym {
    P,
    Q,
    R,
    S,
    A,
    B,
    C,
    D,
    /// A^d
    ADrazin,
    /// A^pi = I - A A^d
    AProj,
    /// Z = D - C A^d B
    Z,
}

impl Sym {
    fn label(&self) -> &'static str {
        match self {
            Sym::P => "P",
            Sym::Q => "Q",
            Sym::R => "R",
            Sym::S => "S",
            Sym::A => "A",
            Sym::B => "B",
            Sym::C => "C",
            Sym::D => "D",
            Sym::ADrazin => "A^d",
            Sym::AProj => "A^pi",
            Sym::Z => "Z",
        }
    }
}

/// One requirement inside a condition set.
#[derive(Debug, Clone)]
pub enum Condition {
    /// The product of the listed symbols must vanish.
    ProductVanishes(Vec<Sym>),
    /// The generalized Schur complement Z must vanish.
    SchurVanishes,
    /// The Drazin inverse of the symbol must vanish (nilpotency).
    DrazinVanishes(Sym),
}

impl Condition {
    pub fn label(&self) -> String {
        match self {
            Condition::ProductVanishes(syms) => {
                let body = syms.iter().map(|s| s.label()).collect::<Vec<_>>().join(" ");
                format!("{body} = 0")
            }
            Condition::SchurVanishes => "Z = 0".into(),
            Condition::DrazinVanishes(sym) => format!("{}^d = 0", sym.label()),
        }
    }
}

/// Named hypothesis sets for every formula in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionSet {
    PseudoBlock,
    NilSquares,
    SpSr,
    RsQs,
    HartwigPQ,
    Miao,
    Cor42,
    Cor43i,
    Cor43ii,
    Cor44,
    Cor45,
    Cor46i,
    Cor46ii,
    Cor47,
}

use Condition::{DrazinVanishes, ProductVanishes, SchurVanishes};
use Sym::*;

impl ConditionSet {
    pub const ALL: [ConditionSet; 14] = [
        ConditionSet::PseudoBlock,
        ConditionSet::NilSquares,
        ConditionSet::SpSr,
        ConditionSet::RsQs,
        ConditionSet::HartwigPQ,
        ConditionSet::Miao,
        ConditionSet::Cor42,
        ConditionSet::Cor43i,
        ConditionSet::Cor43ii,
        ConditionSet::Cor44,
        ConditionSet::Cor45,
        ConditionSet::Cor46i,
        ConditionSet::Cor46ii,
        ConditionSet::Cor47,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConditionSet::PseudoBlock => "PseudoBlock",
            ConditionSet::NilSquares => "NilSquares",
            ConditionSet::SpSr => "SpSr",
            ConditionSet::RsQs => "RsQs",
            ConditionSet::HartwigPQ => "HartwigPQ",
            ConditionSet::Miao => "Miao",
            ConditionSet::Cor42 => "Cor42",
            ConditionSet::Cor43i => "Cor43i",
            ConditionSet::Cor43ii => "Cor43ii",
            ConditionSet::Cor44 => "Cor44",
            ConditionSet::Cor45 => "Cor45",
            ConditionSet::Cor46i => "Cor46i",
            ConditionSet::Cor46ii => "Cor46ii",
            ConditionSet::Cor47 => "Cor47",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }

    /// True when the set is checked on pseudo-block quadruples; false for
    /// 2x2 block instances.
    pub fn targets_pseudo(&self) -> bool {
        matches!(
            self,
            ConditionSet::PseudoBlock
                | ConditionSet::NilSquares
                | ConditionSet::SpSr
                | ConditionSet::RsQs
                | ConditionSet::HartwigPQ
        )
    }

    /// The declarative condition list.
    pub fn conditions(&self) -> Vec<Condition> {
        let base = || {
            vec![
                ProductVanishes(vec![P, Q]),
                ProductVanishes(vec![Q, P]),
                ProductVanishes(vec![P, S]),
                ProductVanishes(vec![S, Q]),
                ProductVanishes(vec![Q, R]),
                ProductVanishes(vec![R, P]),
            ]
        };
        match self {
            ConditionSet::PseudoBlock => {
                let mut v = base();
                v.push(DrazinVanishes(R));
                v.push(DrazinVanishes(S));
                v
            }
            ConditionSet::NilSquares => {
                let mut v = base();
                v.push(DrazinVanishes(R));
                v.push(DrazinVanishes(S));
                v.push(ProductVanishes(vec![R, R]));
                v.push(ProductVanishes(vec![S, S]));
                v
            }
            ConditionSet::SpSr => {
                let mut v = base();
                v.push(ProductVanishes(vec![S, P]));
                v.push(ProductVanishes(vec![S, R]));
                v
            }
            ConditionSet::RsQs => {
                let mut v = base();
                v.push(ProductVanishes(vec![R, S]));
                v.push(ProductVanishes(vec![Q, S]));
                v
            }
            ConditionSet::HartwigPQ => vec![ProductVanishes(vec![P, Q])],
            ConditionSet::Miao => vec![
                ProductVanishes(vec![C, AProj]),
                ProductVanishes(vec![AProj, B]),
                SchurVanishes,
            ],
            ConditionSet::Cor42 => vec![
                ProductVanishes(vec![B, Z]),
                ProductVanishes(vec![Z, C]),
                ProductVanishes(vec![AProj, B, C]),
            ],
            ConditionSet::Cor43i => vec![SchurVanishes, ProductVanishes(vec![AProj, B, C])],
            ConditionSet::Cor43ii => vec![SchurVanishes, ProductVanishes(vec![AProj, B])],
            ConditionSet::Cor44 => vec![
                ProductVanishes(vec![B, Z]),
                ProductVanishes(vec![Z, C, ADrazin]),
                ProductVanishes(vec![AProj, B, C]),
                ProductVanishes(vec![B, C, AProj]),
            ],
            ConditionSet::Cor45 => vec![
                ProductVanishes(vec![B, Z]),
                ProductVanishes(vec![Z, C]),
                ProductVanishes(vec![C, AProj, A]),
                ProductVanishes(vec![C, AProj, B]),
            ],
            ConditionSet::Cor46i => vec![SchurVanishes, ProductVanishes(vec![C, AProj])],
            ConditionSet::Cor46ii => vec![
                SchurVanishes,
                ProductVanishes(vec![AProj, B]),
                ProductVanishes(vec![B, C, AProj]),
            ],
            ConditionSet::Cor47 => vec![ProductVanishes(vec![B, C]), ProductVanishes(vec![B, D])],
        }
    }
}

/// Outcome of checking one condition set against one instance.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub set: ConditionSet,
    /// Condition label -> relative residual, in declaration order.
    pub residuals: Vec<(String, f64)>,
    /// The eq_rtol the verdict was taken at.
    pub eq_rtol: f64,
}

impl HypothesisReport {
    /// Pass iff every residual is at most eq_rtol.
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, r)| *r <= self.eq_rtol)
    }

    pub fn failing(&self) -> Vec<(String, f64)> {
        self.residuals
            .iter()
            .filter(|(_, r)| *r > self.eq_rtol)
            .cloned()
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

/// A borrowed instance of either kind.
#[derive(Clone, Copy)]
pub enum InstanceRef<'a> {
    Pseudo(&'a PseudoBlockInstance),
    Block(&'a BlockInstance),
}

/// Resolved symbol values for one instance.
struct SymTable {
    p: Option<CMatrix>,
    q: Option<CMatrix>,
    r: Option<CMatrix>,
    s: Option<CMatrix>,
    a: Option<CMatrix>,
    b: Option<CMatrix>,
    c: Option<CMatrix>,
    d: Option<CMatrix>,
    a_drazin: Option<CMatrix>,
    a_proj: Option<CMatrix>,
    z: Option<CMatrix>,
}

impl SymTable {
    fn for_pseudo(inst: &PseudoBlockInstance) -> Self {
        Self {
            p: Some(inst.p.clone()),
            q: Some(inst.q.clone()),
            r: Some(inst.r.clone()),
            s: Some(inst.s.clone()),
            a: None,
            b: None,
            c: None,
            d: None,
            a_drazin: None,
            a_proj: None,
            z: None,
        }
    }

    fn for_block(inst: &BlockInstance, tol: Tolerance) -> Result<Self> {
        let da = drazin(&inst.a, tol)?;
        let z = &inst.d - &(&(&inst.c * &da.d) * &inst.b);
        Ok(Self {
            p: None,
            q: None,
            r: None,
            s: None,
            a: Some(inst.a.clone()),
            b: Some(inst.b.clone()),
            c: Some(inst.c.clone()),
            d: Some(inst.d.clone()),
            a_drazin: Some(da.d),
            a_proj: Some(da.projector),
            z: Some(z),
        })
    }

    fn resolve(&self, sym: Sym) -> Result<&CMatrix> {
        let slot = match sym {
            Sym::P => &self.p,
            Sym::Q => &self.q,
            Sym::R => &self.r,
            Sym::S => &self.s,
            Sym::A => &self.a,
            Sym::B => &self.b,
            Sym::C => &self.c,
            Sym::D => &self.d,
            Sym::ADrazin => &self.a_drazin,
            Sym::AProj => &self.a_proj,
            Sym::Z => &self.z,
        };
        slot.as_ref().ok_or(Error::KindMismatch {
            expected: "condition symbol not available for this instance kind",
        })
    }
}

fn condition_residual(cond: &Condition, table: &SymTable, tol: Tolerance) -> Result<f64> {
    match cond {
        Condition::ProductVanishes(syms) => {
            let first = table.resolve(syms[0])?;
            let mut prod = first.clone();
            let mut norm_scale = first.norm();
            for sym in &syms[1..] {
                let m = table.resolve(*sym)?;
                prod = &prod * m;
                norm_scale *= m.norm();
            }
            Ok(prod.norm() / (1.0 + norm_scale))
        }
        Condition::SchurVanishes => {
            let z = table.resolve(Sym::Z)?;
            let scale = table.resolve(Sym::D)?.norm()
                + table.resolve(Sym::C)?.norm()
                    * table.resolve(Sym::ADrazin)?.norm()
                    * table.resolve(Sym::B)?.norm();
            Ok(z.norm() / (1.0 + scale))
        }
        Condition::DrazinVanishes(sym) => {
            let m = table.resolve(*sym)?;
            Ok(drazin(m, tol)?.d.norm())
        }
    }
}

/// Evaluates every condition of `set` on `instance` and reports residuals.
pub fn check(
    instance: InstanceRef<'_>,
    set: ConditionSet,
    tol: Tolerance,
) -> Result<HypothesisReport> {
    let table = match (instance, set.targets_pseudo()) {
        (InstanceRef::Pseudo(inst), true) => SymTable::for_pseudo(inst),
        (InstanceRef::Block(inst), false) => SymTable::for_block(inst, tol)?,
        (InstanceRef::Pseudo(_), false) => {
            return Err(Error::KindMismatch {
                expected: "a 2x2 block instance for this condition set",
            })
        }
        (InstanceRef::Block(_), true) => {
            return Err(Error::KindMismatch {
                expected: "a pseudo-block instance for this condition set",
            })
        }
    };
    let mut residuals = Vec::new();
    for cond in set.conditions() {
        residuals.push((cond.label(), condition_residual(&cond, &table, tol)?));
    }
    Ok(HypothesisReport {
        set,
        residuals,
        eq_rtol: tol.eq_rtol(),
    })
}

/// [`check`] specialized to pseudo-block instances.
pub fn check_pseudo(
    inst: &PseudoBlockInstance,
    set: ConditionSet,
    tol: Tolerance,
) -> Result<HypothesisReport> {
    check(InstanceRef::Pseudo(inst), set, tol)
}

/// [`check`] specialized to 2x2 block instances.
pub fn check_block(
    inst: &BlockInstance,
    set: ConditionSet,
    tol: Tolerance,
) -> Result<HypothesisReport> {
    check(InstanceRef::Block(inst), set, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::PseudoBlockFamily;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn zero_pseudo(n: usize) -> PseudoBlockInstance {
        let z = CMatrix::zeros(n, n);
        PseudoBlockInstance::new(z.clone(), z.clone(), z.clone(), z, PseudoBlockFamily::SpSr)
            .unwrap()
    }

    #[test]
    fn zero_instance_passes_every_pseudo_set() {
        let inst = zero_pseudo(2);
        for set in ConditionSet::ALL {
            if set.targets_pseudo() {
                let report = check_pseudo(&inst, set, tol()).unwrap();
                assert!(report.passed(), "set {:?}", set);
                assert_eq!(report.max_residual(), 0.0);
            }
        }
    }

    #[test]
    fn identity_pq_fails_pseudo_block() {
        let i = CMatrix::identity(2);
        let z = CMatrix::zeros(2, 2);
        let inst =
            PseudoBlockInstance::new(i.clone(), i, z.clone(), z, PseudoBlockFamily::Basic).unwrap();
        let report = check_pseudo(&inst, ConditionSet::PseudoBlock, tol()).unwrap();
        assert!(!report.passed());
        let (label, res) = &report.residuals[0];
        assert_eq!(label, "P Q = 0");
        // |PQ| / (1 + |P||Q|) = sqrt(2) / 3 for 2x2 identities.
        assert!((res - 2.0f64.sqrt() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let inst = zero_pseudo(2);
        assert!(matches!(
            check_pseudo(&inst, ConditionSet::Miao, tol()),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn set_names_round_trip() {
        for set in ConditionSet::ALL {
            assert_eq!(ConditionSet::parse(set.name()), Some(set));
        }
        assert_eq!(ConditionSet::parse("NoSuchSet"), None);
    }
}
