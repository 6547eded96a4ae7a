//! Worked examples with known ground truth.
//!
//! Every entry satisfies `Phi = Q Phi^*` to `1e-12`, checked when the entry
//! is built. The lacunary entries truncate
//! `f = sum_{j=0}^{6} 2^{-j} z^{2^j}` (degree 64) and carry the
//! not-bounded-type stand-in flag.

use serde::Serialize;

use crate::classify::{functional_equation_residual, InjectivityTarget};
use crate::linalg::identity;
use crate::potapov::{BlaschkeFactor, PotapovProduct};
use crate::{BoundedTypeFlag, CMatrix, CVector, Error, LaurentSymbol, Result, C64};

/// Identifiers accepted by [`entry`], in report order.
pub const IDS: [&str; 5] = ["case2", "case3", "remark3.4", "remark3.5", "scalar-czbar"];

/// Default `c` for `scalar-czbar`.
pub const DEFAULT_C: C64 = C64::new(0.5, 0.0);

/// Ground-truth flags. `None` means the truth is not known in closed form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Annotations {
    pub subnormal_by_construction: Option<bool>,
    pub normal: Option<bool>,
    pub analytic: Option<bool>,
    pub hyponormal: Option<bool>,
}

/// Facts an analysis of the entry must reproduce exactly.
#[derive(Clone, Debug, Default)]
pub struct Expectations {
    /// Minimal-degree kernel witnesses, flattened block-major.
    pub witnesses: Vec<(InjectivityTarget, Vec<C64>)>,
    /// A vector `e` with `[T^*, T] e = e`.
    pub fixed_point: Option<CVector>,
    pub commutator_rank: Option<usize>,
    /// Outcome of the left coprimality test of `B` against `z^{d-}`.
    pub coprime: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub phi: LaurentSymbol,
    /// `None` when no finite Blaschke-Potapov `Q` exists.
    pub q: Option<PotapovProduct>,
    pub annotations: Annotations,
    pub expected: Expectations,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn z_plus_zbar() -> LaurentSymbol {
    LaurentSymbol::scalar([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))])
}

fn shift() -> LaurentSymbol {
    LaurentSymbol::scalar([(1, c(1.0, 0.0))])
}

/// `f + conj(f)` for the lacunary polynomial `f`.
pub fn lacunary_real_part() -> LaurentSymbol {
    let f = LaurentSymbol::scalar((0..=6).map(|j| (1i64 << j, c(0.5f64.powi(j), 0.0))));
    f.add(&f.adjoint()).expect("scalar").with_flag(BoundedTypeFlag::NotBoundedStandIn)
}

/// `diag(1, z^m)` as a Potapov product.
fn diag_one_zpow(m: usize) -> PotapovProduct {
    let mut p = CMatrix::zeros(2, 2);
    p[(1, 1)] = c(1.0, 0.0);
    let factors = (0..m).map(|_| BlaschkeFactor::new(c(0.0, 0.0), p.clone()).expect("projection")).collect();
    PotapovProduct::new(identity(2), factors).expect("unitary")
}

fn e(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = c(1.0, 0.0);
    v
}

fn subnormal_not_normal() -> Annotations {
    Annotations {
        subnormal_by_construction: Some(true),
        normal: Some(false),
        analytic: Some(false),
        hyponormal: Some(true),
    }
}

fn case2() -> CatalogEntry {
    CatalogEntry {
        id: "case2".into(),
        description: "diag(z + conj z, z) with Q = diag(1, z^2): self-adjoint plus shift; B and z not left coprime"
            .into(),
        phi: LaurentSymbol::diagonal(&[z_plus_zbar(), shift()]).expect("diagonal"),
        q: Some(diag_one_zpow(2)),
        annotations: subnormal_not_normal(),
        expected: Expectations {
            witnesses: vec![(InjectivityTarget::ToeplitzAdjoint, vec![c(0.0, 0.0), c(1.0, 0.0)])],
            fixed_point: Some(e(2, 1)),
            commutator_rank: Some(1),
            coprime: Some(false),
        },
    }
}

fn lacunary_shift(id: &str, description: &str) -> CatalogEntry {
    let phi = LaurentSymbol::diagonal(&[lacunary_real_part(), shift()]).expect("diagonal");
    CatalogEntry {
        id: id.into(),
        description: description.into(),
        phi,
        q: Some(diag_one_zpow(2)),
        annotations: subnormal_not_normal(),
        expected: Expectations {
            witnesses: vec![
                (InjectivityTarget::ToeplitzAdjoint, vec![c(0.0, 0.0), c(1.0, 0.0)]),
                (InjectivityTarget::HankelBar, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            ],
            fixed_point: Some(e(2, 1)),
            commutator_rank: Some(1),
            coprime: None,
        },
    }
}

fn remark35() -> CatalogEntry {
    let phi = LaurentSymbol::diagonal(&[lacunary_real_part(), LaurentSymbol::zero(1)]).expect("diagonal");
    CatalogEntry {
        id: "remark3.5".into(),
        description: "diag(f + conj f, 0) with Q = diag(1, z): self-adjoint, T_{Phi^*} and H_{conj Phi} not injective"
            .into(),
        phi,
        q: Some(diag_one_zpow(1)),
        annotations: Annotations {
            subnormal_by_construction: Some(true),
            normal: Some(true),
            analytic: Some(false),
            hyponormal: Some(true),
        },
        expected: Expectations {
            witnesses: vec![
                (InjectivityTarget::ToeplitzAdjoint, vec![c(0.0, 0.0), c(1.0, 0.0)]),
                (InjectivityTarget::HankelBar, vec![c(0.0, 0.0), c(1.0, 0.0)]),
            ],
            fixed_point: None,
            commutator_rank: Some(0),
            coprime: None,
        },
    }
}

/// Inner `q` with `z + c conj z = q (conj z + conj c z)` on the circle.
///
/// For `|c| < 1`, `q = (z^2 + c) / (1 + conj(c) z^2) = b_a b_{-a}` with
/// `a^2 = -c`; for `|c| = 1`, `q = c`. For `|c| > 1` no inner `q` exists.
pub fn scalar_czbar_inner(cc: C64) -> Option<PotapovProduct> {
    let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
    let modulus = cc.norm();
    if (modulus - 1.0).abs() < 1e-14 {
        let unit = cc / modulus;
        return Some(PotapovProduct::constant(CMatrix::from_element(1, 1, unit)).expect("unimodular"));
    }
    if modulus > 1.0 {
        return None;
    }
    let a = (-cc).sqrt();
    let factors = vec![
        BlaschkeFactor::new(a, one.clone()).expect("inside disc"),
        BlaschkeFactor::new(-a, one.clone()).expect("inside disc"),
    ];
    Some(PotapovProduct::new(one, factors).expect("unitary"))
}

fn scalar_czbar(cc: C64) -> CatalogEntry {
    let phi = LaurentSymbol::scalar([(1, c(1.0, 0.0)), (-1, cc)]);
    let modulus = cc.norm();
    let on_circle = (modulus - 1.0).abs() < 1e-14;
    CatalogEntry {
        id: "scalar-czbar".into(),
        description: format!("z + c conj z with c = {}{:+}i; [T^*, T] = (1 - |c|^2) e0 e0^*", cc.re, cc.im),
        phi,
        q: scalar_czbar_inner(cc),
        annotations: Annotations {
            subnormal_by_construction: if cc.norm() == 0.0 || on_circle { Some(true) } else { None },
            normal: Some(on_circle),
            analytic: Some(cc.norm() == 0.0),
            hyponormal: Some(modulus <= 1.0 + 1e-14),
        },
        expected: Expectations {
            commutator_rank: Some(if on_circle { 0 } else { 1 }),
            ..Expectations::default()
        },
    }
}

/// Builds the entry `id`, checking `Phi = Q Phi^*` to `1e-12`. `cc` is only
/// used by `scalar-czbar`.
pub fn entry(id: &str, cc: C64, grid: usize) -> Result<CatalogEntry> {
    let e = match id {
        "case2" => case2(),
        "case3" => lacunary_shift(
            "case3",
            "diag(f + conj f, z) with f lacunary, Q = diag(1, z^2): conj f stands in for a symbol not of bounded type",
        ),
        "remark3.4" => lacunary_shift(
            "remark3.4",
            "diag(f + conj f, z), Q = diag(1, z^2): H_{conj Phi} not injective, (0, 1) fixed by [T^*, T]",
        ),
        "remark3.5" => remark35(),
        "scalar-czbar" => scalar_czbar(cc),
        other => return Err(Error::UnknownId(other.to_string())),
    };
    if let Some(q) = &e.q {
        let r = functional_equation_residual(&e.phi, q, grid)?;
        if r >= 1e-12 {
            return Err(Error::Precondition(format!("catalog entry {id}: Phi = Q Phi^* residual {r:e}")));
        }
    }
    Ok(e)
}

/// Every entry, in [`IDS`] order.
pub fn all(cc: C64, grid: usize) -> Result<Vec<CatalogEntry>> {
    IDS.iter().map(|id| entry(id, cc, grid)).collect()
}
