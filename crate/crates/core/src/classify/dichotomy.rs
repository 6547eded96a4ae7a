//! Full classification of `T_Phi` and the normal-or-analytic dichotomy for
//! symbols with `Phi = Q Phi^*`.

use serde::Serialize;

use super::{
    injectivity_witness, is_hyponormal, is_normal_operator, k_hyponormality, kernel_invariance, InjectivityTarget,
    KHyponormalityReport, KernelInvarianceReport, KernelWitness, NormalOperatorReport,
};
use crate::linalg::{identity, op_norm};
use crate::operator::{self_commutator, CommutatorSupport};
use crate::potapov::{left_coprime_with_scalar_inner, CoprimeReport};
use crate::symbol::circle_grid;
use crate::{Error, LaurentSymbol, PotapovProduct, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Normal,
    Analytic,
    SubnormalEvidence,
    HyponormalOnly,
    NotHyponormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Normal,
    Analytic,
    Neither,
}

/// Which branch of the case analysis the symbol falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStructure {
    /// `Phi^*` of bounded type with `B` and `theta_2 I` left coprime.
    Coprime,
    /// `Phi^*` of bounded type, `B` and `theta_2 I` share a left divisor.
    NotCoprime,
    /// `Phi^*` declared not of bounded type.
    NotBoundedType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    Consistent,
    Inconsistent,
    /// The outcome depends on a hypothesis that finite data cannot certify.
    Undetermined,
    /// A hypothesis of the dichotomy fails, so nothing is predicted.
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub outcome: Outcome,
    pub structure: CaseStructure,
    pub consistency: Consistency,
    pub hypothesis_failure: Option<String>,
    pub coprimality: Option<CoprimeReport>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassifyOptions {
    pub k_max: usize,
    pub blocks: usize,
    pub tol_coeff: f64,
    pub tol_psd: f64,
    pub grid: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { k_max: 4, blocks: 64, tol_coeff: 1e-10, tol_psd: 1e-9, grid: 512 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub analytic: bool,
    pub normal_symbol: bool,
    pub symbol_normality_residual: f64,
    pub hyponormal: bool,
    pub min_eigenvalue: f64,
    pub normal_operator: NormalOperatorReport,
    pub k_hyponormality: KHyponormalityReport,
    pub commutator_rank: usize,
    pub commutator_support: CommutatorSupport,
    pub kernel_invariance: Option<KernelInvarianceReport>,
    pub model_space_dim: Option<usize>,
    pub functional_equation_residual: Option<f64>,
    pub witnesses: Vec<KernelWitness>,
    pub dichotomy: Option<DichotomyReport>,
}

/// `max ||Phi - Q Phi^*||`: coefficientwise when `Q` is polynomial, on the
/// grid otherwise.
pub fn functional_equation_residual(phi: &LaurentSymbol, q: &PotapovProduct, grid: usize) -> Result<f64> {
    if q.n() != phi.n() {
        return Err(Error::DimensionMismatch { expected: phi.n(), found: q.n() });
    }
    if let Some(ql) = q.as_laurent() {
        let diff = phi.sub(&ql.mul(&phi.adjoint())?)?;
        return Ok(diff.terms().map(|(_, a)| op_norm(a)).fold(0.0, f64::max));
    }
    let mut worst: f64 = 0.0;
    for z in circle_grid(grid) {
        let value = phi.evaluate_unchecked(z);
        let rhs = q.evaluate(z)? * value.adjoint();
        worst = worst.max(op_norm(&(value - rhs)));
    }
    Ok(worst)
}

/// `B` with `Phi_- = B^* theta_2`, `theta_2 = z^{d-}`: `B = z^{d-} P^perp(Phi)`.
fn coanalytic_numerator(phi: &LaurentSymbol) -> LaurentSymbol {
    let d = phi.neg_degree() as i64;
    phi.coanalytic_part()
        .mul(&LaurentSymbol::monomial(d, identity(phi.n())))
        .expect("same dimension")
}

fn dichotomy(
    phi: &LaurentSymbol,
    outcome: Outcome,
    hyponormal: bool,
    invariant: Option<bool>,
    witnesses: &[KernelWitness],
    subnormal_evidence: bool,
) -> Result<DichotomyReport> {
    if !phi.flag().is_bounded() {
        let found = |t: InjectivityTarget| witnesses.iter().any(|w| w.target == t);
        let failure = if found(InjectivityTarget::HankelBar) {
            Some("Φ* declared not of bounded type + H_{Φ̄} witness found".to_string())
        } else if found(InjectivityTarget::ToeplitzAdjoint) {
            Some("Φ* declared not of bounded type + T_{Φ*} witness found".to_string())
        } else {
            None
        };
        let consistency = match (&failure, outcome) {
            (Some(_), _) => Consistency::Consistent,
            (None, Outcome::Normal) => Consistency::Consistent,
            (None, _) if !subnormal_evidence => Consistency::NotApplicable,
            (None, _) => Consistency::Undetermined,
        };
        return Ok(DichotomyReport {
            outcome,
            structure: CaseStructure::NotBoundedType,
            consistency,
            hypothesis_failure: failure,
            coprimality: None,
        });
    }

    // The minimal scalar inner factor of Phi_- is z^{d-}: B(0) = Phi^(-d-) is
    // nonzero, so no power of z divides B. Every Potapov divisor of z^m I
    // starts with a factor at 0, so coprimality reduces to the zero {0}.
    let coprimality = if phi.neg_degree() == 0 {
        None
    } else {
        Some(left_coprime_with_scalar_inner(&coanalytic_numerator(phi), &[C64::new(0.0, 0.0)])?)
    };
    let coprime = coprimality.as_ref().map(|c| c.coprime).unwrap_or(true);
    let (structure, consistency, failure) = if !coprime {
        (CaseStructure::NotCoprime, Consistency::Consistent, Some("B,Θ₂ not left coprime".to_string()))
    } else if !hyponormal {
        (CaseStructure::Coprime, Consistency::NotApplicable, Some("T_Φ not hyponormal".to_string()))
    } else if invariant != Some(true) {
        (
            CaseStructure::Coprime,
            Consistency::NotApplicable,
            Some("ker[T_Φ*, T_Φ] not invariant under T_Φ".to_string()),
        )
    } else if outcome == Outcome::Neither {
        (CaseStructure::Coprime, Consistency::Inconsistent, None)
    } else {
        (CaseStructure::Coprime, Consistency::Consistent, None)
    };
    Ok(DichotomyReport { outcome, structure, consistency, hypothesis_failure: failure, coprimality })
}

/// Runs every test on `T_Phi`. With `q` given, `Phi = Q Phi^*` is checked
/// first (residual below `1e-10` relative to the symbol size) and the
/// dichotomy is evaluated.
pub fn classify(phi: &LaurentSymbol, q: Option<&PotapovProduct>, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let functional_equation_residual = match q {
        Some(q) => {
            let r = functional_equation_residual(phi, q, opts.grid)?;
            if r > 1e-10 * phi.norm_bound().max(1.0) {
                return Err(Error::Precondition(format!("Phi = Q Phi^* fails with residual {r:e}")));
            }
            Some(r)
        }
        None => None,
    };
    let analytic = phi.is_analytic();
    let (normal_symbol, symbol_normality_residual) = phi.is_normal(opts.tol_coeff * phi.norm_bound().powi(2).max(1.0));
    let hyp = is_hyponormal(phi, opts.tol_coeff, opts.tol_psd);
    let normal_operator = is_normal_operator(phi, opts.tol_coeff);
    let comm = self_commutator(phi, opts.tol_coeff);
    let k_hyp = k_hyponormality(phi, opts.k_max, opts.blocks, opts.tol_psd)?;
    let kernel = if normal_symbol { Some(kernel_invariance(phi, opts.tol_coeff)?) } else { None };
    let degree_bound = phi.bandwidth().max(1);
    let mut witnesses = Vec::new();
    for target in [InjectivityTarget::ToeplitzAdjoint, InjectivityTarget::HankelBar] {
        if let Some(w) = injectivity_witness(target, phi, degree_bound)? {
            witnesses.push(w);
        }
    }

    let normal = normal_operator.normal && hyp.hyponormal;
    let verdict = if normal {
        Verdict::Normal
    } else if !hyp.hyponormal {
        Verdict::NotHyponormal
    } else if analytic {
        Verdict::Analytic
    } else if k_hyp.subnormal_evidence {
        Verdict::SubnormalEvidence
    } else {
        Verdict::HyponormalOnly
    };
    let outcome = if normal {
        Outcome::Normal
    } else if analytic {
        Outcome::Analytic
    } else {
        Outcome::Neither
    };
    let dichotomy = match q {
        Some(_) => Some(dichotomy(
            phi,
            outcome,
            hyp.hyponormal,
            kernel.as_ref().map(|k| k.invariant),
            &witnesses,
            k_hyp.subnormal_evidence,
        )?),
        None => None,
    };
    Ok(ClassificationReport {
        verdict,
        analytic,
        normal_symbol,
        symbol_normality_residual,
        hyponormal: hyp.hyponormal,
        min_eigenvalue: hyp.min_eigenvalue,
        normal_operator,
        k_hyponormality: k_hyp,
        commutator_rank: comm.rank,
        commutator_support: comm.support,
        kernel_invariance: kernel,
        model_space_dim: q.map(|q| q.model_dimension()),
        functional_equation_residual,
        witnesses,
        dichotomy,
    })
}
