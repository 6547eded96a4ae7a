//! Decisions and witnesses for operator properties of `T_Phi`.

mod dichotomy;
mod lemmas;
mod witness;

pub use dichotomy::{
    classify, functional_equation_residual, CaseStructure, ClassificationReport, ClassifyOptions, Consistency, DichotomyReport, Outcome,
    Verdict,
};
pub use lemmas::{
    verify_commutator_factorization, verify_finite_rank_bound, verify_range_identification,
    CommutatorFactorizationReport, FiniteRankReport, RangeIdentificationReport,
};
pub use witness::{injectivity_witness, InjectivityTarget, KernelWitness};

use serde::Serialize;

use crate::linalg::{hermitian_eigenvalues, max_abs, null_space, op_norm, rank_above, svd_sorted, zeros};
use crate::operator::{
    commutator_rank_threshold, power_columns, self_commutator, self_commutator_window, toeplitz_matrix,
    CommutatorSupport,
};
use crate::symbol::circle_grid;
use crate::{CMatrix, Error, LaurentSymbol, PotapovProduct, Result, C64};

/// True iff `Phi` has no negative Fourier coefficients.
pub fn is_analytic(phi: &LaurentSymbol) -> bool {
    phi.is_analytic()
}

#[derive(Clone, Debug, Serialize)]
pub struct HyponormalityReport {
    pub hyponormal: bool,
    pub min_eigenvalue: f64,
    pub normal_symbol: bool,
    /// Eigenvalues at or above `-threshold` count as nonnegative.
    pub threshold: f64,
}

/// Hyponormality of `T_Phi`. A hyponormal Toeplitz operator has a normal
/// symbol, and for a normal Laurent symbol the commutator is the finite
/// Hankel block, so the test is exact up to the tolerance
/// `tol_psd * (sum_k ||Phi^(k)||)^2`.
pub fn is_hyponormal(phi: &LaurentSymbol, tol_coeff: f64, tol_psd: f64) -> HyponormalityReport {
    let comm = self_commutator(phi, tol_coeff);
    let normal_symbol = matches!(comm.support, CommutatorSupport::Finite(_));
    let threshold = tol_psd * phi.norm_bound().powi(2);
    // Outside its support block the commutator vanishes, contributing 0.
    let min_eigenvalue = if normal_symbol { comm.min_eigenvalue().min(0.0) } else { comm.min_eigenvalue() };
    HyponormalityReport {
        hyponormal: normal_symbol && min_eigenvalue >= -threshold,
        min_eigenvalue,
        normal_symbol,
        threshold,
    }
}

/// Analytic contraction tested for membership in `E(Phi)`.
#[derive(Clone, Debug)]
pub enum AnalyticMultiplier {
    Symbol(LaurentSymbol),
    Potapov(PotapovProduct),
}

impl AnalyticMultiplier {
    pub fn n(&self) -> usize {
        match self {
            AnalyticMultiplier::Symbol(k) => k.n(),
            AnalyticMultiplier::Potapov(q) => q.n(),
        }
    }

    /// Taylor coefficients `0..count`, exact for symbols and for the
    /// retained coefficients of a product.
    pub fn leading_coefficients(&self, count: usize) -> LaurentSymbol {
        match self {
            AnalyticMultiplier::Symbol(k) => k.restrict(0..=count as i64 - 1),
            AnalyticMultiplier::Potapov(q) => q.fourier(count).symbol,
        }
    }

    fn evaluate(&self, z: C64) -> CMatrix {
        match self {
            AnalyticMultiplier::Symbol(k) => k.evaluate_unchecked(z),
            AnalyticMultiplier::Potapov(q) => q.evaluate(z).expect("point on the circle"),
        }
    }
}

/// Membership certificate for `K` in `E(Phi)`.
#[derive(Clone, Debug, Serialize)]
pub struct EPhiCertificate {
    /// Largest singular value of `K` over the grid.
    pub sup_norm: f64,
    /// Largest norm of a negative coefficient of `Phi - K Phi^*`.
    pub analytic_residual: f64,
    pub member: bool,
}

/// `||K||_inf <= 1` on `grid` roots of unity and `Phi - K Phi^*` analytic.
///
/// Negative coefficients of `K Phi^*` only involve `K^(0..d+)`, so the
/// residual is exact even when `K` is an infinite product.
pub fn check_ephi(phi: &LaurentSymbol, k: &AnalyticMultiplier, grid: usize) -> Result<EPhiCertificate> {
    if k.n() != phi.n() {
        return Err(Error::DimensionMismatch { expected: phi.n(), found: k.n() });
    }
    if let AnalyticMultiplier::Symbol(s) = k {
        if let Some((index, _)) = s.terms().next().filter(|(i, _)| *i < 0) {
            return Err(Error::NotAnalytic { index });
        }
    }
    let head = k.leading_coefficients(phi.pos_degree().max(1));
    let diff = phi.sub(&head.mul(&phi.adjoint())?)?;
    let analytic_residual = diff
        .terms()
        .filter(|(i, _)| *i < 0)
        .map(|(_, a)| op_norm(a))
        .fold(0.0, f64::max);
    let sup_norm = circle_grid(grid)
        .into_iter()
        .map(|z| op_norm(&k.evaluate(z)))
        .fold(0.0, f64::max);
    let member = sup_norm <= 1.0 + 1e-10 && analytic_residual <= 1e-10 * phi.norm_bound().max(1.0);
    Ok(EPhiCertificate { sup_norm, analytic_residual, member })
}

/// How normality of `T_Phi` was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalityMethod {
    /// `Phi_+ - Phi_+(0) = Phi_- U` solved for a constant unitary `U`.
    UnitaryCriterion,
    /// `[T_Phi^*, T_Phi] = 0` decided from the commutator.
    Commutator,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalOperatorReport {
    pub normal: bool,
    pub method: NormalityMethod,
    #[serde(serialize_with = "crate::io::serialize_opt_matrix")]
    pub unitary: Option<CMatrix>,
    /// `||A U - B||_F` over the stacked coefficient equations.
    pub residual: f64,
    pub unitarity_defect: f64,
    pub commutator_rank: usize,
    pub diagnostic: Option<String>,
}

const NORMAL_TOL: f64 = 1e-8;

/// Normality of `T_Phi`. For a normal symbol with `det Phi_+` not
/// identically zero, `T_Phi` is normal iff `Phi_+ - Phi_+(0) = Phi_- U` for a
/// constant unitary `U`; the coefficient equations `Phi_+^(k) = Phi_-^(k) U`
/// are solved in the least squares sense. Otherwise the commutator decides.
/// Both routes are run and a disagreement is reported as a diagnostic.
pub fn is_normal_operator(phi: &LaurentSymbol, tol_coeff: f64) -> NormalOperatorReport {
    let comm = self_commutator(phi, tol_coeff);
    let commutator_zero = comm.rank == 0 && matches!(comm.support, CommutatorSupport::Finite(_));
    let fallback = |diagnostic: &str| NormalOperatorReport {
        normal: commutator_zero,
        method: NormalityMethod::Commutator,
        unitary: None,
        residual: f64::NAN,
        unitarity_defect: f64::NAN,
        commutator_rank: comm.rank,
        diagnostic: Some(diagnostic.to_string()),
    };
    if !matches!(comm.support, CommutatorSupport::Finite(_)) {
        return fallback("symbol is not normal, so the operator is not normal");
    }
    let split = phi.split();
    let d = phi.bandwidth();
    let n = phi.n();
    let plus_scale = split.plus.norm_bound();
    let det_max = circle_grid(64)
        .into_iter()
        .map(|z| split.plus.evaluate_unchecked(z).determinant().norm())
        .fold(0.0, f64::max);
    if d == 0 || det_max <= 1e-12 * (1.0 + plus_scale).powi(n as i32) {
        return fallback("criterion inapplicable, used commutator test");
    }

    let mut a = zeros(n * d, n);
    let mut b = zeros(n * d, n);
    for k in 1..=d {
        a.view_mut(((k - 1) * n, 0), (n, n)).copy_from(&split.minus.coeff(k as i64));
        b.view_mut(((k - 1) * n, 0), (n, n)).copy_from(&split.plus.coeff(k as i64));
    }
    let (w, sigma, v) = svd_sorted(&a);
    let scale = sigma.first().copied().unwrap_or(0.0).max(op_norm(&b));
    let r = rank_above(&a, 1e-10 * scale);
    // X = Sigma_r^-1 W_r^* B is V_r^* U; its rows must be orthonormal.
    let mut x = w.columns(0, r).adjoint() * &b;
    for i in 0..r {
        let s = C64::new(sigma[i], 0.0);
        x.row_mut(i).iter_mut().for_each(|z| *z /= s);
    }
    let unitarity_defect = if r == 0 { 0.0 } else { max_abs(&(&x * x.adjoint() - CMatrix::identity(r, r))) };
    // Complete with an orthonormal basis of the complement of the rows of X.
    let complement = null_space(&x, 0.5).adjoint();
    let mut stacked = zeros(n, n);
    stacked.view_mut((0, 0), (r, n)).copy_from(&x);
    let fill = complement.nrows().min(n - r);
    stacked.view_mut((r, 0), (fill, n)).copy_from(&complement.rows(0, fill));
    let u = &v * stacked;
    let residual = (&a * &u - &b).norm();
    let normal = residual <= NORMAL_TOL * b.norm().max(1.0) && unitarity_defect <= NORMAL_TOL;
    let diagnostic = (normal != commutator_zero).then(|| {
        format!(
            "unitary criterion says {normal} but commutator rank is {}",
            comm.rank
        )
    });
    NormalOperatorReport {
        normal,
        method: NormalityMethod::UnitaryCriterion,
        unitary: Some(u),
        residual,
        unitarity_defect,
        commutator_rank: comm.rank,
        diagnostic,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KVerdict {
    pub k: usize,
    pub passes: bool,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KHyponormalityReport {
    pub k_max: usize,
    pub blocks: usize,
    pub verdicts: Vec<KVerdict>,
    pub subnormal_evidence: bool,
    /// Deviation of the `(1, 1)` block from the independently computed
    /// self-commutator.
    pub stability_deviation: f64,
}

impl KHyponormalityReport {
    /// Largest `k` that passes (0 if none).
    pub fn passes_up_to(&self) -> usize {
        self.verdicts.iter().take_while(|v| v.passes).count()
    }
}

/// Bram-Halmos test: `T` is `k`-hyponormal iff the block matrix with
/// entries `[T^{*j}, T^i]` (`1 <= i, j <= k`) is positive semidefinite.
///
/// The compression to the first `blocks` blocks is computed exactly from
/// the columns of `T^i` and `T^{*i}`, which have finite support. The symbol
/// is scaled to `sum_k ||Phi^(k)|| = 1` first, so `tol_psd` is absolute.
/// Verdicts are monotone: failing at `k` fails every larger `k`.
pub fn k_hyponormality(phi: &LaurentSymbol, k_max: usize, blocks: usize, tol_psd: f64) -> Result<KHyponormalityReport> {
    let norm = phi.norm_bound();
    let psi = if norm > 0.0 { phi.scale(C64::new(1.0 / norm, 0.0)) } else { phi.clone() };
    let n = psi.n();
    let size = n * blocks;
    let c = power_columns(&psi, k_max, blocks);
    let d = power_columns(&psi.adjoint(), k_max, blocks);
    // [T^{*j}, T^i] restricted to the window = C_j^* C_i - D_i^* D_j.
    let entry = |i: usize, j: usize| -> CMatrix {
        let rc = c[i].nrows().min(c[j].nrows());
        let rd = d[i].nrows().min(d[j].nrows());
        c[j].rows(0, rc).adjoint() * c[i].rows(0, rc) - d[i].rows(0, rd).adjoint() * d[j].rows(0, rd)
    };

    let first = entry(0, 0);
    let reference = if psi.is_normal(1e-12).0 {
        self_commutator(&psi, 1e-12).embedded(blocks)
    } else {
        self_commutator_window(&psi, blocks)
    };
    let stability_deviation = max_abs(&(&first - reference));
    if stability_deviation > 1e-9 {
        return Err(Error::WindowUnstable(format!(
            "commutator block deviates by {stability_deviation:e} from the certified window"
        )));
    }

    let mut m = zeros(size * k_max, size * k_max);
    let mut verdicts = Vec::with_capacity(k_max);
    let mut still = true;
    for k in 1..=k_max {
        let i = k - 1;
        for j in 0..k {
            let block = if i == 0 && j == 0 { first.clone() } else { entry(i, j) };
            m.view_mut((i * size, j * size), (size, size)).copy_from(&block);
            if i != j {
                m.view_mut((j * size, i * size), (size, size)).copy_from(&block.adjoint());
            }
        }
        let sub = m.view((0, 0), (k * size, k * size)).into_owned();
        let min_eigenvalue = hermitian_eigenvalues(&sub).first().copied().unwrap_or(0.0);
        still = still && min_eigenvalue >= -tol_psd;
        verdicts.push(KVerdict { k, passes: still, min_eigenvalue });
    }
    Ok(KHyponormalityReport {
        k_max,
        blocks,
        subnormal_evidence: verdicts.iter().all(|v| v.passes),
        verdicts,
        stability_deviation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelInvarianceReport {
    pub invariant: bool,
    pub kernel_dim_in_support: usize,
    pub max_residual: f64,
}

/// Whether `ker [T_Phi^*, T_Phi]` is invariant under `T_Phi`, for a normal
/// symbol. The commutator `C` vanishes outside its `s x s` support block, so
/// its kernel is `ker C_s` plus every vector supported on blocks `>= s`.
/// Only the tail vectors `e_m`, `s <= m < s + d-`, are mapped back into the
/// support by `T_Phi`; for each kernel vector `x` the residual
/// `||C (T_Phi x)||` is exact.
pub fn kernel_invariance(phi: &LaurentSymbol, tol_coeff: f64) -> Result<KernelInvarianceReport> {
    let comm = self_commutator(phi, tol_coeff);
    let s = match comm.support {
        CommutatorSupport::Finite(s) => s,
        CommutatorSupport::Unbounded { .. } => {
            return Err(Error::Precondition("kernel invariance needs a normal symbol".into()))
        }
    };
    let n = phi.n();
    if comm.rank == 0 {
        return Ok(KernelInvarianceReport { invariant: true, kernel_dim_in_support: n * s, max_residual: 0.0 });
    }
    let dm = phi.neg_degree();
    let cols = s + dm;
    let t = toeplitz_matrix(phi, s, cols);
    let kernel = null_space(&comm.matrix, commutator_rank_threshold(phi));
    let mut basis = zeros(n * cols, kernel.ncols() + n * dm);
    basis.view_mut((0, 0), (n * s, kernel.ncols())).copy_from(&kernel);
    for m in 0..n * dm {
        basis[(n * s + m, kernel.ncols() + m)] = C64::new(1.0, 0.0);
    }
    let image = &comm.matrix * (t * &basis);
    let max_residual = (0..image.ncols()).map(|j| image.column(j).norm()).fold(0.0, f64::max);
    let tol = 1e-10 * phi.norm_bound().powi(3).max(1.0);
    Ok(KernelInvarianceReport {
        invariant: max_residual < tol,
        kernel_dim_in_support: kernel.ncols(),
        max_residual,
    })
}
