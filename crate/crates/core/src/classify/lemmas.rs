//! Finite-window verifiers for the commutator factorization, the range
//! identification and the finite-rank bound.

use serde::Serialize;

use super::{check_ephi, AnalyticMultiplier, EPhiCertificate};
use crate::linalg::{identity, largest_principal_angle, max_abs, range_basis, zeros};
use crate::operator::{
    commutator_rank_threshold, hankel_commutator_part, hankel_matrix, self_commutator, self_commutator_window,
    toeplitz_matrix,
};
use crate::potapov::model_space;
use crate::{CMatrix, CVector, Error, LaurentSymbol, PotapovProduct, Result};

fn require_member(cert: &EPhiCertificate) -> Result<()> {
    if cert.member {
        Ok(())
    } else {
        Err(Error::NotInEPhi(format!(
            "sup norm {:e}, analytic residual {:e}",
            cert.sup_norm, cert.analytic_residual
        )))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorFactorizationReport {
    pub certificate: EPhiCertificate,
    pub blocks: usize,
    pub max_deviation: f64,
    pub relative_frobenius: f64,
}

/// Compares `[T_Phi^*, T_Phi]` with `H_{Phi^*}^* (I - T_{K~} T_{K~}^*) H_{Phi^*}`,
/// `K~(z) = K^*(conj z)`, for `K` in `E(Phi)`.
///
/// `H_{Phi^*}` is supported on the first `d+` blocks and `T_{K~}` is lower
/// triangular, so the right side only needs `K^(0..d+)` and both sides are
/// exact on `max(d-, d+)` blocks, outside of which both vanish.
pub fn verify_commutator_factorization(
    phi: &LaurentSymbol,
    k: &AnalyticMultiplier,
    grid: usize,
) -> Result<CommutatorFactorizationReport> {
    let certificate = check_ephi(phi, k, grid)?;
    require_member(&certificate)?;
    let s = phi.bandwidth().max(1);
    let lhs = self_commutator_window(phi, s);
    let k_tilde = k.leading_coefficients(s).tilde();
    let t = toeplitz_matrix(&k_tilde, s, s);
    let middle = identity(phi.n() * s) - &t * t.adjoint();
    let h = hankel_matrix(&phi.adjoint(), s, s);
    let rhs = h.adjoint() * middle * &h;
    let diff = &lhs - &rhs;
    // Below round-off of the symbol scale both sides count as zero.
    let floor = 1e-12 * phi.norm_bound().powi(2);
    let denom = lhs.norm().max(rhs.norm()).max(floor);
    let relative_frobenius = if denom > 0.0 { diff.norm() / denom } else { 0.0 };
    Ok(CommutatorFactorizationReport {
        certificate,
        blocks: s,
        max_deviation: max_abs(&diff),
        relative_frobenius,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeIdentificationReport {
    pub certificate: EPhiCertificate,
    pub commutator_range_dim: usize,
    pub image_dim: usize,
    pub largest_angle: f64,
    /// Certified bound on the truncation error of the model-space basis.
    pub tail_bound: f64,
    pub pass: bool,
}

/// Compares `Ran [T_Phi^*, T_Phi]` with `T_{Phi Theta^*} H(Theta)` for a
/// normal symbol and an inner `Theta` in `E(Phi)`.
///
/// The commutator range comes from its support block. The image is
/// computed independently: `Theta^* x` from the Fourier expansion of
/// `Theta`, then the analytic part of `Phi Theta^* x` on the support window.
/// Ranks of the image use a threshold above the truncation noise.
pub fn verify_range_identification(
    phi: &LaurentSymbol,
    theta: &PotapovProduct,
    grid: usize,
    tol_angle: f64,
) -> Result<RangeIdentificationReport> {
    if !phi.is_normal(1e-10 * phi.norm_bound().powi(2).max(1.0)).0 {
        return Err(Error::Precondition("range identification needs a normal symbol".into()));
    }
    let certificate = check_ephi(phi, &AnalyticMultiplier::Potapov(theta.clone()), grid)?;
    require_member(&certificate)?;
    let n = phi.n();
    let s = phi.bandwidth();
    let comm = hankel_commutator_part(phi, s);
    let range = range_basis(&comm, commutator_rank_threshold(phi));

    let basis = model_space(theta, s.max(1))?;
    let nb = basis.blocks;
    let dn = phi.neg_degree() as i64;
    let dp = phi.pos_degree() as i64;
    let expansion = theta.fourier(nb + dp as usize);
    let theta_adj: Vec<CMatrix> = (0..expansion.blocks).map(|k| expansion.symbol.coeff(k as i64).adjoint()).collect();
    // Output rows 0..s need (Theta^* x)_j for j in [-d+, s - 1 + d-].
    let (lo, hi) = (-dp, s as i64 - 1 + dn);
    let mut image = zeros(n * s, basis.dim());
    for (col, x) in basis.vectors.iter().enumerate() {
        let w: Vec<CVector> = (lo..=hi)
            .map(|j| {
                let mut acc = CVector::zeros(n);
                for (k, a) in theta_adj.iter().enumerate() {
                    let idx = j + k as i64;
                    if idx >= 0 && (idx as usize) < nb {
                        acc += a * x.rows(idx as usize * n, n);
                    }
                }
                acc
            })
            .collect();
        for i in 0..s as i64 {
            let mut out = CVector::zeros(n);
            for (k, a) in phi.terms() {
                let j = i - k;
                if (lo..=hi).contains(&j) {
                    out += a * &w[(j - lo) as usize];
                }
            }
            image.view_mut((i as usize * n, col), (n, 1)).copy_from(&out);
        }
    }
    let scale = phi.norm_bound();
    let noise = 10.0 * basis.tail_bound * scale * (basis.dim().max(1) as f64).sqrt();
    let image_range = range_basis(&image, (1e-10 * scale).max(noise));
    let largest_angle = largest_principal_angle(&range, &image_range);
    let (commutator_range_dim, image_dim) = (range.ncols(), image_range.ncols());
    Ok(RangeIdentificationReport {
        certificate,
        commutator_range_dim,
        image_dim,
        largest_angle,
        tail_bound: basis.tail_bound,
        pass: commutator_range_dim == image_dim && largest_angle < tol_angle,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteRankReport {
    pub certificate: EPhiCertificate,
    pub commutator_rank: usize,
    pub model_space_dim: usize,
    pub holds: bool,
}

/// `rank [T_Phi^*, T_Phi] <= dim H(Q)` for `Q` in `E(Phi)`.
pub fn verify_finite_rank_bound(
    phi: &LaurentSymbol,
    q: &PotapovProduct,
    grid: usize,
    tol_coeff: f64,
) -> Result<FiniteRankReport> {
    let certificate = check_ephi(phi, &AnalyticMultiplier::Potapov(q.clone()), grid)?;
    require_member(&certificate)?;
    let commutator_rank = self_commutator(phi, tol_coeff).rank;
    let model_space_dim = q.model_dimension();
    Ok(FiniteRankReport {
        certificate,
        commutator_rank,
        model_space_dim,
        holds: commutator_rank <= model_space_dim,
    })
}
