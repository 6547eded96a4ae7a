//! Kernel vectors of `T_{Phi^*}` and `H_{conj(Phi)}` among polynomials.

use serde::Serialize;

use crate::linalg::{null_space, reduced_row_echelon};
use crate::operator::{hankel_matrix, toeplitz_matrix};
use crate::{CMatrix, CVector, LaurentSymbol, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectivityTarget {
    /// `T_{Phi^*}`.
    ToeplitzAdjoint,
    /// `H_{conj(Phi)}`, entrywise conjugate symbol.
    HankelBar,
}

/// A polynomial `x` of minimal degree with `A x = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelWitness {
    pub target: InjectivityTarget,
    pub degree: usize,
    /// Coefficient of `z^k` at index `k`.
    #[serde(serialize_with = "crate::io::serialize_vectors")]
    pub coefficients: Vec<CVector>,
    /// True when the finite window is exact for vectors of this degree, so
    /// `x` lies in the kernel of the infinite operator.
    pub certified: bool,
    /// `||A x||` on the window.
    pub residual: f64,
}

impl KernelWitness {
    /// Flattened coefficient vector (block `k` holds the `z^k` coefficient).
    pub fn flat(&self) -> CVector {
        let n = self.coefficients.first().map(|v| v.len()).unwrap_or(0);
        let mut out = CVector::zeros(n * self.coefficients.len());
        for (k, v) in self.coefficients.iter().enumerate() {
            out.rows_mut(k * n, n).copy_from(v);
        }
        out
    }
}

/// Window of the operator acting on polynomials of degree `<= degree`,
/// with every row where the image can be nonzero. For Laurent symbols both
/// windows are exact: `H_{conj Phi}` lives in the first `d+` rows and
/// `T_{Phi^*}` maps degree `D` to degree `D + d-`.
fn window(target: InjectivityTarget, phi: &LaurentSymbol, degree: usize) -> CMatrix {
    let cols = degree + 1;
    match target {
        InjectivityTarget::HankelBar => {
            let bar = phi.bar();
            hankel_matrix(&bar, bar.neg_degree().max(1), cols)
        }
        InjectivityTarget::ToeplitzAdjoint => toeplitz_matrix(&phi.adjoint(), cols + phi.neg_degree(), cols),
    }
}

/// Searches for a kernel vector of minimal degree up to `degree_bound`.
///
/// `None` means nothing was found up to the bound; it is not a proof of
/// injectivity. Among kernel vectors of minimal degree the first row of the
/// reduced row echelon form of the kernel basis is returned, with entries
/// below `1e-13` snapped to zero, so the witness is canonical.
pub fn injectivity_witness(
    target: InjectivityTarget,
    phi: &LaurentSymbol,
    degree_bound: usize,
) -> Result<Option<KernelWitness>> {
    let n = phi.n();
    let threshold = 1e-10 * phi.norm_bound().max(1.0);
    for degree in 0..=degree_bound {
        let a = window(target, phi, degree);
        let kernel = null_space(&a, threshold);
        if kernel.ncols() == 0 {
            continue;
        }
        let rows = reduced_row_echelon(&kernel.transpose(), 1e-13);
        if rows.nrows() == 0 {
            continue;
        }
        let x: CVector = rows.row(0).transpose();
        let norm = x.norm();
        let x = x / C64::new(norm, 0.0);
        let x = x.map(|z| C64::new(snap(z.re), snap(z.im)));
        let residual = (&a * &x).norm();
        let coefficients = (0..=degree).map(|k| x.rows(k * n, n).into_owned()).collect();
        return Ok(Some(KernelWitness { target, degree, coefficients, certified: true, residual }));
    }
    Ok(None)
}

fn snap(v: f64) -> f64 {
    if v.abs() < 1e-13 {
        0.0
    } else {
        v
    }
}
