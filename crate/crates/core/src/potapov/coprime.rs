//! Coprimality of an analytic matrix function with `theta I_n` for a finite
//! Blaschke product `theta` with simple zeros.
//!
//! A factor `b_alpha P + (I - P)` divides `B` on the left iff `P B(alpha) = 0`,
//! so `B` and `theta I_n` share a nonconstant left inner divisor iff
//! `B(alpha)` is singular at some zero `alpha` of `theta`.

use serde::Serialize;

use super::BlaschkeFactor;
use crate::linalg::{op_norm, svd_sorted};
use crate::{CVector, Error, LaurentSymbol, Result, C64};

/// Outcome of a coprimality test, with a divisor witness on failure.
#[derive(Clone, Debug, Serialize)]
pub struct CoprimeReport {
    pub coprime: bool,
    /// `|det B(alpha_i)|` for each zero, in input order.
    pub determinants: Vec<f64>,
    pub witness: Option<CoprimeWitness>,
}

/// A zero `alpha` and a unit vector `u` with `u^* B(alpha) = 0`; the factor
/// `b_alpha u u^* + (I - u u^*)` is then a common left inner divisor.
#[derive(Clone, Debug, Serialize)]
pub struct CoprimeWitness {
    #[serde(serialize_with = "crate::io::serialize_complex")]
    pub alpha: C64,
    #[serde(serialize_with = "crate::io::serialize_vector")]
    pub u: CVector,
    /// `||u^* B(alpha)||`.
    pub residual: f64,
}

fn validate_zeros(zeros: &[C64]) -> Result<()> {
    for (i, a) in zeros.iter().enumerate() {
        if a.norm() >= 1.0 {
            return Err(Error::ZeroOutsideDisc { re: a.re, im: a.im });
        }
        if zeros[..i].iter().any(|b| (a - b).norm() < 1e-12) {
            return Err(Error::RepeatedZero { re: a.re, im: a.im });
        }
    }
    Ok(())
}

/// Rotates `u` so its largest-modulus entry is real and positive, and snaps
/// round-off sized entries to zero.
fn canonical_unit(mut u: CVector) -> CVector {
    let (idx, _) = u
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let phase = u[idx] / C64::new(u[idx].norm(), 0.0);
    u /= phase;
    for z in u.iter_mut() {
        if z.re.abs() < 1e-14 {
            z.re = 0.0;
        }
        if z.im.abs() < 1e-14 {
            z.im = 0.0;
        }
    }
    let norm = u.norm();
    u / C64::new(norm, 0.0)
}

/// Left coprimality of an analytic square `B` with `theta I_n`, where `theta`
/// has the given simple zeros. Singularity is declared when
/// `|det B(alpha)| <= 1e-8 (1 + ||B(alpha)||^n)`.
pub fn left_coprime_with_scalar_inner(b: &LaurentSymbol, zeros: &[C64]) -> Result<CoprimeReport> {
    if let Some((k, _)) = b.terms().next().filter(|(k, _)| *k < 0) {
        return Err(Error::NotAnalytic { index: k });
    }
    validate_zeros(zeros)?;
    let n = b.n() as i32;
    let mut determinants = Vec::with_capacity(zeros.len());
    let mut witness = None;
    for &alpha in zeros {
        let value = b.evaluate_unchecked(alpha);
        let det = value.clone().determinant().norm();
        determinants.push(det);
        let scale = 1.0 + op_norm(&value).powi(n);
        if witness.is_none() && det <= 1e-8 * scale {
            let (u, sigma, _) = svd_sorted(&value);
            let last = sigma.len() - 1;
            let u = canonical_unit(u.column(last).into_owned());
            let residual = (u.adjoint() * &value).norm();
            witness = Some(CoprimeWitness { alpha, u, residual });
        }
    }
    Ok(CoprimeReport { coprime: witness.is_none(), determinants, witness })
}

/// Right coprimality, via left coprimality of `tilde(B)` with the conjugated
/// zeros.
pub fn right_coprime_with_scalar_inner(b: &LaurentSymbol, zeros: &[C64]) -> Result<CoprimeReport> {
    let conj: Vec<C64> = zeros.iter().map(|a| a.conj()).collect();
    left_coprime_with_scalar_inner(&b.tilde(), &conj)
}

/// The common left divisor `b_alpha u u^* + (I - u u^*)` named by a witness.
pub fn common_left_divisor(w: &CoprimeWitness) -> Result<BlaschkeFactor> {
    BlaschkeFactor::new(w.alpha, &w.u * w.u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, zeros};
    use crate::{BoundedTypeFlag, CMatrix};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(a: C64, b: C64) -> CMatrix {
        let mut m = zeros(2, 2);
        m[(0, 0)] = a;
        m[(1, 1)] = b;
        m
    }

    #[test]
    fn projection_onto_first_axis_is_not_coprime_with_z() {
        let b = LaurentSymbol::constant(diag(c(1.0, 0.0), c(0.0, 0.0)));
        let r = left_coprime_with_scalar_inner(&b, &[c(0.0, 0.0)]).unwrap();
        assert!(!r.coprime);
        let w = r.witness.unwrap();
        assert_eq!(w.u, CVector::from_column_slice(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let divisor = common_left_divisor(&w).unwrap();
        assert_eq!(divisor.rank(), 1);
        assert!(!right_coprime_with_scalar_inner(&b, &[c(0.0, 0.0)]).unwrap().coprime);
    }

    #[test]
    fn identity_is_coprime_with_anything() {
        let b = LaurentSymbol::identity(3);
        let zs = [c(0.1, 0.2), c(-0.5, 0.0), c(0.0, 0.9)];
        assert!(left_coprime_with_scalar_inner(&b, &zs).unwrap().coprime);
        assert!(right_coprime_with_scalar_inner(&b, &zs).unwrap().coprime);
    }

    #[test]
    fn determinant_vanishing_at_zero_matches_sphere_search_oracle() {
        // B = diag(1, 1 - 2z) is singular at z = 1/2.
        let b = LaurentSymbol::new(
            2,
            [(0, identity(2)), (1, diag(c(0.0, 0.0), c(-2.0, 0.0)))],
            BoundedTypeFlag::BoundedType,
        )
        .unwrap();
        let alpha = c(0.5, 0.0);
        let r = left_coprime_with_scalar_inner(&b, &[alpha]).unwrap();
        assert!(!r.coprime);
        // Oracle: minimise ||u^* B(alpha)|| over a grid on the unit sphere of C^2.
        let value = b.evaluate_unchecked(alpha);
        let mut best = f64::INFINITY;
        let steps = 200;
        for i in 0..=steps {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
            for j in 0..steps {
                let phi = std::f64::consts::TAU * j as f64 / steps as f64;
                let u = CVector::from_column_slice(&[c(t.cos(), 0.0), C64::from_polar(t.sin(), phi)]);
                best = best.min((u.adjoint() * &value).norm());
            }
        }
        assert!(best < 1e-12);
        assert!(r.witness.unwrap().residual < 1e-12);
    }

    #[test]
    fn left_and_right_tests_agree_for_square_symbols() {
        let b = LaurentSymbol::new(
            2,
            [
                (0, CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, 0.0), c(0.0, -0.3), c(0.8, 0.0)])),
                (1, CMatrix::from_row_slice(2, 2, &[c(0.1, 0.0), c(0.0, 0.4), c(0.3, 0.0), c(-0.2, 0.1)])),
            ],
            BoundedTypeFlag::BoundedType,
        )
        .unwrap();
        let zs = [c(0.2, -0.1), c(-0.4, 0.3)];
        let left = left_coprime_with_scalar_inner(&b, &zs).unwrap();
        let right = right_coprime_with_scalar_inner(&b, &zs).unwrap();
        assert!(left.coprime && right.coprime);
        for (l, r) in left.determinants.iter().zip(&right.determinants) {
            assert!((l - r).abs() < 1e-14);
        }
    }

    #[test]
    fn repeated_and_invalid_zeros_rejected() {
        let b = LaurentSymbol::identity(2);
        assert!(matches!(
            left_coprime_with_scalar_inner(&b, &[c(0.1, 0.0), c(0.1, 0.0)]),
            Err(Error::RepeatedZero { .. })
        ));
        assert!(left_coprime_with_scalar_inner(&b, &[c(1.0, 0.0)]).is_err());
        let not_analytic = LaurentSymbol::monomial(-1, identity(2));
        assert!(matches!(
            left_coprime_with_scalar_inner(&not_analytic, &[c(0.0, 0.0)]),
            Err(Error::NotAnalytic { .. })
        ));
    }
}
