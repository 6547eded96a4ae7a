//! Finite Blaschke-Potapov products `Q(z) = v prod_m (b_m(z) P_m + I - P_m)`.

mod coprime;
mod model_space;

pub use coprime::{
    common_left_divisor, left_coprime_with_scalar_inner, right_coprime_with_scalar_inner,
    CoprimeReport, CoprimeWitness,
};
pub use model_space::{model_space, model_space_with_tail, ModelSpaceBasis, MODEL_SPACE_TAIL_TARGET};

use crate::linalg::{hermitian_eigen, identity, max_abs, zeros};
use crate::symbol::circle_grid;
use crate::{BoundedTypeFlag, CMatrix, CVector, Error, LaurentSymbol, Result, C64};

const STRUCTURE_TOL: f64 = 1e-12;

/// One Blaschke-Potapov factor `b_alpha(z) P + (I - P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeFactor {
    alpha: C64,
    projection: CMatrix,
}

impl BlaschkeFactor {
    pub fn new(alpha: C64, projection: CMatrix) -> Result<Self> {
        if alpha.norm() >= 1.0 {
            return Err(Error::ZeroOutsideDisc { re: alpha.re, im: alpha.im });
        }
        if projection.nrows() != projection.ncols() {
            return Err(Error::DimensionMismatch {
                expected: projection.nrows(),
                found: projection.ncols(),
            });
        }
        let herm = max_abs(&(&projection - projection.adjoint()));
        let idem = max_abs(&(&projection * &projection - &projection));
        let residual = herm.max(idem);
        if residual > STRUCTURE_TOL {
            return Err(Error::NotProjection { residual });
        }
        Ok(Self { alpha, projection })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn projection(&self) -> &CMatrix {
        &self.projection
    }

    pub fn n(&self) -> usize {
        self.projection.nrows()
    }

    /// `rank P`, read off the trace.
    pub fn rank(&self) -> usize {
        self.projection.trace().re.round().max(0.0) as usize
    }

    /// Scalar Blaschke factor `(z - alpha) / (1 - conj(alpha) z)`.
    pub fn blaschke(&self, z: C64) -> C64 {
        (z - self.alpha) / (C64::new(1.0, 0.0) - self.alpha.conj() * z)
    }

    pub fn evaluate(&self, z: C64) -> CMatrix {
        let n = self.n();
        &self.projection * self.blaschke(z) + (identity(n) - &self.projection)
    }

    /// Orthonormal basis of `Ran P`.
    pub fn range_basis(&self) -> Vec<CVector> {
        let (vals, vecs) = hermitian_eigen(&self.projection);
        vals.iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.5)
            .map(|(j, _)| vecs.column(j).into_owned())
            .collect()
    }

    /// Left-multiplies a truncated power series (coefficient `k` at index
    /// `k`) by this factor. Exact on the retained coefficients.
    fn apply_to_series(&self, series: &mut [CMatrix]) {
        let a = self.alpha;
        let ac = a.conj();
        let complement = identity(self.n()) - &self.projection;
        // y = b_alpha x via (1 - conj(a) z) y = (z - a) x.
        let mut prev_y: Option<CMatrix> = None;
        let mut prev_x: Option<CMatrix> = None;
        for x in series.iter_mut() {
            let mut y = x.clone() * (-a);
            if let (Some(py), Some(px)) = (&prev_y, &prev_x) {
                y += py * ac + px;
            }
            let out = &self.projection * &y + &complement * &*x;
            prev_x = Some(std::mem::replace(x, out));
            prev_y = Some(y);
        }
    }
}

/// Finite Blaschke-Potapov product: a unitary constant followed by an
/// ordered list of factors.
#[derive(Clone, Debug, PartialEq)]
pub struct PotapovProduct {
    v: CMatrix,
    factors: Vec<BlaschkeFactor>,
}

/// Truncated Fourier expansion of a product with a certified bound on the
/// `l^2` mass of the discarded coefficients.
#[derive(Clone, Debug)]
pub struct FourierExpansion {
    pub symbol: LaurentSymbol,
    pub blocks: usize,
    pub tail_bound: f64,
}

impl PotapovProduct {
    pub fn new(v: CMatrix, factors: Vec<BlaschkeFactor>) -> Result<Self> {
        let n = v.nrows();
        if n == 0 || v.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n.max(1), found: v.ncols() });
        }
        let residual = max_abs(&(v.adjoint() * &v - identity(n)));
        if residual > STRUCTURE_TOL {
            return Err(Error::NotUnitary { residual });
        }
        if let Some(f) = factors.iter().find(|f| f.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: f.n() });
        }
        Ok(Self { v, factors })
    }

    /// Constant unitary `v` with no factors.
    pub fn constant(v: CMatrix) -> Result<Self> {
        Self::new(v, Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self { v: identity(n), factors: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.v
    }

    pub fn factors(&self) -> &[BlaschkeFactor] {
        &self.factors
    }

    /// `sum_m rank P_m`, the dimension of the model space.
    pub fn model_dimension(&self) -> usize {
        self.factors.iter().map(BlaschkeFactor::rank).sum()
    }

    /// All zeros at the origin: the product is a matrix polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.factors.iter().all(|f| f.alpha == C64::new(0.0, 0.0))
    }

    /// `max_m |alpha_m|`.
    pub fn zero_radius(&self) -> f64 {
        self.factors.iter().map(|f| f.alpha.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the product on the closed unit disc.
    pub fn evaluate(&self, z: C64) -> Result<CMatrix> {
        if z.norm() > 1.0 + STRUCTURE_TOL {
            return Err(Error::OutsideDisc { re: z.re, im: z.im });
        }
        let mut out = self.v.clone();
        for f in &self.factors {
            out *= f.evaluate(z);
        }
        Ok(out)
    }

    /// `Q1 Q2` rewritten in normal form by moving the unitary of `Q2` to the
    /// left through the factors of `Q1`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        let w = &other.v;
        let mut factors: Vec<BlaschkeFactor> = self
            .factors
            .iter()
            .map(|f| {
                let p = w.adjoint() * &f.projection * w;
                // Re-symmetrise to keep the projection check tight.
                let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
                BlaschkeFactor { alpha: f.alpha, projection: p }
            })
            .collect();
        factors.extend(other.factors.iter().cloned());
        Ok(Self { v: &self.v * w, factors })
    }

    /// Coefficients `0..blocks` of the product, expanded exactly from
    /// `b_alpha(z) = -alpha + (1 - |alpha|^2) sum_{k>=1} conj(alpha)^(k-1) z^k`.
    pub fn fourier(&self, blocks: usize) -> FourierExpansion {
        let n = self.n();
        let blocks = blocks.max(1);
        let mut series = vec![zeros(n, n); blocks];
        series[0] = identity(n);
        for f in self.factors.iter().rev() {
            f.apply_to_series(&mut series);
        }
        let terms = series
            .into_iter()
            .enumerate()
            .map(|(k, a)| (k as i64, &self.v * a));
        let symbol = LaurentSymbol::new(n, terms, BoundedTypeFlag::BoundedType)
            .expect("coefficients have the product's dimension");
        let moduli: Vec<f64> = self.factors.iter().map(|f| f.alpha.norm()).collect();
        let tail_bound = TailMajorant::new(moduli, None).tail(blocks);
        FourierExpansion { symbol, blocks, tail_bound }
    }

    /// Exact Laurent symbol when every zero sits at the origin.
    pub fn as_laurent(&self) -> Option<LaurentSymbol> {
        self.is_polynomial()
            .then(|| self.fourier(self.factors.len() + 1).symbol)
    }

    /// Largest `||Q(z)^* Q(z) - I||` over `points` roots of unity.
    pub fn unitarity_defect_on_grid(&self, points: usize) -> f64 {
        let n = self.n();
        circle_grid(points)
            .into_iter()
            .map(|z| {
                let q = self.evaluate(z).expect("on the circle");
                max_abs(&(q.adjoint() * q - identity(n)))
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficient majorant for products of Blaschke-Potapov factors, optionally
/// followed by a normalised reproducing kernel `sqrt(1-|a|^2)/(1 - conj(a) z)`.
///
/// Each factor's coefficients are bounded in norm by those of
/// `1 + (1-r^2) t / (1 - r t)` with `r = |alpha|`, so the product's
/// coefficients are bounded by those of `g(t)`, the product of these series.
/// The nonnegative coefficients satisfy `c_k <= g(s) s^-k` for any
/// `1 < s < 1/max r`, which gives
/// `sqrt(sum_{k>=N} c_k^2) <= g(s) s^-N / sqrt(1 - s^-2)`.
#[derive(Clone, Debug)]
pub(crate) struct TailMajorant {
    moduli: Vec<f64>,
    kernel: Option<f64>,
}

impl TailMajorant {
    pub(crate) fn new(moduli: Vec<f64>, kernel: Option<f64>) -> Self {
        Self { moduli, kernel }
    }

    fn radius(&self) -> f64 {
        self.moduli
            .iter()
            .copied()
            .chain(self.kernel)
            .fold(0.0, f64::max)
    }

    /// Bound on the `l^2` norm of coefficients with index `>= blocks`.
    pub(crate) fn tail(&self, blocks: usize) -> f64 {
        let rho = self.radius();
        if rho == 0.0 {
            // Polynomial majorant (1 + t)^M: sum the discarded binomials.
            let m = self.moduli.len();
            let mut binom = vec![1.0f64; m + 1];
            for k in 1..=m {
                binom[k] = binom[k - 1] * (m + 1 - k) as f64 / k as f64;
            }
            return binom.iter().skip(blocks).map(|c| c * c).sum::<f64>().sqrt();
        }
        let log_g = |s: f64| -> f64 {
            let mut acc = 0.0;
            for &r in &self.moduli {
                acc += (1.0 + (1.0 - r * r) * s / (1.0 - r * s)).ln();
            }
            if let Some(a) = self.kernel {
                acc += 0.5 * (1.0 - a * a).ln() - (1.0 - a * s).ln();
            }
            acc
        };
        let mut best = f64::INFINITY;
        let exponents = (1..100).map(|i| i as f64 / 100.0).chain([0.995, 0.999]);
        for e in exponents {
            let s = rho.powf(-e);
            if !(s.is_finite() && s > 1.0 && rho * s < 1.0) {
                continue;
            }
            let log_bound = log_g(s) - blocks as f64 * s.ln() - 0.5 * (1.0 - s.powi(-2)).ln();
            best = best.min(log_bound.exp());
        }
        best
    }
}

/// `Theta^* Theta = I`, decided by exact coefficient convolution. Requires an
/// analytic symbol.
pub fn is_inner(theta: &LaurentSymbol, tol: f64) -> bool {
    if !theta.is_analytic() || theta.is_zero() {
        return false;
    }
    let gram = theta.adjoint().mul(theta).expect("same dimension");
    match gram.sub(&LaurentSymbol::identity(theta.n())) {
        Ok(d) => d.max_coeff_abs() <= tol,
        Err(_) => false,
    }
}

/// Grid version of [`is_inner`] for truncated expansions of rational inner
/// functions, whose convolution identity only holds up to the tail.
pub fn is_inner_on_grid(theta: &LaurentSymbol, points: usize, tol: f64) -> bool {
    if !theta.is_analytic() {
        return false;
    }
    let n = theta.n();
    circle_grid(points).into_iter().all(|z| {
        let q = theta.evaluate(z).expect("on the circle");
        max_abs(&(q.adjoint() * q - identity(n))) <= tol
    })
}
