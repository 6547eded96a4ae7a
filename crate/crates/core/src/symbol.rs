//! Matrix-valued Laurent symbols `Phi(z) = sum_k A_k z^k` on the unit circle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::linalg::{identity, max_abs, zeros};
use crate::{CMatrix, Error, Result, C64};

/// Whether a symbol is declared to be of bounded type.
///
/// Bounded-type membership cannot be decided from finitely many Fourier
/// coefficients, so it is carried as an attribute. `NotBoundedStandIn` marks a
/// finite truncation standing in for a function that is not of bounded type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundedTypeFlag {
    BoundedType,
    NotBoundedStandIn,
}

impl BoundedTypeFlag {
    pub fn is_bounded(self) -> bool {
        self == BoundedTypeFlag::BoundedType
    }

    fn join(self, other: Self) -> Self {
        if self.is_bounded() && other.is_bounded() {
            BoundedTypeFlag::BoundedType
        } else {
            BoundedTypeFlag::NotBoundedStandIn
        }
    }
}

/// Finitely supported block Fourier series with `n x n` coefficients.
///
/// Coefficients that are exactly zero are never stored, so the support
/// bounds reported by [`neg_degree`](Self::neg_degree) and
/// [`pos_degree`](Self::pos_degree) are tight.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSymbol {
    n: usize,
    coeffs: BTreeMap<i64, CMatrix>,
    flag: BoundedTypeFlag,
}

/// `Phi = Phi_minus^* + Phi_plus` with `Phi_plus` analytic and `Phi_minus`
/// in `z H^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSplit {
    pub plus: LaurentSymbol,
    pub minus: LaurentSymbol,
}

impl SymbolSplit {
    /// Reassembles `Phi_minus^* + Phi_plus`.
    pub fn reconstruct(&self) -> LaurentSymbol {
        self.minus
            .adjoint()
            .add(&self.plus)
            .expect("split halves share dimension")
    }
}

fn is_exact_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

impl LaurentSymbol {
    /// Builds a symbol from `(k, coefficient)` pairs. Duplicate indices are
    /// rejected.
    pub fn new<I>(n: usize, coeffs: I, flag: BoundedTypeFlag) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, CMatrix)>,
    {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut map = BTreeMap::new();
        for (k, a) in coeffs {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.nrows().max(a.ncols()),
                });
            }
            if map.insert(k, a).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient index {k}")));
            }
        }
        Ok(Self::from_map(n, map, flag))
    }

    fn from_map(n: usize, mut coeffs: BTreeMap<i64, CMatrix>, flag: BoundedTypeFlag) -> Self {
        coeffs.retain(|_, a| !is_exact_zero(a));
        Self { n, coeffs, flag }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_map(n, BTreeMap::new(), BoundedTypeFlag::BoundedType)
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(identity(n))
    }

    pub fn constant(a: CMatrix) -> Self {
        Self::monomial(0, a)
    }

    /// `A z^k`.
    pub fn monomial(k: i64, a: CMatrix) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "coefficients must be square");
        Self::from_map(n, BTreeMap::from([(k, a)]), BoundedTypeFlag::BoundedType)
    }

    /// Scalar (`n = 1`) symbol from `(k, c_k)` pairs; repeated indices add.
    pub fn scalar<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C64)>,
    {
        let mut map: BTreeMap<i64, CMatrix> = BTreeMap::new();
        for (k, c) in terms {
            map.entry(k).or_insert_with(|| zeros(1, 1))[(0, 0)] += c;
        }
        Self::from_map(1, map, BoundedTypeFlag::BoundedType)
    }

    /// Block-diagonal symbol from scalar entries.
    pub fn diagonal(entries: &[LaurentSymbol]) -> Result<Self> {
        let n = entries.len();
        let mut map: BTreeMap<i64, CMatrix> = BTreeMap::new();
        let mut flag = BoundedTypeFlag::BoundedType;
        for (i, e) in entries.iter().enumerate() {
            if e.n != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: e.n });
            }
            flag = flag.join(e.flag);
            for (&k, a) in &e.coeffs {
                map.entry(k).or_insert_with(|| zeros(n, n))[(i, i)] = a[(0, 0)];
            }
        }
        Ok(Self::from_map(n, map, flag))
    }

    pub fn with_flag(mut self, flag: BoundedTypeFlag) -> Self {
        self.flag = flag;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flag(&self) -> BoundedTypeFlag {
        self.flag
    }

    /// Fourier coefficient at `k` (zero when outside the support).
    pub fn coeff(&self, k: i64) -> CMatrix {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| zeros(self.n, self.n))
    }

    pub fn coeff_ref(&self, k: i64) -> Option<&CMatrix> {
        self.coeffs.get(&k)
    }

    /// Nonzero coefficients in increasing index order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &CMatrix)> {
        self.coeffs.iter().map(|(&k, a)| (k, a))
    }

    /// `d-`: largest `m >= 0` with a nonzero coefficient at `-m`.
    pub fn neg_degree(&self) -> usize {
        match self.coeffs.keys().next() {
            Some(&k) if k < 0 => k.unsigned_abs() as usize,
            _ => 0,
        }
    }

    /// `d+`: largest `m >= 0` with a nonzero coefficient at `m`.
    pub fn pos_degree(&self) -> usize {
        match self.coeffs.keys().next_back() {
            Some(&k) if k > 0 => k as usize,
            _ => 0,
        }
    }

    /// `max(d-, d+)`.
    pub fn bandwidth(&self) -> usize {
        self.neg_degree().max(self.pos_degree())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// No negative Fourier coefficients.
    pub fn is_analytic(&self) -> bool {
        self.coeffs.keys().next().is_none_or(|&k| k >= 0)
    }

    /// `sum_k ||A_k||_2`, an upper bound for the norm of the Toeplitz operator.
    pub fn norm_bound(&self) -> f64 {
        self.coeffs.values().map(crate::linalg::op_norm).sum()
    }

    /// Largest entry modulus over all coefficients.
    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.values().map(max_abs).fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut map = self.coeffs.clone();
        for (&k, a) in &other.coeffs {
            *map.entry(k).or_insert_with(|| zeros(self.n, self.n)) += a;
        }
        Ok(Self::from_map(self.n, map, self.flag.join(other.flag)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        let map = self.coeffs.iter().map(|(&k, a)| (k, a * c)).collect();
        Self::from_map(self.n, map, self.flag)
    }

    /// Coefficient convolution: `(ab)^(k) = sum_j a^(j) b^(k - j)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut map: BTreeMap<i64, CMatrix> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                *map.entry(i + j).or_insert_with(|| zeros(self.n, self.n)) += a * b;
            }
        }
        Ok(Self::from_map(self.n, map, self.flag.join(other.flag)))
    }

    /// Non-negative integer power.
    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::identity(self.n).with_flag(self.flag);
        for _ in 0..e {
            out = out.mul(self).expect("same dimension");
        }
        out
    }

    /// Pointwise adjoint `Phi^*`: `(Phi^*)^(k) = Phi^(-k)^*`.
    pub fn adjoint(&self) -> Self {
        let map = self.coeffs.iter().map(|(&k, a)| (-k, a.adjoint())).collect();
        Self::from_map(self.n, map, self.flag)
    }

    /// `Phi(conj z)`: `k -> -k` without conjugation.
    pub fn breve(&self) -> Self {
        let map = self.coeffs.iter().map(|(&k, a)| (-k, a.clone())).collect();
        Self::from_map(self.n, map, self.flag)
    }

    /// `breve(Phi)^*`: same index, conjugate-transposed coefficient.
    pub fn tilde(&self) -> Self {
        let map = self.coeffs.iter().map(|(&k, a)| (k, a.adjoint())).collect();
        Self::from_map(self.n, map, self.flag)
    }

    /// Entrywise complex conjugate: `conj(Phi)^(k) = conj(Phi^(-k))`.
    pub fn bar(&self) -> Self {
        let map = self.coeffs.iter().map(|(&k, a)| (-k, a.map(|z| z.conj()))).collect();
        Self::from_map(self.n, map, self.flag)
    }

    /// Keeps only coefficients with index in `range`.
    pub fn restrict(&self, range: std::ops::RangeInclusive<i64>) -> Self {
        let map = self
            .coeffs
            .iter()
            .filter(|(k, _)| range.contains(k))
            .map(|(&k, a)| (k, a.clone()))
            .collect();
        Self::from_map(self.n, map, self.flag)
    }

    /// Analytic part `P(Phi)` (indices `k >= 0`).
    pub fn analytic_part(&self) -> Self {
        self.restrict(0..=i64::MAX)
    }

    /// Co-analytic part `P^perp(Phi)` (indices `k < 0`).
    pub fn coanalytic_part(&self) -> Self {
        self.restrict(i64::MIN..=-1)
    }

    /// `Phi = Phi_-^* + Phi_+`.
    pub fn split(&self) -> SymbolSplit {
        SymbolSplit {
            plus: self.analytic_part(),
            minus: self.coanalytic_part().adjoint(),
        }
    }

    /// Largest Frobenius norm among the coefficients of `Phi^* Phi - Phi Phi^*`.
    pub fn normality_residual(&self) -> f64 {
        let adj = self.adjoint();
        let a = adj.mul(self).expect("same dimension");
        let b = self.mul(&adj).expect("same dimension");
        a.sub(&b)
            .expect("same dimension")
            .coeffs
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise normality `Phi^* Phi = Phi Phi^*`, decided coefficient-wise.
    pub fn is_normal(&self, tol: f64) -> (bool, f64) {
        let r = self.normality_residual();
        (r <= tol, r)
    }

    /// Largest Frobenius norm of a coefficient; zero for the zero symbol.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the finite Fourier sum at a point of the unit circle.
    pub fn evaluate(&self, z: C64) -> Result<CMatrix> {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::OffCircle { re: z.re, im: z.im, modulus });
        }
        Ok(self.evaluate_unchecked(z))
    }

    /// Evaluates the Laurent polynomial at any nonzero `z`, or at any `z`
    /// when the symbol is analytic.
    pub fn evaluate_unchecked(&self, z: C64) -> CMatrix {
        let mut out = zeros(self.n, self.n);
        for (&k, a) in &self.coeffs {
            out += a * z.powi(k as i32);
        }
        out
    }
}

/// `points` equally spaced roots of unity `exp(2 pi i j / points)`.
pub fn circle_grid(points: usize) -> Vec<C64> {
    (0..points)
        .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / points as f64))
        .collect()
}
