//! Seeded random instances: Laurent symbols, Potapov products and symbols
//! with `Phi = Q Phi^*`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::identity;
use crate::potapov::{BlaschkeFactor, PotapovProduct};
use crate::{BoundedTypeFlag, CMatrix, LaurentSymbol, C64};

/// A symbol together with an inner `Q` satisfying `Phi = Q Phi^*`.
#[derive(Clone, Debug)]
pub struct FunctionalInstance {
    pub phi: LaurentSymbol,
    pub q: PotapovProduct,
}

/// Deterministic source of random instances. The same seed always yields
/// the same sequence.
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn complex(&mut self) -> C64 {
        C64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
    }

    /// Complex number with modulus at most `r`.
    fn in_disc(&mut self, r: f64) -> C64 {
        let rho = r * self.rng.gen::<f64>().sqrt();
        C64::from_polar(rho, self.rng.gen_range(0.0..std::f64::consts::TAU))
    }

    pub fn matrix(&mut self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| self.complex())
    }

    /// Unitary from the QR factorization of a random matrix, with the
    /// diagonal of `R` made positive.
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        let qr = self.matrix(n).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                let phase = d / C64::new(d.norm(), 0.0);
                for i in 0..n {
                    q[(i, j)] *= phase;
                }
            }
        }
        q
    }

    /// Orthogonal projection of the given rank onto a random subspace.
    pub fn projection(&mut self, n: usize, rank: usize) -> CMatrix {
        let u = self.unitary(n);
        let cols = u.columns(0, rank.min(n));
        let p = cols * cols.adjoint();
        // Symmetrize away round-off so the projection test is tight.
        (&p + p.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Random Laurent symbol with entries of modulus at most `sqrt 2` and
    /// both extreme coefficients present.
    pub fn laurent(&mut self, n: usize, d_minus: usize, d_plus: usize) -> LaurentSymbol {
        let coeffs: Vec<(i64, CMatrix)> = (-(d_minus as i64)..=d_plus as i64).map(|k| (k, self.matrix(n))).collect();
        LaurentSymbol::new(n, coeffs, BoundedTypeFlag::BoundedType).expect("distinct indices")
    }

    /// Random symbol with `n <= max_n` and degrees `<= max_degree`.
    pub fn small_laurent(&mut self, max_n: usize, max_degree: usize) -> LaurentSymbol {
        let n = self.rng.gen_range(1..=max_n);
        let dm = self.rng.gen_range(0..=max_degree);
        let dp = self.rng.gen_range(0..=max_degree);
        self.laurent(n, dm, dp)
    }

    /// Potapov product with `m` factors of random positive rank and zeros of
    /// modulus at most `max_radius`.
    pub fn potapov(&mut self, n: usize, m: usize, max_radius: f64) -> PotapovProduct {
        let v = self.unitary(n);
        let factors = (0..m)
            .map(|_| {
                let rank = self.rng.gen_range(1..=n);
                let alpha = if max_radius > 0.0 { self.in_disc(max_radius) } else { C64::new(0.0, 0.0) };
                let p = self.projection(n, rank);
                BlaschkeFactor::new(alpha, p).expect("valid factor")
            })
            .collect();
        PotapovProduct::new(v, factors).expect("unitary constant")
    }

    /// `Phi = G + Q G^*` with `Q` a polynomial Potapov product (all zeros at
    /// the origin, `m` factors) and `G = sum_{j <= d} c_j Q^j + p(z) I`,
    /// `|c_j| <= 1`, `p` of degree `<= d`. `G` commutes with `Q`, so
    /// `Q Phi^* = Q G^* + G = Phi` exactly, and `Phi` is a Laurent polynomial.
    pub fn functional(&mut self, n: usize, m: usize, d: usize) -> FunctionalInstance {
        let q = self.potapov(n, m, 0.0);
        let ql = q.as_laurent().expect("polynomial product");
        let mut g = LaurentSymbol::zero(n);
        let mut power = LaurentSymbol::identity(n);
        for _ in 0..=d {
            let c = self.in_disc(1.0);
            g = g.add(&power.scale(c)).expect("same n");
            power = power.mul(&ql).expect("same n");
        }
        let p = LaurentSymbol::new(
            n,
            (0..=d as i64).map(|k| (k, identity(n) * self.complex())).collect::<Vec<_>>(),
            BoundedTypeFlag::BoundedType,
        )
        .expect("distinct indices");
        g = g.add(&p).expect("same n");
        let phi = g.add(&ql.mul(&g.adjoint()).expect("same n")).expect("same n");
        FunctionalInstance { phi, q }
    }

    /// Functional instance with `n <= max_n`, `1 <= m <= max_m` and
    /// `d <= 2`.
    pub fn small_functional(&mut self, max_n: usize, max_m: usize) -> FunctionalInstance {
        let n = self.rng.gen_range(1..=max_n);
        let m = self.rng.gen_range(1..=max_m);
        let d = self.rng.gen_range(0..=2);
        self.functional(n, m, d)
    }

    pub fn gen_range(&mut self, range: std::ops::RangeInclusive<usize>) -> usize {
        self.rng.gen_range(range)
    }
}
