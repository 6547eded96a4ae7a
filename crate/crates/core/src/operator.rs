//! Truncated block Toeplitz and Hankel operators with certified windows.
//!
//! Layout: an element of `H^2_{C^n}` truncated to `N` blocks is a vector of
//! length `n N` whose block `k` is the `z^k` coefficient. The Toeplitz matrix
//! has block `(i, j) = Phi^(i - j)` and the Hankel matrix has block
//! `(i, j) = Phi^(-1 - i - j)`.
//!
//! Every [`TruncatedOperator`] records a window: the top-left `W x W` blocks
//! agree with the infinite operator. Composition of banded truncations loses
//! at most the relevant bandwidth from the window, so products of Toeplitz
//! and Hankel matrices built from Laurent symbols remain certified.

use serde::Serialize;

use crate::linalg::{hermitian_eigenvalues, identity, max_abs, singular_values, zeros};
use crate::potapov::is_inner;
use crate::{CMatrix, CVector, Error, LaurentSymbol, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Toeplitz,
    Hankel,
    Composite,
    Flip,
}

impl OperatorKind {
    pub fn code(self) -> u32 {
        match self {
            OperatorKind::Toeplitz => 0,
            OperatorKind::Hankel => 1,
            OperatorKind::Composite => 2,
            OperatorKind::Flip => 3,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Some(match code {
            0 => OperatorKind::Toeplitz,
            1 => OperatorKind::Hankel,
            2 => OperatorKind::Composite,
            3 => OperatorKind::Flip,
            _ => return None,
        })
    }
}

/// Region on which a truncation equals the infinite operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    /// The top-left `W x W` blocks are exact.
    Blocks(usize),
    /// Every nonzero entry of the operator lies inside the matrix.
    Infinite,
}

/// Dense `(nN) x (nN)` truncation of a block operator.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    n: usize,
    blocks: usize,
    matrix: CMatrix,
    kind: OperatorKind,
    window: Window,
    // Block bandwidths: entry (i, j) vanishes when j > i + upper or i > j + lower.
    upper: usize,
    lower: usize,
}

/// Rectangular block Toeplitz matrix with `rows x cols` blocks.
pub fn toeplitz_matrix(phi: &LaurentSymbol, rows: usize, cols: usize) -> CMatrix {
    let n = phi.n();
    let mut m = zeros(n * rows, n * cols);
    for (k, a) in phi.terms() {
        for j in 0..cols {
            let i = j as i64 + k;
            if i >= 0 && (i as usize) < rows {
                m.view_mut((i as usize * n, j * n), (n, n)).copy_from(a);
            }
        }
    }
    m
}

/// Rectangular block Hankel matrix with `rows x cols` blocks.
pub fn hankel_matrix(phi: &LaurentSymbol, rows: usize, cols: usize) -> CMatrix {
    let n = phi.n();
    let mut m = zeros(n * rows, n * cols);
    for (k, a) in phi.terms().filter(|(k, _)| *k < 0) {
        let s = (-1 - k) as usize;
        for i in 0..=s.min(rows.saturating_sub(1)) {
            let j = s - i;
            if j < cols {
                m.view_mut((i * n, j * n), (n, n)).copy_from(a);
            }
        }
    }
    m
}

/// Multiplication by `Phi` on the `L^2` window of coefficient indices
/// `[-blocks, blocks)`; position `p` holds index `p - blocks`.
pub fn laurent_matrix(phi: &LaurentSymbol, blocks: usize) -> CMatrix {
    toeplitz_matrix(phi, 2 * blocks, 2 * blocks)
}

impl TruncatedOperator {
    /// `T_Phi` on `blocks` blocks. Every entry is exact.
    pub fn toeplitz(phi: &LaurentSymbol, blocks: usize) -> Self {
        Self {
            n: phi.n(),
            blocks,
            matrix: toeplitz_matrix(phi, blocks, blocks),
            kind: OperatorKind::Toeplitz,
            window: Window::Blocks(blocks),
            upper: phi.neg_degree(),
            lower: phi.pos_degree(),
        }
    }

    /// `H_Phi`. For a Laurent symbol with `blocks >= d-` the finite matrix
    /// contains every nonzero entry.
    pub fn hankel(phi: &LaurentSymbol, blocks: usize) -> Result<Self> {
        let d = phi.neg_degree();
        if blocks < d {
            return Err(Error::TruncationTooSmall { blocks, required: d });
        }
        Ok(Self {
            n: phi.n(),
            blocks,
            matrix: hankel_matrix(phi, blocks, blocks),
            kind: OperatorKind::Hankel,
            window: Window::Infinite,
            upper: d.saturating_sub(1),
            lower: d.saturating_sub(1),
        })
    }

    /// Shift `S = T_{z I_n}`.
    pub fn shift(n: usize, blocks: usize) -> Self {
        Self::toeplitz(&LaurentSymbol::monomial(1, identity(n)), blocks)
    }

    /// Flip `J f(z) = conj(z) f(conj(z))` on the `L^2` window `[-blocks, blocks)`:
    /// coefficient `k` moves to `-1 - k`. `J` is linear.
    pub fn flip(blocks: usize, n: usize) -> Self {
        let size = 2 * blocks;
        let mut m = zeros(n * size, n * size);
        for p in 0..size {
            let q = size - 1 - p;
            m.view_mut((q * n, p * n), (n, n)).copy_from(&identity(n));
        }
        Self {
            n,
            blocks: size,
            matrix: m,
            kind: OperatorKind::Flip,
            window: Window::Infinite,
            upper: size,
            lower: size,
        }
    }

    /// Orthogonal projection of the `L^2` window onto `H^2` (indices `>= 0`),
    /// or onto its complement when `analytic` is false.
    pub fn l2_projection(blocks: usize, n: usize, analytic: bool) -> Self {
        let size = 2 * blocks;
        let mut m = zeros(n * size, n * size);
        let range = if analytic { blocks..size } else { 0..blocks };
        for p in range {
            m.view_mut((p * n, p * n), (n, n)).copy_from(&identity(n));
        }
        Self {
            n,
            blocks: size,
            matrix: m,
            kind: OperatorKind::Composite,
            window: Window::Infinite,
            upper: 0,
            lower: 0,
        }
    }

    /// Wraps an explicit matrix, e.g. one read back from a dump.
    pub fn from_parts(n: usize, blocks: usize, matrix: CMatrix, kind: OperatorKind, window: Window) -> Result<Self> {
        if matrix.nrows() != n * blocks || matrix.ncols() != n * blocks {
            return Err(Error::DimensionMismatch { expected: n * blocks, found: matrix.nrows() });
        }
        Ok(Self { n, blocks, matrix, kind, window, upper: blocks, lower: blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Number of leading blocks on which the matrix is exact.
    pub fn exact_blocks(&self) -> usize {
        match self.window {
            Window::Blocks(w) => w.min(self.blocks),
            Window::Infinite => self.blocks,
        }
    }

    /// Top-left `w x w` blocks.
    pub fn corner(&self, w: usize) -> CMatrix {
        let s = self.n * w.min(self.blocks);
        self.matrix.view((0, 0), (s, s)).into_owned()
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            upper: self.lower,
            lower: self.upper,
            kind: if self.kind == OperatorKind::Flip { OperatorKind::Flip } else { self.kind },
            ..self.clone()
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.blocks != other.blocks {
            return Err(Error::DimensionMismatch { expected: self.blocks, found: other.blocks });
        }
        Ok(())
    }

    /// `self * other`. Entry `(i, j)` of the product sums over inner indices
    /// `k <= min(i + upper(self), j + lower(other))`, so the window shrinks by
    /// `min(upper(self), lower(other))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let window = match (self.window, other.window) {
            (Window::Infinite, Window::Infinite) => Window::Infinite,
            _ => {
                let w = self.exact_blocks().min(other.exact_blocks());
                Window::Blocks(w.saturating_sub(self.upper.min(other.lower)))
            }
        };
        Ok(Self {
            n: self.n,
            blocks: self.blocks,
            matrix: &self.matrix * &other.matrix,
            kind: OperatorKind::Composite,
            window,
            upper: self.upper + other.upper,
            lower: self.lower + other.lower,
        })
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let window = match (self.window, other.window) {
            (Window::Infinite, Window::Infinite) => Window::Infinite,
            _ => Window::Blocks(self.exact_blocks().min(other.exact_blocks())),
        };
        let matrix = if sign > 0.0 { &self.matrix + &other.matrix } else { &self.matrix - &other.matrix };
        Ok(Self {
            n: self.n,
            blocks: self.blocks,
            matrix,
            kind: OperatorKind::Composite,
            window,
            upper: self.upper.max(other.upper),
            lower: self.lower.max(other.lower),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Self {
        Self {
            matrix: identity(self.n * self.blocks) - &self.matrix,
            kind: OperatorKind::Composite,
            ..self.clone()
        }
    }

    /// Largest entrywise deviation on the common exact window, together with
    /// that window.
    pub fn deviation(&self, other: &Self) -> Result<(f64, usize)> {
        self.check_compatible(other)?;
        let w = self.exact_blocks().min(other.exact_blocks());
        Ok((max_abs(&(self.corner(w) - other.corner(w))), w))
    }
}

/// Letter of an operator word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    T,
    TStar,
}

/// Parses words such as `"T*TT"`; `T*` is read greedily.
pub fn parse_word(word: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut chars = word.chars().filter(|c| !c.is_whitespace()).peekable();
    while let Some(ch) = chars.next() {
        if ch != 'T' {
            return Err(Error::InvalidWord(word.to_string()));
        }
        if chars.peek() == Some(&'*') {
            chars.next();
            out.push(Letter::TStar);
        } else {
            out.push(Letter::T);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidWord(word.to_string()));
    }
    Ok(out)
}

/// Columns `0..blocks` of the product `L_1 L_2 ... L_m` of Toeplitz
/// operators, accumulated right to left. Each factor is applied with enough
/// rows to hold every nonzero entry, so the returned `(rows x blocks)` block
/// matrix is exact.
pub(crate) fn word_columns(factors: &[&LaurentSymbol], blocks: usize) -> CMatrix {
    let n = factors.first().map(|f| f.n()).unwrap_or(1);
    let mut rows = blocks;
    let mut acc = identity(n * blocks);
    for sym in factors.iter().rev() {
        let next_rows = rows + sym.pos_degree();
        acc = toeplitz_matrix(sym, next_rows, rows) * acc;
        rows = next_rows;
    }
    acc
}

/// `T^i` restricted to columns `0..blocks`, for `i = 1..=power`.
pub(crate) fn power_columns(phi: &LaurentSymbol, power: usize, blocks: usize) -> Vec<CMatrix> {
    let n = phi.n();
    let d = phi.pos_degree();
    let mut out: Vec<CMatrix> = Vec::with_capacity(power);
    let mut acc = identity(n * blocks);
    let mut rows = blocks;
    for _ in 0..power {
        let next_rows = rows + d;
        acc = toeplitz_matrix(phi, next_rows, rows) * acc;
        rows = next_rows;
        out.push(acc.clone());
    }
    out
}

/// Top-left `blocks` window of a word in `T_Phi` and `T_Phi^*`, e.g.
/// `[T, TStar]` for `T T^*`. Entries equal those of the infinite product.
pub fn operator_word(phi: &LaurentSymbol, word: &[Letter], blocks: usize) -> TruncatedOperator {
    let adj = phi.adjoint();
    let factors: Vec<&LaurentSymbol> = word
        .iter()
        .map(|l| match l {
            Letter::T => phi,
            Letter::TStar => &adj,
        })
        .collect();
    let n = phi.n();
    let cols = word_columns(&factors, blocks);
    let matrix = cols.view((0, 0), (n * blocks, n * blocks)).into_owned();
    let (upper, lower) = word.iter().fold((0, 0), |(u, l), letter| match letter {
        Letter::T => (u + phi.neg_degree(), l + phi.pos_degree()),
        Letter::TStar => (u + phi.pos_degree(), l + phi.neg_degree()),
    });
    TruncatedOperator {
        n,
        blocks,
        matrix,
        kind: OperatorKind::Composite,
        window: Window::Blocks(blocks),
        upper,
        lower,
    }
}

/// Support of a self-commutator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutatorSupport {
    /// Vanishes outside the top-left `s` blocks.
    Finite(usize),
    /// Non-normal symbol: the Toeplitz part `T_{Phi^*Phi - Phi Phi^*}` has
    /// infinite support; `window` blocks were computed exactly.
    Unbounded { window: usize },
}

/// `[T_Phi^*, T_Phi]` on its support block (or on an exact window when the
/// support is unbounded).
#[derive(Clone, Debug)]
pub struct CommutatorResult {
    pub n: usize,
    pub matrix: CMatrix,
    pub support: CommutatorSupport,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub symbol_normality_residual: f64,
}

impl CommutatorResult {
    pub fn support_blocks(&self) -> usize {
        match self.support {
            CommutatorSupport::Finite(s) => s,
            CommutatorSupport::Unbounded { window } => window,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// The commutator embedded in the top-left corner of a `blocks` window.
    /// Exact for finite support whenever `blocks >= s`.
    pub fn embedded(&self, blocks: usize) -> CMatrix {
        let size = self.n * blocks;
        let mut m = zeros(size, size);
        let s = self.matrix.nrows().min(size);
        m.view_mut((0, 0), (s, s)).copy_from(&self.matrix.view((0, 0), (s, s)));
        m
    }
}

/// `H_{Phi^*}^* H_{Phi^*} - H_Phi^* H_Phi` on `blocks` blocks. Equal to the
/// self-commutator when `Phi` is a normal symbol.
pub fn hankel_commutator_part(phi: &LaurentSymbol, blocks: usize) -> CMatrix {
    let a = hankel_matrix(&phi.adjoint(), blocks, blocks);
    let b = hankel_matrix(phi, blocks, blocks);
    a.adjoint() * a - b.adjoint() * b
}

/// Exact top-left `blocks` window of `[T_Phi^*, T_Phi]` for any Laurent
/// symbol: `H_{Phi^*}^* H_{Phi^*} - H_Phi^* H_Phi + T_{Phi^* Phi - Phi Phi^*}`.
pub fn self_commutator_window(phi: &LaurentSymbol, blocks: usize) -> CMatrix {
    let adj = phi.adjoint();
    let defect = adj
        .mul(phi)
        .and_then(|a| a.sub(&phi.mul(&adj)?))
        .expect("same dimension");
    // Hankel entries vanish beyond block max(d-, d+), so computing them on
    // the larger of the two windows loses nothing.
    let s = phi.bandwidth().max(blocks);
    let hankel = hankel_commutator_part(phi, s);
    let size = phi.n() * blocks;
    hankel.view((0, 0), (size, size)).into_owned() + toeplitz_matrix(&defect, blocks, blocks)
}

/// Threshold below which a singular value of a commutator counts as zero:
/// `1e-10 * (sum_k ||Phi^(k)||)^2`, which scales with the commutator.
pub fn commutator_rank_threshold(phi: &LaurentSymbol) -> f64 {
    1e-10 * phi.norm_bound().powi(2)
}

/// `[T_Phi^*, T_Phi]`. For a normal symbol the commutator equals the Hankel
/// part and vanishes outside the top-left `max(d-, d+)` blocks; otherwise
/// an exact window of `3 max(d-, d+, 1)` blocks is returned.
pub fn self_commutator(phi: &LaurentSymbol, tol: f64) -> CommutatorResult {
    let (normal, residual) = phi.is_normal(tol);
    let s = phi.bandwidth();
    let (matrix, support) = if normal {
        (hankel_commutator_part(phi, s), CommutatorSupport::Finite(s))
    } else {
        let w = 3 * s.max(1);
        (self_commutator_window(phi, w), CommutatorSupport::Unbounded { window: w })
    };
    let eigenvalues = hermitian_eigenvalues(&matrix);
    let threshold = commutator_rank_threshold(phi);
    let rank = singular_values(&matrix).iter().filter(|&&x| x > threshold).count();
    CommutatorResult {
        n: phi.n(),
        matrix,
        support,
        eigenvalues,
        rank,
        symbol_normality_residual: residual,
    }
}

/// Result of one identity of the Toeplitz/Hankel identity suite.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    /// Blocks of the certified window on which the sides were compared.
    pub window: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
    }

    pub fn min_window(&self) -> usize {
        self.checks.iter().map(|c| c.window).min().unwrap_or(0)
    }
}

fn merge(name: &str, parts: &[(f64, usize)]) -> IdentityCheck {
    IdentityCheck {
        name: name.to_string(),
        max_deviation: parts.iter().map(|p| p.0).fold(0.0, f64::max),
        window: parts.iter().map(|p| p.1).min().unwrap_or(0),
    }
}

/// Evaluates the four basic Toeplitz/Hankel identities on certified windows:
///
/// 1. `T_Phi^* = T_{Phi^*}` and `H_Phi^* = H_{tilde Phi}`;
/// 2. `T_{Phi Psi} - T_Phi T_Psi = H_{Phi^*}^* H_Psi`;
/// 3. `H_Phi T_Psi = H_{Phi Psi}` and `H_{Psi Phi} = T_{tilde Psi}^* H_Phi`
///    for analytic `Psi`;
/// 4. `H_Phi^* H_Phi - H_{Theta Phi}^* H_{Theta Phi}
///    = H_Phi^* H_{Theta^*} H_{Theta^*}^* H_Phi` for inner `Theta`.
///
/// Identity 2 is checked for `(Phi, Psi)` and for `(Psi^*, Phi)`.
pub fn identity_suite(
    phi: &LaurentSymbol,
    psi: &LaurentSymbol,
    theta: &LaurentSymbol,
    blocks: usize,
) -> Result<IdentityReport> {
    if !psi.is_analytic() {
        return Err(Error::Precondition("Psi must be analytic".into()));
    }
    if !is_inner(theta, 1e-12) {
        return Err(Error::Precondition("Theta must be an analytic inner function".into()));
    }
    let t = |s: &LaurentSymbol| TruncatedOperator::toeplitz(s, blocks);
    let h = |s: &LaurentSymbol| TruncatedOperator::hankel(s, blocks);

    let adjoints = merge(
        "adjoint",
        &[
            t(phi).adjoint().deviation(&t(&phi.adjoint()))?,
            h(phi)?.adjoint().deviation(&h(&phi.tilde())?)?,
        ],
    );

    let product_rule = |a: &LaurentSymbol, b: &LaurentSymbol| -> Result<(f64, usize)> {
        let lhs = t(&a.mul(b)?).sub(&t(a).compose(&t(b))?)?;
        let rhs = h(&a.adjoint())?.adjoint().compose(&h(b)?)?;
        lhs.deviation(&rhs)
    };
    let product = merge("product", &[product_rule(phi, psi)?, product_rule(&psi.adjoint(), phi)?]);

    let hankel_toeplitz = merge(
        "hankel-toeplitz",
        &[
            h(phi)?.compose(&t(psi))?.deviation(&h(&phi.mul(psi)?)?)?,
            h(&psi.mul(phi)?)?.deviation(&t(&psi.tilde()).adjoint().compose(&h(phi)?)?)?,
        ],
    );

    let hp = h(phi)?;
    let htp = h(&theta.mul(phi)?)?;
    let hts = h(&theta.adjoint())?;
    let lhs = hp.adjoint().compose(&hp)?.sub(&htp.adjoint().compose(&htp)?)?;
    let rhs = hp.adjoint().compose(&hts)?.compose(&hts.adjoint())?.compose(&hp)?;
    let inner = merge("inner", &[lhs.deviation(&rhs)?]);

    Ok(IdentityReport { checks: vec![adjoints, product, hankel_toeplitz, inner] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BoundedTypeFlag, C64};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z_plus_zbar() -> LaurentSymbol {
        LaurentSymbol::scalar([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))])
    }

    fn case_two() -> LaurentSymbol {
        LaurentSymbol::diagonal(&[z_plus_zbar(), LaurentSymbol::scalar([(1, c(1.0, 0.0))])]).unwrap()
    }

    fn diag(a: f64, b: f64) -> CMatrix {
        let mut m = zeros(2, 2);
        m[(0, 0)] = c(a, 0.0);
        m[(1, 1)] = c(b, 0.0);
        m
    }

    /// Oracle for `T_Phi`: column `(j, e)` is the analytic projection of
    /// `Phi z^j e`, computed by symbol convolution.
    fn toeplitz_by_convolution(phi: &LaurentSymbol, blocks: usize) -> CMatrix {
        let n = phi.n();
        let mut m = zeros(n * blocks, n * blocks);
        for j in 0..blocks {
            for e in 0..n {
                let mut unit = zeros(n, n);
                unit[(e, e)] = c(1.0, 0.0);
                let f = LaurentSymbol::monomial(j as i64, unit);
                let g = phi.mul(&f).unwrap().analytic_part();
                for (k, a) in g.terms() {
                    if (k as usize) < blocks {
                        for r in 0..n {
                            m[(k as usize * n + r, j * n + e)] = a[(r, e)];
                        }
                    }
                }
            }
        }
        m
    }

    #[test]
    fn toeplitz_examples() {
        let s = TruncatedOperator::shift(2, 3);
        let mut expected = zeros(6, 6);
        for i in 0..4 {
            expected[(i + 2, i)] = c(1.0, 0.0);
        }
        assert_eq!(s.matrix(), &expected);

        let t = TruncatedOperator::toeplitz(&case_two(), 4);
        assert_eq!(t.matrix().view((2, 0), (2, 2)).into_owned(), diag(1.0, 1.0));
        assert_eq!(t.matrix().view((0, 2), (2, 2)).into_owned(), diag(1.0, 0.0));
        assert_eq!(t.matrix(), &toeplitz_by_convolution(&case_two(), 4));

        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(-1.0, 0.0)]);
        let t = TruncatedOperator::toeplitz(&LaurentSymbol::constant(a.clone()), 3);
        for i in 0..3 {
            assert_eq!(t.matrix().view((2 * i, 2 * i), (2, 2)).into_owned(), a);
        }
    }

    #[test]
    fn hankel_examples() {
        let analytic = LaurentSymbol::scalar([(0, c(1.0, 0.0)), (3, c(2.0, 0.0))]);
        assert_eq!(max_abs(TruncatedOperator::hankel(&analytic, 4).unwrap().matrix()), 0.0);

        let zbar = LaurentSymbol::scalar([(-1, c(1.0, 0.0))]);
        let h = TruncatedOperator::hankel(&zbar, 3).unwrap();
        let mut expected = zeros(3, 3);
        expected[(0, 0)] = c(1.0, 0.0);
        assert_eq!(h.matrix(), &expected);

        // H_{conj(Phi)} (0, z)^t = 0 for the diagonal counterexample.
        let bar = case_two().bar();
        let h = TruncatedOperator::hankel(&bar, 3).unwrap();
        let mut x = CVector::zeros(6);
        x[3] = c(1.0, 0.0);
        assert_eq!(h.apply(&x).norm(), 0.0);

        assert!(matches!(
            TruncatedOperator::hankel(&LaurentSymbol::scalar([(-5, c(1.0, 0.0))]), 3),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn hankel_matches_flip_definition() {
        // Oracle: H_Phi f = J P^perp (Phi f) on the L^2 window, restricted to H^2.
        let phi = LaurentSymbol::new(
            2,
            [
                (-2, CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.0, 2.0), c(-1.0, 0.0), c(0.3, 0.0)])),
                (-1, diag(2.0, -1.0)),
                (1, diag(0.5, 0.5)),
            ],
            BoundedTypeFlag::BoundedType,
        )
        .unwrap();
        let blocks = 6;
        let j = TruncatedOperator::flip(blocks, 2);
        let pperp = TruncatedOperator::l2_projection(blocks, 2, false);
        let mult = laurent_matrix(&phi, blocks);
        let full = j.matrix() * pperp.matrix() * mult;
        // Restrict to H^2 columns and rows (positions blocks..2*blocks).
        let oracle = full.view((2 * blocks, 2 * blocks), (2 * blocks, 2 * blocks)).into_owned();
        // Columns near the window edge see truncated products; compare the
        // first blocks - d- columns.
        let h = TruncatedOperator::hankel(&phi, blocks).unwrap();
        let cols = 2 * (blocks - 2);
        let diff = h.matrix().view((0, 0), (2 * blocks, cols)) - oracle.view((0, 0), (2 * blocks, cols));
        assert!(max_abs(&diff.into_owned()) < 1e-15);
    }

    #[test]
    fn flip_identities() {
        let blocks = 4;
        let j = TruncatedOperator::flip(blocks, 2);
        let p = TruncatedOperator::l2_projection(blocks, 2, true);
        let pperp = TruncatedOperator::l2_projection(blocks, 2, false);
        // J(z^-1 e) = e.
        let mut x = CVector::zeros(16);
        x[2 * (blocks - 1)] = c(1.0, 0.0);
        let y = j.apply(&x);
        assert_eq!(y[2 * blocks], c(1.0, 0.0));
        assert_eq!(j.compose(&j).unwrap().matrix(), &identity(16));
        assert_eq!(
            p.compose(&j).unwrap().matrix(),
            j.compose(&pperp).unwrap().matrix()
        );
        assert_eq!(
            pperp.compose(&j).unwrap().matrix(),
            j.compose(&p).unwrap().matrix()
        );
        // J M_Phi = M_breve(Phi) J on the interior of the window.
        let phi = LaurentSymbol::scalar([(1, c(2.0, 1.0)), (-1, c(0.0, 1.0))]);
        let j1 = TruncatedOperator::flip(blocks, 1);
        let lhs = j1.matrix() * laurent_matrix(&phi, blocks);
        let rhs = laurent_matrix(&phi.breve(), blocks) * j1.matrix();
        let inner = lhs.view((1, 1), (6, 6)).into_owned() - rhs.view((1, 1), (6, 6));
        assert_eq!(max_abs(&inner), 0.0);
    }

    #[test]
    fn word_parsing() {
        assert_eq!(parse_word("T*T").unwrap(), vec![Letter::TStar, Letter::T]);
        assert_eq!(parse_word("TT*").unwrap(), vec![Letter::T, Letter::TStar]);
        assert!(parse_word("TX").is_err());
        assert!(parse_word("").is_err());
    }

    #[test]
    fn word_examples() {
        let phi = case_two();
        let t = operator_word(&phi, &[Letter::T], 5);
        assert_eq!(t.matrix(), TruncatedOperator::toeplitz(&phi, 5).matrix());

        let shift = LaurentSymbol::monomial(1, identity(2));
        let tst = operator_word(&shift, &[Letter::TStar, Letter::T], 4);
        assert_eq!(tst.matrix(), &identity(8));
        let ttst = operator_word(&shift, &[Letter::T, Letter::TStar], 4);
        let mut expected = identity(8);
        expected[(0, 0)] = c(0.0, 0.0);
        expected[(1, 1)] = c(0.0, 0.0);
        assert_eq!(ttst.matrix(), &expected);
    }

    #[test]
    fn commutator_from_words_matches_hankel_route() {
        let phi = LaurentSymbol::scalar([(1, c(1.0, 0.0)), (-1, c(0.5, 0.25)), (2, c(0.0, 0.3))]);
        let blocks = 6;
        let a = operator_word(&phi, &[Letter::TStar, Letter::T], blocks);
        let b = operator_word(&phi, &[Letter::T, Letter::TStar], blocks);
        let words = a.sub(&b).unwrap();
        let comm = self_commutator(&phi, 1e-10);
        assert_eq!(comm.support, CommutatorSupport::Finite(2));
        assert!(max_abs(&(words.matrix() - comm.embedded(blocks))) < 1e-14);
    }

    #[test]
    fn scalar_commutator_is_rank_one() {
        // phi = z + c conj(z): H_{phi^*} has the single entry 1, H_phi has c.
        let cc = c(0.5, 0.0);
        let phi = LaurentSymbol::scalar([(1, c(1.0, 0.0)), (-1, cc)]);
        let comm = self_commutator(&phi, 1e-10);
        assert_eq!(comm.support, CommutatorSupport::Finite(1));
        assert!((comm.matrix[(0, 0)] - c(0.75, 0.0)).norm() < 1e-15);
        assert_eq!(comm.rank, 1);
        // Oracle: dense truncation T*T - TT* with buffer.
        let t = toeplitz_matrix(&phi, 8, 8);
        let dense = t.adjoint() * &t - &t * t.adjoint();
        assert!((dense[(0, 0)] - comm.matrix[(0, 0)]).norm() < 1e-15);
        assert!(dense.view((0, 1), (1, 5)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn case_two_commutator() {
        let comm = self_commutator(&case_two(), 1e-10);
        assert_eq!(comm.rank, 1);
        let mut e = CVector::zeros(2);
        e[1] = c(1.0, 0.0);
        assert_eq!(&comm.matrix * &e, e);
        assert!((comm.eigenvalues.last().unwrap() - 1.0).abs() < 1e-15);

        let normal_const = LaurentSymbol::constant(diag(2.0, -3.0));
        let comm = self_commutator(&normal_const, 1e-10);
        assert_eq!(comm.rank, 0);
        assert_eq!(comm.support, CommutatorSupport::Finite(0));
    }

    #[test]
    fn non_normal_symbol_has_unbounded_support() {
        let mut a = zeros(2, 2);
        a[(0, 1)] = c(1.0, 0.0);
        let phi = LaurentSymbol::monomial(1, a);
        let comm = self_commutator(&phi, 1e-10);
        assert!(matches!(comm.support, CommutatorSupport::Unbounded { .. }));
        assert!(comm.min_eigenvalue() < -0.5);
    }

    #[test]
    fn identity_suite_examples() {
        let zbar = LaurentSymbol::scalar([(-1, c(1.0, 0.0))]);
        let z = LaurentSymbol::scalar([(1, c(1.0, 0.0))]);
        let phi = LaurentSymbol::scalar([(-1, c(1.0, 0.0)), (-2, c(0.5, 0.0)), (1, c(0.0, 1.0))]);
        let report = identity_suite(&phi, &z, &z, 16).unwrap();
        assert_eq!(report.checks.len(), 4);
        assert!(report.max_deviation() < 1e-14, "{report:?}");
        assert!(report.min_window() >= 12);

        // Product rule with Phi = z, Psi = zbar: both sides are e0 e0^*.
        // (With the roles swapped both sides vanish.)
        let t = |s: &LaurentSymbol| TruncatedOperator::toeplitz(s, 4);
        let lhs = t(&z.mul(&zbar).unwrap()).sub(&t(&z).compose(&t(&zbar)).unwrap()).unwrap();
        let rhs = TruncatedOperator::hankel(&z.adjoint(), 4)
            .unwrap()
            .adjoint()
            .compose(&TruncatedOperator::hankel(&zbar, 4).unwrap())
            .unwrap();
        let (dev, w) = lhs.deviation(&rhs).unwrap();
        assert_eq!(dev, 0.0);
        assert!(w >= 3);
        let dense = toeplitz_matrix(&z, 4, 4) * toeplitz_matrix(&zbar, 4, 4);
        assert_eq!(identity(4) - dense, *rhs.matrix());
        assert_eq!(rhs.matrix()[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn hankel_times_shift_is_column_shift() {
        let phi = LaurentSymbol::scalar([(-1, c(1.0, 0.0)), (-3, c(2.0, 0.0))]);
        let z = LaurentSymbol::scalar([(1, c(1.0, 0.0))]);
        let lhs = TruncatedOperator::hankel(&phi, 5).unwrap().compose(&TruncatedOperator::toeplitz(&z, 5)).unwrap();
        let h = TruncatedOperator::hankel(&phi, 5).unwrap();
        for j in 0..4 {
            assert_eq!(lhs.matrix().column(j), h.matrix().column(j + 1));
        }
    }

    #[test]
    fn identity_suite_rejects_bad_inputs() {
        let z = LaurentSymbol::scalar([(1, c(1.0, 0.0))]);
        let zbar = z.adjoint();
        assert!(identity_suite(&z, &zbar, &z, 8).is_err());
        let two_z = z.scale(c(2.0, 0.0));
        assert!(identity_suite(&z, &z, &two_z, 8).is_err());
    }
}
