use serde::Serialize;

use super::{PotapovProduct, TailMajorant};
use crate::linalg::orthonormalize;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Tail bound reached before a model-space basis is emitted.
pub const MODEL_SPACE_TAIL_TARGET: f64 = 1e-8;

const MAX_BLOCKS: usize = 1 << 15;

/// Orthonormal basis of `H(Q) = H^2 (-) Q H^2`, emitted as truncated
/// coefficient columns of length `n * blocks` (block `k` holds the `z^k`
/// coefficient).
#[derive(Clone, Debug, Serialize)]
pub struct ModelSpaceBasis {
    pub n: usize,
    pub blocks: usize,
    #[serde(skip)]
    pub vectors: Vec<CVector>,
    /// Guaranteed bound on the `l^2` mass of each basis function beyond the
    /// truncation.
    pub tail_bound: f64,
}

impl ModelSpaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Basis vectors as the columns of an `n * blocks` by `dim` matrix.
    pub fn as_matrix(&self) -> CMatrix {
        crate::linalg::columns_to_matrix(self.n * self.blocks, &self.vectors)
    }

    /// Largest `||T_{Q^*} x||` over the basis, computed with the truncated
    /// expansion of `Q`. Vanishes up to the tail for members of `H(Q)`.
    pub fn membership_residual(&self, q: &PotapovProduct) -> f64 {
        let n = self.n;
        let exp = q.fourier(self.blocks);
        let coeffs: Vec<CMatrix> = (0..self.blocks).map(|k| exp.symbol.coeff(k as i64).adjoint()).collect();
        self.vectors
            .iter()
            .map(|x| {
                let mut acc = 0.0;
                for i in 0..self.blocks {
                    let mut out = CVector::zeros(n);
                    for j in i..self.blocks {
                        out += &coeffs[j - i] * x.rows(j * n, n);
                    }
                    acc += out.norm_squared();
                }
                acc.sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Model space with the default tail target.
pub fn model_space(q: &PotapovProduct, min_blocks: usize) -> Result<ModelSpaceBasis> {
    model_space_with_tail(q, min_blocks, MODEL_SPACE_TAIL_TARGET)
}

/// Builds `H(Q)` from `H(v Theta) = v H(Theta)`,
/// `H(F_1 F_2 ... F_M) = H(F_1) (+) F_1 H(F_2 ... F_M)` and
/// `H(b_alpha P + I - P) = { e / (1 - conj(alpha) z) : e in Ran P }`.
///
/// The number of blocks is doubled from `min_blocks` until every basis
/// function's certified tail is below `target`.
pub fn model_space_with_tail(q: &PotapovProduct, min_blocks: usize, target: f64) -> Result<ModelSpaceBasis> {
    let n = q.n();
    let factors = q.factors();
    let mut blocks = min_blocks.max(factors.len() + 1);
    let worst_tail = |blocks: usize| -> f64 {
        (0..factors.len())
            .filter(|&m| factors[m].rank() > 0)
            .map(|m| {
                let moduli = factors[..m].iter().map(|f| f.alpha().norm()).collect();
                TailMajorant::new(moduli, Some(factors[m].alpha().norm())).tail(blocks)
            })
            .fold(0.0, f64::max)
    };
    while worst_tail(blocks) >= target {
        if blocks >= MAX_BLOCKS {
            return Err(Error::Precondition(format!(
                "model space tail bound stays above {target:e} at {MAX_BLOCKS} blocks"
            )));
        }
        blocks *= 2;
    }

    let mut raw: Vec<CVector> = Vec::with_capacity(q.model_dimension());
    for (m, factor) in factors.iter().enumerate() {
        let alpha = factor.alpha();
        let norm = (1.0 - alpha.norm_sqr()).sqrt();
        for e in factor.range_basis() {
            // Normalised kernel e * sqrt(1-|a|^2) / (1 - conj(a) z).
            let mut series: Vec<CMatrix> = Vec::with_capacity(blocks);
            let mut power = C64::new(norm, 0.0);
            for _ in 0..blocks {
                series.push(CMatrix::from_column_slice(n, 1, (&e * power).as_slice()));
                power *= alpha.conj();
            }
            for prior in factors[..m].iter().rev() {
                prior.apply_to_series(&mut series);
            }
            let mut column = CVector::zeros(n * blocks);
            for (k, coeff) in series.iter().enumerate() {
                column.rows_mut(k * n, n).copy_from(&(q.unitary() * coeff).column(0));
            }
            raw.push(column);
        }
    }
    let vectors = orthonormalize(&raw, 1e-6);
    debug_assert_eq!(vectors.len(), raw.len());
    Ok(ModelSpaceBasis { n, blocks, vectors, tail_bound: worst_tail(blocks) })
}

/// Writes the basis as CSV, one column per basis vector with interleaved
/// `re`/`im` pairs, one row per coefficient entry.
pub(crate) fn basis_csv(basis: &ModelSpaceBasis) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..basis.dim())
        .flat_map(|j| [format!("re{j}"), format!("im{j}")])
        .collect();
    out.push_str("block,component");
    for h in header {
        out.push(',');
        out.push_str(&h);
    }
    out.push('\n');
    for row in 0..basis.n * basis.blocks {
        out.push_str(&format!("{},{}", row / basis.n, row % basis.n));
        for v in &basis.vectors {
            out.push_str(&format!(",{:e},{:e}", v[row].re, v[row].im));
        }
        out.push('\n');
    }
    out
}

impl ModelSpaceBasis {
    pub fn to_csv(&self) -> String {
        basis_csv(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{zeros, hermitian_eigen, identity, orthonormality_defect, largest_principal_angle, range_basis};
    use crate::potapov::BlaschkeFactor;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e(n: usize, i: usize) -> CMatrix {
        let mut p = zeros(n, n);
        p[(i, i)] = c(1.0, 0.0);
        p
    }

    /// Oracle: eigenvectors of `I - T_Q T_Q^*` on a window with eigenvalue 1.
    fn complement_oracle(q: &PotapovProduct, blocks: usize) -> CMatrix {
        let n = q.n();
        let sym = q.fourier(blocks).symbol;
        let mut t = zeros(n * blocks, n * blocks);
        for i in 0..blocks {
            for j in 0..=i {
                t.view_mut((i * n, j * n), (n, n)).copy_from(&sym.coeff((i - j) as i64));
            }
        }
        let proj = identity(n * blocks) - &t * t.adjoint();
        let (vals, vecs) = hermitian_eigen(&proj);
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
        let m = crate::linalg::columns_to_matrix(
            n * blocks,
            &keep.iter().map(|&i| vecs.column(i).into_owned()).collect::<Vec<_>>(),
        );
        range_basis(&m, 0.5)
    }

    #[test]
    fn diag_one_z_squared() {
        let f = BlaschkeFactor::new(c(0.0, 0.0), e(2, 1)).unwrap();
        let q = PotapovProduct::new(identity(2), vec![f.clone(), f]).unwrap();
        let basis = model_space(&q, 6).unwrap();
        assert_eq!(basis.dim(), 2);
        assert_eq!(basis.tail_bound, 0.0);
        let oracle = complement_oracle(&q, basis.blocks);
        assert_eq!(oracle.ncols(), 2);
        assert!(largest_principal_angle(&basis.as_matrix(), &oracle) < 1e-12);
        // span{(0,1), (0,z)}
        let v0 = &basis.vectors[0];
        assert!((v0[1].norm() - 1.0).abs() < 1e-14);
        assert!((basis.vectors[1][3].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_unitary_has_trivial_model_space() {
        let basis = model_space(&PotapovProduct::identity(3), 4).unwrap();
        assert_eq!(basis.dim(), 0);
    }

    #[test]
    fn diag_one_z() {
        let f = BlaschkeFactor::new(c(0.0, 0.0), e(2, 1)).unwrap();
        let q = PotapovProduct::new(identity(2), vec![f]).unwrap();
        let basis = model_space(&q, 3).unwrap();
        assert_eq!(basis.dim(), 1);
        assert_eq!(basis.vectors[0][1], c(1.0, 0.0));
        assert!(basis.vectors[0].iter().enumerate().all(|(i, z)| i == 1 || z.norm() == 0.0));
    }

    #[test]
    fn nonzero_zeros_are_orthonormal_members() {
        let u = CVector::from_column_slice(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let p = &u * u.adjoint();
        let q = PotapovProduct::new(
            identity(2),
            vec![
                BlaschkeFactor::new(c(0.5, 0.2), p).unwrap(),
                BlaschkeFactor::new(c(-0.3, 0.6), e(2, 0)).unwrap(),
                BlaschkeFactor::new(c(0.0, 0.0), identity(2)).unwrap(),
            ],
        )
        .unwrap();
        let basis = model_space(&q, 8).unwrap();
        assert_eq!(basis.dim(), 4);
        assert!(basis.tail_bound < MODEL_SPACE_TAIL_TARGET);
        assert!(orthonormality_defect(&basis.vectors) < 1e-10);
        assert!(basis.membership_residual(&q) <= basis.tail_bound + 1e-8);
        let oracle = complement_oracle(&q, basis.blocks);
        assert_eq!(oracle.ncols(), 4);
        assert!(largest_principal_angle(&basis.as_matrix(), &oracle) < 1e-7);
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let f = BlaschkeFactor::new(c(0.0, 0.0), e(2, 1)).unwrap();
        let q = PotapovProduct::new(identity(2), vec![f]).unwrap();
        let basis = model_space(&q, 3).unwrap();
        let csv = basis.to_csv();
        assert_eq!(csv.lines().count(), 1 + 2 * basis.blocks);
        assert!(csv.starts_with("block,component,re0,im0"));
    }
}
