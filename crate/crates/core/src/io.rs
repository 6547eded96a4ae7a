//! File formats: symbol and Potapov JSON specs, matrix dumps, and serde
//! helpers for complex values.

use std::collections::BTreeSet;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::linalg::zeros;
use crate::operator::{OperatorKind, TruncatedOperator, Window};
use crate::potapov::{BlaschkeFactor, PotapovProduct};
use crate::{BoundedTypeFlag, CMatrix, CVector, Error, LaurentSymbol, Result, C64};

const MAGIC: &[u8; 4] = b"BTOP";

pub fn serialize_complex<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(2))?;
    map.serialize_entry("re", &z.re)?;
    map.serialize_entry("im", &z.im)?;
    map.end()
}

/// A vector as `{"re": [...], "im": [...]}`.
pub fn serialize_vector<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(2))?;
    map.serialize_entry("re", &v.iter().map(|z| z.re).collect::<Vec<_>>())?;
    map.serialize_entry("im", &v.iter().map(|z| z.im).collect::<Vec<_>>())?;
    map.end()
}

pub fn serialize_vectors<S: Serializer>(vs: &[CVector], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(vs.len()))?;
    for v in vs {
        seq.serialize_element(&VectorJson::from(v))?;
    }
    seq.end()
}

/// A matrix as `{"re": [[...]], "im": [[...]]}`, row-major.
pub fn serialize_matrix<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixJson::from(m).serialize(s)
}

pub fn serialize_opt_matrix<S: Serializer>(m: &Option<CMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(MatrixJson::from).serialize(s)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl From<&CVector> for VectorJson {
    fn from(v: &CVector) -> Self {
        Self { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl MatrixJson {
    /// Square `n x n` matrix; a missing `im` part means real entries. A
    /// wrong shape is a parse error.
    pub fn to_matrix(&self, n: usize) -> Result<CMatrix> {
        let check = |rows: &Vec<Vec<f64>>| -> Result<()> {
            if rows.len() != n {
                return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
            }
            for r in rows {
                if r.len() != n {
                    return Err(Error::Parse(format!("expected {n} columns, found {}", r.len())));
                }
            }
            Ok(())
        };
        check(&self.re)?;
        if !self.im.is_empty() {
            check(&self.im)?;
        }
        let mut m = zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
                m[(i, j)] = C64::new(self.re[i][j], im);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoeffJson {
    k: i64,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolJson {
    n: usize,
    coeffs: Vec<CoeffJson>,
    #[serde(default = "default_bounded")]
    bounded_type: bool,
}

fn default_bounded() -> bool {
    true
}

#[derive(Debug, Serialize, Deserialize)]
struct FactorJson {
    alpha: ComplexJson,
    #[serde(rename = "P")]
    p: MatrixJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct PotapovJson {
    v: MatrixJson,
    factors: Vec<FactorJson>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Parses `{"n", "coeffs": [{"k", "re", "im"}], "bounded_type"}`.
pub fn parse_symbol(text: &str) -> Result<LaurentSymbol> {
    let raw: SymbolJson = serde_json::from_str(text).map_err(parse_err)?;
    let mut seen = BTreeSet::new();
    let mut coeffs = Vec::with_capacity(raw.coeffs.len());
    for c in &raw.coeffs {
        if !seen.insert(c.k) {
            return Err(Error::Parse(format!("duplicate coefficient index {}", c.k)));
        }
        let m = MatrixJson { re: c.re.clone(), im: c.im.clone() }.to_matrix(raw.n)?;
        coeffs.push((c.k, m));
    }
    let flag = if raw.bounded_type { BoundedTypeFlag::BoundedType } else { BoundedTypeFlag::NotBoundedStandIn };
    LaurentSymbol::new(raw.n, coeffs, flag)
}

pub fn symbol_to_json(phi: &LaurentSymbol) -> String {
    let raw = SymbolJson {
        n: phi.n(),
        coeffs: phi
            .terms()
            .map(|(k, a)| {
                let m = MatrixJson::from(a);
                CoeffJson { k, re: m.re, im: m.im }
            })
            .collect(),
        bounded_type: phi.flag().is_bounded(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data")
}

/// Parses `{"v": matrix, "factors": [{"alpha": {re, im}, "P": matrix}]}`.
pub fn parse_potapov(text: &str) -> Result<PotapovProduct> {
    let raw: PotapovJson = serde_json::from_str(text).map_err(parse_err)?;
    let n = raw.v.re.len();
    if n == 0 {
        return Err(Error::Parse("empty unitary".into()));
    }
    let v = raw.v.to_matrix(n)?;
    let factors = raw
        .factors
        .iter()
        .map(|f| BlaschkeFactor::new(C64::new(f.alpha.re, f.alpha.im), f.p.to_matrix(n)?))
        .collect::<Result<Vec<_>>>()?;
    PotapovProduct::new(v, factors)
}

pub fn potapov_to_json(q: &PotapovProduct) -> String {
    let raw = PotapovJson {
        v: MatrixJson::from(q.unitary()),
        factors: q
            .factors()
            .iter()
            .map(|f| FactorJson {
                alpha: ComplexJson { re: f.alpha().re, im: f.alpha().im },
                p: MatrixJson::from(f.projection()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data")
}

/// Operator matrix as CSV: `row,col,re,im` for every entry, row-major.
pub fn operator_csv(op: &TruncatedOperator) -> String {
    let m = op.matrix();
    let mut out = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push_str(&format!("{i},{j},{:e},{:e}\n", z.re, z.im));
        }
    }
    out
}

/// 16-byte header (`BTOP`, u32 n, u32 N, u32 kind) then interleaved
/// little-endian `f64` re/im pairs in row-major order.
pub fn operator_binary(op: &TruncatedOperator) -> Vec<u8> {
    let m = op.matrix();
    let mut out = Vec::with_capacity(16 + 16 * m.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(op.n() as u32).to_le_bytes());
    out.extend_from_slice(&(op.blocks() as u32).to_le_bytes());
    out.extend_from_slice(&op.kind().code().to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

/// Reads a binary dump. The window is not stored, so the result claims
/// none beyond the matrix itself.
pub fn read_operator_binary(bytes: &[u8]) -> Result<TruncatedOperator> {
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(Error::Parse("missing BTOP header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (n, blocks) = (word(4), word(8));
    let kind = OperatorKind::from_code(word(12) as u32).ok_or_else(|| Error::Parse("unknown operator kind".into()))?;
    let size = n * blocks;
    if bytes.len() != 16 + 16 * size * size {
        return Err(Error::Parse(format!("expected {} payload bytes, found {}", 16 * size * size, bytes.len() - 16)));
    }
    let mut m = zeros(size, size);
    let float = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    for i in 0..size {
        for j in 0..size {
            let at = 16 + 16 * (i * size + j);
            m[(i, j)] = C64::new(float(at), float(at + 8));
        }
    }
    TruncatedOperator::from_parts(n, blocks, m, kind, Window::Blocks(0))
}
