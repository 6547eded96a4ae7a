//! Report assembly behind the `btop` command line: run configuration,
//! analysis of symbol files, lemma verification tables, the example catalog
//! and instance dumps. Every report embeds its [`RunConfig`] and serializes
//! deterministically.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogEntry};
use crate::classify::{
    classify, verify_commutator_factorization, verify_finite_rank_bound, verify_range_identification,
    AnalyticMultiplier, ClassificationReport, ClassifyOptions, InjectivityTarget, Verdict,
};
use crate::generator::Generator;
use crate::io::{potapov_to_json, serialize_complex, symbol_to_json};
use crate::linalg::{identity, max_abs, zeros};
use crate::operator::{identity_suite, self_commutator};
use crate::{Error, LaurentSymbol, PotapovProduct, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Truncation size in blocks.
    pub n_trunc: usize,
    pub k_max: usize,
    pub tol_coeff: f64,
    /// Magnitude of the allowed negative eigenvalue, relative to `||Phi||^2`.
    pub tol_psd: f64,
    pub tol_angle: f64,
    pub grid: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { n_trunc: 64, k_max: 4, tol_coeff: 1e-10, tol_psd: 1e-9, tol_angle: 1e-6, grid: 512, seed: 0 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str| Err(Error::Parse(format!("{name} must be positive")));
        if self.n_trunc == 0 {
            return bad("n_trunc");
        }
        if self.k_max == 0 {
            return bad("k_max");
        }
        if self.grid == 0 {
            return bad("grid");
        }
        for (name, v) in [("tol_coeff", self.tol_coeff), ("tol_psd", self.tol_psd), ("tol_angle", self.tol_angle)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name);
            }
        }
        Ok(())
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            k_max: self.k_max,
            blocks: self.n_trunc,
            tol_coeff: self.tol_coeff,
            tol_psd: self.tol_psd,
            grid: self.grid,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:e}")
    }
}

// ---------------------------------------------------------------- analyze

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub config: RunConfig,
    pub report: ClassificationReport,
}

pub fn analyze(phi: &LaurentSymbol, q: Option<&PotapovProduct>, config: &RunConfig) -> Result<AnalyzeReport> {
    config.validate()?;
    Ok(AnalyzeReport { config: config.clone(), report: classify(phi, q, &config.classify_options())? })
}

fn summary_rows(r: &ClassificationReport) -> Vec<(&'static str, String)> {
    vec![
        ("verdict", serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()),
        ("analytic", r.analytic.to_string()),
        ("hyponormal", r.hyponormal.to_string()),
        ("min_eigenvalue", csv_float(r.min_eigenvalue)),
        ("normal_operator", r.normal_operator.normal.to_string()),
        ("k_hyponormal_up_to", r.k_hyponormality.passes_up_to().to_string()),
        ("commutator_rank", r.commutator_rank.to_string()),
        ("model_space_dim", r.model_space_dim.map(|d| d.to_string()).unwrap_or_default()),
        ("witnesses", r.witnesses.len().to_string()),
    ]
}

impl AnalyzeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,value\n");
        for (k, v) in summary_rows(&self.report) {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    /// The four Toeplitz/Hankel identities.
    IdentitySuite,
    /// `[T^*, T] = H_{Phi^*}^* (I - T_{K~} T_{K~}^*) H_{Phi^*}`.
    CommutatorFactorization,
    /// `Ran [T^*, T]` equals the analytic image of the model space.
    RangeIdentification,
    /// `rank [T^*, T] <= dim H(Q)`.
    FiniteRankBound,
}

impl Lemma {
    pub fn id(self) -> &'static str {
        match self {
            Lemma::IdentitySuite => "1.1",
            Lemma::CommutatorFactorization => "3.1",
            Lemma::RangeIdentification => "3.2",
            Lemma::FiniteRankBound => "3.3",
        }
    }

    fn measure(self) -> &'static str {
        match self {
            Lemma::IdentitySuite => "max-deviation",
            Lemma::CommutatorFactorization => "relative-frobenius",
            Lemma::RangeIdentification => "largest-angle",
            Lemma::FiniteRankBound => "commutator-rank",
        }
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1.1" => Ok(Lemma::IdentitySuite),
            "3.1" => Ok(Lemma::CommutatorFactorization),
            "3.2" => Ok(Lemma::RangeIdentification),
            "3.3" => Ok(Lemma::FiniteRankBound),
            other => Err(Error::UnknownId(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Catalog { id: String, c: C64 },
    Random { seed: u64, count: usize },
}

impl FromStr for InstanceSource {
    type Err = Error;

    /// `catalog:<id>` or `random:<seed>,<count>`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(id) = s.strip_prefix("catalog:") {
            return Ok(InstanceSource::Catalog { id: id.to_string(), c: catalog::DEFAULT_C });
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let (seed, count) =
                rest.split_once(',').ok_or_else(|| Error::Parse(format!("expected random:<seed>,<count>, got {s:?}")))?;
            let seed = seed.trim().parse().map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
            let count = count.trim().parse().map_err(|_| Error::Parse(format!("bad count {count:?}")))?;
            return Ok(InstanceSource::Random { seed, count });
        }
        Err(Error::Parse(format!("unknown instance source {s:?}")))
    }
}

impl std::fmt::Display for InstanceSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InstanceSource::Catalog { id, .. } => write!(f, "catalog:{id}"),
            InstanceSource::Random { seed, count } => write!(f, "random:{seed},{count}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub instance: String,
    pub measure: &'static str,
    pub value: f64,
    /// Compared dimensions: range/image for 3.2, rank/model space for 3.3.
    pub dims: Option<[usize; 2]>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub lemma: &'static str,
    pub source: String,
    pub config: RunConfig,
    pub rows: Vec<VerifyRow>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,measure,value,dim_a,dim_b,pass\n");
        for r in &self.rows {
            let (a, b) = r.dims.map(|[a, b]| (a.to_string(), b.to_string())).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{a},{b},{}", r.instance, r.measure, csv_float(r.value), r.pass);
        }
        out
    }
}

/// Identity-suite tolerance on the max entrywise deviation.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Two-path commutator agreement, relative Frobenius norm.
pub const FACTORIZATION_TOL: f64 = 1e-8;

enum Instance {
    Identity { name: String, phi: LaurentSymbol, psi: LaurentSymbol, theta: LaurentSymbol },
    Functional { name: String, phi: LaurentSymbol, q: PotapovProduct },
}

fn instances(lemma: Lemma, source: &InstanceSource, config: &RunConfig) -> Result<Vec<Instance>> {
    match source {
        InstanceSource::Catalog { id, c } => {
            let e = catalog::entry(id, *c, config.grid)?;
            let name = format!("catalog:{id}");
            if lemma == Lemma::IdentitySuite {
                let theta = e
                    .q
                    .as_ref()
                    .and_then(|q| q.as_laurent())
                    .unwrap_or_else(|| LaurentSymbol::monomial(1, identity(e.phi.n())));
                let psi = e.phi.analytic_part();
                return Ok(vec![Instance::Identity { name, phi: e.phi, psi, theta }]);
            }
            let q = e.q.ok_or_else(|| Error::Precondition(format!("{id} has no inner Q with Phi = Q Phi^*")))?;
            Ok(vec![Instance::Functional { name, phi: e.phi, q }])
        }
        InstanceSource::Random { seed, count } => {
            let mut g = Generator::new(*seed);
            Ok((0..*count)
                .map(|i| {
                    let name = format!("random:{seed}#{i}");
                    if lemma == Lemma::IdentitySuite {
                        let phi = g.small_laurent(3, 4);
                        let n = phi.n();
                        let d = g.gen_range(0..=4);
                        let psi = g.laurent(n, 0, d);
                        let m = g.gen_range(0..=2);
                        let theta = g.potapov(n, m, 0.0).as_laurent().expect("polynomial");
                        Instance::Identity { name, phi, psi, theta }
                    } else {
                        let inst = g.small_functional(3, 3);
                        Instance::Functional { name, phi: inst.phi, q: inst.q }
                    }
                })
                .collect())
        }
    }
}

fn run_instance(lemma: Lemma, inst: &Instance, config: &RunConfig) -> Result<VerifyRow> {
    let measure = lemma.measure();
    match (lemma, inst) {
        (Lemma::IdentitySuite, Instance::Identity { name, phi, psi, theta }) => {
            let value = identity_suite(phi, psi, theta, config.n_trunc)?.max_deviation();
            Ok(VerifyRow { instance: name.clone(), measure, value, dims: None, pass: value < IDENTITY_TOL })
        }
        (Lemma::CommutatorFactorization, Instance::Functional { name, phi, q }) => {
            let r = verify_commutator_factorization(phi, &AnalyticMultiplier::Potapov(q.clone()), config.grid)?;
            let value = r.relative_frobenius;
            Ok(VerifyRow { instance: name.clone(), measure, value, dims: None, pass: value < FACTORIZATION_TOL })
        }
        (Lemma::RangeIdentification, Instance::Functional { name, phi, q }) => {
            let r = verify_range_identification(phi, q, config.grid, config.tol_angle)?;
            Ok(VerifyRow {
                instance: name.clone(),
                measure,
                value: r.largest_angle,
                dims: Some([r.commutator_range_dim, r.image_dim]),
                pass: r.pass,
            })
        }
        (Lemma::FiniteRankBound, Instance::Functional { name, phi, q }) => {
            let r = verify_finite_rank_bound(phi, q, config.grid, config.tol_coeff)?;
            Ok(VerifyRow {
                instance: name.clone(),
                measure,
                value: r.commutator_rank as f64,
                dims: Some([r.commutator_rank, r.model_space_dim]),
                pass: r.holds,
            })
        }
        _ => unreachable!("instances are built per lemma"),
    }
}

pub fn verify(lemma: Lemma, source: &InstanceSource, config: &RunConfig) -> Result<VerifyReport> {
    config.validate()?;
    let list = instances(lemma, source, config)?;
    let rows = list.par_iter().map(|inst| run_instance(lemma, inst, config)).collect::<Result<Vec<_>>>()?;
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(VerifyReport { lemma: lemma.id(), source: source.to_string(), config: config.clone(), rows, all_pass })
}

// ---------------------------------------------------------------- catalog

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl ToString, found: impl ToString) -> Self {
        let (expected, found) = (expected.to_string(), found.to_string());
        let pass = expected == found;
        Self { name: name.into(), expected, found, pass }
    }

    fn below(name: impl Into<String>, bound: f64, value: f64) -> Self {
        Self { name: name.into(), expected: format!("<= {bound:e}"), found: format!("{value:e}"), pass: value <= bound }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Complex(#[serde(serialize_with = "serialize_complex")] pub C64);

#[derive(Clone, Debug, Serialize)]
pub struct CatalogResult {
    pub id: String,
    pub description: String,
    pub annotations: catalog::Annotations,
    /// Zeros of the inner factor `Q`, with multiplicity.
    pub q_zeros: Option<Vec<Complex>>,
    pub report: ClassificationReport,
    pub checks: Vec<Check>,
    pub all_match: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogReport {
    pub config: RunConfig,
    pub c: Complex,
    pub entries: Vec<CatalogResult>,
    pub all_match: bool,
}

impl CatalogReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,check,expected,found,pass\n");
        for e in &self.entries {
            for c in &e.checks {
                let _ = writeln!(out, "{},{},{},{},{}", e.id, c.name, c.expected, c.found, c.pass);
            }
        }
        out
    }
}

/// Entrywise tolerance for the fixed-point and rank-one commutator checks.
pub const EXACT_TOL: f64 = 1e-12;

fn check_entry(e: &CatalogEntry, cc: C64, config: &RunConfig) -> Result<CatalogResult> {
    let report = classify(&e.phi, e.q.as_ref(), &config.classify_options())?;
    let mut checks = Vec::new();
    let a = &e.annotations;
    if let Some(x) = a.hyponormal {
        checks.push(Check::new("hyponormal", x, report.hyponormal));
    }
    if let Some(x) = a.normal {
        checks.push(Check::new("normal", x, report.verdict == Verdict::Normal));
    }
    if let Some(x) = a.analytic {
        checks.push(Check::new("analytic", x, report.analytic));
    }
    if a.subnormal_by_construction == Some(true) {
        let evidence = matches!(report.verdict, Verdict::Normal | Verdict::Analytic | Verdict::SubnormalEvidence);
        checks.push(Check::new("subnormal-evidence", true, evidence));
    }
    if let Some(rank) = e.expected.commutator_rank {
        checks.push(Check::new("commutator-rank", rank, report.commutator_rank));
    }
    if let Some(coprime) = e.expected.coprime {
        let found = report.dichotomy.as_ref().and_then(|d| d.coprimality.as_ref()).map(|c| c.coprime);
        checks.push(Check::new("left-coprime", format!("{:?}", Some(coprime)), format!("{found:?}")));
    }
    for (target, expected) in &e.expected.witnesses {
        let name = match target {
            InjectivityTarget::ToeplitzAdjoint => "witness-toeplitz-adjoint",
            InjectivityTarget::HankelBar => "witness-hankel-bar",
        };
        let found = report.witnesses.iter().find(|w| w.target == *target).map(|w| w.flat().as_slice().to_vec());
        checks.push(Check::new(name, format!("{expected:?}"), format!("{:?}", found.unwrap_or_default())));
    }
    let comm = self_commutator(&e.phi, config.tol_coeff);
    if let Some(v) = &e.expected.fixed_point {
        let blocks = comm.support_blocks().max(v.len() / e.phi.n());
        let mut x = crate::CVector::zeros(e.phi.n() * blocks);
        x.rows_mut(0, v.len()).copy_from(v);
        let residual = (comm.embedded(blocks) * &x - &x).iter().map(|z| z.norm()).fold(0.0, f64::max);
        checks.push(Check::below("commutator-fixed-point", EXACT_TOL, residual));
    }
    if e.id == "scalar-czbar" {
        // [T^*, T] = (1 - |c|^2) e0 e0^* on a 4-block window.
        let mut expected = zeros(4, 4);
        expected[(0, 0)] = C64::new(1.0 - cc.norm_sqr(), 0.0);
        let deviation = max_abs(&(comm.embedded(4) - expected));
        checks.push(Check::below("rank-one-commutator", EXACT_TOL, deviation));
        if let Some(r) = report.functional_equation_residual {
            checks.push(Check::below("functional-equation-on-grid", 1e-12, r));
        }
    }
    let q_zeros = e.q.as_ref().map(|q| q.factors().iter().map(|f| Complex(f.alpha())).collect());
    let all_match = checks.iter().all(|c| c.pass);
    Ok(CatalogResult {
        id: e.id.clone(),
        description: e.description.clone(),
        annotations: e.annotations,
        q_zeros,
        report,
        checks,
        all_match,
    })
}

/// Classifies one catalog entry (or all of them) and compares the results
/// with the recorded ground truth. Entries run in parallel; the report keeps
/// catalog order.
pub fn run_catalog(id: Option<&str>, cc: C64, config: &RunConfig) -> Result<CatalogReport> {
    config.validate()?;
    let entries = match id {
        Some(id) => vec![catalog::entry(id, cc, config.grid)?],
        None => catalog::all(cc, config.grid)?,
    };
    let results = entries.par_iter().map(|e| check_entry(e, cc, config)).collect::<Result<Vec<_>>>()?;
    let all_match = results.iter().all(|r| r.all_match);
    Ok(CatalogReport { config: config.clone(), c: Complex(cc), entries: results, all_match })
}

// ---------------------------------------------------------------- gen

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// `Phi = G + Q G^*` with its `Q`.
    Functional,
    /// Random Laurent symbol.
    Laurent,
    /// Random Blaschke-Potapov product.
    Potapov,
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "functional" => Ok(GenKind::Functional),
            "laurent" => Ok(GenKind::Laurent),
            "potapov" => Ok(GenKind::Potapov),
            other => Err(Error::Parse(format!("unknown instance kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratedInstance {
    pub id: String,
    /// Symbol in the input file format.
    pub symbol: Option<serde_json::Value>,
    /// Potapov product in the input file format.
    pub potapov: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenReport {
    pub config: RunConfig,
    pub kind: GenKind,
    pub instances: Vec<GeneratedInstance>,
}

/// `count` instances drawn from `config.seed`.
pub fn generate(kind: GenKind, count: usize, config: &RunConfig) -> Result<GenReport> {
    config.validate()?;
    let value = |s: String| serde_json::from_str::<serde_json::Value>(&s).expect("valid json");
    let mut g = Generator::new(config.seed);
    let instances = (0..count)
        .map(|i| {
            let id = format!("{}#{i}", config.seed);
            match kind {
                GenKind::Functional => {
                    let inst = g.small_functional(3, 3);
                    GeneratedInstance {
                        id,
                        symbol: Some(value(symbol_to_json(&inst.phi))),
                        potapov: Some(value(potapov_to_json(&inst.q))),
                    }
                }
                GenKind::Laurent => {
                    GeneratedInstance { id, symbol: Some(value(symbol_to_json(&g.small_laurent(3, 4)))), potapov: None }
                }
                GenKind::Potapov => {
                    let n = g.gen_range(1..=3);
                    let m = g.gen_range(0..=4);
                    GeneratedInstance { id, symbol: None, potapov: Some(value(potapov_to_json(&g.potapov(n, m, 0.8)))) }
                }
            }
        })
        .collect();
    Ok(GenReport { config: config.clone(), kind, instances })
}
