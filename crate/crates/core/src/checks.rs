//! Named verification procedures, each producing a [`CheckReport`].
//!
//! A check compares estimates (Monte Carlo or quadrature) with references
//! (closed forms or independent estimates). A comparison passes when
//! `|estimate − reference| ≤ tol_sigma·σ + allowance`, where `σ` is the
//! combined standard error and `allowance` the deterministic error budget.
//! Its discrepancy is reported as `gap / (σ + allowance/tol_sigma)`, so that a
//! check passes exactly when every discrepancy is at most `tol_sigma`, every
//! recorded quadrature error is at most `quad_tol` and every recorded property
//! holds.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::absnorm::AbsoluteNorm;
use crate::embed::{
    case1_lhs, case1_reference, case2_identity, case2_mixed_moment, direct_sum_norm, gaussian_norm_moment,
    DirectSumSpace, EmbeddingModel, Euclidean, GaussianProcessSpec, LqSpace,
};
use crate::mellin::{mellin_complex, nested_mellin, NestedIntegrand, NestedNode, NestedRule};
use crate::quad::DeQuadrature;
use crate::specfun::{self, duplication_residual, gaussian_moment, gaussian_moment_duplicated};
use crate::stochastic::{
    build_existence_h, build_h, h_moment, ks_two_sample, sample_gaussian, weighted_estimates, MCEstimate,
    PositiveStable, SampleStream, SymmetricStable, SymmetricStableProduct,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_TOL_SIGMA: f64 = 4.0;
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol_sigma")]
    pub tol_sigma: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_tol_sigma() -> f64 {
    DEFAULT_TOL_SIGMA
}

fn default_quad_tol() -> f64 {
    DEFAULT_QUAD_TOL
}

impl CheckSpec {
    /// A spec with default parameters, sample size and tolerances.
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            samples: DEFAULT_SAMPLES,
            tol_sigma: DEFAULT_TOL_SIGMA,
            quad_tol: DEFAULT_QUAD_TOL,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    pub value: Complex64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub label: String,
    pub value: Complex64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub gap: f64,
    /// Combined standard error of both sides.
    pub sigma: f64,
    /// Deterministic error budget (quadrature, closed-form rounding).
    pub allowance: f64,
    pub discrepancy_sigma: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Property {
    pub label: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    pub estimates: Vec<Estimate>,
    pub references: Vec<Reference>,
    pub comparisons: Vec<Comparison>,
    pub properties: Vec<Property>,
    pub max_discrepancy_sigma: f64,
    pub max_quad_error: f64,
    pub seed: u64,
    pub samples: usize,
    pub tol_sigma: f64,
    pub quad_tol: f64,
    /// Wall time; `None` when timing is omitted for reproducible output.
    pub runtime_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// The error that stopped the check, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Param(format!("bad report: {e}")))
    }
}

/// Accumulates the contents of a report while a check runs.
pub struct Ctx {
    spec: CheckSpec,
    params: BTreeMap<String, Value>,
    stream: SampleStream,
    estimates: Vec<Estimate>,
    references: Vec<Reference>,
    comparisons: Vec<Comparison>,
    properties: Vec<Property>,
    max_quad_error: f64,
    notes: Vec<String>,
}

/// Keeps discrepancies finite so reports stay valid JSON.
const DISCREPANCY_CAP: f64 = 1e300;

impl Ctx {
    fn new(spec: &CheckSpec, params: BTreeMap<String, Value>) -> Self {
        Self {
            stream: SampleStream::new(spec.seed).named(&spec.name),
            spec: spec.clone(),
            params,
            estimates: Vec::new(),
            references: Vec::new(),
            comparisons: Vec::new(),
            properties: Vec::new(),
            max_quad_error: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn samples(&self) -> usize {
        self.spec.samples
    }

    pub fn quad_tol(&self) -> f64 {
        self.spec.quad_tol
    }

    /// The stream for one labelled part of the check.
    pub fn stream(&self, label: &str) -> SampleStream {
        self.stream.named(label)
    }

    pub fn estimate(&mut self, label: &str, value: Complex64, stderr: f64) {
        self.estimates.push(Estimate { label: label.into(), value, stderr });
    }

    pub fn reference(&mut self, label: &str, value: Complex64, provenance: Provenance) {
        self.references.push(Reference { label: label.into(), value, provenance });
    }

    /// Records both sides and the comparison `|a − b| ≤ tol_sigma·σ + allowance`.
    #[allow(clippy::too_many_arguments)]
    pub fn compare(
        &mut self,
        label: &str,
        estimate: Complex64,
        stderr: f64,
        reference: Complex64,
        reference_stderr: f64,
        provenance: Provenance,
        allowance: f64,
    ) {
        self.estimate(label, estimate, stderr);
        if reference_stderr > 0.0 {
            self.estimate(&format!("{label} (reference)"), reference, reference_stderr);
        }
        self.reference(label, reference, provenance);
        let gap = (estimate - reference).norm();
        let sigma = stderr.hypot(reference_stderr);
        let tol = self.spec.tol_sigma;
        let denom = sigma + allowance / tol;
        let discrepancy_sigma = if gap == 0.0 {
            0.0
        } else if gap.is_nan() {
            DISCREPANCY_CAP
        } else {
            (gap / denom).min(DISCREPANCY_CAP)
        };
        let passed = gap <= tol * sigma + allowance;
        self.comparisons.push(Comparison { label: label.into(), gap, sigma, allowance, discrepancy_sigma, passed });
    }

    /// Monte Carlo estimate against an exact value.
    pub fn compare_mc(&mut self, label: &str, est: &MCEstimate, reference: Complex64) {
        self.compare(label, est.mean, est.stderr, reference, 0.0, Provenance::ClosedForm, 0.0);
    }

    /// Deterministic value against an exact value, to relative tolerance `rel`.
    pub fn compare_rel(&mut self, label: &str, value: Complex64, reference: Complex64, provenance: Provenance, rel: f64) {
        let allowance = rel * reference.norm().max(f64::MIN_POSITIVE);
        self.compare(label, value, 0.0, reference, 0.0, provenance, allowance);
    }

    pub fn quad_error(&mut self, err: f64) {
        self.max_quad_error = self.max_quad_error.max(err);
    }

    pub fn property(&mut self, label: &str, holds: bool) {
        self.properties.push(Property { label: label.into(), holds });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.params[key].as_f64().ok_or_else(|| Error::Param(format!("{key} must be a number")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.params[key]
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| Error::Param(format!("{key} must be a nonnegative integer")))
    }

    fn str(&self, key: &str) -> Result<String> {
        self.params[key].as_str().map(str::to_owned).ok_or_else(|| Error::Param(format!("{key} must be a string")))
    }

    fn f64s(&self, key: &str) -> Result<Vec<f64>> {
        let bad = || Error::Param(format!("{key} must be a list of numbers"));
        self.params[key].as_array().ok_or_else(bad)?.iter().map(|v| v.as_f64().ok_or_else(bad)).collect()
    }

    /// A list of complex numbers, each a number or `[re, im]`.
    fn complexes(&self, key: &str) -> Result<Vec<Complex64>> {
        let bad = || Error::Param(format!("{key} must be a list of numbers or [re, im] pairs"));
        self.params[key].as_array().ok_or_else(bad)?.iter().map(|v| complex_value(v).ok_or_else(bad)).collect()
    }

    /// A list of equal-length numeric tuples.
    fn tuples(&self, key: &str, len: usize) -> Result<Vec<Vec<f64>>> {
        let bad = || Error::Param(format!("{key} must be a list of {len}-element numeric lists"));
        self.params[key]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|t| {
                let t = t.as_array().filter(|t| t.len() == len).ok_or_else(bad)?;
                t.iter().map(|v| v.as_f64().ok_or_else(bad)).collect()
            })
            .collect()
    }

    fn finish(self, status: Option<Status>, runtime_ms: u64, cause: Option<String>) -> CheckReport {
        let max_discrepancy_sigma = self.comparisons.iter().map(|c| c.discrepancy_sigma).fold(0.0, f64::max);
        let ok = cause.is_none()
            && self.comparisons.iter().all(|c| c.passed)
            && self.properties.iter().all(|p| p.holds)
            && self.max_quad_error <= self.spec.quad_tol;
        let status = status.unwrap_or(if ok { Status::Pass } else { Status::Fail });
        CheckReport {
            schema: SCHEMA_VERSION,
            name: self.spec.name.clone(),
            params: self.params,
            status,
            estimates: self.estimates,
            references: self.references,
            comparisons: self.comparisons,
            properties: self.properties,
            max_discrepancy_sigma,
            max_quad_error: self.max_quad_error,
            seed: self.spec.seed,
            samples: self.spec.samples,
            tol_sigma: self.spec.tol_sigma,
            quad_tol: self.spec.quad_tol,
            runtime_ms: Some(runtime_ms),
            notes: self.notes,
            cause,
        }
    }
}

fn complex_value(v: &Value) -> Option<Complex64> {
    if let Some(x) = v.as_f64() {
        return Some(c(x));
    }
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    Some(Complex64::new(a[0].as_f64()?, a[1].as_f64()?))
}

/// One documented parameter of a check.
#[derive(Debug, Clone)]
pub struct ParamInfo {
    pub key: &'static str,
    pub default: Value,
    pub doc: &'static str,
}

/// A registered check.
pub struct CheckInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: fn() -> Vec<ParamInfo>,
    run: fn(&mut Ctx) -> Result<()>,
}

fn param(key: &'static str, default: Value, doc: &'static str) -> ParamInfo {
    ParamInfo { key, default, doc }
}

/// All checks, sorted by name.
pub fn registry() -> &'static [CheckInfo] {
    &REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static CheckInfo> {
    REGISTRY.iter().find(|c| c.name == name)
}

pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.name).collect()
}

static REGISTRY: [CheckInfo; 13] = [
    CheckInfo {
        name: "check-absolute-prop",
        summary: "∫ t^{-z-1} ‖x + t y‖^{w+z} dt = F_N(w,z) ‖x‖^w ‖y‖^z on direct sums, by quadrature",
        params: absolute_params,
        run: check_absolute_prop,
    },
    CheckInfo {
        name: "check-continuation",
        summary: "regularized continuation of M_{p,N}/M_{p,2} against direct quadrature and Beta closed forms",
        params: continuation_params,
        run: check_continuation,
    },
    CheckInfo {
        name: "check-duplication",
        summary: "duplication formula residual and agreement of the two closed forms of G",
        params: duplication_params,
        run: check_duplication,
    },
    CheckInfo {
        name: "check-gaussian-ratio-lemma",
        summary: "E|γ₁|^w (γ₁²+…+γ_m²)^{z/2} = G(w) G(w+z+m−1) / G(w+m−1)",
        params: ratio_lemma_params,
        run: check_gaussian_ratio_lemma,
    },
    CheckInfo {
        name: "check-independent-lemma",
        summary: "Mellin transforms of E(f²+t²g²)^{(w+z)/2} and of the symmetrized E|f ± t g|^{w+z}",
        params: independent_params,
        run: check_independent_lemma,
    },
    CheckInfo {
        name: "check-main-example-neg",
        summary: "Gaussian embedding identity E(Σ T(x_j + t y_j)²)^{p/2} = E‖ξ_X + t ξ_Y‖^p for p < 0",
        params: main_neg_params,
        run: check_main_example_neg,
    },
    CheckInfo {
        name: "check-main-example-pos",
        summary: "standard isometry identity E|1 + t h|^p = (1 + t^r)^{p/r} for p > 0",
        params: main_pos_params,
        run: check_main_example_pos,
    },
    CheckInfo {
        name: "check-mellinh",
        summary: "Mellin transform of E|1 + t h|^p − max{1,t}^p against its closed form",
        params: mellinh_params,
        run: check_mellinh,
    },
    CheckInfo {
        name: "check-moment-samplers",
        summary: "moments, Laplace transforms and characteristic functions of the samplers",
        params: samplers_params,
        run: check_moment_samplers,
    },
    CheckInfo {
        name: "check-p-neg-prop",
        summary: "mixed moment of a Gaussian embedding against (M_{p,N}/M_{p,2}) E‖ξ‖^{p−z} E‖η‖^z",
        params: p_neg_params,
        run: check_p_neg_prop,
    },
    CheckInfo {
        name: "check-p-pos-prop",
        summary: "mixed moment ∫|Tx|^w |Ty|^z of a p-stable embedding of ℓ_r^2",
        params: p_pos_params,
        run: check_p_pos_prop,
    },
    CheckInfo {
        name: "check-second-derivative",
        summary: "|M_{p,ℓ₃}(r)/M_{p,2}(r)| → 0 as r → 2, with the ℓ₂ control",
        params: second_derivative_params,
        run: check_second_derivative,
    },
    CheckInfo {
        name: "check-symmetrize",
        summary: "½∫ t^{-z-1}(|1+t|^{w+z} + |1−t|^{w+z}) dt = G(w+z) F₂(w,z) / (G(w) G(z))",
        params: symmetrize_params,
        run: check_symmetrize,
    },
];

/// Fills in defaults and rejects unknown keys.
pub fn resolve_params(info: &CheckInfo, given: &BTreeMap<String, Value>) -> Result<BTreeMap<String, Value>> {
    let schema = (info.params)();
    for key in given.keys() {
        if !schema.iter().any(|p| p.key == key) {
            return Err(Error::Param(format!("{} has no parameter {key:?}", info.name)));
        }
    }
    Ok(schema.into_iter().map(|p| (p.key.to_string(), given.get(p.key).cloned().unwrap_or(p.default))).collect())
}

/// Runs one check. Only invalid names or parameters are returned as errors;
/// failures inside the check become a failed report carrying the cause.
pub fn run_check(spec: &CheckSpec) -> Result<CheckReport> {
    let info = lookup(&spec.name).ok_or_else(|| Error::Param(format!("unknown check {:?}", spec.name)))?;
    if !(spec.tol_sigma > 0.0 && spec.quad_tol > 0.0) {
        return Err(Error::Param("tol_sigma and quad_tol must be positive".into()));
    }
    let params = resolve_params(info, &spec.params)?;
    let start = Instant::now();
    let mut ctx = Ctx::new(spec, params);
    let outcome = (info.run)(&mut ctx);
    let ms = start.elapsed().as_millis() as u64;
    match outcome {
        Err(Error::Param(msg)) => Err(Error::Param(format!("{}: {msg}", spec.name))),
        Err(e) => Ok(ctx.finish(Some(Status::Fail), ms, Some(e.to_string()))),
        Ok(()) if ctx.comparisons.is_empty() && ctx.properties.is_empty() => {
            Ok(ctx.finish(Some(Status::Skipped), ms, None))
        }
        Ok(()) => Ok(ctx.finish(None, ms, None)),
    }
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

// ---------------------------------------------------------------- duplication

fn duplication_params() -> Vec<ParamInfo> {
    vec![
        param("real_points", json!([0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]), "real grid (residual < 1e-12)"),
        param("complex_points", json!([[3.7, 1.2], [0.5, 2.0], [-1.3, 0.7], [2.0, -3.0]]), "complex grid (residual < 1e-10)"),
    ]
}

fn check_duplication(ctx: &mut Ctx) -> Result<()> {
    let real = ctx.f64s("real_points")?;
    let complex = ctx.complexes("complex_points")?;
    let grids = real.into_iter().map(|x| (c(x), 1e-12)).chain(complex.into_iter().map(|z| (z, 1e-10)));
    for (z, tol) in grids {
        let res = duplication_residual(z)?;
        ctx.compare(&format!("duplication residual at {}", fmt_c(z)), c(res), 0.0, c(0.0), 0.0, Provenance::ClosedForm, tol);
        let g = gaussian_moment(z)?;
        if let Some(d) = gaussian_moment_duplicated(z) {
            ctx.compare_rel(&format!("G({}) two forms", fmt_c(z)), d, g, Provenance::ClosedForm, 1e-10);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- samplers

fn samplers_params() -> Vec<ParamInfo> {
    vec![
        param("positive", json!([0.5, 0.8]), "indices of positive stable laws"),
        param("symmetric", json!([1.0, 1.3, 1.7]), "indices of symmetric stable laws"),
        param("t", json!([0.1, 0.5, 1.0, 2.0, 5.0]), "transform arguments"),
        param("ks_samples", json!(100_000), "sample size of the product-form KS test"),
    ]
}

fn check_moment_samplers(ctx: &mut Ctx) -> Result<()> {
    let ts = ctx.f64s("t")?;
    let n = ctx.samples();
    let ks_n = ctx.usize("ks_samples")?.min(n.max(1));

    let gz = [-0.4, 1.0, 2.0];
    let est = weighted_estimates(&ctx.stream("gaussian"), n, gz.len(), false, |rng, out| {
        let g = sample_gaussian(rng).abs();
        for (o, z) in out.iter_mut().zip(gz) {
            *o = c(g.powf(z));
        }
        1.0
    })?;
    for (e, z) in est.iter().zip(gz) {
        ctx.compare_mc(&format!("E|γ|^{z}"), e, gaussian_moment(c(z))?);
    }

    for p in ctx.f64s("positive")? {
        let law = PositiveStable::new(p)?;
        let zs = [-1.0, -0.5, 0.2 * p];
        let k = zs.len();
        let est = weighted_estimates(&ctx.stream(&format!("positive {p}")), n, k + ts.len(), false, |rng, out| {
            let ln = law.sample_ln(rng);
            for (o, z) in out.iter_mut().zip(zs) {
                *o = c((z * ln).exp());
            }
            for (o, t) in out[k..].iter_mut().zip(&ts) {
                *o = c((-t * ln.exp()).exp());
            }
            1.0
        })?;
        for (e, z) in est.iter().zip(zs) {
            ctx.compare_mc(&format!("E φ_{p}^{z}"), e, specfun::phi(p, c(z))?);
        }
        for (e, t) in est[k..].iter().zip(&ts) {
            ctx.compare_mc(&format!("E exp(-{t} φ_{p})"), e, c((-t.powf(p)).exp()));
        }
    }

    for p in ctx.f64s("symmetric")? {
        let law = SymmetricStable::new(p)?;
        let zs = [-0.3, 0.2, 0.4 * p];
        let k = zs.len();
        let est = weighted_estimates(&ctx.stream(&format!("symmetric {p}")), n, k + ts.len(), false, |rng, out| {
            let (ln, sign) = law.sample_ln(rng);
            for (o, z) in out.iter_mut().zip(zs) {
                *o = c((z * ln).exp());
            }
            let x = sign * ln.exp();
            for (o, t) in out[k..].iter_mut().zip(&ts) {
                *o = c((t * x).cos());
            }
            1.0
        })?;
        for (e, z) in est.iter().zip(zs) {
            ctx.compare_mc(&format!("E|ψ_{p}|^{z}"), e, specfun::psi(p, c(z))?);
        }
        for (e, t) in est[k..].iter().zip(&ts) {
            ctx.compare_mc(&format!("E cos({t} ψ_{p})"), e, c((-t.powf(p)).exp()));
        }
        let mut rng = ctx.stream(&format!("ks direct {p}")).rng();
        let direct: Vec<f64> = (0..ks_n).map(|_| law.sample(&mut rng)).collect();
        let product_law = SymmetricStableProduct::new(p)?;
        let mut rng = ctx.stream(&format!("ks product {p}")).rng();
        let product: Vec<f64> = (0..ks_n).map(|_| product_law.sample(&mut rng)).collect();
        let ks = ks_two_sample(&direct, &product)?;
        ctx.estimate(&format!("KS statistic, product vs direct ψ_{p}"), c(ks.statistic), 0.0);
        ctx.reference(&format!("KS 1% critical value, ψ_{p}"), c(ks.critical), Provenance::ClosedForm);
        ctx.property(&format!("product-form ψ_{p} KS-indistinguishable at 1%"), ks.passes());
    }
    Ok(())
}

// ---------------------------------------------------------------- Gaussian ratio lemma

fn ratio_lemma_params() -> Vec<ParamInfo> {
    vec![param("points", json!([[2, 0, 2], [2, 1, -1], [3, 0.5, -0.5], [4, -0.3, -1.5]]), "(m, w, z) triples")]
}

/// `G(w) G(w+z+m−1) / G(w+m−1)`.
pub fn gaussian_ratio_closed_form(m: usize, w: f64, z: f64) -> Result<f64> {
    let g = |x: f64| gaussian_moment(c(x)).map(|v| v.re);
    let a = m as f64 - 1.0;
    Ok(g(w)? * g(w + z + a)? / g(w + a)?)
}

fn check_gaussian_ratio_lemma(ctx: &mut Ctx) -> Result<()> {
    for t in ctx.tuples("points", 3)? {
        let (m, w, z) = (t[0], t[1], t[2]);
        if !(m >= 1.0 && m.fract() == 0.0 && w > -1.0 && w + z + m - 1.0 > -1.0) {
            return Err(Error::Param(format!("need integer m ≥ 1, w > −1, w + z + m > 0; got ({m}, {w}, {z})")));
        }
        let m = m as usize;
        let label = format!("(m, w, z) = ({m}, {w}, {z})");
        let est = weighted_estimates(&ctx.stream(&label), ctx.samples(), 1, false, |rng, out| {
            let g: Vec<f64> = (0..m).map(|_| sample_gaussian(rng)).collect();
            let ss: f64 = g.iter().map(|x| x * x).sum();
            out[0] = c((w * g[0].abs().ln() + 0.5 * z * ss.ln()).exp());
            1.0
        })?;
        ctx.compare_mc(&label, &est[0], c(gaussian_ratio_closed_form(m, w, z)?));
    }
    Ok(())
}

// ---------------------------------------------------------------- symmetrize

fn symmetrize_params() -> Vec<ParamInfo> {
    vec![param("points", json!([[-0.3, -0.4], [-0.45, -0.5], [-0.35, -0.35], [-0.1, -0.6]]), "(w, z) pairs")]
}

/// `Q(w,z) = G(w+z) F₂(w,z) / (G(w) G(z))`.
pub fn symmetrize_closed_form(w: Complex64, z: Complex64) -> Result<Complex64> {
    let f2 = AbsoluteNorm::Lq(2.0).f(w, z, DEFAULT_QUAD_TOL)?.value;
    Ok(gaussian_moment(w + z)? * f2 / (gaussian_moment(w)? * gaussian_moment(z)?))
}

/// `½∫₀^∞ t^{-z-1}(|1+t|^{w+z} + |1−t|^{w+z}) dt`, split at `t = 1` and
/// taken in `x = ±ln t` on each side, so that the interior singularity
/// `|1−t|^{w+z}` becomes an endpoint singularity of each half.
pub fn symmetrize_quadrature(w: Complex64, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let a = w + z;
    let q = DeQuadrature::with_tolerance(tol);
    // t = e^{±x}: t^{-z} (|1+t|^a + |1−t|^a), with |1 − t| = |expm1(±x)|
    let side = |sign: f64| {
        q.half_line(|x| {
            let lx = sign * x;
            // ln(1 + t) and ln|1 − t| without overflow
            let l_plus = lx.max(0.0) + (-lx.abs()).exp().ln_1p();
            let l_minus = lx.max(0.0) + (-(-lx.abs()).exp_m1()).ln();
            (-z * lx + a * l_plus).exp() + (-z * lx + a * l_minus).exp()
        })
    };
    let (lo, hi) = (side(-1.0)?, side(1.0)?);
    Ok(((lo.value + hi.value) * 0.5, 0.5 * (lo.error + hi.error)))
}

fn check_symmetrize(ctx: &mut Ctx) -> Result<()> {
    for t in ctx.tuples("points", 2)? {
        let (w, z) = (c(t[0]), c(t[1]));
        if !(w.re < 0.0 && z.re < 0.0 && (w + z).re > -1.0) {
            return Err(Error::Param(format!("need w, z < 0 < w + z + 1, got ({}, {})", w.re, z.re)));
        }
        let (q, err) = symmetrize_quadrature(w, z, ctx.quad_tol())?;
        ctx.quad_error(err);
        let label = format!("Q({}, {})", t[0], t[1]);
        let tol = if (w + z).re < -0.9 { 1e-5 } else { 1e-6 };
        ctx.compare_rel(&label, q, symmetrize_closed_form(w, z)?, Provenance::Quadrature, tol);
        if w == z {
            let (swapped, _) = symmetrize_quadrature(z, w, ctx.quad_tol())?;
            ctx.property(&format!("{label} symmetric evaluation"), swapped == q);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- independent lemma

fn independent_params() -> Vec<ParamInfo> {
    vec![
        param("points", json!([[-0.3, -0.4], [-0.2, -0.25], [-0.45, -0.35]]), "(w, z) pairs"),
        param("pairs", json!(["constants", "independent", "dependent"]), "(f, g): constants (1.3, 0.7), (|γ₁|, |γ₂|) or (|γ|, |γ+1|)"),
    ]
}

#[derive(Clone, Copy)]
enum Pair {
    Constants,
    Independent,
    Dependent,
}

impl Pair {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "constants" => Ok(Pair::Constants),
            "independent" => Ok(Pair::Independent),
            "dependent" => Ok(Pair::Dependent),
            _ => Err(Error::Param(format!("unknown pair {s:?}"))),
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> (f64, f64) {
        match self {
            Pair::Constants => (1.3, 0.7),
            Pair::Independent => (sample_gaussian(rng).abs(), sample_gaussian(rng).abs()),
            Pair::Dependent => {
                let g = sample_gaussian(rng);
                (g.abs(), (g + 1.0).abs())
            }
        }
    }
}

fn nested_rule() -> NestedRule {
    NestedRule::new(1.0 / 16.0, -4.0, 4.0)
}

/// Wider tails than [`nested_rule`]: the per-sample integrands decay only
/// like `s^w` at infinity and blow up like `|1 − s|^{w+z}` at the split point.
fn lemma_rule() -> NestedRule {
    NestedRule::new(1.0 / 8.0, -5.0, 5.0)
}

fn check_independent_lemma(ctx: &mut Ctx) -> Result<()> {
    let points = ctx.tuples("points", 2)?;
    let pairs = ctx.params["pairs"]
        .as_array()
        .ok_or_else(|| Error::Param("pairs must be a list".into()))?
        .iter()
        .map(|v| Pair::parse(v.as_str().unwrap_or("")).map(|p| (v.as_str().unwrap_or("").to_string(), p)))
        .collect::<Result<Vec<_>>>()?;
    let rule = lemma_rule();
    for (name, pair) in pairs {
        let n = if matches!(pair, Pair::Constants) { 1 } else { ctx.samples() };
        for t in &points {
            let (w, z) = (t[0], t[1]);
            if !(w < 0.0 && z < 0.0 && w + z > -1.0) {
                return Err(Error::Param(format!("need w, z < 0 < w + z + 1, got ({w}, {z})")));
            }
            let s = w + z;
            let zc = [c(z)];
            let label = format!("{name} (w, z) = ({w}, {z})");
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| (pair.sample(rng), 1.0);
            let zero = |_: Complex64, _: &(f64, f64)| c(0.0);
            // the kink or singularity of each sample sits at t = f/g
            let scale = |d: &(f64, f64)| d.1 / d.0;
            let quadratic = NestedIntegrand {
                sample,
                // with t g = s f: (f² + t² g²) = f²(1 + s²)
                family: |x: &NestedNode, d: &(f64, f64)| (s * d.0.ln() + 0.5 * s * x.s.mul_add(x.s, 1.0).ln()).exp(),
                extra: zero,
                scale,
                weighted: false,
            };
            let lhs0 = nested_mellin(&quadratic, &zc, n, &ctx.stream(&format!("{label} lhs0")), &rule)?[0];
            let symmetric = NestedIntegrand {
                sample,
                // |f ± t g| = f |1 ± s|, with |1 − s| = |expm1(ln s)|
                family: |x: &NestedNode, d: &(f64, f64)| {
                    let ln_f = d.0.ln();
                    0.5 * ((s * (ln_f + x.s.ln_1p())).exp() + (s * (ln_f + x.ln_s.exp_m1().abs().ln())).exp())
                },
                extra: zero,
                scale,
                weighted: false,
            };
            let lhs1 = nested_mellin(&symmetric, &zc, n, &ctx.stream(&format!("{label} lhs1")), &rule)?[0];
            let mixed = weighted_estimates(&ctx.stream(&format!("{label} rhs")), n, 1, false, |rng, out| {
                let (f, g) = pair.sample(rng);
                out[0] = c((w * f.ln() + z * g.ln()).exp());
                1.0
            })?[0];
            let f2 = AbsoluteNorm::Lq(2.0).f(c(w), c(z), ctx.quad_tol())?.value;
            let q = symmetrize_closed_form(c(w), c(z))?;
            let allow = |quad: f64| quad + 1e-6 * f2.norm();
            ctx.compare(
                &format!("{label}: quadratic form"),
                lhs0.value,
                lhs0.stderr,
                f2 * mixed.mean,
                f2.norm() * mixed.stderr,
                Provenance::Mc,
                allow(lhs0.quad_error),
            );
            ctx.compare(
                &format!("{label}: symmetrized"),
                lhs1.value,
                lhs1.stderr,
                q * mixed.mean,
                q.norm() * mixed.stderr,
                Provenance::Mc,
                allow(lhs1.quad_error),
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- Mellin transform of h

fn mellinh_params() -> Vec<ParamInfo> {
    vec![
        param("p", json!(0.5), "exponent, 0 < p"),
        param("q", json!(1.5), "stable index of h"),
        param("r", json!(2.0), "outer exponent"),
        param("z", json!([0.25, [0.25, 0.5], 0.4]), "evaluation points"),
        param("h", json!("build"), "build: h(1, p, q, r); two: h ≡ 2 with a quadrature reference"),
    ]
}

/// `½(|1+u|^p + |1−u|^p) − max{1,u}^p` without cancellation.
fn symmetrized_family(p: f64, u: f64) -> f64 {
    let pair = |v: f64| 0.5 * ((p * v.ln_1p()).exp_m1() + (p * (-v).ln_1p()).exp_m1());
    if u <= 1.0 {
        pair(u)
    } else {
        u.powf(p) * pair(1.0 / u)
    }
}

/// `G(p) M_{p,2}(z) H(z) / (G(p−z) G(z)) + p/(z(p−z))`.
pub fn mellinh_closed_form(p: f64, hz: Complex64, z: Complex64) -> Result<Complex64> {
    let m2 = AbsoluteNorm::Lq(2.0).m_p(p, z, DEFAULT_QUAD_TOL)?.value;
    let g = gaussian_moment;
    Ok(g(c(p))? * m2 * hz / (g(c(p) - z)? * g(z)?) + p / (z * (c(p) - z)))
}

fn check_mellinh(ctx: &mut Ctx) -> Result<()> {
    let (p, q, r) = (ctx.f64("p")?, ctx.f64("q")?, ctx.f64("r")?);
    let zs = ctx.complexes("z")?;
    let variant = ctx.str("h")?;
    let h = match variant.as_str() {
        "build" => build_h(1, p, q, r)?,
        "two" => build_existence_h(1.0)?,
        other => return Err(Error::Param(format!("unknown h variant {other:?}"))),
    };
    for z in &zs {
        if !(z.re > -1.0 && z.re < (p + 1.0).min(2.0)) || z.norm() < 1e-6 || (z - p).norm() < 1e-6 {
            return Err(Error::Param(format!("z = {} must lie in (−1, p+1) away from 0 and p", fmt_c(*z))));
        }
        if !(z.re > 0.0 && z.re < p) {
            ctx.note(format!("z = {} lies outside (0, p), the endpoint variant's strip", fmt_c(*z)));
        }
    }
    let integrand = NestedIntegrand {
        sample: |rng: &mut rand_chacha::ChaCha8Rng| {
            let d = h.sample(rng);
            (d, d.weight())
        },
        family: |x: &NestedNode, _: &crate::stochastic::Draw| symmetrized_family(p, x.s),
        // ∫ t^{-z-1}(max{1,t|h|}^p − max{1,t}^p) dt = (1 − |h|^z) p/(z(p−z))
        extra: |z: Complex64, d: &crate::stochastic::Draw| (c(1.0) - d.abs_pow(z)) * p / (z * (c(p) - z)),
        scale: |d: &crate::stochastic::Draw| d.ln_abs.exp(),
        weighted: h.is_weighted(),
    };
    let n = if variant == "two" { 1 } else { ctx.samples() };
    let lhs = nested_mellin(&integrand, &zs, n, &ctx.stream("lhs"), &nested_rule())?;
    for (z, l) in zs.iter().zip(&lhs) {
        let label = format!("z = {}", fmt_c(*z));
        let (reference, provenance) = if variant == "two" {
            let f = |t: f64| (1.0 + 2.0 * t).powf(p) - t.max(1.0).powf(p);
            let m = mellin_complex(|t| c(f(t)), *z, ctx.quad_tol())?;
            ctx.quad_error(m.quad_error);
            (m.value, Provenance::Quadrature)
        } else {
            (mellinh_closed_form(p, h_moment(1, p, r, *z)?, *z)?, Provenance::ClosedForm)
        };
        ctx.compare(&label, l.value, l.stderr, reference, 0.0, provenance, l.quad_error + 1e-6 * reference.norm());
    }
    Ok(())
}

// ---------------------------------------------------------------- absolute norms on direct sums

fn absolute_params() -> Vec<ParamInfo> {
    vec![param(
        "cases",
        json!([
            {"space": "l2:2+lq:1.5:2@r:2", "x": [1.0, 0.0], "y": [0.0, 1.0], "w": -1.0, "z": -1.0},
            {"space": "l2:2+lq:1.5:2@r:2", "x": [2.0, 0.0], "y": [0.0, 1.0], "w": -1.0, "z": -1.0},
            {"space": "l2:2+lq:1.5:2@r:1.5", "x": [0.6, 0.8], "y": [1.0, 1.0], "w": -0.3, "z": -0.8},
            {"space": "l2:2+lq:1.5:2@linf", "x": [1.0, 1.0], "y": [0.5, -1.0], "w": -0.5, "z": -0.7},
            {"space": "l2:1+lq:1.2:3@custom:mean-l2-l4", "x": [1.5], "y": [1.0, 0.0, 2.0], "w": -0.4, "z": -0.6},
            {"space": "l2:2+lq:1.5:2@custom:max-l4-skew-l2", "x": [0.0, 1.0], "y": [1.0, 0.5], "w": -0.7, "z": -0.2},
            {"space": "l2:2+lq:1.5:2@r:2", "x": [1.0, 0.0], "y": [1.0, 0.0], "w": [-0.5, 0.3], "z": [-0.6, -0.2]}
        ]),
        "direct sum, x ∈ X, y ∈ Y and exponents with Re w, Re z < 0",
    )]
}

fn check_absolute_prop(ctx: &mut Ctx) -> Result<()> {
    let cases = ctx.params["cases"].as_array().cloned().ok_or_else(|| Error::Param("cases must be a list".into()))?;
    for (i, case) in cases.iter().enumerate() {
        let get = |k: &str| case.get(k).ok_or_else(|| Error::Param(format!("case {i} lacks {k:?}")));
        let space = DirectSumSpace::parse(get("space")?.as_str().ok_or_else(|| Error::Param("space must be a string".into()))?)?;
        let vec_of = |k: &str| -> Result<Vec<f64>> {
            get(k)?
                .as_array()
                .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                .ok_or_else(|| Error::Param(format!("{k} must be a numeric list")))
        };
        let (x, y) = (vec_of("x")?, vec_of("y")?);
        let bad = || Error::Param(format!("case {i}: w and z must be numbers or [re, im]"));
        let w = complex_value(get("w")?).ok_or_else(bad)?;
        let z = complex_value(get("z")?).ok_or_else(bad)?;
        if !(w.re < 0.0 && z.re < 0.0) {
            return Err(Error::Param(format!("case {i}: need Re w, Re z < 0")));
        }
        let nx = direct_sum_norm(&space, &x, &vec![0.0; space.n])?;
        let ny = direct_sum_norm(&space, &vec![0.0; space.m], &y)?;
        let s = w + z;
        // t = κ u puts the kink of non-smooth outer norms, at t = ‖x‖/‖y‖, on the split point u = 1
        let kappa = nx / ny;
        let m = mellin_complex(
            |u| {
                let yt: Vec<f64> = y.iter().map(|v| kappa * u * v).collect();
                let norm = direct_sum_norm(&space, &x, &yt).expect("dimensions checked");
                (s * norm.ln()).exp()
            },
            z,
            ctx.quad_tol(),
        )?;
        let scale = (-z * kappa.ln()).exp();
        let m = crate::mellin::MellinResult { value: m.value * scale, quad_error: m.quad_error * scale.norm(), ..m };
        ctx.quad_error(m.quad_error / m.value.norm().max(1.0));
        let f = space.outer.f(w, z, ctx.quad_tol())?;
        let reference = f.value * (w * nx.ln()).exp() * (z * ny.ln()).exp();
        let provenance = match f.method {
            crate::absnorm::TransformMethod::ClosedForm => Provenance::ClosedForm,
            _ => Provenance::Quadrature,
        };
        let label = format!("{} w = {} z = {} |x| = {nx} |y| = {ny}", space.descriptor(), fmt_c(w), fmt_c(z));
        ctx.compare_rel(&label, m.value, reference, provenance, 1e-6);
    }
    Ok(())
}

// ---------------------------------------------------------------- Gaussian embeddings, p < 0

fn p_neg_params() -> Vec<ParamInfo> {
    vec![
        param("p", json!(-0.5), "exponent, p < 0"),
        param("m", json!(2), "dimension of X = ℓ₂^m"),
        param("q", json!(1.5), "Y = ℓ_q^n"),
        param("n", json!(2), "dimension of Y"),
        param("r", json!([2.0, 1.8]), "outer exponents"),
        param("z", json!([-0.25, -0.1, -0.4, -0.02]), "points in (max{−n, p}, min{0, p+m})"),
    ]
}

fn check_p_neg_prop(ctx: &mut Ctx) -> Result<()> {
    let (p, m, q, n) = (ctx.f64("p")?, ctx.usize("m")?, ctx.f64("q")?, ctx.usize("n")?);
    let zs = ctx.f64s("z")?;
    let (lo, hi) = ((-(n as f64)).max(p), 0f64.min(p + m as f64));
    for z in &zs {
        if !(*z > lo && *z < hi) {
            return Err(Error::Param(format!("z = {z} outside ({lo}, {hi})")));
        }
    }
    let samples = ctx.samples();
    // E‖ξ‖^{p−z} on ℓ₂^m and E‖η‖^z on ℓ_q^n, shared by every r
    let xi = GaussianProcessSpec::identity(m)?;
    let eta = GaussianProcessSpec::identity(n)?;
    let mut x_moments = Vec::new();
    let mut y_moments = Vec::new();
    for z in &zs {
        x_moments.push(gaussian_norm_moment(&xi, &Euclidean { dim: m }, c(p - z), samples, &ctx.stream(&format!("xi {z}")))?);
        y_moments.push(gaussian_norm_moment(&eta, &LqSpace { q, dim: n }, c(*z), samples, &ctx.stream(&format!("eta {z}")))?);
    }
    for r in ctx.f64s("r")? {
        let model = EmbeddingModel::case2(p, m, q, r, n)?;
        let norm = AbsoluteNorm::lq(r)?;
        for ((z, ex), ey) in zs.iter().zip(&x_moments).zip(&y_moments) {
            let label = format!("r = {r}, z = {z}");
            let lhs = case2_mixed_moment(&model, c(*z), samples, &ctx.stream(&format!("lhs {label}")))?;
            let ratio = norm.mellin_ratio(p, c(*z), ctx.quad_tol())?;
            let rhs = ratio * ex.mean * ey.mean;
            let rhs_err = ratio.norm() * (ey.mean.norm() * ex.stderr).hypot(ex.mean.norm() * ey.stderr);
            ctx.compare(&label, lhs.mean, lhs.stderr, rhs, rhs_err, Provenance::Mc, 0.0);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- p-stable embeddings, p > 0

fn p_pos_params() -> Vec<ParamInfo> {
    vec![param(
        "cases",
        json!([[0.8, 1.5, -0.3, -0.4], [0.8, 1.5, -0.35, -0.35], [0.5, 2.0, -0.3, -0.4], [1.2, 1.8, -0.2, -0.5]]),
        "(p, r, w, z) with p < r and −1 < w + z < w, z < 0",
    )]
}

/// `2^{(w+z)/2} F_r(w,z) G(w) G(z) Φ_{p/2}((w+z)/2) / F₂(w,z)`: the mixed
/// moment `∫|Tx|^w |Ty|^z` for unit `x ∈ X`, `y ∈ Y` of a `p`-stable
/// embedding of `X ⊕_r Y` normalized by `E e^{itψ_p} = e^{-|t|^p}`.
pub fn p_pos_closed_form(p: f64, r: f64, w: f64, z: f64) -> Result<f64> {
    let s = w + z;
    let fr = AbsoluteNorm::lq(r)?.f(c(w), c(z), DEFAULT_QUAD_TOL)?.value.re;
    let f2 = AbsoluteNorm::Lq(2.0).f(c(w), c(z), DEFAULT_QUAD_TOL)?.value.re;
    let g = |x: f64| gaussian_moment(c(x)).map(|v| v.re);
    Ok((0.5 * s * LN_2).exp() * fr * g(w)? * g(z)? * specfun::phi(p / 2.0, c(s / 2.0))?.re / f2)
}

fn check_p_pos_prop(ctx: &mut Ctx) -> Result<()> {
    ctx.note("stable laws are normalized by E e^{itψ_p} = e^{−|t|^p}, which puts 2^{(w+z)/2} in the reference");
    for t in ctx.tuples("cases", 4)? {
        let (p, r, w, z) = (t[0], t[1], t[2], t[3]);
        if !(p > 0.0 && p < r && r <= 2.0 && -1.0 < w + z && w + z < w.min(z) && w.max(z) < 0.0) {
            return Err(Error::Param(format!("need 0 < p < r ≤ 2 and −1 < w+z < w, z < 0; got {t:?}")));
        }
        // T(a, b) = φ_{p/r}^{1/r} (a η₁ + b η₂), η_j symmetric r-stable
        let sub = PositiveStable::new(p / r)?;
        let eta = SymmetricStable::new(r)?;
        let label = format!("(p, r) = ({p}, {r}), (w, z) = ({w}, {z})");
        let est = weighted_estimates(&ctx.stream(&label), ctx.samples(), 2, false, |rng, out| {
            let ln_phi = sub.sample_ln(rng) / r;
            let (l1, _) = eta.sample_ln(rng);
            let (l2, _) = eta.sample_ln(rng);
            out[0] = c(((w + z) * ln_phi + w * l1 + z * l2).exp());
            out[1] = c(((w + z) * ln_phi + z * l1 + w * l2).exp());
            1.0
        })?;
        let reference = p_pos_closed_form(p, r, w, z)?;
        ctx.compare_mc(&label, &est[0], c(reference));
        if w == z {
            let swapped = p_pos_closed_form(p, r, z, w)?;
            ctx.property(&format!("{label}: permuted evaluation"), swapped == reference);
        } else {
            ctx.compare_mc(&format!("{label}: x and y exchanged"), &est[1], c(p_pos_closed_form(p, r, z, w)?));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- main example

fn main_pos_params() -> Vec<ParamInfo> {
    vec![
        param("p", json!(0.5), "exponent, p > 0"),
        param("q", json!(1.5), "Y = ℓ_q, p + 1 ≤ q"),
        param("r", json!(2.0), "outer exponent, q < r ≤ 2"),
        param("t", json!([0.1, 0.5, 1.0, 2.0, 5.0, 10.0]), "grid"),
    ]
}

fn check_main_example_pos(ctx: &mut Ctx) -> Result<()> {
    let (p, q, r) = (ctx.f64("p")?, ctx.f64("q")?, ctx.f64("r")?);
    for t in ctx.f64s("t")? {
        let e = case1_lhs(p, q, r, t, ctx.samples(), &ctx.stream(&format!("t = {t}")))?;
        ctx.compare_mc(&format!("t = {t}"), &e, c(case1_reference(p, r, t)));
    }
    ctx.note(format!(
        "h is normalized so that E|h|^p = 1; an extra factor 2^{{z/2}} in E|h|^z would scale the large-t limit by 2^{{p/2}} = {:.6}",
        2f64.powf(p / 2.0)
    ));
    Ok(())
}

fn main_neg_params() -> Vec<ParamInfo> {
    vec![
        param("p", json!(-0.5), "exponent, p < 0 < p + m"),
        param("m", json!(2), "dimension of X = ℓ₂^m"),
        param("q", json!(1.5), "Y = ℓ_q^n, p + m ≤ q"),
        param("r", json!(2.0), "outer exponent, q < r ≤ 2"),
        param("n", json!(2), "dimension of Y"),
        param("t", json!([0.5, 1.0, 2.0]), "grid"),
    ]
}

fn check_main_example_neg(ctx: &mut Ctx) -> Result<()> {
    let (p, m, q, r, n) = (ctx.f64("p")?, ctx.usize("m")?, ctx.f64("q")?, ctx.f64("r")?, ctx.usize("n")?);
    let model = EmbeddingModel::case2(p, m, q, r, n)?;
    let spec = GaussianProcessSpec::identity(m + n)?;
    for t in ctx.f64s("t")? {
        let (lhs, rhs) = case2_identity(&model, &spec, t, ctx.samples(), &ctx.stream(&format!("t = {t}")))?;
        ctx.compare(&format!("t = {t}"), lhs.mean, lhs.stderr, rhs.mean, rhs.stderr, Provenance::Mc, 0.0);
    }
    Ok(())
}

// ---------------------------------------------------------------- second derivative

fn second_derivative_params() -> Vec<ParamInfo> {
    vec![
        param("p", json!(-1.0), "exponent, p < 0"),
        param("norm", json!("lq:3"), "norm whose ratio is swept"),
        param("r", json!([1.5, 1.9, 1.99, 1.999]), "increasing points approaching 2"),
        param("max_final_ratio", json!(0.2), "bound on final/initial"),
    ]
}

/// One row of the sweep: `(r, |M_{p,N}(r)/M_{p,2}(r)|, (2−r) M_{p,2}(r))`.
pub fn second_derivative_sweep(norm: &AbsoluteNorm, p: f64, rs: &[f64], tol: f64) -> Result<Vec<(f64, f64, f64)>> {
    rs.iter()
        .map(|&r| {
            let ratio = norm.mellin_ratio(p, c(r), tol)?.norm();
            let m2 = AbsoluteNorm::Lq(2.0).m_p(p, c(r), tol)?.value.re;
            Ok((r, ratio, (2.0 - r) * m2))
        })
        .collect()
}

fn check_second_derivative(ctx: &mut Ctx) -> Result<()> {
    let p = ctx.f64("p")?;
    let rs = ctx.f64s("r")?;
    let norm = AbsoluteNorm::parse(&ctx.str("norm")?).map_err(|e| Error::Param(e.to_string()))?;
    let rows = second_derivative_sweep(&norm, p, &rs, ctx.quad_tol())?;
    for &(r, ratio, scaled) in &rows {
        ctx.estimate(&format!("|ratio| at r = {r}"), c(ratio), 0.0);
        ctx.estimate(&format!("(2−r) M_{{p,2}}(r) at r = {r}"), c(scaled), 0.0);
        let control = AbsoluteNorm::Lq(2.0).mellin_ratio(p, c(r), ctx.quad_tol())?;
        ctx.compare_rel(&format!("ℓ₂ control at r = {r}"), control, c(1.0), Provenance::ClosedForm, 1e-10);
        // M_{p,2} has a simple pole at z = 2
        ctx.property(&format!("(2−r) M_{{p,2}}(r) bounded at r = {r}"), scaled.is_finite() && scaled.abs() < 10.0);
    }
    ctx.property("ratio strictly decreasing", rows.windows(2).all(|w| w[1].1 < w[0].1));
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        let bound = ctx.f64("max_final_ratio")?;
        ctx.estimate("final/initial", c(last.1 / first.1), 0.0);
        ctx.property(&format!("final/initial < {bound}"), last.1 / first.1 < bound);
    }
    Ok(())
}

// ---------------------------------------------------------------- continuation

fn continuation_params() -> Vec<ParamInfo> {
    vec![
        param("p", json!(-1.0), "exponent, p < 0"),
        param("norms", json!(["lq:1.5", "custom:mean-l2-l4"]), "norms to continue"),
        param("random_points", json!(10), "random points of the primary strip"),
        param("continued", json!([1.2, 0.5, [0.8, 0.6], -1.5, -2.2]), "points outside the primary strip (ℓ_q only)"),
    ]
}

/// `M_{p,N}(z)/M_{p,2}(z)` with `M_{p,N}` from the regularized integrand.
fn regularized_ratio(norm: &AbsoluteNorm, p: f64, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let w = c(p) - z;
    let reg = norm.f_reg_quadrature(w, z, tol)?;
    let m2 = AbsoluteNorm::Lq(2.0).m_p(p, z, tol)?.value;
    Ok(((reg.value - 1.0 / w - 1.0 / z) / m2, reg.abs_error_estimate / m2.norm()))
}

fn check_continuation(ctx: &mut Ctx) -> Result<()> {
    let p = ctx.f64("p")?;
    if !(p < 0.0) {
        return Err(Error::Param(format!("p must be negative, got {p}")));
    }
    let k = ctx.usize("random_points")?;
    let continued = ctx.complexes("continued")?;
    let tol = ctx.quad_tol();
    let norms: Vec<String> = ctx.params["norms"]
        .as_array()
        .and_then(|a| a.iter().map(|v| v.as_str().map(str::to_owned)).collect())
        .ok_or_else(|| Error::Param("norms must be a list of descriptors".into()))?;
    for descriptor in norms {
        let norm = AbsoluteNorm::parse(&descriptor).map_err(|e| Error::Param(e.to_string()))?;
        let mut rng = ctx.stream(&format!("points {descriptor}")).rng();
        for _ in 0..k {
            // primary strip p < Re z < 0, kept away from its edges
            let z = Complex64::new(p * rng.gen_range(0.1..0.9), rng.gen_range(-1.0..1.0));
            let (reg, err) = regularized_ratio(&norm, p, z, tol)?;
            ctx.quad_error(err);
            let direct = norm.f_quadrature(c(p) - z, z, tol)?;
            ctx.quad_error(direct.abs_error_estimate / direct.value.norm().max(1.0));
            let m2 = AbsoluteNorm::Lq(2.0).m_p(p, z, tol)?.value;
            ctx.compare_rel(&format!("{descriptor} z = {:.6}{:+.6}i", z.re, z.im), reg, direct.value / m2, Provenance::Quadrature, 1e-6);
        }
        let strip = norm.ratio_strip(p)?;
        for z0 in [0.0, p] {
            let at = norm.mellin_ratio(p, c(z0), tol)?;
            let h = 1e-4;
            let near = (norm.mellin_ratio(p, c(z0 + h), tol)? + norm.mellin_ratio(p, c(z0 - h), tol)?) * 0.5;
            ctx.compare_rel(&format!("{descriptor} removable point z = {z0}"), at, near, Provenance::Quadrature, 1e-6);
        }
        if let AbsoluteNorm::Lq(_) = norm {
            for z in &continued {
                if !strip.contains(*z) {
                    return Err(Error::Param(format!("{} outside the ratio strip {strip}", fmt_c(*z))));
                }
                let (reg, err) = regularized_ratio(&norm, p, *z, tol)?;
                ctx.quad_error(err);
                let closed = norm.mellin_ratio(p, *z, tol)?;
                ctx.compare_rel(&format!("{descriptor} continued z = {}", fmt_c(*z)), reg, closed, Provenance::ClosedForm, 1e-6);
            }
        }
    }
    Ok(())
}
