//! Explicit embeddings of `ℓ₂^m ⊕_N ℓ_q^n` into spaces of random variables.
//!
//! * `R x = (x·γ)/|γ|` realizes `ℓ₂^m` isotropically (the spherical ratio).
//! * `S y = ρ · Σ y_k ζ_k` with `ζ_k` iid symmetric `q`-stable and `ρ` the
//!   radial part of `h` realizes `ℓ_q^n` with `S y ≈ ‖y‖_q h`.
//! * Case 1 (`p > 0`, `m = 1`): `T(α, y) = α + S y` is a standard isometry of
//!   `ℝ ⊕_r ℓ_q^n`, i.e. `E|1 + t h|^p = (1 + t^r)^{p/r}`.
//! * Case 2 (`p < 0`): `T(x + y) = θ(R x + S y)` is a Gaussian embedding, i.e.
//!   `E(Σ_j T(x_j + t y_j)²)^{p/2} = E‖ξ_X + t ξ_Y‖^p`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::join;

use crate::absnorm::AbsoluteNorm;
use crate::error::domain;
use crate::specfun::gaussian_moment;
use crate::stochastic::{
    build_h, build_h_radial, sample_gaussian, weighted_estimates, MCEstimate, ProductRV, SampleStream, SymmetricStable,
};
use crate::{Error, Result};

/// Relative threshold on singular values below which a direction is lost.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// A finite-dimensional normed space on `ℝ^dim`.
pub trait NormedSpace: Sync {
    fn dim(&self) -> usize;
    fn norm(&self, v: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euclidean {
    pub dim: usize,
}

impl NormedSpace for Euclidean {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `ℓ_q^dim`, `q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqSpace {
    pub q: f64,
    pub dim: usize,
}

impl NormedSpace for LqSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, v: &[f64]) -> f64 {
        lq_norm(self.q, v)
    }
}

fn lq_norm(q: f64, v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|x| (x.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// `Z = ℓ₂^m ⊕_N ℓ_q^n`; vectors of `Z` are `(x, y)` concatenated.
#[derive(Debug, Clone)]
pub struct DirectSumSpace {
    pub m: usize,
    pub n: usize,
    pub q: f64,
    pub outer: AbsoluteNorm,
}

impl DirectSumSpace {
    pub fn new(m: usize, n: usize, q: f64, outer: AbsoluteNorm) -> Result<Self> {
        if n < 1 {
            return Err(domain!("the ℓ_q component needs n ≥ 1"));
        }
        if !(1.0..=2.0).contains(&q) {
            return Err(domain!("q must lie in [1, 2], got {q}"));
        }
        Ok(Self { m, n, q, outer })
    }

    /// `ℓ₂^m ⊕_r ℓ_q^n`.
    pub fn with_r(m: usize, n: usize, q: f64, r: f64) -> Result<Self> {
        Self::new(m, n, q, AbsoluteNorm::lq(r)?)
    }

    /// Parses `l2:<m>+lq:<q>:<n>@r:<r>`; the outer norm may also be given as
    /// any norm descriptor, e.g. `@linf` or `@custom:mean-l2-l4`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let bad = || Error::Param(format!("expected l2:<m>+lq:<q>:<n>@r:<r>, got {descriptor:?}"));
        let (spaces, outer) = descriptor.trim().split_once('@').ok_or_else(bad)?;
        let (x, y) = spaces.split_once('+').ok_or_else(bad)?;
        let m: usize = x.strip_prefix("l2:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let mut ys = y.strip_prefix("lq:").ok_or_else(bad)?.split(':');
        let q: f64 = ys.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let n: usize = ys.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if ys.next().is_some() {
            return Err(bad());
        }
        let outer = match outer.strip_prefix("r:") {
            Some(r) => AbsoluteNorm::lq(r.parse().map_err(|_| bad())?),
            None => AbsoluteNorm::parse(outer),
        }
        .map_err(|e| Error::Param(e.to_string()))?;
        Self::new(m, n, q, outer).map_err(|e| Error::Param(e.to_string()))
    }

    pub fn descriptor(&self) -> String {
        let outer = match &self.outer {
            AbsoluteNorm::Lq(r) => format!("r:{r}"),
            other => other.descriptor(),
        };
        format!("l2:{}+lq:{}:{}@{outer}", self.m, self.q, self.n)
    }

    /// The outer exponent when the outer norm is `ℓ_r`.
    pub fn r(&self) -> Option<f64> {
        match self.outer {
            AbsoluteNorm::Lq(r) => Some(r),
            _ => None,
        }
    }

    pub fn x_norm(&self, x: &[f64]) -> f64 {
        Euclidean { dim: self.m }.norm(x)
    }

    pub fn y_norm(&self, y: &[f64]) -> f64 {
        lq_norm(self.q, y)
    }
}

impl NormedSpace for DirectSumSpace {
    fn dim(&self) -> usize {
        self.m + self.n
    }

    fn norm(&self, v: &[f64]) -> f64 {
        let (x, y) = v.split_at(self.m);
        self.outer.eval(self.x_norm(x), self.y_norm(y))
    }
}

/// `‖(x, y)‖ = N(‖x‖₂, ‖y‖_q)`.
pub fn direct_sum_norm(space: &DirectSumSpace, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != space.m || y.len() != space.n {
        return Err(Error::Dimension(format!(
            "expected ({}, {}) coordinates, got ({}, {})",
            space.m,
            space.n,
            x.len(),
            y.len()
        )));
    }
    Ok(space.outer.eval(space.x_norm(x), space.y_norm(y)))
}

/// The Gaussian process `ξ = Σ γ_j v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProcessSpec {
    pub vectors: Vec<Vec<f64>>,
    /// Smallest singular value of the matrix with columns `v_j`.
    pub rank_certificate: f64,
    pub largest_singular_value: f64,
    pub rank: usize,
}

impl GaussianProcessSpec {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).ok_or_else(|| Error::Dimension("no vectors".into()))?;
        if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension("vectors must share a positive dimension".into()));
        }
        let a = DMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
        let sv = a.singular_values();
        let largest = sv.max();
        let smallest = sv.min();
        let rank = sv.iter().filter(|s| **s > RANK_TOLERANCE * largest).count();
        Ok(Self { vectors, rank_certificate: smallest, largest_singular_value: largest, rank })
    }

    /// The standard basis of `ℝ^dim`.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::new((0..dim).map(|j| (0..dim).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// Whether the vectors span the ambient space.
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.dim()
    }

    fn require_full_rank(&self) -> Result<()> {
        if !self.is_full_rank() {
            return Err(Error::Rank(format!(
                "rank {} < dimension {} (certificate {:.3e}, largest singular value {:.3e})",
                self.rank,
                self.dim(),
                self.rank_certificate,
                self.largest_singular_value
            )));
        }
        Ok(())
    }

    /// Draws `γ` into `gammas` and writes `ξ = Σ γ_j v_j` into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, gammas: &mut [f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (g, v) in gammas.iter_mut().zip(&self.vectors) {
            *g = sample_gaussian(rng);
            for (o, vi) in out.iter_mut().zip(v) {
                *o += *g * vi;
            }
        }
    }
}

fn check_space<S: NormedSpace + ?Sized>(spec: &GaussianProcessSpec, space: &S) -> Result<()> {
    if spec.dim() != space.dim() {
        return Err(Error::Dimension(format!("process lives in ℝ^{}, space is ℝ^{}", spec.dim(), space.dim())));
    }
    Ok(())
}

/// `E‖ξ‖^z`.
pub fn gaussian_norm_moment<S: NormedSpace + ?Sized>(
    spec: &GaussianProcessSpec,
    space: &S,
    z: Complex64,
    n: usize,
    stream: &SampleStream,
) -> Result<MCEstimate> {
    gaussian_norm_moment_weighted(spec, space, z, |_| 1.0, n, stream)
}

/// `E[w(γ) ‖ξ‖^z]` for a nonnegative functional `w` of the coefficients.
pub fn gaussian_norm_moment_weighted<S, W>(
    spec: &GaussianProcessSpec,
    space: &S,
    z: Complex64,
    w: W,
    n: usize,
    stream: &SampleStream,
) -> Result<MCEstimate>
where
    S: NormedSpace + ?Sized,
    W: Fn(&[f64]) -> f64 + Sync,
{
    check_space(spec, space)?;
    if !(z.re > -(spec.rank as f64)) {
        return Err(domain!("E‖ξ‖^z needs Re z > −rank = −{}, got {}", spec.rank, z.re));
    }
    let k = spec.vectors.len();
    let d = spec.dim();
    let est = weighted_estimates(stream, n, 1, false, |rng, out| {
        let mut g = vec![0.0; k];
        let mut xi = vec![0.0; d];
        spec.sample_into(rng, &mut g, &mut xi);
        out[0] = (z * space.norm(&xi).ln()).exp() * w(&g);
        1.0
    })?;
    Ok(est[0])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One draw of `R x = (x·γ)/|γ|`.
pub fn spherical_ratio<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> f64 {
    let g: Vec<f64> = x.iter().map(|_| sample_gaussian(rng)).collect();
    dot(x, &g) / dot(&g, &g).sqrt()
}

/// One draw of `R x` from `stream`.
pub fn spherical_ratio_sample(m: usize, x: &[f64], stream: &SampleStream) -> Result<f64> {
    if m < 1 || x.len() != m {
        return Err(Error::Dimension(format!("need m ≥ 1 and x ∈ ℝ^{m}, got ℝ^{}", x.len())));
    }
    Ok(spherical_ratio(x, &mut stream.rng()))
}

/// One draw of `Σ y_k ζ_k`, `ζ_k` iid symmetric `q`-stable.
pub fn stable_combination<R: Rng + ?Sized>(stable: &SymmetricStable, y: &[f64], rng: &mut R) -> f64 {
    y.iter()
        .map(|yk| {
            let (ln, sign) = stable.sample_ln(rng);
            yk * sign * ln.exp()
        })
        .sum()
}

/// One draw of `S y = Σ y_k ζ_k`, distributed as `‖y‖_q ψ_q`.
pub fn stable_embedding_sample(q: f64, y: &[f64], stream: &SampleStream) -> Result<f64> {
    if !(q > 0.0 && q <= 2.0) {
        return Err(domain!("stable embedding needs 0 < q ≤ 2, got {q}"));
    }
    Ok(stable_combination(&SymmetricStable::new(q)?, y, &mut stream.rng()))
}

/// Plain draws of [`stable_embedding_sample`].
pub fn stable_embedding_samples(q: f64, y: &[f64], n: usize, stream: &SampleStream) -> Result<Vec<f64>> {
    if !(q > 0.0 && q <= 2.0) {
        return Err(domain!("stable embedding needs 0 < q ≤ 2, got {q}"));
    }
    let stable = SymmetricStable::new(q)?;
    let mut rng = stream.rng();
    Ok((0..n).map(|_| stable_combination(&stable, y, &mut rng)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    Case1Standard,
    Case2Gaussian,
}

/// The composed map `T` on `ℓ₂^m ⊕_r ℓ_q^n`.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    pub space: DirectSumSpace,
    pub p: f64,
    pub theta: f64,
    pub h: ProductRV,
    pub mode: EmbeddingMode,
    radial: ProductRV,
}

/// `θ` with `θ^p = G(p+m−1)/G(m−1)`.
pub fn theta(p: f64, m: usize) -> Result<f64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let a = m as f64 - 1.0;
    let ratio = gaussian_moment(c(p + a))? / gaussian_moment(c(a))?;
    Ok((ratio.re.ln() / p).exp())
}

impl EmbeddingModel {
    /// `T(α, y) = α + S y` on `ℝ ⊕_r ℓ_q^n`, for `p > 0` and `p + 1 ≤ q < r ≤ 2`.
    pub fn case1(p: f64, q: f64, r: f64, n: usize) -> Result<Self> {
        if !(p > 0.0) {
            return Err(domain!("case 1 needs p > 0, got {p}"));
        }
        let space = DirectSumSpace::with_r(1, n, q, r)?;
        Ok(Self {
            space,
            p,
            theta: 1.0,
            h: build_h(1, p, q, r)?,
            mode: EmbeddingMode::Case1Standard,
            radial: build_h_radial(1, p, q, r)?,
        })
    }

    /// `T(x + y) = θ(R x + S y)` on `ℓ₂^m ⊕_r ℓ_q^n`, for `p < 0 < p + m ≤ q < r ≤ 2`.
    pub fn case2(p: f64, m: usize, q: f64, r: f64, n: usize) -> Result<Self> {
        if !(p < 0.0 && p + m as f64 > 0.0) {
            return Err(domain!("case 2 needs p < 0 < p + m, got p = {p}, m = {m}"));
        }
        let space = DirectSumSpace::with_r(m, n, q, r)?;
        let m32 = u32::try_from(m).map_err(|_| domain!("m too large"))?;
        Ok(Self {
            space,
            p,
            theta: theta(p, m)?,
            h: build_h(m32, p, q, r)?,
            mode: EmbeddingMode::Case2Gaussian,
            radial: build_h_radial(m32, p, q, r)?,
        })
    }

    /// The radial part `ρ` of `h = ρ ψ_q`.
    pub fn radial(&self) -> &ProductRV {
        &self.radial
    }
}

/// `E|1 + t h|^p` for `h = h(1, p, q, r)`; the reference is `(1 + t^r)^{p/r}`.
pub fn case1_lhs(p: f64, q: f64, r: f64, t: f64, n: usize, stream: &SampleStream) -> Result<MCEstimate> {
    let model = EmbeddingModel::case1(p, q, r, 1)?;
    if !(t >= 0.0) {
        return Err(domain!("t must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(MCEstimate { n, ..MCEstimate::exact(Complex64::new(1.0, 0.0)) });
    }
    let h = &model.h;
    let est = weighted_estimates(stream, n, 1, h.is_weighted(), |rng, out| {
        let d = h.sample(rng);
        out[0] = Complex64::new((1.0 + t * d.value()).abs().powf(p), 0.0);
        d.weight()
    })?;
    Ok(est[0])
}

/// `(1 + t^r)^{p/r}`.
pub fn case1_reference(p: f64, r: f64, t: f64) -> f64 {
    (t.powf(r).ln_1p() * p / r).exp()
}

/// Two independent estimates of the sides of the Case 2 identity
/// `E(Σ_j T(x_j + t y_j)²)^{p/2} = E‖ξ_X + t ξ_Y‖^p` for `ξ = Σ γ_j (x_j + y_j)`.
pub fn case2_identity(
    model: &EmbeddingModel,
    spec: &GaussianProcessSpec,
    t: f64,
    n: usize,
    stream: &SampleStream,
) -> Result<(MCEstimate, MCEstimate)> {
    if model.mode != EmbeddingMode::Case2Gaussian {
        return Err(domain!("case2_identity needs a case 2 model"));
    }
    if !(t > 0.0) {
        return Err(domain!("t must be positive, got {t}"));
    }
    check_space(spec, &model.space)?;
    spec.require_full_rank()?;
    let (lhs, rhs) =
        join(|| case2_lhs(model, spec, t, n, &stream.named("lhs")), || case2_rhs(model, spec, t, n, &stream.named("rhs")));
    Ok((lhs?, rhs?))
}

/// `E(Σ_j T(x_j + t y_j)²)^{p/2}` over the randomness of `T`.
pub fn case2_lhs(
    model: &EmbeddingModel,
    spec: &GaussianProcessSpec,
    t: f64,
    n: usize,
    stream: &SampleStream,
) -> Result<MCEstimate> {
    let m = model.space.m;
    let stable = SymmetricStable::new(model.space.q)?;
    let (p, theta) = (model.p, model.theta);
    let est = weighted_estimates(stream, n, 1, model.radial.is_weighted(), |rng, out| {
        let (sum, w) = sample_t_sum(model, &stable, spec, t, rng, m);
        out[0] = Complex64::new((theta * theta * sum).powf(p / 2.0), 0.0);
        w
    })?;
    Ok(est[0])
}

/// `Σ_j (R x_j + t S y_j)²` for one draw of `(R, S)` and the importance weight.
fn sample_t_sum(
    model: &EmbeddingModel,
    stable: &SymmetricStable,
    spec: &GaussianProcessSpec,
    t: f64,
    rng: &mut ChaCha8Rng,
    m: usize,
) -> (f64, f64) {
    let g: Vec<f64> = (0..m).map(|_| sample_gaussian(rng)).collect();
    let g_norm = dot(&g, &g).sqrt();
    let rho = model.radial.sample(rng);
    let zeta: Vec<f64> = (0..model.space.n)
        .map(|_| {
            let (ln, sign) = stable.sample_ln(rng);
            sign * ln.exp()
        })
        .collect();
    let scale = t * rho.value();
    let sum = spec
        .vectors
        .iter()
        .map(|v| {
            let (x, y) = v.split_at(m);
            let rx = if m == 0 { 0.0 } else { dot(x, &g) / g_norm };
            let v = rx + scale * dot(y, &zeta);
            v * v
        })
        .sum();
    (sum, rho.weight())
}

/// `E‖ξ_X + t ξ_Y‖^p`.
pub fn case2_rhs(
    model: &EmbeddingModel,
    spec: &GaussianProcessSpec,
    t: f64,
    n: usize,
    stream: &SampleStream,
) -> Result<MCEstimate> {
    let m = model.space.m;
    let scaled: Vec<Vec<f64>> = spec
        .vectors
        .iter()
        .map(|v| v.iter().enumerate().map(|(i, x)| if i < m { *x } else { t * x }).collect())
        .collect();
    let scaled = GaussianProcessSpec { vectors: scaled, ..spec.clone() };
    gaussian_norm_moment(&scaled, &model.space, Complex64::new(model.p, 0.0), n, stream)
}

/// `E(Σ_{j≤m} (T e_j)²)^{(p−z)/2} (Σ_{k≤n} (T f_k)²)^{z/2}` for the standard
/// bases `e_j` of `X` and `f_k` of `Y`: the mixed moment of the Case 2 model.
pub fn case2_mixed_moment(model: &EmbeddingModel, z: Complex64, n: usize, stream: &SampleStream) -> Result<MCEstimate> {
    if model.mode != EmbeddingMode::Case2Gaussian {
        return Err(domain!("mixed moment needs a case 2 model"));
    }
    let p = model.p;
    let stable = SymmetricStable::new(model.space.q)?;
    let theta = model.theta;
    let radial = &model.radial;
    let est = weighted_estimates(stream, n, 1, radial.is_weighted(), |rng, out| {
        // R e_j = γ_j/|γ|, so Σ_j (R e_j)² = 1
        let rho = radial.sample(rng);
        let mut ss = 0.0;
        for _ in 0..model.space.n {
            let (ln, _) = stable.sample_ln(rng);
            ss += (2.0 * ln).exp();
        }
        let ln_y = rho.ln_abs + 0.5 * ss.ln();
        out[0] = (z * ln_y).exp() * theta.powf(p);
        rho.weight()
    })?;
    Ok(est[0])
}
