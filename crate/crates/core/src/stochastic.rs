//! Seeded samplers, product random variables and weighted Monte Carlo.
//!
//! Every random quantity in the crate is drawn from a [`SampleStream`], a
//! `(seed, path)` pair hashed into a ChaCha8 key. Monte Carlo runs are cut
//! into fixed blocks; block `b` draws from the child stream `b` and block
//! results are reduced in block order, so estimates do not depend on how many
//! threads did the work.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::domain;
use crate::specfun::{self, AnalyticStrip, MomentFunction};
use crate::{Error, Result};

/// Samples per Monte Carlo block.
pub const BLOCK_SIZE: usize = 4096;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A reproducible, splittable source of randomness.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleStream {
    pub seed: u64,
    pub path: Vec<u64>,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, path: Vec::new() }
    }

    /// The `k`-th child stream.
    pub fn child(&self, k: u64) -> Self {
        let mut path = self.path.clone();
        path.push(k);
        Self { seed: self.seed, path }
    }

    /// A child keyed by a label, used to give each check and each side of an
    /// identity its own namespace.
    pub fn named(&self, label: &str) -> Self {
        // FNV-1a
        let h = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        self.child(h)
    }

    pub fn split(&self, k: usize) -> Vec<Self> {
        (0..k as u64).map(|i| self.child(i)).collect()
    }

    fn key(&self) -> u64 {
        self.path.iter().fold(splitmix64(self.seed), |h, &p| splitmix64(h ^ splitmix64(p.wrapping_add(0x51_7cc1_b727_220a))))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key())
    }
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e.max(f64::MIN_POSITIVE)
}

pub fn sample_gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Positive `p`-stable law normalized by `E e^{-tφ} = e^{-t^p}` (Kanter's
/// representation). `p = 1` is the point mass at `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveStable {
    p: f64,
}

impl PositiveStable {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(domain!("positive stable index must lie in (0, 1], got {p}"));
        }
        Ok(Self { p })
    }

    /// `ln φ`.
    pub fn sample_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = self.p;
        if p == 1.0 {
            return 0.0;
        }
        let u = PI * open01(rng);
        let e = exp1(rng);
        (p * u).sin().ln() - u.sin().ln() / p + (1.0 - p) / p * (((1.0 - p) * u).sin().ln() - e.ln())
    }
}

impl Distribution<f64> for PositiveStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_ln(rng).exp()
    }
}

/// Symmetric `p`-stable law with `E e^{itψ} = e^{-|t|^p}`
/// (Chambers–Mallows–Stuck). `p = 2` is `√2·γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricStable {
    p: f64,
}

impl SymmetricStable {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 2.0) {
            return Err(domain!("symmetric stable index must lie in (0, 2], got {p}"));
        }
        Ok(Self { p })
    }

    /// `(ln|ψ|, sign ψ)`.
    pub fn sample_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let p = self.p;
        if p == 2.0 {
            let g = sample_gaussian(rng) * std::f64::consts::SQRT_2;
            return (g.abs().ln(), g.signum());
        }
        let u = PI * open01(rng) - FRAC_PI_2;
        if p == 1.0 {
            let c = u.tan();
            return (c.abs().ln(), c.signum());
        }
        let e = exp1(rng);
        let s = (p * u).sin();
        let ln = s.abs().ln() - u.cos().ln() / p + (1.0 - p) / p * (((1.0 - p) * u).cos().ln() - e.ln());
        (ln, s.signum())
    }
}

impl Distribution<f64> for SymmetricStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (ln, sign) = self.sample_ln(rng);
        sign * ln.exp()
    }
}

/// The product form `√(2 φ_{p/2}) · γ` of the symmetric `p`-stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricStableProduct {
    subordinator: PositiveStable,
}

impl SymmetricStableProduct {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 2.0) {
            return Err(domain!("symmetric stable index must lie in (0, 2], got {p}"));
        }
        Ok(Self { subordinator: PositiveStable::new(p / 2.0)? })
    }
}

impl Distribution<f64> for SymmetricStableProduct {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let phi = self.subordinator.sample_ln(rng);
        (0.5 * (2f64.ln() + phi)).exp() * sample_gaussian(rng)
    }
}

/// The base law of a [`Factor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Base {
    Gaussian,
    PositiveStable(f64),
    SymmetricStable(f64),
    /// `X^exponent` for `X ~ Beta(alpha, beta)`.
    BetaPower { alpha: f64, beta: f64, exponent: f64 },
    Constant(f64),
}

impl Base {
    /// Moment function `z ↦ E|X|^z` of the base law.
    pub fn moment(&self) -> Result<MomentFunction> {
        match *self {
            Base::Gaussian => Ok(MomentFunction::gaussian()),
            Base::PositiveStable(p) => MomentFunction::positive_stable(p),
            Base::SymmetricStable(p) => MomentFunction::symmetric_stable(p),
            Base::Constant(c) => MomentFunction::constant(c),
            Base::BetaPower { alpha, beta, exponent } => {
                if !(alpha > 0.0 && beta > 0.0 && exponent.is_finite()) {
                    return Err(domain!("Beta parameters must be positive, got ({alpha}, {beta})"));
                }
                let lower = AnalyticStrip::new(-alpha, f64::INFINITY)?;
                let strip = if exponent == 0.0 { AnalyticStrip::whole_plane() } else { lower.preimage_affine(exponent, 0.0)? };
                let c = |x: f64| Complex64::new(x, 0.0);
                let norm = specfun::log_gamma(c(alpha + beta))? - specfun::log_gamma(c(alpha))?;
                Ok(MomentFunction::new(strip, vec![], move |z| {
                    let a = z * exponent + alpha;
                    Ok((specfun::log_gamma(a)? - specfun::log_gamma(a + beta)? + norm).exp())
                }))
            }
        }
    }

    fn is_symmetric(&self) -> bool {
        matches!(self, Base::Gaussian | Base::SymmetricStable(_))
    }

    fn is_degenerate(&self) -> bool {
        matches!(self, Base::Constant(_) | Base::PositiveStable(1.0))
    }
}

/// `|X|^power` (signed for symmetric bases) under the measure tilted by
/// `|X|^tilt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub base: Base,
    pub power: f64,
    pub tilt: f64,
}

impl Factor {
    pub fn plain(base: Base) -> Self {
        Self { base, power: 1.0, tilt: 0.0 }
    }

    pub fn powered(base: Base, power: f64) -> Self {
        Self { base, power, tilt: 0.0 }
    }

    pub fn tilted(base: Base, power: f64, tilt: f64) -> Self {
        Self { base, power, tilt }
    }
}

/// One draw of a product variable: `value = sign · e^{ln_abs}`, carrying the
/// importance weight `e^{ln_weight}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub ln_abs: f64,
    pub sign: f64,
    pub ln_weight: f64,
}

impl Draw {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }

    pub fn weight(&self) -> f64 {
        self.ln_weight.exp()
    }

    /// `|value|^z`.
    pub fn abs_pow(&self, z: Complex64) -> Complex64 {
        (z * self.ln_abs).exp()
    }
}

#[derive(Debug, Clone, Copy)]
enum Sampler {
    Gaussian,
    Positive(PositiveStable),
    Symmetric(SymmetricStable),
    Beta(Gamma<f64>, Gamma<f64>, f64),
    Constant(f64),
}

impl Sampler {
    fn new(base: &Base) -> Result<Self> {
        Ok(match *base {
            Base::Gaussian => Sampler::Gaussian,
            Base::PositiveStable(p) => Sampler::Positive(PositiveStable::new(p)?),
            Base::SymmetricStable(p) => Sampler::Symmetric(SymmetricStable::new(p)?),
            Base::BetaPower { alpha, beta, exponent } => Sampler::Beta(
                Gamma::new(alpha, 1.0).map_err(|e| domain!("Beta shape {alpha}: {e}"))?,
                Gamma::new(beta, 1.0).map_err(|e| domain!("Beta shape {beta}: {e}"))?,
                exponent,
            ),
            Base::Constant(c) => Sampler::Constant(c.ln()),
        })
    }

    /// `(ln|X|, sign X)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            Sampler::Gaussian => {
                let g = sample_gaussian(rng);
                (g.abs().ln(), g.signum())
            }
            Sampler::Positive(s) => (s.sample_ln(rng), 1.0),
            Sampler::Symmetric(s) => s.sample_ln(rng),
            Sampler::Beta(a, b, exponent) => {
                let x: f64 = a.sample(rng);
                let y: f64 = b.sample(rng);
                (exponent * (x.ln() - (x + y).ln()), 1.0)
            }
            Sampler::Constant(ln_c) => (*ln_c, 1.0),
        }
    }
}

/// A product of independent factors with its closed-form moment function
/// `z ↦ E|X|^z` (under the tilted measures).
#[derive(Debug, Clone)]
pub struct ProductRV {
    factors: Vec<Factor>,
    samplers: Vec<Sampler>,
    moment: MomentFunction,
}

impl ProductRV {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let mut strip = AnalyticStrip::whole_plane();
        let mut parts = Vec::with_capacity(factors.len());
        let mut removable = Vec::new();
        for f in &factors {
            let base = f.base.moment()?;
            if f.tilt != 0.0 && !base.strip().contains(Complex64::new(f.tilt, 0.0)) {
                return Err(domain!("tilt {} outside the moment strip {} of {:?}", f.tilt, base.strip(), f.base));
            }
            let fs = base.strip().preimage_affine(f.power, f.tilt)?;
            strip = strip.intersect(&fs)?;
            let norm = base.eval(Complex64::new(f.tilt, 0.0))?;
            removable.extend(base.removable_points().iter().filter(|_| f.power != 0.0).map(|z0| (z0 - f.tilt) / f.power));
            parts.push((base, f.power, f.tilt, norm));
        }
        let samplers = factors.iter().map(|f| Sampler::new(&f.base)).collect::<Result<Vec<_>>>()?;
        removable.sort_by(f64::total_cmp);
        removable.dedup();
        let moment = MomentFunction::new(strip, removable, move |z| {
            parts.iter().try_fold(Complex64::new(1.0, 0.0), |acc, (m, power, tilt, norm)| {
                Ok(acc * m.eval(z * *power + *tilt)? / *norm)
            })
        });
        Ok(Self { factors, samplers, moment })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn moment(&self) -> &MomentFunction {
        &self.moment
    }

    /// Product of two independent variables.
    pub fn times(&self, other: &ProductRV) -> Result<ProductRV> {
        ProductRV::new(self.factors.iter().chain(other.factors.iter()).copied().collect())
    }

    pub fn is_weighted(&self) -> bool {
        self.factors.iter().any(|f| f.tilt != 0.0 && !f.base.is_degenerate())
    }

    pub fn is_symmetric(&self) -> bool {
        self.factors.iter().any(|f| f.base.is_symmetric() && f.power != 0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Draw {
        let mut d = Draw { ln_abs: 0.0, sign: 1.0, ln_weight: 0.0 };
        for (f, s) in self.factors.iter().zip(&self.samplers) {
            let (ln, sign) = s.sample(rng);
            d.ln_abs += f.power * ln;
            d.ln_weight += f.tilt * ln;
            if f.base.is_symmetric() && f.power != 0.0 {
                d.sign *= sign;
            }
        }
        d
    }

    /// Plain (unweighted) draws, for distributional comparisons. Refuses
    /// variables carrying importance weights.
    pub fn sample_values(&self, n: usize, stream: &SampleStream) -> Result<Vec<f64>> {
        if self.is_weighted() {
            return Err(Error::Statistics("weighted variables have no plain samples".into()));
        }
        let blocks: Vec<Vec<f64>> = (0..n.div_ceil(BLOCK_SIZE))
            .into_par_iter()
            .map(|b| {
                let mut rng = stream.child(b as u64).rng();
                let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
                (0..len).map(|_| self.sample(&mut rng).value()).collect()
            })
            .collect();
        Ok(blocks.concat())
    }
}

/// Monte Carlo estimate of a (possibly complex) mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub n: usize,
    pub weighted: bool,
    /// Effective sample size `(Σw)²/Σw²`; equals `n` when unweighted.
    pub ess: f64,
}

impl MCEstimate {
    pub fn exact(value: Complex64) -> Self {
        Self { mean: value, stderr: 0.0, n: 0, weighted: false, ess: 0.0 }
    }

    /// `|self − reference|` in units of `stderr` (infinite for a nonzero gap
    /// with zero error).
    pub fn sigma_from(&self, reference: Complex64) -> f64 {
        discrepancy_sigma((self.mean - reference).norm(), self.stderr)
    }
}

/// `gap / sigma`, with `0/0 = 0`.
pub fn discrepancy_sigma(gap: f64, sigma: f64) -> f64 {
    if gap == 0.0 {
        0.0
    } else {
        gap / sigma
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    w: f64,
    wy: Complex64,
    w2: f64,
    w2y: Complex64,
    w2yy: f64,
}

impl Sums {
    fn add(&mut self, w: f64, y: Complex64) {
        let w2 = w * w;
        self.w += w;
        self.wy += y * w;
        self.w2 += w2;
        self.w2y += y * w2;
        self.w2yy += y.norm_sqr() * w2;
    }

    fn merge(&mut self, o: &Sums) {
        self.w += o.w;
        self.wy += o.wy;
        self.w2 += o.w2;
        self.w2y += o.w2y;
        self.w2yy += o.w2yy;
    }
}

/// Self-normalized estimates of `E′[y_k] = E[w·y_k]/E[w]` for `outputs`
/// functionals evaluated on shared draws.
///
/// `draw` fills one value per functional and returns the sample weight (`1`
/// for plain Monte Carlo). Values are centred on the block-0 mean before
/// accumulation. The standard error is the delta-method error of the ratio.
pub fn weighted_estimates<F>(stream: &SampleStream, n: usize, outputs: usize, weighted: bool, draw: F) -> Result<Vec<MCEstimate>>
where
    F: Fn(&mut ChaCha8Rng, &mut [Complex64]) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::Statistics("no samples requested".into()));
    }
    let blocks = n.div_ceil(BLOCK_SIZE);
    let run_block = |b: usize, centre: &[Complex64]| -> Vec<Sums> {
        let mut rng = stream.child(b as u64).rng();
        let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
        let mut sums = vec![Sums::default(); outputs];
        let mut y = vec![Complex64::new(0.0, 0.0); outputs];
        for _ in 0..len {
            let w = draw(&mut rng, &mut y);
            for ((s, v), c) in sums.iter_mut().zip(&y).zip(centre) {
                s.add(w, v - c);
            }
        }
        sums
    };
    let zero = vec![Complex64::new(0.0, 0.0); outputs];
    let centre: Vec<Complex64> = run_block(0, &zero).iter().map(|s| if s.w > 0.0 { s.wy / s.w } else { s.wy }).collect();
    let partial: Vec<Vec<Sums>> = (0..blocks).into_par_iter().map(|b| run_block(b, &centre)).collect();
    let mut total = vec![Sums::default(); outputs];
    for block in &partial {
        for (t, s) in total.iter_mut().zip(block) {
            t.merge(s);
        }
    }
    total
        .iter()
        .zip(&centre)
        .map(|(s, c)| {
            if !(s.w > 0.0 && s.w.is_finite()) {
                return Err(Error::Statistics(format!("total weight {} is not positive and finite", s.w)));
            }
            let d = s.wy / s.w;
            let var = (s.w2yy - 2.0 * (d.conj() * s.w2y).re + d.norm_sqr() * s.w2) / (s.w * s.w);
            let ess = s.w * s.w / s.w2;
            if weighted && ess < 0.01 * n as f64 {
                return Err(Error::Statistics(format!("effective sample size {ess:.1} below 1% of {n}")));
            }
            let mean = c + d;
            if !(mean.re.is_finite() && mean.im.is_finite() && var.is_finite()) {
                return Err(Error::Statistics("non-finite Monte Carlo accumulator".into()));
            }
            // unbiased scaling of the plain variance
            let scale = if weighted { 1.0 } else { n as f64 / (n as f64 - 1.0).max(1.0) };
            Ok(MCEstimate { mean, stderr: (var.max(0.0) * scale).sqrt(), n, weighted, ess })
        })
        .collect()
}

/// `E|X|^z` for each `z`, on shared draws.
pub fn moment_estimates(rv: &ProductRV, zs: &[Complex64], n: usize, stream: &SampleStream) -> Result<Vec<MCEstimate>> {
    for z in zs {
        if !rv.moment().strip().contains(*z) {
            return Err(domain!("Re z = {} outside the moment strip {}", z.re, rv.moment().strip()));
        }
    }
    if rv.factors.iter().all(|f| f.base.is_degenerate()) {
        let d = rv.sample(&mut stream.rng());
        return Ok(zs.iter().map(|z| MCEstimate { n, ..MCEstimate::exact(d.abs_pow(*z)) }).collect());
    }
    weighted_estimates(stream, n, zs.len(), rv.is_weighted(), |rng, out| {
        let d = rv.sample(rng);
        for (o, z) in out.iter_mut().zip(zs) {
            *o = d.abs_pow(*z);
        }
        d.weight()
    })
}

/// `E|X|^z`.
pub fn moment_estimate(rv: &ProductRV, z: Complex64, n: usize, stream: &SampleStream) -> Result<MCEstimate> {
    Ok(moment_estimates(rv, &[z], n, stream)?[0])
}

/// `h` with `E h^z = (p / (2Γ(p/2))) Γ((p−z)/2) Γ(−z/2) / Γ(−z/p)` on
/// `Re z < 2`, for `1 ≤ p < 2`: `2^{1/p} f g` with `f = φ_{1/p}^{1/(2p)}` and
/// `g` the same variable under the measure tilted by `f^{-p}`.
pub fn build_existence_h(p: f64) -> Result<ProductRV> {
    if !(1.0..2.0).contains(&p) {
        return Err(domain!("existence variable needs 1 ≤ p < 2, got {p}"));
    }
    let phi = Base::PositiveStable(1.0 / p);
    ProductRV::new(vec![
        Factor::plain(Base::Constant(2f64.powf(1.0 / p))),
        Factor::powered(phi, 1.0 / (2.0 * p)),
        Factor::tilted(phi, 1.0 / (2.0 * p), -0.5),
    ])
}

/// Closed form of the moment function of [`build_existence_h`].
pub fn existence_h_moment(p: f64, z: Complex64) -> Result<Complex64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let lg = specfun::log_gamma;
    Ok((lg((z * -1.0 + p) * 0.5)? + lg(-z * 0.5)? - lg(-z / p)? + c((p / 2.0).ln()) - lg(c(p / 2.0))?).exp())
}

fn check_h_params(m: u32, p: f64, q: f64, r: f64) -> Result<()> {
    if m < 1 {
        return Err(domain!("m must be at least 1"));
    }
    if !(q >= 1.0 && p + m as f64 <= q && q < r && r <= 2.0) {
        return Err(domain!("need 1 ≤ q, p + m ≤ q < r ≤ 2, got (m, p, q, r) = ({m}, {p}, {q}, {r})"));
    }
    Ok(())
}

/// The positive radial part `g/2` of `h = (g/2)·ψ_q`; see [`build_h`].
pub fn build_h_radial(m: u32, p: f64, q: f64, r: f64) -> Result<ProductRV> {
    check_h_params(m, p, q, r)?;
    let mut factors = vec![Factor::plain(Base::Constant(0.5))];
    factors.extend_from_slice(build_existence_h(q)?.factors());
    let a = p + m as f64;
    if a < q {
        factors.push(Factor::plain(Base::BetaPower { alpha: a / 2.0, beta: (q - a) / 2.0, exponent: -0.5 }));
    }
    if r < 2.0 {
        factors.push(Factor::powered(Base::PositiveStable(r / 2.0), 0.5));
        factors.push(Factor::tilted(Base::PositiveStable(r / 2.0), -0.5, p / 2.0));
    }
    ProductRV::new(factors)
}

/// The symmetric variable `h(m, p, q, r)` with
/// `E|h|^z = G(p+m−1−z) G(z) Φ_{r/2}(z/2) Φ_{r/2}((p−z)/2) / (G(p+m−1) Φ_{r/2}(p/2))`
/// on `−1 < Re z < p + m`, for `1 ≤ q`, `p + m ≤ q < r ≤ 2`.
pub fn build_h(m: u32, p: f64, q: f64, r: f64) -> Result<ProductRV> {
    let radial = build_h_radial(m, p, q, r)?;
    radial.times(&ProductRV::new(vec![Factor::plain(Base::SymmetricStable(q))])?)
}

/// Closed form of `E|h|^z` for [`build_h`].
pub fn h_moment(m: u32, p: f64, r: f64, z: Complex64) -> Result<Complex64> {
    let g = specfun::gaussian_moment;
    let a = p + m as f64 - 1.0;
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut v = g(c(a) - z)? * g(z)? / g(c(a))?;
    if r < 2.0 {
        let phi = |x: Complex64| specfun::phi(r / 2.0, x);
        v *= phi(z * 0.5)? * phi((c(p) - z) * 0.5)? / phi(c(p / 2.0))?;
    }
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic with the asymptotic 1% critical
/// value `1.628·√((n+m)/(nm))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
}

impl KsResult {
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical
    }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Statistics("empty sample in KS test".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(KsResult { statistic: d, critical: 1.628 * ((n + m) / (n * m)).sqrt() })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn within(est: &MCEstimate, reference: Complex64, k: f64) -> bool {
        est.sigma_from(reference) <= k
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s = SampleStream::new(7);
        let a: Vec<u64> = (0..4).map(|_| s.child(3).rng().gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = s.child(3).rng().gen();
        let y: u64 = s.child(4).rng().gen();
        let z: u64 = SampleStream::new(8).child(3).rng().gen();
        assert!(x != y && x != z);
        assert_ne!(s.named("a").key(), s.named("b").key());
    }

    #[test]
    fn split_streams_are_uncorrelated() {
        let n = 100_000;
        let streams = SampleStream::new(1).split(3);
        let draws: Vec<Vec<f64>> = streams
            .iter()
            .map(|s| {
                let mut r = s.rng();
                (0..n).map(|_| sample_gaussian(&mut r)).collect()
            })
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let corr: f64 = draws[i].iter().zip(&draws[j]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
                assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
            }
        }
    }

    #[test]
    fn constant_moment_is_exact() {
        let rv = ProductRV::new(vec![Factor::plain(Base::Constant(2.0))]).unwrap();
        let e = moment_estimate(&rv, c(3.0), 1000, &SampleStream::new(0)).unwrap();
        assert!((e.mean - 8.0).norm() < 1e-12);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn gaussian_absolute_moment() {
        let rv = ProductRV::new(vec![Factor::plain(Base::Gaussian)]).unwrap();
        let e = moment_estimate(&rv, c(1.0), 200_000, &SampleStream::new(0)).unwrap();
        assert!(within(&e, c((2.0 / std::f64::consts::PI).sqrt()), 4.0), "{e:?}");
    }

    #[test]
    fn positive_stable_laplace_transform() {
        let s = PositiveStable::new(0.5).unwrap();
        let mut rng = SampleStream::new(2).rng();
        let n = 200_000;
        let v: Vec<f64> = (0..n).map(|_| (-s.sample(&mut rng)).exp()).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt() / (n as f64).sqrt();
        assert!((mean - (-1f64).exp()).abs() < 4.0 * sd, "{mean}");
    }

    #[test]
    fn symmetric_stable_forms_agree() {
        let n = 20_000;
        let mut r1 = SampleStream::new(3).rng();
        let mut r2 = SampleStream::new(4).rng();
        let a: Vec<f64> = (0..n).map(|_| SymmetricStable::new(1.5).unwrap().sample(&mut r1)).collect();
        let b: Vec<f64> = (0..n).map(|_| SymmetricStableProduct::new(1.5).unwrap().sample(&mut r2)).collect();
        assert!(ks_two_sample(&a, &b).unwrap().passes());
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..1000).map(|i| i as f64 + 300.0).collect();
        assert!(!ks_two_sample(&a, &b).unwrap().passes());
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    }

    #[test]
    fn existence_h_closed_form_and_strip() {
        let h = build_existence_h(1.5).unwrap();
        assert_eq!(h.moment().strip().upper(), 2.0);
        let refs = [(0.5, 1.308_936_097_291_733_1), (-1.0, 0.726_134_374_437_174_4), (1.0, 1.957_534_687_952_940_9)];
        for (z, v) in refs {
            assert!((h.moment().eval(c(z)).unwrap() - v).norm() < 1e-12);
            assert!((existence_h_moment(1.5, c(z)).unwrap() - v).norm() < 1e-12);
        }
    }

    #[test]
    fn existence_h_degenerates_at_one() {
        let h = build_existence_h(1.0).unwrap();
        assert!(!h.is_weighted());
        let mut rng = SampleStream::new(0).rng();
        for _ in 0..10 {
            let d = h.sample(&mut rng);
            assert!((d.value() - 2.0).abs() < 1e-15 && d.weight() == 1.0);
        }
    }

    #[test]
    fn h_moment_matches_product_of_factors() {
        for (m, p, q, r, z) in [(2, -0.5, 1.5, 2.0, 0.7), (1, 0.5, 1.5, 1.8, 0.3), (1, 0.0, 1.2, 1.9, -0.4)] {
            let h = build_h(m, p, q, r).unwrap();
            let a = h.moment().eval(c(z)).unwrap();
            let b = h_moment(m, p, r, c(z)).unwrap();
            assert!((a - b).norm() < 1e-11 * b.norm(), "{a} {b}");
        }
        let v = h_moment(2, -0.5, 2.0, c(0.7)).unwrap();
        assert!((v.re - 1.136_129_192_726_067_5).abs() < 1e-12);
        let v = h_moment(1, 0.5, 1.8, c(0.3)).unwrap();
        assert!((v.re - 0.941_795_842_511_292).abs() < 1e-12);
        assert!((h_moment(1, 0.5, 1.8, c(0.5)).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn h_strip() {
        let h = build_h(1, 0.5, 1.5, 1.8).unwrap();
        assert_eq!(h.moment().strip().lower(), -1.0);
        assert_eq!(h.moment().strip().upper(), 1.5);
        assert!(build_h(1, 0.6, 1.5, 2.0).is_err());
    }

    #[test]
    fn weighted_moment_of_existence_h() {
        let h = build_existence_h(1.5).unwrap();
        let e = moment_estimates(&h, &[c(0.5), c(-1.0)], 200_000, &SampleStream::new(5)).unwrap();
        assert!(within(&e[0], c(1.308_936_097_291_733_1), 4.0), "{:?}", e[0]);
        assert!(within(&e[1], c(0.726_134_374_437_174_4), 4.0), "{:?}", e[1]);
        assert!(e[0].weighted && e[0].ess > 0.01 * 200_000.0);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let h = build_h(2, -0.5, 1.5, 2.0).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| moment_estimate(&h, c(0.7), 20_000, &SampleStream::new(9)).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(2));
        assert_eq!(one, run(8));
    }

    #[test]
    fn outside_strip_is_rejected() {
        let rv = ProductRV::new(vec![Factor::plain(Base::SymmetricStable(1.0))]).unwrap();
        assert!(moment_estimate(&rv, c(1.0), 10, &SampleStream::new(0)).is_err());
        assert!(ProductRV::new(vec![Factor::tilted(Base::PositiveStable(0.5), 1.0, 0.7)]).is_err());
    }
}
