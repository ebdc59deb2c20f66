//! Numerical Mellin transforms `Mf(z) = ∫₀^∞ t^{-1-z} f(t) dt`.
//!
//! All integrals are taken in `x = ln t`, split at `t = 1`.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::domain;
use crate::quad::{DeQuadrature, HalfLineRule};
use crate::stochastic::{weighted_estimates, Draw, ProductRV, SampleStream};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinResult {
    pub value: Complex64,
    /// `quad_error + 4·stderr`.
    pub abs_error_estimate: f64,
    /// Monte Carlo standard error (zero for deterministic integrands).
    pub stderr: f64,
    pub quad_error: f64,
}

/// `Mf(z)` by double-exponential quadrature.
///
/// When the quadrature fails, the strip of convergence is estimated and a
/// `DomainError` is returned if `z` lies outside it.
pub fn mellin<F>(f: F, z: Complex64, tol: f64) -> Result<MellinResult>
where
    F: Fn(f64) -> f64,
{
    mellin_complex(|t| Complex64::new(f(t), 0.0), z, tol).map_err(|e| {
        let strip = detect_strip(&f, &ProbeGrid::default());
        if !strip.is_empty() && !(z.re > strip.lower && z.re < strip.upper) {
            domain!("Re z = {} outside the detected strip ({}, {}): {e}", z.re, strip.lower, strip.upper)
        } else {
            e
        }
    })
}

/// `Mf(z)` for a complex-valued `f`.
pub fn mellin_complex<F>(f: F, z: Complex64, tol: f64) -> Result<MellinResult>
where
    F: Fn(f64) -> Complex64,
{
    let q = DeQuadrature::with_tolerance(tol).real_line_split(|x| {
        let v = f(x.exp());
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            (-z * x).exp() * v
        }
    })?;
    Ok(MellinResult { value: q.value, abs_error_estimate: q.error, stderr: 0.0, quad_error: q.error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Certain,
    Numeric,
}

/// Bracketing of the interval of convergence `lower < Re z < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripEstimate {
    pub lower: f64,
    pub upper: f64,
    pub confidence: Confidence,
}

impl StripEstimate {
    fn empty() -> Self {
        Self { lower: f64::NAN, upper: f64::NAN, confidence: Confidence::Numeric }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }
}

/// Where the tails of `f` are probed: `decades` decades starting at
/// `10^small_start` near zero and at `10^large_start` near infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGrid {
    pub small_start: f64,
    pub large_start: f64,
    pub decades: f64,
    pub points_per_decade: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self { small_start: -8.0, large_start: 6.0, decades: 2.0, points_per_decade: 10 }
    }
}

enum Tail {
    Power { slope: f64, exact: bool },
    Vanishing { exact: bool },
    Unknown,
}

/// Least-squares slope of `ln|f|` against `ln t` over one window.
fn fit_tail<F: Fn(f64) -> f64>(f: &F, start: f64, grid: &ProbeGrid, towards_infinity: bool) -> Tail {
    let k = (grid.decades * grid.points_per_decade as f64).round() as usize;
    let mut pts = Vec::with_capacity(k + 1);
    let mut zeros = 0;
    for i in 0..=k {
        let lt = (start + grid.decades * i as f64 / k as f64) * std::f64::consts::LN_10;
        let v = f(lt.exp());
        if !v.is_finite() {
            return Tail::Unknown;
        }
        if v == 0.0 {
            zeros += 1;
        } else {
            pts.push((lt, v.abs().ln()));
        }
    }
    if zeros == k + 1 {
        return Tail::Vanishing { exact: true };
    }
    if pts.len() < 3 {
        return Tail::Unknown;
    }
    let slope_of = |pts: &[(f64, f64)]| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let resid = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).abs()).fold(0.0, f64::max);
        (slope, resid)
    };
    let (slope, resid) = slope_of(&pts);
    let half = pts.len() / 2;
    let (s1, _) = slope_of(&pts[..=half]);
    let (s2, _) = slope_of(&pts[half..]);
    // a slope that keeps steepening in the direction of the tail means faster than any power
    let steepening = if towards_infinity { s1 - s2 } else { s2 - s1 };
    if zeros > 0 || (steepening > 0.5 && slope.abs() > 5.0) {
        return Tail::Vanishing { exact: false };
    }
    Tail::Power { slope, exact: resid < 1e-9 }
}

/// Estimates the interval of convergence of `Mf` from power-law fits of the
/// tails: `f ~ t^a` at `0` bounds `Re z < a`, `f ~ t^b` at `∞` bounds
/// `Re z > b`. Faster-than-power decay gives an infinite bound.
pub fn detect_strip<F: Fn(f64) -> f64>(f: F, grid: &ProbeGrid) -> StripEstimate {
    let at_zero = fit_tail(&f, grid.small_start, grid, false);
    let at_inf = fit_tail(&f, grid.large_start, grid, true);
    let (upper, exact_up) = match at_zero {
        Tail::Power { slope, exact } => (slope, exact),
        Tail::Vanishing { exact } => (f64::INFINITY, exact),
        Tail::Unknown => return StripEstimate::empty(),
    };
    let (lower, exact_lo) = match at_inf {
        Tail::Power { slope, exact } => (slope, exact),
        Tail::Vanishing { exact } => (f64::NEG_INFINITY, exact),
        Tail::Unknown => return StripEstimate::empty(),
    };
    if lower >= upper {
        return StripEstimate::empty();
    }
    let confidence = if exact_up && exact_lo { Confidence::Certain } else { Confidence::Numeric };
    StripEstimate { lower, upper, confidence }
}

/// Quadrature grid for nested Monte Carlo: the same double-exponential nodes
/// on both sides of `t = 1`.
#[derive(Debug, Clone)]
pub struct NestedRule {
    rule: HalfLineRule,
}

impl Default for NestedRule {
    fn default() -> Self {
        Self::new(0.125, -4.0, 4.0)
    }
}

impl NestedRule {
    pub fn new(step: f64, u_min: f64, u_max: f64) -> Self {
        Self { rule: HalfLineRule::new(step, u_min, u_max) }
    }

    /// `(x, weight, on_coarse_grid)` over the whole line.
    fn nodes(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        self.rule.nodes.iter().flat_map(|&(x, w, c)| [(x, w, c), (-x, w, c)])
    }

    pub fn len(&self) -> usize {
        2 * self.rule.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.nodes.is_empty()
    }
}

/// `∫₀^∞ t^{-z-1} E[family(t, X)] dt + E[extra(z, X)]` for each `z`, by
/// quadrature of per-sample integrals on a fixed node set. Every node sees
/// the same draws (common random numbers), so the integrand is smooth in `t`.
///
/// `scale(X) = λ` moves the nodes of each sample to `t = s/λ` (the integral
/// picks up `λ^z`); families of the form `F(t·λ)` with a kink at `tλ = 1`
/// then have the kink on the split point of the grid. Use `|_| 1.0` for a
/// grid shared by all samples.
///
/// The Monte Carlo error is the delta-method error of the per-sample integral;
/// the quadrature error is the gap between the full grid and its even
/// sub-grid.
#[allow(clippy::too_many_arguments)]
pub fn mellin_of_expectation_corrected<F, E, S>(
    family: F,
    extra: E,
    scale: S,
    rv: &ProductRV,
    zs: &[Complex64],
    n: usize,
    stream: &SampleStream,
    rule: &NestedRule,
) -> Result<Vec<MellinResult>>
where
    F: Fn(f64, &Draw) -> f64 + Sync,
    E: Fn(Complex64, &Draw) -> Complex64 + Sync,
    S: Fn(&Draw) -> f64 + Sync,
{
    let integrand = NestedIntegrand {
        sample: |rng: &mut ChaCha8Rng| {
            let d = rv.sample(rng);
            (d, d.weight())
        },
        family: |node: &NestedNode, d: &Draw| family(node.t, d),
        extra,
        scale,
        weighted: rv.is_weighted(),
    };
    nested_mellin(&integrand, zs, n, stream, rule)
}

/// A quadrature node of a nested transform: the grid point `s = e^{ln_s}` and
/// the argument `t = s/λ` of the sample it is used for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedNode {
    pub t: f64,
    pub s: f64,
    pub ln_s: f64,
}

/// The pieces of a nested Mellin transform over an arbitrary sample type `D`;
/// see [`mellin_of_expectation_corrected`] for the meaning of each part.
pub struct NestedIntegrand<G, F, E, S> {
    /// One draw and its importance weight.
    pub sample: G,
    /// The integrand at `node.t`; families of `t·λ` may use `node.s` and
    /// `node.ln_s` directly.
    pub family: F,
    pub extra: E,
    pub scale: S,
    pub weighted: bool,
}

/// `∫₀^∞ t^{-z-1} E[family(t, X)] dt + E[extra(z, X)]` for each `z`.
pub fn nested_mellin<D, G, F, E, S>(
    integrand: &NestedIntegrand<G, F, E, S>,
    zs: &[Complex64],
    n: usize,
    stream: &SampleStream,
    rule: &NestedRule,
) -> Result<Vec<MellinResult>>
where
    G: Fn(&mut ChaCha8Rng) -> (D, f64) + Sync,
    F: Fn(&NestedNode, &D) -> f64 + Sync,
    E: Fn(Complex64, &D) -> Complex64 + Sync,
    S: Fn(&D) -> f64 + Sync,
{
    let NestedIntegrand { sample, family, extra, scale, weighted } = integrand;
    let nodes: Vec<(f64, f64, bool)> = rule.nodes().collect();
    // kernel[j][k] = weight_j · e^{-z_k x_j}
    let kernel: Vec<Vec<Complex64>> =
        nodes.iter().map(|&(x, w, _)| zs.iter().map(|z| (-z * x).exp() * w).collect()).collect();
    let ss: Vec<f64> = nodes.iter().map(|n| n.0.exp()).collect();
    let k = zs.len();
    let est = weighted_estimates(stream, n, 2 * k, *weighted, |rng, out| {
        let (d, weight) = sample(rng);
        let lambda = scale(&d);
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for ((node, s), ker) in nodes.iter().zip(&ss).zip(&kernel) {
            let v = family(&NestedNode { t: s / lambda, s: *s, ln_s: node.0 }, &d);
            if v == 0.0 {
                continue;
            }
            for i in 0..k {
                let term = ker[i] * v;
                out[i] += term;
                if node.2 {
                    out[k + i] += term * 2.0;
                }
            }
        }
        let ln_lambda = lambda.ln();
        for (i, z) in zs.iter().enumerate() {
            if ln_lambda != 0.0 {
                let s = (z * ln_lambda).exp();
                out[i] *= s;
                out[k + i] *= s;
            }
            let e = extra(*z, &d);
            out[i] += e;
            out[k + i] += e;
        }
        weight
    })?;
    Ok((0..k)
        .map(|i| {
            let (fine, coarse) = (est[i], est[k + i]);
            let quad_error = (fine.mean - coarse.mean).norm();
            MellinResult {
                value: fine.mean,
                abs_error_estimate: quad_error + 4.0 * fine.stderr,
                stderr: fine.stderr,
                quad_error,
            }
        })
        .collect())
}

/// `∫₀^∞ t^{-z-1} E[family(t, X)] dt` for each `z`.
pub fn mellin_of_expectation<F>(
    family: F,
    rv: &ProductRV,
    zs: &[Complex64],
    n: usize,
    stream: &SampleStream,
    rule: &NestedRule,
) -> Result<Vec<MellinResult>>
where
    F: Fn(f64, &Draw) -> f64 + Sync,
{
    mellin_of_expectation_corrected(family, |_, _| Complex64::new(0.0, 0.0), |_| 1.0, rv, zs, n, stream, rule)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::stochastic::{build_existence_h, Base, Factor};
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn classical_transforms() {
        let v = mellin(|t| (-t).exp(), c(-0.5), 1e-10).unwrap();
        assert!((v.value.re - PI.sqrt()).abs() < 1e-10);
        let v = mellin(|t| 1.0 / (1.0 + t), c(-0.5), 1e-10).unwrap();
        assert!((v.value.re - PI).abs() < 1e-10);
        let v = mellin(|t| 1.0 / t.max(1.0), c(-0.5), 1e-10).unwrap();
        assert!((v.value.re - 4.0).abs() < 1e-10);
    }

    #[test]
    fn divergence_is_a_domain_error() {
        let e = mellin(|t| 1.0 / (1.0 + t), c(0.5), 1e-10).unwrap_err();
        assert!(matches!(e, crate::Error::Domain(_)), "{e}");
    }

    #[test]
    fn strips_from_tail_fits() {
        let s = detect_strip(|t| (-t).exp(), &ProbeGrid::default());
        assert_eq!(s.lower, f64::NEG_INFINITY);
        assert!(s.upper.abs() < 0.1);
        let s = detect_strip(|t| 1.0 / (1.0 + t), &ProbeGrid::default());
        assert!((s.lower + 1.0).abs() < 0.1 && s.upper.abs() < 0.1, "{s:?}");
        let s = detect_strip(|t| if t <= 1.0 { t.powf(0.3) } else { 0.0 }, &ProbeGrid::default());
        assert!((s.upper - 0.3).abs() < 0.1 && s.lower == f64::NEG_INFINITY);
        assert_eq!(s.confidence, Confidence::Certain);
        assert!(detect_strip(|t| t, &ProbeGrid::default()).is_empty());
    }

    #[test]
    fn nested_with_deterministic_family() {
        let one = ProductRV::new(vec![Factor::plain(Base::Constant(1.0))]).unwrap();
        let r = mellin_of_expectation(|t, _| 1.0 / t.max(1.0), &one, &[c(-0.5)], 100, &SampleStream::new(0), &NestedRule::default())
            .unwrap();
        assert!((r[0].value.re - 4.0).abs() < 1e-8, "{r:?}");
        assert_eq!(r[0].stderr, 0.0);
    }

    #[test]
    fn nested_with_degenerate_h_is_a_scaled_transform() {
        // h ≡ 2: the transform of f(2t) is 2^z times that of f
        let h = build_existence_h(1.0).unwrap();
        let p = 0.5;
        let f = |t: f64| (1.0 + t).powf(p) - t.max(1.0).powf(p);
        let z = c(0.3);
        let base = mellin(f, z, 1e-10).unwrap().value;
        let zero = |_, _: &Draw| c(0.0);
        let r = mellin_of_expectation_corrected(
            |t, d| f(t * d.value()),
            zero,
            |d| d.value(),
            &h,
            &[z],
            64,
            &SampleStream::new(0),
            &NestedRule::default(),
        )
        .unwrap();
        assert!((r[0].value - base * 2f64.powf(0.3)).norm() < 1e-9, "{r:?}");
        // on the shared grid the kink at t = 1/2 costs accuracy, and the estimate says so
        let r = mellin_of_expectation(|t, d| f(t * d.value()), &h, &[z], 64, &SampleStream::new(0), &NestedRule::default())
            .unwrap();
        assert!((r[0].value - base * 2f64.powf(0.3)).norm() < r[0].quad_error, "{r:?}");
    }
}
