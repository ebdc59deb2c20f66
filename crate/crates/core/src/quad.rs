//! Double-exponential quadrature on the half line.
//!
//! Every integral in the crate is a Mellin-type integral over `t ∈ (0, ∞)`.
//! Written in the log variable `x = ln t` it becomes an integral over the real
//! line whose integrand decays exponentially in both directions and may have a
//! kink or an integrable algebraic singularity at `x = 0` (the point `t = 1`).
//! We therefore split at `x = 0` and integrate each half line with the
//! substitution `x = exp(u - e^{-u})`, which clusters nodes double
//! exponentially at the origin and turns exponential decay at infinity into
//! double-exponential decay. The trapezoid rule in `u` is refined by halving
//! the step; the difference between successive levels is the error estimate.

use num_complex::Complex64;

use crate::{Error, Result};

/// Initial step in the transformed variable.
const INITIAL_STEP: f64 = 0.5;
/// Tail terms below this fraction of the largest term end the walk.
const TAIL_RATIO: f64 = 1e-18;
/// Hard limit on the transformed variable to the right.
const U_MAX: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeQuadrature {
    /// Absolute tolerance on the level-difference error estimate.
    pub abs_tol: f64,
    /// Relative tolerance on the level-difference error estimate.
    pub rel_tol: f64,
    /// Refinement levels after the initial one (each halves the step).
    pub max_level: u32,
    pub min_level: u32,
}

impl Default for DeQuadrature {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_level: 8, min_level: 3 }
    }
}

/// Result of a quadrature: value and an a-posteriori absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadValue {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for QuadValue {
    type Output = QuadValue;
    fn add(self, rhs: QuadValue) -> QuadValue {
        QuadValue {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

#[inline]
fn node(u: f64) -> (f64, f64) {
    let e = (-u).exp();
    let x = (u - e).exp();
    (x, x * (1.0 + e))
}

impl DeQuadrature {
    pub fn with_tolerance(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }

    /// `∫_0^∞ f(x) dx` for an integrand with at most an integrable algebraic
    /// singularity at `0` and exponential decay at infinity.
    ///
    /// A non-finite integrand value at a representable node is reported as a
    /// `QuadratureError`, as is failure to meet the tolerance.
    pub fn half_line<F>(&self, f: F) -> Result<QuadValue>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut evaluations = 0usize;
        let mut eval = |u: f64| -> Result<Option<Complex64>> {
            let (x, dx) = node(u);
            if x == 0.0 || !x.is_finite() || dx == 0.0 || !dx.is_finite() {
                return Ok(None);
            }
            evaluations += 1;
            let v = f(x);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Quadrature(format!("non-finite integrand {v} at x = {x:e}")));
            }
            Ok(Some(v * dx))
        };

        // Level 0 fixes the truncation window [k_lo, k_hi] in units of the initial step.
        let mut sum = eval(0.0)?.unwrap_or_default();
        let mut scale = sum.norm();
        let (k_hi, right_tail) = walk(1, &mut eval, &mut sum, &mut scale)?;
        let (k_lo, left_tail) = walk(-1, &mut eval, &mut sum, &mut scale)?;
        let truncation = (right_tail + left_tail) * INITIAL_STEP;

        let mut h = INITIAL_STEP;
        let mut estimate = sum * h;
        let mut error = f64::INFINITY;
        let mut level = 0;
        while level < self.max_level {
            level += 1;
            h *= 0.5;
            let lo = k_lo as f64 * INITIAL_STEP;
            let hi = k_hi as f64 * INITIAL_STEP;
            let mut u = lo + h;
            while u < hi {
                if let Some(term) = eval(u)? {
                    sum += term;
                }
                u += 2.0 * h;
            }
            let next = sum * h;
            error = (next - estimate).norm();
            estimate = next;
            if level >= self.min_level && error <= self.abs_tol.max(self.rel_tol * estimate.norm()) {
                break;
            }
        }
        let error = error + truncation;
        let out = QuadValue { value: estimate, error, evaluations };
        if error > self.abs_tol.max(self.rel_tol * estimate.norm()) {
            return Err(Error::Quadrature(format!(
                "no convergence: estimate {estimate}, error {error:e} after {level} levels"
            )));
        }
        Ok(out)
    }

    /// `∫_{-∞}^{∞} g(x) dx` split at the origin; `g` may be non-smooth at `0`.
    pub fn real_line_split<F>(&self, g: F) -> Result<QuadValue>
    where
        F: Fn(f64) -> Complex64,
    {
        let right = self.half_line(&g)?;
        let left = self.half_line(|x| g(-x))?;
        Ok(right + left)
    }
}

/// Walks outward from the origin on the initial grid until three consecutive
/// terms are negligible or the node leaves the representable range. Returns the
/// last index used and the magnitude of the last term that was not negligible
/// (zero when the walk ended on negligible terms).
fn walk<E>(dir: i64, eval: &mut E, sum: &mut Complex64, scale: &mut f64) -> Result<(i64, f64)>
where
    E: FnMut(f64) -> Result<Option<Complex64>>,
{
    let mut k = 0i64;
    let mut quiet = 0;
    let mut last = 0.0f64;
    loop {
        let u = (k + dir) as f64 * INITIAL_STEP;
        if u > U_MAX {
            return Ok((k, last.max(f64::MIN_POSITIVE)));
        }
        let Some(term) = eval(u)? else {
            return Ok((k, if quiet >= 1 { 0.0 } else { last }));
        };
        k += dir;
        *sum += term;
        let m = term.norm();
        *scale = scale.max(m);
        if m <= TAIL_RATIO * *scale {
            quiet += 1;
            if quiet >= 3 {
                return Ok((k, 0.0));
            }
        } else {
            quiet = 0;
            last = m;
        }
    }
}

/// Fixed node set on the half line for integrands evaluated in bulk (nested
/// Monte Carlo). Nodes on the doubled step are flagged so that a coarse
/// estimate comes for free.
#[derive(Debug, Clone)]
pub struct HalfLineRule {
    pub step: f64,
    /// `(x, weight, on_coarse_grid)` with `weight = step · dx/du`.
    pub nodes: Vec<(f64, f64, bool)>,
}

impl HalfLineRule {
    /// Nodes `u = k·step` for `u_min ≤ u ≤ u_max`.
    pub fn new(step: f64, u_min: f64, u_max: f64) -> Self {
        let k_min = (u_min / step).ceil() as i64;
        let k_max = (u_max / step).floor() as i64;
        let nodes = (k_min..=k_max)
            .filter_map(|k| {
                let (x, dx) = node(k as f64 * step);
                (x > 0.0 && x.is_finite() && dx.is_finite()).then_some((x, step * dx, k % 2 == 0))
            })
            .collect();
        Self { step, nodes }
    }
}
