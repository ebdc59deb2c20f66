//! Normalized absolute norms on the plane and their transforms
//!
//! * `F_N(w, z) = ∫₀^∞ t^{-z-1} N(1,t)^{w+z} dt` on `Re w, Re z < 0`,
//! * `F̃_N(w, z)`, the same integral with `max{1,t}^{w+z}` subtracted, which
//!   converges on `Re w < s`, `Re z < r` and gives the continuation
//!   `F_N = F̃_N − 1/w − 1/z`,
//! * `M_{p,N}(z) = F_N(p − z, z)`, the Mellin transform of `N(1,t)^p`.
//!
//! `ℓ_q` and `ℓ_∞` have closed forms; any other norm goes through quadrature
//! in the variable `x = ln t`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::domain;
use crate::quad::{DeQuadrature, QuadValue};
use crate::specfun::{beta, AnalyticStrip};
use crate::{Error, Result};

/// Distance from `0` below which `w` or `z` is treated as sitting on the pole.
const POLE_TOLERANCE: f64 = 1e-12;
/// Radius around a removable point of the ratio inside which extrapolation is used.
const REMOVABLE_RADIUS: f64 = 1e-6;
/// Richardson step at removable points.
const RICHARDSON_STEP: f64 = 1e-3;

/// `excess(t, swapped)` is `N(1,t) − 1` (or `N(t,1) − 1` when `swapped`) for
/// `t ∈ [0, 1]`. Storing the excess keeps `ln N` accurate where `N ≈ 1`.
type ExcessFn = dyn Fn(f64, bool) -> f64 + Send + Sync;

/// A user-supplied absolute norm with certified smoothness exponents:
/// `N(1,t)^r ≤ 1 + C t^r` and `N(t,1)^s ≤ 1 + C′ t^s` for `t ∈ (0, 1]`.
///
/// The norm is described by its values on the boundary of the unit square,
/// which determine it by homogeneity.
#[derive(Clone)]
pub struct CustomNorm {
    name: String,
    excess: Arc<ExcessFn>,
    r: f64,
    s: f64,
    c: f64,
    c_prime: f64,
    symmetric: bool,
}

impl CustomNorm {
    /// Builds the norm and spot-checks normalization, monotonicity and both
    /// certificates.
    pub fn new(
        name: impl Into<String>,
        excess: impl Fn(f64, bool) -> f64 + Send + Sync + 'static,
        r: f64,
        s: f64,
        c: f64,
        c_prime: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !(r >= 1.0 && s >= 1.0 && r.is_finite() && s.is_finite()) {
            return Err(domain!("custom norm {name}: exponents must lie in [1, ∞), got r = {r}, s = {s}"));
        }
        if !(c > 0.0 && c_prime > 0.0) {
            return Err(domain!("custom norm {name}: constants must be positive"));
        }
        let mut norm = Self { name, excess: Arc::new(excess), r, s, c, c_prime, symmetric: false };
        norm.verify()?;
        norm.symmetric = (0..=20).all(|k| {
            let t = 0.05 * k as f64;
            ((norm.excess)(t, false) - (norm.excess)(t, true)).abs() <= 1e-15
        });
        Ok(norm)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.abs(), b.abs());
        if a >= b {
            if a == 0.0 {
                return 0.0;
            }
            a * (1.0 + (self.excess)(b / a, false))
        } else {
            b * (1.0 + (self.excess)(a / b, true))
        }
    }

    fn verify(&self) -> Result<()> {
        let n = &self.name;
        for (a, b) in [(1.0, 0.0), (0.0, 1.0)] {
            let v = self.eval(a, b);
            if (v - 1.0).abs() > 1e-12 {
                return Err(domain!("custom norm {n} is not normalized: N({a},{b}) = {v}"));
            }
        }
        for k in 0..=60 {
            let t = 10f64.powf(-6.0 * k as f64 / 60.0);
            let lhs = self.eval(1.0, t).powf(self.r);
            if lhs > 1.0 + self.c * t.powf(self.r) + 1e-12 {
                return Err(domain!("custom norm {n} violates N(1,t)^r ≤ 1 + C t^r at t = {t}"));
            }
            let lhs = self.eval(t, 1.0).powf(self.s);
            if lhs > 1.0 + self.c_prime * t.powf(self.s) + 1e-12 {
                return Err(domain!("custom norm {n} violates N(t,1)^s ≤ 1 + C′ t^s at t = {t}"));
            }
        }
        // deterministic quasi-random quadruples for the monotonicity spot test
        let mut u = 0.5f64;
        let mut next = || {
            u = (u + 0.618_033_988_749_894_9).fract();
            u * 4.0
        };
        for _ in 0..200 {
            let (s, t) = (next(), next());
            let (a, b) = (s * next() / 4.0, t * next() / 4.0);
            if self.eval(a, b) > self.eval(s, t) + 1e-12 {
                return Err(domain!("custom norm {n} is not monotone at ({a},{b}) ≤ ({s},{t})"));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CustomNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNorm")
            .field("name", &self.name)
            .field("r", &self.r)
            .field("s", &self.s)
            .field("c", &self.c)
            .field("c_prime", &self.c_prime)
            .finish_non_exhaustive()
    }
}

/// A normalized absolute norm on the plane.
#[derive(Debug, Clone)]
pub enum AbsoluteNorm {
    Lq(f64),
    Linf,
    Custom(CustomNorm),
}

/// Smoothness exponents and constants of a norm (infinite for `ℓ_∞`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificates {
    pub r: f64,
    pub s: f64,
    pub c: f64,
    pub c_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformMethod {
    ClosedForm,
    Quadrature,
    RegularizedContinuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub method: TransformMethod,
    pub abs_error_estimate: f64,
}

impl TransformValue {
    fn closed(value: Complex64) -> Self {
        let abs_error_estimate = 64.0 * f64::EPSILON * value.norm();
        Self { value, method: TransformMethod::ClosedForm, abs_error_estimate }
    }

    fn from_quad(q: QuadValue, method: TransformMethod) -> Self {
        Self { value: q.value, method, abs_error_estimate: q.error.max(f64::EPSILON * q.value.norm()) }
    }
}

/// Names of the custom norms understood by [`AbsoluteNorm::parse`].
pub const CUSTOM_NORMS: &[&str] = &["mean-l2-l4", "mean-l1.5-l3", "max-l4-skew-l2"];

impl AbsoluteNorm {
    pub fn lq(q: f64) -> Result<Self> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(domain!("ℓ_q needs 1 ≤ q < ∞, got {q}"));
        }
        Ok(Self::Lq(q))
    }

    /// A registered custom norm by name (see [`CUSTOM_NORMS`]).
    pub fn custom(name: &str) -> Result<Self> {
        // (1 + t^q)^{1/q} − 1
        let lq = |q: f64, t: f64| (t.powf(q).ln_1p() / q).exp_m1();
        let norm = match name {
            // average of ℓ₂ and ℓ₄; bounded by ℓ₂, so r = s = 2 with C = 1
            "mean-l2-l4" => CustomNorm::new(name, move |t, _| 0.5 * (lq(2.0, t) + lq(4.0, t)), 2.0, 2.0, 1.0, 1.0),
            "mean-l1.5-l3" => {
                CustomNorm::new(name, move |t, _| 0.5 * (lq(1.5, t) + lq(3.0, t)), 1.5, 1.5, 1.0, 1.0)
            }
            // max{ℓ₄(a, b), ℓ₂(a/2, b)}, not symmetric in its arguments
            "max-l4-skew-l2" => CustomNorm::new(
                name,
                move |t, swapped| {
                    let skew = if swapped { lq(2.0, 0.5 * t) } else { (0.25 + t * t).sqrt() - 1.0 };
                    lq(4.0, t).max(skew)
                },
                2.0,
                2.0,
                1.0,
                0.5,
            ),
            _ => return Err(Error::Param(format!("unknown custom norm {name:?}"))),
        }?;
        Ok(Self::Custom(norm))
    }

    /// Parses `lq:<q>`, `linf` or `custom:<name>`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let d = descriptor.trim();
        if d == "linf" {
            return Ok(Self::Linf);
        }
        if let Some(q) = d.strip_prefix("lq:") {
            let q: f64 = q.parse().map_err(|_| Error::Param(format!("bad exponent in {d:?}")))?;
            return Self::lq(q).map_err(|e| Error::Param(e.to_string()));
        }
        if let Some(name) = d.strip_prefix("custom:") {
            return Self::custom(name);
        }
        Err(Error::Param(format!("unrecognized norm descriptor {d:?}")))
    }

    pub fn descriptor(&self) -> String {
        match self {
            Self::Lq(q) => format!("lq:{q}"),
            Self::Linf => "linf".into(),
            Self::Custom(c) => format!("custom:{}", c.name),
        }
    }

    /// `N(|a|, |b|)`.
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.abs(), b.abs());
        match self {
            Self::Lq(q) if *q == 1.0 => a + b,
            Self::Lq(q) if *q == 2.0 => a.hypot(b),
            Self::Lq(q) => {
                let m = a.max(b);
                if m == 0.0 {
                    return 0.0;
                }
                m * ((a / m).powf(*q) + (b / m).powf(*q)).powf(1.0 / q)
            }
            Self::Linf => a.max(b),
            Self::Custom(c) => c.eval(a, b),
        }
    }

    pub fn certificates(&self) -> Certificates {
        match self {
            Self::Lq(q) => Certificates { r: *q, s: *q, c: 1.0, c_prime: 1.0 },
            Self::Linf => Certificates { r: f64::INFINITY, s: f64::INFINITY, c: 1.0, c_prime: 1.0 },
            Self::Custom(c) => Certificates { r: c.r, s: c.s, c: c.c, c_prime: c.c_prime },
        }
    }

    /// `N′(a, b) = N(b, a)`; certificates swap with it.
    pub fn transposed(&self) -> Self {
        match self {
            Self::Custom(c) => {
                let inner = c.excess.clone();
                Self::Custom(CustomNorm {
                    name: format!("{}'", c.name),
                    excess: Arc::new(move |t, swapped| inner(t, !swapped)),
                    r: c.s,
                    s: c.r,
                    c: c.c_prime,
                    c_prime: c.c,
                    symmetric: c.symmetric,
                })
            }
            other => other.clone(),
        }
    }

    /// `ln N(1, e^x)` for `x ≤ 0` and `ln N(e^{-x}, 1)` for `x > 0`; both
    /// vanish as `|x| → ∞`. The second component is the logarithm of the first
    /// when it can be formed without underflow.
    fn excess(&self, x: f64) -> (f64, Option<f64>) {
        match self {
            Self::Lq(q) => {
                let ln_y = -q * x.abs();
                let y = ln_y.exp();
                let e = y.ln_1p() / q;
                // ln(ln(1+y)/q) = ln y − ln q + ln(ln(1+y)/y)
                let ratio = if y < 1e-8 { 1.0 - 0.5 * y } else { y.ln_1p() / y };
                (e, Some(ln_y - q.ln() + ratio.ln()))
            }
            Self::Linf => (0.0, None),
            Self::Custom(c) => {
                let e = (c.excess)((-x.abs()).exp(), x > 0.0).ln_1p();
                (e, (e > 0.0).then(|| e.ln()))
            }
        }
    }

    /// Direct integrand of `F_N` in the variable `x = ln t`.
    fn direct_integrand(&self, w: Complex64, z: Complex64, x: f64) -> Complex64 {
        let (e, _) = self.excess(x);
        let lin = if x <= 0.0 { -z * x } else { w * x };
        (lin + (w + z) * e).exp()
    }

    /// Integrand of `F̃_N` in the variable `x = ln t`.
    fn regularized_integrand(&self, w: Complex64, z: Complex64, x: f64) -> Complex64 {
        let (e, ln_e) = self.excess(x);
        let s = w + z;
        if e == 0.0 || s == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        let lin = if x <= 0.0 { -z * x } else { w * x };
        let a = s * e;
        if a.norm() < 1e-6 {
            if let Some(ln_e) = ln_e {
                // e^{lin}·expm1(a) with expm1(a) = a(1 + a/2 + a²/6 + …), kept in log form
                return (lin + s.ln() + ln_e).exp() * (1.0 + a * 0.5 + a * a / 6.0);
            }
        }
        lin.exp() * expm1(a)
    }

    fn check_pole(w: Complex64, z: Complex64) -> Result<()> {
        if w.norm() < POLE_TOLERANCE || z.norm() < POLE_TOLERANCE {
            return Err(Error::Pole(format!("F_N has a pole at w = {w}, z = {z}")));
        }
        Ok(())
    }

    fn check_region(&self, w: Complex64, z: Complex64) -> Result<()> {
        let c = self.certificates();
        if !(w.re < c.s && z.re < c.r) {
            return Err(domain!("F_N({w}, {z}) needs Re w < {} and Re z < {}", c.s, c.r));
        }
        Ok(())
    }

    /// `F_N(w, z)`, continued to `Re w < s`, `Re z < r`, `w, z ≠ 0`.
    pub fn f(&self, w: Complex64, z: Complex64, tol: f64) -> Result<TransformValue> {
        self.check_region(w, z)?;
        Self::check_pole(w, z)?;
        match self {
            Self::Lq(q) => Ok(TransformValue::closed(beta(-w / *q, -z / *q)? / *q)),
            Self::Linf => Ok(TransformValue::closed(-1.0 / z - 1.0 / w)),
            Self::Custom(_) if w.re < 0.0 && z.re < 0.0 => self.f_quadrature(w, z, tol),
            Self::Custom(_) => {
                let mut v = self.f_reg(w, z, tol)?;
                v.value -= 1.0 / w + 1.0 / z;
                v.method = TransformMethod::RegularizedContinuation;
                Ok(v)
            }
        }
    }

    /// `F_N(w, z)` by direct quadrature, for any norm, on `Re w, Re z < 0`.
    pub fn f_quadrature(&self, w: Complex64, z: Complex64, tol: f64) -> Result<TransformValue> {
        if !(w.re < 0.0 && z.re < 0.0) {
            return Err(domain!("direct F_N quadrature needs Re w, Re z < 0, got w = {w}, z = {z}"));
        }
        let q = DeQuadrature::with_tolerance(tol).real_line_split(|x| self.direct_integrand(w, z, x))?;
        Ok(TransformValue::from_quad(q, TransformMethod::Quadrature))
    }

    /// `F̃_N(w, z)` on `Re w < s`, `Re z < r`: closed form for `ℓ_q` and `ℓ_∞`,
    /// quadrature otherwise.
    pub fn f_reg(&self, w: Complex64, z: Complex64, tol: f64) -> Result<TransformValue> {
        self.check_region(w, z)?;
        match self {
            Self::Linf => Ok(TransformValue::closed(Complex64::new(0.0, 0.0))),
            Self::Lq(q) => {
                Self::check_pole(w, z)?;
                Ok(TransformValue::closed(beta(-w / *q, -z / *q)? / *q + 1.0 / w + 1.0 / z))
            }
            Self::Custom(_) => self.f_reg_quadrature(w, z, tol),
        }
    }

    /// `F̃_N(w, z)` by quadrature of the subtracted integrand, for any norm.
    pub fn f_reg_quadrature(&self, w: Complex64, z: Complex64, tol: f64) -> Result<TransformValue> {
        self.check_region(w, z)?;
        let q = DeQuadrature::with_tolerance(tol).real_line_split(|x| self.regularized_integrand(w, z, x))?;
        Ok(TransformValue::from_quad(q, TransformMethod::Quadrature))
    }

    /// Strip of `M_{p,N}`: `p − s < Re z < r`, minus the poles at `0` and `p`.
    pub fn mellin_strip(&self, p: f64) -> Result<AnalyticStrip> {
        let c = self.certificates();
        if !(p < c.r) {
            return Err(domain!("M_{{p,N}} needs p < r = {}, got p = {p}", c.r));
        }
        AnalyticStrip::new(p - c.s, c.r)
    }

    /// `M_{p,N}(z) = F_N(p − z, z)`.
    pub fn m_p(&self, p: f64, z: Complex64, tol: f64) -> Result<TransformValue> {
        self.mellin_strip(p)?;
        let w = Complex64::new(p, 0.0) - z;
        if let Self::Linf = self {
            Self::check_pole(w, z)?;
            return Ok(TransformValue::closed(p / (z * (z - p))));
        }
        self.f(w, z, tol)
    }

    /// Strip of `z ↦ M_{p,N}(z)/M_{p,2}(z)`: `p − min{s,2} < Re z < min{r,2}`.
    pub fn ratio_strip(&self, p: f64) -> Result<AnalyticStrip> {
        if p == 0.0 {
            return Err(domain!("M_{{0,2}} vanishes identically"));
        }
        let c = self.certificates();
        if !(p < c.r.min(2.0)) {
            return Err(domain!("the ratio needs p < min(r, 2), got p = {p}"));
        }
        AnalyticStrip::new(p - c.s.min(2.0), c.r.min(2.0))
    }

    /// `M_{p,N}(z) / M_{p,2}(z)`, with the removable points `z = 0` and
    /// `z = p` filled in by Richardson extrapolation of symmetric averages.
    pub fn mellin_ratio(&self, p: f64, z: Complex64, tol: f64) -> Result<Complex64> {
        let strip = self.ratio_strip(p)?;
        if !strip.contains(z) {
            return Err(domain!("Re z = {} outside the ratio strip {strip}", z.re));
        }
        for z0 in [0.0, p] {
            let z0 = Complex64::new(z0, 0.0);
            if (z - z0).norm() < REMOVABLE_RADIUS {
                let avg = |h: f64| -> Result<Complex64> {
                    Ok(0.5 * (self.raw_ratio(p, z0 + h, tol)? + self.raw_ratio(p, z0 - h, tol)?))
                };
                let h = RICHARDSON_STEP;
                return Ok((4.0 * avg(h)? - avg(2.0 * h)?) / 3.0);
            }
        }
        self.raw_ratio(p, z, tol)
    }

    fn raw_ratio(&self, p: f64, z: Complex64, tol: f64) -> Result<Complex64> {
        if let Self::Lq(q) = self {
            if *q == 2.0 {
                return Ok(Complex64::new(1.0, 0.0));
            }
        }
        Ok(self.m_p(p, z, tol)?.value / AbsoluteNorm::Lq(2.0).m_p(p, z, tol)?.value)
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Custom(c) => c.symmetric,
            _ => true,
        }
    }
}

impl fmt::Display for AbsoluteNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// `e^a − 1` without cancellation for small `a`.
pub(crate) fn expm1(a: Complex64) -> Complex64 {
    let (re, im) = (a.re, a.im);
    let half = (0.5 * im).sin();
    Complex64::new(re.exp_m1() * im.cos() - 2.0 * half * half, re.exp() * im.sin())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norm_values() {
        assert_eq!(AbsoluteNorm::Lq(2.0).eval(3.0, 4.0), 5.0);
        assert_eq!(AbsoluteNorm::Linf.eval(1.0, -0.5), 1.0);
        assert!((AbsoluteNorm::Lq(1.5).eval(1.0, 1.0) - 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn custom_norms_register() {
        for name in CUSTOM_NORMS {
            let n = AbsoluteNorm::parse(&format!("custom:{name}")).unwrap();
            assert_eq!(n.eval(1.0, 0.0), 1.0);
            assert_eq!(n.eval(0.0, 1.0), 1.0);
        }
        let skew = AbsoluteNorm::custom("max-l4-skew-l2").unwrap();
        assert!(!skew.is_symmetric());
        assert_eq!(skew.transposed().certificates().c, 0.5);
    }

    #[test]
    fn bad_certificates_are_refused() {
        // ℓ₁ does not satisfy an r = 2 certificate with C = 1
        let e = CustomNorm::new("bad", |t, _| t, 2.0, 2.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
    }

    #[test]
    fn closed_forms() {
        let tol = 1e-10;
        let v = AbsoluteNorm::Linf.f(c(-1.0, 0.0), c(-1.0, 0.0), tol).unwrap();
        assert!((v.value - 2.0).norm() < 1e-15);
        let v = AbsoluteNorm::Lq(2.0).f(c(-1.0, 0.0), c(-1.0, 0.0), tol).unwrap();
        assert!((v.value.re - PI / 2.0).abs() < 1e-13);
        let v = AbsoluteNorm::Lq(1.0).f(c(-0.5, 0.0), c(-0.5, 0.0), tol).unwrap();
        assert!((v.value.re - PI).abs() < 1e-13);
        assert_eq!(v.method, TransformMethod::ClosedForm);
    }

    #[test]
    fn quadrature_matches_mpmath() {
        let tol = 1e-10;
        let v = AbsoluteNorm::Lq(2.0).f_quadrature(c(-1.0, 0.0), c(-1.0, 0.0), tol).unwrap();
        assert!((v.value.re - PI / 2.0).abs() < 1e-9, "{v:?}");
        assert!(v.abs_error_estimate > 0.0);
        let v = AbsoluteNorm::Lq(1.5).f_reg_quadrature(c(0.5, 0.0), c(0.5, 0.0), tol).unwrap();
        assert!((v.value.re - 1.262_146_376_081_097_1).abs() < 1e-8, "{v:?}");
        let v = AbsoluteNorm::Lq(1.5).f_reg(c(0.5, 0.0), c(0.5, 0.0), tol).unwrap();
        assert!((v.value.re - 1.262_146_376_081_097_1).abs() < 1e-12);
    }

    #[test]
    fn regularized_linf_is_zero() {
        let v = AbsoluteNorm::Linf.f_reg(c(0.7, 0.2), c(-3.0, 1.0), 1e-10).unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
        let v = AbsoluteNorm::Linf.f_reg_quadrature(c(0.7, 0.2), c(-3.0, 1.0), 1e-10).unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
    }

    #[test]
    fn mellin_power_values() {
        let tol = 1e-10;
        let v = AbsoluteNorm::Linf.m_p(-1.0, c(-0.5, 0.0), tol).unwrap();
        assert!((v.value.re - 4.0).abs() < 1e-14);
        let v = AbsoluteNorm::Lq(1.0).m_p(-1.0, c(-0.5, 0.0), tol).unwrap();
        assert!((v.value.re - PI).abs() < 1e-13);
        let v = AbsoluteNorm::Lq(3.0).m_p(-1.0, c(-0.5, 0.0), tol).unwrap();
        assert!((v.value.re - 3.855_242_593_319_996_5).abs() < 1e-12);
        let v = AbsoluteNorm::Lq(3.0).m_p(-1.0, c(1.5, 0.0), tol).unwrap();
        assert!((v.value.re + 0.497_889_466_814_791_2).abs() < 1e-12);
    }

    #[test]
    fn custom_norm_continuation_is_consistent() {
        let n = AbsoluteNorm::custom("mean-l2-l4").unwrap();
        let (w, z) = (c(-0.4, 0.3), c(-0.7, -0.1));
        let direct = n.f_quadrature(w, z, 1e-10).unwrap().value;
        let reg = n.f_reg(w, z, 1e-10).unwrap().value;
        assert!((reg - direct - 1.0 / w - 1.0 / z).norm() < 1e-8);
        let v = n.f(c(1.2, 0.0), c(-0.3, 0.0), 1e-10).unwrap();
        assert_eq!(v.method, TransformMethod::RegularizedContinuation);
        assert!((v.value.re - 2.909_048_755_311_497).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn ratio_values() {
        let tol = 1e-10;
        let r = AbsoluteNorm::Lq(3.0).mellin_ratio(-1.0, c(-0.5, 0.0), tol).unwrap();
        assert!((r.re - 1.039_667_560_459_686_7).abs() < 1e-12);
        let r = AbsoluteNorm::Lq(3.0).mellin_ratio(-1.0, c(1.5, 0.0), tol).unwrap();
        assert!((r.re - 0.402_806_968_546_279_4).abs() < 1e-12);
        assert_eq!(AbsoluteNorm::Lq(2.0).mellin_ratio(-1.0, c(0.3, 0.1), tol).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn ratio_is_continuous_at_removable_points() {
        let n = AbsoluteNorm::Lq(1.5);
        for z0 in [0.0, -1.0] {
            let at = n.mellin_ratio(-1.0, c(z0, 0.0), 1e-10).unwrap();
            let near = n.mellin_ratio(-1.0, c(z0 + 1e-5, 0.0), 1e-10).unwrap();
            assert!((at - near).norm() < 1e-4 * at.norm(), "{at} {near}");
        }
    }

    #[test]
    fn region_and_poles() {
        let n = AbsoluteNorm::Lq(1.5);
        assert!(matches!(n.f(c(1.6, 0.0), c(-1.0, 0.0), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(n.f(c(0.0, 0.0), c(-1.0, 0.0), 1e-8), Err(Error::Pole(_))));
        assert!(matches!(AbsoluteNorm::parse("lp:2"), Err(Error::Param(_))));
    }

    #[test]
    fn complex_expm1() {
        let a = c(1e-9, 2e-9);
        let e = expm1(a);
        assert!((e - a - a * a / 2.0).norm() < 1e-23);
        let a = c(0.7, -2.0);
        assert!((expm1(a) - (a.exp() - 1.0)).norm() < 1e-15);
    }
}
