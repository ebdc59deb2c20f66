//! Complex Gamma and Beta functions and the moment functions of the basic
//! random variables.
//!
//! All Gamma ratios are formed in log space and exponentiated once, so the
//! near-pole ratios that appear in the stable moment functions never overflow.
//!
//! Moment functions:
//!
//! * `G(z) = E|γ|^z = π^{-1/2} 2^{z/2} Γ((z+1)/2)` for a standard Gaussian `γ`,
//! * `Φ_p(z) = E φ_p^z = Γ(-z/p) / (p Γ(-z))` for the positive `p`-stable law
//!   with `E e^{-tφ_p} = e^{-t^p}`,
//! * `Ψ_p(z) = E|ψ_p|^z = 2^{z/2} Φ_{p/2}(z/2) G(z)` for the symmetric
//!   `p`-stable law with `E e^{itψ_p} = e^{-|t|^p}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::domain;
use crate::{Error, Result};

/// Distance below which an argument is treated as sitting on a pole of `Γ`.
pub const POLE_TOLERANCE: f64 = 1e-12;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(domain!("{what}: non-finite argument {z}"))
    }
}

fn on_gamma_pole(z: Complex64) -> bool {
    z.re <= POLE_TOLERANCE
        && z.im.abs() <= POLE_TOLERANCE
        && (z.re - z.re.round()).abs() <= POLE_TOLERANCE
}

/// Principal-branch `log Γ(z)`: `exp(log_gamma(z)) = Γ(z)`.
///
/// Lanczos approximation (`g = 7`, nine coefficients) on `Re z ≥ 1/2` and the
/// reflection formula below that.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_finite(z, "log_gamma")?;
    if on_gamma_pole(z) {
        return Err(Error::Pole(format!("Γ has a pole at {}", z.re.round())));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        return c(PI.ln()) - s.ln() - log_gamma_unchecked(c(1.0) - z);
    }
    let z = z - 1.0;
    let mut acc = c(LANCZOS_COEF[0]);
    for (i, coef) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += *coef / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    c(0.5 * (2.0 * PI).ln()) + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `Γ(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// Euler Beta function `B(w, z) = Γ(w)Γ(z)/Γ(w+z)`.
///
/// Returns exactly zero when `w + z` sits on a pole of `Γ` while `w` and `z`
/// do not. The formula is symmetric in its arguments as evaluated.
pub fn beta(w: Complex64, z: Complex64) -> Result<Complex64> {
    let lw = log_gamma(w)?;
    let lz = log_gamma(z)?;
    let s = w + z;
    if on_gamma_pole(s) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((lw + lz - log_gamma(s)?).exp())
}

/// Real strip `lower < Re z < upper`; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticStrip {
    lower: f64,
    upper: f64,
}

impl AnalyticStrip {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(domain!("empty strip ({lower}, {upper})"));
        }
        Ok(Self { lower, upper })
    }

    pub fn whole_plane() -> Self {
        Self { lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Open-strip membership; points on the boundary are rejected.
    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.lower && z.re < self.upper
    }

    pub fn intersect(&self, other: &AnalyticStrip) -> Result<AnalyticStrip> {
        AnalyticStrip::new(self.lower.max(other.lower), self.upper.min(other.upper))
    }

    /// Image of the strip under the preimage of `z ↦ scale·z + shift`, i.e. the
    /// set of `z` for which `scale·z + shift` lies in `self`.
    pub fn preimage_affine(&self, scale: f64, shift: f64) -> Result<AnalyticStrip> {
        if scale == 0.0 {
            return if shift > self.lower && shift < self.upper {
                Ok(AnalyticStrip::whole_plane())
            } else {
                Err(domain!("constant exponent {shift} outside ({}, {})", self.lower, self.upper))
            };
        }
        let a = (self.lower - shift) / scale;
        let b = (self.upper - shift) / scale;
        let (lo, hi) = if scale > 0.0 { (a, b) } else { (b, a) };
        AnalyticStrip::new(lo, hi)
    }
}

impl fmt::Display for AnalyticStrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

type Evaluator = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A closed-form moment function `z ↦ E X^z` together with its strip of
/// analyticity and the real points where the naive formula is `0/0`.
#[derive(Clone)]
pub struct MomentFunction {
    strip: AnalyticStrip,
    removable_points: Vec<f64>,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for MomentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentFunction")
            .field("strip", &self.strip)
            .field("removable_points", &self.removable_points)
            .finish_non_exhaustive()
    }
}

impl MomentFunction {
    pub fn new(
        strip: AnalyticStrip,
        removable_points: Vec<f64>,
        evaluator: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self { strip, removable_points, evaluator: Arc::new(evaluator) }
    }

    pub fn strip(&self) -> AnalyticStrip {
        self.strip
    }

    pub fn removable_points(&self) -> &[f64] {
        &self.removable_points
    }

    /// Evaluates inside the open strip; `DomainError` outside.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_finite(z, "moment function")?;
        if !self.strip.contains(z) {
            return Err(domain!("Re z = {} outside the moment strip {}", z.re, self.strip));
        }
        let v = (self.evaluator)(z)?;
        check_finite(v, "moment function value")?;
        Ok(v)
    }

    /// `E|γ|^z` on `Re z > -1`.
    pub fn gaussian() -> Self {
        Self::new(AnalyticStrip { lower: -1.0, upper: f64::INFINITY }, vec![], gaussian_moment)
    }

    /// `E φ_p^z` on `Re z < p`.
    pub fn positive_stable(p: f64) -> Result<Self> {
        check_positive_stable_index(p)?;
        Ok(Self::new(
            AnalyticStrip { lower: f64::NEG_INFINITY, upper: if p == 1.0 { f64::INFINITY } else { p } },
            vec![0.0],
            move |z| phi(p, z),
        ))
    }

    /// `E|ψ_p|^z` on `-1 < Re z < p` (unbounded above for `p = 2`).
    pub fn symmetric_stable(p: f64) -> Result<Self> {
        check_symmetric_stable_index(p)?;
        let upper = if p == 2.0 { f64::INFINITY } else { p };
        Ok(Self::new(AnalyticStrip { lower: -1.0, upper }, vec![0.0], move |z| psi(p, z)))
    }

    /// The moment function of `c` for a constant `c > 0`: `z ↦ c^z`.
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(domain!("constant factor must be positive, got {value}"));
        }
        let ln_c = value.ln();
        Ok(Self::new(AnalyticStrip::whole_plane(), vec![], move |z| Ok((z * ln_c).exp())))
    }
}

fn check_positive_stable_index(p: f64) -> Result<()> {
    // p = 1 is the degenerate law φ_1 ≡ 1, kept so that Φ_1 ≡ 1 needs no special casing upstream
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(domain!("positive stable index must lie in (0, 1], got {p}"))
    }
}

fn check_symmetric_stable_index(p: f64) -> Result<()> {
    if p > 0.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(domain!("symmetric stable index must lie in (0, 2], got {p}"))
    }
}

/// `G(z) = E|γ|^z = π^{-1/2} 2^{z/2} Γ((z+1)/2)`.
///
/// Defined as an expectation on `Re z > -1`; left of that the analytic
/// continuation is returned (callers that need the expectation check the
/// strip through [`MomentFunction::gaussian`]).
pub fn gaussian_moment(z: Complex64) -> Result<Complex64> {
    check_finite(z, "G")?;
    let l = log_gamma((z + 1.0) * 0.5)?;
    Ok((l + z * (0.5 * std::f64::consts::LN_2) - c(0.5 * PI.ln())).exp())
}

/// The second closed form `G(z) = 2^{-z/2} · 2Γ(z)/Γ(z/2)`, via the
/// duplication formula. `None` where `Γ(z)` or `Γ(z/2)` has a pole.
pub fn gaussian_moment_duplicated(z: Complex64) -> Option<Complex64> {
    let lz = log_gamma(z).ok()?;
    let lh = log_gamma(z * 0.5).ok()?;
    Some((lz - lh + c(std::f64::consts::LN_2) - z * (0.5 * std::f64::consts::LN_2)).exp())
}

/// Relative residual of the duplication formula
/// `Γ(z) = 2^{z-1} π^{-1/2} Γ(z/2) Γ((z+1)/2)`.
pub fn duplication_residual(z: Complex64) -> Result<f64> {
    let lhs = gamma(z)?;
    let rhs = gamma(z * 0.5)? * gamma((z + 1.0) * 0.5)? * ((z - 1.0) * std::f64::consts::LN_2).exp()
        / PI.sqrt();
    Ok((lhs - rhs).norm() / lhs.norm())
}

/// Below this modulus `Φ_p` is evaluated from its first-order expansion at the
/// removable point `z = 0`.
const PHI_ORIGIN_RADIUS: f64 = 1e-8;

/// `Φ_p(z) = E φ_p^z = Γ(-z/p) / (p Γ(-z))` for `Re z < p`.
///
/// `p` may equal 1, where `φ_1 ≡ 1` and `Φ_1 ≡ 1`. `Φ_p(0) = 1` exactly.
pub fn phi(p: f64, z: Complex64) -> Result<Complex64> {
    check_positive_stable_index(p)?;
    check_finite(z, "Φ_p")?;
    if p == 1.0 {
        return Ok(c(1.0));
    }
    if z.re >= p {
        return Err(domain!("Φ_{p}(z) requires Re z < {p}, got {}", z.re));
    }
    if z == c(0.0) {
        return Ok(c(1.0));
    }
    if z.norm() < PHI_ORIGIN_RADIUS {
        // Γ(ε) = 1/ε - γ_E + O(ε) on both factors
        return Ok(c(1.0) + z * (EULER_GAMMA * (1.0 / p - 1.0)));
    }
    let num = log_gamma(-z / p)?;
    let den = log_gamma(-z)?;
    Ok((num - den - c(p.ln())).exp())
}

/// `Ψ_p(z) = E|ψ_p|^z = 2^{z/2} Φ_{p/2}(z/2) G(z)` for `-1 < Re z < p`.
///
/// For `p = 1` this is `sec(πz/2)`; `p = 2` gives the moments of `√2·γ`.
pub fn psi(p: f64, z: Complex64) -> Result<Complex64> {
    check_symmetric_stable_index(p)?;
    check_finite(z, "Ψ_p")?;
    if z.re <= -1.0 || (p < 2.0 && z.re >= p) {
        return Err(domain!("Ψ_{p}(z) requires -1 < Re z < {p}, got {}", z.re));
    }
    let half = z * 0.5;
    Ok((half * std::f64::consts::LN_2).exp() * phi(p / 2.0, half)? * gaussian_moment(z)?)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        c(x)
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn log_gamma_at_integers_and_half() {
        assert!((log_gamma(r(5.0)).unwrap().re - 24f64.ln()).abs() < 1e-13);
        assert!((log_gamma(r(0.5)).unwrap().re - 0.572_364_942_924_700_1).abs() < 1e-13);
        assert!(log_gamma(r(5.0)).unwrap().im.abs() < 1e-15);
    }

    #[test]
    fn log_gamma_complex_matches_reference() {
        // mpmath loggamma(3.7+1.2i)
        let v = log_gamma(Complex64::new(3.7, 1.2)).unwrap();
        let expected = Complex64::new(1.209_632_153_003_243_8, 1.427_021_702_040_278_6);
        assert!((v - expected).norm() < 1e-12, "{v}");
    }

    #[test]
    fn gamma_reflection_region_matches_reference() {
        let v = gamma(Complex64::new(-2.3, 0.7)).unwrap();
        let expected = Complex64::new(-0.062_275_072_013_688_24, -0.274_869_820_381_396_9);
        assert!(close(v, expected, 1e-11), "{v}");
        let v = gamma(Complex64::new(0.1, -9.5)).unwrap();
        let expected = Complex64::new(8.634_453_295_735_528e-8, 3.254_393_725_202_045_4e-7);
        assert!(close(v, expected, 1e-10), "{v}");
    }

    #[test]
    fn poles_are_rejected() {
        for k in 0..5 {
            assert!(matches!(log_gamma(r(-(k as f64))), Err(Error::Pole(_))));
        }
        assert!(matches!(log_gamma(r(-3.0 + 1e-13)), Err(Error::Pole(_))));
        assert!(log_gamma(r(-3.0 + 1e-9)).is_ok());
        assert!(matches!(log_gamma(Complex64::new(f64::NAN, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn beta_values() {
        assert!(close(beta(r(1.0), r(1.0)).unwrap(), r(1.0), 1e-14));
        assert!(close(beta(r(0.5), r(0.5)).unwrap(), r(PI), 1e-13));
        assert!(close(beta(r(2.0), r(3.0)).unwrap(), r(1.0 / 12.0), 1e-13));
        // w + z on a pole of Γ: the Beta function vanishes
        assert_eq!(beta(r(0.5), r(-0.5)).unwrap(), r(0.0));
    }

    #[test]
    fn gaussian_moment_values() {
        assert!(close(gaussian_moment(r(0.0)).unwrap(), r(1.0), 1e-14));
        assert!(close(gaussian_moment(r(2.0)).unwrap(), r(1.0), 1e-14));
        assert!(close(gaussian_moment(r(1.0)).unwrap(), r(0.797_884_560_802_865_4), 1e-13));
        // direct quadrature of E|γ|^0.37
        assert!(close(gaussian_moment(r(0.37)).unwrap(), r(0.848_196_787_866_217_9), 1e-12));
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.3, r(0.0)).unwrap(), r(1.0));
        assert!(close(phi(0.5, r(-1.0)).unwrap(), r(2.0), 1e-13));
        assert!(close(phi(0.9, r(0.45)).unwrap(), r(1.096_731_164_302_386), 1e-12));
        assert!(matches!(phi(0.5, r(0.5)), Err(Error::Domain(_))));
        assert!(matches!(phi(0.5, r(0.7)), Err(Error::Domain(_))));
        assert_eq!(phi(1.0, Complex64::new(3.0, 1.0)).unwrap(), r(1.0));
    }

    #[test]
    fn phi_is_continuous_through_its_removable_point() {
        for p in [0.2, 0.5, 0.9] {
            let at = phi(p, r(0.0)).unwrap();
            for dz in [1e-6, -1e-6, 1e-9, -1e-9] {
                let v = phi(p, r(dz)).unwrap();
                assert!(close(v, at, 1e-4), "p={p} dz={dz} {v}");
            }
            let v = phi(p, Complex64::new(0.0, 1e-6)).unwrap();
            assert!(close(v, at, 1e-4));
        }
    }

    #[test]
    fn psi_values() {
        assert!(close(psi(1.1, r(0.0)).unwrap(), r(1.0), 1e-14));
        assert!(close(psi(1.0, r(0.5)).unwrap(), r(2f64.sqrt()), 1e-12));
        assert!(close(psi(1.3, r(-0.5)).unwrap(), r(1.417_378_785_234_774_4), 1e-12));
        assert!(matches!(psi(1.3, r(1.3)), Err(Error::Domain(_))));
        assert!(matches!(psi(1.3, r(-1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn cauchy_moments_are_secant() {
        for x in [-0.9, -0.4, 0.2, 0.7, 0.95] {
            let v = psi(1.0, r(x)).unwrap();
            assert!(close(v, r(1.0 / (PI * x / 2.0).cos()), 1e-11), "{x}");
        }
    }

    #[test]
    fn strips() {
        let s = AnalyticStrip::new(-1.0, 2.0).unwrap();
        assert!(s.contains(r(0.0)) && !s.contains(r(2.0)) && !s.contains(r(-1.0)));
        assert!(AnalyticStrip::new(1.0, 1.0).is_err());
        let pre = s.preimage_affine(-0.5, 0.25).unwrap();
        assert!((pre.lower() + 3.5).abs() < 1e-15 && (pre.upper() - 2.5).abs() < 1e-15);
        let m = MomentFunction::positive_stable(0.5).unwrap();
        assert!(m.eval(r(0.6)).is_err());
        assert!(close(m.eval(r(-1.0)).unwrap(), r(2.0), 1e-13));
    }
}
