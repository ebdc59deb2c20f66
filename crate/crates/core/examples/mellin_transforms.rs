//! Numerical Mellin transforms: a plain integrand, strip detection, and the
//! nested Monte Carlo transform of an expectation.

use lpverify::mellin::{detect_strip, mellin, mellin_of_expectation, mellin_of_expectation_corrected, NestedRule, ProbeGrid};
use lpverify::specfun::gamma;
use lpverify::stochastic::{build_existence_h, SampleStream};
use lpverify::Complex64;

fn main() -> lpverify::Result<()> {
    // ∫ t^{-z-1} e^{-t} dt = Γ(−z)
    let z = Complex64::new(-0.7, 0.5);
    let m = mellin(|t| (-t).exp(), z, 1e-12)?;
    println!("M[e^-t]({z}) = {:.12}, Γ(−z) = {:.12}", m.value, gamma(-z)?);

    let strip = detect_strip(|t| 1.0 / (1.0 + t * t), &ProbeGrid::default());
    println!("1/(1+t²): strip ({:.3}, {:.3}), {:?}", strip.lower, strip.upper, strip.confidence);

    // E[1/max(1, h t)] with h ≡ 2 transforms to 2^z (1/(−z) + 1/(1+z)); the
    // kink sits at t = 1/h, so scaling each sample's grid by h removes it
    let h = build_existence_h(1.0)?;
    let z = Complex64::new(-0.5, 0.0);
    let stream = SampleStream::new(7);
    let exact = 2f64.powf(z.re) * (1.0 / -z.re + 1.0 / (1.0 + z.re));
    let family = |t: f64, d: &lpverify::stochastic::Draw| 1.0 / (t * d.value()).max(1.0);
    let rule = NestedRule::default();
    let plain = mellin_of_expectation(family, &h, &[z], 10_000, &stream, &rule)?[0];
    let scaled = mellin_of_expectation_corrected(family, |_, _| Complex64::new(0.0, 0.0), |d| d.value(), &h, &[z], 10_000, &stream, &rule)?[0];
    println!("exact         {exact:.12}");
    println!("shared grid   {:.12} (quad error {:.1e})", plain.value.re, plain.quad_error);
    println!("scaled grid   {:.12} (quad error {:.1e})", scaled.value.re, scaled.quad_error);
    Ok(())
}
