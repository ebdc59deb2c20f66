//! Complex log-gamma, the Gaussian moment function and the stable moment
//! functions, with their strips of analyticity.

use lpverify::specfun::{duplication_residual, gaussian_moment, log_gamma, phi, psi, MomentFunction};
use lpverify::Complex64;

fn main() -> lpverify::Result<()> {
    let z = Complex64::new(3.7, 1.2);
    println!("ln Γ({z}) = {}", log_gamma(z)?);

    for x in [-0.5, 1.0, 2.0, 4.0] {
        let g = gaussian_moment(Complex64::new(x, 0.0))?;
        println!("E|γ|^{x:<4} = {:.15}", g.re);
    }
    println!("duplication residual at 0.5+2i: {:.1e}", duplication_residual(Complex64::new(0.5, 2.0))?);

    println!("E φ_0.9^0.45 = {:.15}", phi(0.9, Complex64::new(0.45, 0.0))?.re);
    println!("E |ψ_1.3|^-0.5 = {:.15}", psi(1.3, Complex64::new(-0.5, 0.0))?.re);

    for (name, f) in [
        ("gaussian", MomentFunction::gaussian()),
        ("positive 0.7-stable", MomentFunction::positive_stable(0.7)?),
        ("symmetric 1.5-stable", MomentFunction::symmetric_stable(1.5)?),
    ] {
        let s = f.strip();
        println!("{name:>22}: analytic on {} < Re z < {}", s.lower(), s.upper());
    }
    Ok(())
}
