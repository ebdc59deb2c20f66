//! The two-variable transform of an absolute norm and the Mellin transform of
//! `t ↦ N(1, t)^p`: closed forms against quadrature, and continuation
//! through the regularized transform.

use lpverify::absnorm::{AbsoluteNorm, CUSTOM_NORMS};
use lpverify::Complex64;

const TOL: f64 = 1e-8;

fn main() -> lpverify::Result<()> {
    let (w, z) = (Complex64::new(-0.3, 0.2), Complex64::new(-0.4, 0.0));
    let mut norms = vec!["lq:1.5".to_string(), "lq:3".to_string(), "linf".to_string()];
    norms.extend(CUSTOM_NORMS.iter().map(|n| format!("custom:{n}")));

    println!("{:<22} {:>40} {:>10}", "norm", "F(w, z)", "|closed − quad|");
    for d in &norms {
        let norm = AbsoluteNorm::parse(d)?;
        let f = norm.f(w, z, TOL)?;
        let q = norm.f_quadrature(w, z, TOL)?;
        println!("{d:<22} {:>40} {:>10.1e}", format!("{:.12}", f.value), (f.value - q.value).norm());
    }

    let norm = AbsoluteNorm::lq(1.5)?;
    let p = -1.0;
    let strip = norm.mellin_strip(p)?;
    println!("\nM_{{-1,ℓ1.5}} converges for {} < Re z < {}", strip.lower(), strip.upper());
    for x in [-0.5, 1.2, -1.5] {
        let m = norm.m_p(p, Complex64::new(x, 0.0), TOL)?;
        println!("M({x}) = {:.12} via {:?}", m.value.re, m.method);
    }
    Ok(())
}
