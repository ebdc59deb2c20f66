//! The explicit embeddings of `ℓ₂^m ⊕_r ℓ_q^n`: the standard embedding for
//! p > 0 and the Gaussian embedding for p < 0.

use lpverify::embed::{case1_lhs, case1_reference, case2_identity, DirectSumSpace, EmbeddingModel, GaussianProcessSpec};
use lpverify::stochastic::SampleStream;

const N: usize = 200_000;

fn main() -> lpverify::Result<()> {
    let stream = SampleStream::new(1);
    let space = DirectSumSpace::parse("l2:1+lq:1.5:1@r:2")?;
    println!("space {}", space.descriptor());

    let (p, q, r) = (0.5, 1.5, 2.0);
    println!("standard embedding, p = {p}");
    for t in [0.1, 1.0, 10.0] {
        let lhs = case1_lhs(p, q, r, t, N, &stream.named(&format!("case1 {t}")))?;
        println!("  t = {t:<4} E|T(x+ty)|^p = {:.5} ± {:.5}   (1+t^r)^(p/r) = {:.5}", lhs.mean.re, lhs.stderr, case1_reference(p, r, t));
    }

    let (p, m, n) = (-0.5, 2, 2);
    let model = EmbeddingModel::case2(p, m, q, r, n)?;
    let spec = GaussianProcessSpec::identity(m + n)?;
    println!("Gaussian embedding, p = {p}, theta = {:.6}", model.theta);
    for t in [0.5, 1.0, 2.0] {
        let (lhs, rhs) = case2_identity(&model, &spec, t, N, &stream.named(&format!("case2 {t}")))?;
        println!("  t = {t:<4} {:.5} ± {:.5}   vs   {:.5} ± {:.5}", lhs.mean.re, lhs.stderr, rhs.mean.re, rhs.stderr);
    }
    Ok(())
}
