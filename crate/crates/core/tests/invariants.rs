use lpverify::absnorm::{AbsoluteNorm, CUSTOM_NORMS};
use lpverify::checks::{run_check, CheckReport, CheckSpec};
use lpverify::embed::{theta, DirectSumSpace};
use lpverify::mellin::mellin;
use lpverify::specfun::{beta, duplication_residual, gaussian_moment, gaussian_moment_duplicated, phi};
use lpverify::stochastic::{build_existence_h, moment_estimate, SampleStream};
use lpverify::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// A point with negative real part, away from the pole at 0.
fn negative() -> impl Strategy<Value = Complex64> {
    (-1.5f64..-0.05, -2.0f64..2.0).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn duplication_holds(re in 0.1f64..10.0, im in -10.0f64..10.0) {
        prop_assert!(duplication_residual(c(re, im)).unwrap() < 1e-10);
    }

    #[test]
    fn gaussian_moment_forms_agree(re in -0.9f64..10.0, im in -5.0f64..5.0) {
        let z = c(re, im);
        if let Some(d) = gaussian_moment_duplicated(z) {
            prop_assert!(rel(d, gaussian_moment(z).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn beta_is_symmetric(w in negative(), z in negative()) {
        let (w, z) = (-w, -z);
        prop_assert_eq!(beta(w, z).unwrap(), beta(z, w).unwrap());
    }

    #[test]
    fn phi_is_continuous_at_zero(p in 0.05f64..0.95, h in 1e-9f64..1e-6) {
        // the slope at 0 is of order 1/p
        let one = c(1.0, 0.0);
        prop_assert!((phi(p, c(h, 0.0)).unwrap() - one).norm() < 2.0 * h / p);
        prop_assert!((phi(p, c(-h, 0.0)).unwrap() - one).norm() < 2.0 * h / p);
    }

    #[test]
    fn lq_closed_form_matches_quadrature(q in 1.0f64..6.0, w in negative(), z in negative()) {
        let n = AbsoluteNorm::lq(q).unwrap();
        let closed = n.f(w, z, 1e-10).unwrap().value;
        let quad = n.f_quadrature(w, z, 1e-10).unwrap().value;
        prop_assert!((closed - quad).norm() < 1e-8f64.max(1e-6 * closed.norm()), "{closed} vs {quad}");
    }

    #[test]
    fn regularization_identity(k in 0..CUSTOM_NORMS.len(), w in negative(), z in negative()) {
        let n = AbsoluteNorm::custom(CUSTOM_NORMS[k]).unwrap();
        let f = n.f_quadrature(w, z, 1e-8).unwrap();
        let g = n.f_reg(w, z, 1e-8).unwrap();
        let gap = (g.value - f.value - 1.0 / w - 1.0 / z).norm();
        prop_assert!(gap < 1e-8 + f.abs_error_estimate + g.abs_error_estimate, "{gap:e}");
    }

    #[test]
    fn first_order_bound(t in 1e-6f64..1.0, w in -3.0f64..3.0) {
        prop_assert!(((1.0 + t).powf(w) - 1.0).abs() <= 4f64.powf(w.abs()) * t * (1.0 + 1e-12));
    }

    #[test]
    fn second_order_bound(t in 1e-6f64..0.5, w in -3.0f64..3.0) {
        let avg = 0.5 * ((1.0 + t).powf(w) + (1.0 - t).powf(w)) - 1.0;
        prop_assert!(avg.abs() <= 8f64.powf(w.abs()) * t * t * (1.0 + 1e-9));
    }

    #[test]
    fn mellin_of_lq_power_is_reflection_symmetric(q in 1.1f64..4.0, p in -1.5f64..0.9, x in 0.0f64..1.0, im in -1.0f64..1.0) {
        let n = AbsoluteNorm::lq(q).unwrap();
        let strip = n.mellin_strip(p).unwrap();
        // a point of the strip's middle half, away from 0 and p
        let z = c(strip.lower() + (0.25 + 0.5 * x) * (strip.upper() - strip.lower()), im);
        prop_assume!(z.norm() > 0.05 && (z - p).norm() > 0.05);
        let a = n.m_p(p, z, 1e-10).unwrap().value;
        let b = n.m_p(p, c(p, 0.0) - z, 1e-10).unwrap().value;
        prop_assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn mellin_scaling(lambda in 0.5f64..2.0, re in -0.9f64..-0.1, im in -1.0f64..1.0) {
        let z = c(re, im);
        let f = |t: f64| (-t).exp() / (1.0 + t);
        let scaled = mellin(|t| f(lambda * t), z, 1e-12).unwrap().value;
        let plain = mellin(f, z, 1e-12).unwrap().value;
        prop_assert!((scaled - plain * lambda.powf(re) * c(0.0, im * lambda.ln()).exp()).norm() < 1e-8);
    }

    #[test]
    fn theta_invariant(m in 2usize..8, p in -0.95f64..3.0) {
        let th = theta(p, m).unwrap();
        let lhs = th.powf(p) * gaussian_moment(c(m as f64 - 1.0, 0.0)).unwrap().re;
        let rhs = gaussian_moment(c(p + m as f64 - 1.0, 0.0)).unwrap().re;
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.abs());
    }

    #[test]
    fn space_descriptor_round_trips(m in 1usize..6, n in 1usize..6, q in 1.0f64..2.0, r in 1.0f64..2.0) {
        let d = format!("l2:{m}+lq:{q}:{n}@r:{r}");
        let s = DirectSumSpace::parse(&d).unwrap();
        prop_assert_eq!(DirectSumSpace::parse(&s.descriptor()).unwrap().descriptor(), s.descriptor());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimates_are_deterministic(seed in any::<u64>(), re in -0.5f64..1.0) {
        let h = build_existence_h(1.5).unwrap();
        let z = c(re, 0.0);
        let a = moment_estimate(&h, z, 2000, &SampleStream::new(seed)).unwrap();
        let b = moment_estimate(&h, z, 2000, &SampleStream::new(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reports_round_trip(seed in any::<u64>(), samples in 1usize..5000) {
        let spec = CheckSpec::new("check-gaussian-ratio-lemma").with_seed(seed).with_samples(samples);
        let report = run_check(&spec).unwrap();
        prop_assert_eq!(CheckReport::from_json(&report.to_json()).unwrap(), report);
    }
}

#[test]
fn reports_are_bit_reproducible() {
    let spec = CheckSpec::new("check-p-pos-prop").with_seed(11).with_samples(20_000);
    let mut a = run_check(&spec).unwrap();
    let mut b = run_check(&spec).unwrap();
    a.runtime_ms = None;
    b.runtime_ms = None;
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn stable_embedding_is_isotropic() {
    use lpverify::embed::stable_embedding_samples;
    use lpverify::stochastic::ks_two_sample;
    use rand::Rng;
    let q = 1.5;
    let n = 100_000;
    let stream = SampleStream::new(5);
    let base = stable_embedding_samples(q, &[1.0, 0.0, 0.0], n, &stream.named("e1")).unwrap();
    let mut rng = stream.named("directions").rng();
    // 1% family-wise over 10 directions: c(α) = sqrt(−ln(α/2)/2) at α = 0.001
    // in place of α = 0.01
    let bonferroni = (-(0.0005f64).ln() / 2.0).sqrt() / (-(0.005f64).ln() / 2.0).sqrt();
    for k in 0..10 {
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = y.iter().map(|v: &f64| v.abs().powf(q)).sum::<f64>().powf(1.0 / q);
        let y: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let other = stable_embedding_samples(q, &y, n, &stream.named(&format!("y{k}"))).unwrap();
        let ks = ks_two_sample(&base, &other).unwrap();
        assert!(ks.statistic <= bonferroni * ks.critical, "direction {y:?}: D = {} > {}", ks.statistic, bonferroni * ks.critical);
    }
}

#[test]
fn negative_moments_stay_bounded_away_from_the_origin() {
    use lpverify::embed::{GaussianProcessSpec, LqSpace, NormedSpace};
    let spec = GaussianProcessSpec::identity(3).unwrap();
    let space = LqSpace { q: 1.5, dim: 3 };
    let u = -1.5;
    let estimate = |shift: f64| {
        let mut rng = SampleStream::new(9).named(&format!("shift {shift}")).rng();
        let (mut gammas, mut xi) = (vec![0.0; 3], vec![0.0; 3]);
        let n = 200_000;
        (0..n)
            .map(|_| {
                spec.sample_into(&mut rng, &mut gammas, &mut xi);
                xi[0] += shift;
                space.norm(&xi).powf(u)
            })
            .sum::<f64>()
            / n as f64
    };
    let at = [0.0, 1.0, 10.0, 100.0].map(estimate);
    assert!(at.iter().all(|v| v.is_finite()), "{at:?}");
    assert!(at[3] <= at[0], "{at:?}");
}
