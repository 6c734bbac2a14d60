mod common;

use common::{bump, rel_err, simpson};
use dephasing::numerics::{format40, make_context, quadrature, Complex};
use dephasing::weights::{
    default_pairs, discrete_weighted_average, eval_weight, fit_decay_envelope, kernel_ft,
    kernel_kn, kernel_kn_poisson, normalize, unweighted_average, weight_fourier,
    weight_fourier_via_kernel, weight_unnormalized, zeta_exponent, WeightParams,
    DEFAULT_ENVELOPE_GRID,
};
use dephasing::{Error, Float};
use proptest::prelude::*;

fn pair(p: f64, q: f64) -> WeightParams {
    WeightParams::new(p, q).unwrap()
}

#[test]
fn unnormalized_values() {
    let ctx = make_context(256).unwrap();
    let half = ctx.real(0.5);
    let v = weight_unnormalized(pair(1.0, 1.0), &half, &ctx);
    assert!(rel_err(&v, &Float::with_val(256, -4).exp()) < ctx.eps_shifted(4));
    let v = weight_unnormalized(pair(2.0, 2.0), &half, &ctx);
    assert!(rel_err(&v, &Float::with_val(256, -16).exp()) < ctx.eps_shifted(4));
    for p in default_pairs() {
        for x in [0.0, 1.0, -0.5, 1.5] {
            assert!(weight_unnormalized(p, &ctx.real(x), &ctx).is_zero());
        }
    }
    assert!(matches!(
        WeightParams::new(0.0, 1.0),
        Err(Error::InvalidWeightParams { .. })
    ));
}

#[test]
fn normalization_matches_simpson() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let oracle = simpson(|x| bump(x, 1, 1, 192), 40_000, 192);
    let err = rel_err(&Float::with_val(192, w.normalization()), &oracle);
    assert!(err < 1e-30, "{}", format40(&err));

    let half = ctx.real(0.5);
    let expect = Float::with_val(256, -4).exp() / &oracle;
    assert!(rel_err(&Float::with_val(192, eval_weight(&w, &half)), &expect) < 1e-30);
    assert!(eval_weight(&w, &ctx.real(-0.5)).is_zero());
    assert!(eval_weight(&w, &ctx.one()).is_zero());
}

#[test]
fn normalization_orders_and_mirrors() {
    let ctx = make_context(256).unwrap();
    let a = normalize(pair(1.0, 2.0), &ctx).unwrap();
    let b = normalize(pair(2.0, 1.0), &ctx).unwrap();
    assert!(rel_err(a.normalization(), b.normalization()) < ctx.eps_shifted(40));
    let c11 = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let c44 = normalize(pair(4.0, 4.0), &ctx).unwrap();
    assert!(c44.normalization() < c11.normalization());
    assert!(*c44.normalization() > 0u32);
}

#[test]
fn normalized_weights_integrate_to_one() {
    let ctx = make_context(256).unwrap();
    let vals = [0.5, 1.0, 2.0, 4.0];
    for &p in &vals {
        for &q in &vals {
            let w = normalize(pair(p, q), &ctx).unwrap();
            let total = quadrature(
                |x| Complex::from_real(eval_weight(&w, x)),
                &ctx.zero(),
                &ctx.one(),
                &ctx,
                &ctx.eps_shifted(32),
            )
            .unwrap();
            let err = Float::with_val(256, &total.value.re - 1u32).abs();
            assert!(err < ctx.eps_shifted(40), "({p},{q}): {}", format40(&err));
        }
    }
}

#[test]
fn discrete_average_cases() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let c = Complex::new(ctx.real(0.25), ctx.real(-3));
    let avg = discrete_weighted_average(&w, &vec![c.clone(); 37]).unwrap();
    assert!(avg.sub_ref(&c).abs() < ctx.eps_shifted(8));

    let alt: Vec<Complex> = (0..100)
        .map(|n| Complex::from_real(ctx.real(if n % 2 == 0 { 1 } else { -1 })))
        .collect();
    let avg = discrete_weighted_average(&w, &alt).unwrap();
    assert!(avg.abs() <= 1u32);
    // by hand: Σ w(n/N)(−1)^n / Σ w(n/N) with the oracle bump
    let mut num = Float::new(256);
    let mut den = Float::new(256);
    for n in 0..100u32 {
        let x = Float::with_val(256, n) / 100u32;
        let b = bump(&x, 1, 1, 256);
        if n % 2 == 0 {
            num += &b;
        } else {
            num -= &b;
        }
        den += b;
    }
    let oracle = num / den;
    assert!(Float::with_val(256, &avg.re - &oracle).abs() < ctx.eps_shifted(8));
    let k = kernel_kn(&w, &ctx.real(0.5), 100).unwrap();
    assert!(k.sub_ref(&avg).abs() < ctx.eps_shifted(8));

    assert!(matches!(
        discrete_weighted_average(&w, &alt[..1]),
        Err(Error::TooFewSamples { .. })
    ));
}

#[test]
fn unweighted_average_cases() {
    let ctx = make_context(256).unwrap();
    let c = Complex::new(ctx.real(2), ctx.real(1));
    let avg = unweighted_average(&vec![c.clone(); 7]).unwrap();
    assert!(avg.sub_ref(&c).abs() < ctx.eps_shifted(4));
    assert_eq!(unweighted_average(&[c.clone()]).unwrap().re, c.re);
    assert!(unweighted_average(&[]).is_err());

    let samples: Vec<Complex> = (0..100u32)
        .map(|n| Complex::from_real(Float::with_val(256, 2 * n).cos()))
        .collect();
    let avg = unweighted_average(&samples).unwrap();
    // Re[(1 − e^{200i}) / (100 (1 − e^{2i}))]
    let num = Complex::one(256).sub_ref(&Complex::cis(&ctx.real(200)));
    let den = Complex::one(256).sub_ref(&Complex::cis(&ctx.real(2)));
    let q = num.mul_ref(&den.conj()).div_real(&Float::with_val(256, den.norm_sqr() * 100u32));
    assert!(Float::with_val(256, &avg.re - &q.re).abs() < ctx.eps_shifted(8));
}

#[test]
fn continuous_average_cases() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let c = Complex::new(ctx.real(-1.5), ctx.real(0.5));
    let t = ctx.real(7);
    let got = dephasing::weights::continuous_weighted_average(&w, |_| c.clone(), &t).unwrap();
    // limited by the accuracy of C_{p,q}
    assert!(got.sub_ref(&c).abs() < ctx.eps_shifted(40));

    let omega = ctx.real(0.7);
    let t = ctx.real(30);
    let direct = dephasing::weights::continuous_weighted_average(
        &w,
        |s| Complex::cis(&-Float::with_val(256, &omega * s)),
        &t,
    )
    .unwrap();
    let kernel = kernel_ft(&w, &omega, &t).unwrap();
    assert!(direct.sub_ref(&kernel).abs() < ctx.eps_shifted(128 + 8));

    assert!(dephasing::weights::continuous_weighted_average(&w, |_| c.clone(), &ctx.zero())
        .is_err());
}

#[test]
fn kernel_ft_cases() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    for t in [0.0, 1.0, 1e4] {
        let k = kernel_ft(&w, &ctx.zero(), &ctx.real(t)).unwrap();
        assert!(k.sub_ref(&Complex::one(256)).abs() < ctx.eps_shifted(40));
    }
    let ts = [10.0, 20.0, 50.0, 100.0, 200.0, 400.0];
    let xis: Vec<Float> = ts.iter().map(|&t| ctx.real(t)).collect();
    let env = fit_decay_envelope(&w, &xis).unwrap();
    assert!(env.is_decaying());
    let one = ctx.one();
    for &t in &ts {
        let f = kernel_ft(&w, &one, &ctx.real(t)).unwrap().abs();
        assert!(f <= 1u32);
        assert!(f <= env.bound(&ctx.real(t)), "T = {t}");
    }
}

#[test]
fn weight_fourier_cases() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let at0 = weight_fourier(&w, &ctx.zero()).unwrap();
    assert!(at0.sub_ref(&Complex::one(256)).abs() < ctx.eps_shifted(16));
    let xi = ctx.real(50);
    let a = weight_fourier(&w, &xi).unwrap();
    let b = weight_fourier_via_kernel(&w, &xi).unwrap();
    let c = kernel_ft(&w, &ctx.one(), &xi).unwrap();
    assert!(a.sub_ref(&b).abs() < ctx.eps_shifted(128 + 8));
    assert!(a.sub_ref(&c).abs() < ctx.eps_shifted(128 + 8));
    assert!(a.abs() <= 1u32);
}

#[test]
fn discrete_kernel_cases() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    for nu in [0.0, 3.0, -2.0] {
        let k = kernel_kn(&w, &ctx.real(nu), 50).unwrap();
        assert!(k.sub_ref(&Complex::one(256)).abs() < ctx.eps_shifted(16));
    }
    assert!(matches!(
        kernel_kn(&w, &ctx.zero(), 1),
        Err(Error::TooFewSamples { .. })
    ));
    let nu = ctx.pi().recip();
    let k = kernel_kn(&w, &nu, 512).unwrap();
    assert!(k.abs() < 1e-10);
}

#[test]
fn poisson_kernel_cases() {
    let ctx = make_context(256).unwrap();
    let w11 = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let at0 = kernel_kn_poisson(&w11, &ctx.zero(), 64, Some(1)).unwrap();
    // one term each side: off by the omitted tail, which the fitted envelope
    // estimates to within its sampling of the oscillating |ŵ|
    let err = at0.value.sub_ref(&Complex::one(256)).abs();
    let est = at0.tail_bound.clone().unwrap();
    assert!(err > Float::with_val(256, &est / 4u32) && err < est * 4u32);
    let at0 = kernel_kn_poisson(&w11, &ctx.zero(), 64, None).unwrap();
    // default truncation targets 2^{−bits/2}
    assert!(at0.value.sub_ref(&Complex::one(256)).abs() < ctx.half_eps());

    let half = ctx.real(0.5);
    let direct = kernel_kn(&w11, &half, 64).unwrap();
    let poisson = kernel_kn_poisson(&w11, &half, 64, None).unwrap();
    let diff = direct.sub_ref(&poisson.value).abs();
    assert!(diff < Float::with_val(256, direct.abs() * 1e-20), "{}", format40(&diff));
    assert!(poisson.tail_bound.is_some());

    let w22 = normalize(pair(2.0, 2.0), &ctx).unwrap();
    let nu = ctx.pi().recip();
    let direct = kernel_kn(&w22, &nu, 256).unwrap();
    let poisson = kernel_kn_poisson(&w22, &nu, 256, None).unwrap();
    let diff = direct.sub_ref(&poisson.value).abs();
    assert!(diff < Float::with_val(256, direct.abs() * 1e-20), "{}", format40(&diff));

    assert!(kernel_kn_poisson(&w22, &nu, 256, Some(0)).is_err());
    assert!(kernel_kn_poisson(&w22, &nu, 1, None).is_err());
}

#[test]
fn zeta_values() {
    let ctx = make_context(128).unwrap();
    let cases = [(0.5, 1.0 / 3.0), (1.0, 0.5), (2.0, 2.0 / 3.0), (4.0, 0.8)];
    for (p, z) in cases {
        let got = zeta_exponent(pair(p, p), &ctx);
        assert!((got.to_f64() - z).abs() < 1e-15);
    }
    assert!((zeta_exponent(pair(4.0, 0.5), &ctx).to_f64() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn decay_envelope_for_11() {
    let ctx = make_context(256).unwrap();
    let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
    let xis: Vec<Float> = DEFAULT_ENVELOPE_GRID.iter().map(|&x| ctx.real(x)).collect();
    let env = fit_decay_envelope(&w, &xis).unwrap();
    assert!(env.rate > 0u32);
    assert!(env.r_squared >= 0.9, "r² = {}", env.r_squared.to_f64());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reflection_symmetry(x in 0.0f64..1.0, pi in 0usize..4, qi in 0usize..4) {
        let vals = [0.5, 1.0, 2.0, 4.0];
        let ctx = make_context(128).unwrap();
        let params = pair(vals[pi], vals[qi]);
        let a = weight_unnormalized(params, &ctx.real(x), &ctx);
        let mirrored = Float::with_val(128, 1u32 - ctx.real(x));
        let b = weight_unnormalized(params.swapped(), &mirrored, &ctx);
        // 1 − x is exact at 128 bits for an f64 x
        let diff = Float::with_val(128, &a - &b).abs();
        prop_assert!(diff <= Float::with_val(128, a.abs_ref()) * ctx.eps_shifted(8));
    }

    #[test]
    fn kernel_moduli_bounded(nu in -3.0f64..3.0, n in 2usize..300, omega in -5.0f64..5.0, t in 0.0f64..200.0) {
        let ctx = make_context(128).unwrap();
        let w = normalize(pair(1.0, 1.0), &ctx).unwrap();
        let slack = Float::with_val(128, 1u32 + ctx.eps_shifted(8));
        prop_assert!(kernel_kn(&w, &ctx.real(nu), n).unwrap().abs() <= slack);
        prop_assert!(kernel_ft(&w, &ctx.real(omega), &ctx.real(t)).unwrap().abs() <= slack);
    }

    #[test]
    fn affine_equivariance(
        vals in proptest::collection::vec(-10.0f64..10.0, 2..64),
        alpha in -5.0f64..5.0,
        beta in -5.0f64..5.0,
    ) {
        let ctx = make_context(128).unwrap();
        let w = normalize(pair(2.0, 1.0), &ctx).unwrap();
        let g: Vec<Complex> = vals.iter().map(|&v| Complex::from_real(ctx.real(v))).collect();
        let (a, b) = (ctx.real(alpha), ctx.real(beta));
        let h: Vec<Complex> = g.iter().map(|x| x.scale(&a).add_ref(&Complex::from_real(b.clone()))).collect();
        let lhs = discrete_weighted_average(&w, &h).unwrap();
        let rhs = discrete_weighted_average(&w, &g).unwrap().scale(&a).add_ref(&Complex::from_real(b.clone()));
        prop_assert!(lhs.sub_ref(&rhs).abs() < ctx.eps_shifted(16) * 100u32);
    }
}
