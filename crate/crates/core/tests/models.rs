use dephasing::models::{
    build_three_spin, explicit_signal, model_equilibrium, pauli_tensor, Axis, DIM,
};
use dephasing::numerics::make_context;
use dephasing::quantum::{expectation, expectation_series, DensityOperator};
use dephasing::spectral::eigendecompose;
use dephasing::{CMatrix, Complex, Float};

#[test]
fn pauli_examples() {
    let ctx = make_context(256).unwrap();
    let z1 = pauli_tensor(Axis::Z, 1, &ctx).unwrap();
    let expect = [1, 1, 1, 1, -1, -1, -1, -1];
    for i in 0..DIM {
        for j in 0..DIM {
            let z = &z1.matrix()[(i, j)];
            if i == j {
                assert_eq!(z.re, expect[i]);
            } else {
                assert!(z.is_zero());
            }
        }
    }
    let id = CMatrix::identity(DIM, 256);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for site in 1..=3 {
            let s = pauli_tensor(axis, site, &ctx).unwrap();
            let sq = s.matrix().matmul(s.matrix()).unwrap();
            assert_eq!(sq.max_dist(&id).unwrap(), 0u32);
            assert!(s.matrix().trace().is_zero());
        }
    }
    assert!(pauli_tensor(Axis::X, 0, &ctx).is_err());
    assert!(pauli_tensor(Axis::X, 4, &ctx).is_err());
}

#[test]
fn model_structure() {
    let ctx = make_context(256).unwrap();
    let model = build_three_spin(&ctx);
    let h = model.hamiltonian.matrix();
    let top = Float::with_val(256, ctx.one() + ctx.sqrt2()) + ctx.sqrt3();
    assert!(Float::with_val(256, &h[(0, 0)].re - &top).abs() < ctx.eps_shifted(4));
    assert!(model.observable.matrix().trace().abs() < ctx.eps_shifted(4));
    let amp = Float::with_val(256, 8u32).sqrt().recip();
    for a in model.initial_state.amplitudes() {
        assert!(Float::with_val(256, &a.re - &amp).abs() < ctx.eps_shifted(4));
    }
    // commutes exactly with every σ_j^z
    for site in 1..=3 {
        let z = pauli_tensor(Axis::Z, site, &ctx).unwrap();
        let hz = h.matmul(z.matrix()).unwrap();
        let zh = z.matrix().matmul(h).unwrap();
        assert_eq!(hz.max_dist(&zh).unwrap(), 0u32);
    }
}

#[test]
fn explicit_signal_values() {
    let ctx = make_context(256).unwrap();
    assert!(Float::with_val(256, explicit_signal(0, &ctx) - 1u32).abs() < ctx.eps_shifted(4));
    let model = build_three_spin(&ctx);
    let d = eigendecompose(&model.hamiltonian, &ctx).unwrap();
    let series = expectation_series(&d, &model.initial_density(), &model.observable, &[ctx.one()], &ctx)
        .unwrap();
    let direct = (Float::with_val(256, 2u32).cos()
        + Float::with_val(256, ctx.sqrt2() * 2u32).cos()
        + Float::with_val(256, ctx.sqrt3() * 2u32).cos())
        / 3u32;
    let y1 = explicit_signal(1, &ctx);
    assert!(Float::with_val(256, &y1 - &direct).abs() < ctx.eps_shifted(8));
    assert!(Float::with_val(256, &y1 - &series[0]).abs() < ctx.eps_shifted(8));
}

#[test]
fn long_run_mean_within_dirichlet_bound() {
    let ctx = make_context(256).unwrap();
    let n = 100_000u64;
    let mut sum = ctx.zero();
    for k in 0..n {
        sum += explicit_signal(k, &ctx);
    }
    let mean = Float::with_val(256, sum / n).abs();
    // |(1/N) Σ cos(2ωk)| ≤ 1/(N |sin ω|) for each of the three cosines
    let mut bound = ctx.zero();
    for omega in [ctx.one(), ctx.sqrt2(), ctx.sqrt3()] {
        bound += Float::with_val(256, omega.sin().abs() * n).recip();
    }
    bound /= 3u32;
    assert!(mean <= bound, "mean {} bound {}", mean.to_f64(), bound.to_f64());
}

#[test]
fn equilibrium_is_maximally_mixed() {
    let ctx = make_context(256).unwrap();
    let model = build_three_spin(&ctx);
    let (rho_diag, a_eq) = model_equilibrium(&model, &ctx).unwrap();
    let mixed = DensityOperator::maximally_mixed(DIM, &ctx);
    assert!(rho_diag.matrix().max_dist(mixed.matrix()).unwrap() < ctx.eps_shifted(8));
    assert!(a_eq.abs() < ctx.eps_shifted(8));
    let x1 = pauli_tensor(Axis::X, 1, &ctx).unwrap();
    assert!(expectation(&rho_diag, &x1, &ctx).unwrap().abs() < ctx.eps_shifted(8));
}

#[test]
fn matrix_path_matches_closed_form() {
    let ctx = make_context(256).unwrap();
    let model = build_three_spin(&ctx);
    let d = eigendecompose(&model.hamiltonian, &ctx).unwrap();
    let times: Vec<Float> = (0..=2000).map(|n| ctx.real(n)).collect();
    let series =
        expectation_series(&d, &model.initial_density(), &model.observable, &times, &ctx).unwrap();
    let tol = ctx.eps_shifted(128 + 16);
    for (n, y) in series.iter().enumerate() {
        let diff = Float::with_val(256, y - explicit_signal(n as u64, &ctx)).abs();
        assert!(diff <= tol, "n = {n}");
    }
}

#[test]
fn single_spin_conjugation() {
    // ⟨+| e^{inωσᶻ} σˣ e^{−inωσᶻ} |+⟩ with 2×2 matrices built by hand
    let ctx = make_context(256).unwrap();
    let prec = 256;
    let zero = Complex::zero(prec);
    let one = Complex::one(prec);
    let sx = CMatrix::from_rows(vec![vec![zero.clone(), one.clone()], vec![one, zero.clone()]]).unwrap();
    let h = Float::with_val(prec, 2u32).sqrt().recip();
    let plus = [Complex::from_real(h.clone()), Complex::from_real(h)];
    for omega in [ctx.one(), ctx.sqrt2(), ctx.sqrt3()] {
        for n in 0..=100u32 {
            let theta = Float::with_val(prec, &omega * n);
            let u = CMatrix::from_rows(vec![
                vec![Complex::cis(&-theta.clone()), zero.clone()],
                vec![zero.clone(), Complex::cis(&theta)],
            ])
            .unwrap();
            let m = u.adjoint().matmul(&sx).unwrap().matmul(&u).unwrap();
            let mut acc = Complex::zero(prec);
            for i in 0..2 {
                for j in 0..2 {
                    acc += &plus[i].conj().mul_ref(&m[(i, j)]).mul_ref(&plus[j]);
                }
            }
            let expect = Float::with_val(prec, &theta * 2u32).cos();
            assert!(Float::with_val(prec, &acc.re - &expect).abs() < ctx.eps_shifted(8));
            assert!(acc.im.abs() < ctx.eps_shifted(8));
        }
    }
}
