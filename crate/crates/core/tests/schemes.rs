mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use wvctx::qmath::{kd_quasiprob, CMatrix, DensityState, Effect};
use wvctx::schemes::*;
use wvctx::Error;

const ALL: [SchemeKind; 4] = [
    SchemeKind::GaussianPosition,
    SchemeKind::GaussianMomentum,
    SchemeKind::QubitPointer,
    SchemeKind::CoarseGrained,
];

fn spec(kind: SchemeKind, v: f64, noise: f64) -> SchemeSpec {
    if kind.uses_spread() {
        SchemeSpec::with_spread(kind, v, noise).unwrap()
    } else {
        SchemeSpec::qubit_pointer(v, noise).unwrap()
    }
}

fn p_d_of(kind: SchemeKind, v: f64) -> f64 {
    if kind.uses_spread() {
        disturbance_pd(v).unwrap()
    } else {
        v.sin().powi(2)
    }
}

#[test]
fn marginal_channel_is_partial_dephasing_for_every_scheme() {
    let mut r = rng(10);
    for i in 0..400 {
        let kind = ALL[i % 4];
        let d = 2 + i % 3;
        let rho = random_state(&mut r, d, true);
        let k = r.gen_range(1..d);
        let e = random_projector(&mut r, d, k, true);
        let v = if kind.uses_spread() { r.gen_range(0.3..20.0) } else { r.gen_range(0.01..0.78) };
        let got = spec(kind, v, 0.0).marginal_channel(&e, rho.matrix()).unwrap();
        let z = &e.matrix().scale_real(2.0) - &CMatrix::identity(d);
        let p_d = p_d_of(kind, v);
        let want = &rho.matrix().scale_real(1.0 - p_d) + &(&(&z * rho.matrix()) * &z).scale_real(p_d);
        assert!(got.max_abs_diff(&want) < 1e-10, "{kind:?} v={v}");
    }
}

#[test]
fn instrument_outcome_probabilities_are_complete() {
    let mut r = rng(11);
    for i in 0..400 {
        let kind = ALL[i % 4];
        let d = 2 + i % 2;
        let rho = random_state(&mut r, d, true);
        let e = random_projector(&mut r, d, 1, true);
        let v = if kind.uses_spread() { r.gen_range(0.3..20.0) } else { r.gen_range(0.01..0.78) };
        let inst = spec(kind, v, 0.0).binary_instrument().unwrap();
        let t = InterferenceTerms::new(&rho, &e, &Effect::identity(d)).unwrap();
        let (pm, pp) = (inst.minus.probability(&t), inst.plus.probability(&t));
        assert!((pm + pp - 1.0).abs() < 1e-12, "{kind:?}");
        assert!((-1e-12..=1.0 + 1e-12).contains(&pm));
        // same thing through the post-measurement states
        let tr = (&inst.minus.apply(&e, rho.matrix()) + &inst.plus.apply(&e, rho.matrix())).trace();
        assert!((tr - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn qubit_kraus_operators_form_a_povm() {
    let mut r = rng(12);
    for _ in 0..200 {
        let d = r.gen_range(2..5);
        let k = r.gen_range(1..d);
        let e = random_projector(&mut r, d, k, true);
        let eps = r.gen_range(0.001..std::f64::consts::FRAC_PI_4);
        let (plus, minus) = qubit_kraus(&e, eps);
        let sum = &(&plus.adjoint() * &plus) + &(&minus.adjoint() * &minus);
        assert!(sum.max_abs_diff(&CMatrix::identity(d)) < 1e-15);
    }
}

#[test]
fn noisy_postselection_is_a_linear_mixture() {
    let mut r = rng(13);
    for i in 0..200 {
        let kind = ALL[i % 4];
        let rho = random_pure(&mut r, 2, true);
        let e = random_projector(&mut r, 2, 1, true);
        let pi = random_projector(&mut r, 2, 1, true);
        if pi.expectation(&rho).unwrap() < 0.05 {
            continue;
        }
        let v = if kind.uses_spread() { r.gen_range(0.5..10.0) } else { r.gen_range(0.01..0.7) };
        let eps = r.gen_range(0.0..0.4);
        let noisy = spec(kind, v, eps).run(&rho, &e, &pi).unwrap();
        let ideal = spec(kind, v, 0.0).run(&rho, &e, &pi).unwrap();
        let flat = spec(kind, v, 0.0).run(&rho, &e, &Effect::identity(2)).unwrap();
        let mix = (1.0 - 2.0 * eps) * ideal.p_minus + eps * flat.p_minus;
        assert!((noisy.p_minus - mix).abs() < 1e-12, "{kind:?}");
        assert!((noisy.p_f - ((1.0 - 2.0 * eps) * ideal.p_f + eps)).abs() < 1e-12);
    }
}

#[test]
fn noisy_postselection_examples() {
    let zero = Effect::projector_onto(&[c(1.0), c(0.0)]).unwrap();
    let m = noisy_postselection(&zero, 0.1).unwrap();
    let want = CMatrix::diag(&[0.9, 0.1]);
    assert!(m.effect_pass.matrix().max_abs_diff(&want) < 1e-15);
    let sum = m.effect_pass.matrix() + m.effect_fail.matrix();
    assert!(sum.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    let near = noisy_postselection(&zero, 0.5 - 1e-12).unwrap();
    assert!(near.effect_pass.matrix().max_abs_diff(&CMatrix::diag(&[0.5, 0.5])) < 1e-11);
    assert!(noisy_postselection(&zero, 0.5).is_err());
    assert!(noisy_postselection(&zero, -0.1).is_err());
}

/// `|p_- - leading| <= C/s^2`. Strictly decreasing `residual*s` is only
/// guaranteed asymptotically: the `1/s^2` and `1/s^3` terms can cancel near
/// `s = 10` for some instances.
#[test]
fn leading_order_residual_is_second_order_for_gaussian_schemes() {
    let mut r = rng(14);
    let mut checked = 0;
    for i in 0..300 {
        let kind = [SchemeKind::GaussianPosition, SchemeKind::GaussianMomentum, SchemeKind::CoarseGrained][i % 3];
        let rho = random_pure(&mut r, 2, true);
        let e = random_projector(&mut r, 2, 1, true);
        let pi = random_projector(&mut r, 2, 1, true);
        if pi.expectation(&rho).unwrap() < 0.05 {
            continue;
        }
        for s in [10.0, 20.0, 40.0, 80.0, 1000.0] {
            let st = spec(kind, s, 0.0).run(&rho, &e, &pi).unwrap();
            let residual = (st.p_minus - st.leading_order_p_minus).abs();
            assert!(residual * s * s < 0.1, "{kind:?} s={s}: {residual}");
        }
        checked += 1;
    }
    assert!(checked > 200);
}

#[test]
fn qubit_pointer_residual_is_second_order() {
    let mut r = rng(15);
    for _ in 0..300 {
        let rho = random_pure(&mut r, 2, true);
        let e = random_projector(&mut r, 2, 1, true);
        let pi = random_projector(&mut r, 2, 1, true);
        if pi.expectation(&rho).unwrap() < 1e-3 {
            continue;
        }
        for &eps in &[0.2, 0.1, 0.05, 0.01] {
            let st = qubit_pointer_stats(&rho, &e, &noisy_postselection(&pi, 0.0).unwrap(), eps).unwrap();
            assert!((st.p_minus - st.leading_order_p_minus).abs() <= 5.0 * eps * eps);
            assert!((st.p_m.unwrap() - (2.0 * eps).sin()).abs() < 1e-15);
            assert!((st.p_d - eps.sin().powi(2)).abs() < 1e-15);
            assert!((st.p_tilde - (1.0 + st.p_m.unwrap()) / 2.0).abs() < 1e-15);
        }
    }
}

#[test]
fn position_reproduces_first_order_formula() {
    let inst = reference();
    let post = noisy_postselection(&inst.pi, 0.0).unwrap();
    let kd = kd_quasiprob(&inst.rho, &inst.e, &inst.pi).unwrap();
    assert!((kd.re + 0.1).abs() < 1e-14);
    for &s in &[100.0, 1000.0] {
        let st = gaussian_position_stats(&inst.rho, &inst.e, &post, s).unwrap();
        let first = 0.1 - kd.re / (std::f64::consts::PI.sqrt() * s);
        assert!((st.p_minus - first).abs() * s < 1.0 / s);
    }
}

#[test]
fn commuting_position_case_has_no_interference() {
    let mut r = rng(16);
    for _ in 0..50 {
        let w: f64 = r.gen_range(0.0..1.0);
        let rho = DensityState::new(CMatrix::diag(&[w, 1.0 - w])).unwrap();
        let e = Effect::new(CMatrix::diag(&[0.0, 1.0])).unwrap();
        let pi = Effect::new(CMatrix::diag(&[1.0, 1.0])).unwrap();
        let s = r.gen_range(0.3..10.0);
        let st = gaussian_position_stats(&rho, &e, &noisy_postselection(&pi, 0.0).unwrap(), s).unwrap();
        let want = 0.5 * wvctx::qmath::erfc(1.0 / s) * (1.0 - w) + 0.5 * w;
        assert!((st.p_minus - want).abs() < 1e-14);
    }
}

#[test]
fn matched_postselection_is_never_anomalous_at_large_s() {
    let mut r = rng(17);
    for _ in 0..100 {
        let ket = random_ket(&mut r, 2, true);
        let rho = DensityState::pure(&ket).unwrap();
        let pi = Effect::projector_onto(&ket).unwrap();
        let e = random_projector(&mut r, 2, 1, true);
        if kd_quasiprob(&rho, &e, &pi).unwrap().re < 1e-3 {
            continue;
        }
        for &s in &[10.0, 40.0] {
            let st = gaussian_position_stats(&rho, &e, &noisy_postselection(&pi, 0.0).unwrap(), s).unwrap();
            assert!(st.p_minus < st.p_f / 2.0);
        }
    }
}

#[test]
fn momentum_limits_and_imaginary_anomaly() {
    // all-real instance: no 1/s term
    let inst = reference();
    let post = noisy_postselection(&inst.pi, 0.0).unwrap();
    for &s in &[10.0, 20.0, 40.0] {
        let st = gaussian_momentum_stats(&inst.rho, &inst.e, &post, s).unwrap();
        assert!((st.p_minus - st.p_f / 2.0).abs() < 1.0 / (s * s));
    }
    let st = gaussian_momentum_stats(&inst.rho, &inst.e, &post, 1e6).unwrap();
    assert!((st.p_minus - 0.1).abs() < 1e-12);
    assert!((momentum_alpha(1e6) - Complex64::new(1.0, 0.0)).norm() < 1e-6);

    // |+i>-style preparation gives Im KD < 0 and p_- above p_F/2
    let rho = DensityState::pure(&[c(0.5f64.sqrt()), Complex64::new(0.0, 0.5f64.sqrt())]).unwrap();
    let pi = Effect::projector_onto(&qubit_ket(-(1f64 / 3.0).atan())).unwrap();
    let kd = kd_quasiprob(&rho, &inst.e, &pi).unwrap();
    assert!(kd.im < 0.0);
    let st = gaussian_momentum_stats(&rho, &inst.e, &noisy_postselection(&pi, 0.0).unwrap(), 20.0).unwrap();
    assert!(st.p_minus > st.p_f / 2.0);
}

#[test]
fn coarse_grained_strength() {
    for &s in &[5.0, 50.0, 500.0] {
        let inst = reference();
        let st = coarse_grained_stats(&inst.rho, &inst.e, &noisy_postselection(&inst.pi, 0.0).unwrap(), s).unwrap();
        let p_m = st.p_m.unwrap();
        assert!((p_m - wvctx::qmath::erf(1.0 / (2.0 * s))).abs() < 1e-15);
        let ratio = p_m * std::f64::consts::PI.sqrt() * s;
        assert!((ratio - 1.0).abs() < 1.0 / (s * s));
    }
    // binned POVM weight on the wrong side, by quadrature
    let s = 2.0;
    let g2 = |x: f64| (-(x * x) / (s * s)).exp() / (std::f64::consts::PI.sqrt() * s);
    let a = simpson(&g2, -40.0, -0.5, 40_000);
    assert!((a - 0.5 * wvctx::qmath::erfc(1.0 / (2.0 * s))).abs() < 1e-12);
}

#[test]
fn disturbance_inversion() {
    assert!((disturbance_pd(8.10336).unwrap() - 0.0019).abs() < 5e-5);
    assert!(disturbance_pd(1e8).unwrap() < 1e-16);
    let s = spread_for_pd(0.05).unwrap();
    assert!(s > 1.4 && s < 1.6);
    assert!((disturbance_pd(s).unwrap() - 0.05).abs() < 1e-15);
    assert!(matches!(disturbance_pd(0.0), Err(Error::InvalidInput(_))));
}

#[test]
fn sigma_ensembles_average_to_the_maximally_mixed_state() {
    let mut r = rng(18);
    for i in 0..200 {
        let d = 2 + i % 3;
        let rho = random_pure(&mut r, d, true);
        let k = r.gen_range(1..d);
        let pi = random_projector(&mut r, d, k, true);
        let ens = sigma_preparations(&pi, &rho).unwrap();
        assert!(ens.equivalence_residual() < 1e-12);
        assert!((ens.q_star - 1.0 / d as f64).abs() < 1e-15);
        assert!((ens.q1 - k as f64 / d as f64).abs() < 1e-12);
        assert!((ens.q0 + ens.q1 - 1.0).abs() < 1e-15);
        let post = noisy_postselection(&pi, 0.0).unwrap();
        assert!((c_s_value(&ens, &post).unwrap() - 1.0).abs() < 1e-12);
        let eps = r.gen_range(0.0..0.4);
        let noisy = noisy_postselection(&pi, eps).unwrap();
        assert!((c_s_value(&ens, &noisy).unwrap() - (1.0 - eps)).abs() < 1e-12);
    }
    let inst = reference();
    let ens = sigma_preparations(&inst.pi, &inst.rho).unwrap();
    let c = c_s_value(&ens, &noisy_postselection(&inst.pi, 0.003).unwrap()).unwrap();
    assert!((c - 0.997).abs() < 1e-12);
    assert!(sigma_preparations(&Effect::identity(2), &inst.rho).is_err());
}

#[test]
fn stats_serialize_round_trip() {
    let inst = reference();
    let st = spec(SchemeKind::QubitPointer, 0.05, 0.01).run(&inst.rho, &inst.e, &inst.pi).unwrap();
    let back: ExperimentStats = serde_json::from_str(&serde_json::to_string(&st).unwrap()).unwrap();
    assert_eq!(st, back);
    let sp: SchemeSpec = serde_json::from_str(r#"{"kind":"coarse_grained","s":3.0,"epsilon_pointer":null,"noise_eps":0.0}"#).unwrap();
    assert_eq!(sp.kind, SchemeKind::CoarseGrained);
}
