//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints a PASS/FAIL line even when an earlier one fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use wvctx::bounds::{bound_template1, bound_theorem, required_cs, TheoremTag};
use wvctx::onticmodels::{
    audit_model, build_full_disturbance_model, build_minimal_disturbance_model, extract_operational_data,
};
use wvctx::polytope::rational::{int, ratio};
use wvctx::polytope::*;
use wvctx::qmath::{kd_quasiprob, weak_value, CMatrix, DensityState, Effect};
use wvctx::schemes::*;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn disturbance_at_reported_spread() -> Check {
    let p_d = disturbance_pd(8.10336).map_err(fail)?;
    ensure((p_d - 0.0019).abs() <= 5e-5, format!("p_d = {p_d}"))?;
    Ok(format!("p_d = {p_d:.6}"))
}

fn reported_sharpness_threshold() -> Check {
    let p_f = 0.0475865;
    let r = required_cs(0.602927 * p_f, p_f, 0.0019, 0.5).map_err(fail)?;
    ensure((r.value - 0.996912).abs() <= 1e-4, format!("C_S = {}", r.value))?;
    ensure(r.feasible, "reported infeasible")?;
    Ok(format!("C_S > {:.6}", r.value))
}

fn reference_violation() -> Check {
    let inst = reference();
    let s = spread_for_pd(0.05).map_err(fail)?;
    let post = noisy_postselection(&inst.pi, 0.0).map_err(fail)?;
    let wv = weak_value(&inst.rho, &inst.e, &inst.pi).map_err(fail)?;
    ensure((wv.re + 0.5).abs() < 1e-12, format!("weak value {wv}"))?;
    let st = gaussian_position_stats(&inst.rho, &inst.e, &post, s).map_err(fail)?;
    ensure((st.p_f - 0.2).abs() < 1e-12 && (st.p_d - 0.05).abs() < 1e-12, "p_F or p_d off")?;
    let cert = bound_theorem(&st, TheoremTag::Thm1, None).map_err(fail)?;
    // p_F/2 + (1 - p_F) p_d = 0.1 + 0.8 * 0.05
    ensure((cert.bound_value - 0.14).abs() < 1e-12, format!("bound {}", cert.bound_value))?;
    ensure(cert.violated && st.p_minus > cert.bound_value, "no violation")?;
    Ok(format!("s = {s:.4}, p_- = {:.6} > bound {:.4}", st.p_minus, cert.bound_value))
}

fn reference_asymptotics() -> Check {
    let inst = reference();
    let post = noisy_postselection(&inst.pi, 0.0).map_err(fail)?;
    let re_kd = kd_quasiprob(&inst.rho, &inst.e, &inst.pi).map_err(fail)?.re;
    let mut scaled = Vec::new();
    for s in [10.0, 20.0, 40.0, 80.0] {
        let st = gaussian_position_stats(&inst.rho, &inst.e, &post, s).map_err(fail)?;
        let leading = st.p_f / 2.0 - re_kd / (std::f64::consts::PI.sqrt() * s);
        scaled.push((st.p_minus - leading).abs() * s);
    }
    ensure(scaled.windows(2).all(|w| w[1] < w[0]), format!("not decreasing: {scaled:?}"))?;
    ensure(scaled[3] < scaled[0] / 4.0, format!("not shrinking: {scaled:?}"))?;
    let shown: Vec<String> = scaled.iter().map(|v| format!("{v:.3e}")).collect();
    Ok(format!("residual*s = [{}]", shown.join(", ")))
}

fn lemma1_reference() -> Check {
    let params = params_from_fractions([(1, 4), (1, 2), (1, 2), (1, 2)]).map_err(fail)?;
    let r = lemma1_pipeline(&params).map_err(fail)?;
    ensure(r.assignment_vertex_count == 16, format!("{} assignment vertices", r.assignment_vertex_count))?;
    ensure(r.deterministic_vertices.len() == 12, format!("{} deterministic", r.deterministic_vertices.len()))?;
    let want = vec![
        vec![int(0), int(0)],
        vec![int(0), ratio(1, 4)],
        vec![int(1), int(0)],
        vec![int(1), ratio(1, 2)],
    ];
    ensure(r.reduced.vertices == want, format!("hull {:?}", r.reduced.vertices))?;
    // p_- <= p_F/2 + (1 - p_F)/4, i.e. p_F - 4 p_- + 1 >= 0
    let facet = Constraint::from_ints(&[1, -4], 1);
    ensure(r.facet_present && facet_contains(&r.hrep, &facet).map_err(fail)?, "facet missing")?;
    Ok("16 / 12 / 4 vertices, facet present".into())
}

fn lemma2_reference() -> Check {
    let params = params_from_fractions([(1, 4), (1, 2), (1, 2), (1, 2)]).map_err(fail)?;
    let r = lemma2_pipeline(&params).map_err(fail)?;
    ensure(r.intermediate_vertex_count == 45, format!("{} intermediate", r.intermediate_vertex_count))?;
    ensure(r.intermediate_dimension == 12, format!("dimension {}", r.intermediate_dimension))?;
    ensure(r.projected.len() == 10, format!("{} projected", r.projected.len()))?;
    let facet = Constraint::from_ints(&[1, -4, -4], 5);
    ensure(r.hrep.inequalities.contains(&facet), "p_F - 4C_S - 4p_- + 5 >= 0 missing")?;
    Ok("45 vertices in dimension 12, 10 projected, facet present".into())
}

fn lemma1_trivial_regime() -> Check {
    for (n, d) in [(1, 2), (3, 4)] {
        let params = params_from_fractions([(n, d), (1, 2), (1, 2), (1, 2)]).map_err(fail)?;
        let r = lemma1_pipeline(&params).map_err(fail)?;
        let got: BTreeSet<Constraint> = r.hrep.inequalities.iter().cloned().collect();
        let want: BTreeSet<Constraint> = [
            Constraint::from_ints(&[1, 0], 0),
            Constraint::from_ints(&[-1, 0], 1),
            Constraint::from_ints(&[0, 1], 0),
            Constraint::from_ints(&[0, -2], 1),
        ]
        .into_iter()
        .collect();
        ensure(got == want && r.hrep.equalities.is_empty(), format!("p_d = {n}/{d}: {got:?}"))?;
    }
    Ok("only p_- <= 1/2 beyond the unit box".into())
}

fn ontic_models() -> Check {
    let inst = reference();
    let s = spread_for_pd(0.05).map_err(fail)?;
    let post = noisy_postselection(&inst.pi, 0.0).map_err(fail)?;
    let data = extract_operational_data(&inst.rho, &inst.e, &post, s, 64).map_err(fail)?;
    let a = audit_model(&build_minimal_disturbance_model(&data).map_err(fail)?, &data).map_err(fail)?;
    let b = audit_model(&build_full_disturbance_model(&data).map_err(fail)?, &data).map_err(fail)?;
    for r in [&a, &b] {
        ensure(r.reproduces_stats && r.max_residual <= 1e-8, format!("{} residual {}", r.model, r.max_residual))?;
    }
    ensure(a.failing_conditions() == vec!["condition 1"], format!("model A fails {:?}", a.failing_conditions()))?;
    ensure(b.failing_conditions() == vec!["condition 2"], format!("model B fails {:?}", b.failing_conditions()))?;

    let zero = Effect::projector_onto(&[c(1.0), c(0.0)]).map_err(fail)?;
    let rho = DensityState::pure(&[c(1.0), c(0.0)]).map_err(fail)?;
    let post = noisy_postselection(&zero, 0.0).map_err(fail)?;
    let data = extract_operational_data(&rho, &zero, &post, s, 64).map_err(fail)?;
    for m in [build_minimal_disturbance_model(&data), build_full_disturbance_model(&data)] {
        let r = audit_model(&m.map_err(fail)?, &data).map_err(fail)?;
        ensure(r.failing_conditions().is_empty(), format!("commuting {} fails {:?}", r.model, r.failing_conditions()))?;
    }
    Ok(format!("A fails condition 1, B fails condition 2, residual <= {:.1e}", a.max_residual.max(b.max_residual)))
}

fn qubit_pointer() -> Check {
    let inst = reference();
    let eps: f64 = 0.05;
    let post = noisy_postselection(&inst.pi, 0.0).map_err(fail)?;
    let st = qubit_pointer_stats(&inst.rho, &inst.e, &post, eps).map_err(fail)?;
    let re_kd = st.kd_numerator.re;
    let p_m = st.p_m.ok_or("p_m missing")?;
    let approx = st.p_f * (1.0 + p_m) / 2.0 - 2.0 * eps * re_kd;
    ensure((st.p_minus - approx).abs() <= 5.0 * eps * eps, format!("|p_- - approx| = {}", (st.p_minus - approx).abs()))?;
    ensure((p_m - (2.0 * eps).sin()).abs() < 1e-15, "p_m")?;
    ensure((st.p_d - eps.sin().powi(2)).abs() < 1e-15, "p_d")?;
    let cert = bound_theorem(&st, TheoremTag::Thm3, None).map_err(fail)?;
    ensure(cert.violated, format!("no violation, margin {}", cert.margin))?;
    Ok(format!("p_- = {:.6}, margin {:.2e}", st.p_minus, cert.margin))
}

fn momentum_scheme() -> Check {
    let e = Effect::projector_onto(&[c(0.0), c(1.0)]).map_err(fail)?;
    let h = 0.5f64.sqrt();
    let rho = DensityState::pure(&[c(h), num_complex::Complex64::new(0.0, h)]).map_err(fail)?;
    let pi = Effect::projector_onto(&[c(3.0 / 10f64.sqrt()), c(-1.0 / 10f64.sqrt())]).map_err(fail)?;
    let post = noisy_postselection(&pi, 0.0).map_err(fail)?;
    let st = gaussian_momentum_stats(&rho, &e, &post, 40.0).map_err(fail)?;
    ensure(st.kd_numerator.im < 0.0, "Im KD not negative")?;
    let t1 = bound_template1(st.p_f, st.p_d, 0.5).map_err(fail)?;
    ensure(st.p_minus > t1, format!("p_- = {} <= {t1}", st.p_minus))?;
    ensure(bound_theorem(&st, TheoremTag::Thm2, None).map_err(fail)?.violated, "no certificate")?;

    let real = reference();
    let post = noisy_postselection(&real.pi, 0.0).map_err(fail)?;
    for s in [1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0, 1000.0] {
        let st = gaussian_momentum_stats(&real.rho, &real.e, &post, s).map_err(fail)?;
        ensure(!bound_theorem(&st, TheoremTag::Thm2, None).map_err(fail)?.violated, format!("real instance violates at s={s}"))?;
    }
    Ok(format!("margin {:.2e} at s = 40; real instance never violates", st.p_minus - t1))
}

fn random_hrep(r: &mut rand_chacha::ChaCha8Rng) -> HRep {
    let dim = r.gen_range(2..=4);
    let mut ineqs = Vec::new();
    for i in 0..dim {
        let mut lo = vec![0; dim];
        lo[i] = 1;
        ineqs.push(Constraint::from_ints(&lo, r.gen_range(0..=3)));
        let mut hi = vec![0; dim];
        hi[i] = -1;
        ineqs.push(Constraint::from_ints(&hi, r.gen_range(0..=3)));
    }
    for _ in 0..r.gen_range(1..=4) {
        let a: Vec<i64> = (0..dim).map(|_| r.gen_range(-3..=3)).collect();
        ineqs.push(Constraint::from_ints(&a, r.gen_range(0..=6)));
    }
    HRep::new(dim, ineqs, vec![]).unwrap()
}

fn property_suites() -> Check {
    let mut r = rng(11);
    for i in 0..10_000 {
        let d = 2 + i % 2;
        let rho = random_pure(&mut r, d, i % 4 >= 2);
        let e = random_projector(&mut r, d, 1, true);
        let pi = random_projector(&mut r, d, 1, true);
        let kd = kd_quasiprob(&rho, &e, &pi).map_err(fail)?;
        ensure(kd.re >= -0.125 - 1e-10, format!("Re KD = {}", kd.re))?;
        if i % 10 == 0 && pi.expectation(&rho).map_err(fail)? > 1e-6 {
            let a = weak_value(&rho, &e, &pi).map_err(fail)?;
            let b = weak_value(&rho, &e.complement(), &pi).map_err(fail)?;
            ensure((a + b - c(1.0)).norm() < 1e-8, format!("complement sum {}", a + b))?;
        }
    }

    for kind in [SchemeKind::GaussianPosition, SchemeKind::GaussianMomentum, SchemeKind::CoarseGrained] {
        let inst = SchemeSpec::with_spread(kind, 1.7, 0.0).map_err(fail)?.binary_instrument().map_err(fail)?;
        let t = InterferenceTerms::new(&reference().rho, &reference().e, &Effect::identity(2)).map_err(fail)?;
        let total = inst.minus.probability(&t) + inst.plus.probability(&t);
        ensure((total - 1.0).abs() < 1e-12, format!("{kind:?} outcomes sum to {total}"))?;
    }
    let (plus, minus) = qubit_kraus(&reference().e, 0.3);
    let sum = &(&plus.adjoint() * &plus) + &(&minus.adjoint() * &minus);
    ensure(sum.max_abs_diff(&CMatrix::identity(2)) < 1e-15, "qubit Kraus completeness")?;
    let post = noisy_postselection(&reference().pi, 0.1).map_err(fail)?;
    let povm = post.effect_pass.matrix() + post.effect_fail.matrix();
    ensure(povm.max_abs_diff(&CMatrix::identity(2)) < 1e-15, "postselection completeness")?;

    let mut r = rng(2024);
    let mut checked = 0;
    while checked < 100 {
        let h0 = random_hrep(&mut r);
        let v = hrep_to_vrep(&h0).map_err(fail)?;
        if v.is_empty() {
            continue;
        }
        let h1 = vrep_to_hrep(&v).map_err(fail)?;
        ensure(hrep_to_vrep(&h1).map_err(fail)? == v, "vertex sets differ after a round trip")?;
        checked += 1;
    }
    Ok("10^4 KD samples, completeness identities, 100 polytope round trips".into())
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "disturbance at s = 8.10336", limit: secs(1), run: disturbance_at_reported_spread },
        Criterion { name: "required sharpness 0.996912", limit: secs(1), run: reported_sharpness_threshold },
        Criterion { name: "reference violation (p_F = 1/5, p_d = 1/20)", limit: secs(1), run: reference_violation },
        Criterion { name: "first-order asymptotics", limit: secs(1), run: reference_asymptotics },
        Criterion { name: "template 1 polytope at (1/4, 1/2)", limit: secs(5), run: lemma1_reference },
        Criterion { name: "template 2 polytope at (1/2, 1/2, 1/4, 1/2)", limit: secs(60), run: lemma2_reference },
        Criterion { name: "template 1 trivial regime", limit: secs(5), run: lemma1_trivial_regime },
        Criterion { name: "ontological model audits", limit: secs(5), run: ontic_models },
        Criterion { name: "qubit pointer", limit: secs(1), run: qubit_pointer },
        Criterion { name: "momentum readout", limit: secs(1), run: momentum_scheme },
        Criterion { name: "property suites", limit: secs(60), run: property_suites },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.limit => Err(format!("{detail}; took {took:.2?}, limit {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {}: {detail} [{took:.2?}]", i + 1, c.name),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {}: {why} [{took:.2?}]", i + 1, c.name);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
