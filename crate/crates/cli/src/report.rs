//! Run reports and deterministic number formatting.

use serde::Serialize;
use wvctx::bounds::{bound_theorem, required_cs, Certificate, Sharpness, TheoremTag};
use wvctx::schemes::{c_s_value, noisy_postselection, sigma_preparations, ExperimentStats, SchemeSpec};

use crate::config::Experiment;
use crate::CliError;

/// Renders with 12 significant digits; plain decimals for moderate
/// magnitudes, scientific notation otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (_, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let (m, e) = sci.split_once('e').unwrap_or((&sci, "0"));
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        format!("{m}e{e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub scheme: String,
    pub parameter: &'static str,
    pub value: f64,
    pub stats: ExperimentStats,
    pub certificates: Vec<Certificate>,
    pub notes: Vec<String>,
}

/// Runs one sweep point and evaluates the requested theorems.
pub fn run_point(exp: &Experiment, spec: &SchemeSpec) -> Result<PointReport, CliError> {
    let stats = spec.run(&exp.rho, &exp.e, &exp.pi)?;
    let mut certificates = Vec::new();
    let mut notes = Vec::new();
    for &tag in &exp.theorems {
        let sharpness = if tag == TheoremTag::Thm4 || tag == TheoremTag::Lemma2 {
            let post = noisy_postselection(&exp.pi, spec.noise_eps)?;
            match sigma_preparations(&exp.pi, &exp.rho) {
                Ok(ens) => {
                    let c_s = c_s_value(&ens, &post)?;
                    let need = required_cs(stats.p_minus, stats.p_f, stats.p_d, ens.q_star)?;
                    notes.push(format!(
                        "{tag}: C_S = {}, violation needs C_S > {}{}",
                        sig12(c_s),
                        sig12(need.value),
                        if need.feasible { "" } else { " (infeasible)" }
                    ));
                    Some(Sharpness { c_s, q_star: ens.q_star })
                }
                Err(e) => {
                    notes.push(format!("{tag} skipped: {e}"));
                    continue;
                }
            }
        } else {
            None
        };
        let cert = bound_theorem(&stats, tag, sharpness)?;
        if cert.trivial_regime {
            notes.push(format!("{tag}: p_d >= p_tilde, only the trivial bound applies"));
        }
        certificates.push(cert);
    }
    Ok(PointReport {
        scheme: spec.kind.name().to_string(),
        parameter: if spec.kind.uses_spread() { "s" } else { "epsilon" },
        value: spec.strength(),
        stats,
        certificates,
        notes,
    })
}

pub const CSV_HEADER: [&str; 18] = [
    "scheme",
    "parameter",
    "value",
    "p_minus",
    "p_f",
    "p_d",
    "p_tilde",
    "p_m",
    "re_kd",
    "im_kd",
    "leading_order",
    "residual",
    "residual_times_s",
    "theorem",
    "bound",
    "margin",
    "violated",
    "trivial_regime",
];

/// One row per certificate.
pub fn csv_rows(r: &PointReport) -> Vec<Vec<String>> {
    let st = &r.stats;
    let residual = (st.p_minus - st.leading_order_p_minus).abs();
    let base = vec![
        r.scheme.clone(),
        r.parameter.to_string(),
        sig12(r.value),
        sig12(st.p_minus),
        sig12(st.p_f),
        sig12(st.p_d),
        sig12(st.p_tilde),
        st.p_m.map(sig12).unwrap_or_default(),
        sig12(st.kd_numerator.re),
        sig12(st.kd_numerator.im),
        sig12(st.leading_order_p_minus),
        sig12(residual),
        if r.parameter == "s" { sig12(residual * r.value) } else { String::new() },
    ];
    r.certificates
        .iter()
        .map(|c| {
            let mut row = base.clone();
            row.extend([
                c.theorem_tag.name().to_string(),
                sig12(c.bound_value),
                sig12(c.margin),
                c.violated.to_string(),
                c.trivial_regime.to_string(),
            ]);
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.2), "0.2");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(sig12(123456.789), "123456.789");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1e-7), "1e-7");
        assert_eq!(sig12(1.5e20), "1.5e20");
        assert_eq!(sig12(0.146700000000049), "0.1467");
        assert_eq!(sig12(-1e-17), "-1e-17");
    }
}
