use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde_json::json;

use super::{fmt17, Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::Result;
use crate::numerics::DenseOperator;
use crate::pointer::{
    estimate_from_samples, pointer_distribution_postselected, pointer_distribution_preselected, sample_readings,
    GaussianPointer,
};
use crate::states::{StateVector, TwoStateVector};
use crate::weak::weak_value;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "spin_xi_weak",
        summary: "Pointer distributions for sigma_xi on up-x, optionally post-selected on up-y",
        params: vec![
            ParamSpec::real("delta", 10.0, "pointer width"),
            ParamSpec::int("ensemble", 5000, "readings averaged for the ensemble estimate (0 disables)"),
            ParamSpec::boolean("postselect", true, "post-select on up-y"),
        ],
        runner: run,
    }
}

fn figure_name(postselect: bool, delta: f64) -> String {
    let table: &[(f64, char)] =
        if postselect { &[(0.1, 'a'), (0.25, 'b'), (1.0, 'c'), (3.0, 'd'), (10.0, 'e')] } else { &[(0.1, 'a'), (10.0, 'b')] };
    let fig = if postselect { 3 } else { 2 };
    match table.iter().find(|(d, _)| (d - delta).abs() < 1e-12) {
        Some((_, letter)) => format!("fig{fig}{letter}.csv"),
        None => format!("fig{fig}_delta_{delta}.csv"),
    }
}

/// Gaussian density of the ensemble average over ±8 standard errors.
fn ensemble_csv(mean: f64, stderr: f64) -> String {
    let mut out = String::from("Q,prob\n");
    let lo = mean - 8.0 * stderr;
    let hi = mean + 8.0 * stderr;
    let points = 801;
    for j in 0..points {
        let q = lo + (hi - lo) * j as f64 / (points - 1) as f64;
        let p = (-(q - mean).powi(2) / (2.0 * stderr * stderr)).exp() / (stderr * (2.0 * PI).sqrt());
        out.push_str(&format!("{},{}\n", fmt17(q), fmt17(p)));
    }
    out
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let delta = params.positive("delta")?;
    let ensemble = params.count("ensemble", 0, 10_000_000)?;
    let postselect = params.flag("postselect");
    let mut out = ScenarioOutput::new("spin_xi_weak", params, seed);

    let xi = DenseOperator::spin_along([1.0, 1.0, 0.0])?;
    let up_x = StateVector::spin_up([1.0, 0.0, 0.0])?;
    let up_y = StateVector::spin_up([0.0, 1.0, 0.0])?;
    let pointer = GaussianPointer::for_shifts(delta, 1.0)?;

    let (result, target, wv) = if postselect {
        let desc = TwoStateVector::new(up_y.dual(), up_x)?;
        let w = weak_value(&desc, &xi)?;
        out.checks.push(Check::close("weak_value_root_two", w.re(), SQRT_2, 1e-12));
        (pointer_distribution_postselected(&desc, &xi, &pointer)?, SQRT_2, Some(w))
    } else {
        (pointer_distribution_preselected(&up_x, &xi, &pointer)?, FRAC_1_SQRT_2, None)
    };
    let weak_regime = delta >= 10.0;
    if postselect && weak_regime {
        out.checks.push(Check::close("peak_near_weak_value", result.peak, SQRT_2, 0.05));
    }
    if !postselect {
        out.checks.push(Check::close("mean_is_expectation", result.mean, FRAC_1_SQRT_2, 0.02));
    }
    out.scalar("peak", result.peak);
    out.scalar("mean", result.mean);
    out.csv.push((figure_name(postselect, delta), result.q_csv()));

    let mut ensemble_json = json!(null);
    if ensemble > 0 {
        let samples = sample_readings(&result, ensemble, seed)?;
        let est = estimate_from_samples(&samples, seed);
        if !postselect || weak_regime {
            let ok = (est.mean - target).abs() <= 3.0 * est.stderr;
            out.checks.push(Check::new(
                "ensemble_mean_within_3_stderr",
                ok,
                format!("mean {} target {} stderr {}", fmt17(est.mean), fmt17(target), fmt17(est.stderr)),
            ));
        }
        out.scalar("ensemble_mean", est.mean);
        out.scalar("ensemble_stderr", est.stderr);
        let name = if postselect { "fig3f.csv" } else { "fig2c.csv" };
        if (delta - 10.0).abs() < 1e-12 {
            out.csv.push((name.into(), ensemble_csv(est.mean, est.stderr)));
        }
        ensemble_json = json!({
            "estimate": est,
            "width_over_sqrt_n": delta / (ensemble as f64).sqrt(),
            "pointer_std_over_sqrt_n": result.q_std() / (ensemble as f64).sqrt(),
        });
    }
    out.results = json!({
        "delta": delta,
        "postselect": postselect,
        "weak_value": wv,
        "target": target,
        "peak": result.peak,
        "mean": result.mean,
        "std": result.q_std(),
        "maxima": result.maxima(crate::pointer::PEAK_THRESHOLD),
        "ensemble": ensemble_json,
    });
    Ok(out)
}
