use serde_json::json;

use super::{Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::{Error, Result};
use crate::pointer::{
    n_spin_pointer_closed_form, n_spin_tensor_description, pointer_distribution_postselected, GaussianPointer,
    SpinCenters, PEAK_THRESHOLD,
};

/// Largest `n` for which the `2^n`-dimensional cross-check runs.
pub const TENSOR_CHECK_MAX: usize = 8;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "n_spin_single_system",
        summary: "Pointer for the average of sigma_xi over n spins, pre-selected up-x and post-selected up-y",
        params: vec![
            ParamSpec::int("n", 20, "number of spins (1-200)"),
            ParamSpec::real("delta", 0.25, "pointer width"),
            ParamSpec::text("centers", "derived", "Gaussian centres: `derived` (n-2i)/n or `printed` (2n-i)/n"),
        ],
        runner: run,
    }
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let n = params.count("n", 1, 200)?;
    let delta = params.positive("delta")?;
    let centers = match params.text("centers") {
        "derived" => SpinCenters::Derived,
        "printed" => SpinCenters::Printed,
        other => return Err(Error::param("centers", format!("expected `derived` or `printed`, got `{other}`"))),
    };
    let mut out = ScenarioOutput::new("n_spin_single_system", params, seed);
    let reach = if centers == SpinCenters::Printed { 2.0 } else { 1.0 };
    let pointer = GaussianPointer::for_shifts(delta, reach)?;
    let closed = n_spin_pointer_closed_form(n, &pointer, centers)?;
    let maxima = closed.maxima(PEAK_THRESHOLD);

    let mut tensor_dev = None;
    if n <= TENSOR_CHECK_MAX && centers == SpinCenters::Derived {
        let (desc, obs) = n_spin_tensor_description(n)?;
        let full = pointer_distribution_postselected(&desc, &obs, &pointer)?;
        let scale = closed.q_prob.iter().copied().fold(0.0, f64::max);
        let dev = closed.q_prob.iter().zip(&full.q_prob).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        out.checks.push(Check::new("tensor_cross_check", dev <= 1e-10, format!("max relative deviation {dev:e}")));
        tensor_dev = Some(dev);
    }
    out.scalar("peak", closed.peak);
    out.scalar("maxima", maxima.len() as f64);
    out.scalar("mean", closed.mean);
    out.csv.push(("fig4.csv".into(), closed.q_csv()));
    out.results = json!({
        "n": n,
        "delta": delta,
        "centers": params.text("centers"),
        "peak": closed.peak,
        "mean": closed.mean,
        "maxima": maxima,
        "single_peaked": maxima.len() == 1,
        "tensor_max_relative_deviation": tensor_dev,
    });
    Ok(out)
}
