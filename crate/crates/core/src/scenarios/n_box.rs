use serde_json::json;

use super::{Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::Result;
use crate::ideal::abl;
use crate::numerics::{basis, DenseOperator};
use crate::states::{StateVector, TwoStateVector};
use crate::weak::weak_value;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "n_box",
        summary: "One particle certain to be found in whichever of the first N-1 boxes is opened",
        params: vec![ParamSpec::int("n", 5, "number of boxes (3-512)")],
        runner: run,
    }
}

/// Pre-selection `|1> + ... + sqrt(N-2)|N>`, post-selection
/// `|1> + ... - sqrt(N-2)|N>`, both normalized.
pub(crate) fn n_box_description(n: usize) -> Result<TwoStateVector> {
    let r = ((n - 2) as f64).sqrt();
    let mut pre = vec![1.0; n];
    let mut post = vec![1.0; n];
    pre[n - 1] = r;
    post[n - 1] = -r;
    TwoStateVector::new(StateVector::from_real(&post)?.normalized().dual(), StateVector::from_real(&pre)?.normalized())
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let n = params.count("n", 3, 512)?;
    let mut out = ScenarioOutput::new("n_box", params, seed);
    let desc = n_box_description(n)?;
    let mut probs = Vec::with_capacity(n);
    let mut weak = Vec::with_capacity(n);
    for i in 0..n {
        let p = DenseOperator::projector_onto(&basis(n, i))?;
        probs.push(abl(&desc, &p)?.probability_of(1.0).unwrap_or(0.0));
        weak.push(weak_value(&desc, &p)?.re());
    }
    let worst = probs[..n - 1].iter().map(|p| (1.0 - p).abs()).fold(0.0, f64::max);
    out.checks.push(Check::new("first_boxes_certain", worst <= 1e-10, format!("max |1 - Prob| = {worst:e}")));
    out.scalar("min_prob_first_boxes", probs[..n - 1].iter().copied().fold(1.0, f64::min));
    out.scalar("prob_last_box", probs[n - 1]);
    out.scalar("weak_last_box", weak[n - 1]);
    out.results = json!({"n": n, "prob_open": probs, "weak_values": weak});
    Ok(out)
}
