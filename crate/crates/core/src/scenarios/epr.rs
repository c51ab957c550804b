use serde_json::json;

use super::{Check, Params, Scenario, ScenarioOutput};
use crate::error::Result;
use crate::ideal::{abl_degenerate_post, born, product_rule_report};
use crate::numerics::{DenseOperator, TensorProduct};
use crate::states::{StateVector, TwoStateVector};

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "epr_product_rule",
        summary: "Singlet pair post-selected in up-x, up-y: certain local values whose product rule fails",
        params: vec![],
        runner: run,
    }
}

/// Singlet pre-selection with `<up_x|<up_y|` post-selection.
pub(crate) fn epr_description() -> Result<TwoStateVector> {
    let singlet = StateVector::from_real(&[0.0, 1.0, -1.0, 0.0])?.normalized();
    let post = StateVector::spin_up([1.0, 0.0, 0.0])?.tensor(&StateVector::spin_up([0.0, 1.0, 0.0])?)?;
    TwoStateVector::new(post.dual(), singlet)
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new("epr_product_rule", params, seed);
    let desc = epr_description()?;
    let id = DenseOperator::identity(2);
    let s1y = DenseOperator::pauli_y().tensor(&id)?;
    let s2x = id.tensor(&DenseOperator::pauli_x())?;
    let report = product_rule_report(&desc, &s1y, &s2x)?;

    // With only particle 1 post-selected, particle 1 behaves as if described
    // by the backward state <up_x| alone: ABL reduces to the Born rule of |up_x>.
    let up_x = StateVector::spin_up([1.0, 0.0, 0.0])?;
    let post_1 = DenseOperator::projector_onto(up_x.amplitudes())?.tensor(&id)?;
    let mut backward_dev: f64 = 0.0;
    for n in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.3, -0.5, 0.8]] {
        let sn = DenseOperator::spin_along(n)?;
        let pair = abl_degenerate_post(desc.ket(), &post_1, &sn.tensor(&id)?)?;
        let single = born(&up_x, &sn)?;
        for (a, b) in pair.probabilities.iter().zip(&single.probabilities) {
            backward_dev = backward_dev.max((a - b).abs());
        }
    }

    let minus_one = |v: Option<f64>| v.is_some_and(|v| (v + 1.0).abs() < 1e-9);
    out.checks.push(Check::new("sigma1y_certain_minus_one", minus_one(report.a_certain), format!("{:?}", report.a_certain)));
    out.checks.push(Check::new("sigma2x_certain_minus_one", minus_one(report.b_certain), format!("{:?}", report.b_certain)));
    out.checks.push(Check::new(
        "product_certain_minus_one",
        minus_one(report.ab_certain),
        format!("{:?}", report.ab_certain),
    ));
    out.checks.push(Check::new("product_rule_fails", report.product_rule_holds == Some(false), format!("{:?}", report.product_rule_holds)));
    out.checks.push(Check::new("backward_only_reduction", backward_dev < 1e-12, format!("max deviation {backward_dev:e}")));
    out.scalar("sigma1y", report.a_certain.unwrap_or(f64::NAN));
    out.scalar("sigma2x", report.b_certain.unwrap_or(f64::NAN));
    out.scalar("product", report.ab_certain.unwrap_or(f64::NAN));
    out.results = json!({"product_rule": report, "backward_only_max_deviation": backward_dev});
    Ok(out)
}
