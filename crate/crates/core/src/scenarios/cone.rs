use std::f64::consts::PI;

use serde_json::json;

use super::{Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::{Error, Result};
use crate::ideal::abl_generalized;
use crate::numerics::{c, DenseOperator};
use crate::states::{CoStateVector, GeneralizedTwoStateVector, StateVector};
use crate::weak::certainty_cone;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "spin_cone",
        summary: "Generalized two-state vector with a certain spin component on a cone of directions",
        params: vec![
            ParamSpec::real("chi", PI / 8.0, "mixing angle in (0, pi/2), excluding pi/4"),
            ParamSpec::int("samples", 64, "azimuths sampled on the cone (8-4096)"),
        ],
        runner: run,
    }
}

/// `cos(chi) <up_z| |up_z> - sin(chi) <down_z| |down_z>`.
pub(crate) fn cone_description(chi: f64) -> Result<GeneralizedTwoStateVector> {
    let up = StateVector::basis(2, 0)?;
    let down = StateVector::basis(2, 1)?;
    GeneralizedTwoStateVector::new(vec![
        (c(chi.cos(), 0.0), CoStateVector::basis(2, 0)?, up),
        (c(-chi.sin(), 0.0), CoStateVector::basis(2, 1)?, down),
    ])
}

/// Polar angle with `cos(theta) = (1 - tan chi) / (1 + tan chi)`.
pub fn cone_angle(chi: f64) -> f64 {
    2.0 * chi.tan().sqrt().atan()
}

/// The alternative `4 arctan sqrt(tan chi)`.
pub fn printed_cone_angle(chi: f64) -> f64 {
    4.0 * chi.tan().sqrt().atan()
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let chi = params.real("chi");
    if !(chi > 0.0 && chi < PI / 2.0) {
        return Err(Error::param("chi", "must lie in (0, pi/2)"));
    }
    let samples = params.count("samples", 8, 4096)?;
    let mut out = ScenarioOutput::new("spin_cone", params, seed);
    let desc = cone_description(chi)?;
    let cone = certainty_cone(&desc, samples)?;
    let theta = cone_angle(chi);
    let printed = printed_cone_angle(chi);
    let cos_target = (1.0 - chi.tan()) / (1.0 + chi.tan());

    let mut worst_prob: f64 = 1.0;
    let mut worst_angle: f64 = 0.0;
    for d in &cone.directions {
        worst_angle = worst_angle.max((d.direction[2] - cos_target).abs());
        let p = abl_generalized(&desc, &DenseOperator::spin_along(d.direction)?)?.probability_of(1.0).unwrap_or(0.0);
        worst_prob = worst_prob.min(p);
    }
    // The printed angle, tested the same way.
    let printed_prob = abl_generalized(&desc, &DenseOperator::spin_along([printed.sin(), 0.0, printed.cos()])?)?
        .probability_of(1.0)
        .unwrap_or(0.0);

    out.checks.push(Check::new("cone_nonempty", !cone.directions.is_empty() && cone.rejected == 0, format!("{} directions, {} rejected", cone.directions.len(), cone.rejected)));
    out.checks.push(Check::new("certain_on_cone", worst_prob >= 1.0 - 1e-10, format!("min Prob = {worst_prob}")));
    out.checks.push(Check::new("cone_angle_formula", worst_angle <= 1e-10, format!("max |cos theta - target| = {worst_angle:e}")));
    out.scalar("theta", theta);
    out.scalar("printed_theta", printed);
    out.scalar("min_prob", worst_prob);
    out.scalar("printed_prob", printed_prob);
    out.csv.push(("spin_cone.csv".into(), cone.to_csv()));
    out.results = json!({
        "chi": chi,
        "theta": theta,
        "cos_theta": cos_target,
        "printed_formula": {"theta": printed, "prob_plus": printed_prob, "difference": printed - theta},
        "cone": cone,
        "min_prob_on_cone": worst_prob,
    });
    Ok(out)
}
