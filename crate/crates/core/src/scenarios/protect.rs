use std::f64::consts::SQRT_2;

use serde_json::json;

use super::params::direction;
use super::{fmt17, Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::Result;
use crate::numerics::{DenseOperator, C64};
use crate::protective::{
    adiabatic_protective_measurement, protected_two_state_measurement, AdiabaticSchedule, MomentumPointer,
};
use crate::states::StateVector;

/// Below this `lambda N / P0` the protection is not expected to hold.
const PROTECTED_REGIME: f64 = 50.0;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "protective",
        summary: "Adiabatic measurement of an eigenstate and a two-state vector protected by a large spin",
        params: vec![
            ParamSpec::real("total_time", 40.0, "adiabatic measurement duration T"),
            ParamSpec::int("spin_n", 10, "protecting spin size N (1-64)"),
            ParamSpec::real("lambda_n_over_p0", 50.0, "protection strength lambda N / P0"),
            ParamSpec::real("p0", 1.0, "pointer momentum spread"),
            ParamSpec::text("alpha", "x", "pre-selected spin direction"),
            ParamSpec::text("beta", "y", "post-selected spin direction"),
            ParamSpec::text("observable", "xi", "measured spin component"),
        ],
        runner: run,
    }
}

fn position_csv(pointer: &MomentumPointer, f: &[C64]) -> Result<String> {
    let wf = pointer.to_position(f)?;
    let mut out = String::from("Q,prob\n");
    for (q, p) in wf.grid().coordinates().into_iter().zip(wf.density()) {
        out.push_str(&format!("{},{}\n", fmt17(q), fmt17(p)));
    }
    Ok(out)
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let total_time = params.positive("total_time")?;
    let spin_n = params.count("spin_n", 1, 64)?;
    let ratio = params.real("lambda_n_over_p0");
    let p0 = params.positive("p0")?;
    let alpha = direction("alpha", params.text("alpha"))?;
    let beta = direction("beta", params.text("beta"))?;
    let obs = DenseOperator::spin_along(direction("observable", params.text("observable"))?)?;
    let mut out = ScenarioOutput::new("protective", params, seed);
    let pointer = MomentumPointer::new(p0)?;

    // Single-state protection: H0 = sigma_z, A = sigma_z + 0.3 sigma_x, start in |up_z>.
    let h0 = DenseOperator::pauli_z();
    let a = DenseOperator::pauli_z().add(&DenseOperator::pauli_x().scale(0.3))?;
    let single = adiabatic_protective_measurement(
        &h0,
        &a,
        &StateVector::basis(2, 0)?,
        &AdiabaticSchedule::new(total_time)?,
        &pointer,
    )?;
    let expectation = single.branches.iter().find(|b| b.eigenvalue > 0.0).map_or(f64::NAN, |b| b.expectation);
    let single_error = single.pointer_shift - expectation;
    out.checks.push(Check::new("adiabatic_leakage_small", !single.leakage_flagged, format!("leakage {:e}", single.leakage)));
    out.checks.push(Check::close("single_state_shift", single.pointer_shift, expectation, 0.01));

    let lambda = ratio * p0 / spin_n as f64;
    let protected = protected_two_state_measurement(alpha, beta, &obs, spin_n, lambda, &pointer)?;
    let control = protected_two_state_measurement(alpha, beta, &obs, spin_n, 0.0, &pointer)?;
    let tol = 0.02 * protected.target_value.abs();
    if ratio >= PROTECTED_REGIME {
        out.checks.push(Check::close("protected_shift", protected.shift, protected.target_value, tol));
    }
    let control_off = (control.shift - protected.target_value).abs() > tol;
    // Without protection the pointer cannot settle outside the eigenvalue range.
    if protected.target_value.abs() > 1.0 {
        out.checks.push(Check::new("unprotected_control_deviates", control_off, format!("control shift {}", fmt17(control.shift))));
    }

    out.scalar("shift", protected.shift);
    out.scalar("target_value", protected.target_value);
    out.scalar("error", protected.error);
    out.scalar("control_shift", control.shift);
    out.scalar("single_state_error", single_error);
    out.csv.push(("protected_pointer.csv".into(), position_csv(&pointer, &protected.pointer)?));
    out.results = json!({
        "shift": protected.shift,
        "target_value": protected.target_value,
        "error": protected.error,
        "adiabaticity_leakage": single.leakage,
        "lambdaN_over_P0": protected.lambda_n_over_p0,
        "postselection_probability": protected.postselection_probability,
        "root_two_gap": protected.shift - SQRT_2,
        "control": {"lambda": 0.0, "shift": control.shift, "error": control.error},
        "single_state": {
            "total_time": total_time,
            "shift": single.pointer_shift,
            "expectation": expectation,
            "error": single_error,
            "gap": single.gap,
            "leakage_flagged": single.leakage_flagged,
        },
    });
    Ok(out)
}
