use serde_json::json;

use super::{fmt17, Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::{Error, Result};
use crate::time_machine::{
    amplified_shift, figure5_csv, BinomialSchedule, figure5_setup, gr_dilation, radius_schedule, run_machine, success_scaling_probe,
    RadiusForm, TimeMachineConfig, EARTH_MASS,
};

/// Distortion of the reference construction (`N = 13`, `eta = 10`, `dt = 1`,
/// Gaussian of width 4 on the fixed grid), from a 60-digit direct sum.
pub const GOLDEN_DISTORTION: f64 = 0.246_860_776_100_739_02;

/// Unit roundoff of double-double arithmetic.
const DOUBLE_DOUBLE_EPS: f64 = 4.930_380_657_631_324e-32;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "time_machine",
        summary: "Superposition of shifted clocks post-selected into a shift far beyond any single branch",
        params: vec![
            ParamSpec::int("n_terms", 13, "number of binomial terms N (1-200)"),
            ParamSpec::real("eta", 10.0, "amplification factor"),
            ParamSpec::real("delta_t", 1.0, "largest single-branch shift"),
            ParamSpec::real("sigma", 4.0, "width of the Gaussian input"),
            ParamSpec::real("external_t", 1e12, "external time T over which the shells act (s)"),
            ParamSpec::real("shell_mass", EARTH_MASS, "shell mass (kg)"),
            ParamSpec::real("r0", 6.4e6, "initial shell radius (m)"),
            ParamSpec::text("form", "full", "radius formula: full or simplified"),
            ParamSpec::int("probe_max", 20, "largest N in the success-probability probe (0 disables)"),
        ],
        runner: run,
    }
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let config = TimeMachineConfig {
        n_terms: params.count("n_terms", 1, 200)?,
        eta: params.real("eta"),
        delta_t: params.real("delta_t"),
        external_t: params.positive("external_t")?,
        shell_mass: params.real("shell_mass"),
        r0: params.positive("r0")?,
        ..TimeMachineConfig::default()
    };
    config.validate()?;
    let sigma = params.positive("sigma")?;
    let form = match params.text("form") {
        "full" => RadiusForm::Full,
        "simplified" => RadiusForm::Simplified,
        other => return Err(Error::param("form", format!("expected full or simplified, got `{other}`"))),
    };
    let probe_max = params.count("probe_max", 0, 200)?;
    let mut out = ScenarioOutput::new("time_machine", params, seed);

    let f = figure5_setup(sigma)?;
    let n = config.n_terms;
    let shift = amplified_shift(&f, n, config.eta, config.delta_t)?;
    let machine = run_machine(&f, &config)?;

    let reference = n == 13 && config.eta == 10.0 && config.delta_t == 1.0 && sigma == 4.0;
    if reference {
        out.checks.push(Check::close("golden_distortion", shift.distortion, GOLDEN_DISTORTION, 1e-10));
    }
    out.checks.push(Check::close("product_stage_norm", machine.stages[0].norm_sq, 1.0, 1e-12));
    out.checks.push(Check::close("correlated_stage_norm", machine.stages[1].norm_sq, 1.0, 1e-12));
    // The direct sum cancels terms as large as sum |alpha_n|, so its
    // rounding error scales with that sum rather than with the result.
    let direct_tol = (100.0 * BinomialSchedule::new(n, config.eta)?.sum_abs() * DOUBLE_DOUBLE_EPS).max(1e-10);
    out.checks.push(Check::new(
        "direct_sum_matches_closed_form",
        machine.path_discrepancy <= direct_tol,
        format!("relative gap {:e}, rounding allowance {direct_tol:e}", machine.path_discrepancy),
    ));
    out.checks.push(Check::new(
        "projection_bound",
        machine.success_prob * machine.target_fidelity <= machine.direct_projection_bound * (1.0 + 1e-9),
        format!("{:e} vs bound {:e}", machine.success_prob * machine.target_fidelity, machine.direct_projection_bound),
    ));

    let radii = radius_schedule(&config, form)?;
    let base = match form {
        RadiusForm::Full => gr_dilation(config.shell_mass, config.r0, config.external_t, config.grav_const, config.light_speed)?,
        RadiusForm::Simplified => 0.0,
    };
    let mut radii_csv = String::from("n,radius,shift\n");
    let mut worst_shift: f64 = 0.0;
    for (k, r) in radii.iter().enumerate() {
        let want = k as f64 * config.delta_t / n as f64;
        let got = if r.is_finite() {
            gr_dilation(config.shell_mass, *r, config.external_t, config.grav_const, config.light_speed)? - base
        } else {
            0.0
        };
        if want > 0.0 {
            worst_shift = worst_shift.max(((got - want) / want).abs());
        }
        radii_csv.push_str(&format!("{k},{},{}\n", fmt17(*r), fmt17(got)));
    }
    out.checks.push(Check::new("radii_reproduce_shifts", worst_shift < 1e-6, format!("max relative error {worst_shift:e}")));

    let mut probe_json = json!(null);
    if probe_max >= 2 {
        let range: Vec<usize> = (1..=probe_max).collect();
        let probe = success_scaling_probe(&f, config.eta, &range, config.delta_t)?;
        let last = probe.last_ratio().unwrap_or(f64::NAN);
        out.scalar("probe_last_ratio", last);
        out.csv.push(("success_scaling.csv".into(), probe.to_csv()));
        probe_json = json!({
            "rows": probe.rows,
            "last_ratio": last,
            "claimed_ratio": probe.claimed_ratio,
            "register_asymptote": probe.register_asymptote,
            "relative_gap_to_claimed": (last - probe.claimed_ratio).abs() / probe.claimed_ratio,
            "relative_gap_to_asymptote": (last - probe.register_asymptote).abs() / probe.register_asymptote,
        });
    }

    out.scalar("distortion", shift.distortion);
    out.scalar("success_prob", machine.success_prob);
    out.scalar("log10_success_prob", machine.log10_success_prob);
    out.scalar("target_fidelity", machine.target_fidelity);
    out.csv.push(("fig5.csv".into(), figure5_csv(&shift, &f)));
    out.csv.push(("shell_radii.csv".into(), radii_csv));
    out.results = json!({
        "config": config,
        "sigma": sigma,
        "distortion": shift.distortion,
        "golden_distortion": if reference { json!(GOLDEN_DISTORTION) } else { json!(null) },
        "spectral_tail": shift.spectral_tail,
        "band_limit_warning": shift.band_limit_warning,
        "masked_components": shift.masked_components,
        "stages": machine.stages,
        "initial_register": machine.initial_qos,
        "path_discrepancy": machine.path_discrepancy,
        "direct_sum_allowance": direct_tol,
        "success_prob": machine.success_prob,
        "log10_success_prob": machine.log10_success_prob,
        "unit_overlap_prob": machine.unit_overlap_prob,
        "shorthand_prob": machine.shorthand_prob,
        "direct_projection_bound": machine.direct_projection_bound,
        "target_fidelity": machine.target_fidelity,
        "radius_form": form,
        "schwarzschild_radius": config.schwarzschild_radius(),
        "radii": radii.iter().map(|r| if r.is_finite() { json!(r) } else { json!(null) }).collect::<Vec<_>>(),
        "success_probe": probe_json,
    });
    Ok(out)
}
