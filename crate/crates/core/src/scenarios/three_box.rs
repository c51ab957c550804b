use serde_json::json;

use super::{Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::Result;
use crate::ideal::{abl, product_rule_report};
use crate::numerics::{embed, DenseOperator};
use crate::pointer::{pointer_distribution_postselected, GaussianPointer};
use crate::states::{StateVector, TwoStateVector};
use crate::weak::weak_value;

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "three_box",
        summary: "Particle certain to be in box 1 and in box 2; negative weak occupation of box 3",
        params: vec![
            ParamSpec::int("n_particles", 5, "particles sharing the two-state vector for the pressure readout (1-6)"),
            ParamSpec::real("delta", 10.0, "pointer width for the box-3 occupation readout"),
        ],
        runner: run,
    }
}

fn three_box_description() -> Result<TwoStateVector> {
    let pre = StateVector::from_real(&[1.0, 1.0, 1.0])?.normalized();
    let post = StateVector::from_real(&[1.0, 1.0, -1.0])?.normalized();
    TwoStateVector::new(post.dual(), pre)
}

fn box_projector(i: usize) -> Result<DenseOperator> {
    let mut d = [0.0; 3];
    d[i] = 1.0;
    DenseOperator::from_real_diagonal(&d)
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let n = params.count("n_particles", 1, 6)?;
    let delta = params.positive("delta")?;
    let mut out = ScenarioOutput::new("three_box", params, seed);

    let desc = three_box_description()?;
    let proj: Vec<DenseOperator> = (0..3).map(box_projector).collect::<Result<_>>()?;
    let prob_open: Vec<f64> =
        proj.iter().map(|p| Ok(abl(&desc, p)?.probability_of(1.0).unwrap_or(0.0))).collect::<Result<_>>()?;
    let product = product_rule_report(&desc, &proj[0], &proj[1])?;
    let which_box = abl(&desc, &DenseOperator::from_real_diagonal(&[1.0, 2.0, 3.0])?)?;
    let weak: Vec<f64> = proj.iter().map(|p| Ok(weak_value(&desc, p)?.re())).collect::<Result<_>>()?;

    // N particles, each with the same two-state vector.
    let mut pre = desc.ket().clone();
    let mut post = desc.bra().dual();
    for _ in 1..n {
        pre = pre.tensor(desc.ket())?;
        post = post.tensor(&desc.bra().dual())?;
    }
    let many = TwoStateVector::new(post.dual(), pre)?;
    let number = |i: usize| -> Result<DenseOperator> {
        let mut total = DenseOperator::zeros(3usize.pow(n as u32));
        for site in 0..n {
            total = total.add(&embed(&proj[i], site, n)?)?;
        }
        Ok(total)
    };
    let n1_w = weak_value(&many, &number(0)?)?.re();
    let n3 = number(2)?;
    let n3_w = weak_value(&many, &n3)?;
    let pointer = pointer_distribution_postselected(&many, &n3, &GaussianPointer::for_shifts(delta, n as f64)?)?;

    out.checks.push(Check::close("prob_box1_certain", prob_open[0], 1.0, 1e-12));
    out.checks.push(Check::close("prob_box2_certain", prob_open[1], 1.0, 1e-12));
    out.checks.push(Check::new(
        "product_p1p2_certain_zero",
        product.ab_certain.is_some_and(|v| v.abs() < 1e-9) && product.product_rule_holds == Some(false),
        format!("{product:?}"),
    ));
    for (i, want) in [1.0, 1.0, -1.0].iter().enumerate() {
        out.checks.push(Check::close(&format!("weak_p{}", i + 1), weak[i], *want, 1e-12));
    }
    out.checks.push(Check::close("weak_n3", n3_w.re(), -(n as f64), 1e-10));

    out.scalar("prob_box1", prob_open[0]);
    out.scalar("prob_box2", prob_open[1]);
    out.scalar("weak_n3", n3_w.re());
    out.scalar("pressure_pointer_peak", pointer.peak);
    out.results = json!({
        "prob_open": {"box1": prob_open[0], "box2": prob_open[1], "box3": prob_open[2]},
        "product_rule": product,
        "open_all_boxes": which_box,
        "weak_values": {"p1": weak[0], "p2": weak[1], "p3": weak[2]},
        "n_particles": n,
        "weak_number": {"box1": n1_w, "box3": n3_w.re(), "box3_imag": n3_w.im()},
        "pressure_pointer": {"delta": delta, "peak": pointer.peak, "mean": pointer.mean},
    });
    out.csv.push(("pressure_pointer.csv".into(), pointer.q_csv()));
    Ok(out)
}
