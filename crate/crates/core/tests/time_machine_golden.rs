use tsvf_core::time_machine::{amplified_shift, figure5_setup, run_machine, TimeMachineConfig};

#[test]
fn width_four_gaussian_matches_high_precision_sum() {
    // 60-digit direct summation of the 14 shifted Gaussians on the same grid.
    let golden = 0.246_860_776_100_739_02;
    let f = figure5_setup(4.0).unwrap();
    let r = amplified_shift(&f, 13, 10.0, 1.0).unwrap();
    println!("distortion {:.17e}, golden {golden}", r.distortion);
    assert!((r.distortion - golden).abs() < 1e-12);
}

#[test]
fn continuum_widths_shrink_distortion() {
    let mut last = f64::INFINITY;
    for n in [8, 13, 21, 34] {
        let f = figure5_setup(4.0).unwrap();
        let d = amplified_shift(&f, n, 10.0, 1.0).unwrap().distortion;
        assert!(d < last);
        last = d;
    }
}

#[test]
fn pipeline_stages_and_bounds() {
    let f = figure5_setup(4.0).unwrap();
    let cfg = TimeMachineConfig::default();
    let run = run_machine(&f, &cfg).unwrap();
    println!("{:?}", run.stages);
    println!("p={:e} bound={:e} fid={} disc={:e}", run.success_prob, run.direct_projection_bound, run.target_fidelity, run.path_discrepancy);
    assert!((run.stages[0].norm_sq - 1.0).abs() < 1e-12);
    assert!((run.stages[1].norm_sq - 1.0).abs() < 1e-12);
    assert!(run.path_discrepancy < 1e-10);
    assert!(run.success_prob * run.target_fidelity <= run.direct_projection_bound * (1.0 + 1e-9));
}

#[test]
fn interpolation_regime_is_accurate() {
    let grid = tsvf_core::numerics::Grid1D::symmetric(20.0, 1024).unwrap();
    let f = tsvf_core::numerics::WaveFunction1D::gaussian(grid, 0.0, 1.0);
    for eta in [0.1, 0.5, 0.9] {
        let d = amplified_shift(&f, 13, eta, 0.25).unwrap().distortion;
        println!("eta {eta} distortion {d:e}");
        assert!(d < 1e-3);
    }
}
