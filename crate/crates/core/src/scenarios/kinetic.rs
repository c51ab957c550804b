//! Weak value of the kinetic energy for a particle bound in a square well
//! and post-selected at a single lattice site outside the well.
//!
//! With `H = K + U` on the lattice, `(K psi)_f = (H psi)_f - U_f psi_f`, so
//! at a site where `U = 0` the weak value `(K psi)_f / psi_f` equals the
//! (negative) ground energy exactly.

use std::f64::consts::PI;

use serde_json::json;

use super::{Check, ParamSpec, Params, Scenario, ScenarioOutput};
use crate::error::{Error, Result};
use crate::numerics::{c, Grid1D, Representation, SymTridiagonal, WaveFunction1D};
use crate::pointer::{PointerResult, PEAK_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeWell {
    pub grid: Grid1D,
    pub depth: f64,
    pub width: f64,
}

impl LatticeWell {
    pub fn new(grid: Grid1D, depth: f64, width: f64) -> Result<Self> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::param("well_depth", "must be positive"));
        }
        if !(width > 0.0 && width < grid.span()) {
            return Err(Error::param("well_width", "must be positive and fit inside the lattice"));
        }
        Ok(Self { grid, depth, width })
    }

    pub fn potential(&self, x: f64) -> f64 {
        if x.abs() < 0.5 * self.width {
            -self.depth
        } else {
            0.0
        }
    }

    /// Potential averaged over the cell `[x - h/2, x + h/2]`, which keeps the
    /// ground energy second-order accurate when the well edge falls between
    /// sites. Sites whose cell lies entirely outside the well get exactly 0.
    pub fn cell_potential(&self, x: f64) -> f64 {
        let h = self.grid.spacing();
        let half = 0.5 * self.width;
        let overlap = ((x + 0.5 * h).min(half) - (x - 0.5 * h).max(-half)).max(0.0);
        -self.depth * overlap / h
    }

    fn h2(&self) -> f64 {
        self.grid.spacing().powi(2)
    }

    /// `K = -1/2 d²/dx²` with a three-point stencil and hard walls.
    pub fn kinetic(&self) -> Result<SymTridiagonal> {
        let n = self.grid.points();
        SymTridiagonal::new(vec![1.0 / self.h2(); n], vec![-0.5 / self.h2(); n - 1])
    }

    pub fn hamiltonian(&self) -> Result<SymTridiagonal> {
        let n = self.grid.points();
        let diag = (0..n).map(|j| 1.0 / self.h2() + self.cell_potential(self.grid.coordinate(j))).collect();
        SymTridiagonal::new(diag, vec![-0.5 / self.h2(); n - 1])
    }

    pub fn nearest_site(&self, x: f64) -> usize {
        let j = ((x - self.grid.min()) / self.grid.spacing()).round();
        j.clamp(0.0, (self.grid.points() - 1) as f64) as usize
    }
}

/// Lowest eigenpair; rejects wells without a bound state (`E0 >= 0`).
pub fn lattice_ground_state(well: &LatticeWell) -> Result<(f64, Vec<f64>)> {
    let (e0, psi) = well.hamiltonian()?.ground_state()?;
    if !(e0 < 0.0) {
        return Err(Error::param("well_depth", format!("no bound state on this lattice (E0 = {e0})")));
    }
    Ok((e0, psi))
}

/// `(K psi)_f / psi_f`.
pub fn lattice_kinetic_weak_value(well: &LatticeWell, psi: &[f64], site: usize) -> Result<f64> {
    let n = psi.len();
    if site == 0 || site + 1 >= n {
        return Err(Error::param("postselect_x", "must be an interior lattice site"));
    }
    if psi[site] == 0.0 {
        return Err(Error::ImpossiblePostSelection);
    }
    let k = (psi[site] - 0.5 * (psi[site - 1] + psi[site + 1])) / well.h2();
    Ok(k / psi[site])
}

/// Exact post-selected pointer for a von Neumann measurement of `K`, using
/// the sine modes that diagonalize the lattice kinetic operator.
fn kinetic_pointer(well: &LatticeWell, psi: &[f64], site: usize, delta: f64, centre: f64) -> Result<(PointerResult, f64)> {
    let n = psi.len();
    let np1 = (n + 1) as f64;
    let norm = (2.0 / np1).sqrt();
    let half = 8.0 * delta + 2.0 * centre.abs() + 5.0;
    let grid = Grid1D::symmetric(half, 2001)?;
    let reach = half + 12.0 * delta;
    let mut modes = Vec::new();
    let mut num = 0.0;
    let mut den = 0.0;
    for m in 1..=n {
        let k_m = (1.0 - (m as f64 * PI / np1).cos()) / well.h2();
        let phase = m as f64 * PI / np1;
        let coeff: f64 = psi.iter().enumerate().map(|(j, p)| p * ((j + 1) as f64 * phase).sin()).sum::<f64>() * norm;
        let a = norm * ((site + 1) as f64 * phase).sin() * coeff;
        num += a * k_m;
        den += a;
        if k_m <= reach {
            modes.push((a, k_m));
        }
    }
    let g = |q: f64| (delta * delta * PI).powf(-0.25) * (-q * q / (2.0 * delta * delta)).exp();
    let amps = grid.coordinates().into_iter().map(|q| c(modes.iter().map(|(a, k)| a * g(q - k)).sum(), 0.0)).collect();
    let wf = WaveFunction1D::new(grid, amps, Representation::Position)?;
    Ok((PointerResult::from_wavefunction(delta, &wf)?, num / den))
}

pub(super) fn scenario() -> Scenario {
    Scenario {
        name: "negative_kinetic_energy",
        summary: "Weak value of the kinetic energy at a site outside a square well equals the negative ground energy",
        params: vec![
            ParamSpec::real("x_min", -20.0, "left lattice edge"),
            ParamSpec::real("x_max", 20.0, "right lattice edge"),
            ParamSpec::int("points", 2048, "lattice sites (16-16384)"),
            ParamSpec::real("well_depth", 2.0, "depth of the square well"),
            ParamSpec::real("well_width", 2.0, "width of the square well, centred at 0"),
            ParamSpec::real("postselect_x", 3.0, "post-selection position (snapped to the nearest site)"),
            ParamSpec::real("delta", 5.0, "pointer width for the simulated measurement"),
        ],
        runner: run,
    }
}

fn run(params: &Params, seed: u64) -> Result<ScenarioOutput> {
    let points = params.count("points", 16, 16384)?;
    let grid = Grid1D::new(params.real("x_min"), params.real("x_max"), points)?;
    let well = LatticeWell::new(grid, params.real("well_depth"), params.real("well_width"))?;
    let delta = params.positive("delta")?;
    let site = well.nearest_site(params.real("postselect_x"));
    let x_f = grid.coordinate(site);
    if well.cell_potential(x_f) != 0.0 {
        return Err(Error::param("postselect_x", format!("site x = {x_f} lies inside the well")));
    }
    let mut out = ScenarioOutput::new("negative_kinetic_energy", params, seed);
    let (e0, psi) = lattice_ground_state(&well)?;
    let k_w = lattice_kinetic_weak_value(&well, &psi, site)?;

    // Same interval at half the spacing, as a discretization diagnostic.
    let fine = LatticeWell::new(Grid1D::new(grid.min(), grid.max(), 2 * points - 1)?, well.depth, well.width)?;
    let e0_fine = fine.hamiltonian()?.eigenvalue(0)?;
    let refinement = ((e0_fine - e0) / e0).abs();

    let (pointer, modal_k_w) = kinetic_pointer(&well, &psi, site, delta, e0)?;

    out.checks.push(Check::new("bound_state", e0 < 0.0, format!("E0 = {e0}")));
    out.checks.push(Check::close("weak_kinetic_equals_e0", k_w, e0, 1e-10));
    out.checks.push(Check::close("modal_weak_value", modal_k_w, k_w, 1e-6 * k_w.abs()));
    out.checks.push(Check::new("e0_converged", refinement < 1e-6, format!("relative change at half spacing {refinement:e}")));
    out.checks.push(Check::new("pointer_peak_negative", pointer.peak < 0.0, format!("peak {}", pointer.peak)));
    out.scalar("e0", e0);
    out.scalar("kinetic_weak_value", k_w);
    out.scalar("pointer_peak", pointer.peak);
    out.scalar("refinement_change", refinement);
    out.csv.push(("kinetic_pointer.csv".into(), pointer.q_csv()));
    out.results = json!({
        "e0": e0,
        "postselect_site": site,
        "postselect_x": x_f,
        "kinetic_weak_value": k_w,
        "difference": k_w - e0,
        "modal_kinetic_weak_value": modal_k_w,
        "e0_half_spacing": e0_fine,
        "refinement_relative_change": refinement,
        "pointer": {"delta": delta, "peak": pointer.peak, "mean": pointer.mean, "maxima": pointer.maxima(PEAK_THRESHOLD)},
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn well(depth: f64, width: f64) -> LatticeWell {
        LatticeWell::new(Grid1D::new(-20.0, 20.0, 2048).unwrap(), depth, width).unwrap()
    }

    #[test]
    fn deep_well_approaches_continuum() {
        // Root of k tan(k) = kappa for V0 = 50, half-width 1, to 30 digits.
        let continuum = -48.981_047_959_473_02;
        let w = well(50.0, 2.0);
        let (e0, _) = lattice_ground_state(&w).unwrap();
        assert!(((e0 - continuum) / continuum).abs() < 1e-4, "{e0}");
        assert!(e0 > -50.0 && e0 < -50.0 + PI * PI / 8.0);
    }

    #[test]
    fn shallow_well_matches_continuum() {
        let continuum = -1.469_687_465_890_862_5;
        let (e0, _) = lattice_ground_state(&well(2.0, 2.0)).unwrap();
        assert!(((e0 - continuum) / continuum).abs() < 1e-5, "{e0}");
    }

    #[test]
    fn site_inside_well_shifts_by_potential() {
        let w = well(2.0, 2.0);
        let (e0, psi) = lattice_ground_state(&w).unwrap();
        let centre = w.nearest_site(0.0);
        let u = w.cell_potential(w.grid.coordinate(centre));
        assert_eq!(u, -2.0);
        let k = lattice_kinetic_weak_value(&w, &psi, centre).unwrap();
        assert!((k - (e0 - u)).abs() < 1e-9, "{k} vs {}", e0 - u);
        assert!(k > 0.0);
    }

    #[test]
    fn negligible_well_has_no_bound_state() {
        assert!(lattice_ground_state(&well(1e-6, 0.1)).is_err());
    }

    #[test]
    fn scenario_rejects_site_in_well() {
        let s = super::super::find("negative_kinetic_energy").unwrap();
        let mut o = std::collections::BTreeMap::new();
        o.insert("postselect_x".to_string(), super::super::ParamValue::Real(0.5));
        assert!(s.run_with(&o, 1).is_err());
    }
}
