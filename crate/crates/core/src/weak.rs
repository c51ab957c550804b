//! Weak values, spin-1/2 weak vectors and the directions of certain spin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{abl, certain_outcome, require_projector};
use crate::numerics::{c, hermitian_eigendecomposition, DenseOperator, C64, DEFAULT_GROUPING_TOL};
use crate::states::{Description, StateVector, NEAR_ORTHOGONAL_EPS};

/// Tolerance for "weak value equals an eigenvalue" and similar comparisons.
pub const THEOREM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    #[serde(with = "pair")]
    pub value: C64,
    /// Magnitude of the denominator, for judging conditioning.
    pub overlap_magnitude: f64,
}

mod pair {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(c(re, im))
    }
}

impl WeakValue {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

/// `A(C) / A(I)` for any description: `<Phi|C|Psi>/<Phi|Psi>` for a two-state
/// vector and `sum alpha_i <Phi_i|C|Psi_i> / sum alpha_i <Phi_i|Psi_i>` for the
/// generalized form. `obs` may be any operator; weak values are linear.
pub fn weak_value<D: Description>(description: &D, obs: &DenseOperator) -> Result<WeakValue> {
    if obs.dim() != description.dim() {
        return Err(Error::DimensionMismatch { expected: description.dim(), found: obs.dim() });
    }
    let denominator = description.overlap()?;
    let eps = description.epsilon();
    if denominator.norm() <= eps {
        return Err(Error::NearOrthogonal { overlap: denominator.norm(), threshold: eps });
    }
    let value = description.amplitude(obs)? / denominator;
    Ok(WeakValue { value, overlap_magnitude: denominator.norm() })
}

/// Same computation as [`weak_value`], named for generalized descriptions.
pub fn weak_value_generalized<D: Description>(description: &D, obs: &DenseOperator) -> Result<WeakValue> {
    weak_value(description, obs)
}

/// `<Psi| P C |Psi> / <Psi| P |Psi>` for a degenerate post-selection projector `P`.
pub fn weak_value_degenerate_post(
    pre: &StateVector,
    post_projector: &DenseOperator,
    obs: &DenseOperator,
) -> Result<WeakValue> {
    require_projector(post_projector)?;
    let psi = pre.amplitudes();
    let denominator = post_projector.sandwich(psi, psi)?;
    if denominator.norm() <= NEAR_ORTHOGONAL_EPS {
        return Err(Error::NearOrthogonal { overlap: denominator.norm(), threshold: NEAR_ORTHOGONAL_EPS });
    }
    let numerator = post_projector.mul(obs)?.sandwich(psi, psi)?;
    Ok(WeakValue { value: numerator / denominator, overlap_magnitude: denominator.norm() })
}

/// Weak values of `(sigma_x, sigma_y, sigma_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakVector {
    #[serde(with = "pair")]
    pub wx: C64,
    #[serde(with = "pair")]
    pub wy: C64,
    #[serde(with = "pair")]
    pub wz: C64,
}

impl WeakVector {
    pub fn components(&self) -> [C64; 3] {
        [self.wx, self.wy, self.wz]
    }

    pub fn real_part(&self) -> [f64; 3] {
        self.components().map(|z| z.re)
    }

    pub fn imag_part(&self) -> [f64; 3] {
        self.components().map(|z| z.im)
    }

    /// Weak value of `n . sigma` for a unit direction.
    pub fn project(&self, n: [f64; 3]) -> C64 {
        self.wx * n[0] + self.wy * n[1] + self.wz * n[2]
    }
}

pub fn weak_vector<D: Description>(description: &D) -> Result<WeakVector> {
    if description.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: description.dim() });
    }
    Ok(WeakVector {
        wx: weak_value(description, &DenseOperator::pauli_x())?.value,
        wy: weak_value(description, &DenseOperator::pauli_y())?.value,
        wz: weak_value(description, &DenseOperator::pauli_z())?.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeDirection {
    /// Polar angle from `z`.
    pub theta: f64,
    /// Azimuth from `x` towards `y`.
    pub phi: f64,
    pub direction: [f64; 3],
    /// `Prob(sigma_eta = +1)` from the ABL rule.
    pub prob_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertaintyCone {
    pub weak_vector: WeakVector,
    /// Axis and half-angle when the weak vector is real.
    pub axis: Option<[f64; 3]>,
    pub half_angle: Option<f64>,
    pub directions: Vec<ConeDirection>,
    /// Directions where the weak criterion held but the ABL check did not.
    pub rejected: usize,
}

impl CertaintyCone {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,phi,prob\n");
        for d in &self.directions {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", d.theta, d.phi, d.prob_plus));
        }
        out
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    a.map(|x| x * s)
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    scale(a, dot(a, a).sqrt().recip())
}

/// Two unit vectors orthogonal to `axis` and to each other.
fn orthonormal_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit(cross(axis, helper));
    let e2 = cross(axis, e1);
    (e1, e2)
}

/// Directions `eta` with `Prob(sigma_eta = 1) = 1`.
///
/// A dichotomic spin component is certain to be `+1` exactly when its weak
/// value is `1`, i.e. `eta . w = 1` with `w` the weak vector. For real `w` the
/// solutions form a cone around `w` of half-angle `arccos(1/|w|)`, sampled
/// at `samples` azimuths; for complex `w` they are the (at most two) unit
/// vectors with `eta . Re w = 1` and `eta . Im w = 0`. Every candidate is
/// re-checked with the ABL rule.
pub fn certainty_cone<D: Description>(description: &D, samples: usize) -> Result<CertaintyCone> {
    if samples < 8 {
        return Err(Error::param("samples", "must be at least 8"));
    }
    let w = weak_vector(description)?;
    let re = w.real_part();
    let im = w.imag_part();
    let re_norm = dot(re, re).sqrt();
    let im_norm = dot(im, im).sqrt();

    let mut candidates = Vec::new();
    let mut axis = None;
    let mut half_angle = None;
    if im_norm <= 1e-12 * re_norm.max(1.0) {
        if (re_norm - 1.0).abs() <= 1e-12 {
            axis = Some(unit(re));
            half_angle = Some(0.0);
            candidates.push(unit(re));
        } else if re_norm > 1.0 {
            let a = unit(re);
            let cos_half = 1.0 / re_norm;
            let sin_half = (1.0 - cos_half * cos_half).sqrt();
            let (e1, e2) = orthonormal_frame(a);
            axis = Some(a);
            half_angle = Some(cos_half.acos());
            for k in 0..samples {
                let psi = 2.0 * PI * k as f64 / samples as f64;
                let around = add(scale(e1, psi.cos()), scale(e2, psi.sin()));
                candidates.push(add(scale(a, cos_half), scale(around, sin_half)));
            }
        }
    } else {
        // p = alpha Re w + beta Im w with p.Re w = 1, p.Im w = 0, then p + t (Re w x Im w).
        let (aa, ab, bb) = (dot(re, re), dot(re, im), dot(im, im));
        let det = aa * bb - ab * ab;
        if det.abs() > 1e-24 {
            let alpha = bb / det;
            let beta = -ab / det;
            let p = add(scale(re, alpha), scale(im, beta));
            let d = cross(re, im);
            let rest = 1.0 - dot(p, p);
            let dd = dot(d, d);
            if rest >= -1e-12 {
                let t = (rest.max(0.0) / dd).sqrt();
                candidates.push(add(p, scale(d, t)));
                if t > 1e-12 {
                    candidates.push(add(p, scale(d, -t)));
                }
            }
        }
    }

    let mut directions = Vec::with_capacity(candidates.len());
    let mut rejected = 0;
    for eta in candidates {
        let eta = unit(eta);
        let obs = DenseOperator::spin_along(eta)?;
        let prob_plus = match abl(description, &obs) {
            Ok(d) => d.probability_of(1.0).unwrap_or(0.0),
            Err(Error::ImpossiblePostSelection) => 0.0,
            Err(e) => return Err(e),
        };
        if prob_plus >= 1.0 - crate::ideal::CERTAINTY_TOL {
            directions.push(ConeDirection {
                theta: eta[2].clamp(-1.0, 1.0).acos(),
                phi: eta[1].atan2(eta[0]),
                direction: eta,
                prob_plus,
            });
        } else {
            rejected += 1;
        }
    }
    Ok(CertaintyCone { weak_vector: w, axis, half_angle, directions, rejected })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub status: TheoremStatus,
    pub certain: Option<f64>,
    pub weak_value: Option<WeakValue>,
    pub eigenvalues: Vec<f64>,
}

/// If some eigenvalue is certain, the weak value must equal it.
pub fn theorem_i_check<D: Description>(description: &D, obs: &DenseOperator) -> Result<TheoremReport> {
    let spec = hermitian_eigendecomposition(obs, DEFAULT_GROUPING_TOL)?;
    let certain = certain_outcome(description, obs)?;
    let weak = weak_value(description, obs).ok();
    let status = match (certain, weak) {
        (None, _) => TheoremStatus::NotApplicable,
        (Some(cn), Some(w)) if (w.value - c(cn, 0.0)).norm() <= THEOREM_TOL * cn.abs().max(1.0) => TheoremStatus::Pass,
        (Some(_), _) => TheoremStatus::Fail,
    };
    Ok(TheoremReport { status, certain, weak_value: weak, eigenvalues: spec.eigenvalues().to_vec() })
}

/// For a dichotomic observable, a weak value equal to an eigenvalue implies
/// that eigenvalue is certain.
pub fn theorem_ii_check<D: Description>(description: &D, obs: &DenseOperator) -> Result<TheoremReport> {
    let spec = hermitian_eigendecomposition(obs, DEFAULT_GROUPING_TOL)?;
    if spec.len() != 2 {
        return Err(Error::NotDichotomic { distinct: spec.len() });
    }
    let weak = weak_value(description, obs).ok();
    let certain = certain_outcome(description, obs)?;
    let matched = weak.and_then(|w| {
        spec.eigenvalues()
            .iter()
            .copied()
            .find(|&e| (w.value - c(e, 0.0)).norm() <= THEOREM_TOL * e.abs().max(1.0))
    });
    let status = match matched {
        None => TheoremStatus::NotApplicable,
        Some(e) if certain.is_some_and(|cn| (cn - e).abs() <= THEOREM_TOL * e.abs().max(1.0)) => TheoremStatus::Pass,
        Some(_) => TheoremStatus::Fail,
    };
    Ok(TheoremReport { status, certain, weak_value: weak, eigenvalues: spec.eigenvalues().to_vec() })
}
