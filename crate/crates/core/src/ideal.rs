//! Ideal (strong) measurements on pre- and post-selected systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigendecomposition, product_observable, DenseOperator, DEFAULT_GROUPING_TOL};
use crate::states::{Description, StateVector};

/// Denominators at or below this value mean no outcome is compatible with
/// the post-selection.
pub const ABL_DENOMINATOR_FLOOR: f64 = 1e-24;

/// Probabilities at or above `1 - CERTAINTY_TOL` count as certain.
pub const CERTAINTY_TOL: f64 = 1e-10;

const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub eigenvalues: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    fn from_weights(eigenvalues: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > ABL_DENOMINATOR_FLOOR) {
            return Err(Error::ImpossiblePostSelection);
        }
        let probabilities = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { eigenvalues, probabilities })
    }

    pub fn probability_of(&self, eigenvalue: f64) -> Option<f64> {
        self.eigenvalues.iter().position(|&e| (e - eigenvalue).abs() <= 1e-9 * e.abs().max(1.0)).map(|i| self.probabilities[i])
    }

    /// The eigenvalue whose probability is 1 within [`CERTAINTY_TOL`].
    pub fn certain(&self) -> Option<f64> {
        self.probabilities.iter().position(|&p| p >= 1.0 - CERTAINTY_TOL).map(|i| self.eigenvalues[i])
    }

    /// `eigenvalue,probability` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,probability\n");
        for (e, p) in self.eigenvalues.iter().zip(&self.probabilities) {
            out.push_str(&format!("{e:.16e},{p:.16e}\n"));
        }
        out
    }
}

/// ABL probabilities for any description:
/// `Prob(c_n) = |A(P_n)|^2 / sum_j |A(P_j)|^2` with `A` the description's amplitude.
pub fn abl<D: Description>(description: &D, obs: &DenseOperator) -> Result<OutcomeDistribution> {
    check_dim(description.dim(), obs.dim())?;
    let spec = hermitian_eigendecomposition(obs, DEFAULT_GROUPING_TOL)?;
    let mut weights = Vec::with_capacity(spec.len());
    for p in spec.projectors() {
        weights.push(description.amplitude(p)?.norm_sqr());
    }
    OutcomeDistribution::from_weights(spec.eigenvalues().to_vec(), weights)
}

/// ABL rule for a generalized two-state vector. Identical to [`abl`]; kept as
/// a separate name for call sites that want to be explicit.
pub fn abl_generalized<D: Description>(description: &D, obs: &DenseOperator) -> Result<OutcomeDistribution> {
    abl(description, obs)
}

/// Checks that `p` is a Hermitian idempotent.
pub fn require_projector(p: &DenseOperator) -> Result<()> {
    let deviation = p.hermiticity_defect().max(p.mul(p)?.sub(p)?.max_abs());
    if !p.is_hermitian() || deviation > PROJECTOR_TOL {
        return Err(Error::NotProjector { deviation });
    }
    Ok(())
}

/// ABL rule with a degenerate post-selection projector `P_B`:
/// `Prob(c_n) ∝ ||P_B P_n |Psi>||^2`.
pub fn abl_degenerate_post(
    pre: &StateVector,
    post_projector: &DenseOperator,
    obs: &DenseOperator,
) -> Result<OutcomeDistribution> {
    check_dim(pre.dim(), obs.dim())?;
    check_dim(pre.dim(), post_projector.dim())?;
    require_projector(post_projector)?;
    let spec = hermitian_eigendecomposition(obs, DEFAULT_GROUPING_TOL)?;
    let mut weights = Vec::with_capacity(spec.len());
    for p in spec.projectors() {
        let v = post_projector.apply(&p.apply(pre.amplitudes())?)?;
        weights.push(v.norm_squared());
    }
    OutcomeDistribution::from_weights(spec.eigenvalues().to_vec(), weights)
}

/// Born rule, the pre-selection-only limit.
pub fn born(pre: &StateVector, obs: &DenseOperator) -> Result<OutcomeDistribution> {
    abl_degenerate_post(pre, &DenseOperator::identity(pre.dim()), obs)
}

/// The eigenvalue found with certainty, if any. An impossible post-selection
/// yields `None`.
pub fn certain_outcome<D: Description>(description: &D, obs: &DenseOperator) -> Result<Option<f64>> {
    match abl(description, obs) {
        Ok(dist) => Ok(dist.certain()),
        Err(Error::ImpossiblePostSelection) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRuleReport {
    pub a_certain: Option<f64>,
    pub b_certain: Option<f64>,
    /// `None` also when the product is not an observable.
    pub ab_certain: Option<f64>,
    pub product_is_observable: bool,
    pub commutator_norm: f64,
    /// Defined only when all three certainties are.
    pub product_rule_holds: Option<bool>,
}

/// Checks whether certainty of `A` and `B` carries over to `AB`.
pub fn product_rule_report<D: Description>(
    description: &D,
    a: &DenseOperator,
    b: &DenseOperator,
) -> Result<ProductRuleReport> {
    let a_certain = certain_outcome(description, a)?;
    let b_certain = certain_outcome(description, b)?;
    let commutator_norm = a.commutator(b)?.norm();
    let (ab_certain, product_is_observable) = match product_observable(a, b) {
        Ok(ab) => (certain_outcome(description, &ab)?, true),
        Err(Error::NotHermitian { .. }) => (None, false),
        Err(e) => return Err(e),
    };
    let product_rule_holds = match (a_certain, b_certain, ab_certain) {
        (Some(x), Some(y), Some(z)) => Some((x * y - z).abs() <= 1e-9 * z.abs().max(1.0)),
        _ => None,
    };
    Ok(ProductRuleReport { a_certain, b_certain, ab_certain, product_is_observable, commutator_norm, product_rule_holds })
}

/// Comparison of the two ways of decomposing `Prob(C = c_n)` over final
/// outcomes `f` of a later measurement:
///
/// `Prob(c_n) = sum_f Prob(f) * ABL(c_n | pre, f)`.
///
/// Reading (a) weights each term with `Prob(f)` computed as if `C` had not been
/// measured; reading (b) uses `Prob(f)` with the intermediate measurement of
/// `C` in place. Only (b) is guaranteed to return the Born probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualReport {
    pub eigenvalues: Vec<f64>,
    pub born: Vec<f64>,
    pub final_eigenvalues: Vec<f64>,
    /// `Prob(f)` without the intermediate measurement.
    pub final_without_measurement: Vec<f64>,
    /// `Prob(f)` with the intermediate measurement.
    pub final_with_measurement: Vec<f64>,
    pub reading_a: Vec<f64>,
    pub reading_b: Vec<f64>,
    pub reading_a_deviation: f64,
    pub reading_b_deviation: f64,
    /// `max_f |Prob_a(f) - Prob_b(f)|`.
    pub final_probability_gap: f64,
}

impl CounterfactualReport {
    /// Reading (a) misstates either the decomposed probabilities or the
    /// final-outcome weights it is built from.
    pub fn reading_a_deviates(&self, tol: f64) -> bool {
        self.reading_a_deviation > tol || self.final_probability_gap > tol
    }
}

pub fn counterfactual_decomposition_check(
    pre: &StateVector,
    obs_c: &DenseOperator,
    final_obs: &DenseOperator,
) -> Result<CounterfactualReport> {
    check_dim(pre.dim(), obs_c.dim())?;
    check_dim(pre.dim(), final_obs.dim())?;
    let pre = pre.normalized();
    let spec_c = hermitian_eigendecomposition(obs_c, DEFAULT_GROUPING_TOL)?;
    let spec_f = hermitian_eigendecomposition(final_obs, DEFAULT_GROUPING_TOL)?;
    if spec_f.len() < 2 {
        return Err(Error::param("final_obs", "needs at least two distinct outcomes"));
    }
    let born = born(&pre, obs_c)?.probabilities;

    let mut without = Vec::with_capacity(spec_f.len());
    let mut with = Vec::with_capacity(spec_f.len());
    for pf in spec_f.projectors() {
        without.push(pf.apply(pre.amplitudes())?.norm_squared());
        let mut total = 0.0;
        for pc in spec_c.projectors() {
            total += pf.apply(&pc.apply(pre.amplitudes())?)?.norm_squared();
        }
        with.push(total);
    }

    let n = spec_c.len();
    let mut reading_a = vec![0.0; n];
    let mut reading_b = vec![0.0; n];
    for (k, pf) in spec_f.projectors().iter().enumerate() {
        let conditional = match abl_degenerate_post(&pre, pf, obs_c) {
            Ok(d) => d.probabilities,
            Err(Error::ImpossiblePostSelection) => continue,
            Err(e) => return Err(e),
        };
        for i in 0..n {
            reading_a[i] += without[k] * conditional[i];
            reading_b[i] += with[k] * conditional[i];
        }
    }
    let dev = |r: &[f64]| r.iter().zip(&born).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let reading_a_deviation = dev(&reading_a);
    let reading_b_deviation = dev(&reading_b);
    let final_probability_gap = without.iter().zip(&with).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(CounterfactualReport {
        eigenvalues: spec_c.eigenvalues().to_vec(),
        born,
        final_eigenvalues: spec_f.eigenvalues().to_vec(),
        final_without_measurement: without,
        final_with_measurement: with,
        reading_a,
        reading_b,
        reading_a_deviation,
        reading_b_deviation,
        final_probability_gap,
    })
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, real_vec};
    use crate::states::{CoStateVector, TwoStateVector};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn three_box() -> TwoStateVector {
        let s = 3f64.sqrt().recip();
        TwoStateVector::new(
            CoStateVector::from_real(&[s, s, -s]).unwrap(),
            StateVector::from_real(&[s, s, s]).unwrap(),
        )
        .unwrap()
    }

    fn box_projector(i: usize) -> DenseOperator {
        DenseOperator::projector_onto(&crate::numerics::basis(3, i)).unwrap()
    }

    #[test]
    fn three_box_box_one_certain() {
        let d = abl(&three_box(), &box_projector(0)).unwrap();
        assert!((d.probability_of(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(certain_outcome(&three_box(), &box_projector(1)).unwrap(), Some(1.0));
    }

    #[test]
    fn symmetric_selection_is_born() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let d = abl(&TwoStateVector::preselected_only(psi.clone()), &DenseOperator::pauli_z()).unwrap();
        // ABL with Phi = Psi: |<Psi|P_n|Psi>|^2 normalised; levels sorted as (-1, +1) -> (0.64^2, 0.36^2).
        let (down, up) = (0.64f64.powi(2), 0.36f64.powi(2));
        assert!((d.probabilities[0] - down / (up + down)).abs() < 1e-12);
        let b = born(&psi, &DenseOperator::pauli_z()).unwrap();
        assert!((b.probabilities[1] - 0.36).abs() < 1e-12);
    }

    #[test]
    fn impossible_post_selection_is_an_error() {
        let tsv = TwoStateVector::new(CoStateVector::basis(2, 1).unwrap(), StateVector::basis(2, 0).unwrap()).unwrap();
        assert_eq!(abl(&tsv, &DenseOperator::pauli_z()).unwrap_err(), Error::ImpossiblePostSelection);
        assert_eq!(certain_outcome(&tsv, &DenseOperator::pauli_z()).unwrap(), None);
    }

    #[test]
    fn degenerate_post_reductions() {
        let psi = StateVector::from_real(&[0.5, 0.5, FRAC_1_SQRT_2]).unwrap();
        let phi = real_vec(&[0.0, 0.6, 0.8]);
        let obs = DenseOperator::from_real_diagonal(&[1.0, -1.0, 2.0]).unwrap();
        let rank1 = DenseOperator::projector_onto(&phi).unwrap();
        let via_post = abl_degenerate_post(&psi, &rank1, &obs).unwrap();
        let tsv = TwoStateVector::new(CoStateVector::from_ket(phi).unwrap(), psi.clone()).unwrap();
        let via_tsv = abl(&tsv, &obs).unwrap();
        for (x, y) in via_post.probabilities.iter().zip(&via_tsv.probabilities) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_post_span_brute_force() {
        // Pre (1,1,1)/sqrt3, post-selection onto span{(1,1,-1)/sqrt3, |3>}.
        // That span is also span{(1,1,0)/sqrt2, |3>}, so P_B = diag-block [[.5,.5,0],[.5,.5,0],[0,0,1]].
        // P_B P_1 Psi = (1/2, 1/2, 0)/sqrt3 -> |.|^2 = 1/6; P_B(1 - P_1)Psi = (1/2,1/2,1)/sqrt3 -> 1/2.
        let s = 3f64.sqrt().recip();
        let pre = StateVector::from_real(&[s, s, s]).unwrap();
        let pb = DenseOperator::hermitian_from_rows(&[
            &[c(0.5, 0.), c(0.5, 0.), c(0., 0.)],
            &[c(0.5, 0.), c(0.5, 0.), c(0., 0.)],
            &[c(0., 0.), c(0., 0.), c(1., 0.)],
        ])
        .unwrap();
        let d = abl_degenerate_post(&pre, &pb, &box_projector(0)).unwrap();
        assert!((d.probability_of(1.0).unwrap() - (1.0 / 6.0) / (1.0 / 6.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn non_projector_rejected() {
        let pre = StateVector::basis(2, 0).unwrap();
        let err = abl_degenerate_post(&pre, &DenseOperator::pauli_x(), &DenseOperator::pauli_z()).unwrap_err();
        assert!(matches!(err, Error::NotProjector { .. }));
    }

    #[test]
    fn product_rule_three_box() {
        let r = product_rule_report(&three_box(), &box_projector(0), &box_projector(1)).unwrap();
        assert_eq!((r.a_certain, r.b_certain, r.ab_certain), (Some(1.0), Some(1.0), Some(0.0)));
        assert_eq!(r.product_rule_holds, Some(false));
        assert!(r.commutator_norm < 1e-15);
    }

    #[test]
    fn product_rule_holds_for_eigenstate() {
        let tsv = TwoStateVector::preselected_only(StateVector::basis(3, 0).unwrap());
        let r = product_rule_report(&tsv, &box_projector(0), &box_projector(0)).unwrap();
        assert_eq!(r.product_rule_holds, Some(true));
    }

    #[test]
    fn counterfactual_commuting_case_agrees() {
        let pre = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let r = counterfactual_decomposition_check(&pre, &DenseOperator::pauli_z(), &DenseOperator::pauli_z()).unwrap();
        assert!(r.reading_a_deviation < 1e-12 && r.reading_b_deviation < 1e-12);
        assert!(r.final_probability_gap < 1e-12);
    }

    #[test]
    fn counterfactual_sigma_x_then_z() {
        let pre = StateVector::basis(2, 0).unwrap();
        let r = counterfactual_decomposition_check(&pre, &DenseOperator::pauli_x(), &DenseOperator::pauli_z()).unwrap();
        // Without measuring sigma_x the final sigma_z = +1 is certain; with it, each outcome has 1/2.
        assert!((r.final_without_measurement[1] - 1.0).abs() < 1e-12);
        assert!((r.final_with_measurement[1] - 0.5).abs() < 1e-12);
        assert!(r.reading_b_deviation < 1e-12);
        assert!(r.reading_a_deviates(1e-12));
    }

    #[test]
    fn counterfactual_biased_final_breaks_reading_a() {
        let pre = StateVector::basis(2, 0).unwrap();
        let fin = DenseOperator::spin_along([1.0, 0.0, 1.0]).unwrap();
        let r = counterfactual_decomposition_check(&pre, &DenseOperator::pauli_x(), &fin).unwrap();
        assert!(r.reading_b_deviation < 1e-12);
        assert!(r.reading_a_deviation > 1e-3);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let d = born(&StateVector::basis(2, 0).unwrap(), &DenseOperator::pauli_z()).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with("eigenvalue,probability\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
