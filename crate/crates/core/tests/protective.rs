use std::f64::consts::SQRT_2;

use tsvf_core::numerics::{c, DenseOperator, C64};
use tsvf_core::protective::*;
use tsvf_core::states::StateVector;
use tsvf_core::weak::weak_value;

fn sz_sx_run(t: f64) -> AdiabaticReport {
    let a = DenseOperator::pauli_z().add(&DenseOperator::pauli_x().scale(0.3)).unwrap();
    adiabatic_protective_measurement(
        &DenseOperator::pauli_z(),
        &a,
        &StateVector::basis(2, 0).unwrap(),
        &AdiabaticSchedule::new(t).unwrap(),
        &MomentumPointer::new(1.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn eigenstate_shift_converges_like_one_over_t() {
    let errors: Vec<f64> = [10.0, 20.0, 40.0, 80.0].iter().map(|&t| (sz_sx_run(t).pointer_shift - 1.0).abs()).collect();
    println!("{errors:?}");
    for w in errors.windows(2) {
        assert!(w[1] / w[0] <= 0.75);
    }
}

#[test]
fn transverse_observable_has_no_shift() {
    let r = adiabatic_protective_measurement(
        &DenseOperator::pauli_z(),
        &DenseOperator::pauli_x(),
        &StateVector::basis(2, 0).unwrap(),
        &AdiabaticSchedule::new(20.0).unwrap(),
        &MomentumPointer::new(1.0).unwrap(),
    )
    .unwrap();
    assert!(r.pointer_shift.abs() < 1e-3, "{}", r.pointer_shift);
    assert!(!r.leakage_flagged);
}

#[test]
fn superposition_splits_into_branches_and_repeats() {
    let h0 = DenseOperator::pauli_z();
    let a = DenseOperator::pauli_z().add(&DenseOperator::pauli_x().scale(0.3)).unwrap();
    let sched = AdiabaticSchedule::new(40.0).unwrap();
    let ptr = MomentumPointer::new(1.0).unwrap();
    let init = StateVector::from_real(&[0.6, 0.8]).unwrap();
    let r = adiabatic_protective_measurement(&h0, &a, &init, &sched, &ptr).unwrap();
    // Eigenvalue order is (-1, +1).
    let probs = r.outcome_probabilities();
    assert!((probs[0] - 0.64).abs() < 1e-2 && (probs[1] - 0.36).abs() < 1e-2, "{probs:?}");
    for b in &r.branches {
        assert!((b.shift - b.expectation).abs() < 1e-2, "{} vs {}", b.shift, b.expectation);
    }
    let again = repeat_on_branch(&r, 1, &h0, &a, &sched, &ptr).unwrap();
    assert!((again.pointer_shift - r.branches[1].shift).abs() < 1e-3);
    assert!(adiabatic_protective_measurement(&DenseOperator::identity(2), &a, &init, &sched, &ptr).is_err());
}

#[test]
fn protection_control_and_trend() {
    let xi = DenseOperator::spin_along([1.0, 1.0, 0.0]).unwrap();
    let ptr = MomentumPointer::new(1.0).unwrap();
    let x = [1.0, 0.0, 0.0];
    let y = [0.0, 1.0, 0.0];
    let off = protected_two_state_measurement(x, y, &xi, 10, 0.0, &ptr).unwrap();
    assert!((off.shift - SQRT_2).abs() > 0.02 * SQRT_2, "{}", off.shift);
    let errs: Vec<f64> = [5.0, 15.0, 50.0]
        .iter()
        .map(|r| protected_two_state_measurement(x, y, &xi, 10, r / 10.0, &ptr).unwrap().error.abs())
        .collect();
    println!("{errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    assert!(errs[2] < 0.02 * SQRT_2);
}

#[test]
fn hermitian_protection_gives_expectation() {
    let xi = DenseOperator::spin_along([1.0, 1.0, 0.0]).unwrap();
    let ptr = MomentumPointer::new(1.0).unwrap();
    let x = [1.0, 0.0, 0.0];
    let r = protected_two_state_measurement(x, x, &xi, 10, 5.0, &ptr).unwrap();
    assert!((r.target_value - 1.0 / SQRT_2).abs() < 1e-12);
    assert!((r.shift - r.target_value).abs() < 0.02, "{}", r.shift);
}

#[test]
fn substituted_hamiltonian_matches_componentwise_weak_values() {
    let spin = LargeSpin::new(10).unwrap();
    let prot = protector_description(&spin, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
    let h = weak_value_substituted_hamiltonian(&prot, &spin, 0.3).unwrap();
    let sig = [DenseOperator::pauli_x(), DenseOperator::pauli_y(), DenseOperator::pauli_z()];
    let mut expect = DenseOperator::zeros(2);
    for (op, s) in spin.components().iter().zip(&sig) {
        let w = weak_value(&prot, op).unwrap().value;
        expect = expect.add(&s.scale_complex(w * -0.3)).unwrap();
    }
    assert!(h.sub(&expect).unwrap().max_abs() < 1e-12);
    let want = [c(10.0, 0.0), c(10.0, 0.0), c(0.0, 10.0)];
    let got = spin_weak_vector(&prot, &spin).unwrap();
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).norm() < 1e-10);
    }

    let zz = protector_description(&spin, [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).unwrap();
    let w = spin_weak_vector(&zz, &spin).unwrap();
    assert!(w[0].norm() < 1e-12 && w[1].norm() < 1e-12 && (w[2] - c(10.0, 0.0)).norm() < 1e-12);
    assert!(weak_value_substituted_hamiltonian(&zz, &spin, 1.0).unwrap().hermiticity_defect() < 1e-12);
}

#[test]
fn model_spin_in_three_dimensions() {
    let pre = StateVector::from_slice(&[c(0.3, 0.1), c(-0.5, 0.4), c(0.2, -0.6)]).unwrap().normalized();
    let post = StateVector::from_slice(&[c(0.7, 0.0), c(0.1, -0.3), c(-0.2, 0.5)]).unwrap().normalized();
    let m = model_spin_protection(&pre, &post, 6, 0.5).unwrap();
    let (e, right, left) = eigen_residuals(&m.effective_hamiltonian, &pre, &post.dual());
    assert!(right < 1e-10 && left < 1e-10, "{right} {left}");
    assert!((e - C64::new(-3.0, 0.0)).norm() < 1e-10, "{e}");
    assert!(m.hamiltonian.is_hermitian());
}

#[test]
fn model_spin_degenerate_cases() {
    let up = StateVector::spin_up([1.0, 0.0, 0.0]).unwrap();
    let same = model_spin_protection(&up, &up, 4, 1.0).unwrap();
    assert!((same.chi[2] - 1.0).abs() < 1e-12 && same.b.abs() < 1e-12);
    assert!(same.effective_hamiltonian.hermiticity_defect() < 1e-12);

    let uy = StateVector::spin_up([0.0, 1.0, 0.0]).unwrap();
    let m = model_spin_protection(&up, &uy, 4, 1.0).unwrap();
    let (e, r, l) = eigen_residuals(&m.effective_hamiltonian, &up, &uy.dual());
    assert!(r < 1e-10 && l < 1e-10 && (e - c(-4.0, 0.0)).norm() < 1e-10);

    let down = StateVector::spin_up([-1.0, 0.0, 0.0]).unwrap();
    assert!(model_spin_protection(&up, &down, 4, 1.0).is_err());
}
