//! Deterministic preparation of any 2x2x4 target from two Bell pairs.
//!
//! The resource state groups two Bell pairs as (Alice, Bob) x Clare, so its
//! flattening is the normalized 4x4 identity. Clare measures the sixteen
//! operators
//!
//! ```text
//! M_(mu,nu) = (1/2) * F_target^T * conj(sigma_mu kron sigma_nu),
//! ```
//!
//! one per Pauli pair. Branch (mu, nu) leaves the parties holding the state
//! whose flattening is `(sigma_mu kron sigma_nu) * (I/2) * M^T = F_target / 4`
//! (the target up to normalization), after which Alice and Bob undo the
//! byproduct by applying `sigma_mu` and `sigma_nu`. Completeness
//! `sum M^dagger M = I` is the Pauli twirl identity, and every branch fires
//! with probability exactly 1/16 for a normalized target: the scheme is
//! deterministic, not postselected.

use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::states::PureState;
use crate::{Error, Result};

/// |norm - 1| allowed of a preparation target.
pub const TARGET_NORM_TOL: f64 = 1e-9;

/// Pauli matrix by index: 0 identity, 1 X, 2 Y, 3 Z.
pub fn pauli(mu: usize) -> CMat {
    let o = Complex64::ZERO;
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = |x: f64| Complex64::new(0.0, x);
    match mu {
        0 => CMat::from_row_slice(2, 2, &[r(1.0), o, o, r(1.0)]),
        1 => CMat::from_row_slice(2, 2, &[o, r(1.0), r(1.0), o]),
        2 => CMat::from_row_slice(2, 2, &[o, i(-1.0), i(1.0), o]),
        3 => CMat::from_row_slice(2, 2, &[r(1.0), o, o, r(-1.0)]),
        _ => panic!("Pauli index must be 0..=3, got {mu}"),
    }
}

/// The resource: two Bell pairs grouped as (Alice, Bob) x Clare, normalized.
/// Its flattening is I/2.
pub fn two_bell_pairs() -> PureState {
    PureState::ket_sum(4, &[(0, 0, 0), (0, 1, 1), (1, 0, 2), (1, 1, 3)])
        .expect("well-formed")
        .normalized()
}

/// One branch of the preparation: Clare's measurement operator, the Pauli
/// corrections for Alice and Bob, and the branch probability on the two-Bell
/// resource.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmBranch {
    pub ua: CMat,
    pub ub: CMat,
    pub m3: CMat,
    pub probability: f64,
}

/// The sixteen branches, ordered by (mu, nu) lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmEnsemble {
    pub branches: Vec<PovmBranch>,
}

/// What [`verify_povm`] measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmReport {
    /// `|| sum M^dagger M - I ||_F`.
    pub completeness_residual: f64,
    /// Worst overlap-squared between a branch output ray and the target ray.
    pub min_branch_fidelity: f64,
    /// Sum of the sixteen branch probabilities.
    pub probability_sum: f64,
}

/// Builds the sixteen-branch measurement preparing `target` from two Bell
/// pairs.
///
/// # Errors
/// `Precondition` when the target is not normalized within
/// [`TARGET_NORM_TOL`] or occupies more than four Clare levels (rotate with
/// `clare_normal_support` first: preparation fixes a concrete Clare frame,
/// so the rotation is left to the caller).
pub fn build_povm(target: &PureState) -> Result<PovmEnsemble> {
    if target.n() > 4 {
        return Err(Error::Precondition(format!(
            "target has Clare dimension {}; preparation needs n <= 4 (apply the support rotation first)",
            target.n()
        )));
    }
    if (target.norm() - 1.0).abs() > TARGET_NORM_TOL {
        return Err(Error::Precondition(format!(
            "target must be normalized, got norm {}",
            target.norm()
        )));
    }
    let f = target.clare_normal_support().flatten();
    let ft = f.transpose();
    let mut branches = Vec::with_capacity(16);
    for mu in 0..4 {
        for nu in 0..4 {
            let u = linalg::kron(&pauli(mu), &pauli(nu));
            let m3 = (&ft * u.conjugate()).map(|z| z * 0.5);
            // Branch output (before correction) is (I/2) applied to m3 on
            // Clare: norm^2 / 4 is the firing probability.
            let probability = {
                let x = m3.norm();
                x * x / 4.0
            };
            branches.push(PovmBranch { ua: pauli(mu), ub: pauli(nu), m3, probability });
        }
    }
    Ok(PovmEnsemble { branches })
}

/// Checks an ensemble against its target: completeness of the measurement,
/// fidelity of every corrected branch output to the target ray, and the
/// probability total.
///
/// # Errors
/// `Shape` on malformed branch matrices; `InvalidState` when a branch
/// annihilates the resource (cannot happen for ensembles from
/// [`build_povm`]).
pub fn verify_povm(ensemble: &PovmEnsemble, target: &PureState) -> Result<PovmReport> {
    if target.n() > 4 {
        return Err(Error::Precondition(
            "target has more than four Clare levels".into(),
        ));
    }
    let tf = target.clare_normal_support().flatten();
    let tnorm = tf.norm();
    let resource = two_bell_pairs().flatten(); // I/2

    let mut completeness = CMat::zeros(4, 4);
    let mut min_fidelity = f64::INFINITY;
    let mut probability_sum = 0.0;
    for b in &ensemble.branches {
        if b.m3.nrows() != 4 || b.m3.ncols() != 4 || b.ua.nrows() != 2 || b.ub.nrows() != 2 {
            return Err(Error::Shape(
                "branch operators must be 4x4 (Clare) and 2x2 (corrections)".into(),
            ));
        }
        completeness += b.m3.adjoint() * &b.m3;
        // Corrected branch output: (ua kron ub) * resource * m3^T on the flattening.
        let out = linalg::kron(&b.ua, &b.ub) * &resource * b.m3.transpose();
        let onorm = out.norm();
        if onorm <= 1e-15 {
            return Err(Error::InvalidState(
                "a branch annihilates the resource state".into(),
            ));
        }
        probability_sum += onorm * onorm;
        // dotc is conjugate-linear in self: <tf, out>.
        let overlap = tf.dotc(&out).norm();
        let fidelity = (overlap / (tnorm * onorm)).powi(2);
        min_fidelity = min_fidelity.min(fidelity);
    }
    Ok(PovmReport {
        completeness_residual: (completeness - CMat::identity(4, 4)).norm(),
        min_branch_fidelity: min_fidelity,
        probability_sum,
    })
}

/// Averages `x` over conjugation by the sixteen Pauli pairs. For any 4x4
/// input the result is `tr(x)/4 * I`, the identity behind completeness.
pub fn pauli_twirl(x: &CMat) -> Result<CMat> {
    linalg::check_finite(x)?;
    if x.nrows() != 4 || x.ncols() != 4 {
        return Err(Error::Shape(format!(
            "the twirl acts on 4x4 matrices, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let mut acc = CMat::zeros(4, 4);
    for mu in 0..4 {
        for nu in 0..4 {
            let u = linalg::kron(&pauli(mu), &pauli(nu));
            acc += u.adjoint() * x * &u;
        }
    }
    Ok(acc.map(|z| z / 16.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::SloccClass;
    use crate::orbits::{random_orbit_sample, representative};

    #[test]
    fn pauli_constants() {
        for mu in 0..4 {
            let p = pauli(mu);
            assert!((p.adjoint() * &p - CMat::identity(2, 2)).norm() <= 1e-15);
            assert!((&p - p.adjoint()).norm() <= 1e-15, "Hermitian");
        }
        let xy = &pauli(1) * pauli(2);
        let iz = pauli(3).map(|z| z * Complex64::new(0.0, 1.0));
        assert!((xy - iz).norm() <= 1e-15, "XY = iZ");
    }

    #[test]
    fn resource_flattening_is_half_identity() {
        let f = two_bell_pairs().flatten();
        assert!((f - CMat::identity(4, 4).map(|z| z * 0.5)).norm() <= 1e-15);
    }

    #[test]
    fn every_branch_fires_at_one_sixteenth_for_any_target() {
        for class in SloccClass::ALL {
            let target = representative(class);
            let ens = build_povm(&target).unwrap();
            assert_eq!(ens.branches.len(), 16);
            for b in &ens.branches {
                assert!((b.probability - 1.0 / 16.0).abs() <= 1e-12, "{class}");
            }
        }
    }

    #[test]
    fn ensembles_verify_on_representative_and_random_targets() {
        let mut targets: Vec<PureState> = SloccClass::ALL.iter().map(|&c| representative(c)).collect();
        targets.push(random_orbit_sample(SloccClass::Generic, 3).unwrap());
        targets.push(random_orbit_sample(SloccClass::W, 4).unwrap());
        for target in targets {
            let ens = build_povm(&target).unwrap();
            let report = verify_povm(&ens, &target).unwrap();
            assert!(report.completeness_residual <= 1e-10);
            assert!(report.min_branch_fidelity >= 1.0 - 1e-9);
            assert!((report.probability_sum - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn small_targets_are_padded_before_building() {
        let ghz2 = PureState::ket_sum(2, &[(0, 0, 0), (1, 1, 1)])
            .unwrap()
            .normalized();
        let ens = build_povm(&ghz2).unwrap();
        let report = verify_povm(&ens, &ghz2).unwrap();
        assert!(report.min_branch_fidelity >= 1.0 - 1e-9);
    }

    #[test]
    fn preconditions_are_enforced() {
        let unnorm = PureState::ket_sum(4, &[(0, 0, 0), (1, 1, 1)]).unwrap();
        assert!(matches!(build_povm(&unnorm), Err(Error::Precondition(_))));
        let wide = PureState::ket_sum(5, &[(0, 0, 0), (1, 1, 4)])
            .unwrap()
            .normalized();
        assert!(matches!(build_povm(&wide), Err(Error::Precondition(_))));
    }

    #[test]
    fn tampered_ensembles_fail_verification() {
        let target = representative(SloccClass::Ghz);
        let mut ens = build_povm(&target).unwrap();
        // Wrong correction on one branch: fidelity drops.
        ens.branches[5].ua = pauli(3);
        let report = verify_povm(&ens, &target).unwrap();
        assert!(report.min_branch_fidelity < 1.0 - 1e-6);

        // Dropping a branch breaks completeness and the probability total.
        let mut short = build_povm(&target).unwrap();
        short.branches.pop();
        let report = verify_povm(&short, &target).unwrap();
        assert!(report.completeness_residual > 1e-3);
        assert!((report.probability_sum - 1.0).abs() > 1e-3);
    }

    #[test]
    fn twirl_projects_onto_the_trace() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(8);
        use rand::Rng;
        use rand_distr::StandardNormal;
        let x = CMat::from_fn(4, 4, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let tw = pauli_twirl(&x).unwrap();
        let trace: Complex64 = (0..4).map(|i| x[(i, i)]).sum();
        let expected = CMat::identity(4, 4).map(|z| z * (trace / 4.0));
        assert!((tw - expected).norm() <= 1e-12);
        assert!(pauli_twirl(&CMat::zeros(2, 2)).is_err());
    }
}
