//! Ensemble-level classification and the spectral evidence that classes are
//! metrically separated.
//!
//! A decomposition of a mixed state inherits the strongest pure class among
//! its components, measured on a seven-level total order in which the three
//! biseparable classes merge (which one is biseparable depends on the party
//! grouping, not the entanglement strength). The order sorts below by
//! convertibility grade: S < Biseparable < W < GHZ < MinorRank3 < MajorRank3
//! < Generic.
//!
//! The distance bounds: for equal-shape matrices A, B with singular values
//! `a_i >= ... >= a_k`, `b_i`,
//!
//! ```text
//! ||A - B||_F >= sqrt(sum (a_i - b_i)^2)                    (always)
//! ||A - B||_F >= ||A|| / (2 (1 + ||A||)) * sqrt(sum (t_i - u_i)^2)
//! ```
//!
//! where `t_i, u_i` are the singular values of `A^T A` and `B^T B` (plain
//! transpose) and `||A|| >= ||B||` are the 2-norms. The second bound is
//! guaranteed for `||A|| <= 1` (the regime of R-matrices of normalized
//! states, which have Frobenius norm 1), and `lemma_bounds` reports
//! violations honestly outside it (A = 3I, B = 0 is a counterexample at
//! ||A|| > 1).

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify_with, SloccClass};
use crate::invariants::r_matrix;
use crate::linalg::{self, CMat, Tolerances};
use crate::orbits::{monotone_tuple, random_orbit_sample_rng, SAMPLE_CONDITION_CAP};
use crate::states::PureState;
use crate::{Error, Result};

/// Slack allowed when deciding that a bound "holds": distance may undershoot
/// a bound by at most this much before the report flags it.
pub const LEMMA_SLACK: f64 = 1e-9;

/// |sum of weights - 1| allowed in a decomposition.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;

/// A pure-state decomposition of a mixed state: positive weights summing to
/// one, all components on the same Clare dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnsemble {
    components: Vec<(f64, PureState)>,
}

impl MixedEnsemble {
    /// # Errors
    /// `InvalidState` for an empty list, nonpositive/non-finite weights, or a
    /// weight sum off 1 by more than [`WEIGHT_SUM_TOL`]; `Shape` when
    /// components have different Clare dimensions.
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidState("a decomposition needs at least one component".into()));
        }
        let n0 = components[0].1.n();
        let mut total = 0.0;
        for (w, state) in &components {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidState(format!(
                    "component weights must be positive and finite, got {w}"
                )));
            }
            if state.n() != n0 {
                return Err(Error::Shape(format!(
                    "components mix Clare dimensions {n0} and {}",
                    state.n()
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidState(format!(
                "component weights must sum to 1, got {total}"
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }
}

/// The seven levels available to a decomposition. `Ord` follows entanglement
/// strength, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MixedClass {
    S,
    Biseparable,
    W,
    Ghz,
    MinorRank3,
    MajorRank3,
    Generic,
}

impl MixedClass {
    pub fn name(&self) -> &'static str {
        match self {
            MixedClass::S => "S",
            MixedClass::Biseparable => "Biseparable",
            MixedClass::W => "W",
            MixedClass::Ghz => "GHZ",
            MixedClass::MinorRank3 => "MinorRank3",
            MixedClass::MajorRank3 => "MajorRank3",
            MixedClass::Generic => "Generic",
        }
    }
}

impl fmt::Display for MixedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a pure class sits on the mixed order.
pub fn mixed_level(class: SloccClass) -> MixedClass {
    match class {
        SloccClass::Generic => MixedClass::Generic,
        SloccClass::MajorRank3 => MixedClass::MajorRank3,
        SloccClass::MinorRank3 => MixedClass::MinorRank3,
        SloccClass::Ghz => MixedClass::Ghz,
        SloccClass::W => MixedClass::W,
        SloccClass::B1 | SloccClass::B2 | SloccClass::B3 => MixedClass::Biseparable,
        SloccClass::S => MixedClass::S,
    }
}

/// Classifies a decomposition: the maximum component level. This measures the
/// given decomposition, not the infimum over all decompositions of the same
/// density matrix; finding that infimum is a different (and hard) problem.
pub fn classify_decomposition(ensemble: &MixedEnsemble) -> Result<MixedClass> {
    classify_decomposition_with(ensemble, &Tolerances::default())
}

pub fn classify_decomposition_with(
    ensemble: &MixedEnsemble,
    tol: &Tolerances,
) -> Result<MixedClass> {
    let mut best = MixedClass::S;
    for (_, state) in ensemble.components() {
        let level = mixed_level(classify_with(state, tol)?.class);
        best = best.max(level);
    }
    Ok(best)
}

/// Both lower bounds on `||a - b||_F` from the singular-value spectra, and
/// whether the distance respects them (within [`LEMMA_SLACK`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaReport {
    pub distance: f64,
    /// `sqrt(sum (sigma_i(a) - sigma_i(b))^2)`; always a true bound.
    pub bound_sv: f64,
    /// The Gram-spectrum bound; guaranteed when the larger Hilbert-Schmidt
    /// norm is <= 1.
    pub bound_tau: f64,
    pub holds: bool,
}

/// Evaluates both bounds for an equal-shape pair. Symmetric in its arguments
/// (the pair is swapped internally so the Hilbert-Schmidt prefactor uses the
/// larger one).
pub fn lemma_bounds(a: &CMat, b: &CMat) -> Result<LemmaReport> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::Shape(format!(
            "the bounds compare equal shapes, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    // Swap so the Hilbert-Schmidt prefactor comes from the larger matrix.
    let (a, b) = if a.norm() >= b.norm() { (a, b) } else { (b, a) };
    let sa = linalg::singular_values(a)?;
    let sb = linalg::singular_values(b)?;
    let distance = (a - b).norm();
    let bound_sv = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let ta = linalg::singular_values(&(a.transpose() * a))?;
    let tb = linalg::singular_values(&(b.transpose() * b))?;
    let gram_gap = ta
        .iter()
        .zip(&tb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let anorm = a.norm();
    let bound_tau = if anorm == 0.0 {
        0.0
    } else {
        anorm / (2.0 * (1.0 + anorm)) * gram_gap
    };
    let holds = distance >= bound_sv - LEMMA_SLACK && distance >= bound_tau - LEMMA_SLACK;
    Ok(LemmaReport { distance, bound_sv, bound_tau, holds })
}

/// Monte-Carlo evidence that two classes are spectrally separated: the
/// smallest applicable lower bound on `||R_a - R_b||_F` over `samples`
/// normalized random pairs. Positive output means every sampled pair of
/// orbit members kept a nonzero R-distance certified purely by spectra.
///
/// # Errors
/// `Precondition` when the two classes share both R-spectrum invariants
/// (rank R and rank R^T R), e.g. B1 vs B2, since they differ only in local
/// ranks and no R-spectrum bound can tell them apart.
pub fn class_separation_evidence(
    a: SloccClass,
    b: SloccClass,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let (ar, artr, _, _) = monotone_tuple(a);
    let (br, brtr, _, _) = monotone_tuple(b);
    if ar == br && artr == brtr {
        return Err(Error::Precondition(format!(
            "{a} and {b} share rank R = {ar} and rank R^T R = {artr}; they differ only in local ranks, so the spectral bounds cannot separate them"
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_bound = f64::INFINITY;
    for _ in 0..samples {
        let sa = random_orbit_sample_rng(a, &mut rng, SAMPLE_CONDITION_CAP)?;
        let sb = random_orbit_sample_rng(b, &mut rng, SAMPLE_CONDITION_CAP)?;
        let report = lemma_bounds(&r_matrix(&sa), &r_matrix(&sb))?;
        // rank R differences show up in the plain spectrum; rank R^T R
        // differences are only visible in the Gram spectrum.
        let bound = if ar != br { report.bound_sv } else { report.bound_tau };
        min_bound = min_bound.min(bound);
    }
    Ok(min_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::representative;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ensemble_validation() {
        let ghz = representative(SloccClass::Ghz);
        let s = representative(SloccClass::S);
        assert!(MixedEnsemble::new(vec![]).is_err());
        assert!(MixedEnsemble::new(vec![(0.5, ghz.clone()), (0.6, s.clone())]).is_err());
        assert!(MixedEnsemble::new(vec![(-0.5, ghz.clone()), (1.5, s.clone())]).is_err());
        let ghz2 = PureState::ket_sum(2, &[(0, 0, 0), (1, 1, 1)]).unwrap();
        assert!(matches!(
            MixedEnsemble::new(vec![(0.5, ghz.clone()), (0.5, ghz2)]),
            Err(Error::Shape(_))
        ));
        assert!(MixedEnsemble::new(vec![(0.5, ghz), (0.5, s)]).is_ok());
    }

    #[test]
    fn decomposition_takes_the_strongest_component() {
        let half = 0.5;
        let mix = MixedEnsemble::new(vec![
            (half, representative(SloccClass::S)),
            (half, representative(SloccClass::Ghz)),
        ])
        .unwrap();
        assert_eq!(classify_decomposition(&mix).unwrap(), MixedClass::Ghz);

        let bisep = MixedEnsemble::new(vec![
            (0.25, representative(SloccClass::B1)),
            (0.75, representative(SloccClass::B2)),
        ])
        .unwrap();
        assert_eq!(classify_decomposition(&bisep).unwrap(), MixedClass::Biseparable);

        let wg = MixedEnsemble::new(vec![
            (0.9, representative(SloccClass::W)),
            (0.1, representative(SloccClass::Ghz)),
        ])
        .unwrap();
        assert_eq!(classify_decomposition(&wg).unwrap(), MixedClass::Ghz);

        let top = MixedEnsemble::new(vec![
            (0.99, representative(SloccClass::S)),
            (0.01, representative(SloccClass::Generic)),
        ])
        .unwrap();
        assert_eq!(classify_decomposition(&top).unwrap(), MixedClass::Generic);
    }

    #[test]
    fn the_seven_levels_are_totally_ordered() {
        use MixedClass::*;
        let chain = [S, Biseparable, W, Ghz, MinorRank3, MajorRank3, Generic];
        for w in chain.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(mixed_level(SloccClass::B2), Biseparable);
        assert_eq!(mixed_level(SloccClass::B3), Biseparable);
    }

    #[test]
    fn lemma_bounds_on_the_identity_gap() {
        // A = I4, B = 0: distance 2, sv-bound 2 (tight), tau-bound 2/3.
        let a = CMat::identity(4, 4);
        let b = CMat::zeros(4, 4);
        let rep = lemma_bounds(&a, &b).unwrap();
        assert!((rep.distance - 2.0).abs() <= 1e-12);
        assert!((rep.bound_sv - 2.0).abs() <= 1e-12);
        assert!((rep.bound_tau - 2.0 / 3.0).abs() <= 1e-12);
        assert!(rep.holds);
        // Symmetry under swapping.
        let swapped = lemma_bounds(&b, &a).unwrap();
        assert_eq!(rep, swapped);
    }

    #[test]
    fn tau_bound_fails_beyond_unit_norm_and_is_reported() {
        // A = 3 I4, B = 0: distance 6 but the tau bound claims 54/7 > 6.
        let a = CMat::identity(4, 4).map(|z| z * 3.0);
        let b = CMat::zeros(4, 4);
        let rep = lemma_bounds(&a, &b).unwrap();
        assert!((rep.distance - 6.0).abs() <= 1e-12);
        assert!((rep.bound_tau - 54.0 / 7.0).abs() <= 1e-12);
        assert!(!rep.holds);
    }

    #[test]
    fn lemma_bounds_hold_on_unit_ball_samples() {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..200 {
            let mut draw = || {
                let mut m = CMat::from_fn(4, 4, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                // Scale into the unit Frobenius ball; zero a column on some
                // trials to cover rank-deficient spectra.
                if trial % 5 == 0 {
                    for r in 0..4 {
                        m[(r, 2)] = Complex64::ZERO;
                    }
                }
                let norm = m.norm();
                m.map(|z| z / (norm * 1.000001))
            };
            let a = draw();
            let b = if trial % 7 == 0 { a.clone() } else { draw() };
            let rep = lemma_bounds(&a, &b).unwrap();
            assert!(rep.holds, "trial {trial}: {rep:?}");
            assert!(rep.distance + 1e-12 >= rep.bound_sv - LEMMA_SLACK);
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = CMat::zeros(4, 4);
        let b = CMat::zeros(4, 3);
        assert!(matches!(lemma_bounds(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn separation_evidence_for_ghz_vs_w_is_positive() {
        let bound = class_separation_evidence(SloccClass::Ghz, SloccClass::W, 50, 17).unwrap();
        assert!(bound > 0.0, "got {bound}");
    }

    #[test]
    fn separation_evidence_for_generic_vs_ghz_is_positive() {
        // The condition caps force sigma_3, sigma_4 of any generic sample's R
        // above sigma_1 / 1e6 >= 5e-7, and the GHZ side contributes zeros in
        // those slots, so the sv bound has a hard floor near 7e-7.
        let bound =
            class_separation_evidence(SloccClass::Generic, SloccClass::Ghz, 50, 18).unwrap();
        assert!(bound > 1e-7, "rank gaps should give sturdy sv bounds, got {bound}");
    }

    #[test]
    fn separation_evidence_refuses_spectrally_identical_classes() {
        match class_separation_evidence(SloccClass::B1, SloccClass::B2, 10, 0) {
            Err(Error::Precondition(msg)) => {
                assert!(msg.contains("local ranks"), "{msg}");
            }
            other => panic!("expected Precondition, got {other:?}"),
        }
    }

    #[test]
    fn scaling_a_component_does_not_change_the_level() {
        let w = representative(SloccClass::W).scaled(c(0.0, 2.0)).unwrap();
        // Weights refer to the mixture, not the vector norms; states may be
        // unnormalized rays.
        let mix = MixedEnsemble::new(vec![(1.0, w)]).unwrap();
        assert_eq!(classify_decomposition(&mix).unwrap(), MixedClass::W);
    }
}
