//! The nine classes and the two independent routes that assign them.
//!
//! Route one reads the pair (rank R, rank R^T R) plus Alice's local rank off
//! a nine-row table. Route two never looks at R: it reads the local rank
//! triple and, on the two ties, the sign structure of a hyperdeterminant.
//! The default entry point runs both and refuses with `Disagreement` when
//! they differ: a disagreement means the state sits close enough to a class
//! boundary that the tolerance policy, not the mathematics, is deciding.

use std::fmt;
use std::str::FromStr;

use crate::invariants::{
    self, det_zero_threshold, signature_with, InvariantSignature, DEG_HDET222, DEG_HDET223,
};
use crate::linalg::{self, RankProfile, Tolerances};
use crate::states::{Party, PureState};
use crate::{Error, Result};

/// The nine orbit types of 2 x 2 x n pure states under invertible local
/// filtering, after Clare's support is rotated down to at most four
/// dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SloccClass {
    /// Clare rank 4, nonzero 4x4 determinant; the single dense orbit.
    Generic,
    /// Clare rank 3 with nonvanishing 2x2x3 hyperdeterminant.
    MajorRank3,
    /// Clare rank 3 on the vanishing locus of that hyperdeterminant.
    MinorRank3,
    /// Three-qubit GHZ type.
    Ghz,
    /// Three-qubit W type.
    W,
    /// Alice separate, Bob-Clare entangled.
    B1,
    /// Bob separate, Alice-Clare entangled.
    B2,
    /// Clare separate, Alice-Bob entangled.
    B3,
    /// Fully separable.
    S,
}

impl SloccClass {
    pub const ALL: [SloccClass; 9] = [
        SloccClass::Generic,
        SloccClass::MajorRank3,
        SloccClass::MinorRank3,
        SloccClass::Ghz,
        SloccClass::W,
        SloccClass::B1,
        SloccClass::B2,
        SloccClass::B3,
        SloccClass::S,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SloccClass::Generic => "Generic",
            SloccClass::MajorRank3 => "MajorRank3",
            SloccClass::MinorRank3 => "MinorRank3",
            SloccClass::Ghz => "GHZ",
            SloccClass::W => "W",
            SloccClass::B1 => "B1",
            SloccClass::B2 => "B2",
            SloccClass::B3 => "B3",
            SloccClass::S => "S",
        }
    }
}

impl fmt::Display for SloccClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SloccClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "generic" => Ok(SloccClass::Generic),
            "majorrank3" | "major" => Ok(SloccClass::MajorRank3),
            "minorrank3" | "minor" => Ok(SloccClass::MinorRank3),
            "ghz" => Ok(SloccClass::Ghz),
            "w" => Ok(SloccClass::W),
            "b1" => Ok(SloccClass::B1),
            "b2" => Ok(SloccClass::B2),
            "b3" => Ok(SloccClass::B3),
            "s" => Ok(SloccClass::S),
            other => Err(format!(
                "unknown class '{other}'; expected one of Generic, MajorRank3, MinorRank3, GHZ, W, B1, B2, B3, S"
            )),
        }
    }
}

/// Which route produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    RankTable,
    HyperdetRecursive,
    CrossChecked,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::RankTable => "rank-table",
            Method::HyperdetRecursive => "hyperdet-recursive",
            Method::CrossChecked => "cross-checked",
        })
    }
}

/// One threshold decision: how far `value` sat from `threshold`, oriented so
/// that larger margins mean more confidence regardless of the decision's
/// direction. `margin` is the ratio distance `value/threshold - 1` for kept
/// values and `threshold/value - 1` for dropped ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMargin {
    pub quantity: String,
    pub value: f64,
    pub threshold: f64,
    pub margin: f64,
}

/// A class label plus everything that went into it. Both routes decide on
/// the unit-normalized input (class membership is a ray property), so the
/// embedded signature and margins are scale-canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub class: SloccClass,
    pub signature: InvariantSignature,
    pub method: Method,
    pub margins: Vec<DecisionMargin>,
}

/// The nine-row lookup. `None` for triples no pure state can produce, which
/// numerically means the tolerance policy cut the three ranks inconsistently.
pub fn class_from_rank_triple(rank_r: usize, rank_rtr: usize, r1: usize) -> Option<SloccClass> {
    match (rank_r, rank_rtr, r1) {
        (4, 4, 2) => Some(SloccClass::Generic),
        (3, 3, 2) => Some(SloccClass::MajorRank3),
        (3, 2, 2) => Some(SloccClass::MinorRank3),
        (2, 2, 2) => Some(SloccClass::Ghz),
        (2, 1, 2) => Some(SloccClass::W),
        (2, 0, 1) => Some(SloccClass::B1),
        (2, 0, 2) => Some(SloccClass::B2),
        (1, 1, 2) => Some(SloccClass::B3),
        (1, 0, 1) => Some(SloccClass::S),
        _ => None,
    }
}

fn push_rank_margins(margins: &mut Vec<DecisionMargin>, quantity: &str, p: &RankProfile) {
    if let Some(kept) = p.smallest_kept {
        margins.push(DecisionMargin {
            quantity: format!("smallest kept singular value of {quantity}"),
            value: kept,
            threshold: p.threshold,
            margin: kept / p.threshold - 1.0,
        });
    }
    if let Some(dropped) = p.largest_dropped {
        if dropped > 0.0 {
            margins.push(DecisionMargin {
                quantity: format!("largest dropped singular value of {quantity}"),
                value: dropped,
                threshold: p.threshold,
                margin: p.threshold / dropped - 1.0,
            });
        }
    }
}

fn push_zero_test_margin(
    margins: &mut Vec<DecisionMargin>,
    quantity: &str,
    value: f64,
    threshold: f64,
) {
    let margin = if value > threshold {
        value / threshold - 1.0
    } else if value > 0.0 {
        threshold / value - 1.0
    } else {
        f64::MAX
    };
    margins.push(DecisionMargin {
        quantity: quantity.to_string(),
        value,
        threshold,
        margin,
    });
}

/// Route one: the rank-triple table.
pub fn classify_by_ranks(state: &PureState) -> Result<ClassificationReport> {
    classify_by_ranks_with(state, &Tolerances::default())
}

pub fn classify_by_ranks_with(
    state: &PureState,
    tol: &Tolerances,
) -> Result<ClassificationReport> {
    // Unit scale keeps the absolute singular-value floor meaningful for
    // inputs of any magnitude: roundoff in R^T R grows with the squared norm.
    let state = &state.normalized();
    let (p_r, p_rtr) = invariants::rank_pair_profiles(state, tol)?;
    let p1 = linalg::rank_profile(&state.reduced_density(Party::Alice), tol)?;
    let mut margins = Vec::new();
    push_rank_margins(&mut margins, "R", &p_r);
    push_rank_margins(&mut margins, "R^T R", &p_rtr);
    push_rank_margins(&mut margins, "rho_1", &p1);
    match class_from_rank_triple(p_r.rank, p_rtr.rank, p1.rank) {
        Some(class) => Ok(ClassificationReport {
            class,
            signature: signature_with(state, tol)?,
            method: Method::RankTable,
            margins,
        }),
        None => Err(Error::Ambiguous {
            rank_r: p_r.rank,
            rank_rtr: p_rtr.rank,
            r1: p1.rank,
            margins,
        }),
    }
}

/// Route two: local ranks first, hyperdeterminants on the two ties. Shares no
/// decision with route one beyond the raw state.
pub fn classify_by_hyperdets(state: &PureState) -> Result<ClassificationReport> {
    classify_by_hyperdets_with(state, &Tolerances::default())
}

pub fn classify_by_hyperdets_with(
    state: &PureState,
    tol: &Tolerances,
) -> Result<ClassificationReport> {
    let state = &state.normalized();
    let p1 = linalg::rank_profile(&state.reduced_density(Party::Alice), tol)?;
    let p2 = linalg::rank_profile(&state.reduced_density(Party::Bob), tol)?;
    let p3 = linalg::rank_profile(&state.reduced_density(Party::Clare), tol)?;
    let mut margins = Vec::new();
    push_rank_margins(&mut margins, "rho_1", &p1);
    push_rank_margins(&mut margins, "rho_2", &p2);
    push_rank_margins(&mut margins, "rho_3", &p3);

    let class = match (p1.rank, p2.rank, p3.rank) {
        (2, 2, 4) => SloccClass::Generic,
        (2, 2, 3) => {
            let v = invariants::hdet223_with(state, tol)?.norm();
            let thr = det_zero_threshold(state.norm(), DEG_HDET223);
            push_zero_test_margin(&mut margins, "|hdet 2x2x3|", v, thr);
            if v > thr {
                SloccClass::MajorRank3
            } else {
                SloccClass::MinorRank3
            }
        }
        (2, 2, 2) => {
            let v = invariants::hdet222_with(state, tol)?.norm();
            let thr = det_zero_threshold(state.norm(), DEG_HDET222);
            push_zero_test_margin(&mut margins, "|hdet 2x2x2|", v, thr);
            if v > thr {
                SloccClass::Ghz
            } else {
                SloccClass::W
            }
        }
        (1, 2, 2) => SloccClass::B1,
        (2, 1, 2) => SloccClass::B2,
        (2, 2, 1) => SloccClass::B3,
        (1, 1, 1) => SloccClass::S,
        (r1, r2, r3) => {
            return Err(Error::InvalidState(format!(
                "local rank triple ({r1}, {r2}, {r3}) is not realizable by a pure 2x2xn state"
            )))
        }
    };
    Ok(ClassificationReport {
        class,
        signature: signature_with(state, tol)?,
        method: Method::HyperdetRecursive,
        margins,
    })
}

/// The default classifier: both routes, cross-checked.
///
/// # Errors
/// Everything either route can raise, plus `Disagreement` when their labels
/// differ.
pub fn classify(state: &PureState) -> Result<ClassificationReport> {
    classify_with(state, &Tolerances::default())
}

pub fn classify_with(state: &PureState, tol: &Tolerances) -> Result<ClassificationReport> {
    let by_ranks = classify_by_ranks_with(state, tol)?;
    let by_hyperdets = classify_by_hyperdets_with(state, tol)?;
    if by_ranks.class != by_hyperdets.class {
        return Err(Error::Disagreement {
            by_ranks: Box::new(by_ranks),
            by_hyperdets: Box::new(by_hyperdets),
        });
    }
    let mut margins = by_ranks.margins;
    for m in by_hyperdets.margins {
        if !margins.iter().any(|q| q.quantity == m.quantity) {
            margins.push(m);
        }
    }
    Ok(ClassificationReport {
        class: by_ranks.class,
        signature: by_ranks.signature,
        method: Method::CrossChecked,
        margins,
    })
}
