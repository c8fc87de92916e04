//! The invariant set behind the classification.
//!
//! Everything is computed from the 4 x n flattening. The magic matrix `T`
//! maps the Alice-Bob pair index into a frame where invertible local
//! operations of determinant 1 act as complex rotations: for
//! `R = T * flatten(state)` and an operation (M1, M2, M3) with M1, M2 in
//! SL(2, C),
//!
//! ```text
//! R' = O R M3^T,   O = T (M1 kron M2) T^dagger in SO(4, C).
//! ```
//!
//! Hence rank(R) and rank(R^T R) (plain transpose, no conjugation: O is
//! orthogonal, not just unitary) are invariants, and together with the local
//! ranks they separate most classes. The two ties that remain (within the
//! rank-3 pair and within the (2,2,2) pair) are broken by hyperdeterminants
//! of the 2x2x3 and 2x2x2 formats. For a rank-deficient M1 or M2 the same
//! calculation gives `R'^T R' = det(M1) det(M2) M3 (R^T R) M3^T`, which is
//! the reason one-sided product states have R^T R = 0 exactly.

use num_complex::Complex64;

use crate::linalg::{self, CMat, RankProfile, Tolerances};
use crate::states::{LocalRanks, PureState};
use crate::{Error, Result};

/// Tolerance on |det - 1| when certifying a factor as special linear.
pub const UNIMODULAR_TOL: f64 = 1e-8;

/// Relative floor for declaring a determinant-like invariant zero: a value of
/// homogeneity degree d counts as zero at or below `1e-8 * norm^d`.
pub const DET_ZERO_REL: f64 = 1e-8;

/// Homogeneity degrees of the three invariants in the state amplitudes.
pub const DEG_DET224: u32 = 4;
pub const DEG_HDET223: u32 = 6;
pub const DEG_HDET222: u32 = 4;

/// Zero threshold for an invariant of the given homogeneity degree on a state
/// of the given norm.
pub fn det_zero_threshold(state_norm: f64, degree: u32) -> f64 {
    DET_ZERO_REL * state_norm.powi(degree as i32)
}

/// The magic matrix: unitary, det exactly 1, and `T^T T = antidiag(1,-1,-1,1)`.
pub fn magic_t() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o = Complex64::ZERO;
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = |x: f64| Complex64::new(0.0, x);
    CMat::from_row_slice(
        4,
        4,
        &[
            r(s), o, o, r(s),
            o, i(s), i(s), o,
            o, r(-s), r(s), o,
            i(s), o, o, i(-s),
        ],
    )
}

/// `R = T * flatten(clare_normal_support(state))`, always 4 x 4.
pub fn r_matrix(state: &PureState) -> CMat {
    magic_t() * state.clare_normal_support().flatten()
}

/// `(rank R, rank R^T R)`; the transpose is plain, not conjugating.
pub fn rank_pair(state: &PureState) -> Result<(usize, usize)> {
    rank_pair_with(state, &Tolerances::default())
}

pub fn rank_pair_with(state: &PureState, tol: &Tolerances) -> Result<(usize, usize)> {
    let (a, b) = rank_pair_profiles(state, tol)?;
    Ok((a.rank, b.rank))
}

/// Rank pair plus full decision data for margin reporting.
pub fn rank_pair_profiles(
    state: &PureState,
    tol: &Tolerances,
) -> Result<(RankProfile, RankProfile)> {
    let r = r_matrix(state);
    let p_r = linalg::rank_profile(&r, tol)?;
    let rtr = r.transpose() * &r;
    let p_rtr = linalg::rank_profile(&rtr, tol)?;
    Ok((p_r, p_rtr))
}

/// Conjugates `M1 kron M2` into the magic frame: `O = T (M1 kron M2) T^dagger`.
///
/// # Errors
/// `Precondition` unless both factors are 2x2 with determinant 1 within
/// [`UNIMODULAR_TOL`]; the resulting O is then complex special orthogonal.
pub fn so4_from_sl2_pair(m1: &CMat, m2: &CMat) -> Result<CMat> {
    for (name, m) in [("M1", m1), ("M2", m2)] {
        linalg::check_finite(m)?;
        if m.nrows() != 2 || m.ncols() != 2 {
            return Err(Error::Shape(format!(
                "{name} must be 2x2, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let d = m.determinant();
        if (d - Complex64::new(1.0, 0.0)).norm() > UNIMODULAR_TOL {
            return Err(Error::Precondition(format!(
                "{name} must lie in SL(2, C); its determinant is {d}"
            )));
        }
    }
    let t = magic_t();
    Ok(&t * linalg::kron(m1, m2) * t.adjoint())
}

/// Determinant of the 4 x 4 support-normalized flattening. Nonzero exactly on
/// the generic class. For n > 4 the support rotation fixes only |det|; the
/// phase depends on the rotation convention.
pub fn det224(state: &PureState) -> Complex64 {
    state
        .clare_normal_support()
        .flatten()
        .determinant()
}

/// Moves Clare's support into the leading `k` columns and returns the 4 x k
/// block. Errors when the state genuinely occupies more than k dimensions.
fn restricted_flat(state: &PureState, k: usize, tol: &Tolerances) -> Result<CMat> {
    let f = state.clare_normal_support().flatten();
    let r3 = linalg::numerical_rank_with(&f, tol)?;
    if r3 > k {
        return Err(Error::Precondition(format!(
            "state occupies {r3} Clare dimensions, but this invariant needs at most {k}"
        )));
    }
    let scale = f.norm();
    let tail_negligible = (k..4).all(|c| f.column(c).norm() <= tol.cutoff(scale));
    let g = if tail_negligible {
        f
    } else {
        // Weight sits outside the leading columns; rotate it in. This is the
        // one step where the phase convention of the result is not canonical.
        let svd = f.clone().svd(false, true);
        &f * svd.v_t.expect("v_t was requested").adjoint()
    };
    Ok(g.view((0, 0), (4, k)).into_owned())
}

fn minor3(g: &CMat, rows: [usize; 3]) -> Complex64 {
    let a = |r: usize, c: usize| g[(rows[r], c)];
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Hyperdeterminant of the 2x2x3 format, evaluated on the leading 4 x 3
/// block after support rotation: with `D(i,j,k)` the 3x3 minor on rows i,j,k,
///
/// ```text
/// hdet223 = D(0,1,2) D(1,2,3) - D(0,1,3) D(0,2,3).
/// ```
///
/// Zero separates the two rank-3 classes: nonzero on the major class, zero on
/// the minor one. Degree 6 in the amplitudes; invariant in modulus under
/// SL(2) x SL(2) x SL(3) (an SL(4) Clare map does not fix it; it rescales by
/// the squared determinant of the induced map on the 3-dimensional support).
///
/// # Errors
/// `Precondition` when the state occupies all four Clare dimensions.
pub fn hdet223(state: &PureState) -> Result<Complex64> {
    hdet223_with(state, &Tolerances::default())
}

pub fn hdet223_with(state: &PureState, tol: &Tolerances) -> Result<Complex64> {
    let g = restricted_flat(state, 3, tol)?;
    Ok(minor3(&g, [0, 1, 2]) * minor3(&g, [1, 2, 3])
        - minor3(&g, [0, 1, 3]) * minor3(&g, [0, 2, 3]))
}

/// Hyperdeterminant of the 2x2x2 format (three-qubit), evaluated on the
/// leading 4 x 2 block after support rotation. Nonzero on the GHZ class, zero
/// on W and below. Degree 4; invariant in modulus under SL(2)^3.
///
/// # Errors
/// `Precondition` when the state occupies more than two Clare dimensions.
pub fn hdet222(state: &PureState) -> Result<Complex64> {
    hdet222_with(state, &Tolerances::default())
}

pub fn hdet222_with(state: &PureState, tol: &Tolerances) -> Result<Complex64> {
    let g = restricted_flat(state, 2, tol)?;
    let p = |i1: usize, i2: usize, i3: usize| g[(2 * i1 + i2, i3)];
    let (p000, p001) = (p(0, 0, 0), p(0, 0, 1));
    let (p010, p011) = (p(0, 1, 0), p(0, 1, 1));
    let (p100, p101) = (p(1, 0, 0), p(1, 0, 1));
    let (p110, p111) = (p(1, 1, 0), p(1, 1, 1));
    let squares = p000 * p000 * p111 * p111
        + p001 * p001 * p110 * p110
        + p010 * p010 * p101 * p101
        + p011 * p011 * p100 * p100;
    let pairs = p000 * p001 * p110 * p111
        + p000 * p010 * p101 * p111
        + p000 * p011 * p100 * p111
        + p001 * p010 * p101 * p110
        + p001 * p011 * p100 * p110
        + p010 * p011 * p100 * p101;
    let quads = p000 * p011 * p101 * p110 + p001 * p010 * p100 * p111;
    Ok(squares - pairs * 2.0 + quads * 4.0)
}

/// Whether the multilinear format `dims` has a nonzero hyperdeterminant:
/// every dimension must satisfy `k_i - 1 <= sum of the other (k_j - 1)`.
pub fn admits_hyperdeterminant(dims: &[usize]) -> bool {
    if dims.is_empty() || dims.contains(&0) {
        return false;
    }
    let total: usize = dims.iter().map(|&k| k - 1).sum();
    dims.iter().all(|&k| 2 * (k - 1) <= total)
}

/// The complete invariant signature: the rank data that picks the class row,
/// plus every (hyper)determinant defined for the state's Clare rank.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSignature {
    pub rank_r: usize,
    pub rank_rtr: usize,
    pub local_ranks: LocalRanks,
    pub det224: Complex64,
    /// Defined when the state fits in three Clare dimensions.
    pub hdet223: Option<Complex64>,
    /// Defined when the state fits in two Clare dimensions.
    pub hdet222: Option<Complex64>,
}

pub fn signature(state: &PureState) -> Result<InvariantSignature> {
    signature_with(state, &Tolerances::default())
}

pub fn signature_with(state: &PureState, tol: &Tolerances) -> Result<InvariantSignature> {
    let (p_r, p_rtr) = rank_pair_profiles(state, tol)?;
    let local_ranks = state.local_ranks_with(tol)?;
    let hdet223 = if local_ranks.r3 <= 3 {
        Some(hdet223_with(state, tol)?)
    } else {
        None
    };
    let hdet222 = if local_ranks.r3 <= 2 {
        Some(hdet222_with(state, tol)?)
    } else {
        None
    };
    Ok(InvariantSignature {
        rank_r: p_r.rank,
        rank_rtr: p_rtr.rank,
        local_ranks,
        det224: det224(state),
        hdet223,
        hdet222,
    })
}
