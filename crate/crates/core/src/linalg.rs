//! Dense complex linear algebra for the small matrices this crate lives on:
//! SVD, numerical rank with an explicit tolerance policy, determinants,
//! Kronecker products, and seeded random special-linear factors. Backed by
//! nalgebra; the contracts here are pinned by tests independently of the
//! backend.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Dense complex matrix, the working type for every flattening and operator.
pub type CMat = DMatrix<Complex64>;

/// Default relative singular-value cutoff: sigma counts toward the rank when
/// sigma > max(rel * sigma_max, abs).
pub const EPS_REL: f64 = 1e-9;
/// Default absolute floor for the same cutoff.
pub const EPS_ABS: f64 = 1e-12;

/// How many fresh draws `random_sl*` makes before reporting failure.
const SL_RESAMPLE_LIMIT: usize = 256;

/// Rank-decision thresholds. `rel` scales with the largest singular value,
/// `abs` is the floor that keeps all-zero matrices at rank 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: EPS_REL, abs: EPS_ABS }
    }
}

impl Tolerances {
    /// The cutoff applied to a spectrum whose largest singular value is `sigma_max`.
    pub fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.rel * sigma_max).max(self.abs)
    }
}

/// Everything a rank decision rests on, kept for margin reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankProfile {
    pub rank: usize,
    /// Smallest singular value counted toward the rank, absent for rank 0.
    pub smallest_kept: Option<f64>,
    /// Largest singular value discarded as noise, absent for full rank.
    pub largest_dropped: Option<f64>,
    pub threshold: f64,
}

/// Rejects matrices with NaN or infinite entries.
pub fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput)
    }
}

/// Full SVD `m = u * diag(sigma) * v^dagger` with singular values in
/// descending order. `u` is `nrows x k` and `v` is `ncols x k` where
/// `k = min(nrows, ncols)`.
pub fn svd(m: &CMat) -> Result<(Vec<f64>, CMat, CMat)> {
    check_finite(m)?;
    let f = m.clone().svd(true, true);
    let u = f.u.expect("u was requested");
    let v = f.v_t.expect("v_t was requested").adjoint();
    Ok((f.singular_values.iter().copied().collect(), u, v))
}

/// Singular values only, descending.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    check_finite(m)?;
    Ok(m.clone().singular_values().iter().copied().collect())
}

/// Numerical rank plus the data behind the decision.
pub fn rank_profile(m: &CMat, tol: &Tolerances) -> Result<RankProfile> {
    let s = singular_values(m)?;
    let threshold = tol.cutoff(s.first().copied().unwrap_or(0.0));
    let rank = s.iter().take_while(|&&x| x > threshold).count();
    Ok(RankProfile {
        rank,
        smallest_kept: if rank > 0 { Some(s[rank - 1]) } else { None },
        largest_dropped: s.get(rank).copied(),
        threshold,
    })
}

pub fn numerical_rank_with(m: &CMat, tol: &Tolerances) -> Result<usize> {
    Ok(rank_profile(m, tol)?.rank)
}

pub fn numerical_rank(m: &CMat) -> Result<usize> {
    numerical_rank_with(m, &Tolerances::default())
}

/// Determinant of a square matrix.
pub fn det(m: &CMat) -> Result<Complex64> {
    check_finite(m)?;
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.determinant())
}

/// Kronecker product, row-major block convention: `(a kron b)[(i1*p + i2, j1*q + j2)] = a[(i1, j1)] * b[(i2, j2)]`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Frobenius (Hilbert-Schmidt) norm.
pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

/// 2-norm condition number; infinity when the smallest singular value is 0.
pub fn condition_number(m: &CMat) -> Result<f64> {
    let s = singular_values(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    Ok(if smin == 0.0 { f64::INFINITY } else { smax / smin })
}

/// Seeded random element of SL(k, C) with condition number at most
/// `condition_cap`. ChaCha-seeded, so equal seeds give equal matrices.
pub fn random_sl(k: usize, seed: u64, condition_cap: f64) -> Result<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sl_rng(k, &mut rng, condition_cap)
}

/// Like [`random_sl`] but drawing from a caller-owned generator, so one seed
/// can feed a whole schedule of factors.
///
/// Entries are i.i.d. standard complex Gaussians; the draw is divided by the
/// principal k-th root of its determinant, which makes the determinant exactly
/// 1 up to roundoff without disturbing the distribution's orbit coverage.
/// Draws are rejected until the condition number fits under the cap.
pub fn random_sl_rng<R: Rng + ?Sized>(k: usize, rng: &mut R, condition_cap: f64) -> Result<CMat> {
    if k == 0 {
        return Err(Error::Shape("SL(0) has no elements".into()));
    }
    if condition_cap < 1.0 || condition_cap.is_nan() {
        return Err(Error::Precondition(format!(
            "condition cap must be at least 1, got {condition_cap}"
        )));
    }
    for _ in 0..SL_RESAMPLE_LIMIT {
        let g = CMat::from_fn(k, k, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let d = g.determinant();
        if d.norm() < 1e-12 {
            continue;
        }
        let root = principal_root(d, k);
        let m = g.map(|z| z / root);
        if condition_number(&m)? <= condition_cap {
            return Ok(m);
        }
    }
    Err(Error::Sampling(format!(
        "no SL({k}) draw with condition number <= {condition_cap} in {SL_RESAMPLE_LIMIT} attempts"
    )))
}

fn principal_root(z: Complex64, k: usize) -> Complex64 {
    Complex64::from_polar(z.norm().powf(1.0 / k as f64), z.arg() / k as f64)
}
