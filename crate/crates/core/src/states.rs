//! Pure states of a 2 x 2 x n system and the 4 x n flattening the whole
//! pipeline runs on.
//!
//! Amplitude layout is row-major over (i1, i2, i3) with Alice slowest:
//! `index = (2*i1 + i2) * n + i3`. The flattening puts (i1, i2) on the row
//! (same `2*i1 + i2` order) and i3 on the column, so `flatten`/`unflatten`
//! are exact relabelings, not numerical operations.

use num_complex::Complex64;

use crate::linalg::{self, CMat, Tolerances};
use crate::{Error, Result};

/// The three parties. Alice and Bob hold qubits; Clare holds the n-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
    Clare,
}

/// Ranks of the three reduced density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalRanks {
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
}

/// A nonzero pure state on C^2 x C^2 x C^n. Not necessarily normalized:
/// classification is scale-free, and conversion witnesses rescale states
/// freely.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps a raw amplitude vector (length 4n, row-major as above).
    ///
    /// # Errors
    /// `Shape` for n = 0 or a wrong-length vector, `InvalidInput` for
    /// non-finite entries, `InvalidState` for the zero vector.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("Clare dimension must be at least 1".into()));
        }
        if amps.len() != 4 * n {
            return Err(Error::Shape(format!(
                "expected {} amplitudes for n = {n}, got {}",
                4 * n,
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput);
        }
        if amps.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::InvalidState("state vector is identically zero".into()));
        }
        Ok(Self { n, amps })
    }

    /// Builds `sum c |i1 i2 i3>` from (ket, coefficient) terms. Repeated kets
    /// accumulate.
    pub fn from_terms(n: usize, terms: &[((usize, usize, usize), Complex64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("Clare dimension must be at least 1".into()));
        }
        let mut amps = vec![Complex64::ZERO; 4 * n];
        for &((i1, i2, i3), coeff) in terms {
            if i1 > 1 || i2 > 1 || i3 >= n {
                return Err(Error::Shape(format!(
                    "ket |{i1}{i2}{i3}> out of range for 2x2x{n}"
                )));
            }
            amps[(2 * i1 + i2) * n + i3] += coeff;
        }
        Self::new(n, amps)
    }

    /// Equal-weight unnormalized sum of computational kets.
    pub fn ket_sum(n: usize, kets: &[(usize, usize, usize)]) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let terms: Vec<_> = kets.iter().map(|&k| (k, one)).collect();
        Self::from_terms(n, &terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of |i1 i2 i3>. Panics on out-of-range indices.
    pub fn amplitude(&self, i1: usize, i2: usize, i3: usize) -> Complex64 {
        assert!(i1 < 2 && i2 < 2 && i3 < self.n, "ket out of range");
        self.amps[(2 * i1 + i2) * self.n + i3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// The same ray with norm 1. Well-defined because the zero vector is not
    /// constructible.
    pub fn normalized(&self) -> PureState {
        let inv = 1.0 / self.norm();
        PureState {
            n: self.n,
            amps: self.amps.iter().map(|z| z * inv).collect(),
        }
    }

    /// Multiplies every amplitude by a nonzero finite scalar.
    pub fn scaled(&self, c: Complex64) -> Result<PureState> {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidInput);
        }
        if c.norm_sqr() == 0.0 {
            return Err(Error::InvalidState("scaling by zero annihilates the state".into()));
        }
        Ok(PureState {
            n: self.n,
            amps: self.amps.iter().map(|z| z * c).collect(),
        })
    }

    /// The 4 x n matrix with (i1, i2) on row 2*i1 + i2 and i3 on the column.
    pub fn flatten(&self) -> CMat {
        CMat::from_fn(4, self.n, |r, c| self.amps[r * self.n + c])
    }

    /// Inverse of [`flatten`](Self::flatten); exact, amplitude by amplitude.
    ///
    /// # Errors
    /// `Shape` unless the matrix has exactly 4 rows; `InvalidState` /
    /// `InvalidInput` as in [`new`](Self::new).
    pub fn from_flat(m: &CMat) -> Result<Self> {
        if m.nrows() != 4 {
            return Err(Error::Shape(format!(
                "a flattened state has 4 rows, got {}",
                m.nrows()
            )));
        }
        let n = m.ncols();
        let mut amps = Vec::with_capacity(4 * n);
        for r in 0..4 {
            for c in 0..n {
                amps.push(m[(r, c)]);
            }
        }
        Self::new(n, amps)
    }

    /// Reduced density matrix of one party (2x2 for Alice/Bob, n x n for
    /// Clare). Trace equals the squared norm of the state.
    pub fn reduced_density(&self, party: Party) -> CMat {
        let n = self.n;
        let a = |i1: usize, i2: usize, i3: usize| self.amps[(2 * i1 + i2) * n + i3];
        match party {
            Party::Alice => CMat::from_fn(2, 2, |r, c| {
                let mut acc = Complex64::ZERO;
                for i2 in 0..2 {
                    for i3 in 0..n {
                        acc += a(r, i2, i3) * a(c, i2, i3).conj();
                    }
                }
                acc
            }),
            Party::Bob => CMat::from_fn(2, 2, |r, c| {
                let mut acc = Complex64::ZERO;
                for i1 in 0..2 {
                    for i3 in 0..n {
                        acc += a(i1, r, i3) * a(i1, c, i3).conj();
                    }
                }
                acc
            }),
            Party::Clare => CMat::from_fn(n, n, |r, c| {
                let mut acc = Complex64::ZERO;
                for i1 in 0..2 {
                    for i2 in 0..2 {
                        acc += a(i1, i2, r) * a(i1, i2, c).conj();
                    }
                }
                acc
            }),
        }
    }

    /// Numerical ranks of the three reduced densities.
    pub fn local_ranks(&self) -> Result<LocalRanks> {
        self.local_ranks_with(&Tolerances::default())
    }

    pub fn local_ranks_with(&self, tol: &Tolerances) -> Result<LocalRanks> {
        Ok(LocalRanks {
            r1: linalg::numerical_rank_with(&self.reduced_density(Party::Alice), tol)?,
            r2: linalg::numerical_rank_with(&self.reduced_density(Party::Bob), tol)?,
            r3: linalg::numerical_rank_with(&self.reduced_density(Party::Clare), tol)?,
        })
    }

    /// Rotates/pads Clare's local basis so the state lives on C^2 x C^2 x C^4.
    ///
    /// A 2x2xn state occupies at most rank(flatten) <= 4 of Clare's
    /// dimensions. For n < 4 this zero-pads; for n = 4 it is the identity; for
    /// n > 4 it applies the right singular basis of the flattening, which
    /// moves all weight into the leading four columns while preserving norms,
    /// singular values and all three local ranks.
    pub fn clare_normal_support(&self) -> PureState {
        match self.n {
            4 => self.clone(),
            n if n < 4 => {
                let mut amps = vec![Complex64::ZERO; 16];
                for r in 0..4 {
                    for c in 0..n {
                        amps[r * 4 + c] = self.amps[r * n + c];
                    }
                }
                PureState { n: 4, amps }
            }
            _ => {
                let f = self.flatten();
                let svd = f.clone().svd(false, true);
                let vt = svd.v_t.expect("v_t was requested");
                // f * v is 4 x 4 = u * diag(sigma); an isometry on Clare.
                let rotated = &f * vt.adjoint();
                PureState::from_flat(&rotated)
                    .expect("isometries preserve the nonzero-norm invariant")
            }
        }
    }

    /// Inner product <self|other> (conjugate-linear in `self`).
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "overlap needs equal Clare dimensions, got {} and {}",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}
