//! JSON interchange types. One convention everywhere: complex values are
//! `[re, im]` pairs, matrices and state amplitude lists are row-major.

use serde::{Deserialize, Serialize};
use slocc224::{C64, CMat, ClassificationReport, InvariantSignature, PovmEnsemble, PovmReport, PureState};

/// A pure state on C^2 x C^2 x C^n: `dims` is `[2, 2, n]` and `amplitudes`
/// holds the 4n entries with Alice's index slowest, Clare's fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 3],
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &PureState) -> Self {
        Self {
            dims: [2, 2, state.n()],
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_state(self) -> Result<PureState, String> {
        if self.dims[0] != 2 || self.dims[1] != 2 {
            return Err(format!(
                "dims must be [2, 2, n], got [{}, {}, {}]",
                self.dims[0], self.dims[1], self.dims[2]
            ));
        }
        for (k, pair) in self.amplitudes.iter().enumerate() {
            if !pair[0].is_finite() || !pair[1].is_finite() {
                return Err(format!("amplitude {k} is not finite"));
            }
        }
        let amps = self.amplitudes.iter().map(|p| C64::new(p[0], p[1])).collect();
        PureState::new(self.dims[2], amps).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_cmat(m: &CMat) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), entries }
    }
}

/// Classification result as published by `classify --json`. Ranks are
/// integers, determinant data are moduli; `seed` appears only on reports
/// derived from sampled states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub class: String,
    pub method: String,
    pub signature: SignatureJson,
    pub margins: Vec<MarginJson>,
    pub tool_version: String,
    pub tolerance_rel: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl ReportFile {
    pub fn new(report: &ClassificationReport, tolerance_rel: f64, seed: Option<u64>) -> Self {
        Self {
            class: report.class.to_string(),
            method: report.method.to_string(),
            signature: SignatureJson::new(&report.signature),
            margins: report
                .margins
                .iter()
                .map(|m| MarginJson {
                    quantity: m.quantity.clone(),
                    value: m.value,
                    threshold: m.threshold,
                    margin: m.margin,
                })
                .collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerance_rel,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureJson {
    pub rank_r: usize,
    pub rank_rtr: usize,
    pub local_ranks: [usize; 3],
    pub det224_modulus: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hdet223_modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hdet222_modulus: Option<f64>,
}

impl SignatureJson {
    pub fn new(sig: &InvariantSignature) -> Self {
        Self {
            rank_r: sig.rank_r,
            rank_rtr: sig.rank_rtr,
            local_ranks: [sig.local_ranks.r1, sig.local_ranks.r2, sig.local_ranks.r3],
            det224_modulus: sig.det224.norm(),
            hdet223_modulus: sig.hdet223.map(|z| z.norm()),
            hdet222_modulus: sig.hdet222.map(|z| z.norm()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginJson {
    pub quantity: String,
    pub value: f64,
    pub threshold: f64,
    pub margin: f64,
}

/// Full invariant dump from the `invariants` command: complex values as
/// `[re, im]` with their moduli alongside, absent hyperdeterminants omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsFile {
    pub dims: [usize; 3],
    pub rank_r: usize,
    pub rank_rtr: usize,
    pub local_ranks: [usize; 3],
    pub det224: [f64; 2],
    pub det224_modulus: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hdet223: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hdet223_modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hdet222: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hdet222_modulus: Option<f64>,
    pub format_admits_hyperdeterminant: bool,
    pub tool_version: String,
    pub tolerance_rel: f64,
}

impl InvariantsFile {
    pub fn new(n: usize, sig: &InvariantSignature, admits: bool, tolerance_rel: f64) -> Self {
        Self {
            dims: [2, 2, n],
            rank_r: sig.rank_r,
            rank_rtr: sig.rank_rtr,
            local_ranks: [sig.local_ranks.r1, sig.local_ranks.r2, sig.local_ranks.r3],
            det224: [sig.det224.re, sig.det224.im],
            det224_modulus: sig.det224.norm(),
            hdet223: sig.hdet223.map(|z| [z.re, z.im]),
            hdet223_modulus: sig.hdet223.map(|z| z.norm()),
            hdet222: sig.hdet222.map(|z| [z.re, z.im]),
            hdet222_modulus: sig.hdet222.map(|z| z.norm()),
            format_admits_hyperdeterminant: admits,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerance_rel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    pub branches: Vec<BranchJson>,
    pub verification: VerificationJson,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchJson {
    pub ua: MatrixFile,
    pub ub: MatrixFile,
    pub m3: MatrixFile,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub completeness_residual: f64,
    pub min_branch_fidelity: f64,
    pub probability_sum: f64,
}

impl PovmFile {
    pub fn new(ensemble: &PovmEnsemble, report: &PovmReport) -> Self {
        Self {
            branches: ensemble
                .branches
                .iter()
                .map(|b| BranchJson {
                    ua: MatrixFile::from_cmat(&b.ua),
                    ub: MatrixFile::from_cmat(&b.ub),
                    m3: MatrixFile::from_cmat(&b.m3),
                    probability: b.probability,
                })
                .collect(),
            verification: VerificationJson {
                completeness_residual: report.completeness_residual,
                min_branch_fidelity: report.min_branch_fidelity,
                probability_sum: report.probability_sum,
            },
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Input to `mixed-class`: a pure-state decomposition with positive weights
/// summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub weight: f64,
    pub state: StateFile,
}
