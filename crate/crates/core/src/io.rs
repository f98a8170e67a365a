//! JSON serialization of states in the `J_z` basis.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{SpinQuantum, SpinState};
use crate::states::StateKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub two_j: u32,
    /// Always `"z"`.
    pub basis: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub kind: String,
    pub params: BTreeMap<String, f64>,
}

impl StateRecord {
    pub fn new(state: &SpinState, kind: Option<&StateKind>) -> Self {
        StateRecord {
            two_j: state.j().two_j(),
            basis: "z".into(),
            re: state.coeffs().iter().map(|c| c.re).collect(),
            im: state.coeffs().iter().map(|c| c.im).collect(),
            kind: kind.map_or_else(|| "custom".into(), |k| k.label().into()),
            params: kind
                .map(|k| k.params().into_iter().map(|(n, v)| (n.to_string(), v)).collect())
                .unwrap_or_default(),
        }
    }

    /// Rebuilds the state without renormalizing, so values round-trip exactly.
    /// The norm must already be within `1e-12` of one.
    pub fn to_state(&self) -> Result<SpinState> {
        if self.basis != "z" {
            return Err(Error::Format(format!("unsupported basis '{}'", self.basis)));
        }
        let j = SpinQuantum::new(self.two_j)?;
        if self.re.len() != j.dim() || self.im.len() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: j.dim(),
                got: self.re.len().max(self.im.len()),
            });
        }
        let coeffs: Vec<Complex64> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        SpinState::new(j, coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn save_state(path: &Path, state: &SpinState, kind: Option<&StateKind>) -> Result<()> {
    fs::write(path, StateRecord::new(state, kind).to_json() + "\n")
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn load_state(path: &Path) -> Result<SpinState> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    StateRecord::from_json(&text)?.to_state()
}
