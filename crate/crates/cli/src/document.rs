//! JSON tuple documents.
//!
//! ```json
//! {"dim": 2, "states": [{"kind": "pure", "data": [[1, 0], [0, 0]]},
//!                       {"kind": "mixed", "data": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}]}
//! ```
//!
//! Complex numbers are `[re, im]`. Mixed states are `dim x dim`, row-major.

use bargmann_core::linalg::{ComplexMatrix, DensityMatrix, State, StateTuple, UnitVector};
use bargmann_core::{Complex64, Error as CoreError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleDocument {
    pub dim: usize,
    pub states: Vec<StateEntry>,
}

/// First violated constraint of a document, located by a JSON pointer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{pointer}: {message}")]
pub struct ValidationError {
    pub pointer: String,
    pub message: String,
}

impl ValidationError {
    fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

fn complexes(data: &[[f64; 2]]) -> Vec<Complex64> {
    data.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn describe(e: CoreError) -> String {
    match e {
        CoreError::NotUnitNorm(dev) => format!("normalization: squared norm deviates from 1 by {dev:e}"),
        CoreError::InvalidTrace(dev) => format!("trace: deviates from 1 by {dev:e}"),
        CoreError::NotHermitian(dev) => format!("hermiticity: max deviation {dev:e}"),
        CoreError::NotPsd(min) => format!("positivity: min eigenvalue {min:e}"),
        other => other.to_string(),
    }
}

/// Parses a document into a tuple, enforcing unit norms, Hermiticity, unit
/// trace and positivity.
pub fn validate_document(doc: &TupleDocument) -> Result<StateTuple, ValidationError> {
    let d = doc.dim;
    if d == 0 {
        return Err(ValidationError::at("/dim", "dimension must be at least 1"));
    }
    if doc.states.is_empty() {
        return Err(ValidationError::at("/states", "tuple must contain at least one state"));
    }
    let mut states = Vec::with_capacity(doc.states.len());
    for (k, entry) in doc.states.iter().enumerate() {
        let ptr = format!("/states/{k}/data");
        if entry.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(ValidationError::at(ptr, "non-finite entry"));
        }
        let state = match entry.kind {
            StateKind::Pure => {
                if entry.data.len() != d {
                    return Err(ValidationError::at(
                        ptr,
                        format!("dimension mismatch: {} amplitudes for dim {d}", entry.data.len()),
                    ));
                }
                State::Pure(UnitVector::new(complexes(&entry.data)).map_err(|e| ValidationError::at(&ptr, describe(e)))?)
            }
            StateKind::Mixed => {
                if entry.data.len() != d * d {
                    return Err(ValidationError::at(
                        ptr,
                        format!("dimension mismatch: {} entries for a {d}x{d} matrix", entry.data.len()),
                    ));
                }
                let m = ComplexMatrix::from_row_major(d, d, complexes(&entry.data))
                    .map_err(|e| ValidationError::at(&ptr, describe(e)))?;
                State::Mixed(DensityMatrix::new(m).map_err(|e| ValidationError::at(&ptr, describe(e)))?)
            }
        };
        states.push(state);
    }
    StateTuple::new(states).map_err(|e| ValidationError::at("/states", describe(e)))
}

/// Document form of a tuple.
pub fn tuple_document(tuple: &StateTuple) -> TupleDocument {
    let pair = |z: &Complex64| [z.re, z.im];
    TupleDocument {
        dim: tuple.dim(),
        states: tuple
            .states()
            .iter()
            .map(|s| match s {
                State::Pure(v) => StateEntry {
                    kind: StateKind::Pure,
                    data: v.amplitudes().iter().map(pair).collect(),
                },
                State::Mixed(m) => StateEntry {
                    kind: StateKind::Mixed,
                    data: m.matrix().as_slice().iter().map(pair).collect(),
                },
            })
            .collect(),
    }
}
