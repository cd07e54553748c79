//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. Doubles are written in shortest round-trip form, so reading a
//! file back reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::device::ProgrammableDevice;
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, Matrix, Povm, PureState, C64};
use crate::packing::StateNet;
use crate::Tolerances;

pub type ComplexPair = [f64; 2];
pub type MatrixRows = Vec<Vec<ComplexPair>>;

fn to_pairs(v: &[C64]) -> Vec<ComplexPair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[ComplexPair]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

fn matrix_to_rows(m: &Matrix) -> MatrixRows {
    m.rows().iter().map(|r| to_pairs(r)).collect()
}

fn rows_to_operator(rows: &MatrixRows, tol: f64) -> Result<HermitianOperator> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| from_pairs(r)).collect();
    HermitianOperator::new_with_tol(Matrix::from_rows(&rows)?, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    pub dim: usize,
    pub elements: Vec<MatrixRows>,
}

impl PovmFile {
    pub fn from_povm(p: &Povm) -> Self {
        Self { dim: p.dim(), elements: p.elements().iter().map(|e| matrix_to_rows(e.matrix())).collect() }
    }

    pub fn to_povm(&self, tol: f64) -> Result<Povm> {
        let elements = self.operators()?;
        Povm::new_with_tol(elements, tol)
    }

    fn operators(&self) -> Result<Vec<HermitianOperator>> {
        let herm_tol = Tolerances::default().arithmetic;
        let ops = self.elements.iter().map(|e| rows_to_operator(e, herm_tol)).collect::<Result<Vec<_>>>()?;
        if let Some(bad) = ops.iter().find(|e| e.dim() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, got: bad.dim() });
        }
        Ok(ops)
    }
}

/// A POVM file with the system/ancilla split recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceFile {
    pub d: usize,
    pub m: usize,
    pub dim: usize,
    pub elements: Vec<MatrixRows>,
}

impl DeviceFile {
    pub fn from_device(dev: &ProgrammableDevice) -> Self {
        let p = PovmFile::from_povm(dev.povm());
        Self { d: dev.d(), m: dev.m(), dim: p.dim, elements: p.elements }
    }

    pub fn to_device(&self, tol: f64) -> Result<ProgrammableDevice> {
        if self.d * self.m != self.dim {
            return Err(Error::DimensionMismatch { expected: self.d * self.m, got: self.dim });
        }
        let ops = PovmFile { dim: self.dim, elements: self.elements.clone() }.operators()?;
        ProgrammableDevice::new_with_tol(self.d, self.m, ops, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetFile {
    pub d: usize,
    pub threshold: f64,
    #[serde(rename = "min_pairwise_D")]
    pub min_pairwise_d: f64,
    pub states: Vec<Vec<ComplexPair>>,
}

impl NetFile {
    pub fn from_net(net: &StateNet) -> Self {
        Self {
            d: net.d,
            threshold: net.threshold,
            min_pairwise_d: net.min_pairwise_d,
            states: net.states.iter().map(|s| to_pairs(s.amplitudes())).collect(),
        }
    }

    /// Rebuilds the net and re-certifies its separation.
    pub fn to_net(&self) -> Result<StateNet> {
        let states = self.states.iter().map(|s| PureState::new(from_pairs(s))).collect::<Result<Vec<_>>>()?;
        StateNet::certify(self.d, self.threshold, states)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramsFile {
    pub m: usize,
    pub programs: Vec<Vec<ComplexPair>>,
}

impl ProgramsFile {
    pub fn from_programs(m: usize, programs: &[PureState]) -> Self {
        Self { m, programs: programs.iter().map(|p| to_pairs(p.amplitudes())).collect() }
    }

    pub fn to_programs(&self) -> Result<Vec<PureState>> {
        self.programs
            .iter()
            .map(|p| {
                let s = PureState::new(from_pairs(p))?;
                if s.dim() != self.m {
                    return Err(Error::DimensionMismatch { expected: self.m, got: s.dim() });
                }
                Ok(s)
            })
            .collect()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize infallibly");
    s.push('\n');
    s
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Invalid { path: String, source: Error },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse { path: path.display().to_string(), source })
}
