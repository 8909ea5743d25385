//! JSON files for states, unitaries and channels.
//!
//! A matrix is `{"dim": d, "re": [...], "im": [...]}` in row-major order. `im` may be omitted
//! for real matrices. A state file may also hold a length-d vector, read as a pure state.
//! A channel is `{"label": ..., "kraus": [matrix, ...]}`.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityMatrix, PureStateVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(default)]
    pub label: String,
    pub kraus: Vec<MatrixFile>,
}

enum Parsed {
    Matrix(ComplexMatrix),
    Vector(Vec<C64>),
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixFile {
            dim: m.rows(),
            re: m.data().iter().map(|z| z.re).collect(),
            im: m.data().iter().map(|z| z.im).collect(),
        }
    }

    fn entries(&self) -> Result<Vec<C64>> {
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(Error::Parse(format!("re has {} entries but im has {}", self.re.len(), self.im.len())));
        }
        let out: Vec<C64> = (0..self.re.len())
            .map(|k| C64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0)))
            .collect();
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(out)
    }

    fn parse(&self) -> Result<Parsed> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        let e = self.entries()?;
        if e.len() == d * d {
            ComplexMatrix::from_vec(d, d, e).map(Parsed::Matrix)
        } else if e.len() == d {
            Ok(Parsed::Vector(e))
        } else {
            Err(Error::Parse(format!("dim {d} needs {} (matrix) or {d} (vector) entries, got {}", d * d, e.len())))
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        match self.parse()? {
            Parsed::Matrix(m) => Ok(m),
            Parsed::Vector(_) => Err(Error::Parse(format!("expected a {0}×{0} matrix, got a vector", self.dim))),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        match self.parse()? {
            Parsed::Matrix(m) => DensityMatrix::new(m),
            Parsed::Vector(v) => Ok(PureStateVec::new(v)?.density()),
        }
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    from_json::<MatrixFile>(text)?.to_state()
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    from_json::<MatrixFile>(text)?.to_matrix()
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let f: ChannelFile = from_json(text)?;
    if f.kraus.is_empty() {
        return Err(Error::Parse("channel has no Kraus operators".into()));
    }
    let ops = f.kraus.iter().map(MatrixFile::to_matrix).collect::<Result<Vec<_>>>()?;
    KrausChannel::new(f.label, ops)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(rho.mat())).expect("matrix serializes")
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    let f = ChannelFile { label: ch.label.clone(), kraus: ch.kraus_ops.iter().map(MatrixFile::from_matrix).collect() };
    serde_json::to_string_pretty(&f).expect("channel serializes")
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    parse_state(&read(path.as_ref())?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_matrix(&read(path.as_ref())?)
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<KrausChannel> {
    parse_channel(&read(path.as_ref())?)
}
