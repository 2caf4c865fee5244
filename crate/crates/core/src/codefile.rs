//! JSON exchange format for codes.
//!
//! ```json
//! {"group": "SU2", "space": {"tensor": [3, 3]},
//!  "codewords": [[[re, im], ...], ...], "meta": {...}}
//! ```
//!
//! `codewords` lists each codeword as an array of `[re, im]` amplitudes in
//! the space's basis order. Output is canonical: fixed key order, shortest
//! round-trip float formatting, sorted `meta` keys.

use std::path::Path;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intrinsic::Code;
use crate::linalg::{CMat, C64};
use crate::spaces::{build_space, SpaceSpec};

pub const GROUP_SU2: &str = "SU2";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub group: String,
    pub space: SpaceSpec,
    pub codewords: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub meta: serde_json::Map<String, serde_json::Value>,
}

impl CodeFile {
    pub fn from_code(code: &Code, meta: serde_json::Map<String, serde_json::Value>) -> Self {
        let b = code.codewords();
        let codewords = (0..b.ncols())
            .map(|j| b.column(j).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        CodeFile {
            group: GROUP_SU2.to_string(),
            space: code.space().spec().clone(),
            codewords,
            meta,
        }
    }

    pub fn to_code(&self) -> Result<Code> {
        if self.group != GROUP_SU2 {
            return Err(Error::Unsupported(format!("group '{}'", self.group)));
        }
        let space = Arc::new(build_space(&self.space)?);
        let dim = space.total_dim();
        if self.codewords.is_empty() || self.codewords.iter().any(|w| w.len() != dim) {
            return Err(Error::SpaceMismatch(format!(
                "every codeword must have {dim} amplitudes"
            )));
        }
        let k = self.codewords.len();
        let b = CMat::from_fn(dim, k, |i, j| {
            let [re, im] = self.codewords[j][i];
            C64::new(re, im)
        });
        Code::new(space, b)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

pub(crate) fn serialize_complex<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub(crate) fn serialize_complex_vec<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Matrix as nested rows of `[re, im]` pairs.
pub fn matrix_json(m: &CMat) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.ncols())
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}
