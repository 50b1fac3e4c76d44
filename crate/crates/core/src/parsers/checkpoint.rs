//! Binary model files.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic "CHNTCKPT" | u32 version | [u8; 32] SHA-256 of header
//! u64 header length | header JSON (model kind and shape config)
//! u32 tensor count | per tensor: u32 name length, name,
//!                    u32 rank, u64 × rank dims, f64 × len data
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::biaffine::{BiaffineConfig, BiaffineModel};
use super::mpd::MpdModel;
use super::train::TrainedModel;
use super::Parameters;
use crate::decoding::Metric;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CHNTCKPT";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Header {
    Mpd { k: usize, metric: Metric },
    Biaffine { config: BiaffineConfig },
}

/// SHA-256 of the header JSON for `model`, hex encoded.
pub fn fingerprint(model: &TrainedModel) -> String {
    let digest = Sha256::digest(header_json(model).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn header_json(model: &TrainedModel) -> String {
    let header = match model {
        TrainedModel::Mpd(m) => Header::Mpd {
            k: m.dim(),
            metric: m.metric,
        },
        TrainedModel::Biaffine(m) => Header::Biaffine {
            config: m.config.clone(),
        },
    };
    serde_json::to_string(&header).expect("header serializes")
}

pub fn to_bytes(model: &TrainedModel) -> Vec<u8> {
    let header = header_json(model);
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&Sha256::digest(header.as_bytes()));
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    let tensors = match model {
        TrainedModel::Mpd(m) => m.tensors(),
        TrainedModel::Biaffine(m) => m.tensors(),
    };
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in tensors {
        out.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
        out.extend_from_slice(t.name.as_bytes());
        out.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
        for d in &t.shape {
            out.extend_from_slice(&(*d as u64).to_le_bytes());
        }
        for x in t.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|e| *e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.at)))?;
        let out = &self.bytes[self.at..end];
        self.at = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Checkpoint("not a model file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let fp = r.take(32)?.to_vec();
    let len = r.u64()? as usize;
    let header = r.take(len)?;
    if Sha256::digest(header).as_slice() != fp.as_slice() {
        return Err(Error::Checkpoint("header fingerprint mismatch".into()));
    }
    let header: Header =
        serde_json::from_slice(header).map_err(|e| Error::Checkpoint(format!("bad header: {e}")))?;
    let mut model = match header {
        Header::Mpd { k, metric } => TrainedModel::Mpd(MpdModel {
            weight: ndarray::Array2::zeros((3, k)),
            bias: ndarray::Array1::zeros(3),
            metric,
        }),
        Header::Biaffine { config } => TrainedModel::Biaffine(BiaffineModel::zeros(config)),
    };
    let expected: Vec<(String, Vec<usize>)> = match &model {
        TrainedModel::Mpd(m) => m.tensors(),
        TrainedModel::Biaffine(m) => m.tensors(),
    }
    .into_iter()
    .map(|t| (t.name, t.shape))
    .collect();
    let count = r.u32()? as usize;
    if count != expected.len() {
        return Err(Error::Checkpoint(format!(
            "expected {} tensors, found {count}",
            expected.len()
        )));
    }
    let mut targets = match &mut model {
        TrainedModel::Mpd(m) => m.tensors_mut(),
        TrainedModel::Biaffine(m) => m.tensors_mut(),
    };
    for ((name, shape), (_, dst)) in expected.iter().zip(targets.iter_mut()) {
        let n = r.u32()? as usize;
        let got = String::from_utf8_lossy(r.take(n)?).into_owned();
        if &got != name {
            return Err(Error::Checkpoint(format!("expected tensor {name}, found {got}")));
        }
        let rank = r.u32()? as usize;
        let dims = (0..rank).map(|_| r.u64().map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
        if &dims != shape {
            return Err(Error::Checkpoint(format!("tensor {name}: shape {dims:?}, expected {shape:?}")));
        }
        for x in dst.iter_mut() {
            *x = f64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes"));
        }
    }
    drop(targets);
    if r.at != bytes.len() {
        return Err(Error::Checkpoint("trailing bytes".into()));
    }
    Ok(model)
}

pub fn save(path: &Path, model: &TrainedModel) -> Result<()> {
    fs::write(path, to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
