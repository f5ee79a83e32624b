//! Trained models (`.mbm`).
//!
//! ```text
//! "MBM1" u32 version=1
//! u64 len + UTF-8 canonical config text
//! u64 count + count × u64 training example indices
//! 2 × PCA block:
//!     f64 look_angle_deg  u32 F  u32 T  u32 K
//!     F·T f64 mean image (row-major)  T·K f64 basis (row-major)  K f64 eigenvalues
//! NN block:
//!     u32 metric id  u32 count  u32 dim
//!     count × (u32 label, dim × f64)
//! ```
//!
//! All values are stored at full precision, so load followed by save
//! reproduces the file byte for byte.

use std::path::Path;

use microbeam_core::classify::{Metric, NnModel};
use microbeam_core::features::{FusedFeature, PcaModel};
use microbeam_core::Matrix;

use super::{Reader, Writer};
use crate::error::{CliError, Result};

const MAGIC: &[u8; 4] = b"MBM1";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    /// Canonical configuration the model was trained with.
    pub config_text: String,
    /// Dataset indices of the training examples, ascending.
    pub train_indices: Vec<usize>,
    pub pca: (PcaModel, PcaModel),
    pub nn: NnModel,
}

fn put_pca(w: &mut Writer, m: &PcaModel) {
    w.f64(m.look_angle_deg());
    w.u32(m.num_bins() as u32);
    w.u32(m.num_frames() as u32);
    w.u32(m.k() as u32);
    w.f64s(m.mean_image().as_slice());
    w.f64s(m.basis().as_slice());
    w.f64s(m.eigenvalues());
}

fn get_pca(r: &mut Reader) -> Result<PcaModel> {
    let look = r.f64()?;
    let f = r.usize32()?;
    let t = r.usize32()?;
    let k = r.usize32()?;
    let mean = Matrix::from_vec(f, t, r.f64s(f.saturating_mul(t))?)?;
    let basis = Matrix::from_vec(t, k, r.f64s(t.saturating_mul(k))?)?;
    let values = r.f64s(k)?;
    PcaModel::new(mean, basis, values, look).map_err(|e| r.error(e.to_string()))
}

pub fn encode(m: &TrainedModel) -> Vec<u8> {
    let mut w = Writer::with_header(MAGIC, VERSION);
    w.bytes(m.config_text.as_bytes());
    w.u64(m.train_indices.len() as u64);
    for &i in &m.train_indices {
        w.u64(i as u64);
    }
    put_pca(&mut w, &m.pca.0);
    put_pca(&mut w, &m.pca.1);
    let features = m.nn.features();
    w.u32(m.nn.metric().id());
    w.u32(features.len() as u32);
    w.u32(m.nn.dim() as u32);
    for f in features {
        w.u32(f.label().expect("model features are labelled"));
        w.f64s(f.values());
    }
    w.finish()
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<TrainedModel> {
    let mut r = Reader::open(bytes, path, MAGIC, VERSION)?;
    let config_text = String::from_utf8(r.bytes()?.to_vec())
        .map_err(|_| r.error("configuration text is not UTF-8"))?;
    let count = usize::try_from(r.u64()?).map_err(|_| r.error("count overflows"))?;
    r.ensure(count, 8)?;
    let train_indices = (0..count)
        .map(|_| r.u64().map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let pca = (get_pca(&mut r)?, get_pca(&mut r)?);
    let metric = Metric::from_id(r.u32()?).map_err(|e| r.error(e.to_string()))?;
    let n = r.usize32()?;
    let dim = r.usize32()?;
    r.ensure(n, 4usize.saturating_add(dim.saturating_mul(8)))?;
    let mut features = Vec::with_capacity(n);
    for _ in 0..n {
        let label = r.u32()?;
        features.push(FusedFeature::new(r.f64s(dim)?, Some(label))?);
    }
    let nn = NnModel::new(features, metric).map_err(|e| r.error(e.to_string()))?;
    r.finish()?;
    if pca.0.k() != pca.1.k() || 2 * pca.0.num_bins() * pca.0.k() != nn.dim() {
        return Err(CliError::format(path, "PCA and nearest-neighbor blocks disagree on feature size"));
    }
    Ok(TrainedModel {
        config_text,
        train_indices,
        pca,
        nn,
    })
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    decode(&crate::fsutil::read(path)?, path)
}
