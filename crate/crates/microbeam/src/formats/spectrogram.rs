//! Spectrograms (`.mbs`).
//!
//! ```text
//! "MBS1" u32 version=1
//! u32 F (Doppler bins)  u32 T (frames)  f64 look_angle_deg
//! u32 hop  u32 window id
//! F·T × f32 power, row-major (row 0 is the most negative Doppler)
//! ```

use std::path::Path;

use microbeam_core::dsp::{Spectrogram, WindowKind};
use microbeam_core::Matrix;

use super::{Reader, Writer};
use crate::error::Result;

const MAGIC: &[u8; 4] = b"MBS1";
const VERSION: u32 = 1;

pub fn encode(s: &Spectrogram) -> Vec<u8> {
    let mut w = Writer::with_header(MAGIC, VERSION);
    w.u32(s.num_bins() as u32);
    w.u32(s.num_frames() as u32);
    w.f64(s.look_angle_deg());
    w.u32(s.hop() as u32);
    w.u32(s.window().id());
    for &v in s.power().as_slice() {
        w.f32(v as f32);
    }
    w.finish()
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Spectrogram> {
    let mut r = Reader::open(bytes, path, MAGIC, VERSION)?;
    let f = r.usize32()?;
    let t = r.usize32()?;
    let look = r.f64()?;
    let hop = r.usize32()?;
    let window = WindowKind::from_id(r.u32()?).map_err(|e| r.error(e.to_string()))?;
    let total = f.checked_mul(t).ok_or_else(|| r.error("size overflows"))?;
    r.ensure(total, 4)?;
    let values = (0..total)
        .map(|_| r.f32().map(f64::from))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let power = Matrix::from_vec(f, t, values)?;
    Spectrogram::new(power, look, hop, window).map_err(|e| crate::error::CliError::format(path, e.to_string()))
}

pub fn load(path: &Path) -> Result<Spectrogram> {
    decode(&crate::fsutil::read(path)?, path)
}
