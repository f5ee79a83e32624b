//! Raw data cubes (`.mbc`).
//!
//! ```text
//! "MBC1" u32 version=1
//! u64 N (samples per channel)  u32 M (channels)
//! f64 carrier_hz  f64 bandwidth_hz  f64 pri_s  f64 adc_rate_sps
//! u64 samples_per_pri  u64 num_pri
//! f64 spacing_wavelengths  f64 noise_variance
//! u8 label (0 = unlabelled)
//! N·M × (f32 re, f32 im), row-major over (sample, channel)
//! ```

use std::path::Path;

use microbeam_core::scene::{RadarParams, RawDataCube};
use microbeam_core::{Complex, Matrix};

use super::{Reader, Writer};
use crate::error::{CliError, Result};

const MAGIC: &[u8; 4] = b"MBC1";
const VERSION: u32 = 1;

pub fn encode(cube: &RawDataCube) -> Result<Vec<u8>> {
    let p = cube.params();
    let data = cube.data();
    let label = match cube.label() {
        None => 0,
        Some(l) => u8::try_from(l)
            .ok()
            .filter(|&l| l != 0)
            .ok_or_else(|| CliError::Validation(format!("label {l} does not fit the cube format")))?,
    };
    let mut w = Writer::with_header(MAGIC, VERSION);
    w.u64(data.rows() as u64);
    w.u32(data.cols() as u32);
    w.f64(p.carrier_hz);
    w.f64(p.bandwidth_hz);
    w.f64(p.pri_s);
    w.f64(p.adc_rate_sps);
    w.u64(p.samples_per_pri as u64);
    w.u64(p.num_pri as u64);
    w.f64(p.spacing_wavelengths);
    w.f64(p.noise_variance);
    w.u8(label);
    for v in data.as_slice() {
        w.f32(v.re as f32);
        w.f32(v.im as f32);
    }
    Ok(w.finish())
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<RawDataCube> {
    let mut r = Reader::open(bytes, path, MAGIC, VERSION)?;
    let n = usize::try_from(r.u64()?).map_err(|_| r.error("sample count overflows"))?;
    let m = r.usize32()?;
    let params = RadarParams {
        carrier_hz: r.f64()?,
        bandwidth_hz: r.f64()?,
        pri_s: r.f64()?,
        adc_rate_sps: r.f64()?,
        samples_per_pri: r.u64()? as usize,
        num_pri: r.u64()? as usize,
        num_rx: m,
        spacing_wavelengths: r.f64()?,
        noise_variance: r.f64()?,
    };
    let label = match r.u8()? {
        0 => None,
        l => Some(u32::from(l)),
    };
    if params.samples_per_pri.checked_mul(params.num_pri) != Some(n) {
        return Err(r.error(format!(
            "header declares {n} samples but P·Q = {}·{}",
            params.samples_per_pri, params.num_pri
        )));
    }
    let total = n.checked_mul(m).ok_or_else(|| r.error("sample count overflows"))?;
    r.ensure(total, 8)?;
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let re = r.f32()?;
        let im = r.f32()?;
        values.push(Complex::new(f64::from(re), f64::from(im)));
    }
    r.finish()?;
    let data = Matrix::from_vec(n, m, values)?;
    Ok(RawDataCube::new(data, params, label)?)
}

pub fn load(path: &Path) -> Result<RawDataCube> {
    decode(&crate::fsutil::read(path)?, path)
}
