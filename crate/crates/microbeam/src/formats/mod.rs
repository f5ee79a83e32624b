//! Binary and text artifact formats.
//!
//! Every binary file starts with a four-byte magic and a `u32` version, and
//! stores all numbers little-endian.

pub mod cube;
pub mod manifest;
pub mod model;
pub mod pgm;
pub mod spectrogram;

use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn with_header(magic: &[u8; 4], version: u32) -> Self {
        let mut w = Self::default();
        w.buf.extend_from_slice(magic);
        w.u32(version);
        w
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f32(&mut self, v: f32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64s(&mut self, vs: &[f64]) {
        self.buf.reserve(vs.len() * 8);
        for &v in vs {
            self.f64(v);
        }
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.buf.extend_from_slice(b);
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: PathBuf,
}

impl<'a> Reader<'a> {
    /// Checks the magic and returns the reader with the version read.
    pub fn open(buf: &'a [u8], path: &Path, magic: &[u8; 4], version: u32) -> Result<Self> {
        let mut r = Self {
            buf,
            pos: 0,
            path: path.to_owned(),
        };
        if r.take(4)? != magic {
            return Err(r.error(format!(
                "not a {} file",
                String::from_utf8_lossy(magic)
            )));
        }
        let v = r.u32()?;
        if v != version {
            return Err(r.error(format!("unsupported version {v}, expected {version}")));
        }
        Ok(r)
    }

    pub fn error(&self, message: impl Into<String>) -> CliError {
        CliError::format(&self.path, message)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(self.error(format!("truncated at byte {}", self.pos))),
        }
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    pub fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.array()?))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    /// `n` doubles, checking the remaining length first so a corrupt count
    /// cannot trigger a huge allocation.
    pub fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        self.ensure(n, 8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn ensure(&self, n: usize, width: usize) -> Result<()> {
        match n.checked_mul(width) {
            Some(b) if b <= self.buf.len() - self.pos => Ok(()),
            _ => Err(self.error(format!("declares {n} values but the file is too short"))),
        }
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.u64()?;
        let n = usize::try_from(n).map_err(|_| self.error("length overflows"))?;
        self.take(n)
    }

    pub fn usize32(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    /// Fails unless every byte was consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(self.error(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}
