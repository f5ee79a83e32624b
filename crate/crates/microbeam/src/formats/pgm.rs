//! Greyscale previews of spectrograms as binary PGM (`P5`).
//!
//! Width is the frame count and height the Doppler bin count. The top image
//! row is the highest positive Doppler. Pixels show 60 dB of dynamic range
//! below the image maximum, mapped linearly onto 0..=255.

use microbeam_core::dsp::Spectrogram;

const DYNAMIC_RANGE_DB: f64 = 60.0;

pub fn render(s: &Spectrogram) -> Vec<u8> {
    let power = s.power();
    let (f, t) = power.shape();
    let max = power.as_slice().iter().copied().fold(0.0f64, f64::max);
    let mut out = format!("P5\n{t} {f}\n255\n").into_bytes();
    out.reserve(f * t);
    for r in (0..f).rev() {
        for &v in power.row(r) {
            out.push(pixel(v, max));
        }
    }
    out
}

fn pixel(v: f64, max: f64) -> u8 {
    if max <= 0.0 {
        return 0;
    }
    if v <= 0.0 {
        return 0;
    }
    let db = (10.0 * (v / max).log10()).max(-DYNAMIC_RANGE_DB);
    (255.0 * (1.0 + db / DYNAMIC_RANGE_DB)).round() as u8
}

/// Parses a `P5` header, returning (width, height, pixels).
pub fn parse(bytes: &[u8]) -> Option<(usize, usize, &[u8])> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
    }
    if fields[0] != "P5" || fields[3] != "255" {
        return None;
    }
    let w: usize = fields[1].parse().ok()?;
    let h: usize = fields[2].parse().ok()?;
    let pixels = bytes.get(pos + 1..)?;
    (pixels.len() == w * h).then_some((w, h, pixels))
}
