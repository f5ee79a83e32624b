//! Per-example signal chain: beamform, stack PRIs, range DFT, range gate,
//! spectrogram.
//!
//! All DFTs are unnormalized forward transforms. Spectrogram rows are
//! circularly shifted so row `F/2` is zero Doppler; rows above it hold
//! positive Doppler, which with the scene phase convention means targets
//! approaching the radar.

mod window;

pub use window::WindowKind;

use alloc::vec;
use alloc::vec::Vec;

use crate::array::{beam_weights, BeamWeights};
use crate::error::{domain, structural};
use crate::fft::Fft;
use crate::scene::RawDataCube;
use crate::{Complex, Matrix, Result, SPEED_OF_LIGHT};

/// Per-PRI fast-time spectra, `P` range bins × `Q` PRIs.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeMap {
    data: Matrix<Complex>,
    look_angle_deg: f64,
    range_bin_m: f64,
}

impl RangeMap {
    pub fn data(&self) -> &Matrix<Complex> {
        &self.data
    }

    pub fn look_angle_deg(&self) -> f64 {
        self.look_angle_deg
    }

    /// Meters per range bin, `c / (2·bandwidth)`.
    pub fn range_bin_m(&self) -> f64 {
        self.range_bin_m
    }

    pub fn num_bins(&self) -> usize {
        self.data.rows()
    }

    pub fn num_pri(&self) -> usize {
        self.data.cols()
    }

    /// Energy per range bin summed over slow time.
    pub fn range_profile(&self) -> Vec<f64> {
        (0..self.data.rows())
            .map(|l| self.data.row(l).iter().map(|v| v.norm_sqr()).sum())
            .collect()
    }
}

/// Inclusive range-bin interval `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeGate {
    pub lower: usize,
    pub upper: usize,
}

impl RangeGate {
    pub fn new(lower: usize, upper: usize) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> usize {
        self.upper - self.lower + 1
    }

    fn check(&self, num_bins: usize) -> Result<()> {
        if self.lower > self.upper || self.upper >= num_bins {
            return Err(structural!(
                "range gate [{}, {}] invalid for {} bins",
                self.lower,
                self.upper,
                num_bins
            ));
        }
        Ok(())
    }
}

/// How the range bins of interest are chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GatePolicy {
    Explicit(RangeGate),
    /// Smallest contiguous interval around the strongest bin holding at
    /// least this share of the total energy.
    Auto { energy_fraction: f64 },
}

impl Default for GatePolicy {
    fn default() -> Self {
        GatePolicy::Auto {
            energy_fraction: 0.95,
        }
    }
}

/// Slow-time signal after summing the gated range bins.
#[derive(Clone, Debug, PartialEq)]
pub struct SlowTimeSignal {
    pub samples: Vec<Complex>,
    pub look_angle_deg: f64,
    pub gate: RangeGate,
}

/// Power spectrogram, `F` Doppler bins × `T` frames, zero Doppler at row `F/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    power: Matrix<f64>,
    look_angle_deg: f64,
    hop: usize,
    window: WindowKind,
}

impl Spectrogram {
    pub fn new(power: Matrix<f64>, look_angle_deg: f64, hop: usize, window: WindowKind) -> Result<Self> {
        if power.rows() < 2 || power.cols() == 0 {
            return Err(structural!(
                "spectrogram must have at least 2 bins and 1 frame, got {}x{}",
                power.rows(),
                power.cols()
            ));
        }
        if power.as_slice().iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(domain!("spectrogram power must be finite and non-negative"));
        }
        if hop == 0 {
            return Err(domain!("hop must be at least 1"));
        }
        Ok(Self {
            power,
            look_angle_deg,
            hop,
            window,
        })
    }

    pub fn power(&self) -> &Matrix<f64> {
        &self.power
    }

    pub fn into_power(self) -> Matrix<f64> {
        self.power
    }

    pub fn look_angle_deg(&self) -> f64 {
        self.look_angle_deg
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn window(&self) -> WindowKind {
        self.window
    }

    /// Number of frequency bins `F` (the window length).
    pub fn num_bins(&self) -> usize {
        self.power.rows()
    }

    pub fn num_frames(&self) -> usize {
        self.power.cols()
    }

    /// Row index of zero Doppler.
    pub fn zero_row(&self) -> usize {
        self.num_bins() / 2
    }

    /// Doppler frequency of `row` for the given pulse repetition frequency.
    pub fn doppler_hz(&self, row: usize, prf_hz: f64) -> f64 {
        (row as f64 - self.zero_row() as f64) * prf_hz / self.num_bins() as f64
    }

    /// Energy in rows above and below zero Doppler, `(positive, negative)`.
    /// The zero-Doppler row itself is excluded.
    pub fn half_plane_energies(&self) -> (f64, f64) {
        let zero = self.zero_row();
        let mut pos = 0.0;
        let mut neg = 0.0;
        for r in 0..self.num_bins() {
            let e: f64 = self.power.row(r).iter().sum();
            if r > zero {
                pos += e;
            } else if r < zero {
                neg += e;
            }
        }
        (pos, neg)
    }
}

/// STFT settings and range-gate policy for one processing run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainConfig {
    pub window: WindowKind,
    pub window_len: usize,
    pub hop: usize,
    pub frames: usize,
    pub gate: GatePolicy,
}

impl ChainConfig {
    /// Hamming window of 128, hop 31, and the fewest frames that cover all
    /// `num_pri` slow-time samples.
    pub fn for_num_pri(num_pri: usize) -> Self {
        let window_len = 128;
        let hop = 31;
        Self {
            window: WindowKind::Hamming,
            window_len,
            hop,
            frames: frames_to_cover(num_pri, window_len, hop),
            gate: GatePolicy::default(),
        }
    }

    pub fn validate(&self, num_pri: usize) -> Result<()> {
        if self.window_len < 2 || self.hop == 0 || self.frames == 0 {
            return Err(domain!(
                "window_len ≥ 2, hop ≥ 1 and frames ≥ 1 required (got {}, {}, {})",
                self.window_len,
                self.hop,
                self.frames
            ));
        }
        if self.window_len > num_pri {
            return Err(domain!(
                "window length {} exceeds the {} slow-time samples",
                self.window_len,
                num_pri
            ));
        }
        if let GatePolicy::Auto { energy_fraction } = self.gate {
            if !(energy_fraction > 0.0 && energy_fraction <= 1.0) {
                return Err(domain!("gate energy fraction must lie in (0, 1], got {energy_fraction}"));
            }
        }
        Ok(())
    }
}

/// Smallest frame count whose windows reach the last sample.
pub fn frames_to_cover(num_samples: usize, window_len: usize, hop: usize) -> usize {
    if num_samples <= window_len {
        1
    } else {
        (num_samples - window_len).div_ceil(hop) + 1
    }
}

/// `y[n] = Σ_m cube[n, m]·w[m]`.
pub fn apply_beamformer(cube: &RawDataCube, weights: &BeamWeights) -> Result<Vec<Complex>> {
    let data = cube.data();
    if data.cols() != weights.len() {
        return Err(structural!(
            "cube has {} channels but weights have {}",
            data.cols(),
            weights.len()
        ));
    }
    let w = weights.weights();
    Ok((0..data.rows())
        .map(|n| data.row(n).iter().zip(w).map(|(s, w)| s * w).sum())
        .collect())
}

/// Stacks consecutive runs of `p` samples as the columns of a `p × N/p` matrix.
pub fn reshape_to_pri(x: &[Complex], p: usize) -> Result<Matrix<Complex>> {
    if p == 0 || !x.len().is_multiple_of(p) {
        return Err(structural!("{} samples do not split into PRIs of {p}", x.len()));
    }
    let q = x.len() / p;
    Ok(Matrix::from_fn(p, q, |row, col| x[col * p + row]))
}

/// Inverse of [`reshape_to_pri`].
pub fn flatten_pri(x2d: &Matrix<Complex>) -> Vec<Complex> {
    let (p, q) = x2d.shape();
    let mut out = Vec::with_capacity(p * q);
    for col in 0..q {
        for row in 0..p {
            out.push(x2d[(row, col)]);
        }
    }
    out
}

/// Column-wise unnormalized P-point DFT.
pub fn range_map(x2d: &Matrix<Complex>, look_angle_deg: f64, bandwidth_hz: f64) -> RangeMap {
    let (p, q) = x2d.shape();
    let fft = Fft::new(p);
    let mut out = Matrix::zeros(p, q);
    let mut column = vec![Complex::new(0.0, 0.0); p];
    for col in 0..q {
        for (row, v) in column.iter_mut().enumerate() {
            *v = x2d[(row, col)];
        }
        fft.forward(&mut column);
        for (row, &v) in column.iter().enumerate() {
            out[(row, col)] = v;
        }
    }
    RangeMap {
        data: out,
        look_angle_deg,
        range_bin_m: SPEED_OF_LIGHT / (2.0 * bandwidth_hz),
    }
}

pub fn select_gate(map: &RangeMap, policy: GatePolicy) -> Result<RangeGate> {
    let bins = map.num_bins();
    if bins == 0 || map.num_pri() == 0 {
        return Err(structural!("range map is empty"));
    }
    match policy {
        GatePolicy::Explicit(gate) => {
            gate.check(bins)?;
            Ok(gate)
        }
        GatePolicy::Auto { energy_fraction } => {
            if !(energy_fraction > 0.0 && energy_fraction <= 1.0) {
                return Err(domain!("gate energy fraction must lie in (0, 1], got {energy_fraction}"));
            }
            auto_gate(&map.range_profile(), energy_fraction)
        }
    }
}

fn auto_gate(profile: &[f64], fraction: f64) -> Result<RangeGate> {
    let mut prefix = Vec::with_capacity(profile.len() + 1);
    prefix.push(0.0);
    for &e in profile {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + e);
    }
    let total = prefix[profile.len()];
    if !(total > 0.0 && total.is_finite()) {
        return Err(structural!("range map carries no energy"));
    }
    let peak = profile
        .iter()
        .enumerate()
        .fold(0, |best, (i, &e)| if e > profile[best] { i } else { best });
    let target = fraction * total;
    let mut best: Option<(usize, f64, RangeGate)> = None;
    for lower in 0..=peak {
        // prefix sums are non-decreasing, so the first qualifying upper bound
        // is the narrowest for this lower bound
        let need = prefix[lower] + target;
        let idx = prefix[peak + 1..].partition_point(|&s| s < need);
        let upper = peak + idx;
        if upper >= profile.len() {
            continue;
        }
        let gate = RangeGate::new(lower, upper);
        let energy = prefix[upper + 1] - prefix[lower];
        let better = match &best {
            None => true,
            Some((w, e, _)) => gate.width() < *w || (gate.width() == *w && energy > *e),
        };
        if better {
            best = Some((gate.width(), energy, gate));
        }
    }
    best.map(|(_, _, g)| g)
        .ok_or_else(|| structural!("no range interval reaches the energy target"))
}

/// Sums range bins `gate.lower..=gate.upper` of every PRI.
pub fn collapse_range(map: &RangeMap, gate: RangeGate) -> Result<SlowTimeSignal> {
    gate.check(map.num_bins())?;
    let mut samples = vec![Complex::new(0.0, 0.0); map.num_pri()];
    for l in gate.lower..=gate.upper {
        for (acc, &v) in samples.iter_mut().zip(map.data.row(l)) {
            *acc += v;
        }
    }
    Ok(SlowTimeSignal {
        samples,
        look_angle_deg: map.look_angle_deg,
        gate,
    })
}

/// Windowed STFT power with exactly `frames` frames.
///
/// Frame `t` starts at sample `t·hop`; samples past the end of the signal are
/// treated as zero. Output row `r` holds DFT bin `(r − H/2) mod H`.
pub fn spectrogram(
    sig: &SlowTimeSignal,
    window: WindowKind,
    window_len: usize,
    hop: usize,
    frames: usize,
) -> Result<Spectrogram> {
    if window_len < 2 || hop == 0 || frames == 0 {
        return Err(domain!(
            "window_len ≥ 2, hop ≥ 1 and frames ≥ 1 required (got {window_len}, {hop}, {frames})"
        ));
    }
    let samples = &sig.samples;
    if window_len > samples.len() {
        return Err(domain!(
            "window length {window_len} exceeds the {} slow-time samples",
            samples.len()
        ));
    }
    let taper = window.coefficients(window_len);
    let fft = Fft::new(window_len);
    let half = window_len / 2;
    let mut power = Matrix::zeros(window_len, frames);
    let mut buf = vec![Complex::new(0.0, 0.0); window_len];
    for t in 0..frames {
        let start = t * hop;
        for (m, b) in buf.iter_mut().enumerate() {
            *b = samples
                .get(start + m)
                .map_or(Complex::new(0.0, 0.0), |&s| s * taper[m]);
        }
        fft.forward(&mut buf);
        for (k, v) in buf.iter().enumerate() {
            let row = (k + half) % window_len;
            power[(row, t)] = v.norm_sqr();
        }
    }
    Spectrogram::new(power, sig.look_angle_deg, hop, window)
}

/// Runs the chain for one set of weights.
pub fn process_beam(cube: &RawDataCube, weights: &BeamWeights, chain: &ChainConfig) -> Result<Spectrogram> {
    let params = cube.params();
    chain.validate(params.num_pri)?;
    let x = apply_beamformer(cube, weights)?;
    let x2d = reshape_to_pri(&x, params.samples_per_pri)?;
    drop(x);
    let map = range_map(&x2d, weights.look_angle_deg(), params.bandwidth_hz);
    drop(x2d);
    let gate = select_gate(&map, chain.gate)?;
    let slow = collapse_range(&map, gate)?;
    spectrogram(&slow, chain.window, chain.window_len, chain.hop, chain.frames)
}

/// Spectrograms for beams steered to `look_angles.0` and `look_angles.1`.
pub fn process_example(
    cube: &RawDataCube,
    look_angles: (f64, f64),
    chain: &ChainConfig,
) -> Result<(Spectrogram, Spectrogram)> {
    let geometry = cube.params().geometry()?;
    let first = process_beam(cube, &beam_weights(&geometry, look_angles.0)?, chain)?;
    let second = process_beam(cube, &beam_weights(&geometry, look_angles.1)?, chain)?;
    Ok((first, second))
}
