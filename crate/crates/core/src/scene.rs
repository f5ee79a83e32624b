//! Point-scatterer simulator for walking people seen by a dechirped FMCW
//! radar with a uniform linear receive array.
//!
//! Each person is three point scatterers on a purely radial track: a torso
//! with a small vertical-bob velocity ripple at twice the gait cadence, and
//! two limbs swinging in opposite phase around the torso velocity.
//!
//! For PRI `q` (range evaluated at the PRI start) and fast-time sample `p`, a
//! scatterer at range `R` on azimuth `θ` contributes
//!
//! ```text
//! α · exp(j2π·f_b·p/f_s) · exp(−j4π·R/λ) · a_m(θ),   f_b = 2·R·slope/c
//! ```
//!
//! to channel `m`. The negative slow-time phase makes an approaching target
//! (range shrinking) produce a **positive** Doppler frequency `+2|v|/λ`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::array::{steering_vector, ArrayGeometry};
use crate::error::{configuration, domain, structural};
use crate::math::{cis, cos, round, sin, sqrt, PI, TAU};
use crate::{Complex, Label, Matrix, Result, SPEED_OF_LIGHT};

/// Radar and acquisition parameters for one recording.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadarParams {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Chirp period; the chirp sweeps `bandwidth_hz` over one PRI.
    pub pri_s: f64,
    pub adc_rate_sps: f64,
    /// Fast-time samples per PRI, `P`.
    pub samples_per_pri: usize,
    /// Number of PRIs, `Q`.
    pub num_pri: usize,
    /// Receive channels, `M`.
    pub num_rx: usize,
    /// Element spacing `d/λ`.
    pub spacing_wavelengths: f64,
    /// Complex noise variance per sample per channel.
    pub noise_variance: f64,
}

impl RadarParams {
    /// 77 GHz, 5 GHz sweep, 1 ms PRI, 512 ksps, 512×12000 samples, 4 channels.
    pub fn full() -> Self {
        Self {
            carrier_hz: 77e9,
            bandwidth_hz: 5e9,
            pri_s: 1e-3,
            adc_rate_sps: 512e3,
            samples_per_pri: 512,
            num_pri: 12_000,
            num_rx: 4,
            spacing_wavelengths: 0.5,
            noise_variance: 0.01,
        }
    }

    /// Reduced scale: 128×4000 samples over 4 s.
    ///
    /// The sweep is narrowed to 1.25 GHz so that the 128 range bins cover
    /// the same 15.36 m as the full profile.
    pub fn desk() -> Self {
        Self {
            bandwidth_hz: 1.25e9,
            adc_rate_sps: 128e3,
            samples_per_pri: 128,
            num_pri: 4_000,
            ..Self::full()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("pri_s", self.pri_s),
            ("adc_rate_sps", self.adc_rate_sps),
            ("spacing_wavelengths", self.spacing_wavelengths),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(configuration!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(configuration!(
                "noise_variance must be non-negative, got {}",
                self.noise_variance
            ));
        }
        if self.samples_per_pri == 0 || self.num_pri == 0 || self.num_rx == 0 {
            return Err(configuration!(
                "samples_per_pri, num_pri and num_rx must all be at least 1"
            ));
        }
        let expected = round(self.adc_rate_sps * self.pri_s);
        if expected != self.samples_per_pri as f64 {
            return Err(configuration!(
                "samples_per_pri {} does not match adc_rate_sps × pri_s = {}",
                self.samples_per_pri,
                expected
            ));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Chirp slope in Hz/s.
    pub fn chirp_slope(&self) -> f64 {
        self.bandwidth_hz / self.pri_s
    }

    /// Total fast-time samples `N = P·Q`.
    pub fn total_samples(&self) -> usize {
        self.samples_per_pri * self.num_pri
    }

    pub fn duration_s(&self) -> f64 {
        self.num_pri as f64 * self.pri_s
    }

    pub fn prf_hz(&self) -> f64 {
        1.0 / self.pri_s
    }

    pub fn range_bin_m(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz)
    }

    pub fn beat_frequency_hz(&self, range_m: f64) -> f64 {
        2.0 * range_m * self.chirp_slope() / SPEED_OF_LIGHT
    }

    /// Largest radial speed whose Doppler stays inside `±PRF/2`.
    pub fn max_unambiguous_speed(&self) -> f64 {
        self.wavelength_m() / (4.0 * self.pri_s)
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.num_rx, self.spacing_wavelengths)
    }
}

/// One person walking radially at a fixed azimuth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkerSpec {
    pub azimuth_deg: f64,
    pub initial_range_m: f64,
    /// Negative when approaching the radar.
    pub radial_speed_mps: f64,
    pub gait_hz: f64,
    pub torso_rcs: f64,
    pub limb_rcs: f64,
    /// Peak limb velocity relative to the torso.
    pub limb_sway_mps: f64,
    /// Peak torso velocity ripple; zero disables the bob.
    pub torso_bob_mps: f64,
    pub phase_seed: u64,
}

impl WalkerSpec {
    /// Peak absolute radial velocity of any of the three scatterers.
    pub fn peak_speed(&self) -> f64 {
        self.radial_speed_mps.abs() + self.limb_sway_mps + self.torso_bob_mps
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=180.0).contains(&self.azimuth_deg) {
            return Err(configuration!("walker azimuth {}° outside [0°, 180°]", self.azimuth_deg));
        }
        if !(self.initial_range_m > 0.0) {
            return Err(configuration!(
                "walker initial range must be positive, got {}",
                self.initial_range_m
            ));
        }
        if self.limb_sway_mps < 0.0 || self.torso_bob_mps < 0.0 {
            return Err(configuration!("sway and bob amplitudes must be non-negative"));
        }
        if (self.limb_sway_mps > 0.0 || self.torso_bob_mps > 0.0) && !(self.gait_hz > 0.0) {
            return Err(configuration!("gait_hz must be positive when limbs or torso oscillate"));
        }
        let values = [
            self.radial_speed_mps,
            self.gait_hz,
            self.torso_rcs,
            self.limb_rcs,
            self.limb_sway_mps,
            self.torso_bob_mps,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(configuration!("walker parameters must be finite"));
        }
        Ok(())
    }
}

/// Instantaneous state of one point scatterer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScattererState {
    pub range_m: f64,
    pub radial_velocity_mps: f64,
    pub amplitude: f64,
}

/// Walker kinematics with the phase offsets drawn once from `phase_seed`.
#[derive(Clone, Copy, Debug)]
struct Kinematics {
    spec: WalkerSpec,
    limb_phases: [f64; 2],
    bob_phase: f64,
}

impl Kinematics {
    fn new(spec: &WalkerSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.phase_seed);
        let limb: f64 = rng.random::<f64>() * TAU;
        let bob: f64 = rng.random::<f64>() * TAU;
        Self {
            spec: *spec,
            limb_phases: [limb, limb + PI],
            bob_phase: bob,
        }
    }

    fn states(&self, t: f64) -> [ScattererState; 3] {
        let s = &self.spec;
        let (torso_range, torso_velocity) = if s.torso_bob_mps > 0.0 {
            let w = 2.0 * TAU * s.gait_hz;
            let arg = w * t + self.bob_phase;
            (
                s.initial_range_m
                    + s.radial_speed_mps * t
                    + s.torso_bob_mps / w * (cos(self.bob_phase) - cos(arg)),
                s.radial_speed_mps + s.torso_bob_mps * sin(arg),
            )
        } else {
            (s.initial_range_m + s.radial_speed_mps * t, s.radial_speed_mps)
        };
        let limb = |phase: f64| {
            if s.limb_sway_mps > 0.0 {
                let w = TAU * s.gait_hz;
                let arg = w * t + phase;
                ScattererState {
                    range_m: torso_range + s.limb_sway_mps / w * (cos(phase) - cos(arg)),
                    radial_velocity_mps: torso_velocity + s.limb_sway_mps * sin(arg),
                    amplitude: s.limb_rcs,
                }
            } else {
                ScattererState {
                    range_m: torso_range,
                    radial_velocity_mps: torso_velocity,
                    amplitude: s.limb_rcs,
                }
            }
        };
        [
            ScattererState {
                range_m: torso_range,
                radial_velocity_mps: torso_velocity,
                amplitude: s.torso_rcs,
            },
            limb(self.limb_phases[0]),
            limb(self.limb_phases[1]),
        ]
    }
}

/// Torso and both limb states of `spec` at time `t` within `[0, duration_s]`.
pub fn walker_state(spec: &WalkerSpec, t: f64, duration_s: f64) -> Result<[ScattererState; 3]> {
    if !(0.0..=duration_s).contains(&t) {
        return Err(domain!("time {t} s outside observation window [0, {duration_s}] s"));
    }
    Ok(Kinematics::new(spec).states(t))
}

/// Walkers plus labelling for one recording.
///
/// With exactly two walkers, `walkers[0]` sits at θ₁ and `walkers[1]` at θ₂.
/// Class 1 means the θ₁ walker approaches while the θ₂ walker recedes; class
/// 2 is the reverse.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub walkers: Vec<WalkerSpec>,
    pub class_label: Option<Label>,
    pub duration_s: f64,
    pub noise_seed: u64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(configuration!("scene duration must be positive"));
        }
        for w in &self.walkers {
            w.validate()?;
        }
        if let Some(label) = self.class_label {
            if label != 1 && label != 2 {
                return Err(configuration!("class label must be 1 or 2, got {label}"));
            }
            if let [first, second] = self.walkers.as_slice() {
                let first_approaches = label == 1;
                let ok = if first_approaches {
                    first.radial_speed_mps < 0.0 && second.radial_speed_mps > 0.0
                } else {
                    first.radial_speed_mps > 0.0 && second.radial_speed_mps < 0.0
                };
                if !ok {
                    return Err(configuration!(
                        "class {label} requires the θ₁ walker to {} and the θ₂ walker to {}",
                        if first_approaches { "approach" } else { "recede" },
                        if first_approaches { "recede" } else { "approach" }
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Raw received samples, `N` rows (fast time within slow time) × `M` channels.
#[derive(Clone, Debug, PartialEq)]
pub struct RawDataCube {
    data: Matrix<Complex>,
    params: RadarParams,
    label: Option<Label>,
}

impl RawDataCube {
    pub fn new(data: Matrix<Complex>, params: RadarParams, label: Option<Label>) -> Result<Self> {
        if data.shape() != (params.total_samples(), params.num_rx) {
            return Err(structural!(
                "cube is {}x{}, parameters require {}x{}",
                data.rows(),
                data.cols(),
                params.total_samples(),
                params.num_rx
            ));
        }
        if data.as_slice().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(structural!("cube contains non-finite samples"));
        }
        Ok(Self { data, params, label })
    }

    pub fn data(&self) -> &Matrix<Complex> {
        &self.data
    }

    pub fn params(&self) -> &RadarParams {
        &self.params
    }

    pub fn label(&self) -> Option<Label> {
        self.label
    }

    pub fn into_data(self) -> Matrix<Complex> {
        self.data
    }
}

/// Renders the scene into a raw data cube.
///
/// Output is a deterministic function of `(scene, params)`; noise is drawn
/// from a ChaCha8 stream seeded by `scene.noise_seed`.
pub fn synthesize(scene: &SceneSpec, params: &RadarParams) -> Result<RawDataCube> {
    params.validate()?;
    scene.validate()?;
    if scene.duration_s + 1e-9 < params.duration_s() {
        return Err(configuration!(
            "scene lasts {} s but the recording spans {} s",
            scene.duration_s,
            params.duration_s()
        ));
    }
    let geometry = params.geometry()?;
    let limit = params.max_unambiguous_speed();
    for (i, w) in scene.walkers.iter().enumerate() {
        if w.peak_speed() >= limit {
            return Err(configuration!(
                "walker {i} reaches {:.4} m/s, Doppler aliases above {:.4} m/s",
                w.peak_speed(),
                limit
            ));
        }
    }

    let p_len = params.samples_per_pri;
    let m_len = params.num_rx;
    let lambda = params.wavelength_m();
    let mut data: Matrix<Complex> = Matrix::zeros(params.total_samples(), m_len);
    let mut fast = vec![Complex::new(0.0, 0.0); p_len];

    for (i, walker) in scene.walkers.iter().enumerate() {
        let steering = steering_vector(&geometry, walker.azimuth_deg)?;
        let steering = steering.elements();
        let kinematics = Kinematics::new(walker);
        for q in 0..params.num_pri {
            let t = q as f64 * params.pri_s;
            fast.fill(Complex::new(0.0, 0.0));
            for state in kinematics.states(t) {
                if state.range_m <= 0.0 {
                    return Err(configuration!(
                        "walker {i} reaches non-positive range {:.4} m at t = {t} s",
                        state.range_m
                    ));
                }
                if state.amplitude == 0.0 {
                    continue;
                }
                let beat = params.beat_frequency_hz(state.range_m);
                let step = cis(TAU * beat / params.adc_rate_sps);
                let mut phasor = cis(-4.0 * PI * state.range_m / lambda) * state.amplitude;
                for v in fast.iter_mut() {
                    *v += phasor;
                    phasor *= step;
                }
            }
            for (p, &v) in fast.iter().enumerate() {
                let row = data.row_mut(q * p_len + p);
                for (dst, &a) in row.iter_mut().zip(steering) {
                    *dst += v * a;
                }
            }
        }
    }

    if params.noise_variance > 0.0 {
        let sigma = sqrt(params.noise_variance / 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(scene.noise_seed);
        for v in data.as_mut_slice() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *v += Complex::new(sigma * re, sigma * im);
        }
    }

    RawDataCube::new(data, *params, scene.class_label)
}

/// Inclusive uniform interval `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uniform {
    pub min: f64,
    pub max: f64,
}

impl Uniform {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        self.min + (self.max - self.min) * rng.random::<f64>()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(configuration!("{name} interval [{}, {}] is invalid", self.min, self.max));
        }
        Ok(())
    }
}

/// Two-person opposite-direction walking experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetConfig {
    /// Examples of class 1 and class 2.
    pub class_counts: [usize; 2],
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    /// Magnitude of the bulk radial speed.
    pub speed_mps: Uniform,
    pub gait_hz: Uniform,
    /// Start range of the receding walker.
    pub near_range_m: Uniform,
    /// Start range of the approaching walker.
    pub far_range_m: Uniform,
    pub torso_rcs: f64,
    pub limb_rcs: f64,
    /// Relative RCS jitter; amplitudes are scaled by `1 + jitter·U(−1, 1)`.
    pub rcs_jitter: f64,
    pub limb_sway_mps: f64,
    pub torso_bob_mps: f64,
    pub master_seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            class_counts: [60, 60],
            theta1_deg: 75.0,
            theta2_deg: 105.0,
            speed_mps: Uniform::new(0.4, 0.8),
            gait_hz: Uniform::new(0.8, 1.2),
            near_range_m: Uniform::new(1.0, 2.5),
            far_range_m: Uniform::new(10.5, 12.0),
            torso_rcs: 1.0,
            limb_rcs: 0.3,
            rcs_jitter: 0.1,
            limb_sway_mps: 0.12,
            torso_bob_mps: 0.01,
            master_seed: 1,
        }
    }
}

impl DatasetConfig {
    pub fn total(&self) -> usize {
        self.class_counts[0] + self.class_counts[1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.total() == 0 {
            return Err(domain!("dataset must contain at least one example"));
        }
        for (name, theta) in [("theta1_deg", self.theta1_deg), ("theta2_deg", self.theta2_deg)] {
            if !(0.0..=180.0).contains(&theta) {
                return Err(configuration!("{name} = {theta} outside [0, 180]"));
            }
        }
        self.speed_mps.validate("speed_mps")?;
        self.gait_hz.validate("gait_hz")?;
        self.near_range_m.validate("near_range_m")?;
        self.far_range_m.validate("far_range_m")?;
        if self.speed_mps.min < 0.0 {
            return Err(configuration!("speed interval holds magnitudes and must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.rcs_jitter) {
            return Err(configuration!("rcs_jitter must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// One planned example: its label, derived seed and scene.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleSpec {
    pub index: usize,
    pub label: Label,
    pub seed: u64,
    pub scene: SceneSpec,
}

/// Draws the scene for one example from its own seed.
pub fn example_scene(
    config: &DatasetConfig,
    params: &RadarParams,
    label: Label,
    seed: u64,
) -> Result<SceneSpec> {
    if label != 1 && label != 2 {
        return Err(domain!("class label must be 1 or 2, got {label}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walkers = Vec::with_capacity(2);
    for (slot, azimuth) in [config.theta1_deg, config.theta2_deg].into_iter().enumerate() {
        let approaching = (label == 1) == (slot == 0);
        let speed = config.speed_mps.sample(&mut rng);
        let gait = config.gait_hz.sample(&mut rng);
        let range = if approaching {
            config.far_range_m.sample(&mut rng)
        } else {
            config.near_range_m.sample(&mut rng)
        };
        let mut jitter = || 1.0 + config.rcs_jitter * (2.0 * rng.random::<f64>() - 1.0);
        let torso_rcs = config.torso_rcs * jitter();
        let limb_rcs = config.limb_rcs * jitter();
        walkers.push(WalkerSpec {
            azimuth_deg: azimuth,
            initial_range_m: range,
            radial_speed_mps: if approaching { -speed } else { speed },
            gait_hz: gait,
            torso_rcs,
            limb_rcs,
            limb_sway_mps: config.limb_sway_mps,
            torso_bob_mps: config.torso_bob_mps,
            phase_seed: rng.next_u64(),
        });
    }
    Ok(SceneSpec {
        walkers,
        class_label: Some(label),
        duration_s: params.duration_s(),
        noise_seed: rng.next_u64(),
    })
}

/// Plans every example without rendering any samples.
///
/// Class-1 examples come first, then class 2. Per-example seeds are drawn in
/// index order from a ChaCha8 stream seeded with the master seed.
pub fn plan_dataset(config: &DatasetConfig, params: &RadarParams) -> Result<Vec<ExampleSpec>> {
    config.validate()?;
    params.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(config.master_seed);
    let labels = core::iter::repeat_n(1, config.class_counts[0])
        .chain(core::iter::repeat_n(2, config.class_counts[1]));
    labels
        .enumerate()
        .map(|(index, label)| {
            let seed = master.next_u64();
            let scene = example_scene(config, params, label, seed)?;
            Ok(ExampleSpec {
                index,
                label,
                seed,
                scene,
            })
        })
        .collect()
}

/// Plans and renders the whole dataset in memory.
pub fn make_dataset(config: &DatasetConfig, params: &RadarParams) -> Result<Vec<RawDataCube>> {
    plan_dataset(config, params)?
        .iter()
        .map(|ex| synthesize(&ex.scene, params))
        .collect()
}
