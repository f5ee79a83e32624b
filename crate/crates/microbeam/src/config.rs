//! Experiment configuration.
//!
//! The file is flat `key = value` text with dotted section keys:
//!
//! ```text
//! # comments and blank lines are ignored
//! radar.pri_s = 0.001
//! scene.theta1_deg = 75
//! processing.window = hamming
//! processing.gate = auto:0.95        # or explicit:<lower>:<upper>
//! pca.k = 2
//! ```
//!
//! Keys not present keep the value of the selected profile; unknown or
//! repeated keys are rejected. [`ExperimentConfig::to_text`] writes every key
//! in a fixed order, which is the canonical form stored in model files.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use microbeam_core::dsp::{ChainConfig, GatePolicy, RangeGate, WindowKind};
use microbeam_core::scene::{DatasetConfig, RadarParams};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Profile {
    /// 128×4000 samples over 4 s; fast enough for CI.
    #[default]
    Desk,
    /// 512×12000 samples over 12 s. Slow: every cube is ~200 MB on disk.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub radar: RadarParams,
    pub scene: DatasetConfig,
    pub processing: ChainConfig,
    /// Principal eigenvectors kept per look angle.
    pub k: usize,
    pub train_per_class: usize,
    pub split_seed: u64,
}

const KEYS: &[&str] = &[
    "radar.carrier_hz",
    "radar.bandwidth_hz",
    "radar.pri_s",
    "radar.adc_rate_sps",
    "radar.samples_per_pri",
    "radar.num_pri",
    "radar.num_rx",
    "radar.spacing_wavelengths",
    "radar.noise_variance",
    "scene.theta1_deg",
    "scene.theta2_deg",
    "scene.class1_count",
    "scene.class2_count",
    "scene.speed_min_mps",
    "scene.speed_max_mps",
    "scene.gait_min_hz",
    "scene.gait_max_hz",
    "scene.near_range_min_m",
    "scene.near_range_max_m",
    "scene.far_range_min_m",
    "scene.far_range_max_m",
    "scene.torso_rcs",
    "scene.limb_rcs",
    "scene.rcs_jitter",
    "scene.limb_sway_mps",
    "scene.torso_bob_mps",
    "scene.master_seed",
    "processing.window",
    "processing.window_len",
    "processing.hop",
    "processing.frames",
    "processing.gate",
    "pca.k",
    "split.train_per_class",
    "split.seed",
];

impl ExperimentConfig {
    pub fn for_profile(profile: Profile) -> Self {
        let radar = match profile {
            Profile::Desk => RadarParams::desk(),
            Profile::Full => RadarParams::full(),
        };
        Self {
            processing: ChainConfig::for_num_pri(radar.num_pri),
            radar,
            scene: DatasetConfig::default(),
            k: 2,
            train_per_class: 46,
            split_seed: 7,
        }
    }

    /// Parses `text` on top of the profile defaults and validates the result.
    pub fn parse(text: &str, profile: Profile) -> Result<Self> {
        let mut cfg = Self::for_profile(profile);
        let mut seen = HashSet::new();
        let mut frames_given = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("config line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Validation(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if !seen.insert(key.to_owned()) {
                return Err(CliError::Validation(format!(
                    "config line {}: `{key}` given twice",
                    lineno + 1
                )));
            }
            frames_given |= key == "processing.frames";
            cfg.set(key, value)
                .map_err(|e| CliError::Validation(format!("config line {}: {e}", lineno + 1)))?;
        }
        // a changed PRI count moves the minimal frame count unless pinned
        if !frames_given {
            cfg.processing.frames = microbeam_core::dsp::frames_to_cover(
                cfg.radar.num_pri,
                cfg.processing.window_len,
                cfg.processing.hop,
            );
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse()
                .map_err(|_| format!("`{key}` has unparsable value `{v}`"))
        }
        let r = &mut self.radar;
        let s = &mut self.scene;
        match key {
            "radar.carrier_hz" => r.carrier_hz = num(key, value)?,
            "radar.bandwidth_hz" => r.bandwidth_hz = num(key, value)?,
            "radar.pri_s" => r.pri_s = num(key, value)?,
            "radar.adc_rate_sps" => r.adc_rate_sps = num(key, value)?,
            "radar.samples_per_pri" => r.samples_per_pri = num(key, value)?,
            "radar.num_pri" => r.num_pri = num(key, value)?,
            "radar.num_rx" => r.num_rx = num(key, value)?,
            "radar.spacing_wavelengths" => r.spacing_wavelengths = num(key, value)?,
            "radar.noise_variance" => r.noise_variance = num(key, value)?,
            "scene.theta1_deg" => s.theta1_deg = num(key, value)?,
            "scene.theta2_deg" => s.theta2_deg = num(key, value)?,
            "scene.class1_count" => s.class_counts[0] = num(key, value)?,
            "scene.class2_count" => s.class_counts[1] = num(key, value)?,
            "scene.speed_min_mps" => s.speed_mps.min = num(key, value)?,
            "scene.speed_max_mps" => s.speed_mps.max = num(key, value)?,
            "scene.gait_min_hz" => s.gait_hz.min = num(key, value)?,
            "scene.gait_max_hz" => s.gait_hz.max = num(key, value)?,
            "scene.near_range_min_m" => s.near_range_m.min = num(key, value)?,
            "scene.near_range_max_m" => s.near_range_m.max = num(key, value)?,
            "scene.far_range_min_m" => s.far_range_m.min = num(key, value)?,
            "scene.far_range_max_m" => s.far_range_m.max = num(key, value)?,
            "scene.torso_rcs" => s.torso_rcs = num(key, value)?,
            "scene.limb_rcs" => s.limb_rcs = num(key, value)?,
            "scene.rcs_jitter" => s.rcs_jitter = num(key, value)?,
            "scene.limb_sway_mps" => s.limb_sway_mps = num(key, value)?,
            "scene.torso_bob_mps" => s.torso_bob_mps = num(key, value)?,
            "scene.master_seed" => s.master_seed = num(key, value)?,
            "processing.window" => {
                self.processing.window = WindowKind::from_name(value).map_err(|e| e.to_string())?
            }
            "processing.window_len" => self.processing.window_len = num(key, value)?,
            "processing.hop" => self.processing.hop = num(key, value)?,
            "processing.frames" => self.processing.frames = num(key, value)?,
            "processing.gate" => self.processing.gate = parse_gate(value)?,
            "pca.k" => self.k = num(key, value)?,
            "split.train_per_class" => self.train_per_class = num(key, value)?,
            "split.seed" => self.split_seed = num(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Canonical text with every key, in a fixed order.
    pub fn to_text(&self) -> String {
        let r = &self.radar;
        let s = &self.scene;
        let p = &self.processing;
        let values: Vec<String> = vec![
            float(r.carrier_hz),
            float(r.bandwidth_hz),
            float(r.pri_s),
            float(r.adc_rate_sps),
            r.samples_per_pri.to_string(),
            r.num_pri.to_string(),
            r.num_rx.to_string(),
            float(r.spacing_wavelengths),
            float(r.noise_variance),
            float(s.theta1_deg),
            float(s.theta2_deg),
            s.class_counts[0].to_string(),
            s.class_counts[1].to_string(),
            float(s.speed_mps.min),
            float(s.speed_mps.max),
            float(s.gait_hz.min),
            float(s.gait_hz.max),
            float(s.near_range_m.min),
            float(s.near_range_m.max),
            float(s.far_range_m.min),
            float(s.far_range_m.max),
            float(s.torso_rcs),
            float(s.limb_rcs),
            float(s.rcs_jitter),
            float(s.limb_sway_mps),
            float(s.torso_bob_mps),
            s.master_seed.to_string(),
            p.window.name().to_owned(),
            p.window_len.to_string(),
            p.hop.to_string(),
            p.frames.to_string(),
            gate_text(&p.gate),
            self.k.to_string(),
            self.train_per_class.to_string(),
            self.split_seed.to_string(),
        ];
        debug_assert_eq!(values.len(), KEYS.len());
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Checks every module invariant the configuration touches.
    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.radar.geometry()?;
        self.scene.validate()?;
        self.processing.validate(self.radar.num_pri)?;
        if let GatePolicy::Explicit(g) = self.processing.gate {
            if g.lower > g.upper || g.upper >= self.radar.samples_per_pri {
                return Err(CliError::Validation(format!(
                    "explicit gate [{}, {}] outside the {} range bins",
                    g.lower, g.upper, self.radar.samples_per_pri
                )));
            }
        }
        if self.k == 0 || self.k > self.processing.frames {
            return Err(CliError::Validation(format!(
                "pca.k = {} must lie in [1, {}] (spectrogram frames)",
                self.k, self.processing.frames
            )));
        }
        if self.train_per_class == 0 {
            return Err(CliError::Validation("split.train_per_class must be at least 1".into()));
        }
        let s = &self.scene;
        let peak = s.speed_mps.max + s.limb_sway_mps + s.torso_bob_mps;
        let limit = self.radar.max_unambiguous_speed();
        if peak >= limit {
            return Err(CliError::Validation(format!(
                "walkers reach {peak:.4} m/s but Doppler aliases above {limit:.4} m/s"
            )));
        }
        // mean motion plus the largest excursion of the gait oscillation
        let swing = (s.limb_sway_mps + s.torso_bob_mps) / (std::f64::consts::TAU * s.gait_hz.min);
        let travel = s.speed_mps.max * self.radar.duration_s() + swing;
        if s.near_range_m.min <= 0.0 || s.far_range_m.min - travel <= 0.0 {
            return Err(CliError::Validation(format!(
                "approaching walkers may cover {travel:.2} m; far_range_min_m must exceed that and ranges must be positive"
            )));
        }
        Ok(())
    }

    pub fn look_angles(&self) -> (f64, f64) {
        (self.scene.theta1_deg, self.scene.theta2_deg)
    }
}

fn float(v: f64) -> String {
    format!("{v:?}")
}

fn gate_text(g: &GatePolicy) -> String {
    match g {
        GatePolicy::Auto { energy_fraction } => format!("auto:{energy_fraction:?}"),
        GatePolicy::Explicit(g) => format!("explicit:{}:{}", g.lower, g.upper),
    }
}

fn parse_gate(v: &str) -> std::result::Result<GatePolicy, String> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let bad = || format!("gate must be `auto:<fraction>` or `explicit:<lower>:<upper>`, got `{v}`");
    match parts.as_slice() {
        ["auto", f] => Ok(GatePolicy::Auto {
            energy_fraction: f.parse().map_err(|_| bad())?,
        }),
        ["explicit", lo, hi] => Ok(GatePolicy::Explicit(RangeGate::new(
            lo.parse().map_err(|_| bad())?,
            hi.parse().map_err(|_| bad())?,
        ))),
        _ => Err(bad()),
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_profile(Profile::Desk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_validate() {
        let desk = ExperimentConfig::for_profile(Profile::Desk);
        desk.validate().unwrap();
        assert_eq!(desk.processing.frames, 126);
        let full = ExperimentConfig::for_profile(Profile::Full);
        full.validate().unwrap();
        assert_eq!(full.processing.frames, 384);
        assert_eq!(full.radar.total_samples(), 6_144_000);
    }

    #[test]
    fn canonical_text_round_trips() {
        for p in [Profile::Desk, Profile::Full] {
            let cfg = ExperimentConfig::for_profile(p);
            let text = cfg.to_text();
            let back = ExperimentConfig::parse(&text, Profile::Desk).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn overrides_and_comments() {
        let cfg = ExperimentConfig::parse(
            "# smoke\nscene.class1_count = 2\nscene.class2_count=2 # inline\n\nprocessing.gate = explicit:10:40\npca.k = 1\n",
            Profile::Desk,
        )
        .unwrap();
        assert_eq!(cfg.scene.class_counts, [2, 2]);
        assert_eq!(cfg.processing.gate, GatePolicy::Explicit(RangeGate::new(10, 40)));
        assert_eq!(cfg.k, 1);
    }

    #[test]
    fn frames_follow_num_pri_unless_pinned() {
        let cfg = ExperimentConfig::parse("radar.num_pri = 1000", Profile::Desk).unwrap();
        assert_eq!(cfg.processing.frames, 30);
        let cfg = ExperimentConfig::parse("radar.num_pri = 1000\nprocessing.frames = 10", Profile::Desk).unwrap();
        assert_eq!(cfg.processing.frames, 10);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "radar.bogus = 1",
            "radar.pri_s = fast",
            "radar.pri_s = 0.001\nradar.pri_s = 0.001",
            "no equals sign",
            "radar.samples_per_pri = 100",
            "processing.window = kaiser",
            "processing.gate = auto",
            "processing.gate = explicit:10:500",
            "pca.k = 0",
            "pca.k = 500",
            "scene.speed_max_mps = 0.95",
            "scene.class1_count = 0\nscene.class2_count = 0",
            "scene.theta1_deg = 200",
            "processing.window_len = 5000",
        ] {
            assert!(
                matches!(ExperimentConfig::parse(text, Profile::Desk), Err(CliError::Validation(_)) | Err(CliError::Core(_))),
                "{text}"
            );
        }
    }
}
