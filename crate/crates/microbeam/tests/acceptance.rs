//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 4 5`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use microbeam::fsutil::sha256_hex;
use microbeam::pipeline::{self, Processed};
use microbeam::{ExperimentConfig, Profile};
use microbeam_core::array::{beam_weights, steering_vector};
use microbeam_core::classify::{predict, Metric, NnModel};
use microbeam_core::dsp::{process_beam, range_map, reshape_to_pri, ChainConfig, Spectrogram};
use microbeam_core::features::{center_images, fit_angle, image_covariance, project, reconstruct, FusedFeature};
use microbeam_core::scene::{plan_dataset, synthesize, RadarParams, SceneSpec, WalkerSpec};
use microbeam_core::{Complex, Label, Matrix};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn desk(seed: u64, extra: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::parse(extra, Profile::Desk).unwrap();
    cfg.scene.master_seed = seed;
    cfg.split_seed = seed;
    cfg
}

fn held_out_accuracy(examples: &[Processed], cfg: &ExperimentConfig, k: usize) -> (f64, String) {
    let (train, test) = pipeline::split_examples(examples, cfg).unwrap();
    let model = pipeline::train(&train, k).unwrap();
    let cm = pipeline::evaluate(&model, &test).unwrap();
    let pct = cm.percentages();
    let diag = format!("{:.1}%/{:.1}%", pct[(0, 0)], pct[(1, 1)]);
    (cm.accuracy(), diag)
}

/// Processed default desk datasets for each seed, built once.
struct Datasets {
    nominal: BTreeMap<u64, Vec<Processed>>,
}

impl Datasets {
    fn nominal(&mut self, seed: u64) -> &[Processed] {
        self.nominal
            .entry(seed)
            .or_insert_with(|| pipeline::simulate_and_process(&desk(seed, ""), false).unwrap())
    }
}

fn criterion_1(d: &mut Datasets) -> Outcome {
    let cfg = desk(1, "");
    assert_eq!((cfg.scene.theta1_deg, cfg.scene.theta2_deg), (75.0, 105.0));
    assert_eq!((cfg.scene.class_counts, cfg.train_per_class, cfg.k), ([60, 60], 46, 2));
    let (acc, diag) = held_out_accuracy(d.nominal(1), &cfg, 2);
    outcome(acc == 1.0, format!("held-out diagonal {diag}"))
}

fn criterion_2(d: &mut Datasets) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for seed in SEEDS {
        let cfg = desk(seed, "");
        let (k1, _) = held_out_accuracy(d.nominal(seed), &cfg, 1);
        let (k2, _) = held_out_accuracy(d.nominal(seed), &cfg, 2);
        pass &= k1 <= k2;
        detail.push(format!("seed {seed}: K=1 {:.3} K=2 {:.3}", k1, k2));
    }
    outcome(pass, detail.join("; "))
}

/// Mean per-channel power of noise-free cubes for the first two examples of
/// each class.
fn signal_power_per_channel(cfg: &ExperimentConfig) -> f64 {
    let mut params = cfg.radar;
    params.noise_variance = 0.0;
    let plan = plan_dataset(&cfg.scene, &params).unwrap();
    let c1 = cfg.scene.class_counts[0];
    let picks = [0, 1, c1, c1 + 1];
    let mut total = 0.0;
    for &i in &picks {
        let cube = synthesize(&plan[i].scene, &params).unwrap();
        let s = cube.data().as_slice();
        total += s.iter().map(|v| v.norm_sqr()).sum::<f64>() / s.len() as f64;
    }
    total / picks.len() as f64
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for seed in SEEDS {
        let mut cfg = desk(seed, "scene.theta1_deg = 85\nscene.theta2_deg = 95\n");
        cfg.radar.noise_variance = signal_power_per_channel(&cfg);
        let examples = pipeline::simulate_and_process(&cfg, true).unwrap();
        let (train, test) = pipeline::split_examples(&examples, &cfg).unwrap();
        let fused = pipeline::evaluate(&pipeline::train(&train, cfg.k).unwrap(), &test)
            .unwrap()
            .accuracy();
        let single = pipeline::evaluate_single_antenna(&train, &test, cfg.k)
            .unwrap()
            .accuracy();
        pass &= fused >= single;
        detail.push(format!(
            "seed {seed}: σ²={:.3} fused {:.3} single {:.3}",
            cfg.radar.noise_variance, fused, single
        ));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_4() -> Outcome {
    let params = RadarParams::desk();
    let walker = WalkerSpec {
        azimuth_deg: 90.0,
        initial_range_m: 8.0,
        radial_speed_mps: -0.5,
        gait_hz: 1.0,
        torso_rcs: 1.0,
        limb_rcs: 0.3,
        limb_sway_mps: 0.12,
        torso_bob_mps: 0.01,
        phase_seed: 3,
    };
    let scene = SceneSpec {
        walkers: vec![walker],
        class_label: None,
        duration_s: params.duration_s(),
        noise_seed: 4,
    };
    let cube = synthesize(&scene, &params).unwrap();
    let w = beam_weights(&params.geometry().unwrap(), 90.0).unwrap();
    let s = process_beam(&cube, &w, &ChainConfig::for_num_pri(params.num_pri)).unwrap();
    let expected = 2.0 * 0.5 / params.wavelength_m();
    let bin_hz = params.prf_hz() / s.num_bins() as f64;
    let power = s.power();
    let energies: Vec<f64> = (0..s.num_frames())
        .map(|t| (0..s.num_bins()).map(|r| power[(r, t)]).sum())
        .collect();
    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mut considered = 0;
    let mut on_ridge = 0;
    for t in 0..s.num_frames() {
        if energies[t] <= median {
            continue;
        }
        considered += 1;
        let peak = (0..s.num_bins())
            .max_by(|&a, &b| power[(a, t)].total_cmp(&power[(b, t)]))
            .unwrap();
        if (s.doppler_hz(peak, params.prf_hz()) - expected).abs() <= bin_hz {
            on_ridge += 1;
        }
    }
    let frac = on_ridge as f64 / considered as f64;
    outcome(
        frac >= 0.95,
        format!("{on_ridge}/{considered} frames within ±{bin_hz} Hz of {expected:.2} Hz"),
    )
}

fn criterion_5() -> Outcome {
    let params = RadarParams {
        num_pri: 16,
        noise_variance: 0.0,
        ..RadarParams::full()
    };
    let walker = WalkerSpec {
        azimuth_deg: 90.0,
        initial_range_m: 3.0,
        radial_speed_mps: 0.0,
        gait_hz: 1.0,
        torso_rcs: 1.0,
        limb_rcs: 0.0,
        limb_sway_mps: 0.0,
        torso_bob_mps: 0.0,
        phase_seed: 0,
    };
    let scene = SceneSpec {
        walkers: vec![walker],
        class_label: None,
        duration_s: params.duration_s(),
        noise_seed: 0,
    };
    let cube = synthesize(&scene, &params).unwrap();
    let x: Vec<Complex> = cube.data().column(0);
    let map = range_map(&reshape_to_pri(&x, params.samples_per_pri).unwrap(), 90.0, params.bandwidth_hz);
    let profile = map.range_profile();
    let peak = (0..profile.len())
        .max_by(|&a, &b| profile[a].total_cmp(&profile[b]))
        .unwrap();
    outcome(peak == 100, format!("peak at bin {peak} ({:.4} m)", peak as f64 * map.range_bin_m()))
}

fn criterion_6() -> Outcome {
    let g = microbeam_core::array::ArrayGeometry::new(4, 0.5).unwrap();
    let a = steering_vector(&g, 0.0).unwrap();
    let energy = |look: f64| {
        let w = beam_weights(&g, look).unwrap();
        let y: Complex = a.elements().iter().zip(w.weights()).map(|(s, w)| s * w).sum();
        y.norm_sqr()
    };
    let ratio = energy(90.0) / energy(0.0);
    outcome(ratio <= 1e-18, format!("null/matched energy ratio {ratio:.3e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = 512;
    let x = Matrix::from_fn(p, 100, |_, _| {
        Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * rng.random_range(0.1..10.0)
    });
    let map = range_map(&x, 90.0, 5e9);
    let mut worst = 0.0f64;
    for c in 0..100 {
        let e_in: f64 = x.column(c).iter().map(|v| v.norm_sqr()).sum();
        let e_out: f64 = map.data().column(c).iter().map(|v| v.norm_sqr()).sum();
        worst = worst.max((e_out - p as f64 * e_in).abs() / (p as f64 * e_in));
    }
    outcome(worst <= 1e-9, format!("worst relative error {worst:.3e}"))
}

fn criterion_8(d: &mut Datasets) -> Outcome {
    let specs: Vec<&Spectrogram> = d.nominal(1).iter().take(12).map(|e| &e.pair.0).collect();
    let t = specs[0].num_frames();
    let model = fit_angle(&specs, t).unwrap();
    let (_, centered) = center_images(&specs).unwrap();
    let mut worst = 0.0f64;
    for (s, target) in specs.iter().zip(&centered) {
        let back = reconstruct(&project(s, &model).unwrap(), &model).unwrap();
        let err: f64 = back
            .as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err / target.frobenius_norm());
    }
    let trace = image_covariance(&centered).unwrap().trace();
    let retained: f64 = model.eigenvalues().iter().sum();
    let trace_err = (retained - trace).abs() / trace;
    outcome(
        worst <= 1e-8 && trace_err <= 1e-9,
        format!("K=T={t}: worst reconstruction {worst:.3e}, trace error {trace_err:.3e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    let mut queries = 0;
    for _ in 0..200 {
        let dim = rng.random_range(1..=16);
        let n = rng.random_range(1..=40);
        let train: Vec<(Vec<f64>, Label)> = (0..n)
            .map(|_| {
                // coarse values make exact distance ties common
                let x = (0..dim).map(|_| rng.random_range(0..4) as f64).collect();
                (x, rng.random_range(1..=3))
            })
            .collect();
        let model = NnModel::new(
            train
                .iter()
                .map(|(x, l)| FusedFeature::new(x.clone(), Some(*l)).unwrap())
                .collect(),
            Metric::Euclidean,
        )
        .unwrap();
        for _ in 0..10 {
            let q: Vec<f64> = (0..dim).map(|_| rng.random_range(0..4) as f64).collect();
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, (x, _)) in train.iter().enumerate() {
                let d = x.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            let got = predict(&model, &FusedFeature::new(q, None).unwrap()).unwrap();
            queries += 1;
            if got != train[best].1 {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in {queries} queries"))
}

fn run_cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_microbeam")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "microbeam {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn hash_tree(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if path.is_dir() {
            for (k, v) in hash_tree(&path) {
                out.insert(format!("{name}/{k}"), v);
            }
        } else {
            out.insert(name, sha256_hex(&fs::read(&path).unwrap()));
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("tiny.conf");
    fs::write(
        &config,
        "radar.bandwidth_hz = 312500000.0\nradar.adc_rate_sps = 32000.0\nradar.samples_per_pri = 32\n\
         radar.num_pri = 512\nscene.class1_count = 5\nscene.class2_count = 5\nsplit.train_per_class = 3\n",
    )
    .unwrap();
    let run = |name: &str| {
        let dir = root.path().join(name);
        let p = |s: &str| dir.join(s).to_string_lossy().into_owned();
        let cfg = config.to_string_lossy().into_owned();
        let base = ["--config", cfg.as_str(), "--seed", "11"];
        let with = |extra: &[&str]| -> Vec<String> {
            base.iter().chain(extra).map(|s| s.to_string()).collect()
        };
        let call = |args: Vec<String>| run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>());
        call(with(&["simulate", "--out", &p("data")]));
        call(with(&["process", "--dataset", &p("data"), "--out", &p("specs")]));
        call(with(&["train", "--spectrograms", &p("specs"), "--model", &p("model.mbm")]));
        let report = call(with(&["evaluate", "--model", &p("model.mbm"), "--spectrograms", &p("specs")]));
        fs::write(dir.join("report.txt"), report).unwrap();
        hash_tree(&dir)
    };
    let a = run("a");
    let b = run("b");
    let same = a == b;
    outcome(same && a.len() > 30, format!("{} artifacts compared, identical: {same}", a.len()))
}

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut data = Datasets {
        nominal: BTreeMap::new(),
    };
    type Check = fn(&mut Datasets) -> Outcome;
    let criteria: [(u32, &str, Check); 10] = [
        (1, "desk end-to-end held-out accuracy is 100%", criterion_1),
        (2, "K=1 accuracy never exceeds K=2 over 5 seeds", criterion_2),
        (3, "fused beams at least match one antenna at 0 dB SNR, 10° apart", |_| criterion_3()),
        (4, "Doppler ridge of a 0.5 m/s approaching walker", |_| criterion_4()),
        (5, "static scatterer at 3.0 m peaks at range bin 100", |_| criterion_5()),
        (6, "broadside beam nulls a source at 0°", |_| criterion_6()),
        (7, "range map satisfies Parseval on 100 columns", |_| criterion_7()),
        (8, "full-rank 2D-PCA reconstructs training images", criterion_8),
        (9, "nearest neighbor matches exhaustive scan", |_| criterion_9()),
        (10, "CLI artifacts are byte-identical across runs", |_| criterion_10()),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let o = check(&mut data);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {verdict}  {name} [{}] ({:.1}s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
