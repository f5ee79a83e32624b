use std::fs;
use std::path::Path;

use microbeam::commands;
use microbeam::formats::{model, pgm, spectrogram};
use microbeam::{CliError, ExperimentConfig, Profile};

/// 32 range bins over 1 ms PRIs, 256 PRIs (6 frames).
const TINY: &str = "\
radar.bandwidth_hz = 312500000.0
radar.adc_rate_sps = 32000.0
radar.samples_per_pri = 32
radar.num_pri = 256
";

fn tiny(extra: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&format!("{TINY}{extra}"), Profile::Desk).unwrap()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(ext))
        .collect();
    names.sort();
    names
}

#[test]
fn two_by_two_dataset_writes_four_cubes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny("scene.class1_count = 2\nscene.class2_count = 2\n");
    let entries = commands::simulate(&cfg, dir.path()).unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(files_with_ext(dir.path(), ".mbc").len(), 4);
    let labels: Vec<u32> = entries.iter().map(|e| e.label).collect();
    assert_eq!(labels, [1, 1, 2, 2]);
}

#[test]
fn default_counts_write_one_hundred_twenty_cubes() {
    let dir = tempfile::tempdir().unwrap();
    let entries = commands::simulate(&tiny(""), dir.path()).unwrap();
    assert_eq!(entries.len(), 120);
    assert_eq!(files_with_ext(dir.path(), ".mbc").len(), 120);
    assert_eq!(entries.iter().filter(|e| e.label == 1).count(), 60);
}

#[test]
fn processing_empty_directory_fails_without_output() {
    let dataset = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("specs");
    let err = commands::process(&tiny(""), dataset.path(), &target).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }), "{err}");
    assert!(!target.exists());

    fs::write(
        dataset.path().join("manifest.tsv"),
        "# microbeam dataset manifest v1\nindex\tlabel\tseed\tfile\tsha256\n",
    )
    .unwrap();
    let err = commands::process(&tiny(""), dataset.path(), &target).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)), "{err}");
    assert!(!target.exists());
}

#[test]
fn corrupted_cubes_are_all_reported_and_nothing_written() {
    let dataset = tempfile::tempdir().unwrap();
    let cfg = tiny("scene.class1_count = 2\nscene.class2_count = 2\n");
    commands::simulate(&cfg, dataset.path()).unwrap();
    for i in [1, 3] {
        let p = dataset.path().join(commands::cube_file_name(i));
        let mut bytes = fs::read(&p).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0xff;
        fs::write(&p, bytes).unwrap();
    }
    let out = dataset.path().join("specs");
    let err = commands::process(&cfg, dataset.path(), &out).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("cube_0001.mbc") && msg.contains("cube_0003.mbc"), "{msg}");
    assert!(!msg.contains("cube_0000.mbc"), "{msg}");
    assert_eq!(err.exit_code(), 1);
    assert!(!out.exists());
}

#[test]
fn processing_twice_gives_identical_files() {
    let dataset = tempfile::tempdir().unwrap();
    let cfg = tiny("scene.class1_count = 2\nscene.class2_count = 2\n");
    commands::simulate(&cfg, dataset.path()).unwrap();
    let a = dataset.path().join("a");
    let b = dataset.path().join("b");
    commands::process(&cfg, dataset.path(), &a).unwrap();
    commands::process(&cfg, dataset.path(), &b).unwrap();
    let names = files_with_ext(&a, "");
    assert_eq!(names.len(), 9);
    assert_eq!(names, files_with_ext(&b, ""));
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n}");
    }
    // rerunning into the same directory overwrites in place
    commands::process(&cfg, dataset.path(), &a).unwrap();
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n}");
    }
}

#[test]
fn model_round_trip_and_training_set_accuracy() {
    let root = tempfile::tempdir().unwrap();
    let cfg = tiny("scene.class1_count = 4\nscene.class2_count = 4\nsplit.train_per_class = 3\npca.k = 2\n");
    let data = root.path().join("data");
    let specs = root.path().join("specs");
    let model_path = root.path().join("model.mbm");
    commands::simulate(&cfg, &data).unwrap();
    commands::process(&cfg, &data, &specs).unwrap();
    let trained = commands::train(&cfg, &specs, &model_path).unwrap();
    assert_eq!(trained.train_indices.len(), 6);
    assert_eq!(trained.nn.dim(), 2 * 128 * 2);

    let bytes = fs::read(&model_path).unwrap();
    let loaded = model::load(&model_path).unwrap();
    assert_eq!(loaded, trained);
    assert_eq!(model::encode(&loaded), bytes);
    let again = root.path().join("again.mbm");
    commands::save_model(&loaded, &again).unwrap();
    assert_eq!(fs::read(&again).unwrap(), bytes);
    assert_eq!(
        ExperimentConfig::parse(&loaded.config_text, Profile::Full).unwrap(),
        cfg
    );

    // scoring the training examples themselves reproduces their labels
    let train_only = root.path().join("train_only");
    fs::create_dir(&train_only).unwrap();
    let manifest = fs::read_to_string(specs.join("spectrograms.tsv")).unwrap();
    let mut kept = String::new();
    for (i, line) in manifest.lines().enumerate() {
        let keep = i < 2 || {
            let index: usize = line.split('\t').next().unwrap().parse().unwrap();
            trained.train_indices.contains(&index)
        };
        if keep {
            kept.push_str(line);
            kept.push('\n');
            if i >= 2 {
                for name in line.split('\t').skip(2) {
                    fs::copy(specs.join(name), train_only.join(name)).unwrap();
                }
            }
        }
    }
    fs::write(train_only.join("spectrograms.tsv"), kept).unwrap();
    let cm = commands::evaluate(&model_path, &train_only, true).unwrap();
    assert_eq!(cm.total(), 6);
    assert_eq!(cm.accuracy(), 1.0);

    // held-out evaluation only scores the two remaining examples
    let held_out = commands::evaluate(&model_path, &specs, false).unwrap();
    assert_eq!(held_out.total(), 2);
    let report = commands::report(&held_out);
    assert!(report.contains("accuracy\t"), "{report}");
    assert!(report.contains("cell\t1\t1\t"), "{report}");
}

#[test]
fn render_has_spectrogram_shape_and_full_scale_peak() {
    let root = tempfile::tempdir().unwrap();
    let cfg = tiny("scene.class1_count = 1\nscene.class2_count = 1\n");
    let data = root.path().join("data");
    let specs = root.path().join("specs");
    commands::simulate(&cfg, &data).unwrap();
    commands::process(&cfg, &data, &specs).unwrap();
    let input = specs.join(commands::spectrogram_file_names(0).0);
    let out = root.path().join("preview.pgm");
    let (w, h) = commands::render(&input, &out).unwrap();
    let s = spectrogram::load(&input).unwrap();
    assert_eq!((w, h), (s.num_frames(), s.num_bins()));
    let bytes = fs::read(&out).unwrap();
    let (pw, ph, pixels) = pgm::parse(&bytes).unwrap();
    assert_eq!((pw, ph), (6, 128));
    assert_eq!(pixels.iter().copied().max(), Some(255));
    assert_eq!(commands::default_render_path(&input).extension().unwrap(), "pgm");
}

#[test]
fn all_zero_spectrogram_renders_uniform() {
    use microbeam_core::dsp::{Spectrogram, WindowKind};
    use microbeam_core::Matrix;
    let s = Spectrogram::new(Matrix::zeros(4, 3), 90.0, 31, WindowKind::Hann).unwrap();
    let bytes = pgm::render(&s);
    let (w, h, pixels) = pgm::parse(&bytes).unwrap();
    assert_eq!((w, h), (3, 4));
    assert!(pixels.iter().all(|&p| p == pixels[0]));
}

#[test]
fn pgm_top_row_is_highest_doppler() {
    use microbeam_core::dsp::{Spectrogram, WindowKind};
    use microbeam_core::Matrix;
    let power = Matrix::from_fn(4, 2, |r, _| if r == 3 { 1.0 } else { 1e-3 });
    let s = Spectrogram::new(power, 90.0, 31, WindowKind::Hann).unwrap();
    let bytes = pgm::render(&s);
    let (_, _, pixels) = pgm::parse(&bytes).unwrap();
    assert_eq!(&pixels[..2], &[255, 255]);
    // 30 dB down on a 60 dB scale lands mid-grey
    assert_eq!(pixels[2], 128);
}

#[test]
fn spectrogram_file_round_trip() {
    use microbeam_core::dsp::{Spectrogram, WindowKind};
    use microbeam_core::Matrix;
    let power = Matrix::from_fn(4, 3, |r, c| (r * 3 + c) as f64 * 0.5);
    let s = Spectrogram::new(power, 105.0, 7, WindowKind::Blackman).unwrap();
    let bytes = spectrogram::encode(&s);
    let back = spectrogram::decode(&bytes, Path::new("x.mbs")).unwrap();
    assert_eq!(back, s);
    assert!(spectrogram::decode(&bytes[..bytes.len() - 1], Path::new("x.mbs")).is_err());
}

#[test]
fn config_file_round_trip_and_unknown_keys() {
    let cfg = tiny("processing.window = blackman\nprocessing.gate = explicit:2:20\n");
    let text = cfg.to_text();
    assert_eq!(ExperimentConfig::parse(&text, Profile::Full).unwrap(), cfg);
    let err = ExperimentConfig::parse("scene.colour = red", Profile::Desk).unwrap_err();
    assert!(err.to_string().contains("scene.colour"));
    assert_eq!(err.exit_code(), 1);
}
