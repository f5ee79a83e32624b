//! File-based subcommands.
//!
//! `simulate` writes raw cubes and `manifest.tsv`; `process` turns them into
//! spectrogram pairs and `spectrograms.tsv`; `train` fits a model file from
//! the pairs; `evaluate` reports the confusion matrix of a model; `render`
//! previews one spectrogram as PGM.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use microbeam_core::classify::ConfusionMatrix;
use microbeam_core::scene::{plan_dataset, synthesize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::formats::manifest::{self, CubeEntry, PairEntry};
use crate::formats::model::TrainedModel;
use crate::formats::{cube, model, pgm, spectrogram};
use crate::fsutil::{create_dir, read, read_text, sha256_hex, write_atomic};
use crate::pipeline::{self, Classifier, Processed};

pub fn cube_file_name(index: usize) -> String {
    format!("cube_{index:04}.mbc")
}

pub fn spectrogram_file_names(index: usize) -> (String, String) {
    (format!("spec_{index:04}_a.mbs"), format!("spec_{index:04}_b.mbs"))
}

/// Synthesizes every configured example into `out`. Returns the entries
/// written to the manifest.
pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<CubeEntry>> {
    create_dir(out)?;
    let plan = plan_dataset(&cfg.scene, &cfg.radar)?;
    let entries = plan
        .par_iter()
        .map(|ex| {
            let cube = synthesize(&ex.scene, &cfg.radar)?;
            let bytes = cube::encode(&cube)?;
            let file = cube_file_name(ex.index);
            write_atomic(&out.join(&file), &bytes)?;
            Ok(CubeEntry {
                index: ex.index,
                label: ex.label,
                seed: ex.seed,
                sha256: sha256_hex(&bytes),
                file,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_atomic(
        &out.join(manifest::DATASET_FILE),
        manifest::write_dataset(&entries).as_bytes(),
    )?;
    Ok(entries)
}

/// Processes every cube listed in `dataset/manifest.tsv` into `out`.
///
/// All cubes are checked and processed before anything is written; any
/// failure aborts with one line per bad entry and leaves `out` untouched.
pub fn process(cfg: &ExperimentConfig, dataset: &Path, out: &Path) -> Result<Vec<PairEntry>> {
    let manifest_path = dataset.join(manifest::DATASET_FILE);
    let entries = manifest::parse_dataset(&read_text(&manifest_path)?, &manifest_path)?;
    if entries.is_empty() {
        return Err(CliError::Validation(format!(
            "{} lists no examples",
            manifest_path.display()
        )));
    }
    let results: Vec<std::result::Result<Processed, String>> = entries
        .par_iter()
        .map(|e| process_entry(cfg, dataset, e).map_err(|err| format!("  {} (index {}): {err}", e.file, e.index)))
        .collect();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    if !failures.is_empty() {
        let mut msg = format!("{} of {} cubes failed; nothing written:", failures.len(), entries.len());
        for f in failures {
            let _ = write!(msg, "\n{f}");
        }
        return Err(CliError::Validation(msg));
    }
    create_dir(out)?;
    let mut pairs = Vec::with_capacity(results.len());
    for p in results.into_iter().flatten() {
        let (first, second) = spectrogram_file_names(p.index);
        write_atomic(&out.join(&first), &spectrogram::encode(&p.pair.0))?;
        write_atomic(&out.join(&second), &spectrogram::encode(&p.pair.1))?;
        pairs.push(PairEntry {
            index: p.index,
            label: p.label,
            first,
            second,
        });
    }
    write_atomic(
        &out.join(manifest::SPECTROGRAM_FILE),
        manifest::write_pairs(&pairs).as_bytes(),
    )?;
    Ok(pairs)
}

fn process_entry(cfg: &ExperimentConfig, dataset: &Path, e: &CubeEntry) -> Result<Processed> {
    let path = dataset.join(&e.file);
    let bytes = read(&path)?;
    let digest = sha256_hex(&bytes);
    if digest != e.sha256 {
        return Err(CliError::format(&path, format!("sha256 {digest} does not match manifest")));
    }
    let cube = cube::decode(&bytes, &path)?;
    drop(bytes);
    if cube.label() != Some(e.label) {
        return Err(CliError::format(
            &path,
            format!("label {:?} disagrees with manifest label {}", cube.label(), e.label),
        ));
    }
    let pair = pipeline::process_cube(&cube, cfg)?;
    Ok(Processed {
        index: e.index,
        label: e.label,
        pair,
        single: None,
    })
}

/// Loads every pair listed in `dir/spectrograms.tsv`, in manifest order.
pub fn load_processed(dir: &Path) -> Result<Vec<Processed>> {
    let manifest_path = dir.join(manifest::SPECTROGRAM_FILE);
    let entries = manifest::parse_pairs(&read_text(&manifest_path)?, &manifest_path)?;
    if entries.is_empty() {
        return Err(CliError::Validation(format!(
            "{} lists no examples",
            manifest_path.display()
        )));
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = entries.iter().find(|e| !seen.insert(e.index)) {
        return Err(CliError::format(&manifest_path, format!("index {} listed twice", dup.index)));
    }
    entries
        .par_iter()
        .map(|e| {
            Ok(Processed {
                index: e.index,
                label: e.label,
                pair: (
                    spectrogram::load(&dir.join(&e.first))?,
                    spectrogram::load(&dir.join(&e.second))?,
                ),
                single: None,
            })
        })
        .collect()
}

/// Fits a model on the configured training split of `spectrograms` and
/// saves it to `model_path`.
pub fn train(cfg: &ExperimentConfig, spectrograms: &Path, model_path: &Path) -> Result<TrainedModel> {
    let examples = load_processed(spectrograms)?;
    let (train_set, _) = pipeline::split_examples(&examples, cfg)?;
    let check = |angle: f64, got: f64, which: &str| {
        if angle.to_bits() != got.to_bits() {
            return Err(CliError::Validation(format!(
                "{which} spectrograms look at {got}° but the configuration says {angle}°"
            )));
        }
        Ok(())
    };
    check(cfg.scene.theta1_deg, examples[0].pair.0.look_angle_deg(), "first")?;
    check(cfg.scene.theta2_deg, examples[0].pair.1.look_angle_deg(), "second")?;
    let classifier = pipeline::train(&train_set, cfg.k)?;
    let trained = TrainedModel {
        config_text: cfg.to_text(),
        train_indices: train_set.iter().map(|e| e.index).collect(),
        pca: classifier.pca,
        nn: classifier.nn,
    };
    save_model(&trained, model_path)?;
    Ok(trained)
}

pub fn save_model(m: &TrainedModel, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_atomic(path, &model::encode(m))
}

/// Classifies the held-out examples (or all of them with `all`).
pub fn evaluate(model_path: &Path, spectrograms: &Path, all: bool) -> Result<ConfusionMatrix> {
    let trained = model::load(model_path)?;
    let examples = load_processed(spectrograms)?;
    let held_in: BTreeSet<usize> = trained.train_indices.iter().copied().collect();
    let selected: Vec<&Processed> = examples
        .iter()
        .filter(|e| all || !held_in.contains(&e.index))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Validation(
            "no held-out examples to evaluate; pass --all to score the training set".into(),
        ));
    }
    let expected = (trained.pca.0.look_angle_deg(), trained.pca.1.look_angle_deg());
    if let Some(bad) = selected.iter().find(|e| {
        (e.pair.0.look_angle_deg(), e.pair.1.look_angle_deg()) != expected
    }) {
        return Err(CliError::Validation(format!(
            "example {} was processed at {:?}° but the model expects {expected:?}°",
            bad.index,
            (bad.pair.0.look_angle_deg(), bad.pair.1.look_angle_deg())
        )));
    }
    let classifier = Classifier {
        pca: trained.pca,
        nn: trained.nn,
    };
    pipeline::evaluate(&classifier, &selected)
}

/// Human-readable table followed by tab-separated machine rows.
pub fn report(cm: &ConfusionMatrix) -> String {
    let classes = cm.classes();
    let pct = cm.percentages();
    let mut out = String::from("confusion matrix, percent of actual class (rows predicted, columns actual)\n");
    let _ = write!(out, "{:>12}", "");
    for c in classes {
        let _ = write!(out, "{:>12}", format!("actual {c}"));
    }
    out.push('\n');
    for (r, p) in classes.iter().enumerate() {
        let _ = write!(out, "{:>12}", format!("predicted {p}"));
        for c in 0..classes.len() {
            let _ = write!(out, "{:>12.2}", pct[(r, c)]);
        }
        out.push('\n');
    }
    out.push('\n');
    out.push_str("row\tpredicted\tactual\tcount\tpercent\n");
    for (r, p) in classes.iter().enumerate() {
        for (c, a) in classes.iter().enumerate() {
            let _ = writeln!(out, "cell\t{p}\t{a}\t{}\t{:.4}", cm.counts()[(r, c)], pct[(r, c)]);
        }
    }
    let _ = writeln!(out, "accuracy\t{:.6}\t{}\t{}", cm.accuracy(), cm.correct(), cm.total());
    out
}

/// Writes a PGM preview of one spectrogram file.
pub fn render(input: &Path, out: &Path) -> Result<(usize, usize)> {
    let s = spectrogram::load(input)?;
    write_atomic(out, &pgm::render(&s))?;
    Ok((s.num_frames(), s.num_bins()))
}

/// Default PGM path next to the input.
pub fn default_render_path(input: &Path) -> PathBuf {
    input.with_extension("pgm")
}
