//! In-memory experiment steps shared by the CLI commands and the tests.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use microbeam_core::array::BeamWeights;
use microbeam_core::classify::{self, ConfusionMatrix, Metric, NnModel};
use microbeam_core::dsp::{process_beam, process_example, Spectrogram};
use microbeam_core::features::{self, FusedFeature, PcaModel};
use microbeam_core::scene::{plan_dataset, synthesize, RawDataCube};
use microbeam_core::Label;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Spectrograms of one example.
#[derive(Clone, Debug, PartialEq)]
pub struct Processed {
    pub index: usize,
    pub label: Label,
    /// Beams steered to the two configured look angles.
    pub pair: (Spectrogram, Spectrogram),
    /// Channel 0 alone, when requested.
    pub single: Option<Spectrogram>,
}

pub fn process_cube(cube: &RawDataCube, cfg: &ExperimentConfig) -> Result<(Spectrogram, Spectrogram)> {
    if cube.params().num_rx != cfg.radar.num_rx {
        return Err(CliError::Validation(format!(
            "cube has {} channels but the configuration expects {}",
            cube.params().num_rx,
            cfg.radar.num_rx
        )));
    }
    Ok(process_example(cube, cfg.look_angles(), &cfg.processing)?)
}

pub fn process_single(cube: &RawDataCube, cfg: &ExperimentConfig) -> Result<Spectrogram> {
    let w = BeamWeights::single_element(cube.params().num_rx, 0)?;
    Ok(process_beam(cube, &w, &cfg.processing)?)
}

/// Synthesizes and processes the whole configured dataset without touching
/// the file system. Examples are returned in index order.
pub fn simulate_and_process(cfg: &ExperimentConfig, with_single: bool) -> Result<Vec<Processed>> {
    let plan = plan_dataset(&cfg.scene, &cfg.radar)?;
    plan.par_iter()
        .map(|ex| {
            let cube = synthesize(&ex.scene, &cfg.radar)?;
            let pair = process_cube(&cube, cfg)?;
            let single = if with_single {
                Some(process_single(&cube, cfg)?)
            } else {
                None
            };
            Ok(Processed {
                index: ex.index,
                label: ex.label,
                pair,
                single,
            })
        })
        .collect()
}

/// Per class, shuffles positions with a ChaCha8 stream seeded by `seed` and
/// takes the first `per_class` for training. Returns (train, test) positions
/// into `labels`, each ascending.
pub fn split(labels: &[Label], per_class: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let classes: BTreeSet<Label> = labels.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < per_class {
            return Err(CliError::Validation(format!(
                "class {class} has {} examples; {per_class} requested for training ({} short)",
                members.len(),
                per_class - members.len()
            )));
        }
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..per_class]);
        test.extend_from_slice(&members[per_class..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// A fitted two-beam classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct Classifier {
    pub pca: (PcaModel, PcaModel),
    pub nn: NnModel,
}

pub fn train(examples: &[&Processed], k: usize) -> Result<Classifier> {
    let pairs: Vec<(Spectrogram, Spectrogram)> = examples.iter().map(|e| e.pair.clone()).collect();
    let pca = features::fit(&pairs, k)?;
    let feats = extract_all(examples, &pca)?;
    Ok(Classifier {
        nn: NnModel::new(feats, Metric::Euclidean)?,
        pca,
    })
}

pub fn extract_all(examples: &[&Processed], pca: &(PcaModel, PcaModel)) -> Result<Vec<FusedFeature>> {
    examples
        .par_iter()
        .map(|e| Ok(features::extract((&e.pair.0, &e.pair.1), (&pca.0, &pca.1), Some(e.label))?))
        .collect()
}

pub fn evaluate(model: &Classifier, examples: &[&Processed]) -> Result<ConfusionMatrix> {
    let feats = extract_all(examples, &model.pca)?;
    Ok(classify::evaluate(&model.nn, &feats)?)
}

/// Same pipeline on the single-antenna spectrograms: one PCA model and the
/// projection vectorized column by column.
pub fn evaluate_single_antenna(train_set: &[&Processed], test_set: &[&Processed], k: usize) -> Result<ConfusionMatrix> {
    let single = |e: &Processed| -> Result<Spectrogram> {
        e.single
            .clone()
            .ok_or_else(|| CliError::Invariant(format!("example {} has no single-antenna spectrogram", e.index)))
    };
    let train_specs = train_set.iter().map(|e| single(e)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Spectrogram> = train_specs.iter().collect();
    let pca = features::fit_angle(&refs, k)?;
    let feature = |e: &Processed| -> Result<FusedFeature> {
        let proj = features::project(&single(e)?, &pca)?;
        Ok(FusedFeature::new(proj.vectorize_columns(), Some(e.label))?)
    };
    let train_feats = train_set.iter().map(|e| feature(e)).collect::<Result<Vec<_>>>()?;
    let test_feats = test_set.par_iter().map(|e| feature(e)).collect::<Result<Vec<_>>>()?;
    let nn = NnModel::new(train_feats, Metric::Euclidean)?;
    Ok(classify::evaluate(&nn, &test_feats)?)
}

/// Splits `examples` by the configured seed and returns (train, test).
pub fn split_examples<'a>(
    examples: &'a [Processed],
    cfg: &ExperimentConfig,
) -> Result<(Vec<&'a Processed>, Vec<&'a Processed>)> {
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    let (train, test) = split(&labels, cfg.train_per_class, cfg.split_seed)?;
    Ok((
        train.iter().map(|&i| &examples[i]).collect(),
        test.iter().map(|&i| &examples[i]).collect(),
    ))
}
