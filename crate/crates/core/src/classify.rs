//! 1-nearest-neighbor classification and confusion matrices.

use alloc::vec::Vec;

use crate::error::{domain, structural};
use crate::features::FusedFeature;
use crate::{Label, Matrix, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    pub fn id(self) -> u32 {
        match self {
            Metric::Euclidean => 0,
        }
    }

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            0 => Ok(Metric::Euclidean),
            _ => Err(domain!("unknown metric id {id}")),
        }
    }

    /// Monotone surrogate of the distance; argmin is all that matters.
    fn rank_distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
        }
    }
}

/// Labelled training features.
#[derive(Clone, Debug, PartialEq)]
pub struct NnModel {
    features: Vec<FusedFeature>,
    metric: Metric,
}

impl NnModel {
    pub fn new(features: Vec<FusedFeature>, metric: Metric) -> Result<Self> {
        let Some(first) = features.first() else {
            return Err(domain!("nearest-neighbor model needs at least one training feature"));
        };
        let dim = first.len();
        for (i, f) in features.iter().enumerate() {
            if f.len() != dim {
                return Err(structural!("training feature {i} has length {} instead of {dim}", f.len()));
            }
            if f.label().is_none() {
                return Err(domain!("training feature {i} is unlabelled"));
            }
        }
        Ok(Self { features, metric })
    }

    pub fn features(&self) -> &[FusedFeature] {
        &self.features
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    /// Distinct training labels, ascending.
    pub fn classes(&self) -> Vec<Label> {
        let mut classes: Vec<Label> = self.features.iter().filter_map(|f| f.label()).collect();
        classes.sort_unstable();
        classes.dedup();
        classes
    }
}

/// Label of the nearest training feature; ties go to the lowest index.
pub fn predict(model: &NnModel, feature: &FusedFeature) -> Result<Label> {
    if feature.len() != model.dim() {
        return Err(structural!(
            "query has length {} but the model expects {}",
            feature.len(),
            model.dim()
        ));
    }
    let mut best = (f64::INFINITY, 0usize);
    for (i, f) in model.features.iter().enumerate() {
        let d = model.metric.rank_distance(f.values(), feature.values());
        if d < best.0 {
            best = (d, i);
        }
    }
    Ok(model.features[best.1].label().unwrap_or_default())
}

/// Counts with rows = predicted class and columns = actual class.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    classes: Vec<Label>,
    counts: Matrix<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<Label>) -> Self {
        let n = classes.len();
        Self {
            classes,
            counts: Matrix::zeros(n, n),
        }
    }

    fn index_of(&self, label: Label) -> Result<usize> {
        self.classes
            .iter()
            .position(|&c| c == label)
            .ok_or_else(|| domain!("label {label} is not one of the model classes {:?}", self.classes))
    }

    pub fn record(&mut self, predicted: Label, actual: Label) -> Result<()> {
        let p = self.index_of(predicted)?;
        let a = self.index_of(actual)?;
        self.counts[(p, a)] += 1;
        Ok(())
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn counts(&self) -> &Matrix<u64> {
        &self.counts
    }

    /// Items whose actual class is column `c`.
    pub fn column_total(&self, c: usize) -> u64 {
        (0..self.classes.len()).map(|r| self.counts[(r, c)]).sum()
    }

    /// Column-normalized percentages; an empty column stays all zero.
    pub fn percentages(&self) -> Matrix<f64> {
        let n = self.classes.len();
        Matrix::from_fn(n, n, |r, c| {
            let total = self.column_total(c);
            if total == 0 {
                0.0
            } else {
                100.0 * self.counts[(r, c)] as f64 / total as f64
            }
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.as_slice().iter().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[(i, i)]).sum()
    }

    /// `trace / total`, zero for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.correct() as f64 / t as f64,
        }
    }
}

/// Classifies every labelled test feature.
pub fn evaluate(model: &NnModel, test: &[FusedFeature]) -> Result<ConfusionMatrix> {
    if test.is_empty() {
        return Err(domain!("test set is empty"));
    }
    let predictions = test
        .iter()
        .map(|f| predict(model, f))
        .collect::<Result<Vec<_>>>()?;
    confusion_from_predictions(model.classes(), test, &predictions)
}

/// Builds the matrix from already computed predictions (in test order).
pub fn confusion_from_predictions(
    classes: Vec<Label>,
    test: &[FusedFeature],
    predictions: &[Label],
) -> Result<ConfusionMatrix> {
    if test.len() != predictions.len() {
        return Err(structural!("{} test items but {} predictions", test.len(), predictions.len()));
    }
    let mut cm = ConfusionMatrix::new(classes);
    for (i, (f, &p)) in test.iter().zip(predictions).enumerate() {
        let actual = f
            .label()
            .ok_or_else(|| domain!("test feature {i} is unlabelled"))?;
        cm.record(p, actual)?;
    }
    Ok(cm)
}
