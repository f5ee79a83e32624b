//! 2D-PCA features for pairs of beamformed spectrograms.
//!
//! Images are the `F × T` dB spectrograms minus the training-set mean image.
//! Per look angle the image covariance `C = Σ_i S_iᵀ·S_i` is `T × T`; each
//! image is projected onto the `K` dominant eigenvectors of `C`, giving an
//! `F × K` matrix. The two projections of an example are vectorized column by
//! column and concatenated into a `2·F·K` feature.

use alloc::vec::Vec;

use crate::dsp::Spectrogram;
use crate::eigen::SymmetricEigen;
use crate::error::{domain, structural};
use crate::math::log10;
use crate::{Label, Matrix, Result};

/// Power floor relative to the image maximum (60 dB below it).
pub const DB_FLOOR_RATIO: f64 = 1e-6;

/// Relative residual accepted for covariance eigenpairs.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

/// `10·log10(max(x, ε·max(x)))` with `ε` = [`DB_FLOOR_RATIO`].
pub fn to_db(power: &Matrix<f64>) -> Result<Matrix<f64>> {
    let peak = power.as_slice().iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(domain!("spectrogram has no positive power; dB scale undefined"));
    }
    let floor = DB_FLOOR_RATIO * peak;
    let data = power
        .as_slice()
        .iter()
        .map(|&x| 10.0 * log10(x.max(floor)))
        .collect();
    Matrix::from_vec(power.rows(), power.cols(), data)
}

/// dB image of `spec` minus `mean_image`.
pub fn normalize(spec: &Spectrogram, mean_image: &Matrix<f64>) -> Result<Matrix<f64>> {
    if spec.power().shape() != mean_image.shape() {
        return Err(structural!(
            "spectrogram is {:?} but mean image is {:?}",
            spec.power().shape(),
            mean_image.shape()
        ));
    }
    let mut db = to_db(spec.power())?;
    for (v, m) in db.as_mut_slice().iter_mut().zip(mean_image.as_slice()) {
        *v -= m;
    }
    Ok(db)
}

/// Subspace and centering for one look angle.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    mean_image: Matrix<f64>,
    basis: Matrix<f64>,
    eigenvalues: Vec<f64>,
    look_angle_deg: f64,
}

impl PcaModel {
    /// Validates orthonormal basis columns and non-increasing eigenvalues.
    pub fn new(
        mean_image: Matrix<f64>,
        basis: Matrix<f64>,
        eigenvalues: Vec<f64>,
        look_angle_deg: f64,
    ) -> Result<Self> {
        let k = basis.cols();
        if k == 0 || basis.rows() != mean_image.cols() || eigenvalues.len() != k {
            return Err(structural!(
                "mean image {:?}, basis {:?} and {} eigenvalues are inconsistent",
                mean_image.shape(),
                basis.shape(),
                eigenvalues.len()
            ));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) || eigenvalues.iter().any(|&v| !(v >= -1e-9)) {
            return Err(domain!("eigenvalues must be non-increasing and non-negative"));
        }
        let gram = basis.transpose().matmul(&basis)?;
        for i in 0..k {
            for j in 0..k {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > 1e-9 {
                    return Err(domain!("basis columns are not orthonormal"));
                }
            }
        }
        Ok(Self {
            mean_image,
            basis,
            eigenvalues,
            look_angle_deg,
        })
    }

    pub fn mean_image(&self) -> &Matrix<f64> {
        &self.mean_image
    }

    /// `T × K`, columns in eigenvalue order.
    pub fn basis(&self) -> &Matrix<f64> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn look_angle_deg(&self) -> f64 {
        self.look_angle_deg
    }

    pub fn k(&self) -> usize {
        self.basis.cols()
    }

    pub fn num_bins(&self) -> usize {
        self.mean_image.rows()
    }

    pub fn num_frames(&self) -> usize {
        self.mean_image.cols()
    }
}

/// `Sᵀ·S`, exactly symmetric.
fn gram(image: &Matrix<f64>) -> Matrix<f64> {
    let t = image.cols();
    let mut out = Matrix::zeros(t, t);
    for f in 0..image.rows() {
        let row = image.row(f);
        for a in 0..t {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            let dst = &mut out.row_mut(a)[a..];
            for (d, &rb) in dst.iter_mut().zip(&row[a..]) {
                *d += ra * rb;
            }
        }
    }
    for a in 0..t {
        for b in 0..a {
            out[(a, b)] = out[(b, a)];
        }
    }
    out
}

fn tree_sum(images: &[Matrix<f64>]) -> Matrix<f64> {
    match images {
        [single] => gram(single),
        _ => {
            let (left, right) = images.split_at(images.len() / 2);
            let mut acc = tree_sum(left);
            let rhs = tree_sum(right);
            for (a, b) in acc.as_mut_slice().iter_mut().zip(rhs.as_slice()) {
                *a += b;
            }
            acc
        }
    }
}

/// `Σ_i S_iᵀ·S_i`, summed as a balanced binary tree in index order.
pub fn image_covariance(images: &[Matrix<f64>]) -> Result<Matrix<f64>> {
    let Some(first) = images.first() else {
        return Err(domain!("covariance needs at least one image"));
    };
    if images.iter().any(|im| im.shape() != first.shape()) {
        return Err(structural!("training images differ in shape"));
    }
    Ok(tree_sum(images))
}

/// Training-set mean dB image and the centered images.
pub fn center_images(spectrograms: &[&Spectrogram]) -> Result<(Matrix<f64>, Vec<Matrix<f64>>)> {
    let Some(first) = spectrograms.first() else {
        return Err(domain!("at least one training spectrogram is required"));
    };
    let (rows, cols) = first.power().shape();
    let mut images = Vec::with_capacity(spectrograms.len());
    for s in spectrograms {
        if s.power().shape() != (rows, cols) {
            return Err(structural!(
                "training spectrograms differ in shape: {:?} vs {:?}",
                s.power().shape(),
                (rows, cols)
            ));
        }
        images.push(to_db(s.power())?);
    }
    let mut mean = Matrix::zeros(rows, cols);
    for im in &images {
        for (m, v) in mean.as_mut_slice().iter_mut().zip(im.as_slice()) {
            *m += v;
        }
    }
    let n = images.len() as f64;
    for m in mean.as_mut_slice() {
        *m /= n;
    }
    for im in &mut images {
        for (v, m) in im.as_mut_slice().iter_mut().zip(mean.as_slice()) {
            *v -= m;
        }
    }
    Ok((mean, images))
}

/// Fits the subspace for one look angle.
pub fn fit_angle(spectrograms: &[&Spectrogram], k: usize) -> Result<PcaModel> {
    let (mean, images) = center_images(spectrograms)?;
    let t = mean.cols();
    if k == 0 || k > t {
        return Err(domain!("K = {k} outside [1, {t}]"));
    }
    let cov = image_covariance(&images)?;
    let eig = SymmetricEigen::new(&cov, EIGEN_TOLERANCE)?;
    let basis = Matrix::from_fn(t, k, |r, c| eig.vectors[(r, c)]);
    let eigenvalues = eig.values[..k].to_vec();
    PcaModel::new(mean, basis, eigenvalues, spectrograms[0].look_angle_deg())
}

/// Independent subspaces for the two look angles of every training pair.
pub fn fit(training: &[(Spectrogram, Spectrogram)], k: usize) -> Result<(PcaModel, PcaModel)> {
    if training.is_empty() {
        return Err(domain!("at least one training example is required"));
    }
    let first: Vec<&Spectrogram> = training.iter().map(|(a, _)| a).collect();
    let second: Vec<&Spectrogram> = training.iter().map(|(_, b)| b).collect();
    Ok((fit_angle(&first, k)?, fit_angle(&second, k)?))
}

/// `normalize(spec, mean) · basis`, an `F × K` matrix.
pub fn project(spec: &Spectrogram, model: &PcaModel) -> Result<Matrix<f64>> {
    normalize(spec, &model.mean_image)?.matmul(&model.basis)
}

/// `projection · basisᵀ`, back in the centered dB domain.
pub fn reconstruct(projection: &Matrix<f64>, model: &PcaModel) -> Result<Matrix<f64>> {
    projection.matmul(&model.basis.transpose())
}

/// Classifier input: two vectorized projections, first beam first.
#[derive(Clone, Debug, PartialEq)]
pub struct FusedFeature {
    values: Vec<f64>,
    label: Option<Label>,
}

impl FusedFeature {
    pub fn new(values: Vec<f64>, label: Option<Label>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain!("feature values must be finite"));
        }
        Ok(Self { values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Option<Label> {
        self.label
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Column-major vectorization of both projections, `a` first.
pub fn fuse(a: &Matrix<f64>, b: &Matrix<f64>) -> Result<FusedFeature> {
    if a.shape() != b.shape() {
        return Err(structural!("cannot fuse {:?} with {:?}", a.shape(), b.shape()));
    }
    let mut values = a.vectorize_columns();
    values.extend(b.vectorize_columns());
    FusedFeature::new(values, None)
}

/// Projects both spectrograms of an example and fuses them.
pub fn extract(
    pair: (&Spectrogram, &Spectrogram),
    models: (&PcaModel, &PcaModel),
    label: Option<Label>,
) -> Result<FusedFeature> {
    let a = project(pair.0, models.0)?;
    let b = project(pair.1, models.1)?;
    let mut feature = fuse(&a, &b)?;
    feature.label = label;
    Ok(feature)
}
