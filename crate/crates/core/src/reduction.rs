//! Dimension reduction: descriptor rotation around the target, partial
//! least squares compression of the predictors, component-count rules,
//! and the affine back-map into the original parameter box.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataspace::{ParameterSpace, StandardizationStats};
use crate::error::{Error, Result};

/// Descriptor rotation fitted on target-centered, scaled descriptors.
///
/// `loadings` is orthonormal with columns ordered by non-increasing
/// sum-of-squared projections of the training rows; scores are `z W`.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub loadings: DMatrix<f64>,
    /// Sum-of-squared-projection spectrum, one entry per column.
    pub eigenvalues: Vec<f64>,
    pub descriptor_sds: Vec<f64>,
    pub target: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.loadings.nrows()
    }

    /// Score vector of one standardized descriptor row.
    pub fn score_row(&self, z_row: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|c| {
                z_row
                    .iter()
                    .zip(self.loadings.column(c).iter())
                    .map(|(z, w)| z * w)
                    .sum()
            })
            .collect()
    }

    /// First score coordinate: the scalar response the level regressions
    /// model. For one-dimensional descriptors this is the standardized
    /// target-centered descriptor itself.
    pub fn pseudo_descriptor(&self, z_row: &[f64]) -> f64 {
        z_row
            .iter()
            .zip(self.loadings.column(0).iter())
            .map(|(z, w)| z * w)
            .sum()
    }
}

/// Principal directions of the *uncentered* second-moment matrix `Z'Z`.
/// The data are deliberately not re-centered: the target sits at the
/// origin, so the first column maximizes squared deviation from the
/// target rather than variance.
///
/// Each loading column is flipped so its largest-magnitude entry is
/// positive, making the decomposition deterministic.
pub fn pca_target_centered(
    z: &DMatrix<f64>,
    descriptor_sds: &[f64],
    target: &[f64],
) -> Result<(PcaModel, DMatrix<f64>)> {
    let n = z.nrows();
    let d = z.ncols();
    if n < 2 {
        return Err(Error::InsufficientData {
            context: "descriptor rotation",
            have: n,
            need: 2,
        });
    }
    let second_moment = z.transpose() * z;
    let eig = second_moment.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let mut loadings = DMatrix::zeros(d, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for (c, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let lead = col
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..d {
            loadings[(r, c)] = sign * col[r];
        }
        eigenvalues.push(eig.eigenvalues[src].max(0.0));
    }
    let scores = z * &loadings;
    let model = PcaModel {
        loadings,
        eigenvalues,
        descriptor_sds: descriptor_sds.to_vec(),
        target: target.to_vec(),
    };
    Ok((model, scores))
}

/// Predictor compression fitted against the pseudo descriptor.
///
/// `back_transform` is the loadings matrix `V` with `P_std = scores * V`
/// up to the deflation residual; the identity is exact when the component
/// count equals the predictor rank.
#[derive(Debug, Clone)]
pub struct PlsModel {
    /// Unit weight vectors, one row per component.
    pub weight_vectors: DMatrix<f64>,
    /// Score columns, one per component (n x d).
    pub scores: DMatrix<f64>,
    /// Loading rows mapping score prefixes back to standardized
    /// predictors (d x P).
    pub back_transform: DMatrix<f64>,
    /// True when extraction stopped early because no predictor/response
    /// covariance was left.
    pub truncated: bool,
}

impl PlsModel {
    pub fn component_count(&self) -> usize {
        self.back_transform.nrows()
    }

    pub fn predictor_dim(&self) -> usize {
        self.back_transform.ncols()
    }
}

/// Classical single-response partial least squares with deflation.
///
/// Per component: weight proportional to `E'f`, score `t = E w`,
/// x-loading `p = E't/(t't)`, then rank-one deflation of both blocks.
/// Stops early (flagged) when the residual covariance vanishes; an
/// immediate vanish is an error because no component can be built.
pub fn pls1_fit(
    predictors: &DMatrix<f64>,
    response: &[f64],
    components: usize,
) -> Result<PlsModel> {
    let n = predictors.nrows();
    let p = predictors.ncols();
    if n != response.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictor rows but {} response values",
            n,
            response.len()
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData {
            context: "partial least squares",
            have: n,
            need: 2,
        });
    }
    if components < 1 || components > p {
        return Err(Error::InvalidArgument(format!(
            "component count {components} outside 1..={p}"
        )));
    }
    if predictors.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidArgument(
            "predictor block is identically zero".into(),
        ));
    }

    let mut residual_x = predictors.clone();
    let mut residual_y = DVector::from_column_slice(response);
    let mut weights: Vec<DVector<f64>> = Vec::new();
    let mut scores: Vec<DVector<f64>> = Vec::new();
    let mut loadings: Vec<DVector<f64>> = Vec::new();
    let mut truncated = false;

    for a in 0..components {
        let cov = residual_x.transpose() * &residual_y;
        let threshold = 1e-12 * residual_x.norm() * residual_y.norm();
        if cov.norm() <= threshold {
            if a == 0 {
                return Err(Error::ZeroWeight { component: 1 });
            }
            truncated = true;
            break;
        }
        let w = &cov / cov.norm();
        let t = &residual_x * &w;
        let tt = t.dot(&t);
        if tt <= f64::MIN_POSITIVE {
            if a == 0 {
                return Err(Error::ZeroWeight { component: 1 });
            }
            truncated = true;
            break;
        }
        let x_loading = residual_x.transpose() * &t / tt;
        residual_x -= &t * x_loading.transpose();
        let y_loading = residual_y.dot(&t) / tt;
        residual_y -= &t * y_loading;
        weights.push(w);
        scores.push(t);
        loadings.push(x_loading);
    }

    let built = weights.len();
    let weight_vectors = DMatrix::from_fn(built, p, |r, c| weights[r][c]);
    let score_matrix = DMatrix::from_fn(n, built, |r, c| scores[c][r]);
    let back = DMatrix::from_fn(built, p, |r, c| loadings[r][c]);
    Ok(PlsModel {
        weight_vectors,
        scores: score_matrix,
        back_transform: back,
        truncated,
    })
}

/// Rule for choosing how many pseudo-predictor components to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentPolicy {
    Fixed(usize),
    /// Keep components whose spectrum entry exceeds the spectrum mean
    /// (at least one).
    Kaiser,
}

pub fn select_component_count(spectrum: &[f64], policy: ComponentPolicy, max: usize) -> usize {
    debug_assert!(!spectrum.is_empty() && max >= 1);
    match policy {
        ComponentPolicy::Fixed(d) => d.clamp(1, max),
        ComponentPolicy::Kaiser => {
            let mean = spectrum.iter().sum::<f64>() / spectrum.len() as f64;
            let count = spectrum.iter().filter(|v| **v > mean).count();
            count.clamp(1, max)
        }
    }
}

/// Map a pseudo-predictor prefix back to the original parameter space:
/// multiply by the leading rows of `V`, then destandardize.
pub fn back_transform(
    prefix: &[f64],
    pls: &PlsModel,
    stats: &StandardizationStats,
) -> Vec<f64> {
    let p = pls.predictor_dim();
    let mut z = vec![0.0; p];
    for (level, value) in prefix.iter().enumerate() {
        for (i, zi) in z.iter_mut().enumerate() {
            *zi += value * pls.back_transform[(level, i)];
        }
    }
    stats.destandardize_predictor(&z)
}

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

// Guard for coordinates the loading row leaves completely unconstrained.
const UNBOUNDED_GUARD: f64 = 1e12;

/// Feasible values of the next pseudo-predictor coordinate: those whose
/// back-transform (given the fixed prefix) stays inside the parameter
/// bounds. The map is affine in the free coordinate, so the set is an
/// intersection of half-lines; `None` means it is empty.
pub fn feasible_interval(
    prefix: &[f64],
    pls: &PlsModel,
    stats: &StandardizationStats,
    space: &ParameterSpace,
) -> Option<Interval> {
    let level = prefix.len();
    debug_assert!(level < pls.component_count());
    let p = pls.predictor_dim();
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..p {
        let mut offset = 0.0;
        for (a, value) in prefix.iter().enumerate() {
            offset += value * pls.back_transform[(a, i)];
        }
        let base = offset * stats.predictor_sds[i] + stats.predictor_means[i];
        let slope = pls.back_transform[(level, i)] * stats.predictor_sds[i];
        let (l, u) = (space.lower[i], space.upper[i]);
        if slope == 0.0 {
            if base < l || base > u {
                return None;
            }
            continue;
        }
        let a = (l - base) / slope;
        let b = (u - base) / slope;
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
        if lo > hi {
            return None;
        }
    }
    Some(Interval {
        lo: lo.max(-UNBOUNDED_GUARD),
        hi: hi.min(UNBOUNDED_GUARD),
    })
}
