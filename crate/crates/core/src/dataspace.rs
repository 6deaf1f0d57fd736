//! Domain types and dataset plumbing: targets, parameter bounds,
//! replicate-aware measurement storage, standardization, initial designs,
//! and the resolution-based proximity filter.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target outcome vector with per-component acceptance half-widths.
///
/// The acceptance box is `[target_j - halfwidth_j, target_j + halfwidth_j]`
/// per component, closed on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub target: Vec<f64>,
    pub halfwidths: Vec<f64>,
}

impl TargetSpec {
    pub fn new(target: Vec<f64>, halfwidths: Vec<f64>) -> Result<Self> {
        if target.is_empty() || target.len() != halfwidths.len() {
            return Err(Error::DimensionMismatch(format!(
                "target has {} components, halfwidths {}",
                target.len(),
                halfwidths.len()
            )));
        }
        if halfwidths.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::InvalidArgument(
                "acceptance halfwidths must be strictly positive".into(),
            ));
        }
        Ok(Self { target, halfwidths })
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    /// Whether a mean outcome lies inside the (closed) acceptance box.
    pub fn contains(&self, mean: &[f64]) -> bool {
        mean.len() == self.dim()
            && mean
                .iter()
                .zip(&self.target)
                .zip(&self.halfwidths)
                .all(|((m, t), h)| (m - t).abs() <= *h)
    }

    /// Euclidean distance of an outcome vector to the target.
    pub fn distance(&self, outcome: &[f64]) -> f64 {
        outcome
            .iter()
            .zip(&self.target)
            .map(|(o, t)| (o - t) * (o - t))
            .sum::<f64>()
            .sqrt()
    }
}

/// Box bounds for the controllable parameters, with optional smallest
/// distinguishable units per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: Option<Vec<f64>>,
}

impl ParameterSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "lower has {} components, upper {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidArgument(
                "each lower bound must be strictly below its upper bound".into(),
            ));
        }
        Ok(Self {
            lower,
            upper,
            resolution: None,
        })
    }

    /// Symmetric box `[-half, half]^dim`.
    pub fn symmetric(dim: usize, half: f64) -> Self {
        Self {
            lower: vec![-half; dim],
            upper: vec![half; dim],
            resolution: None,
        }
    }

    pub fn with_resolution(mut self, resolution: Vec<f64>) -> Result<Self> {
        if resolution.len() != self.dim() {
            return Err(Error::DimensionMismatch(
                "resolution length differs from bounds".into(),
            ));
        }
        for (i, r) in resolution.iter().enumerate() {
            if !(*r > 0.0) || *r > self.upper[i] - self.lower[i] {
                return Err(Error::InvalidArgument(format!(
                    "resolution[{i}] must be in (0, upper-lower]"
                )));
            }
        }
        self.resolution = Some(resolution);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| *x >= *l && *x <= *u)
    }

    pub fn clamp(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(x, (l, u))| x.max(*l).min(*u))
            .collect()
    }
}

/// Where a suggested evaluation point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Initial experimental design.
    Initial,
    /// Root of a fitted level polynomial.
    Root,
    /// Space-filling maximin fallback.
    Fallback,
    /// Generated by a baseline search (evolutionary or random).
    Search,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::Initial => "initial",
            Provenance::Root => "root",
            Provenance::Fallback => "fallback",
            Provenance::Search => "search",
        };
        f.write_str(s)
    }
}

/// One suggested parameter vector. Replicate measurements share the point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub id: u64,
    pub predictors: Vec<f64>,
    /// Batch index: 0 for the initial design, then the iteration number.
    pub batch: u32,
    pub provenance: Provenance,
}

/// One measured outcome vector at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub point_id: u64,
    pub replicate: u32,
    pub descriptors: Vec<f64>,
}

/// Replicate-aware store of `(p, d)` observations.
///
/// Model fitting treats every measurement as its own observation, so a
/// point measured `l` times contributes `l` rows with the same predictors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    predictor_dim: usize,
    descriptor_dim: usize,
    points: Vec<EvalPoint>,
    measurements: Vec<Measurement>,
}

impl Dataset {
    pub fn new(predictor_dim: usize, descriptor_dim: usize) -> Self {
        Self {
            predictor_dim,
            descriptor_dim,
            points: Vec::new(),
            measurements: Vec::new(),
        }
    }

    pub fn predictor_dim(&self) -> usize {
        self.predictor_dim
    }

    pub fn descriptor_dim(&self) -> usize {
        self.descriptor_dim
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.points
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// Total number of measurements (observations for model fitting).
    pub fn n_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn point(&self, id: u64) -> Option<&EvalPoint> {
        self.points.iter().find(|p| p.id == id)
    }

    pub fn next_point_id(&self) -> u64 {
        self.points.iter().map(|p| p.id + 1).max().unwrap_or(0)
    }

    pub fn add_point(
        &mut self,
        predictors: Vec<f64>,
        batch: u32,
        provenance: Provenance,
        space: &ParameterSpace,
    ) -> Result<u64> {
        if predictors.len() != self.predictor_dim {
            return Err(Error::DimensionMismatch(format!(
                "point has {} predictors, dataset expects {}",
                predictors.len(),
                self.predictor_dim
            )));
        }
        if !space.contains(&predictors) {
            return Err(Error::InvalidArgument(format!(
                "point {predictors:?} lies outside the parameter bounds"
            )));
        }
        let id = self.next_point_id();
        self.points.push(EvalPoint {
            id,
            predictors,
            batch,
            provenance,
        });
        Ok(id)
    }

    /// Append one replicate measurement; the replicate index is assigned
    /// as the current replicate count at that point.
    pub fn add_measurement(&mut self, point_id: u64, descriptors: Vec<f64>) -> Result<u32> {
        if self.point(point_id).is_none() {
            return Err(Error::InvalidArgument(format!(
                "measurement references unknown point id {point_id}"
            )));
        }
        if descriptors.len() != self.descriptor_dim {
            return Err(Error::DimensionMismatch(format!(
                "measurement has {} descriptors, dataset expects {}",
                descriptors.len(),
                self.descriptor_dim
            )));
        }
        let replicate = self.replicate_count(point_id) as u32;
        self.measurements.push(Measurement {
            point_id,
            replicate,
            descriptors,
        });
        Ok(replicate)
    }

    pub fn replicate_count(&self, point_id: u64) -> usize {
        self.measurements
            .iter()
            .filter(|m| m.point_id == point_id)
            .count()
    }

    /// Mean descriptor vector over the replicates of a point.
    pub fn mean_descriptors(&self, point_id: u64) -> Option<Vec<f64>> {
        let mut acc = vec![0.0; self.descriptor_dim];
        let mut count = 0usize;
        for m in self.measurements.iter().filter(|m| m.point_id == point_id) {
            for (a, d) in acc.iter_mut().zip(&m.descriptors) {
                *a += d;
            }
            count += 1;
        }
        if count == 0 {
            return None;
        }
        for a in &mut acc {
            *a /= count as f64;
        }
        Some(acc)
    }

    /// Iterate measurement rows paired with the owning point.
    pub fn rows(&self) -> impl Iterator<Item = (&EvalPoint, &Measurement)> {
        self.measurements.iter().map(move |m| {
            let point = self
                .point(m.point_id)
                .expect("measurement references existing point");
            (point, m)
        })
    }

    /// Measurement-row predictor matrix (n x P).
    pub fn predictor_matrix(&self) -> DMatrix<f64> {
        let n = self.n_measurements();
        DMatrix::from_fn(n, self.predictor_dim, |i, j| {
            let m = &self.measurements[i];
            self.point(m.point_id).unwrap().predictors[j]
        })
    }

    /// Measurement-row descriptor matrix (n x D).
    pub fn descriptor_matrix(&self) -> DMatrix<f64> {
        let n = self.n_measurements();
        DMatrix::from_fn(n, self.descriptor_dim, |i, j| {
            self.measurements[i].descriptors[j]
        })
    }

    /// Write the dataset in the exchange format: header
    /// `p1..pP,d1..dD,point_id,replicate`, one row per measurement.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "{}", dataset_header(self.predictor_dim, self.descriptor_dim))?;
        for (point, m) in self.rows() {
            let mut fields = Vec::with_capacity(self.predictor_dim + self.descriptor_dim + 2);
            for v in &point.predictors {
                fields.push(format_float(*v));
            }
            for v in &m.descriptors {
                fields.push(format_float(*v));
            }
            fields.push(m.point_id.to_string());
            fields.push(m.replicate.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// Parse the exchange format. Dimensions are inferred from the header.
    pub fn read_csv<R: BufRead>(reader: R, space: &ParameterSpace) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::SchemaMismatch("empty dataset file".into()))??;
        let (pdim, ddim) = parse_dataset_header(&header)?;
        let mut ds = Dataset::new(pdim, ddim);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = parse_dataset_row(&line, pdim, ddim, lineno + 2)?;
            ds.ingest_row(row, space, lineno + 2)?;
        }
        Ok(ds)
    }

    /// Insert one parsed measurement row, creating its point on first sight.
    pub(crate) fn ingest_row(
        &mut self,
        row: DatasetRow,
        space: &ParameterSpace,
        lineno: usize,
    ) -> Result<()> {
        match self.point(row.point_id) {
            Some(existing) => {
                let same = existing
                    .predictors
                    .iter()
                    .zip(&row.predictors)
                    .all(|(a, b)| a == b);
                if !same {
                    return Err(Error::SchemaMismatch(format!(
                        "line {lineno}: point id {} re-used with different predictors",
                        row.point_id
                    )));
                }
            }
            None => {
                if !space.contains(&row.predictors) {
                    return Err(Error::SchemaMismatch(format!(
                        "line {lineno}: predictors outside the parameter bounds"
                    )));
                }
                self.points.push(EvalPoint {
                    id: row.point_id,
                    predictors: row.predictors.clone(),
                    batch: 0,
                    provenance: Provenance::Initial,
                });
            }
        }
        self.measurements.push(Measurement {
            point_id: row.point_id,
            replicate: row.replicate,
            descriptors: row.descriptors,
        });
        Ok(())
    }
}

pub(crate) struct DatasetRow {
    pub predictors: Vec<f64>,
    pub descriptors: Vec<f64>,
    pub point_id: u64,
    pub replicate: u32,
}

pub(crate) fn dataset_header(pdim: usize, ddim: usize) -> String {
    let mut h = String::new();
    for i in 1..=pdim {
        h.push_str(&format!("p{i},"));
    }
    for j in 1..=ddim {
        h.push_str(&format!("d{j},"));
    }
    h.push_str("point_id,replicate\n");
    h
}

pub(crate) fn parse_dataset_header(header: &str) -> Result<(usize, usize)> {
    let cols: Vec<&str> = header.trim().split(',').collect();
    let pdim = cols.iter().take_while(|c| c.starts_with('p')).count();
    let ddim = cols
        .iter()
        .skip(pdim)
        .take_while(|c| c.starts_with('d'))
        .count();
    let expect: Vec<String> = (1..=pdim)
        .map(|i| format!("p{i}"))
        .chain((1..=ddim).map(|j| format!("d{j}")))
        .chain(["point_id".to_string(), "replicate".to_string()])
        .collect();
    if pdim == 0 || ddim == 0 || cols != expect.iter().map(|s| s.as_str()).collect::<Vec<_>>() {
        return Err(Error::SchemaMismatch(format!(
            "dataset header must be `p1..pP,d1..dD,point_id,replicate`, got `{}`",
            header.trim()
        )));
    }
    Ok((pdim, ddim))
}

pub(crate) fn parse_dataset_row(
    line: &str,
    pdim: usize,
    ddim: usize,
    lineno: usize,
) -> Result<DatasetRow> {
    let fields: Vec<&str> = line.trim().split(',').collect();
    if fields.len() != pdim + ddim + 2 {
        return Err(Error::SchemaMismatch(format!(
            "line {lineno}: expected {} fields, got {}",
            pdim + ddim + 2,
            fields.len()
        )));
    }
    let parse_f = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| {
            Error::SchemaMismatch(format!("line {lineno}: bad {what} value `{s}`"))
        })
    };
    let predictors = fields[..pdim]
        .iter()
        .map(|s| parse_f(s, "predictor"))
        .collect::<Result<Vec<_>>>()?;
    let descriptors = fields[pdim..pdim + ddim]
        .iter()
        .map(|s| parse_f(s, "descriptor"))
        .collect::<Result<Vec<_>>>()?;
    let point_id = fields[pdim + ddim].parse::<u64>().map_err(|_| {
        Error::SchemaMismatch(format!(
            "line {lineno}: bad point_id `{}`",
            fields[pdim + ddim]
        ))
    })?;
    let replicate = fields[pdim + ddim + 1].parse::<u32>().map_err(|_| {
        Error::SchemaMismatch(format!(
            "line {lineno}: bad replicate `{}`",
            fields[pdim + ddim + 1]
        ))
    })?;
    Ok(DatasetRow {
        predictors,
        descriptors,
        point_id,
        replicate,
    })
}

/// Shortest round-trip decimal form, `.` separator.
pub(crate) fn format_float(v: f64) -> String {
    format!("{v}")
}

/// Column means and standard deviations used to map between raw and
/// standardized coordinates. Sample standard deviations use the n-1
/// denominator; a constant column gets sd exactly 0 and is flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub predictor_means: Vec<f64>,
    pub predictor_sds: Vec<f64>,
    pub descriptor_sds: Vec<f64>,
    pub degenerate_predictors: Vec<bool>,
}

impl StandardizationStats {
    /// Map a raw predictor vector into standardized coordinates.
    /// Degenerate (constant) columns map to 0.
    pub fn standardize_predictor(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .enumerate()
            .map(|(i, x)| {
                if self.degenerate_predictors[i] {
                    0.0
                } else {
                    (x - self.predictor_means[i]) / self.predictor_sds[i]
                }
            })
            .collect()
    }

    /// Inverse map: standardized coordinates back to raw predictors.
    pub fn destandardize_predictor(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .enumerate()
            .map(|(i, v)| v * self.predictor_sds[i] + self.predictor_means[i])
            .collect()
    }
}

fn column_mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if values.iter().all(|v| *v == values[0]) {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Standardize a dataset: predictors become mean-centered, sd-scaled
/// columns; descriptors become target-centered, sd-scaled columns
/// `(d - d*)/sd`. The descriptor sd is taken about the column mean, so
/// the scale does not depend on the target choice.
///
/// Returns the stats plus the standardized predictor matrix (n x P) and
/// the target-centered scaled descriptor matrix (n x D).
pub fn standardize(
    dataset: &Dataset,
    target: &TargetSpec,
) -> Result<(StandardizationStats, DMatrix<f64>, DMatrix<f64>)> {
    let n = dataset.n_measurements();
    if n < 2 {
        return Err(Error::InsufficientData {
            context: "standardization",
            have: n,
            need: 2,
        });
    }
    if target.dim() != dataset.descriptor_dim() {
        return Err(Error::DimensionMismatch(
            "target dimension differs from descriptor dimension".into(),
        ));
    }
    let pmat = dataset.predictor_matrix();
    let dmat = dataset.descriptor_matrix();

    let pdim = dataset.predictor_dim();
    let ddim = dataset.descriptor_dim();
    let mut predictor_means = Vec::with_capacity(pdim);
    let mut predictor_sds = Vec::with_capacity(pdim);
    let mut degenerate = Vec::with_capacity(pdim);
    for j in 0..pdim {
        let col: Vec<f64> = pmat.column(j).iter().copied().collect();
        let (mean, sd) = column_mean_sd(&col);
        degenerate.push(sd == 0.0);
        predictor_means.push(mean);
        predictor_sds.push(sd);
    }
    let mut descriptor_sds = Vec::with_capacity(ddim);
    for j in 0..ddim {
        let col: Vec<f64> = dmat.column(j).iter().copied().collect();
        let (_, sd) = column_mean_sd(&col);
        if sd == 0.0 {
            return Err(Error::DegenerateColumn { column: j });
        }
        descriptor_sds.push(sd);
    }

    let stats = StandardizationStats {
        predictor_means,
        predictor_sds,
        descriptor_sds,
        degenerate_predictors: degenerate,
    };

    let p_std = DMatrix::from_fn(n, pdim, |i, j| {
        if stats.degenerate_predictors[j] {
            0.0
        } else {
            (pmat[(i, j)] - stats.predictor_means[j]) / stats.predictor_sds[j]
        }
    });
    let z = DMatrix::from_fn(n, ddim, |i, j| {
        (dmat[(i, j)] - target.target[j]) / stats.descriptor_sds[j]
    });
    Ok((stats, p_std, z))
}

/// Supported initial experimental designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    LatinHypercube,
    UniformRandom,
}

/// Generate `k` points inside the bounds. Latin hypercube places exactly
/// one coordinate per axis stratum of width `(upper-lower)/k` in every
/// dimension; uniform draws are i.i.d. Deterministic for a given seed.
pub fn initial_design(
    kind: DesignKind,
    k: usize,
    space: &ParameterSpace,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if k < 2 {
        return Err(Error::InsufficientData {
            context: "initial design",
            have: k,
            need: 2,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = space.dim();
    let mut points = vec![vec![0.0; dim]; k];
    match kind {
        DesignKind::UniformRandom => {
            for p in points.iter_mut() {
                for (j, x) in p.iter_mut().enumerate() {
                    *x = rng.random_range(space.lower[j]..space.upper[j]);
                }
            }
        }
        DesignKind::LatinHypercube => {
            for j in 0..dim {
                let width = (space.upper[j] - space.lower[j]) / k as f64;
                let mut strata: Vec<usize> = (0..k).collect();
                // Fisher-Yates with the shared stream
                for i in (1..k).rev() {
                    let pick = rng.random_range(0..=i);
                    strata.swap(i, pick);
                }
                for (i, p) in points.iter_mut().enumerate() {
                    let u: f64 = rng.random_range(0.0..1.0);
                    p[j] = space.lower[j] + (strata[i] as f64 + u) * width;
                }
            }
        }
    }
    Ok(points)
}

/// Whether the candidate is indistinguishable from some observed point:
/// true iff every coordinate gap is strictly below that coordinate's
/// resolution. Always false when no resolution is configured.
pub fn proximity_conflict(candidate: &[f64], dataset: &Dataset, space: &ParameterSpace) -> bool {
    let Some(resolution) = &space.resolution else {
        return false;
    };
    dataset.points().iter().any(|point| {
        candidate
            .iter()
            .zip(&point.predictors)
            .zip(resolution)
            .all(|((c, p), delta)| (c - p).abs() < *delta)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn space2() -> ParameterSpace {
        ParameterSpace::symmetric(2, 5.0)
    }

    fn dataset_from(points: &[(f64, f64)], descriptors: &[Vec<f64>], ddim: usize) -> Dataset {
        let space = space2();
        let mut ds = Dataset::new(2, ddim);
        for ((x, y), d) in points.iter().zip(descriptors) {
            let id = ds
                .add_point(vec![*x, *y], 0, Provenance::Initial, &space)
                .unwrap();
            ds.add_measurement(id, d.clone()).unwrap();
        }
        ds
    }

    #[test]
    fn descriptor_transform_centers_target() {
        // symmetric data, mean 0, sample sd 2 in the first column
        let ds = dataset_from(
            &[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)],
            &[vec![2.0, 0.5], vec![-2.0, 0.0], vec![0.0, 1.0]],
            2,
        );
        let target = TargetSpec::new(vec![0.0, 0.0], vec![0.1, 0.1]).unwrap();
        let (stats, _, z) = standardize(&ds, &target).unwrap();
        assert_relative_eq!(stats.descriptor_sds[0], 2.0);
        assert_eq!(z[(0, 0)], 1.0);
        assert_eq!(z[(1, 0)], -1.0);
        assert_eq!(z[(2, 0)], 0.0);
    }

    #[test]
    fn constant_descriptor_column_errors() {
        let ds = dataset_from(
            &[(0.0, 0.0), (1.0, 1.0)],
            &[vec![3.0], vec![3.0]],
            1,
        );
        let target = TargetSpec::new(vec![3.0], vec![0.1]).unwrap();
        match standardize(&ds, &target) {
            Err(Error::DegenerateColumn { column: 0 }) => {}
            other => panic!("expected DegenerateColumn, got {other:?}"),
        }
    }

    #[test]
    fn predictor_standardization_uses_sample_sd() {
        let ds = dataset_from(
            &[(1.0, 1.0), (3.0, 3.0)],
            &[vec![0.0], vec![1.0]],
            1,
        );
        let target = TargetSpec::new(vec![0.5], vec![0.1]).unwrap();
        let (stats, p_std, _) = standardize(&ds, &target).unwrap();
        let s = 2.0f64.sqrt();
        assert_relative_eq!(stats.predictor_means[0], 2.0);
        assert_relative_eq!(stats.predictor_sds[0], s);
        assert_relative_eq!(p_std[(0, 0)], -1.0 / s, max_relative = 1e-12);
        assert_relative_eq!(p_std[(1, 1)], 1.0 / s, max_relative = 1e-12);
    }

    #[test]
    fn standardize_needs_two_rows() {
        let ds = dataset_from(&[(0.0, 0.0)], &[vec![1.0]], 1);
        let target = TargetSpec::new(vec![0.0], vec![0.1]).unwrap();
        assert!(matches!(
            standardize(&ds, &target),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn target_maps_to_zero() {
        let ds = dataset_from(
            &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
            &[vec![1.5, -0.5], vec![2.5, 0.5], vec![3.5, 1.5]],
            2,
        );
        let target = TargetSpec::new(vec![2.5, 0.5], vec![0.1, 0.1]).unwrap();
        let (stats, _, z) = standardize(&ds, &target).unwrap();
        // row 1 sits exactly at the target
        assert_eq!(z[(1, 0)], 0.0);
        assert_eq!(z[(1, 1)], 0.0);
        let _ = stats;
    }

    #[test]
    fn acceptance_box_is_closed() {
        let t = TargetSpec::new(vec![1.0, 2.0], vec![0.5, 0.25]).unwrap();
        assert!(t.contains(&[1.0, 2.0]));
        assert!(t.contains(&[1.5, 2.0])); // boundary hit counts
        assert!(!t.contains(&[2.0, 2.0]));
    }

    #[test]
    fn latin_hypercube_stratifies_each_axis() {
        let space = ParameterSpace::new(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
        let pts = initial_design(DesignKind::LatinHypercube, 4, &space, 7).unwrap();
        for j in 0..2 {
            let mut strata: Vec<usize> = pts
                .iter()
                .map(|p| ((p[j] - space.lower[j]) / 1.0).floor().min(3.0) as usize)
                .collect();
            strata.sort_unstable();
            assert_eq!(strata, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn designs_are_deterministic() {
        let space = ParameterSpace::new(vec![-4.0, -4.0], vec![4.0, 4.0]).unwrap();
        let a = initial_design(DesignKind::UniformRandom, 4, &space, 99).unwrap();
        let b = initial_design(DesignKind::UniformRandom, 4, &space, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| space.contains(p)));
    }

    #[test]
    fn design_of_one_point_is_rejected() {
        let space = space2();
        assert!(matches!(
            initial_design(DesignKind::LatinHypercube, 1, &space, 0),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn proximity_requires_all_coordinates_close() {
        let mut space = space2();
        space.resolution = Some(vec![0.1, 0.1]);
        let ds = dataset_from(&[(1.0, 2.0)], &[vec![0.0]], 1);
        assert!(proximity_conflict(&[1.05, 2.05], &ds, &space));
        assert!(!proximity_conflict(&[1.05, 2.5], &ds, &space));
        let no_res = space2();
        assert!(!proximity_conflict(&[1.05, 2.05], &ds, &no_res));
    }

    #[test]
    fn csv_round_trip() {
        let ds = dataset_from(
            &[(0.25, -1.5), (2.0, 3.0)],
            &[vec![1.0, -0.125], vec![0.5, 2.0]],
            2,
        );
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p1,p2,d1,d2,point_id,replicate\n"));
        let back = Dataset::read_csv(std::io::Cursor::new(&buf), &space2()).unwrap();
        assert_eq!(back.n_measurements(), 2);
        assert_eq!(back.point(0).unwrap().predictors, vec![0.25, -1.5]);
        let mut buf2 = Vec::new();
        back.write_csv(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn bad_header_is_schema_mismatch() {
        let text = "a,b,c\n1,2,3\n";
        match Dataset::read_csv(std::io::Cursor::new(text.as_bytes()), &space2()) {
            Err(Error::SchemaMismatch(_)) => {}
            other => panic!("expected SchemaMismatch, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn lhs_marginals_cover_all_strata(k in 2usize..12, seed in 0u64..1000) {
            let space = ParameterSpace::new(vec![-3.0, 1.0], vec![5.0, 2.0]).unwrap();
            let pts = initial_design(DesignKind::LatinHypercube, k, &space, seed).unwrap();
            for j in 0..2 {
                let width = (space.upper[j] - space.lower[j]) / k as f64;
                let mut strata: Vec<usize> = pts
                    .iter()
                    .map(|p| (((p[j] - space.lower[j]) / width).floor() as usize).min(k - 1))
                    .collect();
                strata.sort_unstable();
                prop_assert_eq!(strata, (0..k).collect::<Vec<_>>());
            }
        }

        #[test]
        fn proximity_monotone_in_resolution(
            cand in prop::array::uniform2(-4.0f64..4.0),
            point in prop::array::uniform2(-4.0f64..4.0),
            delta in prop::array::uniform2(0.01f64..2.0),
            grow in 1.0f64..3.0,
        ) {
            let mut space = space2();
            let ds = dataset_from(&[(point[0], point[1])], &[vec![0.0]], 1);
            space.resolution = Some(delta.to_vec());
            let small = proximity_conflict(&cand, &ds, &space);
            space.resolution = Some(delta.iter().map(|d| d * grow).collect());
            let large = proximity_conflict(&cand, &ds, &space);
            // enlarging any resolution never turns a conflict into none
            prop_assert!(!small || large);
        }

        #[test]
        fn standardize_destandardize_is_identity(
            xs in prop::collection::vec(prop::array::uniform2(-4.9f64..4.9), 3..10),
        ) {
            let space = space2();
            let mut ds = Dataset::new(2, 1);
            for (i, p) in xs.iter().enumerate() {
                let id = ds.add_point(p.to_vec(), 0, Provenance::Initial, &space).unwrap();
                ds.add_measurement(id, vec![i as f64]).unwrap();
            }
            let target = TargetSpec::new(vec![0.0], vec![0.1]).unwrap();
            let (stats, _, _) = standardize(&ds, &target).unwrap();
            for p in &xs {
                let z = stats.standardize_predictor(p);
                let back = stats.destandardize_predictor(&z);
                for (a, b) in p.iter().zip(&back) {
                    let scale = a.abs().max(1.0);
                    prop_assert!((a - b).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}
