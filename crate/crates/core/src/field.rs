//! Spatial data, polynomial detrending and directional empirical
//! variograms.

use crate::error::{Error, Result};
use crate::transforms::CovarianceModel;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Minimum separation between distinct locations.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Default angular tolerance of directional variograms (22.5°).
pub const DEFAULT_ANGLE_TOL: f64 = std::f64::consts::PI / 8.0;

/// Observations `z(x_i)` at locations in `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialDataset {
    dim: usize,
    locations: Vec<Vec<f64>>,
    values: Vec<f64>,
    trend: Option<Vec<f64>>,
    residuals: Option<Vec<f64>>,
}

impl SpatialDataset {
    /// Validates shapes, finiteness and distinctness of locations.
    pub fn new(locations: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::Empty("dataset has no observations".into()));
        }
        if locations.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: locations.len(), got: values.len() });
        }
        let dim = locations[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter("locations must have at least one coordinate".into()));
        }
        for (i, p) in locations.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) || !values[i].is_finite() {
                return Err(Error::InvalidParameter(format!("row {i} has a non-finite entry")));
            }
        }
        if let Some((i, j)) = find_duplicate(&locations) {
            return Err(Error::DuplicateLocation(i, j));
        }
        Ok(Self { dim, locations, values, trend: None, residuals: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn locations(&self) -> &[Vec<f64>] {
        &self.locations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trend(&self) -> Option<&[f64]> {
        self.trend.as_deref()
    }

    /// Residuals after detrending, or the raw values when no trend was removed.
    pub fn residuals(&self) -> &[f64] {
        self.residuals.as_deref().unwrap_or(&self.values)
    }

    pub fn has_residuals(&self) -> bool {
        self.residuals.is_some()
    }

    /// Subset of rows, keeping trend and residuals aligned.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("subset has no rows".into()));
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= self.len()) {
            return Err(Error::InvalidParameter(format!("row {r} out of range")));
        }
        let pick = |v: &Vec<f64>| rows.iter().map(|&r| v[r]).collect::<Vec<_>>();
        Ok(Self {
            dim: self.dim,
            locations: rows.iter().map(|&r| self.locations[r].clone()).collect(),
            values: pick(&self.values),
            trend: self.trend.as_ref().map(pick),
            residuals: self.residuals.as_ref().map(pick),
        })
    }

    /// Replaces the values; location checks are kept.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: values.len() });
        }
        Ok(Self { values, trend: None, residuals: None, ..self.clone() })
    }

    /// Reads a CSV file with a header row; lines starting with `#` are skipped.
    pub fn load_csv(path: impl AsRef<Path>, x_col: &str, y_col: &str, value_col: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path.as_ref()).map_err(csv_err)?;
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or(Error::Parse { line: 1, msg: format!("missing column '{name}'") })
        };
        let (ix, iy, iv) = (col(x_col)?, col(y_col)?, col(value_col)?);
        let mut locations = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize, name: &str| -> Result<f64> {
                let raw = rec.get(i).ok_or(Error::Parse { line, msg: format!("missing field '{name}'") })?;
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or(Error::Parse { line, msg: format!("'{raw}' in column '{name}' is not a finite number") })
            };
            locations.push(vec![field(ix, x_col)?, field(iy, y_col)?]);
            values.push(field(iv, value_col)?);
        }
        Self::new(locations, values)
    }

    /// Writes `x, y, value` (and `trend, residual` when present).
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim });
        }
        let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
        let mut header = vec!["x", "y", "value"];
        if self.trend.is_some() {
            header.extend(["trend", "residual"]);
        }
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.len() {
            let mut row = vec![
                self.locations[i][0].to_string(),
                self.locations[i][1].to_string(),
                self.values[i].to_string(),
            ];
            if let (Some(t), Some(r)) = (&self.trend, &self.residuals) {
                row.push(t[i].to_string());
                row.push(r[i].to_string());
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Parse { line: e.position().map(|p| p.line() as usize).unwrap_or(0), msg: e.to_string() },
    }
}

/// First pair of locations closer than [`DUPLICATE_TOL`] in every
/// coordinate, by a sweep over the first coordinate.
fn find_duplicate(locations: &[Vec<f64>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..locations.len()).collect();
    order.sort_by(|&a, &b| locations[a][0].total_cmp(&locations[b][0]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if locations[j][0] - locations[i][0] > DUPLICATE_TOL {
                break;
            }
            let close = locations[i].iter().zip(&locations[j]).all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL);
            if close {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Points of an `nx × ny` lattice with the given spacing, row by row
/// (`x` fastest), starting at the origin.
pub fn regular_grid(nx: usize, ny: usize, spacing: f64) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            pts.push(vec![i as f64 * spacing, j as f64 * spacing]);
        }
    }
    pts
}

/// Removes a least-squares polynomial of the given degree in one coordinate.
///
/// The coordinate is centered and scaled to `[-1, 1]` before building the
/// design matrix.
pub fn detrend_polynomial(data: &SpatialDataset, coordinate: usize, degree: usize) -> Result<SpatialDataset> {
    if coordinate >= data.dim() {
        return Err(Error::InvalidParameter(format!("coordinate {coordinate} out of range")));
    }
    if degree > 5 {
        return Err(Error::InvalidParameter(format!("degree {degree} exceeds 5")));
    }
    let n = data.len();
    let p = degree + 1;
    if n <= p {
        return Err(Error::RankDeficient(format!("{n} observations for {p} coefficients")));
    }
    let xs: Vec<f64> = data.locations().iter().map(|l| l[coordinate]).collect();
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let design = DMatrix::from_fn(n, p, |i, k| ((xs[i] - mid) / half).powi(k as i32));
    let y = DVector::from_column_slice(data.values());
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::RankDeficient(format!(
            "design for degree {degree} has singular values down to {smin:e} (max {smax:e})"
        )));
    }
    let coef = svd.solve(&y, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let fitted = &design * coef;
    let trend: Vec<f64> = fitted.iter().cloned().collect();
    let mut residuals: Vec<f64> = data.values().iter().zip(&trend).map(|(v, t)| v - t).collect();
    // remove the rounding-level mean left by the solve
    let mean = residuals.iter().sum::<f64>() / n as f64;
    residuals.iter_mut().for_each(|r| *r -= mean);
    let trend = trend.iter().map(|t| t + mean).collect();
    Ok(SpatialDataset { trend: Some(trend), residuals: Some(residuals), ..data.clone() })
}

/// Binned semivariance estimates along one direction. Only nonempty bins are
/// stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalVariogram {
    pub direction: Vec<f64>,
    pub angle_tolerance: f64,
    pub lag_width: f64,
    pub lag_centers: Vec<f64>,
    pub semivariances: Vec<f64>,
    pub pair_counts: Vec<usize>,
}

impl EmpiricalVariogram {
    pub fn total_pairs(&self) -> usize {
        self.pair_counts.iter().sum()
    }

    /// Lag vector of bin `k`: its center along the direction.
    pub fn lag_vector(&self, k: usize) -> Vec<f64> {
        self.direction.iter().map(|d| d * self.lag_centers[k]).collect()
    }

    /// Writes `lag_center, semivariance, count`.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
        w.write_record(["lag_center", "semivariance", "count"]).map_err(csv_err)?;
        for k in 0..self.lag_centers.len() {
            w.write_record([
                self.lag_centers[k].to_string(),
                self.semivariances[k].to_string(),
                self.pair_counts[k].to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Matheron estimator `γ̂ = Σ (z_i - z_j)² / (2N)` over pairs whose
/// separation lies in `[k·w, (k+1)·w)`, is below `max_lag`, and is within
/// `angle_tol` of `±direction`. An angle tolerance of at least `π/2` keeps
/// every direction.
pub fn empirical_variogram(
    data: &SpatialDataset,
    direction: &[f64],
    angle_tol: f64,
    lag_width: f64,
    max_lag: f64,
) -> Result<EmpiricalVariogram> {
    if data.is_empty() {
        return Err(Error::Empty("no observations".into()));
    }
    if direction.len() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), got: direction.len() });
    }
    if !(lag_width > 0.0) || !(max_lag > 0.0) {
        return Err(Error::InvalidParameter("lag width and maximum lag must be > 0".into()));
    }
    let dn = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(dn > 0.0) {
        return Err(Error::InvalidParameter("direction must be nonzero".into()));
    }
    let dir: Vec<f64> = direction.iter().map(|v| v / dn).collect();
    let cos_tol = if angle_tol >= std::f64::consts::FRAC_PI_2 { -1.0 } else { angle_tol.cos() };
    let nbins = (max_lag / lag_width).ceil() as usize;
    let locs = data.locations();
    let z = data.residuals();
    let n = data.len();

    // per-row partial sums merged in row order for reproducibility
    let rows: Vec<(Vec<f64>, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sums = vec![0.0; nbins];
            let mut counts = vec![0usize; nbins];
            for j in (i + 1)..n {
                let mut r2 = 0.0;
                let mut dot = 0.0;
                for k in 0..dir.len() {
                    let h = locs[j][k] - locs[i][k];
                    r2 += h * h;
                    dot += h * dir[k];
                }
                let r = r2.sqrt();
                if r == 0.0 || r >= max_lag || dot.abs() < cos_tol * r {
                    continue;
                }
                let b = (r / lag_width) as usize;
                if b < nbins {
                    let dz = z[i] - z[j];
                    sums[b] += dz * dz;
                    counts[b] += 1;
                }
            }
            (sums, counts)
        })
        .collect();
    let mut sums = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    for (s, c) in rows {
        for b in 0..nbins {
            sums[b] += s[b];
            counts[b] += c[b];
        }
    }
    let mut v = EmpiricalVariogram {
        direction: dir,
        angle_tolerance: angle_tol,
        lag_width,
        lag_centers: vec![],
        semivariances: vec![],
        pair_counts: vec![],
    };
    for b in 0..nbins {
        if counts[b] > 0 {
            v.lag_centers.push((b as f64 + 0.5) * lag_width);
            v.semivariances.push(sums[b] / (2.0 * counts[b] as f64));
            v.pair_counts.push(counts[b]);
        }
    }
    Ok(v)
}

/// `γ(h) = C(0) - C(h)`.
pub fn model_variogram(model: &CovarianceModel, h: &[f64]) -> Result<f64> {
    model.variogram(h)
}
