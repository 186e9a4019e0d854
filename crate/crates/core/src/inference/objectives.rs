//! Composite likelihood of pairwise differences and weighted least squares
//! on empirical variograms.

use crate::error::{Error, Result};
use crate::field::{EmpiricalVariogram, SpatialDataset};
use crate::transforms::CovarianceModel;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Pairs of observations within a radius, grouped by lag vector.
///
/// Lags are keyed on a grid of `1e-9` times the data extent with the sign
/// fixed so that the first nonzero coordinate is positive; on regular
/// lattices many pairs share a key and the likelihood costs one model
/// evaluation per key.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    dim: usize,
    radius: f64,
    lags: Vec<Vec<f64>>,
    counts: Vec<usize>,
    sum_sq: Vec<f64>,
    first_pair: Vec<(usize, usize)>,
    n_pairs: usize,
}

struct RowGroups {
    keys: Vec<Vec<i64>>,
    lags: Vec<Vec<f64>>,
    counts: Vec<usize>,
    sum_sq: Vec<f64>,
    first_pair: Vec<(usize, usize)>,
}

/// Bounding-box diagonal of the locations.
pub fn domain_diameter(data: &SpatialDataset) -> f64 {
    let d = data.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in data.locations() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
}

/// Default pair radius: a third of the domain diameter.
pub fn default_radius(data: &SpatialDataset) -> f64 {
    domain_diameter(data) / 3.0
}

impl PairSet {
    pub fn new(data: &SpatialDataset, max_pair_distance: f64) -> Result<Self> {
        if !(max_pair_distance > 0.0) {
            return Err(Error::InvalidParameter(format!("pair radius {max_pair_distance} must be > 0")));
        }
        let d = data.dim();
        let locs = data.locations();
        let z = data.residuals();
        let n = data.len();
        let extent = domain_diameter(data).max(max_pair_distance).max(f64::MIN_POSITIVE);
        let quantum = 1e-9 * extent;
        let r2max = max_pair_distance * max_pair_distance;

        let rows: Vec<RowGroups> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
                let mut g = RowGroups { keys: vec![], lags: vec![], counts: vec![], sum_sq: vec![], first_pair: vec![] };
                let mut h = vec![0.0; d];
                for j in (i + 1)..n {
                    let mut r2 = 0.0;
                    for k in 0..d {
                        h[k] = locs[j][k] - locs[i][k];
                        r2 += h[k] * h[k];
                    }
                    if r2 > r2max {
                        continue;
                    }
                    let flip = h.iter().find(|v| v.abs() > 0.5 * quantum).map(|v| *v < 0.0).unwrap_or(false);
                    let key: Vec<i64> = h
                        .iter()
                        .map(|v| {
                            let s = if flip { -v } else { *v };
                            (s / quantum).round() as i64
                        })
                        .collect();
                    let dz = z[i] - z[j];
                    let slot = *index.entry(key.clone()).or_insert_with(|| {
                        g.keys.push(key);
                        g.lags.push(h.iter().map(|v| if flip { -v } else { *v }).collect());
                        g.counts.push(0);
                        g.sum_sq.push(0.0);
                        g.first_pair.push((i, j));
                        g.counts.len() - 1
                    });
                    g.counts[slot] += 1;
                    g.sum_sq[slot] += dz * dz;
                }
                g
            })
            .collect();

        let mut set = PairSet {
            dim: d,
            radius: max_pair_distance,
            lags: vec![],
            counts: vec![],
            sum_sq: vec![],
            first_pair: vec![],
            n_pairs: 0,
        };
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        for row in rows {
            for (k, key) in row.keys.into_iter().enumerate() {
                let slot = *index.entry(key).or_insert_with(|| {
                    set.lags.push(row.lags[k].clone());
                    set.counts.push(0);
                    set.sum_sq.push(0.0);
                    set.first_pair.push(row.first_pair[k]);
                    set.counts.len() - 1
                });
                set.counts[slot] += row.counts[k];
                set.sum_sq[slot] += row.sum_sq[k];
                set.n_pairs += row.counts[k];
            }
        }
        Ok(set)
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_groups(&self) -> usize {
        self.lags.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σ -½[log(4πγ(h_ij)) + (z_i - z_j)²/(2γ(h_ij))]` over the pairs.
    pub fn log_likelihood(&self, model: &CovarianceModel) -> Result<f64> {
        if model.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: model.dim() });
        }
        let c0 = model.variance()?;
        let mut total = 0.0;
        for g in 0..self.lags.len() {
            let gamma = c0 - model.eval(&self.lags[g])?;
            if !(gamma > 0.0) {
                let (i, j) = self.first_pair[g];
                return Err(Error::DegenerateVariogram { i, j, gamma });
            }
            let n = self.counts[g] as f64;
            total += -0.5 * (n * (4.0 * PI * gamma).ln() + self.sum_sq[g] / (2.0 * gamma));
        }
        Ok(total)
    }
}

/// Composite log-likelihood of pairwise differences within
/// `max_pair_distance`.
pub fn composite_log_likelihood(model: &CovarianceModel, data: &SpatialDataset, max_pair_distance: f64) -> Result<f64> {
    PairSet::new(data, max_pair_distance)?.log_likelihood(model)
}

/// `Σ_bins N_b (γ̂_b - γ(h_b))²` over all directions.
pub fn wls_variogram_objective(model: &CovarianceModel, variograms: &[EmpiricalVariogram]) -> Result<f64> {
    if variograms.iter().all(|v| v.lag_centers.is_empty()) {
        return Err(Error::Empty("no nonempty variogram bins".into()));
    }
    let c0 = model.variance()?;
    let mut total = 0.0;
    for v in variograms {
        for k in 0..v.lag_centers.len() {
            let gamma = c0 - model.eval(&v.lag_vector(k))?;
            total += v.pair_counts[k] as f64 * (v.semivariances[k] - gamma).powi(2);
        }
    }
    Ok(total)
}
