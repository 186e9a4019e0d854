//! Simple kriging with a known zero mean, exact Gaussian simulation, and
//! split-sample validation.
//!
//! Gram matrices are factored by a packed row-oriented Cholesky. When the
//! plain factorization fails, `rel·C(0)` is added to the diagonal for each
//! `rel` in [`JITTER_LADDER`] in turn.

use crate::error::{Error, Result};
use crate::field::SpatialDataset;
use crate::rng::NormalStream;
use crate::transforms::{cross_covariances, gram_matrix, CovarianceModel};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Diagonal jitter levels relative to `C(0)`.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-10, 1e-8, 1e-6];

/// Largest system factored densely.
pub const MAX_POINTS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    /// Absolute jitter added to the diagonal.
    pub jitter: f64,
    /// Jitter relative to `C(0)`.
    pub relative_jitter: f64,
    /// `(max L_ii / min L_ii)²`, a cheap lower bound on the 2-norm condition
    /// number of the factored matrix.
    pub condition_estimate: f64,
}

/// Lower Cholesky factor in packed row-major storage.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    packed: Vec<f64>,
    report: SolverReport,
}

fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One factorization attempt; `Err` carries the pivot ratio reached.
/// With `semidefinite`, pivots below `zero_tol` are treated as exact zeros
/// and their column is dropped.
fn try_factor(g: &DMatrix<f64>, jitter: f64, semidefinite: bool, zero_tol: f64) -> std::result::Result<Vec<f64>, f64> {
    let n = g.nrows();
    let mut l = vec![0.0; n * (n + 1) / 2];
    let (mut dmax, mut dmin) = (0.0f64, f64::INFINITY);
    for i in 0..n {
        let col = g.column(i);
        let ri = row_start(i);
        for j in 0..i {
            let rj = row_start(j);
            let ljj = l[rj + j];
            let s = col[j] - dot(&l[ri..ri + j], &l[rj..rj + j]);
            l[ri + j] = if ljj > 0.0 { s / ljj } else { 0.0 };
        }
        let d = col[i] + jitter - dot(&l[ri..ri + i], &l[ri..ri + i]);
        if semidefinite && d.abs() <= zero_tol {
            l[ri + i] = 0.0;
            dmin = 0.0;
            continue;
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(if dmin > 0.0 { dmax / dmin } else { f64::INFINITY });
        }
        let lii = d.sqrt();
        l[ri + i] = lii;
        dmax = dmax.max(lii);
        dmin = dmin.min(lii);
    }
    Ok(l)
}

impl CholeskyFactor {
    /// Factors `g`, escalating jitter along [`JITTER_LADDER`] scaled by `c0`.
    pub fn new(g: &DMatrix<f64>, c0: f64) -> Result<Self> {
        Self::build(g, c0, false)
    }

    /// As [`CholeskyFactor::new`], but rounding-level pivots are treated as
    /// exact zeros so that repeated points get identical rows. Only suitable
    /// for sampling.
    pub fn new_semidefinite(g: &DMatrix<f64>, c0: f64) -> Result<Self> {
        Self::build(g, c0, true)
    }

    fn build(g: &DMatrix<f64>, c0: f64, semidefinite: bool) -> Result<Self> {
        let n = g.nrows();
        if n != g.ncols() {
            return Err(Error::DimensionMismatch { expected: n, got: g.ncols() });
        }
        if n > MAX_POINTS {
            return Err(Error::InvalidParameter(format!("{n} points exceed the dense limit of {MAX_POINTS}")));
        }
        if !(c0 > 0.0) {
            return Err(Error::InvalidParameter(format!("C(0) = {c0} must be > 0")));
        }
        let zero_tol = 64.0 * f64::EPSILON * n as f64 * c0;
        let mut condition = f64::INFINITY;
        for rel in JITTER_LADDER {
            let jitter = rel * c0;
            match try_factor(g, jitter, semidefinite, zero_tol) {
                Ok(packed) => {
                    let diag = (0..n).map(|i| packed[row_start(i) + i]);
                    let (mx, mn) = diag.fold((0.0f64, f64::INFINITY), |(a, b), v| (a.max(v), b.min(v)));
                    let report = SolverReport {
                        jitter,
                        relative_jitter: rel,
                        condition_estimate: if n == 0 { 1.0 } else { (mx / mn).powi(2) },
                    };
                    return Ok(Self { n, packed, report });
                }
                Err(ratio) => condition = ratio * ratio,
            }
        }
        Err(Error::Factorization { jitter: JITTER_LADDER[JITTER_LADDER.len() - 1] * c0, condition })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn report(&self) -> SolverReport {
        self.report
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let ri = row_start(i);
            let lii = self.packed[ri + i];
            let s = b[i] - dot(&self.packed[ri..ri + i], &y[..i]);
            y[i] = if lii > 0.0 { s / lii } else { 0.0 };
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let mut x = y.to_vec();
        for i in (0..self.n).rev() {
            let ri = row_start(i);
            let lii = self.packed[ri + i];
            x[i] = if lii > 0.0 { x[i] / lii } else { 0.0 };
            let xi = x[i];
            for (k, l) in self.packed[ri..ri + i].iter().enumerate() {
                x[k] -= l * xi;
            }
        }
        x
    }

    /// `L e`.
    pub fn mul_lower(&self, e: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let ri = row_start(i);
                dot(&self.packed[ri..=ri + i], &e[..=i])
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrigingResult {
    pub predictions: Vec<f64>,
    pub kriging_variances: Vec<f64>,
    pub solver_report: SolverReport,
}

impl KrigingResult {
    /// Writes `x, y, prediction, variance` (all coordinates for `d ≠ 2`).
    pub fn save_csv(&self, path: impl AsRef<Path>, queries: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref()).map_err(crate::field::csv_err)?;
        let d = queries.first().map_or(2, |q| q.len());
        let mut header: Vec<String> = match d {
            2 => vec!["x".into(), "y".into()],
            _ => (0..d).map(|k| format!("x{}", k + 1)).collect(),
        };
        header.extend(["prediction".into(), "variance".into()]);
        w.write_record(&header).map_err(crate::field::csv_err)?;
        for (k, q) in queries.iter().enumerate() {
            let mut rec: Vec<String> = q.iter().map(|v| v.to_string()).collect();
            rec.push(self.predictions[k].to_string());
            rec.push(self.kriging_variances[k].to_string());
            w.write_record(&rec).map_err(crate::field::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A factored simple-kriging system for fixed locations and model.
#[derive(Debug, Clone)]
pub struct KrigingSystem {
    model: CovarianceModel,
    locations: Vec<Vec<f64>>,
    factor: CholeskyFactor,
    c0: f64,
}

impl KrigingSystem {
    pub fn new(model: &CovarianceModel, locations: &[Vec<f64>], allow_uncertified: bool) -> Result<Self> {
        model.require_certified(allow_uncertified)?;
        if locations.is_empty() {
            return Err(Error::Empty("no training locations".into()));
        }
        let c0 = model.variance()?;
        let g = gram_matrix(model, locations)?;
        let factor = CholeskyFactor::new(&g, c0)?;
        Ok(Self { model: model.clone(), locations: locations.to_vec(), factor, c0 })
    }

    pub fn report(&self) -> SolverReport {
        self.factor.report()
    }

    /// Predictions and variances at `queries` from `values` at the training
    /// locations. Queries are solved in parallel against the shared factor.
    pub fn predict(&self, values: &[f64], queries: &[Vec<f64>]) -> Result<KrigingResult> {
        if values.len() != self.locations.len() {
            return Err(Error::DimensionMismatch { expected: self.locations.len(), got: values.len() });
        }
        let w = self.factor.solve_lower(values);
        let out: Vec<(f64, f64)> = queries
            .par_iter()
            .map(|q| {
                let c = cross_covariances(&self.model, &self.locations, q)?;
                let y = self.factor.solve_lower(&c);
                let pred = dot(&y, &w);
                let var = (self.c0 - dot(&y, &y)).max(0.0);
                Ok((pred, var))
            })
            .collect::<Result<_>>()?;
        let (predictions, kriging_variances) = out.into_iter().unzip();
        Ok(KrigingResult { predictions, kriging_variances, solver_report: self.report() })
    }

    /// Kriging weights `G⁻¹ c₀` for one query.
    pub fn weights(&self, query: &[f64]) -> Result<Vec<f64>> {
        let c = cross_covariances(&self.model, &self.locations, query)?;
        Ok(self.factor.solve_upper(&self.factor.solve_lower(&c)))
    }
}

/// Simple kriging of the dataset residuals at `queries`.
pub fn simple_krige(model: &CovarianceModel, data: &SpatialDataset, queries: &[Vec<f64>]) -> Result<KrigingResult> {
    KrigingSystem::new(model, data.locations(), false)?.predict(data.residuals(), queries)
}

/// Draws `L ε` for a fixed Gram factor.
#[derive(Debug, Clone)]
pub struct GaussianSimulator {
    factor: CholeskyFactor,
}

impl GaussianSimulator {
    /// Factors the Gram matrix of `points` once. Repeated points are allowed
    /// and receive identical values.
    pub fn new(model: &CovarianceModel, points: &[Vec<f64>]) -> Result<Self> {
        model.require_certified(false)?;
        if points.is_empty() {
            return Err(Error::Empty("no simulation points".into()));
        }
        let g = gram_matrix(model, points)?;
        let factor = CholeskyFactor::new_semidefinite(&g, model.variance()?)?;
        Ok(Self { factor })
    }

    pub fn report(&self) -> SolverReport {
        self.factor.report()
    }

    /// One realization from the standard normals of [`NormalStream`] with
    /// `seed`.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let e = NormalStream::new(seed).normals(self.factor.len());
        self.factor.mul_lower(&e)
    }
}

/// One zero-mean Gaussian realization at `points`.
pub fn simulate_gaussian(model: &CovarianceModel, points: &[Vec<f64>], seed: u64) -> Result<Vec<f64>> {
    Ok(GaussianSimulator::new(model, points)?.sample(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rmse: f64,
    pub mae: f64,
    pub n_holdout: usize,
    pub abs_errors: Vec<f64>,
    pub solver_report: SolverReport,
}

impl ValidationReport {
    fn from_errors(errors: &[f64], solver_report: SolverReport) -> Self {
        let n = errors.len() as f64;
        let abs_errors: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
        let mae = abs_errors.iter().sum::<f64>() / n;
        let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
        // the two means can cross by one rounding step when all errors are equal
        Self { rmse: rmse.max(mae), mae, n_holdout: errors.len(), abs_errors, solver_report }
    }
}

/// Kriges the held-out residuals from the rest and scores the predictions.
pub fn split_sample_validate(model: &CovarianceModel, data: &SpatialDataset, holdout: &[usize]) -> Result<ValidationReport> {
    let n = data.len();
    if holdout.is_empty() {
        return Err(Error::Empty("holdout set is empty".into()));
    }
    let mut held = vec![false; n];
    for &i in holdout {
        if i >= n {
            return Err(Error::InvalidParameter(format!("holdout index {i} out of range for {n} observations")));
        }
        if held[i] {
            return Err(Error::InvalidParameter(format!("holdout index {i} repeated")));
        }
        held[i] = true;
    }
    let train: Vec<usize> = (0..n).filter(|&i| !held[i]).collect();
    if train.is_empty() {
        return Err(Error::Empty("training set is empty".into()));
    }
    let train_data = data.subset(&train)?;
    let queries: Vec<Vec<f64>> = holdout.iter().map(|&i| data.locations()[i].clone()).collect();
    let result = simple_krige(model, &train_data, &queries)?;
    let z = data.residuals();
    let errors: Vec<f64> = holdout.iter().zip(&result.predictions).map(|(&i, p)| p - z[i]).collect();
    Ok(ValidationReport::from_errors(&errors, result.solver_report))
}
