//! Parameter estimation by composite likelihood or variogram least squares.
//!
//! Parameters are optimized by Nelder–Mead in an unconstrained space:
//! `log(x - lower)` with only a lower bound, `log(upper - x)` with only an
//! upper bound, `logit` between two finite bounds, identity otherwise.
//! Parameter sets that fail to build a certified model score `+∞`.

mod objectives;

pub use objectives::{
    composite_log_likelihood, default_radius, domain_diameter, wls_variogram_objective, PairSet,
};

use crate::anisotropy::AnisotropyMatrix;
use crate::error::{Error, Result};
use crate::field::EmpiricalVariogram;
use crate::models::IsotropicFamily;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::transforms::{Certificate, Component, CovarianceModel, ModelKind};
use serde::{Deserialize, Serialize};

/// Named parameters with box bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParameterVector {
    pub fn new(names: Vec<String>, values: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = names.len();
        for len in [values.len(), lower.len(), upper.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        let p = Self { names, values, lower, upper };
        for i in 0..n {
            if !(p.lower[i] <= p.values[i] && p.values[i] <= p.upper[i]) || p.values[i].is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "{} = {} outside [{}, {}]",
                    p.names[i], p.values[i], p.lower[i], p.upper[i]
                )));
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.names.clone(), values, self.lower.clone(), self.upper.clone())
    }

    fn to_free(&self, i: usize, x: f64) -> f64 {
        let (l, u) = (self.lower[i], self.upper[i]);
        match (l.is_finite(), u.is_finite()) {
            (true, true) => {
                let p = ((x - l) / (u - l)).clamp(1e-15, 1.0 - 1e-15);
                (p / (1.0 - p)).ln()
            }
            (true, false) => (x - l).max(1e-300).ln(),
            (false, true) => (u - x).max(1e-300).ln(),
            (false, false) => x,
        }
    }

    fn from_free(&self, i: usize, y: f64) -> f64 {
        let (l, u) = (self.lower[i], self.upper[i]);
        let x = match (l.is_finite(), u.is_finite()) {
            (true, true) => l + (u - l) / (1.0 + (-y).exp()),
            (true, false) => l + y.exp(),
            (false, true) => u - y.exp(),
            (false, false) => y,
        };
        x.clamp(l, u)
    }

    /// Coordinates in the unconstrained space.
    pub fn to_unconstrained(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.to_free(i, self.values[i])).collect()
    }

    /// Values for unconstrained coordinates.
    pub fn from_unconstrained(&self, y: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|i| self.from_free(i, y[i])).collect()
    }
}

/// Parametric model families that can be fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum ModelTemplate {
    /// `σ² exp(-a1‖h‖) sin(a2|h_2|)/(a2|h_2|)`; parameters `sigma2, a1, a2`.
    ModelI,
    /// `(3σ²/4)·[B(h) - W''-bracket(√a3 h; u = e_2)]` where `B` is the
    /// unit-sill Model I; the sill is `σ²`. Parameters `sigma2, a1, a2, a3`.
    #[serde(rename = "model_ii")]
    ModelII,
    /// Shifted construction over a Matérn profile; parameters `b1, b2, a1, a2`.
    T2Matern { nu: f64, eta: Vec<f64> },
    /// `σ² M_ν(a‖h‖)`; parameters `sigma2, scale`.
    Matern { nu: f64, dim: usize },
    /// `σ² M_ν(a‖h‖)` with fixed `a`; parameter `sigma2`.
    MaternSill { nu: f64, scale: f64, dim: usize },
}

fn model_one(sigma2: f64, a1: f64, a2: f64) -> Result<CovarianceModel> {
    CovarianceModel::with_dim(
        ModelKind::AxisProduct {
            phi1: IsotropicFamily::matern(0.5),
            phi2: IsotropicFamily::CardinalSine,
            axis: 1,
            a1,
            a2,
            sigma2,
        },
        2,
    )
}

/// Model I: exponential in `‖h‖` times a cardinal sine in the second
/// coordinate.
pub fn model_i(sigma2: f64, a1: f64, a2: f64) -> Result<CovarianceModel> {
    model_one(sigma2, a1, a2)
}

/// Model II: unit-sill Model I plus the covariance of the derivative of a
/// wave field along the second axis, rescaled to sill `σ²`.
pub fn model_ii(sigma2: f64, a1: f64, a2: f64, a3: f64) -> Result<CovarianceModel> {
    let base = model_one(1.0, a1, a2)?;
    let t3 = CovarianceModel::with_dim(
        ModelKind::T3 {
            phi1: Component::Model(Box::new(base)),
            phi2: IsotropicFamily::CardinalSine,
            a1: 1.0,
            a2: a3,
            b1: 1.0,
            b2: 1.0,
            u: vec![0.0, 1.0],
        },
        2,
    )?;
    t3.scaled(0.75 * sigma2)
}

fn matern_model(nu: f64, sigma2: f64, scale: f64, dim: usize) -> Result<CovarianceModel> {
    let m = CovarianceModel::with_dim(
        ModelKind::GeometricAniso {
            family: IsotropicFamily::matern(nu),
            matrix: AnisotropyMatrix::scaled_identity(dim, scale * scale)?,
        },
        dim,
    )?;
    m.scaled(sigma2)
}

impl ModelTemplate {
    pub fn parameter_names(&self) -> Vec<&'static str> {
        match self {
            Self::ModelI => vec!["sigma2", "a1", "a2"],
            Self::ModelII => vec!["sigma2", "a1", "a2", "a3"],
            Self::T2Matern { .. } => vec!["b1", "b2", "a1", "a2"],
            Self::Matern { .. } => vec!["sigma2", "scale"],
            Self::MaternSill { .. } => vec!["sigma2"],
        }
    }

    /// Parameter vector with positive-orthant bounds.
    pub fn parameters(&self, values: &[f64]) -> Result<ParameterVector> {
        let names: Vec<String> = self.parameter_names().iter().map(|s| s.to_string()).collect();
        let n = names.len();
        let lower = match self {
            // b2 may vanish
            Self::T2Matern { .. } => vec![1e-12, 0.0, 1e-12, 1e-12],
            _ => vec![1e-12; n],
        };
        ParameterVector::new(names, values.to_vec(), lower, vec![f64::INFINITY; n])
    }

    pub fn build(&self, p: &[f64]) -> Result<CovarianceModel> {
        let n = self.parameter_names().len();
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        match self {
            Self::ModelI => model_i(p[0], p[1], p[2]),
            Self::ModelII => model_ii(p[0], p[1], p[2], p[3]),
            Self::T2Matern { nu, eta } => CovarianceModel::new(ModelKind::T2 {
                family: IsotropicFamily::matern(*nu),
                b1: p[0],
                b2: p[1],
                a1: p[2],
                a2: p[3],
                eta: eta.clone(),
            }),
            Self::Matern { nu, dim } => matern_model(*nu, p[0], p[1], *dim),
            Self::MaternSill { nu, scale, dim } => matern_model(*nu, p[0], *scale, *dim),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ObjectiveKind {
    /// Composite log-likelihood, maximized.
    Cl,
    /// Weighted least squares, minimized.
    Wls,
}

/// Data for an objective.
#[derive(Debug, Clone, Copy)]
pub enum Objective<'a> {
    CompositeLikelihood(&'a PairSet),
    LeastSquares(&'a [EmpiricalVariogram]),
}

impl Objective<'_> {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::CompositeLikelihood(_) => ObjectiveKind::Cl,
            Objective::LeastSquares(_) => ObjectiveKind::Wls,
        }
    }

    /// Objective value in its natural orientation.
    pub fn value(&self, model: &CovarianceModel) -> Result<f64> {
        match self {
            Objective::CompositeLikelihood(p) => p.log_likelihood(model),
            Objective::LeastSquares(v) => wls_variogram_objective(model, v),
        }
    }

    /// Value to minimize.
    fn loss(&self, model: &CovarianceModel) -> f64 {
        match self.value(model) {
            Ok(v) if v.is_finite() => match self {
                Objective::CompositeLikelihood(_) => -v,
                Objective::LeastSquares(_) => v,
            },
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Total objective evaluations across restarts.
    pub max_evals: usize,
    /// Extra Nelder–Mead runs restarted from the incumbent.
    pub restarts: usize,
    /// Simplex diameter tolerance in the unconstrained space.
    pub xtol: f64,
    /// Initial simplex edge in the unconstrained space.
    pub initial_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_evals: 6000, restarts: 3, xtol: 1e-8, initial_step: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub estimate: ParameterVector,
    pub objective_value: f64,
    pub objective_kind: ObjectiveKind,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub validity: Certificate,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub model: CovarianceModel,
}

/// Optimizes `template` parameters from `init`.
pub fn fit(objective: Objective<'_>, template: &ModelTemplate, init: &ParameterVector, opts: &FitOptions) -> Result<FitResult> {
    let names = template.parameter_names();
    if init.len() != names.len() {
        return Err(Error::DimensionMismatch { expected: names.len(), got: init.len() });
    }
    let score = |y: &[f64]| -> f64 {
        let x = init.from_unconstrained(y);
        match template.build(&x) {
            Ok(m) if m.is_certified() => objective.loss(&m),
            _ => f64::INFINITY,
        }
    };
    let mut y = init.to_unconstrained();
    let mut best = score(&y);
    if !best.is_finite() {
        return Err(Error::InvalidParameter(
            "the objective is not finite at the initial parameters (uncertified model or degenerate variogram)".into(),
        ));
    }
    let mut evaluations = 1;
    let mut iterations = 0;
    let mut converged = false;
    let runs = opts.restarts + 1;
    for run in 0..runs {
        let remaining = opts.max_evals.saturating_sub(evaluations);
        if remaining == 0 {
            break;
        }
        let nm = NelderMeadOptions {
            max_evals: if run + 1 == runs { remaining } else { remaining.min(opts.max_evals / runs + 1) },
            xtol: opts.xtol,
            ftol: 1e-12,
            initial_step: opts.initial_step,
        };
        let m = nelder_mead(score, &y, &nm);
        evaluations += m.evals;
        iterations += m.iterations;
        let improvement = best - m.value;
        if m.value <= best {
            y = m.x;
            best = m.value;
        }
        converged = m.converged;
        // a restart that cannot improve confirms the optimum
        if run > 0 && m.converged && improvement <= 1e-10 * best.abs().max(1.0) {
            break;
        }
    }
    let values = init.from_unconstrained(&y);
    let estimate = init.with_values(values.clone())?;
    let model = template.build(&values)?;
    let objective_value = objective.value(&model)?;
    let mut warnings = Vec::new();
    if let Objective::CompositeLikelihood(p) = objective {
        if p.n_pairs() <= names.len() {
            warnings.push(format!("{} pairs for {} parameters: the fit is under-determined", p.n_pairs(), names.len()));
        }
    }
    for i in 0..values.len() {
        let v = values[i];
        let near = |b: f64| b.is_finite() && (v - b).abs() <= 1e-6 * b.abs().max(1e-6);
        let huge = v.abs() > 1e8 || (init.lower[i] >= 0.0 && v < 1e-8);
        if near(init.lower[i]) || near(init.upper[i]) || huge {
            warnings.push(format!("{} = {v:e} is at a bound or degenerate", names[i]));
        }
    }
    if !converged {
        warnings.push("evaluation budget exhausted before the simplex collapsed".into());
    }
    Ok(FitResult {
        estimate,
        objective_value,
        objective_kind: objective.kind(),
        iterations,
        evaluations,
        converged,
        validity: model.certificate().clone(),
        warnings,
        model,
    })
}
