//! Composite stationary covariance models.
//!
//! Three constructions combine radial families into anisotropic models with
//! hole effects:
//!
//! * [`ModelKind::T1`]: `b1 φ(√(hᵀA1h)) - b2 φ(√(hᵀA2h))`;
//! * [`ModelKind::T2`]: `b1 φ(√a1‖h‖) - (b2/2)[φ(√a2‖h-η‖) + φ(√a2‖h+η‖)]`;
//! * [`ModelKind::T3`]: `b1 φ1(√a1‖h‖) - b2[cos²θ φ2''(r) + sin²θ φ2'(r)/r]`
//!   with `r = √a2‖h‖` and `θ` the angle between `h` and the unit vector `u`.
//!
//! The remaining kinds are building blocks: geometric anisotropy, axis
//! products, scaling, pointwise products and embedding of a 1-D model along
//! one coordinate axis. Gauss hypergeometric profiles enter every
//! construction normalized to 1 at the origin.
//!
//! Every [`CovarianceModel`] carries a validity [`Certificate`] computed at
//! construction.

mod validity;

pub use validity::{
    check_t1_general, check_t2, check_t3, Certificate, Inequality, Status, DEFAULT_OMEGA_BUDGET,
};

use crate::anisotropy::AnisotropyMatrix;
use crate::error::{Error, Result};
use crate::models::IsotropicFamily;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// First component of a derivative construction: a radial family or a full
/// model evaluated at `√a1·h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Family(IsotropicFamily),
    Model(Box<CovarianceModel>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    T1 {
        family: IsotropicFamily,
        a1: AnisotropyMatrix,
        a2: AnisotropyMatrix,
        b1: f64,
        b2: f64,
    },
    T2 {
        family: IsotropicFamily,
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
        eta: Vec<f64>,
    },
    T3 {
        phi1: Component,
        phi2: IsotropicFamily,
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
        u: Vec<f64>,
    },
    /// `φ(√(hᵀAh))`.
    GeometricAniso {
        family: IsotropicFamily,
        matrix: AnisotropyMatrix,
    },
    /// `σ² φ1(a1‖h‖) φ2(a2|h_axis|)`.
    AxisProduct {
        phi1: IsotropicFamily,
        phi2: IsotropicFamily,
        axis: usize,
        a1: f64,
        a2: f64,
        sigma2: f64,
    },
    /// `σ² C(h)`.
    Scaled {
        base: Box<CovarianceModel>,
        sigma2: f64,
    },
    /// `Π C_k(h)`.
    Product { factors: Vec<CovarianceModel> },
    /// `C(h_axis)` for a one-dimensional model `C`.
    OnAxis {
        base: Box<CovarianceModel>,
        axis: usize,
    },
}

/// A stationary covariance on `R^dim` with its validity certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct CovarianceModel {
    kind: ModelKind,
    dim: usize,
    certificate: Certificate,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(flatten)]
    kind: ModelKind,
}

impl TryFrom<ModelDoc> for CovarianceModel {
    type Error = Error;
    fn try_from(doc: ModelDoc) -> Result<Self> {
        Self::build(doc.kind, doc.dim)
    }
}

impl From<CovarianceModel> for ModelDoc {
    fn from(m: CovarianceModel) -> Self {
        ModelDoc { dim: Some(m.dim), kind: m.kind }
    }
}

fn check_coeff(name: &str, v: f64, positive: bool) -> Result<()> {
    let ok = v.is_finite() && if positive { v > 0.0 } else { v >= 0.0 };
    if ok {
        Ok(())
    } else {
        let rel = if positive { "> 0" } else { ">= 0" };
        Err(Error::InvalidParameter(format!("{name} = {v} must be finite and {rel}")))
    }
}

fn norm(h: &[f64]) -> f64 {
    h.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn origin_value(f: &IsotropicFamily) -> Result<f64> {
    match f {
        IsotropicFamily::GaussHypergeometric { .. } => f.value_at_origin(),
        _ => Ok(1.0),
    }
}

/// Profile normalized to 1 at the origin.
fn unit_phi(f: &IsotropicFamily, t: f64) -> Result<f64> {
    Ok(f.phi(t)? / origin_value(f)?)
}

impl CovarianceModel {
    /// Builds and certifies a model; the dimension is inferred from the
    /// matrices or vectors it contains (axis kinds default to 2).
    pub fn new(kind: ModelKind) -> Result<Self> {
        Self::build(kind, None)
    }

    pub fn with_dim(kind: ModelKind, dim: usize) -> Result<Self> {
        Self::build(kind, Some(dim))
    }

    fn inferred_dim(kind: &ModelKind) -> Result<usize> {
        Ok(match kind {
            ModelKind::T1 { a1, .. } => a1.dim(),
            ModelKind::T2 { eta, .. } => eta.len(),
            ModelKind::T3 { u, .. } => u.len(),
            ModelKind::GeometricAniso { matrix, .. } => matrix.dim(),
            ModelKind::AxisProduct { axis, .. } | ModelKind::OnAxis { axis, .. } => (axis + 1).max(2),
            ModelKind::Scaled { base, .. } => base.dim,
            ModelKind::Product { factors } => match factors.first() {
                Some(f) => f.dim,
                None => return Err(Error::InvalidParameter("product needs at least one factor".into())),
            },
        })
    }

    fn build(kind: ModelKind, dim: Option<usize>) -> Result<Self> {
        let inferred = Self::inferred_dim(&kind)?;
        let d = dim.unwrap_or(inferred);
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let mismatch = |got: usize| Error::DimensionMismatch { expected: d, got };
        let kind = match kind {
            ModelKind::T1 { family, a1, a2, b1, b2 } => {
                if a1.dim() != d {
                    return Err(mismatch(a1.dim()));
                }
                if a2.dim() != d {
                    return Err(mismatch(a2.dim()));
                }
                check_coeff("b1", b1, false)?;
                check_coeff("b2", b2, false)?;
                let family = family.with_default_dim(d);
                family.validate()?;
                ModelKind::T1 { family, a1, a2, b1, b2 }
            }
            ModelKind::T2 { family, a1, a2, b1, b2, eta } => {
                if eta.len() != d {
                    return Err(mismatch(eta.len()));
                }
                if eta.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("eta must be finite".into()));
                }
                check_coeff("a1", a1, true)?;
                check_coeff("a2", a2, true)?;
                check_coeff("b1", b1, false)?;
                check_coeff("b2", b2, false)?;
                let family = family.with_default_dim(d);
                family.validate()?;
                ModelKind::T2 { family, a1, a2, b1, b2, eta }
            }
            ModelKind::T3 { phi1, phi2, a1, a2, b1, b2, u } => {
                if u.len() != d {
                    return Err(mismatch(u.len()));
                }
                let n = norm(&u);
                if !((n - 1.0).abs() <= 1e-6) {
                    return Err(Error::InvalidParameter(format!("u must be a unit vector (norm {n})")));
                }
                let u: Vec<f64> = u.iter().map(|v| v / n).collect();
                check_coeff("a1", a1, true)?;
                check_coeff("a2", a2, true)?;
                check_coeff("b1", b1, false)?;
                check_coeff("b2", b2, false)?;
                let phi1 = match phi1 {
                    Component::Family(f) => {
                        let f = f.with_default_dim(d);
                        f.validate()?;
                        Component::Family(f)
                    }
                    Component::Model(m) => {
                        if m.dim != d {
                            return Err(mismatch(m.dim));
                        }
                        Component::Model(m)
                    }
                };
                let phi2 = phi2.with_default_dim(d);
                phi2.validate()?;
                ModelKind::T3 { phi1, phi2, a1, a2, b1, b2, u }
            }
            ModelKind::GeometricAniso { family, matrix } => {
                if matrix.dim() != d {
                    return Err(mismatch(matrix.dim()));
                }
                let family = family.with_default_dim(d);
                family.validate()?;
                ModelKind::GeometricAniso { family, matrix }
            }
            ModelKind::AxisProduct { phi1, phi2, axis, a1, a2, sigma2 } => {
                if axis >= d {
                    return Err(Error::InvalidParameter(format!("axis {axis} out of range for d = {d}")));
                }
                check_coeff("a1", a1, true)?;
                check_coeff("a2", a2, true)?;
                check_coeff("sigma2", sigma2, true)?;
                let phi1 = phi1.with_default_dim(d);
                let phi2 = phi2.with_default_dim(1);
                phi1.validate()?;
                phi2.validate()?;
                ModelKind::AxisProduct { phi1, phi2, axis, a1, a2, sigma2 }
            }
            ModelKind::Scaled { base, sigma2 } => {
                if base.dim != d {
                    return Err(mismatch(base.dim));
                }
                check_coeff("sigma2", sigma2, true)?;
                ModelKind::Scaled { base, sigma2 }
            }
            ModelKind::Product { factors } => {
                if let Some(f) = factors.iter().find(|f| f.dim != d) {
                    return Err(mismatch(f.dim));
                }
                ModelKind::Product { factors }
            }
            ModelKind::OnAxis { base, axis } => {
                if base.dim != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: base.dim });
                }
                if axis >= d {
                    return Err(Error::InvalidParameter(format!("axis {axis} out of range for d = {d}")));
                }
                ModelKind::OnAxis { base, axis }
            }
        };
        let certificate = validity::certify(&kind, d);
        Ok(Self { kind, dim: d, certificate })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `true` for PROVED or NUMERIC certificates.
    pub fn is_certified(&self) -> bool {
        self.certificate.status.is_valid()
    }

    /// Errors unless the model is certified or `allow_uncertified` is set.
    pub fn require_certified(&self, allow_uncertified: bool) -> Result<()> {
        if allow_uncertified || self.is_certified() {
            Ok(())
        } else {
            Err(Error::NotCertified(format!(
                "model certificate is {}; pass the override to use it anyway",
                self.certificate.status
            )))
        }
    }

    /// `C(h)`.
    pub fn eval(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: h.len() });
        }
        self.eval_unchecked(h)
    }

    fn eval_unchecked(&self, h: &[f64]) -> Result<f64> {
        match &self.kind {
            ModelKind::T1 { family, a1, a2, b1, b2 } => {
                let mut v = b1 * unit_phi(family, a1.quad_form_sqrt(h)?)?;
                if *b2 != 0.0 {
                    v -= b2 * unit_phi(family, a2.quad_form_sqrt(h)?)?;
                }
                Ok(v)
            }
            ModelKind::T2 { family, a1, a2, b1, b2, eta } => {
                let r = norm(h);
                let mut v = b1 * unit_phi(family, a1.sqrt() * r)?;
                if *b2 != 0.0 {
                    let minus: f64 = h.iter().zip(eta).map(|(x, e)| (x - e) * (x - e)).sum::<f64>().sqrt();
                    let plus: f64 = h.iter().zip(eta).map(|(x, e)| (x + e) * (x + e)).sum::<f64>().sqrt();
                    let s = a2.sqrt();
                    v -= 0.5 * b2 * (unit_phi(family, s * minus)? + unit_phi(family, s * plus)?);
                }
                Ok(v)
            }
            ModelKind::T3 { phi1, phi2, a1, a2, b1, b2, u } => {
                let s = a1.sqrt();
                let first = match phi1 {
                    Component::Family(f) => unit_phi(f, s * norm(h))?,
                    Component::Model(m) => {
                        let scaled: Vec<f64> = h.iter().map(|x| s * x).collect();
                        m.eval_unchecked(&scaled)?
                    }
                };
                let mut v = b1 * first;
                if *b2 != 0.0 {
                    v -= b2 * derivative_bracket(phi2, *a2, u, h)? / origin_value(phi2)?;
                }
                Ok(v)
            }
            ModelKind::GeometricAniso { family, matrix } => unit_phi(family, matrix.quad_form_sqrt(h)?),
            ModelKind::AxisProduct { phi1, phi2, axis, a1, a2, sigma2 } => {
                let v1 = unit_phi(phi1, a1 * norm(h))?;
                let v2 = unit_phi(phi2, a2 * h[*axis].abs())?;
                Ok(sigma2 * v1 * v2)
            }
            ModelKind::Scaled { base, sigma2 } => Ok(sigma2 * base.eval_unchecked(h)?),
            ModelKind::Product { factors } => {
                let mut v = 1.0;
                for f in factors {
                    v *= f.eval_unchecked(h)?;
                }
                Ok(v)
            }
            ModelKind::OnAxis { base, axis } => base.eval_unchecked(&[h[*axis]]),
        }
    }

    /// `C(0)`.
    pub fn variance(&self) -> Result<f64> {
        self.eval_unchecked(&vec![0.0; self.dim])
    }

    /// Semivariogram `C(0) - C(h)`.
    pub fn variogram(&self, h: &[f64]) -> Result<f64> {
        Ok(self.variance()? - self.eval(h)?)
    }

    /// `σ² C` as a new model.
    pub fn scaled(self, sigma2: f64) -> Result<Self> {
        let d = self.dim;
        Self::with_dim(ModelKind::Scaled { base: Box::new(self), sigma2 }, d)
    }

    /// The correlation function `C / C(0)`.
    pub fn normalized(self) -> Result<Self> {
        let c0 = self.variance()?;
        if !(c0 > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize: C(0) = {c0}")));
        }
        self.scaled(1.0 / c0)
    }
}

/// `cos²θ φ''(r) + sin²θ φ'(r)/r` with `r = √a2‖h‖`, continued by `φ''(0)`
/// at `h = 0`.
///
/// Equals `uᵀ∇²[φ(√a2‖·‖)](h) u / a2`, so `-a2` times it is the covariance
/// of the directional derivative along `u` of a field with covariance
/// `φ(√a2‖h‖)`.
pub fn derivative_bracket(phi: &IsotropicFamily, a2: f64, u: &[f64], h: &[f64]) -> Result<f64> {
    if u.len() != h.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: h.len() });
    }
    if !phi.twice_differentiable_at_origin() {
        return Err(Error::NotDifferentiable { family: phi.to_string() });
    }
    let hn = norm(h);
    if hn == 0.0 {
        return phi.phi_d2(0.0);
    }
    let r = a2.sqrt() * hn;
    let un = norm(u);
    let dot: f64 = h.iter().zip(u).map(|(x, y)| x * y).sum();
    let cos2 = ((dot / (hn * un)).powi(2)).min(1.0);
    let sin2 = 1.0 - cos2;
    let mut v = cos2 * phi.phi_d2(r)?;
    if sin2 > 0.0 {
        v += sin2 * phi.phi_d1_over_t(r)?;
    }
    Ok(v)
}

/// Gram matrix `G_ij = C(x_i - x_j)`. Entries are computed independently in
/// parallel, so the result does not depend on the thread count.
pub fn gram_matrix(model: &CovarianceModel, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = points.len();
    let d = model.dim();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.len() });
    }
    let c0 = model.variance()?;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut h = vec![0.0; d];
            ((i + 1)..n)
                .map(|j| {
                    for k in 0..d {
                        h[k] = points[i][k] - points[j][k];
                    }
                    model.eval_unchecked(&h)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::from_element(n, n, c0);
    for (i, row) in rows.iter().enumerate() {
        for (off, v) in row.iter().enumerate() {
            let j = i + 1 + off;
            g[(i, j)] = *v;
            g[(j, i)] = *v;
        }
    }
    Ok(g)
}

/// Covariances `C(x_i - x0)` between each point and `x0`.
pub fn cross_covariances(model: &CovarianceModel, points: &[Vec<f64>], x0: &[f64]) -> Result<Vec<f64>> {
    let d = model.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x0.len() });
    }
    points
        .iter()
        .map(|p| {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: p.len() });
            }
            let h: Vec<f64> = p.iter().zip(x0).map(|(a, b)| a - b).collect();
            model.eval_unchecked(&h)
        })
        .collect()
}

/// Values of a planar covariance on a regular lattice, `h1` varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceGrid {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub values: Vec<f64>,
    /// `C(0)`; values are divided by it when normalized.
    pub variance: f64,
    pub normalized: bool,
}

impl CovarianceGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.h1.len() + i]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lag at which the minimum is attained.
    pub fn argmin(&self) -> [f64; 2] {
        let k = (0..self.values.len()).fold(0, |b, k| if self.values[k] < self.values[b] { k } else { b });
        let n1 = self.h1.len();
        [self.h1[k % n1], self.h2[k / n1]]
    }
}

fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// Evaluates a planar model on `[x_lo, x_hi] × [y_lo, y_hi]` with
/// `n1 × n2` nodes, optionally divided by `C(0)`.
pub fn covariance_grid(model: &CovarianceModel, extent: [f64; 4], n1: usize, n2: usize, normalize: bool) -> Result<CovarianceGrid> {
    if model.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: model.dim() });
    }
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidParameter(format!("grid resolution {n1}×{n2} needs at least 2 nodes per axis")));
    }
    let [x0, x1, y0, y1] = extent;
    if !(x0 < x1) || !(y0 < y1) || extent.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid grid extent {extent:?}")));
    }
    let h1 = lattice(x0, x1, n1);
    let h2 = lattice(y0, y1, n2);
    let variance = model.variance()?;
    let scale = if normalize { 1.0 / variance } else { 1.0 };
    let values = (0..n1 * n2)
        .into_par_iter()
        .map(|k| model.eval_unchecked(&[h1[k % n1], h2[k / n1]]).map(|v| v * scale))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CovarianceGrid { h1, h2, values, variance, normalized: normalize })
}

/// Compact decimal rendering: integers without a fraction, otherwise at
/// most six significant digits.
pub(crate) fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if (x - x.round()).abs() < 1e-9 * x.abs().max(1.0) && x.abs() < 1e15 {
        return format!("{}", x.round() as i64);
    }
    let digits = (5 - x.abs().log10().floor() as i32).clamp(0, 17);
    let s = format!("{:.*}", digits as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests;
