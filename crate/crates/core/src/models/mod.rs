//! Isotropic covariance families with their radial derivatives and
//! d-radial spectral densities.
//!
//! A family is a radial profile `φ: [0, ∞) → R`; an isotropic covariance in
//! `R^d` is `h ↦ φ(‖h‖)`. All profiles except the Gauss hypergeometric one
//! satisfy `φ(0) = 1`.

mod hankel;
mod spectral;

pub use hankel::{hankel_spectral_oracle, OracleOptions};

use crate::error::{domain, Error, Result};
use crate::specfun::{gamma, gauss_2f1_complement, ln_bessel_k, ln_gamma};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A radial covariance family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IsotropicFamily {
    /// `M_ν(t) = 2^{1-ν}/Γ(ν) t^ν K_ν(t)`.
    Matern { nu: f64 },
    /// `C_δ(t) = (1 + t²)^{-δ}`.
    Cauchy { delta: f64 },
    /// Compactly supported Gauss hypergeometric profile on `[0, 1]`, built for
    /// dimension `dim` (0 means "take it from the enclosing model").
    GaussHypergeometric {
        alpha: f64,
        beta: f64,
        gamma: f64,
        #[serde(default)]
        dim: usize,
    },
    /// `W(t) = sin(t)/t`, `W(0) = 1`.
    CardinalSine,
    /// `exp(-t²)`.
    Gaussian,
}

/// Qualitative properties used by the validity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyTraits {
    pub twice_differentiable_at_origin: bool,
    pub spectral_density_nonincreasing: bool,
    pub has_spectral_density: bool,
}

impl fmt::Display for IsotropicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Matern { nu } => write!(f, "Matern(nu={nu})"),
            Self::Cauchy { delta } => write!(f, "Cauchy(delta={delta})"),
            Self::GaussHypergeometric { alpha, beta, gamma, dim } => {
                write!(f, "GaussHypergeometric(alpha={alpha}, beta={beta}, gamma={gamma}, d={dim})")
            }
            Self::CardinalSine => write!(f, "CardinalSine"),
            Self::Gaussian => write!(f, "Gaussian"),
        }
    }
}

/// Parameters `(a, b, c, p)` of `H(t) = z^p ₂F₁(a, b; c; z)` with `z = 1 - t²`.
#[derive(Debug, Clone, Copy)]
struct HyperParams {
    a: f64,
    b: f64,
    c: f64,
    p: f64,
}

impl IsotropicFamily {
    pub fn matern(nu: f64) -> Self {
        Self::Matern { nu }
    }

    pub fn cauchy(delta: f64) -> Self {
        Self::Cauchy { delta }
    }

    pub fn gauss_hypergeometric(alpha: f64, beta: f64, gamma: f64, dim: usize) -> Self {
        Self::GaussHypergeometric { alpha, beta, gamma, dim }
    }

    /// Fills in the dimension of a Gauss hypergeometric family left at 0.
    pub fn with_default_dim(self, d: usize) -> Self {
        match self {
            Self::GaussHypergeometric { alpha, beta, gamma, dim: 0 } => {
                Self::GaussHypergeometric { alpha, beta, gamma, dim: d }
            }
            other => other,
        }
    }

    /// Checks that the profile is well defined (its own parameter domain).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Matern { nu } if !(nu > 0.0 && nu.is_finite()) => {
                Err(Error::InvalidParameter(format!("Matern nu = {nu} must be > 0")))
            }
            Self::Cauchy { delta } if !(delta > 0.0 && delta.is_finite()) => {
                Err(Error::InvalidParameter(format!("Cauchy delta = {delta} must be > 0")))
            }
            Self::GaussHypergeometric { dim, .. } if dim == 0 => Err(Error::InvalidParameter(
                "GaussHypergeometric dimension is unset".into(),
            )),
            Self::GaussHypergeometric { alpha, beta, gamma, dim } => {
                if Self::hyper_conditions(alpha, beta, gamma, dim) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "GaussHypergeometric({alpha}, {beta}, {gamma}) violates 2α > d, \
                         2(β-α)(γ-α) >= α, 2(β+γ) >= 6α+1 for d = {dim}"
                    )))
                }
            }
            _ => Ok(()),
        }
    }

    fn hyper_conditions(alpha: f64, beta: f64, gamma: f64, d: usize) -> bool {
        let tol = 1e-12;
        2.0 * alpha > d as f64
            && 2.0 * (beta - alpha) * (gamma - alpha) >= alpha - tol
            && 2.0 * (beta + gamma) >= 6.0 * alpha + 1.0 - tol
    }

    /// Membership of the profile in the Schoenberg class `Φ_d`.
    pub fn valid_in_dim(&self, d: usize) -> bool {
        if self.validate().is_err() || d == 0 {
            return false;
        }
        match *self {
            Self::Matern { .. } | Self::Cauchy { .. } | Self::Gaussian => true,
            Self::CardinalSine => d <= 3,
            Self::GaussHypergeometric { dim, .. } => d <= dim,
        }
    }

    pub fn twice_differentiable_at_origin(&self) -> bool {
        match *self {
            Self::Matern { nu } => nu > 1.0,
            Self::Cauchy { .. } | Self::Gaussian | Self::CardinalSine => true,
            Self::GaussHypergeometric { alpha, dim, .. } => 2.0 * alpha > (dim + 2) as f64,
        }
    }

    pub fn has_spectral_density_in_dim(&self, d: usize) -> bool {
        if !self.valid_in_dim(d) {
            return false;
        }
        match *self {
            Self::Cauchy { delta } => delta > (d as f64 - 1.0) / 4.0,
            Self::CardinalSine => d <= 2,
            _ => true,
        }
    }

    /// Whether the d-radial spectral density is known to be nonincreasing.
    pub fn spectral_density_nonincreasing_in_dim(&self, d: usize) -> bool {
        if !self.has_spectral_density_in_dim(d) {
            return false;
        }
        match *self {
            Self::Matern { .. } | Self::Cauchy { .. } | Self::Gaussian => true,
            // flat on [0, 1) in d = 1, increasing on [0, 1) in d = 2
            Self::CardinalSine => d == 1,
            // montée: the Φ_{d+2} constraints make f_d nonincreasing
            Self::GaussHypergeometric { alpha, beta, gamma, .. } => {
                Self::hyper_conditions(alpha, beta, gamma, d + 2)
            }
        }
    }

    pub fn traits(&self, d: usize) -> FamilyTraits {
        FamilyTraits {
            twice_differentiable_at_origin: self.twice_differentiable_at_origin(),
            spectral_density_nonincreasing: self.spectral_density_nonincreasing_in_dim(d),
            has_spectral_density: self.has_spectral_density_in_dim(d),
        }
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        match *self {
            Self::GaussHypergeometric { alpha, beta, gamma, dim } => {
                let half_d = 0.5 * dim as f64;
                Some(HyperParams {
                    a: beta - alpha,
                    b: gamma - alpha,
                    c: beta - alpha + gamma - half_d,
                    p: beta - alpha + gamma - half_d - 1.0,
                })
            }
            _ => None,
        }
    }

    /// Value at the origin: 1, except for the Gauss hypergeometric profile.
    pub fn value_at_origin(&self) -> Result<f64> {
        self.validate()?;
        match self.hyper_params() {
            Some(HyperParams { a, b, c, .. }) => {
                Ok(gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b)))
            }
            None => Ok(1.0),
        }
    }

    fn check_arg(t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 {
            Err(domain("phi", format!("radial argument {t} must be >= 0")))
        } else {
            Ok(())
        }
    }

    /// The radial profile `φ(t)`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        self.validate()?;
        Self::check_arg(t)?;
        if t.is_infinite() {
            return Ok(0.0);
        }
        Ok(match *self {
            Self::Matern { nu } => matern(nu, t)?,
            Self::Cauchy { delta } => (1.0 + t * t).powf(-delta),
            Self::Gaussian => (-t * t).exp(),
            Self::CardinalSine => sinc(t),
            Self::GaussHypergeometric { .. } => {
                if t >= 1.0 {
                    return Ok(0.0);
                }
                if t == 0.0 {
                    return self.value_at_origin();
                }
                let hp = self.hyper_params().expect("hypergeometric");
                let w = t * t;
                let z = 1.0 - w;
                z.powf(hp.p) * gauss_2f1_complement(hp.a, hp.b, hp.c, z, w)?
            }
        })
    }

    /// `φ(t)/φ(0)`.
    pub fn phi_normalized(&self, t: f64) -> Result<f64> {
        Ok(self.phi(t)? / self.value_at_origin()?)
    }

    /// First radial derivative `φ'(t)`.
    pub fn phi_d1(&self, t: f64) -> Result<f64> {
        self.validate()?;
        Self::check_arg(t)?;
        if t == 0.0 {
            return match *self {
                Self::Matern { nu } if nu < 0.5 => Err(Error::NotDifferentiable { family: self.to_string() }),
                Self::Matern { nu } if nu == 0.5 => Ok(-1.0),
                _ => Ok(0.0),
            };
        }
        Ok(t * self.phi_d1_over_t(t)?)
    }

    /// `φ'(t)/t`, continued at `t = 0` by its limit `φ''(0)`.
    pub fn phi_d1_over_t(&self, t: f64) -> Result<f64> {
        self.validate()?;
        Self::check_arg(t)?;
        if t == 0.0 {
            return self.phi_d2(0.0);
        }
        if t.is_infinite() {
            return Ok(0.0);
        }
        Ok(match *self {
            Self::Matern { nu } => matern_d1_over_t(nu, t)?,
            Self::Cauchy { delta } => -2.0 * delta * (1.0 + t * t).powf(-delta - 1.0),
            Self::Gaussian => -2.0 * (-t * t).exp(),
            Self::CardinalSine => {
                if t < 0.5 {
                    // Σ_{k>=1} (-1)^k 2k t^{2k-2}/(2k+1)!
                    sinc_series(t, |k| 2.0 * k)
                } else {
                    let (s, c) = t.sin_cos();
                    (t * c - s) / (t * t * t)
                }
            }
            Self::GaussHypergeometric { .. } => {
                if t >= 1.0 {
                    return Ok(0.0);
                }
                -2.0 * self.hyper_dz(t)?.0
            }
        })
    }

    /// Second radial derivative `φ''(t)`.
    pub fn phi_d2(&self, t: f64) -> Result<f64> {
        self.validate()?;
        Self::check_arg(t)?;
        if t == 0.0 && !self.twice_differentiable_at_origin() {
            return Err(Error::NotDifferentiable { family: self.to_string() });
        }
        if t.is_infinite() {
            return Ok(0.0);
        }
        Ok(match *self {
            Self::Matern { nu } => matern_d2(nu, t)?,
            Self::Cauchy { delta } => {
                let u = 1.0 + t * t;
                -2.0 * delta * u.powf(-delta - 1.0) + 4.0 * delta * (delta + 1.0) * t * t * u.powf(-delta - 2.0)
            }
            Self::Gaussian => (4.0 * t * t - 2.0) * (-t * t).exp(),
            Self::CardinalSine => {
                if t < 0.5 {
                    // Σ_{k>=1} (-1)^k 2k(2k-1) t^{2k-2}/(2k+1)!
                    sinc_series(t, |k| 2.0 * k * (2.0 * k - 1.0))
                } else {
                    let (s, c) = t.sin_cos();
                    ((2.0 - t * t) * s - 2.0 * t * c) / (t * t * t)
                }
            }
            Self::GaussHypergeometric { .. } => {
                if t >= 1.0 {
                    return Ok(0.0);
                }
                let (d1, d2) = self.hyper_dz(t)?;
                4.0 * t * t * d2 - 2.0 * d1
            }
        })
    }

    /// `(dφ/dz, d²φ/dz²)` for the hypergeometric profile in `z = 1 - t²`.
    /// At `t = 0` the second entry is returned as 0; it only ever enters
    /// multiplied by `t²`.
    fn hyper_dz(&self, t: f64) -> Result<(f64, f64)> {
        let HyperParams { a, b, c, p } = self.hyper_params().expect("hypergeometric");
        let w = t * t;
        let z = 1.0 - w;
        let (f0, f1) = if t == 0.0 {
            let s = c - a - b;
            let f0 = gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b));
            let f1 = a * b / c * gamma(c + 1.0) * gamma(s - 1.0) / (gamma(c - a) * gamma(c - b));
            (f0, f1)
        } else {
            (
                gauss_2f1_complement(a, b, c, z, w)?,
                a * b / c * gauss_2f1_complement(a + 1.0, b + 1.0, c + 1.0, z, w)?,
            )
        };
        let d1 = p * z.powf(p - 1.0) * f0 + z.powf(p) * f1;
        if t == 0.0 {
            return Ok((d1, 0.0));
        }
        let f2 = a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0))
            * gauss_2f1_complement(a + 2.0, b + 2.0, c + 2.0, z, w)?;
        let d2 = p * (p - 1.0) * z.powf(p - 2.0) * f0 + 2.0 * p * z.powf(p - 1.0) * f1 + z.powf(p) * f2;
        Ok((d1, d2))
    }
}

fn sinc(t: f64) -> f64 {
    if t < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// `Σ_{k>=1} (-1)^k coef(k) t^{2k-2} / (2k+1)!` for small `t`.
fn sinc_series(t: f64, coef: impl Fn(f64) -> f64) -> f64 {
    let t2 = t * t;
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut fact = 6.0; // 3!
    for k in 1..=12 {
        let kf = k as f64;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * coef(kf) * pow / fact;
        pow *= t2;
        fact *= (2.0 * kf + 2.0) * (2.0 * kf + 3.0);
    }
    sum
}

fn matern_log_const(nu: f64) -> f64 {
    (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu)
}

/// `exp(ln c + a ln t + ln K_order(t))`.
fn scaled_k(log_const: f64, a: f64, order: f64, t: f64) -> Result<f64> {
    Ok((log_const + a * t.ln() + ln_bessel_k(order, t)?).exp())
}

fn matern(nu: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    if nu == 0.5 {
        return Ok((-t).exp());
    }
    if nu == 1.5 {
        return Ok((1.0 + t) * (-t).exp());
    }
    if nu == 2.5 {
        return Ok((1.0 + t + t * t / 3.0) * (-t).exp());
    }
    if t < 1e-200 {
        return Ok(1.0);
    }
    let v = scaled_k(matern_log_const(nu), nu, nu, t)?;
    Ok(if v.is_finite() { v.min(1.0) } else { 1.0 })
}

fn matern_d1_over_t(nu: f64, t: f64) -> Result<f64> {
    if nu == 0.5 {
        return Ok(-(-t).exp() / t);
    }
    if nu == 1.5 {
        return Ok(-(-t).exp());
    }
    if nu == 2.5 {
        return Ok(-(1.0 + t) * (-t).exp() / 3.0);
    }
    // φ'(t) = -c t^ν K_{ν-1}(t)
    Ok(-scaled_k(matern_log_const(nu), nu - 1.0, nu - 1.0, t)?)
}

fn matern_d2(nu: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(-1.0 / (2.0 * (nu - 1.0)));
    }
    if nu == 0.5 {
        return Ok((-t).exp());
    }
    if nu == 1.5 {
        return Ok((t - 1.0) * (-t).exp());
    }
    if nu == 2.5 {
        return Ok(-(1.0 + t - t * t) * (-t).exp() / 3.0);
    }
    // φ''(t) = c [t^ν K_{ν-2}(t) - t^{ν-1} K_{ν-1}(t)]
    let lc = matern_log_const(nu);
    Ok(scaled_k(lc, nu, nu - 2.0, t)? - scaled_k(lc, nu - 1.0, nu - 1.0, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd1(f: &IsotropicFamily, t: f64, h: f64) -> f64 {
        (f.phi(t + h).unwrap() - f.phi(t - h).unwrap()) / (2.0 * h)
    }

    fn fd2(f: &IsotropicFamily, t: f64, h: f64) -> f64 {
        (f.phi_d1(t + h).unwrap() - f.phi_d1(t - h).unwrap()) / (2.0 * h)
    }

    fn families() -> Vec<IsotropicFamily> {
        vec![
            IsotropicFamily::matern(0.5),
            IsotropicFamily::matern(0.8),
            IsotropicFamily::matern(1.5),
            IsotropicFamily::matern(2.2),
            IsotropicFamily::matern(2.5),
            IsotropicFamily::matern(3.7),
            IsotropicFamily::cauchy(0.75),
            IsotropicFamily::cauchy(2.0),
            IsotropicFamily::CardinalSine,
            IsotropicFamily::Gaussian,
            IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 2),
            IsotropicFamily::gauss_hypergeometric(2.5, 3.5, 5.0, 3),
        ]
    }

    #[test]
    fn trivial_values() {
        let m = IsotropicFamily::matern(0.5);
        assert!((m.phi(1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!(IsotropicFamily::CardinalSine.phi(std::f64::consts::PI).unwrap().abs() < 1e-16);
        assert_eq!(IsotropicFamily::cauchy(1.0).phi(1.0).unwrap(), 0.5);
        let h = IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 2);
        assert_eq!(h.phi(1.0).unwrap(), 0.0);
        assert_eq!(h.phi(2.5).unwrap(), 0.0);
        assert!((h.value_at_origin().unwrap() - 1.640625).abs() < 1e-13);
        assert!((h.phi_normalized(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((IsotropicFamily::matern(1.5).phi_d2(1.0).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn generic_matern_matches_closed_forms() {
        // ν slightly off the half-integers exercises the Bessel path
        for &t in &[0.01, 0.3, 1.0, 4.0, 25.0] {
            let a = matern(1.5 + 1e-13, t).unwrap();
            let b = (1.0 + t) * (-t).exp();
            assert!((a - b).abs() < 1e-11 * b.max(1e-300), "t={t}");
            let a = matern_d2(2.5 + 1e-13, t).unwrap();
            let b = -(1.0 + t - t * t) * (-t).exp() / 3.0;
            assert!((a - b).abs() < 1e-10 * b.abs().max(1e-12), "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn hypergeometric_profile_is_continuous_at_origin() {
        let h = IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 2);
        let v0 = h.phi(0.0).unwrap();
        let v = h.phi(1e-6).unwrap();
        assert!((v - v0).abs() < 1e-9);
        let d0 = h.phi_d2(0.0).unwrap();
        let d = h.phi_d2(1e-4).unwrap();
        assert!((d - d0).abs() < 1e-5 * d0.abs(), "{d} vs {d0}");
        assert!((h.phi_d1_over_t(1e-7).unwrap() - d0).abs() < 1e-6 * d0.abs());
    }

    #[test]
    fn origin_curvatures() {
        assert!((IsotropicFamily::CardinalSine.phi_d2(0.0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        for &delta in &[0.5, 1.0, 2.5] {
            let v = IsotropicFamily::cauchy(delta).phi_d2(0.0).unwrap();
            assert!((v + 2.0 * delta).abs() < 1e-14);
        }
        assert!((IsotropicFamily::matern(1.5).phi_d2(0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((IsotropicFamily::matern(3.0).phi_d2(0.0).unwrap() + 0.25).abs() < 1e-15);
        assert!(matches!(
            IsotropicFamily::matern(1.0).phi_d2(0.0),
            Err(Error::NotDifferentiable { .. })
        ));
        assert!(IsotropicFamily::matern(0.5).phi_d2(0.0).is_err());
    }

    #[test]
    fn derivatives_pass_finite_difference_sweep() {
        for f in families() {
            for &t in &[0.2, 0.45, 0.55, 0.9, 1.7, 3.3] {
                if matches!(f, IsotropicFamily::GaussHypergeometric { .. }) && t >= 0.9 {
                    continue;
                }
                let d1 = f.phi_d1(t).unwrap();
                let d2 = f.phi_d2(t).unwrap();
                // h-sweep: the best step must reach 1e-6 relative
                let best1 = [1e-3, 1e-4, 1e-5]
                    .iter()
                    .map(|&h| (fd1(&f, t, h) - d1).abs() / d1.abs().max(1e-3))
                    .fold(f64::INFINITY, f64::min);
                let best2 = [1e-3, 1e-4, 1e-5]
                    .iter()
                    .map(|&h| (fd2(&f, t, h) - d2).abs() / d2.abs().max(1e-3))
                    .fold(f64::INFINITY, f64::min);
                assert!(best1 < 1e-6, "{f} t={t}: phi' rel err {best1}");
                assert!(best2 < 1e-6, "{f} t={t}: phi'' rel err {best2}");
            }
        }
    }

    #[test]
    fn normalized_profiles_are_bounded() {
        for f in families() {
            let v0 = f.value_at_origin().unwrap();
            for i in 0..=2000 {
                let t = i as f64 * 0.05;
                let v = f.phi(t).unwrap() / v0;
                assert!(v.abs() <= 1.0 + 1e-12, "{f} at {t}: {v}");
                if f == IsotropicFamily::CardinalSine {
                    assert!(v >= -0.218);
                }
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(IsotropicFamily::matern(0.0).phi(1.0).is_err());
        assert!(IsotropicFamily::cauchy(-1.0).phi(1.0).is_err());
        assert!(IsotropicFamily::Gaussian.phi(-1.0).is_err());
        // 2(β+γ) >= 6α+1 violated
        assert!(IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 5.0, 2).phi(0.5).is_err());
        assert!(IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 0).phi(0.5).is_err());
    }

    #[test]
    fn traits_table() {
        let m = IsotropicFamily::matern(1.5).traits(2);
        assert!(m.twice_differentiable_at_origin && m.spectral_density_nonincreasing && m.has_spectral_density);
        assert!(!IsotropicFamily::matern(1.0).twice_differentiable_at_origin());
        let w = IsotropicFamily::CardinalSine;
        assert!(w.valid_in_dim(3) && !w.valid_in_dim(4));
        assert!(!w.spectral_density_nonincreasing_in_dim(2));
        assert!(w.spectral_density_nonincreasing_in_dim(1));
        assert!(!w.has_spectral_density_in_dim(3));
        let h = IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 2);
        assert!(h.twice_differentiable_at_origin());
        assert!(h.spectral_density_nonincreasing_in_dim(2));
        let h_flat = IsotropicFamily::gauss_hypergeometric(1.5, 3.0, 5.0, 2);
        assert!(h_flat.valid_in_dim(2));
        assert!(!h_flat.twice_differentiable_at_origin());
        assert!(!h_flat.spectral_density_nonincreasing_in_dim(2));
        assert!(!IsotropicFamily::cauchy(0.2).has_spectral_density_in_dim(2));
    }

    #[test]
    fn serde_roundtrip_tagging() {
        let f = IsotropicFamily::matern(1.5);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"matern","nu":1.5}"#);
        let back: IsotropicFamily = serde_json::from_str(r#"{"family":"gauss_hypergeometric","alpha":3,"beta":3.5,"gamma":6}"#).unwrap();
        assert_eq!(back.with_default_dim(2), IsotropicFamily::gauss_hypergeometric(3.0, 3.5, 6.0, 2));
    }
}
