//! Closed-form d-radial spectral densities under the convention
//! `f(ω) = (2π)^{-d} ∫ exp(-i ωᵀh) C(h) dh`.

use super::{hankel_spectral_oracle, IsotropicFamily, OracleOptions};
use crate::error::{Error, Result};
use crate::specfun::{gamma, hyper_1f2, ln_bessel_k, ln_gamma};
use std::f64::consts::{LN_2, PI};

impl IsotropicFamily {
    /// `f_d(ω)` for the radial profile in `R^d`.
    pub fn spectral_density(&self, d: usize, omega: f64) -> Result<f64> {
        self.validate()?;
        if !(omega >= 0.0) {
            return Err(crate::error::domain("spectral_density", format!("ω = {omega} must be >= 0")));
        }
        if !self.has_spectral_density_in_dim(d) {
            return Err(Error::NoSpectralDensity(self.family_name(), d));
        }
        let df = d as f64;
        let half_d = 0.5 * df;
        Ok(match *self {
            Self::Matern { nu } => {
                let ln_c = ln_gamma(nu + half_d) - ln_gamma(nu) - half_d * PI.ln();
                (ln_c - (nu + half_d) * (omega * omega).ln_1p()).exp()
            }
            Self::Gaussian => (4.0 * PI).powf(-half_d) * (-0.25 * omega * omega).exp(),
            Self::Cauchy { delta } => {
                let ln_c = (1.0 - half_d - delta) * LN_2 - ln_gamma(delta) - half_d * PI.ln();
                let order = half_d - delta;
                if omega == 0.0 {
                    if delta <= half_d {
                        f64::INFINITY
                    } else {
                        // lim t^{-s} K_s(t) = Γ(-s) 2^{-s-1} for s < 0
                        (ln_c + ln_gamma(-order) + (-order - 1.0) * LN_2).exp()
                    }
                } else {
                    (ln_c + ln_bessel_k(order.abs(), omega)? - order * omega.ln()).exp()
                }
            }
            Self::CardinalSine => {
                if omega >= 1.0 {
                    0.0
                } else {
                    let c = 1.0 / (2.0 * PI.powf(0.5 * (df - 1.0)) * gamma(0.5 * (3.0 - df)));
                    c * (1.0 - omega * omega).powf(0.5 * (1.0 - df))
                }
            }
            Self::GaussHypergeometric { alpha, beta, gamma: g, dim } => {
                if d != dim {
                    let f = *self;
                    return hankel_spectral_oracle(|t| f.phi(t).unwrap_or(0.0), d, omega, &OracleOptions::compact(1.0));
                }
                let kappa = self.hyper_spectral_constant()?;
                kappa * hyper_1f2(alpha, beta, g, -0.25 * omega * omega)?.max(0.0)
            }
        })
    }

    /// `ln f_d(ω)`.
    pub fn log_spectral_density(&self, d: usize, omega: f64) -> Result<f64> {
        match *self {
            Self::Matern { nu } => {
                self.spectral_density(d, 0.0)?;
                let half_d = 0.5 * d as f64;
                Ok(ln_gamma(nu + half_d) - ln_gamma(nu) - half_d * PI.ln() - (nu + half_d) * (omega * omega).ln_1p())
            }
            Self::Gaussian => {
                self.spectral_density(d, 0.0)?;
                Ok(-0.5 * d as f64 * (4.0 * PI).ln() - 0.25 * omega * omega)
            }
            _ => Ok(self.spectral_density(d, omega)?.ln()),
        }
    }

    /// Multiplier of ₁F₂ in the spectral density of the Gauss hypergeometric
    /// profile in its own dimension.
    pub fn hyper_spectral_constant(&self) -> Result<f64> {
        match *self {
            Self::GaussHypergeometric { alpha, beta, gamma: g, dim } => {
                let half_d = 0.5 * dim as f64;
                let h0 = self.value_at_origin()?;
                let ln = ln_gamma(alpha) + ln_gamma(beta - half_d) + ln_gamma(g - half_d)
                    - (dim as f64) * LN_2
                    - half_d * PI.ln()
                    - ln_gamma(alpha - half_d)
                    - ln_gamma(beta)
                    - ln_gamma(g);
                Ok(h0 * ln.exp())
            }
            _ => Err(Error::InvalidParameter(format!("{self} has no hypergeometric spectral constant"))),
        }
    }

    pub(crate) fn family_name(&self) -> &'static str {
        match self {
            Self::Matern { .. } => "Matern",
            Self::Cauchy { .. } => "Cauchy",
            Self::GaussHypergeometric { .. } => "GaussHypergeometric",
            Self::CardinalSine => "CardinalSine",
            Self::Gaussian => "Gaussian",
        }
    }
}
