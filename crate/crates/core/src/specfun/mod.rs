//! Special functions used by the covariance families: gamma, Bessel `J` and
//! `K`, the hypergeometric functions ₂F₁ and ₁F₂, and the normalized
//! Schoenberg kernel `Ω_d`.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
pub(crate) mod dd;
mod gamma;
mod hyper;

pub use bessel::{bessel_j, bessel_k, ln_bessel_k};
pub use gamma::{digamma, gamma, ln_gamma, rgamma};
pub use hyper::{gauss_2f1, gauss_2f1_complement, hyper_1f2};

use crate::error::{domain, Result};

/// `Ω_d(s) = 2^{(d-2)/2} Γ(d/2) s^{-(d-2)/2} J_{(d-2)/2}(s)`, with `Ω_d(0) = 1`.
///
/// `Ω_1 = cos`, `Ω_3(s) = sin(s)/s`; every isotropic correlation in `R^d`
/// is a mixture of `Ω_d(u·)` over `u >= 0`.
pub fn omega_d(d: usize, s: f64) -> Result<f64> {
    if d == 0 {
        return Err(domain("omega_d", "dimension must be >= 1"));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(domain("omega_d", format!("argument {s} must be finite and >= 0")));
    }
    let nu = 0.5 * (d as f64 - 2.0);
    Ok(match d {
        1 => s.cos(),
        3 => {
            if s < 1e-4 {
                1.0 - s * s / 6.0
            } else {
                s.sin() / s
            }
        }
        _ if s < 2.0 + nu => hyper::hyper_0f1(nu + 1.0, -0.25 * s * s),
        _ => {
            let j = bessel_j(nu, s)?;
            (nu * (2.0f64).ln() + ln_gamma(nu + 1.0) - nu * s.ln()).exp() * j
        }
    })
}

/// Global minimum of `Ω_d` on `[0, s_max]`: a grid scan with step `0.01`
/// refined by golden-section search. Returns `(s*, Ω_d(s*))`.
pub fn omega_infimum(d: usize, s_max: f64) -> Result<(f64, f64)> {
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(domain("omega_infimum", format!("upper limit {s_max} must be finite and > 0")));
    }
    let step = 0.01;
    let n = (s_max / step).ceil() as usize;
    let mut best = (0.0, omega_d(d, 0.0)?);
    for k in 1..=n {
        let s = (k as f64 * step).min(s_max);
        let v = omega_d(d, s)?;
        if v < best.1 {
            best = (s, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(s_max));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (omega_d(d, x1)?, omega_d(d, x2)?);
    while hi - lo > 1e-12 * hi.max(1.0) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = omega_d(d, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = omega_d(d, x2)?;
        }
    }
    let s = 0.5 * (lo + hi);
    let v = omega_d(d, s)?;
    Ok(if v < best.1 { (s, v) } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_normalization_and_closed_forms() {
        for d in 1..=10 {
            assert_eq!(omega_d(d, 0.0).unwrap(), 1.0);
        }
        assert!(omega_d(3, PI).unwrap().abs() < 1e-15);
        assert!((omega_d(1, 1.3).unwrap() - 1.3f64.cos()).abs() < 1e-15);
        for &s in &[0.5, 2.5, 4.0, 17.0] {
            assert!((omega_d(2, s).unwrap() - libm::j0(s)).abs() < 1e-14);
            // Ω_4(s) = 2 J_1(s)/s
            assert!((omega_d(4, s).unwrap() - 2.0 * libm::j1(s) / s).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_series_matches_bessel_branch() {
        for d in [2usize, 4, 5, 6, 7, 9, 10] {
            let nu = 0.5 * (d as f64 - 2.0);
            let s = 2.0 + nu;
            let a = hyper::hyper_0f1(nu + 1.0, -0.25 * s * s);
            let b = omega_d(d, s + 1e-13).unwrap();
            assert!((a - b).abs() < 1e-12, "d={d}: {a} vs {b}");
        }
    }

    #[test]
    fn omega_infimum_at_the_first_trough() {
        // Ω_3 = sin(s)/s is stationary at the first positive root of tan s = s
        let (s, v) = omega_infimum(3, 50.0).unwrap();
        assert!((s - 4.493409457909064).abs() < 1e-6);
        assert!((v - s.sin() / s).abs() < 1e-15);
        // Ω_2 = J_0 is stationary at the first zero of J_1
        let (s, v) = omega_infimum(2, 50.0).unwrap();
        assert!((s - 3.831705970207512).abs() < 1e-6);
        assert!((v - libm::j0(3.831705970207512)).abs() < 1e-12);
        let (s, v) = omega_infimum(1, 10.0).unwrap();
        assert!((s - std::f64::consts::PI).abs() < 1e-6 && (v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn omega_rejects_bad_input() {
        assert!(omega_d(0, 1.0).is_err());
        assert!(omega_d(2, -1.0).is_err());
    }
}
