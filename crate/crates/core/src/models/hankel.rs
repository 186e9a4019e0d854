//! Numerical d-radial spectral density by a Hankel-type transform.
//!
//! `f_d(ω) = c_d ∫_0^∞ Ω_d(ωh) φ(h) h^{d-1} dh` with
//! `c_d = 1 / (2^{d-1} π^{d/2} Γ(d/2))`. The oscillatory tail is split at the
//! asymptotic zeros of `Ω_d` and the partial sums are accelerated with
//! Wynn's epsilon algorithm or repeated averaging.
//!
//! The alternative is a smooth cutoff: `g(h)·w(h/T)` is integrated where `w`
//! falls from 1 to 0 on `[T/2, T]` with all derivatives vanishing at both
//! ends, so the truncation error decays faster than any power of `ωT`. It is
//! used when `ω` is large enough that `T = CUTOFF_PHASE / ω` stays below
//! `50·truncation`, since extrapolating alternating sums amplifies rounding
//! once the density is many orders below the profile. Profiles that oscillate
//! themselves, such as the cardinal sine, defeat the extrapolation at every
//! `ω`; [`OracleOptions::tapered`] forces the cutoff with a given radius.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, CompensatedSum, WynnEpsilon};
use crate::specfun::dd::two_prod;
use crate::specfun::{ln_gamma, omega_d};
use std::f64::consts::{LN_2, PI};

/// Controls for [`hankel_spectral_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Radius integrated before tail acceleration starts.
    pub truncation: f64,
    /// Target relative accuracy.
    pub tolerance: f64,
    /// Maximum number of half-period tail panels.
    pub max_panels: usize,
    /// Support radius for compactly supported profiles.
    pub support: Option<f64>,
    /// Smooth cutoff radius for oscillating profiles.
    pub taper: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            truncation: 40.0,
            tolerance: 1e-10,
            max_panels: 20_000,
            support: None,
            taper: None,
        }
    }
}

impl OracleOptions {
    pub fn compact(radius: f64) -> Self {
        Self {
            support: Some(radius),
            ..Self::default()
        }
    }

    pub fn tapered(radius: f64) -> Self {
        Self {
            taper: Some(radius),
            ..Self::default()
        }
    }
}

/// `C^∞` step from 1 at `s <= 0` to 0 at `s >= 1`.
fn smooth_cutoff(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    b / (a + b)
}

fn normalizing_constant(d: usize) -> f64 {
    let df = d as f64;
    (-((df - 1.0) * LN_2 + 0.5 * df * PI.ln() + ln_gamma(0.5 * df))).exp()
}

/// Phase `ωT` of the automatic smooth cutoff.
const CUTOFF_PHASE: f64 = 1600.0;

/// Number of averaging sweeps in the Euler tail estimate.
const EULER_DEPTH: usize = 20;

/// `true` when the averaged estimate exists and already agrees with `wynn`;
/// the averaged value is then allowed to finish converging.
fn close_to_averaged(wynn: f64, averaged: f64, tol: f64) -> bool {
    averaged.is_finite() && (wynn - averaged).abs() <= 1e3 * tol * wynn.abs()
}

/// One panel to relative accuracy `tol`, or absolute accuracy `floor`.
fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, floor: f64) -> Result<f64> {
    Ok(integrate(f, lo, hi, floor.max(1e-300), tol, 400)?.value)
}

/// Numerical `f_d(ω)` of the radial profile `phi`.
pub fn hankel_spectral_oracle<P: Fn(f64) -> f64>(
    phi: P,
    d: usize,
    omega: f64,
    opts: &OracleOptions,
) -> Result<f64> {
    if d == 0 || !(omega >= 0.0) || !omega.is_finite() {
        return Err(crate::error::domain("hankel_spectral_oracle", format!("d = {d}, ω = {omega}")));
    }
    let c = normalizing_constant(d);
    let power = (d - 1) as i32;
    let tol = opts.tolerance.max(1e-14);
    let panel_tol = (tol * 1e-3).max(1e-14);

    if omega == 0.0 {
        let g = |h: f64| phi(h) * h.powi(power);
        let q = match opts.support {
            Some(r) => integrate(g, 0.0, r, 1e-300, panel_tol, 2000)?,
            None => integrate_to_infinity(g, 0.0, 1e-300, panel_tol, 4000)?,
        };
        return Ok(c * q.value);
    }

    // the phase ωh is carried to twice working precision and its rounding
    // error applied through Ω_d'(s) = -(s/d) Ω_{d+2}(s)
    let g = |h: f64| {
        let (s, ds) = two_prod(omega, h);
        let mut k = omega_d(d, s).unwrap_or(0.0);
        if ds != 0.0 {
            k -= ds * s / d as f64 * omega_d(d + 2, s).unwrap_or(0.0);
        }
        k * phi(h) * h.powi(power)
    };
    // Ω_d(s) ~ s^{-(d-1)/2} cos(s - (d-1)π/4)
    let phase = (d as f64 - 1.0) * PI / 4.0;
    let zero = |k: usize| ((k as f64 + 0.5) * PI + phase) / omega;

    let auto_radius = (CUTOFF_PHASE / omega).max(opts.truncation);
    let cutoff = match (opts.taper, opts.support) {
        (Some(t), _) => Some(t),
        (None, None) if auto_radius <= 50.0 * opts.truncation => Some(auto_radius),
        _ => None,
    };
    if let Some(t) = cutoff {
        if !(t > 0.0) {
            return Err(crate::error::domain("hankel_spectral_oracle", format!("taper radius {t} must be > 0")));
        }
        let tapered = |h: f64| g(h) * smooth_cutoff(2.0 * h / t - 1.0);
        let step = 0.5 * (PI / omega).min(1.0);
        let n = (t / step).ceil() as usize;
        let mut sum = CompensatedSum::default();
        let mut abs_sum = 0.0f64;
        let first = step * g(0.5 * step).abs();
        for k in 0..n {
            let lo = k as f64 * step;
            let hi = ((k + 1) as f64 * step).min(t);
            // absolute floor at a fraction of a typical panel
            let typical = first.max(abs_sum / (k.max(1) as f64));
            let v = panel(&tapered, lo, hi, panel_tol, panel_tol * typical)?;
            sum.add(v);
            abs_sum += v.abs();
        }
        return Ok(c * sum.value());
    }

    if let Some(r) = opts.support {
        let mut sum = CompensatedSum::default();
        let mut lo = 0.0;
        let mut k = 0;
        let mut abs_sum = 0.0f64;
        while lo < r {
            let hi = zero(k).min(r);
            if hi > lo {
                let v = panel(&g, lo, hi, panel_tol, 1e-17 * abs_sum)?;
                sum.add(v);
                abs_sum += v.abs();
            }
            lo = hi;
            k += 1;
        }
        return Ok(c * sum.value());
    }

    let mut k = 0;
    while zero(k) < opts.truncation {
        k += 1;
    }
    let head_end = zero(k);
    let mut sum = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let mut lo = 0.0;
    for j in 0..=k {
        let hi = zero(j);
        let v = panel(&g, lo, hi, panel_tol, 1e-17 * abs_sum)?;
        sum.add(v);
        abs_sum += v.abs();
        lo = hi;
    }
    debug_assert_eq!(lo, head_end);

    // Two tail accelerators run side by side: Wynn's epsilon, and repeated
    // averaging of the last partial sums (the Euler transform), which is
    // slower to engage but does not amplify rounding when the alternating
    // panels are large compared with the limit.
    let mut wynn = WynnEpsilon::new();
    let mut estimate = wynn.push(sum.value());
    let mut partial = vec![sum.value()];
    let mut averaged = f64::NAN;
    let (mut calm, mut calm_avg) = (0, 0);
    for n in 1..=opts.max_panels {
        let hi = zero(k + n);
        let v = panel(&g, lo, hi, panel_tol, 1e-17 * abs_sum)?;
        lo = hi;
        sum.add(v);
        abs_sum += v.abs();
        if v.abs() <= 1e-17 * abs_sum {
            return Ok(c * sum.value());
        }
        partial.push(sum.value());
        if partial.len() > EULER_DEPTH {
            let mut t = partial[partial.len() - EULER_DEPTH - 1..].to_vec();
            for depth in (1..=EULER_DEPTH).rev() {
                for j in 0..depth {
                    t[j] = 0.5 * (t[j] + t[j + 1]);
                }
            }
            let change = (t[0] - averaged).abs();
            averaged = t[0];
            if change <= tol * averaged.abs().max(1e-300) {
                calm_avg += 1;
                if calm_avg >= 3 {
                    return Ok(c * averaged);
                }
            } else {
                calm_avg = 0;
            }
        }
        estimate = wynn.push(sum.value());
        let scale = estimate.abs().max(1e-300);
        if n >= 8 && wynn.change() <= tol * scale {
            calm += 1;
            if calm >= 3 && calm_avg == 0 && !close_to_averaged(estimate, averaged, tol) {
                return Ok(c * estimate);
            }
        } else {
            calm = 0;
        }
    }
    Err(Error::NonConvergence {
        func: "hankel_spectral_oracle",
        iterations: opts.max_panels,
        achieved: wynn.change() / estimate.abs(),
    })
}
