//! Bessel functions of the first kind (integer and half-integer order) and
//! modified Bessel functions of the second kind (any real order).

use super::gamma::{ln_gamma, temme_gammas};
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;

/// `J_order(t)` for `order` a nonnegative integer or a half-integer `>= -1/2`.
pub fn bessel_j(order: f64, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(domain("bessel_j", format!("argument {t} must be finite and >= 0")));
    }
    if !order.is_finite() || order < -0.5 {
        return Err(domain("bessel_j", format!("unsupported order {order}")));
    }
    if order == order.round() {
        let n = order as i32;
        return Ok(match n {
            0 => libm::j0(t),
            1 => libm::j1(t),
            _ => libm::jn(n, t),
        });
    }
    let twice = 2.0 * order;
    if twice != twice.round() {
        return Err(domain(
            "bessel_j",
            format!("order {order} is neither an integer nor a half-integer"),
        ));
    }
    if t == 0.0 {
        return if order < 0.0 {
            Err(domain("bessel_j", "J_{-1/2} is singular at 0"))
        } else {
            Ok(0.0)
        };
    }
    if t < 1.0 || t < order + 1.0 {
        return Ok(j_series(order, t));
    }
    // J_{n+1/2}(t) = sqrt(2t/pi) j_n(t), upward recurrence from j_{-1}, j_0
    let n = (order - 0.5).round() as i64;
    let (s, c) = t.sin_cos();
    let mut prev = c / t; // j_{-1}
    let mut cur = s / t; // j_0
    if n == -1 {
        cur = prev;
    } else {
        for k in 0..n {
            let next = (2 * k + 1) as f64 / t * cur - prev;
            prev = cur;
            cur = next;
        }
    }
    Ok((2.0 * t / PI).sqrt() * cur)
}

/// Power series `(t/2)^nu / Γ(nu+1) · 0F1(; nu+1; -t²/4)`.
fn j_series(nu: f64, t: f64) -> f64 {
    let q = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    (nu * (0.5 * t).ln() - ln_gamma(nu + 1.0)).exp() * sum
}

/// `K_order(t)` for real `order` (K is even in the order) and `t > 0`.
pub fn bessel_k(order: f64, t: f64) -> Result<f64> {
    let (k, _, scale) = bessel_k_pair(order, t)?;
    let v = k * (-scale).exp();
    if !v.is_finite() {
        return Err(Error::Overflow {
            func: "bessel_k",
            msg: format!("K_{order}({t}) is not representable"),
        });
    }
    Ok(v)
}

/// `ln K_order(t)`; stays finite where `K` itself under- or overflows.
pub fn ln_bessel_k(order: f64, t: f64) -> Result<f64> {
    let (k, _, scale) = bessel_k_pair(order, t)?;
    Ok(k.ln() - scale)
}

/// Returns `(K_nu(t)·e^s, K_{nu+1}(t)·e^s, s)` with `nu = |order|`; `s = t` on
/// the continued-fraction branch and `0` on the series branch.
fn bessel_k_pair(order: f64, t: f64) -> Result<(f64, f64, f64)> {
    if !order.is_finite() {
        return Err(domain("bessel_k", format!("order {order} must be finite")));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(domain("bessel_k", format!("argument {t} must be finite and > 0")));
    }
    if t < 1e-300 {
        return Err(Error::Overflow {
            func: "bessel_k",
            msg: format!("argument {t} too close to 0"),
        });
    }
    let nu = order.abs();
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mu2 = mu * mu;
    let xi = 1.0 / t;
    let xi2 = 2.0 * xi;

    let (mut kmu, mut k1, scale) = if t < 2.0 {
        // Temme's series
        let x2 = 0.5 * t;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                func: "bessel_k",
                iterations: MAX_ITER,
                achieved: f64::NAN,
            });
        }
        (sum, sum1 * xi2, 0.0)
    } else {
        // Steed's continued fraction (CF2), scaled by e^t
        let mut b = 2.0 * (1.0 + t);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                func: "bessel_k",
                iterations: MAX_ITER,
                achieved: f64::NAN,
            });
        }
        h *= a1;
        let kmu = (PI / (2.0 * t)).sqrt() / s;
        let k1 = kmu * (mu + t + 0.5 - h) * xi;
        (kmu, k1, t)
    };
    for i in 1..=(nl as i64) {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    Ok((kmu, k1, scale))
}
