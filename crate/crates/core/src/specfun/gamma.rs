//! Gamma-function helpers on top of `libm`.

use std::f64::consts::PI;

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `1/Γ(x)`, exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

/// Digamma function ψ(x).
pub fn digamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        // reflection
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 * inv - series
}

/// Taylor coefficients of 1/Γ(1+x) about 0.
const RGAMMA1P: [f64; 27] = [
    1.00000000000000000e+00,
    5.77215664901532866e-01,
    -6.55878071520253902e-01,
    -4.20026350340952370e-02,
    1.66538611382291479e-01,
    -4.21977345555443334e-02,
    -9.62197152787697303e-03,
    7.21894324666309990e-03,
    -1.16516759185906517e-03,
    -2.15241674114950975e-04,
    1.28050282388116196e-04,
    -2.01348547807882387e-05,
    -1.25049348214267063e-06,
    1.13302723198169593e-06,
    -2.05633841697760707e-07,
    6.11609510448141609e-09,
    5.00200764446922295e-09,
    -1.18127457048702004e-09,
    1.04342671169110054e-10,
    7.78226343990507081e-12,
    -3.69680561864220598e-12,
    5.10037028745447575e-13,
    -2.05832605356650664e-14,
    -5.34812253942301782e-15,
    1.22677862823826084e-15,
    -1.18125930169745883e-16,
    1.18669225475160037e-18,
];

/// Temme's auxiliary functions for |mu| <= 1/2:
/// returns (gamma1, gamma2, 1/Γ(1+mu), 1/Γ(1-mu)) where
/// gamma1 = (1/Γ(1-mu) - 1/Γ(1+mu)) / (2 mu) and
/// gamma2 = (1/Γ(1-mu) + 1/Γ(1+mu)) / 2.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    debug_assert!(mu.abs() <= 0.5 + 1e-12);
    let m2 = mu * mu;
    // even part -> gamma2, odd part / mu -> -gamma1
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in (0..RGAMMA1P.len()).rev() {
        if k % 2 == 0 {
            even = even * m2 + RGAMMA1P[k];
        }
    }
    for k in (0..RGAMMA1P.len()).rev() {
        if k % 2 == 1 {
            odd = odd * m2 + RGAMMA1P[k];
        }
    }
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-14);
        assert!((digamma(0.5) + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((digamma(10.0) - 2.251_752_589_066_721).abs() < 1e-13);
        assert!((digamma(-0.5) - 0.036_489_973_978_576_52).abs() < 1e-13);
    }

    #[test]
    fn temme_gammas_match_direct() {
        for &mu in &[-0.5, -0.3, -0.01, 0.2, 0.49] {
            let (g1, g2, gp, gm) = temme_gammas(mu);
            assert!((gp - 1.0 / gamma(1.0 + mu)).abs() < 1e-15);
            assert!((gm - 1.0 / gamma(1.0 - mu)).abs() < 1e-15);
            assert!((g2 - 0.5 * (gm + gp)).abs() < 1e-15);
            assert!((g1 - (gm - gp) / (2.0 * mu)).abs() < 1e-12);
        }
        let (g1, _, _, _) = temme_gammas(0.0);
        assert!((g1 + 0.577_215_664_901_532_9).abs() < 1e-16);
    }

    #[test]
    fn rgamma_poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(4.0) - 1.0 / 6.0).abs() < 1e-16);
    }
}
