//! Adaptive Gauss–Kronrod quadrature and Wynn's epsilon extrapolation.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_725_575_359,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Result of a numerical integration with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// One 21-point Kronrod panel with the embedded 10-point Gauss rule.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quadrature {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = CompensatedSum::default();
    kronrod.add(fc * WGK[10]);
    let mut gauss = 0.0;
    let mut abs_k = (fc * WGK[10]).abs();
    let mut fv = [0.0; 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod.add(WGK[j] * f1);
        kronrod.add(WGK[j] * f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let kronrod = kronrod.value();
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let result = kronrod * half;
    let resabs = abs_k * half.abs();
    let resasc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Quadrature { value: result, error: err }
}

/// Globally adaptive bisection on `[a, b]` until the summed error estimate is
/// below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    let first = gk21(&f, a, b);
    let mut panels = vec![(a, b, first)];
    let mut total = first.value;
    let mut total_err = first.error;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if panels.len() >= max_panels {
            return Err(Error::NonConvergence {
                func: "integrate",
                iterations: panels.len(),
                achieved: total_err,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("nonempty");
        let (lo, hi, q) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval exhausted at machine resolution
            return Err(Error::NonConvergence {
                func: "integrate",
                iterations: panels.len(),
                achieved: total_err,
            });
        }
        let left = gk21(&f, lo, mid);
        let right = gk21(&f, mid, hi);
        total += left.value + right.value - q.value;
        total_err += left.error + right.error - q.error;
        panels.push((lo, mid, left));
        panels.push((mid, hi, right));
    }
    // re-sum to shed the drift of the running totals
    let mut value = CompensatedSum::default();
    panels.iter().for_each(|p| value.add(p.2.value));
    let value = value.value();
    let error = panels.iter().map(|p| p.2.error).sum();
    Ok(Quadrature { value, error })
}

/// `∫_a^∞ f` via the map `x = a + s/(1-s)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let one = 1.0 - s;
        let v = f(a + s / one) / (one * one);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, abs_tol, rel_tol, max_panels)
}

/// Wynn's epsilon algorithm over a growing sequence of partial sums.
#[derive(Debug, Default, Clone)]
pub struct WynnEpsilon {
    // last diagonal of the epsilon table
    row: Vec<f64>,
    estimates: Vec<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds the next partial sum and returns the current best estimate.
    pub fn push(&mut self, s: f64) -> f64 {
        let mut prev_col = s;
        let mut new_row = Vec::with_capacity(self.row.len() + 1);
        new_row.push(s);
        for (k, &old) in self.row.iter().enumerate() {
            let diff = prev_col - old;
            let below = if k == 0 { 0.0 } else { self.row[k - 1] };
            let next = if diff == 0.0 || !diff.is_finite() {
                f64::INFINITY
            } else {
                below + 1.0 / diff
            };
            new_row.push(next);
            prev_col = next;
            if !next.is_finite() {
                break;
            }
        }
        self.row = new_row;
        // even columns hold the estimates
        let est = self
            .row
            .iter()
            .enumerate()
            .filter(|(k, v)| k % 2 == 0 && v.is_finite())
            .last()
            .map(|(_, v)| *v)
            .unwrap_or(s);
        self.estimates.push(est);
        est
    }

    /// Difference between the last two estimates.
    pub fn change(&self) -> f64 {
        let n = self.estimates.len();
        if n < 2 {
            f64::INFINITY
        } else {
            (self.estimates[n - 1] - self.estimates[n - 2]).abs()
        }
    }
}
