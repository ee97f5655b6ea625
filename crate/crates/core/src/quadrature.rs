//! Adaptive Gauss-Kronrod quadrature on finite intervals, plus a real-line
//! driver that maps the tails |x| > `TAIL_START` onto finite angle intervals
//! through x = tan(theta).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Beyond this abscissa the real-line integrator switches to x = tan(theta).
pub const TAIL_START: f64 = 10.0;

const MAX_SUBDIVISIONS: usize = 4000;

// 21-point Kronrod abscissae on [-1, 1] (non-negative half); odd indices are
// the 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_208_980_515_797,
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Globally adaptive integration of `f` over `[a, b]`: the segment with the
/// largest error estimate is bisected until the summed error drops below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite interval required, got [{a}, {b}]"
        )));
    }
    if b < a {
        return integrate(f, b, a, abs_tol, rel_tol).map(|e| Estimate {
            value: -e.value,
            ..e
        });
    }
    let (value, error) = kronrod21(&f, a, b);
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                a,
                b,
                estimate: total,
                error: total_err,
            });
        }
        if heap.len() >= MAX_SUBDIVISIONS {
            return Err(Error::QuadratureNonConvergence {
                a,
                b,
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            return Err(Error::QuadratureNonConvergence {
                a,
                b,
                estimate: total,
                error: total_err,
            });
        }
        let (v1, e1) = kronrod21(&f, worst.a, mid);
        let (v2, e2) = kronrod21(&f, mid, worst.b);
        evaluations += 42;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        // re-summing avoids drift from repeated add/subtract
        total = heap.iter().map(|s| s.value).sum();
        total_err = heap.iter().map(|s| s.error).sum();
    }

    Ok(Estimate {
        value: total,
        error: total_err,
        evaluations,
    })
}

/// Integrates `f` over the whole real line. The core `[-TAIL_START, TAIL_START]`
/// is integrated directly; each tail is mapped by x = tan(theta) onto a finite
/// angle interval ending at ±pi/2.
///
/// The integrand must decay faster than `1/|x|`; this is probed by comparing
/// `|x f(x)|` at `|x| = 1e3` and `|x| = 1e6` before integrating.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> Result<Estimate> {
    for sign in [1.0, -1.0] {
        let near = (1e3 * f(sign * 1e3)).abs();
        let far = (1e6 * f(sign * 1e6)).abs();
        if !near.is_finite() || !far.is_finite() || (far > 1e-300 && far >= 0.5 * near) {
            return Err(Error::DivergentIntegral(format!(
                "|x f(x)| does not decay: {near:e} at |x| = 1e3, {far:e} at |x| = 1e6"
            )));
        }
    }
    let core = integrate(&f, -TAIL_START, TAIL_START, 0.0, rel_tol)?;
    let theta0 = TAIL_START.atan();
    let mapped = |theta: f64| {
        let x = theta.tan();
        let c = theta.cos();
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (c * c)
        }
    };
    // absolute floor ties the tail accuracy to the core magnitude
    let floor = 0.25 * rel_tol * core.value.abs();
    let right = integrate(&mapped, theta0, FRAC_PI_2, floor, rel_tol)?;
    let left = integrate(&mapped, -FRAC_PI_2, -theta0, floor, rel_tol)?;
    for tail in [&right, &left] {
        if !tail.value.is_finite() {
            return Err(Error::DivergentIntegral(
                "tail contribution is not finite".into(),
            ));
        }
    }
    Ok(Estimate {
        value: core.value + right.value + left.value,
        error: core.error + right.error + left.error,
        evaluations: core.evaluations + right.evaluations + left.evaluations,
    })
}

/// Integral of `f` over `[a, +inf)` for `a > 0`, through x = tan(theta).
pub fn integrate_upper_tail<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<Estimate> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("tail start must be positive, got {a}")));
    }
    let mapped = |theta: f64| {
        let c = theta.cos();
        let v = f(theta.tan());
        if v == 0.0 {
            0.0
        } else {
            v / (c * c)
        }
    };
    integrate(mapped, a.atan(), FRAC_PI_2, 0.0, rel_tol)
}

/// Composite trapezoid rule over uniformly spaced samples.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = samples[1..n - 1].iter().sum();
            h * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_exact_for_degree_31() {
        // odd powers vanish by symmetry; check an even one and a shifted interval
        let (v, _) = kronrod21(&|x: f64| x.powi(30), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-15);
        let (v, _) = kronrod21(&|x: f64| x.powi(31) + x.powi(4), 0.0, 1.0);
        assert!((v - (1.0 / 32.0 + 1.0 / 5.0)).abs() < 1e-15);
    }

    #[test]
    fn gauss_part_exact_for_degree_19() {
        let (_, err) = kronrod21(&|x: f64| x.powi(18) + 3.0 * x.powi(7), 0.0, 2.0);
        assert!(err < 1e-11 * 2f64.powi(19));
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let est = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 0.0, 1e-12).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((est.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn real_line_lorentzian() {
        let est = integrate_real_line(|x| 1.0 / (1.0 + x * x), 1e-12).unwrap();
        assert!((est.value - PI).abs() < 1e-12 * PI);
    }

    #[test]
    fn real_line_gaussian() {
        let est = integrate_real_line(|x| (-x * x).exp(), 1e-12).unwrap();
        assert!((est.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn divergent_integrand_is_reported() {
        assert!(integrate_real_line(|_| 1.0, 1e-12).is_err());
    }

    #[test]
    fn upper_tail_of_lorentzian() {
        let est = integrate_upper_tail(|x| 1.0 / (1.0 + x * x), 40.0, 1e-12).unwrap();
        let exact = FRAC_PI_2 - 40f64.atan();
        assert!((est.value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 0.0, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let s: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        assert!((trapezoid(&s, 0.1) - 0.5).abs() < 1e-15);
    }
}
