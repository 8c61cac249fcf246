//! One-dimensional quadrature: globally adaptive Gauss–Kronrod and Gauss–Legendre rules.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

// 15-point Kronrod abscissae and weights, with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Tolerance relative to `∫|f|`, for integrands whose value is a cancellation.
    pub magnitude_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { abs_tol: 0.0, rel_tol: 1e-12, magnitude_tol: 0.0, max_intervals: 2000 }
    }
}

impl QuadSettings {
    pub fn relative(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    magnitude: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    // QUADPACK error scaling
    if res_asc != 0.0 && error != 0.0 {
        let r = 200.0 * error / res_asc;
        error = res_asc * if r < 1.0 { r * math::sqrt(r) } else { 1.0 };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, magnitude: res_abs, error }
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `f` over the partition
/// given by `points` (sorted, at least two entries).
///
/// Non-finite integrand values are reported as a quadrature failure.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    settings: QuadSettings,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Empty("quadrature breakpoints"));
    }
    let mut segments: Vec<Segment> = Vec::with_capacity(points.len() + 64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            segments.push(gk15(&mut f, w[0], w[1]));
        }
    }
    let mut evaluations = 15 * segments.len();
    loop {
        let (value, magnitude, error) = totals(&segments);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { tolerance: settings.rel_tol, estimate: f64::INFINITY });
        }
        let tol = settings
            .abs_tol
            .max(settings.rel_tol * value.abs())
            .max(settings.magnitude_tol * magnitude);
        if error <= tol {
            return Ok(QuadResult { value, error, evaluations });
        }
        if segments.len() >= settings.max_intervals {
            return Err(Error::Quadrature { tolerance: tol, estimate: error });
        }
        let worst = segments
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc })
            .0;
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            // interval exhausted at machine resolution
            return Err(Error::Quadrature { tolerance: tol, estimate: error });
        }
        segments[worst] = gk15(&mut f, s.a, mid);
        segments.push(gk15(&mut f, mid, s.b));
        evaluations += 30;
    }
}

fn totals(segments: &[Segment]) -> (f64, f64, f64) {
    // Neumaier summation keeps the total stable when many small pieces are added.
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    let mut magnitude = 0.0;
    for s in segments {
        let t = sum + s.value;
        if sum.abs() >= s.value.abs() {
            comp += (sum - t) + s.value;
        } else {
            comp += (s.value - t) + sum;
        }
        sum = t;
        err += s.error;
        magnitude += s.magnitude;
    }
    (sum + comp, magnitude, err)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
