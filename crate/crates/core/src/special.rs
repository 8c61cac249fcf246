//! Scalar special functions: Gamma, the two-parameter Mittag-Leffler function
//! `E_{α,β}(z) = Σ z^k / Γ(αk + β)` and the Mainardi–Wright function `M_α(θ)`.
//!
//! `E_{α,β}` on the real line is evaluated by one of four routes:
//!
//! * the power series (compensated summation) for `z ≥ 0`, for `α > 1`, and for
//!   negative `z` with `|z|^{1/α} ≤ 3`, where cancellation costs at most `e^6` ulps;
//! * a real-line Laplace inversion integral for `α < 1` and moderately negative `z`:
//!   with `ρ = r^{1/α}`,
//!   `E_{α,β}(−x) = (1/π) ∫₀^∞ ρ^{α−β} e^{−ρ} (ρ^α sin π(1−β) + x sin π(1−β+α)) /
//!   (ρ^{2α} + 2ρ^α x cos πα + x²) dρ`, valid for `0 < α < 1`, `β < 1 + α`;
//!   larger `β` are reduced with `E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z`;
//! * the algebraic asymptotic expansion `−Σ_{k≥1} z^{−k} / Γ(β − αk)` once
//!   `|z|^{1/α} ≥ 60`, where its remainder is below `e^{−60}`;
//! * closed forms and a beta-type integral for `α = 1`.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;
use crate::quad::{integrate, QuadSettings};

use core::f64::consts::PI;

const SERIES_BUDGET: usize = 5000;
/// Negative arguments with `|z|^{1/α}` below this are summed as a power series.
const SERIES_RADIUS: f64 = 3.0;
/// Negative arguments with `|z|^{1/α}` above this use the asymptotic expansion.
const ASYMPTOTIC_RADIUS: f64 = 60.0;
/// Mainardi–Wright is summed as a series up to this `θ` and integrated beyond it.
const MAINARDI_SERIES_MAX: f64 = 1.0;

/// Largest argument for which `Γ(x)` is finite in `f64`.
const GAMMA_MAX_ARG: f64 = 171.0;

/// Parameters `(α, β)` of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MLParams {
    /// Accepts `α ∈ (0, 2]` and `β > 0`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 2]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
        }
        Ok(Self { alpha, beta })
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == math::floor(x)
}

/// `Γ(x)`; an error at the poles `0, −1, −2, …`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(libm::tgamma(x))
}

/// `1/Γ(x)`, with the removable zeros at the poles returned as exactly `0`.
pub fn rgamma(x: f64) -> f64 {
    scaled_rgamma(0.0, x)
}

/// `exp(ln_scale) / Γ(x)`, computed in log space when `Γ(x)` or its reciprocal
/// leaves the `f64` range.
fn scaled_rgamma(ln_scale: f64, x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x > 0.0 {
        if x < GAMMA_MAX_ARG && ln_scale.abs() < 600.0 {
            return math::exp(ln_scale) / libm::tgamma(x);
        }
        let (lg, _) = libm::lgamma_r(x);
        return math::exp(ln_scale - lg);
    }
    if x > -GAMMA_MAX_ARG + 20.0 && ln_scale.abs() < 600.0 {
        let g = libm::tgamma(x);
        if g != 0.0 && g.is_finite() {
            return math::exp(ln_scale) / g;
        }
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1 − x) / π
    let s = math::sin_pi(x);
    let (lg, _) = libm::lgamma_r(1.0 - x);
    let sign = if s < 0.0 { -1.0 } else { 1.0 };
    sign * math::exp(ln_scale + lg + math::ln(s.abs()) - math::ln(PI))
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Two-parameter Mittag-Leffler function `E_{α,β}(z)` for real `z`.
pub fn mittag_leffler(p: MLParams, z: f64) -> Result<f64> {
    let MLParams { alpha, beta } = p;
    if z.is_nan() {
        return Err(Error::InvalidParameter(format!("z = {z}")));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if alpha == 1.0 {
        if beta == 1.0 {
            return Ok(math::exp(z));
        }
        if beta == 2.0 {
            return Ok(math::expm1(z) / z);
        }
    }
    if z > 0.0 || alpha > 1.0 {
        return ml_series(alpha, beta, z);
    }
    let x = -z;
    let scaled = math::powf(x, 1.0 / alpha);
    if scaled <= SERIES_RADIUS {
        return ml_series(alpha, beta, z);
    }
    if alpha == 1.0 {
        return ml_unit_alpha(beta, x);
    }
    if scaled >= ASYMPTOTIC_RADIUS {
        if let Some(v) = ml_asymptotic(alpha, beta, x) {
            return Ok(v);
        }
    }
    ml_laplace_inversion(alpha, beta, x)
}

pub(crate) fn ml_series(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    let mut acc = Compensated::default();
    let ln_abs_z = math::ln(z.abs());
    let mut zk = 1.0f64;
    let mut tiny_run = 0;
    for k in 0..SERIES_BUDGET {
        let arg = alpha * k as f64 + beta;
        let term = if zk.is_finite() && zk.abs() < 1e300 && arg < GAMMA_MAX_ARG {
            zk * rgamma(arg)
        } else {
            let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * scaled_rgamma(k as f64 * ln_abs_z, arg)
        };
        acc.add(term);
        zk *= z;
        let scale = acc.value().abs().max(f64::MIN_POSITIVE);
        if term.abs() <= 1e-17 * scale {
            tiny_run += 1;
            if tiny_run >= 3 {
                return Ok(acc.value());
            }
        } else {
            tiny_run = 0;
        }
    }
    Err(Error::NonConvergence { what: "Mittag-Leffler series", terms: SERIES_BUDGET })
}

/// `−Σ_{k≥1} z^{−k}/Γ(β−αk)` at `z = −x`, truncated before the smallest term
/// (near `αk = x^{1/α}`); `None` if working precision is not reached by then.
pub(crate) fn ml_asymptotic(alpha: f64, beta: f64, x: f64) -> Option<f64> {
    let mut acc = Compensated::default();
    let ln_x = math::ln(x);
    let last = (math::powf(x, 1.0 / alpha) / alpha) as usize;
    let mut tiny_run = 0;
    for k in 1..=last.min(SERIES_BUDGET) {
        // −(−x)^{−k} = (−1)^{k+1} x^{−k}
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * scaled_rgamma(-(k as f64) * ln_x, beta - alpha * k as f64);
        acc.add(term);
        // a single tiny term can sit next to a pole of Γ, so ask for a run of them
        if term.abs() <= 1e-17 * acc.value().abs() {
            tiny_run += 1;
            if tiny_run >= 3 {
                return Some(acc.value());
            }
        } else {
            tiny_run = 0;
        }
    }
    None
}

/// Real-line Laplace inversion for `0 < α < 1`, `z = −x < 0`.
pub(crate) fn ml_laplace_inversion(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if beta > 1.0 {
        let lower = ml_laplace_inversion(alpha, beta - alpha, x)?;
        return Ok((lower - rgamma(beta - alpha)) / -x);
    }
    let p = 1.0 / (1.0 + alpha - beta);
    let s1 = math::sin_pi(1.0 - beta);
    let s2 = math::sin_pi(1.0 - beta + alpha);
    let c = math::cos_pi(alpha);
    let sa = math::sin_pi(alpha);
    let rho_max = 64.0;
    let s_of = |rho: f64| math::powf(rho, 1.0 / p);
    let mut points = alloc::vec![0.0, s_of(1.0)];
    if c < 0.0 {
        let rho_peak = math::powf(x * -c, 1.0 / alpha);
        if rho_peak < rho_max {
            points.push(s_of(rho_peak));
        }
    }
    points.push(s_of(rho_max));
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();
    let kernel = |s: f64| {
        let rho = math::powf(s, p);
        let r = math::powf(rho, alpha) / x;
        // r² + 2rc + 1 written without cancellation; its minimum sin²(πα) is tiny as α → 1
        math::exp(-rho) * (r * s1 + s2) / ((r + c) * (r + c) + sa * sa)
    };
    let settings =
        QuadSettings { rel_tol: 1e-13, magnitude_tol: 1e-13, max_intervals: 800, ..Default::default() };
    let res = integrate(kernel, &points, settings)?;
    Ok(p / (PI * x) * res.value)
}

/// `E_{1,β}(−x)` for `β ≠ 1, 2` and `x > 0`.
fn ml_unit_alpha(beta: f64, x: f64) -> Result<f64> {
    if beta < 1.0 {
        // E_{1,β}(z) = 1/Γ(β) + z E_{1,β+1}(z)
        return Ok(rgamma(beta) - x * ml_unit_alpha(beta + 1.0, x)?);
    }
    if beta == 1.0 {
        return Ok(math::exp(-x));
    }
    // E_{1,β}(−x) = (1/Γ(β)) ∫₀¹ exp(−x (1 − u^{1/(β−1)})) du
    let q = 1.0 / (beta - 1.0);
    let knee = math::powf((1.0 - 40.0 / x).max(0.0), beta - 1.0);
    let mut points = alloc::vec![0.0, knee, 1.0];
    points.dedup();
    let res = integrate(
        |u: f64| math::exp(-x * (1.0 - math::powf(u, q))),
        &points,
        QuadSettings::relative(1e-13),
    )?;
    Ok(rgamma(beta) * res.value)
}

/// Mainardi–Wright function `M_α(θ) = Σ_n (−θ)^n / (n! Γ(1 − α(1+n)))`, `0 < α < 1`, `θ ≥ 0`.
///
/// Summed directly for `θ ≤ 1`. Beyond that the series cancels catastrophically and
/// the function is evaluated from its stable-density integral
/// `M_α(θ) = θ^{α/(1−α)} / (π(1−α)) ∫₀^π A(u) exp(−θ^{1/(1−α)} A(u)) du`,
/// `A(u) = [sin^α(αu) sin^{1−α}((1−α)u) / sin u]^{1/(1−α)}`.
pub fn mainardi_wright(alpha: f64, theta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("Mainardi alpha = {alpha} outside (0, 1)")));
    }
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("Mainardi theta = {theta}")));
    }
    if theta <= MAINARDI_SERIES_MAX {
        mainardi_series(alpha, theta)
    } else {
        mainardi_integral(alpha, theta)
    }
}

pub(crate) fn mainardi_series(alpha: f64, theta: f64) -> Result<f64> {
    if theta == 0.0 {
        return Ok(rgamma(1.0 - alpha));
    }
    let mut acc = Compensated::default();
    let ln_theta = math::ln(theta);
    let mut tiny_run = 0;
    for n in 0..SERIES_BUDGET {
        let nf = n as f64;
        let ln_coeff = nf * ln_theta - libm::lgamma_r(nf + 1.0).0;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * scaled_rgamma(ln_coeff, 1.0 - alpha * (1.0 + nf));
        acc.add(term);
        if term == 0.0 {
            continue;
        }
        if term.abs() <= 1e-17 * acc.value().abs().max(f64::MIN_POSITIVE) {
            tiny_run += 1;
            if tiny_run >= 3 {
                return Ok(acc.value());
            }
        } else {
            tiny_run = 0;
        }
    }
    Err(Error::NonConvergence { what: "Mainardi-Wright series", terms: SERIES_BUDGET })
}

pub(crate) fn mainardi_integral(alpha: f64, theta: f64) -> Result<f64> {
    let one_minus = 1.0 - alpha;
    let c = math::powf(theta, 1.0 / one_minus);
    let ln_a = |u: f64| {
        (alpha * math::ln(math::sin(alpha * u)) + one_minus * math::ln(math::sin(one_minus * u))
            - math::ln(math::sin(u)))
            / one_minus
    };
    // A(0⁺) = α^{α/(1−α)} (1−α)
    let a0 = math::powf(alpha, alpha / one_minus) * one_minus;
    let integrand = |u: f64| {
        let a = math::exp(ln_a(u));
        if !a.is_finite() {
            return 0.0;
        }
        a * math::exp(-c * (a - a0))
    };
    let ln_prefactor = alpha / one_minus * math::ln(theta) - math::ln(PI * one_minus) - c * a0;
    // the integrand is bounded by a0 on [0, π]
    if ln_prefactor + math::ln(PI * a0) < -745.0 {
        return Ok(0.0);
    }
    let knee = (2.0 / math::sqrt(c)).min(PI / 2.0);
    let mut points = alloc::vec![0.0, knee, PI / 2.0, PI];
    points.dedup();
    let res = integrate(integrand, &points, QuadSettings::relative(1e-13))?;
    Ok(math::exp(ln_prefactor) * res.value)
}

/// Smallest `θ` (on a doubling grid from 1) beyond which `θ^{μ+1} M_α(θ)` is negligible.
pub(crate) fn mainardi_support(alpha: f64, mu: f64, tail_tol: f64) -> Result<f64> {
    let mut theta: f64 = 1.0;
    loop {
        let m = mainardi_wright(alpha, theta)?;
        if m * math::powf(theta, mu + 1.0) < tail_tol {
            return Ok(theta);
        }
        theta *= 1.5;
        if theta > 1e8 {
            return Err(Error::NonConvergence { what: "Mainardi tail", terms: 0 });
        }
    }
}

/// `∫₀^∞ θ^μ M_α(θ) dθ` by adaptive quadrature; should equal `Γ(1+μ)/Γ(1+αμ)` for `μ > −1`.
pub fn mainardi_moment(alpha: f64, mu: f64) -> Result<f64> {
    if !(mu > -1.0) {
        return Err(Error::InvalidParameter(format!("moment order mu = {mu} must exceed -1")));
    }
    let theta_max = mainardi_support(alpha, mu, 1e-22)?;
    // θ = s² removes the θ^μ endpoint singularity for μ < 0.
    let f = |s: f64| {
        let theta = s * s;
        2.0 * math::powf(s, 2.0 * mu + 1.0) * mainardi_wright(alpha, theta).unwrap_or(f64::NAN)
    };
    let s_max = math::sqrt(theta_max);
    let mut points = alloc::vec![0.0, 1.0, s_max];
    points.dedup();
    let res = integrate(f, &points, QuadSettings::relative(1e-11))?;
    Ok(res.value)
}

/// `|∫₀^∞ e^{−σt} t^{β−1} E_{α,β}(λ t^α) dt − σ^{α−β}/(σ^α − λ)|` for `λ < 0`, `σ > 0`.
pub fn ml_laplace_residual(p: MLParams, lambda: f64, sigma: f64) -> Result<f64> {
    let MLParams { alpha, beta } = p;
    if !(lambda < 0.0) || !(sigma > 0.0) || !(math::powf(sigma, alpha) > lambda) {
        return Err(Error::InvalidParameter(format!(
            "Laplace identity needs lambda < 0 < sigma (lambda = {lambda}, sigma = {sigma})"
        )));
    }
    let exact = math::powf(sigma, alpha - beta) / (math::powf(sigma, alpha) - lambda);
    // t = s^{1/β} absorbs the t^{β−1} weight.
    let t_max = 64.0 / sigma;
    let s_of = |t: f64| math::powf(t, beta);
    let mut failure = None;
    let f = |s: f64| {
        let t = math::powf(s, 1.0 / beta);
        match mittag_leffler(p, lambda * math::powf(t, alpha)) {
            Ok(e) => math::exp(-sigma * t) * e / beta,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        }
    };
    let points = [0.0, s_of(1.0 / sigma), s_of(8.0 / sigma), s_of(t_max)];
    let res = integrate(f, &points, QuadSettings::relative(1e-13));
    if let Some(err) = failure {
        return Err(err);
    }
    Ok((res?.value - exact).abs())
}
