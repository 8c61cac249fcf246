// Elementary functions, routed through `std` when it is available and `libm` otherwise.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn expm1(x: f64) -> f64 {
        x.exp_m1()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    #[inline]
    pub fn powi(x: f64, n: i32) -> f64 {
        x.powi(n)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        x.hypot(y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        x.round()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    pub use libm::{cos, exp, expm1, floor, hypot, round, sin, sqrt};
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn powi(x: f64, n: i32) -> f64 {
        libm::pow(x, n as f64)
    }
}

pub use imp::*;

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * round(0.5 * x);
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let (sign, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * sin(core::f64::consts::PI * r)
}

/// `cos(πx)` with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}
