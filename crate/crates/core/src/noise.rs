//! Reproducible Q-Wiener increments and compound-Poisson jumps on a uniform time grid.
//!
//! Every random draw comes from a ChaCha8 stream keyed by
//! `(master seed, sample index, fine interval, stream id)`, so paths can be sampled in any
//! order or in parallel. Wiener increments are stored on a fixed-point lattice of spacing
//! 2⁻⁵⁶, which makes block summation under [`NoisePath::coarsen`] exact and associative.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::fem::Field;
use crate::math;

/// Fixed exponent offset ε in `q_i = i^{−(2r+1+ε)}`.
pub const TRACE_EPSILON: f64 = 0.001;

/// Stream id of the Wiener increments.
pub const WIENER_STREAM: u64 = 0;
/// Stream id of the jump events.
pub const JUMP_STREAM: u64 = 1;

const LATTICE_SCALE: f64 = (1u64 << 56) as f64;

/// Truncated Karhunen–Loève description of a Q-Wiener process on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QWienerSpec {
    pub n_modes: usize,
    pub mode_decay: f64,
    pub a: f64,
    pub b: f64,
}

impl QWienerSpec {
    pub fn new(n_modes: usize, mode_decay: f64) -> Result<Self> {
        Self::on_domain(n_modes, mode_decay, 0.0, 1.0)
    }

    pub fn on_domain(n_modes: usize, mode_decay: f64, a: f64, b: f64) -> Result<Self> {
        if !(mode_decay >= 0.0) || !mode_decay.is_finite() {
            return Err(Error::InvalidParameter(format!("mode decay r = {mode_decay} must be >= 0")));
        }
        if !(b > a) {
            return Err(Error::InvalidParameter(format!("noise domain ({a}, {b}) is empty")));
        }
        Ok(Self { n_modes, mode_decay, a, b })
    }

    /// `q_i` for `i ≥ 1`.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        math::powf(i as f64, -(2.0 * self.mode_decay + 1.0 + TRACE_EPSILON))
    }

    /// `e_i(x) = √(2/(b−a)) sin(iπ(x−a)/(b−a))`, orthonormal in `L²(a, b)`.
    pub fn eigenfunction(&self, i: usize, x: f64) -> f64 {
        let len = self.b - self.a;
        math::sqrt(2.0 / len) * math::sin_pi(i as f64 * (x - self.a) / len)
    }

    /// `Σ_{i ≤ N_W} q_i`.
    pub fn trace(&self) -> f64 {
        (1..=self.n_modes).map(|i| self.eigenvalue(i)).sum()
    }

    pub fn sqrt_eigenvalues(&self) -> Vec<f64> {
        (1..=self.n_modes).map(|i| math::sqrt(self.eigenvalue(i))).collect()
    }
}

/// Scalar mark distribution of the jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkLaw {
    Uniform { lo: f64, hi: f64 },
    Normal { std: f64 },
}

impl MarkLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            MarkLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            MarkLaw::Normal { .. } => 0.0,
        }
    }

    /// `E[z²]`
    pub fn second_moment(&self) -> f64 {
        match *self {
            MarkLaw::Uniform { lo, hi } => (lo * lo + lo * hi + hi * hi) / 3.0,
            MarkLaw::Normal { std } => std * std,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarkLaw::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            MarkLaw::Normal { std } => std.is_finite() && std >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("mark law {self:?}")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            MarkLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            MarkLaw::Normal { std } => Normal::new(0.0, std).expect("validated std").sample(rng),
        }
    }
}

/// Compound-Poisson jump measure `ν(dz) = λ_J · law(dz)` with a spatial profile.
#[derive(Clone)]
pub struct JumpSpec {
    pub intensity: f64,
    pub mark_law: MarkLaw,
    pub profile: Field,
    pub first_moment: f64,
}

impl core::fmt::Debug for JumpSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("JumpSpec")
            .field("intensity", &self.intensity)
            .field("mark_law", &self.mark_law)
            .field("first_moment", &self.first_moment)
            .finish_non_exhaustive()
    }
}

impl JumpSpec {
    pub fn new(intensity: f64, mark_law: MarkLaw, profile: Field) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::InvalidParameter(format!("jump intensity {intensity} must be finite and >= 0")));
        }
        mark_law.validate()?;
        Ok(Self { intensity, mark_law, profile, first_moment: mark_law.mean() })
    }

    /// No jumps at all.
    pub fn none() -> Self {
        Self::new(0.0, MarkLaw::Normal { std: 0.0 }, Arc::new(|_| 0.0)).expect("valid")
    }

    /// `sin(πx)` profile, vanishing at the ends of the unit interval.
    pub fn sine_profile(intensity: f64, mark_law: MarkLaw) -> Result<Self> {
        Self::new(intensity, mark_law, Arc::new(math::sin_pi))
    }

    /// `∫ z ν(dz) = λ_J E[z]`
    pub fn compensator_rate(&self) -> f64 {
        self.intensity * self.first_moment
    }
}

/// Uniform grid of `intervals` steps over `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub horizon: f64,
    pub intervals: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, intervals: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() || intervals == 0 {
            return Err(Error::InvalidParameter(format!("time grid T = {horizon}, m = {intervals}")));
        }
        Ok(Self { horizon, intervals })
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.intervals as f64
    }

    /// `t_k = k Δt`; also the lag of `k` steps, so cache keys agree everywhere.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    /// `t_0, …, t_m`
    pub fn times(&self) -> Vec<f64> {
        (0..=self.intervals).map(|k| self.time(k)).collect()
    }

    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.intervals % factor != 0 {
            return Err(Error::Coarsen { factor, intervals: self.intervals });
        }
        Ok(Self { horizon: self.horizon, intervals: self.intervals / factor })
    }
}

/// One jump event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub mark: f64,
}

/// One realization of the driving noise on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub grid: TimeGrid,
    pub seed: u64,
    pub sample_index: u64,
    sqrt_q: Vec<f64>,
    /// `Δβ_i` per interval (interval-major), on the 2⁻⁵⁶ lattice
    wiener: Vec<i128>,
    jumps: Vec<Vec<Jump>>,
}

fn stream_rng(seed: u64, sample_index: u64, interval: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, sample_index, interval, stream]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn to_lattice(x: f64) -> i128 {
    math::round(x * LATTICE_SCALE) as i128
}

fn from_lattice(v: i128) -> f64 {
    v as f64 / LATTICE_SCALE
}

/// Samples the noise on `grid`; a pure function of `(seed, sample_index)` and the specs.
pub fn sample_path(q: &QWienerSpec, jumps: &JumpSpec, grid: TimeGrid, seed: u64, sample_index: u64) -> NoisePath {
    let dt = grid.dt();
    let sd = math::sqrt(dt);
    let n = q.n_modes;
    let mut wiener = Vec::with_capacity(n * grid.intervals);
    let mut events = Vec::with_capacity(grid.intervals);
    let poisson = if jumps.intensity * dt > 0.0 {
        Some(Poisson::new(jumps.intensity * dt).expect("positive finite rate"))
    } else {
        None
    };
    for j in 0..grid.intervals {
        if n > 0 {
            let mut rng = stream_rng(seed, sample_index, j as u64, WIENER_STREAM);
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                wiener.push(to_lattice(sd * z));
            }
        }
        let mut here = Vec::new();
        if let Some(p) = &poisson {
            let mut rng = stream_rng(seed, sample_index, j as u64, JUMP_STREAM);
            let count = p.sample(&mut rng) as usize;
            let t0 = grid.time(j);
            for _ in 0..count {
                let time = t0 + dt * rng.random::<f64>();
                let mark = jumps.mark_law.sample(&mut rng);
                here.push(Jump { time, mark });
            }
            here.sort_by(|a, b| a.time.total_cmp(&b.time));
        }
        events.push(here);
    }
    NoisePath { grid, seed, sample_index, sqrt_q: q.sqrt_eigenvalues(), wiener, jumps: events }
}

impl NoisePath {
    pub fn n_modes(&self) -> usize {
        self.sqrt_q.len()
    }

    pub fn intervals(&self) -> usize {
        self.grid.intervals
    }

    /// `Δβ_i` on interval `j` (mode `i` zero-based), distributed `N(0, Δt)`.
    pub fn beta_increment(&self, j: usize, i: usize) -> f64 {
        from_lattice(self.wiener[j * self.n_modes() + i])
    }

    /// `√q_i Δβ_i` for every mode on interval `j`.
    pub fn wiener_increments(&self, j: usize) -> Vec<f64> {
        (0..self.n_modes()).map(|i| self.sqrt_q[i] * self.beta_increment(j, i)).collect()
    }

    pub fn jumps(&self, j: usize) -> &[Jump] {
        &self.jumps[j]
    }

    pub fn total_jumps(&self) -> usize {
        self.jumps.iter().map(Vec::len).sum()
    }

    /// The same noise on a grid `factor` times coarser.
    pub fn coarsen(&self, factor: usize) -> Result<NoisePath> {
        let grid = self.grid.coarsen(factor)?;
        let n = self.n_modes();
        let mut wiener = Vec::with_capacity(n * grid.intervals);
        let mut jumps = Vec::with_capacity(grid.intervals);
        for block in 0..grid.intervals {
            let start = block * factor;
            for i in 0..n {
                let mut acc = 0i128;
                for j in start..start + factor {
                    acc += self.wiener[j * n + i];
                }
                wiener.push(acc);
            }
            jumps.push(self.jumps[start..start + factor].iter().flatten().copied().collect());
        }
        Ok(NoisePath { grid, seed: self.seed, sample_index: self.sample_index, sqrt_q: self.sqrt_q.clone(), wiener, jumps })
    }

    /// Keeps intervals `< from` of `self` and takes the rest from `other`, which must live
    /// on the same grid with the same number of modes.
    pub fn splice(&self, other: &NoisePath, from: usize) -> Result<NoisePath> {
        if other.grid != self.grid || other.n_modes() != self.n_modes() || from > self.intervals() {
            return Err(Error::GridMismatch(format!("cannot splice at interval {from}")));
        }
        let cut = from * self.n_modes();
        let mut out = self.clone();
        out.wiener[cut..].copy_from_slice(&other.wiener[cut..]);
        out.jumps[from..].clone_from_slice(&other.jumps[from..]);
        Ok(out)
    }

    /// Debug dump: stream 0 rows are `√q_i Δβ_i` (index = mode, from 1), stream 1 rows
    /// are jump times and stream 2 rows the matching marks (index = event within interval).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,interval,stream,index,value\n");
        let s = self.sample_index;
        for j in 0..self.intervals() {
            for (i, w) in self.wiener_increments(j).iter().enumerate() {
                let _ = writeln!(out, "{s},{j},0,{},{w:e}", i + 1);
            }
            for (k, e) in self.jumps[j].iter().enumerate() {
                let _ = writeln!(out, "{s},{j},1,{k},{:e}", e.time);
                let _ = writeln!(out, "{s},{j},2,{k},{:e}", e.mark);
            }
        }
        out
    }
}

/// `Σ_k G(z_k, X_j) − Δt ∫ G(z, X_j) ν(dz)` over the jumps of interval `j`.
pub fn compensated_jump_term(path: &NoisePath, j: usize, g_eval: &[Vec<f64>], g_mean: &[f64]) -> Result<Vec<f64>> {
    let events = path.jumps(j).len();
    if g_eval.len() != events {
        return Err(Error::Dimension { expected: events, got: g_eval.len() });
    }
    let dt = path.grid.dt();
    let mut out: Vec<f64> = g_mean.iter().map(|m| -dt * m).collect();
    for g in g_eval {
        if g.len() != out.len() {
            return Err(Error::Dimension { expected: out.len(), got: g.len() });
        }
        for (o, v) in out.iter_mut().zip(g) {
            *o += v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wiener_only(n: usize) -> (QWienerSpec, JumpSpec) {
        (QWienerSpec::new(n, 1.0).unwrap(), JumpSpec::none())
    }

    #[test]
    fn empty_noise() {
        let (q, j) = wiener_only(0);
        let p = sample_path(&q, &j, TimeGrid::new(1.0, 8).unwrap(), 1, 0);
        assert_eq!(p.n_modes(), 0);
        assert_eq!(p.total_jumps(), 0);
        assert!(p.wiener_increments(3).is_empty());
    }

    #[test]
    fn eigenpairs() {
        let q = QWienerSpec::new(4, 1.0).unwrap();
        assert!((q.eigenvalue(2) - 2f64.powf(-3.001)).abs() < 1e-16);
        let shifted = QWienerSpec::on_domain(4, 1.0, -1.0, 1.0).unwrap();
        assert!(shifted.eigenfunction(1, -1.0).abs() < 1e-15);
        assert!((shifted.eigenfunction(1, 0.0) - 1.0).abs() < 1e-15);
        assert!(QWienerSpec::new(1, -0.5).is_err());
    }

    #[test]
    fn lattice_round_trip_is_tight() {
        for x in [0.0, 1e-3, -0.731, 5.5] {
            assert!((from_lattice(to_lattice(x)) - x).abs() <= 1.0 / LATTICE_SCALE);
        }
    }

    #[test]
    fn mark_moments() {
        let u = MarkLaw::Uniform { lo: -0.5, hi: 0.5 };
        assert_eq!(u.mean(), 0.0);
        assert!((u.second_moment() - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(MarkLaw::Normal { std: 2.0 }.second_moment(), 4.0);
        assert!(JumpSpec::new(-1.0, u, Arc::new(|_| 1.0)).is_err());
        assert!(JumpSpec::new(1.0, MarkLaw::Uniform { lo: 1.0, hi: 0.0 }, Arc::new(|_| 1.0)).is_err());
    }

    #[test]
    fn compensated_term_examples() {
        let j = JumpSpec::sine_profile(1.0, MarkLaw::Uniform { lo: -0.5, hi: 0.5 }).unwrap();
        let q = QWienerSpec::new(0, 1.0).unwrap();
        let mut seed = 0;
        let path = loop {
            let p = sample_path(&q, &j, TimeGrid::new(1.0, 4).unwrap(), seed, 0);
            if p.jumps(0).is_empty() {
                break p;
            }
            seed += 1;
        };
        assert_eq!(compensated_jump_term(&path, 0, &[], &[0.0; 3]).unwrap(), alloc::vec![0.0; 3]);
        assert!(compensated_jump_term(&path, 0, &[alloc::vec![1.0; 3]], &[0.0; 3]).is_err());
    }
}
