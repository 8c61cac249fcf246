//! Mittag-Leffler propagators `S₁h(t) = E_{α,1}(A_h t^α)` and `S₂h(t) = E_{α,α}(A_h t^α)`.
//!
//! The spectral path diagonalizes `−A_h = Φ diag(λ) Φ⁻¹` once and caches the scalar
//! values `E_{α,1}(−λ_k t^α)`, `E_{α,α}(−λ_k t^α)` per time. Complex eigenvalues are
//! handled through the subordination integrals
//! `E_{α,1}(−w) = ∫ M_α(θ) e^{−wθ} dθ` and `E_{α,α}(−w) = ∫ αθ M_α(θ) e^{−wθ} dθ`.
//!
//! [`quadrature_oracle`] evaluates the same operators from the dense generator with
//! matrix exponentials under the Mainardi weight, without any eigen-decomposition.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::{Basis, FemOperator, SpectralDecomposition};
use crate::linalg::{expm, Mat, Scalar};
use crate::math;
use crate::quad::gauss_legendre;
use crate::special::{gamma_fn, mainardi_wright, mittag_leffler, rgamma, MLParams};

/// Which propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// `E_{α,1}(A_h t^α)`
    S1,
    /// `E_{α,α}(A_h t^α)`
    S2,
}

/// Per-mode scalar values in the arithmetic of the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// `E_{α,1}(−λ_k t^α)` and `E_{α,α}(−λ_k t^α)` for every mode at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub s1: ModeValues,
    pub s2: ModeValues,
}

impl CacheEntry {
    fn get(&self, which: Which) -> &ModeValues {
        match which {
            Which::S1 => &self.s1,
            Which::S2 => &self.s2,
        }
    }
}

/// Scalars the propagator can work in: `f64` for real eigenbases, `Complex64` otherwise.
pub trait ModalScalar: Scalar {
    /// `(Φ, Φ⁻¹, Φ⁻¹M⁻¹)` if the basis is held in this arithmetic.
    fn basis(b: &Basis) -> Option<(&Mat<Self>, &Mat<Self>, &Mat<Self>)>;
    fn values(v: &ModeValues) -> Option<&[Self]>;
    fn real_part(self) -> f64;
}

impl ModalScalar for f64 {
    fn basis(b: &Basis) -> Option<(&Mat<f64>, &Mat<f64>, &Mat<f64>)> {
        match b {
            Basis::Real { phi, phi_inv, load_map } => Some((phi, phi_inv, load_map)),
            Basis::Complex { .. } => None,
        }
    }
    fn values(v: &ModeValues) -> Option<&[f64]> {
        match v {
            ModeValues::Real(x) => Some(x),
            ModeValues::Complex(_) => None,
        }
    }
    fn real_part(self) -> f64 {
        self
    }
}

impl ModalScalar for Complex64 {
    fn basis(b: &Basis) -> Option<(&Mat<Complex64>, &Mat<Complex64>, &Mat<Complex64>)> {
        match b {
            Basis::Complex { phi, phi_inv, load_map } => Some((phi, phi_inv, load_map)),
            Basis::Real { .. } => None,
        }
    }
    fn values(v: &ModeValues) -> Option<&[Complex64]> {
        match v {
            ModeValues::Complex(x) => Some(x),
            ModeValues::Real(_) => None,
        }
    }
    fn real_part(self) -> f64 {
        self.re
    }
}

/// Gauss–Legendre rule for `∫₀^∞ g(θ) M_α(θ) dθ` on geometric panels, truncated where
/// the second-moment (Chebyshev) bound puts the Mainardi tail mass below [`TAIL_MASS`].
#[derive(Debug, Clone)]
pub struct SubordinationRule {
    alpha: f64,
    nodes: Vec<f64>,
    /// quadrature weight × `M_α(θ)`
    weights: Vec<f64>,
    theta_max: f64,
}

/// Tolerated Mainardi mass beyond the truncation point.
pub const TAIL_MASS: f64 = 1e-10;

const PANEL_POINTS: usize = 20;
/// The first panel is `[0, 2^MIN_PANEL_EXPONENT]`.
const MIN_PANEL_EXPONENT: i32 = -40;

impl SubordinationRule {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("subordination needs 0 < alpha < 1, got {alpha}")));
        }
        // P(θ > Θ) ≤ E[θ²]/Θ² with E[θ²] = Γ(3)/Γ(1+2α)
        let second_moment = 2.0 / gamma_fn(1.0 + 2.0 * alpha)?;
        let theta_max = math::sqrt(second_moment / TAIL_MASS);
        let (gx, gw) = gauss_legendre(PANEL_POINTS);
        let mut edges = alloc::vec![0.0];
        let mut k = MIN_PANEL_EXPONENT;
        loop {
            let e = math::powi(2.0, k);
            if e >= theta_max {
                edges.push(theta_max);
                break;
            }
            edges.push(e);
            k += 1;
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in edges.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (&x, &wt) in gx.iter().zip(&gw) {
                let theta = mid + half * x;
                let m = mainardi_wright(alpha, theta)?;
                let weight = half * wt * m;
                if weight != 0.0 {
                    nodes.push(theta);
                    weights.push(weight);
                }
            }
        }
        let rule = Self { alpha, nodes, weights, theta_max };
        let mass: f64 = rule.weights.iter().sum();
        if !((mass - 1.0).abs() <= 10.0 * TAIL_MASS) {
            return Err(Error::Quadrature { tolerance: TAIL_MASS, estimate: (mass - 1.0).abs() });
        }
        Ok(rule)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// `(θ_q, W_q)` with `Σ_q W_q g(θ_q) ≈ ∫ g M_α`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `(E_{α,1}(−w), E_{α,α}(−w))` for `Re w ≥ 0`.
    pub fn evaluate(&self, w: Complex64) -> (Complex64, Complex64) {
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        for (theta, weight) in self.points() {
            let e = (-w * theta).exp() * weight;
            s1 += e;
            s2 += e * theta;
        }
        (s1, s2 * self.alpha)
    }
}

/// Cached spectral propagator. Warm the cache for a time grid with [`MLPropagator::warm`],
/// after which all `apply` methods take `&self` and may be shared across threads.
#[derive(Debug, Clone)]
pub struct MLPropagator {
    alpha: f64,
    dec: SpectralDecomposition,
    rule: Option<SubordinationRule>,
    cache: BTreeMap<u64, CacheEntry>,
}

impl MLPropagator {
    /// `alpha ∈ (3/4, 1]`.
    pub fn new(alpha: f64, dec: SpectralDecomposition) -> Result<Self> {
        if !(alpha > 0.75 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("propagator order alpha = {alpha} outside (3/4, 1]")));
        }
        let rule = if dec.is_real() || alpha == 1.0 { None } else { Some(SubordinationRule::new(alpha)?) };
        Ok(Self { alpha, dec, rule, cache: BTreeMap::new() })
    }

    /// Builds the decomposition of `op` and the propagator in one go.
    pub fn from_operator(alpha: f64, op: &FemOperator) -> Result<Self> {
        Self::new(alpha, op.eigendecompose()?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.dec
    }

    pub fn n_dof(&self) -> usize {
        self.dec.n_dof()
    }

    pub fn cached_times(&self) -> usize {
        self.cache.len()
    }

    /// Populates the cache for every `t` not yet present.
    pub fn warm(&mut self, times: &[f64]) -> Result<()> {
        for &t in times {
            let key = t.to_bits();
            if !self.cache.contains_key(&key) {
                let entry = self.compute(t)?;
                self.cache.insert(key, entry);
            }
        }
        Ok(())
    }

    /// Cached values at exactly `t`.
    pub fn entry(&self, t: f64) -> Result<&CacheEntry> {
        self.cache.get(&t.to_bits()).ok_or(Error::CacheMiss(t))
    }

    /// Scalar values at `t`, computed without touching the cache.
    pub fn compute(&self, t: f64) -> Result<CacheEntry> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("propagator time t = {t}")));
        }
        let a = self.alpha;
        let ta = math::powf(t, a);
        let p1 = MLParams::new(a, 1.0)?;
        let p2 = MLParams::new(a, a)?;
        if let Some(lambdas) = self.dec.real_eigenvalues() {
            let mut s1 = Vec::with_capacity(lambdas.len());
            let mut s2 = Vec::with_capacity(lambdas.len());
            for l in lambdas {
                let z = -l * ta;
                s1.push(mittag_leffler(p1, z)?);
                s2.push(mittag_leffler(p2, z)?);
            }
            return Ok(CacheEntry { s1: ModeValues::Real(s1), s2: ModeValues::Real(s2) });
        }
        let mut s1 = Vec::with_capacity(self.n_dof());
        let mut s2 = Vec::with_capacity(self.n_dof());
        for &l in &self.dec.eigenvalues {
            let w = l * ta;
            let (e1, e2) = if t == 0.0 {
                (Complex64::new(1.0, 0.0), Complex64::new(rgamma(a), 0.0))
            } else if a == 1.0 {
                let e = (-w).exp();
                (e, e)
            } else {
                self.rule.as_ref().expect("complex spectrum carries a subordination rule").evaluate(w)
            };
            s1.push(e1);
            s2.push(e2);
        }
        Ok(CacheEntry { s1: ModeValues::Complex(s1), s2: ModeValues::Complex(s2) })
    }

    /// Typed access to the eigenbasis; `None` if `T` is not the basis arithmetic.
    pub fn modal<T: ModalScalar>(&self) -> Option<Modal<'_, T>> {
        let (phi, phi_inv, load_map) = T::basis(&self.dec.basis)?;
        Some(Modal { propagator: self, phi, phi_inv, load_map })
    }

    /// `S₁h(t) v`, from the cache if warmed for `t`.
    pub fn s1h_apply(&self, t: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.apply(Which::S1, t, v)
    }

    /// `S₂h(t) v`, from the cache if warmed for `t`.
    pub fn s2h_apply(&self, t: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.apply(Which::S2, t, v)
    }

    pub fn apply(&self, which: Which, t: f64, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_dof() {
            return Err(Error::Dimension { expected: self.n_dof(), got: v.len() });
        }
        let owned;
        let entry = match self.cache.get(&t.to_bits()) {
            Some(e) => e,
            None => {
                owned = self.compute(t)?;
                &owned
            }
        };
        match self.modal::<f64>() {
            Some(m) => Ok(m.apply_values(m.values_of(entry, which)?, v)),
            None => {
                let m = self.modal::<Complex64>().expect("basis is real or complex");
                Ok(m.apply_values(m.values_of(entry, which)?, v))
            }
        }
    }
}

/// Eigenbasis view of a propagator in arithmetic `T`.
#[derive(Debug, Clone, Copy)]
pub struct Modal<'a, T: ModalScalar> {
    propagator: &'a MLPropagator,
    pub phi: &'a Mat<T>,
    pub phi_inv: &'a Mat<T>,
    pub load_map: &'a Mat<T>,
}

impl<'a, T: ModalScalar> Modal<'a, T> {
    /// Cached `(E_{α,1}, E_{α,α})` per mode at exactly `t`.
    pub fn cached(&self, t: f64) -> Result<(&'a [T], &'a [T])> {
        let entry = self.propagator.entry(t)?;
        Ok((self.values_of(entry, Which::S1)?, self.values_of(entry, Which::S2)?))
    }

    fn values_of<'e>(&self, entry: &'e CacheEntry, which: Which) -> Result<&'e [T]> {
        T::values(entry.get(which)).ok_or_else(|| Error::InvalidParameter("cache arithmetic mismatch".into()))
    }

    /// Spectral coefficients `Φ⁻¹ v` of a dof vector.
    pub fn to_modes(&self, v: &[f64]) -> Vec<T> {
        let vt: Vec<T> = v.iter().map(|&x| T::from_real(x)).collect();
        self.phi_inv.mul_vec(&vt)
    }

    /// Spectral coefficients of `M⁻¹ b` for a load vector `b`.
    pub fn load_to_modes(&self, b: &[f64]) -> Vec<T> {
        let bt: Vec<T> = b.iter().map(|&x| T::from_real(x)).collect();
        self.load_map.mul_vec(&bt)
    }

    /// Real dof vector `Re(Φ c)`.
    pub fn from_modes(&self, c: &[T]) -> Vec<f64> {
        self.phi.mul_vec(c).into_iter().map(T::real_part).collect()
    }

    fn apply_values(&self, values: &[T], v: &[f64]) -> Vec<f64> {
        let mut c = self.to_modes(v);
        for (ck, &e) in c.iter_mut().zip(values) {
            *ck *= e;
        }
        self.from_modes(&c)
    }
}

/// `∫₀^∞ w(θ) exp(θ t^α A_h) v dθ` with `w = M_α` (S1) or `αθM_α` (S2), by composite
/// Gauss–Legendre quadrature and dense scaling-and-squaring exponentials.
/// At `α = 1` the weight is a point mass at `θ = 1` and the result is `exp(t A_h) v`.
pub fn quadrature_oracle(op: &FemOperator, alpha: f64, t: f64, v: &[f64], which: Which) -> Result<Vec<f64>> {
    let n = op.n_dof();
    if v.len() != n {
        return Err(Error::Dimension { expected: n, got: v.len() });
    }
    if !(t >= 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("oracle needs t >= 0 and 0 < alpha <= 1 (t = {t}, alpha = {alpha})")));
    }
    let generator = op.generator();
    if alpha == 1.0 {
        return Ok(expm(&generator.scale(t))?.mul_vec(v));
    }
    let rule = SubordinationRule::new(alpha)?;
    oracle_with_rule(&generator, &rule, t, v, which)
}

/// As [`quadrature_oracle`] for a prebuilt generator and rule.
pub fn oracle_with_rule(
    generator: &Mat<f64>,
    rule: &SubordinationRule,
    t: f64,
    v: &[f64],
    which: Which,
) -> Result<Vec<f64>> {
    let ta = math::powf(t, rule.alpha());
    let mut out = alloc::vec![0.0; v.len()];
    for (theta, weight) in rule.points() {
        let w = match which {
            Which::S1 => weight,
            Which::S2 => rule.alpha() * theta * weight,
        };
        let e = expm(&generator.scale(theta * ta))?;
        for (o, x) in out.iter_mut().zip(e.mul_vec(v)) {
            *o += w * x;
        }
    }
    Ok(out)
}
