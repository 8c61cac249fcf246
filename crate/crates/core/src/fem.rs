//! Piecewise-linear finite elements on an interval for `−A u = −(D u')' + q u' + c₀ u`.
//!
//! Nodal vectors carry one value per mesh node; dof vectors carry one value per free
//! node (all nodes for Neumann/Robin, interior nodes for Dirichlet).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dot, real_eigen, symmetric_eigen, Cholesky, Lu, Mat};
use crate::math;
use crate::quad::gauss_legendre;

/// Scalar function of position.
pub type Field = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Gauss points per cell used for assembly and load vectors.
pub const CELL_QUADRATURE_POINTS: usize = 3;

/// Relative residual bound `‖KΦ_k − λ_k MΦ_k‖ ≤ tol·‖K‖·‖Φ_k‖` enforced per eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Eigenbases with a larger 1-norm condition number are refused.
pub const CONDITION_LIMIT: f64 = 1e10;

/// Nodes of a one-dimensional mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Empty("mesh cells"));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("domain ({a}, {b}) is empty")));
        }
        let h = (b - a) / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|i| a + i as f64 * h).collect();
        nodes[n_cells] = b;
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Empty("mesh nodes"));
        }
        for (cell, w) in nodes.windows(2).enumerate() {
            let width = w[1] - w[0];
            if !(width > 0.0) || !width.is_finite() {
                return Err(Error::DegenerateMesh { cell, width });
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Largest cell width.
    pub fn h(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolant of nodal values, evaluated at `x` (clamped to the domain).
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return values[0];
        }
        if x >= self.nodes[n - 1] {
            return values[n - 1];
        }
        let cell = self.nodes.partition_point(|&p| p <= x) - 1;
        let (x0, x1) = (self.nodes[cell], self.nodes[cell + 1]);
        let s = (x - x0) / (x1 - x0);
        values[cell] * (1.0 - s) + values[cell + 1] * s
    }

    /// Linear interpolation of nodal values from `self` onto the nodes of `fine`.
    pub fn prolong(&self, values: &[f64], fine: &Mesh1D) -> Result<Vec<f64>> {
        if values.len() != self.n_nodes() {
            return Err(Error::Dimension { expected: self.n_nodes(), got: values.len() });
        }
        if fine.a() != self.a() || fine.b() != self.b() {
            return Err(Error::MeshMismatch(format!(
                "domains ({}, {}) and ({}, {}) differ",
                self.a(),
                self.b(),
                fine.a(),
                fine.b()
            )));
        }
        Ok(fine.nodes.iter().map(|&x| self.interpolate(values, x)).collect())
    }

    /// Transpose of [`Mesh1D::prolong`]: sends fine nodal weights to the coarse nodes with
    /// the coarse hat functions evaluated at the fine nodes.
    pub fn restrict(&self, fine_values: &[f64], fine: &Mesh1D) -> Result<Vec<f64>> {
        if fine_values.len() != fine.n_nodes() {
            return Err(Error::Dimension { expected: fine.n_nodes(), got: fine_values.len() });
        }
        if fine.a() != self.a() || fine.b() != self.b() {
            return Err(Error::MeshMismatch(format!("domains ({}, {}) and ({}, {}) differ", self.a(), self.b(), fine.a(), fine.b())));
        }
        let n = self.n_nodes();
        let mut out = vec![0.0; n];
        for (&x, &v) in fine.nodes.iter().zip(fine_values) {
            let cell = (self.nodes.partition_point(|&p| p <= x).max(1) - 1).min(n - 2);
            let (x0, x1) = (self.nodes[cell], self.nodes[cell + 1]);
            let s = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
            out[cell] += (1.0 - s) * v;
            out[cell + 1] += s * v;
        }
        Ok(out)
    }

    /// Gauss points and weights of every cell, flattened: `(cell, x, weight)`.
    fn cell_quadrature(&self) -> Vec<(usize, f64, f64)> {
        let (gx, gw) = gauss_legendre(CELL_QUADRATURE_POINTS);
        let mut out = Vec::with_capacity(self.n_cells() * gx.len());
        for (cell, w) in self.nodes.windows(2).enumerate() {
            let (x0, x1) = (w[0], w[1]);
            let half = 0.5 * (x1 - x0);
            let mid = 0.5 * (x0 + x1);
            for (&xi, &wi) in gx.iter().zip(&gw) {
                out.push((cell, mid + half * xi, half * wi));
            }
        }
        out
    }
}

/// Diffusion `D`, advection `q` and Gårding shift `c₀`.
#[derive(Clone)]
pub struct CoefficientField {
    pub diffusion: Field,
    pub advection: Field,
    /// `None` selects the default shift, see [`CoefficientField::resolve_shift`].
    pub shift: Option<f64>,
}

impl core::fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CoefficientField").field("shift", &self.shift).finish_non_exhaustive()
    }
}

impl CoefficientField {
    pub fn constant(d: f64, q: f64) -> Self {
        Self { diffusion: Arc::new(move |_| d), advection: Arc::new(move |_| q), shift: None }
    }

    pub fn with_shift(mut self, c0: f64) -> Self {
        self.shift = Some(c0);
        self
    }

    /// `(min D, max |q|)` sampled at the nodes and the cell Gauss points of `mesh`.
    pub fn bounds(&self, mesh: &Mesh1D) -> Result<(f64, f64)> {
        let mut c1 = f64::INFINITY;
        let mut q_max: f64 = 0.0;
        let points = mesh.nodes.iter().copied().chain(mesh.cell_quadrature().into_iter().map(|p| p.1));
        for x in points {
            let d = (self.diffusion)(x);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NonElliptic { x, value: d });
            }
            c1 = c1.min(d);
            let q = (self.advection)(x);
            if !q.is_finite() {
                return Err(Error::InvalidParameter(format!("advection q({x}) = {q}")));
            }
            q_max = q_max.max(q.abs());
        }
        Ok((c1, q_max))
    }

    /// The explicit shift, or `0` without advection and `‖q‖²_∞ / (2 c₁)` with it.
    pub fn resolve_shift(&self, mesh: &Mesh1D) -> Result<f64> {
        let (c1, q_max) = self.bounds(mesh)?;
        match self.shift {
            Some(c0) if c0 >= 0.0 && c0.is_finite() => Ok(c0),
            Some(c0) => Err(Error::InvalidParameter(format!("shift c0 = {c0} must be >= 0"))),
            None if q_max == 0.0 => Ok(0.0),
            None => Ok(q_max * q_max / (2.0 * c1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
}

/// Homogeneous boundary condition; Robin reads `D ∂u/∂n + α₀ u = 0` at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub kind: BcKind,
    pub alpha0: f64,
}

impl BoundaryCondition {
    pub fn dirichlet() -> Self {
        Self { kind: BcKind::Dirichlet, alpha0: 0.0 }
    }

    pub fn neumann() -> Self {
        Self { kind: BcKind::Neumann, alpha0: 0.0 }
    }

    pub fn robin(alpha0: f64) -> Self {
        Self { kind: BcKind::Robin, alpha0 }
    }

    fn robin_coefficient(&self) -> f64 {
        match self.kind {
            BcKind::Dirichlet | BcKind::Neumann => 0.0,
            BcKind::Robin => self.alpha0,
        }
    }
}

/// Symmetric tridiagonal matrix over all mesh nodes.
#[derive(Debug, Clone, PartialEq)]
struct NodeTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl NodeTridiagonal {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for i in 0..n - 1 {
            out[i] += self.off[i] * v[i + 1];
            out[i + 1] += self.off[i] * v[i];
        }
        out
    }
}

/// Assembled mass and stiffness matrices on the free dofs.
#[derive(Debug, Clone)]
pub struct FemOperator {
    mesh: Mesh1D,
    bc: BoundaryCondition,
    shift: f64,
    advective: bool,
    dof_nodes: Vec<usize>,
    mass: Mat<f64>,
    stiffness: Mat<f64>,
    node_mass: NodeTridiagonal,
    mass_chol: Cholesky,
}

/// Assemble `M` and `K`, where `vᵀKw = a(w, v)` with
/// `a(ρ, ξ) = ∫ D ρ'ξ' + ∫ q ρ' ξ + c₀ ∫ ρ ξ + α₀ (ρξ)(a) + α₀ (ρξ)(b)`.
pub fn assemble(mesh: &Mesh1D, coeff: &CoefficientField, bc: BoundaryCondition) -> Result<FemOperator> {
    let c0 = coeff.resolve_shift(mesh)?;
    let (_, q_max) = coeff.bounds(mesh)?;
    if !bc.alpha0.is_finite() {
        return Err(Error::InvalidParameter(format!("Robin coefficient {}", bc.alpha0)));
    }
    let nn = mesh.n_nodes();
    let mut m_full = Mat::zeros(nn, nn);
    let mut k_full = Mat::zeros(nn, nn);
    for (cell, x, w) in mesh.cell_quadrature() {
        let (x0, x1) = (mesh.nodes[cell], mesh.nodes[cell + 1]);
        let h = x1 - x0;
        let phi = [(x1 - x) / h, (x - x0) / h];
        let dphi = [-1.0 / h, 1.0 / h];
        let d = (coeff.diffusion)(x);
        let q = (coeff.advection)(x);
        for i in 0..2 {
            for j in 0..2 {
                let (gi, gj) = (cell + i, cell + j);
                let mass = w * phi[i] * phi[j];
                m_full[(gi, gj)] += mass;
                // row = test function ξ = φ_i, column = trial ρ = φ_j
                k_full[(gi, gj)] += w * (d * dphi[j] * dphi[i] + q * dphi[j] * phi[i]) + c0 * mass;
            }
        }
    }
    let a0 = bc.robin_coefficient();
    k_full[(0, 0)] += a0;
    k_full[(nn - 1, nn - 1)] += a0;

    let dof_nodes: Vec<usize> = match bc.kind {
        BcKind::Dirichlet => (1..nn - 1).collect(),
        BcKind::Neumann | BcKind::Robin => (0..nn).collect(),
    };
    if dof_nodes.is_empty() {
        return Err(Error::Empty("free degrees of freedom"));
    }
    let n = dof_nodes.len();
    let mass = Mat::from_fn(n, n, |i, j| m_full[(dof_nodes[i], dof_nodes[j])]);
    let stiffness = Mat::from_fn(n, n, |i, j| k_full[(dof_nodes[i], dof_nodes[j])]);
    let node_mass = NodeTridiagonal {
        diag: (0..nn).map(|i| m_full[(i, i)]).collect(),
        off: (0..nn - 1).map(|i| m_full[(i, i + 1)]).collect(),
    };
    let mass_chol = Cholesky::factor(&mass)?;
    Ok(FemOperator {
        mesh: mesh.clone(),
        bc,
        shift: c0,
        advective: q_max > 0.0,
        dof_nodes,
        mass,
        stiffness,
        node_mass,
        mass_chol,
    })
}

impl FemOperator {
    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// The Gårding shift `c₀` included in the stiffness matrix.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn has_advection(&self) -> bool {
        self.advective
    }

    pub fn n_dof(&self) -> usize {
        self.dof_nodes.len()
    }

    /// Mesh node index of every dof.
    pub fn dof_nodes(&self) -> &[usize] {
        &self.dof_nodes
    }

    pub fn mass(&self) -> &Mat<f64> {
        &self.mass
    }

    pub fn stiffness(&self) -> &Mat<f64> {
        &self.stiffness
    }

    /// `M⁻¹ b`.
    pub fn mass_solve(&self, b: &[f64]) -> Vec<f64> {
        self.mass_chol.solve(b)
    }

    /// Dense `A_h = −M⁻¹K`.
    pub fn generator(&self) -> Mat<f64> {
        let n = self.n_dof();
        let mut g = Mat::zeros(n, n);
        for j in 0..n {
            let col = self.mass_solve(&self.stiffness.column(j));
            for i in 0..n {
                g[(i, j)] = -col[i];
            }
        }
        g
    }

    /// Dof vector to nodal vector, with zeros on constrained nodes.
    pub fn to_nodes(&self, dofs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.n_nodes()];
        for (&node, &v) in self.dof_nodes.iter().zip(dofs) {
            out[node] = v;
        }
        out
    }

    /// Nodal vector restricted to the dofs.
    pub fn to_dofs(&self, nodes: &[f64]) -> Vec<f64> {
        self.dof_nodes.iter().map(|&i| nodes[i]).collect()
    }

    /// Load vector `b_i = ∫ f φ_i` over the dofs, by cell Gauss quadrature.
    pub fn load(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mesh = &self.mesh;
        let mut b = vec![0.0; mesh.n_nodes()];
        for (cell, x, w) in mesh.cell_quadrature() {
            let (x0, x1) = (mesh.nodes[cell], mesh.nodes[cell + 1]);
            let h = x1 - x0;
            let fx = f(x);
            b[cell] += w * fx * (x1 - x) / h;
            b[cell + 1] += w * fx * (x - x0) / h;
        }
        self.to_dofs(&b)
    }

    /// Load vector of the piecewise-linear interpolant of nodal values `g` (all nodes,
    /// boundary nodes included).
    pub fn nodal_load(&self, g: &[f64]) -> Vec<f64> {
        self.to_dofs(&self.node_mass.apply(g))
    }

    /// `P_h f`: the dof vector `v` with `M v = (∫ f φ_i)_i`.
    pub fn l2_project(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.mass_solve(&self.load(f))
    }

    /// `P_h` of the piecewise-linear interpolant of nodal values.
    pub fn project_nodal(&self, g: &[f64]) -> Vec<f64> {
        self.mass_solve(&self.nodal_load(g))
    }

    /// `P_h` of a finite-element function given by dof values on `fine`; exact when the
    /// mesh of `self` is nested in that of `fine`.
    pub fn project_from(&self, fine: &FemOperator, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != fine.n_dof() {
            return Err(Error::Dimension { expected: fine.n_dof(), got: v.len() });
        }
        let fine_load = fine.node_mass.apply(&fine.to_nodes(v));
        let coarse_load = self.mesh.restrict(&fine_load, &fine.mesh)?;
        Ok(self.mass_solve(&self.to_dofs(&coarse_load)))
    }

    /// `(vᵀ M v)^{1/2}` for a dof vector.
    pub fn mass_norm(&self, v: &[f64]) -> f64 {
        math::sqrt(dot(v, &self.mass.mul_vec(v)).max(0.0))
    }

    /// L² norm of the piecewise-linear function with the given nodal values.
    pub fn nodal_mass_norm(&self, v: &[f64]) -> f64 {
        math::sqrt(dot(v, &self.node_mass.apply(v)).max(0.0))
    }

    /// Full generalized eigen-decomposition `K Φ = M Φ diag(λ)`.
    pub fn eigendecompose(&self) -> Result<SpectralDecomposition> {
        eigendecompose(self)
    }
}

/// Coordinate triplets `i j value`, one nonzero per line, 17 significant digits.
pub fn triplet_dump(m: &Mat<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{i} {j} {v:.16e}");
            }
        }
    }
    out
}

/// Eigenbasis of the pencil `(K, M)` in real or complex arithmetic.
#[derive(Debug, Clone)]
pub enum Basis {
    /// Real eigenvectors. For a symmetric pencil `Φ` is `M`-orthonormal.
    Real {
        phi: Mat<f64>,
        phi_inv: Mat<f64>,
        /// `Φ⁻¹ M⁻¹`, mapping a load vector to spectral coefficients of its projection.
        load_map: Mat<f64>,
    },
    Complex {
        phi: Mat<Complex64>,
        phi_inv: Mat<Complex64>,
        load_map: Mat<Complex64>,
    },
}

/// Generalized eigenpairs of `(K, M)`; `−A_h = Φ diag(λ) Φ⁻¹`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Sorted by real part, ascending.
    pub eigenvalues: Vec<Complex64>,
    pub basis: Basis,
    /// 1-norm condition number of the eigenbasis in `M`-whitened coordinates
    /// (exactly 1 for a symmetric pencil).
    pub condition_estimate: f64,
    pub self_adjoint: bool,
    mass: Mat<f64>,
}

/// Full generalized eigen-decomposition of an assembled operator.
///
/// With `M = LLᵀ` the pencil is reduced to `C = L⁻¹ K L⁻ᵀ`; symmetric `C` goes
/// through tridiagonal QL, anything else through Hessenberg QR.
pub fn eigendecompose(op: &FemOperator) -> Result<SpectralDecomposition> {
    decompose_pencil(&op.stiffness, &op.mass)
}

/// Generalized eigen-decomposition of a pencil `(K, M)` with `M` symmetric positive definite.
pub fn decompose_pencil(stiffness: &Mat<f64>, mass: &Mat<f64>) -> Result<SpectralDecomposition> {
    if !stiffness.is_square() || stiffness.rows() != mass.rows() || !mass.is_square() {
        return Err(Error::Dimension { expected: mass.rows(), got: stiffness.rows() });
    }
    let n = mass.rows();
    let chol = &Cholesky::factor(mass)?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ, built column by column
    let mut y = Mat::zeros(n, n);
    for j in 0..n {
        let col = chol.forward(&stiffness.column(j));
        for i in 0..n {
            y[(i, j)] = col[i];
        }
    }
    let mut c = Mat::zeros(n, n);
    for i in 0..n {
        let row = chol.forward(y.row(i));
        c.row_mut(i).copy_from_slice(&row);
    }
    let k_norm = stiffness.norm_inf();
    let self_adjoint = stiffness.is_symmetric();

    let dec = if self_adjoint {
        let (values, vecs) = symmetric_eigen(&c)?;
        let phi = l_inv_t_columns(chol, &vecs);
        let phi_inv = phi.transpose().matmul(mass);
        let load_map = phi.transpose();
        SpectralDecomposition {
            eigenvalues: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            basis: Basis::Real { phi, phi_inv, load_map },
            condition_estimate: 1.0,
            self_adjoint: true,
            mass: mass.clone(),
        }
    } else {
        let eig = real_eigen(&c)?;
        let mut order: Vec<usize> = (0..n).collect();
        let values = eig.values();
        order.sort_by(|&a, &b| {
            values[a].re.total_cmp(&values[b].re).then(values[a].im.total_cmp(&values[b].im))
        });
        let eigenvalues: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
        let l_inv = Lu::factor(l)?.inverse();
        if eig.is_real() {
            let mut yv = Mat::from_fn(n, n, |i, j| eig.vectors[(i, order[j])]);
            normalize_columns(&mut yv);
            let y_inv = Lu::factor(&yv)?.inverse();
            let cond = yv.norm1() * y_inv.norm1();
            check_condition(cond)?;
            let phi = l_inv_t_columns(chol, &yv);
            let phi_inv = y_inv.matmul(&l.transpose());
            let load_map = y_inv.matmul(&l_inv);
            SpectralDecomposition {
                eigenvalues,
                basis: Basis::Real { phi, phi_inv, load_map },
                condition_estimate: cond,
                self_adjoint: false,
                mass: mass.clone(),
            }
        } else {
            let cv = eig.complex_vectors();
            let mut yv = Mat::from_fn(n, n, |i, j| cv[(i, order[j])]);
            normalize_columns(&mut yv);
            let y_inv = Lu::factor(&yv)?.inverse();
            let cond = yv.norm1() * y_inv.norm1();
            check_condition(cond)?;
            let l_inv_t = l_inv.transpose().to_complex();
            let phi = l_inv_t.matmul(&yv);
            let phi_inv = y_inv.matmul(&l.transpose().to_complex());
            let load_map = y_inv.matmul(&l_inv.to_complex());
            SpectralDecomposition {
                eigenvalues,
                basis: Basis::Complex { phi, phi_inv, load_map },
                condition_estimate: cond,
                self_adjoint: false,
                mass: mass.clone(),
            }
        }
    };
    dec.check_residuals(stiffness, k_norm)?;
    let min_re = dec.eigenvalues.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
    if min_re < -EIGEN_RESIDUAL_TOL * k_norm {
        return Err(Error::NotCoercive(min_re));
    }
    Ok(dec)
}

fn check_condition(cond: f64) -> Result<()> {
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned(cond));
    }
    Ok(())
}

fn normalize_columns<T: crate::linalg::Scalar>(m: &mut Mat<T>) {
    for j in 0..m.cols() {
        let sq: f64 = (0..m.rows())
            .map(|i| {
                let a = m[(i, j)].modulus();
                a * a
            })
            .sum();
        let norm = math::sqrt(sq);
        if norm > 0.0 {
            let inv = T::from_real(1.0 / norm);
            for i in 0..m.rows() {
                m[(i, j)] *= inv;
            }
        }
    }
}

fn l_inv_t_columns(chol: &Cholesky, y: &Mat<f64>) -> Mat<f64> {
    let n = y.rows();
    let mut out = Mat::zeros(n, y.cols());
    for j in 0..y.cols() {
        let col = chol.backward(&y.column(j));
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    out
}

impl SpectralDecomposition {
    pub fn n_dof(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `true` when every eigenvalue and eigenvector is real.
    pub fn is_real(&self) -> bool {
        matches!(self.basis, Basis::Real { .. })
    }

    /// Real parts of the eigenvalues, if the spectrum is real.
    pub fn real_eigenvalues(&self) -> Option<Vec<f64>> {
        self.is_real().then(|| self.eigenvalues.iter().map(|l| l.re).collect())
    }

    /// Smallest real part, the discrete decay rate.
    pub fn min_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::INFINITY, f64::min)
    }

    /// Eigenvector `k` as complex dof values.
    pub fn mode(&self, k: usize) -> Vec<Complex64> {
        match &self.basis {
            Basis::Real { phi, .. } => phi.column(k).into_iter().map(Complex64::from).collect(),
            Basis::Complex { phi, .. } => phi.column(k),
        }
    }

    fn check_residuals(&self, k: &Mat<f64>, k_norm: f64) -> Result<()> {
        let kc = k.to_complex();
        let mc = self.mass.to_complex();
        for idx in 0..self.n_dof() {
            let v = self.mode(idx);
            let kv = kc.mul_vec(&v);
            let mv = mc.mul_vec(&v);
            let lambda = self.eigenvalues[idx];
            let residual = kv.iter().zip(&mv).map(|(a, b)| (*a - lambda * b).norm()).fold(0.0, f64::max);
            let scale = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let bound = EIGEN_RESIDUAL_TOL * k_norm * scale;
            if !(residual <= bound) {
                return Err(Error::EigenResidual { index: idx, residual, bound });
            }
        }
        Ok(())
    }

    /// `(Σ_k λ_k^{2ρ} |c_k|²)^{1/2}` with `c = ΦᵀMv` the `M`-orthonormal coefficients of `v`.
    pub fn fractional_norm(&self, rho: f64, v: &[f64]) -> Result<f64> {
        let Basis::Real { phi_inv, .. } = &self.basis else {
            return Err(Error::NotSelfAdjoint);
        };
        if !self.self_adjoint {
            return Err(Error::NotSelfAdjoint);
        }
        if v.len() != self.n_dof() {
            return Err(Error::Dimension { expected: self.n_dof(), got: v.len() });
        }
        let c = phi_inv.mul_vec(v);
        let mut sum = 0.0;
        for (lambda, ck) in self.eigenvalues.iter().zip(&c) {
            let weight = if rho == 0.0 { 1.0 } else { math::powf(lambda.re.max(0.0), 2.0 * rho) };
            sum += weight * ck * ck;
        }
        Ok(math::sqrt(sum))
    }
}
