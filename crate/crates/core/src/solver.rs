//! Bilinear finite elements for the anti-plane problem `div(C ∇u) = 0` with
//! Dirichlet data on `∂_D Ω` and traction-free crack faces.

use rayon::prelude::*;
use sprs::{CsMat, TriMat};
use sprs_ldl::Ldl;

use crate::error::{Error, Result};
use crate::materials::{LaminateSpec, Stiffness};
use crate::mesh::{BoundaryDatum, CrackedMesh, Grid, MeshParams};
use std::sync::Arc;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    /// Sparse LDLᵀ with reverse Cuthill-McKee ordering and iterative refinement.
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg { max_iter: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub kind: SolverKind,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, kind: SolverKind::Direct }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub values: Vec<f64>,
    /// Relative residual of the reduced system.
    pub residual: f64,
    pub iterations: usize,
    fingerprint: (usize, usize, usize),
}

impl DisplacementField {
    pub fn check_mesh(&self, mesh: &CrackedMesh) -> Result<()> {
        if self.fingerprint != mesh.fingerprint() || self.values.len() != mesh.n_nodes() {
            return Err(Error::MeshMismatch(format!(
                "field built on {:?}, mesh is {:?}",
                self.fingerprint,
                mesh.fingerprint()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub l: f64,
    pub energy: f64,
}

const GAUSS: f64 = 0.577_350_269_189_625_8;

/// Shape-function gradients and weights at the 2×2 Gauss points of one
/// element with corners listed counter-clockwise.
pub(crate) struct ElementKernel {
    pub dndx: [[f64; 4]; 4],
    pub dndy: [[f64; 4]; 4],
    pub weight: [f64; 4],
}

impl ElementKernel {
    pub fn new(p: &[[f64; 2]; 4]) -> Self {
        let mut k = Self { dndx: [[0.0; 4]; 4], dndy: [[0.0; 4]; 4], weight: [0.0; 4] };
        let pts = [(-GAUSS, -GAUSS), (GAUSS, -GAUSS), (GAUSS, GAUSS), (-GAUSS, GAUSS)];
        for (g, &(xi, eta)) in pts.iter().enumerate() {
            let dxi = [-(1.0 - eta), 1.0 - eta, 1.0 + eta, -(1.0 + eta)].map(|v| 0.25 * v);
            let deta = [-(1.0 - xi), -(1.0 + xi), 1.0 + xi, 1.0 - xi].map(|v| 0.25 * v);
            let (mut j11, mut j12, mut j21, mut j22) = (0.0, 0.0, 0.0, 0.0);
            for a in 0..4 {
                j11 += dxi[a] * p[a][0];
                j12 += dxi[a] * p[a][1];
                j21 += deta[a] * p[a][0];
                j22 += deta[a] * p[a][1];
            }
            let det = j11 * j22 - j12 * j21;
            for a in 0..4 {
                k.dndx[g][a] = (j22 * dxi[a] - j12 * deta[a]) / det;
                k.dndy[g][a] = (-j21 * dxi[a] + j11 * deta[a]) / det;
            }
            k.weight[g] = det;
        }
        k
    }

    pub fn for_element(mesh: &CrackedMesh, e: usize) -> Self {
        let q = mesh.elems[e];
        Self::new(&q.map(|n| mesh.nodes[n]))
    }

    pub fn stiffness_matrix(&self, c: Stiffness) -> [[f64; 4]; 4] {
        let mut ke = [[0.0; 4]; 4];
        for g in 0..4 {
            let w = self.weight[g];
            for a in 0..4 {
                for b in 0..4 {
                    ke[a][b] += w * (c.mu1 * self.dndx[g][a] * self.dndx[g][b] + c.mu2 * self.dndy[g][a] * self.dndy[g][b]);
                }
            }
        }
        ke
    }

    /// `(∫ u_x², ∫ u_y²)` over the element for nodal values `u`.
    pub fn gradient_squares(&self, u: &[f64; 4]) -> (f64, f64) {
        let (mut sx, mut sy) = (0.0, 0.0);
        for g in 0..4 {
            let ux: f64 = (0..4).map(|a| self.dndx[g][a] * u[a]).sum();
            let uy: f64 = (0..4).map(|a| self.dndy[g][a] * u[a]).sum();
            sx += self.weight[g] * ux * ux;
            sy += self.weight[g] * uy * uy;
        }
        (sx, sy)
    }
}

pub(crate) fn nodal(mesh: &CrackedMesh, field: &DisplacementField, e: usize) -> [f64; 4] {
    mesh.elems[e].map(|n| field.values[n])
}

fn check_stiffness(mesh: &CrackedMesh, stiffness: &[Stiffness]) -> Result<()> {
    if stiffness.len() != mesh.elems.len() {
        return Err(Error::InvalidStiffness(format!(
            "{} tensors for {} elements",
            stiffness.len(),
            mesh.elems.len()
        )));
    }
    if let Some((e, s)) = stiffness
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.mu1 > 0.0 && s.mu2 > 0.0 && s.mu1.is_finite() && s.mu2.is_finite()))
    {
        return Err(Error::InvalidStiffness(format!("element {e} has non-positive moduli {s:?}")));
    }
    Ok(())
}

pub fn solve(mesh: &CrackedMesh, stiffness: &[Stiffness], datum: &BoundaryDatum, tol: f64) -> Result<DisplacementField> {
    solve_with(mesh, stiffness, datum, &SolverOptions::with_tol(tol))
}

pub fn solve_with(
    mesh: &CrackedMesh,
    stiffness: &[Stiffness],
    datum: &BoundaryDatum,
    opts: &SolverOptions,
) -> Result<DisplacementField> {
    if !(opts.tol > 0.0 && opts.tol <= 1e-4) {
        return Err(Error::InvalidSpec(format!("solver tolerance must lie in (0, 1e-4], got {}", opts.tol)));
    }
    check_stiffness(mesh, stiffness)?;
    let n = mesh.n_nodes();
    let g = mesh.dirichlet_values(datum)?;
    let mut fixed = vec![None; n];
    for (k, &node) in mesh.dirichlet_nodes.iter().enumerate() {
        fixed[node] = Some(g[k]);
    }
    let mut dof = vec![usize::MAX; n];
    let mut n_free = 0;
    for i in 0..n {
        if fixed[i].is_none() {
            dof[i] = n_free;
            n_free += 1;
        }
    }
    let mut tri = TriMat::with_capacity((n_free, n_free), 16 * mesh.elems.len());
    let mut rhs = vec![0.0; n_free];
    for (e, q) in mesh.elems.iter().enumerate() {
        let ke = ElementKernel::for_element(mesh, e).stiffness_matrix(stiffness[e]);
        for a in 0..4 {
            if fixed[q[a]].is_some() {
                continue;
            }
            let ra = dof[q[a]];
            for b in 0..4 {
                match fixed[q[b]] {
                    Some(v) => rhs[ra] -= ke[a][b] * v,
                    None => tri.add_triplet(ra, dof[q[b]], ke[a][b]),
                }
            }
        }
    }
    let k: CsMat<f64> = tri.to_csc();
    let (x, residual, iterations) = if rhs.iter().all(|&v| v == 0.0) {
        (vec![0.0; n_free], 0.0, 0)
    } else {
        match opts.kind {
            SolverKind::Direct => solve_direct(&k, &rhs, opts.tol)?,
            SolverKind::Cg { max_iter } => solve_cg(&k, &rhs, opts.tol, max_iter)?,
        }
    };
    let values = (0..n).map(|i| fixed[i].unwrap_or_else(|| x[dof[i]])).collect();
    Ok(DisplacementField { values, residual, iterations, fingerprint: mesh.fingerprint() })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(k: &CsMat<f64>, x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (col, xv) in k.outer_iterator().zip(x) {
        for (row, &kv) in col.iter() {
            r[row] -= kv * xv;
        }
    }
    r
}

fn solve_direct(k: &CsMat<f64>, b: &[f64], tol: f64) -> Result<(Vec<f64>, f64, usize)> {
    let ldl = Ldl::new()
        .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
        .numeric(k.view())
        .map_err(|e| Error::Factorization(e.to_string()))?;
    if let Some(d) = ldl.d().iter().find(|&&d| !(d > 0.0)) {
        return Err(Error::Factorization(format!("matrix is not positive definite (pivot {d})")));
    }
    let bn = norm(b);
    let mut x: Vec<f64> = ldl.solve(b);
    let mut r = residual(k, &x, b);
    let mut rel = norm(&r) / bn;
    let mut steps = 1;
    while rel > tol && steps < 4 {
        let dx: Vec<f64> = ldl.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
        r = residual(k, &x, b);
        rel = norm(&r) / bn;
        steps += 1;
    }
    if !(rel <= tol) {
        return Err(Error::SolverDiverged { residual: rel, iterations: steps });
    }
    Ok((x, rel, steps))
}

fn solve_cg(k: &CsMat<f64>, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64, usize)> {
    let n = b.len();
    let mut diag = vec![0.0; n];
    for (c, col) in k.outer_iterator().enumerate() {
        for (r, &v) in col.iter() {
            if r == c {
                diag[c] += v;
            }
        }
    }
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Factorization("non-positive diagonal entry".into()));
    }
    let bn = norm(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, d)| ri / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 1..=max_iter {
        let mut kp = vec![0.0; n];
        for (col, pv) in k.outer_iterator().zip(&p) {
            for (row, &kv) in col.iter() {
                kp[row] += kv * pv;
            }
        }
        let pkp: f64 = p.iter().zip(&kp).map(|(a, b)| a * b).sum();
        if !(pkp > 0.0) {
            return Err(Error::Factorization("matrix is not positive definite".into()));
        }
        let alpha = rz / pkp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * kp[i];
        }
        let rel = norm(&r) / bn;
        if rel <= tol {
            return Ok((x, rel, it));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged { residual: norm(&r) / bn, iterations: max_iter })
}

/// `½ ∫ ∇u C ∇uᵀ` by element-wise Gauss quadrature.
pub fn condensed_energy(mesh: &CrackedMesh, field: &DisplacementField, stiffness: &[Stiffness]) -> Result<EnergySample> {
    field.check_mesh(mesh)?;
    check_stiffness(mesh, stiffness)?;
    let energy: f64 = (0..mesh.elems.len())
        .map(|e| {
            let (sx, sy) = ElementKernel::for_element(mesh, e).gradient_squares(&nodal(mesh, field, e));
            0.5 * (stiffness[e].mu1 * sx + stiffness[e].mu2 * sy)
        })
        .sum();
    Ok(EnergySample { l: mesh.tip_l, energy })
}

/// `∫ |∇u|²` over the mesh.
pub fn gradient_norm_sq(mesh: &CrackedMesh, field: &DisplacementField) -> Result<f64> {
    field.check_mesh(mesh)?;
    Ok((0..mesh.elems.len())
        .map(|e| {
            let (sx, sy) = ElementKernel::for_element(mesh, e).gradient_squares(&nodal(mesh, field, e));
            sx + sy
        })
        .sum())
}

/// `∫ |∇u₁ − ∇u₂|²` for fields on two cracked meshes sharing one grid.
pub fn gradient_difference_sq(
    m1: &CrackedMesh,
    f1: &DisplacementField,
    m2: &CrackedMesh,
    f2: &DisplacementField,
) -> Result<f64> {
    f1.check_mesh(m1)?;
    f2.check_mesh(m2)?;
    if m1.grid() != m2.grid() {
        return Err(Error::MeshMismatch("meshes are built on different grids".into()));
    }
    Ok((0..m1.elems.len())
        .map(|e| {
            let (a, b) = (nodal(m1, f1, e), nodal(m2, f2, e));
            let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]];
            let (sx, sy) = ElementKernel::for_element(m1, e).gradient_squares(&d);
            sx + sy
        })
        .sum())
}

/// `∫ ∇u C ∇uᵀ` and its `μ₁ |∂ₓu|²` part over the elements whose centroid
/// lies in `a < x < b`.
pub fn windowed_energy(
    mesh: &CrackedMesh,
    field: &DisplacementField,
    stiffness: &[Stiffness],
    (a, b): (f64, f64),
) -> Result<(f64, f64)> {
    field.check_mesh(mesh)?;
    check_stiffness(mesh, stiffness)?;
    let grid = mesh.grid();
    let (mut total, mut first) = (0.0, 0.0);
    for e in 0..mesh.elems.len() {
        let x = grid.elem_centroid(e)[0];
        if x <= a || x >= b {
            continue;
        }
        let (sx, sy) = ElementKernel::for_element(mesh, e).gradient_squares(&nodal(mesh, field, e));
        total += stiffness[e].mu1 * sx + stiffness[e].mu2 * sy;
        first += stiffness[e].mu1 * sx;
    }
    Ok((total, first))
}

/// Solve and evaluate the energy at one tip of a prepared grid.
pub fn energy_at(
    grid: &Arc<Grid>,
    stiffness: &[Stiffness],
    l: f64,
    datum: &BoundaryDatum,
    opts: &SolverOptions,
) -> Result<(CrackedMesh, DisplacementField, EnergySample)> {
    let mesh = grid.crack_at(l)?;
    let field = solve_with(&mesh, stiffness, datum, opts)?;
    let sample = condensed_energy(&mesh, &field, stiffness)?;
    Ok((mesh, field, sample))
}

/// Condensed energy at each tip, solved in parallel and returned in the
/// order of `tips`.
pub fn energy_curve(
    spec: &LaminateSpec,
    params: &MeshParams,
    tips: &[f64],
    datum: &BoundaryDatum,
    tol: f64,
) -> Result<Vec<EnergySample>> {
    let grid = Arc::new(Grid::for_laminate(spec, params)?);
    let stiffness = grid.laminate_stiffness(spec)?;
    energy_curve_on(&grid, &stiffness, tips, datum, &SolverOptions::with_tol(tol))
}

pub fn energy_curve_on(
    grid: &Arc<Grid>,
    stiffness: &[Stiffness],
    tips: &[f64],
    datum: &BoundaryDatum,
    opts: &SolverOptions,
) -> Result<Vec<EnergySample>> {
    tips.par_iter()
        .map(|&l| energy_at(grid, stiffness, l, datum, opts).map(|(_, _, s)| s))
        .collect()
}
