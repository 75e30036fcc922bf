//! Layer-aligned structured quadrilateral meshes of the cracked rectangle.
//!
//! A [`Grid`] is the tensor grid of x- and y-lines; [`Grid::crack_at`] turns
//! it into a [`CrackedMesh`] by duplicating the nodes on the crack faces.
//! Base nodes are numbered `j * (nx + 1) + i`; the lower-face copies of the
//! crack nodes are appended after them.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::materials::{LaminateSpec, Orientation, Phase, Stiffness, GEOM_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParams {
    /// Element columns across each material sub-layer (vertical layers).
    pub elems_per_layer_x: usize,
    /// Element rows across each half-height.
    pub elems_y: usize,
    /// Grading exponent toward `y = 0` (1 means uniform).
    pub refine_near_crack: f64,
}

impl Default for MeshParams {
    fn default() -> Self {
        Self { elems_per_layer_x: 8, elems_y: 32, refine_near_crack: 1.0 }
    }
}

impl MeshParams {
    pub fn new(elems_per_layer_x: usize, elems_y: usize, refine_near_crack: f64) -> Result<Self> {
        let p = Self { elems_per_layer_x, elems_y, refine_near_crack };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elems_per_layer_x < 2 {
            return Err(Error::MisalignedMesh(format!(
                "elems_per_layer_x must be >= 2, got {}",
                self.elems_per_layer_x
            )));
        }
        if self.elems_y < 4 {
            return Err(Error::MisalignedMesh(format!("elems_y must be >= 4, got {}", self.elems_y)));
        }
        if !(1.0..=4.0).contains(&self.refine_near_crack) {
            return Err(Error::MisalignedMesh(format!(
                "refine_near_crack must lie in [1, 4], got {}",
                self.refine_near_crack
            )));
        }
        Ok(())
    }
}

pub type Profile = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

/// Displacement imposed on the Dirichlet boundary `{x = 0, y ≠ 0} ∪ {x = L}`.
#[derive(Clone)]
pub enum BoundaryDatum {
    /// `−1` on `{x = 0, y < 0}`, `+1` on `{x = 0, y > 0}`, `0` on `{x = L}`.
    Step,
    Custom { label: String, profile: Profile },
}

impl fmt::Debug for BoundaryDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl BoundaryDatum {
    pub fn custom(label: impl Into<String>, profile: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom { label: label.into(), profile: Arc::new(profile) }
    }

    pub fn constant(value: f64) -> Self {
        Self::custom(format!("constant({value})"), move |_| value)
    }

    /// `factor` times the step datum. Needs the domain length to locate `x = L`.
    pub fn scaled_step(factor: f64, length: f64) -> Self {
        Self::custom(format!("{factor}*step"), move |[x, y]| {
            if x >= length * (1.0 - GEOM_REL_TOL) {
                0.0
            } else {
                factor * y.signum()
            }
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Step => "step(-1 | +1 | 0)".to_string(),
            Self::Custom { label, .. } => format!("custom:{label}"),
        }
    }

    /// Datum value at a node of `∂_D Ω` for the domain `(0, L) × (−H, H)`.
    pub fn value_at(&self, node: [f64; 2], length: f64, half_height: f64) -> Result<f64> {
        let [x, y] = node;
        let tx = GEOM_REL_TOL * length;
        let ty = GEOM_REL_TOL * half_height;
        let inside_y = y >= -half_height - ty && y <= half_height + ty;
        let on_left = x.abs() <= tx && y.abs() > ty && inside_y;
        let on_right = (x - length).abs() <= tx && inside_y;
        if !(on_left || on_right) {
            return Err(Error::NotOnDirichletBoundary { x, y });
        }
        Ok(match self {
            Self::Step => {
                if on_right {
                    0.0
                } else if y > 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Custom { profile, .. } => profile(node),
        })
    }
}

/// Tensor grid of the rectangle with the crack line `y = 0` as row `crack_row`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    crack_row: usize,
}

impl Grid {
    /// Grid from explicit lines. `xs` must start at 0 and `ys` must be
    /// symmetric in extent and contain 0.
    pub fn from_lines(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0] && w[0].is_finite() && w[1].is_finite());
        if xs.len() < 2 || !increasing(&xs) || xs[0] != 0.0 {
            return Err(Error::MisalignedMesh("x-lines must increase strictly from 0".into()));
        }
        if ys.len() < 3 || !increasing(&ys) {
            return Err(Error::MisalignedMesh("y-lines must increase strictly".into()));
        }
        let h = ys[ys.len() - 1];
        if (ys[0] + h).abs() > GEOM_REL_TOL * h {
            return Err(Error::MisalignedMesh("y-lines must span (-H, H)".into()));
        }
        let crack_row = ys
            .iter()
            .position(|&y| y == 0.0)
            .ok_or_else(|| Error::MisalignedMesh("y = 0 is not a mesh line".into()))?;
        Ok(Self { xs, ys, crack_row })
    }

    /// Layer-aligned grid for a laminate.
    pub fn for_laminate(spec: &LaminateSpec, params: &MeshParams) -> Result<Self> {
        spec.validate()?;
        params.validate()?;
        let (xs, ys) = match spec.orientation {
            Orientation::Vertical => {
                let mut xs = vec![0.0];
                for layer in spec.sub_layers() {
                    let m = params.elems_per_layer_x;
                    for k in 1..=m {
                        xs.push(layer.start + layer.width() * k as f64 / m as f64);
                    }
                }
                *xs.last_mut().unwrap() = spec.length;
                (xs, graded_ordinates(spec.half_height, params.elems_y, params.refine_near_crack))
            }
            Orientation::Horizontal => {
                let cols = ((spec.length * params.elems_y as f64 / spec.half_height).round() as usize).max(2);
                let xs = (0..=cols).map(|i| spec.length * i as f64 / cols as f64).collect();
                let mut ys = vec![-spec.half_height];
                for layer in spec.sub_layers() {
                    let k = ((layer.width() * params.elems_y as f64 / spec.half_height).round() as usize).max(1);
                    for m in 1..=k {
                        ys.push(layer.start + layer.width() * m as f64 / k as f64);
                    }
                }
                let tol = GEOM_REL_TOL * spec.half_height;
                for y in ys.iter_mut() {
                    if y.abs() <= tol {
                        *y = 0.0;
                    }
                }
                *ys.last_mut().unwrap() = spec.half_height;
                (xs, ys)
            }
        };
        let grid = Self::from_lines(xs, ys)?;
        grid.check_alignment(spec)?;
        Ok(grid)
    }

    fn check_alignment(&self, spec: &LaminateSpec) -> Result<()> {
        let on_line = |lines: &[f64], v: f64, scale: f64| lines.iter().any(|&w| (w - v).abs() <= GEOM_REL_TOL * scale);
        for x in spec.interfaces() {
            if !on_line(&self.xs, x, spec.length) {
                return Err(Error::MisalignedMesh(format!("interface x = {x} is not a mesh line")));
            }
        }
        for y in spec.horizontal_interfaces() {
            if !on_line(&self.ys, y, spec.half_height) {
                return Err(Error::MisalignedMesh(format!("interface y = {y} is not a mesh line")));
            }
        }
        Ok(())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn length(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn half_height(&self) -> f64 {
        self.ys[self.ys.len() - 1]
    }

    pub fn n_cols(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn n_rows(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn n_elems(&self) -> usize {
        self.n_cols() * self.n_rows()
    }

    pub fn crack_row(&self) -> usize {
        self.crack_row
    }

    /// Tip lattice: the x-lines in `(0, L]`.
    pub fn admissible_tips(&self) -> Vec<f64> {
        self.xs[1..].to_vec()
    }

    /// Index into `xs` of a lattice abscissa.
    pub fn tip_index(&self, l: f64) -> Result<usize> {
        let tol = GEOM_REL_TOL * self.length();
        let i = self.xs.partition_point(|&x| x < l - tol);
        if i == 0 || i >= self.xs.len() || (self.xs[i] - l).abs() > tol {
            return Err(Error::InadmissibleTip(l));
        }
        Ok(i)
    }

    /// Column and row of element `e`.
    pub fn elem_cell(&self, e: usize) -> (usize, usize) {
        (e % self.n_cols(), e / self.n_cols())
    }

    pub fn elem_centroid(&self, e: usize) -> [f64; 2] {
        let (i, j) = self.elem_cell(e);
        [0.5 * (self.xs[i] + self.xs[i + 1]), 0.5 * (self.ys[j] + self.ys[j + 1])]
    }

    /// Per-element stiffness of a laminate, evaluated at element centroids.
    pub fn laminate_stiffness(&self, spec: &LaminateSpec) -> Result<Vec<Stiffness>> {
        (0..self.n_elems())
            .map(|e| {
                let [x, y] = self.elem_centroid(e);
                spec.stiffness_at(x, y)
            })
            .collect()
    }

    pub fn laminate_phases(&self, spec: &LaminateSpec) -> Result<Vec<Phase>> {
        (0..self.n_elems())
            .map(|e| {
                let [x, y] = self.elem_centroid(e);
                spec.phase_at(x, y)
            })
            .collect()
    }

    pub fn uniform_stiffness(&self, s: Stiffness) -> Vec<Stiffness> {
        vec![s; self.n_elems()]
    }

    /// Mesh of `Ω \ K_l` for a tip on the lattice.
    pub fn crack_at(self: &Arc<Self>, l: f64) -> Result<CrackedMesh> {
        let tip_index = self.tip_index(l)?;
        let (nx, ny) = (self.n_cols(), self.n_rows());
        let row = nx + 1;
        let base = row * (ny + 1);
        let mut nodes = Vec::with_capacity(base + tip_index);
        for &y in &self.ys {
            for &x in &self.xs {
                nodes.push([x, y]);
            }
        }
        let c = self.crack_row;
        let crack_upper: Vec<usize> = (0..tip_index).map(|i| c * row + i).collect();
        let crack_lower: Vec<usize> = (0..tip_index).map(|i| base + i).collect();
        for i in 0..tip_index {
            nodes.push([self.xs[i], 0.0]);
        }
        let mut elems = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let mut q = [j * row + i, j * row + i + 1, (j + 1) * row + i + 1, (j + 1) * row + i];
                if j + 1 == c {
                    if i < tip_index {
                        q[3] = base + i;
                    }
                    if i + 1 < tip_index {
                        q[2] = base + i + 1;
                    }
                }
                elems.push(q);
            }
        }
        let mut dirichlet_nodes: Vec<usize> = (0..=ny).filter(|&j| j != c).map(|j| j * row).collect();
        dirichlet_nodes.extend((0..=ny).map(|j| j * row + nx));
        dirichlet_nodes.sort_unstable();
        Ok(CrackedMesh {
            grid: Arc::clone(self),
            nodes,
            elems,
            tip_l: self.xs[tip_index],
            tip_index,
            crack_upper,
            crack_lower,
            dirichlet_nodes,
        })
    }
}

/// Ordinates `±H (j/N)^p`, `j = 0..N`, sorted from `−H` to `H`.
fn graded_ordinates(half_height: f64, n: usize, p: f64) -> Vec<f64> {
    let half: Vec<f64> = (0..=n).map(|j| half_height * (j as f64 / n as f64).powf(p)).collect();
    let mut ys: Vec<f64> = half.iter().rev().map(|y| -y).collect();
    ys.pop();
    ys.extend(half);
    ys[n] = 0.0;
    ys
}

pub fn build_mesh(spec: &LaminateSpec, params: &MeshParams, l: f64) -> Result<CrackedMesh> {
    Arc::new(Grid::for_laminate(spec, params)?).crack_at(l)
}

pub fn admissible_tips(spec: &LaminateSpec, params: &MeshParams) -> Result<Vec<f64>> {
    Ok(Grid::for_laminate(spec, params)?.admissible_tips())
}

#[derive(Debug, Clone)]
pub struct CrackedMesh {
    grid: Arc<Grid>,
    pub nodes: Vec<[f64; 2]>,
    pub elems: Vec<[usize; 4]>,
    pub tip_l: f64,
    pub tip_index: usize,
    /// Upper-face node of each crack node `x_i`, `i < tip_index`.
    pub crack_upper: Vec<usize>,
    /// Lower-face duplicate of each crack node.
    pub crack_lower: Vec<usize>,
    pub dirichlet_nodes: Vec<usize>,
}

impl CrackedMesh {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn admissible_tips(&self) -> Vec<f64> {
        self.grid.admissible_tips()
    }

    /// Datum values at the Dirichlet nodes, in `dirichlet_nodes` order.
    pub fn dirichlet_values(&self, datum: &BoundaryDatum) -> Result<Vec<f64>> {
        let (l, h) = (self.grid.length(), self.grid.half_height());
        self.dirichlet_nodes.iter().map(|&n| datum.value_at(self.nodes[n], l, h)).collect()
    }

    /// Quantity identifying the mesh a field was computed on.
    pub fn fingerprint(&self) -> (usize, usize, usize) {
        (self.nodes.len(), self.elems.len(), self.tip_index)
    }

    /// Smallest Jacobian determinant of the bilinear maps over the 2×2
    /// Gauss points.
    pub fn min_jacobian(&self) -> f64 {
        let g = 1.0 / 3f64.sqrt();
        let mut min = f64::INFINITY;
        for q in &self.elems {
            let p: Vec<[f64; 2]> = q.iter().map(|&n| self.nodes[n]).collect();
            for (xi, eta) in [(-g, -g), (g, -g), (g, g), (-g, g)] {
                let dxi = [-(1.0 - eta), 1.0 - eta, 1.0 + eta, -(1.0 + eta)];
                let deta = [-(1.0 - xi), -(1.0 + xi), 1.0 + xi, 1.0 - xi];
                let mut j = [[0.0; 2]; 2];
                for k in 0..4 {
                    j[0][0] += 0.25 * dxi[k] * p[k][0];
                    j[0][1] += 0.25 * dxi[k] * p[k][1];
                    j[1][0] += 0.25 * deta[k] * p[k][0];
                    j[1][1] += 0.25 * deta[k] * p[k][1];
                }
                min = min.min(j[0][0] * j[1][1] - j[0][1] * j[1][0]);
            }
        }
        min
    }

    /// Plain-text dump: a header line, then `id x y` node lines, then
    /// `id n1 n2 n3 n4 phase` element lines.
    pub fn write_dump<W: Write>(&self, w: &mut W, phases: &[Phase]) -> io::Result<()> {
        writeln!(w, "# nodes {} elements {} tip {}", self.nodes.len(), self.elems.len(), self.tip_l)?;
        for (id, [x, y]) in self.nodes.iter().enumerate() {
            writeln!(w, "{id} {x:.16e} {y:.16e}")?;
        }
        for (id, q) in self.elems.iter().enumerate() {
            let phase = match phases.get(id) {
                Some(Phase::A) => "A",
                Some(Phase::B) => "B",
                None => "-",
            };
            writeln!(w, "{id} {} {} {} {} {phase}", q[0], q[1], q[2], q[3])?;
        }
        Ok(())
    }
}
