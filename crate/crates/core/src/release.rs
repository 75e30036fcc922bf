//! Energy release rate `𝒢(l) = −ℰ′(l)`.
//!
//! The domain integral moves the crack tip with a virtual extension `φ(x₁)`
//! (`φ(l) = 1`) and evaluates `𝒢 = ½ ∫ (μ₁ u_x² − μ₂ u_y²) φ′`. On a layer
//! aligned mesh with `φ` piecewise linear on the lattice this is exactly the
//! derivative of the discrete energy under the corresponding mesh motion.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::materials::{LaminateSpec, Orientation, Stiffness, GEOM_REL_TOL};
use crate::mesh::{BoundaryDatum, CrackedMesh, Grid, MeshParams};
use crate::solver::{energy_at, nodal, DisplacementField, ElementKernel, SolverOptions};

/// Lattice samples used for the right lower limit at an interface.
pub const RIGHT_LIMINF_SAMPLES: usize = 3;

/// Piecewise-linear virtual extension, zero outside its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualExtension {
    knots: Vec<(f64, f64)>,
}

impl VirtualExtension {
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 || !knots.windows(2).all(|w| w[1].0 > w[0].0) {
            return Err(Error::InvalidVirtualExtension("knots must have increasing abscissae".into()));
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 0.0 {
            return Err(Error::InvalidVirtualExtension("profile must vanish at its end knots".into()));
        }
        Ok(Self { knots })
    }

    /// Hat `0 → 1 → 0` on `[a, b]` peaking at `l`.
    pub fn hat(a: f64, l: f64, b: f64) -> Result<Self> {
        Self::from_knots(vec![(a, 0.0), (l, 1.0), (b, 0.0)])
    }

    /// Trapezoid rising on `[a, p]`, equal to 1 on `[p, q]`, falling on `[q, b]`.
    pub fn trapezoid(a: f64, p: f64, q: f64, b: f64) -> Result<Self> {
        if p == q {
            return Self::hat(a, p, b);
        }
        Self::from_knots(vec![(a, 0.0), (p, 1.0), (q, 1.0), (b, 0.0)])
    }

    pub fn value(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0].0 || x >= k[k.len() - 1].0 {
            return 0.0;
        }
        let i = k.partition_point(|&(kx, _)| kx <= x);
        let ((x0, v0), (x1, v1)) = (k[i - 1], k[i]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    /// Mean slope over `[a, b]`.
    pub fn slope(&self, a: f64, b: f64) -> f64 {
        (self.value(b) - self.value(a)) / (b - a)
    }
}

/// Domain-integral energy release for the tip of `mesh`.
pub fn release_domain_integral(
    mesh: &CrackedMesh,
    field: &DisplacementField,
    stiffness: &[Stiffness],
    phi: &VirtualExtension,
) -> Result<f64> {
    field.check_mesh(mesh)?;
    if stiffness.len() != mesh.elems.len() {
        return Err(Error::InvalidStiffness(format!("{} tensors for {} elements", stiffness.len(), mesh.elems.len())));
    }
    let grid = mesh.grid();
    let xs = grid.xs();
    let len = grid.length();
    if (phi.value(mesh.tip_l) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidVirtualExtension(format!("phi(l) = {} at l = {}", phi.value(mesh.tip_l), mesh.tip_l)));
    }
    let (a, b) = phi.support();
    if a < -GEOM_REL_TOL * len || b > len * (1.0 + GEOM_REL_TOL) {
        return Err(Error::InvalidVirtualExtension(format!("support [{a}, {b}] leaves [0, {len}]")));
    }
    let nx = grid.n_cols();
    let slopes: Vec<f64> = (0..nx).map(|i| phi.slope(xs[i], xs[i + 1])).collect();
    let active: Vec<bool> = (0..nx).map(|i| phi.value(xs[i]) != 0.0 || phi.value(xs[i + 1]) != 0.0).collect();
    // the stiffness must not vary along x over the support
    for j in 0..grid.n_rows() {
        let mut reference: Option<Stiffness> = None;
        for i in (0..nx).filter(|&i| active[i]) {
            let s = stiffness[j * nx + i];
            match reference {
                None => reference = Some(s),
                Some(r) if r != s => {
                    return Err(Error::InvalidVirtualExtension(format!(
                        "support [{a}, {b}] crosses a stiffness discontinuity"
                    )))
                }
                _ => {}
            }
        }
    }
    let mut g = 0.0;
    for e in 0..mesh.elems.len() {
        let (i, _) = grid.elem_cell(e);
        if slopes[i] == 0.0 {
            continue;
        }
        let (sx, sy) = ElementKernel::for_element(mesh, e).gradient_squares(&nodal(mesh, field, e));
        g += 0.5 * slopes[i] * (stiffness[e].mu1 * sx - stiffness[e].mu2 * sy);
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReleaseFlag {
    Regular,
    /// Right lower limit taken over the next lattice samples.
    InterfaceExtended,
    /// `l = L`, where the release is 0 by convention.
    Terminal,
}

impl ReleaseFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Regular => "regular",
            Self::InterfaceExtended => "interface-extended",
            Self::Terminal => "terminal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReleaseSource {
    DomainIntegral,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReleaseCurve {
    pub tips: Vec<f64>,
    pub energy: Vec<f64>,
    pub release: Vec<f64>,
    pub flags: Vec<ReleaseFlag>,
    pub source: ReleaseSource,
    pub length: f64,
    pub description: String,
}

impl ReleaseCurve {
    pub fn index_of(&self, l: f64) -> Result<usize> {
        let tol = GEOM_REL_TOL * self.length;
        let i = self.tips.partition_point(|&x| x < l - tol);
        if i < self.tips.len() && (self.tips[i] - l).abs() <= tol {
            Ok(i)
        } else {
            Err(Error::InadmissibleTip(l))
        }
    }

    pub fn release_at(&self, l: f64) -> Result<f64> {
        Ok(self.release[self.index_of(l)?])
    }

    pub fn energy_at(&self, l: f64) -> Result<f64> {
        Ok(self.energy[self.index_of(l)?])
    }

    /// Linear interpolation of a sampled series between lattice points.
    fn interp(&self, values: &[f64], l: f64) -> Result<f64> {
        let (first, last) = (self.tips[0], self.tips[self.tips.len() - 1]);
        if l < first - GEOM_REL_TOL * self.length || l > last + GEOM_REL_TOL * self.length {
            return Err(Error::TipOutOfRange(l));
        }
        let i = self.tips.partition_point(|&x| x < l).clamp(1, self.tips.len() - 1);
        let (x0, x1) = (self.tips[i - 1], self.tips[i]);
        let w = ((l - x0) / (x1 - x0)).clamp(0.0, 1.0);
        Ok(values[i - 1] * (1.0 - w) + values[i] * w)
    }

    pub fn release_interp(&self, l: f64) -> Result<f64> {
        self.interp(&self.release, l)
    }

    pub fn energy_interp(&self, l: f64) -> Result<f64> {
        self.interp(&self.energy, l)
    }

    /// Release under the datum scaled by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        let f2 = f * f;
        Self {
            energy: self.energy.iter().map(|e| f2 * e).collect(),
            release: self.release.iter().map(|g| f2 * g).collect(),
            ..self.clone()
        }
    }

    /// Largest `|ℰ(l₁) − ℰ(l₂) − ∫ 𝒢|` (trapezoid) over consecutive regular
    /// samples, together with the largest `|ℰ(l₁) − ℰ(l₂)|` for scale.
    pub fn integral_consistency(&self) -> (f64, f64) {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.tips.len().saturating_sub(1) {
            if self.flags[i] != ReleaseFlag::Regular || self.flags[i + 1] != ReleaseFlag::Regular {
                continue;
            }
            let drop = self.energy[i] - self.energy[i + 1];
            let trap = 0.5 * (self.release[i] + self.release[i + 1]) * (self.tips[i + 1] - self.tips[i]);
            worst = worst.max((drop - trap).abs());
            scale = scale.max(drop.abs());
        }
        (worst, scale)
    }

    /// `max |𝒢(l₁) − 𝒢(l₂)| / |l₁ − l₂|^{1/2}` over samples in `[lo, hi]`.
    pub fn holder_modulus(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo > 0.0 && hi < self.length && lo < hi) {
            return Err(Error::InvalidWindow(format!("[{lo}, {hi}] must lie inside (0, {})", self.length)));
        }
        let idx: Vec<usize> = (0..self.tips.len()).filter(|&i| self.tips[i] >= lo && self.tips[i] <= hi).collect();
        if idx.len() < 2 {
            return Err(Error::InsufficientSamples(format!("{} sample(s) in [{lo}, {hi}]", idx.len())));
        }
        let mut m: f64 = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            for &j in &idx[k + 1..] {
                let d = (self.release[i] - self.release[j]).abs() / (self.tips[j] - self.tips[i]).sqrt();
                m = m.max(d);
            }
        }
        Ok(m)
    }
}

pub fn holder_check(curve: &ReleaseCurve, window: (f64, f64)) -> Result<f64> {
    curve.holder_modulus(window.0, window.1)
}

/// Everything needed to sample energies and releases over the tip lattice.
#[derive(Debug, Clone)]
pub struct CurveSetup {
    pub grid: Arc<Grid>,
    pub stiffness: Vec<Stiffness>,
    /// `0`, the interior abscissae where the stiffness jumps along x, and `L`.
    pub breaks: Vec<f64>,
    pub datum: BoundaryDatum,
    pub opts: SolverOptions,
    pub description: String,
}

/// Per-tip output of [`CurveSetup::sample`].
#[derive(Debug, Clone)]
pub struct TipSample {
    pub mesh: CrackedMesh,
    pub field: DisplacementField,
    pub energy: f64,
    pub release: Option<f64>,
}

impl CurveSetup {
    pub fn for_laminate(spec: &LaminateSpec, params: &MeshParams, datum: &BoundaryDatum, opts: SolverOptions) -> Result<Self> {
        let grid = Arc::new(Grid::for_laminate(spec, params)?);
        let stiffness = grid.laminate_stiffness(spec)?;
        let breaks = if spec.orientation == Orientation::Vertical && !spec.is_elastically_homogeneous() {
            if params.elems_per_layer_x < 4 {
                return Err(Error::MisalignedMesh(format!(
                    "release evaluation needs elems_per_layer_x >= 4, got {}",
                    params.elems_per_layer_x
                )));
            }
            spec.interfaces()
        } else {
            vec![0.0, spec.length]
        };
        Ok(Self {
            grid,
            stiffness,
            breaks,
            datum: datum.clone(),
            opts,
            description: format!(
                "{:?} n={} lambda={} A={:?} B={:?} mesh={:?} datum={}",
                spec.orientation,
                spec.n_layers,
                spec.lambda,
                spec.phase_a,
                spec.phase_b,
                params,
                datum.describe()
            ),
        })
    }

    /// Constant-stiffness body on a given grid.
    pub fn homogeneous(grid: Arc<Grid>, stiffness: Stiffness, datum: &BoundaryDatum, opts: SolverOptions, description: String) -> Self {
        let len = grid.length();
        Self {
            stiffness: grid.uniform_stiffness(stiffness),
            grid,
            breaks: vec![0.0, len],
            datum: datum.clone(),
            opts,
            description,
        }
    }

    fn is_break(&self, l: f64) -> bool {
        let tol = GEOM_REL_TOL * self.grid.length();
        self.breaks.iter().any(|&b| (b - l).abs() <= tol)
    }

    fn node(&self, x: f64) -> usize {
        let xs = self.grid.xs();
        let i = xs.partition_point(|&v| v < x).min(xs.len() - 1);
        if i > 0 && (x - xs[i - 1]).abs() < (xs[i] - x).abs() {
            i - 1
        } else {
            i
        }
    }

    /// The virtual extension used at a regular tip.
    pub fn canonical_extension(&self, l: f64) -> Result<VirtualExtension> {
        let xs = self.grid.xs();
        let nx = xs.len() - 1;
        let il = self.grid.tip_index(l)?;
        if il == nx {
            return Err(Error::InvalidVirtualExtension("no extension at l = L".into()));
        }
        let (is, ie) = if self.breaks.len() > 2 {
            if self.is_break(l) {
                return Err(Error::InvalidVirtualExtension(format!("l = {l} is an interface")));
            }
            let k = self.breaks.partition_point(|&b| b < l);
            (self.node(self.breaks[k - 1]), self.node(self.breaks[k]))
        } else {
            // keep clear of the crack mouth and of x = L when there is room
            let len = self.grid.length();
            let (a, b) = (self.node(len / 8.0), self.node(7.0 * len / 8.0));
            (if il >= a + 2 { a } else { 0 }, if b >= il + 2 { b } else { nx })
        };
        // flat over the inner half of the gap on each side of the tip, so
        // that no slope touches the cells next to the tip
        let ip = il - (il - is) / 2;
        let iq = il + (ie - il) / 2;
        VirtualExtension::trapezoid(xs[is], xs[ip], xs[iq], xs[ie])
    }

    /// Solve at one tip; the release is `None` at breaks and at `L`.
    pub fn sample(&self, l: f64) -> Result<TipSample> {
        let (mesh, field, sample) = energy_at(&self.grid, &self.stiffness, l, &self.datum, &self.opts)?;
        let release = if mesh.tip_index == self.grid.n_cols() || (self.breaks.len() > 2 && self.is_break(l)) {
            None
        } else {
            let phi = self.canonical_extension(l)?;
            Some(release_domain_integral(&mesh, &field, &self.stiffness, &phi)?)
        };
        Ok(TipSample { mesh, field, energy: sample.energy, release })
    }

    /// Energy and domain-integral release at every lattice tip.
    pub fn build(&self) -> Result<ReleaseCurve> {
        self.build_from(0.0)
    }

    /// As [`Self::build`], restricted to tips `>= l_min`.
    pub fn build_from(&self, l_min: f64) -> Result<ReleaseCurve> {
        let tol = GEOM_REL_TOL * self.grid.length();
        let tips: Vec<f64> = self.grid.admissible_tips().into_iter().filter(|&l| l >= l_min - tol).collect();
        let samples: Vec<(f64, Option<f64>)> = tips
            .par_iter()
            .map(|&l| self.sample(l).map(|s| (s.energy, s.release)))
            .collect::<Result<_>>()?;
        let n = tips.len();
        let mut release = vec![0.0; n];
        let mut flags = vec![ReleaseFlag::Regular; n];
        for i in 0..n {
            match samples[i].1 {
                Some(g) => release[i] = g,
                None if i == n - 1 => flags[i] = ReleaseFlag::Terminal,
                None => {
                    flags[i] = ReleaseFlag::InterfaceExtended;
                    release[i] = samples[i + 1..]
                        .iter()
                        .filter_map(|s| s.1)
                        .take(RIGHT_LIMINF_SAMPLES)
                        .fold(f64::INFINITY, f64::min);
                    if !release[i].is_finite() {
                        release[i] = 0.0;
                    }
                }
            }
        }
        Ok(ReleaseCurve {
            tips,
            energy: samples.iter().map(|s| s.0).collect(),
            release,
            flags,
            source: ReleaseSource::DomainIntegral,
            length: self.grid.length(),
            description: self.description.clone(),
        })
    }

    /// Release by forward differences of the sampled energies.
    pub fn build_finite_difference(&self) -> Result<ReleaseCurve> {
        let tips = self.grid.admissible_tips();
        let energy: Vec<f64> = tips
            .par_iter()
            .map(|&l| energy_at(&self.grid, &self.stiffness, l, &self.datum, &self.opts).map(|s| s.2.energy))
            .collect::<Result<_>>()?;
        let n = tips.len();
        let mut release = vec![0.0; n];
        let mut flags = vec![ReleaseFlag::Regular; n];
        for i in 0..n - 1 {
            release[i] = (energy[i] - energy[i + 1]) / (tips[i + 1] - tips[i]);
        }
        flags[n - 1] = ReleaseFlag::Terminal;
        Ok(ReleaseCurve {
            tips,
            energy,
            release,
            flags,
            source: ReleaseSource::FiniteDifference,
            length: self.grid.length(),
            description: self.description.clone(),
        })
    }

    /// Forward difference `(ℰ(l) − ℰ(l+h)) / h` between two lattice tips
    /// that do not enclose a stiffness jump.
    pub fn finite_difference(&self, l: f64, h: f64) -> Result<f64> {
        let lp = l + h;
        self.grid.tip_index(l)?;
        self.grid.tip_index(lp)?;
        let tol = GEOM_REL_TOL * self.grid.length();
        if self.breaks[1..self.breaks.len() - 1].iter().any(|&b| b > l + tol && b < lp - tol) {
            return Err(Error::StraddlesInterface { l, l_plus: lp });
        }
        let e0 = energy_at(&self.grid, &self.stiffness, l, &self.datum, &self.opts)?.2.energy;
        let e1 = energy_at(&self.grid, &self.stiffness, lp, &self.datum, &self.opts)?.2.energy;
        Ok((e0 - e1) / h)
    }
}

pub fn release_curve(spec: &LaminateSpec, params: &MeshParams, datum: &BoundaryDatum, tol: f64) -> Result<ReleaseCurve> {
    CurveSetup::for_laminate(spec, params, datum, SolverOptions::with_tol(tol))?.build()
}

pub fn release_fd_oracle(
    spec: &LaminateSpec,
    params: &MeshParams,
    l: f64,
    h: f64,
    datum: &BoundaryDatum,
    tol: f64,
) -> Result<f64> {
    let setup = CurveSetup::for_laminate(spec, params, datum, SolverOptions::with_tol(tol))?;
    if spec.orientation == Orientation::Vertical {
        let tol = GEOM_REL_TOL * spec.length;
        if spec.interfaces().iter().any(|&b| b > l + tol && b < l + h - tol) {
            return Err(Error::StraddlesInterface { l, l_plus: l + h });
        }
    }
    setup.finite_difference(l, h)
}
