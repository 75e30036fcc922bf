//! Periodic two-phase laminates: pointwise stiffness and toughness fields and
//! the closed-form homogenized quantities.
//!
//! Geometry: `Ω = (0, L) × (−H, H)`, crack along `y = 0` starting at `x = 0`.
//! In the vertical arrangement each period `(kL/n, (k+1)L/n)` holds an
//! A-layer of width `λL/n` followed by a B-layer. In the horizontal
//! arrangement the periods have thickness `H/n`, are stacked upward from
//! `y = −H`, and each holds an A-layer of thickness `λH/n` below a B-layer;
//! `y = 0` is then always a period boundary.

use crate::error::{Error, Result};

/// Relative tolerance for snapping coordinates onto interfaces.
pub(crate) const GEOM_REL_TOL: f64 = 1e-10;

/// Relative tolerance of the product constraint `μ_B1 μ_B2 = μ_A1 μ_A2`.
pub const CLOSED_FORM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialPhase {
    pub mu1: f64,
    pub mu2: f64,
    pub gc: f64,
}

impl MaterialPhase {
    pub fn new(mu1: f64, mu2: f64, gc: f64) -> Result<Self> {
        let phase = Self { mu1, mu2, gc };
        phase.validate()?;
        Ok(phase)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu1", self.mu1), ("mu2", self.mu2), ("gc", self.gc)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn stiffness(&self) -> Stiffness {
        Stiffness { mu1: self.mu1, mu2: self.mu2 }
    }
}

/// Diagonal anti-plane stiffness `diag(μ1, μ2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stiffness {
    pub mu1: f64,
    pub mu2: f64,
}

impl Stiffness {
    pub fn min_modulus(&self) -> f64 {
        self.mu1.min(self.mu2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminateSpec {
    pub length: f64,
    pub half_height: f64,
    pub n_layers: usize,
    pub lambda: f64,
    pub phase_a: MaterialPhase,
    pub phase_b: MaterialPhase,
    pub orientation: Orientation,
}

/// A material sub-layer `[start, end]` along the layering direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubLayer {
    pub start: f64,
    pub end: f64,
    pub phase: Phase,
}

impl SubLayer {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

impl LaminateSpec {
    pub fn new(
        length: f64,
        half_height: f64,
        n_layers: usize,
        lambda: f64,
        phase_a: MaterialPhase,
        phase_b: MaterialPhase,
        orientation: Orientation,
    ) -> Result<Self> {
        let spec = Self { length, half_height, n_layers, lambda, phase_a, phase_b, orientation };
        spec.validate()?;
        Ok(spec)
    }

    /// A single-material body with the geometry and layer count of `self`.
    pub fn with_uniform_phase(&self, phase: MaterialPhase) -> Self {
        Self { phase_a: phase, phase_b: phase, ..*self }
    }

    pub fn with_layers(&self, n_layers: usize) -> Self {
        Self { n_layers, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidSpec(format!("length must be > 0, got {}", self.length)));
        }
        if !(self.half_height.is_finite() && self.half_height > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "half_height must be > 0, got {}",
                self.half_height
            )));
        }
        if self.n_layers == 0 {
            return Err(Error::InvalidSpec("n_layers must be >= 1".into()));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidSpec(format!("lambda must lie in (0,1), got {}", self.lambda)));
        }
        if self.orientation == Orientation::Horizontal && self.n_layers % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "horizontal layers require an even layer count, got n = {}",
                self.n_layers
            )));
        }
        self.phase_a.validate()?;
        self.phase_b.validate()?;
        Ok(())
    }

    pub fn phase(&self, phase: Phase) -> &MaterialPhase {
        match phase {
            Phase::A => &self.phase_a,
            Phase::B => &self.phase_b,
        }
    }

    /// True when both phases share the same stiffness, so no elastic
    /// interface exists regardless of toughness contrast.
    pub fn is_elastically_homogeneous(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-14 * a.abs().max(b.abs());
        close(self.phase_a.mu1, self.phase_b.mu1) && close(self.phase_a.mu2, self.phase_b.mu2)
    }

    /// Extent of the layered direction: `L` for vertical layers, `2H` for
    /// horizontal ones.
    fn layered_extent(&self) -> (f64, f64) {
        match self.orientation {
            Orientation::Vertical => (0.0, self.length),
            Orientation::Horizontal => (-self.half_height, self.half_height),
        }
    }

    fn period(&self) -> f64 {
        match self.orientation {
            Orientation::Vertical => self.length / self.n_layers as f64,
            Orientation::Horizontal => self.half_height / self.n_layers as f64,
        }
    }

    fn n_periods(&self) -> usize {
        match self.orientation {
            Orientation::Vertical => self.n_layers,
            Orientation::Horizontal => 2 * self.n_layers,
        }
    }

    /// Material sub-layers in increasing order along the layered direction.
    pub fn sub_layers(&self) -> Vec<SubLayer> {
        let (origin, _) = self.layered_extent();
        let p = self.period();
        let mut out = Vec::with_capacity(2 * self.n_periods());
        for k in 0..self.n_periods() {
            let s = origin + k as f64 * p;
            let m = origin + (k as f64 + self.lambda) * p;
            let e = origin + (k + 1) as f64 * p;
            out.push(SubLayer { start: s, end: m, phase: Phase::A });
            out.push(SubLayer { start: m, end: e, phase: Phase::B });
        }
        out
    }

    /// Interface set `Λ_n` along x (vertical layers), including `0` and `L`.
    /// For horizontal layers the crack never crosses an interface and only
    /// the end points are returned.
    pub fn interfaces(&self) -> Vec<f64> {
        match self.orientation {
            Orientation::Vertical => {
                let mut v: Vec<f64> = self.sub_layers().iter().map(|s| s.start).collect();
                v.push(self.length);
                v
            }
            Orientation::Horizontal => vec![0.0, self.length],
        }
    }

    /// Interface ordinates of horizontal layers, from `−H` to `H`.
    pub fn horizontal_interfaces(&self) -> Vec<f64> {
        match self.orientation {
            Orientation::Horizontal => {
                let mut v: Vec<f64> = self.sub_layers().iter().map(|s| s.start).collect();
                v.push(self.half_height);
                v
            }
            Orientation::Vertical => vec![-self.half_height, self.half_height],
        }
    }

    /// Index of the period and fractional position inside it, snapping
    /// coordinates within tolerance of a period boundary forward.
    fn locate(&self, coord: f64) -> (usize, f64) {
        let (origin, _) = self.layered_extent();
        let t = (coord - origin) / self.period();
        let k = (t + GEOM_REL_TOL).floor().max(0.0);
        let k = (k as usize).min(self.n_periods() - 1);
        (k, t - k as f64)
    }

    fn on_interface(&self, coord: f64) -> bool {
        let (_, frac) = self.locate(coord);
        frac.abs() <= GEOM_REL_TOL
            || (frac - self.lambda).abs() <= GEOM_REL_TOL
            || (frac - 1.0).abs() <= GEOM_REL_TOL
    }

    /// Phase at a point strictly inside Ω and off every interface line.
    pub fn phase_at(&self, x: f64, y: f64) -> Result<Phase> {
        let tol_x = GEOM_REL_TOL * self.length;
        let tol_y = GEOM_REL_TOL * self.half_height;
        if !(x > tol_x && x < self.length - tol_x && y > -self.half_height + tol_y && y < self.half_height - tol_y) {
            return Err(Error::OutOfDomain { x, y });
        }
        let coord = match self.orientation {
            Orientation::Vertical => x,
            Orientation::Horizontal => y,
        };
        if self.on_interface(coord) {
            return Err(Error::InterfacePoint { x, y });
        }
        let (_, frac) = self.locate(coord);
        Ok(if frac < self.lambda { Phase::A } else { Phase::B })
    }

    pub fn stiffness_at(&self, x: f64, y: f64) -> Result<Stiffness> {
        Ok(self.phase(self.phase_at(x, y)?).stiffness())
    }

    /// Right-continuous toughness along the crack path, with the end value
    /// `G^c(L) = G^c_A`. Horizontal laminates have the constant toughness of
    /// the crack-bearing interface, taken as `G^c_A`.
    pub fn toughness_at(&self, l: f64) -> Result<f64> {
        let tol = GEOM_REL_TOL * self.length;
        if !(l >= -tol && l <= self.length + tol) {
            return Err(Error::TipOutOfRange(l));
        }
        if self.orientation == Orientation::Horizontal || l >= self.length - tol {
            return Ok(self.phase_a.gc);
        }
        let (_, frac) = self.locate(l.max(0.0));
        Ok(if frac < self.lambda - GEOM_REL_TOL { self.phase_a.gc } else { self.phase_b.gc })
    }

    /// Whether `x` belongs to the interface set `Λ_n` (vertical layers only).
    pub fn is_interface_abscissa(&self, x: f64) -> bool {
        match self.orientation {
            Orientation::Vertical => self.on_interface(x),
            Orientation::Horizontal => {
                let tol = GEOM_REL_TOL * self.length;
                x.abs() <= tol || (x - self.length).abs() <= tol
            }
        }
    }

    /// Vertical sub-layer whose closure contains `x`, preferring the one on
    /// the right at an interface.
    pub fn sub_layer_at(&self, x: f64) -> SubLayer {
        let (k, frac) = self.locate(x);
        let p = self.period();
        let (origin, _) = self.layered_extent();
        let s = origin + k as f64 * p;
        let m = origin + (k as f64 + self.lambda) * p;
        let e = origin + (k + 1) as f64 * p;
        if frac < self.lambda - GEOM_REL_TOL {
            SubLayer { start: s, end: m, phase: Phase::A }
        } else {
            SubLayer { start: m, end: e, phase: Phase::B }
        }
    }

    pub fn homogenized_model(&self) -> HomogenizedModel {
        let (a, b, lam) = (&self.phase_a, &self.phase_b, self.lambda);
        let harmonic = |x: f64, y: f64| 1.0 / (lam / x + (1.0 - lam) / y);
        let arithmetic = |x: f64, y: f64| lam * x + (1.0 - lam) * y;
        let (mu_hom1, mu_hom2) = match self.orientation {
            Orientation::Vertical => (harmonic(a.mu1, b.mu1), arithmetic(a.mu2, b.mu2)),
            Orientation::Horizontal => (arithmetic(a.mu1, b.mu1), harmonic(a.mu2, b.mu2)),
        };
        HomogenizedModel {
            mu_hom1,
            mu_hom2,
            gc_hom: arithmetic(a.gc, b.gc),
            gc_eff_closed_form: self.effective_toughness_closed_form().ok(),
        }
    }

    pub fn satisfies_product_constraint(&self) -> bool {
        let pa = self.phase_a.mu1 * self.phase_a.mu2;
        let pb = self.phase_b.mu1 * self.phase_b.mu2;
        (pa - pb).abs() <= CLOSED_FORM_REL_TOL * pa.abs().max(pb.abs())
    }

    /// Effective toughness in the regime where it is known in closed form:
    /// vertical layers with `μ_B1 μ_B2 = μ_A1 μ_A2`, or horizontal layers
    /// (where it equals the interface toughness).
    pub fn effective_toughness_closed_form(&self) -> Result<f64> {
        if self.orientation == Orientation::Horizontal {
            return Ok(self.phase_a.gc);
        }
        if !self.satisfies_product_constraint() {
            return Err(Error::ClosedFormNotApplicable(format!(
                "mu_A1*mu_A2 = {} differs from mu_B1*mu_B2 = {}",
                self.phase_a.mu1 * self.phase_a.mu2,
                self.phase_b.mu1 * self.phase_b.mu2
            )));
        }
        let (a, b, lam) = (&self.phase_a, &self.phase_b, self.lambda);
        Ok(lam * a.gc.max(b.gc * b.mu1 / a.mu1) + (1.0 - lam) * (a.gc * a.mu1 / b.mu1).max(b.gc))
    }

    pub fn gc_min(&self) -> f64 {
        self.phase_a.gc.min(self.phase_b.gc)
    }

    pub fn gc_max(&self) -> f64 {
        self.phase_a.gc.max(self.phase_b.gc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogenizedModel {
    pub mu_hom1: f64,
    pub mu_hom2: f64,
    pub gc_hom: f64,
    pub gc_eff_closed_form: Option<f64>,
}

impl HomogenizedModel {
    pub fn stiffness(&self) -> Stiffness {
        Stiffness { mu1: self.mu_hom1, mu2: self.mu_hom2 }
    }

    /// Homogeneous phase with the homogenized moduli and the given toughness.
    pub fn phase(&self, gc: f64) -> MaterialPhase {
        MaterialPhase { mu1: self.mu_hom1, mu2: self.mu_hom2, gc }
    }
}

/// The reference laminate used throughout the tests: `L = 1`, `H = 0.5`,
/// `λ = 0.5`, A = (1, 1, 1), B = (4, 0.25, 1).
pub fn reference_laminate(n_layers: usize, orientation: Orientation) -> LaminateSpec {
    LaminateSpec {
        length: 1.0,
        half_height: 0.5,
        n_layers,
        lambda: 0.5,
        phase_a: MaterialPhase { mu1: 1.0, mu2: 1.0, gc: 1.0 },
        phase_b: MaterialPhase { mu1: 4.0, mu2: 0.25, gc: 1.0 },
        orientation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_toughness() -> LaminateSpec {
        LaminateSpec {
            phase_a: MaterialPhase { mu1: 1.0, mu2: 1.0, gc: 2.0 },
            phase_b: MaterialPhase { mu1: 1.0, mu2: 1.0, gc: 1.0 },
            ..reference_laminate(4, Orientation::Vertical)
        }
    }

    #[test]
    fn stiffness_inside_layers() {
        let spec = reference_laminate(4, Orientation::Vertical);
        let w = spec.length / 4.0;
        assert_eq!(spec.stiffness_at(0.1 * w, 0.0).unwrap(), Stiffness { mu1: 1.0, mu2: 1.0 });
        assert_eq!(spec.stiffness_at(0.75 * w, 0.0).unwrap(), Stiffness { mu1: 4.0, mu2: 0.25 });
        assert_eq!(spec.stiffness_at(w + 0.1 * w, 0.3).unwrap(), Stiffness { mu1: 1.0, mu2: 1.0 });
    }

    #[test]
    fn stiffness_rejects_interfaces_and_outside() {
        let spec = reference_laminate(4, Orientation::Vertical);
        assert!(matches!(spec.stiffness_at(0.125, 0.1), Err(Error::InterfacePoint { .. })));
        assert!(matches!(spec.stiffness_at(0.25, 0.1), Err(Error::InterfacePoint { .. })));
        assert!(matches!(spec.stiffness_at(1.2, 0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(spec.stiffness_at(0.3, 0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn horizontal_phase_by_ordinate() {
        let spec = reference_laminate(2, Orientation::Horizontal);
        // periods of thickness 0.25 from y = -0.5: A on (-0.5,-0.375), B on (-0.375,-0.25), ...
        assert_eq!(spec.phase_at(0.3, -0.45).unwrap(), Phase::A);
        assert_eq!(spec.phase_at(0.3, -0.3).unwrap(), Phase::B);
        assert_eq!(spec.phase_at(0.3, 0.05).unwrap(), Phase::A);
        assert_eq!(spec.phase_at(0.3, -0.05).unwrap(), Phase::B);
        assert!(matches!(spec.phase_at(0.3, 0.0), Err(Error::InterfacePoint { .. })));
        assert!(spec.horizontal_interfaces().iter().any(|&y| y.abs() < 1e-15));
    }

    #[test]
    fn equal_phases_give_identical_tensor() {
        let p = MaterialPhase::new(2.0, 3.0, 1.5).unwrap();
        let spec = reference_laminate(3, Orientation::Vertical).with_uniform_phase(p);
        for x in [0.05, 0.2, 0.51, 0.97] {
            assert_eq!(spec.stiffness_at(x, 0.1).unwrap(), p.stiffness());
        }
    }

    #[test]
    fn toughness_equal_phases() {
        let spec = reference_laminate(4, Orientation::Vertical);
        for l in [0.0, 0.125, 0.3, 0.5, 1.0] {
            assert_eq!(spec.toughness_at(l).unwrap(), 1.0);
        }
    }

    #[test]
    fn toughness_right_limit_at_interface() {
        let spec = two_toughness();
        // oracle: sample just to the right of the interface
        let eps = 1e-7;
        assert_eq!(spec.toughness_at(0.125 + eps).unwrap(), 1.0);
        assert_eq!(spec.toughness_at(0.125).unwrap(), 1.0);
        assert_eq!(spec.toughness_at(0.25 + eps).unwrap(), 2.0);
        assert_eq!(spec.toughness_at(0.25).unwrap(), 2.0);
        assert_eq!(spec.toughness_at(0.0).unwrap(), 2.0);
        assert_eq!(spec.toughness_at(1.0).unwrap(), 2.0);
        assert_eq!(spec.toughness_at(1.0 - eps).unwrap(), 1.0);
        assert!(matches!(spec.toughness_at(1.5), Err(Error::TipOutOfRange(_))));
        assert!(matches!(spec.toughness_at(-0.1), Err(Error::TipOutOfRange(_))));
    }

    #[test]
    fn interfaces_are_increasing_and_bounded() {
        let spec = LaminateSpec { lambda: 0.3, ..reference_laminate(5, Orientation::Vertical) };
        let lam = spec.interfaces();
        assert_eq!(lam.len(), 2 * 5 + 1);
        assert_eq!(lam[0], 0.0);
        assert_relative_eq!(*lam.last().unwrap(), 1.0);
        assert!(lam.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(lam[1], 0.3 / 5.0);
    }

    #[test]
    fn homogenized_reference_values() {
        let v = reference_laminate(4, Orientation::Vertical).homogenized_model();
        assert_relative_eq!(v.mu_hom1, 1.6, max_relative = 1e-12);
        assert_relative_eq!(v.mu_hom2, 0.625, max_relative = 1e-12);
        assert_relative_eq!(v.gc_hom, 1.0, max_relative = 1e-12);
        assert_relative_eq!(v.gc_eff_closed_form.unwrap(), 2.5, max_relative = 1e-12);
        let h = reference_laminate(4, Orientation::Horizontal).homogenized_model();
        assert_relative_eq!(h.mu_hom1, 2.5, max_relative = 1e-12);
        assert_relative_eq!(h.mu_hom2, 0.4, max_relative = 1e-12);
        assert_eq!(h.gc_eff_closed_form, Some(1.0));
    }

    #[test]
    fn homogenized_equal_phases() {
        let p = MaterialPhase::new(1.7, 0.3, 2.2).unwrap();
        let m = reference_laminate(4, Orientation::Vertical).with_uniform_phase(p).homogenized_model();
        assert_relative_eq!(m.mu_hom1, 1.7, max_relative = 1e-14);
        assert_relative_eq!(m.mu_hom2, 0.3, max_relative = 1e-14);
        assert_relative_eq!(m.gc_hom, 2.2, max_relative = 1e-14);
        assert_relative_eq!(m.gc_eff_closed_form.unwrap(), 2.2, max_relative = 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let spec = reference_laminate(4, Orientation::Vertical);
        assert_relative_eq!(spec.effective_toughness_closed_form().unwrap(), 2.5, max_relative = 1e-12);
        let stiff_soft = LaminateSpec {
            phase_a: MaterialPhase { mu1: 2.0, mu2: 0.5, gc: 1.0 },
            phase_b: MaterialPhase { mu1: 1.0, mu2: 1.0, gc: 1.0 },
            ..spec
        };
        let g = stiff_soft.effective_toughness_closed_form().unwrap();
        assert_relative_eq!(g, 1.5, max_relative = 1e-12);
        assert!(g > stiff_soft.gc_max());
    }

    #[test]
    fn closed_form_rejects_violated_constraint() {
        let spec = LaminateSpec {
            phase_b: MaterialPhase { mu1: 4.0, mu2: 0.3, gc: 1.0 },
            ..reference_laminate(4, Orientation::Vertical)
        };
        assert!(matches!(spec.effective_toughness_closed_form(), Err(Error::ClosedFormNotApplicable(_))));
        assert_eq!(spec.homogenized_model().gc_eff_closed_form, None);
        // near-equality within 1e-12 relative is accepted
        let near = LaminateSpec {
            phase_b: MaterialPhase { mu1: 4.0, mu2: 0.25 * (1.0 + 1e-14), gc: 1.0 },
            ..reference_laminate(4, Orientation::Vertical)
        };
        assert!(near.effective_toughness_closed_form().is_ok());
    }

    #[test]
    fn horizontal_closed_form_is_interface_toughness() {
        let spec = LaminateSpec {
            phase_a: MaterialPhase { mu1: 1.0, mu2: 1.0, gc: 1.3 },
            ..reference_laminate(4, Orientation::Horizontal)
        };
        assert_eq!(spec.effective_toughness_closed_form().unwrap(), 1.3);
    }

    #[test]
    fn spec_validation() {
        let base = reference_laminate(4, Orientation::Vertical);
        assert!(LaminateSpec { lambda: 1.2, ..base }.validate().is_err());
        assert!(LaminateSpec { lambda: 0.0, ..base }.validate().is_err());
        assert!(LaminateSpec { n_layers: 0, ..base }.validate().is_err());
        let odd = LaminateSpec { n_layers: 3, orientation: Orientation::Horizontal, ..base };
        let msg = odd.validate().unwrap_err().to_string();
        assert!(msg.contains("even"), "{msg}");
        assert!(MaterialPhase::new(1.0, -1.0, 1.0).is_err());
        assert!(MaterialPhase::new(1.0, 1.0, 0.0).is_err());
    }

    fn arb_phase() -> impl Strategy<Value = MaterialPhase> {
        (0.1f64..10.0, 0.1f64..10.0, 0.1f64..5.0).prop_map(|(mu1, mu2, gc)| MaterialPhase { mu1, mu2, gc })
    }

    fn arb_constrained() -> impl Strategy<Value = LaminateSpec> {
        (arb_phase(), 0.1f64..10.0, 0.1f64..5.0, 0.05f64..0.95, 1usize..8).prop_map(
            |(a, mu_b1, gc_b, lambda, n)| LaminateSpec {
                length: 1.0,
                half_height: 0.5,
                n_layers: n,
                lambda,
                phase_a: a,
                phase_b: MaterialPhase { mu1: mu_b1, mu2: a.mu1 * a.mu2 / mu_b1, gc: gc_b },
                orientation: Orientation::Vertical,
            },
        )
    }

    proptest! {
        #[test]
        fn closed_form_bounds(spec in arb_constrained()) {
            let m = spec.homogenized_model();
            let eff = m.gc_eff_closed_form.unwrap();
            prop_assert!(eff >= m.gc_hom * (1.0 - 1e-12));
            prop_assert!(spec.gc_max() >= m.gc_hom * (1.0 - 1e-12));
            prop_assert!(m.gc_hom >= spec.gc_min() * (1.0 - 1e-12));
        }

        #[test]
        fn closed_form_exceeds_max_when_stiffer_phase_is_tougher(spec in arb_constrained()) {
            let (a, b) = (&spec.phase_a, &spec.phase_b);
            let eff = spec.effective_toughness_closed_form().unwrap();
            let contrast = (a.mu1 - b.mu1).abs() > 1e-6 * a.mu1;
            if contrast && ((b.mu1 < a.mu1 && b.gc <= a.gc) || (a.mu1 < b.mu1 && a.gc <= b.gc)) {
                prop_assert!(eff > spec.gc_max());
            }
            let same = LaminateSpec {
                phase_b: MaterialPhase { mu1: a.mu1, mu2: a.mu2, gc: b.gc },
                ..spec
            };
            let e = same.effective_toughness_closed_form().unwrap();
            prop_assert!((e - spec.gc_max()).abs() <= 1e-12 * spec.gc_max());
        }

        #[test]
        fn phase_exchange_symmetry(spec in arb_constrained()) {
            let swapped = LaminateSpec { phase_a: spec.phase_b, phase_b: spec.phase_a, lambda: 1.0 - spec.lambda, ..spec };
            let (m, s) = (spec.homogenized_model(), swapped.homogenized_model());
            prop_assert!((m.mu_hom1 - s.mu_hom1).abs() <= 1e-12 * m.mu_hom1);
            prop_assert!((m.mu_hom2 - s.mu_hom2).abs() <= 1e-12 * m.mu_hom2);
            prop_assert!((m.gc_hom - s.gc_hom).abs() <= 1e-12 * m.gc_hom);
            let (e, f) = (m.gc_eff_closed_form.unwrap(), s.gc_eff_closed_form.unwrap());
            prop_assert!((e - f).abs() <= 1e-12 * e);
        }

        #[test]
        fn toughness_is_right_continuous(spec in arb_constrained(), u in 0.0f64..0.999) {
            let l = u * spec.length;
            let right = spec.toughness_at(l + 1e-9 * spec.length).unwrap();
            prop_assert_eq!(spec.toughness_at(l).unwrap(), right);
        }

        #[test]
        fn toughness_right_continuous_at_interfaces(spec in arb_constrained()) {
            for &x in spec.interfaces().iter().filter(|&&x| x < spec.length) {
                let right = spec.toughness_at(x + 1e-9 * spec.length).unwrap();
                prop_assert_eq!(spec.toughness_at(x).unwrap(), right);
            }
        }
    }
}
