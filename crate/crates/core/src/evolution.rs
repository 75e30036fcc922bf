//! Quasi-static Griffith evolution on the tip lattice.
//!
//! Under a non-decreasing load `f` the tip is given at every time by
//! `ℓ(t) = min{ l ≥ L0 : f(t)² 𝒢(l) < G^c(l) }`, so each time sample is
//! computed independently. The ledger tracks the elastic energy
//! `E = f² ℰ(ℓ)`, the dissipation `D = ∫_{L0}^{ℓ} G^c`, the work of the
//! load `∫ 2 f ḟ ℰ(ℓ)` and the energy lost in jumps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::materials::{LaminateSpec, GEOM_REL_TOL};
use crate::release::ReleaseCurve;

/// Relative width of the band in which `f² 𝒢 = G^c` counts as a tie.
pub const TIE_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadProgram {
    pub times: Vec<f64>,
    pub f_values: Vec<f64>,
    /// `f` is non-decreasing.
    pub monotone: bool,
}

impl LoadProgram {
    pub fn new(times: Vec<f64>, f_values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != f_values.len() {
            return Err(Error::InvalidLoad(format!(
                "need at least two samples and matching lengths, got {} times and {} values",
                times.len(),
                f_values.len()
            )));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) || times.iter().chain(&f_values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidLoad("times must increase strictly and all samples be finite".into()));
        }
        if f_values[0] != 0.0 {
            return Err(Error::InvalidLoad(format!("f(0) must be 0, got {}", f_values[0])));
        }
        let monotone = f_values.windows(2).all(|w| w[1] >= w[0]);
        Ok(Self { times, f_values, monotone })
    }

    fn grid(t_end: f64, steps: usize) -> Result<Vec<f64>> {
        if steps == 0 || !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidLoad(format!("need steps >= 1 and T > 0, got {steps}, {t_end}")));
        }
        Ok((0..=steps).map(|k| t_end * k as f64 / steps as f64).collect())
    }

    /// `f(t) = f_end · t / T` on a uniform grid.
    pub fn linear(t_end: f64, f_end: f64, steps: usize) -> Result<Self> {
        let times = Self::grid(t_end, steps)?;
        let f = times.iter().map(|t| f_end * t / t_end).collect();
        Self::new(times, f)
    }

    /// Rises linearly to `f_peak` at `T/2`, then falls back to 0.
    pub fn triangle(t_end: f64, f_peak: f64, steps: usize) -> Result<Self> {
        let times = Self::grid(t_end, steps)?;
        let f = times.iter().map(|t| f_peak * (1.0 - (2.0 * t / t_end - 1.0).abs())).collect();
        Self::new(times, f)
    }

    pub fn zero(t_end: f64, steps: usize) -> Result<Self> {
        Self::linear(t_end, 0.0, steps)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `ḟ` by centered differences, one-sided at the ends.
    pub fn derivative(&self) -> Vec<f64> {
        let (t, f) = (&self.times, &self.f_values);
        let n = t.len();
        (0..n)
            .map(|k| {
                let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
                (f[b] - f[a]) / (t[b] - t[a])
            })
            .collect()
    }

    /// Running maximum of `|f|`.
    pub fn envelope(&self) -> Self {
        let mut m: f64 = 0.0;
        let f = self
            .f_values
            .iter()
            .map(|v| {
                m = m.max(v.abs());
                m
            })
            .collect();
        Self { times: self.times.clone(), f_values: f, monotone: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub t: f64,
    pub time_index: usize,
    pub l_minus: f64,
    pub l_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerRow {
    pub elastic: f64,
    pub dissipated: f64,
    pub work: f64,
    pub jump_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub f_values: Vec<f64>,
    pub tip: Vec<f64>,
    /// Index of each tip in the release curve.
    pub tip_index: Vec<usize>,
    /// Condensed energy `ℰ(ℓ(t))`.
    pub condensed: Vec<f64>,
    pub jumps: Vec<JumpRecord>,
    pub ledger: Vec<LedgerRow>,
    pub l0: f64,
}

/// Toughness at every tip of a curve.
pub fn toughness_on(spec: &LaminateSpec, tips: &[f64]) -> Result<Vec<f64>> {
    tips.iter().map(|&l| spec.toughness_at(l)).collect()
}

/// `f² 𝒢 < G^c`, with near-equality counted as not strict.
pub fn strictly_stable(f2g: f64, gc: f64) -> bool {
    f2g < gc && (gc - f2g) > TIE_REL_TOL * gc.abs().max(f2g.abs())
}

fn check_inputs(curve: &ReleaseCurve, toughness: &[f64], l0: f64) -> Result<usize> {
    if toughness.len() != curve.tips.len() {
        return Err(Error::InvalidSpec(format!(
            "{} toughness samples for {} tips",
            toughness.len(),
            curve.tips.len()
        )));
    }
    if let Some(g) = toughness.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::InvalidSpec(format!("toughness must be > 0, got {g}")));
    }
    curve.index_of(l0)
}

/// Smallest lattice index `>= k0` that is strictly stable under `f²`.
fn stable_index(curve: &ReleaseCurve, toughness: &[f64], k0: usize, f2: f64) -> Result<usize> {
    (k0..curve.tips.len())
        .find(|&i| strictly_stable(f2 * curve.release[i], toughness[i]))
        .ok_or_else(|| Error::InvariantBreach(format!("no stable tip for f^2 = {f2}")))
}

/// Tip positions `ℓ(t)` by the representation formula.
pub fn evolve(curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram, l0: f64) -> Result<EvolutionTrace> {
    if !load.monotone {
        return Err(Error::NonMonotoneLoad);
    }
    let k0 = check_inputs(curve, toughness, l0)?;
    let tip_index: Vec<usize> = load
        .f_values
        .par_iter()
        .map(|f| stable_index(curve, toughness, k0, f * f))
        .collect::<Result<_>>()?;
    Ok(assemble(curve, toughness, load, &load.f_values, tip_index, k0))
}

/// Builds the trace for given tips: jump records and ledger.
fn assemble(
    curve: &ReleaseCurve,
    toughness: &[f64],
    load: &LoadProgram,
    envelope: &[f64],
    tip_index: Vec<usize>,
    k0: usize,
) -> EvolutionTrace {
    let mut jumps = Vec::new();
    for k in 1..tip_index.len() {
        let (a, b) = (tip_index[k - 1], tip_index[k]);
        let f2_prev = envelope[k - 1] * envelope[k - 1];
        // a one-cell advance is a jump only if the cell was unstable before the load step
        if b >= a + 2 || (b == a + 1 && !strictly_stable(f2_prev * curve.release[a], toughness[a])) {
            jumps.push(JumpRecord { t: load.times[k], time_index: k, l_minus: curve.tips[a], l_plus: curve.tips[b] });
        }
    }
    let condensed: Vec<f64> = tip_index.iter().map(|&i| curve.energy[i]).collect();
    let mut trace = EvolutionTrace {
        times: load.times.clone(),
        f_values: load.f_values.clone(),
        tip: tip_index.iter().map(|&i| curve.tips[i]).collect(),
        tip_index,
        condensed,
        jumps,
        ledger: Vec::new(),
        l0: curve.tips[k0],
    };
    trace.ledger = ledger(&trace, curve, toughness, load, k0);
    trace
}

/// Cumulative dissipation `∫_{tips[k0]}^{tips[i]} G^c` with `G^c` constant on each cell.
fn cumulative_dissipation(curve: &ReleaseCurve, toughness: &[f64], k0: usize) -> Vec<f64> {
    let mut d = vec![0.0; curve.tips.len()];
    for i in k0 + 1..curve.tips.len() {
        d[i] = d[i - 1] + toughness[i - 1] * (curve.tips[i] - curve.tips[i - 1]);
    }
    d
}

fn ledger(trace: &EvolutionTrace, curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram, k0: usize) -> Vec<LedgerRow> {
    let d = cumulative_dissipation(curve, toughness, k0);
    let f = &load.f_values;
    let fdot = load.derivative();
    let n = trace.times.len();
    let mut rows = Vec::with_capacity(n);
    let mut work = 0.0;
    let mut jump_loss = 0.0;
    let mut jumps = trace.jumps.iter().peekable();
    for k in 0..n {
        let (i, e) = (trace.tip_index[k], trace.condensed[k]);
        if k > 0 {
            let dt = trace.times[k] - trace.times[k - 1];
            let power = |m: usize| 2.0 * f[m] * fdot[m] * trace.condensed[m];
            work += 0.5 * dt * (power(k - 1) + power(k));
        }
        while let Some(j) = jumps.next_if(|j| j.time_index == k) {
            let (a, b) = (trace.tip_index[j.time_index - 1], i);
            jump_loss += f[k] * f[k] * (curve.energy[b] - curve.energy[a]) + d[b] - d[a];
        }
        rows.push(LedgerRow { elastic: f[k] * f[k] * e, dissipated: d[i], work, jump_loss });
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GriffithCondition {
    /// `f² 𝒢(ℓ) ≤ G^c(ℓ)`.
    Stability,
    /// Strict stability under the next load keeps the tip in place.
    Stationarity,
    /// `f² 𝒢 ≥ G^c` on every cell crossed in an advance.
    JumpCondition,
    /// Trace is non-decreasing and starts at `L0`.
    Monotonicity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GriffithViolation {
    pub condition: GriffithCondition,
    pub time_index: usize,
    pub l: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GriffithReport {
    pub violations: Vec<GriffithViolation>,
}

impl GriffithReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks Griffith's criterion on the lattice with relative tolerance `tol`.
/// The comparison load is `f`, or its running maximum for non-monotone
/// programs.
pub fn griffith_check(trace: &EvolutionTrace, curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram, tol: f64) -> GriffithReport {
    let env = load.envelope().f_values;
    let mut v = Vec::new();
    let mut push = |condition, time_index, l, detail: String| v.push(GriffithViolation { condition, time_index, l, detail });
    let idx = |l: f64| curve.index_of(l).ok();
    if trace.tip.first().map_or(true, |&l| (l - trace.l0).abs() > GEOM_REL_TOL * curve.length) {
        push(GriffithCondition::Monotonicity, 0, trace.l0, "trace does not start at L0".into());
    }
    for k in 0..trace.tip.len() {
        let Some(i) = idx(trace.tip[k]) else {
            push(GriffithCondition::Monotonicity, k, trace.tip[k], "tip is off the lattice".into());
            continue;
        };
        let f2 = env[k] * env[k];
        let lhs = f2 * curve.release[i];
        if lhs > toughness[i] * (1.0 + tol) {
            push(GriffithCondition::Stability, k, trace.tip[k], format!("f^2 G = {lhs} > Gc = {}", toughness[i]));
        }
        if k + 1 < trace.tip.len() {
            let next = trace.tip[k + 1];
            if next < trace.tip[k] {
                push(GriffithCondition::Monotonicity, k + 1, next, format!("tip decreased from {}", trace.tip[k]));
            }
            let f2n = env[k + 1] * env[k + 1];
            if f2n * curve.release[i] < toughness[i] * (1.0 - tol) && next != trace.tip[k] {
                push(GriffithCondition::Stationarity, k + 1, trace.tip[k], format!("strictly stable tip advanced to {next}"));
            }
            if let Some(j) = idx(next) {
                for m in i..j {
                    if f2n * curve.release[m] < toughness[m] * (1.0 - tol) {
                        push(
                            GriffithCondition::JumpCondition,
                            k + 1,
                            curve.tips[m],
                            format!("stable point crossed: f^2 G = {} < Gc = {}", f2n * curve.release[m], toughness[m]),
                        );
                    }
                }
            }
        }
    }
    GriffithReport { violations: v }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// `E − (work − D + jump_loss)` at each time sample.
    pub residuals: Vec<f64>,
    /// `max |residual| / max(1, peak E)`.
    pub max_relative: f64,
}

pub fn energy_identity(trace: &EvolutionTrace) -> IdentityReport {
    let residuals: Vec<f64> = trace
        .ledger
        .iter()
        .map(|r| r.elastic - (r.work - r.dissipated + r.jump_loss))
        .collect();
    let peak = trace.ledger.iter().map(|r| r.elastic).fold(0.0, f64::max);
    let worst = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    IdentityReport { residuals, max_relative: worst / peak.max(1.0) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCost {
    pub t: f64,
    pub l_minus: f64,
    pub l_plus: f64,
    /// `Σ [G^c + (f² 𝒢 − G^c)₊] Δl` over the crossed cells.
    pub delta_cost: f64,
    /// `−⟦E⟧ = f² (ℰ(ℓ⁻) − ℰ(ℓ⁺))`.
    pub energy_drop: f64,
    /// `⟦D⟧`.
    pub dissipation: f64,
}

impl JumpCost {
    pub fn relative_mismatch(&self) -> f64 {
        (self.delta_cost - self.energy_drop).abs() / self.energy_drop.abs()
    }
}

/// Finsler cost of every recorded jump. The integrand is averaged over
/// the end points of each cell.
pub fn jump_cost(trace: &EvolutionTrace, curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram) -> Result<Vec<JumpCost>> {
    let env = load.envelope().f_values;
    trace
        .jumps
        .iter()
        .map(|j| {
            let f2 = env[j.time_index] * env[j.time_index];
            let (a, b) = (curve.index_of(j.l_minus)?, curve.index_of(j.l_plus)?);
            let density = |m: usize| toughness[m] + (f2 * curve.release[m] - toughness[m]).max(0.0);
            let mut delta = 0.0;
            let mut diss = 0.0;
            for m in a..b {
                let h = curve.tips[m + 1] - curve.tips[m];
                let right = if m + 1 < b { density(m + 1) } else { toughness[m] };
                delta += 0.5 * (density(m) + right) * h;
                diss += toughness[m] * h;
            }
            Ok(JumpCost {
                t: j.t,
                l_minus: j.l_minus,
                l_plus: j.l_plus,
                delta_cost: delta,
                energy_drop: f2 * (curve.energy[a] - curve.energy[b]),
                dissipation: diss,
            })
        })
        .collect()
}

/// Evolution under a load of either sign: the monotone evolution driven by
/// `f̄(t) = max_{τ ≤ t} |f(τ)|`, with the ledger re-evaluated for `f`.
pub fn nonmonotone_wrap<B>(load: &LoadProgram, builder: B) -> Result<EvolutionTrace>
where
    B: FnOnce(&LoadProgram) -> Result<EvolutionTrace>,
{
    if load.f_values[0] != 0.0 {
        return Err(Error::InvalidLoad(format!("f(0) must be 0, got {}", load.f_values[0])));
    }
    let env = load.envelope();
    let mut trace = builder(&env)?;
    if trace.times != load.times {
        return Err(Error::InvalidLoad("builder returned a trace on a different time grid".into()));
    }
    trace.f_values = load.f_values.clone();
    Ok(trace)
}

/// Re-evaluates jump losses and work for the actual load after
/// [`nonmonotone_wrap`].
pub fn rebuild_ledger(trace: &mut EvolutionTrace, curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram) -> Result<()> {
    let k0 = curve.index_of(trace.l0)?;
    trace.ledger = ledger(trace, curve, toughness, load, k0);
    Ok(())
}

/// Full evolution for an arbitrary load, monotone or not.
pub fn evolve_any(curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram, l0: f64) -> Result<EvolutionTrace> {
    if load.monotone {
        return evolve(curve, toughness, load, l0);
    }
    let mut trace = nonmonotone_wrap(load, |env| evolve(curve, toughness, env, l0))?;
    rebuild_ledger(&mut trace, curve, toughness, load)?;
    Ok(trace)
}

/// Tip index of the homogeneous-lattice evolution reached by a single load value.
pub fn tip_for_load(curve: &ReleaseCurve, toughness: &[f64], l0: f64, f: f64) -> Result<f64> {
    let k0 = check_inputs(curve, toughness, l0)?;
    Ok(curve.tips[stable_index(curve, toughness, k0, f * f)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::release::{ReleaseFlag, ReleaseSource};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Synthetic curve with `ℰ` consistent with `𝒢` (trapezoid).
    fn curve_from_release(tips: Vec<f64>, release: Vec<f64>) -> ReleaseCurve {
        let mut energy = vec![10.0; tips.len()];
        for i in 1..tips.len() {
            energy[i] = energy[i - 1] - 0.5 * (release[i - 1] + release[i]) * (tips[i] - tips[i - 1]);
        }
        let n = tips.len();
        let mut flags = vec![ReleaseFlag::Regular; n];
        flags[n - 1] = ReleaseFlag::Terminal;
        ReleaseCurve {
            tips,
            energy,
            release,
            flags,
            source: ReleaseSource::DomainIntegral,
            length: 1.0,
            description: "synthetic".into(),
        }
    }

    fn decreasing_curve(n: usize) -> ReleaseCurve {
        let tips: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let mut release: Vec<f64> = tips.iter().map(|l| 1.0 / (0.2 + l)).collect();
        release[n - 1] = 0.0;
        curve_from_release(tips, release)
    }

    #[test]
    fn load_program_validation() {
        assert!(LoadProgram::new(vec![0.0, 1.0], vec![0.1, 0.2]).is_err());
        assert!(LoadProgram::new(vec![0.0, 0.0], vec![0.0, 0.2]).is_err());
        assert!(LoadProgram::new(vec![0.0], vec![0.0]).is_err());
        let tri = LoadProgram::triangle(1.0, 2.0, 10).unwrap();
        assert!(!tri.monotone);
        assert_relative_eq!(tri.f_values[5], 2.0);
        assert_eq!(tri.f_values[10], 0.0);
        let env = tri.envelope();
        assert!(env.f_values[6..].iter().all(|&v| v == 2.0));
        let lin = LoadProgram::linear(2.0, 3.0, 4).unwrap();
        assert!(lin.monotone);
        assert!(lin.derivative().iter().all(|&d| (d - 1.5).abs() < 1e-14));
    }

    #[test]
    fn zero_load_keeps_tip() {
        let c = decreasing_curve(20);
        let gc = vec![1.0; 20];
        let t = evolve(&c, &gc, &LoadProgram::zero(1.0, 50).unwrap(), 0.25).unwrap();
        assert!(t.tip.iter().all(|&l| l == 0.25));
        assert!(t.jumps.is_empty());
        assert!(t.ledger.iter().all(|r| *r == LedgerRow::default()));
        assert_eq!(energy_identity(&t).max_relative, 0.0);
        assert!(griffith_check(&t, &c, &gc, &LoadProgram::zero(1.0, 50).unwrap(), 1e-8).passed());
    }

    #[test]
    fn onset_threshold() {
        let c = decreasing_curve(20);
        let gc = vec![1.0; 20];
        let load = LoadProgram::linear(1.0, 2.0, 200).unwrap();
        let t = evolve(&c, &gc, &load, 0.25).unwrap();
        let g0 = c.release_at(0.25).unwrap();
        for k in 0..load.len() {
            let f = load.f_values[k];
            if f * f * g0 < 1.0 {
                assert_eq!(t.tip[k], 0.25);
            } else {
                assert!(t.tip[k] > 0.25);
            }
        }
    }

    #[test]
    fn non_monotone_rejected_by_evolve() {
        let c = decreasing_curve(10);
        let r = evolve(&c, &[1.0; 10], &LoadProgram::triangle(1.0, 1.0, 10).unwrap(), 0.3);
        assert!(matches!(r, Err(Error::NonMonotoneLoad)));
    }

    #[test]
    fn tie_is_not_strict() {
        assert!(!strictly_stable(1.0, 1.0));
        assert!(!strictly_stable(1.0 - 1e-16, 1.0));
        assert!(strictly_stable(1.0 - 1e-10, 1.0));
        // a tip sitting exactly at equality moves on
        let tips = vec![0.25, 0.5, 0.75, 1.0];
        let c = curve_from_release(tips, vec![1.0, 0.5, 0.25, 0.0]);
        let load = LoadProgram::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let t = evolve(&c, &[1.0; 4], &load, 0.25).unwrap();
        assert_eq!(t.tip[1], 0.5);
    }

    #[test]
    fn unstable_span_is_a_jump_with_consistent_cost() {
        // 𝒢 rises on [0.3, 0.5): the tip must cross it in one step
        let n = 40;
        let tips: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let mut release: Vec<f64> = tips.iter().map(|&l| if (0.3..0.5).contains(&l) { 2.0 } else { 1.0 / (0.5 + l) }).collect();
        release[n - 1] = 0.0;
        let c = curve_from_release(tips, release);
        let gc = vec![1.0; n];
        let load = LoadProgram::linear(1.0, 1.3, 400).unwrap();
        let t = evolve(&c, &gc, &load, 0.1).unwrap();
        assert!(griffith_check(&t, &c, &gc, &load, 1e-8).passed());
        assert!(t.jumps.iter().any(|j| j.l_minus <= 0.3 && j.l_plus >= 0.5));
        for cost in jump_cost(&t, &c, &gc, &load).unwrap() {
            assert!(cost.delta_cost >= cost.dissipation);
        }
        let jl: Vec<f64> = t.ledger.iter().map(|r| r.jump_loss).collect();
        assert!(jl.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn skipped_stable_point_fails_condition_iii() {
        let c = decreasing_curve(20);
        let gc = vec![1.0; 20];
        let load = LoadProgram::linear(1.0, 1.0, 10).unwrap();
        let mut t = evolve(&c, &gc, &load, 0.25).unwrap();
        let k = t.tip.len() - 1;
        t.tip[k] = 0.95;
        t.tip_index[k] = c.index_of(0.95).unwrap();
        let report = griffith_check(&t, &c, &gc, &load, 1e-8);
        assert!(report.violations.iter().any(|v| v.condition == GriffithCondition::JumpCondition));
    }

    #[test]
    fn jump_with_equality_costs_dissipation() {
        let tips = vec![0.25, 0.5, 0.75, 1.0];
        let c = curve_from_release(tips, vec![1.0, 1.0, 1.0, 0.0]);
        let gc = vec![1.0; 4];
        let load = LoadProgram::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0]).unwrap();
        let t = evolve(&c, &gc, &load, 0.25).unwrap();
        assert_eq!(t.tip[1], 1.0);
        let costs = jump_cost(&t, &c, &gc, &load).unwrap();
        assert_eq!(costs.len(), 1);
        assert_relative_eq!(costs[0].delta_cost, costs[0].dissipation, max_relative = 1e-14);
    }

    #[test]
    fn triangle_load_freezes_tip() {
        let c = decreasing_curve(40);
        let gc = vec![1.0; 40];
        let load = LoadProgram::triangle(1.0, 1.2, 100).unwrap();
        let t = evolve_any(&c, &gc, &load, 0.25).unwrap();
        let peak = 50;
        assert!(t.tip[peak] > 0.25);
        assert!(t.tip[peak..].iter().all(|&l| l == t.tip[peak]));
        assert!(griffith_check(&t, &c, &gc, &load, 1e-8).passed());
        assert_eq!(t.f_values, load.f_values);
        // monotone part agrees with the plain evolution
        let up = LoadProgram::new(load.times[..=peak].to_vec(), load.f_values[..=peak].to_vec()).unwrap();
        let direct = evolve(&c, &gc, &up, 0.25).unwrap();
        assert_eq!(&t.tip[..=peak], &direct.tip[..]);
    }

    #[test]
    fn wrap_of_monotone_is_identity() {
        let c = decreasing_curve(30);
        let gc = vec![1.0; 30];
        let load = LoadProgram::linear(1.0, 1.1, 50).unwrap();
        let a = evolve(&c, &gc, &load, 0.3).unwrap();
        let b = nonmonotone_wrap(&load, |env| evolve(&c, &gc, env, 0.3)).unwrap();
        assert_eq!(a, b);
        let bad = LoadProgram { f_values: vec![0.5; 51], ..load.clone() };
        assert!(nonmonotone_wrap(&bad, |env| evolve(&c, &gc, env, 0.3)).is_err());
    }

    #[test]
    fn continuous_growth_identity_small() {
        let c = decreasing_curve(400);
        let gc = vec![1.0; 400];
        let load = LoadProgram::linear(1.0, 1.2, 400).unwrap();
        let t = evolve(&c, &gc, &load, 0.2).unwrap();
        assert!(energy_identity(&t).max_relative < 1e-2);
    }

    fn arb_case() -> impl Strategy<Value = (ReleaseCurve, Vec<f64>, f64)> {
        (8usize..40, prop::collection::vec(0.05f64..3.0, 40), prop::collection::vec(0.5f64..2.0, 40), 0.5f64..3.0).prop_map(
            |(n, g, gc, f)| {
                let tips: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
                let mut release = g[..n].to_vec();
                release[n - 1] = 0.0;
                (curve_from_release(tips, release), gc[..n].to_vec(), f)
            },
        )
    }

    proptest! {
        #[test]
        fn evolution_properties((c, gc, f) in arb_case()) {
            let load = LoadProgram::linear(1.0, f, 60).unwrap();
            let t = evolve(&c, &gc, &load, c.tips[0]).unwrap();
            let report = griffith_check(&t, &c, &gc, &load, 1e-8);
            prop_assert!(report.passed(), "{:?}", report.violations);
            prop_assert!(t.tip.windows(2).all(|w| w[1] >= w[0]));
            for j in &t.jumps {
                prop_assert!(j.l_minus < j.l_plus);
            }
            // a larger load never gives a shorter crack
            let stronger = LoadProgram::linear(1.0, 1.3 * f, 60).unwrap();
            let s = evolve(&c, &gc, &stronger, c.tips[0]).unwrap();
            prop_assert!(s.tip.iter().zip(&t.tip).all(|(a, b)| a >= b));
        }
    }
}
