#![allow(dead_code)]

use laminate_core::evolution::{strictly_stable, LoadProgram};
use laminate_core::release::ReleaseCurve;

/// Steps through time and pushes the tip forward one cell at a time while
/// the current cell is not strictly stable.
pub fn cell_by_cell(curve: &ReleaseCurve, toughness: &[f64], load: &LoadProgram, l0: f64) -> Vec<f64> {
    let mut i = curve.index_of(l0).expect("L0 on the lattice");
    let mut out = Vec::with_capacity(load.len());
    for &f in &load.f_values {
        while !strictly_stable(f * f * curve.release[i], toughness[i]) {
            i += 1;
            assert!(i < curve.tips.len(), "ran past the end of the lattice");
        }
        out.push(curve.tips[i]);
    }
    out
}
