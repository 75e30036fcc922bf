//! CSV writers. Every real number is printed with 17 significant digits so
//! that files round-trip exactly and identical runs give identical bytes.

use std::io::{self, Write};

use crate::evolution::{EvolutionTrace, JumpCost};
use crate::mesh::CrackedMesh;
use crate::release::ReleaseCurve;
use crate::solver::DisplacementField;

pub const RELEASE_HEADER: &str = "l,energy,release,flag";
pub const TRACE_HEADER: &str = "t,f,tip,elastic,dissipated,work,jump_loss";
pub const JUMP_HEADER: &str = "t,l_minus,l_plus,delta_cost,energy_drop";
pub const SUMMARY_HEADER: &str = "n,probe_l,ratio,gc_eff,d_n,identity_residual";
pub const FIELD_HEADER: &str = "node,x,y,u";

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), num)
}

pub fn write_release<W: Write>(w: &mut W, curve: &ReleaseCurve) -> io::Result<()> {
    writeln!(w, "{RELEASE_HEADER}")?;
    for i in 0..curve.tips.len() {
        writeln!(w, "{},{},{},{}", num(curve.tips[i]), num(curve.energy[i]), num(curve.release[i]), curve.flags[i].as_str())?;
    }
    Ok(())
}

pub fn write_trace<W: Write>(w: &mut W, trace: &EvolutionTrace) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for k in 0..trace.times.len() {
        let r = &trace.ledger[k];
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            num(trace.times[k]),
            num(trace.f_values[k]),
            num(trace.tip[k]),
            num(r.elastic),
            num(r.dissipated),
            num(r.work),
            num(r.jump_loss)
        )?;
    }
    Ok(())
}

pub fn write_jumps<W: Write>(w: &mut W, costs: &[JumpCost]) -> io::Result<()> {
    writeln!(w, "{JUMP_HEADER}")?;
    for c in costs {
        writeln!(w, "{},{},{},{},{}", num(c.t), num(c.l_minus), num(c.l_plus), num(c.delta_cost), num(c.energy_drop))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub probe_l: f64,
    pub ratio: f64,
    pub gc_eff: Option<f64>,
    pub d_n: Option<f64>,
    pub identity_residual: Option<f64>,
}

pub fn write_summary<W: Write>(w: &mut W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{}", r.n, num(r.probe_l), num(r.ratio), opt(r.gc_eff), opt(r.d_n), opt(r.identity_residual))?;
    }
    Ok(())
}

/// Nodal displacements; duplicated crack nodes appear with their own ids.
pub fn write_field<W: Write>(w: &mut W, mesh: &CrackedMesh, field: &DisplacementField) -> io::Result<()> {
    writeln!(w, "{FIELD_HEADER}")?;
    for (i, (p, u)) in mesh.nodes.iter().zip(&field.values).enumerate() {
        writeln!(w, "{i},{},{},{}", num(p[0]), num(p[1]), num(*u))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(2.5), "2.5000000000000000e0");
        assert_eq!(opt(None), "undefined");
    }

    #[test]
    fn summary_layout() {
        let mut buf = Vec::new();
        let row = SummaryRow { n: 4, probe_l: 0.5, ratio: 0.25, gc_eff: Some(2.0), d_n: None, identity_residual: None };
        write_summary(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines[1].split(',').count(), 6);
        assert!(lines[1].starts_with("4,5.0000000000000000e-1,"));
    }
}
