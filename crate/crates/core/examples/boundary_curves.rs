//! Traces divergence boundaries of period 5 in the trace plane and reports
//! which arcs carry halflines (true boundaries) and which are virtual.

use std::collections::BTreeMap;

use wqa::invariant::{trace_boundary_curve, CurveTrace};
use wqa::{MapParams, ParamId};

fn main() -> wqa::Result<()> {
    let base = MapParams::new(0.9, 0.7, 0.0, 0.0)?;
    for fam in ["B_LRn1:5", "B_L2Rn2:5", "B_RLn1:5", "B_R2Ln2:5"] {
        let spec = CurveTrace::new(
            fam.parse()?,
            base,
            ParamId::TauL,
            ParamId::TauR,
            (-3.0, 3.0),
            (-3.0, 3.0),
            300,
        );
        let curve = trace_boundary_curve(&spec)?;
        let mut counts = BTreeMap::new();
        for p in &curve.points {
            *counts.entry(p.status.as_str()).or_insert(0) += 1;
        }
        println!("{fam:<10} {counts:?}");
    }
    Ok(())
}
