//! Measurement and communication cost table.

use std::io::{self, Write};

use super::config::{ExperimentConfig, ExperimentKind};
use super::HarnessError;
use crate::theory::{cost_model, Cost, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostRow {
    pub scheme: Scheme,
    pub n: u64,
    pub d: u64,
    pub m: u64,
    pub cost: Cost,
}

/// One row per scheme at the config's `(n, d, m)`.
pub fn run_cost_report(cfg: &ExperimentConfig) -> Result<Vec<CostRow>, HarnessError> {
    cfg.validate_for(ExperimentKind::CostReport)?;
    let (n, d, m) = (cfg.n as u64, cfg.d as u64, cfg.m as u64);
    Scheme::ALL
        .iter()
        .map(|&scheme| {
            Ok(CostRow {
                scheme,
                n,
                d,
                m,
                cost: cost_model(scheme, n, d, m)?,
            })
        })
        .collect()
}

pub fn write_cost_report<W: Write>(mut w: W, rows: &[CostRow]) -> io::Result<()> {
    writeln!(w, "# measurements: scalars acquired; csl and shared take 2m per column (two m-dim sketches)")?;
    writeln!(w, "# communication: scalars sent; naive nd, csl 2nd (two d-vectors per column)")?;
    writeln!(w, "# shared adds nmd for synchronizing the common projection before acquisition")?;
    writeln!(w, "scheme,n,d,m,measurements,communication")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.scheme, r.n, r.d, r.m, r.cost.measurements, r.cost.communication
        )?;
    }
    Ok(())
}
