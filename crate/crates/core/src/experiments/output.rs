use std::io::Write;

use serde::Serialize;

use super::{SweepRecord, Table1Row};
use crate::{Error, Result};

const DIAGNOSTIC_COLUMNS: [&str; 3] = ["bound_lower", "bound_upper", "traced_spread"];

/// 17 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table1_csv<W: Write>(rows: &[Table1Row], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["state", "n", "omega_q", "paper_value", "abs_dev"])?;
    for r in rows {
        out.write_record([
            r.state.clone(),
            r.n.to_string(),
            format_float(r.omega_q),
            format_float(r.paper_value),
            format_float(r.abs_dev),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes records with the fixed per-experiment columns
///
/// - fig2: `experiment,hamiltonian_order,state,seed,step,t,omega_q`
/// - fig1a, fig1b: `experiment,n,sample,omega_q`
///
/// followed by the diagnostic columns when `diagnostics` is set. Records
/// without diagnostics leave those cells empty.
pub fn write_records_csv<W: Write>(records: &[SweepRecord], diagnostics: bool, w: W) -> Result<()> {
    let Some(first) = records.first() else {
        return Err(Error::domain("no records to write"));
    };
    let is_fig2 = first.experiment == "fig2";
    let mut header: Vec<&str> = if is_fig2 {
        vec!["experiment", "hamiltonian_order", "state", "seed", "step", "t", "omega_q"]
    } else {
        vec!["experiment", "n", "sample", "omega_q"]
    };
    if diagnostics {
        header.extend(DIAGNOSTIC_COLUMNS);
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&header)?;
    for r in records {
        let param = |k: &str| {
            r.params
                .get(k)
                .cloned()
                .ok_or_else(|| Error::domain(format!("record {} lacks parameter {k}", r.index)))
        };
        let mut row = if is_fig2 {
            vec![
                r.experiment.clone(),
                param("hamiltonian_order")?,
                param("state")?,
                param("seed")?,
                r.index.to_string(),
                format_float(r.t_or_sample),
                format_float(r.omega_q),
            ]
        } else {
            vec![
                r.experiment.clone(),
                param("n")?,
                (r.t_or_sample as u64).to_string(),
                format_float(r.omega_q),
            ]
        };
        if diagnostics {
            for col in DIAGNOSTIC_COLUMNS {
                row.push(
                    r.diagnostics
                        .as_ref()
                        .and_then(|d| d.get(col))
                        .map(|&v| format_float(v))
                        .unwrap_or_default(),
                );
            }
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}
