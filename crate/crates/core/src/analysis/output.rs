//! CSV writers with a fixed column order.
//!
//! Floats use Rust's shortest round-trip formatting, so parsing a cell gives
//! back the exact `f64` that was written. Missing values are empty cells.
//!
//! | file | columns |
//! |------|---------|
//! | ledger | `time,e_classical,e_quantum_free,e_interaction,e_total,energy_std,edot_residual` |
//! | probability | `time,probability` plus `x,p` for runs with a classical oscillator |
//! | scan | `<axis>,probability,detector_gain,error` |

use std::io::Write;

use super::{EnergyLedger, ScanResult};
use crate::dynamics::Trajectory;

pub const LEDGER_COLUMNS: [&str; 7] = [
    "time",
    "e_classical",
    "e_quantum_free",
    "e_interaction",
    "e_total",
    "energy_std",
    "edot_residual",
];

/// Shortest decimal string that parses back to `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_ledger_csv<W: Write>(w: W, ledger: &EnergyLedger) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(LEDGER_COLUMNS)?;
    for i in 0..ledger.len() {
        out.write_record([
            fmt_f64(ledger.times[i]),
            fmt_f64(ledger.e_classical[i]),
            fmt_f64(ledger.e_quantum_free[i]),
            fmt_f64(ledger.e_interaction[i]),
            fmt_f64(ledger.e_total[i]),
            fmt_f64(ledger.energy_std[i]),
            opt(ledger.edot_residual.as_ref().map(|r| r[i])),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_probability_csv<W: Write>(w: W, traj: &Trajectory, probability: &[f64]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match &traj.classical {
        Some(c) => {
            out.write_record(["time", "probability", "x", "p"])?;
            for ((t, p), (x, mom)) in traj.times.iter().zip(probability).zip(c) {
                out.write_record([fmt_f64(*t), fmt_f64(*p), fmt_f64(*x), fmt_f64(*mom)])?;
            }
        }
        None => {
            out.write_record(["time", "probability"])?;
            for (t, p) in traj.times.iter().zip(probability) {
                out.write_record([fmt_f64(*t), fmt_f64(*p)])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(w: W, scan: &ScanResult) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([scan.axis.name(), "probability", "detector_gain", "error"])?;
    for i in 0..scan.len() {
        let error = scan
            .errors
            .iter()
            .find(|e| e.index == i)
            .map(|e| e.message.clone())
            .unwrap_or_default();
        out.write_record([
            fmt_f64(scan.values[i]),
            opt(scan.probabilities[i]),
            opt(scan.detector_gain[i]),
            error,
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 5e-324] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1e-20), "1e-20");
    }

    #[test]
    fn ledger_header_is_fixed() {
        let ledger = EnergyLedger {
            model: "beam_splitter",
            times: vec![0.0, 0.5],
            e_classical: vec![1.0, 0.9],
            e_quantum_free: vec![0.0, 0.1],
            e_interaction: vec![0.0, 0.0],
            e_total: vec![1.0, 1.0],
            energy_std: vec![0.0, 0.0],
            edot_residual: None,
        };
        let mut buf = Vec::new();
        write_ledger_csv(&mut buf, &ledger).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "time,e_classical,e_quantum_free,e_interaction,e_total,energy_std,edot_residual\n\
             0.0,1.0,0.0,0.0,1.0,0.0,\n\
             0.5,0.9,0.1,0.0,1.0,0.0,\n"
        );
    }
}
