use std::fmt::Write as _;

use super::{GraphStats, ResultRow};
use crate::error::{Result, TapError};
use crate::mechanisms::ReferenceKind;

pub const CSV_HEADER: &str =
    "gamma,sc_sd,sc_rsd_mean,sc_rsd_stderr,sc_ref,ref_kind,ratio_sd,ratio_rsd,nodes,edges,outdeg_avg,cap_avg";

/// Rows as CSV with every real printed to six decimals.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6},{:.6},{:.6},{},{:.6},{:.6},{},{},{:.6},{:.6}",
            r.gamma,
            r.sc_sd,
            r.sc_rsd_mean,
            r.sc_rsd_stderr,
            r.sc_ref,
            r.ref_kind.label(),
            r.ratio_sd,
            r.ratio_rsd,
            r.stats.nodes,
            r.stats.edges,
            r.stats.outdeg_avg,
            r.stats.cap_avg
        );
    }
    out
}

pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<std::path::Path>) -> Result<()> {
    std::fs::write(path, csv_string(rows))?;
    Ok(())
}

/// Reads rows written by [`csv_string`]. Trial counts are not part of the
/// format and come back as zero feasible out of zero.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(TapError::Parse { line: 1, message: "unexpected CSV header".into() }),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let err = |m: String| TapError::Parse { line: i + 1, message: m };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 12 {
                return Err(err(format!("expected 12 fields, found {}", f.len())));
            }
            let real = |k: usize| f[k].parse::<f64>().map_err(|_| err(format!("bad number `{}`", f[k])));
            let int = |k: usize| f[k].parse::<usize>().map_err(|_| err(format!("bad count `{}`", f[k])));
            Ok(ResultRow {
                gamma: real(0)?,
                sc_sd: real(1)?,
                sc_rsd_mean: real(2)?,
                sc_rsd_stderr: real(3)?,
                sc_ref: real(4)?,
                ref_kind: ReferenceKind::parse(f[5])
                    .ok_or_else(|| err(format!("bad reference kind `{}`", f[5])))?,
                ratio_sd: real(6)?,
                ratio_rsd: real(7)?,
                stats: GraphStats {
                    nodes: int(8)?,
                    edges: int(9)?,
                    outdeg_avg: real(10)?,
                    cap_avg: real(11)?,
                },
                feasible_trials: 0,
                trials: 0,
            })
        })
        .collect()
}
