use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use kolakoski_core::harness::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

pub fn write_reports<W: Write>(
    out: W,
    format: OutputFormat,
    reports: &[VerificationReport],
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let mut out = out;
            for r in reports {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in reports {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Text => {
            let mut out = out;
            for r in reports {
                writeln!(
                    out,
                    "{} {:<18} m={:<3} n={:<6} j={:<3} expected={:<6} observed={:<6} {:>6} ms  [{}]",
                    if r.pass { "PASS" } else { "FAIL" },
                    serde_json::to_value(r.conjecture_id)?.as_str().unwrap_or("?"),
                    r.m,
                    r.n,
                    r.j,
                    r.expected,
                    r.observed,
                    r.elapsed_ms,
                    serde_json::to_value(r.table_source)?.as_str().unwrap_or("?"),
                )?;
            }
        }
    }
    Ok(())
}

/// `len=N: a,b,c` with at most `cap` terms shown, then an explicit marker.
pub fn format_sequence(seq: &[i64], cap: usize) -> String {
    let shown: Vec<String> = seq.iter().take(cap).map(|x| x.to_string()).collect();
    let mut s = format!("len={}: {}", seq.len(), shown.join(","));
    if seq.len() > cap {
        s.push_str(",…");
    }
    s
}
