use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use rmt_flow::matproc::PathRecord;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// 17 significant digits, enough to read back the same f64.
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    format!("{v:.16e}")
}

pub fn write_paths(out: &mut dyn Write, format: Format, records: &[&PathRecord]) -> Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let width = records.first().map_or(0, |r| r.eigenvalues[0].len());
            let mut header = vec!["seed".to_string(), "sample".into(), "kind".into(), "step".into(), "time".into()];
            header.extend((1..=width).map(|i| format!("x{i}")));
            w.write_record(&header)?;
            for r in records {
                for (k, (t, ev)) in r.times.iter().zip(&r.eigenvalues).enumerate() {
                    let mut row = vec![r.seed.to_string(), r.sample.to_string(), r.kind.clone(), k.to_string(), num(*t)];
                    row.extend(ev.iter().map(|v| num(*v)));
                    w.write_record(&row)?;
                }
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Density table: one row per grid point, coordinates then value.
pub fn write_table(out: &mut dyn Write, width: usize, rows: &[(Vec<f64>, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(&mut *out);
    let mut header: Vec<String> = (1..=width).map(|i| format!("y{i}")).collect();
    header.push("density".into());
    w.write_record(&header)?;
    for (y, d) in rows {
        let mut row: Vec<String> = y.iter().map(|v| num(*v)).collect();
        row.push(num(*d));
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}
