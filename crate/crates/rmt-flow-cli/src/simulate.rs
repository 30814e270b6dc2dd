use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use rmt_flow::matproc::{build_sample, eigen_path, MatrixProcessSpec, PathGrid, PathRecord, ProcessKind};
use rmt_flow::sde::{integrate_path, SdeFamily, SdeSpec};
use serde::{Deserialize, Serialize};

use crate::output::{self, Format};

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    /// Matrix process (gue, goe, laguerre, wishart, xi-c, xi-d, xi-cprime,
    /// xi-dprime, xi-1plus, xi-2plus, ia, interp-a, interp-lw, interp-c,
    /// interp-d, banana-a, banana-d) or particle system (dyson, radial,
    /// bessel, meander, laguerre-ev).
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// ν: integer for the chiral matrix kinds, real for bessel, meander
    /// and laguerre-ev.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Time horizon; the grid covers [0, t].
    #[arg(long, visible_alias = "bigT", alias = "big-t")]
    pub t: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

enum Source {
    Matrix(MatrixProcessSpec),
    Particles(SdeSpec),
}

fn sde_family(name: &str, a: &SimulateArgs, big_t: f64) -> Result<Option<SdeFamily>> {
    let beta = a.beta.unwrap_or(2.0);
    let nu = a.nu.unwrap_or(0.0);
    Ok(Some(match name {
        "dyson" => SdeFamily::Dyson { beta },
        "radial" => SdeFamily::Radial { beta, gamma: a.gamma.context("radial needs --gamma")? },
        "bessel" => SdeFamily::Bessel { nu },
        "meander" => SdeFamily::Meander { nu, kappa: a.kappa.context("meander needs --kappa")?, big_t },
        "laguerre-ev" => SdeFamily::LaguerreEv { beta, nu },
        _ => return Ok(None),
    }))
}

pub fn run(a: SimulateArgs) -> Result<()> {
    let kind = a.kind.clone().context("missing --kind (see `simulate --help` for the list)")?;
    let n = a.n.unwrap_or(1);
    let big_t = a.t.unwrap_or(1.0);
    let steps = a.steps.unwrap_or(10);
    let samples = a.samples.unwrap_or(1);
    let seed = a.seed.unwrap_or(0);
    let grid = PathGrid::new(big_t, steps)?;
    let source = if let Some(k) = ProcessKind::parse(&kind) {
        let nu = a.nu.unwrap_or(0.0);
        if nu < 0.0 || nu.fract() != 0.0 {
            bail!("--nu must be a nonnegative integer for matrix kinds, got {nu}");
        }
        let spec = MatrixProcessSpec::new(k, n, seed).with_nu(nu as usize);
        spec.validate()?;
        Source::Matrix(spec)
    } else if let Some(f) = sde_family(&kind.to_ascii_lowercase(), &a, big_t)? {
        let spec = SdeSpec::from_origin(f, n, grid, seed);
        spec.validate()?;
        Source::Particles(spec)
    } else {
        bail!("unknown --kind {kind:?}");
    };

    // Each record depends only on (seed, kind, sample index), so the
    // parallel map gives the same output for any worker count.
    let rows: Vec<(PathRecord, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| -> Result<(PathRecord, f64)> {
            match &source {
                Source::Matrix(spec) => {
                    let path = build_sample(spec, &grid, i)?;
                    let last = path.factors.as_ref().and_then(|f| f.last()).unwrap_or_else(|| path.matrices.last().unwrap());
                    let imag = last.entries().iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
                    Ok((PathRecord::new(seed, i, spec.kind.name(), &eigen_path(&path)?), imag))
                }
                Source::Particles(spec) => Ok((PathRecord::new(seed, i, &kind, &integrate_path(spec, i)?), 0.0)),
            }
        })
        .collect::<Result<_>>()?;

    let mut out = output::open(a.output.as_deref())?;
    let records: Vec<&PathRecord> = rows.iter().map(|r| &r.0).collect();
    output::write_paths(&mut out, a.format.unwrap_or(Format::Json), &records)?;

    let tops: Vec<f64> = records.iter().map(|r| *r.eigenvalues.last().unwrap().last().unwrap()).collect();
    let mean = tops.iter().sum::<f64>() / tops.len().max(1) as f64;
    let var = tops.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (tops.len().max(2) - 1) as f64;
    let mut summary = serde_json::json!({
        "records": records.len(),
        "kind": kind,
        "terminal_largest_mean": mean,
        "terminal_largest_sd": var.sqrt(),
    });
    if matches!(source, Source::Matrix(_)) {
        summary["terminal_imag_max"] = rows.iter().fold(0.0f64, |m, r| m.max(r.1)).into();
    }
    eprintln!("{summary}");
    Ok(())
}
