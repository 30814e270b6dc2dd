use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rmt_flow::ensembles::EnsembleTag;
use rmt_flow::haar::HcizKind;
use rmt_flow::schur::{selberg_quadrature, selberg_value};
use rmt_flow::verify::{self as v, Check, StarCase};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Hciz,
    Equivalence,
    Imhof,
    Schur,
    Selberg,
    Densities,
    Asymptotics,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// hciz: A, chiral, C, D, banana, DIII or all.
    #[arg(long)]
    pub kind: Option<String>,
    /// equivalence: dyson, radial, lw, c, d, banana or chiral-split.
    #[arg(long)]
    pub which: Option<String>,
    /// densities: an ensemble tag (GUE, GOE, GSE, chGUE, chGOE, C, CI, D,
    /// Dprime) or all.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// imhof: bessel or a.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tuples: Option<usize>,
    /// schur: truncation order of the expansions.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// equivalence lw/c/d: grid quarters of [0, T] to test, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    pub quarters: Option<Vec<usize>>,
    /// asymptotics: time of the origin-limit checks.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

fn int_nu(nu: f64) -> Result<usize> {
    if nu < 0.0 || nu.fract() != 0.0 {
        bail!("--nu must be a nonnegative integer here, got {nu}");
    }
    Ok(nu as usize)
}

pub fn evaluate(a: &VerifyArgs) -> Result<Report> {
    let seed = a.seed.unwrap_or(1);
    let mut details = Value::Null;
    let (name, checks) = match a.scenario {
        Scenario::Hciz => {
            let n = a.n.unwrap_or(2);
            let samples = a.samples.unwrap_or(100_000);
            let tuples = a.tuples.unwrap_or(5);
            let spec = a.kind.as_deref().unwrap_or("all");
            let kinds: Vec<HcizKind> = if spec.eq_ignore_ascii_case("all") {
                HcizKind::ALL.to_vec()
            } else {
                vec![HcizKind::parse(spec).with_context(|| format!("unknown HCIZ kind {spec:?}"))?]
            };
            let mut checks = Vec::new();
            let mut reports = Vec::new();
            for k in kinds {
                for (t, r) in v::hciz_reports(k, n, tuples, samples, seed)?.into_iter().enumerate() {
                    let label = format!("HCIZ {} N={n} nu={} tuple {t}: mc={:.6e} rhs={:.6e}", k.name(), r.nu, r.lhs, r.rhs);
                    checks.push(Check::zscore(label, r.zscore, samples as f64));
                    reports.push(r);
                }
            }
            details = serde_json::to_value(reports)?;
            (format!("hciz {spec} N={n}"), checks)
        }
        Scenario::Equivalence => {
            let which = a.which.as_deref().context("equivalence needs --which")?.to_ascii_lowercase();
            let n = a.n.unwrap_or(1);
            let samples = a.samples.unwrap_or(10_000);
            let steps = a.steps.unwrap_or(400);
            let nu = a.nu.unwrap_or(0.0);
            let checks = match which.as_str() {
                "dyson" => v::dyson_equivalence(n, samples, steps, seed)?,
                "radial" => v::radial_equivalence(int_nu(nu)?, n, samples, steps, seed)?,
                "banana" => v::banana_equivalence(n, samples, seed)?,
                "chiral-split" => v::decomposition_checks(n, int_nu(nu)?, samples, seed)?,
                w => {
                    let case = StarCase::parse(w, int_nu(nu)?).with_context(|| format!("unknown --which {w:?}"))?;
                    v::star_equivalence(case, n, samples, seed, a.quarters.as_deref().unwrap_or(&[2]))?
                }
            };
            (format!("equivalence {which} N={n}"), checks)
        }
        Scenario::Imhof => {
            let n = a.n.unwrap_or(1);
            let samples = a.samples.unwrap_or(10_000);
            let steps = a.steps.unwrap_or(200);
            let check = match a.family.as_deref().unwrap_or("bessel") {
                "a" | "A" => v::imhof_a_check(n, samples, steps, seed)?,
                "bessel" => {
                    let nu = a.nu.unwrap_or(0.5);
                    v::imhof_check(nu, a.kappa.unwrap_or(nu + 0.5), n, samples, steps, seed)?
                }
                f => bail!("unknown --family {f:?}"),
            };
            (format!("imhof N={n}"), vec![check])
        }
        Scenario::Schur => ("schur".to_string(), v::schur_checks(a.cutoff.unwrap_or(12))?),
        Scenario::Selberg => {
            let n = a.n.unwrap_or(2);
            let pairs: Vec<(f64, f64)> = match (a.alpha, a.gamma) {
                (Some(al), Some(g)) => vec![(al, g)],
                (None, None) => v::SELBERG_PAIRS.to_vec(),
                _ => bail!("give both --alpha and --gamma, or neither"),
            };
            let mut rows = Vec::new();
            for &(al, g) in &pairs {
                rows.push(json!({
                    "alpha": al,
                    "gamma": g,
                    "closed_form": selberg_value(n, al, g)?,
                    "quadrature": selberg_quadrature(n, al, g)?,
                }));
            }
            details = Value::Array(rows);
            (format!("selberg N={n}"), v::selberg_checks(n, &pairs)?)
        }
        Scenario::Densities => {
            let n = a.n.unwrap_or(1);
            let samples = a.samples.unwrap_or(10_000);
            let spec = a.ensemble.as_deref().unwrap_or("all");
            let cases: Vec<(EnsembleTag, usize)> = if spec.eq_ignore_ascii_case("all") {
                v::DENSITY_CASES.to_vec()
            } else {
                let tag = EnsembleTag::parse(spec).with_context(|| format!("unknown ensemble {spec:?}"))?;
                vec![(tag, int_nu(a.nu.unwrap_or(0.0))?)]
            };
            let mut checks = Vec::new();
            for (k, (tag, nu)) in cases.iter().enumerate() {
                checks.push(v::largest_eigenvalue_check(*tag, n, *nu, samples, seed.wrapping_add(k as u64))?);
            }
            checks.extend(v::h_transform_identity(20, seed)?);
            checks.extend(v::star_long_horizon(n)?);
            checks.extend(v::star_final_limit(n)?);
            (format!("densities {spec} N={n}"), checks)
        }
        Scenario::Asymptotics => {
            let n = a.n.unwrap_or(2);
            let mut checks = v::exponent_checks(n)?;
            checks.extend(v::origin_limits(n, a.t.unwrap_or(1.0))?);
            (format!("asymptotics N={n}"), checks)
        }
    };
    Ok(Report { scenario: name, pass: v::all_pass(&checks), checks, details })
}
