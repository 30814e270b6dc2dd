use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use rmt_flow::ensembles::{Chamber, ChamberPoint, EnsembleSpec, EnsembleTag};
use rmt_flow::kernels::{
    banana_density, star_density, transition_density, watermelon_density, BananaFamily, Family, MeanderSpec,
    TransitionQuery,
};
use rmt_flow::specfun::KernelTag;
use serde::{Deserialize, Serialize};

use crate::output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum What {
    Ensemble,
    Transition,
    Watermelon,
    Star,
    Banana,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub what: Option<What>,
    /// ensemble: GUE, GOE, GSE, chGUE, chGOE, chGSE, C, CI, D, Dprime, DIII.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// transition, watermelon: a, c, d or bessel. banana: a or bessel.
    #[arg(long)]
    pub family: Option<String>,
    /// Number of coordinates (for banana, half of them).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Start time of the transition, star and banana densities.
    #[arg(long)]
    pub s: Option<f64>,
    /// Time at which the density is tabulated (the variance for ensembles).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, visible_alias = "bigT")]
    pub big_t: Option<f64>,
    /// Start configuration, comma separated; the origin when absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

fn family(a: &DensityArgs) -> Result<Family> {
    Ok(match a.family.as_deref().unwrap_or("a").to_ascii_lowercase().as_str() {
        "a" => KernelTag::A,
        "c" => KernelTag::C,
        "d" => KernelTag::D,
        "bessel" => KernelTag::Bessel(a.nu.context("bessel needs --nu")?),
        f => bail!("unknown --family {f:?}"),
    })
}

fn start(a: &DensityArgs, chamber: Chamber, len: usize) -> Result<ChamberPoint> {
    match &a.x {
        None => Ok(ChamberPoint::origin(chamber, len)),
        Some(x) if x.len() == len => Ok(ChamberPoint::interior(chamber, x.clone())?),
        Some(x) => bail!("--x has {} coordinates, expected {len}", x.len()),
    }
}

pub fn run(a: DensityArgs) -> Result<()> {
    let what = a.what.context("missing --what (ensemble, transition, watermelon, star or banana)")?;
    let n = a.n.unwrap_or(1);
    let t = a.t.unwrap_or(1.0);
    let big_t = a.big_t.unwrap_or(1.0);
    let s = a.s.unwrap_or(0.0);
    let nu = a.nu.unwrap_or(0.0);

    type Eval = Box<dyn Fn(&ChamberPoint) -> rmt_flow::Result<f64> + Sync>;
    let (chamber, width, eval): (Chamber, usize, Eval) = match what {
        What::Ensemble => {
            let name = a.ensemble.as_deref().context("--what ensemble needs --ensemble")?;
            let tag = EnsembleTag::parse(name).with_context(|| format!("unknown ensemble {name:?}"))?;
            let spec = EnsembleSpec::new(tag, n, t).with_nu(nu);
            spec.validate()?;
            (tag.chamber(), n, Box::new(move |y| spec.density(y)))
        }
        What::Transition => {
            let f = family(&a)?;
            let ch = if f == KernelTag::A { Chamber::A } else { Chamber::C };
            let x = start(&a, ch, n)?;
            (ch, n, Box::new(move |y| transition_density(&TransitionQuery { family: f, s, t, x: x.clone(), y: y.clone() })))
        }
        What::Watermelon => {
            let f = family(&a)?;
            let ch = if f == KernelTag::A { Chamber::A } else { Chamber::C };
            (ch, n, Box::new(move |y| watermelon_density(f, big_t, t, y)))
        }
        What::Star => {
            let ms = MeanderSpec::new(nu, a.kappa.context("--what star needs --kappa")?, big_t)?;
            let x = start(&a, Chamber::C, n)?;
            (Chamber::C, n, Box::new(move |y| star_density(&ms, s, &x, t, y)))
        }
        What::Banana => {
            let (bf, ch) = match a.family.as_deref().unwrap_or("a").to_ascii_lowercase().as_str() {
                "a" => (BananaFamily::A, Chamber::A),
                "bessel" => (BananaFamily::Bessel { nu, kappa: a.kappa.context("bessel banana needs --kappa")? }, Chamber::C),
                f => bail!("unknown banana --family {f:?}"),
            };
            let x = start(&a, ch, 2 * n)?;
            // At t = T the density lives on the pairwise-degenerate slice and
            // is tabulated over the N distinct values.
            let width = if t >= big_t { n } else { 2 * n };
            (ch, width, Box::new(move |y| banana_density(bf, big_t, s, &x, t, y)))
        }
    };

    let lo = a.lo.unwrap_or(if chamber == Chamber::A { -6.0 } else { 0.0 });
    let hi = a.hi.unwrap_or(6.0);
    let points = a.points.unwrap_or(121);
    if !(hi > lo) || points < 2 {
        bail!("need --lo < --hi and at least 2 --points");
    }
    let total = points.checked_pow(width as u32).filter(|p| *p <= 50_000_000).context("grid too large")?;
    let h = (hi - lo) / (points - 1) as f64;
    let rows: Vec<(Vec<f64>, f64)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let mut y = vec![0.0; width];
            for k in (0..width).rev() {
                y[k] = lo + (rem % points) as f64 * h;
                rem /= points;
            }
            if !chamber.contains(&y) {
                return Ok((y, 0.0));
            }
            let d = eval(&ChamberPoint::new(chamber, y.clone())).with_context(|| format!("density at {y:?}"))?;
            Ok((y, d))
        })
        .collect::<Result<_>>()?;
    let mut out = output::open(a.output.as_deref())?;
    output::write_table(&mut out, width, &rows)
}
