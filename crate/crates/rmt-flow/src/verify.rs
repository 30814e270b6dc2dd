//! Verification scenarios: simulations and quadratures checked against the
//! closed forms of the other modules. Each scenario returns a list of
//! [`Check`]s that serialise to the JSON reports of the command-line tool.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{exponent_psi, Chamber, ChamberPoint, EnsembleSpec, EnsembleTag};
use crate::error::{Error, Result};
use crate::haar::{hciz_report, random_query, HcizKind, HcizReport};
use crate::kernels::{
    log_star_density, log_transition_density, noncoll_probability, star_density, MeanderSpec, TransitionQuery,
};
use crate::matproc::{build_sample, kramers_pairs, spectra_at, terminal_spectra, MatrixProcessSpec, PathGrid, ProcessKind};
use crate::quad::{integrate_ordered, OrderedGrid};
use crate::rng::{stream, MCEstimate};
use crate::schur::{
    coefficient, expansion_check, leading_coefficient, schur_eval, selberg_quadrature, selberg_value, ExpansionKind, Partition,
};
use crate::sde::{terminal_samples, SdeFamily, SdeSpec};
use crate::specfun::KernelTag;
use crate::stats::{
    chamber_chi2, imhof_reweight, imhof_reweight_a, ks_test, ks_two_sample, ks_weighted, EmpiricalSample, MaxCdf,
};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Passes when the value exceeds the threshold.
    PValue,
    /// Passes when |value| is below the threshold.
    ZScore,
    /// Passes when the value is below the threshold.
    AbsError,
    RelError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub metric: Metric,
    pub value: f64,
    pub threshold: f64,
    /// Sample size, or Kish effective size for weighted samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn pvalue(name: impl Into<String>, p: f64, n: f64) -> Self {
        Self { name: name.into(), metric: Metric::PValue, value: p, threshold: tol::P_MIN, n: Some(n), pass: p > tol::P_MIN }
    }

    pub fn zscore(name: impl Into<String>, z: f64, n: f64) -> Self {
        Self { name: name.into(), metric: Metric::ZScore, value: z, threshold: tol::Z_MAX, n: Some(n), pass: z.abs() < tol::Z_MAX }
    }

    pub fn error(name: impl Into<String>, metric: Metric, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), metric, value, threshold, n: None, pass: value < threshold }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    !checks.is_empty() && checks.iter().all(|c| c.pass)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// |e^{la−lb} − 1| computed from logs.
fn rel_from_logs(la: f64, lb: f64) -> f64 {
    if la == lb {
        0.0
    } else {
        (la - lb).exp_m1().abs()
    }
}

fn nu_label(tag: EnsembleTag, nu: usize) -> String {
    if tag.is_chiral() {
        format!(" nu={nu}")
    } else {
        String::new()
    }
}

/// The matrix process whose value at time t is distributed as the ensemble
/// with variance t, and whether its spectral coordinates are squared radii.
pub fn process_for(tag: EnsembleTag) -> Result<(ProcessKind, bool)> {
    Ok(match tag {
        EnsembleTag::Gue => (ProcessKind::Gue, false),
        EnsembleTag::Goe => (ProcessKind::Goe, false),
        EnsembleTag::Gse => (ProcessKind::Xi2plus, false),
        EnsembleTag::ChGue => (ProcessKind::Laguerre, true),
        EnsembleTag::ChGoe => (ProcessKind::Wishart, true),
        EnsembleTag::C => (ProcessKind::XiC, false),
        EnsembleTag::Ci => (ProcessKind::XiCprime, false),
        EnsembleTag::D => (ProcessKind::XiD, false),
        EnsembleTag::Dprime => (ProcessKind::XiDprime, false),
        EnsembleTag::ChGse | EnsembleTag::Diii => {
            return Err(Error::Spec(format!("no matrix process is provided for {tag:?}")));
        }
    })
}

/// The ensembles of the largest-eigenvalue checks with their ν.
pub const DENSITY_CASES: [(EnsembleTag, usize); 11] = [
    (EnsembleTag::Gue, 0),
    (EnsembleTag::Goe, 0),
    (EnsembleTag::Gse, 0),
    (EnsembleTag::ChGue, 0),
    (EnsembleTag::ChGue, 1),
    (EnsembleTag::ChGoe, 0),
    (EnsembleTag::ChGoe, 1),
    (EnsembleTag::C, 0),
    (EnsembleTag::D, 0),
    (EnsembleTag::Ci, 0),
    (EnsembleTag::Dprime, 0),
];

/// KS test of the largest spectral coordinate of the matrix process at t = 1
/// against the ensemble density.
pub fn largest_eigenvalue_check(tag: EnsembleTag, n: usize, nu: usize, samples: usize, seed: u64) -> Result<Check> {
    let (kind, squared) = process_for(tag)?;
    let nu = if tag.is_chiral() { nu } else { 0 };
    let grid = PathGrid::new(1.0, 1)?;
    let spec = MatrixProcessSpec::new(kind, n, seed).with_nu(nu);
    let pts = terminal_spectra(&spec, &grid, samples)?;
    let top: Vec<f64> = pts
        .iter()
        .map(|p| {
            let m = *p.coords().last().expect("non-empty spectrum");
            if squared {
                m.sqrt()
            } else {
                m
            }
        })
        .collect();
    let table = MaxCdf::for_ensemble(&EnsembleSpec::new(tag, n, 1.0).with_nu(nu as f64))?;
    let r = ks_test(&top, |s| table.cdf(s))?;
    Ok(Check::pvalue(format!("{} N={n}{} largest eigenvalue", tag_name(tag), nu_label(tag, nu)), r.pvalue, r.n))
}

pub fn tag_name(tag: EnsembleTag) -> &'static str {
    match tag {
        EnsembleTag::Gue => "GUE",
        EnsembleTag::Goe => "GOE",
        EnsembleTag::Gse => "GSE",
        EnsembleTag::ChGue => "chGUE",
        EnsembleTag::ChGoe => "chGOE",
        EnsembleTag::ChGse => "chGSE",
        EnsembleTag::C => "C",
        EnsembleTag::Ci => "CI",
        EnsembleTag::D => "D",
        EnsembleTag::Dprime => "Dprime",
        EnsembleTag::Diii => "DIII",
    }
}

fn coordinate(points: &[ChamberPoint], k: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    points.iter().map(|p| f(p.coords()[k])).collect()
}

fn two_sample_checks(label: &str, a: &[ChamberPoint], b: &[ChamberPoint]) -> Result<Vec<Check>> {
    let n = a[0].len();
    (0..n)
        .map(|k| {
            let r = ks_two_sample(&coordinate(a, k, |v| v), &coordinate(b, k, |v| v))?;
            Ok(Check::pvalue(format!("{label} coordinate {}", k + 1), r.pvalue, r.n))
        })
        .collect()
}

/// Terminal marginals of Dyson's β = 2 system against GUE matrix eigenvalues.
pub fn dyson_equivalence(n: usize, samples: usize, steps: usize, seed: u64) -> Result<Vec<Check>> {
    let sde = SdeSpec::from_origin(SdeFamily::Dyson { beta: 2.0 }, n, PathGrid::new(1.0, steps)?, seed);
    let a = terminal_samples(&sde, samples)?;
    let m = MatrixProcessSpec::new(ProcessKind::Gue, n, seed);
    let b = terminal_spectra(&m, &PathGrid::new(1.0, 1)?, samples)?;
    two_sample_checks(&format!("Dyson(2) vs GUE N={n}"), &a, &b)
}

/// Radial(2, (2ν+1)/2) against singular values of the Laguerre process.
pub fn radial_equivalence(nu: usize, n: usize, samples: usize, steps: usize, seed: u64) -> Result<Vec<Check>> {
    let gamma = (2.0 * nu as f64 + 1.0) / 2.0;
    let sde = SdeSpec::from_origin(SdeFamily::Radial { beta: 2.0, gamma }, n, PathGrid::new(1.0, steps)?, seed);
    let a = terminal_samples(&sde, samples)?;
    let m = MatrixProcessSpec::new(ProcessKind::Laguerre, n, seed).with_nu(nu);
    let b: Vec<ChamberPoint> = terminal_spectra(&m, &PathGrid::new(1.0, 1)?, samples)?
        .into_iter()
        .map(|p| ChamberPoint::new(Chamber::C, p.coords().iter().map(|v| v.sqrt()).collect()))
        .collect();
    two_sample_checks(&format!("Radial(2,{gamma}) vs Laguerre nu={nu} N={n}"), &a, &b)
}

fn ordered_point(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut cur = rng.gen_range(0.05..0.8);
    for _ in 0..n {
        v.push(cur);
        cur += rng.gen_range(0.15..0.9);
    }
    v
}

fn log_p(family: KernelTag, t: f64, x: &ChamberPoint, y: &ChamberPoint) -> Result<f64> {
    log_transition_density(&TransitionQuery { family, s: 0.0, t, x: x.clone(), y: y.clone() })
}

/// The Bessel-family densities at ν = ±1/2 against the C and D h-transform
/// formulas on seeded queries, as maximal relative differences.
pub fn h_transform_identity(queries: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = stream(seed, &[0x4854]);
    let (mut dc, mut dd) = (0.0f64, 0.0f64);
    for _ in 0..queries {
        let n = rng.gen_range(1..=3usize);
        let t = rng.gen_range(0.2..2.0);
        let x = ChamberPoint::new(Chamber::C, ordered_point(&mut rng, n));
        let y = ChamberPoint::new(Chamber::C, ordered_point(&mut rng, n));
        dc = dc.max(rel_from_logs(log_p(KernelTag::Bessel(0.5), t, &x, &y)?, log_p(KernelTag::C, t, &x, &y)?));
        dd = dd.max(rel_from_logs(log_p(KernelTag::Bessel(-0.5), t, &x, &y)?, log_p(KernelTag::D, t, &x, &y)?));
    }
    Ok(vec![
        Check::error(format!("p(1/2) vs p^C over {queries} queries"), Metric::RelError, dc, 1e-10),
        Check::error(format!("p(-1/2) vs p^D over {queries} queries"), Metric::RelError, dd, 1e-10),
    ])
}

/// Densities started at |x| = 1e-3√t against their origin limits.
pub fn origin_limits(n: usize, t: f64) -> Result<Vec<Check>> {
    let scale = 1e-3 * t.sqrt();
    let dir: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let positive: Vec<f64> = dir.iter().map(|v| scale * v / norm).collect();
    let centred: Vec<f64> = {
        let mean = dir.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = dir.iter().map(|v| v - mean + if n == 1 { 1.0 } else { 0.0 }).collect();
        let cn = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        c.iter().map(|v| scale * v / cn).collect()
    };
    let ys: Vec<Vec<f64>> = (0..3).map(|k| (0..n).map(|i| t.sqrt() * (0.4 + 0.3 * k as f64 + 0.6 * i as f64)).collect()).collect();
    let families = [
        (KernelTag::A, Chamber::A),
        (KernelTag::Bessel(0.0), Chamber::C),
        (KernelTag::Bessel(1.0), Chamber::C),
        (KernelTag::C, Chamber::C),
        (KernelTag::D, Chamber::C),
    ];
    let mut out = Vec::new();
    for (f, c) in families {
        let xs = if c == Chamber::A { centred.clone() } else { positive.clone() };
        let x = ChamberPoint::new(c, xs);
        let o = ChamberPoint::origin(c, n);
        let mut worst = 0.0f64;
        for y in &ys {
            let yp = ChamberPoint::new(c, y.clone());
            worst = worst.max(rel_from_logs(log_p(f, t, &x, &yp)?, log_p(f, t, &o, &yp)?));
        }
        out.push(Check::error(format!("{f:?} N={n} origin limit at |x|=1e-3 sqrt(t)"), Metric::RelError, worst, 1e-2));
    }
    Ok(out)
}

/// The star-topology pairs used throughout: (ν, κ).
pub const STAR_PAIRS: [(f64, f64); 4] = [(0.5, 1.0), (-0.5, 0.0), (1.0, 2.0), (0.0, 0.5)];

/// g_T → p^{(ν)} as T → ∞, tested at T = 1e4·t.
pub fn star_long_horizon(n: usize) -> Result<Vec<Check>> {
    let (t, big_t) = (1.0, 1e4);
    let x = ChamberPoint::new(Chamber::C, (0..n).map(|i| 0.5 + 0.7 * i as f64).collect());
    let y = ChamberPoint::new(Chamber::C, (0..n).map(|i| 0.8 + 0.6 * i as f64).collect());
    STAR_PAIRS
        .iter()
        .map(|&(nu, kappa)| {
            let ms = MeanderSpec::new(nu, kappa, big_t)?;
            let g = log_star_density(&ms, 0.0, &x, t, &y)?;
            let p = log_p(KernelTag::Bessel(nu), t, &x, &y)?;
            Ok(Check::error(format!("g/p at T=1e4 t, nu={nu} kappa={kappa} N={n}"), Metric::RelError, rel_from_logs(g, p), 1e-2))
        })
        .collect()
}

/// The origin-start star density integrates to one over the chamber.
pub fn star_normalisation(n: usize) -> Result<Vec<Check>> {
    let (t, big_t): (f64, f64) = (0.5, 1.0);
    let o = ChamberPoint::origin(Chamber::C, n);
    STAR_PAIRS
        .iter()
        .map(|&(nu, kappa)| {
            let ms = MeanderSpec::new(nu, kappa, big_t)?;
            let hi = tol::TAIL_RADII * t.sqrt();
            let grid = OrderedGrid::new(0.0, hi).nodes(14, 2).first_power(2.0);
            let total = integrate_ordered(n, &grid, |y| {
                star_density(&ms, 0.0, &o, t, &ChamberPoint::new(Chamber::C, y.to_vec())).unwrap_or(f64::NAN)
            });
            Ok(Check::error(
                format!("integral of g(0,0;t,.) nu={nu} kappa={kappa} N={n}"),
                Metric::AbsError,
                (total - 1.0).abs(),
                1e-3,
            ))
        })
        .collect()
}

/// g_T(0, 0; t, y) at t = T(1 − 1e-6) against the final-time closed form.
pub fn star_final_limit(n: usize) -> Result<Vec<Check>> {
    let big_t = 1.0;
    let t = big_t * (1.0 - 1e-6);
    let o = ChamberPoint::origin(Chamber::C, n);
    let ys: Vec<ChamberPoint> =
        (0..3).map(|k| ChamberPoint::new(Chamber::C, (0..n).map(|i| 0.3 + 0.4 * k as f64 + 0.5 * i as f64).collect())).collect();
    STAR_PAIRS
        .iter()
        .map(|&(nu, kappa)| {
            let ms = MeanderSpec::new(nu, kappa, big_t)?;
            let mut worst = 0.0f64;
            for y in &ys {
                let a = log_star_density(&ms, 0.0, &o, t, y)?;
                let b = log_star_density(&ms, 0.0, &o, big_t, y)?;
                worst = worst.max(rel_from_logs(a, b));
            }
            Ok(Check::error(format!("t -> T limit nu={nu} kappa={kappa} N={n}"), Metric::RelError, worst, 1e-3))
        })
        .collect()
}

/// Interpolating processes whose spectra follow the star density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarCase {
    Lw { nu: usize },
    C,
    D,
}

impl StarCase {
    pub fn parse(s: &str, nu: usize) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lw" => Some(StarCase::Lw { nu }),
            "c" => Some(StarCase::C),
            "d" => Some(StarCase::D),
            _ => None,
        }
    }

    pub fn kind(self) -> ProcessKind {
        match self {
            StarCase::Lw { .. } => ProcessKind::InterpLw,
            StarCase::C => ProcessKind::InterpC,
            StarCase::D => ProcessKind::InterpD,
        }
    }

    /// The (ν, κ) of the matching star density.
    pub fn pair(self) -> (f64, f64) {
        match self {
            StarCase::Lw { nu } => (nu as f64, nu as f64 + 1.0),
            StarCase::C => (0.5, 1.0),
            StarCase::D => (-0.5, 0.0),
        }
    }

    fn nu(self) -> usize {
        match self {
            StarCase::Lw { nu } => nu,
            _ => 0,
        }
    }
}

/// χ² of the spectra at t ∈ {T/4, T/2, 3T/4} (grid indices `fractions` of a
/// 4-step grid) against the star density.
pub fn star_equivalence(case: StarCase, n: usize, samples: usize, seed: u64, quarters: &[usize]) -> Result<Vec<Check>> {
    if n > 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let big_t = 1.0;
    let grid = PathGrid::new(big_t, 4)?;
    let spec = MatrixProcessSpec::new(case.kind(), n, seed).with_nu(case.nu());
    let (nu, kappa) = case.pair();
    let ms = MeanderSpec::new(nu, kappa, big_t)?;
    let o = ChamberPoint::origin(Chamber::C, n);
    let bins = if n == 1 { 30 } else { 12 };
    quarters
        .iter()
        .map(|&k| {
            if !(1..=3).contains(&k) {
                return Err(Error::Spec(format!("quarter index must be 1, 2 or 3, got {k}")));
            }
            let t = grid.time(k);
            let pts = spectra_at(&spec, &grid, samples, k)?;
            let sample = EmpiricalSample::new(pts);
            let r = chamber_chi2(
                &sample,
                |y| star_density(&ms, 0.0, &o, t, &ChamberPoint::new(Chamber::C, y.to_vec())).unwrap_or(0.0),
                bins,
            )?;
            Ok(Check::pvalue(format!("{} N={n} at t={t} vs g(nu={nu},kappa={kappa})", case.kind().name()), r.pvalue, samples as f64))
        })
        .collect()
}

/// Kramers degeneracy of the banana process at T and KS of its largest
/// distinct value against GSE with variance T/2.
pub fn banana_equivalence(n: usize, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let big_t = 1.0;
    let spec = MatrixProcessSpec::new(ProcessKind::BananaA, n, seed);
    let pts = terminal_spectra(&spec, &PathGrid::new(big_t, 1)?, samples)?;
    let mut gap = 0.0f64;
    let mut top = Vec::with_capacity(samples);
    for p in &pts {
        let (odd, g) = kramers_pairs(p.coords());
        gap = gap.max(g);
        top.push(*odd.last().expect("non-empty spectrum"));
    }
    let table = MaxCdf::for_ensemble(&EnsembleSpec::new(EnsembleTag::Gse, n, big_t / 2.0))?;
    let r = ks_test(&top, |s| table.cdf(s))?;
    Ok(vec![
        Check::error(format!("banana N={n} max intra-pair gap at T"), Metric::AbsError, gap, tol::PAIRING),
        Check::pvalue(format!("banana N={n} largest distinct value vs GSE(T/2)"), r.pvalue, r.n),
    ])
}

/// Monte Carlo group integrals against the determinant formulas on `tuples`
/// seeded queries.
pub fn hciz_reports(kind: HcizKind, n: usize, tuples: usize, samples: usize, seed: u64) -> Result<Vec<HcizReport>> {
    (0..tuples as u64)
        .map(|k| {
            let q = random_query(kind, n, (k % 2) as usize, seed.wrapping_add(k));
            hciz_report(&q, samples, seed.wrapping_add(1000 + k))
        })
        .collect()
}

pub fn hciz_checks(kind: HcizKind, n: usize, tuples: usize, samples: usize, seed: u64) -> Result<Vec<Check>> {
    Ok(hciz_reports(kind, n, tuples, samples, seed)?
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            Check::zscore(
                format!("HCIZ {} N={n} nu={} tuple {k}: mc={:.6e} rhs={:.6e}", kind.name(), r.nu, r.lhs, r.rhs),
                r.zscore,
                samples as f64,
            )
        })
        .collect())
}

/// Terminal samples of the noncolliding Bessel process, reweighted by the
/// Radon–Nikodym factor, against the final-time star density.
pub fn imhof_check(nu: f64, kappa: f64, n: usize, samples: usize, steps: usize, seed: u64) -> Result<Check> {
    let big_t = 1.0;
    let sde = SdeSpec::from_origin(SdeFamily::Bessel { nu }, n, PathGrid::new(big_t, steps)?, seed);
    let pts = terminal_samples(&sde, samples)?;
    let weighted = imhof_reweight(&pts, nu, kappa, big_t)?;
    let ms = MeanderSpec::new(nu, kappa, big_t)?;
    let o = ChamberPoint::origin(Chamber::C, n);
    let density = |y: &[f64]| star_density(&ms, 0.0, &o, big_t, &ChamberPoint::new(Chamber::C, y.to_vec())).unwrap_or(0.0);
    let label = format!("Imhof nu={nu} kappa={kappa} N={n}");
    match n {
        1 => {
            let hi = big_t.sqrt() * (tol::TAIL_RADII + nu.abs());
            let table = MaxCdf::new(1, 0.0, hi, 400, density);
            let (xs, w) = weighted.coordinate(0);
            let r = ks_weighted(&xs, w.as_deref(), |s| table.cdf(s))?;
            Ok(Check::pvalue(label, r.pvalue, r.n))
        }
        2 => {
            let r = chamber_chi2(&weighted, density, 12)?;
            Ok(Check::pvalue(label, r.pvalue, weighted.effective_size()))
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// The free-particle analogue: Dyson β = 2 terminal samples reweighted
/// towards GOE(T), tested on the largest coordinate.
pub fn imhof_a_check(n: usize, samples: usize, steps: usize, seed: u64) -> Result<Check> {
    let big_t = 1.0;
    let sde = SdeSpec::from_origin(SdeFamily::Dyson { beta: 2.0 }, n, PathGrid::new(big_t, steps)?, seed);
    let pts = terminal_samples(&sde, samples)?;
    let weighted = imhof_reweight_a(&pts, big_t)?;
    let table = MaxCdf::for_ensemble(&EnsembleSpec::new(EnsembleTag::Goe, n, big_t))?;
    let (xs, w) = weighted.coordinate(n - 1);
    let r = ks_weighted(&xs, w.as_deref(), |s| table.cdf(s))?;
    Ok(Check::pvalue(format!("Imhof A-family N={n} largest coordinate vs GOE(T)"), r.pvalue, r.n))
}

fn expansion_name(kind: ExpansionKind) -> String {
    match kind {
        ExpansionKind::Exp => "exp".into(),
        ExpansionKind::Bessel(nu) => format!("bessel nu={nu}"),
    }
}

/// Name suffix of the small-x ratio checks.
pub const RATIO_LABEL: &str = "exact/leading at |x|=1e-3, |y|=1";

pub const EXPANSIONS: [ExpansionKind; 4] =
    [ExpansionKind::Exp, ExpansionKind::Bessel(0.0), ExpansionKind::Bessel(0.5), ExpansionKind::Bessel(1.0)];

/// Truncation residuals at |μ| ≤ `cutoff` and the small-x ratio to the
/// leading term, for N = 2.
pub fn schur_checks(cutoff: u32) -> Result<Vec<Check>> {
    let x = [0.3, 0.8];
    let y = [0.4, 1.1];
    let small = [1e-3 / 5f64.sqrt(), 2e-3 / 5f64.sqrt()];
    let unit = [0.6, 0.8];
    let mut out = Vec::new();
    for kind in EXPANSIONS {
        let c = expansion_check(kind, &x, &y, cutoff)?;
        out.push(Check::error(format!("{} truncation residual m={cutoff}", expansion_name(kind)), Metric::AbsError, c.residual, 1e-8));
        let e = expansion_check(kind, &small, &unit, 1)?;
        let lead = leading_coefficient(kind, 2);
        let ratio = e.exact / lead;
        out.push(Check::error(
            format!("{} {RATIO_LABEL} (ratio {ratio:.8})", expansion_name(kind)),
            Metric::RelError,
            (ratio - 1.0).abs(),
            1e-4,
        ));
        // The deviation is the first-order term c_(1) s_(1)(x) s_(1)(y) / c_∅.
        let one = Partition::new(vec![1])?;
        let first = coefficient(kind, &one, 2) / lead * schur_eval(&one, &small) * schur_eval(&one, &unit);
        out.push(Check::error(
            format!("{} deviation vs first-order term {first:.6e}", expansion_name(kind)),
            Metric::RelError,
            rel_diff(ratio - 1.0, first),
            1e-2,
        ));
    }
    Ok(out)
}

pub const SELBERG_PAIRS: [(f64, f64); 3] = [(1.0, 0.5), (1.5, 0.5), (2.0, 1.0)];

pub fn selberg_checks(n: usize, pairs: &[(f64, f64)]) -> Result<Vec<Check>> {
    pairs
        .iter()
        .map(|&(alpha, gamma)| {
            let exact = selberg_value(n, alpha, gamma)?;
            let quad = selberg_quadrature(n, alpha, gamma)?;
            Ok(Check::error(
                format!("Selberg N={n} alpha={alpha} gamma={gamma}: closed {exact:.10} quadrature {quad:.10}"),
                Metric::RelError,
                rel_diff(quad, exact),
                1e-4,
            ))
        })
        .collect()
}

/// Least-squares slope of ln N^♯(t, x) on ln t over 9 log-spaced times in
/// [1e2, 1e4], compared with −ψ.
pub fn exponent_checks(n: usize) -> Result<Vec<Check>> {
    let x: Vec<f64> = (0..n).map(|i| 0.4 + 0.6 * i as f64).collect();
    let ts: Vec<f64> = (0..9).map(|k| 10f64.powf(2.0 + 0.25 * k as f64)).collect();
    [(KernelTag::A, Chamber::A, Chamber::A), (KernelTag::C, Chamber::C, Chamber::C), (KernelTag::D, Chamber::C, Chamber::D)]
        .iter()
        .map(|&(f, c, class)| {
            let p = ChamberPoint::new(c, x.clone());
            let mut lx = Vec::new();
            let mut ly = Vec::new();
            for &t in &ts {
                lx.push(t.ln());
                ly.push(noncoll_probability(f, t, &p)?.ln());
            }
            let mx = lx.iter().sum::<f64>() / lx.len() as f64;
            let my = ly.iter().sum::<f64>() / ly.len() as f64;
            let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
            let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
            let psi = -sxy / sxx;
            let want = exponent_psi(class, n).value();
            Ok(Check::error(
                format!("psi[{}] N={n}: fitted {psi:.5}, exact {want}", class.name()),
                Metric::RelError,
                rel_diff(psi, want),
                0.03,
            ))
        })
        .collect()
}

/// Entrywise moments of M1 = M_T(t) − (t/T) Re M_T(T) and M2 = (t/T) Re M_T(T)
/// for the interpolating chiral process at t = T/2: M1 has independent real
/// and imaginary parts of variance t(1 − t/T), M2 is real with variance
/// t²/T, and the two are uncorrelated.
pub fn decomposition_checks(n: usize, nu: usize, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let big_t = 1.0;
    let grid = PathGrid::new(big_t, 2)?;
    let t = grid.time(1);
    let spec = MatrixProcessSpec::new(ProcessKind::InterpLw, n, seed).with_nu(nu);
    let rows = n + nu;
    let entries = rows * n;
    // Per sample and entry: Re M1, Im M1, M2.
    use rayon::prelude::*;
    let draws: Vec<Vec<[f64; 3]>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = build_sample(&spec, &grid, i)?.factors.expect("chiral kinds carry factors");
            let mut v = Vec::with_capacity(entries);
            for a in 0..f[1].rows() {
                for b in 0..f[1].cols() {
                    let m2 = f[2][(a, b)].re * t / big_t;
                    let m1 = f[1][(a, b)];
                    v.push([m1.re - m2, m1.im, m2]);
                }
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let s2 = t * (1.0 - t / big_t);
    let v2 = t * t / big_t;
    let stats: [(&str, f64, fn(&[f64; 3]) -> f64); 9] = [
        ("mean Re M1", 0.0, |d| d[0]),
        ("mean Im M1", 0.0, |d| d[1]),
        ("mean M2", 0.0, |d| d[2]),
        ("var Re M1", s2, |d| d[0] * d[0]),
        ("var Im M1", s2, |d| d[1] * d[1]),
        ("var M2", v2, |d| d[2] * d[2]),
        ("cov Re M1 M2", 0.0, |d| d[0] * d[2]),
        ("cov Im M1 M2", 0.0, |d| d[1] * d[2]),
        ("cov Re M1 Im M1", 0.0, |d| d[0] * d[1]),
    ];
    let mut out = Vec::new();
    for e in 0..draws[0].len() {
        for (label, want, f) in &stats {
            let xs: Vec<f64> = draws.iter().map(|d| f(&d[e])).collect();
            let est = MCEstimate::from_samples(&xs);
            out.push(Check::zscore(
                format!("entry ({}, {}) {label}: {:.5} vs {want}", e / n, e % n, est.value),
                est.zscore(*want),
                samples as f64,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_constructors_apply_thresholds() {
        assert!(Check::pvalue("a", 0.5, 10.0).pass);
        assert!(!Check::pvalue("a", 0.001, 10.0).pass);
        assert!(Check::zscore("z", -2.0, 10.0).pass);
        assert!(!Check::zscore("z", 3.5, 10.0).pass);
        assert!(!Check::error("e", Metric::AbsError, f64::NAN, 1.0).pass);
        assert!(!all_pass(&[]));
    }

    #[test]
    fn small_scenarios_run() {
        assert!(all_pass(&h_transform_identity(10, 3).unwrap()));
        assert!(all_pass(&selberg_checks(2, &SELBERG_PAIRS).unwrap()));
        assert!(process_for(EnsembleTag::Diii).is_err());
        let c = largest_eigenvalue_check(EnsembleTag::Gue, 1, 0, 500, 4).unwrap();
        assert!(c.pass, "{c:?}");
    }
}
