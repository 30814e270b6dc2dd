//! Euler–Maruyama integration of the particle systems, kept inside their
//! Weyl chamber by step rejection with Brownian-bridge refinement.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Chamber, ChamberPoint};
use crate::error::{Error, Result};
use crate::kernels::{ntilde_unchecked, MeanderSpec};
use crate::linalg::{eigvalsh, ComplexMatrix};
use crate::matproc::{PathGrid, PathSample};
use crate::rng::{normal, stream};
use crate::tol;

const MAX_HALVINGS: u32 = 20;
const COLLAPSE: f64 = 1e-12;
/// Warm-start time as a fraction of the horizon.
pub const WARM_START: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SdeFamily {
    Dyson { beta: f64 },
    Radial { beta: f64, gamma: f64 },
    Bessel { nu: f64 },
    Meander { nu: f64, kappa: f64, big_t: f64 },
    LaguerreEv { beta: f64, nu: f64 },
}

impl SdeFamily {
    pub fn chamber(&self) -> Chamber {
        match self {
            SdeFamily::Dyson { .. } => Chamber::A,
            _ => Chamber::C,
        }
    }

    fn code(&self) -> u64 {
        match self {
            SdeFamily::Dyson { .. } => 1,
            SdeFamily::Radial { .. } => 2,
            SdeFamily::Bessel { .. } => 3,
            SdeFamily::Meander { .. } => 4,
            SdeFamily::LaguerreEv { .. } => 5,
        }
    }

    /// Bessel(ν) is the radial system with (β, γ) = (2, (2ν+1)/2).
    fn as_radial(&self) -> Option<(f64, f64)> {
        match *self {
            SdeFamily::Radial { beta, gamma } => Some((beta, gamma)),
            SdeFamily::Bessel { nu } => Some((2.0, (2.0 * nu + 1.0) / 2.0)),
            _ => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let beta_ok = |b: f64| [1.0, 2.0, 4.0].contains(&b);
        match *self {
            SdeFamily::Dyson { beta } | SdeFamily::LaguerreEv { beta, .. } | SdeFamily::Radial { beta, .. }
                if !beta_ok(beta) =>
            {
                Err(Error::Spec(format!("β must be 1, 2 or 4, got {beta}")))
            }
            SdeFamily::Radial { gamma, .. } if !(gamma >= 0.0) => Err(Error::Spec(format!("γ must be ≥ 0, got {gamma}"))),
            SdeFamily::Bessel { nu } | SdeFamily::LaguerreEv { nu, .. } if !(nu > -1.0) => {
                Err(Error::Spec(format!("ν must exceed −1, got {nu}")))
            }
            SdeFamily::Meander { nu, kappa, big_t } => {
                MeanderSpec::new(nu, kappa, big_t)?;
                if n > 3 {
                    return Err(Error::UnsupportedDimension(n));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether the lowest particle may touch 0, in which case it is reflected.
    /// Dimension exactly 2 is reflected as well: 0 is polar there, but the
    /// Euler scheme overshoots it with positive probability.
    fn reflects(&self) -> bool {
        match *self {
            SdeFamily::Dyson { .. } => false,
            SdeFamily::Radial { .. } | SdeFamily::Bessel { .. } => {
                let (b, g) = self.as_radial().unwrap();
                b * g <= 1.0
            }
            SdeFamily::Meander { nu, kappa, .. } => 2.0 * nu + 1.0 - kappa <= 1.0,
            SdeFamily::LaguerreEv { beta, nu } => beta * (nu + 1.0) <= 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Start {
    Origin,
    Point(ChamberPoint),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdeSpec {
    pub family: SdeFamily,
    pub n: usize,
    pub x0: Start,
    pub grid: PathGrid,
    pub seed: u64,
}

impl SdeSpec {
    pub fn from_origin(family: SdeFamily, n: usize, grid: PathGrid, seed: u64) -> Self {
        Self { family, n, x0: Start::Origin, grid, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Spec("need at least one particle".into()));
        }
        self.family.validate(self.n)?;
        if let SdeFamily::Meander { big_t, .. } = self.family {
            if (big_t - self.grid.big_t).abs() > 1e-12 * big_t {
                return Err(Error::Spec("meander horizon must equal the grid horizon".into()));
            }
        }
        if let Start::Point(p) = &self.x0 {
            if p.len() != self.n {
                return Err(Error::Spec(format!("start point has {} coordinates, expected {}", p.len(), self.n)));
            }
            let xs = p.expect(self.family.chamber(), self.family.chamber().name())?;
            if !self.family.chamber().contains(xs) {
                return Err(Error::Spec("start point must be strictly inside the chamber".into()));
            }
        }
        Ok(())
    }
}

fn chamber_ok(c: Chamber, x: &[f64]) -> bool {
    if x.iter().any(|v| !v.is_finite()) {
        return false;
    }
    if x.windows(2).any(|w| !(w[0] < w[1])) {
        return false;
    }
    c != Chamber::C || x[0] > 0.0
}

/// b_i^{(ν,κ)}(t, x) = ∂_i ln Ñ^{(ν,κ)}(t, x), by central differences with
/// step 1e-4 times the smallest gap (the distance to 0 included).
pub fn meander_drift(ms: &MeanderSpec, t: f64, x: &ChamberPoint) -> Result<Vec<f64>> {
    let xs = x.expect(Chamber::C, "C")?;
    if xs.len() > 3 {
        return Err(Error::UnsupportedDimension(xs.len()));
    }
    if !Chamber::C.contains(xs) || !(t >= 0.0) {
        return Err(Error::Domain("need t ≥ 0 and x strictly inside the chamber".into()));
    }
    let _ = MeanderSpec::new(ms.nu, ms.kappa, ms.big_t)?;
    Ok(ntilde_gradient(ms.nu, ms.kappa, t, xs))
}

fn ntilde_gradient(nu: f64, kappa: f64, t: f64, xs: &[f64]) -> Vec<f64> {
    let mut gap = xs[0];
    for w in xs.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    let h = 1e-4 * gap;
    let mut y = xs.to_vec();
    (0..xs.len())
        .map(|i| {
            y[i] = xs[i] + h;
            let up = ntilde_unchecked(nu, kappa, t, &y).ln();
            y[i] = xs[i] - h;
            let dn = ntilde_unchecked(nu, kappa, t, &y).ln();
            y[i] = xs[i];
            (up - dn) / (2.0 * h)
        })
        .collect()
}

fn drift(family: &SdeFamily, t: f64, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    match *family {
        SdeFamily::Dyson { beta } => {
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    if j != i {
                        s += 1.0 / (x[i] - x[j]);
                    }
                }
                out[i] = 0.5 * beta * s;
            }
        }
        SdeFamily::Radial { .. } | SdeFamily::Bessel { .. } => {
            let (beta, gamma) = family.as_radial().unwrap();
            for i in 0..n {
                let mut s = gamma / x[i];
                for j in 0..n {
                    if j != i {
                        s += 1.0 / (x[i] - x[j]) + 1.0 / (x[i] + x[j]);
                    }
                }
                out[i] = 0.5 * beta * s;
            }
        }
        SdeFamily::Meander { nu, kappa, big_t } => {
            let g = ntilde_gradient(nu, kappa, (big_t - t).max(0.0), x);
            for i in 0..n {
                out[i] = (2.0 * nu + 1.0) / (2.0 * x[i]) + g[i];
            }
        }
        SdeFamily::LaguerreEv { beta, nu } => {
            for i in 0..n {
                let mut s = n as f64 + nu;
                for j in 0..n {
                    if j != i {
                        s += (x[i] + x[j]) / (x[i] - x[j]);
                    }
                }
                out[i] = beta * s;
            }
        }
    }
}

fn diffusion(family: &SdeFamily, x: f64) -> f64 {
    match family {
        SdeFamily::LaguerreEv { .. } => 2.0 * x.max(0.0).sqrt(),
        _ => 1.0,
    }
}

struct Stepper<'a> {
    family: &'a SdeFamily,
    chamber: Chamber,
    reflect: bool,
    floor: f64,
    b: Vec<f64>,
    trial: Vec<f64>,
}

impl Stepper<'_> {
    /// Advances x over [t, t+dt] with Brownian increments db. The interval is
    /// split at its midpoint, with the midpoint increment drawn from the
    /// Brownian bridge, when the drift would move a particle by more than
    /// a fraction of the local spacing or the step leaves the chamber.
    /// `depth` counts the (drift, exit) halvings made so far.
    fn advance(&mut self, rng: &mut ChaCha8Rng, t: f64, dt: f64, x: &mut Vec<f64>, db: &[f64], depth: (u32, u32)) -> Result<()> {
        drift(self.family, t, x, &mut self.b);
        let room = dt / 2.0 >= self.floor;
        let kick = self.b.iter().fold(0.0f64, |m, v| m.max(v.abs())) * dt;
        if room && depth.0 < tol::DRIFT_HALVINGS && kick > tol::DRIFT_FRACTION * self.spacing(x) {
            return self.split(rng, t, dt, x, db, (depth.0 + 1, depth.1));
        }
        for i in 0..x.len() {
            self.trial[i] = x[i] + self.b[i] * dt + diffusion(self.family, x[i]) * db[i];
        }
        if self.reflect && self.trial[0] < 0.0 {
            self.trial[0] = -self.trial[0];
        }
        let ok = if self.reflect && self.trial[0] >= 0.0 {
            let mut probe = self.trial.clone();
            if probe[0] == 0.0 {
                probe[0] = f64::MIN_POSITIVE;
            }
            chamber_ok(self.chamber, &probe)
        } else {
            chamber_ok(self.chamber, &self.trial)
        };
        if ok {
            x.copy_from_slice(&self.trial);
            return Ok(());
        }
        if !room || depth.1 >= MAX_HALVINGS {
            return Err(Error::StepCollapse(self.floor));
        }
        self.split(rng, t, dt, x, db, (depth.0, depth.1 + 1))
    }

    /// Smallest distance between neighbours, and to 0 where the drift is
    /// singular there.
    fn spacing(&self, x: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for w in x.windows(2) {
            d = d.min(w[1] - w[0]);
        }
        if !matches!(self.family, SdeFamily::Dyson { .. } | SdeFamily::LaguerreEv { .. }) {
            d = d.min(x[0].abs());
        }
        d
    }

    fn split(&mut self, rng: &mut ChaCha8Rng, t: f64, dt: f64, x: &mut Vec<f64>, db: &[f64], depth: (u32, u32)) -> Result<()> {
        let half = dt / 2.0;
        let sd = (dt / 4.0).sqrt();
        let db1: Vec<f64> = db.iter().map(|d| d / 2.0 + sd * normal(rng)).collect();
        let db2: Vec<f64> = db.iter().zip(&db1).map(|(d, a)| d - a).collect();
        self.advance(rng, t, half, x, &db1, depth)?;
        self.advance(rng, t + half, half, x, &db2, depth)
    }
}

fn chi(rng: &mut ChaCha8Rng, k: f64) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    let g: f64 = Gamma::new(k / 2.0, 2.0).expect("positive shape").sample(rng);
    g.sqrt()
}

/// Eigenvalues of the β-Hermite ensemble with density ∝ |Δ(x)|^β e^{−|x|²/2}.
pub fn beta_hermite(rng: &mut ChaCha8Rng, beta: f64, n: usize) -> Result<Vec<f64>> {
    let diag: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let off: Vec<f64> = (1..n).map(|i| chi(rng, beta * (n - i) as f64) / std::f64::consts::SQRT_2).collect();
    let m = ComplexMatrix::from_real(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if j == i + 1 {
            off[i]
        } else if i == j + 1 {
            off[j]
        } else {
            0.0
        }
    });
    eigvalsh(&m)
}

/// Eigenvalues of the β-Laguerre ensemble with density
/// ∝ |Δ(λ)|^β ∏ λ_i^{a − 1 − β(N−1)/2} e^{−Σλ/2}.
pub fn beta_laguerre(rng: &mut ChaCha8Rng, beta: f64, a: f64, n: usize) -> Result<Vec<f64>> {
    let d: Vec<f64> = (0..n).map(|i| chi(rng, 2.0 * a - beta * i as f64)).collect();
    let s: Vec<f64> = (1..n).map(|i| chi(rng, beta * (n - i) as f64)).collect();
    // B lower bidiagonal; eigenvalues of B Bᵀ.
    let bb = |i: usize, j: usize| -> f64 {
        let b = |r: usize, c: usize| {
            if r == c {
                d[r]
            } else if r == c + 1 {
                s[c]
            } else {
                0.0
            }
        };
        (0..n).map(|k| b(i, k) * b(j, k)).sum()
    };
    let m = ComplexMatrix::from_real(n, n, bb);
    let mut ev = eigvalsh(&m)?;
    for v in ev.iter_mut() {
        *v = v.max(0.0);
    }
    Ok(ev)
}

/// Exact sample of the system at time t when started at the origin.
fn origin_marginal(rng: &mut ChaCha8Rng, family: &SdeFamily, n: usize, t: f64) -> Result<Vec<f64>> {
    match *family {
        SdeFamily::Dyson { beta } => Ok(beta_hermite(rng, beta, n)?.into_iter().map(|v| v * t.sqrt()).collect()),
        SdeFamily::Radial { .. } | SdeFamily::Bessel { .. } => {
            let (beta, gamma) = family.as_radial().unwrap();
            let a = (beta * gamma - 1.0) / 2.0 + 1.0 + beta * (n as f64 - 1.0) / 2.0;
            Ok(beta_laguerre(rng, beta, a, n)?.into_iter().map(|v| (v * t).sqrt()).collect())
        }
        SdeFamily::LaguerreEv { beta, nu } => {
            let a = beta * (n as f64 + nu) / 2.0;
            Ok(beta_laguerre(rng, beta, a, n)?.into_iter().map(|v| v * t).collect())
        }
        SdeFamily::Meander { nu, kappa, big_t } => {
            // Proposal: the noncolliding Bessel marginal. Its ratio to the
            // meander marginal is Ñ(T−t, x)/h(x), flat up to O(t/T); accept
            // against its value near the origin.
            let bessel = SdeFamily::Bessel { nu };
            let ratio = |x: &[f64]| {
                let mut h = 1.0;
                for i in 0..x.len() {
                    for j in i + 1..x.len() {
                        h *= x[j] * x[j] - x[i] * x[i];
                    }
                }
                ntilde_unchecked(nu, kappa, big_t - t, x) / h
            };
            for _ in 0..1000 {
                let x = origin_marginal(rng, &bessel, n, t)?;
                if kappa == 0.0 && n == 1 {
                    return Ok(x);
                }
                let small: Vec<f64> = x.iter().map(|v| v * 1e-2).collect();
                let r0 = ratio(&small);
                let r = ratio(&x);
                if !(r0.is_finite() && r0 > 0.0 && r.is_finite()) || rng.gen::<f64>() < (r / r0).min(1.0) {
                    return Ok(x);
                }
            }
            Err(Error::Domain("meander warm start rejected 1000 proposals".into()))
        }
    }
}

fn rng_for(spec: &SdeSpec, index: u64) -> ChaCha8Rng {
    stream(spec.seed, &[0x5344, spec.family.code(), index])
}

/// Path 0 of the system.
pub fn integrate(spec: &SdeSpec) -> Result<PathSample> {
    integrate_path(spec, 0)
}

/// Path `index`; depends only on (seed, family, index).
pub fn integrate_path(spec: &SdeSpec, index: u64) -> Result<PathSample> {
    spec.validate()?;
    let grid = spec.grid;
    let chamber = spec.family.chamber();
    let mut rng = rng_for(spec, index);
    let n = spec.n;
    let times = grid.times();
    let mut points = Vec::with_capacity(times.len());
    let (mut x, mut t0) = match &spec.x0 {
        Start::Point(p) => (p.coords().to_vec(), 0.0),
        Start::Origin => {
            let te = (WARM_START * grid.big_t).min(0.5 * grid.dt());
            (origin_marginal(&mut rng, &spec.family, n, te)?, te)
        }
    };
    points.push(match &spec.x0 {
        Start::Point(p) => p.clone(),
        Start::Origin => ChamberPoint::origin(chamber, n),
    });
    let mut st = Stepper {
        family: &spec.family,
        chamber,
        reflect: spec.family.reflects(),
        floor: COLLAPSE * grid.big_t,
        b: vec![0.0; n],
        trial: vec![0.0; n],
    };
    for k in 1..times.len() {
        let dt = times[k] - t0;
        let db: Vec<f64> = (0..n).map(|_| dt.sqrt() * normal(&mut rng)).collect();
        st.advance(&mut rng, t0, dt, &mut x, &db, (0, 0))?;
        t0 = times[k];
        points.push(ChamberPoint::new(chamber, x.clone()));
    }
    Ok(PathSample { times, points })
}

/// Terminal points of `count` independent paths, computed in parallel.
pub fn terminal_samples(spec: &SdeSpec, count: usize) -> Result<Vec<ChamberPoint>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| integrate_path(spec, i).map(|p| p.terminal().clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{log_h, HKind};
    use crate::rng::MCEstimate;
    use crate::specfun::erf;

    fn grid(t: f64, steps: usize) -> PathGrid {
        PathGrid::new(t, steps).unwrap()
    }

    fn moments(pts: &[ChamberPoint], f: impl Fn(&[f64]) -> f64) -> MCEstimate {
        let v: Vec<f64> = pts.iter().map(|p| f(p.coords())).collect();
        MCEstimate::from_samples(&v)
    }

    #[test]
    fn dyson_single_particle_is_brownian() {
        let spec = SdeSpec::from_origin(SdeFamily::Dyson { beta: 2.0 }, 1, grid(0.7, 20), 1);
        let pts = terminal_samples(&spec, 20_000).unwrap();
        assert!(moments(&pts, |x| x[0] * x[0]).zscore(0.7).abs() < 3.0);
    }

    #[test]
    fn three_dimensional_bessel_second_moment() {
        let spec = SdeSpec::from_origin(SdeFamily::Bessel { nu: 0.5 }, 1, grid(1.2, 200), 2);
        let pts = terminal_samples(&spec, 20_000).unwrap();
        assert!(moments(&pts, |x| x[0] * x[0]).zscore(3.0 * 1.2).abs() < 3.0);
    }

    #[test]
    fn laguerre_eigenvalue_mean() {
        for nu in [0.0, 1.0] {
            let spec = SdeSpec::from_origin(SdeFamily::LaguerreEv { beta: 2.0, nu }, 1, grid(0.9, 200), 3);
            let pts = terminal_samples(&spec, 20_000).unwrap();
            assert!(moments(&pts, |x| x[0]).zscore(2.0 * (1.0 + nu) * 0.9).abs() < 3.0);
        }
    }

    #[test]
    fn warm_start_samplers_match_known_moments() {
        // GUE(1), N = 2: E Σx² = N² = 4.
        let mut rng = stream(4, &[]);
        let v: Vec<f64> = (0..40_000)
            .map(|_| beta_hermite(&mut rng, 2.0, 2).unwrap().iter().map(|x| x * x).sum())
            .collect();
        assert!(MCEstimate::from_samples(&v).zscore(4.0).abs() < 3.0);
        // GOE(1), N = 3: E Σx² = N + N(N−1)/2 = 6.
        let v: Vec<f64> = (0..40_000)
            .map(|_| beta_hermite(&mut rng, 1.0, 3).unwrap().iter().map(|x| x * x).sum())
            .collect();
        assert!(MCEstimate::from_samples(&v).zscore(6.0).abs() < 3.0);
        // Complex Wishart (N+ν)×N with entries of variance 2: E tr = 2N(N+ν).
        let v: Vec<f64> = (0..40_000)
            .map(|_| beta_laguerre(&mut rng, 2.0, 3.0, 2).unwrap().iter().sum())
            .collect();
        assert!(MCEstimate::from_samples(&v).zscore(12.0).abs() < 3.0);
    }

    #[test]
    fn dyson_paths_never_collide() {
        let spec = SdeSpec::from_origin(SdeFamily::Dyson { beta: 2.0 }, 3, grid(0.1, 1000), 5);
        let fails = (0..1000u64).into_par_iter().filter(|i| integrate_path(&spec, *i).is_err()).count();
        assert_eq!(fails, 0);
        let p = integrate_path(&spec, 0).unwrap();
        assert!(p.points[1..].iter().all(|pt| chamber_ok(Chamber::A, pt.coords())));
    }

    #[test]
    fn reflection_keeps_low_dimensional_radial_nonnegative() {
        let spec = SdeSpec::from_origin(SdeFamily::Bessel { nu: -0.5 }, 1, grid(1.0, 100), 6);
        let pts = terminal_samples(&spec, 20_000).unwrap();
        assert!(pts.iter().all(|p| p.coords()[0] >= 0.0));
        // Reflected BM: E x² = t.
        assert!(moments(&pts, |x| x[0] * x[0]).zscore(1.0).abs() < 3.0);
    }

    #[test]
    fn fixed_start_and_determinism() {
        let x0 = ChamberPoint::new(Chamber::A, vec![-0.5, 0.5]);
        let spec = SdeSpec { family: SdeFamily::Dyson { beta: 1.0 }, n: 2, x0: Start::Point(x0), grid: grid(1.0, 50), seed: 9 };
        let a = integrate_path(&spec, 3).unwrap();
        let b = integrate_path(&spec, 3).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.points[0].coords(), &[-0.5, 0.5]);
        let bad = SdeSpec { x0: Start::Point(ChamberPoint::new(Chamber::A, vec![0.5, 0.5])), ..spec.clone() };
        assert!(bad.validate().is_err());
        let bad = SdeSpec { family: SdeFamily::Dyson { beta: 3.0 }, ..spec };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn meander_drift_scalar_case() {
        // (ν, κ) = (1/2, 1), N = 1: Ñ = erf(x/√(2t))/x.
        let ms = MeanderSpec::new(0.5, 1.0, 10.0).unwrap();
        for (t, x) in [(0.5, 0.3), (1.0, 1.1), (2.0, 0.05)] {
            let d = meander_drift(&ms, t, &ChamberPoint::new(Chamber::C, vec![x])).unwrap()[0];
            let f = |x: f64| (erf(x / (2.0 * t as f64).sqrt()) / x).ln();
            let h = 1e-5;
            let r = (f(x + h) - f(x - h)) / (2.0 * h);
            assert!((d - r).abs() < 1e-6 * r.abs().max(1.0), "{d} {r}");
        }
    }

    #[test]
    fn meander_drift_long_time_limit() {
        let nu = 0.5;
        let ms = MeanderSpec::new(nu, 0.0, 1e4).unwrap();
        let x = ChamberPoint::new(Chamber::C, vec![0.6, 1.5]);
        let b = meander_drift(&ms, 1e4, &x).unwrap();
        let alpha = (2.0 * nu + 1.0) / 2.0;
        let lh = |y: &[f64]| log_h(HKind::Alpha(alpha), y).1;
        for i in 0..2 {
            let mut up = x.coords().to_vec();
            let mut dn = up.clone();
            up[i] += 1e-6;
            dn[i] -= 1e-6;
            let want = (lh(&up) - lh(&dn)) / 2e-6;
            let got = b[i] + (2.0 * nu + 1.0) / (2.0 * x.coords()[i]);
            assert!((got / want - 1.0).abs() < 0.01, "{got} {want}");
        }
    }

    #[test]
    fn meander_drift_is_stable_in_the_step() {
        let ms = MeanderSpec::new(0.0, 0.5, 1.0).unwrap();
        let x = ChamberPoint::new(Chamber::C, vec![0.4, 0.9]);
        let a = meander_drift(&ms, 0.6, &x).unwrap();
        let f = |v: &[f64]| ntilde_unchecked(0.0, 0.5, 0.6, v).ln();
        let h = 1e-3;
        let g = [
            (f(&[0.4 + h, 0.9]) - f(&[0.4 - h, 0.9])) / (2.0 * h),
            (f(&[0.4, 0.9 + h]) - f(&[0.4, 0.9 - h])) / (2.0 * h),
        ];
        for i in 0..2 {
            assert!((a[i] - g[i]).abs() < 1e-3 * g[i].abs().max(1.0), "{a:?} {g:?}");
        }
    }

    #[test]
    fn meander_terminal_scalar_density() {
        // N = 1, (ν, κ) = (1/2, 1): X(T) has density ∝ x e^{−x²/2T}, so E X² = 2T.
        let spec = SdeSpec::from_origin(SdeFamily::Meander { nu: 0.5, kappa: 1.0, big_t: 1.0 }, 1, grid(1.0, 200), 7);
        let pts = terminal_samples(&spec, 4_000).unwrap();
        assert!(moments(&pts, |x| x[0] * x[0]).zscore(2.0).abs() < 3.5);
    }
}
