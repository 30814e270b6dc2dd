//! Karlin-McGregor determinants, transition densities, noncolliding
//! probabilities and the star / watermelon / banana densities.

use serde::{Deserialize, Serialize};

use crate::ensembles::{
    check_meander, exponent_psi, log_density_unchecked, log_h, log_norm_constant, Chamber,
    ChamberPoint, EnsembleSpec, EnsembleTag, HKind, NormConst,
};
use crate::error::{domain, Error, Result};
use crate::linalg::det_from_log_entries;
use crate::quad::{integrate_adaptive_with_breaks, integrate_ordered, OrderedGrid};
use crate::rng::{bessel_radial, stream, MCEstimate};
use crate::schur::{log_series_nonneg, ExpansionKind};
use crate::specfun::{bessel_dlog_dy, lgamma, log_kernel_unchecked, KernelTag};
use crate::tol;

pub type Family = KernelTag;

fn chamber_of(f: Family) -> Chamber {
    match f {
        KernelTag::A => Chamber::A,
        _ => Chamber::C,
    }
}

fn check_family(f: Family) -> Result<Family> {
    f.validate()
}

fn check_nonneg(f: Family, v: &[f64]) -> Result<()> {
    if f != KernelTag::A && v.iter().any(|c| *c < 0.0) {
        return domain(format!("family {f:?} needs nonnegative coordinates, got {v:?}"));
    }
    Ok(())
}

/// Sign and log-modulus of det_{i,j}[G(t, y_j | x_i)]. For the radial
/// families with small x·y/t the determinant is assembled from its Schur
/// expansion, whose terms are all positive; the direct LU route would lose
/// every significant digit to cancellation there.
pub fn log_km(f: Family, t: f64, x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n >= 2 && f != KernelTag::A {
        let xm = x.iter().cloned().fold(0.0, f64::max);
        let ym = y.iter().cloned().fold(0.0, f64::max);
        let s = (xm * xm / (2.0 * t)) * (ym * ym / (2.0 * t));
        if s <= 1.0 {
            return log_km_series(f, t, x, y);
        }
    }
    let mut signs = vec![1.0; n * n];
    let mut logs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let l = log_kernel_unchecked(f, t, y[j], x[i]);
            logs[i * n + j] = l;
            if l == f64::NEG_INFINITY {
                signs[i * n + j] = 0.0;
            }
        }
    }
    det_from_log_entries(&signs, &logs, n)
}

fn log_km_series(f: Family, t: f64, x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    let nf = n as f64;
    let nu = match f {
        KernelTag::C => 0.5,
        KernelTag::D => -0.5,
        KernelTag::Bessel(nu) => nu,
        KernelTag::A => unreachable!(),
    };
    let xx: Vec<f64> = x.iter().map(|v| v * v / (2.0 * t)).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v / (2.0 * t)).collect();
    let (sx, lx) = log_h(HKind::A, &xx);
    let (sy, ly) = log_h(HKind::A, &yy);
    if sx == 0.0 || sy == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let log_series = log_series_nonneg(ExpansionKind::Bessel(nu), &xx, &yy);
    let ly2: f64 = y.iter().map(|v| v.ln()).sum();
    let sq: f64 = x.iter().chain(y).map(|v| v * v).sum();
    // f^{(ν)} = t^{-N} ∏ y^{ν+1} x^{-ν} e^{-(|x|²+|y|²)/2t} det[I_ν(x_i y_j / t)]
    // and the x^{-ν}·(x²/2t)^{ν/2} factors collapse to (2t)^{-ν/2}.
    let mut log = -nf * t.ln() + (2.0 * nu + 1.0) * ly2 - nf * nu * (2.0 * t).ln() - sq / (2.0 * t)
        + lx
        + ly
        + log_series;
    if f == KernelTag::C {
        // G^C = (x/y) G^{(1/2)}
        if x.iter().any(|v| *v == 0.0) {
            return (0.0, f64::NEG_INFINITY);
        }
        log += x.iter().map(|v| v.ln()).sum::<f64>() - ly2;
    }
    (sx * sy, log)
}

pub fn km_determinant(f: Family, t: f64, x: &ChamberPoint, y: &ChamberPoint) -> Result<f64> {
    let f = check_family(f)?;
    if !(t > 0.0) {
        return domain("t must be positive");
    }
    let want = chamber_of(f);
    let xs = x.expect(want, want.name())?;
    let ys = y.expect(want, want.name())?;
    if xs.len() != ys.len() {
        return Err(Error::Spec("x and y must have the same length".into()));
    }
    check_nonneg(f, xs)?;
    check_nonneg(f, ys)?;
    let (s, l) = log_km(f, t, xs, ys);
    Ok(s * l.exp())
}

fn h_for(f: Family) -> HKind {
    match f {
        KernelTag::A => HKind::A,
        KernelTag::C => HKind::C,
        KernelTag::D | KernelTag::Bessel(_) => HKind::D,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionQuery {
    pub family: Family,
    pub s: f64,
    pub t: f64,
    pub x: ChamberPoint,
    pub y: ChamberPoint,
}

/// Log of the transition density from (s, x) to (t, y) of the noncolliding
/// process of the given family. x at the origin selects the |x|→0 limit.
pub fn log_transition_density(q: &TransitionQuery) -> Result<f64> {
    let f = check_family(q.family)?;
    if !(q.t > q.s && q.s >= 0.0) {
        return domain(format!("need 0 ≤ s < t, got s={}, t={}", q.s, q.t));
    }
    let want = chamber_of(f);
    let x = q.x.expect(want, want.name())?;
    let y = q.y.expect(want, want.name())?;
    if x.len() != y.len() {
        return Err(Error::Spec("x and y must have the same length".into()));
    }
    let tau = q.t - q.s;
    if !want.contains(y) {
        return Ok(f64::NEG_INFINITY);
    }
    let n = x.len();
    if q.x.is_origin() {
        let spec = match f {
            KernelTag::A => EnsembleSpec::new(EnsembleTag::Gue, n, tau),
            KernelTag::C => EnsembleSpec::new(EnsembleTag::C, n, tau),
            KernelTag::D => EnsembleSpec::new(EnsembleTag::D, n, tau),
            KernelTag::Bessel(nu) => EnsembleSpec::new(EnsembleTag::ChGue, n, tau).with_nu(nu),
        };
        return Ok(log_density_unchecked(&spec, y));
    }
    if !want.contains(x) {
        return domain(format!("starting point {x:?} must be interior or the origin"));
    }
    let h = h_for(f);
    let (_, lf) = log_km(f, tau, x, y);
    Ok(lf + log_h(h, y).1 - log_h(h, x).1)
}

pub fn transition_density(q: &TransitionQuery) -> Result<f64> {
    log_transition_density(q).map(f64::exp)
}

/// Breakpoints for quadrature of Gaussian-like bumps of width `w` centred
/// at `centers` over [lo, hi], with no panel longer than 4w.
fn bump_breaks(lo: f64, hi: f64, centers: &[f64], w: f64) -> Vec<f64> {
    let mut cand: Vec<f64> = Vec::new();
    for &c in centers {
        cand.push(c - 3.0 * w);
        cand.push(c + 3.0 * w);
    }
    cand.retain(|b| *b > lo && *b < hi);
    cand.sort_by(f64::total_cmp);
    let mut pts = vec![lo];
    for b in cand {
        if b - pts.last().unwrap() > 0.5 * w {
            pts.push(b);
        }
    }
    if hi - pts.last().unwrap() < 0.5 * w && pts.len() > 1 {
        pts.pop();
    }
    pts.push(hi);
    let mut out = Vec::new();
    for win in pts.windows(2) {
        let k = ((win[1] - win[0]) / (4.0 * w)).ceil().max(1.0) as usize;
        for i in 1..k {
            out.push(win[0] + (win[1] - win[0]) * i as f64 / k as f64);
        }
        out.push(win[1]);
    }
    out.pop();
    out
}

/// Integral of `f` over {lo ≤ y_1 < … < y_n ≤ hi}, optionally in the variable
/// w = y^{1/p} (lo must then be 0), which removes y^{1/p − 1}-type behaviour
/// at the origin.
fn ordered_integral<F>(n: usize, lo: f64, hi: f64, centers: &[f64], w: f64, p: f64, nodes: usize, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if p == 1.0 {
        let grid = OrderedGrid::new(lo, hi).nodes(nodes, 1).breaks(bump_breaks(lo, hi, centers, w));
        return integrate_ordered(n, &grid, f);
    }
    debug_assert_eq!(lo, 0.0);
    let whi = hi.powf(1.0 / p);
    let wb: Vec<f64> = bump_breaks(0.0, hi, centers, w).into_iter().map(|b| b.powf(1.0 / p)).collect();
    // Extra panels near the origin in w.
    let mut breaks = wb;
    breaks.push(0.25 * breaks.first().copied().unwrap_or(whi));
    let grid = OrderedGrid::new(0.0, whi).nodes(nodes, 1).breaks(breaks);
    integrate_ordered(n, &grid, |wv| {
        let mut y = [0.0f64; 8];
        let mut jac = 1.0;
        for (k, v) in wv.iter().enumerate() {
            y[k] = v.powf(p);
            jac *= p * v.powf(p - 1.0);
        }
        if jac == 0.0 {
            return 0.0;
        }
        jac * f(&y[..wv.len()])
    })
}

/// Power map exponent making ∫_0 y^e dy smooth in w = y^{1/p}.
fn power_for_exponent(e: f64) -> f64 {
    if e >= 0.0 && (e - e.round()).abs() < 1e-12 {
        1.0
    } else {
        (e + 1.0).ceil().max(1.0) / (e + 1.0)
    }
}

fn nodes_for(n: usize) -> usize {
    if n >= 4 { 16 } else { 20 }
}

/// N^♯(t, x): probability that the N-particle system of the given family
/// started at x survives (no collisions, no absorption) up to time t.
pub fn noncoll_probability(f: Family, t: f64, x: &ChamberPoint) -> Result<f64> {
    let f = check_family(f)?;
    if matches!(f, KernelTag::Bessel(_)) {
        return domain("noncolliding probabilities are defined for the A, C and D families");
    }
    let want = chamber_of(f);
    let xs = x.expect(want, want.name())?;
    let n = xs.len();
    if n > 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(t > 0.0) {
        return domain("t must be positive");
    }
    if !want.contains(xs) {
        return domain("x must be interior to its chamber");
    }
    if f == KernelTag::A && n == 1 {
        return Ok(1.0);
    }
    Ok(noncoll_unchecked(f, t, xs))
}

pub(crate) fn noncoll_unchecked(f: Family, t: f64, xs: &[f64]) -> f64 {
    let n = xs.len();
    let w = t.sqrt();
    let hi = xs[n - 1] + tol::TAIL_RADII * w;
    let lo = if f == KernelTag::A { xs[0] - tol::TAIL_RADII * w } else { 0.0 };
    ordered_integral(n, lo, hi, xs, w, 1.0, nodes_for(n), |y| {
        let (s, l) = log_km(f, t, xs, y);
        s * l.exp()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanderSpec {
    pub nu: f64,
    pub kappa: f64,
    pub big_t: f64,
}

impl MeanderSpec {
    pub fn new(nu: f64, kappa: f64, big_t: f64) -> Result<Self> {
        check_meander(nu, kappa)?;
        if !(big_t > 0.0) {
            return domain("horizon T must be positive");
        }
        Ok(Self { nu, kappa, big_t })
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.nu, self.kappa, self.big_t).map(|_| ())
    }
}

/// h_T^{(ν,κ)}(t, x) = ∫_0^∞ G^{(ν)}(T−t, z|x) z^{−κ} dz.
pub fn meander_weight(ms: &MeanderSpec, t: f64, x: f64) -> Result<f64> {
    ms.validate()?;
    if !(t >= 0.0 && t <= ms.big_t) {
        return domain(format!("t must lie in [0, T], got {t}"));
    }
    if !(x >= 0.0) {
        return domain("x must be nonnegative");
    }
    Ok(meander_1d(ms.nu, ms.kappa, ms.big_t - t, x))
}

pub(crate) fn meander_1d(nu: f64, kappa: f64, tau: f64, x: f64) -> f64 {
    if tau == 0.0 {
        return x.powf(-kappa);
    }
    if kappa == 0.0 {
        return 1.0;
    }
    if x == 0.0 {
        return (-0.5 * kappa * (2.0 * tau).ln() + lgamma(nu + 1.0 - 0.5 * kappa) - lgamma(nu + 1.0)).exp();
    }
    let w = tau.sqrt();
    let tag = KernelTag::Bessel(nu);
    let integrand = |z: f64| {
        if z <= 0.0 {
            0.0
        } else {
            (log_kernel_unchecked(tag, tau, z, x) - kappa * z.ln()).exp()
        }
    };
    let hi = x + 14.0 * w;
    let mut pts: Vec<f64> = [x - 6.0 * w, x - 3.0 * w, x, x + 3.0 * w, x + 6.0 * w]
        .into_iter()
        .filter(|b| *b > 0.0)
        .collect();
    let b1 = pts.first().copied().unwrap_or(hi).min(x.max(w));
    pts.retain(|b| *b > b1);
    // First panel [0, b1] in the variable z = b1·u^p.
    let p = 1.0 / (2.0 * nu + 2.0 - kappa);
    let head = integrate_adaptive_with_breaks(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let z = b1 * u.powf(p);
            integrand(z) * p * b1 * u.powf(p - 1.0)
        },
        &[0.0, 0.25, 0.5, 1.0],
        tol::QUAD_1D_REL * 1e-2,
        0.0,
    );
    let mut br = vec![b1];
    br.extend(pts);
    br.push(hi);
    let tail = integrate_adaptive_with_breaks(integrand, &br, tol::QUAD_1D_REL * 1e-2, 0.0);
    head + tail
}

/// Ñ^{(ν,κ)}(t, x) = ∫_{W^C} f^{(ν)}(t, y|x) ∏ y_i^{−κ} dy by quadrature (N ≤ 3).
pub fn ntilde(ms: &MeanderSpec, t: f64, x: &ChamberPoint) -> Result<f64> {
    ms.validate()?;
    let xs = x.expect(Chamber::C, "C")?;
    let n = xs.len();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(t >= 0.0) {
        return domain("t must be nonnegative");
    }
    if n == 1 {
        return Ok(meander_1d(ms.nu, ms.kappa, t, xs[0]));
    }
    if !Chamber::C.contains(xs) {
        return domain("x must be interior to the chamber");
    }
    Ok(ntilde_unchecked(ms.nu, ms.kappa, t, xs))
}

pub(crate) fn ntilde_unchecked(nu: f64, kappa: f64, tau: f64, xs: &[f64]) -> f64 {
    let n = xs.len();
    if tau == 0.0 {
        return (-kappa * xs.iter().map(|v| v.ln()).sum::<f64>()).exp();
    }
    if n == 1 {
        return meander_1d(nu, kappa, tau, xs[0]);
    }
    let w = tau.sqrt();
    let mut gap = xs[0];
    for k in 1..n {
        gap = gap.min(xs[k] - xs[k - 1]);
    }
    if gap > tol::SEPARATED_GAP * w {
        return xs.iter().map(|v| meander_1d(nu, kappa, tau, *v)).product();
    }
    let tag = KernelTag::Bessel(nu);
    let hi = xs[n - 1] + tol::TAIL_RADII * w;
    let p = power_for_exponent(2.0 * nu + 1.0 - kappa);
    ordered_integral(n, 0.0, hi, xs, w, p, nodes_for(n), |y| {
        let (s, l) = log_km(tag, tau, xs, y);
        s * (l - kappa * y.iter().map(|v| v.ln()).sum::<f64>()).exp()
    })
}

/// Monte Carlo estimate of Ñ for any N: with independent Z_i ~ G^{(ν)}(t, ·|x_i),
/// Ñ = E[sgn(Z) ∏ Z_i^{−κ}], sgn being the sign of the sorting permutation.
pub fn ntilde_mc(ms: &MeanderSpec, t: f64, x: &ChamberPoint, samples: usize, seed: u64) -> Result<MCEstimate> {
    ms.validate()?;
    let xs = x.expect(Chamber::C, "C")?;
    if samples < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: samples });
    }
    if !(t > 0.0) || !Chamber::C.contains(xs) {
        return domain("need t > 0 and interior x");
    }
    use rayon::prelude::*;
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[0x6e74, i as u64]);
            let z: Vec<f64> = xs.iter().map(|xi| bessel_radial(&mut rng, ms.nu, t, *xi)).collect();
            let mut sign = 1.0;
            for a in 0..z.len() {
                for b in a + 1..z.len() {
                    if z[b] < z[a] {
                        sign = -sign;
                    }
                }
            }
            sign * (-ms.kappa * z.iter().map(|v| v.ln()).sum::<f64>()).exp()
        })
        .collect();
    Ok(MCEstimate::from_samples(&vals))
}

/// Star-topology density g_T^{(ν,κ)}(s, x; t, y). x at the origin selects
/// the origin-start closed form; t = T gives the final-time density.
pub fn star_density(ms: &MeanderSpec, s: f64, x: &ChamberPoint, t: f64, y: &ChamberPoint) -> Result<f64> {
    log_star_density(ms, s, x, t, y).map(f64::exp)
}

pub fn log_star_density(ms: &MeanderSpec, s: f64, x: &ChamberPoint, t: f64, y: &ChamberPoint) -> Result<f64> {
    ms.validate()?;
    let xs = x.expect(Chamber::C, "C")?;
    let ys = y.expect(Chamber::C, "C")?;
    check_times(s, t, ms.big_t)?;
    if xs.len() != ys.len() {
        return Err(Error::Spec("x and y must have the same length".into()));
    }
    if xs.len() > 3 {
        return Err(Error::UnsupportedDimension(xs.len()));
    }
    if !Chamber::C.contains(ys) {
        return Ok(f64::NEG_INFINITY);
    }
    let (nu, kappa) = (ms.nu, ms.kappa);
    let n = xs.len() as f64;
    let big = ms.big_t - s;
    let tt = t - s;
    let lk: f64 = ys.iter().map(|v| v.ln()).sum();
    if x.is_origin() {
        let cnk = log_norm_constant(NormConst::CNuKappa(nu, kappa), xs.len())?;
        if tt == big {
            return Ok(-0.5 * n * (n + 2.0 * nu + 1.0 - kappa) * big.ln() - cnk
                - ys.iter().map(|v| v * v).sum::<f64>() / (2.0 * big)
                + log_h(HKind::Alpha(2.0 * nu + 1.0 - kappa), ys).1);
        }
        let nt = ntilde_unchecked(nu, kappa, big - tt, ys);
        return Ok(0.5 * n * (n + kappa - 1.0) * big.ln() - n * (n + nu) * tt.ln() - cnk
            - ys.iter().map(|v| v * v).sum::<f64>() / (2.0 * tt)
            + log_h(HKind::Alpha(2.0 * nu + 1.0), ys).1
            + nt.ln());
    }
    if !Chamber::C.contains(xs) {
        return domain("x must be interior to the chamber or the origin");
    }
    let tag = KernelTag::Bessel(nu);
    let (sf, lf) = log_km(tag, tt, xs, ys);
    if sf <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let denom = ntilde_unchecked(nu, kappa, big, xs).ln();
    let num = if t == ms.big_t { -kappa * lk } else { ntilde_unchecked(nu, kappa, ms.big_t - t, ys).ln() };
    Ok(lf + num - denom)
}

fn check_times(s: f64, t: f64, big_t: f64) -> Result<()> {
    if !(s >= 0.0 && s < t && t <= big_t) {
        return domain(format!("need 0 ≤ s < t ≤ T, got s={s}, t={t}, T={big_t}"));
    }
    Ok(())
}

/// A-family star density g_T^A(s, x; t, y) built from N^A.
pub fn star_density_a(big_t: f64, s: f64, x: &ChamberPoint, t: f64, y: &ChamberPoint) -> Result<f64> {
    let xs = x.expect(Chamber::A, "A")?;
    let ys = y.expect(Chamber::A, "A")?;
    check_times(s, t, big_t)?;
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::Spec("x and y must have the same length".into()));
    }
    if n > 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !Chamber::A.contains(ys) {
        return Ok(0.0);
    }
    let big = big_t - s;
    let tt = t - s;
    let na = |tau: f64, v: &[f64]| if v.len() == 1 { 1.0 } else { noncoll_unchecked(KernelTag::A, tau, v) };
    if x.is_origin() {
        if tt == big {
            return Ok(log_density_unchecked(&EnsembleSpec::new(EnsembleTag::Goe, n, big), ys).exp());
        }
        let nf = n as f64;
        let l = exponent_psi(Chamber::A, n).value() * big.ln() - 0.5 * nf * nf * tt.ln()
            - log_norm_constant(NormConst::CAprime, n)?
            - ys.iter().map(|v| v * v).sum::<f64>() / (2.0 * tt)
            + log_h(HKind::A, ys).1;
        return Ok(l.exp() * na(big - tt, ys));
    }
    if !Chamber::A.contains(xs) {
        return domain("x must be interior to the chamber or the origin");
    }
    let (sf, lf) = log_km(KernelTag::A, tt, xs, ys);
    let num = if t == big_t { 1.0 } else { na(big_t - t, ys) };
    Ok(sf * lf.exp() * num / na(big, xs))
}

/// Watermelon density: both ends pinned at the origin, variance σ_T(t)² = t(1−t/T).
pub fn watermelon_density(f: Family, big_t: f64, t: f64, y: &ChamberPoint) -> Result<f64> {
    let f = check_family(f)?;
    if !(t > 0.0 && t < big_t) {
        return domain(format!("need 0 < t < T, got t={t}, T={big_t}"));
    }
    let var = t * (1.0 - t / big_t);
    let n = y.len();
    let spec = match f {
        KernelTag::A => EnsembleSpec::new(EnsembleTag::Gue, n, var),
        KernelTag::C => EnsembleSpec::new(EnsembleTag::ChGue, n, var).with_nu(0.5),
        KernelTag::D => EnsembleSpec::new(EnsembleTag::ChGue, n, var).with_nu(-0.5),
        KernelTag::Bessel(nu) => EnsembleSpec::new(EnsembleTag::ChGue, n, var).with_nu(nu),
    };
    spec.density(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BananaFamily {
    A,
    Bessel { nu: f64, kappa: f64 },
}

/// Rectangular "b" determinant: rows over the 2N coordinates x, columns
/// interleaved as [G(z_j|x_i), ∂-type column] for j = 1..N. The interleaved
/// order is the one produced by merging y_{2j} → y_{2j−1} and keeps the
/// determinant positive.
pub fn log_fb(family: BananaFamily, t: f64, z: &[f64], x: &[f64]) -> (f64, f64) {
    let n2 = x.len();
    assert_eq!(2 * z.len(), n2);
    let mut signs = vec![1.0; n2 * n2];
    let mut logs = vec![0.0; n2 * n2];
    for i in 0..n2 {
        for (j, &zj) in z.iter().enumerate() {
            let (tag, dcol) = match family {
                BananaFamily::A => (KernelTag::A, x[i] / t),
                BananaFamily::Bessel { nu, .. } => (KernelTag::Bessel(nu), bessel_dlog_dy(nu, t, zj, x[i])),
            };
            let g = log_kernel_unchecked(tag, t, zj, x[i]);
            logs[i * n2 + 2 * j] = g;
            if g == f64::NEG_INFINITY {
                signs[i * n2 + 2 * j] = 0.0;
            }
            logs[i * n2 + 2 * j + 1] = g + dcol.abs().ln();
            signs[i * n2 + 2 * j + 1] = if g == f64::NEG_INFINITY { 0.0 } else { dcol.signum() };
        }
    }
    det_from_log_entries(&signs, &logs, n2)
}

/// Normaliser of the banana process: ∫ f^{b}(t, z|x) ∏ z^{−κ} dz over W_N.
pub fn banana_normaliser(family: BananaFamily, t: f64, x: &[f64]) -> Result<f64> {
    let n2 = x.len();
    if n2 % 2 != 0 || n2 == 0 {
        return Err(Error::Spec("banana configurations have an even number of coordinates".into()));
    }
    let n = n2 / 2;
    if n > 3 {
        return Err(Error::UnsupportedDimension(n2));
    }
    let w = t.sqrt();
    Ok(match family {
        BananaFamily::A => {
            let lo = x[0] - tol::TAIL_RADII * w;
            let hi = x[n2 - 1] + tol::TAIL_RADII * w;
            ordered_integral(n, lo, hi, x, w, 1.0, nodes_for(n), |z| {
                let (s, l) = log_fb(family, t, z, x);
                s * l.exp()
            })
        }
        BananaFamily::Bessel { nu, kappa } => {
            let hi = x[n2 - 1] + tol::TAIL_RADII * w;
            let p = power_for_exponent(4.0 * nu + 3.0 - kappa);
            ordered_integral(n, 0.0, hi, x, w, p, nodes_for(n), |z| {
                let (s, l) = log_fb(family, t, z, x);
                s * (l - kappa * z.iter().map(|v| v.ln()).sum::<f64>()).exp()
            })
        }
    })
}

fn pair_degenerate(y: &[f64]) -> Option<Vec<f64>> {
    let scale = y.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let mut odd = Vec::with_capacity(y.len() / 2);
    for p in y.chunks(2) {
        if (p[1] - p[0]).abs() > 1e-12 * scale {
            return None;
        }
        odd.push(p[0]);
    }
    Some(odd)
}

/// Banana-topology density on W_{2N}. At t = T the density is with respect
/// to the distinct (odd-indexed) coordinates; y may then hold either the N
/// distinct values or all 2N pairwise-equal coordinates.
pub fn banana_density(family: BananaFamily, big_t: f64, s: f64, x: &ChamberPoint, t: f64, y: &ChamberPoint) -> Result<f64> {
    let want = match family {
        BananaFamily::A => Chamber::A,
        BananaFamily::Bessel { nu, kappa } => {
            check_meander(nu, kappa)?;
            Chamber::C
        }
    };
    let xs = x.expect(want, want.name())?;
    let ys = y.expect(want, want.name())?;
    check_times(s, t, big_t)?;
    let n2 = xs.len();
    if n2 % 2 != 0 || n2 == 0 {
        return Err(Error::Spec("banana configurations have an even number of coordinates".into()));
    }
    let n = n2 / 2;
    let origin = x.is_origin();
    if !origin && !want.contains(xs) {
        return domain("x must be interior to the chamber or the origin");
    }
    let big = big_t - s;
    let tt = t - s;
    if t == big_t {
        let odd = if ys.len() == n {
            ys.to_vec()
        } else if ys.len() == n2 {
            match pair_degenerate(ys) {
                Some(o) => o,
                None => return Ok(0.0),
            }
        } else {
            return Err(Error::Spec("terminal banana point must have N or 2N coordinates".into()));
        };
        if !want.contains(&odd) {
            return Ok(0.0);
        }
        if origin {
            let spec = match family {
                BananaFamily::A => EnsembleSpec::new(EnsembleTag::Gse, n, big / 2.0),
                BananaFamily::Bessel { nu, kappa } => {
                    EnsembleSpec::new(EnsembleTag::ChGse, n, big / 2.0).with_nu(nu - kappa / 4.0)
                }
            };
            return Ok(log_density_unchecked(&spec, &odd).exp());
        }
        let (sf, lf) = log_fb(family, big, &odd, xs);
        let kap = match family {
            BananaFamily::A => 0.0,
            BananaFamily::Bessel { kappa, .. } => kappa,
        };
        let lk: f64 = odd.iter().map(|v| v.ln()).sum::<f64>() * kap;
        return Ok(sf * (lf - lk).exp() / banana_normaliser(family, big, xs)?);
    }
    if ys.len() != n2 {
        return Err(Error::Spec("banana point before T must have 2N coordinates".into()));
    }
    if !want.contains(ys) {
        return Ok(0.0);
    }
    let tail = banana_normaliser(family, big - tt, ys)?;
    if origin {
        let nf = n as f64;
        let sq = ys.iter().map(|v| v * v).sum::<f64>() / (2.0 * tt);
        let l = match family {
            BananaFamily::A => {
                0.5 * nf * (2.0 * nf + 1.0) * (big / 2.0).ln() - 2.0 * nf * nf * (tt / 2.0).ln()
                    + log_h(HKind::A, ys).1
                    - log_norm_constant(NormConst::CAdoubleprime, n)?
                    - sq
            }
            BananaFamily::Bessel { nu, kappa } => {
                let nup = nu - kappa / 4.0;
                let gam: f64 = (1..=n)
                    .map(|i| lgamma(2.0 * i as f64) + lgamma(2.0 * (i as f64 + nup)))
                    .sum();
                (2.0 * nf * nf + 0.5 * nf * kappa) * big.ln() - 2.0 * nf * (2.0 * nf + nu) * tt.ln()
                    + log_h(HKind::Alpha(2.0 * nu + 1.0), ys).1
                    - gam
                    - sq
            }
        };
        return Ok(l.exp() * tail);
    }
    let tag = match family {
        BananaFamily::A => KernelTag::A,
        BananaFamily::Bessel { nu, .. } => KernelTag::Bessel(nu),
    };
    let (sf, lf) = log_km(tag, tt, xs, ys);
    Ok(sf * lf.exp() * tail / banana_normaliser(family, big, xs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::norm_constant;
    use crate::specfun::{erf, heat_kernel};
    use proptest::prelude::*;

    fn pc(v: &[f64]) -> ChamberPoint {
        ChamberPoint::new(Chamber::C, v.to_vec())
    }
    fn pa(v: &[f64]) -> ChamberPoint {
        ChamberPoint::new(Chamber::A, v.to_vec())
    }

    #[test]
    fn determinant_basics() {
        let v = km_determinant(KernelTag::A, 0.7, &pa(&[0.3]), &pa(&[1.1])).unwrap();
        assert!((v - heat_kernel(KernelTag::A, 0.7, 1.1, 0.3).unwrap()).abs() < 1e-15);
        let a = km_determinant(KernelTag::C, 1.0, &pc(&[0.5, 1.5]), &pc(&[1.0, 2.0])).unwrap();
        let b = km_determinant(KernelTag::C, 1.0, &pc(&[1.5, 0.5]), &pc(&[1.0, 2.0])).unwrap();
        assert_eq!(a, -b);
        let a = km_determinant(KernelTag::A, 1.0, &pa(&[-0.5, 1.5]), &pa(&[-1.0, 2.0])).unwrap();
        let b = km_determinant(KernelTag::A, 1.0, &pa(&[1.5, -0.5]), &pa(&[-1.0, 2.0])).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn half_integer_bessel_determinant_identity() {
        // f^{(1/2)}(t,y|x) = ∏(y_j/x_i) f^C(t,y|x)
        let (x, y) = ([0.5, 1.5], [1.0, 2.0]);
        let b = km_determinant(KernelTag::Bessel(0.5), 1.0, &pc(&x), &pc(&y)).unwrap();
        let c = km_determinant(KernelTag::C, 1.0, &pc(&x), &pc(&y)).unwrap();
        let r = (y[0] * y[1]) / (x[0] * x[1]);
        assert!((b - r * c).abs() < 1e-10 * b.abs());
    }

    #[test]
    fn series_and_direct_routes_agree() {
        // Just below and above the switching threshold.
        for (t, x, y) in [(1.0, [0.3, 0.9], [0.5, 1.3]), (0.8, [0.6, 1.1], [0.4, 1.4])] {
            for f in [KernelTag::C, KernelTag::D, KernelTag::Bessel(1.3), KernelTag::Bessel(-0.4)] {
                let (s1, l1) = log_km(f, t, &x, &y);
                let mut signs = vec![1.0; 4];
                let mut logs = vec![0.0; 4];
                for i in 0..2 {
                    for j in 0..2 {
                        logs[i * 2 + j] = log_kernel_unchecked(f, t, y[j], x[i]);
                        if logs[i * 2 + j] == f64::NEG_INFINITY {
                            signs[i * 2 + j] = 0.0;
                        }
                    }
                }
                let (s2, l2) = det_from_log_entries(&signs, &logs, 2);
                assert_eq!(s1, s2);
                assert!((l1 - l2).abs() < 1e-9, "{f:?}: {l1} vs {l2}");
            }
        }
    }

    #[test]
    fn transition_density_scalar_cases() {
        let q = TransitionQuery { family: KernelTag::A, s: 0.0, t: 2.0, x: pa(&[0.3]), y: pa(&[-0.4]) };
        let g = heat_kernel(KernelTag::A, 2.0, -0.4, 0.3).unwrap();
        assert!((transition_density(&q).unwrap() - g).abs() < 1e-15);
        let q = TransitionQuery { family: KernelTag::Bessel(1.0), s: 0.5, t: 1.5, x: pc(&[0.7]), y: pc(&[1.2]) };
        let g = heat_kernel(KernelTag::Bessel(1.0), 1.0, 1.2, 0.7).unwrap();
        assert!((transition_density(&q).unwrap() - g).abs() < 1e-14);
        let q = TransitionQuery { family: KernelTag::C, s: 0.0, t: 1.0, x: pa(&[0.3]), y: pa(&[0.4]) };
        assert!(matches!(transition_density(&q), Err(Error::ChamberMismatch { .. })));
    }

    #[test]
    fn transition_density_is_conservative() {
        let cases: Vec<(Family, Vec<f64>)> = vec![
            (KernelTag::A, vec![-0.4, 0.3, 1.0]),
            (KernelTag::C, vec![0.4, 0.9]),
            (KernelTag::D, vec![0.2, 0.6, 1.5]),
            (KernelTag::Bessel(1.0), vec![0.5, 1.2]),
            (KernelTag::Bessel(0.3), vec![0.3, 0.8, 1.1]),
        ];
        for (f, x) in cases {
            let n = x.len();
            let t: f64 = 0.8;
            let w = t.sqrt();
            let lo = if f == KernelTag::A { x[0] - 12.0 * w } else { 0.0 };
            let hi = x[n - 1] + 12.0 * w;
            let h = h_for(f);
            let hx = log_h(h, &x).1;
            let p = if let KernelTag::Bessel(nu) = f { power_for_exponent(2.0 * nu + 1.0) } else { 1.0 };
            let m = ordered_integral(n, lo, hi, &x, w, p, 20, |y| {
                let (s, l) = log_km(f, t, &x, y);
                s * (l + log_h(h, y).1 - hx).exp()
            });
            assert!((m - 1.0).abs() < 1e-5, "{f:?}: {m}");
        }
    }

    #[test]
    fn chapman_kolmogorov_class_c() {
        let x = [0.4, 1.1];
        let y = [0.7, 1.6];
        let (s, u, t) = (0.0, 0.5, 1.2);
        let direct = transition_density(&TransitionQuery { family: KernelTag::C, s, t, x: pc(&x), y: pc(&y) }).unwrap();
        let w = (u - s).sqrt().min((t - u).sqrt());
        let via = ordered_integral(2, 0.0, 1.6 + 12.0, &[0.4, 1.1, 0.7, 1.6], w, 1.0, 20, |z| {
            let a = transition_density(&TransitionQuery { family: KernelTag::C, s, t: u, x: pc(&x), y: pc(z) }).unwrap();
            let b = transition_density(&TransitionQuery { family: KernelTag::C, s: u, t, x: pc(z), y: pc(&y) }).unwrap();
            a * b
        });
        assert!((via / direct - 1.0).abs() < 1e-6, "{via} vs {direct}");
    }

    #[test]
    fn noncolliding_probability_examples() {
        assert_eq!(noncoll_probability(KernelTag::A, 1.0, &pa(&[0.3])).unwrap(), 1.0);
        let v = noncoll_probability(KernelTag::C, 1.0, &pc(&[1.0])).unwrap();
        assert!((v - erf(1.0 / 2f64.sqrt())).abs() < 1e-9);
        let v = noncoll_probability(KernelTag::D, 1.3, &pc(&[0.7])).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert!(matches!(
            noncoll_probability(KernelTag::A, 1.0, &pa(&[0.0, 1.0, 2.0, 3.0, 4.0])),
            Err(Error::UnsupportedDimension(5))
        ));
        // Two particles: N^A = erf((x2−x1)/(2√t)).
        let v = noncoll_probability(KernelTag::A, 0.6, &pa(&[-0.2, 0.9])).unwrap();
        assert!((v - erf(1.1 / (2.0 * 0.6f64.sqrt()))).abs() < 1e-8, "{v}");
    }

    #[test]
    fn noncolliding_long_time_asymptotics() {
        let x = [-0.5, 0.2, 1.0];
        let t = 1e4 * 1.0f64.powi(2) * 1.0;
        let v = noncoll_probability(KernelTag::A, t, &pa(&x)).unwrap();
        let ca = norm_constant(NormConst::CA, 3).unwrap();
        let cap = norm_constant(NormConst::CAprime, 3).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v / t.sqrt()).collect();
        let lead = cap / ca * crate::ensembles::h_values(HKind::A, &xs);
        assert!((v / lead - 1.0).abs() < 0.02, "{}", v / lead);
    }

    #[test]
    fn meander_weight_examples() {
        let ms = MeanderSpec::new(0.5, 0.0, 2.0).unwrap();
        assert_eq!(meander_weight(&ms, 0.3, 1.7).unwrap(), 1.0);
        let ms = MeanderSpec::new(0.5, 1.0, 2.0).unwrap();
        assert!((meander_weight(&ms, 2.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        // Under G^{(1/2)}, E[1/Z] = erf(x/√(2τ))/x.
        let v = meander_weight(&ms, 1.0, 1.0).unwrap();
        assert!((v - erf(1.0 / 2f64.sqrt())).abs() < 1e-10, "{v}");
        // Monte Carlo of the same expectation.
        let mut rng = stream(11, &[1]);
        let xs: Vec<f64> = (0..1_000_000).map(|_| 1.0 / bessel_radial(&mut rng, 0.5, 1.0, 1.0)).collect();
        let e = MCEstimate::from_samples(&xs);
        assert!(e.zscore(v).abs() < 3.0, "{e:?} vs {v}");
        assert!(MeanderSpec::new(0.5, 3.0, 1.0).is_err());
    }

    #[test]
    fn meander_weight_near_origin_matches_closed_form() {
        for (nu, kappa) in [(0.5, 1.0), (1.0, 2.0), (-0.5, 0.4), (2.0, 5.5)] {
            let a = meander_1d(nu, kappa, 0.9, 1e-7);
            let b = meander_1d(nu, kappa, 0.9, 0.0);
            assert!((a / b - 1.0).abs() < 1e-7, "({nu},{kappa}): {a} vs {b}");
        }
    }

    #[test]
    fn ntilde_special_cases() {
        // (1/2, 1): Ñ ∏x = N^C
        let x = [0.4, 1.1];
        let ms = MeanderSpec::new(0.5, 1.0, 1.0).unwrap();
        let nt = ntilde(&ms, 0.9, &pc(&x)).unwrap();
        let nc = noncoll_probability(KernelTag::C, 0.9, &pc(&x)).unwrap();
        assert!((nt * x[0] * x[1] / nc - 1.0).abs() < 1e-5, "{} vs {nc}", nt * x[0] * x[1]);
        // (−1/2, 0): Ñ = N^D
        let ms = MeanderSpec::new(-0.5, 0.0, 1.0).unwrap();
        let nt = ntilde(&ms, 0.9, &pc(&x)).unwrap();
        let nd = noncoll_probability(KernelTag::D, 0.9, &pc(&x)).unwrap();
        assert!((nt / nd - 1.0).abs() < 1e-6);
        let ms = MeanderSpec::new(2.0, 0.0, 1.0).unwrap();
        assert!((ntilde(&ms, 0.9, &pc(&[0.8])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ntilde_small_x_asymptotics() {
        for (nu, kappa) in [(0.5, 1.0), (1.0, 0.0), (0.0, 1.5)] {
            let ms = MeanderSpec::new(nu, kappa, 1.0).unwrap();
            let t: f64 = 1.3;
            let x = [0.4e-2 * t.sqrt(), 1.0e-2 * t.sqrt()];
            let nt = ntilde(&ms, t, &pc(&x)).unwrap();
            let cn = norm_constant(NormConst::CNu(nu), 2).unwrap();
            let cnk = norm_constant(NormConst::CNuKappa(nu, kappa), 2).unwrap();
            let lead = t.powf(-kappa) * cnk / cn * ((x[1] * x[1] - x[0] * x[0]) / t);
            assert!((nt / lead - 1.0).abs() < 0.02, "({nu},{kappa}): {}", nt / lead);
        }
    }

    #[test]
    fn ntilde_product_branch_and_mc() {
        let ms = MeanderSpec::new(0.5, 1.0, 1.0).unwrap();
        let x = [1.0, 2.0];
        let tau = 1e-4;
        let prod = ntilde(&ms, tau, &pc(&x)).unwrap();
        let quad = ordered_integral(2, 0.0, 2.0 + 12.0 * tau.sqrt(), &x, tau.sqrt(), 1.0, 20, |y| {
            let (s, l) = log_km(KernelTag::Bessel(0.5), tau, &x, y);
            s * (l - y[0].ln() - y[1].ln()).exp()
        });
        assert!((prod / quad - 1.0).abs() < 1e-8);
        let x = [0.5, 1.2];
        let q = ntilde(&ms, 0.5, &pc(&x)).unwrap();
        let mc = ntilde_mc(&ms, 0.5, &pc(&x), 200_000, 5).unwrap();
        assert!(mc.zscore(q).abs() < 4.0, "{mc:?} vs {q}");
    }

    #[test]
    fn star_origin_limit_and_normalisation_1d() {
        for (nu, kappa) in [(0.5, 1.0), (1.0, 2.0), (-0.5, 0.0), (1.0, 0.0)] {
            let ms = MeanderSpec::new(nu, kappa, 1.0).unwrap();
            for t in [0.3, 0.8, 1.0] {
                let m = crate::quad::integrate_adaptive(
                    |y| star_density(&ms, 0.0, &pc(&[0.0]), t, &pc(&[y])).unwrap(),
                    0.0,
                    12.0,
                    1e-9,
                    0.0,
                );
                assert!((m - 1.0).abs() < 1e-6, "({nu},{kappa}) t={t}: {m}");
            }
        }
    }

    #[test]
    fn star_final_time_chgoe() {
        for nu in [0.0, 1.0, 2.0] {
            let ms = MeanderSpec::new(nu, nu + 1.0, 1.7).unwrap();
            let y = pc(&[0.4, 1.3]);
            let a = star_density(&ms, 0.0, &ChamberPoint::origin(Chamber::C, 2), 1.7, &y).unwrap();
            let b = EnsembleSpec::new(EnsembleTag::ChGoe, 2, 1.7).with_nu(nu).density(&y).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn watermelon_examples() {
        let y = pa(&[-0.3, 0.5]);
        let a = watermelon_density(KernelTag::A, 2.0, 1.0, &y).unwrap();
        let b = EnsembleSpec::new(EnsembleTag::Gue, 2, 0.5).density(&y).unwrap();
        assert!((a - b).abs() < 1e-15);
        let y = pc(&[0.3, 0.5]);
        let a = watermelon_density(KernelTag::Bessel(0.5), 2.0, 0.4, &y).unwrap();
        let b = watermelon_density(KernelTag::Bessel(0.5), 2.0, 1.6, &y).unwrap();
        let c = EnsembleSpec::new(EnsembleTag::C, 2, 0.4 * 0.8).density(&y).unwrap();
        assert!((a - b).abs() < 1e-14 && (a - c).abs() < 1e-12 * c);
    }

    #[test]
    fn banana_scalar_pair_normalisation() {
        // N = 1 pair from the origin: ∫_{y1<y2} g dy = 1 for t < T.
        let fams = [
            BananaFamily::A,
            BananaFamily::Bessel { nu: 0.5, kappa: 0.0 },
            BananaFamily::Bessel { nu: -0.5, kappa: 0.0 },
            BananaFamily::Bessel { nu: 0.5, kappa: 1.0 },
            BananaFamily::Bessel { nu: 1.0, kappa: 2.0 },
        ];
        for fam in fams {
            let (ch, lo) = if fam == BananaFamily::A { (Chamber::A, -9.0) } else { (Chamber::C, 0.0) };
            let origin = ChamberPoint::origin(ch, 2);
            for t in [0.5, 0.9] {
                let grid = OrderedGrid::new(lo, 9.0).nodes(20, 8).first_power(if lo == 0.0 { 2.0 } else { 1.0 });
                let m = integrate_ordered(2, &grid, |y| {
                    banana_density(fam, 1.0, 0.0, &origin, t, &ChamberPoint::new(ch, y.to_vec())).unwrap()
                });
                assert!((m - 1.0).abs() < 1e-4, "{fam:?} t={t}: {m}");
            }
        }
    }

    #[test]
    fn banana_final_time_cases() {
        let origin = ChamberPoint::origin(Chamber::A, 4);
        let y = pa(&[-0.5, -0.5, 0.7, 0.7]);
        let v = banana_density(BananaFamily::A, 2.0, 0.0, &origin, 2.0, &y).unwrap();
        let q = EnsembleSpec::new(EnsembleTag::Gse, 2, 1.0).density(&pa(&[-0.5, 0.7])).unwrap();
        assert!((v - q).abs() < 1e-14);
        let y = pa(&[-0.5, -0.4, 0.7, 0.7]);
        assert_eq!(banana_density(BananaFamily::A, 2.0, 0.0, &origin, 2.0, &y).unwrap(), 0.0);
        let origin = ChamberPoint::origin(Chamber::C, 4);
        let y = pc(&[0.3, 1.2]);
        let v = banana_density(BananaFamily::Bessel { nu: -0.5, kappa: 0.0 }, 2.0, 0.0, &origin, 2.0, &y).unwrap();
        let q = EnsembleSpec::new(EnsembleTag::Diii, 2, 1.0).density(&y).unwrap();
        assert!((v - q).abs() < 1e-14);
        let v = banana_density(BananaFamily::Bessel { nu: 1.0, kappa: 0.0 }, 2.0, 0.0, &origin, 2.0, &y).unwrap();
        let q = EnsembleSpec::new(EnsembleTag::ChGse, 2, 1.0).with_nu(1.0).density(&y).unwrap();
        assert!((v - q).abs() < 1e-14);
    }

    #[test]
    fn banana_derivative_columns_match_finite_differences() {
        let x = [0.3, 0.8, 1.4, 2.0];
        let z = [0.6, 1.7];
        for fam in [BananaFamily::Bessel { nu: 0.7, kappa: 0.5 }, BananaFamily::A] {
            let (s, l) = log_fb(fam, 0.6, &z, &x);
            let tag = match fam {
                BananaFamily::A => KernelTag::A,
                BananaFamily::Bessel { nu, .. } => KernelTag::Bessel(nu),
            };
            let mut m = vec![0.0; 16];
            for i in 0..4 {
                for j in 0..2 {
                    let g = |zz: f64| log_kernel_unchecked(tag, 0.6, zz, x[i]).exp();
                    let h = 1e-5 * z[j];
                    m[i * 4 + 2 * j] = g(z[j]);
                    let d = (g(z[j] + h) - g(z[j] - h)) / (2.0 * h);
                    m[i * 4 + 2 * j + 1] = if fam == BananaFamily::A { d + z[j] / 0.6 * g(z[j]) } else { d };
                }
            }
            let fd = crate::linalg::det_real(&m, 4);
            assert!((fd / (s * l.exp()) - 1.0).abs() < 1e-5, "{fam:?}");
        }
    }

    proptest! {
        #[test]
        fn a_family_translation_invariance(c in -2.0f64..2.0, a in -1.0f64..1.0, d in 0.1f64..1.5, b in -1.0f64..1.0, e in 0.1f64..1.5) {
            let x = [a, a + d];
            let y = [b, b + e];
            let (s1, l1) = log_km(KernelTag::A, 0.9, &[x[0] + c, x[1] + c], &y);
            let (s2, l2) = log_km(KernelTag::A, 0.9, &x, &[y[0] - c, y[1] - c]);
            prop_assert_eq!(s1, s2);
            prop_assert!((l1 - l2).abs() < 1e-9);
        }

        #[test]
        fn half_integer_transition_identities(x1 in 0.05f64..2.0, dx in 0.05f64..2.0, y1 in 0.05f64..2.0, dy in 0.05f64..2.0, t in 0.1f64..3.0) {
            let x = pc(&[x1, x1 + dx]);
            let y = pc(&[y1, y1 + dy]);
            for (nu, tag) in [(0.5, KernelTag::C), (-0.5, KernelTag::D)] {
                let a = log_transition_density(&TransitionQuery { family: KernelTag::Bessel(nu), s: 0.0, t, x: x.clone(), y: y.clone() }).unwrap();
                let b = log_transition_density(&TransitionQuery { family: tag, s: 0.0, t, x: x.clone(), y: y.clone() }).unwrap();
                prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
            }
        }
    }
}
