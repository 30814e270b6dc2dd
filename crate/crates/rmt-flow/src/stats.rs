//! Goodness-of-fit tests of simulated samples against analytic densities.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::ensembles::{log_h, log_norm_constant, Chamber, ChamberPoint, EnsembleSpec, EnsembleTag, HKind, NormConst};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate_ordered, OrderedGrid};

pub const MIN_KS_SAMPLES: usize = 20;
pub const MIN_EXPECTED: f64 = 5.0;
/// Group size for the weighted χ². Smaller groups make the estimated cell
/// covariance too noisy and the statistic rejects far too often.
pub const MIN_WEIGHTED_GROUP: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    pub points: Vec<ChamberPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl EmpiricalSample {
    pub fn new(points: Vec<ChamberPoint>) -> Self {
        Self { points, weights: None }
    }

    pub fn weighted(points: Vec<ChamberPoint>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::Spec("one weight per point is required".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Spec("weights must be finite and positive".into()));
        }
        Ok(Self { points, weights: Some(weights) })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Kish effective sample size (Σw)²/Σw²; n when unweighted.
    pub fn effective_size(&self) -> f64 {
        match &self.weights {
            None => self.points.len() as f64,
            Some(w) => kish(w),
        }
    }

    /// The k-th coordinate of every point, with the weights.
    pub fn coordinate(&self, k: usize) -> (Vec<f64>, Option<Vec<f64>>) {
        (self.points.iter().map(|p| p.coords()[k]).collect(), self.weights.clone())
    }
}

pub fn kish(w: &[f64]) -> f64 {
    let s: f64 = w.iter().sum();
    let s2: f64 = w.iter().map(|v| v * v).sum();
    s * s / s2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub pvalue: f64,
    pub n: f64,
}

/// Asymptotic Kolmogorov tail P(K > λ).
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn ks_pvalue(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)
}

/// Two-sided one-sample KS test against `cdf`, asymptotic p-value.
pub fn ks_test(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    ks_weighted(sample, None, cdf)
}

/// KS test of a weighted empirical distribution; the p-value uses the Kish
/// effective size in place of n.
pub fn ks_weighted(sample: &[f64], weights: Option<&[f64]>, cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let n = sample.len();
    if n < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_KS_SAMPLES, got: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|a, b| sample[*a].total_cmp(&sample[*b]));
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..n).map(w).sum();
    let mut acc = 0.0;
    let mut d = 0.0f64;
    let mut k = 0;
    while k < n {
        // Ties advance together.
        let v = sample[idx[k]];
        let before = acc / total;
        while k < n && sample[idx[k]] == v {
            acc += w(idx[k]);
            k += 1;
        }
        let after = acc / total;
        let f = cdf(v);
        d = d.max((f - before).abs()).max((after - f).abs());
    }
    let ne = weights.map_or(n as f64, kish);
    Ok(KsResult { statistic: d, pvalue: ks_pvalue(d, ne), n: ne })
}

/// Two-sample KS test; `n` in the result is the effective size nm/(n+m).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < MIN_KS_SAMPLES {
            return Err(Error::TooFewSamples { needed: MIN_KS_SAMPLES, got: s.len() });
        }
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok(KsResult { statistic: d, pvalue: ks_pvalue(d, ne), n: ne })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chi2Result {
    pub statistic: f64,
    pub dof: usize,
    pub pvalue: f64,
}

/// Pearson χ² on a regular grid of `bins` cells per axis over the sample's
/// central box, intersected with the ordered chamber. Expected counts are
/// quadratures of `density` over each cell; cells are merged in grid order
/// until each expected count (at the Kish effective size) reaches 5, and the
/// mass outside the box forms one more cell. Unweighted samples use Pearson's
/// statistic; weighted samples a Wald statistic on the weighted cell
/// fractions, whose covariance accounts for the spread of the weights.
/// Supports N ≤ 2.
pub fn chamber_chi2(sample: &EmpiricalSample, density: impl Fn(&[f64]) -> f64 + Sync, bins: usize) -> Result<Chi2Result> {
    if sample.is_empty() {
        return Err(Error::TooFewSamples { needed: MIN_KS_SAMPLES, got: 0 });
    }
    let dim = sample.points[0].len();
    let chamber = sample.points[0].chamber();
    if dim == 0 || dim > 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if bins == 0 {
        return Err(Error::Spec("need at least one bin per axis".into()));
    }
    // The box spans the 0.1% to 99.9% quantiles of all coordinates (from 0
    // on chamber C), so that a handful of outliers cannot stretch the bins.
    let mut all: Vec<f64> = sample.points.iter().flat_map(|p| p.coords().iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let q = |f: f64| all[((all.len() - 1) as f64 * f).round() as usize];
    let lo = if chamber == Chamber::C { 0.0 } else { q(1e-3) };
    let hi = q(1.0 - 1e-3);
    if !(hi > lo) {
        return Err(Error::Spec("sample has no spread".into()));
    }
    let width = (hi - lo) / bins as f64;
    let cell_of = |v: f64| -> Option<usize> {
        if v < lo || v >= hi {
            None
        } else {
            Some((((v - lo) / width).floor() as usize).min(bins - 1))
        }
    };

    let cells = if dim == 1 { bins } else { bins * bins };
    // Cell of each point; `cells` stands for the outside of the box.
    let cell: Vec<usize> = sample
        .points
        .iter()
        .map(|p| {
            let c = p.coords();
            let k = if dim == 1 {
                cell_of(c[0])
            } else {
                cell_of(c[0]).zip(cell_of(c[1])).map(|(a, b)| a * bins + b)
            };
            k.unwrap_or(cells)
        })
        .collect();

    let (gx, gw) = gauss_legendre(10);
    let rule = |a: f64, b: f64| -> Vec<(f64, f64)> {
        gx.iter().zip(&gw).map(|(x, w)| (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w)).collect()
    };
    let mut prob = vec![0.0; cells];
    if dim == 1 {
        for (k, pk) in prob.iter_mut().enumerate() {
            let a = lo + k as f64 * width;
            *pk = rule(a, a + width).iter().map(|(y, w)| w * density(&[*y])).sum();
        }
    } else {
        let mut y = [0.0; 2];
        for a in 0..bins {
            for b in a..bins {
                let (a0, a1) = (lo + a as f64 * width, lo + (a + 1) as f64 * width);
                let (b0, b1) = (lo + b as f64 * width, lo + (b + 1) as f64 * width);
                let mut s = 0.0;
                for (y0, w0) in rule(a0, a1) {
                    let start = b0.max(y0);
                    if start >= b1 {
                        continue;
                    }
                    for (y1, w1) in rule(start, b1) {
                        y[0] = y0;
                        y[1] = y1;
                        s += w0 * w1 * density(&y);
                    }
                }
                prob[a * bins + b] = s;
            }
        }
    }
    let inside: f64 = prob.iter().sum();
    prob.push((1.0 - inside).max(0.0));
    // Cells below the diagonal cannot hold ordered points; they stay out of
    // every group.
    let usable = |k: usize| dim == 1 || k == cells || k / bins <= k % bins;

    // Merge cells in grid order until each group expects MIN_EXPECTED points.
    // A weighted group must expect and hold MIN_WEIGHTED_GROUP actual points,
    // since its variance is estimated from the weights that land in it.
    let n_eff = sample.effective_size();
    let weighted = sample.weights.is_some();
    let floor = if weighted { MIN_WEIGHTED_GROUP } else { MIN_EXPECTED };
    let mut count = vec![0usize; cells + 1];
    for k in &cell {
        count[*k] += 1;
    }
    let mut group_of = vec![usize::MAX; cells + 1];
    let mut probs: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    let mut held = 0usize;
    let mut members: Vec<usize> = Vec::new();
    for k in (0..=cells).filter(|k| usable(*k)) {
        acc += prob[k];
        held += count[k];
        members.push(k);
        if acc * n_eff >= floor && (!weighted || held as f64 >= floor) {
            held = 0;
            for m in members.drain(..) {
                group_of[m] = probs.len();
            }
            probs.push(acc);
            acc = 0.0;
        }
    }
    if probs.is_empty() {
        return Err(Error::TooFewSamples { needed: 2 * MIN_EXPECTED as usize, got: sample.len() });
    }
    let last = probs.len() - 1;
    probs[last] += acc;
    for m in members {
        group_of[m] = last;
    }
    let g = probs.len();
    if g < 2 {
        return Err(Error::TooFewSamples { needed: 2 * MIN_EXPECTED as usize, got: sample.len() });
    }

    let mut w1 = vec![0.0; g];
    let mut w2 = vec![0.0; g];
    for (i, k) in cell.iter().enumerate() {
        let w = sample.weight(i);
        let gi = group_of[*k];
        if gi == usize::MAX {
            continue;
        }
        w1[gi] += w;
        w2[gi] += w * w;
    }
    let total: f64 = w1.iter().sum();
    let stat = if !weighted {
        let n = total;
        w1.iter().zip(&probs).map(|(o, p)| (o - n * p) * (o - n * p) / (n * p)).sum()
    } else {
        weighted_wald(&w1, &w2, &probs)?
    };
    let dof = g - 1;
    let pvalue = 1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat);
    Ok(Chi2Result { statistic: stat, dof, pvalue })
}

/// Wald statistic for weighted cell fractions p̂_a = W_a/W against cell
/// probabilities p, with the linearised covariance
/// Σ_ab = (δ_ab V_a − p_b V_a − p_a V_b + p_a p_b V)/W², V_a = Σ_{i∈a} w_i².
/// With equal weights this is Neyman's χ². The last cell is dropped.
fn weighted_wald(w1: &[f64], w2: &[f64], p: &[f64]) -> Result<f64> {
    let k = p.len() - 1;
    let total: f64 = w1.iter().sum();
    let v: f64 = w2.iter().sum();
    let d: Vec<f64> = (0..k).map(|a| w1[a] / total - p[a]).collect();
    let mut m = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let delta = if a == b { w2[a] } else { 0.0 };
            m[a * k + b] = (delta - p[b] * w2[a] - p[a] * w2[b] + p[a] * p[b] * v) / (total * total);
        }
    }
    // Cholesky factorisation M = LLᵀ, then |L⁻¹d|².
    for j in 0..k {
        let mut diag = m[j * k + j];
        for r in 0..j {
            diag -= m[j * k + r] * m[j * k + r];
        }
        if !(diag > 0.0) {
            return Err(Error::Spec("weighted cell covariance is singular".into()));
        }
        let l = diag.sqrt();
        m[j * k + j] = l;
        for i in j + 1..k {
            let mut s = m[i * k + j];
            for r in 0..j {
                s -= m[i * k + r] * m[j * k + r];
            }
            m[i * k + j] = s / l;
        }
    }
    let mut z = vec![0.0; k];
    for i in 0..k {
        let mut s = d[i];
        for r in 0..i {
            s -= m[i * k + r] * z[r];
        }
        z[i] = s / m[i * k + i];
    }
    Ok(z.iter().map(|v| v * v).sum())
}

/// Radon–Nikodym weights C_ν T^{N(N+κ−1)/2}/(C_{ν,κ} h^{(κ)}(w)) turning
/// terminal samples of the noncolliding Bessel process into samples of the
/// meander-type process at its final time.
pub fn imhof_reweight(points: &[ChamberPoint], nu: f64, kappa: f64, big_t: f64) -> Result<EmpiricalSample> {
    if points.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let n = points[0].len();
    let nf = n as f64;
    let lc = log_norm_constant(NormConst::CNu(nu), n)? - log_norm_constant(NormConst::CNuKappa(nu, kappa), n)?
        + 0.5 * nf * (nf + kappa - 1.0) * big_t.ln();
    let mut w = Vec::with_capacity(points.len());
    for p in points {
        let xs = p.expect(Chamber::C, "C")?;
        if let Some(bad) = xs.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::ZeroWeight(*bad));
        }
        let (_, lh) = log_h(HKind::Alpha(kappa), xs);
        w.push((lc - lh).exp());
    }
    EmpiricalSample::weighted(points.to_vec(), w)
}

/// The free-particle analogue C[A]T^{ψ[A]}/(C[A′] h^A(w)).
pub fn imhof_reweight_a(points: &[ChamberPoint], big_t: f64) -> Result<EmpiricalSample> {
    if points.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let n = points[0].len();
    let psi = crate::ensembles::exponent_psi(Chamber::A, n).value();
    let lc = log_norm_constant(NormConst::CA, n)? - log_norm_constant(NormConst::CAprime, n)? + psi * big_t.ln();
    let mut w = Vec::with_capacity(points.len());
    for p in points {
        let xs = p.expect(Chamber::A, "A")?;
        let (s, lh) = log_h(HKind::A, xs);
        if !(s > 0.0) {
            return Err(Error::ZeroWeight(0.0));
        }
        w.push((lc - lh).exp());
    }
    EmpiricalSample::weighted(points.to_vec(), w)
}

/// Tabulated CDF of the largest coordinate under a density on the ordered
/// chamber. The marginal density of the top coordinate is an
/// (N−1)-dimensional ordered integral; the CDF accumulates it with a
/// Gauss–Legendre rule on each of `intervals` cells and interpolates
/// by cubic Hermite polynomials inside a cell.
#[derive(Clone, Debug)]
pub struct MaxCdf {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    pub total: f64,
}

impl MaxCdf {
    pub fn new(n: usize, lo: f64, hi: f64, intervals: usize, density: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let (gx, gw) = gauss_legendre(8);
        let h = (hi - lo) / intervals as f64;
        let marginal = |s: f64| -> f64 {
            if n == 1 {
                return density(&[s]);
            }
            let grid = OrderedGrid::new(lo, s).nodes(16, 2);
            integrate_ordered(n - 1, &grid, |y| {
                let mut full = y.to_vec();
                full.push(s);
                density(&full)
            })
        };
        let mut values = Vec::with_capacity(intervals + 1);
        let slopes: Vec<f64> = (0..=intervals).map(|k| marginal(lo + k as f64 * h)).collect();
        values.push(0.0);
        let mut acc = 0.0;
        for k in 0..intervals {
            let a = lo + k as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                acc += 0.5 * h * w * marginal(a + 0.5 * h * (x + 1.0));
            }
            values.push(acc);
        }
        Self { lo, hi, values, slopes, total: acc }
    }

    /// Table for the largest coordinate of a Gaussian ensemble.
    pub fn for_ensemble(spec: &EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let c = spec.tag.chamber();
        let n = spec.n;
        let dim = match spec.tag {
            EnsembleTag::Gue | EnsembleTag::Goe => n,
            EnsembleTag::Gse => 2 * n,
            _ => 4 * n,
        } as f64;
        let r = spec.t.sqrt() * (3.0 * (dim + spec.nu.abs()).sqrt() + 8.0);
        let lo = if c == Chamber::A { -r } else { 0.0 };
        let spec = spec.clone();
        Ok(Self::new(n, lo, r, 400, move |y| {
            if !c.contains(y) {
                return 0.0;
            }
            crate::ensembles::log_density_unchecked(&spec, y).exp()
        }))
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= self.lo {
            return 0.0;
        }
        if s >= self.hi {
            return self.total.min(1.0);
        }
        let m = self.values.len() - 1;
        let u = (s - self.lo) / (self.hi - self.lo) * m as f64;
        let k = (u.floor() as usize).min(m - 1);
        let f = u - k as f64;
        // Cubic Hermite interpolation with the marginal density as slope.
        let h = (self.hi - self.lo) / m as f64;
        let (f2, f3) = (f * f, f * f * f);
        let v = (2.0 * f3 - 3.0 * f2 + 1.0) * self.values[k]
            + (f3 - 2.0 * f2 + f) * h * self.slopes[k]
            + (-2.0 * f3 + 3.0 * f2) * self.values[k + 1]
            + (f3 - f2) * h * self.slopes[k + 1];
        v.clamp(0.0, 1.0)
    }
}

/// Machine-readable outcome of one statistical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub n: usize,
    pub statistic: f64,
    pub pvalue: f64,
    pub pass: bool,
}

impl TestReport {
    pub fn from_ks(test: impl Into<String>, n: usize, r: &KsResult, alpha: f64) -> Self {
        Self { test: test.into(), n, statistic: r.statistic, pvalue: r.pvalue, pass: r.pvalue > alpha }
    }

    pub fn from_chi2(test: impl Into<String>, n: usize, r: &Chi2Result, alpha: f64) -> Self {
        Self { test: test.into(), n, statistic: r.statistic, pvalue: r.pvalue, pass: r.pvalue > alpha }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{normal, stream};
    use crate::specfun::normal_cdf;

    fn normals(seed: u64, n: usize, sd: f64) -> Vec<f64> {
        let mut rng = stream(seed, &[]);
        (0..n).map(|_| sd * normal(&mut rng)).collect()
    }

    #[test]
    fn ks_size_is_nominal() {
        let rejections = (0..1000u64)
            .filter(|s| ks_test(&normals(*s, 2000, 1.0), normal_cdf).unwrap().pvalue < 0.05)
            .count();
        assert!((30..=70).contains(&rejections), "{rejections}");
    }

    #[test]
    fn ks_degenerate_and_power() {
        let r = ks_test(&[0.0; 50], normal_cdf).unwrap();
        assert!(r.statistic >= 0.5);
        let r = ks_test(&normals(1, 10_000, 1.0), |x| normal_cdf(x / 2f64.sqrt())).unwrap();
        assert!(r.pvalue < 1e-6);
        assert!(matches!(ks_test(&[0.0; 5], normal_cdf), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn two_sample_ks_size_and_power() {
        let rejections = (0..400u64)
            .filter(|s| ks_two_sample(&normals(2 * s, 1500, 1.0), &normals(2 * s + 1, 1000, 1.0)).unwrap().pvalue < 0.05)
            .count();
        assert!((8..=35).contains(&rejections), "{rejections}");
        let r = ks_two_sample(&normals(3, 5000, 1.0), &normals(4, 5000, 1.2)).unwrap();
        assert!(r.pvalue < 1e-4);
        assert!((r.n - 2500.0).abs() < 1e-9);
        let same = normals(5, 100, 1.0);
        assert_eq!(ks_two_sample(&same, &same).unwrap().statistic, 0.0);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Known quantiles of the Kolmogorov distribution.
        assert!((kolmogorov_tail(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_tail(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn weighted_ks_with_unit_weights_matches() {
        let x = normals(3, 500, 1.0);
        let a = ks_test(&x, normal_cdf).unwrap();
        let b = ks_weighted(&x, Some(&vec![1.0; 500]), normal_cdf).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-15 && (a.pvalue - b.pvalue).abs() < 1e-12);
    }

    fn gue2(seed: u64, n: usize, t: f64) -> Vec<ChamberPoint> {
        let mut rng = stream(seed, &[1]);
        (0..n)
            .map(|_| {
                let ev = crate::sde::beta_hermite(&mut rng, 2.0, 2).unwrap();
                ChamberPoint::new(Chamber::A, ev.iter().map(|v| v * t.sqrt()).collect())
            })
            .collect()
    }

    #[test]
    fn chi2_self_consistency_and_power() {
        let spec = EnsembleSpec::new(EnsembleTag::Gue, 2, 1.0);
        let dens = |y: &[f64]| spec.density(&ChamberPoint::new(Chamber::A, y.to_vec())).unwrap();
        let mut passes = 0;
        for s in 0..40 {
            let r = chamber_chi2(&EmpiricalSample::new(gue2(s, 2000, 1.0)), dens, 8).unwrap();
            if r.pvalue > 0.01 {
                passes += 1;
            }
        }
        assert!(passes >= 37, "{passes}/40");
        // GOE sample against the GUE density.
        let mut rng = stream(5, &[]);
        let goe: Vec<ChamberPoint> = (0..10_000)
            .map(|_| ChamberPoint::new(Chamber::A, crate::sde::beta_hermite(&mut rng, 1.0, 2).unwrap()))
            .collect();
        let r = chamber_chi2(&EmpiricalSample::new(goe), dens, 8).unwrap();
        assert!(r.pvalue < 1e-4);
    }

    #[test]
    fn chi2_weighted_ignores_weight_scale() {
        let pts = gue2(9, 3000, 1.0);
        let spec = EnsembleSpec::new(EnsembleTag::Gue, 2, 1.0);
        let dens = |y: &[f64]| spec.density(&ChamberPoint::new(Chamber::A, y.to_vec())).unwrap();
        let a = chamber_chi2(&EmpiricalSample::weighted(pts.clone(), vec![1.0; 3000]).unwrap(), dens, 6).unwrap();
        let b = chamber_chi2(&EmpiricalSample::weighted(pts, vec![3.5; 3000]).unwrap(), dens, 6).unwrap();
        assert_eq!(a.dof, b.dof);
        assert!((a.statistic - b.statistic).abs() < 1e-9 * a.statistic);
    }

    #[test]
    fn chi2_weighted_tilted_normal() {
        // Standard normal points tilted by e^{ax − a²/2} follow N(a, 1).
        let a = 0.7;
        let target = |y: &[f64]| (-(y[0] - a) * (y[0] - a) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let sample = |seed: u64| {
            let mut rng = stream(seed, &[]);
            let xs: Vec<f64> = (0..10_000).map(|_| normal(&mut rng)).collect();
            let w = xs.iter().map(|x| (a * x - a * a / 2.0).exp()).collect();
            EmpiricalSample::weighted(xs.into_iter().map(|x| ChamberPoint::new(Chamber::A, vec![x])).collect(), w).unwrap()
        };
        let passes = (0..20).filter(|s| chamber_chi2(&sample(*s), target, 30).unwrap().pvalue > 0.01).count();
        assert!(passes >= 18, "{passes}/20");
        let wrong = |y: &[f64]| target(&[y[0] - 0.1]);
        assert!(chamber_chi2(&sample(99), wrong, 30).unwrap().pvalue < 1e-3);
    }

    #[test]
    fn max_cdf_of_gue_pair() {
        let spec = EnsembleSpec::new(EnsembleTag::Gue, 2, 1.0);
        let tab = MaxCdf::for_ensemble(&spec).unwrap();
        assert!((tab.total - 1.0).abs() < 1e-8);
        let x: Vec<f64> = gue2(11, 10_000, 1.0).iter().map(|p| p.coords()[1]).collect();
        assert!(ks_test(&x, |s| tab.cdf(s)).unwrap().pvalue > 0.01);
        let tab = MaxCdf::for_ensemble(&EnsembleSpec::new(EnsembleTag::Gue, 1, 2.0)).unwrap();
        assert!((tab.cdf(0.7) - normal_cdf(0.7 / 2f64.sqrt())).abs() < 1e-7);
    }

    #[test]
    fn imhof_weights() {
        // κ = 0 at N = 1 is a constant weight of 1.
        let pts: Vec<ChamberPoint> = (1..30).map(|k| ChamberPoint::new(Chamber::C, vec![0.1 * k as f64])).collect();
        let s = imhof_reweight(&pts, -0.5, 0.0, 2.0).unwrap();
        assert!(s.weights.unwrap().iter().all(|w| (w - 1.0).abs() < 1e-12));
        let bad = vec![ChamberPoint::new(Chamber::C, vec![0.0])];
        assert!(matches!(imhof_reweight(&bad, 0.5, 1.0, 1.0), Err(Error::ZeroWeight(_))));
        // Weights integrate to one against the source density.
        let mut rng = stream(2, &[]);
        let t = 1.5;
        let pts: Vec<ChamberPoint> = (0..50_000)
            .map(|_| ChamberPoint::new(Chamber::C, vec![crate::rng::bessel_radial(&mut rng, 0.5, t, 0.0)]))
            .collect();
        let s = imhof_reweight(&pts, 0.5, 1.0, t).unwrap();
        let w = s.weights.clone().unwrap();
        let e = crate::rng::MCEstimate::from_samples(&w);
        assert!(e.zscore(1.0).abs() < 3.0);
        assert!(s.effective_size() > 0.1 * s.len() as f64);
    }

    #[test]
    fn report_serialises() {
        let r = TestReport { test: "ks".into(), n: 10, statistic: 0.1, pvalue: 0.5, pass: true };
        let j = serde_json::to_string(&r).unwrap();
        assert!(j.contains("\"pvalue\":0.5"));
    }
}
