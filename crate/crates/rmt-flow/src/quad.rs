//! Quadrature: Gauss-Legendre rules, adaptive Gauss-Kronrod on intervals and
//! iterated integration over ordered regions lo ≤ y_1 < y_2 < … < y_N ≤ hi.

use rayon::prelude::*;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn gl_cached(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static G16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static G32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static G64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        16 => G16.get_or_init(|| gauss_legendre(16)),
        32 => G32.get_or_init(|| gauss_legendre(32)),
        64 => G64.get_or_init(|| gauss_legendre(64)),
        _ => Box::leak(Box::new(gauss_legendre(n))),
    }
}

/// Fixed-order Gauss-Legendre on [a, b].
pub fn gl_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gl_cached(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    x.iter().zip(w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64, abs: f64) -> f64 {
    integrate_adaptive_with_breaks(f, &[a, b], rel, abs)
}

/// Adaptive quadrature over consecutive panels `breaks[i]..breaks[i+1]`.
pub fn integrate_adaptive_with_breaks(
    f: impl Fn(f64) -> f64,
    breaks: &[f64],
    rel: f64,
    abs: f64,
) -> f64 {
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, err: e });
    }
    let mut iter = 0;
    while err > abs.max(rel * total.abs()) && iter < 4000 {
        iter += 1;
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, err: e2 });
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    pieces.iter().map(|p| p.value).sum()
}

/// Iterated Gauss-Legendre integration over an ordered region.
///
/// Each coordinate y_k ranges over [y_{k-1}, hi] (y_1 over [lo, hi]); that
/// range is split at the interior `breaks` and into `panels` equal pieces,
/// and each piece carries a `nodes`-point rule. When `first_power` differs
/// from 1 the first piece of y_1 uses the substitution y = a + (b−a)u^p,
/// which regularises integrable endpoint singularities of order
/// (y − lo)^{1/p − 1}.
#[derive(Clone, Debug)]
pub struct OrderedGrid {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
    pub panels: usize,
    pub breaks: Vec<f64>,
    pub first_power: f64,
}

impl OrderedGrid {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            nodes: 16,
            panels: 4,
            breaks: Vec::new(),
            first_power: 1.0,
        }
    }

    pub fn nodes(mut self, nodes: usize, panels: usize) -> Self {
        self.nodes = nodes;
        self.panels = panels.max(1);
        self
    }

    pub fn breaks(mut self, mut breaks: Vec<f64>) -> Self {
        breaks.retain(|b| *b > self.lo && *b < self.hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        self.breaks = breaks;
        self
    }

    pub fn first_power(mut self, p: f64) -> Self {
        self.first_power = p;
        self
    }

    fn segments(&self, lower: f64) -> Vec<(f64, f64)> {
        let mut pts = vec![lower];
        pts.extend(self.breaks.iter().copied().filter(|b| *b > lower));
        pts.push(self.hi);
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let pieces = self.panels;
            for p in 0..pieces {
                let s = a + (b - a) * p as f64 / pieces as f64;
                let e = if p + 1 == pieces { b } else { a + (b - a) * (p + 1) as f64 / pieces as f64 };
                out.push((s, e));
            }
        }
        out
    }

    /// Quadrature points (y, weight) for one coordinate ranging over [lower, hi].
    fn points(&self, lower: f64, first: bool) -> Vec<(f64, f64)> {
        let (x, w) = gl_cached(self.nodes);
        let mut out = Vec::new();
        for (i, (a, b)) in self.segments(lower).into_iter().enumerate() {
            let stretched = first && i == 0 && self.first_power != 1.0;
            for (xi, wi) in x.iter().zip(w) {
                let u = 0.5 * (xi + 1.0);
                let wu = 0.5 * wi;
                if stretched {
                    let p = self.first_power;
                    let y = a + (b - a) * u.powf(p);
                    out.push((y, wu * (b - a) * p * u.powf(p - 1.0)));
                } else {
                    out.push((a + (b - a) * u, wu * (b - a)));
                }
            }
        }
        out
    }
}

/// ∫_{lo ≤ y_1 < … < y_n ≤ hi} f(y) dy.
pub fn integrate_ordered<F>(n: usize, grid: &OrderedGrid, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(n >= 1);
    let top = grid.points(grid.lo, true);
    let parts: Vec<f64> = top
        .par_iter()
        .map(|&(y1, w1)| {
            let mut y = vec![0.0; n];
            y[0] = y1;
            w1 * inner(1, n, y1, grid, &f, &mut y)
        })
        .collect();
    parts.iter().sum()
}

fn inner<F>(k: usize, n: usize, lower: f64, grid: &OrderedGrid, f: &F, y: &mut [f64]) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    if k == n {
        return f(y);
    }
    let mut s = 0.0;
    for (yk, wk) in grid.points(lower, false) {
        y[k] = yk;
        s += wk * inner(k + 1, n, yk, grid, f, y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let approx: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((approx - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_peaks_and_singularities() {
        let v = integrate_adaptive(|x| (-x * x / 2.0).exp(), -40.0, 40.0, 1e-12, 0.0);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11);
        let v = integrate_adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0);
        assert!((v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn ordered_region_volume() {
        // Volume of the ordered simplex in [0,1]^3 is 1/3!.
        let g = OrderedGrid::new(0.0, 1.0).nodes(8, 1);
        let v = integrate_ordered(3, &g, |_| 1.0);
        assert!((v - 1.0 / 6.0).abs() < 1e-13);
        let v = integrate_ordered(2, &g, |y| y[0] * y[1]);
        assert!((v - 1.0 / 8.0).abs() < 1e-13);
    }

    #[test]
    fn power_stretch_removes_endpoint_singularity() {
        let g = OrderedGrid::new(0.0, 1.0).nodes(16, 1).first_power(2.0);
        let v = integrate_ordered(1, &g, |y| 1.0 / y[0].sqrt());
        assert!((v - 2.0).abs() < 1e-12);
    }
}
