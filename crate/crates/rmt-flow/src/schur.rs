//! Partitions, Schur polynomials and the Schur-function expansions of the
//! exponential and Bessel determinants, plus the Selberg-type closed form.

use std::collections::HashMap;
use std::cell::RefCell;
use std::sync::Arc;

use crate::ensembles::{log_h, HKind};
use crate::error::{domain, Result};
use crate::linalg::{det_real, log_det_real};
use crate::quad::{integrate_ordered, OrderedGrid};
use crate::specfun::{lgamma, log_scaled_i};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("partition parts must be weakly decreasing: {parts:?}"));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of nonzero parts ℓ(μ).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// μ_i for 0-based i, zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }
}

/// All partitions with |μ| ≤ max_weight and ℓ(μ) ≤ max_len, in
/// lexicographic order of their part sequences.
pub fn partitions(max_weight: u32, max_len: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u32, cap: u32, len_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        out.push(Partition { parts: cur.clone() });
        if len_left == 0 {
            return;
        }
        for p in 1..=cap.min(rem) {
            cur.push(p);
            rec(rem - p, p, len_left - 1, cur, out);
            cur.pop();
        }
    }
    rec(max_weight, max_weight, max_len, &mut cur, &mut out);
    out.sort();
    out
}

/// Schur polynomial s_μ(x). Uses the bialternant when the coordinates are
/// separated by at least 1e-6 and the Jacobi-Trudi determinant otherwise.
pub fn schur_eval(mu: &Partition, x: &[f64]) -> f64 {
    let n = x.len();
    if mu.len() > n {
        return 0.0;
    }
    if mu.is_empty() {
        return 1.0;
    }
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            gap = gap.min((x[i] - x[j]).abs());
        }
    }
    if gap >= 1e-6 {
        schur_bialternant(mu, x)
    } else {
        schur_jacobi_trudi(mu, x)
    }
}

pub fn schur_bialternant(mu: &Partition, x: &[f64]) -> f64 {
    let n = x.len();
    let mut num = vec![0.0; n * n];
    let mut den = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            num[i * n + j] = x[i].powi((mu.part(j) as usize + n - 1 - j) as i32);
            den[i * n + j] = x[i].powi((n - 1 - j) as i32);
        }
    }
    let (sn, ln) = log_det_real(&mut num, n);
    let (sd, ld) = log_det_real(&mut den, n);
    sn * sd * (ln - ld).exp()
}

/// Complete homogeneous symmetric polynomials h_0..h_m.
fn complete_homogeneous(x: &[f64], m: usize) -> Vec<f64> {
    let mut h = vec![0.0; m + 1];
    h[0] = 1.0;
    for &xi in x {
        for k in 1..=m {
            h[k] += xi * h[k - 1];
        }
    }
    h
}

pub fn schur_jacobi_trudi(mu: &Partition, x: &[f64]) -> f64 {
    let l = mu.len();
    if l == 0 {
        return 1.0;
    }
    let m = mu.part(0) as usize + l;
    let h = complete_homogeneous(x, m);
    let mut a = vec![0.0; l * l];
    for i in 0..l {
        for j in 0..l {
            let k = mu.part(i) as i64 - i as i64 + j as i64;
            a[i * l + j] = if k < 0 { 0.0 } else { h[k as usize] };
        }
    }
    det_real(&a, l)
}

/// Precomputed interlacing structure for evaluating every s_μ with
/// |μ| ≤ m, ℓ(μ) ≤ n by the branching rule
/// s_μ(x_1..x_k) = Σ_{λ ≺ μ} s_λ(x_1..x_{k-1}) x_k^{|μ|-|λ|},
/// a sum of nonnegative terms for nonnegative x.
pub struct SchurPlan {
    n: usize,
    m: u32,
    levels: Vec<Vec<Partition>>,
    links: Vec<Vec<Vec<(usize, u32)>>>,
}

impl SchurPlan {
    pub fn new(n: usize, m: u32) -> Self {
        assert!(n >= 1);
        let levels: Vec<Vec<Partition>> = (1..=n).map(|k| partitions(m, k)).collect();
        let mut links = Vec::with_capacity(n);
        // Level 1 links point to the empty partition of zero variables.
        links.push(levels[0].iter().map(|p| vec![(0usize, p.weight())]).collect());
        for k in 1..n {
            let index: HashMap<&Partition, usize> =
                levels[k - 1].iter().enumerate().map(|(i, p)| (p, i)).collect();
            let mut lk = Vec::with_capacity(levels[k].len());
            for mu in &levels[k] {
                let mut ls = Vec::new();
                let mut lam = vec![0u32; k];
                interlacing(mu, 0, k, &mut lam, &mut |l: &[u32]| {
                    let p = Partition::new(l.to_vec()).expect("interlacing partitions are valid");
                    let w = mu.weight() - p.weight();
                    ls.push((index[&p], w));
                });
                lk.push(ls);
            }
            links.push(lk);
        }
        Self { n, m, levels, links }
    }

    /// Per-thread cached plan, so parallel quadrature never contends on a lock.
    pub fn shared(n: usize, m: u32) -> Arc<SchurPlan> {
        thread_local! {
            static CACHE: RefCell<HashMap<(usize, u32), Arc<SchurPlan>>> = RefCell::new(HashMap::new());
        }
        CACHE.with(|c| {
            c.borrow_mut()
                .entry((n, m))
                .or_insert_with(|| Arc::new(SchurPlan::new(n, m)))
                .clone()
        })
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.levels[self.n - 1]
    }

    pub fn max_weight(&self) -> u32 {
        self.m
    }

    /// s_μ(x) for every μ in [`SchurPlan::partitions`], in the same order.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let m = self.m as usize;
        let mut prev = vec![1.0];
        for k in 0..self.n {
            let mut pw = vec![1.0; m + 1];
            for d in 1..=m {
                pw[d] = pw[d - 1] * x[k];
            }
            let cur: Vec<f64> = self.links[k]
                .iter()
                .map(|ls| ls.iter().map(|&(i, w)| prev[i] * pw[w as usize]).sum())
                .collect();
            prev = cur;
        }
        prev
    }
}

fn interlacing(mu: &Partition, i: usize, k: usize, lam: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    // λ_i ranges over [μ_{i+1}, μ_i] for i < k (0-based).
    if i == k {
        f(lam);
        return;
    }
    for v in mu.part(i + 1)..=mu.part(i) {
        lam[i] = v;
        interlacing(mu, i + 1, k, lam, f);
    }
}

/// Branching-rule evaluation of a single Schur polynomial.
pub fn schur_branching(mu: &Partition, x: &[f64]) -> f64 {
    fn rec(mu: &[u32], x: &[f64]) -> f64 {
        let k = x.len();
        let l = mu.iter().filter(|p| **p > 0).count();
        if l > k {
            return 0.0;
        }
        if k == 0 {
            return 1.0;
        }
        let mut lam = vec![0u32; k - 1];
        let mut s = 0.0;
        let total: u32 = mu.iter().sum();
        fn go(mu: &[u32], i: usize, lam: &mut Vec<u32>, x: &[f64], total: u32, s: &mut f64) {
            if i == lam.len() {
                let w: u32 = lam.iter().sum();
                *s += rec(lam, &x[..x.len() - 1]) * x[x.len() - 1].powi((total - w) as i32);
                return;
            }
            let hi = mu.get(i).copied().unwrap_or(0);
            let lo = mu.get(i + 1).copied().unwrap_or(0);
            for v in lo..=hi {
                lam[i] = v;
                go(mu, i + 1, lam, x, total, s);
            }
        }
        go(mu, 0, &mut lam, x, total, &mut s);
        s
    }
    if mu.len() > x.len() {
        return 0.0;
    }
    let mut parts = mu.parts().to_vec();
    parts.resize(x.len(), 0);
    rec(&parts, x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExpansionKind {
    /// det[e^{x_i y_j}] / (h^A(x) h^A(y)) = Σ a_μ s_μ(x) s_μ(y)
    Exp,
    /// det[I_ν(2√(x_i y_j))] / (∏(x_i y_i)^{ν/2} h^A(x) h^A(y)) = Σ b_μ s_μ(x) s_μ(y)
    Bessel(f64),
}

pub fn coefficient(kind: ExpansionKind, mu: &Partition, n: usize) -> f64 {
    log_coefficient(kind, mu, n).exp()
}

fn log_coefficient(kind: ExpansionKind, mu: &Partition, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let base = mu.part(i) as f64 + (n - i) as f64;
            let extra = match kind {
                ExpansionKind::Exp => 0.0,
                ExpansionKind::Bessel(nu) => lgamma(nu + base),
            };
            lgamma(base) + extra
        })
        .map(|v| -v)
        .sum()
}

/// Σ_{|μ| ≤ m} c_μ s_μ(x) s_μ(y).
pub fn truncated_series(kind: ExpansionKind, x: &[f64], y: &[f64], m: u32) -> f64 {
    let n = x.len();
    let plan = SchurPlan::shared(n, m);
    let sx = plan.eval(x);
    let sy = plan.eval(y);
    plan.partitions()
        .iter()
        .zip(sx.iter().zip(&sy))
        .map(|(mu, (a, b))| log_coefficient(kind, mu, n).exp() * a * b)
        .sum()
}

/// Weight cutoff giving relative truncation error far below double
/// precision when max|x|·max|y| ≤ s.
pub(crate) fn auto_cutoff(kind: ExpansionKind, n: usize, s: f64) -> u32 {
    let s = s.max(1e-300);
    for m in 1..200u32 {
        let k = m as f64;
        let log_term = match kind {
            ExpansionKind::Exp => k * s.ln() - lgamma(k + 1.0),
            ExpansionKind::Bessel(_) => k * s.ln() - 2.0 * lgamma(k + 1.0),
        };
        // Allow for the polynomial growth of s_μ(1,…,1) with n.
        if log_term + (n as f64) * (k + 1.0).ln() < -41.0 {
            return m + 2;
        }
    }
    200
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionCheck {
    pub truncated: f64,
    pub exact: f64,
    pub residual: f64,
}

/// Compares the truncated Schur expansion with the determinant evaluated
/// directly, both normalised by the h-prefactors.
pub fn expansion_check(kind: ExpansionKind, x: &[f64], y: &[f64], cutoff: u32) -> Result<ExpansionCheck> {
    let n = x.len();
    if y.len() != n || n == 0 {
        return domain("x and y must have the same nonzero length");
    }
    if let ExpansionKind::Bessel(nu) = kind {
        if !(nu > -1.0) {
            return domain("Bessel expansion needs nu > -1");
        }
        if x.iter().chain(y).any(|v| *v < 0.0) {
            return domain("Bessel expansion needs nonnegative arguments");
        }
    }
    let truncated = truncated_series(kind, x, y, cutoff);
    let exact = direct_normalised_det(kind, x, y);
    Ok(ExpansionCheck { truncated, exact, residual: (truncated - exact).abs() })
}

fn direct_normalised_det(kind: ExpansionKind, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut signs = vec![1.0; n * n];
    let mut logs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = match kind {
                ExpansionKind::Exp => x[i] * y[j],
                ExpansionKind::Bessel(nu) => {
                    let z = 2.0 * (x[i] * y[j]).sqrt();
                    if z == 0.0 {
                        if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY }
                    } else {
                        log_scaled_i(nu, z) + z
                    }
                }
            };
            logs[i * n + j] = v;
            if v == f64::NEG_INFINITY {
                signs[i * n + j] = 0.0;
            }
        }
    }
    let (s, l) = crate::linalg::det_from_log_entries(&signs, &logs, n);
    let (shx, lhx) = log_h(HKind::A, x);
    let (shy, lhy) = log_h(HKind::A, y);
    let pre = match kind {
        ExpansionKind::Exp => 0.0,
        ExpansionKind::Bessel(nu) => x.iter().zip(y).map(|(a, b)| 0.5 * nu * (a * b).ln()).sum(),
    };
    s * shx * shy * (l - lhx - lhy - pre).exp()
}

/// Leading small-x term of the normalised determinant: c_∅ = a_∅ or b_∅.
pub fn leading_coefficient(kind: ExpansionKind, n: usize) -> f64 {
    coefficient(kind, &Partition::empty(), n)
}

/// ln of Σ_μ c_μ s_μ(x) s_μ(y) with an automatic cutoff. Requires
/// nonnegative arguments (all terms then nonnegative).
pub(crate) fn log_series_nonneg(kind: ExpansionKind, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let xm = x.iter().cloned().fold(0.0, f64::max);
    let ym = y.iter().cloned().fold(0.0, f64::max);
    let m = auto_cutoff(kind, n, xm * ym);
    truncated_series(kind, x, y, m).ln()
}

/// 2^{αN+γN(N−1)} ∏ Γ(1+iγ)Γ(α+γ(i−1))/Γ(1+γ), the value of
/// ∫_{ℝ^N} ∏|u_j²−u_i²|^{2γ} ∏|u_k|^{2α−1} e^{−|u|²/2} du.
pub fn selberg_value(n: usize, alpha: f64, gamma: f64) -> Result<f64> {
    log_selberg_value(n, alpha, gamma).map(f64::exp)
}

pub fn log_selberg_value(n: usize, alpha: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(gamma > 0.0) || n == 0 {
        return domain(format!("Selberg formula needs N ≥ 1, alpha > 0, gamma > 0 (got {n}, {alpha}, {gamma})"));
    }
    let nf = n as f64;
    let mut v = (alpha * nf + gamma * nf * (nf - 1.0)) * std::f64::consts::LN_2;
    for i in 1..=n {
        let i = i as f64;
        v += lgamma(1.0 + i * gamma) + lgamma(alpha + gamma * (i - 1.0)) - lgamma(1.0 + gamma);
    }
    Ok(v)
}

/// The same integral by ordered tensor quadrature (N ≤ 3). The integrand
/// is even in each coordinate and symmetric, so ∫_{ℝ^N} = 2^N N! ∫_{0<u_1<…<u_N}.
pub fn selberg_quadrature(n: usize, alpha: f64, gamma: f64) -> Result<f64> {
    if !(1..=3).contains(&n) {
        return Err(crate::error::Error::UnsupportedDimension(n));
    }
    if !(alpha > 0.0) || !(gamma > 0.0) {
        return domain("Selberg quadrature needs alpha > 0, gamma > 0");
    }
    let nodes = if n == 3 { 16 } else { 32 };
    let grid = OrderedGrid::new(0.0, 16.0).nodes(nodes, 6).first_power(4.0);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let v = integrate_ordered(n, &grid, |u| {
        let mut f = 1.0;
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                f *= (u[j] * u[j] - u[i] * u[i]).abs().powf(2.0 * gamma);
            }
            f *= u[i].abs().powf(2.0 * alpha - 1.0) * (-u[i] * u[i] / 2.0).exp();
        }
        f
    });
    Ok(2f64.powi(n as i32) * fact * v)
}
