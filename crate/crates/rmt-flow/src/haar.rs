//! Haar sampling on the compact groups and Monte Carlo checks of the
//! Harish-Chandra type integrals.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{log_h, log_norm_constant, Chamber, HKind, NormConst};
use crate::error::{Error, Result};
use crate::kernels::{log_fb, log_km, BananaFamily};
use crate::linalg::{det_from_log_entries, sigma, sigma_mu, symplectic_j, ComplexMatrix, C64};
use crate::rng::{normal, pairwise_sum, stream, MCEstimate};
use crate::specfun::{log_kernel_unchecked, log_scaled_i, KernelTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "kebab-case")]
pub enum GroupTag {
    U { n: usize },
    O { n: usize },
    /// U(n+ν) × U(n).
    UxU { n: usize, nu: usize },
    /// USp(2n) = U_2(2n).
    USp { n: usize },
    /// U_1(2n) ≅ SO(2n, ℂ) ∩ U(2n).
    U1 { n: usize },
}

#[derive(Clone, Debug)]
pub enum HaarSample {
    Single(ComplexMatrix),
    Pair(ComplexMatrix, ComplexMatrix),
}

impl HaarSample {
    pub fn single(self) -> ComplexMatrix {
        match self {
            HaarSample::Single(u) => u,
            HaarSample::Pair(u, _) => u,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Gram–Schmidt on Gaussian columns. This is QR of a Ginibre matrix with
/// the diagonal of R made positive, hence exactly Haar.
fn orthonormal_columns(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n)
            .map(|_| {
                let re = normal(rng);
                let im = if complex { normal(rng) } else { 0.0 };
                C64::new(re, im)
            })
            .collect();
        project_out(&mut v, &cols);
        if let Some(u) = normalise(v) {
            cols.push(u);
        }
    }
    cols
}

fn project_out(v: &mut [C64], cols: &[Vec<C64>]) {
    // Two passes keep the basis orthonormal to rounding.
    for _ in 0..2 {
        for c in cols {
            let p = dot(c, v);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= p * ci;
            }
        }
    }
}

fn normalise(v: Vec<C64>) -> Option<Vec<C64>> {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm < 1e-8 {
        return None;
    }
    Some(v.into_iter().map(|z| z / nrm).collect())
}

fn from_columns(cols: &[Vec<C64>]) -> ComplexMatrix {
    let n = cols[0].len();
    ComplexMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    from_columns(&orthonormal_columns(rng, n, true))
}

pub fn haar_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    from_columns(&orthonormal_columns(rng, n, false))
}

/// Columns ordered (u_1, w_1, u_2, w_2, …) with w_k = −J ū_k, so that
/// Uᵀ J U = J where J = I_n ⊗ [[0,1],[−1,0]].
pub fn haar_symplectic(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let d = 2 * n;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| C64::new(normal(rng), normal(rng))).collect();
        project_out(&mut v, &cols);
        let Some(u) = normalise(v) else { continue };
        // (J ū)_{2k} = ū_{2k+1}, (J ū)_{2k+1} = −ū_{2k}.
        let mut w = vec![C64::new(0.0, 0.0); d];
        for k in 0..n {
            w[2 * k] = -u[2 * k + 1].conj();
            w[2 * k + 1] = u[2 * k].conj();
        }
        cols.push(u);
        cols.push(w);
    }
    from_columns(&cols)
}

/// s = e^{−iπ/4}(1/√2)[[1, i], [i, 1]], which satisfies s sᵀ = σ_1.
pub fn s_block() -> ComplexMatrix {
    let c = C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_PI_4);
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::from_fn(2, 2, |r, k| if r == k { c } else { c * i })
}

/// U = S O S† with S = I_n ⊗ s and O Haar on the full orthogonal group O(2n).
pub fn haar_u1(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let s = ComplexMatrix::identity(n).kron(&s_block());
    let o = haar_orthogonal(rng, 2 * n);
    &(&s * &o) * &s.adjoint()
}

pub fn sample_with(rng: &mut ChaCha8Rng, tag: GroupTag) -> HaarSample {
    match tag {
        GroupTag::U { n } => HaarSample::Single(haar_unitary(rng, n)),
        GroupTag::O { n } => HaarSample::Single(haar_orthogonal(rng, n)),
        GroupTag::UxU { n, nu } => {
            let u = haar_unitary(rng, n + nu);
            HaarSample::Pair(u, haar_unitary(rng, n))
        }
        GroupTag::USp { n } => HaarSample::Single(haar_symplectic(rng, n)),
        GroupTag::U1 { n } => HaarSample::Single(haar_u1(rng, n)),
    }
}

pub fn haar_sample(tag: GroupTag, seed: u64) -> HaarSample {
    sample_with(&mut stream(seed, &[0x4841]), tag)
}

/// Largest violation of unitarity and of the group's defining relation.
pub fn membership_defect(tag: GroupTag, s: &HaarSample) -> f64 {
    let unit = |u: &ComplexMatrix| (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.rows()));
    match (tag, s) {
        (GroupTag::UxU { .. }, HaarSample::Pair(u, v)) => unit(u).max(unit(v)),
        (GroupTag::O { .. }, HaarSample::Single(u)) => unit(u).max(u.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
        (GroupTag::USp { n }, HaarSample::Single(u)) => {
            let j = symplectic_j(n);
            unit(u).max((&(u * &j) * &u.transpose()).max_abs_diff(&j))
        }
        (GroupTag::U1 { n }, HaarSample::Single(u)) => {
            let s1 = sigma_mu(n, 1);
            unit(u).max((&(&u.transpose() * &s1) * u).max_abs_diff(&s1))
        }
        (_, HaarSample::Single(u)) => unit(u),
        (_, HaarSample::Pair(u, _)) => unit(u),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HcizKind {
    /// Integral over U(N).
    A,
    /// Integral over U(N+ν) × U(N) with rectangular K embeddings.
    Chiral,
    /// Integral over USp(2N).
    C,
    /// Integral over U_1(2N).
    D,
    /// Integral over U(2N) against a doubled spectrum.
    Banana,
    /// Integral over U_1(4N) against a doubled spectrum.
    Diii,
}

impl HcizKind {
    pub const ALL: [HcizKind; 6] = [Self::A, Self::Chiral, Self::C, Self::D, Self::Banana, Self::Diii];

    pub fn name(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::Chiral => "chiral",
            Self::C => "C",
            Self::D => "D",
            Self::Banana => "banana",
            Self::Diii => "DIII",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "a" => Self::A,
            "chiral" => Self::Chiral,
            "c" => Self::C,
            "d" => Self::D,
            "cd" => Self::C,
            "banana" => Self::Banana,
            "diii" => Self::Diii,
            _ => return None,
        })
    }

    fn chamber(self) -> Chamber {
        match self {
            Self::A | Self::Banana => Chamber::A,
            _ => Chamber::C,
        }
    }

    /// Number of x coordinates for a given base size N (the size of y).
    pub fn x_len(self, n: usize) -> usize {
        match self {
            Self::Banana | Self::Diii => 2 * n,
            _ => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HcizQuery {
    pub kind: HcizKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: f64,
    #[serde(default)]
    pub nu: usize,
}

impl HcizQuery {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || self.x.len() != self.kind.x_len(n) {
            return Err(Error::Spec(format!(
                "kind {} needs |x| = {} for |y| = {n}, got {}",
                self.kind.name(),
                self.kind.x_len(n),
                self.x.len()
            )));
        }
        if !(self.sigma != 0.0 && self.sigma.is_finite()) {
            return Err(Error::Spec("σ must be finite and nonzero".into()));
        }
        if self.nu != 0 && self.kind != HcizKind::Chiral {
            return Err(Error::Spec("ν only applies to the chiral integral".into()));
        }
        let c = self.kind.chamber();
        for v in [&self.x, &self.y] {
            if !c.contains(v) {
                let found = if Chamber::A.contains(v) { Chamber::A } else { Chamber::D };
                return Err(Error::ChamberMismatch { expected: c.name(), found });
            }
        }
        Ok(())
    }

    fn group(&self) -> GroupTag {
        let n = self.n();
        match self.kind {
            HcizKind::A => GroupTag::U { n },
            HcizKind::Chiral => GroupTag::UxU { n, nu: self.nu },
            HcizKind::C => GroupTag::USp { n },
            HcizKind::D => GroupTag::U1 { n },
            HcizKind::Banana => GroupTag::U { n: 2 * n },
            HcizKind::Diii => GroupTag::U1 { n: 2 * n },
        }
    }
}

fn diag_kron(d: &[f64], p: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::diag_real(d).kron(p)
}

/// The diagonal embeddings (Λ_x, Λ_y) and the trace prefactor 1/(cσ²).
fn embeddings(q: &HcizQuery) -> (ComplexMatrix, ComplexMatrix, f64) {
    let s2 = q.sigma * q.sigma;
    match q.kind {
        HcizKind::A => (ComplexMatrix::diag_real(&q.x), ComplexMatrix::diag_real(&q.y), 0.5 / s2),
        HcizKind::C | HcizKind::D => (diag_kron(&q.x, &sigma(3)), diag_kron(&q.y, &sigma(3)), 0.25 / s2),
        HcizKind::Banana => (ComplexMatrix::diag_real(&q.x), diag_kron(&q.y, &sigma(0)), 0.5 / s2),
        HcizKind::Diii => (
            diag_kron(&q.x, &sigma(3)),
            diag_kron(&q.y, &sigma(0).kron(&sigma(3))),
            0.25 / s2,
        ),
        HcizKind::Chiral => {
            let (n, nu) = (q.n(), q.nu);
            let k = |d: &[f64]| ComplexMatrix::from_real(n + nu, n, |i, j| if i == j { d[i] } else { 0.0 });
            (k(&q.x), k(&q.y), 0.5 / s2)
        }
    }
}

fn integrand(q: &HcizQuery, lx: &ComplexMatrix, ly: &ComplexMatrix, c: f64, g: &HaarSample) -> f64 {
    let d = match (q.kind, g) {
        (HcizKind::Chiral, HaarSample::Pair(u, v)) => {
            let m = lx - &(&(&u.adjoint() * ly) * v);
            m.frobenius().powi(2)
        }
        (_, HaarSample::Single(u)) => {
            let m = lx - &(&(&u.adjoint() * ly) * u);
            (&m * &m).trace().re
        }
        _ => unreachable!("group and kind are paired by construction"),
    };
    (-c * d).exp()
}

/// Monte Carlo estimate of the group integral from `samples` Haar draws.
pub fn hciz_lhs(q: &HcizQuery, samples: usize, seed: u64) -> Result<MCEstimate> {
    q.validate()?;
    if samples < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: samples });
    }
    let (lx, ly, c) = embeddings(q);
    let tag = q.group();
    let vals: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_with(&mut stream(seed, &[0x4843, i]), tag);
            integrand(q, &lx, &ly, c, &g)
        })
        .collect();
    let n = vals.len() as f64;
    let mean = pairwise_sum(&vals) / n;
    let sq: Vec<f64> = vals.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    Ok(MCEstimate { value: mean, stderr: (var / n).sqrt(), n: vals.len() })
}

/// Closed-form side of the integral.
pub fn hciz_rhs(q: &HcizQuery) -> Result<f64> {
    q.validate()?;
    let n = q.n();
    let s2 = q.sigma * q.sigma;
    let ls = q.sigma.abs().ln();
    let (x, y) = (&q.x[..], &q.y[..]);
    let (sign, log) = match q.kind {
        HcizKind::A => {
            let (s, l) = log_km(KernelTag::A, s2, x, y);
            let (sx, hx) = log_h(HKind::A, x);
            let (sy, hy) = log_h(HKind::A, y);
            let d = (n * n) as f64;
            (s * sx * sy, log_norm_constant(NormConst::CA, n)? + d * ls - hx - hy + l)
        }
        HcizKind::Chiral => {
            let nu = q.nu as f64;
            let nf = n as f64;
            let mut logs = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let z = x[i] * y[j] / s2;
                    // ln[e^{−(x²+y²)/2σ²} I_ν(z)] with the scaled Bessel function.
                    logs[i * n + j] = -(x[i] - y[j]).powi(2) / (2.0 * s2) + log_scaled_i(nu, z);
                }
            }
            let (s, l) = det_from_log_entries(&vec![1.0; n * n], &logs, n);
            let (sx, hx) = log_h(HKind::Alpha(nu), x);
            let (sy, hy) = log_h(HKind::Alpha(nu), y);
            let p = 2.0 * nf * (nf + nu - 1.0);
            (s * sx * sy, log_norm_constant(NormConst::CNu(nu), n)? + p * ls - hx - hy + l)
        }
        HcizKind::C | HcizKind::D => {
            let (tag, hk, cn, d) = if q.kind == HcizKind::C {
                (KernelTag::C, HKind::C, NormConst::CC, n * (2 * n + 1))
            } else {
                (KernelTag::D, HKind::D, NormConst::CD, n * (2 * n - 1))
            };
            let (s, l) = log_km(tag, s2, x, y);
            let (sx, hx) = log_h(hk, x);
            let (sy, hy) = log_h(hk, y);
            (s * sx * sy, log_norm_constant(cn, n)? + d as f64 * ls - hx - hy + l)
        }
        HcizKind::Banana => {
            let (s, l) = log_fb(BananaFamily::A, s2, y, x);
            let (sx, hx) = log_h(HKind::A, x);
            let (sy, hy) = log_h(HKind::A, y);
            let d = (4 * n * n) as f64;
            (s * sx * sy, log_norm_constant(NormConst::C2nA, n)? + d * ls - hx - 4.0 * hy + l)
        }
        HcizKind::Diii => {
            let m = 2 * n;
            let mut signs = vec![1.0; m * m];
            let mut logs = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..n {
                    logs[i * m + 2 * j] = log_kernel_unchecked(KernelTag::D, s2, y[j], x[i]);
                    logs[i * m + 2 * j + 1] = (x[i] / s2).ln() + log_kernel_unchecked(KernelTag::C, s2, y[j], x[i]);
                }
            }
            for v in signs.iter_mut().zip(&logs) {
                if *v.1 == f64::NEG_INFINITY {
                    *v.0 = 0.0;
                }
            }
            let (s, l) = det_from_log_entries(&signs, &logs, m);
            let (sx, hx) = log_h(HKind::D, x);
            let (sy, hy) = log_h(HKind::Alpha(0.25), y);
            let p = (2 * n * (4 * n - 1)) as f64;
            let c = log_norm_constant(NormConst::C2nD, n)? - n as f64 * std::f64::consts::LN_2;
            (s * sx * sy, c + p * ls - hx - 4.0 * hy + l)
        }
    };
    Ok(sign * log.exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HcizReport {
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub nu: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: f64,
    pub lhs: f64,
    pub stderr: f64,
    pub rhs: f64,
    pub zscore: f64,
}

impl HcizReport {
    pub fn passes(&self, z: f64) -> bool {
        self.zscore.abs() < z
    }
}

pub fn hciz_report(q: &HcizQuery, samples: usize, seed: u64) -> Result<HcizReport> {
    let lhs = hciz_lhs(q, samples, seed)?;
    let rhs = hciz_rhs(q)?;
    Ok(HcizReport {
        kind: q.kind.name().to_string(),
        n: q.n(),
        nu: q.nu,
        x: q.x.clone(),
        y: q.y.clone(),
        sigma: q.sigma,
        lhs: lhs.value,
        stderr: lhs.stderr,
        rhs,
        zscore: lhs.zscore(rhs),
    })
}

/// Seeded well-separated points for the checks: coordinates in the chamber
/// with gaps at least 0.2 and σ in [0.6, 1.2].
pub fn random_query(kind: HcizKind, n: usize, nu: usize, seed: u64) -> HcizQuery {
    use rand::Rng;
    let mut rng = stream(seed, &[0x5251, kind as u64, n as u64]);
    let pts = |len: usize, rng: &mut ChaCha8Rng| {
        let start = if kind.chamber() == Chamber::A { rng.gen_range(-1.0..0.0) } else { rng.gen_range(0.2..0.6) };
        let mut v = Vec::with_capacity(len);
        let mut cur: f64 = start;
        for _ in 0..len {
            v.push(cur);
            cur += rng.gen_range(0.2..0.7);
        }
        v
    };
    let x = pts(kind.x_len(n), &mut rng);
    let y = pts(n, &mut rng);
    let sigma = rng.gen_range(0.6..1.2);
    HcizQuery { kind, x, y, sigma, nu: if kind == HcizKind::Chiral { nu } else { 0 } }
}
