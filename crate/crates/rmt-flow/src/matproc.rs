//! Discretised matrix-valued processes built from independent Brownian
//! motions and exactly sampled Brownian bridges.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Chamber, ChamberPoint};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, sigma, sigma_mu, ComplexMatrix, C64};
use crate::rng::{normal, stream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub big_t: f64,
    pub steps: usize,
}

impl PathGrid {
    pub fn new(big_t: f64, steps: usize) -> Result<Self> {
        if !(big_t > 0.0 && big_t.is_finite()) {
            return Err(Error::Spec(format!("horizon must be positive, got {big_t}")));
        }
        if steps == 0 {
            return Err(Error::Spec("a path grid needs at least one step".into()));
        }
        Ok(Self { big_t, steps })
    }

    pub fn dt(&self) -> f64 {
        self.big_t / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.big_t
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    /// Index of the grid time closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        ((t / self.big_t) * self.steps as f64).round().clamp(0.0, self.steps as f64) as usize
    }
}

const TAG_BM: u64 = 0x424d;
const TAG_BRIDGE: u64 = 0x4252;

fn bm_values(rng: &mut rand_chacha::ChaCha8Rng, grid: &PathGrid) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.steps + 1);
    out.push(0.0);
    let mut w = 0.0;
    for k in 1..=grid.steps {
        let dt = grid.time(k) - grid.time(k - 1);
        w += dt.sqrt() * normal(rng);
        out.push(w);
    }
    out
}

/// Turns a Brownian path on the grid into the bridge from 0 to `end`:
/// W(t) − (t/T)W(T) + (t/T)·end has exactly the bridge law at the grid times.
fn pin(mut w: Vec<f64>, grid: &PathGrid, end: f64) -> Vec<f64> {
    let wt = *w.last().unwrap();
    for (k, v) in w.iter_mut().enumerate() {
        let r = grid.time(k) / grid.big_t;
        *v += r * (end - wt);
    }
    *w.last_mut().unwrap() = end;
    w
}

/// Standard Brownian paths on the grid; path i depends only on (seed, i).
pub fn brownian_paths(count: usize, grid: &PathGrid, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| bm_values(&mut stream(seed, &[TAG_BM, i as u64]), grid))
        .collect()
}

/// Brownian bridges from 0 at time 0 to `m` at time T.
pub fn brownian_bridge_paths(count: usize, grid: &PathGrid, m: f64, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| pin(bm_values(&mut stream(seed, &[TAG_BRIDGE, i as u64]), grid), grid, m))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    Gue,
    Goe,
    Laguerre,
    Wishart,
    XiC,
    XiD,
    XiCprime,
    XiDprime,
    Xi1plus,
    Xi2plus,
    Ia,
    InterpA,
    InterpLw,
    InterpC,
    InterpD,
    BananaA,
    BananaD,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 17] = [
        Self::Gue,
        Self::Goe,
        Self::Laguerre,
        Self::Wishart,
        Self::XiC,
        Self::XiD,
        Self::XiCprime,
        Self::XiDprime,
        Self::Xi1plus,
        Self::Xi2plus,
        Self::Ia,
        Self::InterpA,
        Self::InterpLw,
        Self::InterpC,
        Self::InterpD,
        Self::BananaA,
        Self::BananaD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gue => "gue",
            Self::Goe => "goe",
            Self::Laguerre => "laguerre",
            Self::Wishart => "wishart",
            Self::XiC => "xi-c",
            Self::XiD => "xi-d",
            Self::XiCprime => "xi-cprime",
            Self::XiDprime => "xi-dprime",
            Self::Xi1plus => "xi-1plus",
            Self::Xi2plus => "xi-2plus",
            Self::Ia => "ia",
            Self::InterpA => "interp-a",
            Self::InterpLw => "interp-lw",
            Self::InterpC => "interp-c",
            Self::InterpD => "interp-d",
            Self::BananaA => "banana-a",
            Self::BananaD => "banana-d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    fn code(self) -> u64 {
        Self::ALL.iter().position(|k| *k == self).unwrap() as u64
    }

    /// Side of the Hermitian matrix for base size n.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Self::Gue | Self::Goe | Self::Laguerre | Self::Wishart | Self::InterpA | Self::InterpLw => n,
            Self::BananaD => 4 * n,
            _ => 2 * n,
        }
    }

    pub fn is_chiral(self) -> bool {
        matches!(self, Self::Laguerre | Self::Wishart | Self::InterpLw)
    }

    /// Kinds whose spectrum comes in ±ω pairs.
    pub fn is_paired(self) -> bool {
        matches!(
            self,
            Self::XiC | Self::XiD | Self::XiCprime | Self::XiDprime | Self::Ia | Self::InterpC | Self::InterpD | Self::BananaD
        )
    }

    pub fn is_bridged(self) -> bool {
        matches!(self, Self::InterpA | Self::InterpLw | Self::InterpC | Self::InterpD | Self::BananaA | Self::BananaD)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixProcessSpec {
    pub kind: ProcessKind,
    pub n: usize,
    #[serde(default)]
    pub nu: usize,
    pub seed: u64,
}

impl MatrixProcessSpec {
    pub fn new(kind: ProcessKind, n: usize, seed: u64) -> Self {
        Self { kind, n, nu: 0, seed }
    }

    pub fn with_nu(mut self, nu: usize) -> Self {
        self.nu = nu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Spec("matrix size must be at least 1".into()));
        }
        if self.nu != 0 && !self.kind.is_chiral() {
            return Err(Error::Spec(format!("kind {} takes no ν parameter", self.kind.name())));
        }
        if self.kind.dim(self.n) > 64 {
            return Err(Error::UnsupportedDimension(self.kind.dim(self.n)));
        }
        Ok(())
    }
}

/// One realisation: the Hermitian matrix at each grid time, plus the
/// rectangular factor M(t) for the chiral kinds.
#[derive(Clone, Debug)]
pub struct MatrixPath {
    pub kind: ProcessKind,
    pub times: Vec<f64>,
    pub matrices: Vec<ComplexMatrix>,
    pub factors: Option<Vec<ComplexMatrix>>,
}

/// Real N×N matrix paths: entry (i,j) of time k at [k][i*n+j].
type RealPath = Vec<Vec<f64>>;

struct Source<'a> {
    seed: u64,
    sample: u64,
    kind: ProcessKind,
    grid: &'a PathGrid,
}

impl Source<'_> {
    fn scalar(&self, key: &[u64], bridged: bool) -> Vec<f64> {
        let mut k = vec![self.kind.code(), self.sample];
        k.extend_from_slice(key);
        let w = bm_values(&mut stream(self.seed, &k), self.grid);
        if bridged {
            pin(w, self.grid, 0.0)
        } else {
            w
        }
    }

    /// s^ρ (symmetric, 1/√2 off the diagonal) or a^ρ (antisymmetric, zero
    /// diagonal) of size n, bridged to the zero matrix when asked.
    fn block(&self, antisym: bool, rho: u64, n: usize, bridged: bool) -> RealPath {
        let steps = self.grid.steps;
        let mut out = vec![vec![0.0; n * n]; steps + 1];
        let fam = if antisym { 1 } else { 0 };
        for i in 0..n {
            for j in i..n {
                if antisym && i == j {
                    continue;
                }
                let w = self.scalar(&[fam, rho, i as u64, j as u64], bridged);
                let c = if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
                let sgn = if antisym { -1.0 } else { 1.0 };
                for (k, v) in w.iter().enumerate() {
                    out[k][i * n + j] = c * v;
                    out[k][j * n + i] = sgn * c * v;
                }
            }
        }
        out
    }

    /// Independent entries of an r×c matrix (no symmetry scaling).
    fn rect(&self, fam: u64, r: usize, c: usize, bridged: bool) -> RealPath {
        let steps = self.grid.steps;
        let mut out = vec![vec![0.0; r * c]; steps + 1];
        for i in 0..r {
            for j in 0..c {
                let w = self.scalar(&[fam, 0, i as u64, j as u64], bridged);
                for (k, v) in w.iter().enumerate() {
                    out[k][i * c + j] = *v;
                }
            }
        }
        out
    }
}

/// A summand x ⊗ P where x is s^ρ or √-1 a^ρ.
struct Term {
    antisym: bool,
    key: u64,
    bridged: bool,
    pauli: ComplexMatrix,
}

fn t(antisym: bool, key: u64, bridged: bool, pauli: ComplexMatrix) -> Term {
    Term { antisym, key, bridged, pauli }
}

fn p(mu: usize) -> ComplexMatrix {
    sigma(mu)
}

fn pp(mu: usize, rho: usize) -> ComplexMatrix {
    sigma(mu).kron(&sigma(rho))
}

fn terms(kind: ProcessKind) -> Vec<Term> {
    use ProcessKind::*;
    let one = ComplexMatrix::identity(1);
    match kind {
        Gue => vec![t(false, 0, false, one.clone()), t(true, 0, false, one)],
        Goe => vec![t(false, 0, false, one)],
        Ia => vec![t(true, 0, false, one)],
        InterpA => vec![t(false, 0, false, one.clone()), t(true, 0, true, one)],
        XiC => vec![t(true, 0, false, p(0)), t(false, 1, false, p(1)), t(false, 2, false, p(2)), t(false, 3, false, p(3))],
        XiD => vec![t(true, 0, false, p(0)), t(true, 1, false, p(1)), t(true, 2, false, p(2)), t(false, 3, false, p(3))],
        XiCprime => vec![t(false, 1, false, p(1)), t(false, 3, false, p(3))],
        XiDprime => vec![t(true, 2, false, p(2)), t(false, 3, false, p(3))],
        Xi1plus => vec![t(false, 0, false, p(0)), t(false, 1, false, p(1)), t(false, 2, false, p(2)), t(true, 3, false, p(3))],
        Xi2plus => vec![t(false, 0, false, p(0)), t(true, 1, false, p(1)), t(true, 2, false, p(2)), t(true, 3, false, p(3))],
        InterpC => vec![t(true, 0, true, p(0)), t(false, 1, false, p(1)), t(false, 2, true, p(2)), t(false, 3, false, p(3))],
        InterpD => vec![t(true, 0, true, p(0)), t(true, 1, true, p(1)), t(true, 2, false, p(2)), t(false, 3, false, p(3))],
        BananaA => {
            let mut v = vec![t(false, 0, false, p(0)), t(true, 0, true, p(0))];
            for rho in 1..=3u64 {
                v.push(t(false, rho, true, p(rho as usize)));
                v.push(t(true, rho, false, p(rho as usize)));
            }
            v
        }
        BananaD => {
            // Keys 10·μ + ρ for the double index μρ.
            let mut v = Vec::new();
            for rho in 0..=2usize {
                let r = rho as u64;
                v.push(t(true, r, true, pp(0, rho)));
                v.push(t(true, 10 + r, false, pp(1, rho)));
                v.push(t(false, 20 + r, true, pp(2, rho)));
                v.push(t(true, 30 + r, false, pp(3, rho)));
            }
            v.push(t(false, 3, false, pp(0, 3)));
            v.push(t(false, 13, false, pp(1, 3)));
            v.push(t(true, 23, true, pp(2, 3)));
            v.push(t(false, 33, true, pp(3, 3)));
            v
        }
        Laguerre | Wishart | InterpLw => Vec::new(),
    }
}

fn real_to_complex(n: usize, m: &[f64], imaginary: bool) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let v = m[i * n + j];
        if imaginary {
            C64::new(0.0, v)
        } else {
            C64::new(v, 0.0)
        }
    })
}

/// Sample 0 of the process.
pub fn build_process(spec: &MatrixProcessSpec, grid: &PathGrid) -> Result<MatrixPath> {
    build_sample(spec, grid, 0)
}

/// Sample `index` of the process; depends only on (seed, kind, index).
pub fn build_sample(spec: &MatrixProcessSpec, grid: &PathGrid, index: u64) -> Result<MatrixPath> {
    spec.validate()?;
    let src = Source { seed: spec.seed, sample: index, kind: spec.kind, grid };
    let n = spec.n;
    let times = grid.times();
    if spec.kind.is_chiral() {
        let rows = n + spec.nu;
        let re = src.rect(2, rows, n, false);
        let im = match spec.kind {
            ProcessKind::Wishart => None,
            ProcessKind::Laguerre => Some(src.rect(3, rows, n, false)),
            _ => Some(src.rect(3, rows, n, true)),
        };
        let mut factors = Vec::with_capacity(times.len());
        let mut mats = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let m = ComplexMatrix::from_fn(rows, n, |i, j| {
                C64::new(re[k][i * n + j], im.as_ref().map_or(0.0, |v| v[k][i * n + j]))
            });
            let h = &m.adjoint() * &m;
            mats.push(h);
            factors.push(m);
        }
        return Ok(MatrixPath { kind: spec.kind, times, matrices: mats, factors: Some(factors) });
    }
    let inner = if spec.kind == ProcessKind::Ia { 2 * n } else { n };
    let dim = spec.kind.dim(n);
    let mut mats = vec![ComplexMatrix::zeros(dim, dim); times.len()];
    for term in terms(spec.kind) {
        let blk = src.block(term.antisym, term.key, inner, term.bridged);
        for (k, m) in blk.iter().enumerate() {
            let x = real_to_complex(inner, m, term.antisym);
            mats[k] = &mats[k] + &x.kron(&term.pauli);
        }
    }
    if spec.kind == ProcessKind::BananaA {
        // The doubled representation carries twice the variance of the
        // 2N×2N process it is meant to coincide with; rescale to unit rate.
        for m in mats.iter_mut() {
            *m = m.scale_real(std::f64::consts::FRAC_1_SQRT_2);
        }
    }
    Ok(MatrixPath { kind: spec.kind, times, matrices: mats, factors: None })
}

/// Maximum violation of the defining relations of the kind's matrix space.
pub fn symmetry_defect(kind: ProcessKind, h: &ComplexMatrix) -> f64 {
    use ProcessKind::*;
    let mut d = h.hermitian_defect();
    let rows = h.rows();
    let rel = |mu: usize, sign: f64| -> f64 {
        let s = sigma_mu(rows / 2, mu);
        let lhs = &h.transpose() * &s;
        let rhs = (&s * h).scale_real(sign);
        lhs.max_abs_diff(&rhs)
    };
    let imag = || h.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    match kind {
        Goe | Wishart => d = d.max(imag()),
        XiC | InterpC => d = d.max(rel(2, -1.0)),
        XiD | InterpD | BananaD => d = d.max(rel(1, -1.0)),
        XiCprime => d = d.max(rel(2, -1.0)).max(imag()),
        XiDprime => d = d.max(rel(1, -1.0)).max(imag()),
        Xi1plus => d = d.max(rel(1, 1.0)),
        Xi2plus => d = d.max(rel(2, 1.0)),
        Ia => d = d.max(h.transpose().max_abs_diff(&h.scale_real(-1.0))),
        _ => {}
    }
    d
}

/// Ordered spectral coordinates of a path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub points: Vec<ChamberPoint>,
}

impl PathSample {
    pub fn terminal(&self) -> &ChamberPoint {
        self.points.last().expect("non-empty path")
    }
}

/// Spectrum at each time: the full ascending spectrum for GUE/GOE-type and
/// self-dual kinds, the nonnegative half ω for ±-paired kinds, eigenvalues of
/// M†M for the Laguerre and Wishart kinds and radial coordinates κ for the
/// interpolating chiral kind.
pub fn eigen_path(path: &MatrixPath) -> Result<PathSample> {
    let mut points = Vec::with_capacity(path.matrices.len());
    for m in &path.matrices {
        let ev = eigvalsh(m)?;
        points.push(spectral_point(path.kind, ev));
    }
    Ok(PathSample { times: path.times.clone(), points })
}

pub(crate) fn spectral_point(kind: ProcessKind, ev: Vec<f64>) -> ChamberPoint {
    if kind.is_paired() {
        let half = ev.len() / 2;
        let mut w: Vec<f64> = ev[half..].iter().map(|v| v.abs()).collect();
        w.sort_by(f64::total_cmp);
        ChamberPoint::new(Chamber::C, w)
    } else if kind == ProcessKind::InterpLw {
        ChamberPoint::new(Chamber::C, ev.iter().map(|v| v.max(0.0).sqrt()).collect())
    } else if kind.is_chiral() {
        ChamberPoint::new(Chamber::C, ev.iter().map(|v| v.max(0.0)).collect())
    } else {
        ChamberPoint::new(Chamber::A, ev)
    }
}

/// Eigenvalues only at the terminal time for `count` samples, in parallel.
pub fn terminal_spectra(spec: &MatrixProcessSpec, grid: &PathGrid, count: usize) -> Result<Vec<ChamberPoint>> {
    spectra_at(spec, grid, count, grid.steps)
}

/// Spectral coordinates at grid index `k` for `count` samples.
pub fn spectra_at(spec: &MatrixProcessSpec, grid: &PathGrid, count: usize, k: usize) -> Result<Vec<ChamberPoint>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let path = build_sample(spec, grid, i)?;
            Ok(spectral_point(spec.kind, eigvalsh(&path.matrices[k])?))
        })
        .collect()
}

/// Distinct values y^odd of a Kramers-degenerate spectrum and the largest
/// intra-pair gap.
pub fn kramers_pairs(ev: &[f64]) -> (Vec<f64>, f64) {
    let mut gap = 0.0f64;
    let odd = ev
        .chunks(2)
        .map(|p| {
            if p.len() == 2 {
                gap = gap.max((p[1] - p[0]).abs());
            }
            p[0]
        })
        .collect();
    (odd, gap)
}

/// One JSON-lines record of a path dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub seed: u64,
    pub sample: u64,
    pub kind: String,
    pub times: Vec<f64>,
    pub eigenvalues: Vec<Vec<f64>>,
}

impl PathRecord {
    pub fn new(seed: u64, sample: u64, kind: &str, path: &PathSample) -> Self {
        Self {
            seed,
            sample,
            kind: kind.to_string(),
            times: path.times.clone(),
            eigenvalues: path.points.iter().map(|p| p.coords().to_vec()).collect(),
        }
    }
}
