//! Weyl chambers, h-polynomials, normalisation constants and the closed-form
//! eigenvalue densities of the Gaussian ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::lgamma;

const LN_2: f64 = std::f64::consts::LN_2;
const LN_PI: f64 = 1.144_729_885_849_400_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chamber {
    /// x_1 < x_2 < … < x_N
    A,
    /// 0 < x_1 < … < x_N
    C,
    /// |x_1| < x_2 < … < x_N
    D,
}

impl Chamber {
    pub fn name(self) -> &'static str {
        match self {
            Chamber::A => "A",
            Chamber::C => "C",
            Chamber::D => "D",
        }
    }

    pub fn contains(self, x: &[f64]) -> bool {
        if x.windows(2).any(|w| !(w[0] < w[1])) {
            return false;
        }
        match self {
            Chamber::A => x.iter().all(|v| v.is_finite()),
            Chamber::C => x.first().map_or(true, |v| *v > 0.0) && x.iter().all(|v| v.is_finite()),
            Chamber::D => {
                x.len() < 2 || (x[0].abs() < x[1] && x.iter().all(|v| v.is_finite()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChamberPoint {
    chamber: Chamber,
    coords: Vec<f64>,
}

impl ChamberPoint {
    /// Wraps coordinates without checking membership; boundary points are
    /// legitimate inputs to densities, which then evaluate to zero.
    pub fn new(chamber: Chamber, coords: Vec<f64>) -> Self {
        Self { chamber, coords }
    }

    /// Like [`ChamberPoint::new`] but rejects points outside the open chamber.
    pub fn interior(chamber: Chamber, coords: Vec<f64>) -> Result<Self> {
        if !chamber.contains(&coords) {
            return domain(format!("{coords:?} is not interior to chamber {}", chamber.name()));
        }
        Ok(Self { chamber, coords })
    }

    pub fn origin(chamber: Chamber, n: usize) -> Self {
        Self::new(chamber, vec![0.0; n])
    }

    pub fn chamber(&self) -> Chamber {
        self.chamber
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_interior(&self) -> bool {
        self.chamber.contains(&self.coords)
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|v| *v == 0.0)
    }

    pub(crate) fn expect(&self, chamber: Chamber, label: &'static str) -> Result<&[f64]> {
        if self.chamber != chamber {
            return Err(Error::ChamberMismatch {
                expected: label,
                found: self.chamber,
            });
        }
        Ok(&self.coords)
    }
}

/// h^A = ∏(x_j − x_i) or h^{(α)} = ∏(x_j² − x_i²) ∏ x_k^α.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HKind {
    A,
    Alpha(f64),
}

impl HKind {
    pub const C: HKind = HKind::Alpha(1.0);
    pub const D: HKind = HKind::Alpha(0.0);
}

/// Sign and log-modulus of the h-polynomial.
pub fn log_h(kind: HKind, x: &[f64]) -> (f64, f64) {
    let mut sign = 1.0;
    let mut log = 0.0;
    let n = x.len();
    for i in 0..n {
        for j in i + 1..n {
            let d = match kind {
                HKind::A => x[j] - x[i],
                HKind::Alpha(_) => (x[j] - x[i]) * (x[j] + x[i]),
            };
            if d == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            sign *= d.signum();
            log += d.abs().ln();
        }
    }
    if let HKind::Alpha(a) = kind {
        if a != 0.0 {
            for &v in x {
                if v == 0.0 {
                    return (0.0, f64::NEG_INFINITY);
                }
                if v < 0.0 {
                    // x^α for negative x is only real for integer α.
                    if a.fract() != 0.0 {
                        return (f64::NAN, f64::NAN);
                    }
                    if (a as i64) % 2 != 0 {
                        sign = -sign;
                    }
                }
                log += a * v.abs().ln();
            }
        }
    }
    (sign, log)
}

pub fn h_poly(kind: HKind, x: &ChamberPoint) -> f64 {
    h_values(kind, x.coords())
}

pub(crate) fn h_values(kind: HKind, x: &[f64]) -> f64 {
    let (s, l) = log_h(kind, x);
    s * l.exp()
}

/// ψ[♯] as an exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    fn reduced(num: u64, den: u64) -> Self {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

pub fn exponent_psi(class: Chamber, n: usize) -> Ratio {
    let n = n as u64;
    match class {
        Chamber::A => Ratio::reduced(n * n.saturating_sub(1), 4),
        Chamber::C => Ratio::reduced(n * n, 2),
        Chamber::D => Ratio::reduced(n * n.saturating_sub(1), 2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormConst {
    /// (2π)^{N/2} ∏ Γ(i)
    CA,
    /// 2^{N/2} ∏ Γ(i/2)
    CAprime,
    /// (2π)^{N/2} ∏ Γ(2i)
    CAdoubleprime,
    /// 2^{N(N+ν−1)} ∏ Γ(i)Γ(i+ν)
    CNu(f64),
    /// 2^{N(N+2ν−κ−1)/2} π^{−N/2} ∏ Γ(i/2)Γ((i+2ν+1−κ)/2)
    CNuKappa(f64, f64),
    /// (π/2)^{N/2} ∏ Γ(2i)
    CC,
    /// (π/2)^{N/2} ∏ Γ(2i−1)
    CD,
    /// ∏ Γ(i)
    CCprime,
    /// 2^{(N−2)/2} Γ(N/2) ∏_{i<N} Γ(i)
    CDprime,
    /// 2^{3N/2} π^{N(2N+1)/2}
    LowerCC,
    /// 2^{N/2} π^{N(2N−1)/2}
    LowerCD,
    /// 2^N π^{N(N+1)/2}
    LowerCCprime,
    /// 2^{N/2} π^{N²/2}
    LowerCDprime,
    /// 2^{N(2N+2ν−1)} ∏ Γ(2i)Γ(2(i+ν))
    ChatNu(f64),
    /// 2^{2N(N−1)} ∏ Γ(2i)Γ(2i−1)
    CDdoubleprime,
    /// (2π)^N ∏_{i≤2N} Γ(i)
    C2nA,
    /// (π/2)^N ∏_{i≤2N} Γ(2i−1)
    C2nD,
}

fn sum_lgamma(range: std::ops::RangeInclusive<usize>, f: impl Fn(f64) -> f64) -> f64 {
    range.map(|i| lgamma(f(i as f64))).sum()
}

/// Natural logarithm of a normalisation constant at size N.
pub fn log_norm_constant(name: NormConst, n: usize) -> Result<f64> {
    if n == 0 {
        return domain("normalisation constants need N ≥ 1");
    }
    let nf = n as f64;
    let half_pi = (std::f64::consts::PI / 2.0).ln();
    let two_pi = (2.0 * std::f64::consts::PI).ln();
    Ok(match name {
        NormConst::CA => 0.5 * nf * two_pi + sum_lgamma(1..=n, |i| i),
        NormConst::CAprime => 0.5 * nf * LN_2 + sum_lgamma(1..=n, |i| i / 2.0),
        NormConst::CAdoubleprime => 0.5 * nf * two_pi + sum_lgamma(1..=n, |i| 2.0 * i),
        NormConst::CNu(nu) => {
            if !(nu > -1.0) {
                return domain(format!("C_nu requires nu > -1, got {nu}"));
            }
            nf * (nf + nu - 1.0) * LN_2 + sum_lgamma(1..=n, |i| i) + sum_lgamma(1..=n, |i| i + nu)
        }
        NormConst::CNuKappa(nu, kappa) => {
            check_meander(nu, kappa)?;
            0.5 * nf * (nf + 2.0 * nu - kappa - 1.0) * LN_2 - 0.5 * nf * LN_PI
                + sum_lgamma(1..=n, |i| i / 2.0)
                + sum_lgamma(1..=n, |i| (i + 2.0 * nu + 1.0 - kappa) / 2.0)
        }
        NormConst::CC => 0.5 * nf * half_pi + sum_lgamma(1..=n, |i| 2.0 * i),
        NormConst::CD => 0.5 * nf * half_pi + sum_lgamma(1..=n, |i| 2.0 * i - 1.0),
        NormConst::CCprime => sum_lgamma(1..=n, |i| i),
        NormConst::CDprime => {
            0.5 * (nf - 2.0) * LN_2 + lgamma(nf / 2.0) + sum_lgamma(1..=n - 1, |i| i)
        }
        NormConst::LowerCC => 1.5 * nf * LN_2 + 0.5 * nf * (2.0 * nf + 1.0) * LN_PI,
        NormConst::LowerCD => 0.5 * nf * LN_2 + 0.5 * nf * (2.0 * nf - 1.0) * LN_PI,
        NormConst::LowerCCprime => nf * LN_2 + 0.5 * nf * (nf + 1.0) * LN_PI,
        NormConst::LowerCDprime => 0.5 * nf * LN_2 + 0.5 * nf * nf * LN_PI,
        NormConst::ChatNu(nu) => {
            if !(nu > -1.0) {
                return domain(format!("Chat_nu requires nu > -1, got {nu}"));
            }
            nf * (2.0 * nf + 2.0 * nu - 1.0) * LN_2
                + sum_lgamma(1..=n, |i| 2.0 * i)
                + sum_lgamma(1..=n, |i| 2.0 * (i + nu))
        }
        NormConst::CDdoubleprime => {
            2.0 * nf * (nf - 1.0) * LN_2
                + sum_lgamma(1..=n, |i| 2.0 * i)
                + sum_lgamma(1..=n, |i| 2.0 * i - 1.0)
        }
        NormConst::C2nA => nf * two_pi + sum_lgamma(1..=2 * n, |i| i),
        NormConst::C2nD => nf * half_pi + sum_lgamma(1..=2 * n, |i| 2.0 * i - 1.0),
    })
}

pub fn norm_constant(name: NormConst, n: usize) -> Result<f64> {
    log_norm_constant(name, n).map(f64::exp)
}

pub(crate) fn check_meander(nu: f64, kappa: f64) -> Result<()> {
    if !(nu > -1.0) {
        return domain(format!("nu must exceed -1, got {nu}"));
    }
    if !(kappa >= 0.0 && kappa < 2.0 * (nu + 1.0)) {
        return domain(format!("kappa must lie in [0, 2(nu+1)) = [0, {}), got {kappa}", 2.0 * (nu + 1.0)));
    }
    Ok(())
}

/// Real dimension of the matrix spaces that appear as σ-powers in the
/// integral formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixSpace {
    A,
    Aprime,
    Adoubleprime,
    C,
    D,
    Cprime,
    Dprime,
    Ddoubleprime,
}

pub fn space_dimension(space: MatrixSpace, n: usize) -> usize {
    match space {
        MatrixSpace::A => n * n,
        MatrixSpace::Aprime => n * (n + 1) / 2,
        MatrixSpace::Adoubleprime => n * (2 * n - 1),
        MatrixSpace::C => n * (2 * n + 1),
        MatrixSpace::D => n * (2 * n - 1),
        MatrixSpace::Cprime => n * (n + 1),
        MatrixSpace::Dprime => n * n,
        MatrixSpace::Ddoubleprime => 2 * n * (2 * n - 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleTag {
    #[serde(rename = "GUE")]
    Gue,
    #[serde(rename = "GOE")]
    Goe,
    #[serde(rename = "GSE")]
    Gse,
    #[serde(rename = "chGUE")]
    ChGue,
    #[serde(rename = "chGOE")]
    ChGoe,
    #[serde(rename = "chGSE")]
    ChGse,
    C,
    #[serde(rename = "CI")]
    Ci,
    D,
    #[serde(rename = "Dprime")]
    Dprime,
    #[serde(rename = "DIII")]
    Diii,
}

impl EnsembleTag {
    pub const ALL: [EnsembleTag; 11] = [
        EnsembleTag::Gue,
        EnsembleTag::Goe,
        EnsembleTag::Gse,
        EnsembleTag::ChGue,
        EnsembleTag::ChGoe,
        EnsembleTag::ChGse,
        EnsembleTag::C,
        EnsembleTag::Ci,
        EnsembleTag::D,
        EnsembleTag::Dprime,
        EnsembleTag::Diii,
    ];

    pub fn chamber(self) -> Chamber {
        match self {
            EnsembleTag::Gue | EnsembleTag::Goe | EnsembleTag::Gse => Chamber::A,
            _ => Chamber::C,
        }
    }

    pub fn is_chiral(self) -> bool {
        matches!(self, EnsembleTag::ChGue | EnsembleTag::ChGoe | EnsembleTag::ChGse)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let l = s.to_ascii_lowercase();
        Some(match l.as_str() {
            "gue" => EnsembleTag::Gue,
            "goe" => EnsembleTag::Goe,
            "gse" => EnsembleTag::Gse,
            "chgue" => EnsembleTag::ChGue,
            "chgoe" => EnsembleTag::ChGoe,
            "chgse" => EnsembleTag::ChGse,
            "c" => EnsembleTag::C,
            "ci" | "cprime" => EnsembleTag::Ci,
            "d" => EnsembleTag::D,
            "dprime" => EnsembleTag::Dprime,
            "diii" => EnsembleTag::Diii,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub tag: EnsembleTag,
    pub n: usize,
    #[serde(default)]
    pub nu: f64,
    pub t: f64,
    /// Selects the odd-size DIII density (chGSE at ν=1/2) instead of the
    /// even one (ν=−1/2).
    #[serde(default)]
    pub diii_odd: bool,
}

impl EnsembleSpec {
    pub fn new(tag: EnsembleTag, n: usize, t: f64) -> Self {
        Self { tag, n, nu: 0.0, t, diii_odd: false }
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn odd(mut self) -> Self {
        self.diii_odd = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Spec("N must be at least 1".into()));
        }
        if !(self.t > 0.0) {
            return Err(Error::Spec(format!("variance t must be positive, got {}", self.t)));
        }
        if self.tag.is_chiral() && !(self.nu > -1.0) {
            return Err(Error::Spec(format!("chiral ensembles need nu > -1, got {}", self.nu)));
        }
        Ok(())
    }

    /// Log-density; −∞ on the chamber boundary.
    pub fn log_density(&self, point: &ChamberPoint) -> Result<f64> {
        self.validate()?;
        let want = self.tag.chamber();
        let y = point.expect(want, want.name())?;
        if y.len() != self.n {
            return Err(Error::Spec(format!("point has {} coordinates, N = {}", y.len(), self.n)));
        }
        if !want.contains(y) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(log_density_unchecked(self, y))
    }

    pub fn density(&self, point: &ChamberPoint) -> Result<f64> {
        self.log_density(point).map(f64::exp)
    }
}

pub fn density(spec: &EnsembleSpec, point: &ChamberPoint) -> Result<f64> {
    spec.density(point)
}

pub fn log_density(spec: &EnsembleSpec, point: &ChamberPoint) -> Result<f64> {
    spec.log_density(point)
}

fn lc(name: NormConst, n: usize) -> f64 {
    log_norm_constant(name, n).unwrap_or(f64::NAN)
}

/// Log-density for coordinates already known to lie in the open chamber.
pub(crate) fn log_density_unchecked(spec: &EnsembleSpec, y: &[f64]) -> f64 {
    let n = spec.n;
    let nf = n as f64;
    let lt = spec.t.ln();
    let gauss = -y.iter().map(|v| v * v).sum::<f64>() / (2.0 * spec.t);
    let ha = || log_h(HKind::A, y).1;
    let hal = |a: f64| log_h(HKind::Alpha(a), y).1;
    let nu = spec.nu;
    let body = match spec.tag {
        EnsembleTag::Gue => -0.5 * nf * nf * lt + 2.0 * ha() - lc(NormConst::CA, n),
        EnsembleTag::Goe => -0.25 * nf * (nf + 1.0) * lt + ha() - lc(NormConst::CAprime, n),
        EnsembleTag::Gse => {
            -0.5 * nf * (2.0 * nf - 1.0) * lt + 4.0 * ha() - lc(NormConst::CAdoubleprime, n)
        }
        EnsembleTag::ChGue => {
            -nf * (nf + nu) * lt + 2.0 * hal(nu + 0.5) - lc(NormConst::CNu(nu), n)
        }
        EnsembleTag::ChGoe => {
            -0.5 * nf * (nf + nu) * lt + hal(nu) - lc(NormConst::CNuKappa(nu, nu + 1.0), n)
        }
        EnsembleTag::ChGse => chgse(n, nu, lt, y),
        EnsembleTag::C => -0.5 * nf * (2.0 * nf + 1.0) * lt + 2.0 * hal(1.0) - lc(NormConst::CC, n),
        EnsembleTag::D => -0.5 * nf * (2.0 * nf - 1.0) * lt + 2.0 * hal(0.0) - lc(NormConst::CD, n),
        EnsembleTag::Ci => -0.5 * nf * (nf + 1.0) * lt + hal(1.0) - lc(NormConst::CCprime, n),
        EnsembleTag::Dprime => -0.5 * nf * nf * lt + hal(0.0) - lc(NormConst::CDprime, n),
        EnsembleTag::Diii => chgse(n, if spec.diii_odd { 0.5 } else { -0.5 }, lt, y),
    };
    body + gauss
}

fn chgse(n: usize, nu: f64, lt: f64, y: &[f64]) -> f64 {
    let nf = n as f64;
    let diffs = log_h(HKind::Alpha(0.0), y).1;
    let pow: f64 = y.iter().map(|v| v.ln()).sum();
    -2.0 * nf * (nf + nu) * lt + 4.0 * diffs + (4.0 * nu + 3.0) * pow - lc(NormConst::ChatNu(nu), n)
}
