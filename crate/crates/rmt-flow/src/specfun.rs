//! Special functions and the one-particle heat kernels.
//!
//! Kernels are evaluated in log space: `G(t,y|x)` multiplies a Gaussian factor
//! by `I_ν(xy/t)`, and the two overflow/underflow in opposite directions.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One-particle kernel family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelTag {
    /// Free Brownian motion on ℝ.
    A,
    /// Brownian motion on (0,∞) absorbed at the origin.
    C,
    /// Brownian motion on [0,∞) reflected at the origin.
    D,
    /// Bessel process of dimension 2(ν+1), ν > -1.
    Bessel(f64),
}

impl KernelTag {
    pub fn validate(self) -> Result<Self> {
        if let KernelTag::Bessel(nu) = self {
            if !(nu > -1.0) {
                return domain(format!("Bessel index must exceed -1, got {nu}"));
            }
        }
        Ok(self)
    }

    /// Whether the kernel lives on the half line.
    pub fn is_radial(self) -> bool {
        !matches!(self, KernelTag::A)
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("log_gamma needs a positive argument, got {x}"));
    }
    Ok(lgamma(x))
}

/// Unchecked ln Γ for internal use on arguments known to be positive.
#[inline]
pub(crate) fn lgamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal cumulative distribution.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// ln(e^{-z} I_ν(z)).
///
/// At z = 0 the value is ln I_ν(0): 0 for ν = 0, -∞ for ν > 0 and +∞ for
/// -1 < ν < 0.
pub fn bessel_i_log_scaled(nu: f64, z: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return domain(format!("Bessel index must exceed -1, got {nu}"));
    }
    if !(z >= 0.0) {
        return domain(format!("Bessel argument must be nonnegative, got {z}"));
    }
    Ok(log_scaled_i(nu, z))
}

pub(crate) fn log_scaled_i(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 {
            0.0
        } else if nu > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if z <= 20f64.max(nu * nu / 2.0) {
        log_i_series(nu, z) - z
    } else {
        log_scaled_i_asymptotic(nu, z)
    }
}

/// ln I_ν(z) from the defining power series. All terms are positive for
/// ν > -1, so the sum carries no cancellation.
fn log_i_series(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let log_t0 = nu * (0.5 * z).ln() - lgamma(nu + 1.0);
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut offset = 0.0f64;
    let mut n = 0.0f64;
    loop {
        n += 1.0;
        term *= q / (n * (n + nu));
        sum += term;
        if sum > 1e280 {
            offset += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        if term < 1e-17 * sum && n > 0.5 * z {
            break;
        }
        if n > 10_000.0 {
            break;
        }
    }
    log_t0 + offset + sum.ln()
}

/// Hankel expansion I_ν(z) ≈ e^z/√(2πz) Σ_k (-1)^k a_k(ν)/z^k, truncated at
/// its smallest term.
fn log_scaled_i_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut k = 0.0f64;
    loop {
        k += 1.0;
        let next = -term * (mu - (2.0 * k - 1.0).powi(2)) / (8.0 * k * z);
        if next == 0.0 {
            break;
        }
        if next.abs() >= term.abs() && k > 1.0 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() || k > 200.0 {
            break;
        }
    }
    sum.ln() - 0.5 * (2.0 * PI * z).ln()
}

/// I_{ν+1}(z)/I_ν(z) for z > 0.
pub(crate) fn bessel_ratio(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z < 1e-8 {
        // Leading term of the series avoids ln(0)-type cancellation.
        return z / (2.0 * (nu + 1.0));
    }
    (log_scaled_i(nu + 1.0, z) - log_scaled_i(nu, z)).exp()
}

fn check_kernel_args(tag: KernelTag, t: f64, y: f64, x: f64) -> Result<()> {
    tag.validate()?;
    if !(t > 0.0) {
        return domain(format!("kernel time must be positive, got {t}"));
    }
    if tag.is_radial() && (x < 0.0 || y < 0.0) {
        return domain(format!(
            "kernel {tag:?} is defined on the half line, got x={x}, y={y}"
        ));
    }
    if !(x.is_finite() && y.is_finite()) {
        return domain("kernel coordinates must be finite");
    }
    Ok(())
}

/// ln G(t,y|x). Returns -∞ where the kernel vanishes.
pub fn log_heat_kernel(tag: KernelTag, t: f64, y: f64, x: f64) -> Result<f64> {
    check_kernel_args(tag, t, y, x)?;
    Ok(log_kernel_unchecked(tag, t, y, x))
}

pub(crate) fn log_kernel_unchecked(tag: KernelTag, t: f64, y: f64, x: f64) -> f64 {
    let gauss = -(y - x) * (y - x) / (2.0 * t) - LN_SQRT_2PI - 0.5 * t.ln();
    match tag {
        KernelTag::A => gauss,
        KernelTag::C => {
            let u = 2.0 * x * y / t;
            if u == 0.0 {
                f64::NEG_INFINITY
            } else {
                gauss + (-(-u).exp_m1()).ln()
            }
        }
        KernelTag::D => gauss + (-2.0 * x * y / t).exp().ln_1p(),
        KernelTag::Bessel(nu) => log_bessel_kernel(nu, t, y, x),
    }
}

fn log_bessel_kernel(nu: f64, t: f64, y: f64, x: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        // Both branches reduce to y^{2ν+1} e^{-(x²+y²)/2t} / (2^ν Γ(ν+1) t^{ν+1}).
        let p = 2.0 * nu + 1.0;
        let ly = if y == 0.0 {
            if p > 0.0 {
                return f64::NEG_INFINITY;
            } else if p == 0.0 {
                0.0
            } else {
                return f64::INFINITY;
            }
        } else {
            p * y.ln()
        };
        return ly - (x * x + y * y) / (2.0 * t) - nu * LN_2 - lgamma(nu + 1.0) - (nu + 1.0) * t.ln();
    }
    let z = x * y / t;
    (nu + 1.0) * y.ln() - nu * x.ln() - t.ln() - (x - y) * (x - y) / (2.0 * t) + log_scaled_i(nu, z)
}

/// G(t,y|x) for the chosen family.
pub fn heat_kernel(tag: KernelTag, t: f64, y: f64, x: f64) -> Result<f64> {
    Ok(log_heat_kernel(tag, t, y, x)?.exp())
}

/// ∂_y ln G^{(ν)}(t,y|x) = (2ν+1)/y − y/t + (x/t)·I_{ν+1}(z)/I_ν(z), z = xy/t.
pub(crate) fn bessel_dlog_dy(nu: f64, t: f64, y: f64, x: f64) -> f64 {
    let base = (2.0 * nu + 1.0) / y - y / t;
    if x == 0.0 {
        base
    } else {
        base + x / t * bessel_ratio(nu, x * y / t)
    }
}

/// ∂G^{(ν)}(t,y|x)/∂y, using I_ν′ = I_{ν+1} + (ν/z) I_ν.
pub fn heat_kernel_dy(nu: f64, t: f64, y: f64, x: f64) -> Result<f64> {
    let (s, l) = heat_kernel_dy_log(nu, t, y, x)?;
    Ok(s * l.exp())
}

/// Sign and log-modulus of ∂G^{(ν)}/∂y.
pub fn heat_kernel_dy_log(nu: f64, t: f64, y: f64, x: f64) -> Result<(f64, f64)> {
    check_kernel_args(KernelTag::Bessel(nu), t, y, x)?;
    if !(y > 0.0) {
        return domain("the y-derivative of the Bessel kernel needs y > 0");
    }
    let d = bessel_dlog_dy(nu, t, y, x);
    let lg = log_bessel_kernel(nu, t, y, x);
    Ok((d.signum(), lg + d.abs().ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn log_gamma_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-15);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn log_gamma_matches_recursion_from_series() {
        // Γ on (1,2) from the Euler-Maclaurin-free Weierstrass-type series
        // ln Γ(1+x) = -γx + Σ_{k≥2} (-1)^k ζ(k) x^k / k, then Γ(x+1) = xΓ(x).
        let x0 = 0.3f64; // Γ(1.3)
        let zeta: Vec<f64> = (2..80)
            .map(|k| {
                // Partial sum plus the Euler-Maclaurin tail beyond M.
                let m = 2000.0f64;
                let kf = k as f64;
                let head: f64 = (1..2000).map(|n| (n as f64).powi(-k)).sum();
                head + m.powf(1.0 - kf) / (kf - 1.0) + 0.5 * m.powf(-kf) + kf * m.powf(-kf - 1.0) / 12.0
            })
            .collect();
        let euler = 0.577_215_664_901_532_9;
        let mut lg = -euler * x0;
        for (i, z) in zeta.iter().enumerate() {
            let k = (i + 2) as i32;
            lg += if k % 2 == 0 { 1.0 } else { -1.0 } * z * x0.powi(k) / k as f64;
        }
        let mut g = lg.exp();
        let mut x = 1.0 + x0;
        while x < 7.3 - 1e-9 {
            g *= x;
            x += 1.0;
        }
        assert!(rel(log_gamma(7.3).unwrap().exp(), g) < 1e-12);
    }

    #[test]
    fn bessel_at_zero_and_half_integer() {
        assert_eq!(bessel_i_log_scaled(0.0, 0.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let exact = (e - 1.0 / e) / (2.0 * PI).sqrt();
        let got = (bessel_i_log_scaled(0.5, 1.0).unwrap() + 1.0).exp();
        assert!(rel(got, exact) < 1e-14);
        assert!(bessel_i_log_scaled(-1.0, 1.0).is_err());
        assert!(bessel_i_log_scaled(0.0, -1.0).is_err());
    }

    // Mid-sized reference values computed once with 50-digit arithmetic.
    #[test]
    fn bessel_matches_reference_values() {
        let cases = [
            (2.7, 13.4, 54786.687483140668),
            (0.0, 1.0, 1.2660658777520083),
            (1.0, 25.0, 5657865129.8787014),
            (0.5, 30.0, 778366068840.4464),
            (-0.5, 0.01, 7.979244553633585),
        ];
        for (nu, z, value) in cases {
            let got = (log_scaled_i(nu, z) + z).exp();
            assert!(rel(got, value) < 1e-12, "nu={nu} z={z}: {got} vs {value}");
        }
    }

    #[test]
    fn bessel_series_oracle_at_two_point_seven() {
        // 200 terms in compensated summation.
        let (nu, z) = (2.7f64, 13.4f64);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for n in 0..200 {
            let lt = (2.0 * n as f64 + nu) * (z / 2.0).ln() - lgamma(n as f64 + 1.0) - lgamma(nu + n as f64 + 1.0);
            let y = lt.exp() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        let got = (log_scaled_i(nu, z) + z).exp();
        assert!(rel(got, sum) < 1e-12);
    }

    #[test]
    fn asymptotic_and_series_agree_near_switch() {
        for nu in [0.0, 0.3, 1.0, 2.5, 3.0] {
            for z in [20.5, 22.0, 30.0] {
                let a = log_scaled_i_asymptotic(nu, z);
                let s = log_i_series(nu, z) - z;
                assert!((a - s).abs() < 1e-10, "nu={nu} z={z}: {a} vs {s}");
            }
        }
    }

    #[test]
    fn scaled_bessel_does_not_overflow() {
        for z in [1e3, 1e6, 1e8] {
            let v = log_scaled_i(1.3, z);
            assert!(v.is_finite());
            assert!((v + 0.5 * (2.0 * PI * z).ln()).abs() < 1e-2);
        }
    }

    #[test]
    fn kernel_examples() {
        let a = heat_kernel(KernelTag::A, 1.0, 0.0, 0.0).unwrap();
        assert!(rel(a, 1.0 / (2.0 * PI).sqrt()) < 1e-15);
        let c = heat_kernel(KernelTag::C, 1.0, 1.0, 1.0).unwrap();
        assert!(rel(c, (1.0 - (-2.0f64).exp()) / (2.0 * PI).sqrt()) < 1e-15);
        assert!(heat_kernel(KernelTag::C, 1.0, -1.0, 1.0).is_err());
        assert!(heat_kernel(KernelTag::Bessel(-1.0), 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn half_integer_bessel_kernels_reduce_to_c_and_d() {
        for &(t, x, y) in &[(1.0, 0.5, 1.5), (0.2, 2.0, 0.1), (3.0, 0.01, 4.0), (0.5, 7.0, 6.5)] {
            let b = heat_kernel(KernelTag::Bessel(0.5), t, y, x).unwrap();
            let c = heat_kernel(KernelTag::C, t, y, x).unwrap();
            assert!(rel(b, c * y / x) < 1e-12);
            let b = heat_kernel(KernelTag::Bessel(-0.5), t, y, x).unwrap();
            let d = heat_kernel(KernelTag::D, t, y, x).unwrap();
            assert!(rel(b, d) < 1e-12);
        }
    }

    #[test]
    fn origin_branch_is_the_small_x_limit() {
        for nu in [-0.5, 0.0, 0.5, 1.7] {
            let g0 = heat_kernel(KernelTag::Bessel(nu), 0.8, 1.1, 0.0).unwrap();
            let g1 = heat_kernel(KernelTag::Bessel(nu), 0.8, 1.1, 1e-6).unwrap();
            assert!(rel(g1, g0) < 1e-8);
        }
    }

    fn fd(nu: f64, t: f64, y: f64, x: f64) -> f64 {
        let h = 1e-5 * y;
        let g = |yy| heat_kernel(KernelTag::Bessel(nu), t, yy, x).unwrap();
        (g(y + h) - g(y - h)) / (2.0 * h)
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for &(nu, t, y, x) in &[(0.0, 1.0, 2.0, 1.0), (1.0, 0.5, 0.7, 0.3), (0.5, 1.0, 1.3, 0.0), (2.2, 0.1, 3.0, 2.9)] {
            let a = heat_kernel_dy(nu, t, y, x).unwrap();
            assert!(rel(a, fd(nu, t, y, x)) < 1e-6, "nu={nu}");
        }
        // x = 0 branch against direct differentiation of c·y^{2ν+1}e^{-y²/2t}.
        let (nu, t, y) = (0.5, 1.0, 1.3);
        let g = heat_kernel(KernelTag::Bessel(nu), t, y, 0.0).unwrap();
        let exact = g * ((2.0 * nu + 1.0) / y - y / t);
        assert!(rel(heat_kernel_dy(nu, t, y, 0.0).unwrap(), exact) < 1e-14);
        assert!(heat_kernel_dy(nu, t, 0.0, 1.0).is_err());
    }
}
