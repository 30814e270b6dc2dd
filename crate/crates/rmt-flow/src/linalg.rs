//! Dense complex matrices, Pauli/Kronecker constructions and a cyclic Jacobi
//! eigensolver for Hermitian matrices.

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::ensembles::{Chamber, ChamberPoint};
use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Spec(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| C64::new(f(i, j), 0.0))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `M` from `M†`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(j, i)] - self[(i, j)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Whether every entry has vanishing imaginary part.
    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    /// Kronecker product, `(A⊗B)[i p + k][j q + l] = A[i][j] B[k][l]` for `B` of size p×q.
    pub fn kron(&self, b: &Self) -> Self {
        let (p, q) = (b.rows, b.cols);
        let mut out = Self::zeros(self.rows * p, self.cols * q);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = a * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::Spec("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, a[r * n + k].norm()))
                .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if best == 0.0 {
                return Ok(ZERO);
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let piv = a[k * n + k];
            det *= piv;
            for r in k + 1..n {
                let f = a[r * n + k] / piv;
                if f == ZERO {
                    continue;
                }
                for c in k + 1..n {
                    let v = a[k * n + c];
                    a[r * n + c] -= f * v;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// The Pauli matrices σ_0 = I, σ_1, σ_2, σ_3.
pub fn sigma(mu: usize) -> ComplexMatrix {
    let z = ZERO;
    let o = ONE;
    let data = match mu {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, -I, I, z],
        3 => vec![o, z, z, -o],
        _ => panic!("Pauli index {mu} out of range"),
    };
    ComplexMatrix {
        rows: 2,
        cols: 2,
        data,
    }
}

/// Σ_μ = I_N ⊗ σ_μ.
pub fn sigma_mu(n: usize, mu: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n).kron(&sigma(mu))
}

/// J = I_N ⊗ [[0,1],[-1,0]], the symplectic form (equal to √-1 Σ_2).
pub fn symplectic_j(n: usize) -> ComplexMatrix {
    let j = ComplexMatrix::from_real(2, 2, |a, b| match (a, b) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    });
    ComplexMatrix::identity(n).kron(&j)
}

/// Levi-Civita symbol on {1,2,3}.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

/// The (N+ν)×N matrix with `x` on the leading diagonal and zeros elsewhere.
pub fn k_embedding(x: &[f64], nu: usize) -> ComplexMatrix {
    let n = x.len();
    ComplexMatrix::from_real(n + nu, n, |i, j| if i == j { x[i] } else { 0.0 })
}

#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Eigen-decomposition of a Hermitian matrix by cyclic two-sided Jacobi
/// rotations. Eigenvalues are ascending; each eigenvector is normalised so
/// that its first non-negligible component is real and positive.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Spec("eigen-decomposition of a non-square matrix".into()));
    }
    let defect = m.hermitian_defect();
    let scale = m.max_abs().max(1.0);
    if defect > tol::EIG_INPUT_HERMITIAN * scale {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows;
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let target = tol::JACOBI_OFFDIAG * a.frobenius();
    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == tol::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let lead = |col: usize| -> usize {
        (0..n)
            .find(|&r| v[(r, col)].norm() > 1e-12)
            .unwrap_or(n)
    };
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .total_cmp(&a[(j, j)].re)
            .then_with(|| lead(i).cmp(&lead(j)))
    });
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (c, &k) in order.iter().enumerate() {
        let r0 = lead(k).min(n - 1);
        let z = v[(r0, k)];
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { ONE };
        for r in 0..n {
            vectors[(r, c)] = v[(r, k)] * phase;
        }
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.values)
}

// One Jacobi rotation annihilating a[p][q]; A <- V† A V, U <- U V.
fn rotate(a: &mut ComplexMatrix, u: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows;
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Guard against underflow in the rotation angle for negligible entries.
    if g < 1e-300 {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g; // e^{iφ}
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // V_pp = c, V_pq = s, V_qp = -s e^{-iφ}, V_qq = c e^{-iφ}
    let em = phase.conj();
    let vqp = -em * s;
    let vqq = em * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * vqp;
        a[(k, q)] = akp * s + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * vqp.conj();
        a[(q, k)] = apk * s + aqk * vqq.conj();
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp * c + ukq * vqp;
        u[(k, q)] = ukp * s + ukq * vqq;
    }
}

/// Ascending singular values of a rectangular matrix `M`, i.e. the square
/// roots of the eigenvalues of `M†M`.
pub fn radial_coordinates(m: &ComplexMatrix) -> Result<ChamberPoint> {
    let mm = &m.adjoint() * m;
    let vals = eigvalsh(&mm)?;
    Ok(ChamberPoint::new(
        Chamber::C,
        vals.into_iter().map(|l| l.max(0.0).sqrt()).collect(),
    ))
}

/// Sign and log-modulus of a real determinant whose entries are given as
/// `sign[i][j] · exp(log_abs[i][j])` (row-major). Each column is rescaled by
/// its largest entry before the LU factorisation so that entries spanning
/// hundreds of orders of magnitude do not overflow.
pub fn det_from_log_entries(signs: &[f64], log_abs: &[f64], n: usize) -> (f64, f64) {
    assert_eq!(signs.len(), n * n);
    assert_eq!(log_abs.len(), n * n);
    let mut shift = 0.0;
    let mut a = vec![0.0; n * n];
    for j in 0..n {
        let cmax = (0..n)
            .map(|i| log_abs[i * n + j])
            .fold(f64::NEG_INFINITY, f64::max);
        if cmax == f64::NEG_INFINITY {
            return (0.0, f64::NEG_INFINITY);
        }
        shift += cmax;
        for i in 0..n {
            a[i * n + j] = signs[i * n + j] * (log_abs[i * n + j] - cmax).exp();
        }
    }
    let (s, l) = log_det_real(&mut a, n);
    (s, l + shift)
}

/// Sign and log-modulus of a real n×n determinant (row-major, overwritten).
pub fn log_det_real(a: &mut [f64], n: usize) -> (f64, f64) {
    let mut sign = 1.0;
    let mut logabs = 0.0;
    for k in 0..n {
        let mut p = k;
        for r in k + 1..n {
            if a[r * n + k].abs() > a[p * n + k].abs() {
                p = r;
            }
        }
        let piv = a[p * n + k];
        if piv == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        if piv < 0.0 {
            sign = -sign;
        }
        logabs += piv.abs().ln();
        for r in k + 1..n {
            let f = a[r * n + k] / piv;
            if f == 0.0 {
                continue;
            }
            for c in k + 1..n {
                a[r * n + c] -= f * a[k * n + c];
            }
        }
    }
    (sign, logabs)
}

/// Plain real determinant.
pub fn det_real(a: &[f64], n: usize) -> f64 {
    let mut b = a.to_vec();
    let (s, l) = log_det_real(&mut b, n);
    s * l.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identity_with_sigma1_is_block_diagonal() {
        let k = ComplexMatrix::identity(2).kron(&sigma(1));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i / 2 == j / 2 && i != j { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn sigma1_kron_squared_is_identity() {
        let k = sigma(1).kron(&sigma(1));
        assert_eq!(&k * &k, ComplexMatrix::identity(4));
    }

    #[test]
    fn sigma2_embedding_is_antisymmetric() {
        let s = sigma_mu(2, 2);
        let st = s.transpose();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(st[(i, j)], -s[(i, j)]);
            }
        }
    }

    #[test]
    fn pauli_algebra() {
        for mu in 1..=3 {
            assert_eq!(&sigma(mu) * &sigma(mu), ComplexMatrix::identity(2));
            for rho in 1..=3 {
                if mu == rho {
                    continue;
                }
                let mut rhs = ComplexMatrix::zeros(2, 2);
                for w in 1..=3 {
                    rhs = &rhs + &sigma(w).scale(I * levi_civita(mu, rho, w));
                }
                assert!((&sigma(mu) * &sigma(rho)).max_abs_diff(&rhs) < 1e-15);
            }
        }
        assert!(symplectic_j(3).max_abs_diff(&sigma_mu(3, 2).scale(I)) < 1e-15);
    }

    #[test]
    fn diagonal_input_is_sorted_by_permutation() {
        let m = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0]);
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let perm = [1usize, 2, 0];
        for (col, &row) in perm.iter().enumerate() {
            assert_eq!(e.vectors[(row, col)], c(1.0, 0.0));
        }
    }

    #[test]
    fn sigma1_spectrum() {
        let e = hermitian_eig(&sigma(1)).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn k_embedding_round_trip() {
        let k = radial_coordinates(&k_embedding(&[1.0, 3.0], 2)).unwrap();
        assert!((k.coords()[0] - 1.0).abs() < 1e-12 && (k.coords()[1] - 3.0).abs() < 1e-12);
        let s = radial_coordinates(&ComplexMatrix::from_vec(1, 1, vec![c(2.0, 0.0)]).unwrap()).unwrap();
        assert_eq!(s.coords(), &[2.0]);
    }

    #[test]
    fn log_scaled_determinant_matches_plain() {
        let vals = [2.0, -1.0, 0.5, 3.0, 1e-3, 4.0, -2.0, 0.25, 7.0];
        let signs: Vec<f64> = vals.iter().map(|v: &f64| v.signum()).collect();
        let logs: Vec<f64> = vals.iter().map(|v: &f64| v.abs().ln()).collect();
        let (s, l) = det_from_log_entries(&signs, &logs, 3);
        assert!((s * l.exp() - det_real(&vals, 3)).abs() < 1e-12);
    }
}
