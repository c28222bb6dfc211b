//! Wigner D-matrices on SO(3), Wigner d-polynomials, the Weyl and sign
//! groups, projection matrices and the u/v basis vectors, all indexed from
//! the central entry.
//!
//! D^d(k) is computed from the action of k on a ladder-generated basis of
//! harmonic polynomials of degree d. This is polynomial in the matrix
//! entries, so the same code runs on floating matrices, on exact signed
//! integer matrices (Weyl and sign-group elements) and on jet-valued
//! matrices, with no Euler-angle recovery anywhere.

use crate::error::{Gl3Error, Result};
use crate::jets::Jet;
use crate::scalar::{Mat3, Scalar};
use crate::spectral::SpectralParameter;
use crate::surd::{factorial_big, SurdComplex, SurdScalar};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use num_complex::Complex64;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

// ---------------------------------------------------------------------------
// center-indexed containers
// ---------------------------------------------------------------------------

/// Complex (2d+1)-vector indexed m = -d..d from the central entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterIndexedVector {
    d: usize,
    v: Vec<Complex64>,
}

impl CenterIndexedVector {
    pub fn zeros(d: usize) -> Self {
        CenterIndexedVector {
            d,
            v: vec![Complex64::new(0.0, 0.0); 2 * d + 1],
        }
    }

    pub fn from_fn(d: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let mut out = Self::zeros(d);
        for m in -(d as i64)..=(d as i64) {
            out.set(m, f(m)).expect("in range");
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        2 * self.d + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn offset(&self, m: i64) -> Result<usize> {
        let i = m + self.d as i64;
        if i < 0 || i as usize >= self.v.len() {
            Err(Gl3Error::IndexOutOfRange { index: m, dim: self.d })
        } else {
            Ok(i as usize)
        }
    }

    pub fn get(&self, m: i64) -> Result<Complex64> {
        Ok(self.v[self.offset(m)?])
    }

    /// Entry at m, or zero when m is outside [-d, d].
    pub fn get_or_zero(&self, m: i64) -> Complex64 {
        self.offset(m).map(|i| self.v[i]).unwrap_or_default()
    }

    pub fn set(&mut self, m: i64, value: Complex64) -> Result<()> {
        let i = self.offset(m)?;
        self.v[i] = value;
        Ok(())
    }

    pub fn add_to(&mut self, m: i64, value: Complex64) -> Result<()> {
        let i = self.offset(m)?;
        self.v[i] += value;
        Ok(())
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.v
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CenterIndexedVector {
            d: self.d,
            v: self.v.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        CenterIndexedVector {
            d: self.d,
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn norm(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product, conjugating the second argument.
    pub fn dot(&self, other: &Self) -> Complex64 {
        assert_eq!(self.d, other.d);
        self.v.iter().zip(&other.v).map(|(a, b)| a * b.conj()).sum()
    }

    /// Bilinear pairing v * w^T without conjugation.
    pub fn pair(&self, other: &Self) -> Complex64 {
        assert_eq!(self.d, other.d);
        self.v.iter().zip(&other.v).map(|(a, b)| a * b).sum()
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &CenterIndexedMatrix) -> Self {
        assert_eq!(self.d, m.dim());
        let d = self.d as i64;
        CenterIndexedVector::from_fn(self.d, |col| {
            (-d..=d)
                .map(|row| self.get_or_zero(row) * m.get(row, col).unwrap())
                .sum()
        })
    }
}

/// Complex (2d+1) x (2d+1) matrix addressed by (m', m), each in [-d, d].
#[derive(Clone, Debug, PartialEq)]
pub struct CenterIndexedMatrix {
    d: usize,
    m: Vec<Complex64>,
}

impl CenterIndexedMatrix {
    pub fn zeros(d: usize) -> Self {
        let n = 2 * d + 1;
        CenterIndexedMatrix {
            d,
            m: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut out = Self::zeros(d);
        for m in -(d as i64)..=(d as i64) {
            out.set(m, m, Complex64::new(1.0, 0.0)).unwrap();
        }
        out
    }

    pub fn from_fn(d: usize, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let mut out = Self::zeros(d);
        for mp in -(d as i64)..=(d as i64) {
            for m in -(d as i64)..=(d as i64) {
                out.set(mp, m, f(mp, m)).unwrap();
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn offset(&self, mp: i64, m: i64) -> Result<usize> {
        let n = 2 * self.d as i64 + 1;
        let i = mp + self.d as i64;
        let j = m + self.d as i64;
        if i < 0 || i >= n || j < 0 || j >= n {
            return Err(Gl3Error::IndexOutOfRange {
                index: if i < 0 || i >= n { mp } else { m },
                dim: self.d,
            });
        }
        Ok((i * n + j) as usize)
    }

    pub fn get(&self, mp: i64, m: i64) -> Result<Complex64> {
        Ok(self.m[self.offset(mp, m)?])
    }

    pub fn set(&mut self, mp: i64, m: i64, value: Complex64) -> Result<()> {
        let i = self.offset(mp, m)?;
        self.m[i] = value;
        Ok(())
    }

    pub fn row(&self, mp: i64) -> CenterIndexedVector {
        CenterIndexedVector::from_fn(self.d, |m| self.get(mp, m).unwrap())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let d = self.d as i64;
        Self::from_fn(self.d, |i, j| {
            (-d..=d).map(|k| self.get(i, k).unwrap() * other.get(k, j).unwrap()).sum()
        })
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.d, |i, j| self.get(j, i).unwrap().conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CenterIndexedMatrix {
            d: self.d,
            m: self.m.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        CenterIndexedMatrix {
            d: self.d,
            m: self.m.iter().zip(&other.m).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d);
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Matrix with exact surd entries; used for D-matrices at Weyl and sign
/// elements and for the projection matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    d: usize,
    e: Vec<SurdComplex>,
}

impl ExactMatrix {
    pub fn zeros(d: usize) -> Self {
        let n = 2 * d + 1;
        ExactMatrix {
            d,
            e: vec![SurdComplex::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn idx(&self, mp: i64, m: i64) -> usize {
        let n = 2 * self.d as i64 + 1;
        ((mp + self.d as i64) * n + (m + self.d as i64)) as usize
    }

    pub fn get(&self, mp: i64, m: i64) -> &SurdComplex {
        &self.e[self.idx(mp, m)]
    }

    pub fn set(&mut self, mp: i64, m: i64, v: SurdComplex) {
        let i = self.idx(mp, m);
        self.e[i] = v;
    }

    pub fn to_complex(&self) -> CenterIndexedMatrix {
        CenterIndexedMatrix::from_fn(self.d, |mp, m| self.get(mp, m).to_c64())
    }
}

// ---------------------------------------------------------------------------
// rotation matrices, Weyl group, sign group
// ---------------------------------------------------------------------------

/// A 3x3 special orthogonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    m: [[f64; 3]; 3],
}

impl RotationMatrix {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((dot - target).abs());
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        defect = defect.max((det - 1.0).abs());
        if defect > 1e-12 {
            return Err(Gl3Error::NonOrthogonal { defect });
        }
        Ok(RotationMatrix { m })
    }

    pub fn identity() -> Self {
        RotationMatrix {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        RotationMatrix { m: out }
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.m[j][i];
            }
        }
        RotationMatrix { m: out }
    }
}

/// Rotation about the vertical axis by theta.
pub fn k_angle(theta: f64) -> RotationMatrix {
    let (s, c) = theta.sin_cos();
    RotationMatrix {
        m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
    }
}

/// Z-Y-Z rotation k(alpha, beta, gamma) = k(alpha) w3 k(-beta) w3 k(gamma).
pub fn euler_rotation(alpha: f64, beta: f64, gamma: f64) -> RotationMatrix {
    let w3 = Weyl::W3.rotation();
    k_angle(alpha)
        .mul(&w3)
        .mul(&k_angle(-beta))
        .mul(&w3)
        .mul(&k_angle(gamma))
}

/// The six Weyl representatives, stored with their signs (mod +-I they are
/// the permutation matrices; the signs matter for D-matrix values at odd d).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weyl {
    Id,
    W2,
    W3,
    W4,
    W5,
    Wl,
}

impl Weyl {
    pub const ALL: [Weyl; 6] = [Weyl::Id, Weyl::W2, Weyl::W3, Weyl::W4, Weyl::W5, Weyl::Wl];

    pub fn int_matrix(&self) -> [[i64; 3]; 3] {
        match self {
            Weyl::Id => [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            Weyl::W2 => [[0, -1, 0], [-1, 0, 0], [0, 0, -1]],
            Weyl::W3 => [[-1, 0, 0], [0, 0, -1], [0, -1, 0]],
            Weyl::W4 => [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
            Weyl::W5 => [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
            Weyl::Wl => [[0, 0, -1], [0, -1, 0], [-1, 0, 0]],
        }
    }

    pub fn rotation(&self) -> RotationMatrix {
        let m = self.int_matrix();
        RotationMatrix::new(std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] as f64)))
            .expect("Weyl representatives are special orthogonal")
    }

    /// Coordinate permutation sigma with (mu^w)_i = mu_{sigma(i)}.
    pub fn permutation(&self) -> [usize; 3] {
        match self {
            Weyl::Id => [0, 1, 2],
            Weyl::W2 => [1, 0, 2],
            Weyl::W3 => [0, 2, 1],
            Weyl::W4 => [2, 0, 1],
            Weyl::W5 => [1, 2, 0],
            Weyl::Wl => [2, 1, 0],
        }
    }
}

/// Element v_{e1,e2} = diag(e1, e1 e2, e2) of the diagonal sign group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VSign {
    pub eps1: i8,
    pub eps2: i8,
}

impl VSign {
    pub const ALL: [VSign; 4] = [
        VSign { eps1: 1, eps2: 1 },
        VSign { eps1: 1, eps2: -1 },
        VSign { eps1: -1, eps2: 1 },
        VSign { eps1: -1, eps2: -1 },
    ];

    pub fn new(eps1: i8, eps2: i8) -> Self {
        assert!(eps1.abs() == 1 && eps2.abs() == 1);
        VSign { eps1, eps2 }
    }

    pub fn int_matrix(&self) -> [[i64; 3]; 3] {
        let (e1, e2) = (self.eps1 as i64, self.eps2 as i64);
        [[e1, 0, 0], [0, e1 * e2, 0], [0, 0, e2]]
    }
}

/// Character of the sign group, determined by its values on the two
/// generators: chi(v_{-+}) = eps1, chi(v_{+-}) = eps2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VCharacter {
    pub eps1: i8,
    pub eps2: i8,
}

impl VCharacter {
    pub fn new(eps1: i8, eps2: i8) -> Self {
        assert!(eps1.abs() == 1 && eps2.abs() == 1);
        VCharacter { eps1, eps2 }
    }

    pub fn eval(&self, v: VSign) -> i64 {
        let mut c = 1i64;
        if v.eps1 < 0 {
            c *= self.eps1 as i64;
        }
        if v.eps2 < 0 {
            c *= self.eps2 as i64;
        }
        c
    }
}

fn int_mat_mul(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn int_mat_inv_orthogonal(a: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    // inverse of a signed permutation matrix is its transpose
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// Returns v' with w v = v' w, i.e. v' = w v w^{-1} reduced mod +-I.
pub fn wv_commutation(w: Weyl, v: VSign) -> VSign {
    let m = int_mat_mul(&int_mat_mul(&w.int_matrix(), &v.int_matrix()), &int_mat_inv_orthogonal(&w.int_matrix()));
    // m is diagonal with +-1 entries and det +-1; reduce mod -I to det +1
    let (a, c) = (m[0][0], m[2][2]);
    debug_assert!(m[0][1] == 0 && m[1][0] == 0);
    let det = m[0][0] * m[1][1] * m[2][2];
    if det == 1 {
        VSign::new(a as i8, c as i8)
    } else {
        VSign::new(-a as i8, -c as i8)
    }
}

/// Coordinate permutation of the spectral parameter induced by w.
pub fn weyl_action(mu: &SpectralParameter, w: Weyl) -> SpectralParameter {
    let p = w.permutation();
    let m = mu.as_array();
    SpectralParameter::new_unchecked([m[p[0]], m[p[1]], m[p[2]]])
}

// ---------------------------------------------------------------------------
// Jacobi polynomials and Wigner d-polynomials
// ---------------------------------------------------------------------------

/// Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.
pub fn jacobi_polynomial(n: u32, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let p1 = (a - b + x * (2.0 + a + b)) / 2.0;
    if n == 1 {
        return p1;
    }
    let mut pm2 = 1.0;
    let mut pm1 = p1;
    for k in 2..=n {
        let k = k as f64;
        let c1 = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0);
        let c2 = (2.0 * k + a + b - 1.0) * ((2.0 * k + a + b) * (2.0 * k + a + b - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + a + b);
        let p = (c2 * pm1 - c3 * pm2) / c1;
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

fn ln_factorial(n: i64) -> f64 {
    assert!(n >= 0);
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Wigner d-polynomial: entry (m_row, m_col) of D^d at a rotation about the
/// middle axis with cos(beta) = x.
pub fn wigner_small_d(d: usize, m_row: i64, m_col: i64, x: f64) -> Result<f64> {
    let dd = d as i64;
    if m_row.abs() > dd || m_col.abs() > dd {
        return Err(Gl3Error::IndexOutOfRange {
            index: if m_row.abs() > dd { m_row } else { m_col },
            dim: d,
        });
    }
    // reduce by the symmetries so the column index dominates: the Jacobi
    // parameters are then nonnegative
    let (mp, m, sign) = if m_col >= m_row.abs() {
        (m_row, m_col, 1.0)
    } else if -m_col >= m_row.abs() {
        (-m_row, -m_col, if (m_row + m_col) % 2 == 0 { 1.0 } else { -1.0 })
    } else if m_row >= m_col.abs() {
        (m_col, m_row, if (m_row + m_col) % 2 == 0 { 1.0 } else { -1.0 })
    } else {
        (-m_col, -m_row, 1.0)
    };
    debug_assert!(m >= mp.abs());
    let a = (m - mp) as f64;
    let b = (m + mp) as f64;
    let ln_ratio = 0.5
        * (ln_factorial(dd + m) + ln_factorial(dd - m) - ln_factorial(dd + mp) - ln_factorial(dd - mp));
    let pref = 0.5f64.powi(m as i32) * ln_ratio.exp();
    let half = |t: f64, e: f64| -> f64 {
        if e == 0.0 {
            1.0
        } else {
            t.powf(e)
        }
    };
    let val = pref
        * half(1.0 - x, a / 2.0)
        * half(1.0 + x, b / 2.0)
        * jacobi_polynomial((dd - m) as u32, a, b, x);
    Ok(sign * val)
}

// ---------------------------------------------------------------------------
// harmonic-polynomial model of D^d
// ---------------------------------------------------------------------------

/// Gaussian rational: exact complex number with rational real/imag parts.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    fn zero() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    fn one() -> Self {
        GaussRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
    fn from_int(n: i64) -> Self {
        GaussRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }
    fn i_times(&self) -> Self {
        GaussRational {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }
    fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn to_c64(&self) -> Complex64 {
        fn f(q: &BigRational) -> f64 {
            let n: f64 = q.numer().to_string().parse().unwrap_or(f64::NAN);
            let d: f64 = q.denom().to_string().parse().unwrap_or(f64::NAN);
            n / d
        }
        Complex64::new(f(&self.re), f(&self.im))
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, r: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re + &r.re,
            im: &self.im + &r.im,
        }
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, r: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re - &r.re,
            im: &self.im - &r.im,
        }
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, r: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re * &r.re - &self.im * &r.im,
            im: &self.re * &r.im + &self.im * &r.re,
        }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

/// Monomial index helpers for homogeneous polynomials of a given degree.
fn monos(deg: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=(deg - a) {
            out.push((a, b, deg - a - b));
        }
    }
    out
}

fn mono_index(deg: usize, a: usize, b: usize) -> usize {
    // offset of block a is sum_{a'<a} (deg - a' + 1)
    a * (deg + 1) - a * (a.saturating_sub(1)) / 2 - if a > 1 { 0 } else { 0 } + b
        + if a > 0 { a * (a - 1) / 2 - a * (a - 1) / 2 } else { 0 }
}

/// Precomputed data for evaluating D^d: the unnormalized ladder basis in
/// monomial coordinates, the exact extraction matrix, and the row/column
/// normalization ratios.
pub struct WignerBasis {
    pub d: usize,
    n: usize,
    /// columns: basis polynomials, monomial coefficients (exact)
    p: Vec<Vec<GaussRational>>,
    /// extraction matrix rows (exact): q[mp] . coeffs = component along basis mp
    q: Vec<Vec<GaussRational>>,
    p_f64: Vec<Vec<Complex64>>,
    q_f64: Vec<Vec<Complex64>>,
    /// scale[(mp, m)] as f64: sqrt((d+mp)!(d-m)!/((d-mp)!(d+m)!))
    scale_f64: Vec<f64>,
    /// exact radicand of the same ratio
    scale_exact: Vec<BigRational>,
}

fn gauss_solve(mut a: Vec<Vec<GaussRational>>, mut rhs: Vec<Vec<GaussRational>>) -> Vec<Vec<GaussRational>> {
    // Gaussian elimination over the Gaussian rationals; a is square n x n,
    // rhs holds n rows of width w. Returns a^{-1} rhs.
    let n = a.len();
    let w = rhs[0].len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("invertible");
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = {
            let p = &a[col][col];
            let nrm = &(&p.re * &p.re) + &(&p.im * &p.im);
            GaussRational {
                re: &p.re / &nrm,
                im: -(&p.im / &nrm),
            }
        };
        for j in 0..n {
            a[col][j] = &a[col][j] * &inv;
        }
        for j in 0..w {
            rhs[col][j] = &rhs[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &a[col][j] * &f;
                    a[r][j] = &a[r][j] - &t;
                }
                for j in 0..w {
                    let t = &rhs[col][j] * &f;
                    rhs[r][j] = &rhs[r][j] - &t;
                }
            }
        }
    }
    rhs
}

impl WignerBasis {
    fn build(d: usize) -> WignerBasis {
        let ms = monos(d);
        let n = ms.len();
        let idx = |a: usize, b: usize| mono_index(d, a, b);
        // lowest vector: (x - i y)^d
        let mut cur = vec![GaussRational::zero(); n];
        for j in 0..=d {
            let binom = factorial_big(d as u64)
                / (factorial_big(j as u64) * factorial_big((d - j) as u64));
            let mut c = GaussRational {
                re: BigRational::from_integer(BigInt::from(binom)),
                im: BigRational::zero(),
            };
            // (-i)^j
            for _ in 0..j {
                c = -c.i_times();
            }
            cur[idx(d - j, j)] = c;
        }
        let mut p: Vec<Vec<GaussRational>> = Vec::with_capacity(2 * d + 1);
        p.push(cur.clone());
        // ladder: z d/dx + i z d/dy - (x + i y) d/dz
        for _ in 0..2 * d {
            let mut next = vec![GaussRational::zero(); n];
            for (t, &(a, b, c)) in ms.iter().enumerate() {
                if cur[t].is_zero() {
                    continue;
                }
                let v = &cur[t];
                if a > 0 {
                    let tgt = idx(a - 1, b);
                    let add = &GaussRational::from_int(a as i64) * v;
                    next[tgt] = &next[tgt] + &add;
                }
                if b > 0 {
                    let tgt = idx(a, b - 1);
                    let add = (&GaussRational::from_int(b as i64) * v).i_times();
                    next[tgt] = &next[tgt] + &add;
                }
                if c > 0 {
                    let tgt = idx(a + 1, b);
                    let sub = &GaussRational::from_int(c as i64) * v;
                    next[tgt] = &next[tgt] - &sub;
                    let tgt2 = idx(a, b + 1);
                    let sub2 = (&GaussRational::from_int(c as i64) * v).i_times();
                    next[tgt2] = &next[tgt2] - &sub2;
                }
            }
            p.push(next.clone());
            cur = next;
        }
        // extraction: q = (p^H p)^{-1} p^H
        let nb = 2 * d + 1;
        let mut gram = vec![vec![GaussRational::zero(); nb]; nb];
        for i in 0..nb {
            for j in 0..nb {
                let mut acc = GaussRational::zero();
                for t in 0..n {
                    let term = &p[i][t].conj() * &p[j][t];
                    acc = &acc + &term;
                }
                gram[i][j] = acc;
            }
        }
        let mut ph = vec![vec![GaussRational::zero(); n]; nb];
        for i in 0..nb {
            for t in 0..n {
                ph[i][t] = p[i][t].conj();
            }
        }
        let q = gauss_solve(gram, ph);

        let p_cols: Vec<Vec<GaussRational>> = p;
        let p_f64 = p_cols
            .iter()
            .map(|col| col.iter().map(GaussRational::to_c64).collect())
            .collect();
        let q_f64 = q
            .iter()
            .map(|row| row.iter().map(GaussRational::to_c64).collect())
            .collect();

        let nb_i = nb as i64;
        let mut scale_f64 = vec![0.0; nb * nb];
        let mut scale_exact = vec![BigRational::one(); nb * nb];
        for mp in 0..nb_i {
            for m in 0..nb_i {
                let (mpc, mc) = (mp - d as i64, m - d as i64);
                let num = factorial_big((d as i64 + mpc) as u64) * factorial_big((d as i64 - mc) as u64);
                let den = factorial_big((d as i64 - mpc) as u64) * factorial_big((d as i64 + mc) as u64);
                let ratio = BigRational::new(BigInt::from(num), BigInt::from(den));
                let rf: f64 = {
                    let nf: f64 = ratio.numer().to_string().parse().unwrap();
                    let df: f64 = ratio.denom().to_string().parse().unwrap();
                    (nf / df).sqrt()
                };
                scale_f64[(mp * nb_i + m) as usize] = rf;
                scale_exact[(mp * nb_i + m) as usize] = ratio;
            }
        }
        WignerBasis {
            d,
            n,
            p: p_cols,
            q,
            p_f64,
            q_f64,
            scale_f64,
            scale_exact,
        }
    }

    pub fn get(d: usize) -> Arc<WignerBasis> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<WignerBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(d).or_insert_with(|| Arc::new(WignerBasis::build(d))).clone()
    }
}

/// Raw expansion coefficients of each substituted basis polynomial over the
/// basis, before row/column normalization. Generic over the scalar so the
/// same path serves floats and jets.
fn wigner_raw<T: Scalar>(basis: &WignerBasis, k: &Mat3<T>) -> Vec<Vec<T>> {
    let d = basis.d;
    let nb = 2 * d + 1;
    let proto = &k[0][0];
    let zero = || T::lift(proto, Complex64::new(0.0, 0.0));
    if d == 0 {
        return vec![vec![T::lift(proto, Complex64::new(1.0, 0.0))]];
    }
    // substituted coordinates as linear forms in (x, y, z): row vector times k
    let lin: [[T; 3]; 3] = std::array::from_fn(|j| std::array::from_fn(|i| k[i][j].clone()));
    // powers table M_{a,b,c} = x'^a y'^b z'^c, homogeneous of degree a+b+c
    let mut tables: Vec<HashMap<(usize, usize, usize), Vec<T>>> = vec![HashMap::new(); d + 1];
    tables[0].insert((0, 0, 0), vec![T::lift(proto, Complex64::new(1.0, 0.0))]);
    for deg in 1..=d {
        let lower = monos(deg - 1);
        let keys: Vec<(usize, usize, usize)> = monos(deg).into_iter().collect();
        let mut table = HashMap::new();
        for &(a, b, c) in &keys {
            // predecessor: reduce the last positive exponent
            let (pa, pb, pc, linform) = if c > 0 {
                (a, b, c - 1, &lin[2])
            } else if b > 0 {
                (a, b - 1, c, &lin[1])
            } else {
                (a - 1, b, c, &lin[0])
            };
            let prev = tables[deg - 1].get(&(pa, pb, pc)).expect("graded order").clone();
            let mut out = vec![zero(); monos(deg).len()];
            for (t, &(ma, mb, _mc)) in lower.iter().enumerate() {
                let v = &prev[t];
                // multiply monomial by x, y, z components of the linear form
                let tx = mono_index(deg, ma + 1, mb);
                out[tx] = out[tx].clone() + v.clone() * linform[0].clone();
                let ty = mono_index(deg, ma, mb + 1);
                out[ty] = out[ty].clone() + v.clone() * linform[1].clone();
                let tz = mono_index(deg, ma, mb);
                out[tz] = out[tz].clone() + v.clone() * linform[2].clone();
            }
            table.insert((a, b, c), out);
        }
        tables[deg] = table;
    }
    let top = &tables[d];
    let ms = monos(d);
    // substituted basis polynomial m: sum over monomials of p[m][t] * M_t
    let mut result = vec![vec![zero(); nb]; nb];
    for m in 0..nb {
        let mut sub = vec![zero(); basis.n];
        for (t, key) in ms.iter().enumerate() {
            let coef = basis.p_f64[m][t];
            if coef.norm() == 0.0 {
                continue;
            }
            let mono = top.get(key).unwrap();
            for (s, val) in mono.iter().enumerate() {
                sub[s] = sub[s].clone() + val.scale(coef);
            }
        }
        for mp in 0..nb {
            let mut acc = zero();
            for t in 0..basis.n {
                let qc = basis.q_f64[mp][t];
                if qc.norm() != 0.0 {
                    acc = acc + sub[t].scale(qc);
                }
            }
            result[mp][m] = acc;
        }
    }
    result
}

/// D^d(k) for a floating rotation matrix.
pub fn wigner_d(d: usize, k: &RotationMatrix) -> CenterIndexedMatrix {
    let basis = WignerBasis::get(d);
    let km: Mat3<Complex64> = crate::scalar::c64_mat(k.entries());
    let raw = wigner_raw(&basis, &km);
    let nb = 2 * d + 1;
    CenterIndexedMatrix::from_fn(d, |mp, m| {
        let (i, j) = ((mp + d as i64) as usize, (m + d as i64) as usize);
        raw[i][j] * basis.scale_f64[i * nb + j]
    })
}

/// D^d(k) with jet-valued entries.
pub fn wigner_d_jet(d: usize, k: &Mat3<Jet>) -> Vec<Vec<Jet>> {
    let basis = WignerBasis::get(d);
    let raw = wigner_raw(&basis, k);
    let nb = 2 * d + 1;
    raw.into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, v)| v.scale(Complex64::new(basis.scale_f64[i * nb + j], 0.0)))
                .collect()
        })
        .collect()
}

fn wigner_raw_exact(basis: &WignerBasis, k: &[[i64; 3]; 3]) -> Vec<Vec<GaussRational>> {
    let d = basis.d;
    let nb = 2 * d + 1;
    if d == 0 {
        return vec![vec![GaussRational::one()]];
    }
    let lin: [[GaussRational; 3]; 3] =
        std::array::from_fn(|j| std::array::from_fn(|i| GaussRational::from_int(k[i][j])));
    let mut tables: Vec<HashMap<(usize, usize, usize), Vec<GaussRational>>> = vec![HashMap::new(); d + 1];
    tables[0].insert((0, 0, 0), vec![GaussRational::one()]);
    for deg in 1..=d {
        let lower = monos(deg - 1);
        let mut table = HashMap::new();
        for (a, b, c) in monos(deg) {
            let (pa, pb, pc, linform) = if c > 0 {
                (a, b, c - 1, &lin[2])
            } else if b > 0 {
                (a, b - 1, c, &lin[1])
            } else {
                (a - 1, b, c, &lin[0])
            };
            let prev = tables[deg - 1].get(&(pa, pb, pc)).unwrap().clone();
            let mut out = vec![GaussRational::zero(); monos(deg).len()];
            for (t, &(ma, mb, _)) in lower.iter().enumerate() {
                if prev[t].is_zero() {
                    continue;
                }
                let v = &prev[t];
                if !linform[0].is_zero() {
                    let tx = mono_index(deg, ma + 1, mb);
                    let add = v * &linform[0];
                    out[tx] = &out[tx] + &add;
                }
                if !linform[1].is_zero() {
                    let ty = mono_index(deg, ma, mb + 1);
                    let add = v * &linform[1];
                    out[ty] = &out[ty] + &add;
                }
                if !linform[2].is_zero() {
                    let tz = mono_index(deg, ma, mb);
                    let add = v * &linform[2];
                    out[tz] = &out[tz] + &add;
                }
            }
            table.insert((a, b, c), out);
        }
        tables[deg] = table;
    }
    let top = &tables[d];
    let ms = monos(d);
    let mut result = vec![vec![GaussRational::zero(); nb]; nb];
    for m in 0..nb {
        let mut sub = vec![GaussRational::zero(); basis.n];
        for (t, key) in ms.iter().enumerate() {
            if basis.p[m][t].is_zero() {
                continue;
            }
            let mono = top.get(key).unwrap();
            for (s, val) in mono.iter().enumerate() {
                if !val.is_zero() {
                    let add = val * &basis.p[m][t];
                    sub[s] = &sub[s] + &add;
                }
            }
        }
        for mp in 0..nb {
            let mut acc = GaussRational::zero();
            for t in 0..basis.n {
                if !basis.q[mp][t].is_zero() && !sub[t].is_zero() {
                    let add = &basis.q[mp][t] * &sub[t];
                    acc = &acc + &add;
                }
            }
            result[mp][m] = acc;
        }
    }
    result
}

/// Exact D^d at a signed integer orthogonal matrix (Weyl / sign elements and
/// their products). Entries come out as q sqrt(r) + i q' sqrt(r).
pub fn wigner_d_exact_int(d: usize, k: &[[i64; 3]; 3]) -> ExactMatrix {
    let basis = WignerBasis::get(d);
    let raw = wigner_raw_exact(&basis, k);
    let nb = 2 * d + 1;
    let mut out = ExactMatrix::zeros(d);
    for i in 0..nb {
        for j in 0..nb {
            let ratio = &basis.scale_exact[i * nb + j];
            let g = &raw[i][j];
            let re = SurdScalar::new(g.re.clone(), ratio.clone());
            let im = SurdScalar::new(g.im.clone(), ratio.clone());
            out.set(i as i64 - d as i64, j as i64 - d as i64, SurdComplex { re, im });
        }
    }
    out
}

pub fn wigner_d_weyl(d: usize, w: Weyl) -> ExactMatrix {
    wigner_d_exact_int(d, &w.int_matrix())
}

pub fn wigner_d_vsign(d: usize, v: VSign) -> ExactMatrix {
    wigner_d_exact_int(d, &v.int_matrix())
}

/// Exact D^d at a product of group elements (left to right).
pub fn wigner_d_product(d: usize, factors: &[[[i64; 3]; 3]]) -> ExactMatrix {
    let mut m = factors[0];
    for f in &factors[1..] {
        m = int_mat_mul(&m, f);
    }
    wigner_d_exact_int(d, &m)
}

// ---------------------------------------------------------------------------
// projections and basis vectors
// ---------------------------------------------------------------------------

/// Projection Sigma^d_chi = (1/4) sum_v chi(v) D^d(v), exact.
pub fn sigma_projection(d: usize, chi: VCharacter) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(d);
    for v in VSign::ALL {
        let c = chi.eval(v);
        let dm = wigner_d_vsign(d, v);
        for mp in -(d as i64)..=(d as i64) {
            for m in -(d as i64)..=(d as i64) {
                let scaled = SurdComplex {
                    re: &dm.get(mp, m).re * &SurdScalar::from_ratio(c, 4),
                    im: &dm.get(mp, m).im * &SurdScalar::from_ratio(c, 4),
                };
                let cur = out.get(mp, m).checked_add(&scaled).expect("rational entries");
                out.set(mp, m, cur);
            }
        }
    }
    out
}

/// Standard basis row vector with a single 1 at index j.
pub fn basis_v(d: usize, j: i64) -> Result<CenterIndexedVector> {
    let mut out = CenterIndexedVector::zeros(d);
    out.set(j, Complex64::new(1.0, 0.0))?;
    Ok(out)
}

/// Symmetrized vector (1/2)(bv_j + sign (-1)^d bv_{-j}).
pub fn basis_u(d: usize, j: i64, sign: i8) -> Result<CenterIndexedVector> {
    assert!(sign.abs() == 1);
    let mut out = CenterIndexedVector::zeros(d);
    let parity = if d % 2 == 0 { 1.0 } else { -1.0 };
    out.add_to(j, Complex64::new(0.5, 0.0))?;
    out.add_to(-j, Complex64::new(0.5 * sign as f64 * parity, 0.0))?;
    Ok(out)
}

/// Diagonal matrix diag(s^d, ..., s^{-d}).
pub fn diag_power(d: usize, s: Complex64) -> CenterIndexedMatrix {
    CenterIndexedMatrix::from_fn(d, |mp, m| {
        if mp == m {
            s.powi(-(mp as i32))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mono_index_roundtrip() {
        for deg in 0..8 {
            for (i, (a, b, _)) in monos(deg).iter().enumerate() {
                assert_eq!(mono_index(deg, *a, *b), i, "deg {deg} a {a} b {b}");
            }
        }
    }

    #[test]
    fn jacobi_base_cases() {
        assert_eq!(jacobi_polynomial(0, 3.0, 1.0, 0.7), 1.0);
        assert_eq!(jacobi_polynomial(1, 1.0, 0.0, 0.0), 0.5);
        // Legendre P_2(x) = (3x^2-1)/2 at x = 1/2
        assert!((jacobi_polynomial(2, 0.0, 0.0, 0.5) - (-0.125)).abs() < 1e-15);
    }

    #[test]
    fn small_d_reference_values() {
        // d^d_{-d,0}(x) = sqrt((2d)!)/(d! 2^d) (1-x^2)^{d/2}
        for d in 1..6usize {
            let x = 0.37;
            let expect = (ln_factorial(2 * d as i64) / 2.0 - ln_factorial(d as i64)).exp()
                / 2f64.powi(d as i32)
                * (1.0 - x * x).powf(d as f64 / 2.0);
            let got = wigner_small_d(d, -(d as i64), 0, x).unwrap();
            assert!((got - expect).abs() < 1e-12, "d={d} got {got} expect {expect}");
        }
        assert!((wigner_small_d(2, 1, 1, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let a = wigner_small_d(2, -1, 1, 0.0).unwrap();
        let b = wigner_small_d(2, 1, -1, 0.0).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(wigner_small_d(2, 3, 0, 0.0).is_err());
    }

    #[test]
    fn small_d_symmetries_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = rng.gen_range(1..6usize);
            let mp = rng.gen_range(-(d as i64)..=(d as i64));
            let m = rng.gen_range(-(d as i64)..=(d as i64));
            let x: f64 = rng.gen_range(-0.99..0.99);
            let base = wigner_small_d(d, mp, m, x).unwrap();
            let sign = if (mp + m) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((wigner_small_d(d, -mp, -m, x).unwrap() - sign * base).abs() < 1e-11);
            assert!((wigner_small_d(d, m, mp, x).unwrap() - sign * base).abs() < 1e-11);
        }
    }

    #[test]
    fn d1_at_w3_matches_reference() {
        let m = wigner_d(1, &Weyl::W3.rotation());
        let expect = [
            [c(-0.5, 0.0), c(0.0, -0.5 * 2f64.sqrt() / 1.0), c(0.5, 0.0)],
            [c(0.0, 0.5 * 2f64.sqrt()), c(0.0, 0.0), c(0.0, 0.5 * 2f64.sqrt())],
            [c(0.5, 0.0), c(0.0, -0.5 * 2f64.sqrt()), c(-0.5, 0.0)],
        ];
        for i in 0..3i64 {
            for j in 0..3i64 {
                let got = m.get(i - 1, j - 1).unwrap();
                let want = expect[i as usize][j as usize];
                assert!((got - want).norm() < 1e-13, "entry ({},{}): {} vs {}", i - 1, j - 1, got, want);
            }
        }
    }

    #[test]
    fn d2_at_w3_matches_reference() {
        let m = wigner_d(2, &Weyl::W3.rotation());
        let s6 = 6f64.sqrt();
        let expect: [[Complex64; 5]; 5] = [
            [c(1.0, 0.0), c(0.0, 2.0), c(-s6, 0.0), c(0.0, -2.0), c(1.0, 0.0)],
            [c(0.0, -2.0), c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 2.0)],
            [c(-s6, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(-s6, 0.0)],
            [c(0.0, 2.0), c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, -2.0)],
            [c(1.0, 0.0), c(0.0, -2.0), c(-s6, 0.0), c(0.0, 2.0), c(1.0, 0.0)],
        ];
        for i in 0..5i64 {
            for j in 0..5i64 {
                let got = m.get(i - 2, j - 2).unwrap();
                let want = expect[i as usize][j as usize] / 4.0;
                assert!((got - want).norm() < 1e-13, "entry ({},{})", i - 2, j - 2);
            }
        }
        // exact path agrees entry by entry
        let exact = wigner_d_weyl(2, Weyl::W3).to_complex();
        assert!(exact.max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn vertical_rotation_is_diagonal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let th: f64 = rng.gen_range(-3.0..3.0);
            for d in 0..4usize {
                let m = wigner_d(d, &k_angle(th));
                for mp in -(d as i64)..=(d as i64) {
                    for mm in -(d as i64)..=(d as i64) {
                        let got = m.get(mp, mm).unwrap();
                        let want = if mp == mm {
                            (Complex64::new(0.0, -(mp as f64) * th)).exp()
                        } else {
                            c(0.0, 0.0)
                        };
                        assert!((got - want).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn sign_element_values() {
        for d in 0..5usize {
            for eps in [-1i8, 1] {
                // v_{eps,+1} -> diag(eps^d .. eps^{-d})
                let m = wigner_d_vsign(d, VSign::new(eps, 1)).to_complex();
                for mp in -(d as i64)..=(d as i64) {
                    for mm in -(d as i64)..=(d as i64) {
                        let want = if mp == mm {
                            c((eps as f64).powi(-(mp as i32)), 0.0)
                        } else {
                            c(0.0, 0.0)
                        };
                        assert!((m.get(mp, mm).unwrap() - want).norm() < 1e-14);
                    }
                }
                // v_{eps,-1} -> (-1)^d eps^{m'} at (m', -m')
                let m = wigner_d_vsign(d, VSign::new(eps, -1)).to_complex();
                let pd = if d % 2 == 0 { 1.0 } else { -1.0 };
                for mp in -(d as i64)..=(d as i64) {
                    for mm in -(d as i64)..=(d as i64) {
                        let want = if mp == -mm {
                            c(pd * (eps as f64).powi(mp as i32), 0.0)
                        } else {
                            c(0.0, 0.0)
                        };
                        assert!((m.get(mp, mm).unwrap() - want).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let a = euler_rotation(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
            let b = euler_rotation(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
            for d in 1..4usize {
                let left = wigner_d(d, &a.mul(&b));
                let right = wigner_d(d, &a).matmul(&wigner_d(d, &b));
                assert!(left.max_abs_diff(&right) < 1e-11);
                let u = wigner_d(d, &a);
                assert!(u.matmul(&u.dagger()).max_abs_diff(&CenterIndexedMatrix::identity(d)) < 1e-11);
            }
        }
    }

    #[test]
    fn small_d_equals_matrix_middle_rotation() {
        // d-polynomials are D^d at k(0, beta, 0)
        let beta = 0.83;
        let k = euler_rotation(0.0, beta, 0.0);
        for d in 1..5usize {
            let m = wigner_d(d, &k);
            for mp in -(d as i64)..=(d as i64) {
                for mm in -(d as i64)..=(d as i64) {
                    let poly = wigner_small_d(d, mp, mm, beta.cos()).unwrap();
                    let got = m.get(mp, mm).unwrap();
                    assert!(
                        (got - c(poly, 0.0)).norm() < 1e-11,
                        "d={d} ({mp},{mm}): {got} vs {poly}"
                    );
                }
            }
        }
    }

    #[test]
    fn w2_factorization() {
        // D^d(w2) = D^d(v_{+-}) Dtilde(i) = Dtilde(i) D^d(v_{--})
        for d in 0..5usize {
            let w2 = wigner_d_weyl(d, Weyl::W2).to_complex();
            let lhs = wigner_d_vsign(d, VSign::new(1, -1)).to_complex().matmul(&diag_power(d, c(0.0, 1.0)));
            let rhs = diag_power(d, c(0.0, 1.0)).matmul(&wigner_d_vsign(d, VSign::new(-1, -1)).to_complex());
            assert!(w2.max_abs_diff(&lhs) < 1e-12);
            assert!(w2.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn u_vector_sign_reduction() {
        // bu^{d,+-}_m D^d(w2) = +- i^{-m} bu^{d, +-(-1)^m}_m
        for d in 1..6usize {
            let w2 = wigner_d_weyl(d, Weyl::W2).to_complex();
            for m in 0..=(d as i64) {
                for sign in [1i8, -1] {
                    let u = basis_u(d, m, sign).unwrap();
                    let lhs = u.mul_mat(&w2);
                    let flip = if m % 2 == 0 { sign } else { -sign };
                    let phase = c(0.0, 1.0).powi(-(m as i32)) * (sign as f64);
                    let rhs = basis_u(d, m, flip).unwrap().scale(phase);
                    assert!(lhs.sub(&rhs).norm() < 1e-12, "d={d} m={m} sign={sign}");
                }
            }
        }
    }

    #[test]
    fn sigma_rows_are_u_vectors() {
        for d in 1..5usize {
            for (e1, e2) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
                let sigma = sigma_projection(d, VCharacter::new(e1, e2)).to_complex();
                // idempotent
                assert!(sigma.matmul(&sigma).max_abs_diff(&sigma) < 1e-13);
                for mp in -(d as i64)..=(d as i64) {
                    let row = sigma.row(mp);
                    let expect = if (e1 == 1) == (mp % 2 == 0) {
                        basis_u(d, mp, e2).unwrap()
                    } else {
                        CenterIndexedVector::zeros(d)
                    };
                    assert!(row.sub(&expect).norm() < 1e-13, "d={d} chi=({e1},{e2}) row {mp}");
                }
            }
        }
    }

    #[test]
    fn weyl_group_relations() {
        let m = |w: Weyl| w.int_matrix();
        assert_eq!(int_mat_mul(&m(Weyl::W3), &m(Weyl::W2)), m(Weyl::W4));
        assert_eq!(int_mat_mul(&m(Weyl::W2), &m(Weyl::W3)), m(Weyl::W5));
        let wl = int_mat_mul(&int_mat_mul(&m(Weyl::W2), &m(Weyl::W3)), &m(Weyl::W2));
        assert_eq!(wl, m(Weyl::Wl));
        let wl2 = int_mat_mul(&int_mat_mul(&m(Weyl::W3), &m(Weyl::W2)), &m(Weyl::W3));
        assert_eq!(wl2, m(Weyl::Wl));
    }

    #[test]
    fn wv_commutation_table() {
        for (e1, e2) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
            let v = VSign::new(e1, e2);
            assert_eq!(wv_commutation(Weyl::Id, v), v);
            assert_eq!(wv_commutation(Weyl::Wl, v), VSign::new(e2, e1));
            assert_eq!(wv_commutation(Weyl::W2, v), VSign::new(e1 * e2, e2));
            assert_eq!(wv_commutation(Weyl::W3, v), VSign::new(e1, e1 * e2));
        }
    }

    #[test]
    fn weyl_action_matches_conjugation() {
        // exponent match of p_{mu^w}(a) = p_mu(w a w^{-1}) on diagonal a
        let mu = SpectralParameter::new([c(0.3, 0.4), c(-0.1, 1.2), c(-0.2, -1.6)]).unwrap();
        for w in Weyl::ALL {
            let perm = weyl_action(&mu, w);
            // conjugating diag(a1,a2,a3) by w permutes entries by the inverse
            // of the row permutation; verify on a concrete diagonal
            let a = [[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 5.0]];
            let wm = w.int_matrix();
            let wf: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| wm[i][j] as f64));
            let wt: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| wm[j][i] as f64));
            let mut waw = [[0.0f64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    waw[i][j] = (0..3)
                        .map(|k| (0..3).map(|l| wf[i][k] * a[k][l] * wt[l][j]).sum::<f64>())
                        .sum();
                }
            }
            // p_mu(waw^{-1}) = prod |waw_ii|^{mu_i} should equal prod |a_ii|^{perm_i}
            let lhs: Complex64 = (0..3).map(|i| c(waw[i][i].abs(), 0.0).powc(mu.as_array()[i])).product();
            let rhs: Complex64 = (0..3).map(|i| c(a[i][i], 0.0).powc(perm.as_array()[i])).product();
            assert!((lhs - rhs).norm() < 1e-12, "{w:?}");
        }
        // composition through the table
        let lhs = weyl_action(&weyl_action(&mu, Weyl::W3), Weyl::W2);
        let rhs = weyl_action(&mu, Weyl::W5);
        for i in 0..3 {
            assert!((lhs.as_array()[i] - rhs.as_array()[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn euler_rotation_edge_cases() {
        let id = euler_rotation(0.0, 0.0, 0.0);
        assert!(id
            .entries()
            .iter()
            .flatten()
            .zip(RotationMatrix::identity().entries().iter().flatten())
            .all(|(a, b)| (a - b).abs() < 1e-15));
        let th = 0.9;
        let k = euler_rotation(th, 0.0, 0.0);
        assert!((k.entries()[0][0] - th.cos()).abs() < 1e-15);
        assert!((k.entries()[0][1] + th.sin()).abs() < 1e-15);
        // beta-only: definition unrolled
        let b = euler_rotation(0.0, std::f64::consts::PI, 0.0);
        let w3 = Weyl::W3.rotation();
        let direct = w3.mul(&k_angle(-std::f64::consts::PI)).mul(&w3);
        for i in 0..3 {
            for j in 0..3 {
                assert!((b.entries()[i][j] - direct.entries()[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn row_orthogonality_weighted() {
        // sum_j (-1)^j D^2_{l1,j} D^2_{l2,-j} = (-1)^{l2} delta_{l1=-l2}
        let k = euler_rotation(0.7, 1.1, -0.4);
        let m = wigner_d(2, &k);
        for l1 in -2i64..=2 {
            for l2 in -2i64..=2 {
                let sum: Complex64 = (-2i64..=2)
                    .map(|j| {
                        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                        m.get(l1, j).unwrap() * m.get(l2, -j).unwrap() * s
                    })
                    .sum();
                let want = if l1 == -l2 {
                    c(if l2 % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
                } else {
                    c(0.0, 0.0)
                };
                assert!((sum - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn jet_path_matches_float_path() {
        use crate::jets::JetSpace;
        let sp = JetSpace::get(2);
        let th = Jet::variable(&sp, 0, c(0.6, 0.0));
        let ph = Jet::variable(&sp, 1, c(0.2, 0.0));
        // rotation about the vertical axis with jet angle th (+ unused ph)
        let zero = Jet::constant(&sp, c(0.0, 0.0));
        let one = Jet::constant(&sp, c(1.0, 0.0));
        let km: Mat3<Jet> = [
            [th.cos(), -th.sin(), zero.clone()],
            [th.sin(), th.cos(), zero.clone()],
            [zero.clone(), zero.clone(), one.clone()],
        ];
        let _ = ph;
        let d = 2usize;
        let jm = wigner_d_jet(d, &km);
        for mp in -(d as i64)..=(d as i64) {
            let entry = &jm[(mp + d as i64) as usize][(mp + d as i64) as usize];
            // value e^{-i m' th}, derivative -i m' e^{-i m' th}
            let want = (c(0.0, -(mp as f64)) * c(0.6, 0.0)).exp();
            assert!((entry.value() - want).norm() < 1e-13);
            let dwant = c(0.0, -(mp as f64)) * want;
            assert!((entry.coeff(&[1, 0]) - dwant).norm() < 1e-12);
        }
    }
}
