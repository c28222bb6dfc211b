//! Scalar abstraction so the same geometry code (Iwasawa decomposition,
//! D-matrix construction) runs on plain complex numbers and on jets.

use crate::jets::Jet;
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + Sized
{
    /// Constant with the same ambient structure as `proto`.
    fn lift(proto: &Self, v: Complex64) -> Self;
    fn value(&self) -> Complex64;
    fn scale(&self, c: Complex64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn powc(&self, w: Complex64) -> Self {
        self.ln().scale(w).exp()
    }
}

impl Scalar for Complex64 {
    fn lift(_proto: &Self, v: Complex64) -> Self {
        v
    }
    fn value(&self) -> Complex64 {
        *self
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn recip(&self) -> Self {
        self.inv()
    }
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
}

impl Scalar for Jet {
    fn lift(proto: &Self, v: Complex64) -> Self {
        Jet::constant(&proto.space, v)
    }
    fn value(&self) -> Complex64 {
        Jet::value(self)
    }
    fn scale(&self, c: Complex64) -> Self {
        Jet::scale(self, c)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
}

pub type Mat3<T> = [[T; 3]; 3];

pub fn mat_mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = a[i][0].clone() * b[0][j].clone();
            acc = acc + a[i][1].clone() * b[1][j].clone();
            acc + a[i][2].clone() * b[2][j].clone()
        })
    })
}

pub fn mat_transpose<T: Scalar>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mat_scale<T: Scalar>(a: &Mat3<T>, c: Complex64) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].scale(c)))
}

pub fn mat_det<T: Scalar>(a: &Mat3<T>) -> T {
    let m = |i: usize, j: usize| a[i][j].clone();
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

pub fn mat_from_f64<T: Scalar>(proto: &T, m: &[[f64; 3]; 3]) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| T::lift(proto, Complex64::new(m[i][j], 0.0))))
}

pub fn mat_to_c64<T: Scalar>(m: &Mat3<T>) -> [[Complex64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].value()))
}

pub fn c64_mat(m: &[[f64; 3]; 3]) -> Mat3<Complex64> {
    std::array::from_fn(|i| std::array::from_fn(|j| Complex64::new(m[i][j], 0.0)))
}
