//! Exact scalars of the form q·sqrt(r) with q rational and r a nonnegative
//! rational radicand, plus their complex combinations.
//!
//! Clebsch-Gordan coefficients and the entries of Wigner D-matrices at Weyl
//! and sign-group elements all have this shape, so identities among them can
//! be checked without rounding.

use crate::error::{Gl3Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{BigUint, One, Signed, Zero};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact value q·sqrt(r). The radicand is kept squarefree by trial division,
/// so equality of normalized values is literal equality of (q, r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdScalar {
    q: BigRational,
    /// Squarefree nonnegative integer radicand; denominators of a rational
    /// radicand are absorbed into `q` during normalization.
    r: BigUint,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Remove the square part of `n` by trial division, returning
/// (squarefree part, extracted square root).
fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    let mut rest = n.clone();
    let mut root = BigUint::one();
    if rest.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut p = BigUint::from(2u32);
    // Coefficients arising here are built from small factorials, so trial
    // division terminates quickly; the p*p*p > rest cutoff bounds the loop.
    loop {
        let pp = &p * &p;
        if &pp * &p > rest && pp > rest {
            break;
        }
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            root *= &p;
        }
        p += 1u32;
    }
    (rest, root)
}

impl SurdScalar {
    pub fn zero() -> Self {
        SurdScalar {
            q: BigRational::zero(),
            r: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        SurdScalar {
            q: BigRational::one(),
            r: BigUint::one(),
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        SurdScalar { q, r: BigUint::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(big(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Self::from_rational(big(num) / big(den))
    }

    /// q·sqrt(r) with rational q and nonnegative rational radicand r.
    pub fn new(q: BigRational, r: BigRational) -> Self {
        assert!(!r.is_negative(), "radicand must be nonnegative");
        if q.is_zero() || r.is_zero() {
            return Self::zero();
        }
        // q·sqrt(a/b) = (q/b)·sqrt(a·b)
        let a = r.numer().magnitude().clone();
        let b = r.denom().magnitude().clone();
        let scaled_q = q / BigRational::from_integer(BigInt::from(b.clone()));
        let (sf, root) = squarefree_split(&(a * &b));
        SurdScalar {
            q: scaled_q * BigRational::from_integer(BigInt::from(root)),
            r: sf,
        }
    }

    /// sqrt of a nonnegative rational, e.g. `sqrt_ratio(3, 5)` = sqrt(3/5).
    pub fn sqrt_ratio(num: i64, den: i64) -> Self {
        assert!(num >= 0 && den > 0);
        Self::new(BigRational::one(), big(num) / big(den))
    }

    pub fn sqrt_big(n: BigUint) -> Self {
        Self::new(
            BigRational::one(),
            BigRational::from_integer(BigInt::from(n)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.q
    }

    pub fn radicand(&self) -> &BigUint {
        &self.r
    }

    /// Addition is exact only when the radicands agree after normalization.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.r != other.r {
            return Err(Gl3Error::RadicandMismatch {
                a: self.to_string(),
                b: other.to_string(),
            });
        }
        let q = &self.q + &other.q;
        if q.is_zero() {
            Ok(Self::zero())
        } else {
            Ok(SurdScalar { q, r: self.r.clone() })
        }
    }

    pub fn to_f64(&self) -> f64 {
        let qf = rational_to_f64(&self.q);
        let rf = biguint_to_f64(&self.r);
        qf * rf.sqrt()
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    let n = bigint_to_f64(q.numer());
    let d = bigint_to_f64(q.denom());
    n / d
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let s = if n.is_negative() { -1.0 } else { 1.0 };
    s * biguint_to_f64(n.magnitude())
}

fn biguint_to_f64(n: &BigUint) -> f64 {
    n.to_u64_digits()
        .iter()
        .rev()
        .fold(0.0f64, |acc, &d| acc * 1.8446744073709552e19 + d as f64)
}

impl Mul for &SurdScalar {
    type Output = SurdScalar;
    fn mul(self, rhs: &SurdScalar) -> SurdScalar {
        if self.is_zero() || rhs.is_zero() {
            return SurdScalar::zero();
        }
        let rr = BigRational::from_integer(BigInt::from(&self.r * &rhs.r));
        SurdScalar::new(&self.q * &rhs.q, rr)
    }
}

impl Mul for SurdScalar {
    type Output = SurdScalar;
    fn mul(self, rhs: SurdScalar) -> SurdScalar {
        (&self) * (&rhs)
    }
}

impl Neg for SurdScalar {
    type Output = SurdScalar;
    fn neg(self) -> SurdScalar {
        if self.is_zero() {
            self
        } else {
            SurdScalar { q: -self.q, r: self.r }
        }
    }
}

impl fmt::Display for SurdScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.r.is_one() {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}*sqrt({})", self.q, self.r)
        }
    }
}

/// Complex number with exact surd real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdComplex {
    pub re: SurdScalar,
    pub im: SurdScalar,
}

impl SurdComplex {
    pub fn zero() -> Self {
        SurdComplex {
            re: SurdScalar::zero(),
            im: SurdScalar::zero(),
        }
    }

    pub fn one() -> Self {
        SurdComplex {
            re: SurdScalar::one(),
            im: SurdScalar::zero(),
        }
    }

    pub fn from_real(re: SurdScalar) -> Self {
        SurdComplex {
            re,
            im: SurdScalar::zero(),
        }
    }

    /// i^k times an exact real scalar.
    pub fn i_power(k: i64, scale: SurdScalar) -> Self {
        match k.rem_euclid(4) {
            0 => Self::from_real(scale),
            1 => SurdComplex {
                re: SurdScalar::zero(),
                im: scale,
            },
            2 => Self::from_real(-scale),
            _ => SurdComplex {
                re: SurdScalar::zero(),
                im: -scale,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        SurdComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(SurdComplex {
            re: self.re.checked_add(&other.re)?,
            im: self.im.checked_add(&other.im)?,
        })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Mul for &SurdComplex {
    type Output = Result<SurdComplex>;
    fn mul(self, rhs: &SurdComplex) -> Result<SurdComplex> {
        let rr = &self.re * &rhs.re;
        let ii = &self.im * &rhs.im;
        let ri = &self.re * &rhs.im;
        let ir = &self.im * &rhs.re;
        Ok(SurdComplex {
            re: rr.checked_add(&(-ii))?,
            im: ri.checked_add(&ir)?,
        })
    }
}

impl Add for &SurdComplex {
    type Output = Result<SurdComplex>;
    fn add(self, rhs: &SurdComplex) -> Result<SurdComplex> {
        self.checked_add(rhs)
    }
}

impl Sub for &SurdComplex {
    type Output = Result<SurdComplex>;
    fn sub(self, rhs: &SurdComplex) -> Result<SurdComplex> {
        let neg = SurdComplex {
            re: -rhs.re.clone(),
            im: -rhs.im.clone(),
        };
        self.checked_add(&neg)
    }
}

impl fmt::Display for SurdComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})*i", self.im)
        } else {
            write!(f, "{} + ({})*i", self.re, self.im)
        }
    }
}

/// Exact factorial as a big integer.
pub fn factorial_big(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}
