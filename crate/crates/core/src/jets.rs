//! Truncated multivariate Taylor arithmetic ("jets") of total degree <= 3.
//!
//! A jet carries the value of a function together with all mixed partial
//! derivatives up to total order three at a point, which is exactly what is
//! needed to apply first-, second- and third-order differential operators
//! without finite-difference cancellation.

use num_complex::Complex64;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

pub const MAX_VARS: usize = 8;
pub const MAX_DEG: u8 = 3;

type Exp = [u8; MAX_VARS];

pub struct JetSpace {
    pub nvars: usize,
    pub dim: usize,
    exps: Vec<Exp>,
    index: HashMap<u64, u16>,
    /// dim*dim product table; u16::MAX marks coefficients truncated away.
    prod: Vec<u16>,
}

fn pack(e: &Exp) -> u64 {
    e.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | ((v as u64) << (8 * i)))
}

impl JetSpace {
    fn build(nvars: usize) -> JetSpace {
        assert!(nvars >= 1 && nvars <= MAX_VARS);
        let mut exps: Vec<Exp> = Vec::new();
        // graded order: all multi-indices with total degree <= MAX_DEG
        for deg in 0..=MAX_DEG {
            let mut cur = [0u8; MAX_VARS];
            gen_exps(nvars, deg, 0, &mut cur, &mut exps);
        }
        let mut index = HashMap::new();
        for (i, e) in exps.iter().enumerate() {
            index.insert(pack(e), i as u16);
        }
        let dim = exps.len();
        let mut prod = vec![u16::MAX; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let total: u8 = (0..nvars).map(|v| exps[i][v] + exps[j][v]).sum();
                if total <= MAX_DEG {
                    let mut s = [0u8; MAX_VARS];
                    for v in 0..nvars {
                        s[v] = exps[i][v] + exps[j][v];
                    }
                    prod[i * dim + j] = index[&pack(&s)];
                }
            }
        }
        JetSpace { nvars, dim, exps, index, prod }
    }

    pub fn get(nvars: usize) -> Arc<JetSpace> {
        static SPACES: OnceLock<Vec<Arc<JetSpace>>> = OnceLock::new();
        let spaces = SPACES.get_or_init(|| (1..=MAX_VARS).map(JetSpace::build).map(Arc::new).collect());
        spaces[nvars - 1].clone()
    }

    pub fn index_of(&self, e: &Exp) -> Option<usize> {
        self.index.get(&pack(e)).map(|&i| i as usize)
    }

    pub fn exponent(&self, i: usize) -> &Exp {
        &self.exps[i]
    }
}

fn gen_exps(nvars: usize, remaining: u8, var: usize, cur: &mut Exp, out: &mut Vec<Exp>) {
    if var == nvars {
        if remaining == 0 {
            out.push(*cur);
        }
        return;
    }
    if var == nvars - 1 {
        cur[var] = remaining;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for take in 0..=remaining {
        cur[var] = take;
        gen_exps(nvars, remaining - take, var + 1, cur, out);
    }
    cur[var] = 0;
}

#[derive(Clone)]
pub struct Jet {
    pub space: Arc<JetSpace>,
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, v: Complex64) -> Jet {
        let mut c = vec![Complex64::new(0.0, 0.0); space.dim];
        c[0] = v;
        Jet { space: space.clone(), c }
    }

    pub fn variable(space: &Arc<JetSpace>, var: usize, v: Complex64) -> Jet {
        assert!(var < space.nvars);
        let mut j = Jet::constant(space, v);
        let mut e = [0u8; MAX_VARS];
        e[var] = 1;
        let idx = space.index_of(&e).expect("degree-1 index");
        j.c[idx] = Complex64::new(1.0, 0.0);
        j
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// Taylor coefficient for the given exponent tuple (not the raw partial:
    /// the partial derivative is this times the factorials of the exponents).
    pub fn coeff(&self, e: &[u8]) -> Complex64 {
        let mut full = [0u8; MAX_VARS];
        full[..e.len()].copy_from_slice(e);
        match self.space.index_of(&full) {
            Some(i) => self.c[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|&v| v * s).collect(),
        }
    }

    /// Jet of the partial derivative with respect to `var`. The result is
    /// accurate only to total degree MAX_DEG - 1.
    pub fn partial(&self, var: usize) -> Jet {
        assert!(var < self.space.nvars);
        let mut out = Jet::constant(&self.space, Complex64::new(0.0, 0.0));
        for (i, &v) in self.c.iter().enumerate() {
            let e = self.space.exponent(i);
            if e[var] >= 1 {
                let mut t = *e;
                t[var] -= 1;
                let ti = self.space.index_of(&t).expect("lowered index");
                out.c[ti] += v * (e[var] as f64);
            }
        }
        out
    }

    /// Apply an analytic function with Taylor coefficients `k[0..=3]` at the
    /// constant term: result = k0 + k1 d + k2 d^2 + k3 d^3, d = self - self(0).
    fn compose(&self, k: [Complex64; 4]) -> Jet {
        let mut delta = self.clone();
        delta.c[0] = Complex64::new(0.0, 0.0);
        let d2 = &delta * &delta;
        let d3 = &d2 * &delta;
        let mut out = delta.scale(k[1]);
        out.c[0] += k[0];
        out = out + d2.scale(k[2]) + d3.scale(k[3]);
        out
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        assert!(a.norm() > 0.0, "jet reciprocal requires nonzero constant term");
        let ia = a.inv();
        self.compose([ia, -ia * ia, ia * ia * ia, -ia * ia * ia * ia])
    }

    pub fn sqrt(&self) -> Jet {
        let a = self.value();
        let r = a.sqrt();
        let k1 = 0.5 / r;
        let k2 = -0.125 / (r * a);
        let k3 = 0.0625 / (r * a * a);
        self.compose([r, k1, k2, k3])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e, e, e / 2.0, e / 6.0])
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let ia = a.inv();
        self.compose([a.ln(), ia, -ia * ia / 2.0, ia * ia * ia / 3.0])
    }

    pub fn powc(&self, w: Complex64) -> Jet {
        self.ln().scale(w).exp()
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose([s, c, -s / 2.0, -c / 6.0])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose([c, -s, -c / 2.0, s / 6.0])
    }

    pub fn atan(&self) -> Jet {
        let a = self.value();
        let d = 1.0 + a * a;
        let k1 = d.inv();
        let k2 = -a * k1 * k1;
        let k3 = (3.0 * a * a - 1.0) / (d * d * d) / 3.0;
        self.compose([a.atan(), k1, k2, k3])
    }

    /// Angle of the point (x, y) = (`other`, `self`), continuous around the
    /// base point; both constant terms are expected to be essentially real.
    pub fn atan2(&self, x: &Jet) -> Jet {
        let y = self;
        let base = f64::atan2(y.value().re, x.value().re);
        let (sb, cb) = base.sin_cos();
        // rotate so the base direction lies on the positive axis
        let num = y.scale(Complex64::new(cb, 0.0)) - x.scale(Complex64::new(sb, 0.0));
        let den = x.scale(Complex64::new(cb, 0.0)) + y.scale(Complex64::new(sb, 0.0));
        let t = &num * &den.recip();
        let mut out = t.atan();
        // constant term of atan(t) is ~0 by construction; anchor it at `base`
        out.c[0] = Complex64::new(base, 0.0);
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &rhs.space));
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &rhs.space));
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &rhs.space));
        let dim = self.space.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            let a = self.c[i];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let row = &self.space.prod[i * dim..(i + 1) * dim];
            for j in 0..dim {
                let t = row[j];
                if t != u16::MAX {
                    let b = rhs.c[j];
                    if b.re != 0.0 || b.im != 0.0 {
                        out[t as usize] += a * b;
                    }
                }
            }
        }
        Jet { space: self.space.clone(), c: out }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        (&self) * (&rhs)
    }
}
