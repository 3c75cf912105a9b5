//! Exact arithmetic in the real quadratic tower Q(√2, √3) and small dense
//! matrices over it.
//!
//! A scalar is stored as four rational coordinates over the basis
//! {1, √2, √3, √6}. This field contains 2·cos(π/m) for every bond label
//! m ∈ {2, 3, 4, 6, ∞} (namely 0, 1, √2, √3, 2), so geometric
//! representation matrices have entries here with no denominators beyond
//! those introduced by the caller. Sign determination is exact: a scalar
//! is written as t1 + t2·√3 with t1, t2 ∈ Q(√2) and the sign is resolved
//! by norm descent through the tower.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rsign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sign of a + b·√2, exactly.
fn sign_q2(a: &BigRational, b: &BigRational) -> i32 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 0,
        (false, true) => rsign(a),
        (true, false) => rsign(b),
        (false, false) => {
            let sa = rsign(a);
            if sa == rsign(b) {
                sa
            } else {
                // x·(a - b√2) = a² - 2b², and a - b√2 has sign sa here.
                let n = a * a - rat(2, 1) * b * b;
                debug_assert!(!n.is_zero(), "sqrt(2) is irrational");
                sa * rsign(&n)
            }
        }
    }
}

/// Element of Q(√2, √3): c0 + c1·√2 + c2·√3 + c3·√6.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    c: [BigRational; 4],
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            c: [
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
            ],
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        let mut s = Scalar::zero();
        s.c[0] = rat(n, 1);
        s
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        let mut s = Scalar::zero();
        s.c[0] = rat(n, d);
        s
    }

    pub fn sqrt2() -> Self {
        let mut s = Scalar::zero();
        s.c[1] = BigRational::one();
        s
    }

    pub fn sqrt3() -> Self {
        let mut s = Scalar::zero();
        s.c[2] = BigRational::one();
        s
    }

    pub fn sqrt6() -> Self {
        let mut s = Scalar::zero();
        s.c[3] = BigRational::one();
        s
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Exact sign: -1, 0, or 1.
    pub fn sign(&self) -> i32 {
        // Split as t1 + t2·√3 with t1 = c0 + c1√2, t2 = c2 + c3√2.
        let (a, b, c, d) = (&self.c[0], &self.c[1], &self.c[2], &self.c[3]);
        let s1 = sign_q2(a, b);
        let s2 = sign_q2(c, d);
        if c.is_zero() && d.is_zero() {
            return s1;
        }
        if a.is_zero() && b.is_zero() {
            return s2;
        }
        if s1 == s2 {
            return s1;
        }
        // x·(t1 - t2√3) = t1² - 3t2² in Q(√2); t1 - t2√3 has sign s1.
        let na = a * a + rat(2, 1) * b * b - rat(3, 1) * (c * c + rat(2, 1) * d * d);
        let nb = rat(2, 1) * a * b - rat(6, 1) * c * d;
        let sn = sign_q2(&na, &nb);
        debug_assert!(sn != 0, "sqrt(3) is not in Q(sqrt(2))");
        s1 * sn
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero in Q(sqrt2, sqrt3)");
        // 1/(t1 + t2√3) = (t1 - t2√3)/(t1² - 3t2²), norm taken in Q(√2).
        let (a, b, c, d) = (&self.c[0], &self.c[1], &self.c[2], &self.c[3]);
        let na = a * a + rat(2, 1) * b * b - rat(3, 1) * (c * c + rat(2, 1) * d * d);
        let nb = rat(2, 1) * a * b - rat(6, 1) * c * d;
        // 1/(na + nb√2) = (na - nb√2)/(na² - 2nb²).
        let den = &na * &na - rat(2, 1) * &nb * &nb;
        assert!(!den.is_zero());
        let ia = &na / &den;
        let ib = -(&nb / &den);
        // (ia + ib√2)(t1 - t2√3) expanded over the basis.
        let mut out = Scalar::zero();
        out.c[0] = &ia * a + rat(2, 1) * &ib * b;
        out.c[1] = &ia * b + &ib * a;
        out.c[2] = -(&ia * c + rat(2, 1) * &ib * d);
        out.c[3] = -(&ia * d + &ib * c);
        out
    }

    /// Approximate value, for display and cross-checking only.
    pub fn approx(&self) -> f64 {
        fn f(x: &BigRational) -> f64 {
            let n = x.numer();
            let d = x.denom();
            // Good enough at desk scale; coordinates stay tiny.
            let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
            let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
            nf / df
        }
        f(&self.c[0])
            + f(&self.c[1]) * core::f64::consts::SQRT_2
            + f(&self.c[2]) * 1.732_050_807_568_877_2
            + f(&self.c[3]) * 2.449_489_742_783_178
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.c
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}r2 + {}r3 + {}r6)",
            self.c[0], self.c[1], self.c[2], self.c[3]
        )
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for k in 0..4 {
            out.c[k] += &rhs.c[k];
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for k in 0..4 {
            out.c[k] -= &rhs.c[k];
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let mut out = self.clone();
        for k in 0..4 {
            out.c[k] = -out.c[k].clone();
        }
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // Basis products: √2·√3 = √6, √2·√6 = 2√3, √3·√6 = 3√2, √6² = 6.
        let (a0, a1, a2, a3) = (&self.c[0], &self.c[1], &self.c[2], &self.c[3]);
        let (b0, b1, b2, b3) = (&rhs.c[0], &rhs.c[1], &rhs.c[2], &rhs.c[3]);
        let two = rat(2, 1);
        let three = rat(3, 1);
        let six = rat(6, 1);
        let mut out = Scalar::zero();
        out.c[0] = a0 * b0 + &two * a1 * b1 + &three * a2 * b2 + &six * a3 * b3;
        out.c[1] = a0 * b1 + a1 * b0 + &three * (a2 * b3 + a3 * b2);
        out.c[2] = a0 * b2 + a2 * b0 + &two * (a1 * b3 + a3 * b1);
        out.c[3] = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1;
        out
    }
}

macro_rules! forward_ops {
    ($($t:ident :: $m:ident),*) => {$(
        impl $t for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
    )*};
}
forward_ops!(Add::add, Sub::sub, Mul::mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for k in 0..4 {
            self.c[k] += &rhs.c[k];
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for k in 0..4 {
            self.c[k] -= &rhs.c[k];
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = (&*self) * rhs;
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

/// Dense square matrix over Q(√2, √3), row major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    n: usize,
    e: Vec<Scalar>,
}

impl Mat {
    pub fn zero(n: usize) -> Self {
        Mat {
            n,
            e: vec![Scalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.e[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.e[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let add = a * b;
                    let cur = out.get(i, j) + &add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Column j as a vector (the image of basis vector j).
    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.n {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += &(a * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Determinant of the leading principal k x k minor, by exact Gaussian
    /// elimination with partial (first nonzero) pivoting.
    pub fn leading_minor(&self, k: usize) -> Scalar {
        assert!(k <= self.n);
        let mut a: Vec<Vec<Scalar>> = (0..k)
            .map(|i| (0..k).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut det = Scalar::one();
        for col in 0..k {
            let piv = (col..k).find(|&r| !a[r][col].is_zero());
            let piv = match piv {
                None => return Scalar::zero(),
                Some(p) => p,
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det = &det * &p;
            let pinv = p.inv();
            for r in (col + 1)..k {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &pinv;
                for c in col..k {
                    let sub = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &sub;
                }
            }
        }
        det
    }

    pub fn det(&self) -> Scalar {
        self.leading_minor(self.n)
    }

    /// Positive definiteness via leading principal minors (symmetric input
    /// assumed by the caller).
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.n).all(|k| self.leading_minor(k).is_positive())
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat{}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{:?} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_products() {
        let r2 = Scalar::sqrt2();
        let r3 = Scalar::sqrt3();
        let r6 = Scalar::sqrt6();
        assert_eq!(&r2 * &r2, Scalar::from_int(2));
        assert_eq!(&r3 * &r3, Scalar::from_int(3));
        assert_eq!(&r6 * &r6, Scalar::from_int(6));
        assert_eq!(&r2 * &r3, r6);
        assert_eq!(&r2 * &r6, &Scalar::from_int(2) * &r3);
        assert_eq!(&r3 * &r6, &Scalar::from_int(3) * &r2);
    }

    #[test]
    fn signs_resolve_close_calls() {
        // √2 + √3 - √6 + 1/10 > 0 but barely structured: 1.414+1.732-2.449 ≈ 0.697.
        let x = &(&Scalar::sqrt2() + &Scalar::sqrt3()) - &Scalar::sqrt6();
        assert_eq!(x.sign(), 1);
        // 7/5 - √2 < 0 (1.4 < 1.41421).
        let y = &Scalar::from_ratio(7, 5) - &Scalar::sqrt2();
        assert_eq!(y.sign(), -1);
        // 99/70 > √2 (99/70 = 1.41428...).
        let z = &Scalar::from_ratio(99, 70) - &Scalar::sqrt2();
        assert_eq!(z.sign(), 1);
        // 5 - 2√6 > 0 (2√6 ≈ 4.899); and (5 - 2√6)(5 + 2√6) = 1.
        let w = &Scalar::from_int(5) - &(&Scalar::from_int(2) * &Scalar::sqrt6());
        assert_eq!(w.sign(), 1);
        // √6 - √2 - 1 > 0 (≈ 0.035): requires the two-level descent.
        let t = &(&Scalar::sqrt6() - &Scalar::sqrt2()) - &Scalar::one();
        assert_eq!(t.sign(), 1);
        // √6 - √2 - 21/20 < 0 (0.0353 - 0.05).
        let u = &(&Scalar::sqrt6() - &Scalar::sqrt2()) - &Scalar::from_ratio(21, 20);
        assert_eq!(u.sign(), -1);
        assert_eq!(Scalar::zero().sign(), 0);
    }

    #[test]
    fn sign_matches_float_on_random_combos() {
        // Deterministic pseudo-random sweep over small integer coordinates.
        let mut state = 0x243F_6A88_85A3_08D3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as i64 % 7) - 3
        };
        for _ in 0..500 {
            let mut s = Scalar::zero();
            let coords = [next(), next(), next(), next()];
            s.c[0] = rat(coords[0], 1);
            s.c[1] = rat(coords[1], 1);
            s.c[2] = rat(coords[2], 1);
            s.c[3] = rat(coords[3], 1);
            let approx = s.approx();
            if approx.abs() > 1e-6 {
                assert_eq!(s.sign(), if approx > 0.0 { 1 } else { -1 }, "{s:?}");
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let samples = [
            &Scalar::from_int(3) + &Scalar::sqrt2(),
            &(&Scalar::sqrt3() - &Scalar::from_ratio(1, 2)) + &Scalar::sqrt6(),
            &(&Scalar::sqrt2() + &Scalar::sqrt3()) - &Scalar::from_ratio(1, 7),
            Scalar::sqrt6(),
            Scalar::from_ratio(-4, 9),
        ];
        for x in samples {
            assert_eq!(&x * &x.inv(), Scalar::one(), "{x:?}");
        }
    }

    #[test]
    fn dihedral_rotation_has_finite_order() {
        // 2x2 reflection pair with bond 4: product must have order 4.
        let c = Scalar::sqrt2(); // 2cos(pi/4)
        let mut s = Mat::identity(2);
        s.set(0, 0, -Scalar::one());
        s.set(0, 1, c.clone());
        let mut t = Mat::identity(2);
        t.set(1, 1, -Scalar::one());
        t.set(1, 0, c);
        let st = s.mul(&t);
        let mut p = Mat::identity(2);
        for _ in 0..4 {
            p = p.mul(&st);
        }
        assert_eq!(p, Mat::identity(2));
        let mut q = Mat::identity(2);
        for _ in 0..2 {
            q = q.mul(&st);
        }
        assert_ne!(q, Mat::identity(2));
    }

    #[test]
    fn minors_detect_definiteness() {
        // Doubled cosine matrix of the bond-3 pair: [[2,-1],[-1,2]] — positive definite.
        let mut g = Mat::identity(2);
        g.set(0, 0, Scalar::from_int(2));
        g.set(1, 1, Scalar::from_int(2));
        g.set(0, 1, Scalar::from_int(-1));
        g.set(1, 0, Scalar::from_int(-1));
        assert!(g.is_positive_definite());
        assert_eq!(g.det(), Scalar::from_int(3));
        // Bond-infinity pair: [[2,-2],[-2,2]] — singular.
        let mut h = Mat::identity(2);
        h.set(0, 0, Scalar::from_int(2));
        h.set(1, 1, Scalar::from_int(2));
        h.set(0, 1, Scalar::from_int(-2));
        h.set(1, 0, Scalar::from_int(-2));
        assert!(!h.is_positive_definite());
        assert_eq!(h.det(), Scalar::zero());
    }

    #[test]
    fn determinant_with_row_swap_pivoting() {
        // First pivot zero forces a swap; det of [[0,1],[1,0]] is -1.
        let mut m = Mat::zero(2);
        m.set(0, 1, Scalar::one());
        m.set(1, 0, Scalar::one());
        assert_eq!(m.det(), Scalar::from_int(-1));
    }
}
