//! Exact scalars in cyclotomic fields ℚ(ζ_N).
//!
//! An element is stored in the power basis `1, z, …, z^{φ(N)-1}` modulo the
//! cyclotomic polynomial Φ_N, where `z` is the primitive root `exp(2πi/N)`.
//! Rational values are always normalised to conductor 1, so the common case
//! never touches polynomial arithmetic. Operands of different conductors are
//! promoted to the lcm of the two.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Repr {
    Rat(BigRational),
    Cyc(u32, Arc<[BigRational]>),
}

/// An exact element of a cyclotomic field.
#[derive(Clone, Debug)]
pub struct CycScalar(Repr);

struct Field {
    n: u32,
    phi: usize,
    /// `pow[j]` is `z^j mod Φ_N` for `0 <= j < N`.
    pow: Vec<Vec<BigRational>>,
}

fn fields() -> &'static RwLock<HashMap<u32, Arc<Field>>> {
    static FIELDS: OnceLock<RwLock<HashMap<u32, Arc<Field>>>> = OnceLock::new();
    FIELDS.get_or_init(|| RwLock::new(HashMap::new()))
}

fn field(n: u32) -> Arc<Field> {
    if let Some(f) = fields().read().unwrap().get(&n) {
        return f.clone();
    }
    let f = Arc::new(build_field(n));
    fields().write().unwrap().insert(n, f.clone());
    f
}

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    // x^n - 1 = prod_{d | n} Φ_d(x)
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = poly_exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    let dq = a.len() - 1 - db;
    let mut q = vec![BigInt::zero(); dq + 1];
    for k in (0..=dq).rev() {
        let c = &rem[k + db] / lead;
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] -= &c * bi;
        }
        q[k] = c;
    }
    debug_assert!(rem.iter().all(|r| r.is_zero()));
    q
}

fn build_field(n: u32) -> Field {
    let poly = cyclotomic_poly(n);
    let phi = poly.len() - 1;
    let mut pow = Vec::with_capacity(n as usize);
    let mut cur = vec![BigRational::zero(); phi];
    cur[0] = BigRational::one();
    for _ in 0..n {
        pow.push(cur.clone());
        // multiply by z and reduce
        let top = cur[phi - 1].clone();
        let mut next = vec![BigRational::zero(); phi];
        for i in (1..phi).rev() {
            next[i] = cur[i - 1].clone();
        }
        if !top.is_zero() {
            for (i, c) in poly.iter().take(phi).enumerate() {
                next[i] -= &top * BigRational::from_integer(c.clone());
            }
        }
        cur = next;
    }
    Field { n, phi, pow }
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    let mut m = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result as usize
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl CycScalar {
    pub fn zero() -> Self {
        CycScalar(Repr::Rat(BigRational::zero()))
    }

    pub fn one() -> Self {
        CycScalar(Repr::Rat(BigRational::one()))
    }

    pub fn from_int(n: i64) -> Self {
        CycScalar(Repr::Rat(BigRational::from_integer(BigInt::from(n))))
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycScalar(Repr::Rat(q))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        CycScalar(Repr::Rat(rat(num, den)))
    }

    /// `num/den * ζ_conductor^power`.
    pub fn cyc(num: i64, den: i64, power: i64, conductor: u32) -> Self {
        assert!(conductor >= 1, "conductor must be positive");
        let k = power.rem_euclid(conductor as i64) as usize;
        if conductor == 1 || k == 0 {
            return Self::frac(num, den);
        }
        let f = field(conductor);
        let c = rat(num, den);
        let coeffs: Vec<BigRational> = f.pow[k].iter().map(|x| x * &c).collect();
        Self::from_coeffs(conductor, coeffs)
    }

    /// Primitive root of unity `exp(2πi/n)`.
    pub fn root_of_unity(n: u32) -> Self {
        Self::cyc(1, 1, 1, n)
    }

    /// Builds from power-basis coefficients (length φ(n) or shorter).
    pub fn from_coeffs(n: u32, mut coeffs: Vec<BigRational>) -> Self {
        if n == 1 {
            return CycScalar(Repr::Rat(coeffs.into_iter().next().unwrap_or_else(BigRational::zero)));
        }
        let phi = totient(n);
        coeffs.resize(phi, BigRational::zero());
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            return CycScalar(Repr::Rat(coeffs.swap_remove(0)));
        }
        CycScalar(Repr::Cyc(n, coeffs.into()))
    }

    /// Conductor of the stored representation (1 for rationals).
    pub fn conductor(&self) -> u32 {
        match &self.0 {
            Repr::Rat(_) => 1,
            Repr::Cyc(n, _) => *n,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if q.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(q) => Some(q),
            Repr::Cyc(..) => None,
        }
    }

    /// Coefficients in the power basis of conductor `n` (which must be a
    /// multiple of this element's conductor).
    pub fn coeffs_in(&self, n: u32) -> Vec<BigRational> {
        let own = self.conductor();
        assert!(n % own == 0, "conductor {n} does not contain conductor {own}");
        let phi = totient(n);
        match &self.0 {
            Repr::Rat(q) => {
                let mut v = vec![BigRational::zero(); phi];
                v[0] = q.clone();
                v
            }
            Repr::Cyc(m, c) if *m == n => c.to_vec(),
            Repr::Cyc(m, c) => {
                let f = field(n);
                let step = (n / m) as usize;
                let mut v = vec![BigRational::zero(); phi];
                for (k, ck) in c.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    let p = &f.pow[(k * step) % n as usize];
                    for (vi, pi) in v.iter_mut().zip(p) {
                        if !pi.is_zero() {
                            *vi += ck * pi;
                        }
                    }
                }
                v
            }
        }
    }

    fn binary_coeffs(a: &Self, b: &Self) -> (u32, Vec<BigRational>, Vec<BigRational>) {
        let n = a.conductor().lcm(&b.conductor());
        (n, a.coeffs_in(n), b.coeffs_in(n))
    }

    /// Complex conjugation (ζ ↦ ζ^{-1}).
    pub fn conj(&self) -> Self {
        match &self.0 {
            Repr::Rat(_) => self.clone(),
            Repr::Cyc(n, c) => {
                let f = field(*n);
                let mut v = vec![BigRational::zero(); f.phi];
                for (k, ck) in c.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    let p = &f.pow[(f.n as usize - k) % f.n as usize];
                    for (vi, pi) in v.iter_mut().zip(p) {
                        if !pi.is_zero() {
                            *vi += ck * pi;
                        }
                    }
                }
                Self::from_coeffs(*n, v)
            }
        }
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.0 {
            Repr::Rat(q) => {
                if q.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(CycScalar(Repr::Rat(q.recip())))
                }
            }
            Repr::Cyc(n, c) => {
                // Solve x * y = 1 via the multiplication matrix of x.
                let f = field(*n);
                let phi = f.phi;
                let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(phi);
                for j in 0..phi {
                    cols.push(mul_coeffs(&f, c, &f.pow[j]));
                }
                let mut m: Vec<Vec<BigRational>> = (0..phi)
                    .map(|i| {
                        let mut row: Vec<BigRational> = (0..phi).map(|j| cols[j][i].clone()).collect();
                        row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                        row
                    })
                    .collect();
                let y = solve_square_rational(&mut m).ok_or(Error::DivisionByZero)?;
                Ok(Self::from_coeffs(*n, y))
            }
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Real part as a rational enclosure `[lo, hi]` with width about 2^-bits.
    pub fn real_enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        match &self.0 {
            Repr::Rat(q) => (q.clone(), q.clone()),
            Repr::Cyc(n, c) => {
                let mut lo = BigRational::zero();
                let mut hi = BigRational::zero();
                for (k, ck) in c.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    let (cl, ch) = cos_two_pi_ratio(k as u32, *n, bits + 8);
                    if ck.is_positive() {
                        lo += ck * &cl;
                        hi += ck * &ch;
                    } else {
                        lo += ck * &ch;
                        hi += ck * &cl;
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Sign of a real element (-1, 0, 1) in the standard complex embedding.
    pub fn real_sign(&self) -> Result<i32> {
        if !self.is_real() {
            return Err(Error::NotReal(self.to_string()));
        }
        if self.is_zero() {
            return Ok(0);
        }
        let mut bits = 32;
        loop {
            let (lo, hi) = self.real_enclosure(bits);
            if lo.is_positive() {
                return Ok(1);
            }
            if hi.is_negative() {
                return Ok(-1);
            }
            bits *= 2;
            if bits > 1 << 16 {
                return Err(Error::Internal("sign refinement did not terminate".into()));
            }
        }
    }

    /// Approximate complex value, for diagnostics only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let n = self.conductor();
        let c = self.coeffs_in(n);
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, ck) in c.iter().enumerate() {
            let x = ratio_to_f64(ck);
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            re += x * t.cos();
            im += x * t.sin();
        }
        (re, im)
    }

    /// Canonical text rendered in the power basis of conductor `n`.
    pub fn format_in(&self, n: u32) -> String {
        if let Repr::Rat(q) = &self.0 {
            return fmt_rat(q);
        }
        let n = n.lcm(&self.conductor());
        let c = self.coeffs_in(n);
        let mut out = String::new();
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let neg = ck.is_negative();
            let a = ck.abs();
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            let body = if k == 0 {
                fmt_rat(&a)
            } else if a.is_one() {
                mono
            } else {
                format!("{}*{}", fmt_rat(&a), mono)
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parses `1/2 + 1/2*z^3` style text; `z` is the primitive `conductor`-th root.
    pub fn parse(text: &str, conductor: u32) -> Result<Self> {
        crate::expr::parse_scalar(text, conductor)
    }
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn mul_coeffs(f: &Field, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = f.n as usize;
    let mut acc = vec![BigRational::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            acc[(i + j) % n] += ai * bj;
        }
    }
    let mut out = vec![BigRational::zero(); f.phi];
    for (k, ak) in acc.iter().enumerate() {
        if ak.is_zero() {
            continue;
        }
        if k < f.phi {
            out[k] += ak;
        } else {
            for (o, p) in out.iter_mut().zip(&f.pow[k]) {
                if !p.is_zero() {
                    *o += ak * p;
                }
            }
        }
    }
    out
}

/// Gauss-Jordan on an augmented square system; `None` if singular.
fn solve_square_rational(m: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let (src, dst) = if r < col {
                    let (a, b) = m.split_at_mut(col);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = m.split_at_mut(r);
                    (&a[col], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &f * s;
                }
            }
        }
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

// ---------- rigorous enclosures of cos(2πk/n) ----------

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let s = pow2(bits);
    let v = (x * BigRational::from_integer(s.clone())).floor();
    v / BigRational::from_integer(s)
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let s = pow2(bits);
    let v = (x * BigRational::from_integer(s.clone())).ceil();
    v / BigRational::from_integer(s)
}

/// Enclosure of atan(1/x) for integer x >= 2 via the alternating series.
fn atan_inv(x: i64, bits: u32) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), pow2(bits + 4));
    let x2 = BigRational::from_integer(BigInt::from(x * x));
    let mut power = BigRational::new(BigInt::one(), BigInt::from(x));
    let mut sum = BigRational::zero();
    let mut m: i64 = 0;
    loop {
        let term = &power / BigRational::from_integer(BigInt::from(2 * m + 1));
        if term < eps {
            // alternating, decreasing: the remainder lies between 0 and ±term
            return if m % 2 == 0 {
                (sum.clone(), sum + term)
            } else {
                (sum.clone() - term, sum)
            };
        }
        if m % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &x2;
        m += 1;
    }
}

fn pi_enclosure(bits: u32) -> (BigRational, BigRational) {
    let (a_lo, a_hi) = atan_inv(5, bits + 6);
    let (b_lo, b_hi) = atan_inv(239, bits + 6);
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    let lo = &sixteen * &a_lo - &four * &b_hi;
    let hi = &sixteen * &a_hi - &four * &b_lo;
    (round_down(&lo, bits + 4), round_up(&hi, bits + 4))
}

/// Enclosure of cos(t) for rational 0 <= t <= 4.
fn cos_point(t: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), pow2(bits + 4));
    let t2 = t * t;
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut m: i64 = 0;
    loop {
        // Terms decrease monotonically once 2m+1 > t; t <= 4 so m >= 2 suffices.
        if m >= 2 && term.abs() < eps {
            let a = term.abs();
            let lo = round_down(&(&sum - &a), bits + 2);
            let hi = round_up(&(&sum + &a), bits + 2);
            return (lo, hi);
        }
        sum += &term;
        term = -(&term * &t2) / BigRational::from_integer(BigInt::from((2 * m + 1) * (2 * m + 2)));
        m += 1;
    }
}

/// Enclosure of cos(2πk/n).
fn cos_two_pi_ratio(k: u32, n: u32, bits: u32) -> (BigRational, BigRational) {
    let k = k % n;
    if k == 0 {
        return (BigRational::one(), BigRational::one());
    }
    // reduce to angle in [0, π]
    let kk = k.min(n - k);
    if 4 * kk == n {
        return (BigRational::zero(), BigRational::zero());
    }
    if 2 * kk == n {
        return (-BigRational::one(), -BigRational::one());
    }
    let (p_lo, p_hi) = pi_enclosure(bits + 4);
    let r = BigRational::new(BigInt::from(2 * kk), BigInt::from(n));
    let t_lo = &p_lo * &r;
    let t_hi = &p_hi * &r;
    // cos is decreasing on [0, π]
    let (lo, _) = cos_point(&t_hi, bits);
    let (_, hi) = cos_point(&t_lo, bits);
    (lo, hi)
}

// ---------- arithmetic traits ----------

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a == b,
            (Repr::Rat(_), Repr::Cyc(..)) | (Repr::Cyc(..), Repr::Rat(_)) => false,
            (Repr::Cyc(n, a), Repr::Cyc(m, b)) if n == m => a == b,
            _ => {
                let (_, a, b) = Self::binary_coeffs(self, other);
                a == b
            }
        }
    }
}

impl Eq for CycScalar {}

impl<'a> Add<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => CycScalar(Repr::Rat(a + b)),
            _ => {
                let (n, mut a, b) = CycScalar::binary_coeffs(self, rhs);
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                CycScalar::from_coeffs(n, a)
            }
        }
    }
}

impl<'a> Sub<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => CycScalar(Repr::Rat(a - b)),
            _ => {
                let (n, mut a, b) = CycScalar::binary_coeffs(self, rhs);
                for (x, y) in a.iter_mut().zip(b) {
                    *x -= y;
                }
                CycScalar::from_coeffs(n, a)
            }
        }
    }
}

impl<'a> Mul<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => CycScalar(Repr::Rat(a * b)),
            (Repr::Rat(a), Repr::Cyc(n, c)) | (Repr::Cyc(n, c), Repr::Rat(a)) => {
                if a.is_zero() {
                    return CycScalar::zero();
                }
                CycScalar(Repr::Cyc(*n, c.iter().map(|x| x * a).collect()))
            }
            _ => {
                let (n, a, b) = CycScalar::binary_coeffs(self, rhs);
                let f = field(n);
                CycScalar::from_coeffs(n, mul_coeffs(&f, &a, &b))
            }
        }
    }
}

impl<'a> Div<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn div(self, rhs: &CycScalar) -> CycScalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => CycScalar(Repr::Rat(a / b)),
            _ => self * &rhs.inv().expect("division by zero"),
        }
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        match &self.0 {
            Repr::Rat(a) => CycScalar(Repr::Rat(-a)),
            Repr::Cyc(n, c) => CycScalar(Repr::Cyc(*n, c.iter().map(|x| -x).collect())),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

impl std::iter::Sum for CycScalar {
    fn sum<I: Iterator<Item = CycScalar>>(iter: I) -> Self {
        iter.fold(CycScalar::zero(), |a, b| a + b)
    }
}

/// Conductor whose primitive root `z` denotes in displayed scalars.
static DISPLAY_CONDUCTOR: std::sync::atomic::AtomicU32 = std::sync::atomic::AtomicU32::new(1);

/// Sets the session conductor used by `Display`, so that printed scalars
/// parse back with the same conductor.
pub fn set_display_conductor(n: u32) {
    DISPLAY_CONDUCTOR.store(n.max(1), std::sync::atomic::Ordering::Relaxed);
}

pub fn display_conductor() -> u32 {
    DISPLAY_CONDUCTOR.load(std::sync::atomic::Ordering::Relaxed)
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_in(display_conductor()))
    }
}

impl From<i64> for CycScalar {
    fn from(n: i64) -> Self {
        CycScalar::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        let p = |n| cyclotomic_poly(n).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(p(1), "-1,1");
        assert_eq!(p(3), "1,1,1");
        assert_eq!(p(4), "1,0,1");
        assert_eq!(p(6), "1,-1,1");
        assert_eq!(p(12), "1,0,-1,0,1");
    }

    #[test]
    fn roots_of_unity_have_the_right_order() {
        for n in [2u32, 3, 4, 5, 6, 8, 12] {
            let z = CycScalar::root_of_unity(n);
            assert!(z.pow(n as i64).unwrap().is_one(), "z^{n} != 1");
            for k in 1..n {
                assert!(!z.pow(k as i64).unwrap().is_one());
            }
        }
    }

    #[test]
    fn conjugation_and_inverse_of_unit_roots_agree() {
        let z = CycScalar::root_of_unity(5);
        assert_eq!(z.conj(), z.inv().unwrap());
        let w = &z + &CycScalar::from_int(2);
        assert!((&w * &w.inv().unwrap()).is_one());
    }

    #[test]
    fn mixed_conductors_promote() {
        let i = CycScalar::root_of_unity(4);
        let w = CycScalar::root_of_unity(3);
        let p = &i * &w;
        assert_eq!(p.conductor(), 12);
        assert_eq!(p.pow(12).unwrap(), CycScalar::one());
        // z_4 squared is -1, a rational
        assert_eq!(i.pow(2).unwrap(), CycScalar::from_int(-1));
        assert_eq!((&i * &i).conductor(), 1);
    }

    #[test]
    fn formatting() {
        assert_eq!(CycScalar::frac(2, 4).to_string(), "1/2");
        let x = &CycScalar::frac(1, 2) + &CycScalar::cyc(1, 2, 3, 8);
        assert_eq!(x.to_string(), "1/2 + 1/2*z^3");
        let y = &CycScalar::one() - &CycScalar::root_of_unity(5);
        assert_eq!(y.to_string(), "1 - z");
        assert_eq!(CycScalar::cyc(-3, 1, 1, 5).to_string(), "-3*z");
        assert_eq!(CycScalar::root_of_unity(4).format_in(8), "z^2");
    }

    #[test]
    fn real_signs() {
        // z + z^-1 = 2cos(2π/5) > 0, z^2 + z^-2 < 0
        let z = CycScalar::root_of_unity(5);
        let a = &z + &z.conj();
        assert_eq!(a.real_sign().unwrap(), 1);
        let z2 = z.pow(2).unwrap();
        let b = &z2 + &z2.conj();
        assert_eq!(b.real_sign().unwrap(), -1);
        // golden ratio identity: (z + z^-1)^2 + (z + z^-1) - 1 = 0
        let g = &(&a * &a) + &a;
        assert_eq!(g, CycScalar::one());
        let tiny = &a - &CycScalar::frac(61803, 100000);
        assert_eq!(tiny.real_sign().unwrap(), 1);
        let tiny2 = &a - &CycScalar::frac(61804, 100000);
        assert_eq!(tiny2.real_sign().unwrap(), -1);
    }
}
