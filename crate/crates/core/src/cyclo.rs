//! Exact arithmetic in cyclotomic fields `Q(zeta_L)`.
//!
//! Values are stored in the power basis `1, z, ..., z^{phi(L)-1}` reduced
//! modulo the `L`-th cyclotomic polynomial, with integer coordinates over a
//! common denominator. Because the power basis is a `Q`-basis of the field,
//! a value is zero iff every coordinate is zero, which is what makes the
//! zero tests in the rest of the library exact.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

use crate::phase::Phase;
use crate::util::lcm_u64;

pub fn euler_phi(mut n: u64) -> u64 {
    assert!(n >= 1);
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic divisor; panics if the remainder is nonzero.
fn poly_div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().is_some_and(|c| c.is_one()), "divisor must be monic");
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    let d = den.len() - 1;
    if rem.len() < den.len() {
        assert!(rem.is_empty(), "inexact polynomial division");
        return Vec::new();
    }
    let mut quot = vec![BigInt::zero(); rem.len() - d];
    while rem.len() >= den.len() {
        let lead = rem.last().unwrap().clone();
        let shift = rem.len() - den.len();
        quot[shift] = lead.clone();
        for (k, c) in den.iter().enumerate() {
            let sub = &lead * c;
            rem[shift + k] -= sub;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.is_empty(), "inexact polynomial division");
    quot
}

/// The `n`-th cyclotomic polynomial, as dense integer coefficients
/// (constant term first). Memoized.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by the product of the proper-divisor cyclotomics.
    let mut num = vec![BigInt::zero(); (n + 1) as usize];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut den = vec![BigInt::one()];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic_polynomial(d));
        }
    }
    let p = poly_div_exact_monic(&num, &den);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// Reduces an integer polynomial modulo the (monic) cyclotomic polynomial,
/// returning exactly `phi(L)` coordinates.
fn reduce_mod_cyclotomic(mut p: Vec<BigInt>, l: u64) -> Vec<BigInt> {
    let phi = euler_phi(l) as usize;
    let modulus = cyclotomic_polynomial(l);
    while p.len() > phi {
        let lead = p.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = p.len() + 1 - modulus.len();
        for (k, c) in modulus.iter().take(modulus.len() - 1).enumerate() {
            let sub = &lead * c;
            p[shift + k] -= sub;
        }
    }
    p.resize(phi, BigInt::zero());
    p
}

/// An element of `Q(zeta_L)` in reduced power-basis coordinates.
#[derive(Clone)]
pub struct CycloNumber {
    conductor: u64,
    nums: Vec<BigInt>,
    den: BigInt,
}

impl CycloNumber {
    fn normalized(conductor: u64, mut nums: Vec<BigInt>, mut den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            den = -den;
            for x in nums.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let mut g = den.clone();
        for x in &nums {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        if !g.is_one() {
            den /= &g;
            for x in nums.iter_mut() {
                *x /= &g;
            }
        }
        if nums.iter().all(|x| x.is_zero()) {
            den = BigInt::one();
        }
        CycloNumber { conductor, nums, den }
    }

    pub fn zero(conductor: u64) -> Self {
        let phi = euler_phi(conductor) as usize;
        CycloNumber { conductor, nums: vec![BigInt::zero(); phi], den: BigInt::one() }
    }

    pub fn one(conductor: u64) -> Self {
        let mut v = Self::zero(conductor);
        v.nums[0] = BigInt::one();
        v
    }

    pub fn from_rational(conductor: u64, q: &BigRational) -> Self {
        let mut v = Self::zero(conductor);
        v.nums[0] = q.numer().clone();
        Self::normalized(conductor, v.nums, q.denom().clone())
    }

    pub fn from_int(conductor: u64, n: i64) -> Self {
        let mut v = Self::zero(conductor);
        v.nums[0] = BigInt::from(n);
        v
    }

    /// `zeta_L^k`.
    pub fn root_of_unity(conductor: u64, k: u64) -> Self {
        let k = (k % conductor) as usize;
        let mut p = vec![BigInt::zero(); k + 1];
        p[k] = BigInt::one();
        CycloNumber { conductor, nums: reduce_mod_cyclotomic(p, conductor), den: BigInt::one() }
    }

    /// The circle point of a rational phase, at a conductor divisible by the
    /// phase denominator.
    pub fn from_phase(conductor: u64, phase: &Phase) -> Self {
        Self::root_of_unity(conductor, phase.numer_over(conductor))
    }

    /// The imaginary unit; the conductor must be divisible by 4.
    pub fn imaginary_unit(conductor: u64) -> Self {
        assert!(conductor % 4 == 0, "imaginary unit needs 4 | conductor");
        Self::root_of_unity(conductor, conductor / 4)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coordinates(&self) -> (&[BigInt], &BigInt) {
        (&self.nums, &self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|x| x.is_zero())
    }

    /// Re-expresses the value in `Q(zeta_M)` for a multiple `M` of the
    /// conductor, substituting `zeta_L = zeta_M^{M/L}`.
    pub fn lift(&self, m: u64) -> Self {
        if m == self.conductor {
            return self.clone();
        }
        assert!(m % self.conductor == 0, "lift target must be a multiple of the conductor");
        let step = (m / self.conductor) as usize;
        let deg = self.nums.len().saturating_sub(1);
        let mut p = vec![BigInt::zero(); deg * step + 1];
        for (j, c) in self.nums.iter().enumerate() {
            if !c.is_zero() {
                p[j * step] += c;
            }
        }
        CycloNumber { conductor: m, nums: reduce_mod_cyclotomic(p, m), den: self.den.clone() }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let l = lcm_u64(a.conductor, b.conductor);
        (a.lift(l), b.lift(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let nums: Vec<BigInt> =
            a.nums.iter().zip(&b.nums).map(|(x, y)| x * &b.den + y * &a.den).collect();
        Self::normalized(a.conductor, nums, &a.den * &b.den)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycloNumber {
            conductor: self.conductor,
            nums: self.nums.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let prod = poly_mul(&a.nums, &b.nums);
        let nums = reduce_mod_cyclotomic(prod, a.conductor);
        Self::normalized(a.conductor, nums, &a.den * &b.den)
    }

    /// Applies the Galois automorphism `zeta -> zeta^s` (requires
    /// `gcd(s, L) = 1`).
    pub fn galois(&self, s: u64) -> Self {
        let l = self.conductor;
        assert!(crate::util::gcd_u64(s % l, l) == 1, "galois exponent must be coprime to conductor");
        let mut p = vec![BigInt::zero(); 1];
        for (j, c) in self.nums.iter().enumerate() {
            if !c.is_zero() {
                let e = ((j as u64) * s % l) as usize;
                if p.len() <= e {
                    p.resize(e + 1, BigInt::zero());
                }
                p[e] += c;
            }
        }
        CycloNumber { conductor: l, nums: reduce_mod_cyclotomic(p, l), den: self.den.clone() }
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        if self.conductor == 1 {
            return self.clone();
        }
        self.galois(self.conductor - 1)
    }

    /// Exact inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // Extended Euclid of the value against the cyclotomic polynomial in
        // Q[x]: u*a + v*Phi = 1 since Phi is irreducible over Q.
        let a: Vec<BigRational> =
            self.nums.iter().map(|n| BigRational::new(n.clone(), self.den.clone())).collect();
        let m: Vec<BigRational> = cyclotomic_polynomial(self.conductor)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, u) = rational_poly_half_xgcd(&a, &m);
        assert!(g.len() == 1 && !g[0].is_zero(), "cyclotomic polynomial must be irreducible");
        let scale = g[0].recip();
        let coeffs: Vec<BigRational> = u.iter().map(|c| c * &scale).collect();
        let mut den = BigInt::one();
        for c in &coeffs {
            den = den.lcm(c.denom());
        }
        let mut nums = vec![BigInt::zero(); euler_phi(self.conductor) as usize];
        for (j, c) in coeffs.iter().enumerate() {
            nums[j] = c.numer() * (&den / c.denom());
        }
        Some(Self::normalized(self.conductor, nums, den))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        let (a, b) = Self::common(self, other);
        Some(a.mul(&b.inv()?))
    }

    /// Floating-point value, for reports and tolerance cross-checks.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let den: f64 = self.den.to_string().parse().unwrap_or(f64::NAN);
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.nums.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let x: f64 = c.to_string().parse().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * (j as f64) / (self.conductor as f64);
            re += x * angle.cos();
            im += x * angle.sin();
        }
        (re / den, im / den)
    }

    /// Exact rational value, when the number lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.nums.iter().skip(1).any(|c| !c.is_zero()) {
            return None;
        }
        Some(BigRational::new(self.nums[0].clone(), self.den.clone()))
    }

    /// Exact Gaussian-rational value `re + i*im`, when the number lies in
    /// `Q(i)`.
    pub fn to_gaussian(&self) -> Option<(BigRational, BigRational)> {
        let l = lcm_u64(self.conductor, 4);
        let a = self.lift(l);
        let conj = a.conj();
        let two = CycloNumber::from_int(l, 2);
        let re = a.add(&conj).div(&two).unwrap().to_rational()?;
        let i = CycloNumber::imaginary_unit(l);
        let im = a.sub(&conj).div(&two).unwrap().div(&i).unwrap().to_rational()?;
        Some((re, im))
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        a.nums == b.nums && a.den == b.den
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo(L={}, [", self.conductor)?;
        for (j, c) in self.nums.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]/{})", self.den)
    }
}

/// Extended Euclid over `Q[x]` returning `(gcd, u)` with
/// `u*a = gcd (mod m)`.
fn rational_poly_half_xgcd(
    a: &[BigRational],
    m: &[BigRational],
) -> (Vec<BigRational>, Vec<BigRational>) {
    fn trim(p: &mut Vec<BigRational>) {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }
    fn divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut rem = num.to_vec();
        trim(&mut rem);
        if rem.len() < den.len() {
            return (Vec::new(), rem);
        }
        let mut quot = vec![BigRational::zero(); rem.len() - den.len() + 1];
        let lead_inv = den.last().unwrap().recip();
        while rem.len() >= den.len() {
            let c = rem.last().unwrap() * &lead_inv;
            let shift = rem.len() - den.len();
            quot[shift] = c.clone();
            for (k, d) in den.iter().enumerate() {
                let sub = &c * d;
                rem[shift + k] -= sub;
            }
            trim(&mut rem);
            if rem.is_empty() {
                break;
            }
        }
        (quot, rem)
    }
    fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = a.len().max(b.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    let mut r0 = a.to_vec();
    trim(&mut r0);
    let mut r1 = m.to_vec();
    trim(&mut r1);
    let mut u0 = vec![BigRational::one()];
    let mut u1: Vec<BigRational> = Vec::new();
    while !r1.is_empty() {
        let (q, r) = divmod(&r0, &r1);
        let u = sub(&u0, &mul(&q, &u1));
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, u);
    }
    (r0, u0)
}
