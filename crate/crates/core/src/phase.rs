//! Rational points on the circle, represented as phases in `[0, 1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A rational phase `q` with `0 <= q < 1`, standing for the circle point
/// `e^{2 pi i q}`. Always stored reduced, so equality and ordering are
/// structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase(BigRational);

impl Phase {
    pub fn zero() -> Self {
        Phase(BigRational::zero())
    }

    /// Reduces an arbitrary rational modulo 1 into `[0, 1)`.
    pub fn new(q: BigRational) -> Self {
        Phase(&q - q.floor())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "phase denominator must be nonzero");
        Phase::new(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator of the reduced phase; 1 for the zero phase.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &Phase) -> Phase {
        Phase::new(&self.0 + &other.0)
    }

    /// The phase of the complex conjugate / group inverse.
    pub fn neg(&self) -> Phase {
        Phase::new(-&self.0)
    }

    /// Phase of the `k`-th power of the point.
    pub fn scale(&self, k: &BigInt) -> Phase {
        Phase::new(&self.0 * BigRational::from_integer(k.clone()))
    }

    /// Numerator of `q` when written over the given denominator, which must
    /// be a multiple of `denom()`.
    pub fn numer_over(&self, denom: u64) -> u64 {
        let d = BigInt::from(denom);
        let (q, r) = num_integer::Integer::div_rem(&(self.numer() * &d), self.denom());
        assert!(r.is_zero(), "denominator {denom} incompatible with phase {self}");
        let q = num_integer::Integer::mod_floor(&q, &d);
        u64::try_from(&q).expect("reduced phase numerator fits u64")
    }

    pub fn to_f64(&self) -> f64 {
        let n: f64 = self.0.numer().to_string().parse().unwrap_or(f64::NAN);
        let d: f64 = self.0.denom().to_string().parse().unwrap_or(f64::NAN);
        n / d
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses "p/q" or "p" into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(n))
        }
    }
}

/// Formats a rational as "p/q", or "p" when integral.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rationals have exact sign information; exposed for report formatting.
pub fn rational_is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_mod_one() {
        assert_eq!(Phase::from_ratio(3, 2), Phase::from_ratio(1, 2));
        assert_eq!(Phase::from_ratio(-1, 3), Phase::from_ratio(2, 3));
        assert_eq!(Phase::from_ratio(7, 1), Phase::zero());
    }

    #[test]
    fn add_and_neg() {
        let a = Phase::from_ratio(1, 2);
        let b = Phase::from_ratio(2, 3);
        assert_eq!(a.add(&b), Phase::from_ratio(1, 6));
        assert_eq!(a.neg(), a); // 1/2 is its own inverse
        assert_eq!(b.neg(), Phase::from_ratio(1, 3));
        assert_eq!(Phase::zero().neg(), Phase::zero());
    }

    #[test]
    fn numer_over_common_denominator() {
        let q = Phase::from_ratio(2, 3);
        assert_eq!(q.numer_over(12), 8);
        assert_eq!(Phase::zero().numer_over(5), 0);
    }

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-7/4").unwrap();
        assert_eq!(format_rational(&q), "-7/4");
        assert_eq!(parse_rational("5").unwrap(), BigRational::from_integer(5.into()));
        assert!(parse_rational("1/0").is_none());
    }
}
