//! Rationals, p-adic valuations and S-integer rings.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::NumberError;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / m`. Panics if `m == 0`.
pub fn ratio(n: i64, m: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(m))
}

/// `max(|numerator|, denominator)`.
pub fn height(x: &Rational) -> BigInt {
    let n = x.numer().abs();
    let d = x.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

/// Number of times `p` divides the nonzero integer `n`.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// The p-adic valuation `v_p(x)`, i.e. the `v` with `x = p^v * u / w` and
/// `p` coprime to `u` and `w`.
pub fn padic_valuation(x: &Rational, p: u64) -> Result<i64, NumberError> {
    if x.is_zero() {
        return Err(NumberError::ZeroValuation);
    }
    if !is_prime(p) {
        return Err(NumberError::NotPrime(p));
    }
    let num = int_valuation(x.numer(), p) as i64;
    let den = int_valuation(x.denom(), p) as i64;
    Ok(num - den)
}

/// Is `x` in the ring `Z[1/T]`?
///
/// Divides every prime of `T` out of the denominator and accepts iff
/// nothing is left.
pub fn in_s_integers(x: &Rational, primes: &PrimeSet) -> bool {
    let mut den = x.denom().clone();
    for p in primes.iter() {
        let p = BigInt::from(p);
        loop {
            let (q, r) = den.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            den = q;
        }
    }
    den.is_one()
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

/// A finite set of primes, the `T` in `Z[1/T]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeSet(BTreeSet<u64>);

impl PrimeSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a prime set, rejecting any non-prime member.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self, NumberError> {
        let mut set = BTreeSet::new();
        for p in primes {
            if !is_prime(p) {
                return Err(NumberError::NotPrime(p));
            }
            set.insert(p);
        }
        Ok(Self(set))
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.contains(&p)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn smallest(&self) -> Option<u64> {
        self.0.iter().next().copied()
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn difference(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.union(&other.0).copied().collect())
    }

    /// Primes dividing the denominator of `x` that are not in this set.
    ///
    /// Only divisors among `candidates` are reported; the caller passes the
    /// ambient prime set `S`.
    pub fn offending_primes(&self, x: &Rational, candidates: &PrimeSet) -> Vec<u64> {
        candidates
            .iter()
            .filter(|&p| !self.contains(p) && int_valuation(x.denom(), p) > 0)
            .collect()
    }

    /// Comma-separated form, as accepted on the command line.
    pub fn to_list(&self) -> String {
        self.0
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_list())
    }
}

impl Serialize for PrimeSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

/// Formats a rational as `n` or `n/m`.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serializes a rational as its [`format_rational`] string.
pub fn serialize_rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_rational(x))
}

/// Exact floor of a rational.
pub fn floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Exact ceiling of a rational.
pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// `p^e` as a rational; negative exponents give `1/p^|e|`.
pub fn prime_power(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn primes(ps: &[u64]) -> PrimeSet {
        PrimeSet::new(ps.iter().copied()).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&int(12), 2).unwrap(), 2);
        assert_eq!(padic_valuation(&int(1), 7).unwrap(), 0);
        assert_eq!(padic_valuation(&ratio(5, 27), 3).unwrap(), -3);
        assert_eq!(padic_valuation(&ratio(-40, 3), 2).unwrap(), 3);
    }

    #[test]
    fn valuation_errors() {
        assert!(matches!(
            padic_valuation(&int(0), 2),
            Err(NumberError::ZeroValuation)
        ));
        assert!(matches!(
            padic_valuation(&int(3), 4),
            Err(NumberError::NotPrime(4))
        ));
    }

    #[test]
    fn s_integer_membership() {
        assert!(in_s_integers(&ratio(1, 2), &primes(&[2, 3])));
        assert!(!in_s_integers(&ratio(1, 5), &primes(&[2, 3])));
        assert!(in_s_integers(&int(7), &PrimeSet::empty()));
        assert!(in_s_integers(&ratio(7, 72), &primes(&[2, 3])));
        assert!(!in_s_integers(&ratio(7, 72), &primes(&[3])));
    }

    #[test]
    fn prime_set_validation() {
        assert!(PrimeSet::new([2, 3, 5]).is_ok());
        assert!(matches!(PrimeSet::new([2, 9]), Err(NumberError::NotPrime(9))));
        assert!(PrimeSet::new([1]).is_err());
        let s = primes(&[5, 2, 3, 2]);
        assert_eq!(s.to_list(), "2,3,5");
        assert_eq!(s.to_string(), "{2,3,5}");
        assert_eq!(s.difference(&primes(&[3])).to_list(), "2,5");
    }

    #[test]
    fn offending() {
        let t = primes(&[2]);
        let s = primes(&[2, 3, 5]);
        assert_eq!(t.offending_primes(&ratio(1, 30), &s), vec![3, 5]);
        assert!(t.offending_primes(&ratio(3, 8), &s).is_empty());
    }
}
