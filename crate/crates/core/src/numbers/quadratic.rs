//! Exact real quadratic irrationals `rat + coeff * sqrt(radicand)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::rational::{format_rational, Rational};
use super::squarefree::{is_square, square_decompose};
use super::NumberError;

/// Bits of precision used by the first refinement round when comparing
/// numbers from different quadratic fields.
pub const INITIAL_COMPARE_BITS: u32 = 64;

/// An element `rat + coeff * sqrt(radicand)` of a real quadratic field.
///
/// `coeff == 0` exactly when `radicand == 0`; otherwise the radicand is at
/// least 2 and carries no square factor that could be found by complete
/// factorization (which is always attempted for radicands below 2^128).
#[derive(Clone, Debug)]
pub struct Quadratic {
    rat: Rational,
    coeff: Rational,
    radicand: BigInt,
}

/// The four field operations accepted by [`Quadratic::field_op`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Quadratic {
    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn rational(rat: Rational) -> Self {
        Self {
            rat,
            coeff: Rational::zero(),
            radicand: BigInt::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    /// `rat + coeff * sqrt(radicand)`, with square factors of the radicand
    /// pulled into the coefficient.
    pub fn new(rat: Rational, coeff: Rational, radicand: BigInt) -> Result<Self, NumberError> {
        let n = radicand
            .to_biguint()
            .ok_or_else(|| NumberError::NegativeRadicand(radicand.clone()))?;
        let (root, core) = square_decompose(&n);
        let coeff = coeff * Rational::from_integer(BigInt::from(root));
        if core.is_zero() || coeff.is_zero() {
            return Ok(Self::rational(rat));
        }
        if core.is_one() {
            return Ok(Self::rational(rat + coeff));
        }
        Ok(Self {
            rat,
            coeff,
            radicand: BigInt::from(core),
        })
    }

    /// The nonnegative square root of a nonnegative rational.
    pub fn sqrt(x: &Rational) -> Result<Self, NumberError> {
        if x.is_negative() {
            return Err(NumberError::NegativeRadicand(x.numer().clone()));
        }
        // sqrt(n/m) = sqrt(n*m) / m
        let m = x.denom().clone();
        let nm = x.numer() * &m;
        Self::new(Rational::zero(), Rational::new(BigInt::one(), m), nm)
    }

    /// Assembles a value whose radicand is already reduced.
    fn from_parts(rat: Rational, coeff: Rational, radicand: &BigInt) -> Self {
        if coeff.is_zero() || radicand.is_zero() {
            Self::rational(rat)
        } else {
            Self {
                rat,
                coeff,
                radicand: radicand.clone(),
            }
        }
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.rat.is_zero()
    }

    /// Two values share a field when one is rational, the radicands agree, or
    /// the radicands differ by a rational square factor.
    pub fn same_field(&self, other: &Quadratic) -> bool {
        self.align(other).is_ok()
    }

    /// Rewrites both operands over a common radicand.
    fn align(&self, other: &Quadratic) -> Result<Aligned, NumberError> {
        if other.is_rational() || self.radicand == other.radicand {
            return Ok(Aligned {
                x: (self.rat.clone(), self.coeff.clone()),
                y: (other.rat.clone(), other.coeff.clone()),
                radicand: self.radicand.clone(),
            });
        }
        if self.is_rational() {
            return Ok(Aligned {
                x: (self.rat.clone(), Rational::zero()),
                y: (other.rat.clone(), other.coeff.clone()),
                radicand: other.radicand.clone(),
            });
        }
        let product = (&self.radicand * &other.radicand).to_biguint().unwrap();
        if !is_square(&product) {
            return Err(NumberError::MixedFields {
                left: self.radicand.clone(),
                right: other.radicand.clone(),
            });
        }
        // sqrt(e) = sqrt(d*e) / d * sqrt(d); keep the smaller radicand
        let s = BigInt::from(product.sqrt());
        let (small, large, swap) = if self.radicand <= other.radicand {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let factor = Rational::new(s, small.radicand.clone());
        let moved = (large.rat.clone(), &large.coeff * factor);
        let kept = (small.rat.clone(), small.coeff.clone());
        let (x, y) = if swap { (moved, kept) } else { (kept, moved) };
        Ok(Aligned {
            x,
            y,
            radicand: small.radicand.clone(),
        })
    }

    /// Exact field arithmetic. Operands from distinct quadratic fields are
    /// rejected.
    pub fn field_op(&self, other: &Quadratic, op: FieldOp) -> Result<Quadratic, NumberError> {
        let Aligned {
            x: (r1, c1),
            y: (r2, c2),
            radicand: d,
        } = self.align(other)?;
        let dq = Rational::from_integer(d.clone());
        Ok(match op {
            FieldOp::Add => Self::from_parts(r1 + r2, c1 + c2, &d),
            FieldOp::Sub => Self::from_parts(r1 - r2, c1 - c2, &d),
            FieldOp::Mul => {
                let rat = &r1 * &r2 + &c1 * &c2 * &dq;
                let coeff = &r1 * &c2 + &r2 * &c1;
                Self::from_parts(rat, coeff, &d)
            }
            FieldOp::Div => {
                let norm = &r2 * &r2 - &c2 * &c2 * &dq;
                if norm.is_zero() {
                    return Err(NumberError::DivisionByZero);
                }
                // (r1 + c1 s)(r2 - c2 s) / norm
                let rat = (&r1 * &r2 - &c1 * &c2 * &dq) / &norm;
                let coeff = (&c1 * &r2 - &r1 * &c2) / &norm;
                Self::from_parts(rat, coeff, &d)
            }
        })
    }

    pub fn checked_add(&self, other: &Quadratic) -> Result<Quadratic, NumberError> {
        self.field_op(other, FieldOp::Add)
    }

    pub fn checked_sub(&self, other: &Quadratic) -> Result<Quadratic, NumberError> {
        self.field_op(other, FieldOp::Sub)
    }

    pub fn checked_mul(&self, other: &Quadratic) -> Result<Quadratic, NumberError> {
        self.field_op(other, FieldOp::Mul)
    }

    pub fn checked_div(&self, other: &Quadratic) -> Result<Quadratic, NumberError> {
        self.field_op(other, FieldOp::Div)
    }

    pub fn neg(&self) -> Quadratic {
        Self::from_parts(-&self.rat, -&self.coeff, &self.radicand)
    }

    pub fn conj(&self) -> Quadratic {
        Self::from_parts(self.rat.clone(), -&self.coeff, &self.radicand)
    }

    /// Field norm `rat^2 - coeff^2 * radicand`.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat
            - &self.coeff * &self.coeff * Rational::from_integer(self.radicand.clone())
    }

    pub fn add_rational(&self, r: &Rational) -> Quadratic {
        Self::from_parts(&self.rat + r, self.coeff.clone(), &self.radicand)
    }

    pub fn scale(&self, r: &Rational) -> Quadratic {
        Self::from_parts(&self.rat * r, &self.coeff * r, &self.radicand)
    }

    /// `(a x + b) / (c x + d)`; `None` when the denominator vanishes.
    pub fn mobius(&self, a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Option<Quadratic> {
        let num = (a * &self.rat + b, a * &self.coeff);
        let den = (c * &self.rat + d, c * &self.coeff);
        let dq = Rational::from_integer(self.radicand.clone());
        let norm = &den.0 * &den.0 - &den.1 * &den.1 * &dq;
        if norm.is_zero() {
            return None;
        }
        let rat = (&num.0 * &den.0 - &num.1 * &den.1 * &dq) / &norm;
        let coeff = (&num.1 * &den.0 - &num.0 * &den.1) / &norm;
        Some(Self::from_parts(rat, coeff, &self.radicand))
    }

    /// Exact sign, decided with rational operations only.
    pub fn sign(&self) -> Ordering {
        let rs = self.rat.cmp(&Rational::zero());
        let cs = self.coeff.cmp(&Rational::zero());
        if cs == Ordering::Equal {
            return rs;
        }
        if rs == Ordering::Equal || rs == cs {
            return cs;
        }
        let r2 = &self.rat * &self.rat;
        let c2d = &self.coeff * &self.coeff * Rational::from_integer(self.radicand.clone());
        // r^2 == c^2 d is impossible for a nonsquare radicand
        if r2 > c2d {
            rs
        } else {
            cs
        }
    }

    /// A rational enclosure `[lo, hi]` of width at most `|coeff| / 2^bits`.
    pub fn bracket(&self, bits: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.rat.clone(), self.rat.clone());
        }
        let scaled = self.radicand.to_biguint().unwrap() << (2 * bits as usize);
        let s = BigInt::from(Roots::sqrt(&scaled));
        let unit = BigInt::one() << bits as usize;
        let lo = Rational::new(s.clone(), unit.clone());
        let hi = Rational::new(s + 1, unit);
        let (a, b) = (&self.coeff * lo, &self.coeff * hi);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        (&self.rat + a, &self.rat + b)
    }

    /// Exact comparison. Values in a common field are compared through the
    /// sign of their difference; otherwise enclosures are refined from
    /// [`INITIAL_COMPARE_BITS`] bits, doubling until they separate.
    pub fn compare(&self, other: &Quadratic) -> Ordering {
        if let Ok(diff) = self.checked_sub(other) {
            return diff.sign();
        }
        // both irrational in distinct fields, hence never equal
        let mut bits = INITIAL_COMPARE_BITS;
        loop {
            let (xl, xh) = self.bracket(bits);
            let (yl, yh) = other.bracket(bits);
            if xh < yl {
                return Ordering::Less;
            }
            if yh < xl {
                return Ordering::Greater;
            }
            bits *= 2;
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        let (lo, _) = self.bracket(INITIAL_COMPARE_BITS);
        let mut n = lo.floor().to_integer();
        while Quadratic::rational(Rational::from_integer(&n + 1)) <= *self {
            n += 1;
        }
        while Quadratic::rational(Rational::from_integer(n.clone())) > *self {
            n -= 1;
        }
        n
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// Nearest double; for display and search heuristics only.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.bracket(INITIAL_COMPARE_BITS);
        ((lo + hi) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// A rational strictly between `lo` and `hi`, chosen near their midpoint.
    ///
    /// Returns the exact midpoint when both ends are rational, otherwise the
    /// first dyadic rational found near the midpoint.
    pub fn rational_between(lo: &Quadratic, hi: &Quadratic) -> Option<Rational> {
        if lo >= hi {
            return None;
        }
        if let (Some(a), Some(b)) = (lo.as_rational(), hi.as_rational()) {
            return Some((a + b) / Rational::from_integer(2.into()));
        }
        let mut bits = 1u32;
        loop {
            let (ll, _) = lo.bracket(bits + 4);
            let (_, hh) = hi.bracket(bits + 4);
            let mid = (ll + hh) / Rational::from_integer(2.into());
            let unit = BigInt::one() << bits as usize;
            let scaled = (&mid * Rational::from_integer(unit.clone())).round().to_integer();
            let candidate = Quadratic::rational(Rational::new(scaled, unit));
            if lo < &candidate && &candidate < hi {
                return candidate.as_rational().cloned();
            }
            bits += 1;
        }
    }
}

struct Aligned {
    x: (Rational, Rational),
    y: (Rational, Rational),
    radicand: BigInt,
}

impl From<Rational> for Quadratic {
    fn from(r: Rational) -> Self {
        Quadratic::rational(r)
    }
}

impl PartialEq for Quadratic {
    fn eq(&self, other: &Self) -> bool {
        match self.align(other) {
            Ok(Aligned { x, y, .. }) => x == y,
            Err(_) => false,
        }
    }
}

impl Eq for Quadratic {}

impl PartialOrd for Quadratic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quadratic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&format_rational(&self.rat));
        }
        if !self.rat.is_zero() {
            f.write_str(&format_rational(&self.rat))?;
            if self.coeff.is_positive() {
                f.write_str("+")?;
            } else {
                f.write_str("-")?;
                return write!(
                    f,
                    "{}*sqrt({})",
                    format_rational(&-&self.coeff),
                    self.radicand
                );
            }
        }
        write!(f, "{}*sqrt({})", format_rational(&self.coeff), self.radicand)
    }
}

impl Serialize for Quadratic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rational::{int, ratio};

    fn q(r: Rational, c: Rational, d: i64) -> Quadratic {
        Quadratic::new(r, c, BigInt::from(d)).unwrap()
    }

    fn golden() -> Quadratic {
        q(ratio(1, 2), ratio(1, 2), 5)
    }

    #[test]
    fn canonical_form() {
        let x = q(int(1), int(1), 8);
        assert_eq!(x.coeff(), &int(2));
        assert_eq!(x.radicand(), &BigInt::from(2));
        let y = q(int(1), int(3), 9);
        assert!(y.is_rational());
        assert_eq!(y.rat(), &int(10));
        let z = q(int(4), int(0), 7);
        assert!(z.is_rational());
        assert_eq!(z.radicand(), &BigInt::zero());
    }

    #[test]
    fn signs() {
        assert_eq!(q(int(1), int(-1), 2).sign(), Ordering::Less);
        assert_eq!(q(int(3), int(-2), 2).sign(), Ordering::Greater);
        // (1+sqrt5)/2 - 8/5 = -11/10 + sqrt5/2
        assert_eq!(golden().add_rational(&ratio(-8, 5)).sign(), Ordering::Greater);
        assert_eq!(Quadratic::zero().sign(), Ordering::Equal);
    }

    #[test]
    fn comparisons() {
        let r2 = q(int(0), int(1), 2);
        let r3 = q(int(0), int(1), 3);
        assert_eq!(r2.compare(&r3), Ordering::Less);
        let a = q(int(1), int(1), 5);
        assert_eq!(a.compare(&a.clone()), Ordering::Equal);
        // 2*sqrt2 ~ 2.8284 against sqrt5 + 1/3 ~ 2.5694
        let lhs = q(int(0), int(2), 2);
        let rhs = q(ratio(1, 3), int(1), 5);
        assert_eq!(lhs.compare(&rhs), Ordering::Greater);
        // sqrt2 just below 99/70
        let close = Quadratic::rational(ratio(99, 70));
        assert_eq!(r2.compare(&close), Ordering::Less);
        assert_eq!(close.compare(&r2), Ordering::Greater);
    }

    #[test]
    fn arithmetic() {
        let x = q(int(1), int(1), 5);
        let y = q(int(2), int(-3), 5);
        assert_eq!(x.checked_add(&y).unwrap(), q(int(3), int(-2), 5));
        let a = q(int(1), int(1), 2);
        let b = q(int(1), int(-1), 2);
        assert_eq!(a.checked_mul(&b).unwrap(), Quadratic::from_int(-1));
        // (3+sqrt7)(2-sqrt7)/(4-7) = (-1-sqrt7)/(-3) = 1/3 + sqrt7/3
        let n = q(int(3), int(1), 7);
        let d = q(int(2), int(1), 7);
        let quot = n.checked_div(&d).unwrap();
        assert_eq!(quot, q(ratio(1, 3), ratio(1, 3), 7));
        assert_eq!(quot.checked_mul(&d).unwrap(), n);
    }

    #[test]
    fn arithmetic_errors() {
        let r2 = q(int(0), int(1), 2);
        let r3 = q(int(0), int(1), 3);
        assert!(matches!(
            r2.checked_add(&r3),
            Err(NumberError::MixedFields { .. })
        ));
        assert!(matches!(
            r2.checked_div(&Quadratic::zero()),
            Err(NumberError::DivisionByZero)
        ));
    }

    #[test]
    fn square_related_radicands_share_a_field() {
        // sqrt(2) and sqrt(8) = 2 sqrt(2) only meet unreduced if a radicand
        // were left with a square factor; build one by hand.
        let unreduced = Quadratic {
            rat: int(0),
            coeff: int(1),
            radicand: BigInt::from(8),
        };
        let r2 = q(int(0), int(2), 2);
        assert_eq!(unreduced, r2);
        assert_eq!(unreduced.compare(&r2), Ordering::Equal);
        let sum = unreduced.checked_add(&r2).unwrap();
        assert_eq!(sum, q(int(0), int(4), 2));
    }

    #[test]
    fn mobius_and_floor() {
        let phi = golden();
        let image = phi.mobius(&int(2), &int(1), &int(1), &int(1)).unwrap();
        assert_eq!(image, phi);
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!(phi.neg().floor(), BigInt::from(-2));
        assert_eq!(phi.ceil(), BigInt::from(2));
        assert!(Quadratic::from_int(1)
            .mobius(&int(1), &int(0), &int(1), &int(-1))
            .is_none());
    }

    #[test]
    fn rational_between_is_strict() {
        let lo = q(int(0), int(1), 2);
        let hi = q(int(0), int(1), 3);
        let r = Quadratic::rational(Quadratic::rational_between(&lo, &hi).unwrap());
        assert!(lo < r && r < hi);
        assert!(Quadratic::rational_between(&hi, &lo).is_none());
        let tight = Quadratic::rational(ratio(99, 70));
        let r = Quadratic::rational(Quadratic::rational_between(&lo, &tight).unwrap());
        assert!(lo < r && r < tight);
    }

    #[test]
    fn display() {
        assert_eq!(golden().to_string(), "1/2+1/2*sqrt(5)");
        assert_eq!(golden().conj().to_string(), "1/2-1/2*sqrt(5)");
        assert_eq!(q(int(0), ratio(-3, 2), 7).to_string(), "-3/2*sqrt(7)");
        assert_eq!(Quadratic::rational(ratio(-4, 6)).to_string(), "-2/3");
    }
}
