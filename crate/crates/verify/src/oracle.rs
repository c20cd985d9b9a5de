//! Independent reference computations.
//!
//! The decimal oracle encloses `rat + coeff * sqrt(d)` between two integers
//! scaled by `10^-DIGITS`, using only integer square roots. The matrix
//! oracle multiplies raw 2×2 arrays with no normalization.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use ppgroup::{Quadratic, Rational, Sl2};

/// Decimal digits carried by [`DecimalInterval`].
pub const DIGITS: u32 = 120;

/// `[lo, hi] * 10^-DIGITS`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalInterval {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

impl DecimalInterval {
    pub fn of(x: &Quadratic) -> Self {
        Self::from_parts(x.rat(), x.coeff(), x.radicand())
    }

    pub fn from_parts(rat: &Rational, coeff: &Rational, radicand: &BigInt) -> Self {
        let s = scale();
        let r_lo = floor_div(&(rat.numer() * &s), rat.denom());
        let r_hi = r_lo.clone() + 1;
        if coeff.is_zero() || radicand.is_zero() {
            return Self { lo: r_lo, hi: r_hi };
        }
        // sqrt(d) * 10^D lies in [root, root + 1]
        let wide: BigUint = radicand.to_biguint().expect("nonnegative") * s.to_biguint().unwrap().pow(2);
        let root = BigInt::from(wide.sqrt());
        let ends = [&root * coeff.numer(), (&root + 1) * coeff.numer()];
        let (a, b) = if ends[0] <= ends[1] {
            (ends[0].clone(), ends[1].clone())
        } else {
            (ends[1].clone(), ends[0].clone())
        };
        let den = coeff.denom();
        Self {
            lo: r_lo + floor_div(&a, den),
            hi: r_hi + floor_div(&b, den) + 1,
        }
    }

    /// Decided order, or `None` when the enclosures overlap.
    pub fn order(&self, other: &DecimalInterval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }
}

/// Oracle comparison: ordering from the enclosures, `Equal` when they
/// overlap. Exact equality is then confirmed through the raw parts.
pub fn compare(x: &Quadratic, y: &Quadratic) -> Option<Ordering> {
    let (ix, iy) = (DecimalInterval::of(x), DecimalInterval::of(y));
    match ix.order(&iy) {
        Some(o) => Some(o),
        None => parts_equal(x, y).then_some(Ordering::Equal),
    }
}

/// Oracle sign.
pub fn sign(x: &Quadratic) -> Option<Ordering> {
    compare(x, &Quadratic::zero())
}

/// Equality of `r1 + c1 √d1` and `r2 + c2 √d2` from their parts: the
/// irrational parts must match after squaring.
fn parts_equal(x: &Quadratic, y: &Quadratic) -> bool {
    if x.rat() != y.rat() {
        return false;
    }
    let sx = x.coeff() * x.coeff() * Rational::from_integer(x.radicand().clone());
    let sy = y.coeff() * y.coeff() * Rational::from_integer(y.radicand().clone());
    sx == sy && x.coeff().signum() == y.coeff().signum()
}

/// `v_p(x)` by repeated division of numerator and denominator.
pub fn valuation(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return k;
            }
            n = q;
            k += 1;
        }
    };
    Some(count(x.numer()) - count(x.denom()))
}

pub type Mat = [[Rational; 2]; 2];

pub fn mat(m: &Sl2) -> Mat {
    [
        [m.a().clone(), m.b().clone()],
        [m.c().clone(), m.d().clone()],
    ]
}

pub fn mul(x: &Mat, y: &Mat) -> Mat {
    let mut out: Mat = Default::default();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
        }
    }
    out
}

/// Inverse of a determinant-one matrix.
pub fn inv(x: &Mat) -> Mat {
    [
        [x[1][1].clone(), -&x[0][1]],
        [-&x[1][0], x[0][0].clone()],
    ]
}

/// Equal as projective maps, i.e. up to an overall sign.
pub fn projectively_equal(x: &Mat, y: &Mat) -> bool {
    let neg = |m: &Mat| [[-&m[0][0], -&m[0][1]], [-&m[1][0], -&m[1][1]]];
    x == y || *x == neg(y)
}

pub fn is_identity(x: &Mat) -> bool {
    let one = Rational::one();
    let zero = Rational::zero();
    let id = [[one.clone(), zero.clone()], [zero, one]];
    projectively_equal(x, &id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ppgroup::numbers::{int, ratio};

    #[test]
    fn enclosure_is_tight() {
        let s2 = Quadratic::sqrt(&int(2)).unwrap();
        let i = DecimalInterval::of(&s2);
        assert!(i.width() <= BigInt::from(3));
        let approx = Quadratic::rational(ratio(99, 70));
        assert_eq!(compare(&s2, &approx), Some(Ordering::Less));
        assert_eq!(compare(&s2, &s2.clone()), Some(Ordering::Equal));
        assert_eq!(sign(&s2.neg()), Some(Ordering::Less));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&ratio(12, 5), 2), Some(2));
        assert_eq!(valuation(&ratio(12, 5), 5), Some(-1));
        assert_eq!(valuation(&int(0), 3), None);
    }

    #[test]
    fn products() {
        let x = mat(&Sl2::from_ints(2, 1, 1, 1));
        assert!(is_identity(&mul(&x, &inv(&x))));
    }
}
