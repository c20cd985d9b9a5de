use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::quadratic::Quadratic;
use super::rational::Rational;

/// A point of the extended real line, used for interval endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtReal {
    NegInf,
    Finite(Quadratic),
    PosInf,
}

impl ExtReal {
    pub fn finite(x: impl Into<Quadratic>) -> Self {
        ExtReal::Finite(x.into())
    }

    pub fn rational(r: Rational) -> Self {
        ExtReal::Finite(Quadratic::rational(r))
    }

    pub fn as_finite(&self) -> Option<&Quadratic> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn neg(&self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::Finite(x) => ExtReal::Finite(x.neg()),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            ExtReal::NegInf => 0,
            ExtReal::Finite(_) => 1,
            ExtReal::PosInf => 2,
        }
    }
}

impl From<Quadratic> for ExtReal {
    fn from(x: Quadratic) -> Self {
        ExtReal::Finite(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => x.compare(y),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("+inf"),
            ExtReal::Finite(x) => x.fmt(f),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rational::int;

    #[test]
    fn order_extends_reals() {
        let x = ExtReal::rational(int(-1000));
        let y = ExtReal::rational(int(1000));
        assert!(ExtReal::NegInf < x);
        assert!(x < y);
        assert!(y < ExtReal::PosInf);
        assert_eq!(ExtReal::NegInf.cmp(&ExtReal::NegInf), Ordering::Equal);
        assert_eq!(x.neg(), y);
        assert_eq!(ExtReal::NegInf.neg(), ExtReal::PosInf);
    }
}
