//! Witness constructions.
//!
//! - [`hyperbolic`]: search for hyperbolic `SL2(Z)` elements with fixed
//!   points in prescribed windows.
//! - [`lemma`]: compactly supported extensions of a projective map from a
//!   compact interval, and commutator certificates placing them in the
//!   derived subgroup `H_c'`.
//! - [`commensuration`]: elements `h` of `(Γ_T)''` with `g⁻¹ h g ∉ Γ_T`.
//! - [`unconfinement`]: the conjugating sequence `g_n` and escape exponents.
//!
//! Every construction returns a serializable record that can be re-checked
//! from scratch.

pub mod commensuration;
pub mod hyperbolic;
pub mod lemma;
pub mod unconfinement;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::numbers::{ExtReal, PrimeSet, Quadratic};

pub use commensuration::{commensuration_witness, displayed, CommensurationWitness, OffendingEntry};
pub use hyperbolic::{find_hyperbolic, HyperbolicSearch};
pub use lemma::{
    agrees_with, displace_off, extend_on_interval, lemma_element, sample_points, CheckFailure,
    CommutatorCertificate, LemmaTrace, Searcher, Side, SideCase, SideTrace, Splice,
};
pub use unconfinement::{
    chabauty_escape, chabauty_escape_with, conjugate_top_right, escape_exponent, escape_report,
    unconfinement_element, unconfinement_matrix, EscapeEvidence, EscapeReport,
    UnconfinementReport,
};

/// Limits for the witness searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Largest max-entry bound tried by the hyperbolic enumeration.
    pub max_bound: i64,
    /// Passing candidates kept per bottom-left entry at each bound.
    pub hits_per_row: usize,
    /// Largest power `k` tried before moving to the next hyperbolic element.
    pub max_power: u32,
    /// Largest exponent tried when shrinking a unipotent towards the identity.
    pub max_exponent: u32,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_bound: 1 << 16,
            hits_per_row: 4,
            max_power: 64,
            max_exponent: 1 << 12,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("window {0} is empty")]
    EmptyWindow(String),
    #[error("windows {0} and {1} overlap")]
    OverlappingWindows(String, String),
    #[error("search budget exhausted at bound {bound}")]
    BudgetExhausted { bound: i64 },
    #[error("interval {0} is not compact")]
    NotCompact(String),
    #[error("pole {pole} of {matrix} lies in {interval}")]
    PoleInInterval {
        pole: String,
        matrix: String,
        interval: String,
    },
    #[error("matrix {matrix} is not over Z[1/T] for T = {ring}")]
    NotInRing { matrix: String, ring: String },
    #[error("element is already in the subgroup over {0}")]
    AlreadyInSubgroup(String),
    #[error("element is not over the ambient ring {0}")]
    NotInAmbient(String),
    #[error("ring {sub} is not a proper nonempty subset of {ambient}")]
    BadRings { sub: String, ambient: String },
    #[error("element {0} of the set is trivial")]
    TrivialElement(usize),
    #[error("prime {0} belongs to the ring")]
    PrimeInRing(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be positive")]
    ZeroExponent,
}

/// An interval of the extended line with open or closed ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalSpec {
    pub lo: ExtReal,
    pub hi: ExtReal,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl IntervalSpec {
    pub fn open(lo: impl Into<ExtReal>, hi: impl Into<ExtReal>) -> Self {
        Self {
            lo: lo.into(),
            hi: hi.into(),
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn closed(lo: impl Into<ExtReal>, hi: impl Into<ExtReal>) -> Self {
        Self {
            lo: lo.into(),
            hi: hi.into(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn is_nonempty(&self) -> bool {
        self.lo < self.hi
    }

    pub fn is_compact(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo_closed && self.hi_closed
    }

    pub fn contains(&self, x: &Quadratic) -> bool {
        let x = ExtReal::Finite(x.clone());
        let above = if self.lo_closed { self.lo <= x } else { self.lo < x };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Disjointness as sets (shared closed endpoints count as overlap).
    pub fn is_disjoint(&self, other: &IntervalSpec) -> bool {
        fn left_of(a: &IntervalSpec, b: &IntervalSpec) -> bool {
            match a.hi.cmp(&b.lo) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => !(a.hi_closed && b.lo_closed),
                std::cmp::Ordering::Greater => false,
            }
        }
        left_of(self, other) || left_of(other, self)
    }

    pub fn finite_ends(&self) -> Option<(&Quadratic, &Quadratic)> {
        Some((self.lo.as_finite()?, self.hi.as_finite()?))
    }

    pub fn mirrored(&self) -> IntervalSpec {
        IntervalSpec {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { "[" } else { "(" },
            self.lo,
            self.hi,
            if self.hi_closed { "]" } else { ")" }
        )
    }
}

pub(crate) fn check_prime(p: u64) -> Result<(), ConstructionError> {
    if crate::numbers::is_prime(p) {
        Ok(())
    } else {
        Err(ConstructionError::NotPrime(p))
    }
}

pub(crate) fn ring_name(ring: &PrimeSet) -> String {
    ring.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::int;

    #[test]
    fn interval_membership() {
        let i = IntervalSpec::closed(Quadratic::from_int(0), Quadratic::from_int(1));
        assert!(i.contains(&Quadratic::from_int(0)));
        assert!(i.is_compact());
        let o = IntervalSpec::open(Quadratic::from_int(0), Quadratic::from_int(1));
        assert!(!o.contains(&Quadratic::from_int(0)));
        assert!(!o.is_compact());
        let r = IntervalSpec::open(ExtReal::rational(int(1)), ExtReal::PosInf);
        assert!(o.is_disjoint(&r));
        assert!(!i.is_disjoint(&IntervalSpec::closed(
            Quadratic::from_int(1),
            Quadratic::from_int(2)
        )));
        assert_eq!(i.to_string(), "[0,1]");
        assert_eq!(r.mirrored().to_string(), "(-inf,-1)");
    }
}
