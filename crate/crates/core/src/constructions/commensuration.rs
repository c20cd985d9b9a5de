//! Elements `h ∈ (Γ_T)''` whose conjugate by a given `g ∉ Γ_T` leaves `Γ_T`.
//!
//! A piece `J` of `g` carries a matrix `[[a, b], [c, d]]` with an entry of
//! negative `p`-adic valuation for some `p ∈ S ∖ T`. With `s = q^-n` for
//! the smallest `q ∈ T`,
//!
//! - `g⁻¹ [[1, 0], [s, 1]] g = [[1 − abs, −b²s], [a²s, 1 + abs]]`,
//! - `g⁻¹ [[1, s], [0, 1]] g = [[1 + cds, d²s], [−c²s, 1 − cds]]`,
//!
//! so the first form is used when `a` or `b` offends and the second when
//! `c` or `d` does. The unipotent is made close enough to the identity to
//! move a compact `I ⊆ gJ` inside `gJ`, and [`lemma_element`] turns it into
//! an element of `(Γ_T)''` with the same germ on `I`.
//!
//! [`lemma_element`]: super::lemma_element

use serde::Serialize;

use super::lemma::{CommutatorCertificate, Searcher};
use super::{check_prime, ring_name, ConstructionError, IntervalSpec};
use crate::moebius::Sl2;
use crate::numbers::{
    padic_valuation, prime_power, serialize_rational, ExtReal, PrimeSet, Quadratic, Rational,
};
use crate::piecewise::PPMap;

const ENTRY_NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// An entry of a matrix with negative valuation at a prime outside `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OffendingEntry {
    pub entry: &'static str,
    #[serde(serialize_with = "serialize_rational")]
    pub value: Rational,
    pub prime: u64,
    pub valuation: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommensurationWitness {
    pub ambient: PrimeSet,
    pub ring: PrimeSet,
    pub piece_index: usize,
    pub piece: IntervalSpec,
    pub g_matrix: Sl2,
    pub offending: OffendingEntry,
    pub q: u64,
    pub n: u32,
    pub h0: Sl2,
    pub image: IntervalSpec,
    pub interval: IntervalSpec,
    pub h: PPMap,
    pub certificate: CommutatorCertificate,
    /// `g_J⁻¹ h0 g_J`, equal to the displayed closed form.
    pub local_conjugate: Sl2,
    /// The entry of the local conjugate inheriting the bad denominator.
    pub local_offending: OffendingEntry,
    /// Result of the full piecewise membership test for `g⁻¹ h g`.
    pub conjugate_in_ring: bool,
}

pub fn commensuration_witness(
    g: &PPMap,
    ambient: &PrimeSet,
    ring: &PrimeSet,
) -> Result<CommensurationWitness, ConstructionError> {
    Searcher::default().commensuration_witness(g, ambient, ring, None)
}

impl Searcher {
    /// As [`commensuration_witness`]; `prime` picks `p ∈ S ∖ T` instead of
    /// the smallest offending one.
    pub fn commensuration_witness(
        &self,
        g: &PPMap,
        ambient: &PrimeSet,
        ring: &PrimeSet,
        prime: Option<u64>,
    ) -> Result<CommensurationWitness, ConstructionError> {
        if ring.is_empty() || !ring.is_subset(ambient) || ring == ambient {
            return Err(ConstructionError::BadRings {
                sub: ring_name(ring),
                ambient: ring_name(ambient),
            });
        }
        if !g.in_subgroup(ambient) {
            return Err(ConstructionError::NotInAmbient(ring_name(ambient)));
        }
        if g.in_subgroup(ring) {
            return Err(ConstructionError::AlreadyInSubgroup(ring_name(ring)));
        }
        if let Some(p) = prime {
            check_prime(p)?;
            if ring.contains(p) {
                return Err(ConstructionError::PrimeInRing(p));
            }
        }
        let outside = ambient.difference(ring);
        let (piece_index, offending) = find_offending(g, ring, &outside, prime)
            .ok_or_else(|| ConstructionError::AlreadyInSubgroup(ring_name(ring)))?;
        let piece = &g.pieces()[piece_index];
        let m = &piece.matrix;
        let image = IntervalSpec::open(g.eval_ext(&piece.lo), g.eval_ext(&piece.hi));
        let interval = inner_interval(&image);
        let q = ring.smallest().expect("ring is nonempty");
        let lower = matches!(offending.entry, "a" | "b");
        let (n, h0) = self.shrink(q, lower, &interval, &image)?;
        let (h, certificate) = self.lemma_element(&h0, &interval, ring)?;
        let local_conjugate = h0.conjugate_by(m);
        debug_assert_eq!(local_conjugate, displayed(m, &prime_power(q, -(n as i64)), lower));
        let local_offending = local_entry(&local_conjugate, offending.prime, lower);
        let conjugate_in_ring = h.conjugate_by(g).in_subgroup(ring);
        Ok(CommensurationWitness {
            ambient: ambient.clone(),
            ring: ring.clone(),
            piece_index,
            piece: IntervalSpec::open(piece.lo.clone(), piece.hi.clone()),
            g_matrix: m.clone(),
            offending,
            q,
            n,
            h0,
            image,
            interval,
            h,
            certificate,
            local_conjugate,
            local_offending,
            conjugate_in_ring,
        })
    }

    /// Least `n` in `1, 2, 4, ...` putting `h0 I` inside `gJ`.
    fn shrink(
        &self,
        q: u64,
        lower: bool,
        interval: &IntervalSpec,
        image: &IntervalSpec,
    ) -> Result<(u32, Sl2), ConstructionError> {
        let (u, v) = interval.finite_ends().expect("compact");
        let mut n = 1u32;
        while n <= self.budget.max_exponent {
            let s = prime_power(q, -(n as i64));
            let h0 = if lower {
                Sl2::lower_unipotent(s)
            } else {
                Sl2::upper_unipotent(s)
            };
            let pole_ok = h0
                .pole()
                .map(Quadratic::rational)
                .is_none_or(|p| &p < u || &p > v);
            if pole_ok {
                let lo = ExtReal::Finite(h0.apply_finite(u).expect("pole avoided"));
                let hi = ExtReal::Finite(h0.apply_finite(v).expect("pole avoided"));
                if image.lo < lo && hi < image.hi {
                    return Ok((n, h0));
                }
            }
            n *= 2;
        }
        Err(ConstructionError::BudgetExhausted {
            bound: self.budget.max_exponent as i64,
        })
    }
}

fn find_offending(
    g: &PPMap,
    ring: &PrimeSet,
    outside: &PrimeSet,
    prime: Option<u64>,
) -> Option<(usize, OffendingEntry)> {
    g.pieces().iter().enumerate().find_map(|(i, piece)| {
        piece
            .matrix
            .entries()
            .into_iter()
            .zip(ENTRY_NAMES)
            .find_map(|(x, name)| {
                let bad = ring.offending_primes(x, outside);
                let p = match prime {
                    Some(p) => bad.into_iter().find(|&b| b == p)?,
                    None => bad.into_iter().next()?,
                };
                Some(OffendingEntry {
                    entry: name,
                    value: x.clone(),
                    prime: p,
                    valuation: padic_valuation(x, p).expect("nonzero entry"),
                })
            })
            .map(|e| (i, e))
    })
}

/// A compact rational interval in the middle third of `image`, or of a
/// bounded part of it when `image` is unbounded.
fn inner_interval(image: &IntervalSpec) -> IntervalSpec {
    let three = Rational::from_integer(3.into());
    let (lo, hi) = match (&image.lo, &image.hi) {
        (ExtReal::Finite(l), ExtReal::Finite(h)) => (l.clone(), h.clone()),
        (ExtReal::Finite(l), _) => (l.clone(), l.add_rational(&three)),
        (_, ExtReal::Finite(h)) => (h.add_rational(&-&three), h.clone()),
        _ => (Quadratic::zero(), Quadratic::rational(three.clone())),
    };
    let mid = Quadratic::rational(Quadratic::rational_between(&lo, &hi).expect("nonempty"));
    let l = Quadratic::rational_between(&lo, &mid).expect("nonempty");
    let h = Quadratic::rational_between(&mid, &hi).expect("nonempty");
    let third = (&h - &l) / &three;
    IntervalSpec::closed(
        Quadratic::rational(&l + &third),
        Quadratic::rational(&h - &third),
    )
}

/// The closed forms of the conjugated unipotents.
pub fn displayed(g: &Sl2, s: &Rational, lower: bool) -> Sl2 {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let one = Rational::from_integer(1.into());
    let m = if lower {
        let abs = a * b * s;
        Sl2::new(&one - &abs, -(b * b * s), a * a * s, &one + &abs)
    } else {
        let cds = c * d * s;
        Sl2::new(&one + &cds, d * d * s, -(c * c * s), &one - &cds)
    };
    m.expect("conjugates have determinant one")
}

/// The off-diagonal entry of the local conjugate carrying the square of
/// the offending entry.
fn local_entry(m: &Sl2, p: u64, lower: bool) -> OffendingEntry {
    let [a, b, c, d] = m.entries();
    let candidates = if lower {
        [("c", c), ("b", b)]
    } else {
        [("b", b), ("c", c)]
    };
    let diag = [("a", a), ("d", d)];
    let (entry, value) = candidates
        .into_iter()
        .chain(diag)
        .map(|(n, x)| (n, x, padic_valuation(x, p).unwrap_or(i64::MAX)))
        .min_by_key(|&(_, _, v)| v)
        .map(|(n, x, _)| (n, x.clone()))
        .expect("four entries");
    OffendingEntry {
        entry,
        valuation: padic_valuation(&value, p).unwrap_or(i64::MAX),
        value,
        prime: p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::ratio;
    use crate::piecewise::Piece;

    fn set(p: &[u64]) -> PrimeSet {
        PrimeSet::new(p.iter().copied()).unwrap()
    }

    #[test]
    fn translation_by_a_fifth() {
        let g = PPMap::global(Sl2::translation(ratio(1, 5))).unwrap();
        let w = commensuration_witness(&g, &set(&[2, 5]), &set(&[2])).unwrap();
        assert_eq!(w.offending.entry, "b");
        assert_eq!(w.offending.prime, 5);
        assert_eq!(w.q, 2);
        assert!(!w.conjugate_in_ring);
        assert!(w.h.in_subgroup(&set(&[2])));
        w.certificate.validate().unwrap();
        let s = prime_power(2, -(w.n as i64));
        assert_eq!(w.local_conjugate.b(), &-(ratio(1, 25) * &s));
        assert_eq!(w.local_offending.valuation, -2);
    }

    #[test]
    fn already_in_subgroup_rejected() {
        let g = PPMap::global(Sl2::translation(ratio(1, 2))).unwrap();
        assert!(matches!(
            commensuration_witness(&g, &set(&[2, 5]), &set(&[2])),
            Err(ConstructionError::AlreadyInSubgroup(_))
        ));
        assert!(matches!(
            commensuration_witness(&g, &set(&[2]), &set(&[2])),
            Err(ConstructionError::BadRings { .. })
        ));
    }

    #[test]
    fn offending_bottom_left_uses_upper_unipotent() {
        let m = Sl2::lower_unipotent(ratio(1, 5));
        let g = PPMap::new(vec![
            Piece::new(ExtReal::NegInf, Quadratic::from_int(0), Sl2::identity()),
            Piece::new(Quadratic::from_int(0), Quadratic::from_int(5), m),
            Piece::new(
                Quadratic::from_int(5),
                ExtReal::PosInf,
                Sl2::translation(ratio(-5, 2)),
            ),
        ])
        .unwrap();
        let w = commensuration_witness(&g, &set(&[2, 5]), &set(&[2])).unwrap();
        assert_eq!(w.piece_index, 1);
        assert_eq!(w.offending.entry, "c");
        assert!(w.h0.is_affine());
        assert!(!w.conjugate_in_ring);
        w.certificate.validate().unwrap();
        let s = prime_power(2, -(w.n as i64));
        assert_eq!(w.local_conjugate.c(), &-(ratio(1, 25) * s));
    }

    #[test]
    fn display_matches_multiplication() {
        let g = Sl2::new(ratio(3, 5), ratio(2, 7), ratio(-7, 4), ratio(5, 6)).unwrap();
        let s = ratio(1, 8);
        assert_eq!(Sl2::lower_unipotent(s.clone()).conjugate_by(&g), displayed(&g, &s, true));
        assert_eq!(Sl2::upper_unipotent(s.clone()).conjugate_by(&g), displayed(&g, &s, false));
    }
}
