//! Compactly supported extensions and commutator certificates.
//!
//! Given `h0` over `Z[1/T]` and a compact `I = [u, v]` avoiding its pole,
//! [`extend_on_interval`] builds `h1` with compact support that equals `h0`
//! on `I`. Each end is treated on its own. At `v`:
//!
//! - `h0 v = v`: continue with the identity.
//! - `h0 v > v`: take rational `x ∈ (v, h0 v)`, a hyperbolic `q ∈ SL2(Z)`
//!   with repelling point `ξ₋ ∈ (v, x)` and attracting point
//!   `ξ₊ ∈ (h0 x, ∞)`, the least `k` with `q^k x > h0 x`, and the crossing
//!   `t ∈ (ξ₋, x)` where `q^k t = h0 t`. Then use `h0` up to `t`, `q^k` on
//!   `[t, ξ₊]` and the identity after.
//! - `h0 v < v`: take `x` with `h0 x < v`, `q` with `ξ₋ ∈ (v, x)` and
//!   `ξ₊ < h0 v`, the least `k` with `q^k v < h0 v`, the crossing
//!   `t ∈ (v, ξ₋)`, and use `q^k` on `[t, ξ₋]`.
//!
//! The end at `u` is the same construction applied to `x ↦ -h0(-x)`.
//!
//! [`lemma_element`] then displaces a large integer interval `J` by some
//! `b1` and returns `h = [h1, b1]`, which still equals `h0` on `I`.

use std::cmp::Ordering;

use num_traits::One;
use serde::Serialize;

use super::hyperbolic::HyperbolicSearch;
use super::{ring_name, ConstructionError, IntervalSpec, SearchBudget};
use crate::moebius::{ProjPoint, Sl2};
use crate::numbers::{serialize_rational, ExtReal, PrimeSet, Quadratic, Rational};
use crate::par::Exec;
use crate::piecewise::{PPMap, Piece, Support};

/// Budget and execution strategy shared by the constructions.
#[derive(Clone, Copy, Debug, Default)]
pub struct Searcher {
    pub budget: SearchBudget,
    pub exec: Exec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideCase {
    /// `h0` fixes the endpoint.
    Fixed,
    /// `h0` pushes the endpoint outwards.
    Expanding,
    /// `h0` pulls the endpoint inwards.
    Contracting,
}

/// Data chosen at one end of the interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Splice {
    #[serde(serialize_with = "serialize_rational")]
    pub x: Rational,
    pub q: Sl2,
    pub k: u32,
    pub qk: Sl2,
    pub t: Quadratic,
    pub xi_rep: Quadratic,
    pub xi_att: Quadratic,
    /// Candidates from the hyperbolic search rejected before `q`.
    pub skipped: usize,
}

/// One end of a [`LemmaTrace`], in original coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideTrace {
    pub side: Side,
    pub case: SideCase,
    pub endpoint: Quadratic,
    pub splice: Option<Splice>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaTrace {
    pub h0: Sl2,
    pub interval: IntervalSpec,
    pub ring: PrimeSet,
    pub left: SideTrace,
    pub right: SideTrace,
    pub h1: PPMap,
}

/// Certifies `h = [h1, b1]` with `h1`, `b1` compactly supported over `Z[1/T]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorCertificate {
    pub h1: PPMap,
    pub b1: PPMap,
    pub h: PPMap,
    pub ring: PrimeSet,
    /// The interval displaced by `b1`; contains `I` and the support of `h1`.
    pub displaced: Option<IntervalSpec>,
    pub h1_trace: Option<LemmaTrace>,
    pub b1_trace: Option<LemmaTrace>,
}

/// A failed check while revalidating a trace or certificate.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct CheckFailure(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, CheckFailure> {
    Err(CheckFailure(msg.into()))
}

pub fn extend_on_interval(
    h0: &Sl2,
    interval: &IntervalSpec,
    ring: &PrimeSet,
) -> Result<(PPMap, LemmaTrace), ConstructionError> {
    Searcher::default().extend_on_interval(h0, interval, ring)
}

pub fn displace_off(
    j: &IntervalSpec,
    ring: &PrimeSet,
) -> Result<(PPMap, LemmaTrace), ConstructionError> {
    Searcher::default().displace_off(j, ring)
}

pub fn lemma_element(
    h0: &Sl2,
    interval: &IntervalSpec,
    ring: &PrimeSet,
) -> Result<(PPMap, CommutatorCertificate), ConstructionError> {
    Searcher::default().lemma_element(h0, interval, ring)
}

impl Searcher {
    pub fn new(budget: SearchBudget, exec: Exec) -> Self {
        Self { budget, exec }
    }

    pub fn extend_on_interval(
        &self,
        h0: &Sl2,
        interval: &IntervalSpec,
        ring: &PrimeSet,
    ) -> Result<(PPMap, LemmaTrace), ConstructionError> {
        let (u, v) = compact_ends(interval)?;
        if !h0.entries_in_ring(ring) {
            return Err(ConstructionError::NotInRing {
                matrix: h0.to_string(),
                ring: ring_name(ring),
            });
        }
        if let Some(pole) = h0.pole() {
            let pole = Quadratic::rational(pole);
            if u <= &pole && &pole <= v {
                return Err(ConstructionError::PoleInInterval {
                    pole: pole.to_string(),
                    matrix: h0.to_string(),
                    interval: interval.to_string(),
                });
            }
        }
        let right = self.right_end(h0, v)?;
        let left = self.right_end(&h0.mirrored(), &u.neg())?.mirrored();
        let trace_left = SideTrace {
            side: Side::Left,
            ..left
        };
        let h1 = assemble(h0, &trace_left, &right);
        let trace = LemmaTrace {
            h0: h0.clone(),
            interval: interval.clone(),
            ring: ring.clone(),
            left: trace_left,
            right,
            h1: h1.clone(),
        };
        debug_assert_eq!(trace.validate(), Ok(()));
        Ok((h1, trace))
    }

    pub fn displace_off(
        &self,
        j: &IntervalSpec,
        ring: &PrimeSet,
    ) -> Result<(PPMap, LemmaTrace), ConstructionError> {
        let (lo, hi) = compact_ends(j)?;
        let len = hi.checked_sub(lo).expect("endpoints share a field");
        let m = Rational::from_integer(len.ceil() + 1);
        let b0 = Sl2::translation(m);
        let (b1, trace) = self.extend_on_interval(&b0, j, ring)?;
        debug_assert!(b1.eval(lo) > *hi);
        Ok((b1, trace))
    }

    pub fn lemma_element(
        &self,
        h0: &Sl2,
        interval: &IntervalSpec,
        ring: &PrimeSet,
    ) -> Result<(PPMap, CommutatorCertificate), ConstructionError> {
        let (h1, h1_trace) = self.extend_on_interval(h0, interval, ring)?;
        if h1.is_identity() {
            return Ok((PPMap::identity(), CommutatorCertificate::trivial(ring)));
        }
        let (u, v) = compact_ends(interval)?;
        let (s_lo, s_hi) = match h1.support() {
            Support::Interval {
                lo: ExtReal::Finite(a),
                hi: ExtReal::Finite(b),
            } => (a, b),
            other => unreachable!("support {other} of an extension is compact"),
        };
        let lo = s_lo.min(u.clone()).floor() - 1;
        let hi = s_hi.max(v.clone()).ceil() + 1;
        let j = IntervalSpec::closed(
            Quadratic::rational(Rational::from_integer(lo)),
            Quadratic::rational(Rational::from_integer(hi)),
        );
        let (b1, b1_trace) = self.displace_off(&j, ring)?;
        let h = PPMap::commutator(&h1, &b1);
        let cert = CommutatorCertificate {
            h1,
            b1,
            h: h.clone(),
            ring: ring.clone(),
            displaced: Some(j),
            h1_trace: Some(h1_trace),
            b1_trace: Some(b1_trace),
        };
        Ok((h, cert))
    }

    /// The construction at the right end `v`.
    fn right_end(&self, h0: &Sl2, v: &Quadratic) -> Result<SideTrace, ConstructionError> {
        let hv = h0.apply_finite(v).expect("pole avoided");
        let case = match hv.cmp(v) {
            Ordering::Equal => SideCase::Fixed,
            Ordering::Greater => SideCase::Expanding,
            Ordering::Less => SideCase::Contracting,
        };
        let splice = match case {
            SideCase::Fixed => None,
            _ => Some(self.splice(h0, v, &hv, case)?),
        };
        Ok(SideTrace {
            side: Side::Right,
            case,
            endpoint: v.clone(),
            splice,
        })
    }

    /// Searches all candidate `x` together, one bound level at a time.
    fn splice(
        &self,
        h0: &Sl2,
        v: &Quadratic,
        hv: &Quadratic,
        case: SideCase,
    ) -> Result<Splice, ConstructionError> {
        let mut searches = Vec::new();
        for x in x_candidates(h0, v, hv, case) {
            let xq = Quadratic::rational(x.clone());
            let hx = h0.apply_finite(&xq).expect("x avoids the pole");
            let rep = IntervalSpec::open(v.clone(), xq.clone());
            let att = match case {
                SideCase::Expanding => IntervalSpec::open(hx.clone(), ExtReal::PosInf),
                _ => IntervalSpec::open(ExtReal::NegInf, hv.clone()),
            };
            let search = HyperbolicSearch::new(&rep, &att, self.budget)?.with_exec(self.exec);
            searches.push((x, xq, hx, search));
        }
        let h0_inv = h0.inverse();
        let mut streams: Vec<_> = searches.iter().map(|s| s.3.candidates()).collect();
        let mut skipped = 0;
        let mut level = 1;
        while level <= self.budget.max_bound {
            for ((x, xq, hx, _), stream) in searches.iter().zip(&mut streams) {
                while let Some(q) = stream.next_within(level) {
                    let fp = q.fixed_points();
                    let xi_rep = finite(fp.repelling_point());
                    let xi_att = finite(fp.attracting_point());
                    let power = least_power(&q, self.budget.max_power, |m| match case {
                        SideCase::Expanding => m.apply_finite(xq).expect("inside") > *hx,
                        _ => m.apply_finite(v).expect("inside") < *hv,
                    });
                    let Some((k, qk)) = power else {
                        skipped += 1;
                        continue;
                    };
                    let (lo, hi) = match case {
                        SideCase::Expanding => (&xi_rep, xq),
                        _ => (v, &xi_rep),
                    };
                    let Some(t) = crossing(&(&h0_inv * &qk), lo, hi) else {
                        skipped += 1;
                        continue;
                    };
                    return Ok(Splice {
                        x: x.clone(),
                        q,
                        k,
                        qk,
                        t,
                        xi_rep,
                        xi_att,
                        skipped,
                    });
                }
            }
            level *= 2;
        }
        Err(ConstructionError::BudgetExhausted {
            bound: self.budget.max_bound,
        })
    }
}

fn compact_ends(i: &IntervalSpec) -> Result<(&Quadratic, &Quadratic), ConstructionError> {
    match i.finite_ends() {
        Some((u, v)) if i.is_compact() && u < v => Ok((u, v)),
        _ => Err(ConstructionError::NotCompact(i.to_string())),
    }
}

fn finite(p: Option<&ProjPoint>) -> Quadratic {
    p.and_then(ProjPoint::as_finite)
        .cloned()
        .expect("integer hyperbolic matrices have finite fixed points")
}

/// Least `k ≤ max` with `ok(q^k)`.
fn least_power(q: &Sl2, max: u32, ok: impl Fn(&Sl2) -> bool) -> Option<(u32, Sl2)> {
    let mut m = q.clone();
    for k in 1..=max {
        if ok(&m) {
            return Some((k, m));
        }
        m = &m * q;
    }
    None
}

/// Smallest fixed point of `m` strictly inside `(lo, hi)`.
fn crossing(m: &Sl2, lo: &Quadratic, hi: &Quadratic) -> Option<Quadratic> {
    m.fixed_points()
        .points
        .into_iter()
        .filter_map(|p| p.as_finite().cloned())
        .find(|t| lo < t && t < hi)
}

/// Halvings of the admissible range tried for `x`.
const X_CANDIDATES: usize = 40;

/// Rationals `x > v` obtained by halving the admissible range from its
/// middle, keeping those where the exact conditions of the case hold.
fn x_candidates(h0: &Sl2, v: &Quadratic, hv: &Quadratic, case: SideCase) -> Vec<Rational> {
    let pole = h0.pole().map(Quadratic::rational).filter(|p| p > v);
    let upper = match case {
        SideCase::Expanding => match &pole {
            Some(p) if p < hv => p.clone(),
            _ => hv.clone(),
        },
        _ => match h0.inverse().apply_finite(v) {
            Some(y) if &y > v && pole.as_ref().is_none_or(|p| &y < p) => y,
            _ => pole.clone().unwrap_or_else(|| v.add_rational(&Rational::one())),
        },
    };
    let ok = |x: &Quadratic| {
        if pole.as_ref().is_some_and(|p| p <= x) {
            return false;
        }
        let hx = h0.apply_finite(x).expect("pole checked");
        match case {
            SideCase::Expanding => x < hv,
            _ => &hx < v,
        }
    };
    let mut out: Vec<Rational> = Vec::new();
    let mut width = upper.checked_sub(v).expect("one field");
    let mut steps = 0;
    while steps < X_CANDIDATES || out.is_empty() {
        steps += 1;
        width = width.scale(&Rational::new(1.into(), 2.into()));
        let mid = v.checked_add(&width).expect("one field");
        let x = match mid.as_rational() {
            Some(r) => r.clone(),
            None => Quadratic::rational_between(v, &mid).expect("nonempty"),
        };
        let xq = Quadratic::rational(x.clone());
        if &xq > v && ok(&xq) && out.last() != Some(&x) {
            out.push(x);
        }
    }
    out
}

/// Builds `h1` from the two ends.
fn assemble(h0: &Sl2, left: &SideTrace, right: &SideTrace) -> PPMap {
    let (s_hi, right_tail) = right.tail();
    let (s_lo, left_tail) = left.tail();
    let mut pieces = left_tail;
    pieces.push(Piece::new(s_lo, s_hi, h0.clone()));
    pieces.extend(right_tail);
    PPMap::new(pieces).expect("the splices are continuous")
}

impl SideTrace {
    /// The same record for `x ↦ -x`, swapping the roles of the ends.
    pub fn mirrored(&self) -> SideTrace {
        SideTrace {
            side: match self.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            case: self.case,
            endpoint: self.endpoint.neg(),
            splice: self.splice.as_ref().map(|s| Splice {
                x: -&s.x,
                q: s.q.mirrored(),
                k: s.k,
                qk: s.qk.mirrored(),
                t: s.t.neg(),
                xi_rep: s.xi_rep.neg(),
                xi_att: s.xi_att.neg(),
                skipped: s.skipped,
            }),
        }
    }

    /// The splice point and the pieces beyond it, outwards from the interval.
    fn tail(&self) -> (Quadratic, Vec<Piece>) {
        if self.side == Side::Left {
            let (s, pieces) = self.mirrored().tail();
            let pieces = pieces
                .into_iter()
                .rev()
                .map(|p| Piece::new(p.hi.neg(), p.lo.neg(), p.matrix.mirrored()))
                .collect();
            return (s.neg(), pieces);
        }
        let id = Sl2::identity();
        match &self.splice {
            None => (
                self.endpoint.clone(),
                vec![Piece::new(self.endpoint.clone(), ExtReal::PosInf, id)],
            ),
            Some(s) => {
                let stop = match self.case {
                    SideCase::Expanding => &s.xi_att,
                    _ => &s.xi_rep,
                };
                (
                    s.t.clone(),
                    vec![
                        Piece::new(s.t.clone(), stop.clone(), s.qk.clone()),
                        Piece::new(stop.clone(), ExtReal::PosInf, id),
                    ],
                )
            }
        }
    }

    /// Checks the recorded choices against `h0` (given in original
    /// coordinates).
    pub fn validate(&self, h0: &Sl2) -> Result<(), CheckFailure> {
        if self.side == Side::Left {
            return self.mirrored().validate(&h0.mirrored());
        }
        let v = &self.endpoint;
        let Some(hv) = h0.apply_finite(v) else {
            return fail("endpoint is the pole of h0");
        };
        let expected = match hv.cmp(v) {
            Ordering::Equal => SideCase::Fixed,
            Ordering::Greater => SideCase::Expanding,
            Ordering::Less => SideCase::Contracting,
        };
        if expected != self.case {
            return fail(format!("case {:?} recorded, {:?} found", self.case, expected));
        }
        let Some(s) = &self.splice else {
            return if self.case == SideCase::Fixed {
                Ok(())
            } else {
                fail("missing splice data")
            };
        };
        let x = Quadratic::rational(s.x.clone());
        let Some(hx) = h0.apply_finite(&x) else {
            return fail("x is the pole of h0");
        };
        if let Some(p) = h0.pole().map(Quadratic::rational) {
            if v < &p && p <= x {
                return fail("pole of h0 between the endpoint and x");
            }
        }
        if !s.q.entries().iter().all(|e| e.is_integer()) || !s.q.is_hyperbolic() {
            return fail(format!("{} is not a hyperbolic integer matrix", s.q));
        }
        if s.q.pow(s.k) != s.qk || s.k == 0 {
            return fail("qk is not the recorded power of q");
        }
        let fp = s.q.fixed_points();
        if finite(fp.repelling_point()) != s.xi_rep || finite(fp.attracting_point()) != s.xi_att {
            return fail("recorded fixed points differ from those of q");
        }
        if !(v < &s.xi_rep && s.xi_rep < x) {
            return fail("repelling point outside (v, x)");
        }
        if s.qk.apply_finite(&s.t) != h0.apply_finite(&s.t) {
            return fail("q^k t != h0 t");
        }
        match self.case {
            SideCase::Expanding => {
                if !(x < hv) {
                    return fail("x not below h0 v");
                }
                if !(s.xi_att > hx) {
                    return fail("attracting point not above h0 x");
                }
                if !(s.qk.apply_finite(&x).expect("inside") > hx) {
                    return fail("q^k x <= h0 x");
                }
                if !(s.xi_rep < s.t && s.t < x) {
                    return fail("t outside (xi_rep, x)");
                }
            }
            _ => {
                if !(&hx < v) {
                    return fail("h0 x not below v");
                }
                if !(s.xi_att < hv) {
                    return fail("attracting point not below h0 v");
                }
                if !(s.qk.apply_finite(v).expect("inside") < hv) {
                    return fail("q^k v >= h0 v");
                }
                if !(v < &s.t && s.t < s.xi_rep) {
                    return fail("t outside (v, xi_rep)");
                }
            }
        }
        Ok(())
    }
}

impl LemmaTrace {
    /// Replays the trace: side checks, reassembly, support and ring.
    pub fn validate(&self) -> Result<(), CheckFailure> {
        let Some((u, v)) = self.interval.finite_ends() else {
            return fail("interval is not compact");
        };
        if self.left.side != Side::Left || self.right.side != Side::Right {
            return fail("sides mislabeled");
        }
        if &self.left.endpoint != u || &self.right.endpoint != v {
            return fail("trace endpoints differ from the interval");
        }
        if !self.h0.entries_in_ring(&self.ring) {
            return fail("h0 is not over the ring");
        }
        self.left.validate(&self.h0)?;
        self.right.validate(&self.h0)?;
        let rebuilt = assemble(&self.h0, &self.left, &self.right);
        if rebuilt != self.h1 {
            return fail("replayed pieces differ from h1");
        }
        if !self.h1.support().is_compact() {
            return fail("h1 does not have compact support");
        }
        if !self.h1.in_subgroup(&self.ring) {
            return fail("h1 is not over the ring");
        }
        for x in [u, v] {
            if self.h1.eval(x) != self.h0.apply_finite(x).expect("pole avoided") {
                return fail("h1 differs from h0 at an endpoint");
            }
        }
        Ok(())
    }
}

impl CommutatorCertificate {
    pub fn trivial(ring: &PrimeSet) -> Self {
        Self {
            h1: PPMap::identity(),
            b1: PPMap::identity(),
            h: PPMap::identity(),
            ring: ring.clone(),
            displaced: None,
            h1_trace: None,
            b1_trace: None,
        }
    }

    /// Recomputes `[h1, b1]` and checks supports and rings from scratch.
    pub fn validate(&self) -> Result<(), CheckFailure> {
        if PPMap::commutator(&self.h1, &self.b1) != self.h {
            return fail("h != [h1, b1]");
        }
        for (name, f) in [("h1", &self.h1), ("b1", &self.b1)] {
            if !f.support().is_compact() {
                return fail(format!("{name} does not have compact support"));
            }
            if !f.in_subgroup(&self.ring) {
                return fail(format!("{name} is not over Z[1/T] for T = {}", self.ring));
            }
        }
        if let Some(j) = &self.displaced {
            let Some((lo, hi)) = j.finite_ends() else {
                return fail("displaced interval is unbounded");
            };
            if !self.h1.support().within(&j.lo, &j.hi) {
                return fail("support of h1 leaves the displaced interval");
            }
            if !(self.b1.eval(lo) > *hi) {
                return fail("b1 J meets J");
            }
        }
        for t in self.h1_trace.iter().chain(&self.b1_trace) {
            t.validate()?;
            if t.ring != self.ring {
                return fail("trace ring differs");
            }
        }
        if let Some(t) = &self.h1_trace {
            if t.h1 != self.h1 {
                return fail("h1 differs from its trace");
            }
        }
        if let Some(t) = &self.b1_trace {
            if t.h1 != self.b1 {
                return fail("b1 differs from its trace");
            }
        }
        Ok(())
    }
}

/// Exact agreement of `f` with `m` at each sample.
pub fn agrees_with(f: &PPMap, m: &Sl2, samples: &[Quadratic]) -> bool {
    samples
        .iter()
        .all(|x| m.apply_finite(x).is_some_and(|y| f.eval(x) == y))
}

/// `n` evenly spaced exact points of `[u, v]`, both ends included.
pub fn sample_points(interval: &IntervalSpec, n: usize) -> Vec<Quadratic> {
    let Some((u, v)) = interval.finite_ends() else {
        return Vec::new();
    };
    let width = v.checked_sub(u).expect("one field");
    let steps = n.saturating_sub(1).max(1) as i64;
    (0..n as i64)
        .map(|i| {
            let f = Rational::new(i.into(), steps.into());
            u.checked_add(&width.scale(&f)).expect("one field")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, ratio};

    fn closed(a: Rational, b: Rational) -> IntervalSpec {
        IntervalSpec::closed(Quadratic::rational(a), Quadratic::rational(b))
    }

    fn t(primes: &[u64]) -> PrimeSet {
        PrimeSet::new(primes.iter().copied()).unwrap()
    }

    #[test]
    fn identity_extends_to_identity() {
        let (h1, trace) =
            extend_on_interval(&Sl2::identity(), &closed(int(0), int(1)), &t(&[])).unwrap();
        assert!(h1.is_identity());
        assert_eq!(trace.left.case, SideCase::Fixed);
        assert_eq!(trace.right.case, SideCase::Fixed);
        assert!(trace.validate().is_ok());
    }

    #[test]
    fn translation_extends() {
        let i = closed(int(0), int(1));
        let (h1, trace) = extend_on_interval(&Sl2::from_ints(1, 1, 0, 1), &i, &t(&[])).unwrap();
        for x in [int(0), ratio(1, 3), int(1)] {
            let x = Quadratic::rational(x);
            assert_eq!(h1.eval(&x), x.add_rational(&int(1)));
        }
        assert!(h1.support().is_compact());
        assert_eq!(trace.right.case, SideCase::Expanding);
        assert_eq!(trace.left.case, SideCase::Contracting);
        trace.validate().unwrap();
    }

    #[test]
    fn lower_unipotent_near_zero() {
        let ring = t(&[2]);
        let h0 = Sl2::lower_unipotent(ratio(1, 2));
        let i = closed(int(0), ratio(1, 2));
        let (h1, trace) = extend_on_interval(&h0, &i, &ring).unwrap();
        trace.validate().unwrap();
        assert!(h1.in_subgroup(&ring));
        assert!(agrees_with(&h1, &h0, &sample_points(&i, 20)));
        assert_eq!(trace.right.case, SideCase::Contracting);
        assert_eq!(trace.left.case, SideCase::Fixed);
    }

    #[test]
    fn pole_inside_rejected() {
        let h0 = Sl2::lower_unipotent(ratio(1, 2));
        let err = extend_on_interval(&h0, &closed(int(-3), int(0)), &t(&[2])).unwrap_err();
        assert!(matches!(err, ConstructionError::PoleInInterval { .. }));
        let err = extend_on_interval(&h0, &closed(int(0), int(1)), &t(&[3])).unwrap_err();
        assert!(matches!(err, ConstructionError::NotInRing { .. }));
    }

    #[test]
    fn displacement() {
        let j = closed(int(0), int(1));
        let (b1, trace) = displace_off(&j, &t(&[])).unwrap();
        trace.validate().unwrap();
        let m = b1.eval(&Quadratic::from_int(0));
        assert!(m >= Quadratic::from_int(2));
        for x in sample_points(&j, 7) {
            assert_eq!(b1.eval(&x), x.checked_add(&m).unwrap());
        }
        assert!(b1.in_subgroup(&t(&[])));
        let point = closed(int(1), int(1));
        assert!(matches!(
            displace_off(&point, &t(&[])),
            Err(ConstructionError::NotCompact(_))
        ));
        let (b1, _) = displace_off(&closed(int(-1), int(1)), &t(&[])).unwrap();
        assert!(b1.in_subgroup(&PrimeSet::empty()));
    }

    #[test]
    fn lemma_pipeline() {
        let i = closed(int(0), int(1));
        let h0 = Sl2::from_ints(1, 1, 0, 1);
        let (h, cert) = lemma_element(&h0, &i, &t(&[])).unwrap();
        cert.validate().unwrap();
        assert!(agrees_with(&h, &h0, &sample_points(&i, 20)));
        assert!(h.support().is_compact());

        let ring = t(&[2]);
        let h0 = Sl2::lower_unipotent(ratio(1, 2));
        let i = closed(int(0), ratio(1, 2));
        let (h, cert) = lemma_element(&h0, &i, &ring).unwrap();
        cert.validate().unwrap();
        assert!(agrees_with(&h, &h0, &sample_points(&i, 20)));
        assert!(cert.h1.in_subgroup(&ring) && cert.b1.in_subgroup(&ring));

        let (h, cert) = lemma_element(&Sl2::identity(), &i, &ring).unwrap();
        assert!(h.is_identity());
        cert.validate().unwrap();
    }

    #[test]
    fn tampered_certificate_fails() {
        let i = closed(int(0), int(1));
        let (_, mut cert) = lemma_element(&Sl2::from_ints(1, 1, 0, 1), &i, &t(&[])).unwrap();
        cert.h = PPMap::identity();
        assert!(cert.validate().is_err());
    }
}
