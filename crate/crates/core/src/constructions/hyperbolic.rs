//! Hyperbolic elements of `SL2(Z)` with fixed points in given windows.
//!
//! Candidates are enumerated by max-entry bound `B = 1, 2, 4, ...`; within
//! a bound by bottom-left entry `c > 0`, then `d`, then `a`, all ascending.
//! Each candidate with max entry `≤ B/2` was already seen at the previous
//! bound and is skipped. The search runs in coordinates translated by an
//! integer so that the repelling window starts in `[0, 1)`; translations
//! lie in `SL2(Z)`, so the result is conjugated back at the end.
//!
//! For a fixed point `ξ` with eigenvalue `λ = cξ + d` the other eigenvalue
//! is `a − cξ`, and when `|trace| ≥ 3` the small eigenvalue has modulus
//! below `0.382`. So the repelling point lies within `0.382/c` of `−d/c`
//! and the attracting point within `0.382/c` of `a/c`, which bounds the
//! ranges of `d` and `a` for a given `c`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{ConstructionError, IntervalSpec, SearchBudget};
use crate::moebius::{ProjPoint, Sl2};
use crate::numbers::{ExtReal, Rational};
use crate::par::Exec;

/// Slightly above `(3 − √5)/2`.
const SMALL_EIGEN: f64 = 0.39;

/// Number of `c` values examined together before hits are handed out.
const CHUNK: i64 = 256;

/// A configured search; see [`HyperbolicSearch::candidates`].
#[derive(Clone, Debug)]
pub struct HyperbolicSearch {
    repelling: IntervalSpec,
    attracting: IntervalSpec,
    budget: SearchBudget,
    exec: Exec,
    shift: BigInt,
    frame: Frame,
}

#[derive(Clone, Debug)]
struct Frame {
    rep: IntervalSpec,
    att: IntervalSpec,
    rep_f: (f64, f64),
    att_f: (f64, f64),
}

/// Any `q ∈ SL2(Z)` with `|trace| > 2`, repelling fixed point in
/// `repelling` and attracting fixed point in `attracting`, using the
/// default budget.
pub fn find_hyperbolic(
    repelling: &IntervalSpec,
    attracting: &IntervalSpec,
) -> Result<Sl2, ConstructionError> {
    HyperbolicSearch::new(repelling, attracting, SearchBudget::default())?.first()
}

impl HyperbolicSearch {
    pub fn new(
        repelling: &IntervalSpec,
        attracting: &IntervalSpec,
        budget: SearchBudget,
    ) -> Result<Self, ConstructionError> {
        for w in [repelling, attracting] {
            if !w.is_nonempty() {
                return Err(ConstructionError::EmptyWindow(w.to_string()));
            }
        }
        if !repelling.is_disjoint(attracting) {
            return Err(ConstructionError::OverlappingWindows(
                repelling.to_string(),
                attracting.to_string(),
            ));
        }
        let shift = frame_shift(repelling, attracting);
        let rep = translate(repelling, &shift);
        let att = translate(attracting, &shift);
        let frame = Frame {
            rep_f: (ext_f64(&rep.lo), ext_f64(&rep.hi)),
            att_f: (ext_f64(&att.lo), ext_f64(&att.hi)),
            rep,
            att,
        };
        Ok(Self {
            repelling: repelling.clone(),
            attracting: attracting.clone(),
            budget,
            exec: Exec::default(),
            shift,
            frame,
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    /// Exact check of the output conditions in the original coordinates.
    pub fn accepts(&self, q: &Sl2) -> bool {
        admissible(q, &self.repelling, &self.attracting)
    }

    /// All admissible matrices in enumeration order, at most
    /// `hits_per_row` per bottom-left entry and bound.
    pub fn candidates(&self) -> Candidates<'_> {
        Candidates {
            search: self,
            bound: 1,
            next_c: 1,
            buffer: Vec::new(),
            pos: 0,
        }
    }

    pub fn first(&self) -> Result<Sl2, ConstructionError> {
        let mut it = self.candidates();
        it.next().ok_or(ConstructionError::BudgetExhausted {
            bound: self.budget.max_bound,
        })
    }

    fn row(&self, bound: i64, c: i64) -> Vec<Sl2> {
        let f = &self.frame;
        let mut hits = Vec::new();
        let (d_lo, d_hi) = int_range(
            -(c as f64) * f.rep_f.1 - SMALL_EIGEN,
            -(c as f64) * f.rep_f.0 + SMALL_EIGEN,
            bound,
        );
        let (a_lo, a_hi) = int_range(
            c as f64 * f.att_f.0 - SMALL_EIGEN,
            c as f64 * f.att_f.1 + SMALL_EIGEN,
            bound,
        );
        if d_lo > d_hi || a_lo > a_hi {
            return hits;
        }
        let half = bound / 2;
        for d in d_lo..=d_hi {
            let g = d.extended_gcd(&c);
            if g.gcd != 1 && g.gcd != -1 {
                continue;
            }
            let r = (g.x * g.gcd).rem_euclid(c);
            let mut a = a_lo + (r - a_lo).rem_euclid(c);
            while a <= a_hi {
                let ad = a as i128 * d as i128 - 1;
                let b = (ad / c as i128) as i64;
                let big = a.abs().max(b.abs()).max(c).max(d.abs());
                if b.abs() <= bound && big > half && (a + d).abs() >= 3 && prescreen(f, a, c, d) {
                    let q = Sl2::from_ints(a, b, c, d);
                    if admissible(&q, &f.rep, &f.att) {
                        hits.push(q);
                        if hits.len() >= self.budget.hits_per_row {
                            return hits;
                        }
                    }
                }
                a += c;
            }
        }
        hits
    }

    fn unshift(&self, q: Sl2) -> Sl2 {
        if self.shift.is_zero() {
            return q;
        }
        let tau = Sl2::translation(Rational::from_integer(-&self.shift));
        let q = q.conjugate_by(&tau);
        debug_assert!(self.accepts(&q));
        q
    }
}

/// Iterator over [`HyperbolicSearch`] hits.
pub struct Candidates<'a> {
    search: &'a HyperbolicSearch,
    bound: i64,
    next_c: i64,
    buffer: Vec<Sl2>,
    pos: usize,
}

impl Candidates<'_> {
    /// The bound currently being enumerated.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Next hit without moving past bound `level`; enumeration resumes
    /// from the same place on a later call.
    pub fn next_within(&mut self, level: i64) -> Option<Sl2> {
        if self.pos >= self.buffer.len() && !self.refill(level) {
            return None;
        }
        let q = self.buffer[self.pos].clone();
        self.pos += 1;
        Some(self.search.unshift(q))
    }

    fn refill(&mut self, level: i64) -> bool {
        let s = self.search;
        while self.bound <= s.budget.max_bound.min(level) {
            if self.next_c > self.bound {
                self.bound *= 2;
                self.next_c = 1;
                continue;
            }
            let start = self.next_c;
            let end = (start + CHUNK).min(self.bound + 1);
            self.next_c = end;
            let bound = self.bound;
            let rows = s
                .exec
                .map_range(start as u64..end as u64, |c| s.row(bound, c as i64));
            self.buffer = rows.into_iter().flatten().collect();
            self.pos = 0;
            if !self.buffer.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for Candidates<'_> {
    type Item = Sl2;

    fn next(&mut self) -> Option<Sl2> {
        self.next_within(i64::MAX)
    }
}

/// Exact test: hyperbolic, repelling point in `rep`, attracting in `att`.
pub fn admissible(q: &Sl2, rep: &IntervalSpec, att: &IntervalSpec) -> bool {
    let fp = q.fixed_points();
    if !q.is_hyperbolic() {
        return false;
    }
    let inside = |p: Option<&ProjPoint>, w: &IntervalSpec| match p {
        Some(ProjPoint::Finite(x)) => w.contains(x),
        _ => false,
    };
    inside(fp.repelling_point(), rep) && inside(fp.attracting_point(), att)
}

fn prescreen(f: &Frame, a: i64, c: i64, d: i64) -> bool {
    let t = (a + d) as f64;
    let s = (t * t - 4.0).sqrt();
    let big = (t + t.signum() * s) / 2.0;
    let small = 1.0 / big;
    let c = c as f64;
    let rep = (small - d as f64) / c;
    let att = (a as f64 - small) / c;
    near(rep, f.rep_f) && near(att, f.att_f)
}

fn near(x: f64, (lo, hi): (f64, f64)) -> bool {
    let tol = 1e-9 * (1.0 + x.abs());
    x > lo - tol && x < hi + tol
}

fn int_range(lo: f64, hi: f64, bound: i64) -> (i64, i64) {
    let b = bound as f64;
    let lo = if lo.is_nan() { -b } else { lo.max(-b).ceil() };
    let hi = if hi.is_nan() { b } else { hi.min(b).floor() };
    (lo as i64, hi as i64)
}

fn ext_f64(x: &ExtReal) -> f64 {
    match x {
        ExtReal::NegInf => f64::NEG_INFINITY,
        ExtReal::PosInf => f64::INFINITY,
        ExtReal::Finite(q) => q.to_f64(),
    }
}

fn frame_shift(rep: &IntervalSpec, att: &IntervalSpec) -> BigInt {
    let pick = |w: &IntervalSpec| {
        if let Some(lo) = w.lo.as_finite() {
            Some(lo.floor())
        } else {
            w.hi.as_finite().map(|hi| hi.floor() - 1)
        }
    };
    pick(rep).or_else(|| pick(att)).unwrap_or_default()
}

fn translate(w: &IntervalSpec, n: &BigInt) -> IntervalSpec {
    let by = Rational::from_integer(-n);
    let move_end = |x: &ExtReal| match x {
        ExtReal::Finite(q) => ExtReal::Finite(q.add_rational(&by)),
        inf => inf.clone(),
    };
    IntervalSpec {
        lo: move_end(&w.lo),
        hi: move_end(&w.hi),
        lo_closed: w.lo_closed,
        hi_closed: w.hi_closed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, ratio, Quadratic};
    use num_traits::Signed;

    fn open(lo: Rational, hi: Option<Rational>) -> IntervalSpec {
        IntervalSpec::open(
            ExtReal::rational(lo),
            hi.map(ExtReal::rational).unwrap_or(ExtReal::PosInf),
        )
    }

    #[test]
    fn windows_one_two() {
        let rep = open(int(1), Some(int(2)));
        let att = open(ratio(5, 2), None);
        let q = find_hyperbolic(&rep, &att).unwrap();
        assert!(admissible(&q, &rep, &att));
        assert!(q.entries().iter().all(|e| e.is_integer()));
        assert!(q.trace().abs() > int(2));
    }

    #[test]
    fn golden_windows() {
        let rep = open(ratio(-7, 10), Some(ratio(-6, 10)));
        let att = open(ratio(16, 10), Some(ratio(17, 10)));
        let q = Sl2::from_ints(2, 1, 1, 1);
        assert!(admissible(&q, &rep, &att));
        let found = find_hyperbolic(&rep, &att).unwrap();
        assert!(admissible(&found, &rep, &att));
        assert_eq!(found, q);
        assert_eq!(q.height(), 2.into());
    }

    #[test]
    fn overlapping_windows_rejected() {
        let w = open(int(0), Some(int(1)));
        assert!(matches!(
            find_hyperbolic(&w, &w),
            Err(ConstructionError::OverlappingWindows(..))
        ));
        let empty = open(int(1), Some(int(1)));
        assert!(matches!(
            find_hyperbolic(&empty, &w),
            Err(ConstructionError::EmptyWindow(_))
        ));
    }

    #[test]
    fn deterministic_across_strategies() {
        let rep = open(ratio(3, 7), Some(ratio(4, 9)));
        let att = IntervalSpec::open(ExtReal::NegInf, ExtReal::rational(ratio(-11, 3)));
        let budget = SearchBudget::default();
        let seq: Vec<_> = HyperbolicSearch::new(&rep, &att, budget)
            .unwrap()
            .with_exec(Exec::Sequential)
            .candidates()
            .take(6)
            .collect();
        let par: Vec<_> = HyperbolicSearch::new(&rep, &att, budget)
            .unwrap()
            .with_exec(Exec::Parallel)
            .candidates()
            .take(6)
            .collect();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 6);
        assert!(seq.iter().all(|q| admissible(q, &rep, &att)));
    }

    #[test]
    fn narrow_and_quadratic_windows() {
        let g = Quadratic::sqrt(&int(2)).unwrap();
        let rep = IntervalSpec::open(
            ExtReal::finite(g.clone()),
            ExtReal::finite(g.add_rational(&ratio(1, 1000))),
        );
        let att = IntervalSpec::open(ExtReal::rational(int(-40)), ExtReal::rational(int(-39)));
        let q = find_hyperbolic(&rep, &att).unwrap();
        assert!(admissible(&q, &rep, &att));
    }

    #[test]
    fn budget_exhaustion_reports_bound() {
        let rep = open(int(0), Some(ratio(1, 1 << 20)));
        let att = open(int(5), Some(ratio(5 * (1 << 20) + 1, 1 << 20)));
        let budget = SearchBudget {
            max_bound: 64,
            ..SearchBudget::default()
        };
        let err = HyperbolicSearch::new(&rep, &att, budget).unwrap().first();
        assert_eq!(err, Err(ConstructionError::BudgetExhausted { bound: 64 }));
    }
}
