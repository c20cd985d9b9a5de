//! Piecewise-projective homeomorphisms of the real line.
//!
//! A [`PPMap`] is an ordered list of closed pieces tiling `R`, each carrying
//! an `SL2(Q)` matrix. Adjacent pieces share their endpoint, where both
//! matrices agree. Maps are always kept in normal form (no two consecutive
//! pieces carry the same matrix), so structural equality is group equality.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::moebius::{ProjPoint, Sl2};
use crate::numbers::{ExtReal, PrimeSet, Quadratic, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: ExtReal,
    pub hi: ExtReal,
    pub matrix: Sl2,
}

impl Piece {
    pub fn new(lo: impl Into<ExtReal>, hi: impl Into<ExtReal>, matrix: Sl2) -> Self {
        Self {
            lo: lo.into(),
            hi: hi.into(),
            matrix,
        }
    }

    /// Does the closed piece contain `x`?
    pub fn contains(&self, x: &Quadratic) -> bool {
        let x = ExtReal::Finite(x.clone());
        self.lo <= x && x <= self.hi
    }

    fn pole_inside(&self) -> Option<Rational> {
        let pole = self.matrix.pole()?;
        self.contains(&Quadratic::rational(pole.clone()))
            .then_some(pole)
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}):{}", self.lo, self.hi, self.matrix)
    }
}

/// One broken invariant found by [`PPMap::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoPieces,
    StartNotNegInf { lo: ExtReal },
    EndNotPosInf { hi: ExtReal },
    EmptyPiece { index: usize, lo: ExtReal, hi: ExtReal },
    Gap { index: usize, left_hi: ExtReal, right_lo: ExtReal },
    Overlap { index: usize, left_hi: ExtReal, right_lo: ExtReal },
    Discontinuity { index: usize, at: Quadratic, left: ProjPoint, right: ProjPoint },
    PoleInside { index: usize, pole: Rational },
    NonAffineEnd { index: usize },
}

impl Violation {
    /// Index of the piece the violation is attached to.
    pub fn piece_index(&self) -> usize {
        match self {
            Violation::NoPieces | Violation::StartNotNegInf { .. } => 0,
            Violation::EndNotPosInf { .. } => usize::MAX,
            Violation::EmptyPiece { index, .. }
            | Violation::Gap { index, .. }
            | Violation::Overlap { index, .. }
            | Violation::Discontinuity { index, .. }
            | Violation::PoleInside { index, .. }
            | Violation::NonAffineEnd { index } => *index,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPieces => write!(f, "no pieces"),
            Violation::StartNotNegInf { lo } => write!(f, "first piece starts at {lo}, not -inf"),
            Violation::EndNotPosInf { hi } => write!(f, "last piece ends at {hi}, not +inf"),
            Violation::EmptyPiece { index, lo, hi } => {
                write!(f, "piece {index} is empty: ({lo},{hi})")
            }
            Violation::Gap { index, left_hi, right_lo } => {
                write!(f, "gap before piece {index}: ({left_hi},{right_lo})")
            }
            Violation::Overlap { index, left_hi, right_lo } => {
                write!(f, "overlap before piece {index}: {right_lo} < {left_hi}")
            }
            Violation::Discontinuity { at, left, right, .. } => {
                write!(f, "discontinuity at {at}: left gives {left}, right gives {right}")
            }
            Violation::PoleInside { index, pole } => write!(
                f,
                "pole {} inside piece {index}",
                crate::numbers::format_rational(pole)
            ),
            Violation::NonAffineEnd { index } => {
                write!(f, "unbounded piece {index} is not affine")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{}{}", .violations[0], if .violations.len() > 1 { format!(" (+{} more)", .violations.len() - 1) } else { String::new() })]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl ValidationError {
    pub fn first(&self) -> &Violation {
        &self.violations[0]
    }
}

/// An element of the group of piecewise-`SL2` homeomorphisms of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPMap {
    pieces: Vec<Piece>,
}

/// Closed hull of the points moved by a map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    Empty,
    Interval { lo: ExtReal, hi: ExtReal },
}

impl Support {
    pub fn is_compact(&self) -> bool {
        match self {
            Support::Empty => true,
            Support::Interval { lo, hi } => lo.is_finite() && hi.is_finite(),
        }
    }

    /// Is the support inside the closed interval `[lo, hi]`?
    pub fn within(&self, lo: &ExtReal, hi: &ExtReal) -> bool {
        match self {
            Support::Empty => true,
            Support::Interval { lo: a, hi: b } => lo <= a && b <= hi,
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Empty => f.write_str("empty"),
            Support::Interval { lo, hi } => write!(f, "[{lo},{hi}]"),
        }
    }
}

fn image(m: &Sl2, x: &ExtReal) -> ExtReal {
    match x {
        ExtReal::Finite(q) => ExtReal::Finite(
            m.apply_finite(q)
                .expect("piece endpoints avoid the pole"),
        ),
        // end pieces are increasing affine maps
        inf => inf.clone(),
    }
}

impl PPMap {
    /// Validates `pieces` and returns the map in normal form, or every
    /// violated invariant in order of appearance.
    pub fn new(pieces: Vec<Piece>) -> Result<Self, ValidationError> {
        let violations = validate(&pieces);
        if violations.is_empty() {
            Ok(Self::normalize(pieces))
        } else {
            Err(ValidationError { violations })
        }
    }

    /// Builds from pieces already known to be valid.
    pub(crate) fn from_valid(pieces: Vec<Piece>) -> Self {
        debug_assert!(validate(&pieces).is_empty(), "{:?}", validate(&pieces));
        Self::normalize(pieces)
    }

    fn normalize(pieces: Vec<Piece>) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match out.last_mut() {
                Some(last) if last.matrix == p.matrix => last.hi = p.hi,
                _ => out.push(p),
            }
        }
        Self { pieces: out }
    }

    pub fn identity() -> Self {
        Self::global(Sl2::identity()).unwrap()
    }

    /// The single-piece map given by an affine matrix.
    pub fn global(m: Sl2) -> Result<Self, ValidationError> {
        Self::new(vec![Piece::new(ExtReal::NegInf, ExtReal::PosInf, m)])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Piece> {
        self.pieces
    }

    /// Interior breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<&Quadratic> {
        self.pieces[1..]
            .iter()
            .map(|p| p.lo.as_finite().expect("interior breakpoints are finite"))
            .collect()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &Sl2> {
        self.pieces.iter().map(|p| &p.matrix)
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].matrix.is_identity()
    }

    /// Index of a piece containing `x` (the leftmost one at a breakpoint).
    pub fn piece_index(&self, x: &Quadratic) -> usize {
        let x = ExtReal::Finite(x.clone());
        self.pieces.partition_point(|p| p.hi < x)
    }

    pub fn piece_at(&self, x: &Quadratic) -> &Piece {
        &self.pieces[self.piece_index(x)]
    }

    pub fn eval(&self, x: &Quadratic) -> Quadratic {
        self.piece_at(x)
            .matrix
            .apply_finite(x)
            .expect("pieces avoid their poles")
    }

    pub fn eval_ext(&self, x: &ExtReal) -> ExtReal {
        match x {
            ExtReal::Finite(q) => ExtReal::Finite(self.eval(q)),
            inf => inf.clone(),
        }
    }

    /// `self ∘ g`: apply `g` first.
    pub fn compose(&self, g: &PPMap) -> PPMap {
        let f_breaks = self.breakpoints();
        let mut out = Vec::with_capacity(self.pieces.len() + g.pieces.len());
        for gp in &g.pieces {
            let img_lo = image(&gp.matrix, &gp.lo);
            let img_hi = image(&gp.matrix, &gp.hi);
            let mut j = match &img_lo {
                ExtReal::Finite(y) => f_breaks.partition_point(|b| *b <= y),
                _ => 0,
            };
            let inv = gp.matrix.inverse();
            let mut cur = gp.lo.clone();
            while j < f_breaks.len() && ExtReal::Finite(f_breaks[j].clone()) < img_hi {
                let pre = inv
                    .apply_finite(f_breaks[j])
                    .expect("image of a piece avoids the inverse pole");
                let pre = ExtReal::Finite(pre);
                out.push(Piece {
                    lo: cur,
                    hi: pre.clone(),
                    matrix: &self.pieces[j].matrix * &gp.matrix,
                });
                cur = pre;
                j += 1;
            }
            out.push(Piece {
                lo: cur,
                hi: gp.hi.clone(),
                matrix: &self.pieces[j].matrix * &gp.matrix,
            });
        }
        Self::from_valid(out)
    }

    pub fn inverse(&self) -> PPMap {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: image(&p.matrix, &p.lo),
                hi: image(&p.matrix, &p.hi),
                matrix: p.matrix.inverse(),
            })
            .collect();
        Self::from_valid(pieces)
    }

    /// `f g f⁻¹ g⁻¹`.
    pub fn commutator(f: &PPMap, g: &PPMap) -> PPMap {
        f.compose(g).compose(&f.inverse()).compose(&g.inverse())
    }

    /// `g⁻¹ ∘ self ∘ g`.
    pub fn conjugate_by(&self, g: &PPMap) -> PPMap {
        g.inverse().compose(self).compose(g)
    }

    pub fn support(&self) -> Support {
        if self.is_identity() {
            return Support::Empty;
        }
        let first = &self.pieces[0];
        let last = &self.pieces[self.pieces.len() - 1];
        let lo = if first.matrix.is_identity() {
            first.hi.clone()
        } else {
            ExtReal::NegInf
        };
        let hi = if last.matrix.is_identity() {
            last.lo.clone()
        } else {
            ExtReal::PosInf
        };
        Support::Interval { lo, hi }
    }

    /// Membership in the subgroup of maps with all matrices over `Z[1/T]`.
    pub fn in_subgroup(&self, ring: &PrimeSet) -> bool {
        self.matrices().all(|m| m.entries_in_ring(ring))
    }

    /// The mirror image `x ↦ -f(-x)`.
    pub fn mirrored(&self) -> PPMap {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| Piece {
                lo: p.hi.neg(),
                hi: p.lo.neg(),
                matrix: p.matrix.mirrored(),
            })
            .collect();
        Self::from_valid(pieces)
    }
}

fn validate(pieces: &[Piece]) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(first) = pieces.first() else {
        return vec![Violation::NoPieces];
    };
    if first.lo != ExtReal::NegInf {
        out.push(Violation::StartNotNegInf {
            lo: first.lo.clone(),
        });
    }
    for (i, p) in pieces.iter().enumerate() {
        if p.lo >= p.hi {
            out.push(Violation::EmptyPiece {
                index: i,
                lo: p.lo.clone(),
                hi: p.hi.clone(),
            });
        }
        if (!p.lo.is_finite() || !p.hi.is_finite()) && !p.matrix.is_affine() {
            out.push(Violation::NonAffineEnd { index: i });
        } else if let Some(pole) = p.pole_inside() {
            out.push(Violation::PoleInside { index: i, pole });
        }
        if i == 0 {
            continue;
        }
        let left = &pieces[i - 1];
        match left.hi.cmp(&p.lo) {
            Ordering::Less => out.push(Violation::Gap {
                index: i,
                left_hi: left.hi.clone(),
                right_lo: p.lo.clone(),
            }),
            Ordering::Greater => out.push(Violation::Overlap {
                index: i,
                left_hi: left.hi.clone(),
                right_lo: p.lo.clone(),
            }),
            Ordering::Equal => {
                if let ExtReal::Finite(at) = &p.lo {
                    let l = left.matrix.apply(&ProjPoint::Finite(at.clone()));
                    let r = p.matrix.apply(&ProjPoint::Finite(at.clone()));
                    if l != r {
                        out.push(Violation::Discontinuity {
                            index: i,
                            at: at.clone(),
                            left: l,
                            right: r,
                        });
                    }
                }
            }
        }
    }
    let last = &pieces[pieces.len() - 1];
    if last.hi != ExtReal::PosInf {
        out.push(Violation::EndNotPosInf {
            hi: last.hi.clone(),
        });
    }
    out
}

impl fmt::Display for PPMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            p.fmt(f)?;
        }
        Ok(())
    }
}

impl Serialize for PPMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, ratio};

    fn q(n: i64) -> Quadratic {
        Quadratic::from_int(n)
    }

    fn golden() -> Quadratic {
        Quadratic::new(ratio(1, 2), ratio(1, 2), 5.into()).unwrap()
    }

    fn translation(t: i64) -> PPMap {
        PPMap::global(Sl2::translation(int(t))).unwrap()
    }

    /// Identity outside the fixed points of [[2,1],[1,1]].
    fn golden_bump() -> PPMap {
        PPMap::new(vec![
            Piece::new(ExtReal::NegInf, golden().conj(), Sl2::identity()),
            Piece::new(golden().conj(), golden(), Sl2::from_ints(2, 1, 1, 1)),
            Piece::new(golden(), ExtReal::PosInf, Sl2::identity()),
        ])
        .unwrap()
    }

    #[test]
    fn global_translation() {
        let t = translation(1);
        assert_eq!(t.pieces().len(), 1);
        assert_eq!(t.eval(&q(5)), q(6));
    }

    #[test]
    fn discontinuity_rejected() {
        let err = PPMap::new(vec![
            Piece::new(ExtReal::NegInf, q(0), Sl2::translation(int(1))),
            Piece::new(q(0), ExtReal::PosInf, Sl2::identity()),
        ])
        .unwrap_err();
        match err.first() {
            Violation::Discontinuity { at, left, right, .. } => {
                assert_eq!(at, &q(0));
                assert_eq!(left, &ProjPoint::Finite(q(1)));
                assert_eq!(right, &ProjPoint::Finite(q(0)));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn splice_must_be_at_a_fixed_point() {
        // [[2,1],[1,1]] sends 0 to 1, so splicing with Id at 0 fails
        let err = PPMap::new(vec![
            Piece::new(ExtReal::NegInf, q(0), Sl2::identity()),
            Piece::new(q(0), golden(), Sl2::from_ints(2, 1, 1, 1)),
            Piece::new(golden(), ExtReal::PosInf, Sl2::identity()),
        ])
        .unwrap_err();
        assert!(matches!(err.first(), Violation::Discontinuity { .. }));
        let bump = golden_bump();
        assert_eq!(bump.pieces().len(), 3);
        assert_eq!(bump.eval(&q(0)), q(1));
    }

    #[test]
    fn structural_violations() {
        let err = PPMap::new(vec![
            Piece::new(q(-1), q(2), Sl2::identity()),
            Piece::new(q(3), q(4), Sl2::from_ints(0, 1, -1, 0)),
            Piece::new(q(4), q(5), Sl2::from_ints(2, 1, 1, 1)),
        ])
        .unwrap_err();
        let v = &err.violations;
        assert!(matches!(v[0], Violation::StartNotNegInf { .. }));
        assert!(v.iter().any(|x| matches!(x, Violation::Gap { index: 1, .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::EndNotPosInf { .. })));
        let err = PPMap::new(vec![Piece::new(
            ExtReal::NegInf,
            ExtReal::PosInf,
            Sl2::from_ints(2, 1, 1, 1),
        )])
        .unwrap_err();
        assert!(matches!(err.first(), Violation::NonAffineEnd { index: 0 }));
        assert!(matches!(
            PPMap::new(vec![]).unwrap_err().first(),
            Violation::NoPieces
        ));
    }

    #[test]
    fn pole_inside_rejected() {
        let m = Sl2::from_ints(1, 0, 1, 1); // pole at -1
        let err = PPMap::new(vec![
            Piece::new(ExtReal::NegInf, q(-2), Sl2::identity()),
            Piece::new(q(-2), q(0), m),
            Piece::new(q(0), ExtReal::PosInf, Sl2::identity()),
        ])
        .unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PoleInside { index: 1, .. })));
    }

    #[test]
    fn normal_form_merges() {
        let two = PPMap::new(vec![
            Piece::new(ExtReal::NegInf, q(0), Sl2::identity()),
            Piece::new(q(0), ExtReal::PosInf, Sl2::identity()),
        ])
        .unwrap();
        assert_eq!(two, PPMap::identity());
    }

    #[test]
    fn group_operations() {
        assert_eq!(translation(1).compose(&translation(2)), translation(3));
        let b = golden_bump();
        assert!(b.compose(&b.inverse()).is_identity());
        assert!(b.inverse().compose(&b).is_identity());
        assert_eq!(translation(1).inverse(), translation(-1));
        assert!(PPMap::commutator(&b, &b).is_identity());
        assert!(PPMap::commutator(&b, &PPMap::identity()).is_identity());
        assert!(PPMap::commutator(&translation(1), &translation(5)).is_identity());
        assert_eq!(b.compose(&PPMap::identity()), b);
        let c = PPMap::commutator(&b, &translation(1));
        assert!(!c.is_identity());
        assert!(c.support().is_compact());
    }

    #[test]
    fn composition_evaluates_pointwise() {
        let b = golden_bump();
        let t = translation(1);
        let h = b.compose(&t).compose(&b);
        for n in -8..8 {
            let x = Quadratic::rational(ratio(n, 3));
            assert_eq!(h.eval(&x), b.eval(&t.eval(&b.eval(&x))));
        }
    }

    #[test]
    fn unconfinement_element_examples() {
        let g1 = PPMap::global(Sl2::new(int(2), ratio(1, 4), int(0), ratio(1, 2)).unwrap()).unwrap();
        assert_eq!(g1.eval(&q(0)), Quadratic::rational(ratio(1, 2)));
        let inv = g1.inverse();
        assert_eq!(
            inv.pieces()[0].matrix,
            Sl2::new(ratio(1, 2), ratio(-1, 4), int(0), int(2)).unwrap()
        );
        assert!(g1.compose(&inv).is_identity());
        assert!(!g1.in_subgroup(&PrimeSet::new([3]).unwrap()));
        assert!(g1.in_subgroup(&PrimeSet::new([2]).unwrap()));
        assert!(PPMap::identity().in_subgroup(&PrimeSet::empty()));
    }

    #[test]
    fn supports() {
        assert_eq!(PPMap::identity().support(), Support::Empty);
        assert!(PPMap::identity().support().is_compact());
        let s = translation(1).support();
        assert_eq!(
            s,
            Support::Interval {
                lo: ExtReal::NegInf,
                hi: ExtReal::PosInf
            }
        );
        assert!(!s.is_compact());
        let b = golden_bump().support();
        assert_eq!(
            b,
            Support::Interval {
                lo: golden().conj().into(),
                hi: golden().into()
            }
        );
    }

    #[test]
    fn mirror_is_conjugation_by_negation() {
        let b = golden_bump().compose(&translation(1));
        let m = b.mirrored();
        for n in -6..6 {
            let x = Quadratic::rational(ratio(n, 2));
            assert_eq!(m.eval(&x.neg()), b.eval(&x).neg());
        }
        assert_eq!(m.mirrored(), b);
    }

    #[test]
    fn display_form() {
        assert_eq!(translation(1).to_string(), "(-inf,+inf):[[1,1],[0,1]]");
        assert_eq!(
            golden_bump().to_string(),
            "(-inf,1/2-1/2*sqrt(5)):[[1,0],[0,1]];(1/2-1/2*sqrt(5),1/2+1/2*sqrt(5)):[[2,1],[1,1]];(1/2+1/2*sqrt(5),+inf):[[1,0],[0,1]]"
        );
    }
}
