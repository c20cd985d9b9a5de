//! `SL2(Q)` matrices and their projective action on `R ∪ {∞}`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numbers::{format_rational, in_s_integers, int, PrimeSet, Quadratic, Rational};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("determinant is {0}, expected 1")]
    Determinant(String),
}

/// A point of the real projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjPoint {
    Finite(Quadratic),
    Infinity,
}

impl ProjPoint {
    pub fn as_finite(&self) -> Option<&Quadratic> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }
}

impl From<Quadratic> for ProjPoint {
    fn from(x: Quadratic) -> Self {
        ProjPoint::Finite(x)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => x.fmt(f),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A determinant-one rational matrix, stored as the representative of
/// `{M, -M}` whose first nonzero entry (in the order a, b, c, d) is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sl2 {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

impl Sl2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, MatrixError> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(MatrixError::Determinant(format_rational(&det)));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    /// Integer-entry shorthand; panics unless the determinant is 1.
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(int(a), int(b), int(c), int(d)).expect("determinant 1")
    }

    fn normalized(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("det 1 forces a nonzero entry");
        if lead.is_negative() {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    /// `x ↦ x + t`.
    pub fn translation(t: Rational) -> Self {
        Self::normalized(int(1), t, int(0), int(1))
    }

    /// `[[1, 0], [s, 1]]`.
    pub fn lower_unipotent(s: Rational) -> Self {
        Self::normalized(int(1), int(0), s, int(1))
    }

    /// `[[1, s], [0, 1]]`.
    pub fn upper_unipotent(s: Rational) -> Self {
        Self::translation(s)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }
    pub fn b(&self) -> &Rational {
        &self.b
    }
    pub fn c(&self) -> &Rational {
        &self.c
    }
    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// Fixes `∞`, i.e. acts by an affine map of the line.
    pub fn is_affine(&self) -> bool {
        self.c.is_zero()
    }

    pub fn inverse(&self) -> Self {
        Self::normalized(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Sl2::identity();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `g⁻¹ M g`.
    pub fn conjugate_by(&self, g: &Sl2) -> Sl2 {
        &(&g.inverse() * self) * g
    }

    /// The conjugate by `x ↦ -x`, i.e. `[[a, -b], [-c, d]]`.
    pub fn mirrored(&self) -> Sl2 {
        Self::normalized(self.a.clone(), -&self.b, -&self.c, self.d.clone())
    }

    /// The real pole `-d/c`, when `c ≠ 0`.
    pub fn pole(&self) -> Option<Rational> {
        (!self.c.is_zero()).then(|| -&self.d / &self.c)
    }

    /// Action on a finite point; `None` exactly at the pole.
    pub fn apply_finite(&self, x: &Quadratic) -> Option<Quadratic> {
        x.mobius(&self.a, &self.b, &self.c, &self.d)
    }

    /// Projective action on `R ∪ {∞}`.
    pub fn apply(&self, x: &ProjPoint) -> ProjPoint {
        match x {
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(Quadratic::rational(&self.a / &self.c))
                }
            }
            ProjPoint::Finite(x) => match self.apply_finite(x) {
                Some(y) => ProjPoint::Finite(y),
                None => ProjPoint::Infinity,
            },
        }
    }

    /// Are all four entries in `Z[1/T]`?
    pub fn entries_in_ring(&self, ring: &PrimeSet) -> bool {
        self.entries().into_iter().all(|x| in_s_integers(x, ring))
    }

    pub fn classify(&self) -> MobiusClass {
        let t = self.trace().abs();
        let two = int(2);
        if t > two {
            MobiusClass::Hyperbolic
        } else if t < two {
            MobiusClass::Elliptic
        } else if self.is_identity() {
            MobiusClass::Identity
        } else {
            MobiusClass::Parabolic
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.classify() == MobiusClass::Hyperbolic
    }

    /// Solves `c x² + (d − a) x − b = 0` exactly and labels the dynamics.
    pub fn fixed_points(&self) -> FixedPointData {
        let class = self.classify();
        let mut data = FixedPointData {
            class,
            points: Vec::new(),
            repelling: None,
            attracting: None,
        };
        match class {
            MobiusClass::Identity | MobiusClass::Elliptic => {}
            MobiusClass::Parabolic => {
                if self.c.is_zero() {
                    data.points.push(ProjPoint::Infinity);
                } else {
                    let x = (&self.a - &self.d) / (int(2) * &self.c);
                    data.points.push(ProjPoint::Finite(Quadratic::rational(x)));
                }
            }
            MobiusClass::Hyperbolic if self.c.is_zero() => {
                // x ↦ a² x + ab: ∞ attracts iff a² > 1
                let finite = &self.b / (&self.d - &self.a);
                data.points.push(ProjPoint::Finite(Quadratic::rational(finite)));
                data.points.push(ProjPoint::Infinity);
                let expanding = &self.a * &self.a > int(1);
                let (rep, att) = if expanding { (0, 1) } else { (1, 0) };
                data.repelling = Some(rep);
                data.attracting = Some(att);
            }
            MobiusClass::Hyperbolic => {
                let t = self.trace();
                let disc = &t * &t - int(4);
                let root = Quadratic::sqrt(&disc).expect("positive discriminant");
                let two_c = int(2) * &self.c;
                let base = Quadratic::rational(&self.a - &self.d);
                let plus = base
                    .checked_add(&root)
                    .expect("one field")
                    .scale(&two_c.recip());
                let minus = base
                    .checked_sub(&root)
                    .expect("one field")
                    .scale(&two_c.recip());
                // c ξ + d = (t ± √disc) / 2; |c ξ + d| > 1 marks the attractor
                let plus_attracts = t.is_positive();
                let (lo, hi, lo_is_plus) = if self.c.is_positive() {
                    (minus, plus, false)
                } else {
                    (plus, minus, true)
                };
                data.points.push(ProjPoint::Finite(lo));
                data.points.push(ProjPoint::Finite(hi));
                let lo_attracts = lo_is_plus == plus_attracts;
                data.attracting = Some(if lo_attracts { 0 } else { 1 });
                data.repelling = Some(if lo_attracts { 1 } else { 0 });
            }
        }
        data
    }

    /// Maximum height of the four entries.
    pub fn height(&self) -> BigInt {
        self.entries()
            .into_iter()
            .map(crate::numbers::height)
            .max()
            .unwrap()
    }
}

impl Mul for &Sl2 {
    type Output = Sl2;

    fn mul(self, o: &Sl2) -> Sl2 {
        Sl2::normalized(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

impl Mul for Sl2 {
    type Output = Sl2;

    fn mul(self, o: Sl2) -> Sl2 {
        &self * &o
    }
}

impl fmt::Display for Sl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            format_rational(&self.a),
            format_rational(&self.b),
            format_rational(&self.c),
            format_rational(&self.d)
        )
    }
}

impl Serialize for Sl2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusClass {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
}

/// Fixed points of a matrix with their dynamical labels.
///
/// Finite points are listed in increasing order, followed by `∞` when fixed.
/// The identity fixes everything and lists no points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointData {
    pub class: MobiusClass,
    pub points: Vec<ProjPoint>,
    pub repelling: Option<usize>,
    pub attracting: Option<usize>,
}

impl FixedPointData {
    pub fn repelling_point(&self) -> Option<&ProjPoint> {
        self.repelling.map(|i| &self.points[i])
    }

    pub fn attracting_point(&self) -> Option<&ProjPoint> {
        self.attracting.map(|i| &self.points[i])
    }
}
