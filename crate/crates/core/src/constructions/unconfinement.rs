//! The sequence `g_n = [[pⁿ, p⁻²ⁿ], [0, p⁻ⁿ]]` and escape from `Γ_T`.
//!
//! For `hI = [[a, b], [c, d]]` the top-right entry of `g_n⁻¹ hI g_n` is
//! `b p⁻²ⁿ + (a − d) p⁻³ⁿ − c p⁻⁴ⁿ`. Unless `hI = ±Id` the three exponents
//! of `p⁻ⁿ` eventually separate the valuations, so the entry leaves
//! `Z[1/T]` for all large `n` when `p ∉ T`.

use num_traits::Zero;
use serde::Serialize;

use super::{check_prime, ConstructionError, IntervalSpec};
use crate::moebius::Sl2;
use crate::numbers::{
    in_s_integers, padic_valuation, prime_power, serialize_rational, PrimeSet, Rational,
};
use crate::par::Exec;
use crate::piecewise::PPMap;

/// Extra exponents checked directly past the threshold.
pub const CHECKED_BEYOND: u32 = 5;

/// `g_n`, an affine map of the whole line.
pub fn unconfinement_element(p: u64, n: u32) -> Result<PPMap, ConstructionError> {
    Ok(PPMap::global(unconfinement_matrix(p, n)?).expect("affine maps are valid"))
}

pub fn unconfinement_matrix(p: u64, n: u32) -> Result<Sl2, ConstructionError> {
    check_prime(p)?;
    if n == 0 {
        return Err(ConstructionError::ZeroExponent);
    }
    let n = n as i64;
    Ok(Sl2::new(
        prime_power(p, n),
        prime_power(p, -2 * n),
        Rational::zero(),
        prime_power(p, -n),
    )
    .expect("determinant one"))
}

/// Top-right entry of `g_n⁻¹ hI g_n`: the closed form, checked against an
/// explicit product.
pub fn conjugate_top_right(h: &Sl2, p: u64, n: u32) -> Rational {
    let (n, pn) = (n as i64, |e: i64| prime_power(p, -e));
    let formula = h.b() * pn(2 * n) + (h.a() - h.d()) * pn(3 * n) - h.c() * pn(4 * n);
    let g = [
        [prime_power(p, n), pn(2 * n)],
        [Rational::zero(), pn(n)],
    ];
    let g_inv = [
        [g[1][1].clone(), -&g[0][1]],
        [Rational::zero(), g[0][0].clone()],
    ];
    let m = [[h.a().clone(), h.b().clone()], [h.c().clone(), h.d().clone()]];
    let product = mul(&mul(&g_inv, &m), &g);
    assert_eq!(formula, product[0][1], "closed form disagrees with the product");
    formula
}

type M2 = [[Rational; 2]; 2];

fn mul(x: &M2, y: &M2) -> M2 {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Checks made at one exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscapeEvidence {
    pub n: u32,
    pub conjugated: Sl2,
    #[serde(serialize_with = "serialize_rational")]
    pub top_right: Rational,
    /// `None` when the entry is zero.
    pub valuation: Option<i64>,
    pub entry_in_ring: bool,
    /// Full piecewise membership of `g_n⁻¹ h g_n` in `Γ_T`.
    pub conjugate_in_ring: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnconfinementReport {
    pub h: PPMap,
    pub prime: u64,
    pub ring: PrimeSet,
    pub threshold: u32,
    pub piece_index: usize,
    pub piece: IntervalSpec,
    pub matrix: Sl2,
    /// Valuations of `b`, `a − d`, `c` (`None` for zero).
    pub valuations: [Option<i64>; 3],
    /// From this exponent on the valuation is given by a single term.
    pub analytic_bound: u32,
    pub evidence: Vec<EscapeEvidence>,
    /// The exponent just below the threshold, when there is one.
    pub below: Option<EscapeEvidence>,
}

impl UnconfinementReport {
    /// Every recorded exponent at or past the threshold escapes.
    pub fn holds(&self) -> bool {
        !self.evidence.is_empty()
            && self
                .evidence
                .iter()
                .all(|e| e.n >= self.threshold && !e.entry_in_ring && !e.conjugate_in_ring)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscapeReport {
    pub prime: u64,
    pub ring: PrimeSet,
    pub n: u32,
    pub reports: Vec<UnconfinementReport>,
    /// `g_n⁻¹ h g_n ∉ Γ_T` at the returned `n`, for each element in order.
    pub escapes: Vec<bool>,
}

impl EscapeReport {
    pub fn holds(&self) -> bool {
        self.escapes.iter().all(|&e| e) && self.reports.iter().all(|r| r.holds())
    }
}

/// Least `N` such that the top-right entry leaves `Z[1/T]` for all `n ≥ N`.
pub fn escape_exponent(h: &PPMap, p: u64, ring: &PrimeSet) -> Result<u32, ConstructionError> {
    Ok(escape_report(h, p, ring)?.threshold)
}

/// [`escape_exponent`] with its evidence.
pub fn escape_report(
    h: &PPMap,
    p: u64,
    ring: &PrimeSet,
) -> Result<UnconfinementReport, ConstructionError> {
    check_prime(p)?;
    if ring.contains(p) {
        return Err(ConstructionError::PrimeInRing(p));
    }
    let Some(piece_index) = h.pieces().iter().position(|q| !q.matrix.is_identity()) else {
        return Err(ConstructionError::TrivialElement(0));
    };
    let piece = &h.pieces()[piece_index];
    let m = &piece.matrix;
    let val = |x: &Rational| (!x.is_zero()).then(|| padic_valuation(x, p).expect("nonzero"));
    let valuations = [val(m.b()), val(&(m.a() - m.d())), val(m.c())];
    let analytic_bound = analytic_bound(&valuations);
    let escapes = |n: u32| {
        let x = conjugate_top_right(m, p, n);
        !x.is_zero() && padic_valuation(&x, p).expect("nonzero") < 0
    };
    let mut threshold = analytic_bound;
    while threshold > 1 && escapes(threshold - 1) {
        threshold -= 1;
    }
    let evidence: Vec<_> = (threshold..=threshold + CHECKED_BEYOND)
        .map(|n| evidence_at(h, m, p, n, ring))
        .collect();
    let below = (threshold > 1).then(|| evidence_at(h, m, p, threshold - 1, ring));
    Ok(UnconfinementReport {
        h: h.clone(),
        prime: p,
        ring: ring.clone(),
        threshold,
        piece_index,
        piece: IntervalSpec::open(piece.lo.clone(), piece.hi.clone()),
        matrix: m.clone(),
        valuations,
        analytic_bound,
        evidence,
        below,
    })
}

fn evidence_at(h: &PPMap, m: &Sl2, p: u64, n: u32, ring: &PrimeSet) -> EscapeEvidence {
    let g = unconfinement_element(p, n).expect("valid prime and exponent");
    let top_right = conjugate_top_right(m, p, n);
    let valuation = (!top_right.is_zero()).then(|| padic_valuation(&top_right, p).expect("nonzero"));
    EscapeEvidence {
        n,
        conjugated: m.conjugate_by(&g.pieces()[0].matrix),
        entry_in_ring: in_s_integers(&top_right, ring),
        conjugate_in_ring: h.conjugate_by(&g).in_subgroup(ring),
        top_right,
        valuation,
    }
}

/// Least `n ≥ 1` past which the steepest nonzero term is the unique
/// minimum valuation and is negative.
fn analytic_bound(valuations: &[Option<i64>; 3]) -> u32 {
    let slopes = [2i64, 3, 4];
    let terms: Vec<(i64, i64)> = valuations
        .iter()
        .zip(slopes)
        .filter_map(|(v, s)| v.map(|v| (v, s)))
        .collect();
    let &(vd, sd) = terms.last().expect("a non-identity matrix has a nonzero term");
    // least n with vd - sd n < 0, and with vd - sd n < v - s n for each other term
    let mut n = vd.div_euclid(sd) + 1;
    for &(v, s) in &terms[..terms.len() - 1] {
        n = n.max((vd - v).div_euclid(sd - s) + 1);
    }
    n.max(1) as u32
}

/// Common exponent `n` with `g_n⁻¹ h g_n ∉ Γ_T` for every `h ∈ set`.
pub fn chabauty_escape(
    set: &[PPMap],
    p: u64,
    ring: &PrimeSet,
) -> Result<EscapeReport, ConstructionError> {
    chabauty_escape_with(set, p, ring, Exec::default())
}

pub fn chabauty_escape_with(
    set: &[PPMap],
    p: u64,
    ring: &PrimeSet,
    exec: Exec,
) -> Result<EscapeReport, ConstructionError> {
    check_prime(p)?;
    if ring.contains(p) {
        return Err(ConstructionError::PrimeInRing(p));
    }
    if let Some(i) = set.iter().position(PPMap::is_identity) {
        return Err(ConstructionError::TrivialElement(i));
    }
    let reports = exec
        .map(set, |h| escape_report(h, p, ring))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let n = reports.iter().map(|r| r.threshold).max().unwrap_or(1);
    let g = unconfinement_element(p, n)?;
    let escapes = exec.map(set, |h| !h.conjugate_by(&g).in_subgroup(ring));
    Ok(EscapeReport {
        prime: p,
        ring: ring.clone(),
        n,
        reports,
        escapes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, ratio};

    fn set(p: &[u64]) -> PrimeSet {
        PrimeSet::new(p.iter().copied()).unwrap()
    }

    #[test]
    fn elements() {
        let g = unconfinement_element(2, 1).unwrap();
        assert_eq!(g.to_string(), "(-inf,+inf):[[2,1/4],[0,1/2]]");
        let g = unconfinement_matrix(3, 2).unwrap();
        assert_eq!(g, Sl2::new(int(9), ratio(1, 81), int(0), ratio(1, 9)).unwrap());
        assert!(unconfinement_element(4, 1).is_err());
        assert!(unconfinement_element(2, 0).is_err());
    }

    #[test]
    fn top_right_values() {
        assert_eq!(conjugate_top_right(&Sl2::from_ints(1, 1, 0, 1), 2, 1), ratio(1, 4));
        assert_eq!(conjugate_top_right(&Sl2::identity(), 5, 3), int(0));
        assert_eq!(conjugate_top_right(&Sl2::from_ints(2, 1, 1, 1), 3, 2), ratio(89, 6561));
    }

    #[test]
    fn exponents() {
        let h = PPMap::global(Sl2::from_ints(1, 1, 0, 1)).unwrap();
        assert_eq!(escape_exponent(&h, 2, &set(&[3])).unwrap(), 1);
        let r = escape_report(&h, 2, &set(&[3])).unwrap();
        assert!(r.holds());
        assert!(r.below.is_none());
        assert!(matches!(
            escape_exponent(&PPMap::identity(), 2, &set(&[3])),
            Err(ConstructionError::TrivialElement(0))
        ));
        assert!(matches!(
            escape_exponent(&h, 3, &set(&[3])),
            Err(ConstructionError::PrimeInRing(3))
        ));
    }

    #[test]
    fn threshold_is_least() {
        // b = 3^6 keeps the entry 3-integral for small n
        let h = PPMap::global(Sl2::from_ints(1, 729, 0, 1)).unwrap();
        let r = escape_report(&h, 3, &set(&[2])).unwrap();
        assert_eq!(r.threshold, 4);
        assert!(r.holds());
        let below = r.below.unwrap();
        assert_eq!(below.n, 3);
        assert!(below.entry_in_ring && below.conjugate_in_ring);
    }

    #[test]
    fn chabauty() {
        let h = PPMap::global(Sl2::from_ints(1, 1, 0, 1)).unwrap();
        let r = chabauty_escape(std::slice::from_ref(&h), 2, &set(&[3])).unwrap();
        assert_eq!(r.n, 1);
        assert!(r.holds());
        let r = chabauty_escape(&[], 2, &set(&[3])).unwrap();
        assert_eq!(r.n, 1);
        assert!(r.reports.is_empty());
        let err = chabauty_escape(&[h, PPMap::identity()], 2, &set(&[3])).unwrap_err();
        assert_eq!(err, ConstructionError::TrivialElement(1));
    }
}
