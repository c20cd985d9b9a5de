//! Seeded random inputs for the suites.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use ppgroup::constructions::IntervalSpec;
use ppgroup::numbers::{int, prime_power, ratio};
use ppgroup::{ExtReal, PPMap, Piece, PrimeSet, Quadratic, Rational, Sl2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub const PRIME_POOL: [u64; 4] = [2, 3, 5, 7];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ring(primes: &[u64]) -> PrimeSet {
    PrimeSet::new(primes.iter().copied()).expect("primes")
}

/// A random subset of `pool`, possibly empty.
pub fn random_ring(rng: &mut ChaCha8Rng, pool: &[u64]) -> PrimeSet {
    ring(&pool
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.5))
        .collect::<Vec<_>>())
}

/// `n · Π p^e` with `|n| ≤ max_num` and `|e| ≤ max_exp`.
pub fn ring_rational(rng: &mut ChaCha8Rng, ring: &PrimeSet, max_num: i64, max_exp: i64) -> Rational {
    let mut x = int(rng.gen_range(-max_num..=max_num));
    for p in ring.iter() {
        x *= prime_power(p, rng.gen_range(-max_exp..=max_exp));
    }
    x
}

/// A unit `±Π p^e` of `Z[1/T]` other than `±1` when `T` is nonempty.
pub fn ring_unit(rng: &mut ChaCha8Rng, ring: &PrimeSet, max_exp: i64) -> Rational {
    let primes: Vec<u64> = ring.iter().collect();
    if primes.is_empty() {
        return Rational::one();
    }
    loop {
        let mut x = Rational::one();
        for &p in &primes {
            x *= prime_power(p, rng.gen_range(-max_exp..=max_exp));
        }
        if !x.is_one() {
            return if rng.gen_bool(0.5) { -x } else { x };
        }
    }
}

/// `x ↦ u² x + u β`.
pub fn affine(rng: &mut ChaCha8Rng, ring: &PrimeSet) -> Sl2 {
    let u = ring_unit(rng, ring, 2);
    let beta = ring_rational(rng, ring, 6, 2);
    Sl2::new(u.clone(), beta, Rational::zero(), u.recip()).expect("det one")
}

/// A word in `[[1,±1],[0,1]]`, `[[1,0],[±1,1]]` with `|trace| > 2`.
pub fn integer_hyperbolic(rng: &mut ChaCha8Rng) -> Sl2 {
    loop {
        let mut m = Sl2::identity();
        for _ in 0..rng.gen_range(2..=5) {
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            let g = if rng.gen_bool(0.5) {
                Sl2::from_ints(1, s, 0, 1)
            } else {
                Sl2::from_ints(1, 0, s, 1)
            };
            m = &m * &g;
        }
        if m.is_hyperbolic() && !m.c().is_zero() {
            return m;
        }
    }
}

/// Identity outside the two fixed points of `m`, `m` between them.
pub fn bump(m: &Sl2) -> PPMap {
    let pts: Vec<Quadratic> = m
        .fixed_points()
        .points
        .iter()
        .filter_map(|p| p.as_finite().cloned())
        .collect();
    assert_eq!(pts.len(), 2, "two finite fixed points");
    PPMap::new(vec![
        Piece::new(ExtReal::NegInf, pts[0].clone(), Sl2::identity()),
        Piece::new(pts[0].clone(), pts[1].clone(), m.clone()),
        Piece::new(pts[1].clone(), ExtReal::PosInf, Sl2::identity()),
    ])
    .expect("fixed points splice continuously")
}

/// An integer hyperbolic bump, shifted by an integer; its breakpoints are
/// quadratic irrationals.
pub fn integer_bump(rng: &mut ChaCha8Rng) -> PPMap {
    let q = integer_hyperbolic(rng);
    let shift = Sl2::translation(int(rng.gen_range(-4..=4)));
    bump(&q.conjugate_by(&shift))
}

/// A bump with rational fixed points `r < r + δ`, δ a unit of `Z[1/T]`.
pub fn rational_bump(rng: &mut ChaCha8Rng, ring: &PrimeSet) -> Option<PPMap> {
    if ring.is_empty() {
        return None;
    }
    let r1 = ring_rational(rng, ring, 4, 1);
    let delta = ring_unit(rng, ring, 1).abs();
    let r2 = &r1 + &delta;
    let lambda = ring_unit(rng, ring, 2);
    let a = Sl2::new(r2, &r1 / &delta, Rational::one(), delta.recip()).expect("det one");
    let d = Sl2::new(lambda.clone(), Rational::zero(), Rational::zero(), lambda.recip())
        .expect("det one");
    let m = &(&a * &d) * &a.inverse();
    Some(bump(&m))
}

/// Composition of one to three random generators over `ring`.
pub fn random_element(rng: &mut ChaCha8Rng, ring: &PrimeSet) -> PPMap {
    let mut f = PPMap::identity();
    for _ in 0..rng.gen_range(1..=3) {
        let g = match rng.gen_range(0..3) {
            0 => PPMap::global(affine(rng, ring)).expect("affine"),
            1 => integer_bump(rng),
            _ => rational_bump(rng, ring).unwrap_or_else(|| integer_bump(rng)),
        };
        f = f.compose(&g);
    }
    f
}

/// Pairs of an element with the ring it was drawn over.
pub fn mixed_elements(rng: &mut ChaCha8Rng, count: usize) -> Vec<(PPMap, PrimeSet)> {
    (0..count)
        .map(|_| {
            let r = random_ring(rng, &PRIME_POOL);
            (random_element(rng, &r), r)
        })
        .collect()
}

/// Matrices over `Z[1/T]` with entry height at most `max_height`, as
/// products of elementary matrices.
pub fn bounded_matrix(rng: &mut ChaCha8Rng, ring: &PrimeSet, max_height: i64) -> Sl2 {
    let cap = BigInt::from(max_height);
    loop {
        let mut m = Sl2::identity();
        for _ in 0..rng.gen_range(1..=4) {
            let s = ring_rational(rng, ring, 3, 1);
            let g = match rng.gen_range(0..3) {
                0 => Sl2::upper_unipotent(s),
                1 => Sl2::lower_unipotent(s),
                _ => {
                    let u = ring_unit(rng, ring, 1);
                    Sl2::new(u.clone(), Rational::zero(), Rational::zero(), u.recip())
                        .expect("det one")
                }
            };
            let next = &m * &g;
            if next.height() > cap {
                break;
            }
            m = next;
        }
        if !m.is_identity() {
            return m;
        }
    }
}

/// A closed interval with small rational ends avoiding the pole of `m`.
pub fn interval_avoiding(rng: &mut ChaCha8Rng, m: &Sl2) -> IntervalSpec {
    loop {
        let den = rng.gen_range(1..=8);
        let lo = ratio(rng.gen_range(-10 * den..=10 * den), den);
        let hi = &lo + ratio(rng.gen_range(1..=32), 8);
        let pole_inside = m.pole().is_some_and(|p| lo <= p && p <= hi);
        if !pole_inside {
            return IntervalSpec::closed(Quadratic::rational(lo), Quadratic::rational(hi));
        }
    }
}

/// `(h0, I, T)` for the Lemma pipeline.
pub fn lemma_inputs(rng: &mut ChaCha8Rng, count: usize) -> Vec<(Sl2, IntervalSpec, PrimeSet)> {
    (0..count)
        .map(|_| {
            let t = random_ring(rng, &[2, 3, 5]);
            let h0 = bounded_matrix(rng, &t, 50);
            let i = interval_avoiding(rng, &h0);
            (h0, i, t)
        })
        .collect()
}

/// One commensuration input with the position expected to offend.
#[derive(Clone, Debug)]
pub struct CommensurationCase {
    pub g: PPMap,
    pub ambient: PrimeSet,
    pub ring: PrimeSet,
    pub position: &'static str,
}

/// Inputs `g ∉ Γ_T`, at least six per offending position in `(a, b, c, d)`.
pub fn commensuration_inputs(rng: &mut ChaCha8Rng) -> Vec<CommensurationCase> {
    let rings = [
        (ring(&[2, 5]), ring(&[2])),
        (ring(&[2, 3]), ring(&[3])),
        (ring(&[2, 3, 5]), ring(&[2, 3])),
        (ring(&[3, 7]), ring(&[7])),
        (ring(&[2, 3, 5]), ring(&[5])),
    ];
    let mut out = Vec::new();
    for (k, position) in ["a", "b", "c", "d", "a", "b", "c", "d"]
        .into_iter()
        .cycle()
        .take(25)
        .enumerate()
    {
        let (s, t) = rings[k % rings.len()].clone();
        let bad: Vec<u64> = s.difference(&t).iter().collect();
        let p = *bad.choose(rng).expect("S strictly contains T");
        let unit = |rng: &mut ChaCha8Rng| ring_unit(rng, &t, 1).abs();
        let pk = prime_power(p, -(rng.gen_range(1..=2) as i64));
        let g = match position {
            "a" => {
                let a = &pk * unit(rng);
                let b = ring_rational(rng, &t, 3, 1);
                PPMap::global(Sl2::new(a.clone(), b, Rational::zero(), a.recip()).expect("det one"))
                    .expect("affine")
            }
            "b" => {
                let m = [1i64, 2, 3, 4].into_iter().filter(|m| m % p as i64 != 0).collect::<Vec<_>>();
                let shift = &pk * int(*m.choose(rng).unwrap()) * unit(rng);
                PPMap::global(Sl2::translation(shift)).expect("affine")
            }
            // [[a, 0], [c, 1/a]]: offending c when a is a unit of Z[1/T],
            // offending d when a = p^k u
            "c" => {
                let a = ring_unit(rng, &t, 1).abs();
                let c = &pk * unit(rng);
                bump(&Sl2::new(a.clone(), Rational::zero(), c, a.recip()).expect("det one"))
            }
            _ => {
                let a = pk.recip() * unit(rng);
                let c = ring_rational(rng, &t, 2, 1);
                let c = if c.is_zero() { Rational::one() } else { c.abs() };
                bump(&Sl2::new(a.clone(), Rational::zero(), c, a.recip()).expect("det one"))
            }
        };
        out.push(CommensurationCase {
            g,
            ambient: s,
            ring: t,
            position,
        });
    }
    out
}

pub fn in_ring(x: &Rational, ring: &PrimeSet) -> bool {
    ppgroup::numbers::in_s_integers(x, ring)
}

/// One unconfinement input.
#[derive(Clone, Debug)]
pub struct UnconfinementCase {
    pub h: PPMap,
    pub prime: u64,
    pub ring: PrimeSet,
}

/// Nontrivial `h` with `(p, T)`, `p ∉ T`, including entries divisible by
/// high powers of `p` so that thresholds above one occur.
pub fn unconfinement_inputs(rng: &mut ChaCha8Rng, count: usize) -> Vec<UnconfinementCase> {
    (0..count)
        .map(|k| {
            let p = PRIME_POOL[k % PRIME_POOL.len()];
            let others: Vec<u64> = PRIME_POOL.iter().copied().filter(|&q| q != p).collect();
            let t = random_ring(rng, &others);
            let s = t.union(&ring(&[p]));
            let h = match k % 3 {
                0 => {
                    let e = rng.gen_range(0..=8);
                    let b = prime_power(p, e) * int(rng.gen_range(1..=3));
                    PPMap::global(Sl2::translation(b)).expect("affine")
                }
                1 => random_element(rng, &s),
                _ => {
                    let lambda = ring_unit(rng, &s, 1).abs();
                    let c = prime_power(p, rng.gen_range(0..=4)) * int(rng.gen_range(1..=3));
                    bump(&Sl2::new(lambda.clone(), Rational::zero(), c, lambda.recip()).expect("det one"))
                }
            };
            assert!(!h.is_identity());
            UnconfinementCase { h, prime: p, ring: t }
        })
        .collect()
}

/// Documents exercising headers, whitespace, quadratic breakpoints,
/// redundant breakpoints and unreduced radicands.
pub fn documents(rng: &mut ChaCha8Rng, count: usize) -> Vec<(String, PPMap)> {
    (0..count)
        .map(|k| {
            let r = random_ring(rng, &PRIME_POOL);
            let f = random_element(rng, &r);
            let mut pieces: Vec<String> = Vec::new();
            for p in f.pieces() {
                let text = piece_text(p, rng.gen_bool(0.3));
                // split a piece at an interior rational point, keeping its matrix
                if rng.gen_bool(0.2) {
                    if let Some(mid) = split_point(p) {
                        let left = Piece::new(p.lo.clone(), mid.clone(), p.matrix.clone());
                        let right = Piece::new(mid, p.hi.clone(), p.matrix.clone());
                        pieces.push(piece_text(&left, false));
                        pieces.push(piece_text(&right, false));
                        continue;
                    }
                }
                pieces.push(text);
            }
            let sep = if rng.gen_bool(0.3) { " ;\n  " } else { ";" };
            let mut doc = String::new();
            if k % 3 == 0 {
                doc.push_str(&format!("# name: element-{k}\n"));
            }
            if k % 4 == 0 {
                let mut listed: Vec<String> = r.iter().map(|p| p.to_string()).collect();
                listed.reverse();
                doc.push_str(&format!("# ring: {}\n", listed.join(", ")));
            }
            if k % 5 == 0 {
                doc.push_str("# generated\n");
            }
            doc.push_str(&pieces.join(sep));
            if rng.gen_bool(0.5) {
                doc.push('\n');
            }
            (doc, f)
        })
        .collect()
}

fn split_point(p: &Piece) -> Option<Quadratic> {
    let lo = p.lo.as_finite().cloned().unwrap_or_else(|| match p.hi.as_finite() {
        Some(h) => h.add_rational(&int(-2)),
        None => Quadratic::from_int(-1),
    });
    let hi = p.hi.as_finite().cloned().unwrap_or_else(|| lo.add_rational(&int(2)));
    Quadratic::rational_between(&lo, &hi).map(Quadratic::rational)
}

/// A piece in grammar form; `loose` inserts spaces and writes square
/// factors back into radicands.
fn piece_text(p: &Piece, loose: bool) -> String {
    let end = |x: &ExtReal| match x {
        ExtReal::Finite(q) if loose && !q.is_rational() => {
            // c √d = (c/2) √(4d)
            let c = q.coeff() / int(2);
            let d = q.radicand() * 4;
            let sign = if c.is_negative() { "-" } else { "+" };
            if q.rat().is_zero() {
                format!("{}*sqrt({d})", fmt_rational(&c))
            } else {
                format!("{}{sign}{}*sqrt({d})", fmt_rational(q.rat()), fmt_rational(&c.abs()))
            }
        }
        other => other.to_string(),
    };
    if loose {
        format!("( {} , {} ) : {}", end(&p.lo), end(&p.hi), p.matrix)
    } else {
        format!("({},{}):{}", end(&p.lo), end(&p.hi), p.matrix)
    }
}

fn fmt_rational(x: &Rational) -> String {
    ppgroup::numbers::format_rational(x)
}

/// Malformed documents, each with the line and column where the error is
/// expected.
pub fn malformed() -> Vec<(String, usize, usize)> {
    let ok = "(-inf,+inf):[[1,1],[0,1]]";
    vec![
        (String::new(), 1, 1),
        ("(-inf,+inf)".into(), 1, 12),
        ("(-inf,+inf):[[1,1],[0,1]".into(), 1, 25),
        ("(-inf,+inf):[[2,1],[0,1]]".into(), 1, 13),
        ("(-inf,+inf):[[1,1],[0,1/0]]".into(), 1, 25),
        ("(-inf,0):[[1,1],[0,1]];(0,+inf):[[1,0],[0,1]]".into(), 1, 24),
        ("(0,+inf):[[1,1],[0,1]]".into(), 1, 1),
        ("(-inf,0):[[1,0],[0,1]]".into(), 1, 1),
        ("(-inf,0):[[1,0],[0,1]];(1,+inf):[[1,0],[0,1]]".into(), 1, 24),
        ("(-inf,1):[[1,0],[0,1]];(0,+inf):[[1,0],[0,1]]".into(), 1, 24),
        ("(-inf,+inf):[[1,0],[1,1]]".into(), 1, 1),
        (
            "(-inf,0):[[1,0],[0,1]];(0,1):[[1,0],[-2,1]];(1,+inf):[[1,-2],[0,1]]".into(),
            1,
            24,
        ),
        (format!("{ok} extra"), 1, 27),
        ("# ring: 2\n(-inf,+inf):[[1,1/3],[0,1]]".into(), 2, 1),
        (format!("# ring: 6\n{ok}"), 1, 9),
        (format!("# name: a\n# name: b\n{ok}"), 2, 1),
        ("(-inf,+inf):[[1,1],[0,1]];".into(), 1, 27),
        ("(-inf,1+2):[[1,0],[0,1]]".into(), 1, 8),
        ("(-inf,1*sqrt(x)):[[1,0],[0,1]]".into(), 1, 14),
        ("\n\n  (-inf,+inf):[[1,1],[0,1]];\n(+inf,-inf):[[1,0],[0,1]]".into(), 4, 1),
    ]
}
