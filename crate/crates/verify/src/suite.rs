//! The property suites, one per acceptance criterion.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use ppgroup::constructions::{
    chabauty_escape, commensuration_witness, conjugate_top_right, displayed, escape_report,
    sample_points, unconfinement_element, unconfinement_matrix, Searcher,
};
use ppgroup::numbers::{in_s_integers, int, padic_valuation, prime_power};
use ppgroup::par::Exec;
use ppgroup::text::{format_document, parse_document};
use ppgroup::{PPMap, PrimeSet, Quadratic, Rational, Sl2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{self, ring, PRIME_POOL};
use crate::oracle;

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
    #[serde(serialize_with = "opt_seconds")]
    pub limit: Option<Duration>,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn opt_seconds<S: serde::Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_f64(d.as_secs_f64()),
        None => s.serialize_none(),
    }
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let limit = self
            .limit
            .map(|l| format!(" (limit {}s)", l.as_secs()))
            .unwrap_or_default();
        let mut s = format!(
            "{verdict} criterion {}: {}: {} cases in {:.2}s{limit}",
            self.id,
            self.name,
            self.cases,
            self.elapsed.as_secs_f64()
        );
        if let Some(first) = self.failures.first() {
            s.push_str(&format!("; {} failures, first: {first}", self.failures.len()));
        }
        s
    }
}

/// Collects failures while a criterion runs.
struct Run {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    start: Instant,
    cases: usize,
    failures: Vec<String>,
}

impl Run {
    fn new(id: u8, name: &'static str, limit: Option<u64>) -> Self {
        Self {
            id,
            name,
            limit: limit.map(Duration::from_secs),
            start: Instant::now(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(mut self) -> CriterionResult {
        let elapsed = self.start.elapsed();
        if let Some(limit) = self.limit {
            if elapsed > limit {
                self.failures
                    .push(format!("took {:.1}s, over the {}s limit", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        CriterionResult {
            id: self.id,
            name: self.name,
            passed: self.failures.is_empty(),
            cases: self.cases,
            failures: self.failures,
            elapsed,
            limit: self.limit,
        }
    }
}

fn sub_seed(seed: u64, id: u8) -> ChaCha8Rng {
    corpus::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ id as u64)
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        group_laws(seed),
        arithmetic_oracle(seed),
        conjugation_identities(seed),
        lemma_pipeline(seed),
        commensuration(seed),
        unconfinement(seed),
        round_trip(seed),
    ]
}

/// Rationals at which to compare evaluations: breakpoints and a few
/// random points.
fn probe_points(rng: &mut ChaCha8Rng, maps: &[&PPMap]) -> Vec<Quadratic> {
    let mut pts: Vec<Quadratic> = maps
        .iter()
        .flat_map(|f| f.breakpoints().into_iter().cloned())
        .collect();
    for _ in 0..4 {
        let den = rng.gen_range(1..=9);
        pts.push(Quadratic::rational(corpus::ring_rational(rng, &PrimeSet::empty(), 40, 0) / int(den)));
    }
    pts
}

fn group_laws(seed: u64) -> CriterionResult {
    let mut run = Run::new(1, "group laws", Some(60));
    let mut rng = sub_seed(seed, 1);
    let maps = corpus::mixed_elements(&mut rng, 500);
    let extra: Vec<Vec<Quadratic>> = (0..maps.len()).map(|_| probe_points(&mut rng, &[])).collect();
    let indices: Vec<usize> = (0..maps.len()).collect();
    let outcomes = Exec::default().map(&indices, |&i| {
        let mut run = Vec::new();
        let mut check = |ok: bool, what: &dyn Fn() -> String| {
            if !ok {
                run.push(what());
            }
        };
        let id = PPMap::identity();
        let (f, r) = &maps[i];
        let (g, rg) = &maps[(i + 1) % maps.len()];
        let (h, _) = &maps[(i + 2) % maps.len()];
        check(f.in_subgroup(r), &|| format!("element {i} left its ring {}", r.to_list()));
        check(f.compose(&id) == *f && id.compose(f) == *f, &|| format!("identity law at {i}"));
        let inv = f.inverse();
        check(f.compose(&inv).is_identity() && inv.compose(f).is_identity(), &|| {
            format!("inverse law at {i}")
        });
        check(inv.inverse() == *f, &|| format!("double inverse at {i}"));
        check(f.compose(g).compose(h) == f.compose(&g.compose(h)), &|| {
            format!("associativity at {i}")
        });
        let fg = f.compose(g);
        check(fg.in_subgroup(&r.union(rg)), &|| format!("product {i} left the joint ring"));
        let pts: Vec<Quadratic> = [f, g, &fg]
            .iter()
            .flat_map(|m| m.breakpoints().into_iter().cloned())
            .chain(extra[i].iter().cloned())
            .collect();
        for x in pts {
            check(fg.eval(&x) == f.eval(&g.eval(&x)), &|| format!("evaluation at {x} for pair {i}"));
            check(inv.eval(&f.eval(&x)) == x, &|| format!("inverse evaluation at {x} for {i}"));
            // the piece matrix, applied with raw arithmetic, gives the same value
            check(agrees_raw(f, &x), &|| format!("raw evaluation at {x} for {i}"));
        }
        run
    });
    run.cases = maps.len();
    run.failures.extend(outcomes.into_iter().flatten());
    run.finish()
}

fn agrees_raw(f: &PPMap, x: &Quadratic) -> bool {
    let m = oracle::mat(&f.piece_at(x).matrix);
    let num = x.scale(&m[0][0]).add_rational(&m[0][1]);
    let den = x.scale(&m[1][0]).add_rational(&m[1][1]);
    num.checked_div(&den).is_ok_and(|y| oracle::compare(&y, &f.eval(x)) == Some(Ordering::Equal))
}

/// A random quadratic in `Q(√d)` with small parts.
fn random_quadratic(rng: &mut ChaCha8Rng, d: i64) -> Quadratic {
    let r = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-60..=60).into(), rng.gen_range(1..=12).into());
    Quadratic::new(r(rng), r(rng), d.into()).expect("positive radicand")
}

/// A pair `(x, y)` for comparison: unrelated, same field, nearly equal or
/// equal with differently written radicands.
fn comparison_pair(rng: &mut ChaCha8Rng, k: usize) -> (Quadratic, Quadratic) {
    let radicands = [2i64, 3, 5, 6, 7, 10, 13, 8, 12, 18];
    let d1 = *radicands.choose(rng).unwrap();
    let d2 = *radicands.choose(rng).unwrap();
    let x = random_quadratic(rng, d1);
    match k % 5 {
        0 => (x, random_quadratic(rng, d2)),
        1 => (x.clone(), random_quadratic(rng, d1)),
        2 => {
            // x plus or minus 10^-e, e up to 40
            let e = rng.gen_range(10u32..=40);
            let eps = Rational::new(if rng.gen_bool(0.5) { 1.into() } else { (-1).into() }, BigInt::from(10).pow(e));
            (x.clone(), x.add_rational(&eps))
        }
        3 => {
            // c √(m² d) against c m √d
            let m = rng.gen_range(2i64..=5);
            let c = Rational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=5).into());
            let a = Quadratic::new(x.rat().clone(), c.clone(), (m * m * d1).into()).unwrap();
            let b = Quadratic::new(x.rat().clone(), c * int(m), d1.into()).unwrap();
            (a, b)
        }
        _ => {
            // a rational close to a quadratic irrational
            let pow = BigInt::from(10).pow(rng.gen_range(5u32..=35));
            let (lo, _) = x.bracket(120);
            let approx = Rational::new((lo * Rational::from_integer(pow.clone())).floor().to_integer(), pow);
            (x, Quadratic::rational(approx))
        }
    }
}

fn arithmetic_oracle(seed: u64) -> CriterionResult {
    let mut run = Run::new(2, "arithmetic oracle", None);
    let mut rng = sub_seed(seed, 2);
    for k in 0..10_000 {
        run.cases += 1;
        let (x, y) = comparison_pair(&mut rng, k);
        let truth = oracle::compare(&x, &y);
        run.check(truth == Some(x.compare(&y)), || format!("compare({x}, {y}) against {truth:?}"));
        run.check(oracle::compare(&y, &x) == Some(y.compare(&x)), || format!("compare({y}, {x})"));
        let s = oracle::sign(&x);
        run.check(s == Some(x.sign()), || format!("sign({x}) against {s:?}"));
    }
    let pool = [2u64, 3, 5, 7, 11, 13, 101];
    for _ in 0..10_000 {
        run.cases += 1;
        let p = *pool.choose(&mut rng).unwrap();
        let x = valuation_sample(&mut rng, p);
        let y = valuation_sample(&mut rng, p);
        let v = |z: &Rational| padic_valuation(z, p).ok();
        let (vx, vy) = (v(&x), v(&y));
        run.check(vx == oracle::valuation(&x, p) && vy == oracle::valuation(&y, p), || {
            format!("v_{p} of {x} or {y}")
        });
        let (vx, vy) = (vx.unwrap(), vy.unwrap());
        run.check(v(&(&x * &y)) == Some(vx + vy), || format!("v_{p}({x}·{y})"));
        run.check(v(&(&x / &y)) == Some(vx - vy), || format!("v_{p}({x}/{y})"));
        let sum = &x + &y;
        let ok = match v(&sum) {
            None => vx == vy,
            Some(vs) if vx != vy => vs == vx.min(vy),
            Some(vs) => vs >= vx,
        };
        run.check(ok, || format!("v_{p}({x}+{y})"));
        run.check(padic_valuation(&Rational::zero(), p).is_err(), || "v_p(0) accepted".into());
        let s = corpus::random_ring(&mut rng, &PRIME_POOL);
        run.check(in_s_integers(&x, &s) == oracle_in_ring(&x, &s), || {
            format!("{x} in Z[1/{}]", s.to_list())
        });
    }
    run.finish()
}

fn valuation_sample(rng: &mut ChaCha8Rng, p: u64) -> Rational {
    let base = Rational::new(rng.gen_range(1..=10_000).into(), rng.gen_range(1..=10_000).into());
    let sign = if rng.gen_bool(0.5) { -Rational::one() } else { Rational::one() };
    base * prime_power(p, rng.gen_range(-6..=6)) * sign
}

/// Denominator free of primes outside `s`, by trial division.
fn oracle_in_ring(x: &Rational, s: &PrimeSet) -> bool {
    let mut den = x.denom().clone();
    for p in s.iter() {
        let p = BigInt::from(p);
        while (&den % &p).is_zero() {
            den /= &p;
        }
    }
    den.is_one()
}

fn conjugation_identities(seed: u64) -> CriterionResult {
    let mut run = Run::new(3, "conjugation identities", Some(10));
    let mut rng = sub_seed(seed, 3);
    for _ in 0..1000 {
        run.cases += 1;
        let s = corpus::random_ring(&mut rng, &PRIME_POOL);
        let g = corpus::bounded_matrix(&mut rng, &s, 1000);
        let shift = corpus::ring_rational(&mut rng, &s, 9, 2);
        let shift = if shift.is_zero() { Rational::one() } else { shift };
        let lower = rng.gen_bool(0.5);
        let u = if lower {
            Sl2::lower_unipotent(shift.clone())
        } else {
            Sl2::upper_unipotent(shift.clone())
        };
        let gm = oracle::mat(&g);
        let brute = oracle::mul(&oracle::mul(&oracle::inv(&gm), &oracle::mat(&u)), &gm);
        let shown = displayed(&g, &shift, lower);
        run.check(oracle::projectively_equal(&brute, &oracle::mat(&shown)), || {
            format!("display of {g} with s = {shift}")
        });
        // off-diagonal entries are squares of entries of g times s, so a
        // negative power of p in g survives
        let pairs = if lower {
            [(&brute[1][0], g.a()), (&brute[0][1], g.b())]
        } else {
            [(&brute[0][1], g.d()), (&brute[1][0], g.c())]
        };
        for (entry, source) in pairs {
            for p in PRIME_POOL {
                let vshift = oracle::valuation(&shift, p).unwrap();
                let want = oracle::valuation(source, p).map(|v| 2 * v + vshift);
                run.check(oracle::valuation(entry, p) == want, || {
                    format!("v_{p} of a displayed entry for {g} with s = {shift}")
                });
            }
        }
    }
    for _ in 0..1000 {
        run.cases += 1;
        let p = *PRIME_POOL.choose(&mut rng).unwrap();
        let s = corpus::random_ring(&mut rng, &PRIME_POOL).union(&ring(&[p]));
        let h = corpus::bounded_matrix(&mut rng, &s, 1000);
        let n = rng.gen_range(1..=6);
        let gn = oracle::mat(&unconfinement_matrix(p, n).expect("prime"));
        let brute = oracle::mul(&oracle::mul(&oracle::inv(&gn), &oracle::mat(&h)), &gn);
        let formula = conjugate_top_right(&h, p, n);
        run.check(formula == brute[0][1], || format!("top right for {h}, p = {p}, n = {n}"));
        run.check(oracle::projectively_equal(&brute, &oracle::mat(&h.conjugate_by(&oracle_sl2(&gn)))), || {
            format!("conjugate of {h}, p = {p}, n = {n}")
        });
    }
    run.finish()
}

fn oracle_sl2(m: &oracle::Mat) -> Sl2 {
    Sl2::new(m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone()).expect("det one")
}

fn lemma_pipeline(seed: u64) -> CriterionResult {
    let mut run = Run::new(4, "lemma pipeline", Some(600));
    let mut rng = sub_seed(seed, 4);
    let inputs = corpus::lemma_inputs(&mut rng, 100);
    let searcher = Searcher::default();
    let outcomes = Exec::default().map(&inputs, |(h0, i, t)| {
        let mut bad = Vec::new();
        match searcher.lemma_element(h0, i, t) {
            Err(e) => bad.push(format!("{h0} on {i} over {}: {e}", t.to_list())),
            Ok((h, cert)) => {
                let pts = sample_points(i, 20);
                for x in &pts {
                    let want = h0.apply_finite(x).expect("pole avoided");
                    if h.eval(x) != want || oracle::compare(&h.eval(x), &want) != Some(Ordering::Equal) {
                        bad.push(format!("{h0} on {i}: disagrees at {x}"));
                    }
                }
                if pts.len() != 20 {
                    bad.push(format!("{} sample points", pts.len()));
                }
                if !h.support().is_compact() {
                    bad.push(format!("{h0} on {i}: support {} not compact", h.support()));
                }
                if !h.in_subgroup(t) {
                    bad.push(format!("{h0} on {i}: not over {}", t.to_list()));
                }
                if cert.h != h {
                    bad.push(format!("{h0} on {i}: certificate for another element"));
                }
                if let Err(e) = cert.validate() {
                    bad.push(format!("{h0} on {i}: certificate rejected: {e}"));
                }
            }
        }
        bad
    });
    run.cases = inputs.len();
    run.failures.extend(outcomes.into_iter().flatten());
    run.finish()
}

fn commensuration(seed: u64) -> CriterionResult {
    let mut run = Run::new(5, "commensuration witness", None);
    let mut rng = sub_seed(seed, 5);
    let cases = corpus::commensuration_inputs(&mut rng);
    let mut seen = std::collections::BTreeSet::new();
    for (k, case) in cases.iter().enumerate() {
        run.cases += 1;
        run.check(case.g.in_subgroup(&case.ambient) && !case.g.in_subgroup(&case.ring), || {
            format!("input {k} is not in Γ_S minus Γ_T")
        });
        let w = match commensuration_witness(&case.g, &case.ambient, &case.ring) {
            Ok(w) => w,
            Err(e) => {
                run.failures.push(format!("input {k}: {e}"));
                continue;
            }
        };
        seen.insert(w.offending.entry);
        run.check(w.offending.entry == case.position, || {
            format!("input {k}: offending {} where {} was planted", w.offending.entry, case.position)
        });
        run.check(w.certificate.h == w.h && w.certificate.validate().is_ok(), || {
            format!("input {k}: certificate does not revalidate")
        });
        run.check(w.h.in_subgroup(&case.ring), || format!("input {k}: h outside Γ_T"));
        let conj = w.h.conjugate_by(&case.g);
        run.check(!conj.in_subgroup(&case.ring) && !w.conjugate_in_ring, || {
            format!("input {k}: g⁻¹hg stays in Γ_T")
        });
        // pointwise: g⁻¹ h g against the composite evaluated stepwise
        let g_inv = case.g.inverse();
        for x in probe_points(&mut rng, &[&case.g]) {
            run.check(conj.eval(&x) == g_inv.eval(&w.h.eval(&case.g.eval(&x))), || {
                format!("input {k}: conjugate disagrees at {x}")
            });
        }
    }
    run.check(seen.len() == 4, || format!("offending positions covered: {seen:?}"));
    run.finish()
}

fn unconfinement(seed: u64) -> CriterionResult {
    let mut run = Run::new(6, "unconfinement witness", None);
    let mut rng = sub_seed(seed, 6);
    let cases = corpus::unconfinement_inputs(&mut rng, 25);
    let mut above_one = 0;
    for (k, case) in cases.iter().enumerate() {
        run.cases += 1;
        let (p, t) = (case.prime, &case.ring);
        let report = match escape_report(&case.h, p, t) {
            Ok(r) => r,
            Err(e) => {
                run.failures.push(format!("input {k}: {e}"));
                continue;
            }
        };
        let n0 = report.threshold;
        if n0 > 1 {
            above_one += 1;
        }
        for n in n0..=n0 + 5 {
            let g = unconfinement_element(p, n).expect("prime");
            let inside = case.h.conjugate_by(&g).in_subgroup(t);
            run.check(!inside, || format!("input {k}: conjugate at n = {n} stays in Γ_T"));
            let reported = report.evidence.iter().find(|e| e.n == n);
            run.check(reported.is_some_and(|e| e.conjugate_in_ring == inside), || {
                format!("input {k}: evidence at n = {n} missing or wrong")
            });
        }
        match (&report.below, n0 > 1) {
            (Some(b), true) => {
                let g = unconfinement_element(p, n0 - 1).expect("prime");
                let inside = case.h.conjugate_by(&g).in_subgroup(t);
                run.check(b.n == n0 - 1 && b.conjugate_in_ring == inside, || {
                    format!("input {k}: n = N-1 misreported")
                });
                // the entry itself does not escape at N-1, so N is least
                let gn = oracle::mat(&unconfinement_matrix(p, n0 - 1).unwrap());
                let brute = oracle::mul(&oracle::mul(&oracle::inv(&gn), &oracle::mat(&report.matrix)), &gn);
                let v = oracle::valuation(&brute[0][1], p);
                run.check(v.is_none_or(|v| v >= 0), || format!("input {k}: N is not least"));
            }
            (None, false) => {}
            _ => run.failures.push(format!("input {k}: below-threshold record inconsistent")),
        }
    }
    run.check(above_one > 0, || "no input had a threshold above one".into());
    for k in 0..5 {
        run.cases += 1;
        let p = PRIME_POOL[k % PRIME_POOL.len()];
        let others: Vec<u64> = PRIME_POOL.iter().copied().filter(|&q| q != p).collect();
        let t = corpus::random_ring(&mut rng, &others);
        let s = t.union(&ring(&[p]));
        let mut set = Vec::new();
        while set.len() < 10 {
            let h = corpus::random_element(&mut rng, &s);
            if !h.is_identity() {
                set.push(h);
            }
        }
        match chabauty_escape(&set, p, &t) {
            Err(e) => run.failures.push(format!("set {k}: {e}")),
            Ok(report) => {
                let g = unconfinement_element(p, report.n).expect("prime");
                for (i, h) in set.iter().enumerate() {
                    run.check(!h.conjugate_by(&g).in_subgroup(&t), || {
                        format!("set {k}: element {i} meets Γ_T at n = {}", report.n)
                    });
                }
                run.check(report.holds(), || format!("set {k}: report does not hold"));
            }
        }
    }
    run.finish()
}

fn round_trip(seed: u64) -> CriterionResult {
    let mut run = Run::new(7, "parser round trip", None);
    let mut rng = sub_seed(seed, 7);
    let mut quadratic = 0;
    for (k, (src, f)) in corpus::documents(&mut rng, 200).iter().enumerate() {
        run.cases += 1;
        let doc = match parse_document(src) {
            Ok(d) => d,
            Err(e) => {
                run.failures.push(format!("document {k}: {e}"));
                continue;
            }
        };
        run.check(doc.element == *f, || format!("document {k} parsed to another element"));
        if f.breakpoints().iter().any(|b| !b.is_rational()) {
            quadratic += 1;
        }
        let once = format_document(&doc);
        let twice = parse_document(&once).map(|d| format_document(&d));
        run.check(twice.as_deref() == Ok(once.as_str()), || format!("document {k} is not stable"));
    }
    run.check(quadratic > 0, || "no quadratic breakpoints in the corpus".into());
    for (k, (src, line, column)) in corpus::malformed().iter().enumerate() {
        run.cases += 1;
        match parse_document(src) {
            Ok(_) => run.failures.push(format!("malformed {k} accepted")),
            Err(e) => run.check(e.location.line == *line && e.location.column == *column, || {
                format!("malformed {k}: {e}, expected line {line}, column {column}")
            }),
        }
    }
    run.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_decidable() {
        let mut rng = corpus::rng(1);
        for k in 0..200 {
            let (x, y) = comparison_pair(&mut rng, k);
            assert!(oracle::compare(&x, &y).is_some(), "{x} {y}");
        }
    }

    #[test]
    fn ring_oracle() {
        assert!(oracle_in_ring(&Rational::new(1.into(), 12.into()), &ring(&[2, 3])));
        assert!(!oracle_in_ring(&Rational::new(1.into(), 12.into()), &ring(&[2])));
    }
}
