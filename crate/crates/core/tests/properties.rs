use num_traits::{One, Zero};
use ppgroup::numbers::{int, padic_valuation, prime_power, ratio};
use ppgroup::text::{format_element, parse_element};
use ppgroup::{ExtReal, PPMap, Piece, PrimeSet, Quadratic, Rational, Sl2};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=60).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn quadratic(d: i64) -> impl Strategy<Value = Quadratic> {
    (rational(), rational()).prop_map(move |(r, c)| Quadratic::new(r, c, d.into()).unwrap())
}

fn radicand() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 8, 12])
}

/// Products of `[[1,s],[0,1]]`, `[[1,0],[s,1]]` and diagonal matrices over
/// `Z[1/6]`.
fn matrix() -> impl Strategy<Value = Sl2> {
    let step = (0u8..3, -3i64..=3, -1i64..=1, -1i64..=1);
    prop::collection::vec(step, 1..5).prop_map(|steps| {
        let mut m = Sl2::identity();
        for (kind, n, e2, e3) in steps {
            let s = int(n) * prime_power(2, e2) * prime_power(3, e3);
            let g = match kind {
                0 => Sl2::upper_unipotent(s),
                1 => Sl2::lower_unipotent(s),
                _ => {
                    let u = prime_power(2, e2) * prime_power(3, e3);
                    Sl2::new(u.clone(), Rational::zero(), Rational::zero(), u.recip()).unwrap()
                }
            };
            m = &m * &g;
        }
        m
    })
}

fn bump(m: &Sl2) -> Option<PPMap> {
    let pts: Vec<Quadratic> = m
        .fixed_points()
        .points
        .iter()
        .filter_map(|p| p.as_finite().cloned())
        .collect();
    if !m.is_hyperbolic() || pts.len() != 2 {
        return None;
    }
    PPMap::new(vec![
        Piece::new(ExtReal::NegInf, pts[0].clone(), Sl2::identity()),
        Piece::new(pts[0].clone(), pts[1].clone(), m.clone()),
        Piece::new(pts[1].clone(), ExtReal::PosInf, Sl2::identity()),
    ])
    .ok()
}

/// Compositions of affine maps and hyperbolic bumps over `Z[1/6]`.
fn element() -> impl Strategy<Value = PPMap> {
    prop::collection::vec(matrix(), 1..4).prop_map(|ms| {
        ms.iter().fold(PPMap::identity(), |f, m| {
            let g = if m.is_affine() {
                PPMap::global(m.clone()).unwrap()
            } else {
                bump(m).unwrap_or_else(PPMap::identity)
            };
            f.compose(&g)
        })
    })
}

fn point() -> impl Strategy<Value = Quadratic> {
    prop_oneof![
        rational().prop_map(Quadratic::rational),
        radicand().prop_flat_map(quadratic),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn field_axioms(x in quadratic(5), y in quadratic(5), z in quadratic(5)) {
        let add = |a: &Quadratic, b: &Quadratic| a.checked_add(b).unwrap();
        let mul = |a: &Quadratic, b: &Quadratic| a.checked_mul(b).unwrap();
        prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
        prop_assert_eq!(mul(&mul(&x, &y), &z), mul(&x, &mul(&y, &z)));
        prop_assert_eq!(mul(&x, &add(&y, &z)), add(&mul(&x, &y), &mul(&x, &z)));
        prop_assert_eq!(add(&x, &x.neg()), Quadratic::zero());
        if !x.is_zero() {
            prop_assert_eq!(mul(&x, &Quadratic::rational(Rational::one()).checked_div(&x).unwrap()),
                Quadratic::rational(Rational::one()));
        }
        prop_assert_eq!(mul(&x, &x.conj()), Quadratic::rational(x.norm()));
    }

    #[test]
    fn order_matches_difference(x in point(), y in point()) {
        prop_assert_eq!(x.compare(&y), y.compare(&x).reverse());
        if x.same_field(&y) {
            prop_assert_eq!(x.compare(&y), x.checked_sub(&y).unwrap().sign());
        }
        let (a, b) = (x.to_f64(), y.to_f64());
        if (a - b).abs() > 1e-9 {
            prop_assert_eq!(x.compare(&y), a.partial_cmp(&b).unwrap());
        }
        prop_assert!(x.floor() <= x.ceil());
        prop_assert!(Quadratic::rational(Rational::from_integer(x.floor())) <= x);
    }

    #[test]
    fn brackets_enclose(x in point(), bits in 8u32..200) {
        let (lo, hi) = x.bracket(bits);
        prop_assert!(Quadratic::rational(lo) <= x && x <= Quadratic::rational(hi));
    }

    #[test]
    fn valuations(x in nonzero_rational(), y in nonzero_rational(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let v = |z: &Rational| padic_valuation(z, p).unwrap();
        prop_assert_eq!(v(&(&x * &y)), v(&x) + v(&y));
        prop_assert_eq!(v(&(&x / &y)), v(&x) - v(&y));
        let sum = &x + &y;
        if !sum.is_zero() {
            prop_assert!(v(&sum) >= v(&x).min(v(&y)));
            if v(&x) != v(&y) {
                prop_assert_eq!(v(&sum), v(&x).min(v(&y)));
            }
        }
        let ring = PrimeSet::new([p]).unwrap();
        prop_assert!(ppgroup::numbers::in_s_integers(&prime_power(p, -3), &ring));
    }

    #[test]
    fn matrix_group(a in matrix(), b in matrix(), c in matrix(), x in point()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a * &a.inverse()).is_identity());
        let ab = &a * &b;
        prop_assert_eq!(ab.conjugate_by(&c), &a.conjugate_by(&c) * &b.conjugate_by(&c));
        if let (Some(bx), Some(abx)) = (b.apply_finite(&x), ab.apply_finite(&x)) {
            if let Some(y) = a.apply_finite(&bx) {
                prop_assert_eq!(y, abx);
            }
        }
        for p in a.fixed_points().points {
            prop_assert_eq!(a.apply(&p), p);
        }
        prop_assert_eq!(a.mirrored().mirrored(), a.clone());
    }

    #[test]
    fn element_group(f in element(), g in element(), h in element(), x in point()) {
        let id = PPMap::identity();
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
        prop_assert_eq!(f.compose(&id), f.clone());
        prop_assert!(f.compose(&f.inverse()).is_identity());
        prop_assert_eq!(f.compose(&g).eval(&x), f.eval(&g.eval(&x)));
        prop_assert_eq!(f.compose(&g).inverse(), g.inverse().compose(&f.inverse()));
        let six = PrimeSet::new([2, 3]).unwrap();
        prop_assert!(f.in_subgroup(&six));
        prop_assert_eq!(f.mirrored().mirrored(), f.clone());
    }

    #[test]
    fn conjugation(f in element(), g in element(), x in point()) {
        let c = f.conjugate_by(&g);
        prop_assert_eq!(c.eval(&x), g.inverse().eval(&f.eval(&g.eval(&x))));
        let k = PPMap::commutator(&f, &g);
        prop_assert_eq!(k.clone(), f.compose(&g).compose(&f.inverse()).compose(&g.inverse()));
        if f.support().is_compact() {
            prop_assert!(k.support().is_compact());
        }
    }

    #[test]
    fn text_round_trip(f in element()) {
        let text = format_element(&f);
        let back = parse_element(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(format_element(&back), text);
    }

    #[test]
    fn evaluation_is_monotone(f in element(), x in point(), y in point()) {
        let (fx, fy) = (f.eval(&x), f.eval(&y));
        prop_assert_eq!(fx.compare(&fy), x.compare(&y));
    }
}
