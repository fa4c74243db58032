use latval::borel::{pair, tuple_decode, tuple_encode, unpair, Stump};
use latval::instances::{totient, Interval, IntervalMeasure, IntervalSet, StepFn, StepIntegral};
use latval::uniformity::dyadic_holds;
use latval::valuation::{dist, Valuation};
use latval::Rational;
use num::BigUint;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(p, q)| Rational::new(p, q))
}

fn interval() -> impl Strategy<Value = Interval> {
    (rational(), rational(), any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (lc, hc) = if lo == hi { (true, true) } else { (lc, hc) };
        Interval::new(lo, lc, hi, hc)
    })
}

fn set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(interval(), 0..5).prop_map(|v| IntervalSet::make(v).expect("ordered endpoints"))
}

fn step() -> impl Strategy<Value = StepFn> {
    prop::collection::vec((interval(), rational()), 0..4).prop_map(|terms| {
        terms.iter().fold(StepFn::zero(), |f, (i, c)| f.add(&StepFn::indicator(i, c.clone()).expect("valid interval")))
    })
}

proptest! {
    #[test]
    fn interval_measure_is_modular_and_monotone(a in set(), b in set()) {
        let m = |s: &IntervalSet| s.measure();
        prop_assert_eq!(m(&a.meet(&b)) + m(&a.join(&b)), m(&a) + m(&b));
        prop_assert!(m(&a.meet(&b)) <= m(&a));
        prop_assert!(a.meet(&b).is_subset(&a) && a.is_subset(&a.join(&b)));
    }

    #[test]
    fn interval_lattice_laws(a in set(), b in set(), c in set()) {
        prop_assert_eq!(a.meet(&b), b.meet(&a));
        prop_assert_eq!(a.join(&a.meet(&b)), a.clone());
        prop_assert_eq!(a.meet(&b.join(&c)), a.meet(&b).join(&a.meet(&c)));
    }

    #[test]
    fn canonical_form_ignores_piece_order(v in prop::collection::vec(interval(), 0..5)) {
        let mut rev = v.clone();
        rev.reverse();
        prop_assert_eq!(IntervalSet::make(v).unwrap(), IntervalSet::make(rev).unwrap());
    }

    #[test]
    fn set_distance_is_a_pseudometric(a in set(), b in set(), c in set()) {
        let phi = IntervalMeasure::default();
        let d = |x: &IntervalSet, y: &IntervalSet| dist(&phi, x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &b), a.symmdiff(&b).measure());
    }

    #[test]
    fn step_integral_is_linear_and_modular(f in step(), g in step(), k in rational()) {
        let phi = StepIntegral::default();
        prop_assert_eq!(f.add(&g).integral(), f.integral() + g.integral());
        prop_assert_eq!(f.scale(&k).integral(), &k * &f.integral());
        prop_assert_eq!(phi.eval(&f.meet(&g)) + phi.eval(&f.join(&g)), phi.eval(&f) + phi.eval(&g));
        prop_assert!(f.meet(&g).leq(&f) && f.leq(&f.join(&g)));
    }

    #[test]
    fn step_json_round_trip(f in step()) {
        let text = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(StepFn::from_json(&text).unwrap(), f);
    }

    #[test]
    fn rational_text_round_trip(r in rational()) {
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn pairing_is_a_bijection(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let (a, b) = (BigUint::from(a), BigUint::from(b));
        let k = pair(&a, &b).unwrap();
        prop_assert!(k >= BigUint::from(2u32));
        prop_assert_eq!(unpair(&k).unwrap(), (a, b));
    }

    #[test]
    fn tuples_round_trip(xs in prop::collection::vec(1u64..10_000, 0..8)) {
        let xs: Vec<BigUint> = xs.into_iter().map(BigUint::from).collect();
        prop_assert_eq!(tuple_decode(&tuple_encode(&xs).unwrap()).unwrap(), xs);
    }

    #[test]
    fn dyadic_uniformity_halves(i in 0u32..12, s in rational(), t in rational(), u in rational()) {
        if dyadic_holds(i + 1, &s, &t) && dyadic_holds(i + 1, &t, &u) {
            prop_assert!(dyadic_holds(i, &s, &u));
        }
        if dyadic_holds(i + 1, &s, &t) {
            prop_assert!(dyadic_holds(i, &s, &t));
        }
    }

    #[test]
    fn totient_is_multiplicative_on_coprimes(m in 1u64..2000, n in 1u64..2000) {
        if num::integer::gcd(m, n) == 1 {
            prop_assert_eq!(totient(m * n).unwrap(), totient(m).unwrap() * totient(n).unwrap());
        }
    }

    #[test]
    fn stump_json_round_trip(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = Stump::random(&mut rng, 4, 3);
        let back: Stump = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
