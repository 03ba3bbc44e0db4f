use proptest::prelude::*;
use strato_moyal::chaos::chaos_eval_spectral;
use strato_moyal::equivalence::{apply_t, AlphaFamily, DiagonalOperatorA};
use strato_moyal::fock::{deserialize_fock, serialize_fock};
use strato_moyal::poisson::{moyal_star, poisson_bracket, star_series, SymplecticForm};
use strato_moyal::scalar::ratio;
use strato_moyal::{FockVector, HbarSeries, ModeIndex, ModeMap, MultiIndex, Rational};

fn mode() -> impl Strategy<Value = ModeIndex> {
    (1u16..=2, -2i32..=2, any::<bool>()).prop_map(|(c, k, dual)| {
        let m = ModeIndex::primal(c, k);
        if dual {
            m.twin()
        } else {
            m
        }
    })
}

fn coefficient() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| ratio(n, d))
}

fn fock(max_degree: usize, max_terms: usize) -> impl Strategy<Value = FockVector> {
    prop::collection::vec((prop::collection::vec(mode(), 0..=max_degree), coefficient()), 0..=max_terms)
        .prop_map(|terms| FockVector::from_terms(terms.into_iter().map(|(ms, c)| (MultiIndex::from_modes(ms), c))))
}

fn xi() -> impl Strategy<Value = ModeMap<f64>> {
    prop::collection::vec(-2.0f64..2.0, 20).prop_map(|vals| {
        let mut out = ModeMap::new();
        let mut it = vals.into_iter();
        for c in 1..=2 {
            for k in -2..=2 {
                let m = ModeIndex::primal(c, k);
                out.insert(m, it.next().unwrap());
                out.insert(m.twin(), it.next().unwrap());
            }
        }
        out
    })
}

fn forms() -> [SymplecticForm; 2] {
    [SymplecticForm::new(2, ratio(3, 2)).unwrap(), SymplecticForm::doubled(2).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wick_is_commutative_associative_unital(f in fock(3, 4), g in fock(3, 4), h in fock(2, 3)) {
        prop_assert_eq!(f.wick_product(&g), g.wick_product(&f));
        prop_assert_eq!(f.wick_product(&g).wick_product(&h), f.wick_product(&g.wick_product(&h)));
        prop_assert_eq!(FockVector::vacuum().wick_product(&f), f.clone());
        prop_assert!(f.wick_product(&g).degree() <= f.degree() + g.degree());
    }

    #[test]
    fn annihilation_is_a_derivation(f in fock(3, 4), g in fock(3, 4), m in mode()) {
        let lhs = f.wick_product(&g).annihilate(m);
        let rhs = &f.annihilate(m).wick_product(&g) + &f.wick_product(&g.annihilate(m));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn annihilations_commute(f in fock(4, 5), m in mode(), n in mode()) {
        prop_assert_eq!(f.annihilate(m).annihilate(n), f.annihilate(n).annihilate(m));
    }

    #[test]
    fn evaluation_is_multiplicative(f in fock(3, 4), g in fock(3, 4), x in xi()) {
        let lhs = chaos_eval_spectral(&f.wick_product(&g), &x);
        let rhs = chaos_eval_spectral(&f, &x) * chaos_eval_spectral(&g, &x);
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale);
    }

    #[test]
    fn text_round_trip(f in fock(5, 6)) {
        let text = serialize_fock(&f);
        prop_assert_eq!(deserialize_fock(&text).unwrap(), f);
    }

    #[test]
    fn series_ring_is_associative(a in fock(2, 3), b in fock(2, 3), c in fock(2, 3), d in fock(2, 2)) {
        let s = HbarSeries::from_coeffs(vec![a.clone(), b.clone()]);
        let t = HbarSeries::from_coeffs(vec![c.clone(), d.clone()]);
        let u = HbarSeries::from_coeffs(vec![d, a]);
        let left = s.wick_mul(&t).unwrap().wick_mul(&u).unwrap();
        let right = s.wick_mul(&t.wick_mul(&u).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn bracket_is_poisson(f in fock(3, 3), g in fock(3, 3), h in fock(2, 3)) {
        for form in forms() {
            let b = |x: &FockVector, y: &FockVector| poisson_bracket(x, y, &form);
            prop_assert!((&b(&f, &g) + &b(&g, &f)).is_zero());
            let leibniz = &b(&f, &g.wick_product(&h)) - &(&b(&f, &g).wick_product(&h) + &g.wick_product(&b(&f, &h)));
            prop_assert!(leibniz.is_zero());
            let jacobi = &(&b(&f, &b(&g, &h)) + &b(&g, &b(&h, &f))) + &b(&h, &b(&f, &g));
            prop_assert!(jacobi.is_zero());
        }
    }

    #[test]
    fn star_is_associative(f in fock(2, 3), g in fock(2, 3), h in fock(2, 3)) {
        let form = SymplecticForm::new(2, ratio(1, 1)).unwrap();
        let order = 3;
        let left = star_series(&moyal_star(&f, &g, &form, order), &HbarSeries::concentrated(h.clone(), order), &form).unwrap();
        let right = star_series(&HbarSeries::concentrated(f, order), &moyal_star(&g, &h, &form, order), &form).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn transform_is_invertible(f in fock(4, 4), g in fock(4, 4)) {
        let a = DiagonalOperatorA::family(AlphaFamily::Ksq, 2);
        let s = HbarSeries::from_coeffs(vec![f, g, FockVector::zero()]);
        prop_assert_eq!(apply_t(&apply_t(&s, &a), &a.negated()), s);
    }
}
