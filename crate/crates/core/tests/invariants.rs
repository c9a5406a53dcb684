use homdef::algebra::Problem;
use homdef::defcomplex::{Convention, DefComplex};
use homdef::deformation::{series_inverse, series_product, Deformer, ExtendOutcome, TruncatedDeformation};
use homdef::fixtures;
use homdef::linalg::{in_span, RankStrategy};
use homdef::Limits;
use proptest::prelude::*;

fn problem(i: usize) -> Problem {
    let valid: Vec<_> = fixtures::valid().collect();
    valid[i % valid.len()].load().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_squares_to_zero(i in 0usize..8, n in 1usize..3, seed in any::<u64>()) {
        let p = problem(i);
        let dc = DefComplex::new(&p, Limits::default());
        let x = dc.random_cochain(n, seed);
        prop_assert!(dc.differential(&dc.differential(&x)).is_zero());
        let z = dc.random_augmented(seed);
        prop_assert!(dc.differential(&dc.augmentation(&z)).is_zero());
    }

    #[test]
    fn truncation_preserves_validity(i in 0usize..8, seed in any::<u64>()) {
        let p = problem(i);
        let df = Deformer::new(&p, Limits::default());
        let d = df.random_order_one(seed).unwrap().unwrap_or_else(|| TruncatedDeformation::trivial(&p, 1));
        let ext = df.extend_to_order(&d, 3).unwrap();
        for k in 0..=ext.reached {
            prop_assert!(df.validate(&ext.deformation.truncate(k)).is_valid());
        }
    }

    #[test]
    fn obstructions_are_cocycles_and_extension_is_sound(i in 0usize..8, seed in any::<u64>()) {
        let p = problem(i);
        let df = Deformer::new(&p, Limits::default());
        let Some(d) = df.random_order_one(seed).unwrap() else { return Ok(()); };
        let ob = df.obstruction(&d).unwrap();
        prop_assert!(ob.is_cocycle);
        let spanned = in_span(&df.complex().differential_matrix(1).unwrap(), &ob.cochain.flatten());
        match df.extend_one_order(&d).unwrap() {
            ExtendOutcome::Extended(next) => prop_assert!(spanned && df.validate(&next).is_valid()),
            ExtendOutcome::Obstructed(w) => prop_assert!(!spanned && !w.class_vanishes()),
        }
    }

    #[test]
    fn conjugation_invariance(i in 0usize..8, seed in any::<u64>(), order in 1usize..4) {
        let p = problem(i);
        let df = Deformer::new(&p, Limits::default());
        let Some(d) = df.random_order_one(seed).unwrap() else { return Ok(()); };
        let iso = df.random_isomorphism(order, seed ^ 0x5eed);
        let c = df.conjugate_deformation(&d, &iso).unwrap();
        prop_assert_eq!(df.validate(&c).is_valid(), df.validate(&d).is_valid());
        prop_assert_eq!(df.infinitesimal_class(&c).unwrap(), df.infinitesimal_class(&d).unwrap());
    }

    #[test]
    fn probe_trivializes_conjugates_of_trivial(i in 0usize..8, seed in any::<u64>(), order in 1usize..4) {
        let p = problem(i);
        let df = Deformer::new(&p, Limits::default());
        let t = TruncatedDeformation::trivial(&p, order);
        let d = df.conjugate_deformation(&t, &df.random_isomorphism(order, seed)).unwrap();
        let probe = df.trivialize_probe(&d, order).unwrap();
        prop_assert_eq!(probe.trivial_to, order);
        prop_assert_eq!(probe.trivialized, t);
    }

    #[test]
    fn series_inverse_is_two_sided(i in 0usize..8, seed in any::<u64>(), order in 0usize..5) {
        let p = problem(i);
        let iso = Deformer::new(&p, Limits::default()).random_isomorphism(order, seed);
        let inv = series_inverse(iso.psi()).unwrap();
        let k = p.m.dim();
        let prod = series_product(p.field(), &inv, iso.psi(), (k, k), order);
        prop_assert!(prod[1..].iter().all(|m| m.is_zero()));
    }

    #[test]
    fn zero_base_convention_dominates(i in 0usize..8) {
        let p = problem(i);
        let dc = DefComplex::new(&p, Limits::default());
        let a = dc.betti(1, Convention::Augmented, RankStrategy::Gaussian).unwrap();
        let b = dc.betti(1, Convention::ZeroBase, RankStrategy::Gaussian).unwrap();
        prop_assert!(b.betti >= a.betti);
        prop_assert_eq!(b.betti, b.dim_kernel);
    }
}
