use super::*;
use crate::algebra::{Algebra, LeftModule};
use crate::defcomplex::AugmentedZeroCochain;
use crate::scalars::FieldSpec;

const Q: FieldSpec = FieldSpec::Rationals;

fn dual_numbers() -> Algebra {
    Algebra::from_i64(Q, &[vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]], &[1, 0]).unwrap()
}

fn trivial_module(a: &Algebra) -> LeftModule {
    LeftModule::new(a, 1, vec![Matrix::identity(Q, 1), Matrix::zeros(Q, 1, 1)]).unwrap()
}

fn projection() -> Problem {
    let a = dual_numbers();
    let (reg, triv) = (LeftModule::regular(&a), trivial_module(&a));
    Problem::new(a, reg, triv, Matrix::from_i64(Q, &[&[1, 0]])).unwrap()
}

fn trivial_identity() -> Problem {
    let a = dual_numbers();
    let triv = trivial_module(&a);
    Problem::new(a, triv.clone(), triv, Matrix::identity(Q, 1)).unwrap()
}

fn c2_identity() -> Problem {
    let a = Algebra::from_i64(Q, &[vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]], &[1, 0]).unwrap();
    let reg = LeftModule::regular(&a);
    Problem::new(a, reg.clone(), reg, Matrix::identity(Q, 2)).unwrap()
}

/// `ξ₁(x) = η₁(x) = 1`, `φ₁ = 0` on the trivial module of the dual numbers.
fn obstructed(p: &Problem) -> TruncatedDeformation {
    let one = Matrix::identity(Q, 1);
    let zero = Matrix::zeros(Q, 1, 1);
    let c = |coeff| Cochain::from_values(1, coeff, 2, vec![zero.clone(), one.clone()]).unwrap();
    let w = Cochain::from_values(0, CoeffSpace::HomMN, 2, vec![zero.clone()]).unwrap();
    let x = DefCochain::new(c(CoeffSpace::EndM), c(CoeffSpace::EndN), w).unwrap();
    TruncatedDeformation::from_infinitesimal(p, &x).unwrap()
}

#[test]
fn trivial_deformation_is_valid_and_extends_by_zero() {
    for p in [projection(), trivial_identity(), c2_identity()] {
        let df = Deformer::new(&p, Limits::default());
        for order in 0..4 {
            let t = TruncatedDeformation::trivial(&p, order);
            assert!(df.validate(&t).is_valid());
            assert_eq!(df.infinitesimal(&t), None);
            let ob = df.obstruction(&t).unwrap();
            assert!(ob.cochain.is_zero() && ob.is_cocycle && ob.class_vanishes());
        }
        let ext = df.extend_to_order(&TruncatedDeformation::trivial(&p, 0), 4).unwrap();
        assert_eq!(ext.reached, 4);
        assert!(ext.witness.is_none());
        assert_eq!(ext.deformation, TruncatedDeformation::trivial(&p, 4));
    }
}

#[test]
fn cocycles_give_valid_first_order_deformations() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    for seed in 0..10 {
        let z = df.complex().random_cocycle(1, seed).unwrap().unwrap();
        let d = TruncatedDeformation::from_infinitesimal(&p, &z).unwrap();
        assert!(df.validate(&d).is_valid());
        let inf = df.infinitesimal(&d).unwrap();
        assert_eq!((inf.n, inf.is_cocycle), (1, true));
        assert_eq!(inf.cochain, z);
    }
}

#[test]
fn non_cocycles_violate_only_first_order_relations() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let x = df.complex().random_cochain(1, 3);
    assert!(!df.complex().differential(&x).is_zero());
    let d = TruncatedDeformation::from_infinitesimal(&p, &x).unwrap();
    let report = df.validate(&d);
    assert!(report.base_mismatches.is_empty());
    assert!(!report.violations.is_empty());
    assert!(report.violations.iter().all(|v| v.l == 1));
    assert!(matches!(df.obstruction(&d), Err(Error::InvalidDeformation { .. })));
}

#[test]
fn base_mismatch_is_reported() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let t = TruncatedDeformation::trivial(&p, 1);
    let mut phi = t.phi().to_vec();
    phi[0] = Matrix::from_i64(Q, &[&[0, 1]]);
    let bad = TruncatedDeformation::from_parts(&p, t.xi().to_vec(), t.eta().to_vec(), phi).unwrap();
    assert_eq!(df.validate(&bad).base_mismatches, vec![Relation::Phi]);
}

#[test]
fn shapes_are_checked() {
    let p = projection();
    let t = TruncatedDeformation::trivial(&p, 1);
    let mut phi = t.phi().to_vec();
    phi[1] = Matrix::zeros(Q, 2, 2);
    assert!(TruncatedDeformation::from_parts(&p, t.xi().to_vec(), t.eta().to_vec(), phi).is_err());
    assert!(TruncatedDeformation::from_parts(&p, t.xi().to_vec(), t.eta()[..1].to_vec(), t.phi().to_vec()).is_err());
}

#[test]
fn validity_is_closed_under_truncation() {
    let p = c2_identity();
    let df = Deformer::new(&p, Limits::default());
    let d = df.random_order_one(4).unwrap().unwrap();
    let ext = df.extend_to_order(&d, 4).unwrap();
    assert_eq!(ext.reached, 4);
    for k in 0..=4 {
        assert!(df.validate(&ext.deformation.truncate(k)).is_valid());
    }
}

#[test]
fn obstruction_is_quadratic() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let z = df.complex().random_cocycle(1, 11).unwrap().unwrap();
    let lambda = Q.from_i64(3);
    let d = TruncatedDeformation::from_infinitesimal(&p, &z).unwrap();
    let d3 = TruncatedDeformation::from_infinitesimal(&p, &z.scale(&lambda)).unwrap();
    let ob = df.obstruction(&d).unwrap();
    let ob3 = df.obstruction(&d3).unwrap();
    assert!(ob.is_cocycle);
    assert_eq!(ob3.cochain, ob.cochain.scale(&Q.from_i64(9)));
}

#[test]
fn genuine_obstruction() {
    let p = trivial_identity();
    let df = Deformer::new(&p, Limits::default());
    let d = obstructed(&p);
    assert!(df.validate(&d).is_valid());
    let ob = df.obstruction(&d).unwrap();
    assert!(ob.is_cocycle);
    assert_eq!(ob.cochain.u.value(&[1, 1]), &Matrix::from_i64(Q, &[&[-1]]));
    assert!(!ob.class_vanishes());
    assert!(!df.d1_solver().unwrap().in_span(&ob.cochain.flatten()));
    match df.extend_one_order(&d).unwrap() {
        ExtendOutcome::Obstructed(w) => assert_eq!(w, ob),
        ExtendOutcome::Extended(_) => panic!("expected an obstruction"),
    }
    let ext = df.extend_to_order(&d, 3).unwrap();
    assert_eq!(ext.reached, 1);
    assert!(ext.witness.is_some());
}

#[test]
fn second_order_infinitesimal() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let z = df.complex().random_cocycle(1, 5).unwrap().unwrap();
    let d = TruncatedDeformation::trivial(&p, 1).extended(&p, &z).unwrap();
    assert!(df.validate(&d).is_valid());
    let inf = df.infinitesimal(&d).unwrap();
    assert_eq!(inf.n, 2);
    assert!(inf.is_cocycle);
}

#[test]
fn semisimple_fixture_extends_to_order_five() {
    let p = c2_identity();
    let df = Deformer::new(&p, Limits::default());
    assert_eq!(df.h2().unwrap().betti(), 0);
    for seed in 0..3 {
        let d = df.random_order_one(seed).unwrap().unwrap();
        let ext = df.extend_to_order(&d, 5).unwrap();
        assert_eq!(ext.reached, 5);
        assert!(df.validate(&ext.deformation).is_valid());
    }
}

#[test]
fn conjugation_by_identity_is_trivial() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let d = df.random_order_one(1).unwrap().unwrap();
    let d = df.extend_to_order(&d, 2).unwrap().deformation;
    let id = FormalIsomorphism::identity(Q, 2, 1, 2);
    assert_eq!(df.conjugate_deformation(&d, &id).unwrap(), d);
    assert!(df.check_formal_isomorphism(&d, &d, &id).unwrap().is_isomorphism());
}

#[test]
fn conjugation_shifts_the_infinitesimal_by_the_augmentation() {
    for p in [projection(), c2_identity()] {
        let df = Deformer::new(&p, Limits::default());
        for seed in 0..5 {
            let d = df.random_order_one(seed).unwrap().unwrap();
            let iso = df.random_isomorphism(2, 100 + seed);
            let c = df.conjugate_deformation(&d, &iso).unwrap();
            let z = AugmentedZeroCochain {
                psi: iso.psi()[1].clone(),
                theta: iso.theta()[1].clone(),
            };
            let shifted = d.coefficient(&p, 1).sub(&df.complex().augmentation(&z));
            assert_eq!(c.coefficient(&p, 1), shifted);
            assert_eq!(df.infinitesimal_class(&c).unwrap(), df.infinitesimal_class(&d).unwrap());
        }
    }
}

#[test]
fn unrelated_deformations_fail_the_isomorphism_check() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let d1 = df.random_order_one(1).unwrap().unwrap();
    let d2 = df.random_order_one(2).unwrap().unwrap();
    assert_ne!(d1.coefficient(&p, 1), d2.coefficient(&p, 1));
    let report = df.check_formal_isomorphism(&d1, &d2, &FormalIsomorphism::identity(Q, 2, 1, 1)).unwrap();
    assert!(!report.is_isomorphism());
    assert!(report.violations.iter().all(|v| v.l == 1));
}

#[test]
fn augmentation_image_has_zero_class() {
    let p = projection();
    let df = Deformer::new(&p, Limits::default());
    let z = df.complex().augmentation(&df.complex().random_augmented(3));
    let d = TruncatedDeformation::from_infinitesimal(&p, &z).unwrap();
    assert!(df.infinitesimal_class(&d).unwrap().iter().all(Scalar::is_zero));
    let t = TruncatedDeformation::trivial(&p, 2);
    assert!(df.infinitesimal_class(&t).unwrap().iter().all(Scalar::is_zero));
}

#[test]
fn probe_trivializes_conjugates_of_the_trivial_deformation() {
    for p in [projection(), c2_identity(), trivial_identity()] {
        let df = Deformer::new(&p, Limits::default());
        for seed in 0..4 {
            let t = TruncatedDeformation::trivial(&p, 3);
            let iso = df.random_isomorphism(3, seed);
            let d = df.conjugate_deformation(&t, &iso).unwrap();
            let probe = df.trivialize_probe(&d, 3).unwrap();
            assert_eq!(probe.trivial_to, 3);
            assert!(probe.witness.is_none());
            assert_eq!(probe.trivialized, t);
        }
    }
}

#[test]
fn probe_reports_a_first_order_witness() {
    let p = trivial_identity();
    let df = Deformer::new(&p, Limits::default());
    let d = obstructed(&p);
    let probe = df.trivialize_probe(&d, 3).unwrap();
    assert_eq!(probe.trivial_to, 0);
    let (n, w) = probe.witness.unwrap();
    assert_eq!(n, 1);
    assert_eq!(w, d.coefficient(&p, 1));
    let t = TruncatedDeformation::trivial(&p, 2);
    let probe = df.trivialize_probe(&t, 5).unwrap();
    assert_eq!((probe.trivial_to, probe.witness), (2, None));
}

#[test]
fn rigidity() {
    let p = c2_identity();
    let r = Deformer::new(&p, Limits::default()).rigidity_report().unwrap();
    assert_eq!(r.verdict, RigidityVerdict::Rigid);
    assert!(!r.module_criterion_holds);

    let p = trivial_identity();
    let r = Deformer::new(&p, Limits::default()).rigidity_report().unwrap();
    assert_eq!(r.verdict, RigidityVerdict::Inconclusive);

    let a = dual_numbers();
    let z = LeftModule::zero(&a);
    let p = Problem::new(a, z.clone(), z, Matrix::zeros(Q, 0, 0)).unwrap();
    let r = Deformer::new(&p, Limits::default()).rigidity_report().unwrap();
    assert_eq!((r.h1, r.verdict, r.module_criterion_holds), (0, RigidityVerdict::Rigid, true));
}
