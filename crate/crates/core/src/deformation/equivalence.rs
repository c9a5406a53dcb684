//! Formal isomorphisms between deformations, conjugation, classes of
//! infinitesimals, trivialization and the rigidity criterion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::series::{series_inverse, series_product, FormalIsomorphism};
use super::{Deformer, Relation, TruncatedDeformation};
use crate::algebra::CoeffSpace;
use crate::defcomplex::DefCochain;
use crate::error::{Error, Result};
use crate::hochschild::Cochain;
use crate::linalg::{Matrix, RankStrategy};
use crate::scalars::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IsoViolation {
    pub relation: Relation,
    pub l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    /// Relations were compared modulo `t^{checked_order + 1}`.
    pub checked_order: usize,
    pub violations: Vec<IsoViolation>,
}

impl IsoReport {
    pub fn is_isomorphism(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeOutcome {
    /// Every coefficient in `1..=trivial_to` was removed by conjugation.
    pub trivial_to: usize,
    /// Degree and value of an infinitesimal outside the augmentation image.
    pub witness: Option<(usize, DefCochain)>,
    pub trivialized: TruncatedDeformation,
    /// The composite isomorphism from the input to `trivialized`.
    pub iso: FormalIsomorphism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityVerdict {
    Rigid,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    /// Augmented `dim H¹(φ)`.
    pub h1: usize,
    pub verdict: RigidityVerdict,
    pub h1_end_m: usize,
    pub h1_end_n: usize,
    pub h0_hom: usize,
    /// Whether `H¹(End M) = H¹(End N) = H⁰(Hom(M, N)) = 0`.
    pub module_criterion_holds: bool,
    pub caveat: &'static str,
}

pub(crate) const HOM_CAVEAT: &str = "H^0(A; Hom(M,N)) = Hom_A(M,N) contains phi, so the module criterion can only hold when phi = 0";

/// Coefficients `Ξ_0(e_a), Ξ_1(e_a), …` of one cochain series at `e_a`.
fn at(series: &[Cochain], a: usize) -> Vec<Matrix> {
    series.iter().map(|c| c.value(&[a]).clone()).collect()
}

impl Deformer<'_> {
    fn check_iso_shape(&self, iso: &FormalIsomorphism) -> Result<()> {
        let m = self.problem.m.dim();
        let n = self.problem.n.dim();
        if iso.psi()[0].shape() != (m, m) || iso.theta()[0].shape() != (n, n) {
            return Err(Error::Shape(format!(
                "isomorphism components must be {m}x{m} and {n}x{n}"
            )));
        }
        if iso.psi()[0].field() != self.problem.field() {
            return Err(Error::Shape("isomorphism is over a different field".into()));
        }
        Ok(())
    }

    /// Checks `Ξ̃Ψ = ΨΞ`, `H̃Θ = ΘH` and `Φ̃Ψ = ΘΦ` modulo `t^{L+1}` with
    /// `L` the smaller order, where `d2` is the tilde side.
    pub fn check_formal_isomorphism(
        &self,
        d1: &TruncatedDeformation,
        d2: &TruncatedDeformation,
        iso: &FormalIsomorphism,
    ) -> Result<IsoReport> {
        self.check_iso_shape(iso)?;
        let f = self.problem.field();
        let order = d1.order().min(d2.order());
        let (psi, theta) = iso.padded(order);
        let (m, n) = (self.problem.m.dim(), self.problem.n.dim());
        let mut violations = Vec::new();
        for a in 0..self.problem.algebra.dim() {
            for (relation, s1, s2, g, k) in [
                (Relation::Xi, d1.xi(), d2.xi(), &psi, m),
                (Relation::Eta, d1.eta(), d2.eta(), &theta, n),
            ] {
                let lhs = series_product(f, &at(s2, a), g, (k, k), order);
                let rhs = series_product(f, g, &at(s1, a), (k, k), order);
                for l in 0..=order {
                    if lhs[l] != rhs[l] {
                        violations.push(IsoViolation { relation, l, a: Some(a) });
                    }
                }
            }
        }
        let lhs = series_product(f, d2.phi(), &psi, (n, m), order);
        let rhs = series_product(f, &theta, d1.phi(), (n, m), order);
        for l in 0..=order {
            if lhs[l] != rhs[l] {
                violations.push(IsoViolation { relation: Relation::Phi, l, a: None });
            }
        }
        violations.sort();
        Ok(IsoReport {
            checked_order: order,
            violations,
        })
    }

    /// `(ΨξΨ⁻¹, ΘηΘ⁻¹, ΘφΨ⁻¹)` truncated at the order of `d`.
    pub fn conjugate_deformation(&self, d: &TruncatedDeformation, iso: &FormalIsomorphism) -> Result<TruncatedDeformation> {
        self.check_iso_shape(iso)?;
        self.require_valid(d, "input")?;
        let p = self.problem;
        let f = p.field();
        let order = d.order();
        let dim = p.algebra.dim();
        let (m, n) = (p.m.dim(), p.n.dim());
        let (psi, theta) = iso.padded(order);
        let psi_inv = series_inverse(&psi)?;
        let theta_inv = series_inverse(&theta)?;

        let conj = |series: &[Cochain], g: &[Matrix], g_inv: &[Matrix], k: usize, coeff: CoeffSpace| -> Result<Vec<Cochain>> {
            let per_basis: Vec<Vec<Matrix>> = (0..dim)
                .map(|a| {
                    let left = series_product(f, g, &at(series, a), (k, k), order);
                    series_product(f, &left, g_inv, (k, k), order)
                })
                .collect();
            (0..=order)
                .map(|l| Cochain::from_values(1, coeff, dim, per_basis.iter().map(|s| s[l].clone()).collect()))
                .collect()
        };
        let xi = conj(d.xi(), &psi, &psi_inv, m, CoeffSpace::EndM)?;
        let eta = conj(d.eta(), &theta, &theta_inv, n, CoeffSpace::EndN)?;
        let left = series_product(f, &theta, d.phi(), (n, m), order);
        let phi = series_product(f, &left, &psi_inv, (n, m), order);
        let out = TruncatedDeformation::from_parts(p, xi, eta, phi)?;

        if !self.validate(&out).is_valid() {
            return Err(Error::Internal("conjugate of a valid deformation fails validation".into()));
        }
        if !self.check_formal_isomorphism(d, &out, iso)?.is_isomorphism() {
            return Err(Error::Internal("conjugate is not related to its input by the isomorphism".into()));
        }
        Ok(out)
    }

    /// Coordinates of `(ξ₁, η₁, φ₁)` in augmented `H¹(φ)`.
    pub fn infinitesimal_class(&self, d: &TruncatedDeformation) -> Result<Vec<Scalar>> {
        if d.order() == 0 {
            return Err(Error::Precondition("an order-0 deformation has no first-order term".into()));
        }
        self.require_valid(d, "input")?;
        let first = d.coefficient(self.problem, 1);
        self.h1()?
            .class_coords(&first.flatten())
            .ok_or_else(|| Error::Internal("first-order term of a valid deformation is not a cocycle".into()))
    }

    /// Repeatedly removes the least nonzero coefficient triple by an
    /// elementary isomorphism `(I + ψtⁿ, I + θtⁿ)` with
    /// `augmentation(ψ, θ)` equal to that triple. Stops at `max_order`, at
    /// the order of `d`, or at an infinitesimal that is not in the image.
    pub fn trivialize_probe(&self, d: &TruncatedDeformation, max_order: usize) -> Result<ProbeOutcome> {
        self.require_valid(d, "input")?;
        let p = self.problem;
        let order = d.order();
        let limit = max_order.min(order);
        let solver = self.augmentation_solver()?;
        let mut current = d.clone();
        let mut total = FormalIsomorphism::identity(p.field(), p.m.dim(), p.n.dim(), order);

        let (trivial_to, witness) = loop {
            let inf = match self.infinitesimal(&current) {
                Some(inf) if inf.n <= limit => inf,
                _ => break (limit, None),
            };
            let n = inf.n;
            let Some(z) = solver.solve(&inf.cochain.flatten()) else {
                break (n - 1, Some((n, inf.cochain)));
            };
            let z = self.complex.unflatten_augmented(&z);
            let step = FormalIsomorphism::elementary(&z.psi, &z.theta, n);
            current = self.conjugate_deformation(&current, &step)?;
            total = total.then(&step, order);
            if let Some(k) = (1..=n).find(|&k| !current.coefficient(p, k).is_zero()) {
                return Err(Error::Internal(format!(
                    "conjugation at t^{n} left coefficient {k} nonzero"
                )));
            }
        };

        if !self.check_formal_isomorphism(d, &current, &total)?.is_isomorphism() {
            return Err(Error::Internal("composite trivializing isomorphism does not relate input and output".into()));
        }
        Ok(ProbeOutcome {
            trivial_to,
            witness,
            trivialized: current,
            iso: total,
        })
    }

    /// A random isomorphism of the given order with identity leading terms.
    pub fn random_isomorphism(&self, order: usize, seed: u64) -> FormalIsomorphism {
        let f = self.problem.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut series = |k: usize| -> Vec<Matrix> {
            let mut s = vec![Matrix::identity(f, k)];
            s.extend((0..order).map(|_| Matrix::from_vec(f, k, k, (0..k * k).map(|_| f.random(&mut rng)).collect())));
            s
        };
        let psi = series(self.problem.m.dim());
        let theta = series(self.problem.n.dim());
        FormalIsomorphism::new(psi, theta).expect("identity leading terms")
    }

    /// `H¹(φ) = 0` is sufficient for rigidity; nothing is claimed otherwise.
    pub fn rigidity_report(&self) -> Result<RigidityReport> {
        let h1 = self.h1()?.betti();
        let betti = |coeff: CoeffSpace, n: usize| -> Result<usize> {
            Ok(self.complex.hochschild(coeff).betti(n, RankStrategy::Gaussian)?.betti)
        };
        let h1_end_m = betti(CoeffSpace::EndM, 1)?;
        let h1_end_n = betti(CoeffSpace::EndN, 1)?;
        let h0_hom = betti(CoeffSpace::HomMN, 0)?;
        let module_criterion_holds = h1_end_m == 0 && h1_end_n == 0 && h0_hom == 0;
        if module_criterion_holds && h1 != 0 {
            return Err(Error::Internal("module criterion holds but H^1(phi) is nonzero".into()));
        }
        Ok(RigidityReport {
            h1,
            verdict: if h1 == 0 { RigidityVerdict::Rigid } else { RigidityVerdict::Inconclusive },
            h1_end_m,
            h1_end_n,
            h0_hom,
            module_criterion_holds,
            caveat: HOM_CAVEAT,
        })
    }
}
