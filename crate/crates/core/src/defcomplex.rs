//! The deformation complex of a homomorphism `φ: M → N`:
//!
//! ```text
//! C^n(φ) = C^n(A; End M) ⊕ C^n(A; End N) ⊕ C^{n-1}(A; Hom(M, N))
//! d(u, v, w) = (δu, δv, φu − vφ − δw)
//! ```
//!
//! In degree 0 two conventions are supported. `ZeroBase` (spelled `paper` on
//! the command line) sets `C^0(φ) = 0`.
//! `Augmented` uses `End(M) ⊕ End(N)` with the augmentation
//! `(ψ, θ) ↦ (δψ, δθ, φψ − θφ)`, which is the map whose image the
//! equivalence and rigidity statements quotient by. Since `φ` is
//! `A`-linear, `δ(φψ − θφ) = φδψ − (δθ)φ` and so `d ∘ augmentation = 0`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{CoeffSpace, Problem};
use crate::cohomology::{BettiCount, Cohomology};
use crate::error::{Error, Limits, Result};
use crate::hochschild::{random_combination, Cochain, HochschildComplex};
use crate::linalg::{nullspace_basis, Matrix, RankStrategy};
use crate::scalars::{FieldSpec, Scalar};

/// A cochain `(u, v, w) ∈ C^n(φ)` with `w` one degree lower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefCochain {
    degree: usize,
    pub u: Cochain,
    pub v: Cochain,
    pub w: Cochain,
}

impl DefCochain {
    pub fn new(u: Cochain, v: Cochain, w: Cochain) -> Result<Self> {
        let n = u.degree();
        if n == 0 {
            return Err(Error::Shape("deformation cochains start in degree 1".into()));
        }
        if v.degree() != n || w.degree() + 1 != n {
            return Err(Error::Shape(format!(
                "component degrees ({}, {}, {}) do not match (n, n, n-1)",
                u.degree(),
                v.degree(),
                w.degree()
            )));
        }
        if (u.coeff(), v.coeff(), w.coeff()) != (CoeffSpace::EndM, CoeffSpace::EndN, CoeffSpace::HomMN) {
            return Err(Error::Shape("components must lie in End(M), End(N), Hom(M,N)".into()));
        }
        Ok(DefCochain { degree: n, u, v, w })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn flatten(&self) -> Vec<Scalar> {
        let mut out = self.u.flatten();
        out.extend(self.v.flatten());
        out.extend(self.w.flatten());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero() && self.w.is_zero()
    }

    pub fn add(&self, other: &DefCochain) -> DefCochain {
        DefCochain {
            degree: self.degree,
            u: self.u.add(&other.u),
            v: self.v.add(&other.v),
            w: self.w.add(&other.w),
        }
    }

    pub fn sub(&self, other: &DefCochain) -> DefCochain {
        DefCochain {
            degree: self.degree,
            u: self.u.sub(&other.u),
            v: self.v.sub(&other.v),
            w: self.w.sub(&other.w),
        }
    }

    pub fn scale(&self, s: &Scalar) -> DefCochain {
        DefCochain {
            degree: self.degree,
            u: self.u.scale(s),
            v: self.v.scale(s),
            w: self.w.scale(s),
        }
    }
}

/// Degree-0 data `(ψ, θ) ∈ End(M) ⊕ End(N)` of the augmented complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedZeroCochain {
    pub psi: Matrix,
    pub theta: Matrix,
}

impl AugmentedZeroCochain {
    pub fn flatten(&self) -> Vec<Scalar> {
        self.psi.entries().iter().chain(self.theta.entries()).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Augmented,
    #[serde(rename = "paper")]
    ZeroBase,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Augmented => "augmented",
            Convention::ZeroBase => "paper",
        })
    }
}

impl FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "augmented" => Ok(Convention::Augmented),
            "paper" => Ok(Convention::ZeroBase),
            other => Err(format!("unknown complex convention {other:?} (expected augmented or paper)")),
        }
    }
}

/// The outcome of checking the three-group vanishing criterion in one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub degree: usize,
    /// `dim H^n(A; End M)`.
    pub end_m: usize,
    /// `dim H^n(A; End N)`.
    pub end_n: usize,
    /// `dim H^{n-1}(A; Hom(M, N))`.
    pub hom_prev: usize,
    pub hypotheses_hold: bool,
    /// `dim H^n(φ)`, computed only when the hypotheses hold.
    pub def_betti: Option<usize>,
}

impl VanishingReport {
    /// True unless the hypotheses hold and `H^n(φ)` still came out nonzero.
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold || self.def_betti == Some(0)
    }
}

/// `C^*(φ)` for one registered problem.
#[derive(Debug, Clone)]
pub struct DefComplex<'a> {
    problem: &'a Problem,
    end_m: HochschildComplex<'a>,
    end_n: HochschildComplex<'a>,
    hom: HochschildComplex<'a>,
    limits: Limits,
}

impl<'a> DefComplex<'a> {
    pub fn new(problem: &'a Problem, limits: Limits) -> Self {
        DefComplex {
            problem,
            end_m: HochschildComplex::new(problem, CoeffSpace::EndM, limits),
            end_n: HochschildComplex::new(problem, CoeffSpace::EndN, limits),
            hom: HochschildComplex::new(problem, CoeffSpace::HomMN, limits),
            limits,
        }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn hochschild(&self, coeff: CoeffSpace) -> &HochschildComplex<'a> {
        match coeff {
            CoeffSpace::EndM => &self.end_m,
            CoeffSpace::EndN => &self.end_n,
            CoeffSpace::HomMN => &self.hom,
        }
    }

    fn field(&self) -> FieldSpec {
        self.problem.field()
    }

    fn hom_matrix(&self) -> &Matrix {
        &self.problem.hom
    }

    /// `dim C^n(φ)` for `n ≥ 1`.
    pub fn dim(&self, n: usize) -> usize {
        assert!(n >= 1);
        self.end_m.dim(n) + self.end_n.dim(n) + self.hom.dim(n - 1)
    }

    /// `dim End(M) ⊕ End(N)`, the augmented degree-0 term.
    pub fn augmented_dim(&self) -> usize {
        self.end_m.dim(0) + self.end_n.dim(0)
    }

    pub fn zero(&self, n: usize) -> DefCochain {
        DefCochain {
            degree: n,
            u: self.end_m.zero(n),
            v: self.end_n.zero(n),
            w: self.hom.zero(n - 1),
        }
    }

    /// `φu`: each value `U` becomes `Φ·U`.
    pub fn phi_push(&self, u: &Cochain) -> Cochain {
        u.map_values(CoeffSpace::HomMN, |m| self.hom_matrix().mul(m))
    }

    /// `vφ`: each value `V` becomes `V·Φ`.
    pub fn phi_pull(&self, v: &Cochain) -> Cochain {
        v.map_values(CoeffSpace::HomMN, |m| m.mul(self.hom_matrix()))
    }

    /// `d^n(u, v, w) = (δu, δv, φu − vφ − δw)`.
    pub fn differential(&self, x: &DefCochain) -> DefCochain {
        let third = self
            .phi_push(&x.u)
            .sub(&self.phi_pull(&x.v))
            .sub(&self.hom.coboundary(&x.w));
        DefCochain {
            degree: x.degree + 1,
            u: self.end_m.coboundary(&x.u),
            v: self.end_n.coboundary(&x.v),
            w: third,
        }
    }

    /// `(ψ, θ) ↦ (δψ, δθ, φψ − θφ)`.
    pub fn augmentation(&self, z: &AugmentedZeroCochain) -> DefCochain {
        let d = self.problem.algebra.dim();
        let psi = Cochain::from_values(0, CoeffSpace::EndM, d, vec![z.psi.clone()]).expect("one value");
        let theta = Cochain::from_values(0, CoeffSpace::EndN, d, vec![z.theta.clone()]).expect("one value");
        let w = self.hom_matrix().mul(&z.psi).sub(&z.theta.mul(self.hom_matrix()));
        DefCochain {
            degree: 1,
            u: self.end_m.coboundary(&psi),
            v: self.end_n.coboundary(&theta),
            w: Cochain::from_values(0, CoeffSpace::HomMN, d, vec![w]).expect("one value"),
        }
    }

    /// Matrix of `U ↦ Φ U` on flattened `C^n(End M) → C^n(Hom)`.
    fn push_matrix(&self, n: usize) -> Matrix {
        let (np, m) = self.hom_matrix().shape();
        let count = self.problem.algebra.dim().pow(n as u32);
        let mut out = Matrix::zeros(self.field(), count * np * m, count * m * m);
        for p in 0..count {
            for r in 0..np {
                for c in 0..m {
                    for s in 0..m {
                        let phi = &self.hom_matrix()[(r, s)];
                        if !phi.is_zero() {
                            out[(p * np * m + r * m + c, p * m * m + s * m + c)] = phi.clone();
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix of `V ↦ V Φ` on flattened `C^n(End N) → C^n(Hom)`.
    fn pull_matrix(&self, n: usize) -> Matrix {
        let (np, m) = self.hom_matrix().shape();
        let count = self.problem.algebra.dim().pow(n as u32);
        let mut out = Matrix::zeros(self.field(), count * np * m, count * np * np);
        for p in 0..count {
            for r in 0..np {
                for c in 0..m {
                    for s in 0..np {
                        let phi = &self.hom_matrix()[(s, c)];
                        if !phi.is_zero() {
                            out[(p * np * m + r * m + c, p * np * np + r * np + s)] = phi.clone();
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix of `d^n: C^n(φ) → C^{n+1}(φ)` for `n ≥ 1`.
    pub fn differential_matrix(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            return Err(Error::Precondition("d^n is defined for n >= 1; use the augmentation in degree 0".into()));
        }
        self.limits.check_degree(n)?;
        let rows = self.dim(n + 1);
        let cols = self.dim(n);
        self.limits.check_matrix(format!("differential d^{n} of C*(phi)"), rows, cols)?;
        let dm = self.end_m.coboundary_matrix(n)?;
        let dn = self.end_n.coboundary_matrix(n)?;
        let dw = self.hom.coboundary_matrix(n - 1)?;
        let (mu, nv) = (dm.cols(), dn.cols());
        let third_row = dm.rows() + dn.rows();
        let mut out = Matrix::zeros(self.field(), rows, cols);
        out.set_block(0, 0, &dm);
        out.set_block(dm.rows(), mu, &dn);
        out.set_block(third_row, 0, &self.push_matrix(n));
        out.set_block(third_row, mu, &self.pull_matrix(n).neg());
        out.set_block(third_row, mu + nv, &dw.neg());
        Ok(out)
    }

    /// Matrix of the augmentation `End(M) ⊕ End(N) → C^1(φ)`.
    pub fn augmentation_matrix(&self) -> Result<Matrix> {
        let rows = self.dim(1);
        let cols = self.augmented_dim();
        self.limits.check_matrix("augmentation of C*(phi)", rows, cols)?;
        let dm = self.end_m.coboundary_matrix(0)?;
        let dn = self.end_n.coboundary_matrix(0)?;
        let mut out = Matrix::zeros(self.field(), rows, cols);
        out.set_block(0, 0, &dm);
        out.set_block(dm.rows(), dm.cols(), &dn);
        let third_row = dm.rows() + dn.rows();
        out.set_block(third_row, 0, &self.push_matrix(0));
        out.set_block(third_row, dm.cols(), &self.pull_matrix(0).neg());
        Ok(out)
    }

    /// The map into `C^n(φ)` whose image is quotiented out.
    pub fn incoming_matrix(&self, n: usize, convention: Convention) -> Result<Matrix> {
        match (n, convention) {
            (0, _) => Err(Error::Precondition("deformation cohomology starts in degree 1".into())),
            (1, Convention::ZeroBase) => Ok(Matrix::zeros(self.field(), self.dim(1), 0)),
            (1, Convention::Augmented) => self.augmentation_matrix(),
            _ => self.differential_matrix(n - 1),
        }
    }

    pub fn betti(&self, n: usize, convention: Convention, strategy: RankStrategy) -> Result<BettiCount> {
        let incoming = self.incoming_matrix(n, convention)?;
        let outgoing = self.differential_matrix(n)?;
        Ok(BettiCount::compute(n, &incoming, &outgoing, strategy))
    }

    /// `H^n(φ)` with representatives and class coordinates.
    pub fn cohomology(&self, n: usize, convention: Convention) -> Result<Cohomology> {
        let incoming = self.incoming_matrix(n, convention)?;
        let outgoing = self.differential_matrix(n)?;
        Ok(Cohomology::compute(n, &incoming, &outgoing))
    }

    pub fn unflatten(&self, n: usize, flat: &[Scalar]) -> DefCochain {
        assert_eq!(flat.len(), self.dim(n), "flattened deformation cochain has the wrong length");
        let a = self.end_m.dim(n);
        let b = a + self.end_n.dim(n);
        DefCochain {
            degree: n,
            u: self.end_m.unflatten(n, &flat[..a]),
            v: self.end_n.unflatten(n, &flat[a..b]),
            w: self.hom.unflatten(n - 1, &flat[b..]),
        }
    }

    pub fn unflatten_augmented(&self, flat: &[Scalar]) -> AugmentedZeroCochain {
        let m = self.problem.m.dim();
        let np = self.problem.n.dim();
        assert_eq!(flat.len(), m * m + np * np);
        AugmentedZeroCochain {
            psi: Matrix::from_vec(self.field(), m, m, flat[..m * m].to_vec()),
            theta: Matrix::from_vec(self.field(), np, np, flat[m * m..].to_vec()),
        }
    }

    pub fn representatives(&self, h: &Cohomology) -> Vec<DefCochain> {
        h.representatives
            .iter()
            .map(|v| self.unflatten(h.counts.degree, v))
            .collect()
    }

    /// The three-group vanishing criterion in degree `n ≥ 2`: if
    /// `H^n(A; End M)`, `H^n(A; End N)` and `H^{n-1}(A; Hom(M, N))` all
    /// vanish then so does `H^n(φ)`. The conclusion is computed, not assumed.
    pub fn vanishing_criterion(&self, n: usize) -> Result<VanishingReport> {
        if n < 2 {
            return Err(Error::Precondition("the vanishing criterion needs n >= 2".into()));
        }
        let end_m = self.end_m.betti(n, RankStrategy::Gaussian)?.betti;
        let end_n = self.end_n.betti(n, RankStrategy::Gaussian)?.betti;
        let hom_prev = self.hom.betti(n - 1, RankStrategy::Gaussian)?.betti;
        let hypotheses_hold = end_m == 0 && end_n == 0 && hom_prev == 0;
        let def_betti = if hypotheses_hold {
            Some(self.betti(n, Convention::Augmented, RankStrategy::Gaussian)?.betti)
        } else {
            None
        };
        Ok(VanishingReport {
            degree: n,
            end_m,
            end_n,
            hom_prev,
            hypotheses_hold,
            def_betti,
        })
    }

    pub fn random_cochain(&self, n: usize, seed: u64) -> DefCochain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat: Vec<Scalar> = (0..self.dim(n)).map(|_| self.field().random(&mut rng)).collect();
        self.unflatten(n, &flat)
    }

    pub fn random_augmented(&self, seed: u64) -> AugmentedZeroCochain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat: Vec<Scalar> = (0..self.augmented_dim()).map(|_| self.field().random(&mut rng)).collect();
        self.unflatten_augmented(&flat)
    }

    /// A random element of `ker d^n`, or `None` when the kernel is zero.
    pub fn random_cocycle(&self, n: usize, seed: u64) -> Result<Option<DefCochain>> {
        let basis = nullspace_basis(&self.differential_matrix(n)?);
        Ok(random_combination(self.field(), &basis, self.dim(n), seed).map(|v| self.unflatten(n, &v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, LeftModule};

    const Q: FieldSpec = FieldSpec::Rationals;

    fn dual_numbers() -> Algebra {
        Algebra::from_i64(Q, &[vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]], &[1, 0]).unwrap()
    }

    fn projection_problem() -> Problem {
        let a = dual_numbers();
        let reg = LeftModule::regular(&a);
        let triv = LeftModule::new(&a, 1, vec![Matrix::identity(Q, 1), Matrix::zeros(Q, 1, 1)]).unwrap();
        Problem::new(a, reg, triv, Matrix::from_i64(Q, &[&[1, 0]])).unwrap()
    }

    fn c2_identity() -> Problem {
        let a = Algebra::from_i64(Q, &[vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]], &[1, 0]).unwrap();
        let reg = LeftModule::regular(&a);
        Problem::new(a, reg.clone(), reg, Matrix::identity(Q, 2)).unwrap()
    }

    #[test]
    fn push_and_pull() {
        let p = projection_problem();
        let dc = DefComplex::new(&p, Limits::default());
        let u = dc.hochschild(CoeffSpace::EndM).random_cochain(1, 1);
        let u2 = dc.hochschild(CoeffSpace::EndM).random_cochain(1, 2);
        assert!(dc.phi_push(&dc.hochschild(CoeffSpace::EndM).zero(2)).is_zero());
        assert_eq!(dc.phi_push(&u.add(&u2)), dc.phi_push(&u).add(&dc.phi_push(&u2)));
        let v = dc.hochschild(CoeffSpace::EndN).random_cochain(1, 3);
        let v2 = dc.hochschild(CoeffSpace::EndN).random_cochain(1, 4);
        assert_eq!(dc.phi_pull(&v.add(&v2)), dc.phi_pull(&v).add(&dc.phi_pull(&v2)));

        let id = c2_identity();
        let dc = DefComplex::new(&id, Limits::default());
        let u = dc.hochschild(CoeffSpace::EndM).random_cochain(2, 5);
        assert_eq!(dc.phi_push(&u).values(), u.values());
    }

    #[test]
    fn zero_hom_pulls_to_zero() {
        let a = dual_numbers();
        let reg = LeftModule::regular(&a);
        let p = Problem::new(a, reg.clone(), reg, Matrix::zeros(Q, 2, 2)).unwrap();
        let dc = DefComplex::new(&p, Limits::default());
        let v = dc.hochschild(CoeffSpace::EndN).random_cochain(1, 3);
        assert!(dc.phi_pull(&v).is_zero());
    }

    #[test]
    fn differential_squares_to_zero() {
        for p in [projection_problem(), c2_identity()] {
            let dc = DefComplex::new(&p, Limits::default());
            for n in 1..4 {
                for seed in 0..10 {
                    let x = dc.random_cochain(n, seed);
                    let dx = dc.differential(&x);
                    assert_eq!(dc.differential_matrix(n).unwrap().mul_vec(&x.flatten()), dx.flatten());
                    assert!(dc.differential(&dx).is_zero());
                }
            }
            assert!(dc.differential(&dc.zero(2)).is_zero());
        }
    }

    #[test]
    fn cocycle_in_third_slot() {
        let p = projection_problem();
        let dc = DefComplex::new(&p, Limits::default());
        let w = dc.hochschild(CoeffSpace::HomMN).random_cocycle(1, 8).unwrap().unwrap();
        let x = DefCochain::new(dc.hochschild(CoeffSpace::EndM).zero(2), dc.hochschild(CoeffSpace::EndN).zero(2), w).unwrap();
        assert!(dc.differential(&x).is_zero());
    }

    #[test]
    fn augmentation_is_a_chain_map() {
        let p = projection_problem();
        let dc = DefComplex::new(&p, Limits::default());
        let identity = AugmentedZeroCochain {
            psi: Matrix::identity(Q, 2),
            theta: Matrix::identity(Q, 1),
        };
        assert!(dc.augmentation(&identity).is_zero());
        for seed in 0..20 {
            let z = dc.random_augmented(seed);
            let az = dc.augmentation(&z);
            assert_eq!(dc.augmentation_matrix().unwrap().mul_vec(&z.flatten()), az.flatten());
            assert!(dc.differential(&az).is_zero());
        }
    }

    #[test]
    fn construction_checks_degrees() {
        let p = projection_problem();
        let dc = DefComplex::new(&p, Limits::default());
        let u = dc.hochschild(CoeffSpace::EndM).zero(2);
        let v = dc.hochschild(CoeffSpace::EndN).zero(2);
        assert!(DefCochain::new(u.clone(), v.clone(), dc.hochschild(CoeffSpace::HomMN).zero(2)).is_err());
        assert!(DefCochain::new(u, v, dc.hochschild(CoeffSpace::HomMN).zero(1)).is_ok());
        assert!(dc.differential_matrix(0).is_err());
    }

    #[test]
    fn semisimple_identity_has_no_first_order_deformations() {
        let p = c2_identity();
        let dc = DefComplex::new(&p, Limits::default());
        assert_eq!(dc.cohomology(1, Convention::Augmented).unwrap().betti(), 0);
        let zero_base = dc.betti(1, Convention::ZeroBase, RankStrategy::Gaussian).unwrap().betti;
        assert!(zero_base > 0);
        let report = dc.vanishing_criterion(2).unwrap();
        assert!(report.hypotheses_hold);
        assert_eq!(report.def_betti, Some(0));
    }

    #[test]
    fn zero_modules_give_a_zero_complex() {
        let a = dual_numbers();
        let z = LeftModule::zero(&a);
        let p = Problem::new(a, z.clone(), z, Matrix::zeros(Q, 0, 0)).unwrap();
        let dc = DefComplex::new(&p, Limits::default());
        for n in 1..4 {
            for conv in [Convention::Augmented, Convention::ZeroBase] {
                assert_eq!(dc.betti(n, conv, RankStrategy::Gaussian).unwrap().betti, 0);
            }
        }
    }
}
