//! Truncated formal deformations `(ξ_t, η_t, φ_t)` of a homomorphism
//! `φ: M → N`, their obstructions, and order-by-order extension.
//!
//! A deformation of order `n` stores coefficients `0..=n`. `ξ_i` and `η_i`
//! are 1-cochains with values in `End(M)` and `End(N)`, `φ_i` is an
//! `n′ × m` matrix, and coefficient 0 is the undeformed structure.

mod equivalence;
mod series;

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::algebra::{CoeffSpace, Problem};
use crate::cohomology::Cohomology;
use crate::defcomplex::{Convention, DefCochain, DefComplex};
use crate::error::{Error, Limits, Result};
use crate::hochschild::Cochain;
use crate::linalg::{Matrix, Solver};
use crate::scalars::Scalar;

pub use equivalence::{IsoReport, IsoViolation, ProbeOutcome, RigidityReport, RigidityVerdict};
pub use series::{series_inverse, series_product, FormalIsomorphism};

/// Which defining relation an equation index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `Ξ_l(ab) = Σ Ξ_i(a)Ξ_j(b)`
    Xi,
    /// `H_l(ab) = Σ H_i(a)H_j(b)`
    Eta,
    /// `Σ Φ_iΞ_j(a) = Σ H_i(a)Φ_j`
    Phi,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Xi => "xi",
            Relation::Eta => "eta",
            Relation::Phi => "phi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EquationViolation {
    pub relation: Relation,
    pub l: usize,
    pub a: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
}

impl fmt::Display for EquationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.b {
            Some(b) => write!(f, "{} relation fails at t^{} for (e{}, e{})", self.relation, self.l, self.a, b),
            None => write!(f, "{} relation fails at t^{} for e{}", self.relation, self.l, self.a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub order: usize,
    /// Components whose degree-0 coefficient is not the undeformed structure.
    pub base_mismatches: Vec<Relation>,
    pub violations: Vec<EquationViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.base_mismatches.is_empty() && self.violations.is_empty()
    }

    fn summary(&self) -> String {
        let mut parts: Vec<String> = self
            .base_mismatches
            .iter()
            .map(|r| format!("{r}[0] differs from the undeformed structure"))
            .collect();
        if let Some(v) = self.violations.first() {
            parts.push(format!("{} equation violation(s), first: {v}", self.violations.len()));
        }
        parts.join("; ")
    }

    fn into_result(self, what: &str) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidDeformation {
                what: what.into(),
                summary: self.summary(),
            })
        }
    }
}

/// A formal deformation truncated at `t^{order}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedDeformation {
    xi: Vec<Cochain>,
    eta: Vec<Cochain>,
    phi: Vec<Matrix>,
}

/// The structure map of a module as a 1-cochain `e_a ↦ ρ(e_a)`.
fn structure_cochain(problem: &Problem, coeff: CoeffSpace) -> Cochain {
    let module = match coeff {
        CoeffSpace::EndM => &problem.m,
        CoeffSpace::EndN => &problem.n,
        CoeffSpace::HomMN => unreachable!("Hom(M, N) has no structure map"),
    };
    Cochain::from_values(1, coeff, problem.algebra.dim(), module.actions().to_vec()).expect("one action per basis element")
}

fn hom_cochain(problem: &Problem, w: &Matrix) -> Cochain {
    Cochain::from_values(0, CoeffSpace::HomMN, problem.algebra.dim(), vec![w.clone()]).expect("one value")
}

impl TruncatedDeformation {
    /// The undeformed triple, with zero higher coefficients.
    pub fn trivial(problem: &Problem, order: usize) -> Self {
        let f = problem.field();
        let d = problem.algebra.dim();
        let (m, n) = (problem.m.dim(), problem.n.dim());
        let mut xi = vec![Cochain::zero(f, d, 1, CoeffSpace::EndM, (m, m)); order + 1];
        let mut eta = vec![Cochain::zero(f, d, 1, CoeffSpace::EndN, (n, n)); order + 1];
        let mut phi = vec![Matrix::zeros(f, n, m); order + 1];
        xi[0] = structure_cochain(problem, CoeffSpace::EndM);
        eta[0] = structure_cochain(problem, CoeffSpace::EndN);
        phi[0] = problem.hom.clone();
        TruncatedDeformation { xi, eta, phi }
    }

    /// The order-1 deformation with first-order term `x ∈ C¹(φ)`.
    pub fn from_infinitesimal(problem: &Problem, x: &DefCochain) -> Result<Self> {
        Self::trivial(problem, 0).extended(problem, x)
    }

    /// Checks lengths and shapes. Base coefficients are not compared here;
    /// [`Deformer::validate`] reports mismatches.
    pub fn from_parts(problem: &Problem, xi: Vec<Cochain>, eta: Vec<Cochain>, phi: Vec<Matrix>) -> Result<Self> {
        if xi.is_empty() || xi.len() != eta.len() || xi.len() != phi.len() {
            return Err(Error::Shape(format!(
                "xi, eta, phi must have the same nonzero length (got {}, {}, {})",
                xi.len(),
                eta.len(),
                phi.len()
            )));
        }
        let d = problem.algebra.dim();
        let (m, n) = (problem.m.dim(), problem.n.dim());
        for (name, series, coeff, shape) in [("xi", &xi, CoeffSpace::EndM, (m, m)), ("eta", &eta, CoeffSpace::EndN, (n, n))] {
            for (i, c) in series.iter().enumerate() {
                if c.degree() != 1 || c.coeff() != coeff || c.algebra_dim() != d || c.shape() != shape || c.field() != problem.field() {
                    return Err(Error::Shape(format!(
                        "{name}[{i}] must be a 1-cochain with {shape:?} values in {coeff}"
                    )));
                }
            }
        }
        for (i, p) in phi.iter().enumerate() {
            if p.shape() != (n, m) || p.field() != problem.field() {
                return Err(Error::Shape(format!("phi[{i}] must be {n}x{m}, got {:?}", p.shape())));
            }
        }
        Ok(TruncatedDeformation { xi, eta, phi })
    }

    pub fn order(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn xi(&self) -> &[Cochain] {
        &self.xi
    }

    pub fn eta(&self) -> &[Cochain] {
        &self.eta
    }

    pub fn phi(&self) -> &[Matrix] {
        &self.phi
    }

    /// Coefficient triple `(ξ_i, η_i, φ_i)` as an element of `C¹(φ)`.
    pub fn coefficient(&self, problem: &Problem, i: usize) -> DefCochain {
        DefCochain::new(self.xi[i].clone(), self.eta[i].clone(), hom_cochain(problem, &self.phi[i]))
            .expect("coefficients have matching degrees")
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        TruncatedDeformation {
            xi: self.xi[..=order].to_vec(),
            eta: self.eta[..=order].to_vec(),
            phi: self.phi[..=order].to_vec(),
        }
    }

    /// Appends `x` as the next coefficient triple.
    pub fn extended(&self, problem: &Problem, x: &DefCochain) -> Result<Self> {
        if x.degree() != 1 {
            return Err(Error::Shape("a deformation coefficient must lie in C^1(phi)".into()));
        }
        let mut xi = self.xi.clone();
        let mut eta = self.eta.clone();
        let mut phi = self.phi.clone();
        xi.push(x.u.clone());
        eta.push(x.v.clone());
        phi.push(x.w.values()[0].clone());
        Self::from_parts(problem, xi, eta, phi)
    }
}

/// The least nonzero coefficient triple of a deformation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infinitesimal {
    pub n: usize,
    pub cochain: DefCochain,
    pub is_cocycle: bool,
}

/// `Ob_{n+1} ∈ C²(φ)` for a deformation of order `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    /// The order of the deformation being extended.
    pub order: usize,
    pub cochain: DefCochain,
    pub is_cocycle: bool,
    /// Coordinates of the class in the computed `H²(φ)` basis; `None` when
    /// the cochain is not a cocycle.
    pub class_coords: Option<Vec<Scalar>>,
}

impl Obstruction {
    pub fn class_vanishes(&self) -> bool {
        self.class_coords.as_ref().is_some_and(|c| c.iter().all(Scalar::is_zero))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendOutcome {
    Extended(TruncatedDeformation),
    Obstructed(Obstruction),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub deformation: TruncatedDeformation,
    pub reached: usize,
    pub witness: Option<Obstruction>,
}

/// Deformation computations for one problem, caching the linear maps that
/// repeated extension and classification need.
#[derive(Debug)]
pub struct Deformer<'a> {
    problem: &'a Problem,
    complex: DefComplex<'a>,
    d1: OnceLock<Solver>,
    augmentation: OnceLock<Solver>,
    h1: OnceLock<Cohomology>,
    h2: OnceLock<Cohomology>,
}

fn cached<'s, T>(cell: &'s OnceLock<T>, make: impl FnOnce() -> Result<T>) -> Result<&'s T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = make()?;
    Ok(cell.get_or_init(|| v))
}

impl<'a> Deformer<'a> {
    pub fn new(problem: &'a Problem, limits: Limits) -> Self {
        Deformer {
            problem,
            complex: DefComplex::new(problem, limits),
            d1: OnceLock::new(),
            augmentation: OnceLock::new(),
            h1: OnceLock::new(),
            h2: OnceLock::new(),
        }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn complex(&self) -> &DefComplex<'a> {
        &self.complex
    }

    pub(crate) fn d1_solver(&self) -> Result<&Solver> {
        cached(&self.d1, || Ok(Solver::new(&self.complex.differential_matrix(1)?)))
    }

    pub(crate) fn augmentation_solver(&self) -> Result<&Solver> {
        cached(&self.augmentation, || Ok(Solver::new(&self.complex.augmentation_matrix()?)))
    }

    /// Augmented `H¹(φ)`.
    pub fn h1(&self) -> Result<&Cohomology> {
        cached(&self.h1, || self.complex.cohomology(1, Convention::Augmented))
    }

    pub fn h2(&self) -> Result<&Cohomology> {
        cached(&self.h2, || self.complex.cohomology(2, Convention::Augmented))
    }

    /// Checks the three defining relations coefficientwise up to the order.
    pub fn validate(&self, d: &TruncatedDeformation) -> ValidationReport {
        let p = self.problem;
        let mut base_mismatches = Vec::new();
        if d.xi[0] != structure_cochain(p, CoeffSpace::EndM) {
            base_mismatches.push(Relation::Xi);
        }
        if d.eta[0] != structure_cochain(p, CoeffSpace::EndN) {
            base_mismatches.push(Relation::Eta);
        }
        if d.phi[0] != p.hom {
            base_mismatches.push(Relation::Phi);
        }

        let dim = p.algebra.dim();
        let mut violations = Vec::new();
        for l in 0..=d.order() {
            for (relation, series) in [(Relation::Xi, &d.xi), (Relation::Eta, &d.eta)] {
                for a in 0..dim {
                    for b in 0..dim {
                        let lhs = series[l].evaluate(&[p.algebra.product_of_basis(a, b).to_vec()]);
                        let mut rhs = Matrix::zeros(p.field(), lhs.rows(), lhs.cols());
                        for i in 0..=l {
                            rhs = rhs.add(&series[i].value(&[a]).mul(series[l - i].value(&[b])));
                        }
                        if lhs != rhs {
                            violations.push(EquationViolation { relation, l, a, b: Some(b) });
                        }
                    }
                }
            }
            for a in 0..dim {
                let mut lhs = Matrix::zeros(p.field(), p.n.dim(), p.m.dim());
                let mut rhs = lhs.clone();
                for i in 0..=l {
                    lhs = lhs.add(&d.phi[i].mul(d.xi[l - i].value(&[a])));
                    rhs = rhs.add(&d.eta[i].value(&[a]).mul(&d.phi[l - i]));
                }
                if lhs != rhs {
                    violations.push(EquationViolation { relation: Relation::Phi, l, a, b: None });
                }
            }
        }
        violations.sort();
        ValidationReport {
            order: d.order(),
            base_mismatches,
            violations,
        }
    }

    pub fn require_valid(&self, d: &TruncatedDeformation, what: &str) -> Result<()> {
        self.validate(d).into_result(what)
    }

    /// The least `n ≥ 1` with a nonzero coefficient triple, or `None` if the
    /// deformation is trivial to its order.
    pub fn infinitesimal(&self, d: &TruncatedDeformation) -> Option<Infinitesimal> {
        (1..=d.order()).find_map(|n| {
            let cochain = d.coefficient(self.problem, n);
            if cochain.is_zero() {
                return None;
            }
            let is_cocycle = self.complex.differential(&cochain).is_zero();
            Some(Infinitesimal { n, cochain, is_cocycle })
        })
    }

    /// `Ob_{n+1}` for a valid deformation of order `n`.
    pub fn obstruction(&self, d: &TruncatedDeformation) -> Result<Obstruction> {
        self.require_valid(d, "input")?;
        let p = self.problem;
        let f = p.field();
        let dim = p.algebra.dim();
        let n = d.order();
        let (m, np) = (p.m.dim(), p.n.dim());
        let top = n + 1;

        let mut o1 = Cochain::zero(f, dim, 2, CoeffSpace::EndM, (m, m));
        let mut o2 = Cochain::zero(f, dim, 2, CoeffSpace::EndN, (np, np));
        let mut o3 = Cochain::zero(f, dim, 1, CoeffSpace::HomMN, (np, m));
        for a in 0..dim {
            for b in 0..dim {
                for i in 1..=n {
                    let j = top - i;
                    let x = d.xi[i].value(&[a]).mul(d.xi[j].value(&[b]));
                    let y = d.eta[i].value(&[a]).mul(d.eta[j].value(&[b]));
                    *o1.value_mut(&[a, b]) = o1.value(&[a, b]).sub(&x);
                    *o2.value_mut(&[a, b]) = o2.value(&[a, b]).sub(&y);
                }
            }
            for i in 1..=n {
                let j = top - i;
                let term = d.eta[i].value(&[a]).mul(&d.phi[j]).sub(&d.phi[i].mul(d.xi[j].value(&[a])));
                *o3.value_mut(&[a]) = o3.value(&[a]).add(&term);
            }
        }
        let cochain = DefCochain::new(o1, o2, o3)?;
        let is_cocycle = self.complex.differential(&cochain).is_zero();
        let class_coords = if is_cocycle {
            self.h2()?.class_coords(&cochain.flatten())
        } else {
            None
        };
        Ok(Obstruction {
            order: n,
            cochain,
            is_cocycle,
            class_coords,
        })
    }

    /// Solves `d¹x = Ob_{n+1}` and appends `x`, or returns the obstruction.
    pub fn extend_one_order(&self, d: &TruncatedDeformation) -> Result<ExtendOutcome> {
        let ob = self.obstruction(d)?;
        if !ob.is_cocycle {
            return Err(Error::Internal(format!(
                "obstruction of a valid order-{} deformation is not a cocycle",
                d.order()
            )));
        }
        let solver = self.d1_solver()?;
        match solver.solve(&ob.cochain.flatten()) {
            Some(x) => {
                let x = self.complex.unflatten(1, &x);
                let next = d.extended(self.problem, &x)?;
                if !self.validate(&next).is_valid() {
                    return Err(Error::Internal(format!(
                        "extension to order {} solved d1 x = Ob but fails validation",
                        next.order()
                    )));
                }
                if ob.class_vanishes() {
                    Ok(ExtendOutcome::Extended(next))
                } else {
                    Err(Error::Internal("obstruction is a coboundary but its class is nonzero".into()))
                }
            }
            None => {
                if ob.class_vanishes() {
                    Err(Error::Internal("obstruction class vanishes but d1 x = Ob has no solution".into()))
                } else {
                    Ok(ExtendOutcome::Obstructed(ob))
                }
            }
        }
    }

    /// Extends until `target` or the first nonvanishing obstruction class.
    pub fn extend_to_order(&self, d: &TruncatedDeformation, target: usize) -> Result<Extension> {
        self.require_valid(d, "input")?;
        let mut current = d.clone();
        while current.order() < target {
            match self.extend_one_order(&current)? {
                ExtendOutcome::Extended(next) => current = next,
                ExtendOutcome::Obstructed(ob) => {
                    return Ok(Extension {
                        reached: current.order(),
                        deformation: current,
                        witness: Some(ob),
                    })
                }
            }
        }
        Ok(Extension {
            reached: current.order(),
            deformation: current,
            witness: None,
        })
    }

    /// An order-1 deformation whose first-order term is a random 1-cocycle,
    /// or `None` if `Z¹(φ) = 0`.
    pub fn random_order_one(&self, seed: u64) -> Result<Option<TruncatedDeformation>> {
        match self.complex.random_cocycle(1, seed)? {
            Some(z) => Ok(Some(TruncatedDeformation::from_infinitesimal(self.problem, &z)?)),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests;
