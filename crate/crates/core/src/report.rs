//! Machine-readable reports for the CLI and their plain-text rendering.
//!
//! Field order is fixed by the struct definitions, so identical inputs give
//! byte-identical JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::Violation;
use crate::cohomology::BettiCount;
use crate::defcomplex::{Convention, DefCochain};
use crate::deformation::{IsoViolation, Obstruction, RigidityReport, RigidityVerdict, ValidationReport};
use crate::fixtures::Fixture;
use crate::io::{cochain_rows, DeformationFile, IsoFile};
use crate::scalars::{format_scalar, Scalar};

pub trait Render {
    fn render(&self, out: &mut String);
}

#[derive(Debug, Serialize)]
pub struct Report<T> {
    pub command: &'static str,
    pub problem: String,
    pub status: &'static str,
    pub result: T,
}

impl<T: Serialize + Render> Report<T> {
    pub fn to_json(&self) -> String {
        crate::io::to_canonical_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}: {}\n", self.command, self.problem, self.status);
        self.result.render(&mut out);
        out
    }
}

pub fn scalars(v: &[Scalar]) -> Vec<String> {
    v.iter().map(format_scalar).collect()
}

fn list(v: &[String]) -> String {
    format!("[{}]", v.join(", "))
}

#[derive(Debug, Serialize)]
pub struct CochainJson {
    pub u: Vec<Vec<Vec<String>>>,
    pub v: Vec<Vec<Vec<String>>>,
    pub w: Vec<Vec<Vec<String>>>,
}

impl From<&DefCochain> for CochainJson {
    fn from(c: &DefCochain) -> Self {
        CochainJson {
            u: cochain_rows(&c.u),
            v: cochain_rows(&c.v),
            w: cochain_rows(&c.w),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl Render for ErrorBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "error ({}): {}", self.kind, self.message);
        for v in &self.violations {
            let _ = writeln!(out, "  {v}");
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckBody {
    pub field: String,
    pub algebra_dim: usize,
    pub m_dim: usize,
    pub n_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deformation: Option<ValidationReport>,
}

impl Render for CheckBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "field {}, dim A = {}, dim M = {}, dim N = {}: algebra, modules and hom are valid",
            self.field, self.algebra_dim, self.m_dim, self.n_dim
        );
        if let Some(r) = &self.deformation {
            if r.is_valid() {
                let _ = writeln!(out, "deformation of order {} is valid", r.order);
            } else {
                let _ = writeln!(out, "deformation of order {} is not valid:", r.order);
                for b in &r.base_mismatches {
                    let _ = writeln!(out, "  {b}[0] differs from the undeformed structure");
                }
                for v in &r.violations {
                    let _ = writeln!(out, "  {v}");
                }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct HochschildRow {
    pub coefficients: &'static str,
    pub betti: Vec<BettiCount>,
}

#[derive(Debug, Serialize)]
pub struct CohomologyBody {
    pub max_degree: usize,
    pub complex: Convention,
    pub hochschild: Vec<HochschildRow>,
    pub deformation: Vec<BettiCount>,
}

impl Render for CohomologyBody {
    fn render(&self, out: &mut String) {
        let _ = write!(out, "{:<18}", "degree");
        for n in 0..=self.max_degree {
            let _ = write!(out, "{n:>6}");
        }
        out.push('\n');
        for row in &self.hochschild {
            let _ = write!(out, "{:<18}", format!("H({})", row.coefficients));
            for b in &row.betti {
                let _ = write!(out, "{:>6}", b.betti);
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<18}", format!("H(phi) {}", self.complex));
        let _ = write!(out, "{:>6}", "-");
        for b in &self.deformation {
            let _ = write!(out, "{:>6}", b.betti);
        }
        out.push('\n');
    }
}

#[derive(Debug, Serialize)]
pub struct InfinitesimalBody {
    pub order: usize,
    pub trivial_to_order: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_cocycle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cochain: Option<CochainJson>,
    /// Coordinates in augmented `H¹(φ)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_coords: Option<Vec<String>>,
}

impl Render for InfinitesimalBody {
    fn render(&self, out: &mut String) {
        match self.n {
            None => {
                let _ = writeln!(out, "deformation is trivial to its order {}", self.order);
            }
            Some(n) => {
                let _ = writeln!(
                    out,
                    "{n}-infinitesimal found (order {}), cocycle: {}",
                    self.order,
                    self.is_cocycle.unwrap_or(false)
                );
                if let Some(c) = &self.class_coords {
                    let _ = writeln!(out, "class in H^1(phi): {}", list(c));
                }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ObstructionBody {
    pub order: usize,
    pub is_cocycle: bool,
    pub class_vanishes: bool,
    pub h2_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_coords: Option<Vec<String>>,
    pub obstruction: CochainJson,
}

impl ObstructionBody {
    pub fn new(ob: &Obstruction, h2_dim: usize) -> Self {
        ObstructionBody {
            order: ob.order,
            is_cocycle: ob.is_cocycle,
            class_vanishes: ob.class_vanishes(),
            h2_dim,
            class_coords: ob.class_coords.as_deref().map(scalars),
            obstruction: (&ob.cochain).into(),
        }
    }
}

impl Render for ObstructionBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "obstruction to extending order {} to order {}: cocycle {}, dim H^2(phi) = {}",
            self.order,
            self.order + 1,
            self.is_cocycle,
            self.h2_dim
        );
        match &self.class_coords {
            Some(c) if self.class_vanishes => {
                let _ = writeln!(out, "class vanishes {}: the deformation extends", list(c));
            }
            Some(c) => {
                let _ = writeln!(out, "class {} is nonzero: the deformation does not extend", list(c));
            }
            None => {
                let _ = writeln!(out, "no class: the obstruction is not a cocycle");
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExtendBody {
    pub start_order: usize,
    pub target: usize,
    pub reached: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ObstructionBody>,
    pub deformation: DeformationFile,
}

impl Render for ExtendBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "extended from order {} towards {}: reached order {}",
            self.start_order, self.target, self.reached
        );
        if let Some(w) = &self.witness {
            w.render(out);
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IsoCheckBody {
    pub checked_order: usize,
    pub is_isomorphism: bool,
    pub violations: Vec<IsoViolation>,
}

impl Render for IsoCheckBody {
    fn render(&self, out: &mut String) {
        let verdict = if self.is_isomorphism { "is" } else { "is not" };
        let _ = writeln!(out, "the pair {verdict} a formal isomorphism modulo t^{}", self.checked_order + 1);
        for v in &self.violations {
            match v.a {
                Some(a) => {
                    let _ = writeln!(out, "  {} relation fails at t^{} for e{a}", v.relation, v.l);
                }
                None => {
                    let _ = writeln!(out, "  {} relation fails at t^{}", v.relation, v.l);
                }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConjugateBody {
    pub valid: bool,
    pub iso_check: IsoCheckBody,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_before: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_after: Option<Vec<String>>,
    pub classes_equal: bool,
    pub conjugate: DeformationFile,
}

impl Render for ConjugateBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "conjugate is a valid deformation: {}", self.valid);
        self.iso_check.render(out);
        if let (Some(b), Some(a)) = (&self.class_before, &self.class_after) {
            let _ = writeln!(out, "class in H^1(phi): before {}, after {}", list(b), list(a));
        }
        let _ = writeln!(out, "infinitesimal classes agree: {}", self.classes_equal);
    }
}

#[derive(Debug, Serialize)]
pub struct ProbeBody {
    pub order: usize,
    pub max_order: usize,
    pub trivial_to: usize,
    pub fully_trivialized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_class: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CochainJson>,
    pub iso: IsoFile,
}

impl Render for ProbeBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "coefficients 1..={} removed by conjugation (order {}, max order {})",
            self.trivial_to, self.order, self.max_order
        );
        if self.fully_trivialized {
            let _ = writeln!(out, "deformation is trivial to its order");
        }
        if let Some(n) = self.witness_degree {
            let _ = writeln!(out, "{n}-infinitesimal is not in the image of the augmentation");
            if let Some(c) = &self.witness_class {
                let _ = writeln!(out, "its class in H^1(phi): {}", list(c));
            }
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum EquivBody {
    Check(IsoCheckBody),
    Conjugate(ConjugateBody),
    Probe(ProbeBody),
}

impl Render for EquivBody {
    fn render(&self, out: &mut String) {
        match self {
            EquivBody::Check(b) => b.render(out),
            EquivBody::Conjugate(b) => b.render(out),
            EquivBody::Probe(b) => b.render(out),
        }
    }
}

impl Render for RigidityReport {
    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "dim H^1(phi) = {}", self.h1);
        let _ = writeln!(
            out,
            "{}",
            match self.verdict {
                RigidityVerdict::Rigid => "rigid (sufficient criterion)",
                RigidityVerdict::Inconclusive => "criterion inconclusive",
            }
        );
        let _ = writeln!(
            out,
            "dim H^1(End M) = {}, dim H^1(End N) = {}, dim H^0(Hom(M,N)) = {}: module criterion {}",
            self.h1_end_m,
            self.h1_end_n,
            self.h0_hom,
            if self.module_criterion_holds { "holds" } else { "does not hold" }
        );
        let _ = writeln!(out, "note: {}", self.caveat);
    }
}

#[derive(Debug, Serialize)]
pub struct FixturesBody {
    pub fixtures: Vec<Fixture>,
}

impl Render for FixturesBody {
    fn render(&self, out: &mut String) {
        for f in &self.fixtures {
            let tag = if f.valid { "" } else { " (invalid)" };
            let _ = writeln!(out, "{:<24}{}{tag}", f.name, f.description);
        }
    }
}
