//! Problems shipped with the crate, addressable by name from the CLI.

use serde::Serialize;

use crate::algebra::Problem;
use crate::error::Result;
use crate::io::parse_problem_str;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    /// False for the deliberately broken inputs.
    pub valid: bool,
    #[serde(skip)]
    pub text: &'static str,
}

macro_rules! fixture {
    ($name:literal, $valid:literal, $description:literal) => {
        Fixture {
            name: $name,
            description: $description,
            valid: $valid,
            text: include_str!(concat!("../fixtures/", $name, ".json")),
        }
    };
}

pub const FIXTURES: &[Fixture] = &[
    fixture!("dual_numbers", true, "Q[x]/(x^2), M = A, N = k, phi the augmentation"),
    fixture!("dual_numbers_trivial", true, "Q[x]/(x^2), M = N = k, phi the identity"),
    fixture!("dual_numbers_regular", true, "Q[x]/(x^2), M = N = A, phi multiplication by x"),
    fixture!("truncated_cubic", true, "Q[x]/(x^3), M = k, N = A/(x^2), phi(1) = x"),
    fixture!("c2_rational", true, "Q[C2], M = N = A, phi the identity"),
    fixture!("c2_f2", true, "F_2[C2], M = N = A, phi the identity"),
    fixture!("upper_triangular", true, "upper triangular 2x2 matrices over Q, simple submodule into the natural module"),
    fixture!("unit_algebra", true, "A = Q, M = Q^2, N = Q, phi a projection"),
    fixture!("broken_nonassociative", false, "structure table that is not associative"),
    fixture!("broken_unit", false, "dual numbers with the wrong unit"),
    fixture!("broken_module", false, "action that is not multiplicative"),
    fixture!("broken_hom", false, "map that is not A-linear"),
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

pub fn valid() -> impl Iterator<Item = &'static Fixture> {
    FIXTURES.iter().filter(|f| f.valid)
}

impl Fixture {
    pub fn load(&self) -> Result<Problem> {
        parse_problem_str(self.text, self.name)
    }
}
