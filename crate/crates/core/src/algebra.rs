//! Finite-dimensional algebras given by structure constants, left modules
//! given by action matrices, module homomorphisms, and the bimodule
//! structures on `End(M)`, `End(N)` and `Hom(M, N)`.
//!
//! Module elements are coordinate columns and composition `g ∘ f` is the
//! matrix product `G·F`. A homomorphism `φ: M → N` is an `n'×m` matrix
//! whose columns are the images of the basis of `M`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalars::{FieldSpec, Scalar};

/// One failed identity, as reported by the validators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `(e_i e_j) e_l ≠ e_i (e_j e_l)` in coordinate `k`.
    Associativity { i: usize, j: usize, l: usize, k: usize },
    /// `unit · e_j ≠ e_j`.
    LeftUnit { j: usize },
    /// `e_i · unit ≠ e_i`.
    RightUnit { i: usize },
    /// `ρ(e_i)ρ(e_j) ≠ ρ(e_i e_j)` for the named module.
    Multiplicativity { module: String, i: usize, j: usize },
    /// `ρ(unit) ≠ identity` for the named module.
    Unitality { module: String },
    /// `Φ ρ_M(e_i) ≠ ρ_N(e_i) Φ`.
    Intertwining { i: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Associativity { i, j, l, k } => {
                write!(f, "associativity fails for (e{i} e{j}) e{l} vs e{i} (e{j} e{l}) in coordinate {k}")
            }
            Violation::LeftUnit { j } => write!(f, "unit * e{j} != e{j}"),
            Violation::RightUnit { i } => write!(f, "e{i} * unit != e{i}"),
            Violation::Multiplicativity { module, i, j } => {
                write!(f, "module {module}: rho(e{i}) rho(e{j}) != rho(e{i} e{j})")
            }
            Violation::Unitality { module } => write!(f, "module {module}: rho(unit) is not the identity"),
            Violation::Intertwining { i } => write!(f, "hom does not commute with the action of e{i}"),
        }
    }
}

/// An associative unital algebra with basis `e_0, …, e_{d-1}` and
/// `e_i e_j = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    field: FieldSpec,
    dim: usize,
    labels: Vec<String>,
    table: Vec<Scalar>,
    unit: Vec<Scalar>,
}

impl Algebra {
    /// Builds an algebra from a `d×d×d` table. Shapes are checked here;
    /// the algebra axioms are checked by [`Algebra::validate`].
    pub fn new(
        field: FieldSpec,
        labels: Option<Vec<String>>,
        table: Vec<Vec<Vec<Scalar>>>,
        unit: Vec<Scalar>,
    ) -> Result<Self> {
        let d = unit.len();
        if d == 0 {
            return Err(Error::Shape("algebra dimension must be at least 1".into()));
        }
        if table.len() != d || table.iter().any(|r| r.len() != d || r.iter().any(|c| c.len() != d)) {
            return Err(Error::Shape(format!("structure table must be {d}x{d}x{d}")));
        }
        let labels = labels.unwrap_or_else(|| (0..d).map(|i| format!("e{i}")).collect());
        if labels.len() != d {
            return Err(Error::Shape(format!("{} labels for dimension {d}", labels.len())));
        }
        let table: Vec<Scalar> = table.into_iter().flatten().flatten().collect();
        if table.iter().chain(&unit).any(|s| s.field() != field) {
            return Err(Error::Shape(format!("algebra entries must lie in {field}")));
        }
        Ok(Algebra {
            field,
            dim: d,
            labels,
            table,
            unit,
        })
    }

    /// Convenience constructor from integer structure constants.
    pub fn from_i64(field: FieldSpec, table: &[Vec<Vec<i64>>], unit: &[i64]) -> Result<Self> {
        let table = table
            .iter()
            .map(|r| r.iter().map(|c| c.iter().map(|&v| field.from_i64(v)).collect()).collect())
            .collect();
        Self::new(field, None, table, unit.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    /// `c[i][j][k]`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.table[(i * self.dim + j) * self.dim + k]
    }

    /// Coordinates of `e_i e_j`.
    pub fn product_of_basis(&self, i: usize, j: usize) -> &[Scalar] {
        let start = (i * self.dim + j) * self.dim;
        &self.table[start..start + self.dim]
    }

    /// Product of two elements given in coordinates.
    pub fn multiply(&self, r: &[Scalar], s: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.dim];
        for (i, ri) in r.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, sj) in s.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let rs = ri * sj;
                for (k, c) in self.product_of_basis(i, j).iter().enumerate() {
                    out[k].add_mul_assign(&rs, c);
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        (0..self.dim)
            .map(|k| if k == i { self.field.one() } else { self.field.zero() })
            .collect()
    }

    /// Every associativity and unit-law failure.
    pub fn validate(&self) -> Vec<Violation> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let ij = self.product_of_basis(i, j);
                for l in 0..d {
                    let left = self.multiply(ij, &self.basis_vector(l));
                    let right = self.multiply(&self.basis_vector(i), self.product_of_basis(j, l));
                    for k in 0..d {
                        if left[k] != right[k] {
                            out.push(Violation::Associativity { i, j, l, k });
                        }
                    }
                }
            }
        }
        for j in 0..d {
            if self.multiply(&self.unit, &self.basis_vector(j)) != self.basis_vector(j) {
                out.push(Violation::LeftUnit { j });
            }
        }
        for i in 0..d {
            if self.multiply(&self.basis_vector(i), &self.unit) != self.basis_vector(i) {
                out.push(Violation::RightUnit { i });
            }
        }
        out
    }

    /// Left multiplication by `e_i` on `A` itself, the action matrices of
    /// the regular module.
    pub fn left_multiplication(&self, i: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for j in 0..self.dim {
            for (k, c) in self.product_of_basis(i, j).iter().enumerate() {
                m[(k, j)] = c.clone();
            }
        }
        m
    }
}

/// A left module: one `m×m` action matrix `ρ(e_i)` per basis element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftModule {
    dim: usize,
    action: Vec<Matrix>,
}

impl LeftModule {
    pub fn new(algebra: &Algebra, dim: usize, action: Vec<Matrix>) -> Result<Self> {
        if action.len() != algebra.dim() {
            return Err(Error::Shape(format!(
                "module needs {} action matrices, got {}",
                algebra.dim(),
                action.len()
            )));
        }
        if let Some((i, m)) = action.iter().enumerate().find(|(_, m)| m.shape() != (dim, dim)) {
            return Err(Error::Shape(format!(
                "action matrix {i} is {}x{}, expected {dim}x{dim}",
                m.rows(),
                m.cols()
            )));
        }
        if action.iter().any(|m| m.field() != algebra.field()) {
            return Err(Error::Shape(format!("action matrices must lie in {}", algebra.field())));
        }
        Ok(LeftModule { dim, action })
    }

    /// `A` acting on itself by left multiplication.
    pub fn regular(algebra: &Algebra) -> Self {
        LeftModule {
            dim: algebra.dim(),
            action: (0..algebra.dim()).map(|i| algebra.left_multiplication(i)).collect(),
        }
    }

    /// The zero module.
    pub fn zero(algebra: &Algebra) -> Self {
        LeftModule {
            dim: 0,
            action: vec![Matrix::zeros(algebra.field(), 0, 0); algebra.dim()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ρ(e_i)`.
    pub fn action(&self, i: usize) -> &Matrix {
        &self.action[i]
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.action
    }

    /// The structure map `ξ(Σ r_i e_i) = Σ r_i ρ(e_i)`.
    pub fn structure_map(&self, coords: &[Scalar]) -> Matrix {
        let field = self.action.first().map(Matrix::field).expect("algebra has a basis");
        let mut out = Matrix::zeros(field, self.dim, self.dim);
        for (r, rho) in coords.iter().zip(&self.action) {
            out.add_scaled(r, rho);
        }
        out
    }

    /// Every multiplicativity and unitality failure.
    pub fn validate(&self, algebra: &Algebra, name: &str) -> Vec<Violation> {
        let d = algebra.dim();
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let lhs = self.action[i].mul(&self.action[j]);
                let rhs = self.structure_map(algebra.product_of_basis(i, j));
                if lhs != rhs {
                    out.push(Violation::Multiplicativity {
                        module: name.to_string(),
                        i,
                        j,
                    });
                }
            }
        }
        if self.structure_map(algebra.unit()) != Matrix::identity(algebra.field(), self.dim) {
            out.push(Violation::Unitality {
                module: name.to_string(),
            });
        }
        out
    }
}

/// Indices `i` where `Φ ρ_M(e_i) ≠ ρ_N(e_i) Φ`.
pub fn validate_hom(source: &LeftModule, target: &LeftModule, hom: &Matrix) -> Result<Vec<Violation>> {
    if hom.shape() != (target.dim(), source.dim()) {
        return Err(Error::Shape(format!(
            "hom is {}x{}, expected {}x{}",
            hom.rows(),
            hom.cols(),
            target.dim(),
            source.dim()
        )));
    }
    Ok((0..source.actions().len())
        .filter(|&i| hom.mul(source.action(i)) != target.action(i).mul(hom))
        .map(|i| Violation::Intertwining { i })
        .collect())
}

/// The three coefficient bimodules of the deformation complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CoeffSpace {
    EndM,
    EndN,
    HomMN,
}

impl CoeffSpace {
    pub const ALL: [CoeffSpace; 3] = [CoeffSpace::EndM, CoeffSpace::EndN, CoeffSpace::HomMN];

    pub fn label(self) -> &'static str {
        match self {
            CoeffSpace::EndM => "End(M)",
            CoeffSpace::EndN => "End(N)",
            CoeffSpace::HomMN => "Hom(M,N)",
        }
    }
}

impl fmt::Display for CoeffSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A space of `rows×cols` matrices with commuting left and right
/// `A`-actions: `r·f = L(r) F` and `f·s = F R(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    pub rows: usize,
    pub cols: usize,
    pub left: Vec<Matrix>,
    pub right: Vec<Matrix>,
}

impl Bimodule {
    /// `Hom_k(source, target)` with `(r f)(m) = r f(m)` and `(f s)(m) = f(s m)`.
    pub fn hom(source: &LeftModule, target: &LeftModule) -> Self {
        Bimodule {
            rows: target.dim(),
            cols: source.dim(),
            left: target.actions().to_vec(),
            right: source.actions().to_vec(),
        }
    }

    pub fn area(&self) -> usize {
        self.rows * self.cols
    }

    pub fn act(&self, coords: &[Scalar], f: &Matrix, side: Side) -> Result<Matrix> {
        if f.shape() != (self.rows, self.cols) {
            return Err(Error::Shape(format!(
                "bimodule element is {}x{}, expected {}x{}",
                f.rows(),
                f.cols(),
                self.rows,
                self.cols
            )));
        }
        let (mats, n) = match side {
            Side::Left => (&self.left, self.rows),
            Side::Right => (&self.right, self.cols),
        };
        let mut a = Matrix::zeros(f.field(), n, n);
        for (r, m) in coords.iter().zip(mats) {
            a.add_scaled(r, m);
        }
        Ok(match side {
            Side::Left => a.mul(f),
            Side::Right => f.mul(&a),
        })
    }
}

/// A homomorphism problem `φ: M → N` over an algebra `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub algebra: Algebra,
    pub m: LeftModule,
    pub n: LeftModule,
    pub hom: Matrix,
}

impl Problem {
    /// Builds a problem and runs every validator; any violation is an error.
    pub fn new(algebra: Algebra, m: LeftModule, n: LeftModule, hom: Matrix) -> Result<Self> {
        let problem = Problem { algebra, m, n, hom };
        let violations = problem.validate()?;
        if violations.is_empty() {
            Ok(problem)
        } else {
            Err(Error::Invalid {
                what: "problem".into(),
                violations,
            })
        }
    }

    /// Runs the validators in order, stopping after the first failing
    /// layer (module checks presuppose a valid algebra, and so on).
    pub fn validate(&self) -> Result<Vec<Violation>> {
        let v = self.algebra.validate();
        if !v.is_empty() {
            return Ok(v);
        }
        let mut v = self.m.validate(&self.algebra, "M");
        v.extend(self.n.validate(&self.algebra, "N"));
        if !v.is_empty() {
            return Ok(v);
        }
        validate_hom(&self.m, &self.n, &self.hom)
    }

    pub fn field(&self) -> FieldSpec {
        self.algebra.field()
    }

    pub fn bimodule(&self, coeff: CoeffSpace) -> Bimodule {
        match coeff {
            CoeffSpace::EndM => Bimodule::hom(&self.m, &self.m),
            CoeffSpace::EndN => Bimodule::hom(&self.n, &self.n),
            CoeffSpace::HomMN => Bimodule::hom(&self.m, &self.n),
        }
    }

    pub fn is_hom_zero(&self) -> bool {
        self.hom.is_zero()
    }
}
