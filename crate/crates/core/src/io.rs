//! JSON problem, deformation and isomorphism files.
//!
//! Scalars are strings in the scalar grammar (`"-3/4"`, `"2"`), matrices
//! are arrays of rows. Degree-0 entries of deformation and isomorphism
//! files may be omitted and are filled in from the problem.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, CoeffSpace, LeftModule, Problem};
use crate::deformation::{FormalIsomorphism, TruncatedDeformation};
use crate::error::{Error, Result};
use crate::hochschild::Cochain;
use crate::linalg::Matrix;
use crate::scalars::{format_scalar, parse_scalar, FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum FieldFile {
    Q,
    Fp { p: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub unit: Vec<String>,
    pub table: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub dim: usize,
    pub action: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulesFile {
    #[serde(rename = "M")]
    pub m: ModuleFile,
    #[serde(rename = "N")]
    pub n: ModuleFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: FieldFile,
    pub algebra: AlgebraFile,
    pub modules: ModulesFile,
    pub hom: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationFile {
    pub order: usize,
    pub xi: Vec<Vec<Vec<Vec<String>>>>,
    pub eta: Vec<Vec<Vec<Vec<String>>>>,
    pub phi: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoFile {
    pub order: usize,
    pub psi: Vec<Vec<Vec<String>>>,
    pub theta: Vec<Vec<Vec<String>>>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::schema(path.display().to_string(), format!("cannot read file: {e}")))
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_string(),
        source,
    })
}

fn scalar(text: &str, field: FieldSpec, at: &str) -> Result<Scalar> {
    parse_scalar(text, field).map_err(|e| Error::schema(at, e.to_string()))
}

fn matrix(rows: &[Vec<String>], shape: (usize, usize), field: FieldSpec, at: &str) -> Result<Matrix> {
    let (r, c) = shape;
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        let got_cols = rows.first().map_or(0, Vec::len);
        return Err(Error::schema(
            at,
            format!("expected a {r}x{c} matrix, got {} row(s) of length {got_cols}", rows.len()),
        ));
    }
    let mut data = Vec::with_capacity(r * c);
    for (i, row) in rows.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            data.push(scalar(s, field, &format!("{at}[{i}][{j}]"))?);
        }
    }
    Ok(Matrix::from_vec(field, r, c, data))
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(format_scalar).collect()).collect()
}

fn field_spec(f: &FieldFile) -> Result<FieldSpec> {
    match f {
        FieldFile::Q => Ok(FieldSpec::Rationals),
        FieldFile::Fp { p } => FieldSpec::prime(*p).map_err(|e| Error::schema("field.p", e.to_string())),
    }
}

fn module(file: &ModuleFile, algebra: &Algebra, at: &str) -> Result<LeftModule> {
    let d = algebra.dim();
    if file.action.len() != d {
        return Err(Error::schema(
            format!("{at}.action"),
            format!("expected {d} action matrices, got {}", file.action.len()),
        ));
    }
    let action = file
        .action
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, (file.dim, file.dim), algebra.field(), &format!("{at}.action[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    LeftModule::new(algebra, file.dim, action)
}

impl ProblemFile {
    /// Builds and validates the problem; algebra, module and homomorphism
    /// violations come back as [`Error::Invalid`].
    pub fn to_problem(&self) -> Result<Problem> {
        let field = field_spec(&self.field)?;
        let a = &self.algebra;
        let d = a.dim;
        if d == 0 {
            return Err(Error::schema("algebra.dim", "must be at least 1"));
        }
        if a.unit.len() != d {
            return Err(Error::schema("algebra.unit", format!("expected {d} entries, got {}", a.unit.len())));
        }
        if a.table.len() != d {
            return Err(Error::schema("algebra.table", format!("expected {d} slices, got {}", a.table.len())));
        }
        let unit = a
            .unit
            .iter()
            .enumerate()
            .map(|(k, s)| scalar(s, field, &format!("algebra.unit[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let table = a
            .table
            .iter()
            .enumerate()
            .map(|(i, slice)| Ok(matrix(slice, (d, d), field, &format!("algebra.table[{i}]"))?))
            .map(|m: Result<Matrix>| m.map(|m| (0..d).map(|j| m.row(j).to_vec()).collect()))
            .collect::<Result<Vec<Vec<Vec<Scalar>>>>>()?;
        if let Some(labels) = &a.labels {
            if labels.len() != d {
                return Err(Error::schema("algebra.labels", format!("expected {d} labels, got {}", labels.len())));
            }
        }
        let algebra = Algebra::new(field, a.labels.clone(), table, unit)?;
        let m = module(&self.modules.m, &algebra, "modules.M")?;
        let n = module(&self.modules.n, &algebra, "modules.N")?;
        let hom = matrix(&self.hom, (n.dim(), m.dim()), field, "hom")?;
        Problem::new(algebra, m, n, hom)
    }

    pub fn from_problem(p: &Problem) -> Self {
        let a = &p.algebra;
        let d = a.dim();
        let field = match p.field() {
            FieldSpec::Rationals => FieldFile::Q,
            FieldSpec::PrimeField(q) => FieldFile::Fp { p: q },
        };
        let table = (0..d)
            .map(|i| (0..d).map(|j| a.product_of_basis(i, j).iter().map(format_scalar).collect()).collect())
            .collect();
        let module = |m: &LeftModule| ModuleFile {
            dim: m.dim(),
            action: m.actions().iter().map(matrix_rows).collect(),
        };
        ProblemFile {
            field,
            algebra: AlgebraFile {
                dim: d,
                labels: Some(a.labels().to_vec()),
                unit: a.unit().iter().map(format_scalar).collect(),
                table,
            },
            modules: ModulesFile {
                m: module(&p.m),
                n: module(&p.n),
            },
            hom: matrix_rows(&p.hom),
        }
    }
}

pub fn parse_problem_str(text: &str, origin: &str) -> Result<Problem> {
    from_json::<ProblemFile>(text, origin)?.to_problem()
}

pub fn parse_problem(path: &Path) -> Result<Problem> {
    parse_problem_str(&read(path)?, &path.display().to_string())
}

/// Pretty-printed canonical JSON, with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn problem_to_json(p: &Problem) -> String {
    to_canonical_json(&ProblemFile::from_problem(p))
}

/// Resolves the optional degree-0 entry of a per-degree list.
fn degree_offset(len: usize, order: usize, name: &str) -> Result<usize> {
    if len == order + 1 {
        Ok(0)
    } else if len == order {
        Ok(1)
    } else {
        Err(Error::schema(
            name,
            format!("expected {} or {} coefficients for order {order}, got {len}", order + 1, order),
        ))
    }
}

fn cochain_series(
    lists: &[Vec<Vec<Vec<String>>>],
    order: usize,
    name: &str,
    problem: &Problem,
    coeff: CoeffSpace,
    base: &Cochain,
) -> Result<Vec<Cochain>> {
    let offset = degree_offset(lists.len(), order, name)?;
    let d = problem.algebra.dim();
    let shape = base.shape();
    let mut out = Vec::with_capacity(order + 1);
    if offset == 1 {
        out.push(base.clone());
    }
    for (k, values) in lists.iter().enumerate() {
        let degree = k + offset;
        let at = format!("{name}[degree {degree}]");
        if values.len() != d {
            return Err(Error::schema(&at, format!("expected {d} matrices (one per basis element), got {}", values.len())));
        }
        let mats = values
            .iter()
            .enumerate()
            .map(|(a, m)| matrix(m, shape, problem.field(), &format!("{at}[{a}]")))
            .collect::<Result<Vec<_>>>()?;
        out.push(Cochain::from_values(1, coeff, d, mats)?);
    }
    Ok(out)
}

fn matrix_series(
    lists: &[Vec<Vec<String>>],
    order: usize,
    name: &str,
    field: FieldSpec,
    base: &Matrix,
) -> Result<Vec<Matrix>> {
    let offset = degree_offset(lists.len(), order, name)?;
    let mut out = Vec::with_capacity(order + 1);
    if offset == 1 {
        out.push(base.clone());
    }
    for (k, m) in lists.iter().enumerate() {
        out.push(matrix(m, base.shape(), field, &format!("{name}[degree {}]", k + offset))?);
    }
    Ok(out)
}

impl DeformationFile {
    pub fn to_deformation(&self, problem: &Problem) -> Result<TruncatedDeformation> {
        let trivial = TruncatedDeformation::trivial(problem, 0);
        let xi = cochain_series(&self.xi, self.order, "xi", problem, CoeffSpace::EndM, &trivial.xi()[0])?;
        let eta = cochain_series(&self.eta, self.order, "eta", problem, CoeffSpace::EndN, &trivial.eta()[0])?;
        let phi = matrix_series(&self.phi, self.order, "phi", problem.field(), &problem.hom)?;
        TruncatedDeformation::from_parts(problem, xi, eta, phi)
    }

    /// Always writes the degree-0 coefficients.
    pub fn from_deformation(d: &TruncatedDeformation) -> Self {
        let series = |s: &[Cochain]| s.iter().map(|c| c.values().iter().map(matrix_rows).collect()).collect();
        DeformationFile {
            order: d.order(),
            xi: series(d.xi()),
            eta: series(d.eta()),
            phi: d.phi().iter().map(matrix_rows).collect(),
        }
    }
}

pub fn parse_deformation_str(text: &str, origin: &str, problem: &Problem) -> Result<TruncatedDeformation> {
    from_json::<DeformationFile>(text, origin)?.to_deformation(problem)
}

pub fn parse_deformation(path: &Path, problem: &Problem) -> Result<TruncatedDeformation> {
    parse_deformation_str(&read(path)?, &path.display().to_string(), problem)
}

pub fn deformation_to_json(d: &TruncatedDeformation) -> String {
    to_canonical_json(&DeformationFile::from_deformation(d))
}

impl IsoFile {
    pub fn to_iso(&self, problem: &Problem) -> Result<FormalIsomorphism> {
        let f = problem.field();
        let psi = matrix_series(&self.psi, self.order, "psi", f, &Matrix::identity(f, problem.m.dim()))?;
        let theta = matrix_series(&self.theta, self.order, "theta", f, &Matrix::identity(f, problem.n.dim()))?;
        FormalIsomorphism::new(psi, theta)
    }

    pub fn from_iso(iso: &FormalIsomorphism) -> Self {
        IsoFile {
            order: iso.order(),
            psi: iso.psi().iter().map(matrix_rows).collect(),
            theta: iso.theta().iter().map(matrix_rows).collect(),
        }
    }
}

pub fn parse_iso_str(text: &str, origin: &str, problem: &Problem) -> Result<FormalIsomorphism> {
    from_json::<IsoFile>(text, origin)?.to_iso(problem)
}

pub fn parse_iso(path: &Path, problem: &Problem) -> Result<FormalIsomorphism> {
    parse_iso_str(&read(path)?, &path.display().to_string(), problem)
}

pub fn iso_to_json(iso: &FormalIsomorphism) -> String {
    to_canonical_json(&IsoFile::from_iso(iso))
}

/// A cochain as its list of values in multi-index order.
pub fn cochain_rows(c: &Cochain) -> Vec<Vec<Vec<String>>> {
    c.values().iter().map(matrix_rows).collect()
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<String>> {
    matrix_rows(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::Deformer;
    use crate::error::Limits;

    const DUAL: &str = r#"{
      "field": {"type": "Q"},
      "algebra": {"dim": 2, "unit": ["1", "0"],
                  "table": [[["1","0"],["0","1"]], [["0","1"],["0","0"]]]},
      "modules": {"M": {"dim": 2, "action": [[["1","0"],["0","1"]], [["0","0"],["1","0"]]]},
                  "N": {"dim": 1, "action": [[["1"]], [["0"]]]}},
      "hom": [["1", "0"]]
    }"#;

    #[test]
    fn problem_round_trip() {
        let p = parse_problem_str(DUAL, "dual").unwrap();
        assert_eq!(p.algebra.labels(), ["e0", "e1"]);
        let text = problem_to_json(&p);
        let q = parse_problem_str(&text, "again").unwrap();
        assert_eq!(p, q);
        assert_eq!(problem_to_json(&q), text);
    }

    #[test]
    fn prime_fields() {
        let text = DUAL.replace(r#"{"type": "Q"}"#, r#"{"type": "Fp", "p": 5}"#);
        let p = parse_problem_str(&text, "f5").unwrap();
        assert_eq!(p.field(), FieldSpec::PrimeField(5));
        let bad = DUAL.replace(r#"{"type": "Q"}"#, r#"{"type": "Fp", "p": 6}"#);
        assert!(matches!(parse_problem_str(&bad, "f6"), Err(Error::Schema { .. })));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad = DUAL.replace(r#""hom": [["1", "0"]]"#, r#""hom": [["1"]]"#);
        match parse_problem_str(&bad, "x") {
            Err(Error::Schema { context, .. }) => assert_eq!(context, "hom"),
            other => panic!("{other:?}"),
        }
        let bad = DUAL.replace(r#"["0","1"]],"#, r#"["0","1/0"]],"#);
        match parse_problem_str(&bad, "x") {
            Err(Error::Schema { context, .. }) => assert!(context.starts_with("algebra.table[0]"), "{context}"),
            other => panic!("{other:?}"),
        }
        let bad = DUAL.replace(r#""hom""#, r#""homm""#);
        assert!(matches!(parse_problem_str(&bad, "x"), Err(Error::Json { .. })));
    }

    #[test]
    fn invalid_hom_is_reported() {
        let bad = DUAL.replace(r#""hom": [["1", "0"]]"#, r#""hom": [["1", "1"]]"#);
        assert!(matches!(parse_problem_str(&bad, "x"), Err(Error::Invalid { .. })));
    }

    #[test]
    fn deformation_round_trip_and_defaults() {
        let p = parse_problem_str(DUAL, "dual").unwrap();
        let df = Deformer::new(&p, Limits::default());
        let d = df.random_order_one(3).unwrap().unwrap();
        let d = df.extend_to_order(&d, 2).unwrap().deformation;
        let text = deformation_to_json(&d);
        assert_eq!(parse_deformation_str(&text, "d", &p).unwrap(), d);

        let mut file = DeformationFile::from_deformation(&d);
        file.xi.remove(0);
        file.eta.remove(0);
        file.phi.remove(0);
        assert_eq!(file.to_deformation(&p).unwrap(), d);
    }

    #[test]
    fn deformation_shape_errors_name_the_degree() {
        let p = parse_problem_str(DUAL, "dual").unwrap();
        let mut file = DeformationFile::from_deformation(&TruncatedDeformation::trivial(&p, 2));
        file.phi[2] = vec![vec!["0".into()]];
        match file.to_deformation(&p) {
            Err(Error::Schema { context, .. }) => assert_eq!(context, "phi[degree 2]"),
            other => panic!("{other:?}"),
        }
        file.phi.truncate(1);
        assert!(matches!(file.to_deformation(&p), Err(Error::Schema { .. })));
    }

    #[test]
    fn iso_round_trip() {
        let p = parse_problem_str(DUAL, "dual").unwrap();
        let iso = Deformer::new(&p, Limits::default()).random_isomorphism(2, 1);
        let text = iso_to_json(&iso);
        assert_eq!(parse_iso_str(&text, "i", &p).unwrap(), iso);
        let mut file = IsoFile::from_iso(&iso);
        file.psi.remove(0);
        file.theta.remove(0);
        assert_eq!(file.to_iso(&p).unwrap(), iso);
        file.psi.insert(0, vec![vec!["2".into(), "0".into()], vec!["0".into(), "1".into()]]);
        file.theta.insert(0, vec![vec!["1".into()]]);
        assert!(file.to_iso(&p).is_err());
    }
}
