//! Hochschild cochains `C^n(A; F) = Hom_k(A^{⊗n}, F)` for the three
//! matrix bimodules `End(M)`, `End(N)`, `Hom(M, N)`, and the coboundary
//!
//! ```text
//! δf(x_1, …, x_{n+1}) = x_1 f(x_2, …) + Σ_{j=1..n} (−1)^j f(…, x_j x_{j+1}, …)
//!                       + (−1)^{n+1} f(x_1, …, x_n) x_{n+1}
//! ```
//!
//! A cochain stores one matrix per multi-index of basis elements. Multi-
//! indices are enumerated lexicographically with the leftmost index
//! slowest, and flattening is multi-index-major, then entry row-major.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, Bimodule, CoeffSpace, Problem};
use crate::cohomology::{BettiCount, Cohomology};
use crate::error::{Error, Limits, Result};
use crate::linalg::{nullspace_basis, Matrix, RankStrategy};
use crate::scalars::{FieldSpec, Scalar};

/// Position of a multi-index in lexicographic order.
pub fn encode_multi_index(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

pub fn decode_multi_index(mut pos: usize, d: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for slot in idx.iter_mut().rev() {
        *slot = pos % d;
        pos /= d;
    }
    idx
}

/// An `n`-cochain with values in one of the coefficient bimodules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    coeff: CoeffSpace,
    algebra_dim: usize,
    values: Vec<Matrix>,
}

impl Cochain {
    pub fn zero(field: FieldSpec, algebra_dim: usize, degree: usize, coeff: CoeffSpace, shape: (usize, usize)) -> Self {
        Cochain {
            degree,
            coeff,
            algebra_dim,
            values: vec![Matrix::zeros(field, shape.0, shape.1); algebra_dim.pow(degree as u32)],
        }
    }

    /// Wraps per-multi-index values; there must be `d^degree` of them with
    /// a common shape.
    pub fn from_values(degree: usize, coeff: CoeffSpace, algebra_dim: usize, values: Vec<Matrix>) -> Result<Self> {
        let expected = algebra_dim.pow(degree as u32);
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "a degree-{degree} cochain needs {expected} values, got {}",
                values.len()
            )));
        }
        let shape = values[0].shape();
        if values.iter().any(|v| v.shape() != shape) {
            return Err(Error::Shape("cochain values have differing shapes".into()));
        }
        Ok(Cochain {
            degree,
            coeff,
            algebra_dim,
            values,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self) -> CoeffSpace {
        self.coeff
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn field(&self) -> FieldSpec {
        self.values[0].field()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values[0].shape()
    }

    pub fn values(&self) -> &[Matrix] {
        &self.values
    }

    pub fn value(&self, idx: &[usize]) -> &Matrix {
        assert_eq!(idx.len(), self.degree, "multi-index length must equal the degree");
        &self.values[encode_multi_index(idx, self.algebra_dim)]
    }

    pub fn value_mut(&mut self, idx: &[usize]) -> &mut Matrix {
        assert_eq!(idx.len(), self.degree, "multi-index length must equal the degree");
        &mut self.values[encode_multi_index(idx, self.algebra_dim)]
    }

    /// Value on a general argument tuple, extended multilinearly from the
    /// basis values.
    pub fn evaluate(&self, args: &[Vec<Scalar>]) -> Matrix {
        assert_eq!(args.len(), self.degree);
        let (r, c) = self.shape();
        let mut out = Matrix::zeros(self.field(), r, c);
        for (pos, v) in self.values.iter().enumerate() {
            let idx = decode_multi_index(pos, self.algebra_dim, self.degree);
            let mut coef = self.field().one();
            for (arg, &i) in args.iter().zip(&idx) {
                coef = &coef * &arg[i];
                if coef.is_zero() {
                    break;
                }
            }
            out.add_scaled(&coef, v);
        }
        out
    }

    pub fn flatten(&self) -> Vec<Scalar> {
        self.values.iter().flat_map(|m| m.entries().iter().cloned()).collect()
    }

    pub fn unflatten(
        field: FieldSpec,
        algebra_dim: usize,
        degree: usize,
        coeff: CoeffSpace,
        shape: (usize, usize),
        flat: &[Scalar],
    ) -> Self {
        let count = algebra_dim.pow(degree as u32);
        let area = shape.0 * shape.1;
        assert_eq!(flat.len(), count * area, "flattened cochain has the wrong length");
        let values = (0..count)
            .map(|p| Matrix::from_vec(field, shape.0, shape.1, flat[p * area..(p + 1) * area].to_vec()))
            .collect();
        Cochain {
            degree,
            coeff,
            algebra_dim,
            values,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Matrix::is_zero)
    }

    fn check_compatible(&self, other: &Cochain) {
        assert_eq!(
            (self.degree, self.coeff, self.algebra_dim, self.shape()),
            (other.degree, other.coeff, other.algebra_dim, other.shape()),
            "incompatible cochains"
        );
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.check_compatible(other);
        self.zip_values(other, Matrix::add)
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.check_compatible(other);
        self.zip_values(other, Matrix::sub)
    }

    fn zip_values(&self, other: &Cochain, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> Cochain {
        Cochain {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
            ..self.clone_header()
        }
    }

    fn clone_header(&self) -> Cochain {
        Cochain {
            degree: self.degree,
            coeff: self.coeff,
            algebra_dim: self.algebra_dim,
            values: Vec::new(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Cochain {
        self.map_values(self.coeff, |m| m.scale(s))
    }

    /// Applies `f` to every value, relabelling the coefficient space.
    pub fn map_values(&self, coeff: CoeffSpace, f: impl Fn(&Matrix) -> Matrix) -> Cochain {
        Cochain {
            degree: self.degree,
            coeff,
            algebra_dim: self.algebra_dim,
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// The Hochschild complex of `A` with coefficients in one bimodule.
#[derive(Debug, Clone)]
pub struct HochschildComplex<'a> {
    algebra: &'a Algebra,
    coeff: CoeffSpace,
    bimodule: Bimodule,
    limits: Limits,
}

impl<'a> HochschildComplex<'a> {
    pub fn new(problem: &'a Problem, coeff: CoeffSpace, limits: Limits) -> Self {
        HochschildComplex {
            algebra: &problem.algebra,
            coeff,
            bimodule: problem.bimodule(coeff),
            limits,
        }
    }

    pub fn from_bimodule(algebra: &'a Algebra, coeff: CoeffSpace, bimodule: Bimodule, limits: Limits) -> Self {
        HochschildComplex {
            algebra,
            coeff,
            bimodule,
            limits,
        }
    }

    pub fn coeff(&self) -> CoeffSpace {
        self.coeff
    }

    pub fn bimodule(&self) -> &Bimodule {
        &self.bimodule
    }

    pub fn algebra(&self) -> &Algebra {
        self.algebra
    }

    pub fn field(&self) -> FieldSpec {
        self.algebra.field()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.bimodule.rows, self.bimodule.cols)
    }

    /// `dim C^n = d^n · rows · cols`.
    pub fn dim(&self, n: usize) -> usize {
        self.algebra.dim().pow(n as u32) * self.bimodule.area()
    }

    pub fn zero(&self, n: usize) -> Cochain {
        Cochain::zero(self.field(), self.algebra.dim(), n, self.coeff, self.shape())
    }

    fn check_cochain(&self, c: &Cochain) {
        assert_eq!(
            (c.coeff, c.algebra_dim, c.shape()),
            (self.coeff, self.algebra.dim(), self.shape()),
            "cochain does not belong to this complex"
        );
    }

    /// `δ^n c`, evaluated pointwise on basis multi-indices.
    pub fn coboundary(&self, c: &Cochain) -> Cochain {
        self.check_cochain(c);
        let n = c.degree;
        let d = self.algebra.dim();
        let field = self.field();
        let mut out = self.zero(n + 1);
        let minus_one = -field.one();
        for pos in 0..d.pow(n as u32 + 1) {
            let idx = decode_multi_index(pos, d, n + 1);
            let mut val = self.bimodule.left[idx[0]].mul(c.value(&idx[1..]));
            let mut sign = minus_one.clone();
            for p in 0..n {
                for k in 0..d {
                    let coef = self.algebra.constant(idx[p], idx[p + 1], k);
                    if coef.is_zero() {
                        continue;
                    }
                    let mut merged = Vec::with_capacity(n);
                    merged.extend_from_slice(&idx[..p]);
                    merged.push(k);
                    merged.extend_from_slice(&idx[p + 2..]);
                    val.add_scaled(&(&sign * coef), c.value(&merged));
                }
                sign = -sign;
            }
            val.add_scaled(&sign, &c.value(&idx[..n]).mul(&self.bimodule.right[idx[n]]));
            out.values[pos] = val;
        }
        out
    }

    /// Matrix of `δ^n` in the flattened bases of `C^n` and `C^{n+1}`.
    pub fn coboundary_matrix(&self, n: usize) -> Result<Matrix> {
        self.limits.check_degree(n)?;
        let rows = self.dim(n + 1);
        let cols = self.dim(n);
        self.limits
            .check_matrix(format!("coboundary of C^{n}(A; {})", self.coeff), rows, cols)?;
        let d = self.algebra.dim();
        let field = self.field();
        let (br, bc) = self.shape();
        let area = br * bc;
        let mut m = Matrix::zeros(field, rows, cols);
        let minus_one = -field.one();
        for pos in 0..d.pow(n as u32 + 1) {
            let idx = decode_multi_index(pos, d, n + 1);
            let tail = encode_multi_index(&idx[1..], d);
            let head = encode_multi_index(&idx[..n], d);
            let left = &self.bimodule.left[idx[0]];
            let right = &self.bimodule.right[idx[n]];
            let right_sign = if n % 2 == 0 { minus_one.clone() } else { field.one() };
            for r in 0..br {
                for c in 0..bc {
                    let row = pos * area + r * bc + c;
                    for s in 0..br {
                        let l = &left[(r, s)];
                        if !l.is_zero() {
                            m[(row, tail * area + s * bc + c)] = &m[(row, tail * area + s * bc + c)] + l;
                        }
                    }
                    let mut sign = minus_one.clone();
                    for p in 0..n {
                        for k in 0..d {
                            let coef = self.algebra.constant(idx[p], idx[p + 1], k);
                            if coef.is_zero() {
                                continue;
                            }
                            let mut merged = Vec::with_capacity(n);
                            merged.extend_from_slice(&idx[..p]);
                            merged.push(k);
                            merged.extend_from_slice(&idx[p + 2..]);
                            let col = encode_multi_index(&merged, d) * area + r * bc + c;
                            m[(row, col)].add_mul_assign(&sign, coef);
                        }
                        sign = -sign;
                    }
                    for s in 0..bc {
                        let rv = &right[(s, c)];
                        if !rv.is_zero() {
                            m[(row, head * area + r * bc + s)].add_mul_assign(&right_sign, rv);
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    /// Matrix of `δ^{n-1}` (a zero-column matrix when `n = 0`).
    pub fn incoming_matrix(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            Ok(Matrix::zeros(self.field(), self.dim(0), 0))
        } else {
            self.coboundary_matrix(n - 1)
        }
    }

    /// `dim H^n` from ranks alone.
    pub fn betti(&self, n: usize, strategy: RankStrategy) -> Result<BettiCount> {
        let incoming = self.incoming_matrix(n)?;
        let outgoing = self.coboundary_matrix(n)?;
        Ok(BettiCount::compute(n, &incoming, &outgoing, strategy))
    }

    /// `H^n(A; F)` with representatives and class coordinates.
    pub fn cohomology(&self, n: usize) -> Result<Cohomology> {
        let incoming = self.incoming_matrix(n)?;
        let outgoing = self.coboundary_matrix(n)?;
        Ok(Cohomology::compute(n, &incoming, &outgoing))
    }

    pub fn unflatten(&self, n: usize, flat: &[Scalar]) -> Cochain {
        Cochain::unflatten(self.field(), self.algebra.dim(), n, self.coeff, self.shape(), flat)
    }

    pub fn representatives(&self, h: &Cohomology) -> Vec<Cochain> {
        h.representatives
            .iter()
            .map(|v| self.unflatten(h.counts.degree, v))
            .collect()
    }

    /// Entries uniform on {−3, …, 3} over ℚ, uniform residues over 𝔽_p.
    pub fn random_cochain(&self, n: usize, seed: u64) -> Cochain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat: Vec<Scalar> = (0..self.dim(n)).map(|_| self.field().random(&mut rng)).collect();
        self.unflatten(n, &flat)
    }

    /// A random combination of the kernel basis of `δ^n`, or `None` when
    /// the kernel is zero.
    pub fn random_cocycle(&self, n: usize, seed: u64) -> Result<Option<Cochain>> {
        let basis = nullspace_basis(&self.coboundary_matrix(n)?);
        Ok(random_combination(self.field(), &basis, self.dim(n), seed).map(|v| self.unflatten(n, &v)))
    }
}

/// Random nonzero combination of `basis` (the first coefficient is forced
/// to 1 if every draw came out zero). `None` for an empty basis.
pub(crate) fn random_combination(field: FieldSpec, basis: &[Vec<Scalar>], dim: usize, seed: u64) -> Option<Vec<Scalar>> {
    if basis.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coefs: Vec<Scalar> = basis.iter().map(|_| field.random(&mut rng)).collect();
    if coefs.iter().all(Scalar::is_zero) {
        coefs[0] = field.one();
    }
    let mut out = vec![field.zero(); dim];
    for (c, v) in coefs.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(v) {
            o.add_mul_assign(c, x);
        }
    }
    Some(out)
}
