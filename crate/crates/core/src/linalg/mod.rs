//! Dense exact linear algebra over a [`FieldSpec`].
//!
//! Pivoting is deterministic: the pivot of each column is the first row
//! (at or below the current one) holding a nonzero entry. Nullspace bases
//! and particular solutions follow the free-variables-zero convention.

mod fraction_free;

pub use fraction_free::fraction_free_rank;

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalars::{FieldSpec, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input or on
    /// entries from another field.
    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        assert!(data.iter().all(|s| s.field() == field), "entry outside {field}");
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    /// Row-major constructor with an explicit shape (allows zero-sized matrices).
    pub fn from_vec(field: FieldSpec, rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j].add_mul_assign(a, &other.data[k * other.cols + j]);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "vector length does not match column count");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc.add_mul_assign(a, b);
                }
                acc
            })
            .collect()
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-self.field.one())
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: &Scalar, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        if s.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.add_mul_assign(s, b);
        }
    }

    /// Stacks blocks horizontally. All blocks must share a row count.
    pub fn hstack(field: FieldSpec, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            out.set_block(0, offset, b);
            offset += b.cols;
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} over {} [", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Result of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// Row-reduces a list of rows in place and returns the pivot columns.
/// Only the first `scan_cols` columns are eligible as pivots.
fn reduce_rows(field: FieldSpec, rows: &mut [Vec<Scalar>], scan_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..scan_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("pivot is nonzero");
        if !inv.is_one() {
            for v in rows[r][c..].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let (before, rest) = rows.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().expect("row r exists");
        let support: Vec<usize> = (c..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for row in before.iter_mut().chain(after.iter_mut()) {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
        }
        debug_assert!(field == pivot_row[c].field());
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn to_rows(m: &Matrix) -> Vec<Vec<Scalar>> {
    (0..m.rows).map(|i| m.row(i).to_vec()).collect()
}

/// Reduced row echelon form.
pub fn rref(m: &Matrix) -> Rref {
    let mut rows = to_rows(m);
    let pivot_cols = reduce_rows(m.field, &mut rows, m.cols);
    let data = rows.into_iter().flatten().collect();
    Rref {
        reduced: Matrix::from_vec(m.field, m.rows, m.cols, data),
        rank: pivot_cols.len(),
        pivot_cols,
    }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).rank
}

/// Which elimination computes a rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankStrategy {
    /// Field Gaussian elimination ([`rref`]).
    Gaussian,
    /// Integer/residue cross-multiplication ([`fraction_free_rank`]).
    FractionFree,
}

pub fn rank_with(m: &Matrix, strategy: RankStrategy) -> usize {
    match strategy {
        RankStrategy::Gaussian => rank(m),
        RankStrategy::FractionFree => fraction_free_rank(m),
    }
}

impl Rref {
    /// Standard free-variable basis: one vector per non-pivot column.
    pub fn nullspace_basis(&self) -> Vec<Vec<Scalar>> {
        let field = self.reduced.field;
        let cols = self.reduced.cols;
        let mut is_pivot = vec![false; cols];
        for &c in &self.pivot_cols {
            is_pivot[c] = true;
        }
        (0..cols)
            .filter(|&f| !is_pivot[f])
            .map(|free| {
                let mut v = vec![field.zero(); cols];
                v[free] = field.one();
                for (r, &pc) in self.pivot_cols.iter().enumerate() {
                    let e = &self.reduced[(r, free)];
                    if !e.is_zero() {
                        v[pc] = -e;
                    }
                }
                v
            })
            .collect()
    }
}

pub fn nullspace_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    rref(m).nullspace_basis()
}

/// Particular solution of `m x = b` with free variables zero, or `None`
/// when `b` is outside the column space.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows, "right-hand side length does not match row count");
    let mut rows = to_rows(m);
    for (row, bi) in rows.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    let pivots = reduce_rows(m.field, &mut rows, m.cols);
    if rows[pivots.len()..].iter().any(|row| !row[m.cols].is_zero()) {
        return None;
    }
    let mut x = vec![m.field.zero(); m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][m.cols].clone();
    }
    assert_eq!(m.mul_vec(&x), b, "solution failed verification");
    Some(x)
}

pub fn in_span(m: &Matrix, b: &[Scalar]) -> bool {
    solve(m, b).is_some()
}

/// A prepared solver for many right-hand sides against one matrix.
///
/// Row-reduces `[m | I]` once; each solve is then a matrix-vector
/// product. Produces exactly the solutions [`solve`] would.
#[derive(Debug, Clone)]
pub struct Solver {
    matrix: Matrix,
    transform: Matrix,
    pivot_cols: Vec<usize>,
}

impl Solver {
    pub fn new(m: &Matrix) -> Self {
        let field = m.field;
        let mut rows = to_rows(m);
        for (i, row) in rows.iter_mut().enumerate() {
            row.extend((0..m.rows).map(|k| if k == i { field.one() } else { field.zero() }));
        }
        let pivot_cols = reduce_rows(field, &mut rows, m.cols);
        let mut transform = Matrix::zeros(field, m.rows, m.rows);
        for (i, row) in rows.iter().enumerate() {
            for k in 0..m.rows {
                transform[(i, k)] = row[m.cols + k].clone();
            }
        }
        Solver {
            matrix: m.clone(),
            transform,
            pivot_cols,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.matrix.rows, "right-hand side length does not match row count");
        let y = self.transform.mul_vec(b);
        if y[self.rank()..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut x = vec![self.matrix.field.zero(); self.matrix.cols];
        for (r, &c) in self.pivot_cols.iter().enumerate() {
            x[c] = y[r].clone();
        }
        assert_eq!(self.matrix.mul_vec(&x), b, "solution failed verification");
        Some(x)
    }

    pub fn in_span(&self, b: &[Scalar]) -> bool {
        self.solve(b).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn vec_i64(field: FieldSpec, v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| field.from_i64(x)).collect()
    }

    #[test]
    fn rref_examples() {
        let id = Matrix::identity(Q, 3);
        let r = rref(&id);
        assert_eq!(r.reduced, id);
        assert_eq!((r.rank, r.pivot_cols.clone()), (3, vec![0, 1, 2]));

        let z = Matrix::zeros(Q, 2, 4);
        let r = rref(&z);
        assert_eq!(r.reduced, z);
        assert_eq!((r.rank, r.pivot_cols.len()), (0, 0));

        assert_eq!(rank(&Matrix::from_i64(Q, &[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn rref_reduced_form() {
        let m = Matrix::from_i64(Q, &[&[0, 2, 4, 2], &[1, 1, 1, 1], &[1, 2, 3, 2]]);
        let r = rref(&m);
        let expected = Matrix::from_i64(Q, &[&[1, 0, -1, 0], &[0, 1, 2, 1], &[0, 0, 0, 0]]);
        assert_eq!(r.reduced, expected);
        assert_eq!(r.pivot_cols, vec![0, 1]);
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace_basis(&Matrix::identity(Q, 4)).is_empty());
        let basis = nullspace_basis(&Matrix::zeros(Q, 2, 3));
        assert_eq!(basis, vec![vec_i64(Q, &[1, 0, 0]), vec_i64(Q, &[0, 1, 0]), vec_i64(Q, &[0, 0, 1])]);
        let m = Matrix::from_i64(Q, &[&[1, 1, 0]]);
        let basis = nullspace_basis(&m);
        assert_eq!(basis, vec![vec_i64(Q, &[-1, 1, 0]), vec_i64(Q, &[0, 0, 1])]);
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve(&Matrix::identity(Q, 2), &vec_i64(Q, &[3, 4])), Some(vec_i64(Q, &[3, 4])));
        assert_eq!(solve(&Matrix::zeros(Q, 2, 2), &vec_i64(Q, &[1, 0])), None);
        let m = Matrix::from_i64(Q, &[&[1, 1]]);
        assert_eq!(solve(&m, &vec_i64(Q, &[5])), Some(vec_i64(Q, &[5, 0])));
        assert!(in_span(&Matrix::identity(Q, 3), &vec_i64(Q, &[1, -7, 2])));
        assert!(!in_span(&Matrix::zeros(Q, 3, 2), &vec_i64(Q, &[0, 1, 0])));
    }

    #[test]
    fn zero_sized_shapes() {
        let m = Matrix::zeros(Q, 0, 3);
        assert_eq!(nullspace_basis(&m).len(), 3);
        let m = Matrix::zeros(Q, 3, 0);
        assert!(nullspace_basis(&m).is_empty());
        assert_eq!(solve(&m, &vec_i64(Q, &[0, 0, 0])), Some(vec![]));
        assert_eq!(solve(&m, &vec_i64(Q, &[0, 1, 0])), None);
    }

    #[test]
    fn prime_field_elimination() {
        let f2 = FieldSpec::prime(2).unwrap();
        // Over F_2 the rows 1 1 / 1 1 coincide, and 2 vanishes.
        let m = Matrix::from_i64(f2, &[&[1, 1, 0], &[1, 1, 2], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(fraction_free_rank(&m), 2);
        assert_eq!(rank(&Matrix::from_i64(Q, &[&[1, 1, 0], &[1, 1, 2], &[0, 1, 1]])), 3);
    }

    fn random_matrix(rng: &mut ChaCha8Rng, field: FieldSpec, rows: usize, cols: usize, density: f64) -> Matrix {
        let data = (0..rows * cols)
            .map(|_| if rng.gen_bool(density) { field.random(rng) } else { field.zero() })
            .collect();
        Matrix::from_vec(field, rows, cols, data)
    }

    proptest! {
        #[test]
        fn rank_nullity_and_kernel(seed in any::<u64>(), rows in 0usize..7, cols in 0usize..7, p in prop_oneof![Just(0u64), Just(2), Just(3), Just(7)]) {
            let field = if p == 0 { Q } else { FieldSpec::prime(p).unwrap() };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, field, rows, cols, 0.5);
            let r = rref(&m);
            let basis = r.nullspace_basis();
            prop_assert_eq!(r.rank + basis.len(), cols);
            for v in &basis {
                prop_assert!(m.mul_vec(v).iter().all(Scalar::is_zero));
            }
            prop_assert_eq!(rref(&r.reduced).reduced, r.reduced.clone());
            prop_assert_eq!(fraction_free_rank(&m), r.rank);
        }

        #[test]
        fn solve_recovers_consistent_systems(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, Q, rows, cols, 0.6);
            let x: Vec<Scalar> = (0..cols).map(|_| Q.random(&mut rng)).collect();
            let b = m.mul_vec(&x);
            let sol = solve(&m, &b);
            prop_assert!(sol.is_some());
            prop_assert_eq!(m.mul_vec(sol.as_ref().unwrap()), b.clone());
            let prepared = Solver::new(&m);
            prop_assert_eq!(prepared.solve(&b), sol);
            let other: Vec<Scalar> = (0..rows).map(|_| Q.random(&mut rng)).collect();
            prop_assert_eq!(prepared.solve(&other), solve(&m, &other));
        }
    }
}
