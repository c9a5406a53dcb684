//! Fraction-free elimination, kept independent of [`super::rref`] so the
//! two rank computations cross-check each other.
//!
//! Over ℚ every row is scaled to a primitive integer vector and eliminated
//! with integer cross-multiplication (`row ← a·row − b·pivot_row`),
//! followed by content removal. Over 𝔽_p the same cross-multiplication
//! runs on residues without any inversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::Matrix;
use crate::scalars::{FieldSpec, Scalar};

pub fn fraction_free_rank(m: &Matrix) -> usize {
    match m.field() {
        FieldSpec::Rationals => integer_rank(integer_rows(m)),
        FieldSpec::PrimeField(p) => residue_rank(m, p),
    }
}

fn integer_rows(m: &Matrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::from(1), |acc, s| match s {
                Scalar::Rational(r) => acc.lcm(&r.denom()),
                Scalar::Residue { .. } => unreachable!("rational matrix"),
            });
            row.iter()
                .map(|s| match s {
                    Scalar::Rational(r) => r.numer() * (&lcm / r.denom()),
                    Scalar::Residue { .. } => unreachable!("rational matrix"),
                })
                .collect()
        })
        .collect()
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g > BigInt::from(1) {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (top, bottom) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let a = &pivot_row[c];
        for row in bottom.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let g = a.gcd(&row[c]);
            let ka = a / &g;
            let kb = &row[c] / &g;
            for j in c..cols {
                let v = &ka * &row[j] - &kb * &pivot_row[j];
                row[j] = v;
            }
            debug_assert!(row[c].is_zero());
            make_primitive(row);
        }
        rank += 1;
    }
    rank
}

fn residue_rank(m: &Matrix, p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|s| match s {
                    Scalar::Residue { value, .. } => *value,
                    Scalar::Rational(_) => unreachable!("residue matrix"),
                })
                .collect()
        })
        .collect();
    let mulp = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let cols = m.cols();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let (top, bottom) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let a = pivot_row[c];
        for row in bottom.iter_mut() {
            let b = row[c];
            if b == 0 {
                continue;
            }
            for j in c..cols {
                let lhs = mulp(a, row[j]);
                let rhs = mulp(b, pivot_row[j]);
                row[j] = ((lhs as u128 + p as u128 - rhs as u128) % p as u128) as u64;
            }
        }
        rank += 1;
    }
    rank
}
