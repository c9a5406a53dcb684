//! Truncated power series with matrix coefficients.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalars::FieldSpec;

/// Coefficient `i` of a series, or `None` past its stored length.
pub(crate) fn coeff(series: &[Matrix], i: usize) -> Option<&Matrix> {
    series.get(i)
}

/// Coefficients `0..=order` of the product `(Σ aᵢtⁱ)(Σ bⱼtʲ)`.
pub fn series_product(field: FieldSpec, a: &[Matrix], b: &[Matrix], shape: (usize, usize), order: usize) -> Vec<Matrix> {
    (0..=order)
        .map(|l| {
            let mut acc = Matrix::zeros(field, shape.0, shape.1);
            for i in 0..=l {
                if let (Some(x), Some(y)) = (coeff(a, i), coeff(b, l - i)) {
                    acc = acc.add(&x.mul(y));
                }
            }
            acc
        })
        .collect()
}

/// The inverse of `Σ ψᵢtⁱ` modulo `t^{len}`, given `ψ₀ = I`.
///
/// Uses `ψ̄₀ = I`, `ψ̄_l = −Σ_{j=1..l} ψ_j ψ̄_{l−j}` and checks the product.
pub fn series_inverse(series: &[Matrix]) -> Result<Vec<Matrix>> {
    let lead = series
        .first()
        .ok_or_else(|| Error::Precondition("cannot invert an empty series".into()))?;
    let field = lead.field();
    let (r, c) = lead.shape();
    if r != c || *lead != Matrix::identity(field, r) {
        return Err(Error::Precondition("series inverse needs an identity leading coefficient".into()));
    }
    let mut inv = vec![Matrix::identity(field, r)];
    for l in 1..series.len() {
        let mut acc = Matrix::zeros(field, r, r);
        for j in 1..=l {
            acc = acc.add(&series[j].mul(&inv[l - j]));
        }
        inv.push(acc.neg());
    }
    let order = series.len() - 1;
    let product = series_product(field, series, &inv, (r, r), order);
    let left = series_product(field, &inv, series, (r, r), order);
    for (l, (p, q)) in product.iter().zip(&left).enumerate() {
        let expected = if l == 0 { Matrix::identity(field, r) } else { Matrix::zeros(field, r, r) };
        if *p != expected || *q != expected {
            return Err(Error::Internal(format!("series inverse failed its product check at t^{l}")));
        }
    }
    Ok(inv)
}

/// A pair of series automorphisms `Ψ_t` of `M` and `Θ_t` of `N` with
/// identity leading coefficients. Coefficients past `order` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalIsomorphism {
    psi: Vec<Matrix>,
    theta: Vec<Matrix>,
}

impl FormalIsomorphism {
    pub fn new(psi: Vec<Matrix>, theta: Vec<Matrix>) -> Result<Self> {
        if psi.is_empty() || psi.len() != theta.len() {
            return Err(Error::Shape(format!(
                "isomorphism needs equally many psi and theta coefficients (got {} and {})",
                psi.len(),
                theta.len()
            )));
        }
        for (name, series) in [("psi", &psi), ("theta", &theta)] {
            let (r, c) = series[0].shape();
            if r != c {
                return Err(Error::Shape(format!("{name}[0] is {r}x{c}, not square")));
            }
            if let Some(i) = series.iter().position(|m| m.shape() != (r, r)) {
                return Err(Error::Shape(format!("{name}[{i}] is not {r}x{r}")));
            }
            if series[0] != Matrix::identity(series[0].field(), r) {
                return Err(Error::Precondition(format!("{name}[0] must be the identity")));
            }
        }
        Ok(FormalIsomorphism { psi, theta })
    }

    pub fn identity(field: FieldSpec, m: usize, n: usize, order: usize) -> Self {
        let mut psi = vec![Matrix::zeros(field, m, m); order + 1];
        let mut theta = vec![Matrix::zeros(field, n, n); order + 1];
        psi[0] = Matrix::identity(field, m);
        theta[0] = Matrix::identity(field, n);
        FormalIsomorphism { psi, theta }
    }

    /// `(I + ψtⁿ, I + θtⁿ)`.
    pub fn elementary(psi_n: &Matrix, theta_n: &Matrix, n: usize) -> Self {
        assert!(n >= 1);
        let mut iso = Self::identity(psi_n.field(), psi_n.rows(), theta_n.rows(), n);
        iso.psi[n] = psi_n.clone();
        iso.theta[n] = theta_n.clone();
        iso
    }

    pub fn order(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn psi(&self) -> &[Matrix] {
        &self.psi
    }

    pub fn theta(&self) -> &[Matrix] {
        &self.theta
    }

    /// The series composite `other ∘ self`, truncated at `order`.
    pub fn then(&self, other: &FormalIsomorphism, order: usize) -> FormalIsomorphism {
        let field = self.psi[0].field();
        let m = self.psi[0].rows();
        let n = self.theta[0].rows();
        FormalIsomorphism {
            psi: series_product(field, &other.psi, &self.psi, (m, m), order),
            theta: series_product(field, &other.theta, &self.theta, (n, n), order),
        }
    }

    /// Coefficients `0..=order`, zero-padded.
    pub(crate) fn padded(&self, order: usize) -> (Vec<Matrix>, Vec<Matrix>) {
        let pad = |s: &[Matrix]| -> Vec<Matrix> {
            let z = Matrix::zeros(s[0].field(), s[0].rows(), s[0].cols());
            (0..=order).map(|i| s.get(i).cloned().unwrap_or_else(|| z.clone())).collect()
        };
        (pad(&self.psi), pad(&self.theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn random_matrix(field: FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_vec(field, n, n, (0..n * n).map(|_| field.random(rng)).collect())
    }

    #[test]
    fn identity_series_is_its_own_inverse() {
        let s = vec![Matrix::identity(Q, 3), Matrix::zeros(Q, 3, 3), Matrix::zeros(Q, 3, 3)];
        assert_eq!(series_inverse(&s).unwrap(), s);
    }

    #[test]
    fn geometric_series() {
        let a = Matrix::from_i64(Q, &[&[1, 2], &[0, 3]]);
        let s = vec![Matrix::identity(Q, 2), a.clone(), Matrix::zeros(Q, 2, 2), Matrix::zeros(Q, 2, 2)];
        let inv = series_inverse(&s).unwrap();
        let a2 = a.mul(&a);
        assert_eq!(inv, vec![Matrix::identity(Q, 2), a.neg(), a2.clone(), a2.mul(&a).neg()]);
    }

    #[test]
    fn random_series_products() {
        for field in [Q, FieldSpec::prime(5).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..10 {
                let mut s = vec![Matrix::identity(field, 3)];
                s.extend((0..4).map(|_| random_matrix(field, 3, &mut rng)));
                let inv = series_inverse(&s).unwrap();
                let p = series_product(field, &s, &inv, (3, 3), 4);
                assert_eq!(p[0], Matrix::identity(field, 3));
                assert!(p[1..].iter().all(Matrix::is_zero));
            }
        }
    }

    #[test]
    fn non_identity_lead_is_rejected() {
        let s = vec![Matrix::from_i64(Q, &[&[2]])];
        assert!(matches!(series_inverse(&s), Err(Error::Precondition(_))));
        assert!(series_inverse(&[]).is_err());
        assert!(FormalIsomorphism::new(s.clone(), s).is_err());
    }

    #[test]
    fn composition_with_identity() {
        let psi1 = Matrix::from_i64(Q, &[&[0, 1], &[1, 0]]);
        let theta1 = Matrix::from_i64(Q, &[&[5]]);
        let e = FormalIsomorphism::elementary(&psi1, &theta1, 2);
        let id = FormalIsomorphism::identity(Q, 2, 1, 2);
        assert_eq!(e.then(&id, 2), e);
        assert_eq!(id.then(&e, 2), e);
        assert_eq!(e.order(), 2);
    }
}
