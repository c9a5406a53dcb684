//! Cohomology of one spot `C^{n-1} → C^n → C^{n+1}` of a complex, given
//! the two assembled differentials.

use std::sync::OnceLock;

use serde::Serialize;

use crate::linalg::{rank_with, rref, Matrix, RankStrategy, Solver};
use crate::scalars::{FieldSpec, Scalar};

/// Dimensions of `ker(outgoing) / im(incoming)` computed with ranks only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BettiCount {
    pub degree: usize,
    pub dim_cochains: usize,
    pub dim_kernel: usize,
    pub dim_image_prev: usize,
    pub betti: usize,
}

impl BettiCount {
    pub fn compute(degree: usize, incoming: &Matrix, outgoing: &Matrix, strategy: RankStrategy) -> Self {
        assert_eq!(incoming.rows(), outgoing.cols(), "differentials do not compose");
        let dim_cochains = outgoing.cols();
        let dim_kernel = dim_cochains - rank_with(outgoing, strategy);
        let dim_image_prev = rank_with(incoming, strategy);
        assert!(dim_image_prev <= dim_kernel, "image is larger than kernel: not a complex");
        BettiCount {
            degree,
            dim_cochains,
            dim_kernel,
            dim_image_prev,
            betti: dim_kernel - dim_image_prev,
        }
    }
}

/// A cohomology space with explicit representatives and class coordinates.
///
/// The image is spanned by the pivot columns of the incoming differential.
/// Representatives are the kernel basis vectors that stay independent of
/// the image when `[image | kernel]` is row reduced, so the choice is
/// deterministic.
#[derive(Debug)]
pub struct Cohomology {
    pub counts: BettiCount,
    /// A basis of a complement of the image inside the kernel, flattened.
    pub representatives: Vec<Vec<Scalar>>,
    image_basis: Vec<Vec<Scalar>>,
    field: FieldSpec,
    classifier: OnceLock<Solver>,
}

impl Cohomology {
    pub fn compute(degree: usize, incoming: &Matrix, outgoing: &Matrix) -> Self {
        assert_eq!(incoming.rows(), outgoing.cols(), "differentials do not compose");
        let field = outgoing.field();
        let dim = outgoing.cols();
        let out = rref(outgoing);
        let kernel = out.nullspace_basis();
        let inc = rref(incoming);
        let image_basis: Vec<Vec<Scalar>> = inc.pivot_cols.iter().map(|&j| incoming.column(j)).collect();

        let mut columns = image_basis.clone();
        columns.extend(kernel.iter().cloned());
        let joint = rref(&Matrix::from_columns(field, dim, &columns));
        let representatives: Vec<Vec<Scalar>> = joint
            .pivot_cols
            .iter()
            .filter(|&&c| c >= image_basis.len())
            .map(|&c| columns[c].clone())
            .collect();
        assert_eq!(joint.rank, kernel.len(), "image is not contained in the kernel");

        let counts = BettiCount {
            degree,
            dim_cochains: dim,
            dim_kernel: kernel.len(),
            dim_image_prev: image_basis.len(),
            betti: representatives.len(),
        };
        Cohomology {
            counts,
            representatives,
            image_basis,
            field,
            classifier: OnceLock::new(),
        }
    }

    pub fn betti(&self) -> usize {
        self.counts.betti
    }

    fn classifier(&self) -> &Solver {
        self.classifier.get_or_init(|| {
            let mut columns = self.image_basis.clone();
            columns.extend(self.representatives.iter().cloned());
            Solver::new(&Matrix::from_columns(self.field, self.counts.dim_cochains, &columns))
        })
    }

    /// Coordinates of the class of `z` against [`Self::representatives`],
    /// or `None` if `z` is not a cocycle.
    pub fn class_coords(&self, z: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(z.len(), self.counts.dim_cochains, "cochain has the wrong dimension");
        let x = self.classifier().solve(z)?;
        Some(x[self.image_basis.len()..].to_vec())
    }

    /// True iff `z` lies in the image of the incoming differential.
    pub fn is_coboundary(&self, z: &[Scalar]) -> bool {
        self.class_coords(z).is_some_and(|c| c.iter().all(Scalar::is_zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn two_term_complex() {
        // C0 = Q --[1,1]ᵀ--> C1 = Q² --[1,-1]--> C2 = Q: exact in the middle.
        let incoming = Matrix::from_i64(Q, &[&[1], &[1]]);
        let outgoing = Matrix::from_i64(Q, &[&[1, -1]]);
        let h = Cohomology::compute(1, &incoming, &outgoing);
        assert_eq!(h.betti(), 0);
        assert!(h.is_coboundary(&[Q.from_i64(2), Q.from_i64(2)]));
        assert_eq!(h.class_coords(&[Q.from_i64(1), Q.from_i64(0)]), None);

        let zero_out = Matrix::zeros(Q, 1, 2);
        let h = Cohomology::compute(1, &incoming, &zero_out);
        assert_eq!(h.betti(), 1);
        assert_eq!(h.representatives, vec![vec![Q.from_i64(1), Q.from_i64(0)]]);
        // (3, 5) = 5·(1, 1) − 2·(1, 0)
        let c = h.class_coords(&[Q.from_i64(3), Q.from_i64(5)]).unwrap();
        assert_eq!(c, vec![Q.from_i64(-2)]);
        let counts = BettiCount::compute(1, &incoming, &zero_out, RankStrategy::FractionFree);
        assert_eq!(counts, h.counts);
    }

    #[test]
    fn empty_spaces() {
        let h = Cohomology::compute(0, &Matrix::zeros(Q, 0, 0), &Matrix::zeros(Q, 3, 0));
        assert_eq!(h.betti(), 0);
        assert_eq!(h.class_coords(&[]), Some(vec![]));
    }
}
