//! Kernels and least-norm solves through the Gram matrix `AᵀA`.
//!
//! nalgebra's SVD can leave reconstruction errors near `1e−6` on the small
//! incidence-type matrices used here, while its symmetric eigensolver stays at
//! machine precision, so both helpers go through `SymmetricEigen`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::scalar::Scalar;

/// Eigenvalues of `AᵀA` at or below this fraction of the largest count as zero.
const RELATIVE_ZERO: f64 = 1e-12;

fn gram_eigen<T: Scalar>(a: &DMatrix<T>) -> (SymmetricEigen<T, nalgebra::Dyn>, T) {
    let gram = a.transpose() * a;
    let sym = (&gram + gram.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(sym);
    let top = eig.eigenvalues.iter().fold(T::zero(), |m, v| m.max(*v));
    let cutoff = T::tol(RELATIVE_ZERO) * top.max(T::one());
    (eig, cutoff)
}

/// Orthonormal basis of `ker A`, one column per null direction.
pub(crate) fn kernel<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let (eig, cutoff) = gram_eigen(a);
    let keep: Vec<usize> = (0..n).filter(|i| eig.eigenvalues[*i] <= cutoff).collect();
    DMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

/// Least-norm minimizer of `‖A x − b‖`, refined once against its own residual.
pub(crate) fn least_norm_solve<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> DVector<T> {
    let n = a.ncols();
    if n == 0 {
        return DVector::zeros(0);
    }
    let (eig, cutoff) = gram_eigen(a);
    let solve = |rhs: &DVector<T>| {
        let atb = a.transpose() * rhs;
        let mut x = DVector::zeros(n);
        for (i, lam) in eig.eigenvalues.iter().enumerate() {
            if *lam > cutoff {
                let v = eig.eigenvectors.column(i);
                x += v * (v.dot(&atb) / *lam);
            }
        }
        x
    };
    let x = solve(b);
    let r = b - a * &x;
    x + solve(&r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        let a = DMatrix::<f64>::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0]);
        let k = kernel(&a);
        assert_eq!(k.ncols(), 1);
        assert!((&a * &k).amax() < 1e-14);
        assert!((k.column(0).norm() - 1.0).abs() < 1e-14);
        assert_eq!(kernel(&DMatrix::<f64>::zeros(0, 4)).ncols(), 4);
    }

    #[test]
    fn least_norm_solution_is_orthogonal_to_kernel() {
        let a = DMatrix::<f64>::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, 2.0]);
        let x = least_norm_solve(&a, &b);
        assert!((&a * &x - &b).amax() < 1e-14);
        let k = kernel(&a);
        assert!((k.transpose() * &x).amax() < 1e-14);
    }

    #[test]
    fn inconsistent_system_gives_projection() {
        let a = DMatrix::<f64>::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 6.0]);
        assert!((least_norm_solve(&a, &b)[0] - 3.0).abs() < 1e-14);
    }
}
