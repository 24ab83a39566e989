//! Averaging operators between cochain dimensions and the walks built from them.
//!
//! Every walk has two constructions here: the composition of single-step
//! averaging operators, and a direct table of its entries. The test suite
//! checks that the two agree.

use nalgebra::DMatrix;

use crate::cochain::LinOp;
use crate::complex::PureComplex;
use crate::error::{HdxError, Result};
use crate::scalar::{binomial, Scalar};

fn range_error(dim: isize, lo: isize, hi: isize) -> HdxError {
    HdxError::DimensionOutOfRange { dim, lo, hi }
}

fn check_range(value: isize, lo: isize, hi: isize) -> Result<()> {
    if value < lo || value > hi {
        return Err(range_error(value, lo, hi));
    }
    Ok(())
}

/// `d_k : C^k → C^{k+1}`, averaging a function over the `k+2` subfaces.
pub fn diff<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim() - 1)?;
    let lower = x.faces(k)?;
    let upper = x.faces(k + 1)?;
    let share = T::one() / T::from_count((k + 2) as usize);
    let mut m = DMatrix::zeros(upper.len(), lower.len());
    for (r, sigma) in upper.iter().enumerate() {
        for j in 0..sigma.len() {
            let c = x.require(&sigma.without_position(j))?;
            m[(r, c)] = share;
        }
    }
    LinOp::new(x, k, k + 1, m)
}

/// `d*_k : C^{k+1} → C^k`, the link-weighted average over cofaces.
///
/// Entry `(τ, τ∪v)` is the link weight `w_τ(v) = w(τ∪v) / ((k+2) w(τ))`.
pub fn adjoint_diff<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim() - 1)?;
    let lower = x.faces(k)?;
    let upper = x.faces(k + 1)?;
    let w_lo = x.weights(k)?;
    let w_up = x.weights(k + 1)?;
    let kk = T::from_count((k + 2) as usize);
    let mut m = DMatrix::zeros(lower.len(), upper.len());
    for (c, sigma) in upper.iter().enumerate() {
        for j in 0..sigma.len() {
            let r = x.require(&sigma.without_position(j))?;
            m[(r, c)] = w_up[c] / (kk * w_lo[r]);
        }
    }
    LinOp::new(x, k + 1, k, m)
}

/// `d_{k+i−1} ⋯ d_k : C^k → C^{k+i}`; the identity when `i = 0`.
pub fn multi_up<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim())?;
    check_range(i, 0, x.top_dim() - k)?;
    let mut acc = LinOp::identity(x, k)?;
    for j in k..k + i {
        acc = diff(x, j)?.compose(&acc)?;
    }
    Ok(acc)
}

/// `d*_k ⋯ d*_{k+i−1} : C^{k+i} → C^k`; the identity when `i = 0`.
pub fn multi_down<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim())?;
    check_range(i, 0, x.top_dim() - k)?;
    let mut acc = LinOp::identity(x, k + i)?;
    for j in (k..k + i).rev() {
        acc = adjoint_diff(x, j)?.compose(&acc)?;
    }
    Ok(acc)
}

/// Direct form of [`multi_up`]: the uniform average over the `k`-subfaces.
pub fn multi_up_closed<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim())?;
    check_range(i, 0, x.top_dim() - k)?;
    let lower = x.faces(k)?;
    let upper = x.faces(k + i)?;
    let share = T::one() / binomial::<T>((k + i + 1) as usize, (k + 1) as usize);
    let mut m = DMatrix::zeros(upper.len(), lower.len());
    for (r, sigma) in upper.iter().enumerate() {
        for tau in sigma.subfaces((k + 1) as usize) {
            m[(r, x.require(&tau)?)] = share;
        }
    }
    LinOp::new(x, k, k + i, m)
}

/// Direct form of [`multi_down`]: the link expectation `E_{τ∈X_σ(i−1)} f(σ∪τ)`.
pub fn multi_down_closed<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim())?;
    check_range(i, 0, x.top_dim() - k)?;
    let lower = x.faces(k)?;
    let upper = x.faces(k + i)?;
    let w_lo = x.weights(k)?;
    let w_up = x.weights(k + i)?;
    let c = binomial::<T>((k + i + 1) as usize, (k + 1) as usize);
    let mut m = DMatrix::zeros(lower.len(), upper.len());
    for (col, rho) in upper.iter().enumerate() {
        for sigma in rho.subfaces((k + 1) as usize) {
            let r = x.require(&sigma)?;
            m[(r, col)] = w_up[col] / (c * w_lo[r]);
        }
    }
    LinOp::new(x, k + i, k, m)
}

/// `i`-fold up-down walk `d*_k⋯d*_{k+i−1} d_{k+i−1}⋯d_k` on `C^k`.
pub fn up_down<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LinOp<T>> {
    multi_down(x, k, i)?.compose(&multi_up(x, k, i)?)
}

/// `i`-fold down-up walk `d_{k−1}⋯d_{k−i} d*_{k−i}⋯d*_{k−1}` on `C^k`.
///
/// With `i = 1` this is the single-step down-up walk; with `i = k+1` the chain
/// passes through the empty face and the result is [`constant_projection`].
pub fn down_up<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim())?;
    check_range(i, 0, k + 1)?;
    multi_up(x, k - i, i)?.compose(&multi_down(x, k - i, i)?)
}

/// Entry table of the single-step up-down walk on `C^k`.
///
/// Diagonal `1/(k+2)`; `(σ, τ)` with `σ ∪ τ ∈ X(k+1)` gets `w_σ(τ∖σ)/(k+2)`.
pub fn up_down_table<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    check_range(k, -1, x.top_dim() - 1)?;
    let faces = x.faces(k)?;
    let w = x.weights(k)?;
    let kk = T::from_count((k + 2) as usize);
    let mut m = DMatrix::zeros(faces.len(), faces.len());
    for r in 0..faces.len() {
        m[(r, r)] = T::one() / kk;
    }
    for (rho, w_rho) in x.faces(k + 1)?.iter().zip(x.weights(k + 1)?) {
        for a in 0..rho.len() {
            let s = x.require(&rho.without_position(a))?;
            // w_σ(v) = w(σ∪v) / ((k+2) w(σ))
            let link_w = *w_rho / (kk * w[s]);
            for b in 0..rho.len() {
                if a != b {
                    let t = x.require(&rho.without_position(b))?;
                    m[(s, t)] += link_w / kk;
                }
            }
        }
    }
    LinOp::new(x, k, k, m)
}

/// Entry table of the single-step down-up walk on `C^k`, `k ≥ 0`.
///
/// Diagonal `(1/(k+1)) Σ_{τ⊂σ} w_τ(σ∖τ)`; off-diagonal `(1/(k+1)) w_{σ∩τ}(τ∖σ)`
/// when `σ ∩ τ ∈ X(k−1)`.
pub fn down_up_table<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    check_range(k, 0, x.top_dim())?;
    let faces = x.faces(k)?;
    let w = x.weights(k)?;
    let w_lo = x.weights(k - 1)?;
    let kk = T::from_count((k + 1) as usize);
    let cofaces = x.cofaces(k - 1)?;
    let mut m = DMatrix::zeros(faces.len(), faces.len());
    for (t, members) in cofaces.iter().enumerate() {
        // Link weight of each member σ ⊃ τ seen from τ.
        for &s in members {
            for &u in members {
                m[(s, u)] += w[u] / (kk * w_lo[t]) / kk;
            }
        }
    }
    LinOp::new(x, k, k, m)
}

/// Non-lazy walk on `C^k`: move from `σ` to `τ ≠ σ` with `σ∪τ ∈ X(k+1)`
/// with probability `w_σ(τ∖σ)/(k+1)`.
pub fn nonlazy<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    check_range(k, 0, x.top_dim() - 1)?;
    let faces = x.faces(k)?;
    let w = x.weights(k)?;
    let link_scale = T::from_count((k + 2) as usize);
    let kk = T::from_count((k + 1) as usize);
    let mut m = DMatrix::zeros(faces.len(), faces.len());
    for (rho, w_rho) in x.faces(k + 1)?.iter().zip(x.weights(k + 1)?) {
        for a in 0..rho.len() {
            let s = x.require(&rho.without_position(a))?;
            let link_w = *w_rho / (link_scale * w[s]);
            for b in 0..rho.len() {
                if a != b {
                    let t = x.require(&rho.without_position(b))?;
                    m[(s, t)] += link_w / kk;
                }
            }
        }
    }
    LinOp::new(x, k, k, m)
}

/// `((k+2)/(k+1)) U_k − (1/(k+1)) I`, the non-lazy walk recovered from the up-down walk.
pub fn nonlazy_from_updown<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    check_range(k, 0, x.top_dim() - 1)?;
    let kk = T::from_count((k + 1) as usize);
    let u = up_down(x, k, 1)?;
    u.combine(
        T::from_count((k + 2) as usize) / kk,
        &LinOp::identity(x, k)?,
        -T::one() / kk,
    )
}

/// `((i+1)/i) U_0^i − (1/i) I` on vertex cochains, `1 ≤ i ≤ d`.
pub fn nonlazy_from_iup<T: Scalar>(x: &PureComplex<T>, i: isize) -> Result<LinOp<T>> {
    check_range(i, 1, x.top_dim())?;
    let ii = T::from_count(i as usize);
    up_down(x, 0, i)?.combine(
        T::from_count((i + 1) as usize) / ii,
        &LinOp::identity(x, 0)?,
        -T::one() / ii,
    )
}

/// `f ↦ ⟨f, 1⟩ · 1` on `C^k`, i.e. the rank-one matrix `1 wᵀ`.
pub fn constant_projection<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<LinOp<T>> {
    let w = x.weights(k)?;
    let n = w.len();
    let m = DMatrix::from_fn(n, n, |_, c| w[c]);
    LinOp::new(x, k, k, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{inner_product, Cochain};
    use crate::complex::Face;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn t3() -> PureComplex<f64> {
        PureComplex::from_facets(&[vec![0, 1, 2]], None).unwrap()
    }

    fn c42() -> PureComplex<f64> {
        PureComplex::from_facets(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap()
    }

    fn skewed() -> PureComplex<f64> {
        PureComplex::from_facets(
            &[vec![0, 1, 2], vec![1, 2, 3], vec![0, 2, 3], vec![2, 3, 4]],
            Some(&[1.0, 2.0, 3.0, 0.5]),
        )
        .unwrap()
    }

    #[test]
    fn diff_averages_endpoints() {
        let x = t3();
        let d = diff(&x, 0).unwrap();
        let f = Cochain::indicator(&x, &Face::vertex(0)).unwrap();
        let g = d.apply(&f).unwrap();
        assert_eq!(g.values()[0], 0.5);
        assert!(d.row_sum_defect() < 1e-15);
        let lift = diff(&x, -1).unwrap();
        let c = Cochain::constant(&x, -1, 2.5).unwrap();
        assert!(lift.apply(&c).unwrap().values().iter().all(|v| *v == 2.5));
        assert!(diff(&x, 2).is_err());
    }

    #[test]
    fn adjoint_diff_on_triangle_edges() {
        let x = t3();
        let g = Cochain::from_vec(&x, 1, vec![1.0, -1.0, 0.0]).unwrap();
        let h = adjoint_diff(&x, 0).unwrap().apply(&g).unwrap();
        let want = [0.0, 0.5, -0.5];
        for (a, b) in h.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn adjoint_matches_weighted_transpose() {
        let x = skewed();
        for k in -1..2 {
            let d = diff(&x, k).unwrap();
            let ds = adjoint_diff(&x, k).unwrap();
            let w_lo = x.weights(k).unwrap();
            let w_up = x.weights(k + 1).unwrap();
            let m = d.matrix();
            for r in 0..w_lo.len() {
                for c in 0..w_up.len() {
                    let want = m[(c, r)] * w_up[c] / w_lo[r];
                    assert!((ds.matrix()[(r, c)] - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn multi_operators_match_closed_forms() {
        for x in [t3(), c42(), skewed()] {
            for k in -1..=2 {
                for i in 0..=(2 - k) {
                    let a = multi_up(&x, k, i).unwrap();
                    let b = multi_up_closed(&x, k, i).unwrap();
                    assert!(a.max_abs_diff(&b).unwrap() < 1e-12, "up k={k} i={i}");
                    let a = multi_down(&x, k, i).unwrap();
                    let b = multi_down_closed(&x, k, i).unwrap();
                    assert!(a.max_abs_diff(&b).unwrap() < 1e-12, "down k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn multi_down_to_empty_face_is_global_mean() {
        let x = t3();
        let f = Cochain::from_vec(&x, 1, vec![3.0, -1.0, 4.0]).unwrap();
        let m = multi_down(&x, -1, 2).unwrap().apply(&f).unwrap();
        let one = Cochain::ones(&x, 1).unwrap();
        let mean = inner_product(&x, &f, &one).unwrap();
        assert!((m.values()[0] - mean).abs() < 1e-15);
    }

    #[test]
    fn walk_tables_match_compositions() {
        for x in [t3(), c42(), skewed()] {
            for k in -1..2 {
                let u = up_down(&x, k, 1).unwrap();
                let t = up_down_table(&x, k).unwrap();
                assert!(u.max_abs_diff(&t).unwrap() < 1e-12);
            }
            for k in 0..=2 {
                let d = down_up(&x, k, 1).unwrap();
                let t = down_up_table(&x, k).unwrap();
                assert!(d.max_abs_diff(&t).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn up_down_diagonal_on_c42_edges() {
        let u = up_down(&c42(), 1, 1).unwrap();
        for r in 0..6 {
            assert!((u.matrix()[(r, r)] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn full_down_up_is_constant_projection() {
        for x in [c42(), skewed()] {
            for r in 0..=2 {
                let d = down_up(&x, r, r + 1).unwrap();
                let p = constant_projection(&x, r).unwrap();
                assert!(d.max_abs_diff(&p).unwrap() < 1e-12);
            }
        }
        assert!(down_up(&c42(), 1, 3).is_err());
    }

    #[test]
    fn nonlazy_on_triangle_vertices() {
        let x = t3();
        let m = nonlazy(&x, 0).unwrap();
        let want = DMatrix::from_fn(3, 3, |r, c| if r == c { 0.0 } else { 0.5 });
        assert!((m.matrix() - want).amax() < 1e-15);
    }

    #[test]
    fn nonlazy_on_c42_edges_has_four_neighbours() {
        let m = nonlazy(&c42(), 1).unwrap();
        for r in 0..6 {
            let row = m.matrix().row(r);
            assert_eq!(row.iter().filter(|v| **v > 0.0).count(), 4);
            assert!(row.iter().all(|v| *v == 0.0 || (*v - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn nonlazy_identities() {
        for x in [t3(), c42(), skewed()] {
            for k in 0..2 {
                let m = nonlazy(&x, k).unwrap();
                let alt = nonlazy_from_updown(&x, k).unwrap();
                assert!(m.max_abs_diff(&alt).unwrap() < 1e-12);
                assert!(m.row_sum_defect() < 1e-12);
                let w = DVector::from_column_slice(x.weights(k).unwrap());
                assert!((m.matrix().transpose() * &w - &w).amax() < 1e-12);
            }
            for i in 1..=2 {
                let a = nonlazy_from_iup(&x, i).unwrap();
                assert!(a.max_abs_diff(&nonlazy(&x, 0).unwrap()).unwrap() < 1e-12);
            }
        }
        assert!(nonlazy_from_iup(&t3(), 3).is_err());
        assert!(nonlazy_from_iup(&t3(), 0).is_err());
    }

    #[test]
    fn range_errors() {
        let x = t3();
        assert!(multi_up(&x, 0, 3).is_err());
        assert!(multi_down(&x, -2, 1).is_err());
        assert!(up_down(&x, 2, 1).is_err());
        assert!(nonlazy(&x, 2).is_err());
        assert!(down_up_table(&x, -1).is_err());
    }

    proptest! {
        #[test]
        fn adjointness_on_random_pairs(
            f in proptest::collection::vec(-5.0f64..5.0, 5),
            g in proptest::collection::vec(-5.0f64..5.0, 8),
        ) {
            let x = skewed();
            let f = Cochain::from_vec(&x, 0, f).unwrap();
            let g = Cochain::from_vec(&x, 1, g).unwrap();
            let lhs = inner_product(&x, &diff(&x, 0).unwrap().apply(&f).unwrap(), &g).unwrap();
            let rhs = inner_product(&x, &f, &adjoint_diff(&x, 0).unwrap().apply(&g).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn walks_fix_constants(k in 0isize..2, c in -3.0f64..3.0) {
            let x = skewed();
            let one = Cochain::constant(&x, k, c).unwrap();
            for op in [up_down(&x, k, 1).unwrap(), nonlazy(&x, k).unwrap(), down_up(&x, k, 1).unwrap()] {
                let out = op.apply(&one).unwrap();
                prop_assert!(out.values().iter().all(|v| (v - c).abs() < 1e-12));
            }
        }
    }
}
