//! Oriented cochains, the coboundary operator, minimal representatives and
//! perfectly balanced face sets.
//!
//! The orientation of every face is its ascending vertex order. A stored value
//! `f(σ)` is the value on that ordering; any other ordering of the same
//! vertices evaluates to `sign(π) f(σ)`.

use nalgebra::{DMatrix, DVector};

use crate::cochain::{mean, Cochain, LinOp};
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::level::level_space;
use crate::linalg::least_norm_solve;
use crate::scalar::Scalar;

/// Parity of the permutation sorting `tuple`; `None` if a vertex repeats.
pub fn permutation_sign(tuple: &[usize]) -> Option<i8> {
    let mut inversions = 0usize;
    for a in 0..tuple.len() {
        for b in a + 1..tuple.len() {
            match tuple[a].cmp(&tuple[b]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// An alternating cochain, stored by its values on ascending vertex orders.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedCochain<T: Scalar> {
    cochain: Cochain<T>,
}

impl<T: Scalar> OrientedCochain<T> {
    pub fn new(cochain: Cochain<T>) -> Self {
        Self { cochain }
    }

    pub fn cochain(&self) -> &Cochain<T> {
        &self.cochain
    }

    pub fn into_cochain(self) -> Cochain<T> {
        self.cochain
    }

    pub fn dim(&self) -> isize {
        self.cochain.dim()
    }

    /// Value on an arbitrarily ordered vertex tuple.
    pub fn eval(&self, x: &PureComplex<T>, tuple: &[usize]) -> Option<T> {
        let sign = permutation_sign(tuple)?;
        let face = Face::new(tuple.to_vec()).ok()?;
        let v = self.cochain.get(x, &face)?;
        Some(if sign > 0 { v } else { -v })
    }
}

/// `δ_i`: `(δf)(σ_0,…,σ_{i+1}) = Σ_j (−1)^j f(σ with vertex j removed)`.
///
/// `δ_{−1}` sends the value at the empty face to the constant vertex function.
pub fn coboundary<T: Scalar>(x: &PureComplex<T>, i: isize) -> Result<LinOp<T>> {
    if i < -1 || i > x.top_dim() - 1 {
        return Err(HdxError::DimensionOutOfRange {
            dim: i,
            lo: -1,
            hi: x.top_dim() - 1,
        });
    }
    let upper = x.faces(i + 1)?;
    let mut m = DMatrix::zeros(upper.len(), x.num_faces(i)?);
    for (r, sigma) in upper.iter().enumerate() {
        for j in 0..sigma.len() {
            let c = x.require(&sigma.without_position(j))?;
            m[(r, c)] = if j % 2 == 0 { T::one() } else { -T::one() };
        }
    }
    LinOp::new(x, i, i + 1, m)
}

/// Projection of `f` onto the weighted orthogonal complement of `im δ_{k−1}`,
/// the unique least-norm element of `f + im δ_{k−1}`.
pub fn minimal_representative<T: Scalar>(
    x: &PureComplex<T>,
    f: &OrientedCochain<T>,
) -> Result<OrientedCochain<T>> {
    let k = f.dim();
    if k < 0 {
        return Err(HdxError::DimensionOutOfRange {
            dim: k,
            lo: 0,
            hi: x.top_dim(),
        });
    }
    let delta = coboundary(x, k - 1)?;
    let w = x.weights(k)?;
    let a = delta.matrix();
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * w[r].sqrt());
    let rhs = DVector::from_iterator(
        w.len(),
        f.cochain.values().iter().zip(w).map(|(v, w)| *v * w.sqrt()),
    );
    let g = least_norm_solve(&scaled, &rhs);
    let correction = a * g;
    Ok(OrientedCochain::new(Cochain::new(
        x,
        k,
        f.cochain.values() - correction,
    )?))
}

/// Largest `|⟨f, δ e_τ⟩|` over the standard basis of `(k−1)`-cochains.
pub fn minimality_certificate<T: Scalar>(x: &PureComplex<T>, f: &OrientedCochain<T>) -> Result<T> {
    let k = f.dim();
    let delta = coboundary(x, k - 1)?;
    let w = x.weights(k)?;
    let wf = DVector::from_iterator(w.len(), f.cochain.values().iter().zip(w).map(|(v, w)| *v * *w));
    Ok((delta.matrix().transpose() * wf).amax())
}

/// `|E_{v∈X_σ(0)} f(v, σ_0, …, σ_{k−1})|` for every `σ ∈ X(k−1)`.
///
/// The new vertex is placed first and the value picks up the sign of the
/// permutation that sorts the tuple.
pub fn local_minimality_residuals<T: Scalar>(
    x: &PureComplex<T>,
    f: &OrientedCochain<T>,
) -> Result<Vec<(Face, T)>> {
    let k = f.dim();
    if k < 1 {
        return Err(HdxError::DimensionOutOfRange {
            dim: k,
            lo: 1,
            hi: x.top_dim(),
        });
    }
    let mut out = Vec::new();
    for sigma in x.faces(k - 1)? {
        let link = x.link(sigma)?;
        let mut acc = T::zero();
        for (v, w) in link.faces(0)?.iter().zip(link.weights(0)?) {
            let mut tuple = Vec::with_capacity(sigma.len() + 1);
            tuple.extend_from_slice(v.vertices());
            tuple.extend_from_slice(sigma.vertices());
            let value = f.eval(x, &tuple).expect("coface of a face is a face");
            acc += *w * value;
        }
        out.push((sigma.clone(), acc.abs()));
    }
    Ok(out)
}

/// Largest `|(δ_{k−1}ᵀ W f)(σ)| / ((k+1) w(σ))` over `σ ∈ X(k−1)`.
///
/// Agrees with the worst of [`local_minimality_residuals`]; computed through
/// the coboundary matrix instead of per-face link averages.
pub fn k_level_check<T: Scalar>(x: &PureComplex<T>, f: &OrientedCochain<T>) -> Result<T> {
    let k = f.dim();
    if k < 1 {
        return Err(HdxError::DimensionOutOfRange {
            dim: k,
            lo: 1,
            hi: x.top_dim(),
        });
    }
    let delta = coboundary(x, k - 1)?;
    let w = x.weights(k)?;
    let wf = DVector::from_iterator(w.len(), f.cochain.values().iter().zip(w).map(|(v, w)| *v * *w));
    let pulled = delta.matrix().transpose() * wf;
    let kk = T::from_count((k + 1) as usize);
    Ok(pulled
        .iter()
        .zip(x.weights(k - 1)?)
        .map(|(v, w)| (*v / (kk * *w)).abs())
        .fold(T::zero(), |a, b| a.max(b)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceReport<T> {
    pub faces: Vec<Face>,
    pub dim: isize,
    /// `max_σ |Σ_{τ∈S} w(τ) − Σ_{τ∈S, σ⊆τ} w_σ(τ∖σ)|` over `σ ∈ X(dim)`.
    pub defect: T,
    pub worst_face: Face,
    /// Largest link mean of the centered indicator over `σ ∈ X(dim)`.
    pub centered_mean_residual: T,
    /// Distance of the centered indicator from the `(dim+1)`-level space,
    /// which sits inside every lower level space.
    pub level_residual: T,
}

impl<T: Scalar> BalanceReport<T> {
    pub fn balanced(&self, tol: f64) -> bool {
        self.defect <= T::tol(tol)
    }
}

/// Compares the weight of `S` with its conditional weight in every link of an `i`-face.
pub fn balanced_check<T: Scalar>(x: &PureComplex<T>, set: &[Face], i: isize) -> Result<BalanceReport<T>> {
    let first = set
        .first()
        .ok_or_else(|| HdxError::InvalidParams("empty face set".into()))?;
    let k = first.dim();
    if set.iter().any(|f| f.dim() != k) {
        return Err(HdxError::DimensionMismatch("face set mixes dimensions".into()));
    }
    if i < -1 || i >= k {
        return Err(HdxError::DimensionOutOfRange {
            dim: i,
            lo: -1,
            hi: k - 1,
        });
    }
    let mut indicator = Cochain::zeros(x, k)?;
    let mut vals = indicator.values().clone();
    for f in set {
        vals[x.require(f)?] = T::one();
    }
    indicator = Cochain::new(x, k, vals)?;
    let total = mean(x, &indicator)?;
    let centered = Cochain::new(x, k, indicator.values().add_scalar(-total))?;

    let mut defect = T::zero();
    let mut worst_face = Face::empty();
    let mut centered_mean_residual = T::zero();
    for sigma in x.faces(i)? {
        let link = x.link(sigma)?;
        let lk = k - i - 1;
        let mut local = T::zero();
        let mut centered_local = T::zero();
        for (tau, w) in link.faces(lk)?.iter().zip(link.weights(lk)?) {
            let pos = x.require(&tau.union(sigma))?;
            local += *w * indicator.values()[pos];
            centered_local += *w * centered.values()[pos];
        }
        let gap = (total - local).abs();
        if gap > defect {
            defect = gap;
            worst_face = sigma.clone();
        }
        centered_mean_residual = centered_mean_residual.max(centered_local.abs());
    }
    let level_residual = level_space(x, k, i + 1)?.membership_residual(&centered)?;
    let mut faces = set.to_vec();
    faces.sort();
    Ok(BalanceReport {
        faces,
        dim: i,
        defect,
        worst_face,
        centered_mean_residual,
        level_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{inner_product, norm_sq};

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

    fn oriented(x: &PureComplex<f64>, k: isize, v: Vec<f64>) -> OrientedCochain<f64> {
        OrientedCochain::new(Cochain::from_vec(x, k, v).unwrap())
    }

    #[test]
    fn signs_of_permutations() {
        assert_eq!(permutation_sign(&[0, 1, 2]), Some(1));
        assert_eq!(permutation_sign(&[1, 0, 2]), Some(-1));
        assert_eq!(permutation_sign(&[2, 0, 1]), Some(1));
        assert_eq!(permutation_sign(&[1, 1]), None);
        let x = t3();
        let f = oriented(&x, 1, vec![3.0, 0.0, 0.0]);
        assert_eq!(f.eval(&x, &[1, 0]), Some(-3.0));
        assert_eq!(f.eval(&x, &[0, 1]), Some(3.0));
    }

    #[test]
    fn coboundary_of_vertex_indicator() {
        let x = t3();
        let d = coboundary(&x, 0).unwrap();
        let f = Cochain::from_vec(&x, 0, vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(d.apply(&f).unwrap().values().as_slice(), &[-1.0, -1.0, 0.0]);
        let one = Cochain::ones(&x, 0).unwrap();
        assert!(d.apply(&one).unwrap().max_abs() < 1e-15);
        let lift = coboundary(&x, -1).unwrap();
        assert!(lift.matrix().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn coboundary_squares_to_zero() {
        let x = c42();
        for i in -1..1 {
            let dd = coboundary(&x, i + 1)
                .unwrap()
                .compose(&coboundary(&x, i).unwrap())
                .unwrap();
            assert!(dd.matrix().amax() < 1e-12);
        }
    }

    #[test]
    fn minimal_vertex_cochain_subtracts_mean() {
        let x = t3();
        let f = oriented(&x, 0, vec![1.0, 0.0, 0.0]);
        let m = minimal_representative(&x, &f).unwrap();
        let want = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in m.cochain().values().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(minimality_certificate(&x, &m).unwrap() < 1e-10);
    }

    #[test]
    fn cyclic_flow_is_minimal() {
        let x = t3();
        // Edges in order {0,1}, {0,2}, {1,2}.
        let f = oriented(&x, 1, vec![1.0, -1.0, 1.0]);
        assert!(minimality_certificate(&x, &f).unwrap() < 1e-12);
        let m = minimal_representative(&x, &f).unwrap();
        assert!((m.cochain().values() - f.cochain().values()).amax() < 1e-12);
        let res = local_minimality_residuals(&x, &f).unwrap();
        assert!(res.iter().all(|(_, r)| *r < 1e-12));
        assert!(k_level_check(&x, &f).unwrap() < 1e-12);
    }

    #[test]
    fn coboundaries_project_to_zero() {
        let x = c42();
        let g = Cochain::from_vec(&x, 0, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let f = OrientedCochain::new(coboundary(&x, 0).unwrap().apply(&g).unwrap());
        let m = minimal_representative(&x, &f).unwrap();
        assert!(m.cochain().max_abs() < 1e-12);
        let res = local_minimality_residuals(&x, &f).unwrap();
        assert!(res.iter().any(|(_, r)| *r > 0.1));
    }

    #[test]
    fn projection_is_orthogonal_and_idempotent() {
        let x = c42();
        let f = oriented(&x, 1, vec![0.3, -1.0, 2.0, 0.5, 0.0, -0.7]);
        let m = minimal_representative(&x, &f).unwrap();
        let rest = f.cochain().sub(m.cochain()).unwrap();
        assert!(inner_product(&x, &rest, m.cochain()).unwrap().abs() < 1e-10);
        let again = minimal_representative(&x, &m).unwrap();
        assert!((again.cochain().values() - m.cochain().values()).amax() < 1e-12);
        assert!(norm_sq(&x, m.cochain()).unwrap() <= norm_sq(&x, f.cochain()).unwrap());
        let local = local_minimality_residuals(&x, &m).unwrap();
        let worst = local.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        assert!(worst < 1e-10);
        assert!((k_level_check(&x, &m).unwrap() - worst).abs() < 1e-10);
    }

    #[test]
    fn ones_are_not_minimal() {
        let x = t3();
        let f = OrientedCochain::new(Cochain::ones(&x, 1).unwrap());
        assert!((k_level_check(&x, &f).unwrap() - 1.0).abs() < 1e-12);
        let local = local_minimality_residuals(&x, &f).unwrap();
        let worst = local.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        assert!((worst - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matching_is_balanced() {
        let x = c42();
        let r = balanced_check(&x, &[Face::from([0, 1]), Face::from([2, 3])], 0).unwrap();
        assert!(r.defect < 1e-12);
        assert!(r.centered_mean_residual < 1e-12);
        assert!(r.level_residual < 1e-10);
        assert!(
            level_space(&x, 1, 0)
                .unwrap()
                .membership_residual(
                    &Cochain::from_vec(&x, 1, vec![2.0, -1.0, -1.0, -1.0, -1.0, 2.0]).unwrap()
                )
                .unwrap()
                < 1e-10
        );
    }

    #[test]
    fn single_edge_is_unbalanced() {
        let x = c42();
        let r = balanced_check(&x, &[Face::from([0, 1])], 0).unwrap();
        assert!((r.defect - 1.0 / 6.0).abs() < 1e-12);
        assert!(r.level_residual > 1e-3);
        let all: Vec<Face> = x.faces(1).unwrap().to_vec();
        assert!(balanced_check(&x, &all, 0).unwrap().defect < 1e-12);
        assert!(balanced_check(&x, &[Face::from([0, 9])], 0).is_err());
        assert!(balanced_check(&x, &[Face::from([0, 1])], 1).is_err());
    }
}
