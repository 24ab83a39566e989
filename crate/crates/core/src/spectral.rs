//! Spectra of operators that are self-adjoint under the weighted inner
//! product, link expansion profiles and positive semidefinite square roots.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::cochain::LinOp;
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::operators::nonlazy;
use crate::scalar::Scalar;

/// Descending eigenvalues of an operator on `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub dim: isize,
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn largest(&self) -> Option<T> {
        self.eigenvalues.first().copied()
    }

    /// Position two in the descending order, if present.
    pub fn second(&self) -> Option<T> {
        self.eigenvalues.get(1).copied()
    }
}

/// Eigenpairs of a weighted self-adjoint operator, with eigenvectors
/// orthonormal under the weighted inner product (columns, descending order).
#[derive(Clone, Debug)]
pub(crate) struct WeightedEigen<T: Scalar> {
    pub values: Vec<T>,
    pub vectors: DMatrix<T>,
}

/// Largest `|w(σ) op[σ,τ] − w(τ) op[τ,σ]|`.
pub fn self_adjoint_residual<T: Scalar>(x: &PureComplex<T>, op: &LinOp<T>) -> Result<T> {
    square_dim(x, op)?;
    let w = x.weights(op.source_dim())?;
    let m = op.matrix();
    let mut worst = T::zero();
    for r in 0..w.len() {
        for c in r + 1..w.len() {
            worst = worst.max((w[r] * m[(r, c)] - w[c] * m[(c, r)]).abs());
        }
    }
    Ok(worst)
}

fn square_dim<T: Scalar>(x: &PureComplex<T>, op: &LinOp<T>) -> Result<isize> {
    if op.complex_id() != x.id() {
        return Err(HdxError::ComplexMismatch);
    }
    if !op.is_square() {
        return Err(HdxError::DimensionMismatch(format!(
            "operator {}→{} is not an endomorphism",
            op.source_dim(),
            op.target_dim()
        )));
    }
    Ok(op.source_dim())
}

/// `W^{1/2} op W^{−1/2}`, symmetrized after a self-adjointness check.
fn symmetrized<T: Scalar>(x: &PureComplex<T>, op: &LinOp<T>) -> Result<(DMatrix<T>, DVector<T>)> {
    let k = square_dim(x, op)?;
    let asym = self_adjoint_residual(x, op)?;
    if asym > T::tol(1e-10) {
        return Err(HdxError::NotSelfAdjoint {
            max_asymmetry: asym.as_f64(),
        });
    }
    let sqrt_w = DVector::from_iterator(x.num_faces(k)?, x.weights(k)?.iter().map(|w| w.sqrt()));
    let m = op.matrix();
    let s = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| sqrt_w[r] * m[(r, c)] / sqrt_w[c]);
    let sym = (&s + s.transpose()) * T::lit(0.5);
    Ok((sym, sqrt_w))
}

pub(crate) fn weighted_eigen<T: Scalar>(x: &PureComplex<T>, op: &LinOp<T>) -> Result<WeightedEigen<T>> {
    let (sym, sqrt_w) = symmetrized(x, op)?;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| {
        eig.eigenvalues[*b]
            .partial_cmp(&eig.eigenvalues[*a])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|i| eig.eigenvalues[*i]).collect();
    let n = sqrt_w.len();
    let vectors = DMatrix::from_fn(n, order.len(), |r, c| eig.eigenvectors[(r, order[c])] / sqrt_w[r]);
    Ok(WeightedEigen { values, vectors })
}

/// Eigenvalues of an operator self-adjoint under the weighted inner product.
pub fn selfadjoint_spectrum<T: Scalar>(x: &PureComplex<T>, op: &LinOp<T>) -> Result<Spectrum<T>> {
    let (sym, _) = symmetrized(x, op)?;
    let mut eigenvalues: Vec<T> = sym.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(Spectrum {
        dim: op.source_dim(),
        eigenvalues,
    })
}

/// Whether the 1-skeleton is connected, by union-find over edges.
pub fn is_connected<T: Scalar>(x: &PureComplex<T>) -> bool {
    let vertices = x.vertex_ids();
    if vertices.len() <= 1 {
        return true;
    }
    let Ok(edges) = x.faces(1) else {
        return false;
    };
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    let pos = |v: usize| vertices.binary_search(&v).expect("edge endpoint is a vertex");
    let mut components = vertices.len();
    for e in edges {
        let a = find(&mut parent, pos(e.vertices()[0]));
        let b = find(&mut parent, pos(e.vertices()[1]));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components == 1
}

/// Second largest eigenvalue of the weighted non-lazy vertex walk.
pub fn lambda2_skeleton<T: Scalar>(x: &PureComplex<T>) -> Result<T> {
    if x.top_dim() < 1 {
        return Err(HdxError::DimensionOutOfRange {
            dim: x.top_dim(),
            lo: 1,
            hi: isize::MAX,
        });
    }
    if !is_connected(x) {
        return Err(HdxError::Disconnected { face: Face::empty() });
    }
    let spec = selfadjoint_spectrum(x, &nonlazy(x, 0)?)?;
    Ok(spec
        .second()
        .expect("connected complex of dimension ≥ 1 has two vertices"))
}

/// Link expansion of `σ`: the second eigenvalue of its link's vertex walk.
pub fn link_lambda2<T: Scalar>(x: &PureComplex<T>, sigma: &Face) -> Result<T> {
    let link = x.link(sigma)?;
    lambda2_skeleton(&link).map_err(|e| match e {
        HdxError::Disconnected { .. } => HdxError::Disconnected { face: sigma.clone() },
        other => other,
    })
}

/// Worst link expansion `γ_j` per face dimension `j = −1..=d−2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaProfile<T> {
    gamma: BTreeMap<isize, T>,
    worst_faces: BTreeMap<isize, Face>,
}

impl<T: Scalar> GammaProfile<T> {
    pub fn get(&self, j: isize) -> Option<T> {
        self.gamma.get(&j).copied()
    }

    /// Face attaining `γ_j` (first in canonical order on ties).
    pub fn worst_face(&self, j: isize) -> Option<&Face> {
        self.worst_faces.get(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (isize, T)> + '_ {
        self.gamma.iter().map(|(j, g)| (*j, *g))
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Builds a profile from explicit values, starting at `j = −1`.
    pub fn from_values(values: &[T]) -> Self {
        Self {
            gamma: values
                .iter()
                .enumerate()
                .map(|(j, g)| (j as isize - 1, *g))
                .collect(),
            worst_faces: BTreeMap::new(),
        }
    }
}

/// Computes `γ_j = max_{σ∈X(j)} λ₂(X_σ)` for `j = −1..=d−2`.
///
/// Complexes of top dimension 0 yield an empty profile.
pub fn gamma_profile<T: Scalar>(x: &PureComplex<T>) -> Result<GammaProfile<T>> {
    let mut gamma = BTreeMap::new();
    let mut worst_faces = BTreeMap::new();
    for j in -1..=x.top_dim() - 2 {
        let mut best: Option<(T, Face)> = None;
        for sigma in x.faces(j)? {
            let l2 = link_lambda2(x, sigma)?;
            if best.as_ref().is_none_or(|(b, _)| l2 > *b) {
                best = Some((l2, sigma.clone()));
            }
        }
        let (g, f) = best.expect("every dimension has a face");
        gamma.insert(j, g);
        worst_faces.insert(j, f);
    }
    Ok(GammaProfile { gamma, worst_faces })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpanderReport<T> {
    pub pass: bool,
    pub worst_face: Face,
    pub worst_value: T,
}

/// Checks `λ₂(X_σ) ≤ λ` for every face of dimension at most `d−2`, the empty face included.
pub fn is_local_spectral_expander<T: Scalar>(x: &PureComplex<T>, lambda: T) -> Result<ExpanderReport<T>> {
    let profile = gamma_profile(x)?;
    let (j, worst_value) = profile
        .iter()
        .fold(None::<(isize, T)>, |acc, (j, g)| match acc {
            Some((_, b)) if b >= g => acc,
            _ => Some((j, g)),
        })
        .ok_or_else(|| HdxError::DimensionOutOfRange {
            dim: x.top_dim(),
            lo: 1,
            hi: isize::MAX,
        })?;
    Ok(ExpanderReport {
        pass: worst_value <= lambda + T::tol(1e-9),
        worst_face: profile.worst_face(j).cloned().unwrap_or_default(),
        worst_value,
    })
}

/// Square root of a weighted self-adjoint positive semidefinite operator on `C^k`.
///
/// Eigenvalues in `[−1e−6, 0)` are treated as zero; anything lower is rejected.
pub fn psd_sqrt<T: Scalar>(x: &PureComplex<T>, op: &LinOp<T>) -> Result<LinOp<T>> {
    let k = square_dim(x, op)?;
    let eig = weighted_eigen(x, op)?;
    let floor = -T::tol(1e-6);
    if let Some(v) = eig.values.iter().copied().find(|v| *v < floor) {
        return Err(HdxError::NegativeEigenvalue { value: v.as_f64() });
    }
    let roots = DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|v| v.max(T::zero()).sqrt()),
    );
    // V diag(√λ) Vᵀ W maps back into the original coordinates.
    let w = x.weights(k)?;
    let v = &eig.vectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, c)] * roots[c]);
    let vt_w = DMatrix::from_fn(v.ncols(), v.nrows(), |r, c| v[(c, r)] * w[c]);
    LinOp::new(x, k, k, scaled * vt_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::up_down;

    fn complete(n: usize, d: usize) -> PureComplex<f64> {
        use itertools::Itertools;
        let facets: Vec<Vec<usize>> = (0..n).combinations(d + 1).collect();
        PureComplex::from_facets(&facets, None).unwrap()
    }

    fn assert_values(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn triangle_walk_spectrum() {
        let x = complete(3, 2);
        let s = selfadjoint_spectrum(&x, &nonlazy(&x, 0).unwrap()).unwrap();
        assert_values(&s.eigenvalues, &[1.0, -0.5, -0.5]);
        let id = LinOp::identity(&x, 1).unwrap();
        assert_values(&selfadjoint_spectrum(&x, &id).unwrap().eigenvalues, &[1.0; 3]);
    }

    #[test]
    fn c42_edge_walk_spectrum() {
        let x = complete(4, 2);
        let s = selfadjoint_spectrum(&x, &nonlazy(&x, 1).unwrap()).unwrap();
        assert_values(&s.eigenvalues, &[1.0, 0.0, 0.0, 0.0, -0.5, -0.5]);
    }

    #[test]
    fn non_self_adjoint_is_rejected() {
        let x = complete(3, 2);
        let mut m = DMatrix::<f64>::identity(3, 3);
        m[(0, 1)] = 1.0;
        let op = LinOp::new(&x, 0, 0, m).unwrap();
        assert!(matches!(
            selfadjoint_spectrum(&x, &op),
            Err(HdxError::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn lambda2_of_complete_complexes() {
        for n in 3..=8 {
            let x = complete(n, 2);
            let want = -1.0 / (n as f64 - 1.0);
            assert!((lambda2_skeleton(&x).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn disconnected_skeleton_is_rejected() {
        let x = PureComplex::<f64>::from_facets(&[vec![0, 1], vec![2, 3]], None).unwrap();
        assert!(!is_connected(&x));
        assert!(matches!(lambda2_skeleton(&x), Err(HdxError::Disconnected { .. })));
    }

    #[test]
    fn disconnected_link_is_named() {
        // Two triangles glued at vertex 0 only: the link of 0 is two disjoint edges.
        let x = PureComplex::<f64>::from_facets(&[vec![0, 1, 2], vec![0, 3, 4]], None).unwrap();
        match gamma_profile(&x) {
            Err(HdxError::Disconnected { face }) => assert_eq!(face, Face::vertex(0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gamma_profiles() {
        let t3 = gamma_profile(&complete(3, 2)).unwrap();
        assert!((t3.get(-1).unwrap() + 0.5).abs() < 1e-9);
        assert!((t3.get(0).unwrap() + 1.0).abs() < 1e-9);
        let c53 = gamma_profile(&complete(5, 3)).unwrap();
        for (j, want) in [(-1, -0.25), (0, -1.0 / 3.0), (1, -0.5)] {
            assert!((c53.get(j).unwrap() - want).abs() < 1e-9);
        }
        assert_eq!(c53.len(), 3);
    }

    #[test]
    fn local_expander_verdicts() {
        let c42 = complete(4, 2);
        assert!(is_local_spectral_expander(&c42, 0.0).unwrap().pass);
        let r = is_local_spectral_expander(&c42, -0.4).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_face, Face::empty());
        assert!((r.worst_value + 1.0 / 3.0).abs() < 1e-9);
        assert!(is_local_spectral_expander(&complete(3, 2), -0.5).unwrap().pass);
    }

    #[test]
    fn psd_sqrt_of_updown() {
        let x = complete(3, 2);
        let u = up_down(&x, 0, 1).unwrap();
        let s = psd_sqrt(&x, &u).unwrap();
        assert_values(
            &selfadjoint_spectrum(&x, &s).unwrap().eigenvalues,
            &[1.0, 0.5, 0.5],
        );
        let id = LinOp::identity(&x, 1).unwrap();
        assert!(psd_sqrt(&x, &id).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
        let y = complete(4, 2);
        let u = up_down(&y, 0, 1).unwrap();
        let s = psd_sqrt(&y, &u).unwrap();
        assert!((s.compose(&s).unwrap().max_abs_diff(&u).unwrap()) < 1e-9);
        let comm = s
            .compose(&u)
            .unwrap()
            .max_abs_diff(&u.compose(&s).unwrap())
            .unwrap();
        assert!(comm < 1e-9);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let x = complete(3, 2);
        let m = nonlazy(&x, 0).unwrap();
        assert!(matches!(
            psd_sqrt(&x, &m),
            Err(HdxError::NegativeEigenvalue { .. })
        ));
    }
}
