//! Link viewers, level cochain spaces and the orthogonal level decomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::cochain::{localization_matrix, mean, norm_sq, weighted_dot, Cochain, LinOp};
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::linalg::{kernel, least_norm_solve};
use crate::operators::{multi_down, multi_up, nonlazy, up_down};
use crate::scalar::Scalar;
use crate::spectral::psd_sqrt;

/// How a cochain on `X` is seen from inside the link of a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Viewer {
    /// Keep the values on faces of the link with the same dimension.
    Restriction,
    /// Read `f(σ ∪ τ)` at each link face `τ`.
    Localization,
}

impl Viewer {
    /// Dimension drop of the viewed cochain per vertex of `σ`.
    pub fn dim_diff(self) -> isize {
        match self {
            Viewer::Restriction => 0,
            Viewer::Localization => 1,
        }
    }

    /// Dimension of the viewed cochain, if the view is defined.
    pub fn target_dim(self, top_dim: isize, k: isize, sigma_dim: isize) -> Result<isize> {
        match self {
            Viewer::Restriction if k + sigma_dim < top_dim => Ok(k),
            Viewer::Localization if sigma_dim < k => Ok(k - sigma_dim - 1),
            _ => Err(HdxError::DimensionMismatch(format!(
                "{self:?} view of a {k}-cochain at a face of dimension {sigma_dim} is undefined"
            ))),
        }
    }

    /// Matrix of the view `C^k(X) → C^{k'}(X_σ)`; `link` must be `x.link(σ)`.
    pub fn matrix<T: Scalar>(
        self,
        x: &PureComplex<T>,
        link: &PureComplex<T>,
        sigma: &Face,
        k: isize,
    ) -> Result<DMatrix<T>> {
        self.target_dim(x.top_dim(), k, sigma.dim())?;
        match self {
            Viewer::Localization => localization_matrix(x, link, sigma, k),
            Viewer::Restriction => {
                let rows = link.faces(k)?;
                let mut m = DMatrix::zeros(rows.len(), x.num_faces(k)?);
                for (r, tau) in rows.iter().enumerate() {
                    m[(r, x.require(tau)?)] = T::one();
                }
                Ok(m)
            }
        }
    }

    /// Views `f` inside the link `link = x.link(σ)`.
    pub fn view_on<T: Scalar>(
        self,
        x: &PureComplex<T>,
        link: &PureComplex<T>,
        f: &Cochain<T>,
        sigma: &Face,
    ) -> Result<Cochain<T>> {
        if f.complex_id() != x.id() {
            return Err(HdxError::ComplexMismatch);
        }
        let target = self.target_dim(x.top_dim(), f.dim(), sigma.dim())?;
        let m = self.matrix(x, link, sigma, f.dim())?;
        Cochain::new(link, target, m * f.values())
    }

    /// Views `f` from `σ`, returning the link alongside the viewed cochain.
    pub fn view<T: Scalar>(
        self,
        x: &PureComplex<T>,
        f: &Cochain<T>,
        sigma: &Face,
    ) -> Result<(PureComplex<T>, Cochain<T>)> {
        x.require(sigma)?;
        self.target_dim(x.top_dim(), f.dim(), sigma.dim())?;
        let link = x.link(sigma)?;
        let g = self.view_on(x, &link, f, sigma)?;
        Ok((link, g))
    }
}

/// Worst residuals of the viewer axioms over all faces of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewerAxioms<T> {
    pub linearity: T,
    pub unit: T,
    pub composition: T,
    pub expectation: T,
    /// `None` when the walk on the viewed dimension does not exist.
    pub walk: Option<T>,
}

impl<T: Scalar> ViewerAxioms<T> {
    pub fn max_structural(&self) -> T {
        self.linearity
            .max(self.unit)
            .max(self.composition)
            .max(self.expectation)
    }
}

/// Evaluates linearity, unit preservation, composition and the expectation
/// law for views from faces of dimension `sigma_dim`, plus the walk identity.
pub fn viewer_axiom_residuals<T: Scalar>(
    viewer: Viewer,
    x: &PureComplex<T>,
    f: &Cochain<T>,
    g: &Cochain<T>,
    sigma_dim: isize,
    a: T,
    b: T,
) -> Result<ViewerAxioms<T>> {
    let k = f.dim();
    let target = viewer.target_dim(x.top_dim(), k, sigma_dim)?;
    let combo = f.combine(a, g, b)?;
    let ones = Cochain::ones(x, k)?;
    let mut linearity = T::zero();
    let mut unit = T::zero();
    let mut composition = T::zero();
    let mut expected = T::zero();
    for (sigma, w) in x.faces(sigma_dim)?.iter().zip(x.weights(sigma_dim)?) {
        let link = x.link(sigma)?;
        let m = viewer.matrix(x, &link, sigma, k)?;
        let vf = &m * f.values();
        let vg = &m * g.values();
        let vc = &m * combo.values();
        linearity = linearity.max((vc - (&vf * a + &vg * b)).amax());
        unit = unit.max((&m * ones.values()).add_scalar(-T::one()).amax());
        expected += *w * weighted_dot(link.weights(target)?, &vf, &vg);

        for size in 0..sigma.len() {
            for tau in sigma.subfaces(size) {
                let inner = x.link(&tau)?;
                let rest = sigma.difference(&tau);
                let outer = inner.link(&rest)?;
                let m1 = viewer.matrix(x, &inner, &tau, k)?;
                let k1 = viewer.target_dim(x.top_dim(), k, tau.dim())?;
                let m2 = viewer.matrix(&inner, &outer, &rest, k1)?;
                if outer.faces(target)? != link.faces(target)? {
                    return Err(HdxError::DimensionMismatch(
                        "iterated link differs from the direct link".into(),
                    ));
                }
                composition = composition.max((m2 * (&m1 * f.values()) - &vf).amax());
            }
        }
    }
    let direct = crate::cochain::inner_product(x, f, g)?;
    let walk = match respects_walk_residual(viewer, x, f) {
        Ok(r) => Some(r),
        Err(HdxError::DimensionOutOfRange { .. }) | Err(HdxError::DimensionMismatch(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ViewerAxioms {
        linearity,
        unit,
        composition,
        expectation: (expected - direct).abs(),
        walk,
    })
}

/// `|⟨M_k f, f⟩ − E_{v∈X(0)} ⟨M_{k−D} V_v f, V_v f⟩|` for a `k`-cochain `f`.
pub fn respects_walk_residual<T: Scalar>(viewer: Viewer, x: &PureComplex<T>, f: &Cochain<T>) -> Result<T> {
    let k = f.dim();
    let lhs = nonlazy(x, k)?.quadratic_form(x, f)?;
    let inner_k = viewer.target_dim(x.top_dim(), k, 0)?;
    let mut rhs = T::zero();
    for (v, w) in x.faces(0)?.iter().zip(x.weights(0)?) {
        let link = x.link(v)?;
        let vf = viewer.view_on(x, &link, f, v)?;
        rhs += *w * nonlazy(&link, inner_k)?.quadratic_form(&link, &vf)?;
    }
    Ok((lhs - rhs).abs())
}

/// Orthonormal basis (under the weighted inner product) of a level space.
#[derive(Clone, Debug)]
pub struct LevelBasis<T: Scalar> {
    pub k: isize,
    pub level: isize,
    basis: DMatrix<T>,
    weights: Vec<T>,
    complex_id: u64,
}

impl<T: Scalar> LevelBasis<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis vectors as columns.
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn cochains(&self, x: &PureComplex<T>) -> Result<Vec<Cochain<T>>> {
        self.basis
            .column_iter()
            .map(|c| Cochain::new(x, self.k, c.into_owned()))
            .collect()
    }

    /// Weighted orthogonal projector `B Bᵀ W` as a matrix.
    pub fn projector(&self) -> DMatrix<T> {
        let bt_w = DMatrix::from_fn(self.basis.ncols(), self.basis.nrows(), |r, c| {
            self.basis[(c, r)] * self.weights[c]
        });
        &self.basis * bt_w
    }

    pub(crate) fn project_vec(&self, v: &DVector<T>) -> DVector<T> {
        let wv = DVector::from_iterator(v.len(), v.iter().zip(&self.weights).map(|(a, w)| *a * *w));
        &self.basis * (self.basis.transpose() * wv)
    }

    pub fn project(&self, f: &Cochain<T>) -> Result<Cochain<T>> {
        self.check(f)?;
        Ok(f.with_values(self.project_vec(f.values())))
    }

    /// Largest entry of `f − P f`; zero exactly when `f` lies in the space.
    pub fn membership_residual(&self, f: &Cochain<T>) -> Result<T> {
        self.check(f)?;
        Ok((f.values() - self.project_vec(f.values())).amax())
    }

    fn check(&self, f: &Cochain<T>) -> Result<()> {
        if f.complex_id() != self.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        if f.dim() != self.k {
            return Err(HdxError::DimensionMismatch(format!(
                "level space of {}-cochains given a {}-cochain",
                self.k,
                f.dim()
            )));
        }
        Ok(())
    }
}

/// Weighted-orthonormal basis of `ker A` where `A` acts on vectors over faces with weights `w`.
pub(crate) fn weighted_kernel<T: Scalar>(a: &DMatrix<T>, w: &[T]) -> DMatrix<T> {
    let n = w.len();
    let inv_sqrt: Vec<T> = w.iter().map(|w| T::one() / w.sqrt()).collect();
    if a.nrows() == 0 {
        return DMatrix::from_fn(n, n, |r, c| if r == c { inv_sqrt[r] } else { T::zero() });
    }
    let scaled = DMatrix::from_fn(a.nrows(), n, |r, c| a[(r, c)] * inv_sqrt[c]);
    let null = kernel(&scaled);
    DMatrix::from_fn(n, null.ncols(), |r, c| null[(r, c)] * inv_sqrt[r])
}

fn level_range<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<()> {
    if k < 0 || k > x.top_dim() {
        return Err(HdxError::DimensionOutOfRange {
            dim: k,
            lo: 0,
            hi: x.top_dim(),
        });
    }
    if i < 0 || i > k + 1 {
        return Err(HdxError::DimensionOutOfRange {
            dim: i,
            lo: 0,
            hi: k + 1,
        });
    }
    Ok(())
}

/// The `i`-level `k`-cochains for the localization viewer, computed as
/// `ker(d*_{i−1} ⋯ d*_{k−1})`. Level `k+1` is the zero space.
pub fn level_space<T: Scalar>(x: &PureComplex<T>, k: isize, i: isize) -> Result<LevelBasis<T>> {
    level_range(x, k, i)?;
    let w = x.weights(k)?.to_vec();
    let basis = if i == k + 1 {
        DMatrix::zeros(w.len(), 0)
    } else {
        let chain = multi_down(x, i - 1, k - i + 1)?;
        weighted_kernel(chain.matrix(), &w)
    };
    Ok(LevelBasis {
        k,
        level: i,
        basis,
        weights: w,
        complex_id: x.id(),
    })
}

/// Same space as [`level_space`], from the per-face constraints
/// `⟨V_σ f, 1⟩ = 0` for every `σ ∈ X(i−1)`.
pub fn level_space_from_constraints<T: Scalar>(
    viewer: Viewer,
    x: &PureComplex<T>,
    k: isize,
    i: isize,
) -> Result<LevelBasis<T>> {
    level_range(x, k, i)?;
    if viewer == Viewer::Restriction && k != 0 {
        return Err(HdxError::InvalidParams(
            "restriction level spaces are only defined for vertex cochains".into(),
        ));
    }
    let w = x.weights(k)?.to_vec();
    let constraints = level_constraints(viewer, x, k, i)?;
    Ok(LevelBasis {
        k,
        level: i,
        basis: weighted_kernel(&constraints, &w),
        weights: w,
        complex_id: x.id(),
    })
}

fn level_constraints<T: Scalar>(
    viewer: Viewer,
    x: &PureComplex<T>,
    k: isize,
    i: isize,
) -> Result<DMatrix<T>> {
    let faces = x.faces(i - 1)?;
    let n = x.num_faces(k)?;
    let mut a = DMatrix::zeros(faces.len(), n);
    for (r, sigma) in faces.iter().enumerate() {
        let link = x.link(sigma)?;
        let target = viewer.target_dim(x.top_dim(), k, sigma.dim())?;
        let m = viewer.matrix(x, &link, sigma, k)?;
        let lw = DVector::from_column_slice(link.weights(target)?);
        a.set_row(r, &(lw.transpose() * m));
    }
    Ok(a)
}

/// Largest `|⟨V_σ f, 1⟩|` over `σ ∈ X(i−1)` under the localization viewer.
pub fn level_constraint_residual<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>, i: isize) -> Result<T> {
    level_range(x, f.dim(), i)?;
    if i == f.dim() + 1 {
        return Ok(f.max_abs());
    }
    let a = level_constraints(Viewer::Localization, x, f.dim(), i)?;
    Ok((a * f.values()).amax())
}

/// Level spaces `0..=k+1` and their successive orthogonal differences.
#[derive(Clone, Debug)]
pub struct ProperLevels<T: Scalar> {
    pub k: isize,
    levels: Vec<LevelBasis<T>>,
    proper: Vec<LevelBasis<T>>,
    weights: Vec<T>,
    complex_id: u64,
}

impl<T: Scalar> ProperLevels<T> {
    pub fn new(x: &PureComplex<T>, k: isize) -> Result<Self> {
        let levels = (0..=k + 1)
            .map(|i| level_space(x, k, i))
            .collect::<Result<Vec<_>>>()?;
        let weights = x.weights(k)?.to_vec();
        let proper = (0..=k as usize)
            .map(|i| {
                let basis = orthogonal_difference(&levels[i], &levels[i + 1], &weights);
                LevelBasis {
                    k,
                    level: i as isize,
                    basis,
                    weights: weights.clone(),
                    complex_id: x.id(),
                }
            })
            .collect();
        Ok(Self {
            k,
            levels,
            proper,
            weights,
            complex_id: x.id(),
        })
    }

    /// The `i`-level space, `0 ≤ i ≤ k+1`.
    pub fn level(&self, i: isize) -> &LevelBasis<T> {
        &self.levels[i as usize]
    }

    /// The proper `i`-level space, `0 ≤ i ≤ k`.
    pub fn proper(&self, i: isize) -> &LevelBasis<T> {
        &self.proper[i as usize]
    }

    /// Projector onto level `i` proper; `i = −1` gives the constants.
    pub fn proper_projector(&self, i: isize) -> DMatrix<T> {
        if i == -1 {
            let n = self.weights.len();
            return DMatrix::from_fn(n, n, |_, c| self.weights[c]);
        }
        self.proper(i).projector()
    }

    /// Proper level basis vectors paired with their level.
    pub fn basis_cochains(&self, x: &PureComplex<T>) -> Result<Vec<(isize, Cochain<T>)>> {
        let mut out = Vec::new();
        for p in &self.proper {
            for c in p.cochains(x)? {
                out.push((p.level, c));
            }
        }
        Ok(out)
    }

    /// Orthogonal decomposition `f = f_{−1} + f_0 + … + f_k`.
    ///
    /// Levels are peeled from the top; each new component is re-orthogonalized
    /// against those already extracted.
    pub fn decompose(&self, x: &PureComplex<T>, f: &Cochain<T>) -> Result<LevelDecomposition<T>> {
        if f.complex_id() != self.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        if f.dim() != self.k {
            return Err(HdxError::DimensionMismatch(format!(
                "decomposition of {}-cochains given a {}-cochain",
                self.k,
                f.dim()
            )));
        }
        let w = &self.weights;
        let v = f.values();
        let k = self.k as usize;
        let mut parts: Vec<DVector<T>> = vec![DVector::zeros(v.len()); k + 2];
        let m = mean(x, f)?;
        parts[0] = DVector::from_element(v.len(), m);
        let mut above = DVector::zeros(v.len());
        for i in (0..=k).rev() {
            let mut part = self.levels[i].project_vec(v) - &above;
            for done in &parts[i + 2..] {
                let nn = weighted_dot(w, done, done);
                if nn > T::zero() {
                    part -= done * (weighted_dot(w, &part, done) / nn);
                }
            }
            above += &part;
            parts[i + 1] = part;
        }
        let components = parts
            .into_iter()
            .map(|p| Cochain::new(x, self.k, p))
            .collect::<Result<Vec<_>>>()?;
        let norms_sq = components
            .iter()
            .map(|c| norm_sq(x, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelDecomposition {
            k: self.k,
            components,
            norms_sq,
        })
    }
}

/// Weighted-orthonormal basis of `span(outer) ⊖ span(inner)`, assuming nesting.
fn orthogonal_difference<T: Scalar>(outer: &LevelBasis<T>, inner: &LevelBasis<T>, w: &[T]) -> DMatrix<T> {
    let b = outer.matrix();
    let n = b.nrows();
    if b.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let mut r = b.clone();
    for mut col in r.column_iter_mut() {
        let p = inner.project_vec(&col.clone_owned());
        col -= p;
    }
    let rw = DMatrix::from_fn(n, r.ncols(), |i, j| r[(i, j)] * w[i]);
    let gram = r.transpose() * rw;
    let eig = SymmetricEigen::new(gram);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|i| eig.eigenvalues[*i] > T::lit(0.5))
        .collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &idx) in keep.iter().enumerate() {
        let v = &r * eig.eigenvectors.column(idx) / eig.eigenvalues[idx].sqrt();
        out.set_column(c, &v);
    }
    out
}

/// Components `f_{−1}, f_0, …, f_k` of a `k`-cochain.
#[derive(Clone, Debug)]
pub struct LevelDecomposition<T: Scalar> {
    pub k: isize,
    components: Vec<Cochain<T>>,
    norms_sq: Vec<T>,
}

impl<T: Scalar> LevelDecomposition<T> {
    /// Component at level `i ∈ −1..=k`.
    pub fn component(&self, i: isize) -> &Cochain<T> {
        &self.components[(i + 1) as usize]
    }

    pub fn norm_sq(&self, i: isize) -> T {
        self.norms_sq[(i + 1) as usize]
    }

    /// `(level, ‖f_i‖²)` for `i = −1..=k`.
    pub fn norms_sq(&self) -> impl Iterator<Item = (isize, T)> + '_ {
        self.norms_sq
            .iter()
            .enumerate()
            .map(|(i, n)| (i as isize - 1, *n))
    }

    pub fn reconstruction_residual(&self, f: &Cochain<T>) -> Result<T> {
        let mut acc = f.scale(-T::one());
        for c in &self.components {
            acc = acc.add(c)?;
        }
        Ok(acc.max_abs())
    }

    /// Largest `|⟨f_i, f_j⟩|` over `i ≠ j`.
    pub fn orthogonality_residual(&self, x: &PureComplex<T>) -> Result<T> {
        let mut worst = T::zero();
        for a in 0..self.components.len() {
            for b in a + 1..self.components.len() {
                let ip = crate::cochain::inner_product(x, &self.components[a], &self.components[b])?;
                worst = worst.max(ip.abs());
            }
        }
        Ok(worst)
    }

    pub fn parseval_residual(&self, x: &PureComplex<T>, f: &Cochain<T>) -> Result<T> {
        let total = self.norms_sq.iter().fold(T::zero(), |a, b| a + *b);
        Ok((total - norm_sq(x, f)?).abs())
    }

    /// Largest distance of any component from its proper level space.
    pub fn membership_residual(&self, levels: &ProperLevels<T>) -> Result<T> {
        let mut worst = T::zero();
        for i in 0..=self.k {
            let c = self.component(i);
            worst = worst.max(levels.level(i).membership_residual(c)?);
            let above = levels.level(i + 1).project(c)?;
            worst = worst.max(above.max_abs());
        }
        Ok(worst)
    }
}

/// Proper level decomposition of `f` under the localization viewer.
pub fn proper_decompose<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>) -> Result<LevelDecomposition<T>> {
    ProperLevels::new(x, f.dim())?.decompose(x, f)
}

/// Vertex shadow of a proper 0-level `k`-cochain.
#[derive(Clone, Debug)]
pub struct ZeroLift<T: Scalar> {
    /// Minimum-norm solution of `multi_up(0,k) g = f0`.
    pub g: Cochain<T>,
    /// `√U_0^k g`.
    pub f_eq0: Cochain<T>,
    pub fit_residual: T,
}

/// Lifts `f0` to a vertex cochain with matching norm and walk energies.
pub fn lift_to_zero<T: Scalar>(x: &PureComplex<T>, f0: &Cochain<T>) -> Result<ZeroLift<T>> {
    let k = f0.dim();
    if k < 0 || k > x.top_dim() {
        return Err(HdxError::DimensionOutOfRange {
            dim: k,
            lo: 0,
            hi: x.top_dim(),
        });
    }
    let m = mean(x, f0)?;
    if m.abs() > T::tol(1e-9) {
        return Err(HdxError::NotLevel {
            level: 0,
            residual: m.abs().as_f64(),
        });
    }
    let up = multi_up(x, 0, k)?;
    let wk = x.weights(k)?;
    let w0 = x.weights(0)?;
    let a = up.matrix();
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| {
        a[(r, c)] * wk[r].sqrt() / w0[c].sqrt()
    });
    let rhs = DVector::from_iterator(wk.len(), f0.values().iter().zip(wk).map(|(v, w)| *v * w.sqrt()));
    let h = least_norm_solve(&scaled, &rhs);
    let g = DVector::from_iterator(w0.len(), h.iter().zip(w0).map(|(v, w)| *v / w.sqrt()));
    let g = Cochain::new(x, 0, g)?;
    let diffv = up.apply(&g)?.sub(f0)?;
    let fit_residual = norm_sq(x, &diffv)?.sqrt();
    if fit_residual > T::tol(1e-6) {
        return Err(HdxError::NotInImage {
            residual: fit_residual.as_f64(),
        });
    }
    let root: LinOp<T> = psd_sqrt(x, &up_down(x, 0, k)?)?;
    let f_eq0 = root.apply(&g)?;
    Ok(ZeroLift {
        g,
        f_eq0,
        fit_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::inner_product;
    use crate::operators::{diff, multi_down};

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

    fn fstar(x: &PureComplex<f64>) -> Cochain<f64> {
        Cochain::from_vec(x, 1, vec![1.0, -1.0, 0.0, 0.0, -1.0, 1.0]).unwrap()
    }

    #[test]
    fn restriction_copies_values() {
        let x = c42();
        let f = Cochain::from_vec(&x, 0, vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let (link, g) = Viewer::Restriction.view(&x, &f, &Face::vertex(3)).unwrap();
        assert_eq!(link.num_faces(0).unwrap(), 3);
        assert_eq!(g.values().as_slice(), &[5.0, 6.0, 7.0]);
        assert!(Viewer::Restriction
            .view(&x, &Cochain::ones(&x, 2).unwrap(), &Face::vertex(0))
            .is_err());
    }

    #[test]
    fn views_preserve_ones() {
        let x = c42();
        for (viewer, k) in [(Viewer::Restriction, 0), (Viewer::Localization, 1)] {
            let (_, g) = viewer
                .view(&x, &Cochain::ones(&x, k).unwrap(), &Face::vertex(1))
                .unwrap();
            assert!(g.values().iter().all(|v| *v == 1.0));
        }
    }

    #[test]
    fn walk_is_respected_by_both_viewers() {
        let x = c42();
        let f = Cochain::from_vec(&x, 1, vec![0.3, -1.2, 2.0, 0.7, -0.1, 0.4]).unwrap();
        assert!(respects_walk_residual(Viewer::Localization, &x, &f).unwrap() < 1e-10);
        let g = Cochain::from_vec(&x, 0, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        assert!(respects_walk_residual(Viewer::Restriction, &x, &g).unwrap() < 1e-10);
        let one = Cochain::ones(&x, 1).unwrap();
        assert!(respects_walk_residual(Viewer::Localization, &x, &one).unwrap() < 1e-14);
    }

    #[test]
    fn axioms_on_c42() {
        let x = c42();
        let f = Cochain::from_vec(&x, 2, vec![1.0, 2.0, -3.0, 0.5]).unwrap();
        let g = Cochain::from_vec(&x, 2, vec![0.0, 1.0, 1.0, -2.0]).unwrap();
        for sd in 0..2 {
            let ax = viewer_axiom_residuals(Viewer::Localization, &x, &f, &g, sd, 2.0, -0.5).unwrap();
            assert!(ax.max_structural() < 1e-12, "{ax:?}");
        }
    }

    #[test]
    fn level_space_dimensions() {
        assert_eq!(level_space(&t3(), 1, 1).unwrap().dim(), 0);
        let x = c42();
        let l1 = level_space(&x, 1, 1).unwrap();
        assert_eq!(l1.dim(), 2);
        assert!(l1.membership_residual(&fstar(&x)).unwrap() < 1e-10);
        let l0 = level_space(&x, 1, 0).unwrap();
        assert_eq!(l0.dim(), 5);
        assert!(l0.membership_residual(&Cochain::ones(&x, 1).unwrap()).unwrap() > 0.5);
        assert_eq!(level_space(&x, 1, 2).unwrap().dim(), 0);
    }

    #[test]
    fn kernel_matches_constraints() {
        let x = c42();
        for k in 0..=2 {
            for i in 0..=k {
                let a = level_space(&x, k, i).unwrap();
                let b = level_space_from_constraints(Viewer::Localization, &x, k, i).unwrap();
                assert_eq!(a.dim(), b.dim());
                assert!((a.projector() - b.projector()).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn basis_is_weighted_orthonormal() {
        let x = c42();
        let l = level_space(&x, 1, 0).unwrap();
        let cs = l.cochains(&x).unwrap();
        for (a, ca) in cs.iter().enumerate() {
            for (b, cb) in cs.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((inner_product(&x, ca, cb).unwrap() - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn c42_proper_dimensions() {
        let x = c42();
        let p = ProperLevels::new(&x, 1).unwrap();
        assert_eq!(p.proper(0).dim(), 3);
        assert_eq!(p.proper(1).dim(), 2);
    }

    #[test]
    fn decompose_level_one_vector() {
        let x = c42();
        let f = fstar(&x);
        let d = proper_decompose(&x, &f).unwrap();
        assert!((d.component(1).values() - f.values()).amax() < 1e-10);
        assert!(d.component(0).max_abs() < 1e-10);
        assert!(d.component(-1).max_abs() < 1e-10);
    }

    #[test]
    fn decompose_gradient() {
        let x = c42();
        let g = Cochain::from_vec(&x, 0, vec![1.0, -1.0, 0.0, 0.0]).unwrap();
        let f = diff(&x, 0).unwrap().apply(&g).unwrap();
        let d = proper_decompose(&x, &f).unwrap();
        assert!((d.component(0).values() - f.values()).amax() < 1e-10);
        assert!(d.component(1).max_abs() < 1e-10);
        assert!(d.component(-1).max_abs() < 1e-10);
    }

    #[test]
    fn decompose_constants() {
        let x = c42();
        let one = Cochain::ones(&x, 2).unwrap();
        let d = proper_decompose(&x, &one).unwrap();
        assert!(d.component(-1).values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        for i in 0..=2 {
            assert!(d.component(i).max_abs() < 1e-10);
        }
    }

    #[test]
    fn lift_on_triangle() {
        let x = t3();
        let g = Cochain::from_vec(&x, 0, vec![1.0, -1.0, 0.0]).unwrap();
        let f0 = diff(&x, 0).unwrap().apply(&g).unwrap();
        let lift = lift_to_zero(&x, &f0).unwrap();
        let want = [0.5, -0.5, 0.0];
        for (a, b) in lift.f_eq0.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((norm_sq(&x, &f0).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((norm_sq(&x, &lift.f_eq0).unwrap() - 1.0 / 6.0).abs() < 1e-9);
        let down = multi_down(&x, 0, 1).unwrap().apply(&f0).unwrap();
        let up = diff(&x, 0).unwrap().apply(&lift.f_eq0).unwrap();
        assert!((norm_sq(&x, &down).unwrap() - 1.0 / 24.0).abs() < 1e-12);
        assert!((norm_sq(&x, &up).unwrap() - 1.0 / 24.0).abs() < 1e-9);
    }

    #[test]
    fn lift_of_zero_and_non_image() {
        let x = c42();
        let z = Cochain::zeros(&x, 1).unwrap();
        let lift = lift_to_zero(&x, &z).unwrap();
        assert!(lift.g.max_abs() < 1e-15 && lift.f_eq0.max_abs() < 1e-15);
        assert!(matches!(
            lift_to_zero(&x, &fstar(&x)),
            Err(HdxError::NotInImage { .. })
        ));
    }
}
