//! Cochain vectors, dense operators between cochain spaces, the weighted
//! inner product and localization.

use nalgebra::{DMatrix, DVector};

use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::scalar::Scalar;

/// A real function on `X(k)`, stored in canonical face order.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<T: Scalar> {
    dim: isize,
    values: DVector<T>,
    complex_id: u64,
}

impl<T: Scalar> Cochain<T> {
    pub fn new(x: &PureComplex<T>, dim: isize, values: DVector<T>) -> Result<Self> {
        let n = x.num_faces(dim)?;
        if values.len() != n {
            return Err(HdxError::DimensionMismatch(format!(
                "cochain of dimension {dim} needs {n} values, got {}",
                values.len()
            )));
        }
        Ok(Self {
            dim,
            values,
            complex_id: x.id(),
        })
    }

    pub fn from_vec(x: &PureComplex<T>, dim: isize, values: Vec<T>) -> Result<Self> {
        Self::new(x, dim, DVector::from_vec(values))
    }

    pub fn zeros(x: &PureComplex<T>, dim: isize) -> Result<Self> {
        Self::constant(x, dim, T::zero())
    }

    pub fn constant(x: &PureComplex<T>, dim: isize, c: T) -> Result<Self> {
        let n = x.num_faces(dim)?;
        Self::new(x, dim, DVector::from_element(n, c))
    }

    pub fn ones(x: &PureComplex<T>, dim: isize) -> Result<Self> {
        Self::constant(x, dim, T::one())
    }

    pub fn indicator(x: &PureComplex<T>, face: &Face) -> Result<Self> {
        let pos = x.require(face)?;
        let mut f = Self::zeros(x, face.dim())?;
        f.values[pos] = T::one();
        Ok(f)
    }

    /// Builds a cochain by evaluating `value` on every face of dimension `dim`.
    pub fn from_fn(x: &PureComplex<T>, dim: isize, mut value: impl FnMut(&Face) -> T) -> Result<Self> {
        let vals: Vec<T> = x.faces(dim)?.iter().map(&mut value).collect();
        Self::from_vec(x, dim, vals)
    }

    pub fn dim(&self) -> isize {
        self.dim
    }

    pub fn values(&self) -> &DVector<T> {
        &self.values
    }

    pub fn into_values(self) -> DVector<T> {
        self.values
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: &PureComplex<T>, face: &Face) -> Option<T> {
        (face.dim() == self.dim)
            .then(|| x.index_of(face))
            .flatten()
            .map(|i| self.values[i])
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.complex_id != other.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        if self.dim != other.dim {
            return Err(HdxError::DimensionMismatch(format!(
                "cochains of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            dim: self.dim,
            values: &self.values * a + &other.values * b,
            complex_id: self.complex_id,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, -T::one())
    }

    pub fn scale(&self, a: T) -> Self {
        Self {
            dim: self.dim,
            values: &self.values * a,
            complex_id: self.complex_id,
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.values.amax()
    }

    pub(crate) fn with_values(&self, values: DVector<T>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            dim: self.dim,
            values,
            complex_id: self.complex_id,
        }
    }
}

/// Face weights of dimension `k` as a vector.
pub fn weight_vector<T: Scalar>(x: &PureComplex<T>, k: isize) -> Result<DVector<T>> {
    Ok(DVector::from_column_slice(x.weights(k)?))
}

fn check_owner<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>) -> Result<()> {
    if f.complex_id != x.id() {
        return Err(HdxError::ComplexMismatch);
    }
    Ok(())
}

/// `⟨f, g⟩ = Σ_σ w(σ) f(σ) g(σ)`.
pub fn inner_product<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>, g: &Cochain<T>) -> Result<T> {
    check_owner(x, f)?;
    f.same_space(g)?;
    let w = x.weights(f.dim)?;
    Ok(w.iter()
        .zip(f.values.iter().zip(g.values.iter()))
        .fold(T::zero(), |acc, (w, (a, b))| acc + *w * *a * *b))
}

pub fn norm_sq<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>) -> Result<T> {
    inner_product(x, f, f)
}

/// Weighted mean `⟨f, 1⟩`.
pub fn mean<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>) -> Result<T> {
    check_owner(x, f)?;
    let w = x.weights(f.dim)?;
    Ok(w.iter()
        .zip(f.values.iter())
        .fold(T::zero(), |acc, (w, a)| acc + *w * *a))
}

/// Weighted inner product of raw vectors over dimension `k`.
pub(crate) fn weighted_dot<T: Scalar>(w: &[T], a: &DVector<T>, b: &DVector<T>) -> T {
    w.iter()
        .zip(a.iter().zip(b.iter()))
        .fold(T::zero(), |acc, (w, (a, b))| acc + *w * *a * *b)
}

/// Matrix of the localization map `C^k(X) → C^{k−i−1}(X_σ)`, `σ ∈ X(i)`.
///
/// Rows follow the canonical order of `link`, which must be `x.link(σ)`.
pub fn localization_matrix<T: Scalar>(
    x: &PureComplex<T>,
    link: &PureComplex<T>,
    sigma: &Face,
    k: isize,
) -> Result<DMatrix<T>> {
    x.require(sigma)?;
    let i = sigma.dim();
    if i >= k {
        return Err(HdxError::DimensionMismatch(format!(
            "cannot localize a {k}-cochain at a face of dimension {i}"
        )));
    }
    let target = k - i - 1;
    let rows = link.faces(target)?;
    let cols = x.num_faces(k)?;
    let mut m = DMatrix::zeros(rows.len(), cols);
    for (r, tau) in rows.iter().enumerate() {
        let c = x.require(&tau.union(sigma))?;
        m[(r, c)] = T::one();
    }
    Ok(m)
}

/// Localization `f_σ(τ) = f(σ ∪ τ)` together with the link it lives on.
pub fn localize<T: Scalar>(
    x: &PureComplex<T>,
    f: &Cochain<T>,
    sigma: &Face,
) -> Result<(PureComplex<T>, Cochain<T>)> {
    check_owner(x, f)?;
    x.require(sigma)?;
    if sigma.dim() >= f.dim {
        return Err(HdxError::DimensionMismatch(format!(
            "cannot localize a {}-cochain at a face of dimension {}",
            f.dim,
            sigma.dim()
        )));
    }
    let link = x.link(sigma)?;
    let g = localize_on(x, &link, f, sigma)?;
    Ok((link, g))
}

/// Localization onto a link the caller already built.
pub fn localize_on<T: Scalar>(
    x: &PureComplex<T>,
    link: &PureComplex<T>,
    f: &Cochain<T>,
    sigma: &Face,
) -> Result<Cochain<T>> {
    check_owner(x, f)?;
    let target = f.dim - sigma.dim() - 1;
    if target < 0 {
        return Err(HdxError::DimensionMismatch(format!(
            "cannot localize a {}-cochain at a face of dimension {}",
            f.dim,
            sigma.dim()
        )));
    }
    Cochain::from_fn(link, target, |tau| {
        let pos = x.index_of(&tau.union(sigma)).expect("link face lifts to a face");
        f.values[pos]
    })
}

/// A dense operator `C^{source}(X) → C^{target}(X)`; rows index target faces.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp<T: Scalar> {
    source_dim: isize,
    target_dim: isize,
    matrix: DMatrix<T>,
    complex_id: u64,
}

impl<T: Scalar> LinOp<T> {
    pub fn new(x: &PureComplex<T>, source_dim: isize, target_dim: isize, matrix: DMatrix<T>) -> Result<Self> {
        let rows = x.num_faces(target_dim)?;
        let cols = x.num_faces(source_dim)?;
        if matrix.shape() != (rows, cols) {
            return Err(HdxError::DimensionMismatch(format!(
                "operator {source_dim}→{target_dim} needs shape {rows}×{cols}, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            source_dim,
            target_dim,
            matrix,
            complex_id: x.id(),
        })
    }

    pub fn identity(x: &PureComplex<T>, k: isize) -> Result<Self> {
        let n = x.num_faces(k)?;
        Self::new(x, k, k, DMatrix::identity(n, n))
    }

    pub fn source_dim(&self) -> isize {
        self.source_dim
    }

    pub fn target_dim(&self) -> isize {
        self.target_dim
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn is_square(&self) -> bool {
        self.source_dim == self.target_dim
    }

    pub fn apply(&self, f: &Cochain<T>) -> Result<Cochain<T>> {
        if f.complex_id != self.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        if f.dim != self.source_dim {
            return Err(HdxError::DimensionMismatch(format!(
                "operator expects a {}-cochain, got dimension {}",
                self.source_dim, f.dim
            )));
        }
        Ok(Cochain {
            dim: self.target_dim,
            values: &self.matrix * &f.values,
            complex_id: self.complex_id,
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinOp<T>) -> Result<Self> {
        if inner.complex_id != self.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        if inner.target_dim != self.source_dim {
            return Err(HdxError::DimensionMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.source_dim, self.target_dim, inner.source_dim, inner.target_dim
            )));
        }
        Ok(Self {
            source_dim: inner.source_dim,
            target_dim: self.target_dim,
            matrix: &self.matrix * &inner.matrix,
            complex_id: self.complex_id,
        })
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &LinOp<T>, b: T) -> Result<Self> {
        if other.complex_id != self.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        if (other.source_dim, other.target_dim) != (self.source_dim, self.target_dim) {
            return Err(HdxError::DimensionMismatch(
                "operators act between different spaces".into(),
            ));
        }
        Ok(Self {
            matrix: &self.matrix * a + &other.matrix * b,
            ..self.clone()
        })
    }

    /// Largest entrywise difference to `other`, which must act between the same spaces.
    pub fn max_abs_diff(&self, other: &LinOp<T>) -> Result<T> {
        Ok(self.combine(T::one(), other, -T::one())?.matrix.amax())
    }

    /// Largest deviation of the row sums from one.
    pub fn row_sum_defect(&self) -> T {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - T::one()).abs())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Quadratic form `⟨op f, f⟩` under the weighted inner product.
    pub fn quadratic_form(&self, x: &PureComplex<T>, f: &Cochain<T>) -> Result<T> {
        if !self.is_square() {
            return Err(HdxError::DimensionMismatch(
                "quadratic form of a non-square operator".into(),
            ));
        }
        let g = self.apply(f)?;
        inner_product(x, &g, f)
    }
}
