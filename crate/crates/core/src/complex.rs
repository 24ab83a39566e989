//! Pure weighted simplicial complexes, links and skeletons.
//!
//! Faces are stored per dimension in lexicographic order of their ascending
//! vertex lists. That order is the coordinate order of every cochain vector
//! and operator matrix in the crate. The empty face is always present at
//! dimension −1 with weight 1.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;

use crate::error::{HdxError, Result};
use crate::scalar::{binomial, Scalar};

/// A face given by its strictly ascending vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Face(Vec<usize>);

impl Face {
    /// Builds a face from arbitrary vertex order. Repeated vertices are rejected.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(HdxError::RepeatedVertex(Face(vertices)));
        }
        Ok(Face(vertices))
    }

    pub fn empty() -> Self {
        Face(Vec::new())
    }

    pub fn vertex(v: usize) -> Self {
        Face(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Face) -> bool {
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &Face) -> Face {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Face(out)
    }

    /// `self ∖ other`.
    pub fn difference(&self, other: &Face) -> Face {
        Face(
            self.0
                .iter()
                .copied()
                .filter(|v| !other.contains_vertex(*v))
                .collect(),
        )
    }

    pub fn intersection(&self, other: &Face) -> Face {
        Face(
            self.0
                .iter()
                .copied()
                .filter(|v| other.contains_vertex(*v))
                .collect(),
        )
    }

    /// The face with the vertex at position `j` removed.
    pub fn without_position(&self, j: usize) -> Face {
        let mut v = self.0.clone();
        v.remove(j);
        Face(v)
    }

    /// All subfaces with exactly `size` vertices, in lexicographic order.
    pub fn subfaces(&self, size: usize) -> impl Iterator<Item = Face> + '_ {
        self.0.iter().copied().combinations(size).map(Face)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

impl From<&[usize]> for Face {
    fn from(v: &[usize]) -> Self {
        Face::new(v.to_vec()).expect("face with distinct vertices")
    }
}

impl<const N: usize> From<[usize; N]> for Face {
    fn from(v: [usize; N]) -> Self {
        Face::new(v.to_vec()).expect("face with distinct vertices")
    }
}

static NEXT_COMPLEX_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_COMPLEX_ID.fetch_add(1, Ordering::Relaxed)
}

/// Converts a dimension in `-1..` into a storage slot.
#[inline]
pub(crate) fn slot(dim: isize) -> usize {
    (dim + 1) as usize
}

/// A downward closed, pure, weighted face system of top dimension `d`.
#[derive(Clone, Debug)]
pub struct PureComplex<T> {
    id: u64,
    top_dim: isize,
    faces: Vec<Vec<Face>>,
    weights: Vec<Vec<T>>,
    index: Vec<HashMap<Face, usize>>,
}

/// Worst deviations of a complex from the weight and closure invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub max_sum_error: f64,
    /// `None` when recursive consistency was not requested (skeletons).
    pub max_recursive_error: Option<f64>,
    pub closed: bool,
    pub pure: bool,
    pub empty_face_weight: f64,
}

impl InvariantReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.closed
            && self.pure
            && self.max_sum_error <= tol
            && self.max_recursive_error.is_none_or(|e| e <= tol)
            && (self.empty_face_weight - 1.0).abs() <= tol
    }
}

impl<T: Scalar> PureComplex<T> {
    /// Generates the closure of `facets` and propagates facet weights downward.
    ///
    /// Facet weights are normalized to sum to one (uniform when absent). A face
    /// of dimension `i` receives `(1/C(d+1, i+1)) Σ w(σ)` over the facets
    /// containing it.
    pub fn build(facets: &[Face], facet_weights: Option<&[T]>) -> Result<Self> {
        let first = facets.first().ok_or(HdxError::EmptyFacets)?;
        let d = first.dim();
        if d < 0 {
            return Err(HdxError::MixedDimensions {
                face: first.clone(),
                expected: 0,
                found: d,
            });
        }
        let mut seen = HashSet::with_capacity(facets.len());
        for f in facets {
            if f.dim() != d {
                return Err(HdxError::MixedDimensions {
                    face: f.clone(),
                    expected: d,
                    found: f.dim(),
                });
            }
            if !seen.insert(f) {
                return Err(HdxError::DuplicateFacet(f.clone()));
            }
        }
        let normalized: Vec<T> = match facet_weights {
            Some(ws) => {
                if ws.len() != facets.len() {
                    return Err(HdxError::WeightCount {
                        expected: facets.len(),
                        found: ws.len(),
                    });
                }
                for (index, w) in ws.iter().enumerate() {
                    if *w <= T::zero() || !w.is_finite() {
                        return Err(HdxError::NonPositiveWeight {
                            index,
                            value: w.as_f64(),
                        });
                    }
                }
                let total = ws.iter().fold(T::zero(), |a, w| a + *w);
                // Weights that already sum to one up to rounding are kept bit
                // for bit, so a written complex parses back to the same file.
                let rounding = T::default_epsilon() * T::from_count(4 * ws.len());
                if (total - T::one()).abs() <= rounding {
                    ws.to_vec()
                } else {
                    ws.iter().map(|w| *w / total).collect()
                }
            }
            None => vec![T::one() / T::from_count(facets.len()); facets.len()],
        };

        let du = d as usize;
        let mut layers: Vec<BTreeMap<Face, T>> = vec![BTreeMap::new(); du + 2];
        for (facet, w) in facets.iter().zip(&normalized) {
            for (size, layer) in layers.iter_mut().enumerate() {
                let share = *w / binomial::<T>(du + 1, size);
                for sub in facet.subfaces(size) {
                    *layer.entry(sub).or_insert_with(T::zero) += share;
                }
            }
        }
        // Facets keep their normalized weight exactly.
        let top: BTreeMap<Face, T> = facets.iter().cloned().zip(normalized.iter().copied()).collect();
        layers[du + 1] = top;

        let (faces, weights) = layers
            .into_iter()
            .map(|layer| layer.into_iter().unzip::<_, _, Vec<_>, Vec<_>>())
            .unzip();
        Ok(Self::from_parts(d, faces, weights))
    }

    /// Convenience wrapper over [`PureComplex::build`] taking raw vertex lists.
    pub fn from_facets(facets: &[Vec<usize>], facet_weights: Option<&[T]>) -> Result<Self> {
        let faces = facets
            .iter()
            .map(|f| Face::new(f.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::build(&faces, facet_weights)
    }

    fn from_parts(top_dim: isize, faces: Vec<Vec<Face>>, weights: Vec<Vec<T>>) -> Self {
        let index = faces
            .iter()
            .map(|layer| layer.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
            .collect();
        Self {
            id: fresh_id(),
            top_dim,
            faces,
            weights,
            index,
        }
    }

    /// Identity used to tie cochains to the complex they were built on.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn top_dim(&self) -> isize {
        self.top_dim
    }

    fn check_dim(&self, k: isize) -> Result<()> {
        if k < -1 || k > self.top_dim {
            return Err(HdxError::DimensionOutOfRange {
                dim: k,
                lo: -1,
                hi: self.top_dim,
            });
        }
        Ok(())
    }

    /// Faces of dimension `k` in canonical order.
    pub fn faces(&self, k: isize) -> Result<&[Face]> {
        self.check_dim(k)?;
        Ok(&self.faces[slot(k)])
    }

    /// Face weights of dimension `k`, aligned with [`PureComplex::faces`].
    pub fn weights(&self, k: isize) -> Result<&[T]> {
        self.check_dim(k)?;
        Ok(&self.weights[slot(k)])
    }

    pub fn num_faces(&self, k: isize) -> Result<usize> {
        Ok(self.faces(k)?.len())
    }

    pub fn index_of(&self, face: &Face) -> Option<usize> {
        let k = face.dim();
        if k > self.top_dim {
            return None;
        }
        self.index[slot(k)].get(face).copied()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.index_of(face).is_some()
    }

    pub fn weight(&self, face: &Face) -> Option<T> {
        self.index_of(face).map(|i| self.weights[slot(face.dim())][i])
    }

    pub(crate) fn require(&self, face: &Face) -> Result<usize> {
        self.index_of(face)
            .ok_or_else(|| HdxError::FaceNotFound(face.clone()))
    }

    /// Vertex ids in ascending order.
    pub fn vertex_ids(&self) -> Vec<usize> {
        self.faces[slot(0)].iter().map(|f| f.vertices()[0]).collect()
    }

    /// The link `X_σ` with the induced weights
    /// `w_σ(τ) = w(τ ∪ σ) / (C(i+j+2, i+1) · w(σ))`.
    ///
    /// Link faces keep the vertex ids of the parent complex.
    pub fn link(&self, sigma: &Face) -> Result<PureComplex<T>> {
        let pos = self.require(sigma)?;
        let i = sigma.dim();
        if i >= self.top_dim {
            return Err(HdxError::TopFaceLink(sigma.clone()));
        }
        if sigma.is_empty() {
            let mut copy = self.clone();
            copy.id = fresh_id();
            return Ok(copy);
        }
        let w_sigma = self.weights[slot(i)][pos];
        let link_top = self.top_dim - i - 1;
        let mut faces = Vec::with_capacity(slot(link_top) + 1);
        let mut weights = Vec::with_capacity(slot(link_top) + 1);
        for j in -1..=link_top {
            let ambient = i + j + 1;
            let scale = binomial::<T>((i + j + 2) as usize, (i + 1) as usize) * w_sigma;
            let mut layer: Vec<(Face, T)> = self.faces[slot(ambient)]
                .iter()
                .zip(&self.weights[slot(ambient)])
                .filter(|(tau, _)| sigma.is_subset_of(tau))
                .map(|(tau, w)| (tau.difference(sigma), *w / scale))
                .collect();
            layer.sort_by(|a, b| a.0.cmp(&b.0));
            let (f, w): (Vec<_>, Vec<_>) = layer.into_iter().unzip();
            faces.push(f);
            weights.push(w);
        }
        Ok(Self::from_parts(link_top, faces, weights))
    }

    /// The `i`-skeleton with the original weights copied verbatim.
    pub fn skeleton(&self, i: isize) -> Result<PureComplex<T>> {
        if i < 0 || i > self.top_dim {
            return Err(HdxError::DimensionOutOfRange {
                dim: i,
                lo: 0,
                hi: self.top_dim,
            });
        }
        let keep = slot(i) + 1;
        Ok(Self::from_parts(
            i,
            self.faces[..keep].to_vec(),
            self.weights[..keep].to_vec(),
        ))
    }

    /// For each face of dimension `k`, the indices of the `(k+1)`-faces containing it.
    pub fn cofaces(&self, k: isize) -> Result<Vec<Vec<usize>>> {
        self.check_dim(k)?;
        self.check_dim(k + 1)?;
        let mut out = vec![Vec::new(); self.faces[slot(k)].len()];
        let size = (k + 1) as usize;
        for (r, upper) in self.faces[slot(k + 1)].iter().enumerate() {
            for sub in upper.subfaces(size) {
                out[self.index[slot(k)][&sub]].push(r);
            }
        }
        Ok(out)
    }

    /// Measures the weight, closure and purity invariants.
    ///
    /// Recursive consistency against the top dimension is skipped when
    /// `check_recursive` is false, which is the right choice for skeletons.
    pub fn check_invariants(&self, check_recursive: bool) -> InvariantReport {
        let mut max_sum_error = 0.0f64;
        for layer in &self.weights {
            let s = layer.iter().fold(T::zero(), |a, w| a + *w);
            max_sum_error = max_sum_error.max((s.as_f64() - 1.0).abs());
        }
        let d = self.top_dim;
        let top = &self.faces[slot(d)];
        let top_w = &self.weights[slot(d)];
        let max_recursive_error = check_recursive.then(|| {
            let mut worst = 0.0f64;
            for i in -1..d {
                let c = binomial::<T>((d + 1) as usize, (i + 1) as usize);
                for (tau, w) in self.faces[slot(i)].iter().zip(&self.weights[slot(i)]) {
                    let s = top
                        .iter()
                        .zip(top_w)
                        .filter(|(sigma, _)| tau.is_subset_of(sigma))
                        .fold(T::zero(), |a, (_, w)| a + *w);
                    worst = worst.max((s / c - *w).as_f64().abs());
                }
            }
            worst
        });
        let closed = self.faces.iter().all(|layer| {
            layer
                .iter()
                .all(|f| (0..f.len()).all(|j| self.contains(&f.without_position(j))))
        });
        let pure = self
            .faces
            .iter()
            .flatten()
            .all(|f| top.iter().any(|t| f.is_subset_of(t)));
        InvariantReport {
            max_sum_error,
            max_recursive_error,
            closed,
            pure,
            empty_face_weight: self.weights[0][0].as_f64(),
        }
    }
}
