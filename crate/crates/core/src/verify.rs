//! Numerical certificates for the walk-contraction bounds.
//!
//! Every check returns a [`BoundReport`] with the two sides of the inequality
//! and their difference, so tight cases show up as zero slack instead of a
//! bare boolean.

use std::cell::OnceCell;
use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cochain::{localization_matrix, mean, norm_sq, Cochain, LinOp};
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::level::{LevelDecomposition, ProperLevels};
use crate::operators::{multi_down, nonlazy, up_down};
use crate::scalar::Scalar;
use crate::spectral::{gamma_profile, lambda2_skeleton, link_lambda2, GammaProfile};

/// Contraction coefficient of level `i` among `k`-cochains:
/// `1 − (1/(k−i+1)) Π_{j=i−1}^{k−1} (1 − γ_j)`.
pub fn level_coefficient<T: Scalar>(gamma: &GammaProfile<T>, i: isize, k: isize) -> Option<T> {
    if i < 0 || i > k {
        return None;
    }
    let mut prod = T::one();
    for j in i - 1..k {
        prod *= T::one() - gamma.get(j)?;
    }
    Some(T::one() - prod / T::from_count((k - i + 1) as usize))
}

/// Coefficients `λ(i, k)` for `0 ≤ i ≤ k ≤ d−1`.
///
/// Filled from the diagonal `λ(k, k) = γ_{k−1}` by the step
/// `1 − λ(i−1, k) = (1 − γ_{i−2}) (1 − λ(i, k)) (k−i+1)/(k−i+2)`, which is
/// independent of the product form used by [`level_coefficient`].
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTable<T> {
    entries: BTreeMap<(isize, isize), T>,
}

impl<T: Scalar> LambdaTable<T> {
    pub fn from_profile(gamma: &GammaProfile<T>) -> Self {
        let mut entries = BTreeMap::new();
        let k_max = gamma.iter().map(|(j, _)| j + 1).max().unwrap_or(-1);
        for k in 0..=k_max {
            let mut lam = gamma.get(k - 1).expect("profile covers −1..=d−2");
            entries.insert((k, k), lam);
            for i in (0..k).rev() {
                let g = gamma.get(i - 1).expect("profile covers −1..=d−2");
                let ratio = T::from_count((k - i) as usize) / T::from_count((k - i + 1) as usize);
                lam = T::one() - (T::one() - g) * (T::one() - lam) * ratio;
                entries.insert((i, k), lam);
            }
        }
        Self { entries }
    }

    pub fn get(&self, i: isize, k: isize) -> Option<T> {
        self.entries.get(&(i, k)).copied()
    }

    /// `((i, k), λ)` in lexicographic order of `(i, k)`.
    pub fn iter(&self) -> impl Iterator<Item = ((isize, isize), T)> + '_ {
        self.entries.iter().map(|(key, v)| (*key, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One level's contribution to a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTerm<T> {
    pub level: isize,
    pub coefficient: T,
    pub norm_sq: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
    pub per_level: Vec<LevelTerm<T>>,
}

impl<T: Scalar> BoundReport<T> {
    fn new(lhs: T, per_level: Vec<LevelTerm<T>>) -> Self {
        let rhs = per_level
            .iter()
            .fold(T::zero(), |a, t| a + t.coefficient * t.norm_sq);
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
            per_level,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -T::tol(tol)
    }
}

/// The global bound next to the level-resolved one.
#[derive(Clone, Debug, PartialEq)]
pub struct AlevLauReport<T> {
    pub report: BoundReport<T>,
    pub fine_grained_rhs: T,
    /// Global rhs minus the level-resolved rhs; never negative in theory.
    pub improvement: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapEntry<T> {
    /// Face whose link is examined; `∅` is the complex itself.
    pub face: Face,
    /// Cochain dimension inside the link.
    pub k: isize,
    pub slack_first: T,
    pub slack_second: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapCertificate<T> {
    pub table: LambdaTable<T>,
    pub link_tables: Vec<(Face, LambdaTable<T>)>,
    pub entries: Vec<BootstrapEntry<T>>,
    pub worst_slack_first: T,
    pub worst_slack_second: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TricklingReport<T> {
    pub lambda_local: T,
    pub worst_vertex: Face,
    pub bound: T,
    pub actual: T,
    pub pass: bool,
    /// Largest gap between the link mean of the restricted cochain and the walk step.
    pub advantage_residual: T,
}

/// Shared state for running several checks on one complex.
pub struct TheoremContext<'a, T: Scalar> {
    x: &'a PureComplex<T>,
    gamma: GammaProfile<T>,
    lambda2: T,
    levels: Vec<OnceCell<ProperLevels<T>>>,
    walks: Vec<OnceCell<LinOp<T>>>,
}

impl<'a, T: Scalar> TheoremContext<'a, T> {
    pub fn new(x: &'a PureComplex<T>) -> Result<Self> {
        let gamma = gamma_profile(x)?;
        let lambda2 = lambda2_skeleton(x)?;
        let slots = (x.top_dim() + 1) as usize;
        Ok(Self {
            x,
            gamma,
            lambda2,
            levels: (0..slots).map(|_| OnceCell::new()).collect(),
            walks: (0..slots).map(|_| OnceCell::new()).collect(),
        })
    }

    pub fn complex(&self) -> &PureComplex<T> {
        self.x
    }

    pub fn gamma(&self) -> &GammaProfile<T> {
        &self.gamma
    }

    pub fn lambda2(&self) -> T {
        self.lambda2
    }

    pub fn lambda_table(&self) -> LambdaTable<T> {
        LambdaTable::from_profile(&self.gamma)
    }

    pub fn levels(&self, k: isize) -> Result<&ProperLevels<T>> {
        self.check_k(k, 0, self.x.top_dim())?;
        let cell = &self.levels[k as usize];
        if let Some(p) = cell.get() {
            return Ok(p);
        }
        let p = ProperLevels::new(self.x, k)?;
        Ok(cell.get_or_init(|| p))
    }

    fn walk(&self, k: isize) -> Result<&LinOp<T>> {
        self.check_k(k, 0, self.x.top_dim() - 1)?;
        let cell = &self.walks[k as usize];
        if let Some(m) = cell.get() {
            return Ok(m);
        }
        let m = nonlazy(self.x, k)?;
        Ok(cell.get_or_init(|| m))
    }

    fn check_k(&self, k: isize, lo: isize, hi: isize) -> Result<()> {
        if k < lo || k > hi {
            return Err(HdxError::DimensionOutOfRange { dim: k, lo, hi });
        }
        Ok(())
    }

    fn require_mean_zero(&self, f: &Cochain<T>) -> Result<()> {
        let m = mean(self.x, f)?;
        if m.abs() > T::tol(1e-9) {
            return Err(HdxError::NotLevel {
                level: 0,
                residual: m.abs().as_f64(),
            });
        }
        Ok(())
    }

    pub fn decompose(&self, f: &Cochain<T>) -> Result<LevelDecomposition<T>> {
        self.levels(f.dim())?.decompose(self.x, f)
    }

    /// `‖d*_0⋯d*_{k−1} f‖² ≤ (1 − (k/(k+1))(1−γ)) ‖f‖²` for `⟨f, 1⟩ = 0`,
    /// with `γ` the second eigenvalue of the vertex walk.
    pub fn advantage_check(&self, f: &Cochain<T>) -> Result<BoundReport<T>> {
        let k = f.dim();
        self.check_k(k, 0, self.x.top_dim())?;
        self.require_mean_zero(f)?;
        let down = multi_down(self.x, 0, k)?.apply(f)?;
        let lhs = norm_sq(self.x, &down)?;
        let kk = T::from_count(k as usize);
        let coefficient = T::one() - kk / (kk + T::one()) * (T::one() - self.lambda2);
        Ok(BoundReport::new(
            lhs,
            vec![LevelTerm {
                level: 0,
                coefficient,
                norm_sq: norm_sq(self.x, f)?,
            }],
        ))
    }

    fn fine_grained_terms(&self, f: &Cochain<T>) -> Result<Vec<LevelTerm<T>>> {
        let k = f.dim();
        self.check_k(k, 0, self.x.top_dim() - 1)?;
        self.require_mean_zero(f)?;
        let dec = self.decompose(f)?;
        (0..=k)
            .map(|i| {
                let coefficient = level_coefficient(&self.gamma, i, k).ok_or_else(|| {
                    HdxError::Hypothesis(format!("no expansion value for level {i} of dimension {k}"))
                })?;
                Ok(LevelTerm {
                    level: i,
                    coefficient,
                    norm_sq: dec.norm_sq(i),
                })
            })
            .collect()
    }

    /// `⟨M f, f⟩ ≤ Σ_i λ(i, k) ‖f_i‖²` over the proper level components of `f ⊥ 1`.
    pub fn fine_grained_check(&self, f: &Cochain<T>) -> Result<BoundReport<T>> {
        let terms = self.fine_grained_terms(f)?;
        let lhs = self.walk(f.dim())?.quadratic_form(self.x, f)?;
        Ok(BoundReport::new(lhs, terms))
    }

    /// `⟨M f, f⟩ ≤ λ(0, k) ‖f‖²`, reported with the level-resolved rhs.
    pub fn alev_lau_check(&self, f: &Cochain<T>) -> Result<AlevLauReport<T>> {
        let fine = self.fine_grained_check(f)?;
        let k = f.dim();
        let coefficient = level_coefficient(&self.gamma, 0, k)
            .ok_or_else(|| HdxError::Hypothesis(format!("no expansion value for dimension {k}")))?;
        let report = BoundReport::new(
            fine.lhs,
            vec![LevelTerm {
                level: 0,
                coefficient,
                norm_sq: norm_sq(self.x, f)?,
            }],
        );
        Ok(AlevLauReport {
            improvement: report.rhs - fine.rhs,
            fine_grained_rhs: fine.rhs,
            report,
        })
    }

    /// `⟨U f, f⟩ ≤ Σ_i (((k+1)/(k+2)) λ(i, k) + 1/(k+2)) ‖f_i‖²`.
    pub fn updown_corollary_check(&self, f: &Cochain<T>) -> Result<BoundReport<T>> {
        let k = f.dim();
        let kk = T::from_count((k + 1) as usize);
        let kk2 = kk + T::one();
        let terms = self
            .fine_grained_terms(f)?
            .into_iter()
            .map(|t| LevelTerm {
                coefficient: kk / kk2 * t.coefficient + T::one() / kk2,
                ..t
            })
            .collect();
        let lhs = up_down(self.x, k, 1)?.quadratic_form(self.x, f)?;
        Ok(BoundReport::new(lhs, terms))
    }

    /// Checks both recursive conditions on the coefficient tables of `X` and
    /// of every link that carries cochains of dimension at least one.
    ///
    /// The first condition is maximized exactly over the 0-level space of each
    /// link; the second compares tables entrywise.
    pub fn bootstrap_certificate(&self, k: isize) -> Result<BootstrapCertificate<T>> {
        self.check_k(k, 1, self.x.top_dim() - 1)?;
        let mut profiles: HashMap<Face, GammaProfile<T>> = HashMap::new();
        profiles.insert(Face::empty(), self.gamma.clone());
        let mut entries = Vec::new();
        let mut link_tables = Vec::new();
        for size in 0..k {
            for sigma in self.x.faces(size - 1)? {
                let kp = k - size;
                let y = self.x.link(sigma)?;
                let gy = profile_for(&mut profiles, self.x, sigma)?;
                let ty = LambdaTable::from_profile(&gy);
                let mut vertex_tables = Vec::new();
                for v in y.faces(0)? {
                    let face = sigma.union(v);
                    let gv = profile_for(&mut profiles, self.x, &face)?;
                    vertex_tables.push((v.clone(), LambdaTable::from_profile(&gv)));
                }
                let slack_first = first_condition(&y, kp, &ty)?;
                let mut slack_second = T::max_value().expect("bounded scalar");
                for i in 1..=kp {
                    let here = ty.get(i, kp).ok_or_else(|| missing(i, kp))?;
                    let mut worst = -T::max_value().expect("bounded scalar");
                    for (_, tv) in &vertex_tables {
                        worst = worst.max(tv.get(i - 1, kp - 1).ok_or_else(|| missing(i - 1, kp - 1))?);
                    }
                    slack_second = slack_second.min(here - worst);
                }
                if !sigma.is_empty() {
                    link_tables.push((sigma.clone(), ty));
                }
                entries.push(BootstrapEntry {
                    face: sigma.clone(),
                    k: kp,
                    slack_first,
                    slack_second,
                });
            }
        }
        let worst_slack_first = entries
            .iter()
            .map(|e| e.slack_first)
            .fold(T::max_value().unwrap(), |a, b| a.min(b));
        let worst_slack_second = entries
            .iter()
            .map(|e| e.slack_second)
            .fold(T::max_value().unwrap(), |a, b| a.min(b));
        Ok(BootstrapCertificate {
            table: self.lambda_table(),
            link_tables,
            entries,
            worst_slack_first,
            worst_slack_second,
        })
    }
}

fn missing(i: isize, k: isize) -> HdxError {
    HdxError::Hypothesis(format!("coefficient table lacks level {i} of dimension {k}"))
}

fn profile_for<T: Scalar>(
    cache: &mut HashMap<Face, GammaProfile<T>>,
    x: &PureComplex<T>,
    sigma: &Face,
) -> Result<GammaProfile<T>> {
    if let Some(p) = cache.get(sigma) {
        return Ok(p.clone());
    }
    let link = x.link(sigma)?;
    let p = gamma_profile(&link).map_err(|e| match e {
        HdxError::Disconnected { face } => HdxError::Disconnected {
            face: face.union(sigma),
        },
        other => other,
    })?;
    cache.insert(sigma.clone(), p.clone());
    Ok(p)
}

/// `−max_g [(λ1 − λ0)‖g‖² + (1 − λ1) E_v ‖P V_v g‖²]` over unit 0-level `g`,
/// where `P` is the projection onto constants inside each vertex link.
fn first_condition<T: Scalar>(y: &PureComplex<T>, k: isize, table: &LambdaTable<T>) -> Result<T> {
    let lam0 = table.get(0, k).ok_or_else(|| missing(0, k))?;
    let lam1 = table.get(1, k).ok_or_else(|| missing(1, k))?;
    let n = y.num_faces(k)?;
    let wk = y.weights(k)?;
    let r = k - 1;
    let mut q = DMatrix::<T>::zeros(n, n);
    for (v, wv) in y.faces(0)?.iter().zip(y.weights(0)?) {
        let link = y.link(v)?;
        let loc = localization_matrix(y, &link, v, k)?;
        let lw = link.weights(r)?;
        // P L has identical rows wᵀL, so ‖P L g‖² = (wᵀ L g)².
        let row = DMatrix::from_row_slice(1, lw.len(), lw) * loc;
        q += row.transpose() * row * *wv;
    }
    let mut form = q * (T::one() - lam1);
    for (i, w) in wk.iter().enumerate() {
        form[(i, i)] += (lam1 - lam0) * *w;
    }
    let levels = ProperLevels::new(y, k)?;
    let b = levels.level(0).matrix();
    if b.ncols() == 0 {
        return Ok(T::zero());
    }
    let restricted = b.transpose() * form * b;
    let sym = (&restricted + restricted.transpose()) * T::lit(0.5);
    let top = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(-T::max_value().expect("bounded scalar"), |a, b| a.max(b));
    Ok(-top)
}

/// Compares `λ₂(X)` with `λ/(1−λ)` for `λ` the worst vertex-link expansion,
/// and checks that averaging the restricted cochain over a vertex link equals
/// one step of the vertex walk.
pub fn trickling_down_check<T: Scalar>(x: &PureComplex<T>) -> Result<TricklingReport<T>> {
    if x.top_dim() < 2 {
        return Err(HdxError::Hypothesis(
            "vertex links need dimension at least one".into(),
        ));
    }
    let actual = lambda2_skeleton(x)?;
    let mut worst: Option<(T, Face)> = None;
    for v in x.faces(0)? {
        let l = link_lambda2(x, v)?;
        if worst.as_ref().is_none_or(|(b, _)| l > *b) {
            worst = Some((l, v.clone()));
        }
    }
    let (lambda_local, worst_vertex) = worst.expect("complex has vertices");
    if lambda_local >= T::one() {
        return Err(HdxError::Hypothesis(format!(
            "vertex link expansion {lambda_local} is not below one"
        )));
    }
    let bound = lambda_local / (T::one() - lambda_local);

    // Linear in f, so the standard basis covers every cochain.
    let walk = nonlazy(x, 0)?;
    let mut advantage_residual = T::zero();
    for (v_idx, v) in x.faces(0)?.iter().enumerate() {
        let link = x.link(v)?;
        let lw = link.weights(0)?;
        for (u_idx, u) in x.faces(0)?.iter().enumerate() {
            let link_mean = link.index_of(u).map(|p| lw[p]).unwrap_or_else(T::zero);
            let step = walk.matrix()[(v_idx, u_idx)];
            advantage_residual = advantage_residual.max((link_mean - step).abs());
        }
    }
    Ok(TricklingReport {
        lambda_local,
        worst_vertex,
        bound,
        actual,
        pass: actual <= bound + T::tol(1e-9),
        advantage_residual,
    })
}
