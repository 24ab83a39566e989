//! Fixture complexes and seeded random cochains.

use itertools::Itertools;
use nalgebra::DVector;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cochain::{mean, norm_sq, Cochain};
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::scalar::{binomial, Scalar};
use crate::spectral::is_connected;

/// Resampling attempts before [`random_pure`] gives up.
pub const RETRY_BUDGET: usize = 10_000;

/// All `(d+1)`-subsets of `{0, …, n−1}` with uniform weights.
pub fn complete<T: Scalar>(n: usize, d: usize) -> Result<PureComplex<T>> {
    if n < d + 1 {
        return Err(HdxError::InvalidParams(format!(
            "complete complex needs n ≥ d+1, got n={n}, d={d}"
        )));
    }
    let facets: Vec<Vec<usize>> = (0..n).combinations(d + 1).collect();
    PureComplex::from_facets(&facets, None)
}

/// Facets pick one vertex from each of `d+1` distinct parts.
///
/// Part `p` owns the next `parts[p]` consecutive vertex ids.
pub fn partite<T: Scalar>(parts: &[usize], d: usize) -> Result<PureComplex<T>> {
    if parts.len() < d + 1 || parts.contains(&0) {
        return Err(HdxError::InvalidParams(format!(
            "partite complex of dimension {d} needs at least {} non-empty parts",
            d + 1
        )));
    }
    let mut groups = Vec::with_capacity(parts.len());
    let mut next = 0;
    for &size in parts {
        groups.push((next..next + size).collect::<Vec<_>>());
        next += size;
    }
    let mut facets = Vec::new();
    for chosen in (0..groups.len()).combinations(d + 1) {
        for pick in chosen
            .iter()
            .map(|g| groups[*g].iter().copied())
            .multi_cartesian_product()
        {
            facets.push(pick);
        }
    }
    PureComplex::from_facets(&facets, None)
}

/// Two triangles sharing the edge `{1, 2}`.
pub fn two_triangles<T: Scalar>() -> PureComplex<T> {
    PureComplex::from_facets(&[vec![0, 1, 2], vec![1, 2, 3]], None).expect("valid fixture")
}

/// First face of dimension at most `d−2` (the empty face included) whose link
/// has a disconnected 1-skeleton.
pub fn first_disconnected_link<T: Scalar>(x: &PureComplex<T>) -> Result<Option<Face>> {
    for j in -1..=x.top_dim() - 2 {
        for sigma in x.faces(j)? {
            if !is_connected(&x.link(sigma)?) {
                return Ok(Some(sigma.clone()));
            }
        }
    }
    Ok(None)
}

/// `m` distinct uniformly random `d`-faces on `n` vertices, resampled until
/// every link of dimension ≥ 1 is connected. Deterministic in `seed`.
pub fn random_pure<T: Scalar>(n: usize, d: usize, m: usize, seed: u64) -> Result<PureComplex<T>> {
    random_pure_with_budget(n, d, m, seed, RETRY_BUDGET)
}

/// [`random_pure`] with an explicit number of draws.
pub fn random_pure_with_budget<T: Scalar>(
    n: usize,
    d: usize,
    m: usize,
    seed: u64,
    budget: usize,
) -> Result<PureComplex<T>> {
    if n < d + 1 {
        return Err(HdxError::InvalidParams(format!(
            "random complex needs n ≥ d+1, got n={n}, d={d}"
        )));
    }
    let pool: Vec<Vec<usize>> = (0..n).combinations(d + 1).collect();
    if m == 0 || m > pool.len() {
        return Err(HdxError::InvalidParams(format!(
            "facet count {m} outside 1..={} for n={n}, d={d}",
            binomial::<f64>(n, d + 1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let mut picked: Vec<usize> = sample(&mut rng, pool.len(), m).into_vec();
        picked.sort_unstable();
        let facets: Vec<Vec<usize>> = picked.iter().map(|i| pool[*i].clone()).collect();
        let x = PureComplex::from_facets(&facets, None)?;
        if first_disconnected_link(&x)?.is_none() {
            return Ok(x);
        }
    }
    Err(HdxError::InvalidParams(format!(
        "no complex with connected links after {budget} draws (n={n}, d={d}, m={m})"
    )))
}

/// Independent standard normal entries.
pub fn random_cochain<T: Scalar, R: Rng + ?Sized>(
    x: &PureComplex<T>,
    k: isize,
    rng: &mut R,
) -> Result<Cochain<T>> {
    let n = x.num_faces(k)?;
    let v = DVector::from_iterator(n, (0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))));
    Cochain::new(x, k, v)
}

/// A standard normal draw projected onto `⟨f, 1⟩ = 0` and scaled to unit norm.
///
/// Returns zero when the space is `{0}` (a single face).
pub fn random_mean_zero<T: Scalar, R: Rng + ?Sized>(
    x: &PureComplex<T>,
    k: isize,
    rng: &mut R,
) -> Result<Cochain<T>> {
    let f = random_cochain(x, k, rng)?;
    let m = mean(x, &f)?;
    let centered = Cochain::new(x, k, f.values().add_scalar(-m))?;
    let nn = norm_sq(x, &centered)?;
    if nn <= T::tol(1e-24) {
        return Cochain::zeros(x, k);
    }
    Ok(centered.scale(T::one() / nn.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_fixtures() {
        let t3 = complete::<f64>(3, 2).unwrap();
        assert_eq!(t3.num_faces(2).unwrap(), 1);
        let c42 = complete::<f64>(4, 2).unwrap();
        assert_eq!(c42.num_faces(2).unwrap(), 4);
        assert!(complete::<f64>(2, 2).is_err());
    }

    #[test]
    fn partite_counts() {
        let x = partite::<f64>(&[2, 2, 2], 2).unwrap();
        assert_eq!(x.num_faces(2).unwrap(), 8);
        assert_eq!(x.num_faces(1).unwrap(), 12);
        let y = partite::<f64>(&[1, 1, 1, 1], 2).unwrap();
        assert_eq!(y.num_faces(2).unwrap(), 4);
        assert!(partite::<f64>(&[2, 2], 2).is_err());
        assert!(partite::<f64>(&[2, 0, 2], 1).is_err());
    }

    #[test]
    fn random_pure_is_deterministic_and_connected() {
        for seed in 1..=3 {
            let a = random_pure::<f64>(7, 2, 12, seed).unwrap();
            let b = random_pure::<f64>(7, 2, 12, seed).unwrap();
            assert_eq!(a.faces(2).unwrap(), b.faces(2).unwrap());
            assert_eq!(a.num_faces(2).unwrap(), 12);
            assert!(first_disconnected_link(&a).unwrap().is_none());
        }
        assert!(random_pure::<f64>(4, 2, 5, 0).is_err());
        assert!(random_pure::<f64>(2, 2, 1, 0).is_err());
    }

    #[test]
    fn infeasible_connectivity_is_reported() {
        assert!(random_pure_with_budget::<f64>(7, 2, 12, 1, 0).is_err());
        // Disjoint edge pairs are rejected, so any accepted draw is connected.
        assert!(random_pure_with_budget::<f64>(4, 1, 2, 5, 200).map_or(true, |x| is_connected(&x)));
    }

    #[test]
    fn mean_zero_samples() {
        let x = complete::<f64>(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..=2 {
            let f = random_mean_zero(&x, k, &mut rng).unwrap();
            assert!(mean(&x, &f).unwrap().abs() < 1e-12);
            assert!((norm_sq(&x, &f).unwrap() - 1.0).abs() < 1e-12);
        }
        let t3 = complete::<f64>(3, 2).unwrap();
        assert_eq!(random_mean_zero(&t3, 2, &mut rng).unwrap().max_abs(), 0.0);
    }
}
