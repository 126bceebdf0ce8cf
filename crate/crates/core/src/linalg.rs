//! Sparse direct solves with a reusable symbolic factorization.

use crate::error::{Error, Result};
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par};
use std::sync::Once;

static THREADS: Once = Once::new();

/// Worker threads used by the sparse factorization.
///
/// Defaults to `TRANSLATOR_LAB_THREADS`, or 1 when unset, so results are
/// reproducible run to run.
pub fn set_worker_threads(n: usize) {
    THREADS.call_once(|| {});
    apply_threads(n);
}

fn apply_threads(n: usize) {
    faer::set_global_parallelism(if n <= 1 { Par::Seq } else { Par::rayon(n) });
}

fn init_threads() {
    THREADS.call_once(|| {
        let n = std::env::var("TRANSLATOR_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(1);
        apply_threads(n);
    });
}

/// Caches the symbolic analysis of one sparsity pattern.
#[derive(Default)]
pub(crate) struct LuCache {
    symbolic: Option<SymbolicLu<usize>>,
}

/// Solves `A x = rhs` in place. `entries` must list the same pattern on every
/// call that shares `cache`.
pub(crate) fn solve(n: usize, entries: &[(usize, usize, f64)], rhs: &mut [f64], cache: &mut LuCache) -> Result<()> {
    init_threads();
    let trip: Vec<Triplet<usize, usize, f64>> = entries.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| Error::LinearSolveSingular(format!("{e:?}")))?;
    let symbolic = match &cache.symbolic {
        Some(s) => s.clone(),
        None => {
            let s = SymbolicLu::try_new(a.symbolic()).map_err(|e| Error::LinearSolveSingular(format!("{e:?}")))?;
            cache.symbolic = Some(s.clone());
            s
        }
    };
    let lu = Lu::try_new_with_symbolic(symbolic, a.as_ref()).map_err(|e| Error::LinearSolveSingular(format!("{e:?}")))?;
    let mut b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    lu.solve_in_place(b.as_mut());
    for (i, r) in rhs.iter_mut().enumerate() {
        *r = b[(i, 0)];
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolveSingular("non-finite solution".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system() {
        let e = vec![(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)];
        let mut b = vec![3.0, 5.0];
        let mut c = LuCache::default();
        solve(2, &e, &mut b, &mut c).unwrap();
        assert!((b[0] - 0.8).abs() < 1e-14 && (b[1] - 1.4).abs() < 1e-14);
        let mut b2 = vec![2.0, 1.0];
        solve(2, &e, &mut b2, &mut c).unwrap();
        assert!((2.0 * b2[0] + b2[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let e = vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)];
        let mut b = vec![1.0, 2.0];
        assert!(solve(2, &e, &mut b, &mut LuCache::default()).is_err());
    }
}
