//! Data-parallel loop helpers with a sequential fallback.
//!
//! With the `parallel` feature (the default) the hot loops run on the rayon
//! global pool; built with `--no-default-features` they degrade to plain
//! loops. Reductions are chunked with a fixed chunk size and combined in
//! index order in both builds, so results are bit-identical regardless of
//! feature selection or thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed reduction chunk size; part of the determinism contract.
const SUM_CHUNK: usize = 4096;

/// Cap the rayon pool from `WAVECRIT_THREADS`. No-op when the pool is
/// already built or the feature is off.
pub fn init_threads_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var("WAVECRIT_THREADS") {
            if let Ok(n) = v.parse::<usize>() {
                if n > 0 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    }
}

/// Apply `f(index, element)` to every element.
pub fn for_each_enumerated<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(SUM_CHUNK).enumerate().for_each(|(ci, chunk)| {
            let base = ci * SUM_CHUNK;
            for (j, x) in chunk.iter_mut().enumerate() {
                f(base + j, x);
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, x) in data.iter_mut().enumerate() {
            f(i, x);
        }
    }
}

/// Apply `f(index, a[i], b[i])` over two equal-length slices.
pub fn zip_apply<T, U, F>(a: &mut [T], b: &mut [U], f: F)
where
    T: Send,
    U: Send,
    F: Fn(usize, &mut T, &mut U) + Sync,
{
    assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(SUM_CHUNK)
            .zip(b.par_chunks_mut(SUM_CHUNK))
            .enumerate()
            .for_each(|(ci, (ca, cb))| {
                let base = ci * SUM_CHUNK;
                for (j, (x, y)) in ca.iter_mut().zip(cb.iter_mut()).enumerate() {
                    f(base + j, x, y);
                }
            });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, (x, y)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
            f(i, x, y);
        }
    }
}

/// Deterministic chunked sum of `term(i)` for `i in 0..len`.
///
/// Each chunk is summed left to right with Neumaier compensation and the
/// chunk totals are folded in index order.
pub fn sum_indexed<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_chunks = len.div_ceil(SUM_CHUNK);
    let chunk_sum = |ci: usize| -> f64 {
        let lo = ci * SUM_CHUNK;
        let hi = (lo + SUM_CHUNK).min(len);
        let mut s = 0.0f64;
        let mut comp = 0.0f64;
        for i in lo..hi {
            let x = term(i);
            let t = s + x;
            comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            s = t;
        }
        s + comp
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = (0..n_chunks).into_par_iter().map(chunk_sum).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = (0..n_chunks).map(chunk_sum).collect();
    let mut s = 0.0f64;
    let mut comp = 0.0f64;
    for x in partials {
        let t = s + x;
        comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + comp
}

/// Run `f(block_index, block_slice)` over disjoint equal blocks of `data`.
/// `data.len()` must be a multiple of `block_len`.
pub fn for_each_block_mut<T, F>(data: &mut [T], block_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    assert_eq!(data.len() % block_len, 0);
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(block_len).enumerate().for_each(|(i, b)| f(i, b));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, b) in data.chunks_mut(block_len).enumerate() {
            f(i, b);
        }
    }
}
