//! Data-parallel helpers. With the `parallel` feature (default) these fan
//! out over the rayon pool; without it they run sequentially with the
//! same results.

#[cfg(feature = "parallel")]
mod actual {
    use rayon::prelude::*;

    pub fn map_collect<T, R, F>(source: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        source.par_iter().map(f).collect()
    }

    pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..len).into_par_iter().map(f).collect()
    }

    /// Ordered chunked sum; chunk boundaries are fixed so the result does
    /// not depend on the thread count.
    pub fn sum_range<T, F>(len: usize, f: F) -> T
    where
        T: Send + std::iter::Sum<T>,
        F: Fn(usize) -> T + Sync + Send,
    {
        let chunks = super::chunk_bounds(len);
        let partial: Vec<T> = chunks
            .par_iter()
            .map(|&(lo, hi)| (lo..hi).map(&f).sum::<T>())
            .collect();
        partial.into_iter().sum()
    }

    pub fn for_each_mut<T, F>(data: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }

    pub fn max_range<F>(len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        (0..len)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, super::nan_max)
    }
}

#[cfg(not(feature = "parallel"))]
mod actual {
    pub fn map_collect<T, R, F>(source: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        source.iter().map(f).collect()
    }

    pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..len).map(f).collect()
    }

    pub fn sum_range<T, F>(len: usize, f: F) -> T
    where
        T: Send + std::iter::Sum<T>,
        F: Fn(usize) -> T + Sync + Send,
    {
        let partial: Vec<T> = super::chunk_bounds(len)
            .iter()
            .map(|&(lo, hi)| (lo..hi).map(&f).sum::<T>())
            .collect();
        partial.into_iter().sum()
    }

    pub fn for_each_mut<T, F>(data: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }

    pub fn max_range<F>(len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        (0..len).map(f).fold(f64::NEG_INFINITY, super::nan_max)
    }
}

pub use actual::*;

const CHUNK: usize = 4096;

fn chunk_bounds(len: usize) -> Vec<(usize, usize)> {
    (0..len.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(len)))
        .collect()
}

/// Maximum that lets NaN win, so non-finite samples are never hidden.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
