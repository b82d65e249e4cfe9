//! Chunked work distribution over amplitude-group index spaces.
//!
//! A gate on `k` qubits partitions the state into `2^(n-k)` disjoint groups
//! of `2^k` amplitudes. Work items are contiguous ranges of group indices, so
//! two work items never touch the same amplitude no matter which qubits the
//! gate acts on.

use std::ops::Range;

use rayon::prelude::*;

/// Raw pointer to the amplitude buffer, shareable across workers.
///
/// Sound only while every worker writes a disjoint set of indices, which the
/// group decomposition guarantees.
#[derive(Clone, Copy)]
pub(crate) struct SharedMut<T>(*mut T);

unsafe impl<T: Send> Send for SharedMut<T> {}
unsafe impl<T: Send> Sync for SharedMut<T> {}

impl<T> SharedMut<T> {
    pub(crate) fn new(slice: &mut [T]) -> Self {
        SharedMut(slice.as_mut_ptr())
    }

    /// # Safety
    /// `i` must be in bounds and not concurrently accessed by another worker.
    #[inline(always)]
    pub(crate) unsafe fn get(self, i: usize) -> T
    where
        T: Copy,
    {
        unsafe { *self.0.add(i) }
    }

    /// # Safety
    /// Same as [`SharedMut::get`].
    #[inline(always)]
    pub(crate) unsafe fn set(self, i: usize, v: T) {
        unsafe { *self.0.add(i) = v }
    }
}

fn n_items(n_groups: usize, chunk: usize) -> usize {
    n_groups.div_ceil(chunk)
}

fn item_range(k: usize, n_groups: usize, chunk: usize) -> Range<usize> {
    k * chunk..((k + 1) * chunk).min(n_groups)
}

/// Runs `f` over `0..n_groups` split into ranges of at most `chunk` groups.
/// Small spaces (a single work item) run inline on the caller.
pub(crate) fn for_each_chunk<F>(pool: Option<&rayon::ThreadPool>, n_groups: usize, chunk: usize, f: F)
where
    F: Fn(Range<usize>) + Sync + Send,
{
    let items = n_items(n_groups, chunk);
    match pool {
        Some(pool) if items > 1 => pool.install(|| {
            (0..items)
                .into_par_iter()
                .for_each(|k| f(item_range(k, n_groups, chunk)))
        }),
        _ => f(0..n_groups),
    }
}

/// Reduces `f` over chunk ranges. Partial results are always combined in
/// ascending chunk order, so the result does not depend on the thread count.
pub(crate) fn sum_chunks<F>(pool: Option<&rayon::ThreadPool>, n_groups: usize, chunk: usize, f: F) -> (f64, f64)
where
    F: Fn(Range<usize>) -> (f64, f64) + Sync + Send,
{
    let items = n_items(n_groups, chunk);
    let combine = |acc: (f64, f64), p: (f64, f64)| (acc.0 + p.0, acc.1 + p.1);
    match pool {
        Some(pool) if items > 1 => {
            let partials: Vec<(f64, f64)> = pool.install(|| {
                (0..items)
                    .into_par_iter()
                    .map(|k| f(item_range(k, n_groups, chunk)))
                    .collect()
            });
            partials.into_iter().fold((0.0, 0.0), combine)
        }
        _ => (0..items)
            .map(|k| f(item_range(k, n_groups, chunk)))
            .fold((0.0, 0.0), combine),
    }
}

/// Inserts a zero bit at position `pos` of `idx`.
#[inline(always)]
pub(crate) fn insert_zero(idx: usize, pos: u32) -> usize {
    let low = (1usize << pos) - 1;
    ((idx & !low) << 1) | (idx & low)
}

/// Inserts zero bits at positions `lo < hi`.
#[inline(always)]
pub(crate) fn insert_two_zeros(idx: usize, lo: u32, hi: u32) -> usize {
    insert_zero(insert_zero(idx, lo), hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[test]
    fn insert_zero_enumerates_bit_clear_indices() {
        for pos in 0..5 {
            let got: Vec<usize> = (0..16).map(|g| insert_zero(g, pos)).collect();
            let want: Vec<usize> = (0..32).filter(|i| i & (1 << pos) == 0).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn insert_two_zeros_enumerates() {
        for lo in 0..5u32 {
            for hi in lo + 1..6 {
                let got: Vec<usize> = (0..16).map(|g| insert_two_zeros(g, lo, hi)).collect();
                let mask = (1 << lo) | (1 << hi);
                let want: Vec<usize> = (0..64).filter(|i| i & mask == 0).collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn chunks_cover_space_once() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let seen = Mutex::new(vec![0u8; 100]);
        for_each_chunk(Some(&pool), 100, 16, |r| {
            let mut s = seen.lock().unwrap();
            for i in r {
                s[i] += 1;
            }
        });
        assert!(seen.into_inner().unwrap().iter().all(|&c| c == 1));
    }

    #[test]
    fn reduction_is_order_fixed() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let f = |r: Range<usize>| (r.map(|i| 1.0 / (i as f64 + 1.0)).sum::<f64>(), 0.0);
        let a = sum_chunks(None, 10_000, 64, f);
        let b = sum_chunks(Some(&pool), 10_000, 64, f);
        assert_eq!(a.0.to_bits(), b.0.to_bits());
    }
}
