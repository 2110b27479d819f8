use crate::error::{Error, Result};
use crate::symbolic::TransitionTable;

/// `k (k-1) ... (k-N+2) (k-3N+1)`, clamped at zero.
pub fn count_itineraries(k: u64, n: u64) -> Result<u128> {
    if n < 3 {
        return Err(Error::invalid("the itinerary count needs N >= 3"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k + 1 < 3 * n || k < n - 1 {
        return Ok(0);
    }
    let mut total: u128 = (k + 1 - 3 * n) as u128;
    for q in 0..n - 1 {
        total = total.saturating_mul((k - q) as u128);
    }
    Ok(total)
}

/// Exact number of tuples `(i_0, ..., i_{N-1})` of distinct symbols with
/// `i_{t+1} ∈ J(i_t, i_{t-1})` for every `t`, indices mod `N`.
pub fn enumerate_cyclic_itineraries(table: &TransitionTable, n: usize) -> u128 {
    let k = table.k;
    if n == 0 || n > k {
        return 0;
    }
    let mut path = Vec::with_capacity(n);
    let mut used = vec![false; k];
    let mut count = 0u128;
    fn extend(table: &TransitionTable, n: usize, path: &mut Vec<usize>, used: &mut [bool], count: &mut u128) {
        let len = path.len();
        if len == n {
            let ok = (0..n).all(|t| table.allows(path[t], path[(t + n - 1) % n], path[(t + 1) % n]));
            if ok {
                *count += 1;
            }
            return;
        }
        for s in 0..table.k {
            if used[s] {
                continue;
            }
            if len >= 2 && !table.allows(path[len - 1], path[len - 2], s) {
                continue;
            }
            used[s] = true;
            path.push(s);
            extend(table, n, path, used, count);
            path.pop();
            used[s] = false;
        }
    }
    extend(table, n, &mut path, &mut used, &mut count);
    count
}
