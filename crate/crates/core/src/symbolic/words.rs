use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::table::TransitionTable;

/// Number of words `i_1 .. i_m` with `i_{t+1} ∈ J(i_t, i_{t-1})` for every
/// `t >= 2`. Saturates at `u128::MAX`.
pub fn count_admissible_words(table: &TransitionTable, m: usize) -> u128 {
    let k = table.k;
    match m {
        0 => return 1,
        1 => return k as u128,
        _ => {}
    }
    // counts[i * k + l]: words ending with current symbol i after l
    let mut counts = vec![1u128; k * k];
    for _ in 2..m {
        let mut next = vec![0u128; k * k];
        for i in 0..k {
            for l in 0..k {
                let c = counts[i * k + l];
                if c == 0 {
                    continue;
                }
                for &j in table.get(i, l) {
                    let slot = &mut next[j * k + i];
                    *slot = slot.saturating_add(c);
                }
            }
        }
        counts = next;
    }
    counts.iter().fold(0u128, |a, &c| a.saturating_add(c))
}

/// Successor lists of the pair-state graph: state `i * k + l` (current `i`,
/// previous `l`) steps to `j * k + i` for each `j ∈ J(i, l)`.
pub fn transfer_graph(table: &TransitionTable) -> Vec<Vec<usize>> {
    let k = table.k;
    let mut succ = vec![Vec::new(); k * k];
    for i in 0..k {
        for l in 0..k {
            succ[i * k + l] = table.get(i, l).iter().map(|&j| j * k + i).collect();
        }
    }
    succ
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// `ln` of the spectral radius; `-inf` when no infinite admissible word exists.
    pub value: f64,
    /// Collatz-Wielandt bracket on the spectral radius.
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200_000;

/// Spectral radius of one strongly connected block, by power iteration on
/// `A + I` (primitive, so the iteration converges) with Collatz-Wielandt
/// bounds.
fn block_radius(succ: &[Vec<usize>], members: &[usize], index: &[usize]) -> (f64, f64, usize) {
    let m = members.len();
    let mut x = vec![1.0f64; m];
    let mut y = vec![0.0f64; m];
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    for it in 1..=MAX_ITER {
        y.copy_from_slice(&x);
        // (A + I) x with A[s][t] = 1 for t ∈ succ(s)
        for (a, &s) in members.iter().enumerate() {
            for &t in &succ[s] {
                let b = index[t];
                if b != usize::MAX {
                    y[a] += x[b];
                }
            }
        }
        lo = f64::INFINITY;
        hi = 0.0f64;
        for a in 0..m {
            let ratio = y[a] / x[a];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        for a in 0..m {
            x[a] = y[a] / norm;
        }
        if hi - lo <= REL_TOL * hi {
            return (lo - 1.0, hi - 1.0, it);
        }
    }
    (lo - 1.0, hi - 1.0, MAX_ITER)
}

/// Entropy of the pair-state subshift with bounds and iteration count.
pub fn subshift_entropy_estimate(table: &TransitionTable) -> EntropyEstimate {
    let succ = transfer_graph(table);
    let states = succ.len();
    let mut g = DiGraph::<(), ()>::with_capacity(states, table.total());
    let nodes: Vec<_> = (0..states).map(|_| g.add_node(())).collect();
    for (s, out) in succ.iter().enumerate() {
        for &t in out {
            g.add_edge(nodes[s], nodes[t], ());
        }
    }
    let mut best = EntropyEstimate { value: f64::NEG_INFINITY, lower: 0.0, upper: 0.0, iterations: 0 };
    let mut index = vec![usize::MAX; states];
    for comp in tarjan_scc(&g) {
        let members: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        let cyclic = members.len() > 1 || succ[members[0]].contains(&members[0]);
        if !cyclic {
            continue;
        }
        for (a, &s) in members.iter().enumerate() {
            index[s] = a;
        }
        let (lo, hi, it) = block_radius(&succ, &members, &index);
        for &s in &members {
            index[s] = usize::MAX;
        }
        let value = (0.5 * (lo + hi)).ln();
        if value > best.value {
            best = EntropyEstimate { value, lower: lo, upper: hi, iterations: it };
        }
    }
    best
}

/// `ln` of the spectral radius of the pair-state transfer matrix.
pub fn subshift_entropy(table: &TransitionTable) -> f64 {
    subshift_entropy_estimate(table).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift() {
        let t = TransitionTable::full(4);
        assert_eq!(count_admissible_words(&t, 3), 64);
        assert_eq!(count_admissible_words(&t, 2), 16);
        assert!((subshift_entropy(&t) - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_row_sums() {
        for k in [3, 5, 8] {
            let t = TransitionTable::from_fn(k, |i, l, j| j != i && j != l);
            // pairs with i == l allow k - 1 symbols; trim to exactly k - 2
            let t = TransitionTable {
                k,
                sets: t
                    .sets
                    .into_iter()
                    .map(|mut s| {
                        s.truncate(k - 2);
                        s
                    })
                    .collect(),
            };
            assert_eq!(t.min_size(), k - 2);
            let h = subshift_entropy(&t);
            assert!((h - ((k - 2) as f64).ln()).abs() < 1e-8, "k={k} h={h}");
        }
    }

    #[test]
    fn single_loop_and_empty() {
        let mut t = TransitionTable::empty(3);
        t.sets[0] = vec![0];
        assert_eq!(subshift_entropy(&t), 0.0);
        assert_eq!(subshift_entropy(&TransitionTable::empty(3)), f64::NEG_INFINITY);
        // a dead end after a loop-free path still has no infinite word
        let mut chain = TransitionTable::empty(3);
        chain.sets[0] = vec![1];
        assert_eq!(subshift_entropy(&chain), f64::NEG_INFINITY);
        assert_eq!(count_admissible_words(&TransitionTable::empty(3), 2), 9);
        assert_eq!(count_admissible_words(&TransitionTable::empty(3), 3), 0);
    }
}
