//! Independent oracles shared by the integration tests. None of these call
//! into the library routines they are used to check.
#![allow(dead_code)]

use henon_core::symbolic::TransitionTable;
use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// All roots of `Σ coeffs[q] z^q` by Durand-Kerner iteration.
pub fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|&x| c(x / lead, 0.0)).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(c(0.0, 0.0), |acc, q| acc * z + q);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|q| seed.powu(q as u32)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for q in 0..d {
            let mut denom = c(1.0, 0.0);
            for p in 0..d {
                if p != q {
                    denom *= roots[q] - roots[p];
                }
            }
            let step = eval(roots[q]) / denom;
            roots[q] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

/// Pair transfer matrix `A[(j,i),(i,l)] = 1` for `j ∈ J(i, l)`, state index
/// `current * k + previous`.
pub fn pair_matrix(table: &TransitionTable) -> Vec<Vec<u128>> {
    let k = table.k;
    let mut a = vec![vec![0u128; k * k]; k * k];
    for i in 0..k {
        for l in 0..k {
            for j in 0..k {
                if table.get(i, l).contains(&j) {
                    a[i * k + l][j * k + i] = 1;
                }
            }
        }
    }
    a
}

/// Number of length-`m` words from matrix powers: the entry sum of
/// `A^{m-2}` (each of the `k²` starting pairs contributes its row).
pub fn words_by_matrix_power(table: &TransitionTable, m: usize) -> u128 {
    let k = table.k;
    if m == 0 {
        return 1;
    }
    if m == 1 {
        return k as u128;
    }
    let a = pair_matrix(table);
    let s = k * k;
    let mut p: Vec<Vec<u128>> = (0..s).map(|x| (0..s).map(|y| u128::from(x == y)).collect()).collect();
    for _ in 0..m - 2 {
        let mut next = vec![vec![0u128; s]; s];
        for x in 0..s {
            for y in 0..s {
                if p[x][y] == 0 {
                    continue;
                }
                for z in 0..s {
                    next[x][z] += p[x][y] * a[y][z];
                }
            }
        }
        p = next;
    }
    p.iter().flatten().sum()
}

/// `ln` of the spectral radius of the pair matrix by Gelfand's formula,
/// `ln ρ = lim ln‖A^m‖ / m`, with `m = 2^60` reached by rescaled squaring.
pub fn entropy_by_gelfand(table: &TransitionTable) -> f64 {
    let a = pair_matrix(table);
    let s = a.len();
    let mut m = DMatrix::from_fn(s, s, |x, y| a[x][y] as f64);
    let mut log_scale = 0.0f64;
    for _ in 0..60 {
        let norm = m.abs().max();
        if norm == 0.0 {
            return f64::NEG_INFINITY;
        }
        m /= norm;
        log_scale += norm.ln();
        m = &m * &m;
        log_scale *= 2.0;
    }
    let norm = m.abs().max();
    if norm == 0.0 {
        return f64::NEG_INFINITY;
    }
    (log_scale + norm.ln()) / 2f64.powi(60)
}

/// Table with exactly `k - 2` symbols in every `J(i, l)`.
pub fn uniform_rich_table(k: usize) -> TransitionTable {
    TransitionTable::from_fn(k, |i, l, j| {
        let other = if i == l { (i + 1) % k } else { l };
        j != i && j != other
    })
}

/// Random table with `#J(i, l) >= k - 2`: each pair drops at most two
/// symbols.
pub fn random_rich_table(k: usize, seed: u64) -> TransitionTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drop = vec![Vec::new(); k * k];
    for slot in drop.iter_mut() {
        let count = rng.gen_range(0..=2.min(k));
        while slot.len() < count {
            let j = rng.gen_range(0..k);
            if !slot.contains(&j) {
                slot.push(j);
            }
        }
    }
    TransitionTable::from_fn(k, |i, l, j| !drop[i * k + l].contains(&j))
}

/// Distinct-entry tuples with `i_{t+1} ∈ J(i_t, i_{t-1})` (indices mod `N`),
/// by enumerating all `k^N` tuples.
pub fn brute_force_itineraries(table: &TransitionTable, n: usize) -> u128 {
    let k = table.k;
    let total = k.pow(n as u32);
    let mut count = 0u128;
    let mut tuple = vec![0usize; n];
    for code in 0..total {
        let mut x = code;
        for slot in tuple.iter_mut() {
            *slot = x % k;
            x /= k;
        }
        let distinct = (0..n).all(|a| (a + 1..n).all(|b| tuple[a] != tuple[b]));
        if !distinct {
            continue;
        }
        let ok = (0..n).all(|t| table.get(tuple[t], tuple[(t + n - 1) % n]).contains(&tuple[(t + 1) % n]));
        if ok {
            count += 1;
        }
    }
    count
}

/// Fixed point of `P ↦ A_{N-1} ∘ ... ∘ A_0 (P)` where
/// `A_t(z, w) = (M (z - x_{i_t}) - δ w, z)`.
pub fn affine_cycle_point(m: Complex64, delta: Complex64, centers: &[Complex64]) -> [Complex64; 2] {
    let l = Matrix2::new(m, -delta, c(1.0, 0.0), c(0.0, 0.0));
    let mut lin = Matrix2::identity();
    let mut off = Vector2::new(c(0.0, 0.0), c(0.0, 0.0));
    for x in centers {
        lin = l * lin;
        off = l * off + Vector2::new(-m * x, c(0.0, 0.0));
    }
    let p = (Matrix2::identity() - lin).lu().solve(&off).expect("affine cycle is nondegenerate");
    [p[0], p[1]]
}

/// Eigenvalues of a complex 2×2 matrix through nalgebra's Schur form.
pub fn eigenvalues2(m: [[Complex64; 2]; 2]) -> [Complex64; 2] {
    let mat = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
    let ev = mat.schur().eigenvalues().expect("complex Schur form is triangular");
    let (a, b) = (ev[0], ev[1]);
    if a.norm() >= b.norm() {
        [a, b]
    } else {
        [b, a]
    }
}

pub fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
