use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{find_univalent_island, Island};
use crate::error::{Error, Result};
use crate::function::{rescale, Disk, EntireFunction, Holomorphic};

/// Centers `x_0..x_{k-1}` with inner radius `r` and outer radius `big_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskLayout {
    pub centers: Vec<Complex64>,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl DiskLayout {
    pub fn new(centers: Vec<Complex64>, r: f64, big_r: f64) -> Self {
        DiskLayout { centers, r, big_r }
    }

    /// `k` centers `i, 2i, ..., k i` on the imaginary axis.
    pub fn imaginary_axis(k: usize, r: f64, big_r: f64) -> Self {
        DiskLayout::new((1..=k).map(|t| Complex64::new(0.0, t as f64)).collect(), r, big_r)
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn validate(&self, delta: Complex64) -> Result<()> {
        let k = self.k();
        if k < 3 {
            return Err(Error::invalid(format!("need at least 3 centers, got {k}")));
        }
        if !(self.r > 0.0 && self.r < self.big_r && self.big_r.is_finite()) {
            return Err(Error::invalid(format!(
                "radii must satisfy 0 < r < R, got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        for a in 0..k {
            for b in a + 1..k {
                if !((self.centers[a] - self.centers[b]).norm() > 2.0 * self.big_r) {
                    return Err(Error::invalid(format!(
                        "closed disks of radius R around centers {a} and {b} intersect"
                    )));
                }
            }
        }
        if !(delta.norm() * self.r < self.big_r - self.r) {
            return Err(Error::invalid("geometry requires |delta| r < R - r"));
        }
        Ok(())
    }

    pub fn inner(&self, i: usize) -> Disk {
        Disk { center: self.centers[i], radius: self.r }
    }

    /// `D_R(x_j + δ x_l)`.
    pub fn target(&self, j: usize, l: usize, delta: Complex64) -> Disk {
        Disk { center: self.centers[j] + delta * self.centers[l], radius: self.big_r }
    }

    /// Smallest distance between two closed inner disks.
    pub fn min_gap(&self) -> f64 {
        let k = self.k();
        let mut gap = f64::INFINITY;
        for a in 0..k {
            for b in a + 1..k {
                gap = gap.min((self.centers[a] - self.centers[b]).norm() - 2.0 * self.r);
            }
        }
        gap
    }
}

/// The sets `J(i, l) ⊆ {0..k-1}`: symbol `j` may follow the pair
/// (current `i`, previous `l`) iff `j ∈ J(i, l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionTable {
    pub k: usize,
    /// Sorted lists, indexed by `i * k + l`.
    pub sets: Vec<Vec<usize>>,
}

impl TransitionTable {
    pub fn empty(k: usize) -> Self {
        TransitionTable { k, sets: vec![Vec::new(); k * k] }
    }

    pub fn full(k: usize) -> Self {
        TransitionTable::from_fn(k, |_, _, _| true)
    }

    pub fn from_fn(k: usize, allowed: impl Fn(usize, usize, usize) -> bool) -> Self {
        let mut t = TransitionTable::empty(k);
        for i in 0..k {
            for l in 0..k {
                t.sets[i * k + l] = (0..k).filter(|&j| allowed(i, l, j)).collect();
            }
        }
        t
    }

    pub fn get(&self, i: usize, l: usize) -> &[usize] {
        &self.sets[i * self.k + l]
    }

    pub fn allows(&self, i: usize, l: usize, j: usize) -> bool {
        self.get(i, l).binary_search(&j).is_ok()
    }

    pub fn min_size(&self) -> usize {
        self.sets.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.sets.len() != self.k * self.k {
            return Err(Error::invalid("transition table must have k^2 entries"));
        }
        for s in &self.sets {
            if s.windows(2).any(|p| p[0] >= p[1]) || s.iter().any(|&j| j >= self.k) {
                return Err(Error::invalid("transition sets must be sorted symbols below k"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandEntry {
    pub i: usize,
    pub l: usize,
    pub j: usize,
    pub island: Island,
}

/// A transition table together with the geometry and islands it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionStructure {
    pub layout: DiskLayout,
    pub delta: Complex64,
    pub n: u32,
    pub table: TransitionTable,
    pub islands: Vec<IslandEntry>,
    /// Richness threshold the search was run with.
    pub required: usize,
    pub rich: bool,
    /// Island searches that ended inconclusively (counted as absent).
    pub inconclusive: usize,
}

impl TransitionStructure {
    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn island(&self, i: usize, l: usize, j: usize) -> Option<&Island> {
        self.islands.binary_search_by(|e| (e.i, e.l, e.j).cmp(&(i, l, j))).ok().map(|idx| &self.islands[idx].island)
    }
}

/// Table for a single map `f_n`: `j ∈ J(i, l)` iff a univalent island of
/// `D_R(x_j + δ x_l)` lies in `D_r(x_i)`.
pub fn transition_table_at<F: Holomorphic>(
    f_n: &F,
    delta: Complex64,
    layout: &DiskLayout,
    n: u32,
    required: usize,
) -> Result<TransitionStructure> {
    layout.validate(delta)?;
    let k = layout.k();
    let triples: Vec<(usize, usize, usize)> =
        (0..k).flat_map(|i| (0..k).flat_map(move |l| (0..k).map(move |j| (i, l, j)))).collect();
    let found: Vec<(usize, usize, usize, Result<Option<Island>>)> = triples
        .par_iter()
        .map(|&(i, l, j)| (i, l, j, find_univalent_island(f_n, &layout.inner(i), &layout.target(j, l, delta))))
        .collect();
    let mut table = TransitionTable::empty(k);
    let mut islands = Vec::new();
    let mut inconclusive = 0;
    for (i, l, j, res) in found {
        match res {
            Ok(Some(island)) => {
                table.sets[i * k + l].push(j);
                islands.push(IslandEntry { i, l, j, island });
            }
            Ok(None) => {}
            Err(e) if e.is_honest_failure() => inconclusive += 1,
            Err(e) => return Err(e),
        }
    }
    let rich = table.min_size() >= required;
    Ok(TransitionStructure { layout: layout.clone(), delta, n, table, islands, required, rich, inconclusive })
}

/// Searches `n_search` in ascending order for the first `n` whose table has
/// `#J(i, l) >= required` for every pair (`required` defaults to `k - 2`).
/// Without success, the best table seen is returned with `rich = false`.
pub fn build_transition_table(
    f: &EntireFunction,
    delta: Complex64,
    layout: &DiskLayout,
    n_search: RangeInclusive<u32>,
    required: Option<usize>,
) -> Result<TransitionStructure> {
    layout.validate(delta)?;
    let k = layout.k();
    let required = required.unwrap_or(k - 2);
    if required > k {
        return Err(Error::invalid(format!("richness threshold {required} exceeds k = {k}")));
    }
    if n_search.is_empty() || *n_search.start() == 0 {
        return Err(Error::invalid("n search range must be nonempty and start at 1 or above"));
    }
    let mut best: Option<TransitionStructure> = None;
    for n in n_search {
        let s = transition_table_at(&rescale(f, n)?, delta, layout, n, required)?;
        if s.rich {
            return Ok(s);
        }
        let better = match &best {
            None => true,
            Some(b) => (s.table.min_size(), s.table.total()) > (b.table.min_size(), b.table.total()),
        };
        if better {
            best = Some(s);
        }
    }
    Ok(best.expect("search range is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_is_checked() {
        let good = DiskLayout::imaginary_axis(3, 0.3, 0.45);
        assert!(good.validate(Complex64::new(0.1, 0.0)).is_ok());
        assert!(DiskLayout::imaginary_axis(2, 0.3, 0.45).validate(Complex64::new(0.1, 0.0)).is_err());
        assert!(DiskLayout::imaginary_axis(3, 0.3, 0.55).validate(Complex64::new(0.1, 0.0)).is_err());
        assert!(DiskLayout::imaginary_axis(3, 0.45, 0.3).validate(Complex64::new(0.1, 0.0)).is_err());
        assert!(good.validate(Complex64::new(0.6, 0.0)).is_err());
        let e = build_transition_table(&EntireFunction::exp(), Complex64::new(0.6, 0.0), &good, 1..=5, None);
        assert!(matches!(e, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn identity_has_empty_table() {
        let layout = DiskLayout::imaginary_axis(3, 0.3, 0.45);
        let s = build_transition_table(&EntireFunction::monomial(1), Complex64::new(0.1, 0.0), &layout, 1..=3, None)
            .unwrap();
        assert!(!s.rich);
        assert_eq!(s.table.total(), 0);
    }

    #[test]
    fn table_helpers() {
        let t = TransitionTable::from_fn(4, |i, l, j| j != i && j != l);
        assert!(t.validate().is_ok());
        assert_eq!(t.get(0, 1), &[2, 3]);
        assert!(t.allows(2, 2, 0));
        assert!(!t.allows(2, 2, 2));
        assert_eq!(t.min_size(), 2);
        assert_eq!(TransitionTable::full(3).total(), 27);
    }
}
