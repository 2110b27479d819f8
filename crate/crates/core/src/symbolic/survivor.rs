use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::separated::PlaneMap;
use super::table::{DiskLayout, TransitionStructure};
use crate::error::{Error, Result};
use crate::henon_like::Point2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorCloud {
    pub depth: usize,
    pub grid_step: f64,
    /// Number of grid points of `H` that were tested.
    pub grid_size: usize,
    pub points: Vec<Point2>,
}

/// Lattice points `x_i + step (a + b i)` inside the closed inner disks.
pub fn disk_grid(layout: &DiskLayout, step: f64) -> Vec<Complex64> {
    let reach = (layout.r / step).floor() as i64;
    let mut pts = Vec::new();
    for c in &layout.centers {
        for b in -reach..=reach {
            for a in -reach..=reach {
                let off = Complex64::new(a as f64 * step, b as f64 * step);
                if off.norm() <= layout.r {
                    pts.push(c + off);
                }
            }
        }
    }
    pts
}

/// Whether `p` lies in `H = ∪ D̄_r(x_i) × D̄_r(x_l)`.
pub fn in_h(layout: &DiskLayout, p: &Point2) -> bool {
    let inside = |z: Complex64| layout.centers.iter().any(|c| (z - c).norm() <= layout.r);
    inside(p[0]) && inside(p[1])
}

/// Number of forward steps (at most `cap`) an orbit stays in `H`.
fn stay_time<M: PlaneMap + ?Sized>(map: &M, layout: &DiskLayout, p: Point2, cap: usize) -> usize {
    let mut q = p;
    for t in 0..cap {
        match map.step(q) {
            Ok(next) if in_h(layout, &next) => q = next,
            _ => return t,
        }
    }
    cap
}

/// Survivor clouds for depths `0..=max_depth` on one grid; the cloud at
/// depth `m` holds the grid points of `H` whose first `m` iterates stay in
/// `H`.
pub fn survivor_clouds<M: PlaneMap + ?Sized>(
    map: &M,
    structure: &TransitionStructure,
    max_depth: usize,
    grid_step: f64,
) -> Result<Vec<SurvivorCloud>> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let layout = &structure.layout;
    let grid = disk_grid(layout, grid_step);
    let m = grid.len();
    let times: Vec<usize> = (0..m * m)
        .into_par_iter()
        .map(|idx| stay_time(map, layout, [grid[idx / m], grid[idx % m]], max_depth))
        .collect();
    Ok((0..=max_depth)
        .map(|depth| SurvivorCloud {
            depth,
            grid_step,
            grid_size: m * m,
            points: times
                .iter()
                .enumerate()
                .filter(|(_, &t)| t >= depth)
                .map(|(idx, _)| [grid[idx / m], grid[idx % m]])
                .collect(),
        })
        .collect())
}

/// The survivor cloud at a single depth.
pub fn survivor_set<M: PlaneMap + ?Sized>(
    map: &M,
    structure: &TransitionStructure,
    depth: usize,
    grid_step: f64,
) -> Result<SurvivorCloud> {
    Ok(survivor_clouds(map, structure, depth, grid_step)?.pop().expect("at least depth 0"))
}

/// Checks that every stored point's first `depth` iterates remain in `H`.
pub fn replay_cloud<M: PlaneMap + ?Sized>(map: &M, layout: &DiskLayout, cloud: &SurvivorCloud) -> bool {
    cloud.points.par_iter().all(|p| in_h(layout, p) && stay_time(map, layout, *p, cloud.depth) >= cloud.depth)
}
