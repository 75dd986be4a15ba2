//! Inputs shared by the benchmarks.

use kgraph_core::fixtures::omega;
use kgraph_core::{Degree, KGraph, Path};

/// Grids `omega(2, (n, n))` for the given sizes.
pub fn grids(sizes: &[u32]) -> Vec<(String, KGraph)> {
    sizes.iter().map(|&n| (format!("omega_2_({n},{n})"), omega(2, &Degree::from([n, n])))).collect()
}

/// The longest path out of the origin, split into its first half and the rest.
pub fn halves(g: &KGraph) -> (Path, Path) {
    let top = g.max_degree().expect("grids are finite").clone();
    let origin = g.vertices().next().expect("grids have vertices");
    let p = g.paths(origin, &top).into_iter().next().expect("the grid has a diagonal");
    let half = Degree::new(top.coords().iter().map(|c| c / 2).collect());
    g.factor(&p, &half).expect("half is below the top")
}
