//! Synthetic road-like graphs in DIMACS format, for use when no real road
//! network file is at hand.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TapError};

/// Node and arc counts of the Rome road network distributed with the
/// 9th DIMACS implementation challenge.
pub const ROME_NODES: usize = 3353;
pub const ROME_ARCS: usize = 8870;

/// A two-way road grid: nodes on a jittered square lattice numbered row by
/// row, a random spanning tree of lattice links plus random extra links
/// until `arcs / 2` two-way roads exist. Weights are rounded Euclidean
/// lengths (lattice spacing 100). Always strongly connected.
pub fn synthetic_road_dimacs(nodes: usize, arcs: usize, seed: u64) -> Result<String> {
    if nodes < 2 || !arcs.is_multiple_of(2) || arcs / 2 < nodes - 1 {
        return Err(TapError::InvalidArgument(format!(
            "cannot build a connected two-way graph with {nodes} nodes and {arcs} arcs"
        )));
    }
    let width = (nodes as f64).sqrt().ceil() as usize;
    let mut links: Vec<(usize, usize)> = Vec::new();
    for v in 0..nodes {
        let c = v % width;
        if c + 1 < width && v + 1 < nodes {
            links.push((v, v + 1));
        }
        if v + width < nodes {
            links.push((v, v + width));
        }
    }
    if arcs / 2 > links.len() {
        return Err(TapError::InvalidArgument(format!(
            "{arcs} arcs exceed the {} lattice links available",
            2 * links.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter: Vec<(f64, f64)> = (0..nodes)
        .map(|v| {
            let (r, c) = ((v / width) as f64, (v % width) as f64);
            (c * 100.0 + rng.random_range(-30.0..30.0), r * 100.0 + rng.random_range(-30.0..30.0))
        })
        .collect();
    links.shuffle(&mut rng);
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut chosen = vec![false; links.len()];
    let mut count = 0;
    for (k, &(u, v)) in links.iter().enumerate() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            chosen[k] = true;
            count += 1;
        }
    }
    for c in chosen.iter_mut() {
        if count == arcs / 2 {
            break;
        }
        if !*c {
            *c = true;
            count += 1;
        }
    }
    let mut selected: Vec<(usize, usize)> =
        links.iter().zip(&chosen).filter(|(_, &c)| c).map(|(&l, _)| l).collect();
    selected.sort_unstable();
    let mut out = String::new();
    let _ = writeln!(out, "c synthetic road grid, seed {seed}");
    let _ = writeln!(out, "p sp {nodes} {arcs}");
    for (u, v) in selected {
        let (dx, dy) = (jitter[u].0 - jitter[v].0, jitter[u].1 - jitter[v].1);
        let w = (dx.hypot(dy).round() as u64).max(1);
        let _ = writeln!(out, "a {} {} {w}", u + 1, v + 1);
        let _ = writeln!(out, "a {} {} {w}", v + 1, u + 1);
    }
    Ok(out)
}

/// [`synthetic_road_dimacs`] with the Rome network's node and arc counts.
pub fn rome_like_dimacs(seed: u64) -> String {
    synthetic_road_dimacs(ROME_NODES, ROME_ARCS, seed).expect("valid Rome-sized parameters")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{parse_dimacs_str, CapacityPolicy};
    use crate::network::is_strongly_connected;

    #[test]
    fn small_grid_is_connected_with_exact_counts() {
        let text = synthetic_road_dimacs(50, 120, 1).unwrap();
        let net = parse_dimacs_str(&text, CapacityPolicy::Constant(1)).unwrap();
        assert_eq!(net.node_count(), 50);
        assert_eq!(net.edge_count(), 120);
        assert!(net.detect_symmetry());
        assert!(is_strongly_connected(&net));
        assert_eq!(text, synthetic_road_dimacs(50, 120, 1).unwrap());
    }

    #[test]
    fn too_few_arcs_rejected() {
        assert!(synthetic_road_dimacs(10, 10, 0).is_err());
    }
}
