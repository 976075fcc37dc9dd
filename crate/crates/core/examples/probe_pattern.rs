use patchroute::graph::{Mapping, RoutingGraph};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn build(unit: (u32, u32, Vec<(u32, u32)>), tr: u32, tc: u32, q: u32, seed: u64) -> (RoutingGraph, Mapping) {
    let (ur, uc, ref pts) = unit;
    let mut data = Vec::new();
    for a in 0..tr {
        for b in 0..tc {
            for &(dr, dc) in pts {
                data.push((1 + a * ur + dr, 1 + b * uc + dc));
            }
        }
    }
    let g = RoutingGraph::brick_grid(tr * ur + 2, tc * uc + 2, &data, None);
    let mut slots = g.data_vertices().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    slots.shuffle(&mut rng);
    slots.truncate(q as usize);
    let m = Mapping::from_positions(g.vertex_count(), slots).unwrap();
    (g, m)
}

fn run(label: &str, unit: (u32, u32, Vec<(u32, u32)>), tr: u32, tc: u32, q: u32) {
    let mut depths = Vec::new();
    for seed in 1..=5u64 {
        let (g, m) = build(unit.clone(), tr, tc, q, seed);
        let c = LayeredCircuit::random(q, 8, 40, seed).unwrap();
        match route_static(&g, &m, &c) {
            Ok(s) => depths.push(s.depth as f64),
            Err(e) => println!("  {label}: seed {seed} ERR {e}"),
        }
    }
    let mean: f64 = depths.iter().sum::<f64>() / depths.len() as f64;
    let (g, _) = build(unit, tr, tc, q, 1);
    println!("{label}: grid {}x{} mean d_st = {mean:.1}", g.rows(), g.cols());
}

fn main() {
    // single c=1/8 variants, q=120
    run("single data-row  (15,8)", (2, 4, vec![(0, 0)]), 15, 8, 120);
    run("single staggered (15,4)", (2, 8, vec![(0, 0), (1, 4)]), 15, 4, 120);
    run("single staggered (12,5)", (2, 8, vec![(0, 0), (1, 4)]), 12, 5, 120);
    run("single staggered (10,6)", (2, 8, vec![(0, 0), (1, 4)]), 10, 6, 120);
    run("single staggered (20,3)", (2, 8, vec![(0, 0), (1, 4)]), 20, 3, 120);
    // pair c=1/4 variants, q=120 -> 60 pair tiles
    run("pair data-row  (10,6)", (2, 4, vec![(0, 0), (0, 1)]), 10, 6, 120);
    run("pair staggered (10,3)", (2, 8, vec![(0, 0), (0, 1), (1, 4), (1, 5)]), 10, 3, 120);
    run("pair staggered (15,2)", (2, 8, vec![(0, 0), (0, 1), (1, 4), (1, 5)]), 15, 2, 120);
}
