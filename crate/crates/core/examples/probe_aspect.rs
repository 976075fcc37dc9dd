use patchroute::graph::{LayoutName, Mapping, RoutingGraph};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn build(layout: LayoutName, tile_rows: u32, tile_cols: u32, q: u32, seed: u64) -> (RoutingGraph, Mapping) {
    let unit = layout.unit();
    let mut data = Vec::new();
    for tr in 0..tile_rows {
        for tc in 0..tile_cols {
            for &(dr, dc) in unit.data {
                data.push((1 + tr * unit.rows + dr, 1 + tc * unit.cols + dc));
            }
        }
    }
    let rows = tile_rows * unit.rows + 2;
    let cols = tile_cols * unit.cols + 2;
    let g = RoutingGraph::brick_grid(rows, cols, &data, None);
    let mut slots = g.data_vertices().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    slots.shuffle(&mut rng);
    slots.truncate(q as usize);
    let m = Mapping::from_positions(g.vertex_count(), slots).unwrap();
    (g, m)
}

fn main() {
    let q = 120;
    for (a, b) in [(15u32, 8u32), (8, 15), (24, 5), (5, 24), (30, 4), (40, 3), (60, 2), (120, 1)] {
        let mut depths = Vec::new();
        for seed in 1..=5u64 {
            let (g, m) = build(LayoutName::Single, a, b, q, seed);
            let c = LayeredCircuit::random(q, 8, 40, seed).unwrap();
            match route_static(&g, &m, &c) {
                Ok(s) => depths.push(s.depth as f64),
                Err(e) => { println!("  ({a},{b}) seed {seed}: ERR {e}"); }
            }
        }
        let mean: f64 = depths.iter().sum::<f64>() / depths.len() as f64;
        let (g, _) = build(LayoutName::Single, a, b, q, 1);
        println!("tiles ({a:>3},{b:>3}) grid {}x{}: mean d_st = {mean:.1}", g.rows(), g.cols());
    }
}
