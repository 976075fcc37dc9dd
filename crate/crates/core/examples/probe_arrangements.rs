use patchroute::graph::{LayoutName, Mapping, RoutingGraph};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn build(layout: LayoutName, tr: u32, tc: u32, q: u32, seed: u64) -> (RoutingGraph, Mapping) {
    let unit = layout.unit();
    let mut data = Vec::new();
    for a in 0..tr {
        for b in 0..tc {
            for &(dr, dc) in unit.data {
                data.push((1 + a * unit.rows + dr, 1 + b * unit.cols + dc));
            }
        }
    }
    let g = RoutingGraph::brick_grid(tr * unit.rows + 2, tc * unit.cols + 2, &data, None);
    let mut slots = g.data_vertices().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    slots.shuffle(&mut rng);
    slots.truncate(q as usize);
    let m = Mapping::from_positions(g.vertex_count(), slots).unwrap();
    (g, m)
}

fn main() {
    let q = 120;
    let cases: Vec<(LayoutName, Vec<(u32, u32)>)> = vec![
        (LayoutName::Pair, vec![(15, 4), (20, 3), (30, 2), (12, 5), (10, 6)]),
        (LayoutName::Triple, vec![(10, 4), (8, 5), (20, 2), (40, 1), (5, 8)]),
        (LayoutName::Hex, vec![(10, 1), (5, 2), (2, 5), (1, 10)]),
    ];
    for (layout, arrs) in cases {
        for (a, b) in arrs {
            let mut depths = Vec::new();
            let mut errs = 0;
            for seed in 1..=5u64 {
                let (g, m) = build(layout, a, b, q, seed);
                let c = LayeredCircuit::random(q, 8, 40, seed).unwrap();
                match route_static(&g, &m, &c) {
                    Ok(s) => depths.push(s.depth as f64),
                    Err(_) => errs += 1,
                }
            }
            let mean: f64 = depths.iter().sum::<f64>() / depths.len().max(1) as f64;
            let (g, _) = build(layout, a, b, q, 1);
            println!(
                "{layout:>6} tiles ({a:>2},{b:>2}) grid {:>3}x{:<3} mean d_st = {mean:.1} (errs {errs})",
                g.rows(), g.cols()
            );
        }
    }
}
