use patchroute::graph::{LayoutName, Mapping, RoutingGraph};
use patchroute::optimizer::{compile_optimized, AnnealConfig};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

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
    let args: Vec<String> = std::env::args().collect();
    let layout: LayoutName = args[1].parse().unwrap();
    let tr: u32 = args[2].parse().unwrap();
    let tc: u32 = args[3].parse().unwrap();
    let seeds: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(5);
    let iterations: u32 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(200);
    let t0: f64 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let cooling: f64 = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(0.97);
    let q = 120;
    let mut sts = Vec::new();
    let mut opts = Vec::new();
    for seed in 1..=seeds {
        let (g, m) = build(layout, tr, tc, q, seed);
        let c = LayeredCircuit::random(q, 8, 40, seed).unwrap();
        let t = Instant::now();
        let st = route_static(&g, &m, &c).map(|s| s.depth);
        let cfg = AnnealConfig { seed, iterations, t0, cooling, ..AnnealConfig::default() };
        let op = compile_optimized(&g, &m, &c, &cfg).map(|s| s.depth);
        match (st, op) {
            (Ok(s), Ok(o)) => {
                println!("seed {seed}: d_st {s} d_opt {o}  ({:.1}s)", t.elapsed().as_secs_f64());
                sts.push(s as f64);
                opts.push(o as f64);
            }
            (s, o) => println!("seed {seed}: ERR {s:?} {o:?}"),
        }
    }
    let ms: f64 = sts.iter().sum::<f64>() / sts.len() as f64;
    let mo: f64 = opts.iter().sum::<f64>() / opts.len() as f64;
    let rt = (mo - 40.0) / (ms - 40.0);
    println!("{layout} ({tr},{tc}): mean d_st {ms:.1} mean d_opt {mo:.1} rtilde {:.1}% delta/dst {:.1}%", rt * 100.0, (ms - mo) / ms * 100.0);
}
