use patchroute::bench::{run_grid, write_csv};
use patchroute::graph::LayoutName;
use patchroute::optimizer::AnnealConfig;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let layout: LayoutName = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(LayoutName::Single);
    let depth: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(40);
    let samples: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(3);
    let cfg = AnnealConfig { seed: 1, ..AnnealConfig::default() };
    let t = Instant::now();
    let grid = run_grid(&[layout], &[depth], 120, 8, samples, &cfg, 1).unwrap();
    println!("{}", write_csv(&grid.rows));
    for r in &grid.records {
        println!("seed {}: d_st {} d_opt {}  ({:.1} ms / {:.1} ms)", r.seed, r.d_st, r.d_opt, r.st_ms, r.opt_ms);
    }
    println!("total: {:.1} s", t.elapsed().as_secs_f64());
}
