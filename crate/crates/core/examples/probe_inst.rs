use patchroute::graph::{build_layout, LayoutName};
use patchroute::optimizer::{compile_optimized, AnnealConfig};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;

fn main() {
    env_logger::Builder::new().filter_level(log::LevelFilter::Debug).init();
    let q = 120;
    let seed = 3u64;
    let (g, m) = build_layout(LayoutName::Single, q, seed).unwrap();
    let c = LayeredCircuit::random(q, 8, 40, seed).unwrap();
    let st = route_static(&g, &m, &c).unwrap();
    let cfg = AnnealConfig { seed, ..AnnealConfig::default() };
    let opt = compile_optimized(&g, &m, &c, &cfg).unwrap();
    println!("d_st {} d_opt {}", st.depth, opt.depth);
}
