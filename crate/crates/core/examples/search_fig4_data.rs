use patchroute::graph::{build_layout, LayoutName, Mapping};
use patchroute::optimizer::{compile_optimized, AnnealConfig};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;

const FIG4: &str = "qubits 4\ncnot 2 3\ncnot 0 1\n---\ncnot 0 3\ncnot 2 1\n";

fn main() {
    let circuit = LayeredCircuit::parse(FIG4).unwrap();
    for q in [6u32, 8] {
        let (g, _) = build_layout(LayoutName::Pair, q, 0).unwrap();
        let slots = g.data_vertices().to_vec();
        println!("q={q}: graph {}x{}, data slots {slots:?}", g.rows(), g.cols());
        let n = slots.len();
        let mut hits = 0;
        for a in 0..n {
            for b in 0..n {
                if b == a { continue; }
                for c in 0..n {
                    if c == a || c == b { continue; }
                    for d in 0..n {
                        if d == a || d == b || d == c { continue; }
                        let pos = vec![slots[a], slots[b], slots[c], slots[d]];
                        let m = Mapping::from_positions(g.vertex_count(), pos.clone()).unwrap();
                        let Ok(st) = route_static(&g, &m, &circuit) else { continue };
                        if st.depth != 3 { continue; }
                        let cfg = AnnealConfig { k: 1, iterations: 300, seed: 11, ..AnnealConfig::default() };
                        let Ok(opt) = compile_optimized(&g, &m, &circuit, &cfg) else { continue };
                        if opt.depth == 2 {
                            let coords: Vec<(u32, u32)> = pos.iter()
                                .map(|&v| { let vx = g.vertex(v).unwrap(); (vx.row, vx.col) }).collect();
                            println!("  HIT positions = {pos:?} coords = {coords:?}");
                            hits += 1;
                            if hits >= 6 { break; }
                        }
                    }
                    if hits >= 6 { break; }
                }
                if hits >= 6 { break; }
            }
            if hits >= 6 { break; }
        }
        println!("q={q} hits: {hits}");
        if hits > 0 { break; }
    }
}
