use patchroute::graph::{build_layout, LayoutName, Mapping};
use patchroute::optimizer::{compile_optimized, AnnealConfig};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;

const FIG4: &str = "qubits 4\ncnot 2 3\ncnot 0 1\n---\ncnot 0 3\ncnot 2 1\n";

fn main() {
    let circuit = LayeredCircuit::parse(FIG4).unwrap();
    let (g, _) = build_layout(LayoutName::Pair, 4, 0).unwrap();
    let n = g.vertex_count() as u32;
    println!("graph {}x{} ({n} vertices)", g.rows(), g.cols());
    let mut hits = 0;
    'outer: for a in 0..n {
        for b in 0..n {
            if b == a { continue; }
            for c in 0..n {
                if c == a || c == b { continue; }
                for d in 0..n {
                    if d == a || d == b || d == c { continue; }
                    let m = Mapping::from_positions(n as usize, vec![a, b, c, d]).unwrap();
                    let Ok(st) = route_static(&g, &m, &circuit) else { continue };
                    if st.depth != 3 { continue; }
                    let cfg = AnnealConfig { k: 1, iterations: 300, seed: 11, ..AnnealConfig::default() };
                    let Ok(opt) = compile_optimized(&g, &m, &circuit, &cfg) else { continue };
                    if opt.depth == 2 {
                        println!("HIT positions = [{a}, {b}, {c}, {d}]");
                        let coords: Vec<(u32, u32)> = [a, b, c, d].iter()
                            .map(|&v| { let vx = g.vertex(v).unwrap(); (vx.row, vx.col) }).collect();
                        println!("  coords (row,col) = {coords:?}");
                        hits += 1;
                        if hits >= 8 { break 'outer; }
                    }
                }
            }
        }
    }
    println!("hits: {hits}");
}
