use patchroute::graph::{build_layout, LayoutName};
use patchroute::optimizer::{compile_optimized, AnnealConfig};
use patchroute::router::route_static;
use patchroute::LayeredCircuit;

const FIG4: &str = "qubits 4\ncnot 2 3\ncnot 0 1\n---\ncnot 0 3\ncnot 2 1\n";

fn main() {
    let circuit = LayeredCircuit::parse(FIG4).unwrap();
    let mut hits = 0;
    for q in [4u32, 6, 8, 10, 12] {
        let mut st3 = 0;
        for seed in 0..4000u64 {
            let (g, m) = build_layout(LayoutName::Pair, q, seed).unwrap();
            let st = match route_static(&g, &m, &circuit) {
                Ok(s) => s,
                Err(_) => continue,
            };
            if st.depth != 3 {
                continue;
            }
            st3 += 1;
            let cfg = AnnealConfig {
                k: 1,
                r: 10,
                iterations: 300,
                seed,
                ..AnnealConfig::default()
            };
            if let Ok(opt) = compile_optimized(&g, &m, &circuit, &cfg) {
                if opt.depth == 2 {
                    println!("HIT q={q} seed={seed}");
                    hits += 1;
                    if hits >= 5 {
                        break;
                    }
                }
            }
        }
        println!("q={q}: static-depth-3 mappings seen: {st3}, hits so far {hits}");
        if hits >= 5 {
            break;
        }
    }
}
