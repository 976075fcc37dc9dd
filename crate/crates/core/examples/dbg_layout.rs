use patchroute::graph::{build_layout, LayoutName, Role};

fn main() {
    let (g, _) = build_layout(LayoutName::Hex, 24, 7).unwrap();
    println!("dims {}x{}", g.rows(), g.cols());
    for r in 0..g.rows() {
        let mut line = String::new();
        for c in 0..g.cols() {
            let id = r * g.cols() + c;
            let ch = if g.role(id).unwrap() == Role::Data { 'D' } else { '.' };
            line.push(ch);
        }
        println!("{line}");
    }
    // ancilla components
    let n = g.vertex_count();
    let keep: Vec<bool> = g.vertices().iter().map(|v| v.role == Role::Ancilla).collect();
    let mut comp = vec![usize::MAX; n];
    let mut nc = 0;
    for s in 0..n {
        if !keep[s] || comp[s] != usize::MAX { continue; }
        let mut stack = vec![s as u32];
        comp[s] = nc;
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v).unwrap() {
                if keep[u as usize] && comp[u as usize] == usize::MAX {
                    comp[u as usize] = nc;
                    stack.push(u);
                }
            }
        }
        nc += 1;
    }
    println!("components: {nc}");
    for r in 0..g.rows() {
        let mut line = String::new();
        for c in 0..g.cols() {
            let id = (r * g.cols() + c) as usize;
            let ch = if comp[id] == usize::MAX { 'D' } else { char::from_digit((comp[id] % 10) as u32, 10).unwrap() };
            line.push(ch);
        }
        println!("{line}");
    }
}
