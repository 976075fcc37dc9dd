//! Replays a schedule against its graph, circuit and initial mapping,
//! checking every structural invariant a valid schedule must satisfy.
//!
//! Checked per layer: pairwise vertex-disjoint routes, route interiors and
//! branches in free space at commit time, endpoints matching the evolving
//! mapping, simple-tree shape, and mapping bijectivity after the layer's
//! teleports. Checked globally: gate multiset conservation, routed depth at
//! least the logical depth, and final-mapping agreement.

use std::collections::HashSet;

use crate::circuit::LayeredCircuit;
use crate::graph::{Mapping, Role, RoutingGraph, VertexId};
use crate::router::{Route, RouteKind, Schedule};

/// Returns all invariant violations found; an empty list means the schedule
/// is valid.
pub fn validate_schedule(
    g: &RoutingGraph,
    initial: &Mapping,
    circuit: &LayeredCircuit,
    schedule: &Schedule,
) -> Vec<String> {
    let mut findings = Vec::new();
    let mut m = initial.clone();

    if schedule.depth != schedule.layers.len() {
        findings.push(format!(
            "depth field {} != layer count {}",
            schedule.depth,
            schedule.layers.len()
        ));
    }

    let mut scheduled_gates: Vec<u32> = Vec::new();

    for (li, layer) in schedule.layers.iter().enumerate() {
        let mut used: HashSet<VertexId> = HashSet::new();
        // (label, destination) teleports to apply after the layer.
        let mut teleports: Vec<(u32, VertexId)> = Vec::new();

        for (ri, route) in layer.routes.iter().enumerate() {
            let tag = format!("layer {li} route {ri}");
            if route.path.len() < 2 {
                findings.push(format!("{tag}: path shorter than one edge"));
                continue;
            }

            // Simplicity and disjointness.
            let mut own: HashSet<VertexId> = HashSet::new();
            for v in route.vertices() {
                if !g.contains(v) {
                    findings.push(format!("{tag}: unknown vertex {v}"));
                }
                if !own.insert(v) {
                    findings.push(format!("{tag}: vertex {v} repeated (not a tree)"));
                }
                if !used.insert(v) {
                    findings.push(format!("{tag}: vertex {v} overlaps another route"));
                }
            }

            // Path and branch contiguity.
            for w in route.path.windows(2) {
                if !g.neighbors(w[0]).map_or(false, |ns| ns.contains(&w[1])) {
                    findings.push(format!("{tag}: path edge {}-{} missing", w[0], w[1]));
                }
            }
            if !route.branch.is_empty() {
                let first = route.branch[0];
                let attached = route
                    .path
                    .iter()
                    .any(|&p| g.neighbors(p).map_or(false, |ns| ns.contains(&first)));
                if !attached {
                    findings.push(format!("{tag}: branch does not attach to the path"));
                }
                for w in route.branch.windows(2) {
                    if !g.neighbors(w[0]).map_or(false, |ns| ns.contains(&w[1])) {
                        findings.push(format!("{tag}: branch edge {}-{} missing", w[0], w[1]));
                    }
                }
            }

            match route.kind {
                RouteKind::StandardCnot | RouteKind::TeleportControl | RouteKind::TeleportTarget => {
                    check_gate_route(&m, circuit, route, &tag, &mut findings, &mut teleports);
                    if let Some(id) = route.gate {
                        scheduled_gates.push(id);
                    }
                }
                RouteKind::IdleTeleport => {
                    if route.gate.is_some() {
                        findings.push(format!("{tag}: idle teleport carries a gate id"));
                    }
                    if route.path.len() < 3 {
                        findings.push(format!("{tag}: idle teleport needs an interior vertex"));
                    }
                    let src = route.path[0];
                    let dest = *route.path.last().unwrap();
                    match m.occupant_of(src) {
                        Some(label) => teleports.push((label, dest)),
                        None => findings.push(format!("{tag}: idle source {src} is empty")),
                    }
                    if m.is_occupied(dest) {
                        findings.push(format!("{tag}: idle destination {dest} occupied"));
                    }
                    if g.role(dest).ok() != Some(Role::Data) {
                        findings.push(format!(
                            "{tag}: idle destination {dest} is not a canonical data vertex"
                        ));
                    }
                    for &v in &route.path[1..route.path.len() - 1] {
                        if m.is_occupied(v) {
                            findings.push(format!("{tag}: interior vertex {v} not free"));
                        }
                    }
                    if route.ancilla != dest {
                        findings.push(format!("{tag}: idle ancilla must be the destination"));
                    }
                }
            }
        }

        for (label, dest) in teleports {
            if let Err(e) = m.apply_teleport(label, dest) {
                findings.push(format!("layer {li}: teleport of {label} failed: {e}"));
            }
        }
        if !m.is_consistent() {
            findings.push(format!("layer {li}: mapping bijectivity broken"));
        }
    }

    scheduled_gates.sort_unstable();
    let mut expected: Vec<u32> = circuit.gates().map(|g| g.id).collect();
    expected.sort_unstable();
    if scheduled_gates != expected {
        findings.push(format!(
            "gate multiset mismatch: scheduled {} gates, circuit has {}",
            scheduled_gates.len(),
            expected.len()
        ));
    }
    if schedule.depth < circuit.logical_depth() {
        findings.push(format!(
            "routed depth {} below logical depth {}",
            schedule.depth,
            circuit.logical_depth()
        ));
    }
    if m != schedule.final_mapping {
        findings.push("final mapping does not match replay".into());
    }
    findings
}

fn check_gate_route(
    m: &Mapping,
    circuit: &LayeredCircuit,
    route: &Route,
    tag: &str,
    findings: &mut Vec<String>,
    teleports: &mut Vec<(u32, VertexId)>,
) {
    let Some(gate_id) = route.gate else {
        findings.push(format!("{tag}: gate route without gate id"));
        return;
    };
    let Some(gate) = circuit.gates().find(|g| g.id == gate_id) else {
        findings.push(format!("{tag}: gate {gate_id} not in circuit"));
        return;
    };
    let src = m.position_of(gate.control).ok();
    let dst = m.position_of(gate.target).ok();
    if src != Some(route.path[0]) || dst != Some(*route.path.last().unwrap()) {
        findings.push(format!(
            "{tag}: endpoints {:?}..{:?} do not match mapping ({src:?}, {dst:?})",
            route.path.first(),
            route.path.last()
        ));
        return;
    }
    if route.path.len() < 3 {
        findings.push(format!("{tag}: CNOT route needs an interior ancilla"));
    }
    for &v in &route.path[1..route.path.len() - 1] {
        if m.is_occupied(v) {
            findings.push(format!("{tag}: interior vertex {v} not free"));
        }
    }
    for &v in &route.branch {
        if m.is_occupied(v) {
            findings.push(format!("{tag}: branch vertex {v} not free"));
        }
    }
    let on_tree = route.path.contains(&route.ancilla) || route.branch.contains(&route.ancilla);
    if !on_tree {
        findings.push(format!("{tag}: ancilla {} off the tree", route.ancilla));
    }
    if route.ancilla == route.path[0] || route.ancilla == *route.path.last().unwrap() {
        findings.push(format!("{tag}: ancilla on a terminal data vertex"));
    }
    match route.kind {
        RouteKind::StandardCnot => {
            if !route.branch.is_empty() {
                findings.push(format!("{tag}: standard CNOT with a branch"));
            }
        }
        RouteKind::TeleportControl => teleports.push((gate.control, route.ancilla)),
        RouteKind::TeleportTarget => teleports.push((gate.target, route.ancilla)),
        RouteKind::IdleTeleport => unreachable!(),
    }
    if !route.branch.is_empty() && route.branch.last() != Some(&route.ancilla) {
        findings.push(format!("{tag}: branch does not end at the new ancilla"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_layout, LayoutName};
    use crate::router::route_static;

    #[test]
    fn valid_static_schedule_passes() {
        let (g, m) = build_layout(LayoutName::Pair, 12, 4).unwrap();
        let c = LayeredCircuit::random(12, 3, 5, 4).unwrap();
        let s = route_static(&g, &m, &c).unwrap();
        assert_eq!(validate_schedule(&g, &m, &c, &s), Vec::<String>::new());
    }

    #[test]
    fn tampered_schedule_is_caught() {
        let (g, m) = build_layout(LayoutName::Pair, 8, 4).unwrap();
        let c = LayeredCircuit::random(8, 2, 2, 4).unwrap();
        let mut s = route_static(&g, &m, &c).unwrap();
        // Drop one route: gate conservation must flag it.
        s.layers[0].routes.pop();
        assert!(!validate_schedule(&g, &m, &c, &s).is_empty());
    }

    #[test]
    fn overlapping_routes_are_caught() {
        let (g, m) = build_layout(LayoutName::Pair, 8, 4).unwrap();
        let c = LayeredCircuit::random(8, 2, 1, 4).unwrap();
        let mut s = route_static(&g, &m, &c).unwrap();
        if s.layers[0].routes.len() == 2 {
            let stolen = s.layers[0].routes[0].path[1];
            s.layers[0].routes[1].path[1] = stolen;
            let findings = validate_schedule(&g, &m, &c, &s);
            assert!(findings.iter().any(|f| f.contains("overlaps")));
        }
    }
}
