//! Shortest-first vertex-disjoint-path routing of logical layers.
//!
//! A CNOT between two data patches is executed along a path on the routing
//! graph whose interior is free space; simultaneously executed routes must be
//! vertex disjoint. Routing a layer repeatedly commits the globally shortest
//! remaining path and removes its vertices from the free set; gates that no
//! longer fit are pushed into the next logical layer.

use serde::Serialize;
use std::collections::HashSet;
use std::collections::VecDeque;

use crate::circuit::{cascade_push, Gate, GateId, LayeredCircuit};
use crate::error::{Error, Result};
use crate::graph::{Mapping, RoutingGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteKind {
    /// Plain measurement-based CNOT along `path`.
    StandardCnot,
    /// CNOT whose control ends up on `ancilla`.
    TeleportControl,
    /// CNOT whose target ends up on `ancilla`.
    TeleportTarget,
    /// Plain teleportation of an idle qubit from `path[0]` to `path.last()`.
    IdleTeleport,
}

/// One committed route: a simple path for plain CNOTs and idle teleports, or
/// a 3-terminal tree (`path` plus `branch`) for CNOT + teleportation.
///
/// `branch` starts next to some path vertex and ends at the teleport
/// destination; it is empty when the new ancilla lies on the path itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Route {
    pub gate: Option<GateId>,
    pub kind: RouteKind,
    pub path: Vec<VertexId>,
    pub branch: Vec<VertexId>,
    pub ancilla: VertexId,
}

impl Route {
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.path.iter().chain(self.branch.iter()).copied()
    }

    pub fn is_gate(&self) -> bool {
        self.gate.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutedLayer {
    pub routes: Vec<Route>,
}

impl RoutedLayer {
    pub fn gate_count(&self) -> usize {
        self.routes.iter().filter(|r| r.is_gate()).count()
    }
}

/// Compiler output: ordered routed layers. `depth` is the routed depth.
#[derive(Debug, Clone, Serialize)]
pub struct Schedule {
    pub layers: Vec<RoutedLayer>,
    pub depth: usize,
    pub final_mapping: Mapping,
    /// Gates committed per routed layer (idle teleports not counted).
    #[serde(skip)]
    pub stats: Vec<usize>,
}

impl Schedule {
    pub fn new(layers: Vec<RoutedLayer>, final_mapping: Mapping) -> Schedule {
        let stats = layers.iter().map(RoutedLayer::gate_count).collect();
        Schedule {
            depth: layers.len(),
            layers,
            final_mapping,
            stats,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }
}

const UNREACHED: u32 = u32::MAX;

/// Grid BFS with reusable buffers. Paths run between two exempt endpoints
/// through free vertices only; among equal-length paths the lexicographically
/// smallest vertex-id sequence is chosen.
pub(crate) struct PathFinder {
    free: Vec<bool>,
    dist: Vec<u32>,
    queue: VecDeque<VertexId>,
}

impl PathFinder {
    pub(crate) fn new(n: usize) -> PathFinder {
        PathFinder {
            free: vec![false; n],
            dist: vec![UNREACHED; n],
            queue: VecDeque::new(),
        }
    }

    /// free := unoccupied and not `used`.
    pub(crate) fn load_free(&mut self, m: &Mapping, used: &[bool]) {
        for (v, slot) in m.occupant_slots().iter().enumerate() {
            self.free[v] = slot.is_none() && !used[v];
        }
    }

    pub(crate) fn is_free(&self, v: VertexId) -> bool {
        self.free[v as usize]
    }

    /// BFS distances from `origin` through free vertices. `origin` itself
    /// need not be free. Distances are left in `self.dist`.
    fn bfs_from(&mut self, g: &RoutingGraph, origin: VertexId) {
        self.dist.fill(UNREACHED);
        self.queue.clear();
        self.dist[origin as usize] = 0;
        self.queue.push_back(origin);
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u as usize];
            for &v in g.neighbors_unchecked(u) {
                if self.free[v as usize] && self.dist[v as usize] == UNREACHED {
                    self.dist[v as usize] = du + 1;
                    self.queue.push_back(v);
                }
            }
        }
    }

    /// Minimum-hop path `src -> dst` whose intermediate vertices are free.
    /// With `require_interior`, the path must contain at least one free
    /// vertex strictly between the endpoints (no direct src-dst edge).
    pub(crate) fn shortest(
        &mut self,
        g: &RoutingGraph,
        src: VertexId,
        dst: VertexId,
        require_interior: bool,
    ) -> Option<Vec<VertexId>> {
        self.bfs_from(g, dst);
        let mut best = UNREACHED;
        for &v in g.neighbors_unchecked(src) {
            if require_interior && v == dst {
                continue;
            }
            let reachable = v == dst || self.free[v as usize];
            if reachable && self.dist[v as usize] != UNREACHED {
                best = best.min(self.dist[v as usize] + 1);
            }
        }
        if best == UNREACHED {
            return None;
        }
        let mut path = Vec::with_capacity(best as usize + 1);
        path.push(src);
        let mut cur = src;
        let mut need = best;
        while need > 0 {
            let next = g
                .neighbors_unchecked(cur)
                .iter()
                .copied()
                .filter(|&v| {
                    if self.dist[v as usize] != need - 1 {
                        return false;
                    }
                    if v == dst {
                        // dst is only enterable as the final hop, and the
                        // first hop may not be dst when an interior vertex
                        // is required.
                        !(require_interior && cur == src)
                    } else {
                        self.free[v as usize]
                    }
                })
                .min()
                .expect("distance field guarantees a predecessor");
            path.push(next);
            cur = next;
            need -= 1;
        }
        debug_assert_eq!(*path.last().unwrap(), dst);
        Some(path)
    }

    /// Free vertices reachable from `origin` within `radius` hops through
    /// free space, ascending by id. `origin` is exempt and not included.
    pub(crate) fn free_ball(
        &mut self,
        g: &RoutingGraph,
        origin: VertexId,
        radius: u32,
    ) -> Vec<VertexId> {
        self.bfs_from(g, origin);
        let mut ball: Vec<VertexId> = (0..g.vertex_count() as VertexId)
            .filter(|&v| {
                v != origin
                    && self.free[v as usize]
                    && self.dist[v as usize] != UNREACHED
                    && self.dist[v as usize] <= radius
            })
            .collect();
        ball.sort_unstable();
        ball
    }

    /// Leaves BFS distances from `origin` (through free vertices) in the
    /// internal buffer for `distance` queries.
    pub(crate) fn distances_from(&mut self, g: &RoutingGraph, origin: VertexId) {
        self.bfs_from(g, origin);
    }

    pub(crate) fn distance(&self, v: VertexId) -> Option<u32> {
        (self.dist[v as usize] != UNREACHED).then_some(self.dist[v as usize])
    }

    /// Shortest branch from any vertex of `sources` to the free vertex `w`
    /// through free space; returns `(attach, branch)` where `branch` runs
    /// from next to `attach` up to and including `w`. Ties prefer smaller
    /// attach ids, then the lexicographically smallest branch.
    pub(crate) fn branch_from_path(
        &mut self,
        g: &RoutingGraph,
        sources: &[VertexId],
        w: VertexId,
    ) -> Option<(VertexId, Vec<VertexId>)> {
        self.bfs_from(g, w);
        let mut best: Option<(u32, VertexId)> = None;
        for &s in sources {
            let mut s_dist = UNREACHED;
            for &v in g.neighbors_unchecked(s) {
                if (v == w || self.free[v as usize]) && self.dist[v as usize] != UNREACHED {
                    s_dist = s_dist.min(self.dist[v as usize] + 1);
                }
            }
            if s_dist != UNREACHED && best.map_or(true, |(d, a)| (s_dist, s) < (d, a)) {
                best = Some((s_dist, s));
            }
        }
        let (len, attach) = best?;
        let mut branch = Vec::with_capacity(len as usize);
        let mut cur = attach;
        let mut need = len;
        while need > 0 {
            let next = g
                .neighbors_unchecked(cur)
                .iter()
                .copied()
                .filter(|&v| {
                    self.dist[v as usize] == need - 1 && (v == w || self.free[v as usize])
                })
                .min()
                .expect("distance field guarantees a predecessor");
            branch.push(next);
            cur = next;
            need -= 1;
        }
        debug_assert_eq!(*branch.last().unwrap(), w);
        Some((attach, branch))
    }
}

/// Minimum-hop path from `src` to `dst` whose interior vertices are all free
/// (not in `blocked`); the path must contain at least one interior vertex.
/// Deterministic: among equal-length paths the lexicographically smallest
/// vertex-id sequence is returned.
pub fn shortest_free_path(
    g: &RoutingGraph,
    src: VertexId,
    dst: VertexId,
    blocked: &HashSet<VertexId>,
) -> Result<Option<Vec<VertexId>>> {
    if !g.contains(src) {
        return Err(Error::UnknownVertex(src));
    }
    if !g.contains(dst) {
        return Err(Error::UnknownVertex(dst));
    }
    if src == dst {
        return Err(Error::DegeneratePath(src));
    }
    let mut pf = PathFinder::new(g.vertex_count());
    for v in 0..g.vertex_count() {
        pf.free[v] = !blocked.contains(&(v as VertexId));
    }
    pf.free[src as usize] = false;
    pf.free[dst as usize] = false;
    Ok(pf.shortest(g, src, dst, true))
}

/// Routes as many gates of one layer as possible. Iteratively commits the
/// globally shortest free path (ties by gate id) and removes its vertices
/// from the free set; the ancilla of a committed CNOT sits on the first
/// interior path vertex. Unrouted gates come back in their original order.
pub fn route_layer(
    g: &RoutingGraph,
    m: &Mapping,
    gates: &[Gate],
) -> Result<(RoutedLayer, Vec<Gate>)> {
    let mut used = vec![false; g.vertex_count()];
    let mut pf = PathFinder::new(g.vertex_count());
    route_layer_inner(g, m, gates, &mut used, &mut pf)
}

fn route_layer_inner(
    g: &RoutingGraph,
    m: &Mapping,
    gates: &[Gate],
    used: &mut [bool],
    pf: &mut PathFinder,
) -> Result<(RoutedLayer, Vec<Gate>)> {
    let mut remaining: Vec<Gate> = gates.to_vec();
    let mut routes: Vec<Route> = Vec::new();
    loop {
        pf.load_free(m, used);
        let mut best: Option<(usize, GateId, usize, Vec<VertexId>)> = None;
        for (idx, gate) in remaining.iter().enumerate() {
            let src = m.position_of(gate.control)?;
            let dst = m.position_of(gate.target)?;
            if src == dst {
                return Err(Error::CoincidentEndpoints {
                    gate: gate.id,
                    vertex: src,
                });
            }
            if used[src as usize] || used[dst as usize] {
                continue;
            }
            if let Some(path) = pf.shortest(g, src, dst, true) {
                let key = (path.len(), gate.id);
                if best
                    .as_ref()
                    .map_or(true, |(l, id, _, _)| key < (*l, *id))
                {
                    best = Some((path.len(), gate.id, idx, path));
                }
            }
        }
        match best {
            None => break,
            Some((_, _, idx, path)) => {
                for &v in &path {
                    used[v as usize] = true;
                }
                let gate = remaining.remove(idx);
                routes.push(Route {
                    gate: Some(gate.id),
                    kind: RouteKind::StandardCnot,
                    ancilla: path[1],
                    path,
                    branch: Vec::new(),
                });
            }
        }
    }
    Ok((RoutedLayer { routes }, remaining))
}

fn unroutable(routed_layers: usize, stuck: &[Gate], m: &Mapping) -> Error {
    let diagnostic = stuck
        .iter()
        .map(|gate| {
            format!(
                "gate {} (control {} at vertex {:?}, target {} at vertex {:?})",
                gate.id,
                gate.control,
                m.position_of(gate.control).ok(),
                gate.target,
                m.position_of(gate.target).ok()
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Error::UnroutableLayer {
        routed_layers,
        diagnostic,
    }
}

/// Baseline compiler: routes layer by layer with static data patch
/// positions, pushing unrouted gates into the next logical layer until every
/// gate is scheduled.
pub fn route_static(g: &RoutingGraph, m: &Mapping, circuit: &LayeredCircuit) -> Result<Schedule> {
    if m.qubits() < circuit.qubits() {
        return Err(Error::UnmappedQubits {
            mapped: m.qubits(),
            required: circuit.qubits(),
        });
    }
    let mut layers: Vec<Vec<Gate>> = circuit.layers().to_vec();
    let mut out: Vec<RoutedLayer> = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    let mut pf = PathFinder::new(g.vertex_count());
    let mut i = 0;
    while i < layers.len() {
        let gates = std::mem::take(&mut layers[i]);
        i += 1;
        if gates.is_empty() {
            continue;
        }
        used.fill(false);
        let (routed, leftover) = route_layer_inner(g, m, &gates, &mut used, &mut pf)?;
        if routed.routes.is_empty() {
            return Err(unroutable(out.len(), &leftover, m));
        }
        if !leftover.is_empty() {
            if i == layers.len() {
                layers.push(Vec::new());
            }
            cascade_push(&mut layers, i, leftover);
        }
        out.push(routed);
    }
    Ok(Schedule::new(out, m.clone()))
}

/// Routes the given logical layers in isolation and reports how many routed
/// layers they need. Gates pushed past the last given layer extend the
/// window's own layer list; the mapping is not modified.
pub fn route_window(
    g: &RoutingGraph,
    m: &Mapping,
    window: &[Vec<Gate>],
) -> Result<(Vec<RoutedLayer>, usize)> {
    route_window_impl(g, m, window, usize::MAX)
}

/// Window routing that gives up once more than `cap` routed layers are
/// needed, reporting `cap + 1`. The annealing objective only has to rank
/// candidates against the unextended window, so deep overruns need not be
/// routed to the end.
pub(crate) fn route_window_capped(
    g: &RoutingGraph,
    m: &Mapping,
    window: &[Vec<Gate>],
    cap: usize,
) -> Result<usize> {
    route_window_impl(g, m, window, cap).map(|(_, len)| len)
}

fn route_window_impl(
    g: &RoutingGraph,
    m: &Mapping,
    window: &[Vec<Gate>],
    cap: usize,
) -> Result<(Vec<RoutedLayer>, usize)> {
    let mut layers: Vec<Vec<Gate>> = window.to_vec();
    let mut out: Vec<RoutedLayer> = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    let mut pf = PathFinder::new(g.vertex_count());
    let mut i = 0;
    while i < layers.len() {
        if out.len() > cap {
            return Ok((out, cap + 1));
        }
        let gates = std::mem::take(&mut layers[i]);
        i += 1;
        if gates.is_empty() {
            continue;
        }
        used.fill(false);
        let (routed, leftover) = route_layer_inner(g, m, &gates, &mut used, &mut pf)?;
        if routed.routes.is_empty() {
            return Err(unroutable(out.len(), &leftover, m));
        }
        if !leftover.is_empty() {
            if i == layers.len() {
                layers.push(Vec::new());
            }
            cascade_push(&mut layers, i, leftover);
        }
        out.push(routed);
    }
    let len = out.len();
    Ok((out, len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_layout, LayoutName, RoutingGraph};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent BFS oracle over the free subgraph with the same contract
    /// as `shortest_free_path` (at least one interior vertex).
    fn oracle_distance(
        g: &RoutingGraph,
        src: VertexId,
        dst: VertexId,
        blocked: &HashSet<VertexId>,
    ) -> Option<usize> {
        use std::collections::VecDeque;
        let free = |v: VertexId| v != src && v != dst && !blocked.contains(&v);
        let mut dist = vec![usize::MAX; g.vertex_count()];
        let mut q = VecDeque::new();
        for &v in g.neighbors(src).unwrap() {
            if free(v) {
                dist[v as usize] = 1;
                q.push_back(v);
            }
        }
        let mut best = None;
        while let Some(u) = q.pop_front() {
            if g.neighbors(u).unwrap().contains(&dst) {
                best = best.or(Some(dist[u as usize] + 1));
                continue;
            }
            for &v in g.neighbors(u).unwrap() {
                if free(v) && dist[v as usize] == usize::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    q.push_back(v);
                }
            }
        }
        best
    }

    #[test]
    fn adjacent_endpoints_route_through_common_neighbor() {
        // 1x3 strip: endpoints 0 and 1 are adjacent; the only interior-bearing
        // route does not exist, so go through vertex above via a 2x2 grid.
        let g = RoutingGraph::brick_grid(2, 2, &[], None);
        // vertices: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1); edges 0-1, 2-3, 0-2, 1-3? parity:
        // (0,0) even -> 0-2; (0,1) odd -> none; (1,0) odd -> none; so edges 0-1, 2-3, 0-2.
        let blocked = HashSet::new();
        let path = shortest_free_path(&g, 0, 1, &blocked).unwrap();
        // Direct edge 0-1 is rejected; the detour 0-2-3-1 needs edge 3-1 which
        // does not exist here, so no route at all.
        assert_eq!(path, None);

        let g = RoutingGraph::brick_grid(2, 3, &[], None);
        // (0,1)-(1,1) edge exists (parity odd? (0+1)%2=1 -> no). Use 3 cols:
        // edges: 0-1,1-2, 3-4,4-5, 0-3 ((0,0) even), 2-5 ((0,2) even).
        let path = shortest_free_path(&g, 0, 2, &blocked).unwrap().unwrap();
        assert_eq!(path, vec![0, 1, 2]);
        assert!(path.len() >= 3);
    }

    #[test]
    fn surrounded_destination_unreachable() {
        let g = RoutingGraph::brick_grid(4, 4, &[], None);
        let dst = 5; // (1,1)
        let blocked: HashSet<VertexId> = g.neighbors(dst).unwrap().iter().copied().collect();
        assert_eq!(shortest_free_path(&g, 0, dst, &blocked).unwrap(), None);
    }

    #[test]
    fn path_endpoints_not_self() {
        let g = RoutingGraph::brick_grid(3, 3, &[], None);
        assert!(matches!(
            shortest_free_path(&g, 2, 2, &HashSet::new()),
            Err(Error::DegeneratePath(2))
        ));
        assert!(shortest_free_path(&g, 0, 99, &HashSet::new()).is_err());
    }

    #[test]
    fn shortest_path_matches_bfs_oracle_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let rows = rng.gen_range(3..7);
            let cols = rng.gen_range(3..7);
            let g = RoutingGraph::brick_grid(rows, cols, &[], None);
            let n = g.vertex_count() as VertexId;
            let src = rng.gen_range(0..n);
            let mut dst = rng.gen_range(0..n);
            while dst == src {
                dst = rng.gen_range(0..n);
            }
            let mut blocked = HashSet::new();
            for v in 0..n {
                if v != src && v != dst && rng.gen_bool(0.3) {
                    blocked.insert(v);
                }
            }
            let got = shortest_free_path(&g, src, dst, &blocked).unwrap();
            let want = oracle_distance(&g, src, dst, &blocked);
            assert_eq!(got.as_ref().map(|p| p.len() - 1), want, "src={src} dst={dst}");
            if let Some(p) = got {
                assert_eq!(p[0], src);
                assert_eq!(*p.last().unwrap(), dst);
                assert!(p.len() >= 3);
                for w in p.windows(2) {
                    assert!(g.neighbors(w[0]).unwrap().contains(&w[1]));
                }
                for &v in &p[1..p.len() - 1] {
                    assert!(!blocked.contains(&v));
                }
            }
        }
    }

    #[test]
    fn lexicographic_tie_break_is_deterministic() {
        let g = RoutingGraph::brick_grid(4, 6, &[], None);
        let a = shortest_free_path(&g, 1, 21, &HashSet::new()).unwrap();
        let b = shortest_free_path(&g, 1, 21, &HashSet::new()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn route_layer_routes_disjoint_gates() {
        let (g, m) = build_layout(LayoutName::Single, 8, 3).unwrap();
        let gates = vec![
            Gate { id: 0, control: 0, target: 1 },
            Gate { id: 1, control: 2, target: 3 },
        ];
        let (layer, left) = route_layer(&g, &m, &gates).unwrap();
        if left.is_empty() {
            assert_eq!(layer.routes.len(), 2);
            let mut seen = HashSet::new();
            for r in &layer.routes {
                for v in r.vertices() {
                    assert!(seen.insert(v), "overlapping routes");
                }
                assert!(r.path.len() >= 3);
                assert_eq!(r.ancilla, r.path[1]);
            }
        } else {
            panic!("single layout with 8 qubits should route 2 gates");
        }
    }

    #[test]
    fn route_layer_fully_blocked() {
        let (g, m) = build_layout(LayoutName::Single, 2, 1).unwrap();
        let gates = vec![Gate { id: 0, control: 0, target: 1 }];
        // Block everything except the endpoints.
        let mut used = vec![true; g.vertex_count()];
        let mut pf = PathFinder::new(g.vertex_count());
        for label in 0..2 {
            used[m.position_of(label).unwrap() as usize] = false;
        }
        let (layer, left) = route_layer_inner(&g, &m, &gates, &mut used, &mut pf).unwrap();
        assert!(layer.routes.is_empty());
        assert_eq!(left, gates);
    }

    #[test]
    fn route_static_single_gate() {
        let (g, m) = build_layout(LayoutName::Pair, 4, 5).unwrap();
        let c = LayeredCircuit::parse("qubits 2\ncnot 0 1\n").unwrap();
        let s = route_static(&g, &m, &c).unwrap();
        assert_eq!(s.depth, 1);
        assert_eq!(s.stats, vec![1]);
        assert_eq!(s.final_mapping, m);
    }

    #[test]
    fn route_static_depth_lower_bound_and_conservation() {
        for seed in 0..5 {
            let (g, m) = build_layout(LayoutName::Pair, 16, seed).unwrap();
            let c = LayeredCircuit::random(16, 4, 6, seed).unwrap();
            let s = route_static(&g, &m, &c).unwrap();
            assert!(s.depth >= c.logical_depth());
            let mut scheduled: Vec<GateId> = s
                .layers
                .iter()
                .flat_map(|l| l.routes.iter().filter_map(|r| r.gate))
                .collect();
            scheduled.sort_unstable();
            let mut expected: Vec<GateId> = c.gates().map(|g| g.id).collect();
            expected.sort_unstable();
            assert_eq!(scheduled, expected);
        }
    }

    #[test]
    fn route_static_unmapped_qubits_rejected() {
        let (g, m) = build_layout(LayoutName::Pair, 2, 0).unwrap();
        let c = LayeredCircuit::random(8, 2, 1, 0).unwrap();
        assert!(matches!(
            route_static(&g, &m, &c),
            Err(Error::UnmappedQubits { .. })
        ));
    }

    #[test]
    fn route_window_trivial_cases() {
        let (g, m) = build_layout(LayoutName::Single, 8, 3).unwrap();
        let (layers, len) = route_window(&g, &m, &[]).unwrap();
        assert!(layers.is_empty());
        assert_eq!(len, 0);

        let window = vec![
            vec![Gate { id: 0, control: 0, target: 1 }],
            vec![Gate { id: 1, control: 2, target: 3 }],
        ];
        let (_, len) = route_window(&g, &m, &window).unwrap();
        assert_eq!(len, 2);
    }

    #[test]
    fn routing_is_deterministic() {
        let (g, m) = build_layout(LayoutName::Triple, 18, 8).unwrap();
        let c = LayeredCircuit::random(18, 4, 8, 8).unwrap();
        let a = route_static(&g, &m, &c).unwrap();
        let b = route_static(&g, &m, &c).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
