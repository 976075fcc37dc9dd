//! Sliding-window compiler with CNOT + teleportation trees.
//!
//! One logical layer at a time is routed the standard way, then simulated
//! annealing searches extensions of the committed paths into 3-terminal
//! trees whose teleportations shrink the routed depth of the next `k`
//! logical lookahead layers. Improving teleportations are applied, the
//! window's routed layers are fixed in the schedule, and displaced idle
//! qubits are teleported back into layout gaps to keep the layout healthy.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{cascade_push, Gate, LayeredCircuit};
use crate::error::{Error, Result};
use crate::graph::{Mapping, QubitLabel, Role, RoutingGraph, VertexId};
use crate::router::{
    route_layer, route_window, route_window_capped, PathFinder, Route, RouteKind, RoutedLayer,
    Schedule,
};

/// Annealing parameters. `k` is the lookahead depth in logical layers and
/// `r` the neighborhood radius in edges around the current ancilla position.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub k: usize,
    pub r: u32,
    pub iterations: u32,
    pub t0: f64,
    pub cooling: f64,
    pub seed: u64,
    /// Probability that the initial candidate extends a given route.
    pub init_tree_prob: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            k: 5,
            r: 10,
            iterations: 200,
            t0: 2.0,
            cooling: 0.97,
            seed: 1,
            init_tree_prob: 0.5,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if self.r < 1 {
            return Err(Error::InvalidConfig("r must be >= 1".into()));
        }
        if !(self.t0 > 0.0) {
            return Err(Error::InvalidConfig("t0 must be > 0".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidConfig("cooling must be in (0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.init_tree_prob) {
            return Err(Error::InvalidConfig(
                "init_tree_prob must be in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Reads the JSON configuration file; absent fields keep their defaults.
    pub fn from_json(text: &str) -> Result<AnnealConfig> {
        let cfg: AnnealConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MovedQubit {
    Control,
    Target,
}

/// Extension of a committed route into a 3-terminal tree. `branch` runs from
/// next to `attach` (a vertex of the base path) up to `new_ancilla`; it is
/// empty when the new ancilla sits on the base path itself. The qubit named
/// by `moved` is teleported onto `new_ancilla` when the layer executes.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeExtension {
    pub attach: VertexId,
    pub branch: Vec<VertexId>,
    pub new_ancilla: VertexId,
    pub moved: MovedQubit,
}

/// One annealing state: an optional extension per route of the layer plus
/// the window objective it achieved.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub extensions: Vec<Option<TreeExtension>>,
    /// Routed-layer count of the lookahead window; `usize::MAX` until
    /// evaluated (or when the window is unroutable under the teleports).
    pub objective: usize,
    /// Total vertices occupied by the layer's routes and branches.
    pub occupied: usize,
}

impl Candidate {
    fn key(&self) -> (usize, usize) {
        (self.objective, self.occupied)
    }
}

/// Shared context for candidate sampling over one routed layer.
struct LayerCtx<'a> {
    g: &'a RoutingGraph,
    m: &'a Mapping,
    layer: &'a RoutedLayer,
    /// Gate behind each route (`None` for idle teleports).
    route_gates: Vec<Option<Gate>>,
    /// Indices of routes eligible for extension.
    gate_routes: Vec<usize>,
}

impl<'a> LayerCtx<'a> {
    fn new(
        g: &'a RoutingGraph,
        m: &'a Mapping,
        layer: &'a RoutedLayer,
        gates: &[Gate],
    ) -> LayerCtx<'a> {
        let route_gates: Vec<Option<Gate>> = layer
            .routes
            .iter()
            .map(|r| r.gate.and_then(|id| gates.iter().find(|g| g.id == id).copied()))
            .collect();
        let gate_routes = layer
            .routes
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_gate())
            .map(|(i, _)| i)
            .collect();
        LayerCtx {
            g,
            m,
            layer,
            route_gates,
            gate_routes,
        }
    }

    /// Marks everything that is not available to a new branch: occupied
    /// vertices plus all route and extension vertices, optionally skipping
    /// one route's extension.
    fn load_free(&self, pf: &mut PathFinder, exts: &[Option<TreeExtension>], skip_ext: Option<usize>) {
        let used = self.used_mask(exts, skip_ext);
        pf.load_free(self.m, &used);
    }

    fn used_mask(&self, exts: &[Option<TreeExtension>], skip_ext: Option<usize>) -> Vec<bool> {
        let mut used = vec![false; self.g.vertex_count()];
        for (i, route) in self.layer.routes.iter().enumerate() {
            for v in route.vertices() {
                used[v as usize] = true;
            }
            if skip_ext == Some(i) {
                continue;
            }
            if let Some(Some(ext)) = exts.get(i) {
                for &v in &ext.branch {
                    used[v as usize] = true;
                }
            }
        }
        used
    }

    fn current_ancilla(&self, route_idx: usize, ext: &Option<TreeExtension>) -> VertexId {
        match ext {
            Some(e) => e.new_ancilla,
            None => self.layer.routes[route_idx].ancilla,
        }
    }

    fn moved_label(&self, route_idx: usize, moved: MovedQubit) -> QubitLabel {
        let gate = self.route_gates[route_idx].expect("extension on a non-gate route");
        match moved {
            MovedQubit::Control => gate.control,
            MovedQubit::Target => gate.target,
        }
    }
}

fn sample_moved(rng: &mut impl Rng) -> MovedQubit {
    if rng.gen_bool(0.5) {
        MovedQubit::Control
    } else {
        MovedQubit::Target
    }
}

/// Initial annealing state: each CNOT route independently is extended, with
/// probability `cfg.init_tree_prob`, by a random branch of length at most
/// `cfg.r` to a random free vertex; infeasible draws stay unextended.
pub fn initial_candidate(
    layer: &RoutedLayer,
    gates: &[Gate],
    g: &RoutingGraph,
    m: &Mapping,
    cfg: &AnnealConfig,
    rng: &mut impl Rng,
) -> Candidate {
    let ctx = LayerCtx::new(g, m, layer, gates);
    initial_candidate_inner(&ctx, cfg, rng)
}

fn initial_candidate_inner(ctx: &LayerCtx, cfg: &AnnealConfig, rng: &mut impl Rng) -> Candidate {
    let mut pf = PathFinder::new(ctx.g.vertex_count());
    let mut exts: Vec<Option<TreeExtension>> = vec![None; ctx.layer.routes.len()];
    for &i in &ctx.gate_routes {
        if cfg.init_tree_prob <= 0.0 || !rng.gen_bool(cfg.init_tree_prob) {
            continue;
        }
        let route = &ctx.layer.routes[i];
        let attach = route.path[rng.gen_range(0..route.path.len())];
        ctx.load_free(&mut pf, &exts, None);
        let free: Vec<VertexId> = (0..ctx.g.vertex_count() as VertexId)
            .filter(|&v| pf.is_free(v))
            .collect();
        if free.is_empty() {
            continue;
        }
        let w = free[rng.gen_range(0..free.len())];
        let moved = sample_moved(rng);
        if let Some((_, branch)) = pf.branch_from_path(ctx.g, &[attach], w) {
            if branch.len() as u32 <= cfg.r {
                exts[i] = Some(TreeExtension {
                    attach,
                    branch,
                    new_ancilla: w,
                    moved,
                });
            }
        }
    }
    let occupied = occupied_vertices(ctx.layer, &exts);
    Candidate {
        extensions: exts,
        objective: usize::MAX,
        occupied,
    }
}

fn occupied_vertices(layer: &RoutedLayer, exts: &[Option<TreeExtension>]) -> usize {
    let paths: usize = layer
        .routes
        .iter()
        .map(|r| r.path.len() + r.branch.len())
        .sum();
    let branches: usize = exts
        .iter()
        .flatten()
        .map(|e| e.branch.len())
        .sum();
    paths + branches
}

const NEIGHBOR_RETRIES: usize = 10;

/// Window objectives are exact up to this value; see `anneal`.
pub(crate) fn window_cap(lookahead_len: usize) -> usize {
    lookahead_len + 3
}

/// Annealing move: re-samples one route's extension. The new ancilla is
/// drawn uniformly from the free vertices within `r` edges (through free
/// space) of the route's current ancilla, from the interior vertices of the
/// route's own path, or the extension is removed; the branch to a free
/// vertex is the shortest free connection from the base path. Infeasible
/// draws are retried a bounded number of times, then the move is a no-op.
pub fn neighbor(
    cand: &Candidate,
    layer: &RoutedLayer,
    gates: &[Gate],
    r: u32,
    g: &RoutingGraph,
    m: &Mapping,
    rng: &mut impl Rng,
) -> Candidate {
    let ctx = LayerCtx::new(g, m, layer, gates);
    neighbor_inner(&ctx, cand, r, rng)
}

fn neighbor_inner(ctx: &LayerCtx, cand: &Candidate, r: u32, rng: &mut impl Rng) -> Candidate {
    if ctx.gate_routes.is_empty() {
        return cand.clone();
    }
    let mut pf = PathFinder::new(ctx.g.vertex_count());
    for _ in 0..NEIGHBOR_RETRIES {
        let i = ctx.gate_routes[rng.gen_range(0..ctx.gate_routes.len())];
        let route = &ctx.layer.routes[i];
        let cur_ancilla = ctx.current_ancilla(i, &cand.extensions[i]);

        // Free space with this route's own extension lifted.
        ctx.load_free(&mut pf, &cand.extensions, Some(i));
        let ball = pf.free_ball(ctx.g, cur_ancilla, r);
        let interior: Vec<VertexId> = route.path[1..route.path.len() - 1].to_vec();

        let options = 1 + interior.len() + ball.len();
        let pick = rng.gen_range(0..options);
        let new_ext = if pick == 0 {
            None
        } else if pick <= interior.len() {
            let v = interior[pick - 1];
            Some(TreeExtension {
                attach: v,
                branch: Vec::new(),
                new_ancilla: v,
                moved: sample_moved(rng),
            })
        } else {
            let w = ball[pick - 1 - interior.len()];
            match pf.branch_from_path(ctx.g, &route.path, w) {
                Some((attach, branch)) => Some(TreeExtension {
                    attach,
                    branch,
                    new_ancilla: w,
                    moved: sample_moved(rng),
                }),
                None => continue,
            }
        };

        let mut exts = cand.extensions.clone();
        exts[i] = new_ext;
        let occupied = occupied_vertices(ctx.layer, &exts);
        return Candidate {
            extensions: exts,
            objective: usize::MAX,
            occupied,
        };
    }
    cand.clone()
}

/// Window objective: routed-layer count of the lookahead under the
/// candidate's teleports, with the current layer's vertices released.
/// Unroutable windows evaluate to `usize::MAX`; counts beyond `cap` are not
/// resolved further.
fn evaluate(ctx: &LayerCtx, cand: &mut Candidate, lookahead: &[Vec<Gate>], cap: usize) {
    let mut m = ctx.m.clone();
    for (i, ext) in cand.extensions.iter().enumerate() {
        if let Some(ext) = ext {
            let label = ctx.moved_label(i, ext.moved);
            if m.apply_teleport(label, ext.new_ancilla).is_err() {
                cand.objective = usize::MAX;
                return;
            }
        }
    }
    cand.objective = match route_window_capped(ctx.g, &m, lookahead, cap) {
        Ok(len) => len,
        Err(_) => usize::MAX,
    };
}

/// Metropolis search over tree extensions of `layer` against the lookahead
/// window. Returns the best candidate seen; objective ties prefer fewer
/// occupied vertices.
pub fn anneal(
    layer: &RoutedLayer,
    gates: &[Gate],
    lookahead: &[Vec<Gate>],
    cfg: &AnnealConfig,
    g: &RoutingGraph,
    m: &Mapping,
) -> Result<Candidate> {
    cfg.validate()?;
    let ctx = LayerCtx::new(g, m, layer, gates);
    // Candidates only have to be ranked against each other and the
    // unextended window; objectives beyond the cap are all reported as
    // `cap + 1` instead of being routed to the end.
    let cap = window_cap(lookahead.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = initial_candidate_inner(&ctx, cfg, &mut rng);
    evaluate(&ctx, &mut current, lookahead, cap);
    let mut best = current.clone();
    let mut temperature = cfg.t0;
    for _ in 0..cfg.iterations {
        let mut cand = neighbor_inner(&ctx, &current, cfg.r, &mut rng);
        evaluate(&ctx, &mut cand, lookahead, cap);
        let accept = if cand.objective <= current.objective {
            true
        } else if current.objective == usize::MAX {
            false
        } else {
            let delta = (cand.objective - current.objective) as f64;
            rng.gen::<f64>() < (-delta / temperature).exp()
        };
        if accept {
            current = cand;
        }
        if current.key() < best.key() {
            best = current.clone();
        }
        temperature *= cfg.cooling;
    }
    // Objective ties prefer fewer occupied vertices: drop every extension
    // that does not pay for itself. Extensions left over from the random
    // initialization would otherwise teleport qubits without buying depth.
    for i in 0..best.extensions.len() {
        if best.extensions[i].is_none() {
            continue;
        }
        let mut pruned = best.clone();
        pruned.extensions[i] = None;
        pruned.occupied = occupied_vertices(ctx.layer, &pruned.extensions);
        evaluate(&ctx, &mut pruned, lookahead, cap);
        if pruned.objective <= best.objective {
            best = pruned;
        }
    }
    Ok(best)
}

/// Teleports displaced idle qubits back onto free canonical data vertices.
///
/// Labels not touched by the current layer's gates and not sitting on a data
/// vertex are processed in ascending order; each takes the shortest free
/// path (at least one interior vertex) to its nearest free data vertex,
/// committed as an `IdleTeleport` route when it stays vertex-disjoint from
/// the layer, and skipped otherwise. The mapping is updated in place.
pub fn idle_restore(
    g: &RoutingGraph,
    m: &mut Mapping,
    layer: &RoutedLayer,
    touched: &[bool],
) -> Vec<Route> {
    let mut used = vec![false; g.vertex_count()];
    for route in &layer.routes {
        for v in route.vertices() {
            used[v as usize] = true;
        }
    }
    let mut pf = PathFinder::new(g.vertex_count());
    let mut restored = Vec::new();
    for label in 0..m.qubits() {
        if touched.get(label as usize).copied().unwrap_or(false) {
            continue;
        }
        let pos = m.position_of(label).expect("label in range");
        if g.role(pos).expect("mapped vertex exists") == Role::Data {
            continue;
        }
        pf.load_free(m, &used);
        pf.distances_from(g, pos);
        // Nearest free canonical data vertex through free space, ties by id.
        // Adjacent vertices need a detour for the interior ancilla; their
        // true cost is resolved separately.
        let mut best: Option<(u32, VertexId)> = None;
        let mut adjacent: Vec<VertexId> = Vec::new();
        for &v in g.data_vertices() {
            if !pf.is_free(v) {
                continue;
            }
            match pf.distance(v) {
                Some(1) => adjacent.push(v),
                Some(d) if d >= 2 => {
                    if best.map_or(true, |b| (d, v) < b) {
                        best = Some((d, v));
                    }
                }
                _ => {}
            }
        }
        for v in adjacent {
            if let Some(path) = pf.shortest(g, pos, v, true) {
                let d = (path.len() - 1) as u32;
                if best.map_or(true, |b| (d, v) < b) {
                    best = Some((d, v));
                }
            }
        }
        let Some((_, dest)) = best else { continue };
        let Some(path) = pf.shortest(g, pos, dest, true) else {
            continue;
        };
        for &v in &path {
            used[v as usize] = true;
        }
        m.apply_teleport(label, dest).expect("destination is free");
        restored.push(Route {
            gate: None,
            kind: RouteKind::IdleTeleport,
            ancilla: dest,
            path,
            branch: Vec::new(),
        });
    }
    restored
}

fn touched_mask(gates: &[Gate], qubits: u32) -> Vec<bool> {
    let mut mask = vec![false; qubits as usize];
    for gate in gates {
        mask[gate.control as usize] = true;
        mask[gate.target as usize] = true;
    }
    mask
}

fn apply_candidate(
    layer: &mut RoutedLayer,
    cand: &Candidate,
    gates: &[Gate],
    m: &mut Mapping,
) -> Result<()> {
    for (i, ext) in cand.extensions.iter().enumerate() {
        let Some(ext) = ext else { continue };
        let route = &mut layer.routes[i];
        let gate_id = route.gate.expect("extensions only on gate routes");
        let gate = gates
            .iter()
            .find(|g| g.id == gate_id)
            .expect("gate behind route");
        let label = match ext.moved {
            MovedQubit::Control => gate.control,
            MovedQubit::Target => gate.target,
        };
        route.kind = match ext.moved {
            MovedQubit::Control => RouteKind::TeleportControl,
            MovedQubit::Target => RouteKind::TeleportTarget,
        };
        route.branch = ext.branch.clone();
        route.ancilla = ext.new_ancilla;
        m.apply_teleport(label, ext.new_ancilla)?;
    }
    Ok(())
}

/// Sliding-window compiler. Per logical layer: (i) route it shortest-first
/// and restore displaced idle qubits, (ii) anneal tree extensions against
/// the next `min(k, remaining)` layers, (iii) if the annealed window beats
/// the no-extension window, apply the teleports, fix the window's routed
/// layers in the schedule and jump past them; otherwise keep only this layer
/// and move on. With `iterations = 0` the optimizer is disabled and the
/// output equals the static schedule exactly.
pub fn compile_optimized(
    g: &RoutingGraph,
    m0: &Mapping,
    circuit: &LayeredCircuit,
    cfg: &AnnealConfig,
) -> Result<Schedule> {
    cfg.validate()?;
    if m0.qubits() < circuit.qubits() {
        return Err(Error::UnmappedQubits {
            mapped: m0.qubits(),
            required: circuit.qubits(),
        });
    }
    let mut m = m0.clone();
    let mut layers: Vec<Vec<Gate>> = circuit.layers().to_vec();
    let mut out: Vec<RoutedLayer> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut j = 0;
    while j < layers.len() {
        let gates = std::mem::take(&mut layers[j]);
        j += 1;
        if gates.is_empty() {
            continue;
        }
        let (mut routed, leftover) = route_layer(g, &m, &gates)?;
        if routed.routes.is_empty() {
            return Err(stuck_layer(out.len(), &leftover, &m));
        }
        if !leftover.is_empty() {
            if j == layers.len() {
                layers.push(Vec::new());
            }
            cascade_push(&mut layers, j, leftover);
        }
        let touched = touched_mask(&gates, m.qubits());
        let idle = idle_restore(g, &mut m, &routed, &touched);
        if log::log_enabled!(log::Level::Debug) {
            let displaced = (0..m.qubits())
                .filter(|&l| {
                    let v = m.position_of(l).expect("label in range");
                    g.role(v).expect("vertex exists") != Role::Ancilla
                })
                .count();
            log::debug!(
                "layer {}: routed {} of {}, idle restores {}, labels on data slots {}",
                out.len(),
                routed.routes.len(),
                gates.len(),
                idle.len(),
                displaced
            );
        }
        routed.routes.extend(idle);

        let window_len = cfg.k.min(layers.len() - j);
        if cfg.iterations > 0 && window_len > 0 {
            let lookahead: Vec<Vec<Gate>> = layers[j..j + window_len].to_vec();
            // A window that is unroutable even without teleports is not a
            // hard failure here: later idle restores can clear it, so fall
            // back to layer-by-layer routing.
            // A window already routed at the lookahead depth cannot be
            // beaten (every logical layer yields at least one routed layer),
            // so the search runs only on imperfect windows.
            if let Ok((_, base_len)) = route_window(g, &m, &lookahead) {
                if base_len <= window_len {
                    out.push(routed);
                    continue;
                }
                let wcfg = AnnealConfig {
                    seed: rng.gen::<u64>(),
                    ..*cfg
                };
                let best = anneal(&routed, &gates, &lookahead, &wcfg, g, &m)?;
                log::debug!(
                    "window at layer {}: base {} best {}",
                    out.len(),
                    base_len,
                    best.objective
                );
                // Objectives above the annealing cap are lower bounds, not
                // exact counts; only exact improvements are committed.
                if best.objective < base_len && best.objective <= window_cap(window_len) {
                    apply_candidate(&mut routed, &best, &gates, &mut m)?;
                    out.push(routed);
                    let (window_layers, window_count) = route_window(g, &m, &lookahead)?;
                    debug_assert_eq!(window_count, best.objective);
                    out.extend(window_layers);
                    j += window_len;
                    continue;
                }
            }
        }
        out.push(routed);
    }
    Ok(Schedule::new(out, m))
}

fn stuck_layer(routed_layers: usize, stuck: &[Gate], m: &Mapping) -> Error {
    let diagnostic = stuck
        .iter()
        .map(|gate| {
            format!(
                "gate {} (control {} at {:?}, target {} at {:?})",
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
