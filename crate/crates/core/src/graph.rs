//! Macroscopic routing graph: a honeycomb grid of logical patches.
//!
//! Each vertex is a logical code patch that either holds a data qubit or is
//! free ancilla space. The honeycomb (degree-3) lattice is stored in
//! brick-wall integer coordinates: every vertex has horizontal neighbors at
//! `col +/- 1` and one vertical neighbor, downwards when `row + col` is even
//! and upwards otherwise. Layouts are periodic data/ancilla masks tiled over
//! the grid, surrounded by a one-vertex ancilla margin.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type QubitLabel = u32;

/// Canonical role of a patch, fixed at layout construction. Actual occupancy
/// may diverge after teleportations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Data,
    Ancilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PatchVertex {
    pub id: VertexId,
    pub row: u32,
    pub col: u32,
    pub role: Role,
}

/// The four periodic layouts, named by the size of their data-patch clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutName {
    Single,
    Pair,
    Triple,
    Hex,
}

impl LayoutName {
    pub const ALL: [LayoutName; 4] = [
        LayoutName::Single,
        LayoutName::Pair,
        LayoutName::Triple,
        LayoutName::Hex,
    ];

    /// Asymptotic density `c` = data patches / total patches, as a fraction.
    pub fn density(self) -> (u32, u32) {
        match self {
            LayoutName::Single => (1, 8),
            LayoutName::Pair => (1, 4),
            LayoutName::Triple => (3, 10),
            LayoutName::Hex => (3, 7),
        }
    }

    /// Smallest periodic data/ancilla mask realizing the layout density.
    ///
    /// Clusters are kept mutually non-adjacent by a full ancilla row between
    /// pattern rows (an offset row for `Hex`), so no data patch is enclosed.
    pub fn unit(self) -> UnitPattern {
        match self {
            LayoutName::Single => UnitPattern {
                rows: 2,
                cols: 4,
                data: &[(0, 0)],
            },
            LayoutName::Pair => UnitPattern {
                rows: 2,
                cols: 4,
                data: &[(0, 0), (0, 1)],
            },
            LayoutName::Triple => UnitPattern {
                rows: 2,
                cols: 5,
                data: &[(0, 0), (0, 1), (0, 2)],
            },
            // Densest layout: 6-patch data runs staggered by half a period,
            // 3 data per 7 patches overall. The half-period stagger leaves
            // every ancilla segment escape columns of both brick parities
            // (6 and 13), which keeps the free space connected.
            LayoutName::Hex => UnitPattern {
                rows: 2,
                cols: 14,
                data: &[
                    (0, 0),
                    (0, 1),
                    (0, 2),
                    (0, 3),
                    (0, 4),
                    (0, 5),
                    (1, 7),
                    (1, 8),
                    (1, 9),
                    (1, 10),
                    (1, 11),
                    (1, 12),
                ],
            },
        }
    }
}

impl fmt::Display for LayoutName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LayoutName::Single => "single",
            LayoutName::Pair => "pair",
            LayoutName::Triple => "triple",
            LayoutName::Hex => "hex",
        };
        f.write_str(s)
    }
}

impl FromStr for LayoutName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(LayoutName::Single),
            "pair" => Ok(LayoutName::Pair),
            "triple" => Ok(LayoutName::Triple),
            "hex" => Ok(LayoutName::Hex),
            other => Err(Error::UnknownLayout(other.to_string())),
        }
    }
}

/// Periodic boolean mask over the grid; `data` lists the data-patch offsets
/// within one `rows x cols` cell.
#[derive(Debug, Clone, Copy)]
pub struct UnitPattern {
    pub rows: u32,
    pub cols: u32,
    pub data: &'static [(u32, u32)],
}

/// A chosen layout instance: the pattern plus how many unit cells are tiled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LayoutSpec {
    pub name: LayoutName,
    /// Unit cells tiled vertically and horizontally.
    pub tiles: (u32, u32),
}

#[derive(Debug, Clone)]
pub struct RoutingGraph {
    rows: u32,
    cols: u32,
    layout: Option<LayoutSpec>,
    vertices: Vec<PatchVertex>,
    adjacency: Vec<Vec<VertexId>>,
    data_vertices: Vec<VertexId>,
}

impl RoutingGraph {
    /// Builds a brick-wall honeycomb grid with the given data coordinates.
    pub fn brick_grid(
        rows: u32,
        cols: u32,
        data: &[(u32, u32)],
        layout: Option<LayoutSpec>,
    ) -> RoutingGraph {
        assert!(rows >= 1 && cols >= 1, "grid must be non-empty");
        let n = (rows * cols) as usize;
        let mut is_data = vec![false; n];
        for &(r, c) in data {
            assert!(r < rows && c < cols, "data coordinate out of range");
            is_data[(r * cols + c) as usize] = true;
        }

        let mut vertices = Vec::with_capacity(n);
        let mut adjacency = vec![Vec::new(); n];
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                let role = if is_data[id as usize] {
                    Role::Data
                } else {
                    Role::Ancilla
                };
                vertices.push(PatchVertex { id, row: r, col: c, role });
                if c + 1 < cols {
                    adjacency[id as usize].push(id + 1);
                    adjacency[(id + 1) as usize].push(id);
                }
                // Vertical (brick) edge: downwards on even row+col parity.
                if (r + c) % 2 == 0 && r + 1 < rows {
                    adjacency[id as usize].push(id + cols);
                    adjacency[(id + cols) as usize].push(id);
                }
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let data_vertices = vertices
            .iter()
            .filter(|v| v.role == Role::Data)
            .map(|v| v.id)
            .collect();

        RoutingGraph {
            rows,
            cols,
            layout,
            vertices,
            adjacency,
            data_vertices,
        }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.vertices.len()
    }

    pub fn vertex(&self, v: VertexId) -> Result<&PatchVertex> {
        self.vertices
            .get(v as usize)
            .ok_or(Error::UnknownVertex(v))
    }

    pub fn role(&self, v: VertexId) -> Result<Role> {
        Ok(self.vertex(v)?.role)
    }

    pub fn vertices(&self) -> &[PatchVertex] {
        &self.vertices
    }

    /// Neighbor set of `v`, ascending by id.
    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId]> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(&self.adjacency[v as usize])
    }

    pub(crate) fn neighbors_unchecked(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    /// Canonical data vertices, ascending by id.
    pub fn data_vertices(&self) -> &[VertexId] {
        &self.data_vertices
    }

    pub fn layout(&self) -> Option<LayoutSpec> {
        self.layout
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut edges = Vec::new();
        for v in &self.vertices {
            for &u in &self.adjacency[v.id as usize] {
                if v.id < u {
                    edges.push((v.id, u));
                }
            }
        }
        edges
    }

    /// JSON dump: `{dims, vertices:[{id,row,col,role}], edges:[[u,v]]}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            dims: [u32; 2],
            vertices: &'a [PatchVertex],
            edges: Vec<(VertexId, VertexId)>,
        }
        let dump = Dump {
            dims: [self.rows, self.cols],
            vertices: &self.vertices,
            edges: self.edges(),
        };
        serde_json::to_string_pretty(&dump).expect("graph dump cannot fail")
    }
}

/// Assignment of qubit labels to vertices. `position` and `occupant` are
/// mutually inverse; the pair is kept consistent by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    position: Vec<VertexId>,
    occupant: Vec<Option<QubitLabel>>,
}

impl Mapping {
    /// Places labels `0..positions.len()` on the given distinct vertices.
    pub fn from_positions(vertex_count: usize, positions: Vec<VertexId>) -> Result<Mapping> {
        let mut occupant = vec![None; vertex_count];
        for (label, &v) in positions.iter().enumerate() {
            if (v as usize) >= vertex_count {
                return Err(Error::UnknownVertex(v));
            }
            if let Some(prev) = occupant[v as usize] {
                return Err(Error::DestinationOccupied { dest: v, occupant: prev });
            }
            occupant[v as usize] = Some(label as QubitLabel);
        }
        Ok(Mapping {
            position: positions,
            occupant,
        })
    }

    pub fn qubits(&self) -> u32 {
        self.position.len() as u32
    }

    pub fn position_of(&self, label: QubitLabel) -> Result<VertexId> {
        self.position
            .get(label as usize)
            .copied()
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn occupant_of(&self, v: VertexId) -> Option<QubitLabel> {
        self.occupant.get(v as usize).copied().flatten()
    }

    pub fn is_occupied(&self, v: VertexId) -> bool {
        self.occupant_of(v).is_some()
    }

    pub(crate) fn occupant_slots(&self) -> &[Option<QubitLabel>] {
        &self.occupant
    }

    /// Moves `label` to the unoccupied vertex `dest`; its old vertex becomes
    /// free and all other entries are unchanged.
    pub fn apply_teleport(&mut self, label: QubitLabel, dest: VertexId) -> Result<()> {
        let src = self.position_of(label)?;
        if (dest as usize) >= self.occupant.len() {
            return Err(Error::UnknownVertex(dest));
        }
        if let Some(occupant) = self.occupant[dest as usize] {
            return Err(Error::DestinationOccupied { dest, occupant });
        }
        self.occupant[src as usize] = None;
        self.occupant[dest as usize] = Some(label);
        self.position[label as usize] = dest;
        Ok(())
    }

    /// Checks the position/occupant inverse-bijection invariant.
    pub fn is_consistent(&self) -> bool {
        let mut count = 0usize;
        for (v, slot) in self.occupant.iter().enumerate() {
            if let Some(label) = slot {
                count += 1;
                match self.position.get(*label as usize) {
                    Some(&pos) if pos as usize == v => {}
                    _ => return false,
                }
            }
        }
        count == self.position.len()
    }
}

impl Serialize for Mapping {
    /// Stable form: ascending `[label, vertex]` pairs.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.position.len()))?;
        for (label, &v) in self.position.iter().enumerate() {
            seq.serialize_element(&(label as QubitLabel, v))?;
        }
        seq.end()
    }
}

/// Picks the tile arrangement for `tiles` unit cells: fewest cells first,
/// then the most square vertex dimensions, then fewer tile rows.
fn tile_arrangement(tiles: u32, unit_rows: u32, unit_cols: u32) -> (u32, u32) {
    let mut best: Option<((u64, u64, u32), (u32, u32))> = None;
    for a in 1..=tiles {
        let b = tiles.div_ceil(a);
        let area = u64::from(a) * u64::from(b);
        let skew = u64::from((a * unit_rows).abs_diff(b * unit_cols));
        let key = (area, skew, a);
        if best.map_or(true, |(k, _)| key < k) {
            best = Some((key, (a, b)));
        }
    }
    best.expect("tiles >= 1").1
}

/// Builds the routing graph for a layout and scatters `q` labels over its
/// data vertices with a seeded uniform shuffle.
///
/// The grid is the smallest rectangle of whole unit cells holding at least
/// `q` data vertices, wrapped in a one-vertex ancilla margin.
pub fn build_layout(name: LayoutName, q: u32, seed: u64) -> Result<(RoutingGraph, Mapping)> {
    if q == 0 {
        return Err(Error::NoQubits);
    }
    let unit = name.unit();
    let per_tile = unit.data.len() as u32;
    let tiles = q.div_ceil(per_tile);
    let (tile_rows, tile_cols) = tile_arrangement(tiles, unit.rows, unit.cols);

    let mut data = Vec::new();
    for tr in 0..tile_rows {
        for tc in 0..tile_cols {
            for &(dr, dc) in unit.data {
                data.push((1 + tr * unit.rows + dr, 1 + tc * unit.cols + dc));
            }
        }
    }
    let rows = tile_rows * unit.rows + 2;
    let cols = tile_cols * unit.cols + 2;
    let graph = RoutingGraph::brick_grid(
        rows,
        cols,
        &data,
        Some(LayoutSpec {
            name,
            tiles: (tile_rows, tile_cols),
        }),
    );

    let mut slots = graph.data_vertices().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    slots.shuffle(&mut rng);
    slots.truncate(q as usize);
    let mapping = Mapping::from_positions(graph.vertex_count(), slots)?;
    Ok((graph, mapping))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn interior_density(g: &RoutingGraph) -> f64 {
        let (rows, cols) = (g.rows(), g.cols());
        let mut data = 0usize;
        let mut total = 0usize;
        for v in g.vertices() {
            if v.row >= 1 && v.row + 1 < rows && v.col >= 1 && v.col + 1 < cols {
                total += 1;
                if v.role == Role::Data {
                    data += 1;
                }
            }
        }
        data as f64 / total as f64
    }

    /// Connected components of the subgraph induced by `keep`.
    fn is_connected_subgraph(g: &RoutingGraph, keep: &[bool]) -> bool {
        let start = match keep.iter().position(|&k| k) {
            Some(i) => i as VertexId,
            None => return true,
        };
        let mut seen = vec![false; g.vertex_count()];
        let mut stack = vec![start];
        seen[start as usize] = true;
        let mut reached = 0usize;
        while let Some(v) = stack.pop() {
            reached += 1;
            for &u in g.neighbors(v).unwrap() {
                if keep[u as usize] && !seen[u as usize] {
                    seen[u as usize] = true;
                    stack.push(u);
                }
            }
        }
        reached == keep.iter().filter(|&&k| k).count()
    }

    #[test]
    fn unit_patterns_match_density() {
        for name in LayoutName::ALL {
            let unit = name.unit();
            let (num, den) = name.density();
            assert_eq!(
                unit.data.len() as u32 * den,
                unit.rows * unit.cols * num,
                "{name} unit pattern density mismatch"
            );
        }
    }

    #[test]
    fn tiled_density_within_tolerance() {
        // 10x10 unit cells and larger: interior density within 10% of c.
        for name in LayoutName::ALL {
            let unit = name.unit();
            let per_tile = unit.data.len() as u32;
            let q = per_tile * 10 * 10;
            let (g, _) = build_layout(name, q, 3).unwrap();
            let (num, den) = name.density();
            let c = num as f64 / den as f64;
            let measured = interior_density(&g);
            assert!(
                (measured - c).abs() <= 0.1 * c,
                "{name}: measured {measured:.4}, want within 10% of {c:.4}"
            );
        }
    }

    #[test]
    fn pair_layout_has_expected_counts() {
        let (g, m) = build_layout(LayoutName::Pair, 20, 11).unwrap();
        assert!(g.data_vertices().len() >= 20);
        assert_eq!(m.qubits(), 20);
        let measured = interior_density(&g);
        assert!((measured - 0.25).abs() <= 0.025, "density {measured}");
    }

    #[test]
    fn single_qubit_layout() {
        let (g, m) = build_layout(LayoutName::Single, 1, 0).unwrap();
        let occupied: Vec<_> = (0..g.vertex_count() as VertexId)
            .filter(|&v| m.is_occupied(v))
            .collect();
        assert_eq!(occupied.len(), 1);
        assert_eq!(g.role(occupied[0]).unwrap(), Role::Data);
    }

    #[test]
    fn seeded_build_is_deterministic() {
        let (g1, m1) = build_layout(LayoutName::Triple, 60, 1234).unwrap();
        let (g2, m2) = build_layout(LayoutName::Triple, 60, 1234).unwrap();
        assert_eq!(g1.vertices(), g2.vertices());
        assert_eq!(g1.edges(), g2.edges());
        assert_eq!(m1, m2);
        let (_, m3) = build_layout(LayoutName::Triple, 60, 1235).unwrap();
        assert_ne!(m1, m3);
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(matches!(
            build_layout(LayoutName::Single, 0, 0),
            Err(Error::NoQubits)
        ));
    }

    #[test]
    fn unknown_layout_name_rejected() {
        assert!("hexx".parse::<LayoutName>().is_err());
        assert_eq!("pair".parse::<LayoutName>().unwrap(), LayoutName::Pair);
    }

    #[test]
    fn interior_degree_is_three() {
        let g = RoutingGraph::brick_grid(10, 10, &[], None);
        for v in g.vertices() {
            let d = g.neighbors(v.id).unwrap().len();
            if v.row >= 1 && v.row < 9 && v.col >= 1 && v.col < 9 {
                assert_eq!(d, 3, "interior vertex ({},{})", v.row, v.col);
            } else {
                assert!(d <= 3, "boundary vertex ({},{})", v.row, v.col);
            }
            assert!(!g.neighbors(v.id).unwrap().contains(&v.id), "self-loop");
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        let (g, _) = build_layout(LayoutName::Hex, 24, 5).unwrap();
        for v in g.vertices() {
            for &u in g.neighbors(v.id).unwrap() {
                assert!(g.neighbors(u).unwrap().contains(&v.id));
            }
        }
    }

    #[test]
    fn neighbors_of_unknown_vertex_error() {
        let g = RoutingGraph::brick_grid(3, 3, &[], None);
        assert!(matches!(g.neighbors(100), Err(Error::UnknownVertex(100))));
    }

    #[test]
    fn free_subgraph_is_connected_for_all_layouts() {
        for name in LayoutName::ALL {
            for q in [4, 24, 120] {
                let (g, _) = build_layout(name, q, 7).unwrap();
                let keep: Vec<bool> = g
                    .vertices()
                    .iter()
                    .map(|v| v.role == Role::Ancilla)
                    .collect();
                assert!(
                    is_connected_subgraph(&g, &keep),
                    "{name} q={q}: ancilla subgraph disconnected"
                );
                // Every data vertex touches the ancilla subgraph.
                for &d in g.data_vertices() {
                    assert!(
                        g.neighbors(d)
                            .unwrap()
                            .iter()
                            .any(|&u| g.role(u).unwrap() == Role::Ancilla),
                        "{name} q={q}: data vertex {d} enclosed"
                    );
                }
            }
        }
    }

    #[test]
    fn teleport_moves_and_reverses() {
        let (g, mut m) = build_layout(LayoutName::Pair, 4, 2).unwrap();
        let original = m.clone();
        let src = m.position_of(3).unwrap();
        let dest = (0..g.vertex_count() as VertexId)
            .find(|&v| !m.is_occupied(v))
            .unwrap();
        m.apply_teleport(3, dest).unwrap();
        assert_eq!(m.occupant_of(src), None);
        assert_eq!(m.occupant_of(dest), Some(3));
        m.apply_teleport(3, src).unwrap();
        assert_eq!(m, original);
    }

    #[test]
    fn teleport_onto_occupied_vertex_fails() {
        let (_, mut m) = build_layout(LayoutName::Pair, 4, 2).unwrap();
        let dest = m.position_of(1).unwrap();
        assert!(matches!(
            m.apply_teleport(0, dest),
            Err(Error::DestinationOccupied { .. })
        ));
        assert!(m.is_consistent());
    }

    #[test]
    fn graph_json_dump_shape() {
        let (g, _) = build_layout(LayoutName::Single, 2, 0).unwrap();
        let dump: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(dump["dims"][0], g.rows());
        assert_eq!(dump["dims"][1], g.cols());
        assert_eq!(dump["vertices"].as_array().unwrap().len(), g.vertex_count());
        assert!(dump["edges"].as_array().unwrap().len() > 0);
        assert!(dump["vertices"][0]["role"].is_string());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_teleports_preserve_bijection(seed in 0u64..1000, steps in 1usize..40) {
            let (g, mut m) = build_layout(LayoutName::Pair, 8, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
            for _ in 0..steps {
                let label = rand::Rng::gen_range(&mut rng, 0..8u32);
                let free: Vec<VertexId> = (0..g.vertex_count() as VertexId)
                    .filter(|&v| !m.is_occupied(v))
                    .collect();
                let dest = free[rand::Rng::gen_range(&mut rng, 0..free.len())];
                m.apply_teleport(label, dest).unwrap();
                prop_assert!(m.is_consistent());
            }
        }
    }
}
