//! Logical CNOT circuits as layers of disjoint-support gates.
//!
//! A layer holds gates that may execute in parallel; the number of layers is
//! the logical depth, the lower bound on any routed schedule depth. The text
//! format is line oriented: a `qubits N` header, `cnot C T` gate lines,
//! optional `---` layer separators and `#` comments.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::QubitLabel;

pub type GateId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gate {
    pub id: GateId,
    pub control: QubitLabel,
    pub target: QubitLabel,
}

impl Gate {
    pub fn touches(&self, q: QubitLabel) -> bool {
        self.control == q || self.target == q
    }

    pub fn shares_qubit(&self, other: &Gate) -> bool {
        self.touches(other.control) || self.touches(other.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCircuit {
    qubits: u32,
    layers: Vec<Vec<Gate>>,
}

impl LayeredCircuit {
    /// Validates layer-disjointness, label range and gate-id uniqueness.
    pub fn new(qubits: u32, layers: Vec<Vec<Gate>>) -> Result<LayeredCircuit> {
        let mut seen_ids = std::collections::HashSet::new();
        for layer in &layers {
            let mut used = vec![false; qubits as usize];
            for gate in layer {
                if gate.control == gate.target {
                    return Err(Error::CircuitParse {
                        line: 0,
                        msg: format!("gate {} has control = target", gate.id),
                    });
                }
                for q in [gate.control, gate.target] {
                    if q >= qubits {
                        return Err(Error::CircuitParse {
                            line: 0,
                            msg: format!("qubit {q} out of range (qubits = {qubits})"),
                        });
                    }
                    if used[q as usize] {
                        return Err(Error::CircuitParse {
                            line: 0,
                            msg: format!("layer support overlaps on qubit {q}"),
                        });
                    }
                    used[q as usize] = true;
                }
                if !seen_ids.insert(gate.id) {
                    return Err(Error::CircuitParse {
                        line: 0,
                        msg: format!("duplicate gate id {}", gate.id),
                    });
                }
            }
        }
        Ok(LayeredCircuit { qubits, layers })
    }

    /// Random circuit: `depth` layers of exactly `g` gates, each layer drawn
    /// as `g` disjoint ordered pairs sampled uniformly without replacement.
    pub fn random(qubits: u32, g: u32, depth: u32, seed: u64) -> Result<LayeredCircuit> {
        if 2 * g > qubits {
            return Err(Error::LayerTooDense {
                g,
                needed: 2 * g,
                q: qubits,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<QubitLabel> = (0..qubits).collect();
        let mut layers = Vec::with_capacity(depth as usize);
        let mut next_id: GateId = 0;
        for _ in 0..depth {
            labels.shuffle(&mut rng);
            let mut layer = Vec::with_capacity(g as usize);
            for pair in 0..g as usize {
                layer.push(Gate {
                    id: next_id,
                    control: labels[2 * pair],
                    target: labels[2 * pair + 1],
                });
                next_id += 1;
            }
            layers.push(layer);
        }
        Ok(LayeredCircuit { qubits, layers })
    }

    /// Parses the text format. Files without separators are layered
    /// as-soon-as-possible against the gate dependency DAG (two gates depend
    /// iff they share a qubit); explicit `---` separators override, and empty
    /// separator blocks are dropped.
    pub fn parse(text: &str) -> Result<LayeredCircuit> {
        let mut qubits: Option<u32> = None;
        let mut gates: Vec<Gate> = Vec::new();
        // (gate index, explicit block index)
        let mut blocks: Vec<usize> = Vec::new();
        let mut block = 0usize;
        let mut has_separator = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "---" {
                if qubits.is_none() {
                    return Err(Error::CircuitParse {
                        line: line_no,
                        msg: "separator before qubits header".into(),
                    });
                }
                has_separator = true;
                block += 1;
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("qubits") => {
                    if qubits.is_some() {
                        return Err(Error::CircuitParse {
                            line: line_no,
                            msg: "duplicate qubits header".into(),
                        });
                    }
                    let n: u32 = parts
                        .next()
                        .ok_or_else(|| Error::CircuitParse {
                            line: line_no,
                            msg: "qubits header needs a count".into(),
                        })?
                        .parse()
                        .map_err(|_| Error::CircuitParse {
                            line: line_no,
                            msg: "invalid qubit count".into(),
                        })?;
                    qubits = Some(n);
                }
                Some("cnot") => {
                    let q = qubits.ok_or_else(|| Error::CircuitParse {
                        line: line_no,
                        msg: "gate before qubits header".into(),
                    })?;
                    let mut field = |name: &str| -> Result<u32> {
                        parts
                            .next()
                            .ok_or_else(|| Error::CircuitParse {
                                line: line_no,
                                msg: format!("cnot is missing {name}"),
                            })?
                            .parse()
                            .map_err(|_| Error::CircuitParse {
                                line: line_no,
                                msg: format!("invalid {name}"),
                            })
                    };
                    let control = field("control")?;
                    let target = field("target")?;
                    if control >= q || target >= q {
                        return Err(Error::CircuitParse {
                            line: line_no,
                            msg: format!("qubit index out of range (qubits = {q})"),
                        });
                    }
                    if control == target {
                        return Err(Error::CircuitParse {
                            line: line_no,
                            msg: "control equals target".into(),
                        });
                    }
                    gates.push(Gate {
                        id: gates.len() as GateId,
                        control,
                        target,
                    });
                    blocks.push(block);
                }
                Some(other) => {
                    return Err(Error::CircuitParse {
                        line: line_no,
                        msg: format!("unknown directive `{other}`"),
                    });
                }
                None => unreachable!(),
            }
        }

        let qubits = qubits.ok_or_else(|| Error::CircuitParse {
            line: 0,
            msg: "missing qubits header".into(),
        })?;

        let layers = if has_separator {
            let mut layers: Vec<Vec<Gate>> = Vec::new();
            let mut current = 0usize;
            let mut layer = Vec::new();
            for (gate, &b) in gates.iter().zip(&blocks) {
                if b != current {
                    if !layer.is_empty() {
                        layers.push(std::mem::take(&mut layer));
                    }
                    current = b;
                }
                layer.push(*gate);
            }
            if !layer.is_empty() {
                layers.push(layer);
            }
            layers
        } else {
            // ASAP layering against the dependency DAG.
            let mut next_layer = vec![0usize; qubits as usize];
            let mut layers: Vec<Vec<Gate>> = Vec::new();
            for gate in &gates {
                let at = next_layer[gate.control as usize].max(next_layer[gate.target as usize]);
                if at == layers.len() {
                    layers.push(Vec::new());
                }
                layers[at].push(*gate);
                next_layer[gate.control as usize] = at + 1;
                next_layer[gate.target as usize] = at + 1;
            }
            layers
        };

        LayeredCircuit::new(qubits, layers)
    }

    /// Serializes with explicit layer separators; `parse` round-trips it.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.qubits);
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push_str("---\n");
            }
            for gate in layer {
                out.push_str(&format!("cnot {} {}\n", gate.control, gate.target));
            }
        }
        out
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn logical_depth(&self) -> usize {
        self.layers.len()
    }

    pub fn total_gates(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    /// Moves a gate one layer onward; gates there that share a qubit with it
    /// are cascaded onward in turn, keeping the relative order of dependent
    /// gates. A new final layer is appended when the cascade runs off the end.
    pub fn push_gate(&mut self, gate_id: GateId, from_layer: usize) -> Result<()> {
        let layer = self
            .layers
            .get_mut(from_layer)
            .ok_or(Error::GateNotFound(gate_id))?;
        let idx = layer
            .iter()
            .position(|g| g.id == gate_id)
            .ok_or(Error::GateNotFound(gate_id))?;
        let gate = layer.remove(idx);
        cascade_push(&mut self.layers, from_layer + 1, vec![gate]);
        Ok(())
    }
}

/// Inserts `movers` into `layers[into]`, evicting resident gates that share a
/// qubit with any mover into the next layer, recursively. Movers are appended
/// after the surviving residents; relative order is preserved on both sides.
pub(crate) fn cascade_push(layers: &mut Vec<Vec<Gate>>, into: usize, movers: Vec<Gate>) {
    let mut wave = movers;
    let mut at = into;
    while !wave.is_empty() {
        if at == layers.len() {
            layers.push(Vec::new());
        }
        let resident = std::mem::take(&mut layers[at]);
        let (evicted, kept): (Vec<Gate>, Vec<Gate>) = resident
            .into_iter()
            .partition(|g| wave.iter().any(|m| m.shares_qubit(g)));
        layers[at] = kept;
        layers[at].extend(wave);
        wave = evicted;
        at += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gate(id: GateId, c: QubitLabel, t: QubitLabel) -> Gate {
        Gate {
            id,
            control: c,
            target: t,
        }
    }

    #[test]
    fn random_circuit_shape() {
        let c = LayeredCircuit::random(120, 8, 40, 9).unwrap();
        assert_eq!(c.logical_depth(), 40);
        assert_eq!(c.total_gates(), 320);
        for layer in c.layers() {
            assert_eq!(layer.len(), 8);
            let mut used = std::collections::HashSet::new();
            for g in layer {
                assert!(used.insert(g.control));
                assert!(used.insert(g.target));
            }
        }
    }

    #[test]
    fn random_circuit_minimal() {
        let c = LayeredCircuit::random(2, 1, 1, 5).unwrap();
        assert_eq!(c.logical_depth(), 1);
        let g = c.layers()[0][0];
        assert_eq!(
            {
                let mut s = [g.control, g.target];
                s.sort_unstable();
                s
            },
            [0, 1]
        );
    }

    #[test]
    fn random_circuit_total_gates() {
        let c = LayeredCircuit::random(60, 5, 100, 77).unwrap();
        assert_eq!(c.total_gates(), 500);
        assert_eq!(c.logical_depth(), 100);
    }

    #[test]
    fn random_circuit_deterministic() {
        let a = LayeredCircuit::random(30, 4, 12, 42).unwrap();
        let b = LayeredCircuit::random(30, 4, 12, 42).unwrap();
        assert_eq!(a, b);
        let c = LayeredCircuit::random(30, 4, 12, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_circuit_too_dense() {
        assert!(matches!(
            LayeredCircuit::random(5, 3, 1, 0),
            Err(Error::LayerTooDense { .. })
        ));
    }

    #[test]
    fn parse_dependent_gates_sequence() {
        let c = LayeredCircuit::parse("qubits 2\ncnot 0 1\ncnot 0 1\n").unwrap();
        assert_eq!(c.logical_depth(), 2);
    }

    #[test]
    fn parse_disjoint_gates_one_layer() {
        let c = LayeredCircuit::parse("qubits 4\ncnot 0 1\ncnot 2 3\n").unwrap();
        assert_eq!(c.logical_depth(), 1);
        assert_eq!(c.layers()[0].len(), 2);
    }

    #[test]
    fn parse_fig_style_explicit_layers() {
        let src = "qubits 4\ncnot 2 3\ncnot 0 1\n---\ncnot 0 3\ncnot 2 1\n";
        let c = LayeredCircuit::parse(src).unwrap();
        assert_eq!(c.logical_depth(), 2);
        let pairs: Vec<Vec<(u32, u32)>> = c
            .layers()
            .iter()
            .map(|l| l.iter().map(|g| (g.control, g.target)).collect())
            .collect();
        assert_eq!(pairs, vec![vec![(2, 3), (0, 1)], vec![(0, 3), (2, 1)]]);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(LayeredCircuit::parse("qubits 2\ncnot 0 2\n").is_err());
        assert!(LayeredCircuit::parse("qubits 2\ncnot 0 0\n").is_err());
        assert!(LayeredCircuit::parse("qubits 2\nxnot 0 1\n").is_err());
        assert!(LayeredCircuit::parse("cnot 0 1\n").is_err());
        assert!(LayeredCircuit::parse("qubits 4\ncnot 0 1\ncnot 1 2\n---\n").is_err());
    }

    #[test]
    fn parse_comments_and_blanks() {
        let c = LayeredCircuit::parse("# header\nqubits 3\n\ncnot 0 1 # inline\n").unwrap();
        assert_eq!(c.total_gates(), 1);
    }

    #[test]
    fn empty_circuit_depth_zero() {
        let c = LayeredCircuit::parse("qubits 3\n").unwrap();
        assert_eq!(c.logical_depth(), 0);
        assert_eq!(c.total_gates(), 0);
    }

    #[test]
    fn text_round_trip() {
        let c = LayeredCircuit::random(20, 3, 7, 123).unwrap();
        let back = LayeredCircuit::parse(&c.to_text()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn push_cascades_on_shared_qubit() {
        let mut c = LayeredCircuit::new(
            3,
            vec![vec![gate(0, 0, 1)], vec![gate(1, 1, 2)]],
        )
        .unwrap();
        c.push_gate(0, 0).unwrap();
        assert_eq!(c.layers()[0], vec![]);
        assert_eq!(c.layers()[1], vec![gate(0, 0, 1)]);
        assert_eq!(c.layers()[2], vec![gate(1, 1, 2)]);
    }

    #[test]
    fn push_without_conflict_joins_layer() {
        let mut c = LayeredCircuit::new(
            4,
            vec![vec![gate(0, 0, 1)], vec![gate(1, 2, 3)]],
        )
        .unwrap();
        c.push_gate(0, 0).unwrap();
        assert_eq!(c.layers()[1], vec![gate(1, 2, 3), gate(0, 0, 1)]);
        assert_eq!(c.logical_depth(), 2);
    }

    #[test]
    fn push_missing_gate_errors() {
        let mut c = LayeredCircuit::new(2, vec![vec![gate(0, 0, 1)]]).unwrap();
        assert!(matches!(c.push_gate(7, 0), Err(Error::GateNotFound(7))));
        assert!(matches!(c.push_gate(0, 3), Err(Error::GateNotFound(0))));
    }

    /// Original relative order of same-qubit gates, from the layer structure.
    fn qubit_orders(c: &LayeredCircuit) -> Vec<Vec<GateId>> {
        let mut orders = vec![Vec::new(); c.qubits() as usize];
        for layer in c.layers() {
            for g in layer {
                orders[g.control as usize].push(g.id);
                orders[g.target as usize].push(g.id);
            }
        }
        orders
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pushes_preserve_dependency_order(seed in 0u64..500, pushes in 1usize..25) {
            let mut c = LayeredCircuit::random(12, 3, 6, seed).unwrap();
            let before = qubit_orders(&c);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            for _ in 0..pushes {
                let nonempty: Vec<usize> = (0..c.logical_depth())
                    .filter(|&i| !c.layers()[i].is_empty())
                    .collect();
                let li = nonempty[rand::Rng::gen_range(&mut rng, 0..nonempty.len())];
                let gi = rand::Rng::gen_range(&mut rng, 0..c.layers()[li].len());
                let id = c.layers()[li][gi].id;
                c.push_gate(id, li).unwrap();
                // Disjoint support must hold in every layer after each push.
                for layer in c.layers() {
                    let mut used = std::collections::HashSet::new();
                    for g in layer {
                        prop_assert!(used.insert(g.control));
                        prop_assert!(used.insert(g.target));
                    }
                }
            }
            // Brute-force dependency order of the gate DAG is preserved.
            prop_assert_eq!(qubit_orders(&c), before);
        }

        #[test]
        fn generated_depth_matches_request(seed in 0u64..200, d in 0u32..12) {
            let c = LayeredCircuit::random(16, 2, d, seed).unwrap();
            prop_assert_eq!(c.logical_depth(), d as usize);
        }
    }
}
