//! Brute-force verifier for the measurement-based CNOT protocols.
//!
//! Each protocol acts on three wires (control, target, ancilla): the ancilla
//! is prepared, two joint Pauli measurements and one single-wire measurement
//! are performed, and Pauli corrections conditioned on the three outcomes
//! (alpha, beta, gamma) repair the state. The verifier enumerates all eight
//! outcome branches with dense 8-dimensional state vectors and compares the
//! resulting channel, branch by branch, against the ideal CNOT — with the
//! output wire relocated for the teleporting variants. This replaces a
//! diagrammatic proof with an exhaustive numeric check.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const TOL: f64 = 1e-9;

/// The three wires; state index bit order is control, target, ancilla
/// (control = most significant bit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Wire {
    Control,
    Target,
    Ancilla,
}

impl Wire {
    fn mask(self) -> usize {
        match self {
            Wire::Control => 4,
            Wire::Target => 2,
            Wire::Ancilla => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pauli {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaPrep {
    /// |+> (stabilizer X).
    Plus,
    /// |0> (stabilizer Z).
    Zero,
}

impl AncillaPrep {
    pub fn state(self) -> [C64; 2] {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            AncillaPrep::Plus => [h, h],
            AncillaPrep::Zero => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        }
    }
}

/// Joint two-wire Pauli measurement (X(x)X or Z(x)Z merge).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JointMeasurement {
    pub pauli: Pauli,
    pub wires: [Wire; 2],
}

/// Terminal single-wire Pauli measurement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SingleMeasurement {
    pub pauli: Pauli,
    pub wire: Wire,
}

/// Pauli applied when the XOR of the selected outcomes is 1. Bit 0 of
/// `condition` selects alpha, bit 1 beta, bit 2 gamma.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Correction {
    pub pauli: Pauli,
    pub wire: Wire,
    pub condition: u8,
}

pub const ALPHA: u8 = 1;
pub const BETA: u8 = 2;
pub const GAMMA: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    StandardCnot,
    CnotTeleportTarget,
    CnotTeleportControl,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProtocolKind::StandardCnot => "standard",
            ProtocolKind::CnotTeleportTarget => "tele-target",
            ProtocolKind::CnotTeleportControl => "tele-control",
        };
        f.write_str(s)
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(ProtocolKind::StandardCnot),
            "tele-target" => Ok(ProtocolKind::CnotTeleportTarget),
            "tele-control" => Ok(ProtocolKind::CnotTeleportControl),
            other => Err(Error::InvalidConfig(format!(
                "unknown protocol `{other}` (expected standard|tele-control|tele-target)"
            ))),
        }
    }
}

/// Full description of one measurement-based protocol: preparation, two
/// joint measurements (outcomes alpha, beta), one single-wire measurement
/// (outcome gamma) and the conditioned corrections.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub prep: AncillaPrep,
    pub joints: [JointMeasurement; 2],
    pub single: SingleMeasurement,
    pub corrections: Vec<Correction>,
    /// Where the logical (control, target) pair lives afterwards.
    pub output_wires: [Wire; 2],
    /// The wire consumed by the terminal measurement.
    pub measured_wire: Wire,
}

impl ProtocolSpec {
    /// Plain CNOT: ancilla |+>, Z(x)Z on (control, ancilla), X(x)X on
    /// (ancilla, target), ancilla measured in Z.
    pub fn standard_cnot() -> ProtocolSpec {
        ProtocolSpec {
            kind: ProtocolKind::StandardCnot,
            prep: AncillaPrep::Plus,
            joints: [
                JointMeasurement {
                    pauli: Pauli::Z,
                    wires: [Wire::Control, Wire::Ancilla],
                },
                JointMeasurement {
                    pauli: Pauli::X,
                    wires: [Wire::Ancilla, Wire::Target],
                },
            ],
            single: SingleMeasurement {
                pauli: Pauli::Z,
                wire: Wire::Ancilla,
            },
            corrections: vec![
                Correction {
                    pauli: Pauli::Z,
                    wire: Wire::Control,
                    condition: BETA,
                },
                Correction {
                    pauli: Pauli::X,
                    wire: Wire::Target,
                    condition: ALPHA | GAMMA,
                },
            ],
            output_wires: [Wire::Control, Wire::Target],
            measured_wire: Wire::Ancilla,
        }
    }

    /// CNOT with the target relocated onto the ancilla patch: same merges as
    /// the standard scheme but the terminal Z measurement consumes the
    /// target wire.
    pub fn cnot_teleport_target() -> ProtocolSpec {
        ProtocolSpec {
            kind: ProtocolKind::CnotTeleportTarget,
            prep: AncillaPrep::Plus,
            joints: [
                JointMeasurement {
                    pauli: Pauli::Z,
                    wires: [Wire::Control, Wire::Ancilla],
                },
                JointMeasurement {
                    pauli: Pauli::X,
                    wires: [Wire::Ancilla, Wire::Target],
                },
            ],
            single: SingleMeasurement {
                pauli: Pauli::Z,
                wire: Wire::Target,
            },
            corrections: vec![
                Correction {
                    pauli: Pauli::Z,
                    wire: Wire::Control,
                    condition: BETA,
                },
                Correction {
                    pauli: Pauli::Z,
                    wire: Wire::Ancilla,
                    condition: BETA,
                },
                Correction {
                    pauli: Pauli::X,
                    wire: Wire::Ancilla,
                    condition: ALPHA | GAMMA,
                },
            ],
            output_wires: [Wire::Control, Wire::Ancilla],
            measured_wire: Wire::Target,
        }
    }

    /// CNOT with the control relocated onto the ancilla patch: ancilla |0>,
    /// X(x)X merge first, then Z(x)Z, and the terminal X measurement
    /// consumes the control wire.
    pub fn cnot_teleport_control() -> ProtocolSpec {
        ProtocolSpec {
            kind: ProtocolKind::CnotTeleportControl,
            prep: AncillaPrep::Zero,
            joints: [
                JointMeasurement {
                    pauli: Pauli::X,
                    wires: [Wire::Ancilla, Wire::Target],
                },
                JointMeasurement {
                    pauli: Pauli::Z,
                    wires: [Wire::Control, Wire::Ancilla],
                },
            ],
            single: SingleMeasurement {
                pauli: Pauli::X,
                wire: Wire::Control,
            },
            corrections: vec![
                Correction {
                    pauli: Pauli::X,
                    wire: Wire::Ancilla,
                    condition: BETA,
                },
                Correction {
                    pauli: Pauli::X,
                    wire: Wire::Target,
                    condition: BETA,
                },
                Correction {
                    pauli: Pauli::Z,
                    wire: Wire::Ancilla,
                    condition: ALPHA | GAMMA,
                },
            ],
            output_wires: [Wire::Ancilla, Wire::Target],
            measured_wire: Wire::Control,
        }
    }

    pub fn for_kind(kind: ProtocolKind) -> ProtocolSpec {
        match kind {
            ProtocolKind::StandardCnot => ProtocolSpec::standard_cnot(),
            ProtocolKind::CnotTeleportTarget => ProtocolSpec::cnot_teleport_target(),
            ProtocolKind::CnotTeleportControl => ProtocolSpec::cnot_teleport_control(),
        }
    }
}

/// One measurement-outcome branch with its probability and the operator
/// (corrections x projectors) it applied on the (control, target, ancilla)
/// space. Zero-probability branches are excluded by `simulate_branches`.
#[derive(Debug, Clone)]
pub struct OutcomeBranch {
    /// (alpha, beta, gamma).
    pub outcomes: [u8; 3],
    pub probability: f64,
    /// Normalized post-branch state on (control, target, ancilla).
    pub state: [C64; 8],
    /// 8x8 branch operator, row-major.
    pub operator: Vec<C64>,
}

fn apply_pauli(state: &mut [C64; 8], pauli: Pauli, wire: Wire) {
    let mask = wire.mask();
    match pauli {
        Pauli::X => {
            for i in 0..8 {
                if i & mask == 0 {
                    state.swap(i, i | mask);
                }
            }
        }
        Pauli::Z => {
            for (i, amp) in state.iter_mut().enumerate() {
                if i & mask != 0 {
                    *amp = -*amp;
                }
            }
        }
    }
}

/// Projects onto the (-1)^outcome eigenspace of the given Pauli product;
/// returns the branch probability (squared norm) without renormalizing.
fn project(state: &mut [C64; 8], paulis: &[(Pauli, Wire)], outcome: u8) -> f64 {
    let mut flipped = *state;
    for &(p, w) in paulis {
        apply_pauli(&mut flipped, p, w);
    }
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    let mut norm2 = 0.0;
    for i in 0..8 {
        state[i] = (state[i] + sign * flipped[i]) * 0.5;
        norm2 += state[i].norm_sqr();
    }
    norm2
}

fn run_branch(p: &ProtocolSpec, full: &[C64; 8], outcomes: [u8; 3]) -> ([C64; 8], f64) {
    let mut state = *full;
    for (joint, &bit) in p.joints.iter().zip(&outcomes[..2]) {
        project(
            &mut state,
            &[(joint.pauli, joint.wires[0]), (joint.pauli, joint.wires[1])],
            bit,
        );
    }
    // Joint branch probability: squared norm after all three projections.
    let prob = project(&mut state, &[(p.single.pauli, p.single.wire)], outcomes[2]);
    let flags = outcomes[0] * ALPHA + outcomes[1] * BETA + outcomes[2] * GAMMA;
    for corr in &p.corrections {
        if (flags & corr.condition).count_ones() % 2 == 1 {
            apply_pauli(&mut state, corr.pauli, corr.wire);
        }
    }
    (state, prob)
}

/// Runs all eight outcome branches of `p` on `input` (a 2-qubit state on
/// (control, target)) with the given ancilla preparation. Surviving branches
/// come back renormalized with their probabilities; zero-probability
/// branches are excluded.
pub fn simulate_branches(
    p: &ProtocolSpec,
    input: &[C64; 4],
    ancilla_prep: &[C64; 2],
) -> Result<Vec<OutcomeBranch>> {
    let norm_in: f64 = input.iter().map(|a| a.norm_sqr()).sum();
    if (norm_in - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm_in));
    }
    let norm_anc: f64 = ancilla_prep.iter().map(|a| a.norm_sqr()).sum();
    if (norm_anc - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm_anc));
    }

    let mut full = [C64::new(0.0, 0.0); 8];
    for ct in 0..4 {
        for a in 0..2 {
            full[ct * 2 + a] = input[ct] * ancilla_prep[a];
        }
    }

    let mut out = Vec::new();
    for code in 0..8u8 {
        let outcomes = [code & 1, (code >> 1) & 1, (code >> 2) & 1];
        let (mut state, prob) = run_branch(p, &full, outcomes);
        if prob <= 1e-12 {
            continue;
        }
        let scale = 1.0 / prob.sqrt();
        for amp in &mut state {
            *amp *= scale;
        }
        // Branch operator: the same pipeline applied to each basis vector.
        let mut operator = vec![C64::new(0.0, 0.0); 64];
        for k in 0..8 {
            let mut basis = [C64::new(0.0, 0.0); 8];
            basis[k] = C64::new(1.0, 0.0);
            let (col, _) = run_branch(p, &basis, outcomes);
            for (r, &amp) in col.iter().enumerate() {
                operator[r * 8 + k] = amp;
            }
        }
        out.push(OutcomeBranch {
            outcomes,
            probability: prob,
            state,
            operator,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub outcomes: [u8; 3],
    pub probability: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub protocol: String,
    pub pass: bool,
    pub branches: Vec<BranchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<[u8; 3]>,
    pub max_error: f64,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// 4x4 complex matrix, row-major.
type Block = [C64; 16];

const ZERO_BLOCK: Block = [C64::new(0.0, 0.0); 16];

fn cnot_conjugate(i: usize, j: usize) -> Block {
    // CNOT |c t> -> |c, t ^ c>.
    let u = |k: usize| -> usize {
        let c = k >> 1;
        let t = k & 1;
        (c << 1) | (t ^ c)
    };
    let mut block = ZERO_BLOCK;
    block[u(i) * 4 + u(j)] = C64::new(1.0, 0.0);
    block
}

/// Reduced density on `(out0, out1)` from an unnormalized 3-wire pure state.
fn reduced_density(state: &[C64; 8], out: [Wire; 2], weight: f64) -> Block {
    let masks = [out[0].mask(), out[1].mask()];
    let traced: usize = 7 ^ (masks[0] | masks[1]);
    let mut block = ZERO_BLOCK;
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for x in [0usize, traced] {
                let ri = bit_index(r, masks) | x;
                let ci = bit_index(c, masks) | x;
                acc += state[ri] * state[ci].conj();
            }
            block[r * 4 + c] = acc * weight;
        }
    }
    block
}

fn bit_index(out_value: usize, masks: [usize; 2]) -> usize {
    let mut idx = 0;
    if out_value & 2 != 0 {
        idx |= masks[0];
    }
    if out_value & 1 != 0 {
        idx |= masks[1];
    }
    idx
}

/// The 28 pure states whose projectors span all matrix units |i><j|.
fn basis_inputs() -> Vec<(usize, usize, usize, [C64; 4])> {
    let one = C64::new(1.0, 0.0);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ih = C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let mut inputs = Vec::new();
    for i in 0..4 {
        let mut s = [C64::new(0.0, 0.0); 4];
        s[i] = one;
        inputs.push((i, i, 0, s));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            for (variant, (ai, aj)) in [(h, h), (h, -h), (h, ih), (h, -ih)].iter().enumerate() {
                let mut s = [C64::new(0.0, 0.0); 4];
                s[i] = *ai;
                s[j] = *aj;
                inputs.push((i, j, variant, s));
            }
        }
    }
    inputs
}

/// Certifies that every outcome branch of `p`, after corrections, acts as
/// the ideal CNOT with the output read from the protocol's output wires.
///
/// The channel of each branch is reconstructed on a complete operator basis
/// of two-qubit inputs by running `simulate_branches` on pure states and
/// polarizing; each branch block must match the branch probability times the
/// ideal block entrywise within 1e-9, and the branch probabilities must sum
/// to one. Failure is reported, not an error.
pub fn verify_protocol(p: &ProtocolSpec) -> Result<VerificationReport> {
    let prep = p.prep.state();
    let inputs = basis_inputs();

    // blocks[branch][(i, j)] accumulated per matrix unit.
    let mut unit_blocks: Vec<[[Block; 4]; 4]> = vec![[[ZERO_BLOCK; 4]; 4]; 8];
    let mut probs = [0.0f64; 8];
    let mut seen = [false; 8];

    // Per (i, j) pair we need the four projector outputs before combining.
    let mut pair_outputs: std::collections::HashMap<(usize, usize, usize), Vec<[Block; 8]>> =
        std::collections::HashMap::new();

    for (i, j, variant, state) in &inputs {
        let branches = simulate_branches(p, state, &prep)?;
        let mut per_branch = [ZERO_BLOCK; 8];
        for b in &branches {
            let code = (b.outcomes[0] + 2 * b.outcomes[1] + 4 * b.outcomes[2]) as usize;
            seen[code] = true;
            per_branch[code] = reduced_density(&b.state, p.output_wires, b.probability);
        }
        if i == j {
            for code in 0..8 {
                unit_blocks[code][*i][*i] = per_branch[code];
                probs[code] += trace(&per_branch[code]).re / 4.0;
            }
        } else {
            pair_outputs
                .entry((*i, *j, *variant))
                .or_insert_with(Vec::new)
                .push(per_branch);
        }
    }

    // Polarization: |i><j| = ((P+ - P-) + i (P+i - P-i)) / 2.
    for i in 0..4 {
        for j in (i + 1)..4 {
            let get = |variant: usize| -> [Block; 8] {
                pair_outputs[&(i, j, variant)][0]
            };
            let (plus, minus, plus_i, minus_i) = (get(0), get(1), get(2), get(3));
            for code in 0..8 {
                let mut upper = ZERO_BLOCK;
                let mut lower = ZERO_BLOCK;
                for k in 0..16 {
                    let re_part = (plus[code][k] - minus[code][k]) * 0.5;
                    let im_part = (plus_i[code][k] - minus_i[code][k]) * 0.5;
                    upper[k] = re_part + C64::new(0.0, 1.0) * im_part;
                    lower[k] = re_part - C64::new(0.0, 1.0) * im_part;
                }
                unit_blocks[code][i][j] = upper;
                unit_blocks[code][j][i] = lower;
            }
        }
    }

    let mut branches = Vec::new();
    let mut first_failure = None;
    let mut max_error = 0.0f64;
    let mut total_prob = 0.0f64;
    for code in 0..8usize {
        let outcomes = [
            (code & 1) as u8,
            ((code >> 1) & 1) as u8,
            ((code >> 2) & 1) as u8,
        ];
        if !seen[code] {
            // A branch that never occurs on any input: flagged as a failure
            // (the ideal protocols have eight uniform branches).
            branches.push(BranchReport {
                outcomes,
                probability: 0.0,
                ok: false,
            });
            first_failure.get_or_insert(outcomes);
            continue;
        }
        let prob = probs[code];
        total_prob += prob;
        let mut err = (prob - 0.125).abs();
        for i in 0..4 {
            for j in 0..4 {
                let ideal = cnot_conjugate(i, j);
                for k in 0..16 {
                    let want = ideal[k] * prob;
                    err = err.max((unit_blocks[code][i][j][k] - want).norm());
                }
            }
        }
        max_error = max_error.max(err);
        let ok = err <= TOL;
        if !ok {
            first_failure.get_or_insert(outcomes);
        }
        branches.push(BranchReport {
            outcomes,
            probability: prob,
            ok,
        });
    }

    let pass = first_failure.is_none() && (total_prob - 1.0).abs() <= TOL;
    Ok(VerificationReport {
        protocol: p.kind.to_string(),
        pass,
        branches,
        first_failure,
        max_error,
    })
}

fn trace(block: &Block) -> C64 {
    (0..4).map(|i| block[i * 4 + i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis4(i: usize) -> [C64; 4] {
        let mut s = [C64::new(0.0, 0.0); 4];
        s[i] = C64::new(1.0, 0.0);
        s
    }

    #[test]
    fn standard_cnot_fixes_00() {
        let p = ProtocolSpec::standard_cnot();
        let branches = simulate_branches(&p, &basis4(0), &p.prep.state()).unwrap();
        assert_eq!(branches.len(), 8);
        for b in &branches {
            let rho = reduced_density(&b.state, [Wire::Control, Wire::Target], 1.0);
            assert!((rho[0].re - 1.0).abs() < 1e-9, "branch {:?}", b.outcomes);
        }
    }

    #[test]
    fn standard_cnot_flips_target_for_10() {
        let p = ProtocolSpec::standard_cnot();
        let branches = simulate_branches(&p, &basis4(2), &p.prep.state()).unwrap();
        for b in &branches {
            let rho = reduced_density(&b.state, [Wire::Control, Wire::Target], 1.0);
            // |11><11| is entry (3,3).
            assert!((rho[15].re - 1.0).abs() < 1e-9, "branch {:?}", b.outcomes);
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [
            ProtocolKind::StandardCnot,
            ProtocolKind::CnotTeleportTarget,
            ProtocolKind::CnotTeleportControl,
        ] {
            let p = ProtocolSpec::for_kind(kind);
            for _ in 0..100 {
                let mut state = [C64::new(0.0, 0.0); 4];
                let mut norm = 0.0;
                for amp in &mut state {
                    *amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    norm += amp.norm_sqr();
                }
                let scale = 1.0 / norm.sqrt();
                for amp in &mut state {
                    *amp *= scale;
                }
                let branches = simulate_branches(&p, &state, &p.prep.state()).unwrap();
                let total: f64 = branches.iter().map(|b| b.probability).sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_normalized_input_rejected() {
        let p = ProtocolSpec::standard_cnot();
        let s = [C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(
            simulate_branches(&p, &s, &p.prep.state()),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn all_three_protocols_verify() {
        for kind in [
            ProtocolKind::StandardCnot,
            ProtocolKind::CnotTeleportTarget,
            ProtocolKind::CnotTeleportControl,
        ] {
            let report = verify_protocol(&ProtocolSpec::for_kind(kind)).unwrap();
            assert!(report.pass, "{kind:?}: max_error = {}", report.max_error);
            assert_eq!(report.branches.len(), 8);
            for b in &report.branches {
                assert!(b.ok);
                assert!((b.probability - 0.125).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dropping_any_correction_breaks_verification() {
        for kind in [
            ProtocolKind::StandardCnot,
            ProtocolKind::CnotTeleportTarget,
            ProtocolKind::CnotTeleportControl,
        ] {
            let base = ProtocolSpec::for_kind(kind);
            for drop in 0..base.corrections.len() {
                let mut mutant = base.clone();
                mutant.corrections.remove(drop);
                let report = verify_protocol(&mutant).unwrap();
                assert!(
                    !report.pass,
                    "{kind:?} still passes without correction {drop}"
                );
                assert!(report.first_failure.is_some());
            }
        }
    }

    #[test]
    fn flipping_any_correction_axis_breaks_verification() {
        for kind in [
            ProtocolKind::StandardCnot,
            ProtocolKind::CnotTeleportTarget,
            ProtocolKind::CnotTeleportControl,
        ] {
            let base = ProtocolSpec::for_kind(kind);
            for flip in 0..base.corrections.len() {
                let mut mutant = base.clone();
                mutant.corrections[flip].pauli = match mutant.corrections[flip].pauli {
                    Pauli::X => Pauli::Z,
                    Pauli::Z => Pauli::X,
                };
                let report = verify_protocol(&mutant).unwrap();
                assert!(!report.pass, "{kind:?} survives axis flip {flip}");
            }
        }
    }

    #[test]
    fn teleport_output_lives_on_relocated_wire() {
        // For the control teleport, feeding |10> must leave |1> on the
        // ancilla wire and the flipped target |1> on the target wire.
        let p = ProtocolSpec::cnot_teleport_control();
        let branches = simulate_branches(&p, &basis4(2), &p.prep.state()).unwrap();
        for b in &branches {
            let rho = reduced_density(&b.state, [Wire::Ancilla, Wire::Target], 1.0);
            assert!((rho[15].re - 1.0).abs() < 1e-9, "branch {:?}", b.outcomes);
        }
    }

    #[test]
    fn report_json_shape() {
        let report = verify_protocol(&ProtocolSpec::standard_cnot()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["protocol"], "standard");
        assert_eq!(v["pass"], true);
        assert_eq!(v["branches"].as_array().unwrap().len(), 8);
        assert!(v["branches"][0]["outcomes"].is_array());
    }
}
