//! Shot-based energy estimation with measurement-basis rotations and
//! optional stochastic Pauli noise.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{run_circuit, Axis, Circuit, PauliMask, StateVector};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// Shot count used when none is given.
pub const DEFAULT_SHOTS: u64 = 8192;

/// How a circuit's loss is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EvalMode {
    /// Exact expectation from the statevector; one circuit call per evaluation.
    Exact,
    /// Finite-shot estimate; `noise` is the per-gate, per-qubit Pauli error probability.
    Sampled { shots: u64, noise: f64 },
}

impl EvalMode {
    pub fn validate(&self) -> Result<()> {
        if let EvalMode::Sampled { shots, noise } = *self {
            if shots == 0 {
                return Err(Error::invalid("shots must be at least 1"));
            }
            if !(0.0..=1.0).contains(&noise) {
                return Err(Error::invalid(format!(
                    "noise probability {noise} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Terms that share one measurement setting. `basis[q]` is the axis measured
/// on qubit `q`; `None` qubits are read in the computational basis and
/// ignored by every term of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    pub basis: Vec<Option<Axis>>,
    pub terms: Vec<usize>,
}

impl MeasurementGroup {
    fn accepts(&self, factors: &[(usize, Axis)]) -> bool {
        factors
            .iter()
            .all(|&(q, a)| self.basis[q].is_none_or(|b| b == a))
    }

    /// Rotations that map each measured axis onto Z: X via Ry(−π/2), Y via Rx(π/2).
    fn rotations(&self) -> Vec<(PauliMask, f64)> {
        self.basis
            .iter()
            .enumerate()
            .filter_map(|(q, a)| match a {
                Some(Axis::X) => Some((PauliMask::identity().with(q, Axis::Y), -FRAC_PI_2)),
                Some(Axis::Y) => Some((PauliMask::identity().with(q, Axis::X), FRAC_PI_2)),
                _ => None,
            })
            .collect()
    }
}

/// Partition the non-constant terms into measurement settings.
///
/// Terms are visited in order and join the first group whose per-qubit axis
/// assignment agrees with theirs on every qubit they touch; otherwise they
/// open a new group. The result depends only on the term order.
pub fn measurement_groups(h: &Hamiltonian) -> Vec<MeasurementGroup> {
    let mut groups: Vec<MeasurementGroup> = Vec::new();
    for (t, term) in h.terms().iter().enumerate() {
        if term.is_constant() {
            continue;
        }
        let idx = match groups.iter().position(|g| g.accepts(term.factors())) {
            Some(i) => i,
            None => {
                groups.push(MeasurementGroup {
                    basis: vec![None; h.num_qubits()],
                    terms: Vec::new(),
                });
                groups.len() - 1
            }
        };
        let g = &mut groups[idx];
        for &(q, a) in term.factors() {
            g.basis[q] = Some(a);
        }
        g.terms.push(t);
    }
    groups
}

/// Circuit executions needed for one loss evaluation.
pub fn circuit_call_count(mode: EvalMode, h: &Hamiltonian) -> u64 {
    match mode {
        EvalMode::Exact => 1,
        EvalMode::Sampled { .. } => measurement_groups(h).len() as u64,
    }
}

/// A shot-noise estimate together with its estimated standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledEstimate {
    pub energy: f64,
    pub std_error: f64,
}

fn cumulative(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn draw(cum: &[f64], rng: &mut dyn RngCore) -> usize {
    let total = *cum.last().expect("non-empty distribution");
    let u = rng.random::<f64>() * total;
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

// Pauli applied after a gate in one noisy trajectory.
struct Fault {
    after_gate: usize,
    error: PauliMask,
}

fn sample_faults(circuit: &Circuit, p: f64, rng: &mut dyn RngCore) -> Vec<Fault> {
    let mut faults = Vec::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        for q in gate.generator.qubits() {
            if rng.random_bool(p) {
                // Uniform over {I, X, Y, Z}.
                let pick = rng.random_range(0..4u8);
                if pick > 0 {
                    let axis = Axis::ALL[(pick - 1) as usize];
                    faults.push(Fault {
                        after_gate: i,
                        error: PauliMask::identity().with(q, axis),
                    });
                }
            }
        }
    }
    faults
}

fn run_with_faults(circuit: &Circuit, init: &StateVector, faults: &[Fault]) -> StateVector {
    let mut state = init.clone();
    let mut next = faults.iter().peekable();
    for (i, gate) in circuit.gates().iter().enumerate() {
        state.apply_rotation(gate.generator.mask(), gate.theta);
        while let Some(f) = next.next_if(|f| f.after_gate == i) {
            state.apply_pauli(f.error);
        }
    }
    state
}

/// Estimate `⟨H⟩` after `circuit` from `shots` measurements per setting.
///
/// Each measurement group is read out after its basis rotations. Every shot
/// yields `Σ_t w_t Π_{q∈t} (−1)^{b_q}` over the group's terms; the group mean
/// and its sample variance give the energy and standard error. With
/// `noise > 0` each shot runs its own trajectory: after every gate each
/// touched qubit suffers a uniformly drawn Pauli from {I, X, Y, Z} with
/// probability `noise`. Shots whose trajectory draws no non-identity fault
/// reuse the noiseless distribution.
pub fn estimate_energy_sampled(
    circuit: &Circuit,
    init: &StateVector,
    hamiltonian: &Hamiltonian,
    shots: u64,
    rng: &mut dyn RngCore,
    noise: f64,
) -> Result<SampledEstimate> {
    EvalMode::Sampled { shots, noise }.validate()?;
    if hamiltonian.num_qubits() != circuit.num_qubits() {
        return Err(Error::invalid(format!(
            "Hamiltonian has {} qubits but the circuit has {}",
            hamiltonian.num_qubits(),
            circuit.num_qubits()
        )));
    }
    let clean = run_circuit(circuit, init)?;
    let terms = hamiltonian.terms();

    let mut energy: f64 = terms
        .iter()
        .filter(|t| t.is_constant())
        .map(|t| t.weight())
        .sum();
    let mut variance = 0.0;

    for group in measurement_groups(hamiltonian) {
        let rotations = group.rotations();
        let rotate = |mut s: StateVector| {
            for &(mask, theta) in &rotations {
                s.apply_rotation(mask, theta);
            }
            s
        };
        let clean_cum = cumulative(&rotate(clean.clone()));
        let value = |bits: usize| -> f64 {
            group
                .terms
                .iter()
                .map(|&t| {
                    let support = terms[t].mask().support() as usize;
                    let parity = (bits & support).count_ones() % 2;
                    terms[t].weight() * if parity == 0 { 1.0 } else { -1.0 }
                })
                .sum()
        };

        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..shots {
            let faults = if noise > 0.0 {
                sample_faults(circuit, noise, rng)
            } else {
                Vec::new()
            };
            let bits = if faults.is_empty() {
                draw(&clean_cum, rng)
            } else {
                let noisy = rotate(run_with_faults(circuit, init, &faults));
                draw(&cumulative(&noisy), rng)
            };
            let v = value(bits);
            sum += v;
            sum_sq += v * v;
        }
        let m = shots as f64;
        let mean = sum / m;
        let var = if shots > 1 {
            ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
        } else {
            0.0
        };
        energy += mean;
        variance += var / m;
    }
    Ok(SampledEstimate {
        energy,
        std_error: variance.sqrt(),
    })
}
