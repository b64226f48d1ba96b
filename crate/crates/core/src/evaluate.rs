//! Loss evaluation shared by the evolutionary search and the gradient baseline.

use rand::RngCore;

use crate::error::Result;
use crate::hamiltonian::Hamiltonian;
use crate::quantum::{
    circuit_call_count, estimate_energy_sampled, expectation, run_circuit, Circuit, EvalMode,
    StateVector,
};

/// Maps a circuit to a loss value. Implementations must be usable from
/// several threads at once; any randomness comes from the supplied `rng`.
pub trait Evaluator: Sync {
    fn evaluate(&self, circuit: &Circuit, rng: &mut dyn RngCore) -> Result<f64>;

    /// Circuit executions charged per call to [`Evaluator::evaluate`].
    fn calls_per_evaluation(&self) -> u64;
}

/// Energy of `hamiltonian` after running a circuit on a fixed initial state.
#[derive(Debug, Clone)]
pub struct EnergyEvaluator {
    hamiltonian: Hamiltonian,
    init: StateVector,
    mode: EvalMode,
    calls: u64,
}

impl EnergyEvaluator {
    pub fn new(hamiltonian: Hamiltonian, init: StateVector, mode: EvalMode) -> Result<Self> {
        mode.validate()?;
        if hamiltonian.num_qubits() != init.num_qubits() {
            return Err(crate::Error::invalid(format!(
                "Hamiltonian has {} qubits but the initial state has {}",
                hamiltonian.num_qubits(),
                init.num_qubits()
            )));
        }
        let calls = circuit_call_count(mode, &hamiltonian);
        Ok(EnergyEvaluator {
            hamiltonian,
            init,
            mode,
            calls,
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.init
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }
}

impl Evaluator for EnergyEvaluator {
    fn evaluate(&self, circuit: &Circuit, rng: &mut dyn RngCore) -> Result<f64> {
        match self.mode {
            EvalMode::Exact => expectation(&run_circuit(circuit, &self.init)?, &self.hamiltonian),
            EvalMode::Sampled { shots, noise } => {
                estimate_energy_sampled(circuit, &self.init, &self.hamiltonian, shots, rng, noise)
                    .map(|e| e.energy)
            }
        }
    }

    fn calls_per_evaluation(&self) -> u64 {
        self.calls
    }
}
