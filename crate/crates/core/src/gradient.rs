//! Fixed-ansatz baseline trained by parameter-shift gradient descent.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{EnergyEvaluator, Evaluator};
use crate::hamiltonian::{neutral_initial_axis, HamiltonianSpec};
use crate::quantum::{Axis, Circuit, EvalMode, Gate, PauliGenerator, StateVector};
use crate::runlog::{GenerationRecord, RunConfig, RunLog, StopReason};

/// Fewest layers giving at least 150 parameters on eight qubits (161).
pub const DEFAULT_LAYERS: usize = 7;

/// Layers of `Ry, Rz` on every qubit followed by `Rzz` on each adjacent pair.
/// Parameter `k` drives gate `k` of [`LayeredAnsatz::circuit`].
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredAnsatz {
    num_qubits: usize,
    num_layers: usize,
    generators: Vec<PauliGenerator>,
}

impl LayeredAnsatz {
    pub fn new(num_qubits: usize, num_layers: usize) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::invalid(
                "the layered ansatz needs at least two qubits",
            ));
        }
        if num_layers == 0 {
            return Err(Error::invalid(
                "the layered ansatz needs at least one layer",
            ));
        }
        let mut generators = Vec::with_capacity(num_layers * (3 * num_qubits - 1));
        for _ in 0..num_layers {
            for q in 0..num_qubits {
                generators.push(PauliGenerator::single(Axis::Y, q));
                generators.push(PauliGenerator::single(Axis::Z, q));
            }
            for q in 0..num_qubits - 1 {
                generators.push(PauliGenerator::pair(Axis::Z, q, q + 1)?);
            }
        }
        Ok(LayeredAnsatz {
            num_qubits,
            num_layers,
            generators,
        })
    }

    /// Fewest layers giving at least `min_params` parameters.
    pub fn layers_for(num_qubits: usize, min_params: usize) -> usize {
        let per_layer = (3 * num_qubits).saturating_sub(1).max(1);
        min_params.div_ceil(per_layer).max(1)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn num_parameters(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliGenerator] {
        &self.generators
    }

    /// Angles drawn uniformly from `[0, 2π)`.
    pub fn random_parameters<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.num_parameters())
            .map(|_| rng.random_range(0.0..TAU))
            .collect()
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.num_parameters() {
            return Err(Error::invalid(format!(
                "ansatz takes {} parameters, got {}",
                self.num_parameters(),
                params.len()
            )));
        }
        let gates = self
            .generators
            .iter()
            .zip(params)
            .map(|(&g, &t)| Gate::new(g, t))
            .collect();
        Circuit::new(self.num_qubits, gates)
    }
}

/// Parameter-shift gradient `[f(θ + π/2·e_k) − f(θ − π/2·e_k)] / 2`, exact for
/// Pauli-rotation gates. Costs two evaluations per parameter. In sampled
/// mode shot noise for evaluation `2k` (plus) and `2k+1` (minus) is drawn
/// from sub-seeds of `seed`, so the result does not depend on thread count.
pub fn parameter_shift_gradient<E: Evaluator + ?Sized>(
    ansatz: &LayeredAnsatz,
    params: &[f64],
    evaluator: &E,
    seed: u64,
) -> Result<Vec<f64>> {
    let base = ansatz.circuit(params)?;
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(u64, u64)> = (0..params.len())
        .map(|_| (seeder.next_u64(), seeder.next_u64()))
        .collect();
    seeds
        .par_iter()
        .enumerate()
        .map(|(k, &(s_plus, s_minus))| {
            let shifted = |delta: f64, s: u64| -> Result<f64> {
                let mut c = base.clone();
                *c.theta_mut(k).expect("parameter index") += delta;
                evaluator.evaluate(&c, &mut ChaCha8Rng::seed_from_u64(s))
            };
            Ok((shifted(FRAC_PI_2, s_plus)? - shifted(-FRAC_PI_2, s_minus)?) / 2.0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientConfig {
    pub num_qubits: usize,
    pub num_layers: usize,
    /// Learning rate.
    pub eta: f64,
    pub steps: usize,
    pub seed: u64,
    pub mode: EvalMode,
    pub hamiltonian: HamiltonianSpec,
    pub init_axis: Option<Axis>,
}

impl GradientConfig {
    /// η = 0.1 and [`DEFAULT_LAYERS`] layers.
    pub fn new(hamiltonian: HamiltonianSpec, seed: u64) -> Self {
        GradientConfig {
            num_qubits: hamiltonian.num_qubits,
            num_layers: DEFAULT_LAYERS,
            eta: 0.1,
            steps: 100,
            seed,
            mode: EvalMode::Exact,
            hamiltonian,
            init_axis: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(
                "learning rate must be finite and non-negative",
            ));
        }
        if self.num_qubits != self.hamiltonian.num_qubits {
            return Err(Error::invalid("ansatz and Hamiltonian sizes differ"));
        }
        self.mode.validate()?;
        LayeredAnsatz::new(self.num_qubits, self.num_layers).map(|_| ())
    }

    pub fn evaluator(&self) -> Result<EnergyEvaluator> {
        let h = self.hamiltonian.build()?;
        let axis = match self.init_axis {
            Some(a) => a,
            None => neutral_initial_axis(&h)?,
        };
        let init = StateVector::product(self.num_qubits, axis, 1)?;
        EnergyEvaluator::new(h, init, self.mode)
    }
}

/// Plain gradient descent `θ ← θ − η·∇f`.
///
/// The energy is evaluated once up front and after every step; each of those
/// evaluations is charged, as are the `2P` shifted evaluations per step.
pub fn gradient_descent_run<E: Evaluator + ?Sized>(
    cfg: &GradientConfig,
    evaluator: &E,
) -> Result<RunLog> {
    cfg.validate()?;
    let ansatz = LayeredAnsatz::new(cfg.num_qubits, cfg.num_layers)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ansatz.random_parameters(&mut rng);
    let per_eval = evaluator.calls_per_evaluation();
    let per_step = 2 * ansatz.num_parameters() as u64 * per_eval;

    let mut eval_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
    let initial_energy = evaluator.evaluate(&ansatz.circuit(&params)?, &mut eval_rng)?;
    let mut calls = per_eval;
    let mut best = initial_energy;
    let mut energy = initial_energy;
    let mut records = Vec::with_capacity(cfg.steps);

    for step in 1..=cfg.steps {
        let grad = parameter_shift_gradient(&ansatz, &params, evaluator, rng.next_u64())?;
        params
            .iter_mut()
            .zip(&grad)
            .for_each(|(p, g)| *p -= cfg.eta * g);
        energy = evaluator.evaluate(&ansatz.circuit(&params)?, &mut eval_rng)?;
        calls += per_step + per_eval;
        let accepted = energy < best;
        records.push(GenerationRecord {
            generation: step,
            parent_energy: best,
            best_offspring_energy: energy,
            accepted,
            outcome: None,
            parent_gate_count: ansatz.num_parameters(),
            cumulative_calls: calls,
            offspring: Vec::new(),
        });
        best = best.min(energy);
    }

    Ok(RunLog::new(
        RunConfig::Gradient(cfg.clone()),
        initial_energy,
        per_eval,
        records,
        ansatz.circuit(&params)?,
        energy,
        StopReason::Steps,
    ))
}
