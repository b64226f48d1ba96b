//! The (1+λ) elitist search over circuit architectures.
//!
//! Each generation draws λ independent mutations of the parent, scores them
//! and keeps the best one only if it is strictly better than the parent.
//! There is no crossover. Offspring randomness comes from per-offspring
//! sub-seeds drawn from the run's master generator, so evaluating offspring
//! in parallel yields the same log as evaluating them in order.

mod mutation;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{EnergyEvaluator, Evaluator};
use crate::hamiltonian::{neutral_initial_axis, HamiltonianSpec};
use crate::quantum::{Axis, Circuit, EvalMode, StateVector};
use crate::runlog::{GenerationRecord, OffspringRecord, RunConfig, RunLog, StopReason};

pub use mutation::{
    mutate, mutate_with, random_gate, ActionRecord, MutationAction, MutationChoices,
    MutationConfig, MutationOutcome, OutcomeLabel, RandomChoices,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub num_qubits: usize,
    /// Offspring per generation.
    pub lambda: usize,
    pub max_generations: usize,
    /// Stop after this many consecutive generations without improvement.
    pub stagnation_tau: Option<usize>,
    pub seed: u64,
    pub mode: EvalMode,
    pub hamiltonian: HamiltonianSpec,
    /// Overrides the neutral initial axis derived from the Hamiltonian.
    pub init_axis: Option<Axis>,
    pub mutation: MutationConfig,
}

impl EvolutionConfig {
    /// The (1+4) setup on `hamiltonian` with 150 generations in exact mode.
    pub fn new(hamiltonian: HamiltonianSpec, seed: u64) -> Self {
        EvolutionConfig {
            num_qubits: hamiltonian.num_qubits,
            lambda: 4,
            max_generations: 150,
            stagnation_tau: None,
            seed,
            mode: EvalMode::Exact,
            hamiltonian,
            init_axis: None,
            mutation: MutationConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::invalid("lambda must be at least 1"));
        }
        if self.max_generations == 0 {
            return Err(Error::invalid("max_generations must be at least 1"));
        }
        if self.stagnation_tau == Some(0) {
            return Err(Error::invalid("stagnation tau must be at least 1"));
        }
        if self.num_qubits != self.hamiltonian.num_qubits {
            return Err(Error::invalid(format!(
                "run has {} qubits but the Hamiltonian has {}",
                self.num_qubits, self.hamiltonian.num_qubits
            )));
        }
        self.mode.validate()?;
        self.mutation.validate()
    }

    /// Energy evaluator for this configuration, starting from the neutral
    /// (or overridden) product eigenstate.
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

/// Result of one generation.
#[derive(Debug, Clone)]
pub struct GenerationStep {
    pub parent: Circuit,
    pub parent_energy: f64,
    pub record: GenerationRecord,
}

/// One generation: λ mutations, strict-improvement selection, lowest index on ties.
///
/// `parent_energy` is trusted as the parent's loss and never recomputed.
/// `calls_before` is the cumulative circuit-call count before this generation.
#[allow(clippy::too_many_arguments)]
pub fn evolve_generation<E: Evaluator + ?Sized>(
    generation: usize,
    parent: &Circuit,
    parent_energy: f64,
    lambda: usize,
    mutation: &MutationConfig,
    evaluator: &E,
    rng: &mut ChaCha8Rng,
    calls_before: u64,
) -> Result<GenerationStep> {
    let seeds: Vec<u64> = (0..lambda).map(|_| rng.next_u64()).collect();
    let offspring: Vec<Result<(Circuit, MutationOutcome, f64)>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let mut child_rng = ChaCha8Rng::seed_from_u64(seed);
            let (child, outcome) = mutate(parent, mutation, &mut child_rng);
            let energy =
                evaluator
                    .evaluate(&child, &mut child_rng)
                    .map_err(|e| Error::Evaluation {
                        offspring: i,
                        source: Box::new(e),
                    })?;
            Ok((child, outcome, energy))
        })
        .collect();
    let offspring = offspring.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best: Option<usize> = None;
    for (i, (_, _, e)) in offspring.iter().enumerate() {
        if best.is_none_or(|b| *e < offspring[b].2) {
            best = Some(i);
        }
    }
    let best = best.expect("lambda ≥ 1");
    let best_energy = offspring[best].2;
    let accepted = best_energy < parent_energy;

    let summaries = offspring
        .iter()
        .map(|(_, o, e)| OffspringRecord {
            label: o.label(),
            gate_kind: o.gate_kind().to_string(),
            energy: *e,
        })
        .collect();
    let calls = calls_before + lambda as u64 * evaluator.calls_per_evaluation();

    let (next, next_energy, outcome) = if accepted {
        let (c, o, e) = offspring.into_iter().nth(best).expect("best index");
        (c, e, Some(o))
    } else {
        (parent.clone(), parent_energy, None)
    };
    let record = GenerationRecord {
        generation,
        parent_energy,
        best_offspring_energy: best_energy,
        accepted,
        outcome,
        parent_gate_count: next.len(),
        cumulative_calls: calls,
        offspring: summaries,
    };
    Ok(GenerationStep {
        parent: next,
        parent_energy: next_energy,
        record,
    })
}

/// Run the search from a single random gate until the generation budget is
/// spent or, with `stagnation_tau` set, until that many generations pass
/// without improvement.
pub fn run_evolution<E: Evaluator + ?Sized>(
    cfg: &EvolutionConfig,
    evaluator: &E,
) -> Result<RunLog> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let first = random_gate(
        cfg.num_qubits,
        &mut rng,
        cfg.mutation.theta_range,
        cfg.mutation.pair_probability,
    );
    let mut parent = Circuit::new(cfg.num_qubits, vec![first])?;
    let mut eval_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
    let mut parent_energy = evaluator.evaluate(&parent, &mut eval_rng)?;
    let initial_energy = parent_energy;
    let initial_calls = evaluator.calls_per_evaluation();

    let mut calls = initial_calls;
    let mut records = Vec::with_capacity(cfg.max_generations);
    let mut idle = 0;
    let mut stopped_by = StopReason::MaxGenerations;
    for generation in 1..=cfg.max_generations {
        let step = evolve_generation(
            generation,
            &parent,
            parent_energy,
            cfg.lambda,
            &cfg.mutation,
            evaluator,
            &mut rng,
            calls,
        )?;
        calls = step.record.cumulative_calls;
        idle = if step.record.accepted { 0 } else { idle + 1 };
        parent = step.parent;
        parent_energy = step.parent_energy;
        records.push(step.record);
        if cfg.stagnation_tau.is_some_and(|tau| idle >= tau) {
            stopped_by = StopReason::Stagnation;
            break;
        }
    }

    Ok(RunLog::new(
        RunConfig::Evolution(cfg.clone()),
        initial_energy,
        initial_calls,
        records,
        parent,
        parent_energy,
        stopped_by,
    ))
}
