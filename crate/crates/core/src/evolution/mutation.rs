//! The multi-level mutation operator.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Circuit, Gate, PauliGenerator};

/// Probabilities and step sizes of the mutation operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub p_insert: f64,
    pub p_delete: f64,
    pub p_swap: f64,
    pub p_modify: f64,
    /// Chance of drawing another action after each one.
    pub p_repeat: f64,
    /// Standard deviation of the angle nudge applied by MODIFY.
    pub modify_sigma: f64,
    /// Half-open interval new angles are drawn from.
    pub theta_range: (f64, f64),
    /// When set, a new generator is a two-qubit one with this probability and
    /// uniform within its class; otherwise all generators are pooled uniformly.
    pub pair_probability: Option<f64>,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            p_insert: 0.5,
            p_delete: 0.1,
            p_swap: 0.1,
            p_modify: 0.3,
            p_repeat: 0.1,
            modify_sigma: 0.1,
            theta_range: (0.0, TAU),
            pair_probability: None,
        }
    }
}

impl MutationConfig {
    pub fn with_action_probabilities(mut self, probs: [f64; 4]) -> Self {
        [self.p_insert, self.p_delete, self.p_swap, self.p_modify] = probs;
        self
    }

    pub fn action_probabilities(&self) -> [f64; 4] {
        [self.p_insert, self.p_delete, self.p_swap, self.p_modify]
    }

    pub fn validate(&self) -> Result<()> {
        let probs = self.action_probabilities();
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid(format!(
                "action probabilities {probs:?} must lie in [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "action probabilities {probs:?} sum to {sum}, not 1"
            )));
        }
        if !(0.0..1.0).contains(&self.p_repeat) {
            return Err(Error::invalid("repeat probability must lie in [0, 1)"));
        }
        if !(self.modify_sigma > 0.0 && self.modify_sigma.is_finite()) {
            return Err(Error::invalid("modify sigma must be positive"));
        }
        let (lo, hi) = self.theta_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(
                "theta range must be a finite, non-empty interval",
            ));
        }
        if let Some(p) = self.pair_probability {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("pair probability must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationAction {
    Insert,
    Delete,
    Swap,
    Modify,
}

impl MutationAction {
    pub const ALL: [MutationAction; 4] = [
        MutationAction::Insert,
        MutationAction::Delete,
        MutationAction::Swap,
        MutationAction::Modify,
    ];
}

/// Label of a whole mutation: its only action, or `Multiple`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeLabel {
    Insert,
    Delete,
    Swap,
    Modify,
    Multiple,
}

impl OutcomeLabel {
    pub const ALL: [OutcomeLabel; 5] = [
        OutcomeLabel::Insert,
        OutcomeLabel::Delete,
        OutcomeLabel::Swap,
        OutcomeLabel::Modify,
        OutcomeLabel::Multiple,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeLabel::Insert => "insert",
            OutcomeLabel::Delete => "delete",
            OutcomeLabel::Swap => "swap",
            OutcomeLabel::Modify => "modify",
            OutcomeLabel::Multiple => "multiple",
        }
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<MutationAction> for OutcomeLabel {
    fn from(a: MutationAction) -> Self {
        match a {
            MutationAction::Insert => OutcomeLabel::Insert,
            MutationAction::Delete => OutcomeLabel::Delete,
            MutationAction::Swap => OutcomeLabel::Swap,
            MutationAction::Modify => OutcomeLabel::Modify,
        }
    }
}

/// One applied action. `gate_kind` names the inserted gate for INSERT and
/// SWAP, and the affected gate for DELETE and MODIFY.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub action: MutationAction,
    pub position: usize,
    pub gate_kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawOutcome")]
pub struct MutationOutcome {
    actions: Vec<ActionRecord>,
    label: OutcomeLabel,
}

#[derive(Deserialize)]
struct RawOutcome {
    actions: Vec<ActionRecord>,
}

impl TryFrom<RawOutcome> for MutationOutcome {
    type Error = Error;

    fn try_from(raw: RawOutcome) -> Result<Self> {
        MutationOutcome::new(raw.actions)
    }
}

impl MutationOutcome {
    pub fn new(actions: Vec<ActionRecord>) -> Result<Self> {
        let label = match actions.as_slice() {
            [] => return Err(Error::invalid("a mutation applies at least one action")),
            [only] => only.action.into(),
            _ => OutcomeLabel::Multiple,
        };
        Ok(MutationOutcome { actions, label })
    }

    pub fn actions(&self) -> &[ActionRecord] {
        &self.actions
    }

    pub fn label(&self) -> OutcomeLabel {
        self.label
    }

    /// Gate kind credited in statistics: that of the first action.
    pub fn gate_kind(&self) -> &str {
        &self.actions[0].gate_kind
    }
}

/// Source of the random decisions made while mutating. The default
/// implementation draws them from an RNG; tests can script them.
pub trait MutationChoices {
    fn action(&mut self) -> MutationAction;
    /// Uniform index in `0..len` (`len ≥ 1`).
    fn index(&mut self, len: usize) -> usize;
    fn gate(&mut self, num_qubits: usize) -> Gate;
    fn nudge(&mut self) -> f64;
    /// Whether to draw one more action.
    fn again(&mut self) -> bool;
}

/// Draws a generator uniformly from all `3n + 3·n(n−1)/2` generators (or by
/// class when `pair_probability` is set) and an angle uniformly from `theta_range`.
pub fn random_gate<R: Rng + ?Sized>(
    num_qubits: usize,
    rng: &mut R,
    theta_range: (f64, f64),
    pair_probability: Option<f64>,
) -> Gate {
    let total = PauliGenerator::count(num_qubits);
    let singles = PauliGenerator::single_count(num_qubits);
    let index = match pair_probability {
        Some(p) if total > singles => {
            if rng.random_bool(p) {
                rng.random_range(singles..total)
            } else {
                rng.random_range(0..singles)
            }
        }
        _ => rng.random_range(0..total),
    };
    let generator = PauliGenerator::from_index(num_qubits, index).expect("index within range");
    let theta = rng.random_range(theta_range.0..theta_range.1);
    Gate::new(generator, theta)
}

/// [`MutationChoices`] backed by a random number generator.
pub struct RandomChoices<'a, R: Rng + ?Sized> {
    cfg: &'a MutationConfig,
    nudge: Normal<f64>,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> RandomChoices<'a, R> {
    pub fn new(cfg: &'a MutationConfig, rng: &'a mut R) -> Self {
        let nudge = Normal::new(0.0, cfg.modify_sigma).expect("validated sigma");
        RandomChoices { cfg, nudge, rng }
    }
}

impl<R: Rng + ?Sized> MutationChoices for RandomChoices<'_, R> {
    fn action(&mut self) -> MutationAction {
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        for (action, p) in MutationAction::ALL
            .iter()
            .zip(self.cfg.action_probabilities())
        {
            acc += p;
            if u < acc {
                return *action;
            }
        }
        // Rounding in the cumulative sum: fall back to the last action with mass.
        MutationAction::ALL
            .iter()
            .zip(self.cfg.action_probabilities())
            .rev()
            .find(|(_, p)| *p > 0.0)
            .map(|(a, _)| *a)
            .unwrap_or(MutationAction::Insert)
    }

    fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }

    fn gate(&mut self, num_qubits: usize) -> Gate {
        random_gate(
            num_qubits,
            self.rng,
            self.cfg.theta_range,
            self.cfg.pair_probability,
        )
    }

    fn nudge(&mut self) -> f64 {
        self.nudge.sample(self.rng)
    }

    fn again(&mut self) -> bool {
        self.rng.random_bool(self.cfg.p_repeat)
    }
}

/// Mutate a copy of `circuit` with decisions drawn from `rng`.
pub fn mutate<R: Rng + ?Sized>(
    circuit: &Circuit,
    cfg: &MutationConfig,
    rng: &mut R,
) -> (Circuit, MutationOutcome) {
    mutate_with(circuit, &mut RandomChoices::new(cfg, rng))
}

/// Apply actions until [`MutationChoices::again`] says stop. DELETE, SWAP and
/// MODIFY on an empty circuit fall back to INSERT and are recorded as such.
pub fn mutate_with<C: MutationChoices + ?Sized>(
    circuit: &Circuit,
    choices: &mut C,
) -> (Circuit, MutationOutcome) {
    let n = circuit.num_qubits();
    let mut child = circuit.clone();
    let mut actions = Vec::new();
    loop {
        let mut action = choices.action();
        if child.is_empty() {
            action = MutationAction::Insert;
        }
        let record = match action {
            MutationAction::Insert => {
                let position = choices.index(child.len() + 1);
                let gate = choices.gate(n);
                child
                    .insert(position, gate)
                    .expect("generated gate fits the register");
                ActionRecord {
                    action,
                    position,
                    gate_kind: gate.kind(),
                }
            }
            MutationAction::Delete => {
                let position = choices.index(child.len());
                let removed = child.remove(position).expect("position within circuit");
                ActionRecord {
                    action,
                    position,
                    gate_kind: removed.kind(),
                }
            }
            MutationAction::Swap => {
                let position = choices.index(child.len());
                let gate = choices.gate(n);
                child
                    .replace(position, gate)
                    .expect("generated gate fits the register");
                ActionRecord {
                    action,
                    position,
                    gate_kind: gate.kind(),
                }
            }
            MutationAction::Modify => {
                let position = choices.index(child.len());
                let eps = choices.nudge();
                let kind = child.gates()[position].kind();
                *child.theta_mut(position).expect("position within circuit") += eps;
                ActionRecord {
                    action,
                    position,
                    gate_kind: kind,
                }
            }
        };
        actions.push(record);
        if !choices.again() {
            break;
        }
    }
    let outcome = MutationOutcome::new(actions).expect("at least one action");
    (child, outcome)
}
