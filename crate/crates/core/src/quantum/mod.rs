//! Pauli-rotation circuits and their exact statevector simulation.
//!
//! Every gate is `exp(-i θ/2 P)` for a Pauli generator `P` that is either a
//! single-qubit Pauli or a same-axis product on two distinct qubits. Qubit 0
//! is the least-significant bit of a basis-state index.

mod pauli;
mod sampling;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use pauli::PauliMask;
pub use sampling::{
    circuit_call_count, estimate_energy_sampled, measurement_groups, EvalMode, MeasurementGroup,
    SampledEstimate, DEFAULT_SHOTS,
};
pub use state::{expectation, run_circuit, StateVector, MAX_QUBITS};

/// A Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char().to_ascii_uppercase())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::invalid(format!("unknown axis {other:?}"))),
        }
    }
}

/// Rotation generator: a single-qubit Pauli or a same-axis two-qubit product.
///
/// Pairs are unordered and stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGenerator", into = "RawGenerator")]
pub struct PauliGenerator {
    axis: Axis,
    first: usize,
    second: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawGenerator {
    axis: Axis,
    qubits: Vec<usize>,
}

impl TryFrom<RawGenerator> for PauliGenerator {
    type Error = Error;

    fn try_from(raw: RawGenerator) -> Result<Self> {
        match raw.qubits.as_slice() {
            &[q] => Ok(PauliGenerator::single(raw.axis, q)),
            &[a, b] => PauliGenerator::pair(raw.axis, a, b),
            other => Err(Error::invalid(format!(
                "a generator acts on one or two qubits, got {}",
                other.len()
            ))),
        }
    }
}

impl From<PauliGenerator> for RawGenerator {
    fn from(g: PauliGenerator) -> Self {
        RawGenerator {
            axis: g.axis,
            qubits: g.qubits().collect(),
        }
    }
}

impl PauliGenerator {
    pub fn single(axis: Axis, qubit: usize) -> Self {
        PauliGenerator {
            axis,
            first: qubit,
            second: None,
        }
    }

    pub fn pair(axis: Axis, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::invalid(format!(
                "two-qubit generator needs distinct qubits, got ({a}, {b})"
            )));
        }
        Ok(PauliGenerator {
            axis,
            first: a.min(b),
            second: Some(a.max(b)),
        })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn arity(&self) -> usize {
        1 + self.second.is_some() as usize
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.first).chain(self.second)
    }

    pub fn max_qubit(&self) -> usize {
        self.second.unwrap_or(self.first)
    }

    /// Number of generators available on `n` qubits: `3n` single-qubit ones
    /// plus three axes for each unordered pair.
    pub fn count(n: usize) -> usize {
        3 * n + 3 * n * n.saturating_sub(1) / 2
    }

    /// The generator at `index` in the canonical enumeration: single-qubit
    /// generators first (qubit-major, axes X, Y, Z), then pairs `(i, j)` with
    /// `i < j` in lexicographic order, again with axes X, Y, Z.
    pub fn from_index(n: usize, index: usize) -> Option<Self> {
        if index >= Self::count(n) {
            return None;
        }
        let axis = Axis::ALL[index % 3];
        let slot = index / 3;
        if slot < n {
            return Some(PauliGenerator::single(axis, slot));
        }
        let mut rest = slot - n;
        for i in 0..n {
            let row = n - 1 - i;
            if rest < row {
                return Some(PauliGenerator {
                    axis,
                    first: i,
                    second: Some(i + 1 + rest),
                });
            }
            rest -= row;
        }
        None
    }

    /// All generators on `n` qubits in canonical order.
    pub fn all(n: usize) -> Vec<Self> {
        (0..Self::count(n))
            .map(|i| Self::from_index(n, i).expect("index in range"))
            .collect()
    }

    pub fn single_count(n: usize) -> usize {
        3 * n
    }

    /// Short descriptor used in statistics, e.g. `rz` or `ryy`.
    pub fn kind(&self) -> String {
        let c = self.axis.as_char();
        if self.second.is_some() {
            format!("r{c}{c}")
        } else {
            format!("r{c}")
        }
    }

    pub fn mask(&self) -> PauliMask {
        self.qubits()
            .fold(PauliMask::identity(), |m, q| m.with(q, self.axis))
    }

    pub(crate) fn check(&self, num_qubits: usize) -> Result<()> {
        if self.max_qubit() >= num_qubits {
            return Err(Error::invalid(format!(
                "generator on qubit {} does not fit a {num_qubits}-qubit register",
                self.max_qubit()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PauliGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            None => write!(f, "{}{}", self.axis, self.first),
            Some(s) => write!(f, "{a}{}{a}{}", self.first, s, a = self.axis),
        }
    }
}

/// A rotation gate `exp(-i θ/2 P)`.
///
/// `theta` is kept unreduced so that repeated nudges accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub generator: PauliGenerator,
    pub theta: f64,
}

impl Gate {
    pub fn new(generator: PauliGenerator, theta: f64) -> Self {
        Gate { generator, theta }
    }

    pub fn kind(&self) -> String {
        self.generator.kind()
    }
}

/// Ordered gate sequence on a fixed register; gate 0 is applied first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
struct RawCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        Circuit::new(raw.num_qubits, raw.gates)
    }
}

impl Circuit {
    pub fn empty(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("a circuit needs at least one qubit"));
        }
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::empty(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.insert(self.gates.len(), gate)
    }

    pub fn insert(&mut self, position: usize, gate: Gate) -> Result<()> {
        gate.generator.check(self.num_qubits)?;
        if !gate.theta.is_finite() {
            return Err(Error::invalid("gate angle must be finite"));
        }
        if position > self.gates.len() {
            return Err(Error::invalid(format!(
                "insert position {position} beyond circuit length {}",
                self.gates.len()
            )));
        }
        self.gates.insert(position, gate);
        Ok(())
    }

    pub fn remove(&mut self, position: usize) -> Option<Gate> {
        (position < self.gates.len()).then(|| self.gates.remove(position))
    }

    /// Mutable access to a gate's angle; the generator is fixed once placed.
    pub fn theta_mut(&mut self, position: usize) -> Option<&mut f64> {
        self.gates.get_mut(position).map(|g| &mut g.theta)
    }

    /// Replace the gate at `position`, returning the old one.
    pub fn replace(&mut self, position: usize, gate: Gate) -> Result<Gate> {
        gate.generator.check(self.num_qubits)?;
        let slot = self
            .gates
            .get_mut(position)
            .ok_or_else(|| Error::invalid(format!("no gate at position {position}")))?;
        Ok(std::mem::replace(slot, gate))
    }
}
