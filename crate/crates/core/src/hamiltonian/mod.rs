//! Pauli-sum Hamiltonians, the benchmark constructors and spectrum oracles.

mod spectrum;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Axis, PauliMask, MAX_QUBITS};

pub use spectrum::{dense_matrix, diagonal_extremes, exact_extremes, DENSE_MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct PauliFactor {
    qubit: usize,
    axis: Axis,
}

/// Weighted tensor product of single-qubit Paulis. An empty factor list is
/// the constant (identity) term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPauliString", into = "RawPauliString")]
pub struct PauliString {
    weight: f64,
    factors: Vec<(usize, Axis)>,
    mask: PauliMask,
}

#[derive(Serialize, Deserialize)]
struct RawPauliString {
    weight: f64,
    paulis: Vec<PauliFactor>,
}

impl TryFrom<RawPauliString> for PauliString {
    type Error = Error;

    fn try_from(raw: RawPauliString) -> Result<Self> {
        PauliString::new(
            raw.weight,
            raw.paulis.into_iter().map(|p| (p.qubit, p.axis)),
        )
    }
}

impl From<PauliString> for RawPauliString {
    fn from(p: PauliString) -> Self {
        RawPauliString {
            weight: p.weight,
            paulis: p
                .factors
                .iter()
                .map(|&(qubit, axis)| PauliFactor { qubit, axis })
                .collect(),
        }
    }
}

impl PauliString {
    pub fn new(weight: f64, factors: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self> {
        if !weight.is_finite() {
            return Err(Error::invalid("term weight must be finite"));
        }
        let mut factors: Vec<(usize, Axis)> = factors.into_iter().collect();
        factors.sort_by_key(|&(q, _)| q);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(
                "a Pauli string names each qubit at most once",
            ));
        }
        if let Some(&(q, _)) = factors.last() {
            if q >= MAX_QUBITS {
                return Err(Error::invalid(format!("qubit index {q} out of range")));
            }
        }
        let mask = factors
            .iter()
            .fold(PauliMask::identity(), |m, &(q, a)| m.with(q, a));
        Ok(PauliString {
            weight,
            factors,
            mask,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Non-identity positions sorted by qubit.
    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn mask(&self) -> PauliMask {
        self.mask
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn axis_on(&self, qubit: usize) -> Option<Axis> {
        self.factors
            .iter()
            .find_map(|&(q, a)| (q == qubit).then_some(a))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.weight)?;
        if self.factors.is_empty() {
            return write!(f, "·I");
        }
        for (q, a) in &self.factors {
            write!(f, "·{a}{q}")?;
        }
        Ok(())
    }
}

/// A weighted sum of Pauli strings on `n` qubits. Terms with identical
/// factor lists are merged on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHamiltonian", into = "RawHamiltonian")]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<PauliString>,
}

#[derive(Serialize, Deserialize)]
struct RawHamiltonian {
    n: usize,
    terms: Vec<PauliString>,
}

impl TryFrom<RawHamiltonian> for Hamiltonian {
    type Error = Error;

    fn try_from(raw: RawHamiltonian) -> Result<Self> {
        Hamiltonian::new(raw.n, raw.terms)
    }
}

impl From<Hamiltonian> for RawHamiltonian {
    fn from(h: Hamiltonian) -> Self {
        RawHamiltonian {
            n: h.num_qubits,
            terms: h.terms,
        }
    }
}

impl Hamiltonian {
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("a Hamiltonian needs at least one qubit"));
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedSize {
                what: "Hamiltonian",
                qubits: num_qubits,
                limit: MAX_QUBITS,
            });
        }
        let mut merged: Vec<PauliString> = Vec::new();
        let mut index: BTreeMap<Vec<(usize, Axis)>, usize> = BTreeMap::new();
        for term in terms {
            if let Some(&(q, _)) = term.factors.last() {
                if q >= num_qubits {
                    return Err(Error::invalid(format!(
                        "term {term} acts on qubit {q} of a {num_qubits}-qubit system"
                    )));
                }
            }
            match index.get(&term.factors) {
                Some(&i) => merged[i].weight += term.weight,
                None => {
                    index.insert(term.factors.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        Ok(Hamiltonian {
            num_qubits,
            terms: merged,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// `Σ |w_t|`, an upper bound on `|⟨H⟩|`.
    pub fn weight_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.weight.abs()).sum()
    }

    /// True when every term is a product of Z's (or the identity).
    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.mask.is_diagonal())
    }

    /// Energy of the computational basis state `bits` for a diagonal
    /// Hamiltonian; off-diagonal terms contribute nothing.
    pub fn diagonal_energy(&self, bits: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.mask.is_diagonal())
            .map(|t| t.weight * t.mask.sign(bits))
            .sum()
    }

    pub fn axes_present(&self) -> Vec<Axis> {
        let mut seen: Vec<Axis> = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|&(_, a)| a))
            .collect();
        seen.sort();
        seen.dedup();
        seen
    }
}

/// `Σ_i σ^(axis)_i` with unit weights.
pub fn local_pauli_sum(n: usize, axis: Axis) -> Result<Hamiltonian> {
    let terms = (0..n)
        .map(|q| PauliString::new(1.0, [(q, axis)]))
        .collect::<Result<Vec<_>>>()?;
    Hamiltonian::new(n, terms)
}

/// Open-chain transverse-field Ising model `−J Σ Z_i Z_{i+1} − h Σ X_i`.
pub fn tfi(n: usize, coupling: f64, field: f64) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::invalid("the Ising chain needs at least two qubits"));
    }
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        terms.push(PauliString::new(
            -coupling,
            [(i, Axis::Z), (i + 1, Axis::Z)],
        )?);
    }
    for i in 0..n {
        terms.push(PauliString::new(-field, [(i, Axis::X)])?);
    }
    Hamiltonian::new(n, terms)
}

/// Sherrington–Kirkpatrick spin glass `Σ_{i<j} J_ij Z_i Z_j` with couplings
/// drawn uniformly from {−1, +1}, pairs visited in lexicographic order.
pub fn sk<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::invalid("the spin glass needs at least two qubits"));
    }
    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let coupling = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            terms.push(PauliString::new(coupling, [(i, Axis::Z), (j, Axis::Z)])?);
        }
    }
    Hamiltonian::new(n, terms)
}

/// An axis along which the product eigenstate has zero energy: one that no
/// term uses. Preference order is Y, X, Z.
pub fn neutral_initial_axis(h: &Hamiltonian) -> Result<Axis> {
    let present = h.axes_present();
    [Axis::Y, Axis::X, Axis::Z]
        .into_iter()
        .find(|a| !present.contains(a))
        .ok_or(Error::NoNeutralAxis)
}

/// Names of the benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkKind {
    LocalX,
    LocalZ,
    Tfi,
    Sk,
}

impl FromStr for BenchmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local-x" => Ok(BenchmarkKind::LocalX),
            "local-z" => Ok(BenchmarkKind::LocalZ),
            "tfi" => Ok(BenchmarkKind::Tfi),
            "sk" => Ok(BenchmarkKind::Sk),
            other => Err(Error::invalid(format!(
                "unknown Hamiltonian {other:?} (expected local-x, local-z, tfi or sk)"
            ))),
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchmarkKind::LocalX => "local-x",
            BenchmarkKind::LocalZ => "local-z",
            BenchmarkKind::Tfi => "tfi",
            BenchmarkKind::Sk => "sk",
        })
    }
}

/// Everything needed to rebuild a benchmark Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub kind: BenchmarkKind,
    pub num_qubits: usize,
    /// TFI coupling `J`.
    pub coupling: f64,
    /// TFI field `h`.
    pub field: f64,
    /// Seed of the SK coupling draw.
    pub instance_seed: u64,
}

impl HamiltonianSpec {
    pub fn new(kind: BenchmarkKind, num_qubits: usize) -> Self {
        HamiltonianSpec {
            kind,
            num_qubits,
            coupling: 1.0,
            field: 1.0,
            instance_seed: 0,
        }
    }

    pub fn with_instance_seed(mut self, seed: u64) -> Self {
        self.instance_seed = seed;
        self
    }

    pub fn build(&self) -> Result<Hamiltonian> {
        match self.kind {
            BenchmarkKind::LocalX => local_pauli_sum(self.num_qubits, Axis::X),
            BenchmarkKind::LocalZ => local_pauli_sum(self.num_qubits, Axis::Z),
            BenchmarkKind::Tfi => tfi(self.num_qubits, self.coupling, self.field),
            BenchmarkKind::Sk => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.instance_seed);
                sk(self.num_qubits, &mut rng)
            }
        }
    }
}
