use num_complex::Complex64;

use super::{Axis, Circuit, Gate, PauliMask};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// Largest register the simulator accepts (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Dense pure state over `num_qubits` qubits. Qubit 0 is the least-significant
/// bit of the amplitude index. Global phase is carried along untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("state needs at least one qubit"));
    }
    if n > MAX_QUBITS {
        return Err(Error::UnsupportedSize {
            what: "statevector simulation",
            qubits: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Single-qubit eigenstate of `axis` with eigenvalue `sign` as (⟨0|, ⟨1|) amplitudes.
pub(crate) fn axis_eigenstate(axis: Axis, positive: bool) -> (Complex64, Complex64) {
    let h = FRAC_1_SQRT_2;
    let s = if positive { 1.0 } else { -1.0 };
    match axis {
        Axis::Z if positive => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        Axis::Z => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        Axis::X => (Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)),
        Axis::Y => (Complex64::new(h, 0.0), Complex64::new(0.0, s * h)),
    }
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// The `n`-fold product of the eigenstate of `axis` with eigenvalue `sign`
    /// (which must be +1 or -1).
    pub fn product(num_qubits: usize, axis: Axis, sign: i8) -> Result<Self> {
        let positive = match sign {
            1 => true,
            -1 => false,
            other => {
                return Err(Error::invalid(format!(
                    "eigenvalue sign must be ±1, got {other}"
                )))
            }
        };
        check_size(num_qubits)?;
        let single = axis_eigenstate(axis, positive);
        StateVector::from_qubits(&vec![single; num_qubits])
    }

    /// Tensor product of per-qubit states, qubit 0 first. Each pair is
    /// normalised independently.
    pub fn from_qubits(qubits: &[(Complex64, Complex64)]) -> Result<Self> {
        let n = qubits.len();
        check_size(n)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        amps.reserve((1 << n) - 1);
        for &(a0, a1) in qubits {
            let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::invalid(
                    "single-qubit state must have non-zero finite norm",
                ));
            }
            let (a0, a1) = (a0 / norm, a1 / norm);
            // The new qubit is more significant than all previous ones.
            let low: Vec<Complex64> = amps.clone();
            amps.clear();
            amps.extend(low.iter().map(|&v| v * a0));
            amps.extend(low.iter().map(|&v| v * a1));
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid("amplitude count must be a power of two ≥ 2"));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let s = StateVector {
            num_qubits: n,
            amps,
        };
        if (s.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("amplitudes are not normalised"));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Apply `exp(-i θ/2 P)` through `cos(θ/2)·I − i·sin(θ/2)·P`, updating
    /// the amplitude pairs coupled by `P` in place.
    pub fn apply_rotation(&mut self, mask: PauliMask, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let minus_is = Complex64::new(0.0, -s);
        let y = mask.y_factor();
        if mask.is_diagonal() {
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (x, a) in self.amps.iter_mut().enumerate() {
                *a *= if mask.sign(x) > 0.0 { plus } else { minus };
            }
            return;
        }
        let flip = mask.flip as usize;
        for x in 0..self.amps.len() {
            let partner = x ^ flip;
            if partner < x {
                continue;
            }
            let a = self.amps[x];
            let b = self.amps[partner];
            // (Pψ)_x = y·sign(partner)·b and (Pψ)_partner = y·sign(x)·a
            self.amps[x] = a * c + minus_is * y * mask.sign(partner) * b;
            self.amps[partner] = b * c + minus_is * y * mask.sign(x) * a;
        }
    }

    /// Apply a bare Pauli string (used for error injection).
    pub fn apply_pauli(&mut self, mask: PauliMask) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        mask.apply(&self.amps, &mut out);
        self.amps = out;
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.generator.check(self.num_qubits)?;
        self.apply_rotation(gate.generator.mask(), gate.theta);
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` for a Pauli string; the imaginary residue is dropped.
    pub fn pauli_expectation(&self, mask: PauliMask) -> f64 {
        mask.expectation(&self.amps).re
    }
}

/// Apply every gate of `circuit` to `init`, gate 0 first.
pub fn run_circuit(circuit: &Circuit, init: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits() != init.num_qubits() {
        return Err(Error::invalid(format!(
            "circuit has {} qubits but the initial state has {}",
            circuit.num_qubits(),
            init.num_qubits()
        )));
    }
    let mut state = init.clone();
    for gate in circuit.gates() {
        state.apply_rotation(gate.generator.mask(), gate.theta);
    }
    Ok(state)
}

/// `Σ_t w_t ⟨ψ|P_t|ψ⟩`.
pub fn expectation(state: &StateVector, hamiltonian: &Hamiltonian) -> Result<f64> {
    if hamiltonian.num_qubits() != state.num_qubits() {
        return Err(Error::invalid(format!(
            "Hamiltonian has {} qubits but the state has {}",
            hamiltonian.num_qubits(),
            state.num_qubits()
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for term in hamiltonian.terms() {
        total += term.weight() * term.mask().expectation(&state.amps);
    }
    debug_assert!(
        total.im.abs() <= 1e-10 * (1.0 + hamiltonian.weight_norm()),
        "imaginary residue {} in expectation",
        total.im
    );
    Ok(total.re)
}
