//! Shared helpers for the integration tests, including a slow but independent
//! dense oracle built from explicit 2×2 Kronecker products.

#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

use qneat::hamiltonian::{Hamiltonian, PauliString};
use qneat::quantum::{Axis, Circuit, Gate, PauliGenerator, StateVector};

type C = Complex64;

fn pauli_2x2(axis: Option<Axis>) -> DMatrix<C> {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    let entries = match axis {
        None => [l, o, o, l],
        Some(Axis::X) => [o, l, l, o],
        Some(Axis::Y) => [o, -i, i, o],
        Some(Axis::Z) => [l, o, o, -l],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// `P_{n−1} ⊗ … ⊗ P_0`, qubit 0 being the least significant bit.
pub fn kron_pauli(n: usize, factors: &[(usize, Axis)]) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    for q in (0..n).rev() {
        let axis = factors.iter().find(|(fq, _)| *fq == q).map(|(_, a)| *a);
        m = m.kronecker(&pauli_2x2(axis));
    }
    m
}

pub fn hamiltonian_matrix(h: &Hamiltonian) -> DMatrix<C> {
    let dim = 1 << h.num_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for t in h.terms() {
        m += kron_pauli(h.num_qubits(), t.factors()) * C::new(t.weight(), 0.0);
    }
    m
}

/// `cos(θ/2)·I − i·sin(θ/2)·P`.
pub fn gate_matrix(n: usize, gate: &Gate) -> DMatrix<C> {
    let factors: Vec<(usize, Axis)> = gate
        .generator
        .qubits()
        .map(|q| (q, gate.generator.axis()))
        .collect();
    let p = kron_pauli(n, &factors);
    let (s, c) = (gate.theta / 2.0).sin_cos();
    DMatrix::identity(1 << n, 1 << n) * C::new(c, 0.0) - p * C::new(0.0, s)
}

pub fn dense_state(circuit: &Circuit, init: &StateVector) -> DVector<C> {
    let n = circuit.num_qubits();
    let mut psi = DVector::from_column_slice(init.amplitudes());
    for g in circuit.gates() {
        psi = gate_matrix(n, g) * psi;
    }
    psi
}

pub fn dense_expectation(circuit: &Circuit, init: &StateVector, h: &Hamiltonian) -> f64 {
    let psi = dense_state(circuit, init);
    (psi.adjoint() * hamiltonian_matrix(h) * &psi)[(0, 0)].re
}

pub fn random_circuit<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Circuit {
    let total = PauliGenerator::count(n);
    let gates = (0..len)
        .map(|_| {
            let g = PauliGenerator::from_index(n, rng.random_range(0..total)).unwrap();
            Gate::new(g, rng.random_range(0.0..TAU))
        })
        .collect();
    Circuit::new(n, gates).unwrap()
}

/// One to six random Pauli strings of weight up to three with weights in [−2, 2].
pub fn random_hamiltonian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Hamiltonian {
    let terms: Vec<PauliString> = (0..rng.random_range(1..=6))
        .map(|_| {
            let k = rng.random_range(1..=n.min(3));
            let factors: Vec<(usize, Axis)> = sample(rng, n, k)
                .into_iter()
                .map(|q| (q, Axis::ALL[rng.random_range(0..3)]))
                .collect();
            PauliString::new(rng.random_range(-2.0..=2.0), factors).unwrap()
        })
        .collect();
    Hamiltonian::new(n, terms).unwrap()
}

/// Median; the mean of the middle pair for even lengths. Infinities sort last.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
