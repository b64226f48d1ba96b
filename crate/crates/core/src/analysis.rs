//! Post-run statistics and the single-gate usefulness experiment.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::evolution::OutcomeLabel;
use crate::hamiltonian::Hamiltonian;
use crate::quantum::{expectation, Gate, PauliGenerator, StateVector};
use crate::runlog::{kind_rank, RunLog};

/// `f(θ) = a + b·cos θ + c·sin θ`: energy after appending one rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SinusoidFit {
    pub fn eval(&self, theta: f64) -> f64 {
        self.a + self.b * theta.cos() + self.c * theta.sin()
    }

    pub fn minimum(&self) -> f64 {
        self.a - self.b.hypot(self.c)
    }

    pub fn amplitude_sqr(&self) -> f64 {
        self.b * self.b + self.c * self.c
    }
}

fn rotated_energy(
    state: &StateVector,
    h: &Hamiltonian,
    generator: PauliGenerator,
    theta: f64,
) -> Result<f64> {
    let mut s = state.clone();
    s.apply_gate(&Gate::new(generator, theta))?;
    expectation(&s, h)
}

/// Reconstruct the sinusoid from `f(0)`, `f(π/2)` and `f(π)`.
pub fn fit_rotation_response(
    state: &StateVector,
    hamiltonian: &Hamiltonian,
    generator: PauliGenerator,
) -> Result<SinusoidFit> {
    let f0 = rotated_energy(state, hamiltonian, generator, 0.0)?;
    let f_half = rotated_energy(state, hamiltonian, generator, FRAC_PI_2)?;
    let f_pi = rotated_energy(state, hamiltonian, generator, PI)?;
    let a = (f0 + f_pi) / 2.0;
    Ok(SinusoidFit {
        a,
        b: (f0 - f_pi) / 2.0,
        c: f_half - a,
    })
}

/// A generator is useful at `state` when some angle lowers the energy by more than `tol`.
pub fn is_useful(
    state: &StateVector,
    hamiltonian: &Hamiltonian,
    generator: PauliGenerator,
    tol: f64,
) -> Result<bool> {
    let fit = fit_rotation_response(state, hamiltonian, generator)?;
    Ok(fit.minimum() < fit.eval(0.0) - tol)
}

/// Fraction of all generators that are useful at `state` (exhaustive).
pub fn useful_generator_fraction(
    state: &StateVector,
    hamiltonian: &Hamiltonian,
    tol: f64,
) -> Result<f64> {
    let all = PauliGenerator::all(state.num_qubits());
    let mut useful = 0usize;
    for g in &all {
        useful += is_useful(state, hamiltonian, *g, tol)? as usize;
    }
    Ok(useful as f64 / all.len() as f64)
}

/// Monte-Carlo estimate of the chance that a uniformly drawn generator is
/// useful at a state drawn from `sampler`.
pub fn useful_gate_fraction<R, S>(
    hamiltonian: &Hamiltonian,
    mut sampler: S,
    num_samples: usize,
    rng: &mut R,
    tol: f64,
) -> Result<f64>
where
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> Result<StateVector>,
{
    if num_samples == 0 {
        return Err(crate::Error::invalid("need at least one sample"));
    }
    let n = hamiltonian.num_qubits();
    let total = PauliGenerator::count(n);
    let mut useful = 0usize;
    for _ in 0..num_samples {
        let state = sampler(rng)?;
        let g = PauliGenerator::from_index(n, rng.random_range(0..total)).expect("in range");
        useful += is_useful(&state, hamiltonian, g, tol)? as usize;
    }
    Ok(useful as f64 / num_samples as f64)
}

/// Product state with each qubit uniform on its Bloch sphere.
pub fn random_product_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    let qubits: Vec<(Complex64, Complex64)> = (0..n)
        .map(|_| {
            let cos_theta: f64 = rng.random_range(-1.0..=1.0);
            let phi = rng.random_range(0.0..TAU);
            let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
            (
                Complex64::new(half.cos(), 0.0),
                Complex64::from_polar(half.sin(), phi),
            )
        })
        .collect();
    StateVector::from_qubits(&qubits)
}

/// One row of the success histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub label: OutcomeLabel,
    pub gate_kind: String,
    /// Accepted generations whose winning mutation had this label and kind.
    pub count: u64,
    /// Offspring proposed with this label, any gate kind.
    pub proposals: u64,
}

impl HistogramRow {
    /// `count / proposals`, zero when nothing was proposed.
    pub fn rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.count as f64 / self.proposals as f64
        }
    }
}

/// Successes per (label, gate kind) summed over `logs`, with rates normalised
/// by the proposals of the label. Rows appear for every cell that was
/// proposed or accepted at least once.
pub fn success_histogram<'a>(logs: impl IntoIterator<Item = &'a RunLog>) -> Vec<HistogramRow> {
    type Cells = BTreeMap<(OutcomeLabel, (usize, String)), (String, u64)>;
    fn touch<'m>(cells: &'m mut Cells, label: OutcomeLabel, kind: &str) -> &'m mut (String, u64) {
        cells
            .entry((label, kind_rank(kind)))
            .or_insert_with(|| (kind.to_string(), 0))
    }

    let mut cells = Cells::new();
    let mut per_label: BTreeMap<OutcomeLabel, u64> = BTreeMap::new();
    for log in logs {
        for r in &log.records {
            for o in &r.offspring {
                *per_label.entry(o.label).or_default() += 1;
                touch(&mut cells, o.label, &o.gate_kind);
            }
            if let (true, Some(o)) = (r.accepted, &r.outcome) {
                touch(&mut cells, o.label(), o.gate_kind()).1 += 1;
            }
        }
    }
    cells
        .into_iter()
        .map(|((label, _), (gate_kind, count))| HistogramRow {
            label,
            gate_kind,
            count,
            proposals: per_label.get(&label).copied().unwrap_or(0),
        })
        .collect()
}

/// `(cumulative calls, best energy)` after the initial evaluation and after
/// every generation. Empty for a log without generations.
pub fn calls_vs_energy(log: &RunLog) -> Vec<(u64, f64)> {
    if log.records.is_empty() {
        return Vec::new();
    }
    let mut best = log.initial_energy;
    let mut out = vec![(log.initial_calls, best)];
    for r in &log.records {
        best = best.min(r.energy_after());
        out.push((r.cumulative_calls, best));
    }
    out
}

/// Calls needed before the best energy first reaches `target`.
pub fn calls_to_reach(log: &RunLog, target: f64) -> Option<u64> {
    calls_vs_energy(log)
        .into_iter()
        .find(|&(_, e)| e <= target)
        .map(|(c, _)| c)
}

/// `label,gate_kind,count,proposals,rate`
pub fn write_histogram_csv<W: Write>(rows: &[HistogramRow], mut out: W) -> Result<()> {
    writeln!(out, "label,gate_kind,count,proposals,rate")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.label,
            r.gate_kind,
            r.count,
            r.proposals,
            r.rate()
        )?;
    }
    Ok(())
}

/// `calls,energy`
pub fn write_curve_csv<W: Write>(series: &[(u64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "calls,energy")?;
    for (calls, energy) in series {
        writeln!(out, "{calls},{energy}")?;
    }
    Ok(())
}
