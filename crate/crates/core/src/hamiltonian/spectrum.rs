use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::quantum::MAX_QUBITS;

/// Largest system for which a dense matrix (or an exact non-diagonal
/// spectrum) is produced.
pub const DENSE_MAX_QUBITS: usize = 12;

// Full diagonalisation below this size, Lanczos above.
const DIRECT_EIGEN_MAX_QUBITS: usize = 8;

const LANCZOS_MAX_STEPS: usize = 600;
const LANCZOS_SEED: u64 = 0x01a2_c705;

/// `Σ_t w_t ⊗_q σ_q` as a dense `2^n × 2^n` matrix (row index = output basis state).
pub fn dense_matrix(h: &Hamiltonian) -> Result<DMatrix<Complex64>> {
    let n = h.num_qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::UnsupportedSize {
            what: "dense matrix",
            qubits: n,
            limit: DENSE_MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for term in h.terms() {
        let mask = term.mask();
        let y = mask.y_factor() * term.weight();
        let flip = mask.flip as usize;
        for col in 0..dim {
            m[(col ^ flip, col)] += y * mask.sign(col);
        }
    }
    Ok(m)
}

/// Extremes of a Z-diagonal Hamiltonian by scanning all bitstrings.
pub fn diagonal_extremes(h: &Hamiltonian) -> Result<(f64, f64)> {
    if !h.is_diagonal() {
        return Err(Error::invalid("Hamiltonian has off-diagonal terms"));
    }
    let n = h.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::UnsupportedSize {
            what: "bitstring scan",
            qubits: n,
            limit: MAX_QUBITS,
        });
    }
    let (lo, hi) = (0..1usize << n)
        .map(|b| h.diagonal_energy(b))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        });
    Ok((lo, hi))
}

/// Smallest and largest eigenvalue of `h`.
///
/// Diagonal Hamiltonians are scanned exhaustively (up to 24 qubits). Others
/// are limited to 12 qubits: small systems are diagonalised directly, larger
/// ones through a fully reorthogonalised Lanczos iteration on the sparse
/// Pauli-sum action.
pub fn exact_extremes(h: &Hamiltonian) -> Result<(f64, f64)> {
    if h.is_diagonal() {
        return diagonal_extremes(h);
    }
    let n = h.num_qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::UnsupportedSize {
            what: "exact spectrum",
            qubits: n,
            limit: DENSE_MAX_QUBITS,
        });
    }
    if n <= DIRECT_EIGEN_MAX_QUBITS {
        let eig = dense_matrix(h)?.symmetric_eigenvalues();
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return Ok((lo, hi));
    }
    Ok(lanczos_extremes(h))
}

fn apply_hamiltonian(h: &Hamiltonian, v: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    for term in h.terms() {
        let mask = term.mask();
        let y = mask.y_factor() * term.weight();
        let flip = mask.flip as usize;
        for (x, a) in v.iter().enumerate() {
            out[x ^ flip] += y * mask.sign(x) * a;
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn tridiagonal_extremes(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i + 1, i)] = beta[i];
            t[(i, i + 1)] = beta[i];
        }
    }
    let eig = t.symmetric_eigenvalues();
    (
        eig.iter().cloned().fold(f64::INFINITY, f64::min),
        eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    )
}

fn lanczos_extremes(h: &Hamiltonian) -> (f64, f64) {
    let dim = 1usize << h.num_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let scale = 1.0 + h.weight_norm();
    let max_steps = dim.min(LANCZOS_MAX_STEPS);
    let mut basis: Vec<Vec<Complex64>> = vec![v];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut last = (f64::NAN, f64::NAN);
    let mut stable = 0;

    for k in 0..max_steps {
        apply_hamiltonian(h, &basis[k], &mut w);
        let a = dot(&basis[k], &w).re;
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let current = tridiagonal_extremes(&alpha, &beta);
        if (current.0 - last.0).abs() <= 1e-13 * scale
            && (current.1 - last.1).abs() <= 1e-13 * scale
        {
            stable += 1;
        } else {
            stable = 0;
        }
        last = current;
        if b <= 1e-12 * scale || stable >= 5 || k + 1 == max_steps {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{local_pauli_sum, tfi, BenchmarkKind, HamiltonianSpec, PauliString};
    use crate::quantum::Axis;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_z_matrix() {
        let h = local_pauli_sum(1, Axis::Z).unwrap();
        let m = dense_matrix(&h).unwrap();
        assert_eq!(
            m,
            DMatrix::from_row_slice(2, 2, &[c(1.), c(0.), c(0.), c(-1.)])
        );
    }

    #[test]
    fn xx_matrix_is_antidiagonal() {
        let h = Hamiltonian::new(
            2,
            [PauliString::new(1.0, [(0, Axis::X), (1, Axis::X)]).unwrap()],
        )
        .unwrap();
        let m = dense_matrix(&h).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let want = if r + col == 3 { c(1.) } else { c(0.) };
                assert_eq!(m[(r, col)], want);
            }
        }
    }

    #[test]
    fn y_matrix_convention() {
        let h = local_pauli_sum(1, Axis::Y).unwrap();
        let m = dense_matrix(&h).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn tfi_matrix_is_hermitian_and_traceless() {
        let m = dense_matrix(&tfi(3, 1.0, 1.0).unwrap()).unwrap();
        let diff = (&m - m.adjoint())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-12);
        assert!(m.trace().norm() < 1e-12);
    }

    #[test]
    fn small_spectra() {
        let (lo, hi) = exact_extremes(&tfi(2, 1.0, 1.0).unwrap()).unwrap();
        assert!((lo + 5f64.sqrt()).abs() < 1e-12);
        assert!((hi - 5f64.sqrt()).abs() < 1e-12);

        let (lo, _) = exact_extremes(&tfi(2, 1.0, 0.0).unwrap()).unwrap();
        assert!((lo + 1.0).abs() < 1e-12);

        let (lo, hi) = exact_extremes(&local_pauli_sum(1, Axis::Z).unwrap()).unwrap();
        assert_eq!((lo, hi), (-1.0, 1.0));

        let (lo, hi) = exact_extremes(&local_pauli_sum(10, Axis::X).unwrap()).unwrap();
        assert!((lo + 10.0).abs() < 1e-9 && (hi - 10.0).abs() < 1e-9);
    }

    #[test]
    fn lanczos_matches_direct_diagonalisation() {
        let h = tfi(9, 1.0, 0.7).unwrap();
        let direct = dense_matrix(&h).unwrap().symmetric_eigenvalues();
        let lo = direct.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = direct.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (l, u) = lanczos_extremes(&h);
        assert!((l - lo).abs() < 1e-9, "{l} vs {lo}");
        assert!((u - hi).abs() < 1e-9, "{u} vs {hi}");
    }

    #[test]
    fn sk_extremes_match_spin_enumeration() {
        let h = HamiltonianSpec::new(BenchmarkKind::Sk, 4)
            .with_instance_seed(9)
            .build()
            .unwrap();
        let couplings: Vec<(usize, usize, f64)> = h
            .terms()
            .iter()
            .map(|t| (t.factors()[0].0, t.factors()[1].0, t.weight()))
            .collect();
        let mut best = (f64::INFINITY, f64::NEG_INFINITY);
        for config in 0..16u32 {
            let spin = |q: usize| if config >> q & 1 == 0 { 1.0 } else { -1.0 };
            let e: f64 = couplings
                .iter()
                .map(|&(i, j, w)| w * spin(i) * spin(j))
                .sum();
            best = (best.0.min(e), best.1.max(e));
        }
        assert_eq!(exact_extremes(&h).unwrap(), best);
    }

    #[test]
    fn size_guards() {
        let h = tfi(13, 1.0, 1.0).unwrap();
        assert!(matches!(
            exact_extremes(&h),
            Err(Error::UnsupportedSize { .. })
        ));
        assert!(matches!(
            dense_matrix(&h),
            Err(Error::UnsupportedSize { .. })
        ));
        // Diagonal systems scan beyond the dense limit.
        let z = local_pauli_sum(16, Axis::Z).unwrap();
        assert_eq!(exact_extremes(&z).unwrap(), (-16.0, 16.0));
    }
}
