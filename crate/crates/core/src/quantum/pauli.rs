use num_complex::Complex64;

use super::Axis;

/// Bit-mask form of a Pauli string.
///
/// `flip` marks the X/Y positions (the basis index is XOR-ed with it) and
/// `phase` marks the Y/Z positions (they contribute a sign from the bit
/// value). For `P = ⊗ p_q` and a basis state `|x⟩`:
///
/// `P|x⟩ = i^{#Y} (-1)^{popcount(x & phase)} |x ^ flip⟩`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliMask {
    pub flip: u64,
    pub phase: u64,
}

impl PauliMask {
    pub fn identity() -> Self {
        PauliMask::default()
    }

    pub fn with(mut self, qubit: usize, axis: Axis) -> Self {
        let bit = 1u64 << qubit;
        match axis {
            Axis::X => self.flip |= bit,
            Axis::Y => {
                self.flip |= bit;
                self.phase |= bit;
            }
            Axis::Z => self.phase |= bit,
        }
        self
    }

    pub fn is_diagonal(&self) -> bool {
        self.flip == 0
    }

    pub fn num_y(&self) -> u32 {
        (self.flip & self.phase).count_ones()
    }

    /// Positions acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.flip | self.phase
    }

    /// `i^{#Y}` as a complex number.
    pub fn y_factor(&self) -> Complex64 {
        match self.num_y() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Sign `(-1)^{popcount(x & phase)}` as ±1.
    #[inline]
    pub fn sign(&self, x: usize) -> f64 {
        if ((x as u64) & self.phase).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Two Pauli strings commute iff their symplectic product is even.
    pub fn commutes_with(&self, other: &PauliMask) -> bool {
        ((self.flip & other.phase).count_ones() + (self.phase & other.flip).count_ones())
            .is_multiple_of(2)
    }

    /// Apply the string to a full amplitude vector, writing into `out`.
    pub fn apply(&self, amps: &[Complex64], out: &mut [Complex64]) {
        let y = self.y_factor();
        let flip = self.flip as usize;
        for (x, a) in amps.iter().enumerate() {
            out[x ^ flip] = y * self.sign(x) * a;
        }
    }

    /// `⟨ψ|P|ψ⟩`, real for Hermitian `P` up to rounding.
    pub fn expectation(&self, amps: &[Complex64]) -> Complex64 {
        let flip = self.flip as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        if self.is_diagonal() {
            for (x, a) in amps.iter().enumerate() {
                acc += self.sign(x) * a.norm_sqr();
            }
            return acc;
        }
        for (x, a) in amps.iter().enumerate() {
            acc += amps[x ^ flip].conj() * a * self.sign(x);
        }
        acc * self.y_factor()
    }
}
