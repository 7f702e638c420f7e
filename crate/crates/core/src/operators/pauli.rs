use crate::error::{CqecError, Result};
use crate::numerics::{ComplexMatrix, C64, ZERO};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Position in the (I, X, Y, Z) ordering.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i & 3]
    }

    /// Flips the computational basis bit.
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase of `P|b⟩` for a single qubit, as a power of i.
    fn basis_phase(self, bit: usize) -> u8 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, 0) => 0,
            (Pauli::Z, _) => 2,
            (Pauli::Y, 0) => 1,
            (Pauli::Y, _) => 3,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Product of two letters as (power of i, letter).
fn letter_product(a: Pauli, b: Pauli) -> (u8, Pauli) {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => (0, p),
        (X, X) | (Y, Y) | (Z, Z) => (0, I),
        (X, Y) => (1, Z),
        (Y, X) => (3, Z),
        (Y, Z) => (1, X),
        (Z, Y) => (3, X),
        (Z, X) => (1, Y),
        (X, Z) => (3, Y),
    }
}

/// Global phase i^k, stored as k mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k & 3)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        i_pow(self.0)
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) & 3)
    }
}

pub(crate) fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// An n-qubit Pauli word with a global phase. Position 0 is the leftmost
/// tensor factor, which is the most significant bit of basis indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, phase: Phase) -> Result<Self> {
        if letters.is_empty() {
            return Err(CqecError::Argument("Pauli string must have at least one qubit".into()));
        }
        Ok(PauliString { letters, phase })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity word needs at least one qubit");
        PauliString { letters: vec![Pauli::I; n], phase: Phase::ONE }
    }

    /// Weight-one word with `p` on qubit `q` (0-based).
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.letters[q] = p;
        s
    }

    /// Word for a base-4 index in (I, X, Y, Z) order, leftmost most significant.
    pub fn from_index(n: usize, mut idx: usize) -> Self {
        let mut letters = vec![Pauli::I; n];
        for q in (0..n).rev() {
            letters[q] = Pauli::from_index(idx & 3);
            idx >>= 2;
        }
        PauliString { letters, phase: Phase::ONE }
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, p| acc * 4 + p.index())
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Same letters with phase +1.
    pub fn unsigned(&self) -> Self {
        PauliString { letters: self.letters.clone(), phase: Phase::ONE }
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity_word(&self) -> bool {
        self.weight() == 0
    }

    /// Bit mask of flipped qubits (qubit 0 is the most significant bit).
    pub fn x_mask(&self) -> usize {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
    }

    /// `P|b⟩ = phase · |b ⊕ x_mask⟩`; returns (phase, image index).
    pub fn apply_to_basis(&self, b: usize) -> (C64, usize) {
        let n = self.letters.len();
        let mut k = self.phase.0;
        for (q, p) in self.letters.iter().enumerate() {
            k += p.basis_phase((b >> (n - 1 - q)) & 1);
        }
        (i_pow(k), b ^ self.x_mask())
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = 1usize << self.n_qubits();
        let mut m = ComplexMatrix::zeros(d, d);
        for b in 0..d {
            let (ph, a) = self.apply_to_basis(b);
            m[(a, b)] = ph;
        }
        m
    }

    /// `P ρ P†` in O(d²).
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.nrows();
        let table: Vec<(C64, usize)> = (0..d).map(|b| self.apply_to_basis(b)).collect();
        let mut out = ComplexMatrix::from_element(d, d, ZERO);
        for b in 0..d {
            let (pb, ab) = table[b];
            for c in 0..d {
                let (pc, ac) = table[c];
                out[(ab, ac)] = pb * rho[(b, c)] * pc.conj();
            }
        }
        out
    }

    /// `P ρ` in O(d²).
    pub fn left_multiply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.nrows();
        let mut out = ComplexMatrix::from_element(d, rho.ncols(), ZERO);
        for b in 0..d {
            let (pb, ab) = self.apply_to_basis(b);
            for c in 0..rho.ncols() {
                out[(ab, c)] = pb * rho[(b, c)];
            }
        }
        out
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        PauliString { letters, phase: self.phase * other.phase }
    }
}

/// `p · q` with exact phase tracking.
pub fn pauli_multiply(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    if p.n_qubits() != q.n_qubits() {
        return Err(CqecError::Dimension(format!(
            "Pauli product of lengths {} and {}",
            p.n_qubits(),
            q.n_qubits()
        )));
    }
    let mut k = p.phase.0 + q.phase.0;
    let letters = p
        .letters
        .iter()
        .zip(&q.letters)
        .map(|(&a, &b)| {
            let (ph, r) = letter_product(a, b);
            k += ph;
            r
        })
        .collect();
    Ok(PauliString { letters, phase: Phase(k & 3) })
}

/// True iff the two words commute: an even number of positions hold
/// distinct non-identity letters.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    if p.n_qubits() != q.n_qubits() {
        return Err(CqecError::Dimension(format!(
            "commutation of lengths {} and {}",
            p.n_qubits(),
            q.n_qubits()
        )));
    }
    let clashes = p
        .letters
        .iter()
        .zip(&q.letters)
        .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
        .count();
    Ok(clashes % 2 == 0)
}

pub fn pauli_to_matrix(p: &PauliString) -> ComplexMatrix {
    p.to_matrix()
}

impl Mul for &PauliString {
    type Output = PauliString;
    /// Panics on length mismatch; use [`pauli_multiply`] for a checked product.
    fn mul(self, rhs: &PauliString) -> PauliString {
        pauli_multiply(self, rhs).expect("Pauli strings of equal length")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.0 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = CqecError;

    /// Accepts an optional phase prefix (`+`, `-`, `i`, `+i`, `-i`) followed by letters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(CqecError::Argument(format!("invalid Pauli letter '{other}' in \"{s}\""))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters, phase)
    }
}
