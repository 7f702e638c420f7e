use super::{syndrome, StabilizerCode};
use crate::error::{CqecError, Result};
use crate::numerics::{ComplexMatrix, C64};
use nalgebra::DMatrix;
use crate::operators::{BasisConvention, Pauli, PauliString, Superoperator};

/// Pauli words sharing a weight and letter-multiplicity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorClass {
    pub label: String,
    pub weight: usize,
    /// Non-zero letter counts, largest first.
    pub pattern: Vec<usize>,
    pub members: Vec<PauliString>,
}

impl ErrorClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn representative(&self) -> &PauliString {
        &self.members[0]
    }
}

/// The class partition of a code's error words with a word → class lookup.
#[derive(Debug, Clone)]
pub struct ClassPartition {
    pub classes: Vec<ErrorClass>,
    n: usize,
    lookup: Vec<Option<usize>>,
}

const FIVE_QUBIT_LABELS: [(&str, &[usize]); 16] = [
    ("0", &[]),
    ("1", &[1]),
    ("2A", &[2]),
    ("2B", &[1, 1]),
    ("3A", &[3]),
    ("3B", &[2, 1]),
    ("3C", &[1, 1, 1]),
    ("4A", &[2, 2]),
    ("4B", &[3, 1]),
    ("4C", &[2, 1, 1]),
    ("4D", &[4]),
    ("5A", &[4, 1]),
    ("5B", &[3, 2]),
    ("5C", &[2, 2, 1]),
    ("5D", &[3, 1, 1]),
    ("5E", &[5]),
];

fn pattern_of(p: &PauliString) -> Vec<usize> {
    let mut counts = [0usize; 3];
    for l in p.letters() {
        match l {
            Pauli::X => counts[0] += 1,
            Pauli::Y => counts[1] += 1,
            Pauli::Z => counts[2] += 1,
            Pauli::I => {}
        }
    }
    let mut v: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

impl ClassPartition {
    pub fn for_code(code: &StabilizerCode) -> Result<Self> {
        let n = code.n;
        let n_words = 1usize << (2 * n);
        let alphabet = &code.error_alphabet;
        let mut classes: Vec<ErrorClass>;
        let mut lookup = vec![None; n_words];
        if n == 5 && alphabet.len() == 3 {
            classes = FIVE_QUBIT_LABELS
                .iter()
                .map(|(label, pat)| ErrorClass {
                    label: label.to_string(),
                    weight: pat.iter().sum(),
                    pattern: pat.to_vec(),
                    members: Vec::new(),
                })
                .collect();
            for idx in 0..n_words {
                let w = PauliString::from_index(n, idx);
                let pat = pattern_of(&w);
                let c = classes.iter().position(|c| c.pattern == pat).expect("every 5-qubit pattern is labelled");
                classes[c].members.push(w);
                lookup[idx] = Some(c);
            }
        } else if alphabet == &[Pauli::X] && n >= 2 {
            classes = (0..=n)
                .map(|w| ErrorClass {
                    label: w.to_string(),
                    weight: w,
                    pattern: if w == 0 { vec![] } else { vec![w] },
                    members: Vec::new(),
                })
                .collect();
            for mask in 0..1usize << n {
                let letters: Vec<Pauli> =
                    (0..n).map(|q| if mask >> (n - 1 - q) & 1 == 1 { Pauli::X } else { Pauli::I }).collect();
                let w = PauliString::new(letters, Default::default())?;
                let c = w.weight();
                lookup[w.index()] = Some(c);
                classes[c].members.push(w);
            }
        } else {
            return Err(CqecError::Argument(format!(
                "no error-class partition for code {} with {} error letters",
                code.name,
                alphabet.len()
            )));
        }
        Ok(ClassPartition { classes, n, lookup })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class of a word (phase ignored), if it belongs to the partition.
    pub fn class_of(&self, p: &PauliString) -> Option<usize> {
        if p.n_qubits() != self.n {
            return None;
        }
        self.lookup[p.index()]
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.label == label)
    }

    /// Class multiplicities, the class-basis vector of the maximally mixed state.
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.size()).collect()
    }
}

/// Classifies all error words of the 3-qubit (bit-flip) or 5-qubit
/// (depolarizing) code.
pub fn enumerate_error_classes(code: &StabilizerCode) -> Result<Vec<ErrorClass>> {
    Ok(ClassPartition::for_code(code)?.classes)
}

/// Generators that can be lumped onto error classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassGenerator {
    /// Σ over qubits and X, Y, Z of (σρσ − ρ), unit rate.
    DepolarizingDissipator,
    /// Σ over qubits of (XρX − ρ), unit rate.
    BitFlipDissipator,
    /// Γ = Φ − id, unit rate.
    Correction,
}

fn column_for(code: &StabilizerCode, part: &ClassPartition, e: &PauliString, gen: ClassGenerator) -> Result<Vec<f64>> {
    let k = part.len();
    let mut col = vec![0.0; k];
    let own = part.class_of(e).expect("member of partition");
    let outside = |w: &PauliString| {
        CqecError::ReductionInvalid(format!("{w} leaves the class partition of code {}", code.name))
    };
    match gen {
        ClassGenerator::DepolarizingDissipator | ClassGenerator::BitFlipDissipator => {
            let letters: &[Pauli] = if gen == ClassGenerator::BitFlipDissipator {
                &[Pauli::X]
            } else {
                &[Pauli::X, Pauli::Y, Pauli::Z]
            };
            for q in 0..code.n {
                for &l in letters {
                    let moved = &PauliString::single(code.n, q, l) * e;
                    let c = part.class_of(&moved).ok_or_else(|| outside(&moved))?;
                    col[c] += 1.0;
                }
            }
            col[own] -= (code.n * letters.len()) as f64;
        }
        ClassGenerator::Correction => {
            let s = syndrome(code, e)?;
            let fixed = code.correction_for(&s) * e;
            let c = part.class_of(&fixed).ok_or_else(|| outside(&fixed))?;
            col[c] += 1.0;
            col[own] -= 1.0;
        }
    }
    Ok(col)
}

/// Class-basis matrix of a generator. Dissipator columns come from one
/// representative and are checked against every other member; the
/// correction column averages the routed class over all members.
pub fn reduce_to_classes(code: &StabilizerCode, generator: ClassGenerator) -> Result<Superoperator> {
    let part = ClassPartition::for_code(code)?;
    let k = part.len();
    let mut m = ComplexMatrix::zeros(k, k);
    for (j, class) in part.classes.iter().enumerate() {
        let col: Vec<f64> = match generator {
            ClassGenerator::Correction => {
                let mut acc = vec![0.0; k];
                for e in &class.members {
                    for (a, c) in acc.iter_mut().zip(column_for(code, &part, e, generator)?) {
                        *a += c;
                    }
                }
                acc.iter().map(|a| a / class.size() as f64).collect()
            }
            _ => {
                let first = column_for(code, &part, class.representative(), generator)?;
                for e in &class.members[1..] {
                    if column_for(code, &part, e, generator)? != first {
                        return Err(CqecError::ReductionInvalid(format!(
                            "members {} and {e} of class {} give different columns",
                            class.representative(),
                            class.label
                        )));
                    }
                }
                first
            }
        };
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = C64::new(v, 0.0);
        }
    }
    Superoperator::new(m, BasisConvention::ErrorClass)
}

/// Generator on the full distribution over the 4ⁿ error words, indexed by
/// `PauliString::index`. Column e holds the rates out of word e.
pub fn full_space_generator(code: &StabilizerCode, generator: ClassGenerator) -> Result<DMatrix<f64>> {
    let n = code.n;
    let dim = 1usize << (2 * n);
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let letters: &[Pauli] = match generator {
        ClassGenerator::BitFlipDissipator => &[Pauli::X],
        ClassGenerator::DepolarizingDissipator => &[Pauli::X, Pauli::Y, Pauli::Z],
        ClassGenerator::Correction => &[],
    };
    for j in 0..dim {
        let e = PauliString::from_index(n, j);
        if generator == ClassGenerator::Correction {
            let fixed = code.correction_for(&syndrome(code, &e)?) * &e;
            m[(fixed.index(), j)] += 1.0;
            m[(j, j)] -= 1.0;
        } else {
            for q in 0..n {
                for &l in letters {
                    m[((&PauliString::single(n, q, l) * &e).index(), j)] += 1.0;
                }
            }
            m[(j, j)] -= (n * letters.len()) as f64;
        }
    }
    Ok(m)
}

/// Full-space generator lumped onto classes, with in-class uniform weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassOracle {
    pub lumped: DMatrix<f64>,
    /// Largest difference between lumped columns of two members of one class;
    /// zero when the generator is exactly lumpable.
    pub member_spread: f64,
}

pub fn class_oracle(code: &StabilizerCode, generator: ClassGenerator) -> Result<ClassOracle> {
    let part = ClassPartition::for_code(code)?;
    let full = full_space_generator(code, generator)?;
    let k = part.len();
    let dim = full.nrows();
    let mut owner = vec![0usize; dim];
    for (c, class) in part.classes.iter().enumerate() {
        for e in &class.members {
            owner[e.index()] = c;
        }
    }
    let mut lumped = DMatrix::<f64>::zeros(k, k);
    let mut spread: f64 = 0.0;
    for (j, class) in part.classes.iter().enumerate() {
        let mut first: Option<Vec<f64>> = None;
        for e in &class.members {
            let col = e.index();
            let mut v = vec![0.0; k];
            for r in 0..dim {
                let x = full[(r, col)];
                if x != 0.0 {
                    v[owner[r]] += x;
                }
            }
            for i in 0..k {
                lumped[(i, j)] += v[i] / class.size() as f64;
            }
            match &first {
                None => first = Some(v),
                Some(f) => spread = spread.max(f.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)),
            }
        }
    }
    Ok(ClassOracle { lumped, member_spread: spread })
}
