//! Stabilizer codes, syndromes, the correction map Φ and its generator Γ = Φ − id.

mod classes;

pub use classes::{
    class_oracle, enumerate_error_classes, full_space_generator, reduce_to_classes, ClassGenerator, ClassOracle, ClassPartition,
    ErrorClass,
};

use crate::error::{CqecError, Result};
use crate::numerics::{ComplexMatrix, ComplexVector, C64, ZERO};
use crate::operators::{commutes, pauli_multiply, superoperator_matrix, BasisConvention, DensityMatrix, Pauli, PauliString, Superoperator};
use std::fmt;

/// Syndrome bits; bit `i` is 1 when the error anticommutes with generator `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome(pub Vec<u8>);

impl Syndrome {
    /// Integer value with generator 1 as the most significant bit.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn from_index(idx: usize, len: usize) -> Self {
        Syndrome((0..len).rev().map(|k| ((idx >> k) & 1) as u8).collect())
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An [[n, k]] stabilizer code with a lookup-table decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliString>,
    /// Correction for each syndrome, indexed by [`Syndrome::index`].
    pub correction_table: Vec<PauliString>,
    pub logicals: Vec<PauliString>,
    /// Letters of the physical noise model the code is paired with.
    pub error_alphabet: Vec<Pauli>,
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("static Pauli word")
}

/// Single-qubit "code": measure Z and flip back on outcome 1.
pub fn one_qubit_code() -> StabilizerCode {
    StabilizerCode {
        name: "q1".into(),
        n: 1,
        k: 0,
        generators: vec![ps("Z")],
        correction_table: vec![ps("I"), ps("X")],
        logicals: vec![],
        error_alphabet: vec![Pauli::X],
    }
}

/// Three-qubit bit-flip code.
pub fn three_qubit_code() -> StabilizerCode {
    StabilizerCode {
        name: "q3".into(),
        n: 3,
        k: 1,
        generators: vec![ps("ZZI"), ps("IZZ")],
        // syndromes 00, 01, 10, 11
        correction_table: vec![ps("III"), ps("IIX"), ps("XII"), ps("IXI")],
        logicals: vec![ps("XXX"), ps("ZZZ")],
        error_alphabet: vec![Pauli::X],
    }
}

/// Five-qubit perfect code; the decoder maps every single-qubit Pauli error
/// to itself.
pub fn five_qubit_code() -> StabilizerCode {
    let generators = vec![ps("XZZXI"), ps("IXZZX"), ps("XIXZZ"), ps("ZXIXZ")];
    let mut table = vec![PauliString::identity(5); 16];
    for q in 0..5 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let e = PauliString::single(5, q, p);
            let s = syndrome_of(&generators, &e).expect("length 5");
            table[s.index()] = e;
        }
    }
    StabilizerCode {
        name: "q5".into(),
        n: 5,
        k: 1,
        generators,
        correction_table: table,
        logicals: vec![ps("XXXXX"), ps("ZZZZZ")],
        error_alphabet: vec![Pauli::X, Pauli::Y, Pauli::Z],
    }
}

fn syndrome_of(generators: &[PauliString], e: &PauliString) -> Result<Syndrome> {
    generators
        .iter()
        .map(|g| commutes(g, e).map(|c| if c { 0 } else { 1 }))
        .collect::<Result<Vec<u8>>>()
        .map(Syndrome)
}

pub fn syndrome(code: &StabilizerCode, e: &PauliString) -> Result<Syndrome> {
    if e.n_qubits() != code.n {
        return Err(CqecError::Dimension(format!("error on {} qubits for an n = {} code", e.n_qubits(), code.n)));
    }
    syndrome_of(&code.generators, e)
}

impl StabilizerCode {
    pub fn n_syndromes(&self) -> usize {
        1 << self.generators.len()
    }

    pub fn correction_for(&self, s: &Syndrome) -> &PauliString {
        &self.correction_table[s.index()]
    }

    /// Checks the structural invariants of the code definition.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CqecError::Argument(format!("{}: {m}", self.name)));
        if self.generators.len() != self.n - self.k {
            return bad("generator count differs from n − k".into());
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.n_qubits() != self.n {
                return bad(format!("generator {i} has wrong length"));
            }
            let sq = pauli_multiply(g, g)?;
            if !sq.is_identity_word() || sq.phase() != crate::operators::Phase::ONE {
                return bad(format!("generator {i} does not square to +I"));
            }
            for h in &self.generators {
                if !commutes(g, h)? {
                    return bad("generators do not commute".into());
                }
            }
        }
        if self.correction_table.len() != self.n_syndromes() {
            return bad("correction table does not cover every syndrome".into());
        }
        for (idx, c) in self.correction_table.iter().enumerate() {
            if syndrome(self, c)?.index() != idx {
                return bad(format!("correction {c} does not produce syndrome {idx}"));
            }
        }
        for l in &self.logicals {
            for g in &self.generators {
                if !commutes(l, g)? {
                    return bad(format!("logical {l} anticommutes with {g}"));
                }
            }
            if self.is_in_stabilizer_group(l) {
                return bad(format!("logical {l} is a stabilizer"));
            }
        }
        Ok(())
    }

    fn is_in_stabilizer_group(&self, p: &PauliString) -> bool {
        let m = self.generators.len();
        (0..1usize << m).any(|mask| {
            let mut acc = PauliString::identity(self.n);
            for (i, g) in self.generators.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = &acc * g;
                }
            }
            acc.letters() == p.letters()
        })
    }

    /// Plain-text table of generators and the syndrome decoder.
    pub fn describe(&self) -> String {
        let mut s = format!("code {} [[{}, {}]]\ngenerators:", self.name, self.n, self.k);
        for g in &self.generators {
            s.push_str(&format!(" {g}"));
        }
        s.push_str("\nlogicals:");
        for l in &self.logicals {
            s.push_str(&format!(" {l}"));
        }
        s.push_str("\nsyndrome correction\n");
        for (i, c) in self.correction_table.iter().enumerate() {
            s.push_str(&format!("{} {}\n", Syndrome::from_index(i, self.generators.len()), c));
        }
        s
    }
}

/// `Π (I + Sᵢ)/2`, the projector onto the code space.
pub fn code_projector(code: &StabilizerCode) -> ComplexMatrix {
    syndrome_projector(code, &Syndrome(vec![0; code.generators.len()]))
}

/// Projector onto the syndrome subspace `s`.
pub fn syndrome_projector(code: &StabilizerCode, s: &Syndrome) -> ComplexMatrix {
    let d = 1usize << code.n;
    let id = ComplexMatrix::identity(d, d);
    let mut p = id.clone();
    for (g, &bit) in code.generators.iter().zip(&s.0) {
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        let f = (&id + g.to_matrix() * C64::new(sign, 0.0)) * C64::new(0.5, 0.0);
        p *= f;
    }
    p
}

/// Φ for a code acting on the first `n_code` qubits of an `n_total`-qubit
/// register (identity on the rest).
#[derive(Debug, Clone)]
pub struct CorrectionMap {
    n_total: usize,
    kind: MapKind,
}

#[derive(Debug, Clone)]
enum MapKind {
    /// Z-type generators: syndrome is a function of the basis index.
    Diagonal { syndrome_of_index: Vec<usize>, corrections: Vec<PauliString> },
    Kraus(Vec<ComplexMatrix>),
}

impl CorrectionMap {
    pub fn new(code: &StabilizerCode, n_total: usize) -> Result<Self> {
        if n_total < code.n {
            return Err(CqecError::Dimension("register smaller than the code".into()));
        }
        let extra = n_total - code.n;
        let embed = |p: &PauliString| if extra == 0 { p.clone() } else { p.tensor(&PauliString::identity(extra)) };
        let diagonal = code.generators.iter().all(|g| g.letters().iter().all(|l| matches!(l, Pauli::I | Pauli::Z)));
        let kind = if diagonal {
            let d = 1usize << n_total;
            let syndrome_of_index = (0..d)
                .map(|a| {
                    let sys = a >> extra;
                    code.generators.iter().fold(0usize, |acc, g| {
                        let parity = g
                            .letters()
                            .iter()
                            .enumerate()
                            .filter(|(q, l)| **l == Pauli::Z && (sys >> (code.n - 1 - q)) & 1 == 1)
                            .count()
                            % 2;
                        (acc << 1) | parity
                    })
                })
                .collect();
            MapKind::Diagonal { syndrome_of_index, corrections: code.correction_table.iter().map(embed).collect() }
        } else {
            let id_b = ComplexMatrix::identity(1 << extra, 1 << extra);
            let kraus = (0..code.n_syndromes())
                .map(|s| {
                    let syn = Syndrome::from_index(s, code.generators.len());
                    let k = code.correction_table[s].to_matrix() * syndrome_projector(code, &syn);
                    k.kronecker(&id_b)
                })
                .collect();
            MapKind::Kraus(kraus)
        };
        Ok(CorrectionMap { n_total, kind })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = 1usize << self.n_total;
        assert_eq!(rho.nrows(), d, "correction map dimension");
        match &self.kind {
            MapKind::Diagonal { syndrome_of_index, corrections } => {
                let mut out = ComplexMatrix::from_element(d, d, ZERO);
                let tables: Vec<Vec<(C64, usize)>> =
                    corrections.iter().map(|c| (0..d).map(|b| c.apply_to_basis(b)).collect()).collect();
                for a in 0..d {
                    let s = syndrome_of_index[a];
                    let t = &tables[s];
                    let (pa, ia) = t[a];
                    for b in 0..d {
                        if syndrome_of_index[b] != s {
                            continue;
                        }
                        let (pb, ib) = t[b];
                        out[(ia, ib)] += pa * rho[(a, b)] * pb.conj();
                    }
                }
                out
            }
            MapKind::Kraus(ks) => {
                let mut out = ComplexMatrix::from_element(d, d, ZERO);
                for k in ks {
                    out += k * rho * k.adjoint();
                }
                out
            }
        }
    }

    /// Γ(ρ) = Φ(ρ) − ρ.
    pub fn generator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.apply(rho) - rho
    }
}

pub fn apply_correction_map(code: &StabilizerCode, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.n_qubits() != code.n {
        return Err(CqecError::Dimension(format!("state on {} qubits for an n = {} code", rho.n_qubits(), code.n)));
    }
    let map = CorrectionMap::new(code, code.n)?;
    DensityMatrix::from_matrix_unchecked(map.apply(rho.matrix()))
}

/// Γ = Φ − id as a superoperator in the requested basis.
pub fn correction_generator(code: &StabilizerCode, basis: BasisConvention) -> Result<Superoperator> {
    match basis {
        BasisConvention::ErrorClass => reduce_to_classes(code, ClassGenerator::Correction),
        _ => {
            let map = CorrectionMap::new(code, code.n)?;
            superoperator_matrix(|r| map.generator(r), code.n, basis)
        }
    }
}

/// `a|000⟩ + b|111⟩` prepared with the two-CNOT encoder applied to
/// `(a|0⟩ + b|1⟩)|00⟩`.
pub fn encode_three_qubit(a: C64, b: C64) -> Result<DensityMatrix> {
    let nrm = a.norm_sqr() + b.norm_sqr();
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(CqecError::InvalidState(format!("amplitudes not normalized (|a|²+|b|² = {nrm})")));
    }
    let mut psi = ComplexVector::zeros(8);
    psi[0] = a;
    psi[4] = b;
    let enc = encoding_unitary();
    DensityMatrix::pure(&(enc * psi))
}

/// CNOT(1→3)·CNOT(1→2) as an 8×8 permutation.
pub fn encoding_unitary() -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(8, 8);
    for b in 0..8usize {
        let img = if b & 4 != 0 { b ^ 0b011 } else { b };
        u[(img, b)] = C64::new(1.0, 0.0);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_diff, nullspace};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn codes_validate() {
        for c in [one_qubit_code(), three_qubit_code(), five_qubit_code()] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn table_one_rows() {
        let c = five_qubit_code();
        let cases = [
            ("XIIII", "0001"), ("IXIII", "1000"), ("IIXII", "1100"), ("IIIXI", "0110"), ("IIIIX", "0011"),
            ("ZIIII", "1010"), ("IZIII", "0101"), ("IIZII", "0010"), ("IIIZI", "1001"), ("IIIIZ", "0100"),
            ("YIIII", "1011"), ("IYIII", "1101"), ("IIYII", "1110"), ("IIIYI", "1111"), ("IIIIY", "0111"),
        ];
        for (e, s) in cases {
            assert_eq!(syndrome(&c, &p(e)).unwrap().to_string(), s, "{e}");
            assert_eq!(c.correction_table[syndrome(&c, &p(e)).unwrap().index()], p(e));
        }
        assert_eq!(syndrome(&c, &p("IIIII")).unwrap().to_string(), "0000");
        assert!(syndrome(&c, &p("XX")).is_err());
    }

    #[test]
    fn three_qubit_corrections() {
        let c = three_qubit_code();
        assert_eq!(c.correction_for(&Syndrome(vec![1, 0])), &p("XII"));
        assert_eq!(c.correction_for(&Syndrome(vec![1, 1])), &p("IXI"));
        assert_eq!(c.correction_for(&Syndrome(vec![0, 1])), &p("IIX"));
        let one = one_qubit_code();
        assert_eq!(one.correction_for(&Syndrome(vec![1])), &p("X"));
    }

    #[test]
    fn projectors() {
        let p3 = code_projector(&three_qubit_code());
        let mut want = ComplexMatrix::zeros(8, 8);
        want[(0, 0)] = C64::new(1.0, 0.0);
        want[(7, 7)] = C64::new(1.0, 0.0);
        assert!(max_abs_diff(&p3, &want) < 1e-15);
        let p5 = code_projector(&five_qubit_code());
        assert!(max_abs_diff(&(&p5 * &p5), &p5) < 1e-12);
        assert!((p5.trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn one_qubit_flip_back() {
        let out = apply_correction_map(&one_qubit_code(), &DensityMatrix::basis_state(1, 1)).unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::basis_state(1, 0).matrix()) < 1e-15);
    }

    #[test]
    fn three_qubit_recovers_single_flips() {
        let code = three_qubit_code();
        let rho = encode_three_qubit(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        for e in ["XII", "IXI", "IIX", "III"] {
            let x = p(e);
            let hit = DensityMatrix::from_matrix_unchecked(x.conjugate(rho.matrix())).unwrap();
            let back = apply_correction_map(&code, &hit).unwrap();
            assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-14, "{e}");
        }
    }

    #[test]
    fn kraus_and_diagonal_paths_agree() {
        let code = three_qubit_code();
        let fast = CorrectionMap::new(&code, 4).unwrap();
        let id_b = ComplexMatrix::identity(2, 2);
        let kraus: Vec<ComplexMatrix> = (0..4)
            .map(|s| {
                let syn = Syndrome::from_index(s, 2);
                (code.correction_table[s].to_matrix() * syndrome_projector(&code, &syn)).kronecker(&id_b)
            })
            .collect();
        let rho = ComplexMatrix::from_fn(16, 16, |i, j| C64::new((i * 7 + j) as f64 % 5.0, (i as f64 - j as f64) * 0.1));
        let mut dense = ComplexMatrix::zeros(16, 16);
        for k in &kraus {
            dense += k * &rho * k.adjoint();
        }
        assert!(max_abs_diff(&fast.apply(&rho), &dense) < 1e-13);
    }

    #[test]
    fn encoder_states() {
        let r = encode_three_qubit(C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!((r.matrix()[(7, 7)].re - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = encode_three_qubit(C64::new(s, 0.0), C64::new(s, 0.0)).unwrap();
        let f = (ghz.matrix() * ghz.matrix()).trace().re;
        assert!((f - 1.0).abs() < 1e-14);
        assert!(encode_three_qubit(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn gamma_kills_code_space() {
        let code = three_qubit_code();
        let g = correction_generator(&code, BasisConvention::Computational).unwrap();
        let rho = encode_three_qubit(C64::new(0.8, 0.0), C64::new(0.6, 0.0)).unwrap();
        let v = crate::operators::vectorize(&rho, BasisConvention::Computational).unwrap();
        assert!((&g.matrix * v).norm() < 1e-14);
        assert!(g.trace_defect().unwrap() < 1e-14);
    }

    #[test]
    fn one_qubit_gamma_in_pauli_basis() {
        let g = correction_generator(&one_qubit_code(), BasisConvention::PauliProduct).unwrap();
        // M_P at γ = 0, η = 1
        let want = crate::numerics::real_matrix(
            4,
            4,
            &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, -1.0],
        );
        assert!(max_abs_diff(&g.matrix, &want) < 1e-15);
        assert_eq!(nullspace(&g.matrix, 1e-10).unwrap().len(), 1);
    }
}
