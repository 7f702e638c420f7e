use cqec_core::analysis::{bloch_trace_distance, trace_distance};
use cqec_core::lindblad::{closed_form_1q, propagate, MarkovModel, SystemState};
use cqec_core::numerics::{integrate_ivp, matrix_exponential, max_abs_diff, to_real, ComplexMatrix, C64};
use cqec_core::operators::{Pauli, PauliString};
use cqec_core::xxbath::{reduced_state_1q, XXModel};
use cqec_core::{three_qubit_code, DensityMatrix};
use proptest::prelude::*;

fn generator_from(entries: &[f64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| C64::new(entries[i * n + j], entries[n * n + i * n + j]))
}

fn pauli_word(n: usize) -> impl Strategy<Value = PauliString> {
    (0..(1usize << (2 * n))).prop_map(move |i| PauliString::from_index(n, i))
}

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| {
        let r = (x * x + y * y + z * z).sqrt();
        if r > 1.0 {
            [x / r, y / r, z / r]
        } else {
            [x, y, z]
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expm_semigroup(entries in prop::collection::vec(-2.0..2.0f64, 32), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let a = generator_from(&entries, 4);
        let lhs = matrix_exponential(&a, s + t).unwrap();
        let rhs = matrix_exponential(&a, s).unwrap() * matrix_exponential(&a, t).unwrap();
        let scale = 1.0 + lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-10 * scale);
    }

    #[test]
    fn ode_matches_expm(entries in prop::collection::vec(-1.0..1.0f64, 9), y0 in prop::collection::vec(-1.0..1.0f64, 3)) {
        let a: Vec<f64> = entries.clone();
        let grid = [0.0, 0.5, 1.0, 2.0];
        let ys = integrate_ivp(|_, y, dy| {
            for i in 0..3 {
                dy[i] = (0..3).map(|j| a[i * 3 + j] * y[j]).sum();
            }
        }, &y0, &grid, 1e-11, 1e-13).unwrap();
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(a[i * 3 + j], 0.0));
        for (t, y) in grid.iter().zip(&ys) {
            let e = to_real(&matrix_exponential(&m, *t).unwrap(), 1e-12).unwrap();
            for i in 0..3 {
                let want: f64 = (0..3).map(|j| e[(i, j)] * y0[j]).sum();
                prop_assert!((y[i] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn pauli_product_matches_matrices(p in pauli_word(3), q in pauli_word(3)) {
        let pq = &p * &q;
        let dense = p.to_matrix() * q.to_matrix();
        prop_assert!(max_abs_diff(&pq.to_matrix(), &dense) < 1e-14);
        let commute = max_abs_diff(&(p.to_matrix() * q.to_matrix()), &(q.to_matrix() * p.to_matrix())) < 1e-14;
        prop_assert_eq!(commute, (&p * &q).to_matrix() == (&q * &p).to_matrix());
    }

    #[test]
    fn pauli_squares_to_identity(p in pauli_word(4)) {
        let sq = &p.unsigned() * &p.unsigned();
        prop_assert_eq!(sq.to_matrix(), ComplexMatrix::identity(16, 16));
        let back = PauliString::from_index(4, p.index());
        prop_assert_eq!(back.letters(), p.letters());
    }

    #[test]
    fn markov_1q_closed_form(r in bloch(), gamma in 0.01..3.0f64, eta in 0.0..5.0f64, t in 0.0..5.0f64) {
        let model = MarkovModel::for_code(cqec_core::one_qubit_code(), gamma, eta).unwrap();
        let rho = DensityMatrix::from_bloch(r[0], r[1], r[2]).unwrap();
        let out = propagate(&model, &SystemState::Density(rho), t).unwrap();
        let b = out.as_density().unwrap().bloch().unwrap();
        let want = closed_form_1q(r[0], r[1], r[2], gamma, eta, t);
        for i in 0..3 {
            prop_assert!((b[i] - want[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn markov_keeps_states_physical(a in bloch(), gamma in 0.01..3.0f64, eta in 0.0..5.0f64, t in 0.0..4.0f64) {
        let code = three_qubit_code();
        let model = MarkovModel::for_code(code, gamma, eta).unwrap();
        let one = DensityMatrix::from_bloch(a[0], a[1], a[2]).unwrap();
        let rho = one.kron(&DensityMatrix::basis_state(2, 0));
        let out = propagate(&model, &SystemState::Density(rho), t).unwrap();
        let d = out.as_density().unwrap();
        prop_assert!((d.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(d.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn markov_trace_distance_contracts(a in bloch(), b in bloch(), gamma in 0.01..2.0f64, eta in 0.0..4.0f64,
                                       t1 in 0.0..3.0f64, dt in 0.0..3.0f64) {
        let model = MarkovModel::for_code(cqec_core::one_qubit_code(), gamma, eta).unwrap();
        let dist = |t: f64| {
            let ra = propagate(&model, &SystemState::Density(DensityMatrix::from_bloch(a[0], a[1], a[2]).unwrap()), t).unwrap();
            let rb = propagate(&model, &SystemState::Density(DensityMatrix::from_bloch(b[0], b[1], b[2]).unwrap()), t).unwrap();
            trace_distance(ra.as_density().unwrap(), rb.as_density().unwrap()).unwrap()
        };
        prop_assert!(dist(t1 + dt) <= dist(t1) + 1e-10);
    }

    #[test]
    fn overdamped_xx_contracts(a in bloch(), b in bloch(), kappa in 8.0..20.0f64, eta in 0.0..3.0f64,
                               t1 in 0.0..3.0f64, dt in 0.0..3.0f64) {
        let m = XXModel::one_qubit(1.0, kappa, eta).unwrap();
        let d = |t: f64| bloch_trace_distance(reduced_state_1q(&m, a, t).unwrap(), reduced_state_1q(&m, b, t).unwrap());
        prop_assert!(d(t1 + dt) <= d(t1) + 1e-10);
    }
}

#[test]
fn single_letters_anticommute() {
    let x = PauliString::single(1, 0, Pauli::X);
    let z = PauliString::single(1, 0, Pauli::Z);
    let xz = (&x * &z).to_matrix();
    let zx = (&z * &x).to_matrix();
    assert!(max_abs_diff(&xz, &(-zx)) < 1e-15);
}
