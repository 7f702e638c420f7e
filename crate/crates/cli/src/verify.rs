//! Oracle cross-checks behind `cqec verify`.

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::reference::{cell_diffs, printed_l0, printed_l1, CellDiff};
use cqec_core::analysis::{nonmarkovianity_closed, nonmarkovianity_family_exact, nonmarkovianity_numeric, xx_period};
use cqec_core::codes::{class_oracle, reduce_to_classes, ClassGenerator, ClassPartition};
use cqec_core::lindblad::{closed_form_1q, closed_form_3q_coeffs, propagate, stationary_state, MarkovModel, SystemState};
use cqec_core::numerics::{eigenvalues, matrix_exponential, nullspace, to_real};
use cqec_core::pmme::{fidelity_pmme_3q_closed, pmme_3q, pmme_propagate, xi_chi_closed_form};
use cqec_core::xxbath::{build_xx_superoperator, initial_vector_1q, reduced_bloch, xx_coefficients, xx_stationary_d, XXSuperoperator};
use cqec_core::{five_qubit_code, one_qubit_code, three_qubit_code, DensityMatrix, MemoryKernel, PmmeModel, XXModel, C64};
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scope {
    All,
    ClosedForms,
    ClassMatrices,
    Measure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub deviation: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `deviation <= tolerance`; NaN fails.
    pub fn new(name: impl Into<String>, tolerance: f64, deviation: f64) -> Self {
        Check { name: name.into(), tolerance, deviation, pass: deviation <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffEntry {
    pub matrix: &'static str,
    pub row: usize,
    pub col: usize,
    pub derived: f64,
    pub printed: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    /// Cells where the derived five-qubit matrices differ from the printed ones.
    pub cell_diffs: Vec<DiffEntry>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => {
                let mut s = String::from("check,tolerance,deviation,pass\n");
                for c in &self.checks {
                    s += &format!("{},{:e},{:.6e},{}\n", c.name, c.tolerance, c.deviation, if c.pass { "pass" } else { "fail" });
                }
                if !self.cell_diffs.is_empty() {
                    s += "\nmatrix,row,col,derived,printed\n";
                    for d in &self.cell_diffs {
                        s += &format!("{},{},{},{},{}\n", d.matrix, d.row, d.col, d.derived, d.printed);
                    }
                }
                s
            }
        }
    }

    pub fn into_result(self) -> CliResult<Self> {
        if self.passed() {
            Ok(self)
        } else {
            let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            Err(CliError::Verification(format!("failed checks: {}", failed.join(", "))))
        }
    }
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken computation fails its check
    it.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

pub fn closed_form_checks() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let ratios = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0];
    let r0 = [0.6, 0.0, 0.8];
    let rho0 = DensityMatrix::from_bloch(r0[0], r0[1], r0[2])?;
    let mut dev = 0.0f64;
    let mut asym = 0.0f64;
    for &r in &ratios {
        let model = MarkovModel::for_code(one_qubit_code(), 1.0, r)?;
        for &t in &grid(10.0, 41) {
            let st = propagate(&model, &SystemState::Density(rho0.clone()), t)?;
            let b = st.as_density().expect("density in, density out").bloch()?;
            let want = closed_form_1q(r0[0], r0[1], r0[2], 1.0, r, t);
            dev = max_of([dev, (b[0] - want[0]).abs(), (b[1] - want[1]).abs(), (b[2] - want[2]).abs()]);
        }
        let ground = SystemState::Density(DensityMatrix::basis_state(1, 0));
        let st = stationary_state(&model, &ground)?;
        let f = st.as_density().expect("density").bloch()?[2] * 0.5 + 0.5;
        asym = max_of([asym, (f - (1.0 + r) / (2.0 + r)).abs()]);
    }
    out.push(Check::new("markov-1q-closed-vs-expm", 1e-9, dev));
    out.push(Check::new("markov-1q-asymptote", 1e-12, asym));

    let mut dev = 0.0f64;
    let mut dstat = 0.0f64;
    for kappa in [1.0, 4.0, 8.0 - 1e-6, 8.0, 8.0 + 1e-6, 12.0] {
        for eta in [0.0, 1.0, 4.0] {
            let model = XXModel::one_qubit(1.0, kappa, eta)?;
            let XXSuperoperator::Pauli(sup) = build_xx_superoperator(&model)? else {
                return Err(CliError::Numerical("one-qubit X-X model built a sparse generator".into()));
            };
            let vy = initial_vector_1q([0.0, 1.0, 0.0]);
            let vz = initial_vector_1q([0.0, 0.0, 1.0]);
            for &t in &grid(10.0, 21) {
                let e = matrix_exponential(&sup.matrix, t)?;
                let by = reduced_bloch(&(&e * &vy));
                let bz = reduced_bloch(&(&e * &vz));
                let (c, d) = xx_coefficients(1.0, kappa, eta, t);
                dev = max_of([dev, (by[1] - c).abs(), (bz[2] - c - d).abs()]);
            }
            let e = matrix_exponential(&sup.matrix, 400.0)?;
            let d_num = reduced_bloch(&(&e * &initial_vector_1q([0.0, 0.0, 0.0])))[2];
            dstat = max_of([dstat, (d_num - xx_stationary_d(1.0, kappa, eta)).abs()]);
        }
    }
    out.push(Check::new("xx-1q-closed-vs-superoperator", 1e-8, dev));
    out.push(Check::new("xx-1q-stationary-d", 1e-10, dstat));

    let (a, c, g, e) = (1.0, 1.0, 1.0, 1.0);
    let model = PmmeModel::for_code(&one_qubit_code(), g, e, MemoryKernel::exponential(a, c)?)?;
    let tg = grid(10.0, 41);
    let sol = pmme_propagate(&model, &[0.5, 0.0, 0.5, 0.5], &tg)?;
    let mut dev = 0.0f64;
    for (t, v) in tg.iter().zip(&sol.states) {
        let (xi, chi) = xi_chi_closed_form(a, c, g, e, *t)?;
        dev = max_of([dev, (2.0 * v[2] - xi).abs(), (v[3] - v[2] - chi).abs()]);
    }
    out.push(Check::new("pmme-1q-xi-chi-vs-solver", 1e-8, dev));

    let mut dev = 0.0f64;
    for r in ratios {
        let model = MarkovModel::for_code(three_qubit_code(), 1.0, r)?;
        for &t in &grid(5.0, 26) {
            let st = propagate(&model, &SystemState::no_error(4), t)?;
            let q = st.as_classes().expect("class state");
            let want = closed_form_3q_coeffs(1.0, r, t);
            dev = max_of(q.iter().zip(want).map(|(a, b)| (a - b).abs()).chain([dev]));
        }
    }
    out.push(Check::new("markov-3q-coefficients-vs-classes", 1e-9, dev));

    let mut dev = 0.0f64;
    for c in [0.5, 1.0, 5.0] {
        let tg = grid(10.0, 41);
        let num = pmme_3q(&MemoryKernel::normalized_exponential(c)?, 1.0, 1.0, &tg)?;
        for (t, f) in tg.iter().zip(num) {
            dev = max_of([dev, (fidelity_pmme_3q_closed(c, 1.0, 1.0, *t)? - f).abs()]);
        }
    }
    out.push(Check::new("pmme-3q-closed-vs-solver", 1e-8, dev));
    Ok(out)
}

fn re(m: &DMatrix<C64>) -> CliResult<DMatrix<f64>> {
    Ok(to_real(m, 1e-12)?)
}

fn spectrum_deviation(found: &[C64], want: &[f64]) -> f64 {
    if found.len() != want.len() {
        return f64::INFINITY;
    }
    let mut f: Vec<C64> = found.to_vec();
    f.sort_by(|a, b| b.re.total_cmp(&a.re));
    let mut w = want.to_vec();
    w.sort_by(|a, b| b.total_cmp(a));
    max_of(f.iter().zip(w).map(|(z, x)| (z - C64::new(x, 0.0)).norm()))
}

pub fn class_matrix_checks() -> CliResult<(Vec<Check>, Vec<DiffEntry>)> {
    let mut out = Vec::new();
    let code = five_qubit_code();
    let sizes = ClassPartition::for_code(&code)?.sizes();
    let table = [1usize, 15, 30, 60, 30, 180, 60, 90, 120, 180, 15, 30, 60, 90, 60, 3];
    let mismatched = sizes.iter().zip(table).filter(|(a, b)| **a != *b).count() + sizes.len().abs_diff(table.len());
    out.push(Check::new("5q-class-sizes", 0.0, mismatched as f64));

    let l1 = reduce_to_classes(&code, ClassGenerator::DepolarizingDissipator)?;
    let l0 = reduce_to_classes(&code, ClassGenerator::Correction)?;
    let (l1r, l0r) = (re(&l1.matrix)?, re(&l0.matrix)?);
    let colsum = |m: &DMatrix<f64>| max_of((0..m.ncols()).map(|j| m.column(j).sum().abs()));
    out.push(Check::new("5q-l1-column-sums", 1e-12, colsum(&l1r)));
    out.push(Check::new("5q-gamma-column-sums", 1e-12, colsum(&l0r)));

    let want_l1 = [0.0, -4.0, -8.0, -8.0, -12.0, -12.0, -12.0, -16.0, -16.0, -16.0, -16.0, -20.0, -20.0, -20.0, -20.0, -20.0];
    out.push(Check::new("5q-l1-spectrum", 1e-9, spectrum_deviation(&eigenvalues(&l1.matrix)?, &want_l1)));

    let ns = nullspace(&l1.matrix, 1e-10)?;
    let null_dev = if ns.len() != 1 {
        f64::INFINITY
    } else {
        let v = &ns[0];
        max_of(v.iter().zip(&table).map(|(x, s)| (x / v[0] - C64::new(*s as f64, 0.0)).norm() / *s as f64))
    };
    out.push(Check::new("5q-l1-nullspace-multiplicities", 1e-9, null_dev));

    let allowed = [0.0, -1.0, (-2.0 + 2f64.sqrt()) / 3.0, (-2.0 - 2f64.sqrt()) / 3.0];
    let ev = eigenvalues(&l0.matrix)?;
    let off = max_of(ev.iter().map(|z| allowed.iter().map(|a| (z - C64::new(*a, 0.0)).norm()).fold(f64::INFINITY, f64::min)));
    out.push(Check::new("5q-gamma-spectrum", 1e-9, off));
    let nullity = nullspace(&l0.matrix, 1e-10)?.len();
    out.push(Check::new("5q-gamma-nullity-3", 0.0, nullity.abs_diff(3) as f64));

    for (label, code, gens) in [
        ("3q", three_qubit_code(), [ClassGenerator::BitFlipDissipator, ClassGenerator::Correction]),
        ("5q", five_qubit_code(), [ClassGenerator::DepolarizingDissipator, ClassGenerator::Correction]),
    ] {
        for g in gens {
            let oracle = class_oracle(&code, g)?;
            let reduced = re(&reduce_to_classes(&code, g)?.matrix)?;
            let dev = (&oracle.lumped - &reduced).abs().max();
            let name = match g {
                ClassGenerator::Correction => "gamma",
                _ => "dissipator",
            };
            out.push(Check::new(format!("{label}-{name}-full-space-oracle"), 1e-12, dev));
        }
    }

    let mut diffs = Vec::new();
    for (name, derived, printed) in [("L1", &l1r, printed_l1()), ("L0", &l0r, printed_l0())] {
        for CellDiff { row, col, derived, printed } in cell_diffs(derived, &printed, 1e-12) {
            diffs.push(DiffEntry { matrix: name, row, col, derived, printed });
        }
    }
    Ok((out, diffs))
}

pub fn measure_checks() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let mut dev_closed = 0.0f64;
    let mut dev_family = 0.0f64;
    for (kappa, eta) in [(1.0, 0.5), (0.0, 1.0)] {
        let model = XXModel::one_qubit(1.0, kappa, eta)?;
        let period = xx_period(1.0, kappa).expect("oscillating regime");
        let est = nonmarkovianity_numeric(&model, 20.0 * period, period / 2000.0)?;
        dev_closed = max_of([dev_closed, (est.value / nonmarkovianity_closed(1.0, kappa, eta) - 1.0).abs()]);
        dev_family = max_of([dev_family, (est.value / nonmarkovianity_family_exact(1.0, kappa, eta) - 1.0).abs()]);
    }
    out.push(Check::new("measure-vs-closed-form", 1e-2, dev_closed));
    out.push(Check::new("measure-vs-exact-pair-family", 1e-3, dev_family));
    let strong = nonmarkovianity_numeric(&XXModel::one_qubit(1.0, 12.0, 0.5)?, 20.0, 0.01)?;
    out.push(Check::new("measure-zero-overdamped", 0.0, strong.value.abs()));
    let free = nonmarkovianity_numeric(&XXModel::one_qubit(1.0, 0.0, 0.0)?, 10.0, 0.005)?;
    out.push(Check::new("measure-unbounded-flag", 0.0, if free.unbounded { 0.0 } else { 1.0 }));
    Ok(out)
}

/// Runs the checks in `scope`. The report is returned even when checks fail;
/// use [`Report::into_result`] to turn failures into an error.
pub fn run(scope: Scope) -> CliResult<Report> {
    let mut report = Report::default();
    if matches!(scope, Scope::All | Scope::ClosedForms) {
        report.checks.extend(closed_form_checks()?);
    }
    if matches!(scope, Scope::All | Scope::ClassMatrices) {
        let (checks, diffs) = class_matrix_checks()?;
        report.checks.extend(checks);
        report.cell_diffs = diffs;
    }
    if matches!(scope, Scope::All | Scope::Measure) {
        report.checks.extend(measure_checks()?);
    }
    Ok(report)
}
