//! Printed five-qubit class matrices (unit rates), transcribed as published,
//! for cell-by-cell comparison with the derived ones.

use nalgebra::DMatrix;

const L1_ROWS: [&str; 16] = [
    "-15 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "15 -13 2 2 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 4 -15 2 3 1 0 0 0 0 0 0 0 0 0 0",
    "0 8 4 -13 0 2 3 0 0 0 0 0 0 0 0 0",
    "0 0 3 0 -15 1 0 0 1 0 4 0 0 0 0 0",
    "0 0 6 6 6 -12 6 4 3 2 0 0 0 0 0 0",
    "0 0 0 3 0 2 -15 0 0 2 0 0 0 0 0 0",
    "0 0 0 0 0 2 0 -15 3 2 0 0 3 1 0 0",
    "0 0 0 0 4 2 0 4 -14 2 8 4 2 0 2 0",
    "0 0 0 0 0 2 6 4 3 -11 0 0 0 4 0 0",
    "0 0 0 0 2 0 0 0 1 0 -15 1 0 0 0 5",
    "0 0 0 0 0 0 0 0 1 0 2 -14 2 0 2 10",
    "0 0 0 0 0 0 0 2 1 0 0 4 -12 2 2 0",
    "0 0 0 0 0 0 0 1 0 2 0 0 3 -11 6 0",
    "0 0 0 0 0 0 0 0 1 1 0 4 2 4 -15 0",
    "0 0 0 0 0 0 0 0 0 0 1 1 0 0 0 -15",
];

const L0_ROWS: [&str; 16] = [
    "0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 -1 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 -1 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 0 -1 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 0 0 -1 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 1 1 1 -1/3 1 2/3 1/2 1/3 0 0 0 0 0 0",
    "0 0 0 0 0 0 -1 0 0 0 0 0 0 0 0 0",
    "0 0 0 0 0 1/3 0 -5/6 1/2 1/3 0 0 1/2 1/6 0 0",
    "0 0 0 0 0 0 0 0 -1 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 -1 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 -1 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 0 -1 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 0 0 -1 0 0 0",
    "0 0 0 0 0 0 0 1/6 0 1/3 0 0 1/2 -1/6 1 0",
    "0 0 0 0 0 0 0 0 0 0 0 0 0 0 -1 0",
    "0 0 0 0 0 0 0 0 0 0 1 1 0 0 0 0",
];

fn cell(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

fn parse(rows: &[&str; 16]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(16, 16);
    for (i, row) in rows.iter().enumerate() {
        for (j, tok) in row.split_whitespace().enumerate() {
            m[(i, j)] = cell(tok);
        }
    }
    m
}

/// Depolarizing dissipator, per unit γ.
pub fn printed_l1() -> DMatrix<f64> {
    parse(&L1_ROWS)
}

/// Correction generator, per unit η.
pub fn printed_l0() -> DMatrix<f64> {
    parse(&L0_ROWS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellDiff {
    pub row: usize,
    pub col: usize,
    pub derived: f64,
    pub printed: f64,
}

pub fn cell_diffs(derived: &DMatrix<f64>, printed: &DMatrix<f64>, tol: f64) -> Vec<CellDiff> {
    let mut out = Vec::new();
    for j in 0..derived.ncols() {
        for i in 0..derived.nrows() {
            let (a, b) = (derived[(i, j)], printed[(i, j)]);
            if (a - b).abs() > tol {
                out.push(CellDiff { row: i, col: j, derived: a, printed: b });
            }
        }
    }
    out
}
