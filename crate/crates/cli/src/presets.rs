//! Parameter sets for each published fidelity figure.

use crate::config::{CodeKind, ExperimentConfig, Format, KernelSpec, ModelKind};
use crate::error::{CliError, CliResult};
use crate::output::Table;
use crate::run::{parallel_map, simulate};
use cqec_core::analysis::{asymptotic_infidelity, AsymptoticModel};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Curve {
    /// File-name tag, e.g. `r2`.
    pub tag: String,
    pub config: ExperimentConfig,
    /// Closed-form long-time fidelity, when one exists.
    pub asymptote: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FigurePreset {
    pub id: &'static str,
    pub description: &'static str,
    /// Name of the parameter that varies across curves.
    pub family: &'static str,
    pub curves: Vec<Curve>,
}

const SAMPLES: usize = 201;

fn config(model: ModelKind, code: CodeKind, rates: &[(&str, f64)], kernel: KernelSpec, t_max: f64) -> ExperimentConfig {
    let rates: BTreeMap<String, f64> = rates.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ExperimentConfig { model, code, rates, kernel, t_max, samples: SAMPLES, output: None, format: Format::Csv, sweep: None }
}

fn tag(prefix: &str, v: f64) -> String {
    format!("{prefix}{v}")
}

fn asym(m: AsymptoticModel) -> Option<f64> {
    asymptotic_infidelity(&m).ok().map(|x| 1.0 - x)
}

const RATIOS: [f64; 5] = [0.0, 1.0, 2.0, 5.0, 10.0];
// five-qubit curves separate only for strong correction
const RATIOS_5Q: [f64; 5] = [0.0, 1.0, 5.0, 10.0, 50.0];

pub fn presets() -> Vec<FigurePreset> {
    use CodeKind::*;
    use ModelKind::*;
    let exp1 = KernelSpec::Exponential { a: 1.0, c: 1.0 };
    let damped = KernelSpec::Damped { a: 1.0, b: 1.0, c: 1.0 };
    let ratio_family = |model: ModelKind, code: CodeKind, kernel: KernelSpec, t_max: f64, asymptote: &dyn Fn(f64) -> Option<f64>| {
        let ratios = if code == Q5 { &RATIOS_5Q } else { &RATIOS };
        ratios
            .iter()
            .map(|&r| Curve { tag: tag("r", r), config: config(model, code, &[("gamma", 1.0), ("eta", r)], kernel, t_max), asymptote: asymptote(r) })
            .collect::<Vec<_>>()
    };
    let xx_curves = |code: CodeKind, fixed: (&str, f64), name: &str, values: &[f64], t_max: f64| {
        values
            .iter()
            .map(|&v| {
                let (kappa, eta) = if fixed.0 == "kappa" { (fixed.1, v) } else { (v, fixed.1) };
                let asymptote = (code == Q1).then(|| asym(AsymptoticModel::XX { alpha: 1.0, kappa, eta })).flatten();
                Curve {
                    tag: tag(name, v),
                    config: config(Xx, code, &[("alpha", 1.0), ("kappa", kappa), ("eta", eta)], KernelSpec::Delta, t_max),
                    asymptote,
                }
            })
            .collect::<Vec<_>>()
    };
    vec![
        FigurePreset {
            id: "markov-1q",
            description: "one-qubit Markovian fidelity under bit flips and correction, vs γt, r = η/γ family",
            family: "r",
            curves: ratio_family(Markov, Q1, KernelSpec::Delta, 5.0, &|r| asym(AsymptoticModel::Markov { gamma: 1.0, eta: r })),
        },
        FigurePreset {
            id: "xx-1q-eta",
            description: "one-qubit X-X coupling with cooling rate κ = α, vs αt, η family",
            family: "eta",
            curves: xx_curves(Q1, ("kappa", 1.0), "eta", &[0.0, 0.5, 1.0, 2.0, 4.0], 10.0),
        },
        FigurePreset {
            id: "xx-1q-kappa",
            description: "one-qubit X-X coupling with correction rate η = α, vs αt, r_κ = κ/α family",
            family: "rk",
            curves: xx_curves(Q1, ("eta", 1.0), "rk", &[1.0, 2.0, 4.0, 8.0, 12.0], 10.0),
        },
        FigurePreset {
            id: "pmme-1q-exponential",
            description: "one-qubit PMME with kernel a e^{-ct}, a = c = 1, vs γt, r = η/γ family",
            family: "r",
            curves: ratio_family(Pmme, Q1, exp1, 10.0, &|r| asym(AsymptoticModel::PmmeExponential { a: 1.0, c: 1.0, gamma: 1.0, eta: r })),
        },
        FigurePreset {
            id: "pmme-1q-damped",
            description: "one-qubit PMME with the damped oscillating kernel, a = b = c = 1, vs γt, r = η/γ family",
            family: "r",
            curves: ratio_family(Pmme, Q1, damped, 10.0, &|r| {
                asym(AsymptoticModel::Pmme { kernel: cqec_core::MemoryKernel::damped(1.0, 1.0, 1.0).ok()?, gamma: 1.0, eta: r })
            }),
        },
        FigurePreset {
            id: "markov-3q",
            description: "three-qubit overlap fidelity q0+q1, Markovian, vs γt, r = η/γ family",
            family: "r",
            curves: ratio_family(Markov, Q3, KernelSpec::Delta, 5.0, &|_| Some(0.5)),
        },
        FigurePreset {
            id: "pmme-3q",
            description: "three-qubit overlap fidelity, PMME with kernel e^{-t}, vs γt, η/γ family",
            family: "r",
            curves: ratio_family(Pmme, Q3, exp1, 10.0, &|_| Some(0.5)),
        },
        FigurePreset {
            id: "pmme-3q-c",
            description: "three-qubit overlap fidelity, PMME with kernel c e^{-ct} and η = γ, vs γt, c family",
            family: "c",
            curves: [0.5, 1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|&c| Curve {
                    tag: tag("c", c),
                    config: config(Pmme, Q3, &[("gamma", 1.0), ("eta", 1.0)], KernelSpec::Exponential { a: c, c }, 10.0),
                    asymptote: Some(0.5),
                })
                .collect(),
        },
        FigurePreset {
            id: "xx-3q-cooled",
            description: "three-qubit code, each qubit X-X coupled to a bath qubit cooled at κ = α, vs αt, η family",
            family: "eta",
            curves: xx_curves(Q3, ("kappa", 1.0), "eta", &[0.0, 1.0, 2.0, 4.0], 10.0),
        },
        FigurePreset {
            id: "xx-3q-uncooled",
            description: "three-qubit code, X-X coupling without cooling (κ = 0), vs αt, η family",
            family: "eta",
            curves: xx_curves(Q3, ("kappa", 0.0), "eta", &[0.0, 1.0, 2.0, 4.0], 10.0),
        },
        FigurePreset {
            id: "xx-3q-kappa",
            description: "three-qubit code, X-X coupling with correction rate η = α, vs αt, κ family",
            family: "kappa",
            curves: xx_curves(Q3, ("eta", 1.0), "kappa", &[0.0, 1.0, 4.0, 8.0, 12.0], 10.0),
        },
        FigurePreset {
            id: "markov-5q",
            description: "five-qubit overlap fidelity q0+q1, Markovian depolarizing noise, vs γt, η/γ family",
            family: "r",
            curves: ratio_family(Markov, Q5, KernelSpec::Delta, 0.5, &|_| None),
        },
        FigurePreset {
            id: "pmme-5q",
            description: "five-qubit overlap fidelity, PMME with kernel e^{-t}, vs γt, η/γ family",
            family: "r",
            curves: ratio_family(Pmme, Q5, exp1, 1.0, &|_| None),
        },
    ]
}

pub fn preset(id: &str) -> CliResult<FigurePreset> {
    presets().into_iter().find(|p| p.id == id).ok_or_else(|| {
        let ids: Vec<&str> = presets().iter().map(|p| p.id).collect();
        CliError::Usage(format!("unknown figure '{id}'; known: {}", ids.join(", ")))
    })
}

/// Runs every curve; returns (file stem, table) pairs in preset order.
pub fn run_figure(p: &FigurePreset) -> CliResult<Vec<(String, Table)>> {
    let tables = parallel_map(&p.curves, |c| simulate(&c.config))?;
    Ok(p.curves.iter().zip(tables).map(|(c, t)| (format!("{}_{}", p.id, c.tag), t)).collect())
}

/// Long-time horizon used to confirm that a curve approaches its asymptote.
const LONG_TIME: f64 = 200.0;

/// Problems with one generated curve: fidelity must start at 1 and stay at
/// most 1; a monotone curve must stay above its asymptote, and every curve
/// with an asymptote must reach it at long times.
pub fn curve_violations(curve: &Curve, table: &Table) -> CliResult<Vec<String>> {
    let f = table.column("fidelity").ok_or_else(|| CliError::Numerical("table has no fidelity column".into()))?;
    let mut out = Vec::new();
    if f[0] != 1.0 {
        out.push(format!("{}: starts at {} instead of 1", curve.tag, f[0]));
    }
    let top = f.iter().copied().fold(f64::MIN, f64::max);
    if top > 1.0 + 1e-12 {
        out.push(format!("{}: exceeds 1 ({top})", curve.tag));
    }
    if let Some(a) = curve.asymptote {
        let monotone = f.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let low = f.iter().copied().fold(f64::MAX, f64::min);
        if monotone && low < a - 1e-9 {
            out.push(format!("{}: falls to {low}, below the asymptote {a}", curve.tag));
        }
        let mut long = curve.config.clone();
        long.t_max = LONG_TIME;
        long.samples = 2;
        let end = simulate(&long)?.column("fidelity").expect("fidelity column")[1];
        if (end - a).abs() > 1e-6 {
            out.push(format!("{}: F({LONG_TIME}) = {end}, asymptote {a}", curve.tag));
        }
    }
    Ok(out)
}
