//! `key = value` experiment files with `[section]` headers and `#` comments.
//!
//! ```text
//! [experiment]
//! model = pmme        # markov | xx | pmme
//! code = q3           # q1 | q3 | q5
//! [rates]
//! gamma = 1
//! eta = 1
//! [kernel]
//! kind = exponential  # delta | exponential | damped
//! a = 1
//! c = 1
//! [time]
//! t_max = 5
//! samples = 101
//! [output]
//! path = out.csv
//! format = csv
//! [sweep]
//! axis = eta
//! values = 0, 1, 2
//! ```

use crate::error::{CliError, CliResult};
use cqec_core::MemoryKernel;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Markov,
    Xx,
    Pmme,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Markov => "markov",
            ModelKind::Xx => "xx",
            ModelKind::Pmme => "pmme",
        }
    }

    pub fn required_rates(self) -> &'static [&'static str] {
        match self {
            ModelKind::Markov | ModelKind::Pmme => &["gamma", "eta"],
            ModelKind::Xx => &["alpha", "kappa", "eta"],
        }
    }
}

impl FromStr for ModelKind {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "markov" => Ok(ModelKind::Markov),
            "xx" => Ok(ModelKind::Xx),
            "pmme" => Ok(ModelKind::Pmme),
            _ => Err(CliError::Usage(format!("experiment.model: unknown model '{s}' (markov, xx, pmme)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    Q1,
    Q3,
    Q5,
}

impl CodeKind {
    pub fn name(self) -> &'static str {
        match self {
            CodeKind::Q1 => "q1",
            CodeKind::Q3 => "q3",
            CodeKind::Q5 => "q5",
        }
    }

    pub fn code(self) -> cqec_core::StabilizerCode {
        match self {
            CodeKind::Q1 => cqec_core::one_qubit_code(),
            CodeKind::Q3 => cqec_core::three_qubit_code(),
            CodeKind::Q5 => cqec_core::five_qubit_code(),
        }
    }
}

impl FromStr for CodeKind {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "q1" => Ok(CodeKind::Q1),
            "q3" => Ok(CodeKind::Q3),
            "q5" => Ok(CodeKind::Q5),
            _ => Err(CliError::Usage(format!("experiment.code: unknown code '{s}' (q1, q3, q5)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Delta,
    Exponential { a: f64, c: f64 },
    Damped { a: f64, b: f64, c: f64 },
}

impl KernelSpec {
    pub fn build(&self) -> CliResult<MemoryKernel> {
        Ok(match *self {
            KernelSpec::Delta => MemoryKernel::delta(),
            KernelSpec::Exponential { a, c } => MemoryKernel::exponential(a, c)?,
            KernelSpec::Damped { a, b, c } => MemoryKernel::damped(a, b, c)?,
        })
    }

    /// Overrides one kernel parameter by name.
    pub fn with_param(&self, name: &str, v: f64) -> Option<KernelSpec> {
        match (*self, name) {
            (KernelSpec::Exponential { c, .. }, "a") => Some(KernelSpec::Exponential { a: v, c }),
            (KernelSpec::Exponential { a, .. }, "c") => Some(KernelSpec::Exponential { a, c: v }),
            (KernelSpec::Damped { b, c, .. }, "a") => Some(KernelSpec::Damped { a: v, b, c }),
            (KernelSpec::Damped { a, c, .. }, "b") => Some(KernelSpec::Damped { a, b: v, c }),
            (KernelSpec::Damped { a, b, .. }, "c") => Some(KernelSpec::Damped { a, b, c: v }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("output.format: unknown format '{s}' (csv, json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub code: CodeKind,
    pub rates: BTreeMap<String, f64>,
    pub kernel: KernelSpec,
    pub t_max: f64,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub sweep: Option<SweepSpec>,
}

const RATE_NAMES: [&str; 4] = ["gamma", "eta", "alpha", "kappa"];

impl ExperimentConfig {
    pub fn rate(&self, name: &str) -> f64 {
        self.rates.get(name).copied().unwrap_or(0.0)
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n).map(|k| if k == n { self.t_max } else { self.t_max * k as f64 / n as f64 }).collect()
    }

    pub fn validate(&self) -> CliResult<()> {
        for r in self.model.required_rates() {
            match self.rates.get(*r) {
                None => return Err(CliError::Usage(format!("rates.{r}: required for model {}", self.model.name()))),
                Some(v) if !(*v >= 0.0 && v.is_finite()) => {
                    return Err(CliError::Usage(format!("rates.{r}: must be a non-negative number, got {v}")))
                }
                _ => {}
            }
        }
        if self.model == ModelKind::Xx {
            if !(self.rate("alpha") > 0.0) {
                return Err(CliError::Usage("rates.alpha: must be positive".into()));
            }
            if self.code == CodeKind::Q5 {
                return Err(CliError::Usage("experiment.code: the xx model needs a bit-flip code (q1 or q3)".into()));
            }
        }
        if self.model != ModelKind::Pmme && self.kernel != KernelSpec::Delta {
            return Err(CliError::Usage(format!("kernel: only the pmme model takes a kernel (model is {})", self.model.name())));
        }
        if self.model == ModelKind::Pmme {
            self.kernel.build().map_err(|e| CliError::Usage(format!("kernel: {e}")))?;
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(CliError::Usage(format!("time.t_max: must be positive, got {}", self.t_max)));
        }
        if self.samples < 2 {
            return Err(CliError::Usage(format!("time.samples: at least 2 required, got {}", self.samples)));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(CliError::Usage("sweep.values: at least one value required".into()));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current = String::from("experiment");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Usage(format!("line {}: malformed section header '{line}'", lineno + 1)))?;
                current = name.trim().to_string();
                if !["experiment", "rates", "kernel", "time", "output", "sweep"].contains(&current.as_str()) {
                    return Err(CliError::Usage(format!("line {}: unknown section [{current}]", lineno + 1)));
                }
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value, got '{line}'", lineno + 1)))?;
            let entry = sections.entry(current.clone()).or_default();
            if entry.insert(k.trim().to_string(), (lineno + 1, v.trim().to_string())).is_some() {
                return Err(CliError::Usage(format!("line {}: duplicate key {current}.{}", lineno + 1, k.trim())));
            }
        }
        let mut take = |sec: &str, key: &str| sections.get_mut(sec).and_then(|m| m.remove(key)).map(|(_, v)| v);
        let num = |field: &str, v: String| -> CliResult<f64> {
            v.parse::<f64>().map_err(|_| CliError::Usage(format!("{field}: not a number: '{v}'")))
        };

        let model: ModelKind = take("experiment", "model")
            .ok_or_else(|| CliError::Usage("experiment.model: required".into()))?
            .parse()?;
        let code: CodeKind = take("experiment", "code").map(|s| s.parse()).transpose()?.unwrap_or(CodeKind::Q1);
        let mut rates = BTreeMap::new();
        for r in RATE_NAMES {
            if let Some(v) = take("rates", r) {
                rates.insert(r.to_string(), num(&format!("rates.{r}"), v)?);
            }
        }
        let kernel = match take("kernel", "kind").as_deref() {
            None | Some("delta") => KernelSpec::Delta,
            Some("exponential") => KernelSpec::Exponential {
                a: take("kernel", "a").map(|v| num("kernel.a", v)).transpose()?.unwrap_or(1.0),
                c: take("kernel", "c").map(|v| num("kernel.c", v)).transpose()?.unwrap_or(1.0),
            },
            Some("damped") => KernelSpec::Damped {
                a: take("kernel", "a").map(|v| num("kernel.a", v)).transpose()?.unwrap_or(1.0),
                b: take("kernel", "b").map(|v| num("kernel.b", v)).transpose()?.unwrap_or(1.0),
                c: take("kernel", "c").map(|v| num("kernel.c", v)).transpose()?.unwrap_or(1.0),
            },
            Some(other) => return Err(CliError::Usage(format!("kernel.kind: unknown kernel '{other}' (delta, exponential, damped)"))),
        };
        let t_max = num("time.t_max", take("time", "t_max").ok_or_else(|| CliError::Usage("time.t_max: required".into()))?)?;
        let samples = match take("time", "samples") {
            Some(v) => v.parse::<usize>().map_err(|_| CliError::Usage(format!("time.samples: not a count: '{v}'")))?,
            None => 101,
        };
        let output = take("output", "path").map(PathBuf::from);
        let format = take("output", "format").map(|s| s.parse()).transpose()?.unwrap_or_default();
        let sweep = match take("sweep", "axis") {
            None => None,
            Some(axis) => {
                let vals = take("sweep", "values").ok_or_else(|| CliError::Usage("sweep.values: required with sweep.axis".into()))?;
                Some(SweepSpec { axis, values: parse_values(&vals)? })
            }
        };
        for (sec, rest) in &sections {
            if let Some((key, (line, _))) = rest.iter().next() {
                return Err(CliError::Usage(format!("line {line}: unknown field {sec}.{key}")));
            }
        }
        let cfg = ExperimentConfig { model, code, rates, kernel, t_max, samples, output, format, sweep };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Copy with one rate or kernel parameter replaced.
    pub fn with_axis(&self, axis: &str, v: f64) -> CliResult<Self> {
        let mut out = self.clone();
        if RATE_NAMES.contains(&axis) {
            if !self.model.required_rates().contains(&axis) {
                return Err(CliError::Usage(format!("sweep.axis: rate '{axis}' is not defined for model {}", self.model.name())));
            }
            out.rates.insert(axis.to_string(), v);
        } else if let Some(k) = self.kernel.with_param(axis, v) {
            out.kernel = k;
        } else {
            return Err(CliError::Usage(format!("sweep.axis: '{axis}' is not a rate or kernel parameter of this experiment")));
        }
        out.sweep = None;
        out.validate()?;
        Ok(out)
    }
}

/// `1, 2, 3` or `start:stop:points`.
pub fn parse_values(s: &str) -> CliResult<Vec<f64>> {
    let bad = |v: &str| CliError::Usage(format!("sweep.values: not a number: '{v}'"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!("sweep.values: expected start:stop:points, got '{s}'")));
        }
        let a: f64 = parts[0].parse().map_err(|_| bad(parts[0]))?;
        let b: f64 = parts[1].parse().map_err(|_| bad(parts[1]))?;
        let n: usize = parts[2].parse().map_err(|_| bad(parts[2]))?;
        if n < 2 {
            return Err(CliError::Usage("sweep.values: a range needs at least 2 points".into()));
        }
        return Ok((0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect());
    }
    s.split(',').map(str::trim).filter(|v| !v.is_empty()).map(|v| v.parse().map_err(|_| bad(v))).collect()
}
