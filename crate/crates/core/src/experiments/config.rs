//! Experiment configuration files.
//!
//! ```text
//! # comment
//! [bmo-spike]
//! kind = bmo-sweep
//! spec = spike:level=2,target=10@B=6
//! lambda = geom:0.01,100,41
//! ```
//!
//! Each `[id]` section is one experiment. Keys by kind:
//!
//! - `bmo-sweep`: `spec`, `lambda`
//! - `exp-summability`: `spec`, `A` (default 1), `m`, `probes`, `epsilon`, `fit_from`
//! - `phi-means-1d`: `spec`, `phi` (default `exp:1`), `m`, `probes`, `epsilon`, `fit_from`
//! - `weak-type`: `operator`, `specs` (`;`-separated), `count`, `lambda`
//!
//! Every section accepts `seed`. Value forms: `lambda = geom:lo,hi,count` or
//! an explicit list `l1,l2,...`; `m = pow2:lo,hi` (powers of two in range) or
//! a list; `probes = x,y; x,y` (2D) or `x; x` (1D), coordinates in `[0,1)`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Result, WssError};
use crate::means::PhiFunction;

use super::function_spec::FunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakOperator {
    M,
    M1,
    M2,
    V,
    V1,
    V2,
    SchRatio,
}

impl WeakOperator {
    pub fn name(self) -> &'static str {
        match self {
            WeakOperator::M => "M",
            WeakOperator::M1 => "M1",
            WeakOperator::M2 => "M2",
            WeakOperator::V => "V",
            WeakOperator::V1 => "V1",
            WeakOperator::V2 => "V2",
            WeakOperator::SchRatio => "Sch-ratio",
        }
    }

    /// Whether the operator acts on 1D functions.
    pub fn is_1d(self) -> bool {
        matches!(self, WeakOperator::V | WeakOperator::SchRatio)
    }
}

impl FromStr for WeakOperator {
    type Err = WssError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "M" => WeakOperator::M,
            "M1" => WeakOperator::M1,
            "M2" => WeakOperator::M2,
            "V" => WeakOperator::V,
            "V1" => WeakOperator::V1,
            "V2" => WeakOperator::V2,
            "Sch-ratio" => WeakOperator::SchRatio,
            other => {
                return Err(WssError::usage(format!(
                    "unknown operator '{other}' (expected M, M1, M2, V, V1, V2 or Sch-ratio)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct SummabilitySetup {
    pub spec: FunctionSpec,
    pub phi: PhiFunction,
    /// Explicit probe coordinates; `None` selects the default probes.
    pub probes: Option<Vec<Vec<f64>>>,
    /// `None` selects `1, 2, 4, ..., 2^B`.
    pub ms: Option<Vec<usize>>,
    pub epsilon: f64,
    pub fit_from: usize,
}

#[derive(Debug, Clone)]
pub enum Experiment {
    BmoSweep {
        spec: FunctionSpec,
        lambdas: Vec<f64>,
    },
    ExpSummability(SummabilitySetup),
    PhiMeans1D(SummabilitySetup),
    WeakType {
        operator: WeakOperator,
        specs: Vec<FunctionSpec>,
        count: usize,
        lambdas: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub id: String,
    pub seed: Option<u64>,
    pub experiment: Experiment,
}

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_FIT_FROM: usize = 8;

/// Default λ grid: 41 geometric points from `10^{-2}` to `10^{2}`.
pub fn default_lambdas() -> Vec<f64> {
    geometric_grid(0.01, 100.0, 41)
}

/// `count` points `lo·(hi/lo)^{i/(count-1)}`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo * (ratio * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Parses a whole config file into experiments ordered by id.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let id = rest
                .strip_suffix(']')
                .ok_or_else(|| WssError::config(line_no, "unterminated section header"))?
                .trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(WssError::config(line_no, format!("invalid experiment id '{id}'")));
            }
            if sections.iter().any(|s| s.id == id) {
                return Err(WssError::config(line_no, format!("duplicate experiment id '{id}'")));
            }
            sections.push(Section {
                id: id.to_string(),
                line: line_no,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| WssError::config(line_no, "expected key = value"))?;
        let section = sections
            .last_mut()
            .ok_or_else(|| WssError::config(line_no, "key outside any [section]"))?;
        let key = key.trim().to_string();
        if section.entries.contains_key(&key) {
            return Err(WssError::config(line_no, format!("duplicate key '{key}'")));
        }
        section.entries.insert(key, (line_no, value.trim().to_string()));
    }
    let mut out = sections
        .into_iter()
        .map(Section::into_config)
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

struct Section {
    id: String,
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<(usize, String)> {
        self.take(key)
            .ok_or_else(|| WssError::config(self.line, format!("[{}] missing '{key}'", self.id)))
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| WssError::config(line, format!("invalid {key} '{v}'"))),
        }
    }

    fn spec(&mut self, key: &str) -> Result<FunctionSpec> {
        let (line, v) = self.required(key)?;
        v.parse().map_err(|e| WssError::config(line, format!("{e}")))
    }

    fn lambdas(&mut self) -> Result<Vec<f64>> {
        let Some((line, v)) = self.take("lambda") else {
            return Ok(default_lambdas());
        };
        let grid = parse_lambda_grid(&v).map_err(|m| WssError::config(line, m))?;
        Ok(grid)
    }

    fn summability(&mut self, default_phi: PhiFunction) -> Result<SummabilitySetup> {
        let spec = self.spec("spec")?;
        let phi = match (self.take("phi"), self.take("A")) {
            (Some(_), Some((line, _))) => {
                return Err(WssError::config(line, "give either phi or A, not both"))
            }
            (Some((line, v)), None) => v
                .parse()
                .map_err(|e: WssError| WssError::config(line, e.to_string()))?,
            (None, Some((line, v))) => {
                let a: f64 = v
                    .parse()
                    .map_err(|_| WssError::config(line, format!("invalid A '{v}'")))?;
                PhiFunction::ExpMinusOne(a)
            }
            (None, None) => default_phi,
        };
        let phi_line = self.line;
        phi.validate()
            .map_err(|e| WssError::config(phi_line, e.to_string()))?;
        let ms = match self.take("m") {
            None => None,
            Some((line, v)) => Some(parse_m_grid(&v).map_err(|m| WssError::config(line, m))?),
        };
        let probes = match self.take("probes") {
            None => None,
            Some((line, v)) => Some(parse_probes(&v).map_err(|m| WssError::config(line, m))?),
        };
        let epsilon = self.parsed("epsilon")?.unwrap_or(DEFAULT_EPSILON);
        let fit_from = self.parsed("fit_from")?.unwrap_or(DEFAULT_FIT_FROM);
        Ok(SummabilitySetup {
            spec,
            phi,
            probes,
            ms,
            epsilon,
            fit_from,
        })
    }

    fn into_config(mut self) -> Result<ExperimentConfig> {
        let (kind_line, kind) = self.required("kind")?;
        let seed = self.parsed("seed")?;
        let experiment = match kind.as_str() {
            "bmo-sweep" => Experiment::BmoSweep {
                spec: self.spec("spec")?,
                lambdas: self.lambdas()?,
            },
            "exp-summability" => Experiment::ExpSummability(self.summability(PhiFunction::ExpMinusOne(1.0))?),
            "phi-means-1d" => Experiment::PhiMeans1D(self.summability(PhiFunction::ExpMinusOne(1.0))?),
            "weak-type" => {
                let (line, op) = self.required("operator")?;
                let operator = op
                    .parse()
                    .map_err(|e: WssError| WssError::config(line, e.to_string()))?;
                let (line, list) = self.required("specs")?;
                let specs = list
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|e: WssError| WssError::config(line, e.to_string())))
                    .collect::<Result<Vec<FunctionSpec>>>()?;
                if specs.is_empty() {
                    return Err(WssError::config(line, "empty spec family"));
                }
                let count = self.parsed("count")?.unwrap_or(1usize);
                if count == 0 {
                    return Err(WssError::config(self.line, "count must be at least 1"));
                }
                Experiment::WeakType {
                    operator,
                    specs,
                    count,
                    lambdas: self.lambdas()?,
                }
            }
            other => {
                return Err(WssError::config(
                    kind_line,
                    format!("unknown experiment kind '{other}'"),
                ))
            }
        };
        if let Some((key, (line, _))) = self.entries.iter().next() {
            return Err(WssError::config(*line, format!("unknown key '{key}' for {kind}")));
        }
        Ok(ExperimentConfig {
            id: self.id,
            seed,
            experiment,
        })
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("invalid {what} '{}'", t.trim())))
        .collect()
}

pub fn parse_lambda_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let grid = if let Some(rest) = s.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err("geom grid needs lo,hi,count".into());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| "invalid geom lo")?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| "invalid geom hi")?;
        let count: usize = parts[2].trim().parse().map_err(|_| "invalid geom count")?;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || count == 0 {
            return Err("geom grid needs 0 < lo < hi and count >= 1".into());
        }
        geometric_grid(lo, hi, count)
    } else {
        parse_list(s, "λ")?
    };
    if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err("λ values must be positive and finite".into());
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err("λ grid must be strictly increasing".into());
    }
    Ok(grid)
}

pub fn parse_m_grid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let grid: Vec<usize> = if let Some(rest) = s.strip_prefix("pow2:") {
        let bounds: Vec<usize> = parse_list(rest, "m bound")?;
        if bounds.len() != 2 || bounds[0] == 0 || bounds[0] > bounds[1] {
            return Err("pow2 grid needs 1 <= lo <= hi".into());
        }
        let mut m = bounds[0].next_power_of_two();
        let mut out = Vec::new();
        while m <= bounds[1] {
            out.push(m);
            m *= 2;
        }
        out
    } else {
        parse_list(s, "m")?
    };
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err("m grid must be nonempty, positive and strictly increasing".into());
    }
    Ok(grid)
}

pub fn parse_probes(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    let probes: Vec<Vec<f64>> = s
        .split(';')
        .map(|p| parse_list(p, "probe coordinate"))
        .collect::<std::result::Result<_, _>>()?;
    let dim = probes[0].len();
    if probes.iter().any(|p| p.len() != dim) {
        return Err("probes must all have the same dimension".into());
    }
    if probes.iter().flatten().any(|c| !(0.0..1.0).contains(c)) {
        return Err("probe coordinates must lie in [0,1)".into());
    }
    Ok(probes)
}
