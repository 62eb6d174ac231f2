//! Experiment reports and their CSV form.
//!
//! Schema: `experiment,spec,B,seed,param,lambda_or_m,value`. Reals are
//! written with 17 significant digits (`{:.16e}`) so they read back exactly.

use std::io::Write;

use crate::error::{Result, WssError};

use super::function_spec::GeneratedFunction;

pub const CSV_HEADER: [&str; 7] = ["experiment", "spec", "B", "seed", "param", "lambda_or_m", "value"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Abscissa {
    None,
    Index(usize),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub param: String,
    pub at: Abscissa,
    pub value: f64,
}

impl Sample {
    pub fn new(param: impl Into<String>, at: Abscissa, value: f64) -> Self {
        Sample {
            param: param.into(),
            at,
            value,
        }
    }
}

/// One generated function and everything measured on it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunRecord {
    pub spec: String,
    pub bits: u32,
    pub seed: u64,
    pub lambdas: Vec<f64>,
    /// `μ{field > λ}` for each λ.
    pub measures: Vec<f64>,
    /// `∫|f|(log⁺|f|)^α` for `α = 0, 1, 2`.
    pub entropy: [f64; 3],
    /// Denominator of the weak-type ratio.
    pub normalizer: Option<f64>,
    /// `max_λ λ μ / normalizer`, or an operator-specific supremum.
    pub empirical_constant: Option<f64>,
    pub samples: Vec<Sample>,
}

impl RunRecord {
    /// `max_λ λ·μ(λ) / normalizer`; 0 when every product vanishes.
    pub fn weak_constant(lambdas: &[f64], measures: &[f64], normalizer: f64) -> f64 {
        let top = lambdas
            .iter()
            .zip(measures)
            .map(|(l, m)| l * m)
            .fold(0.0, f64::max);
        if top == 0.0 {
            0.0
        } else {
            top / normalizer
        }
    }

    pub fn samples_named<'a>(&'a self, param: &'a str) -> impl Iterator<Item = &'a Sample> + 'a {
        self.samples.iter().filter(move |s| s.param == param)
    }

    pub fn sample(&self, param: &str) -> Option<f64> {
        self.samples_named(param).next().map(|s| s.value)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(WssError::data(format!("{}: {msg}", self.spec)));
        if self.lambdas.len() != self.measures.len() {
            return bad("λ grid and measures differ in length".into());
        }
        if self.lambdas.iter().any(|l| !(*l > 0.0)) {
            return bad("λ grid must be positive".into());
        }
        if self.lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return bad("λ grid is not strictly increasing".into());
        }
        if let Some(m) = self.measures.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return bad(format!("measure {m} outside [0,1]"));
        }
        if self.measures.windows(2).any(|w| w[1] > w[0]) {
            return bad("superlevel measures increase in λ".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityReport {
    pub experiment: String,
    pub runs: Vec<RunRecord>,
}

impl SummabilityReport {
    /// Checks measure range and superlevel monotonicity on every run.
    pub fn validate(&self) -> Result<()> {
        self.runs.iter().try_for_each(RunRecord::validate)
    }

    /// Largest empirical constant over the runs.
    pub fn family_constant(&self) -> Option<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.empirical_constant)
            .reduce(f64::max)
    }

    fn rows(&self) -> Vec<[String; 7]> {
        let mut rows = Vec::new();
        for run in &self.runs {
            let mut push = |param: &str, at: Abscissa, value: f64| {
                rows.push([
                    self.experiment.clone(),
                    run.spec.clone(),
                    run.bits.to_string(),
                    run.seed.to_string(),
                    param.to_string(),
                    format_abscissa(at),
                    format_real(value),
                ]);
            };
            for (l, m) in run.lambdas.iter().zip(&run.measures) {
                push("measure", Abscissa::Real(*l), *m);
            }
            for (alpha, e) in run.entropy.iter().enumerate() {
                push(&format!("entropy_alpha{alpha}"), Abscissa::None, *e);
            }
            if let Some(n) = run.normalizer {
                push("normalizer", Abscissa::None, n);
            }
            if let Some(c) = run.empirical_constant {
                push("empirical_constant", Abscissa::None, c);
            }
            for s in &run.samples {
                push(&s.param, s.at, s.value);
            }
        }
        rows
    }
}

/// Shortest-exact scientific form with 17 significant digits.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn format_abscissa(a: Abscissa) -> String {
    match a {
        Abscissa::None => String::new(),
        Abscissa::Index(m) => m.to_string(),
        Abscissa::Real(x) => format_real(x),
    }
}

/// Writes all reports, in the given order, under a single header.
pub fn write_csv<W: Write>(reports: &[SummabilityReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        for row in r.rows() {
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Dumps a generated grid as `x,value` (1D) or `x,y,value` (2D) rows, where
/// coordinates are the left endpoints of the cells.
pub fn write_grid_csv<W: Write>(f: &GeneratedFunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match f {
        GeneratedFunction::OneD(g) => {
            let n = g.len() as f64;
            w.write_record(["x", "value"])?;
            for (i, v) in g.samples().iter().enumerate() {
                w.write_record([(i as f64 / n).to_string(), format_real(*v)])?;
            }
        }
        GeneratedFunction::TwoD(g) => {
            let side = g.side();
            let n = side as f64;
            w.write_record(["x", "y", "value"])?;
            for (p, v) in g.samples().iter().enumerate() {
                w.write_record([
                    ((p / side) as f64 / n).to_string(),
                    ((p % side) as f64 / n).to_string(),
                    format_real(*v),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
