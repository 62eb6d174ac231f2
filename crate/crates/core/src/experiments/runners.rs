//! Experiment runners.

use rayon::prelude::*;

use crate::dyadic::{BitDepth, DyadicPoint};
use crate::error::{Result, WssError};
use crate::grid::{Grid1D, Grid2D};
use crate::maximal::{
    dyadic_maximal, hybrid_maximal_1, hybrid_maximal_2, hybrid_v_1, hybrid_v_2, schipp_ratio,
    schipp_v_max, superlevel_of, OperatorField,
};
use crate::means::{bmo_of_diagonal_sums, phi_mean_trajectory, PhiFunction};
use crate::partial_sums::{partial_sum_sequence_1d, DiagonalSource, DiagonalSums};
use crate::transform::wht_1d;

use super::config::{Experiment, ExperimentConfig, SummabilitySetup, WeakOperator};
use super::function_spec::{Dim, FunctionSpec, GeneratedFunction};
use super::report::{Abscissa, RunRecord, Sample, SummabilityReport};

fn entropies(samples: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (alpha, slot) in out.iter_mut().enumerate() {
        let total: f64 = samples
            .iter()
            .map(|v| {
                let a = v.abs();
                let lp = if a > 1.0 { a.ln() } else { 0.0 };
                a * lp.powi(alpha as i32)
            })
            .sum();
        *slot = total / samples.len() as f64;
    }
    out
}

fn function_samples(f: &GeneratedFunction) -> &[f64] {
    match f {
        GeneratedFunction::OneD(g) => g.samples(),
        GeneratedFunction::TwoD(g) => g.samples(),
    }
}

fn need_2d<'a>(f: &'a GeneratedFunction, what: &str) -> Result<&'a Grid2D> {
    f.as_2d()
        .ok_or_else(|| WssError::usage(format!("{what} needs a two-dimensional spec")))
}

fn need_1d<'a>(f: &'a GeneratedFunction, what: &str) -> Result<&'a Grid1D> {
    f.as_1d()
        .ok_or_else(|| WssError::usage(format!("{what} needs a one-dimensional spec")))
}

fn sweep(values: &[f64], lambdas: &[f64]) -> Result<Vec<f64>> {
    lambdas.iter().map(|&l| superlevel_of(values, l)).collect()
}

fn base_record(spec: &FunctionSpec, seed: u64, f: &GeneratedFunction) -> RunRecord {
    RunRecord {
        spec: spec.to_string(),
        bits: spec.depth().bits(),
        seed: spec.effective_seed(seed),
        entropy: entropies(function_samples(f)),
        ..RunRecord::default()
    }
}

fn single(experiment: &str, run: RunRecord) -> Result<SummabilityReport> {
    let report = SummabilityReport {
        experiment: experiment.to_string(),
        runs: vec![run],
    };
    report.validate()?;
    Ok(report)
}

/// Superlevel sweep of `BMO[n ↦ S_nn(x,y)]` normalized by
/// `1 + ∫|f|(log⁺|f|)²`.
pub fn run_bmo_sweep(spec: &FunctionSpec, lambdas: &[f64], seed: u64) -> Result<SummabilityReport> {
    let f = spec.generate(seed)?;
    let g = need_2d(&f, "bmo-sweep")?;
    let sums = DiagonalSums::new(g)?;
    let bmo = bmo_of_diagonal_sums(&sums);
    let mut run = base_record(spec, seed, &f);
    run.lambdas = lambdas.to_vec();
    run.measures = sweep(bmo.samples(), lambdas)?;
    let normalizer = 1.0 + run.entropy[2];
    run.normalizer = Some(normalizer);
    run.empirical_constant = Some(RunRecord::weak_constant(lambdas, &run.measures, normalizer));
    let top = bmo.samples().iter().copied().fold(0.0, f64::max);
    run.samples.push(Sample::new("bmo_max", Abscissa::None, top));
    single("bmo-sweep", run)
}

/// Φ-mean trajectories `(1/m) Σ_{n=1}^m Φ(|S_nn - f|)` with `Φ(t) = e^{At} - 1`.
pub fn run_exp_summability(setup: &SummabilitySetup, seed: u64) -> Result<SummabilityReport> {
    let f = setup.spec.generate(seed)?;
    let g = need_2d(&f, "exp-summability")?;
    let sums = DiagonalSums::new(g)?;
    let side = g.side();
    let trajectories = Trajectories::compute(setup, side, side * side, |p, buf| {
        sums.sequence_into(p / side, p % side, buf);
        g.samples()[p]
    })?;
    let probes = resolve_probes(setup, g.depth(), Dim::Two, |cell_lo, cell_len| {
        constant_on_square(g, cell_lo, cell_len)
    })?;
    let mut run = base_record(&setup.spec, seed, &f);
    trajectories.record(setup, &probes, &mut run);
    single("exp-summability", run)
}

/// One-dimensional Φ-mean trajectories `(1/m) Σ_{k=1}^m Φ(|S_k f - f|)`.
pub fn run_phi_means_1d(setup: &SummabilitySetup, seed: u64) -> Result<SummabilityReport> {
    let f = setup.spec.generate(seed)?;
    let g = need_1d(&f, "phi-means-1d")?;
    let spectrum = wht_1d(g);
    let n = g.len();
    let trajectories = Trajectories::compute(setup, n, n, |p, buf| {
        partial_sum_sequence_1d(&spectrum, p, buf);
        g.samples()[p]
    })?;
    let probes = resolve_probes(setup, g.depth(), Dim::One, |cell_lo, cell_len| {
        let s = &g.samples()[cell_lo[0]..cell_lo[0] + cell_len];
        s.iter().all(|&v| v == s[0])
    })?;
    let mut run = base_record(&setup.spec, seed, &f);
    trajectories.record(setup, &probes, &mut run);
    single("phi-means-1d", run)
}

fn constant_on_square(g: &Grid2D, lo: &[usize], len: usize) -> bool {
    let v = g.at(lo[0], lo[1]);
    (lo[0]..lo[0] + len).all(|x| (lo[1]..lo[1] + len).all(|y| g.at(x, y) == v))
}

/// A probe as a flat grid index plus its label.
struct Probe {
    index: usize,
    label: String,
}

/// Explicit probes, or the centers of the level-2 cells on which `f` is
/// constant.
fn resolve_probes(
    setup: &SummabilitySetup,
    depth: BitDepth,
    dim: Dim,
    constant_on: impl Fn(&[usize], usize) -> bool,
) -> Result<Vec<Probe>> {
    let side = depth.size();
    let arity = if dim == Dim::One { 1 } else { 2 };
    let coords: Vec<Vec<usize>> = match &setup.probes {
        Some(list) => list
            .iter()
            .map(|p| {
                if p.len() != arity {
                    return Err(WssError::usage(format!(
                        "probe {p:?} does not have {arity} coordinate(s)"
                    )));
                }
                p.iter()
                    .map(|&c| DyadicPoint::from_real(c, depth).map(DyadicPoint::idx))
                    .collect()
            })
            .collect::<Result<_>>()?,
        None => {
            let level = depth.bits().min(2);
            let cells = 1usize << level;
            let len = side / cells;
            let mut out = Vec::new();
            for c in 0..cells.pow(arity as u32) {
                let lo: Vec<usize> = if arity == 1 {
                    vec![c * len]
                } else {
                    vec![(c / cells) * len, (c % cells) * len]
                };
                if constant_on(&lo, len) {
                    out.push(lo.iter().map(|l| l + len / 2).collect());
                }
            }
            out
        }
    };
    Ok(coords
        .into_iter()
        .map(|c| {
            let real = |i: usize| i as f64 / side as f64;
            let (index, label) = if arity == 1 {
                (c[0], format!("x={}", real(c[0])))
            } else {
                (c[0] * side + c[1], format!("x={},y={}", real(c[0]), real(c[1])))
            };
            Probe { index, label }
        })
        .collect())
}

struct Trajectories {
    ms: Vec<usize>,
    /// `values[p * ms.len() + i]` is the Φ-mean at point `p` for `ms[i]`.
    values: Vec<f64>,
}

impl Trajectories {
    fn compute(
        setup: &SummabilitySetup,
        len: usize,
        points: usize,
        fill: impl Fn(usize, &mut [f64]) -> f64 + Sync,
    ) -> Result<Self> {
        let ms = match &setup.ms {
            Some(ms) => ms.clone(),
            None => std::iter::successors(Some(1usize), |m| Some(m * 2))
                .take_while(|&m| m <= len)
                .collect(),
        };
        if let Some(&m) = ms.iter().find(|&&m| m == 0 || m > len) {
            return Err(WssError::usage(format!("Φ-mean length {m} outside 1..={len}")));
        }
        let phi: &PhiFunction = &setup.phi;
        let per_point: Vec<Vec<f64>> = (0..points)
            .into_par_iter()
            .map_init(
                || vec![0.0; len + 1],
                |buf, p| {
                    let value = fill(p, buf);
                    phi_mean_trajectory(buf, value, &ms, phi)
                },
            )
            .collect();
        Ok(Trajectories {
            ms,
            values: per_point.concat(),
        })
    }

    fn at(&self, p: usize, i: usize) -> f64 {
        self.values[p * self.ms.len() + i]
    }

    fn record(&self, setup: &SummabilitySetup, probes: &[Probe], run: &mut RunRecord) {
        let k = self.ms.len();
        let points = self.values.len() / k;
        let eps = setup.epsilon;
        for (i, &m) in self.ms.iter().enumerate() {
            let column = (0..points).map(|p| self.at(p, i));
            let exceed = column.clone().filter(|&v| v > eps).count();
            let top = column.fold(0.0, f64::max);
            run.samples.push(Sample::new(
                format!("exceptional_measure[eps={eps}]"),
                Abscissa::Index(m),
                exceed as f64 / points as f64,
            ));
            run.samples
                .push(Sample::new("max_phi_mean", Abscissa::Index(m), top));
        }
        for probe in probes {
            let traj: Vec<f64> = (0..k).map(|i| self.at(probe.index, i)).collect();
            for (&m, &v) in self.ms.iter().zip(&traj) {
                run.samples.push(Sample::new(
                    format!("phi_mean[{}]", probe.label),
                    Abscissa::Index(m),
                    v,
                ));
            }
            if let Some(slope) = fit_decay_exponent(&self.ms, &traj, setup.fit_from) {
                run.samples.push(Sample::new(
                    format!("decay_exponent[{}]", probe.label),
                    Abscissa::None,
                    slope,
                ));
            }
        }
    }
}

/// Least-squares slope of `ln v` against `ln m` over `m >= from`.
/// `None` when fewer than two positive, finite values qualify.
pub fn fit_decay_exponent(ms: &[usize], values: &[f64], from: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ms
        .iter()
        .zip(values)
        .filter(|(&m, &v)| m >= from && v > 0.0 && v.is_finite())
        .map(|(&m, &v)| ((m as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Empirical weak-type constants of one operator over a family of functions.
///
/// Each spec is generated with seeds `seed, seed+1, ..., seed+count-1`.
pub fn run_weak_type_suite(
    operator: WeakOperator,
    specs: &[FunctionSpec],
    count: usize,
    lambdas: &[f64],
    seed: u64,
) -> Result<SummabilityReport> {
    let jobs: Vec<(&FunctionSpec, u64)> = specs
        .iter()
        .flat_map(|s| (0..count as u64).map(move |i| (s, seed.wrapping_add(i))))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(spec, s)| weak_type_member(operator, spec, lambdas, s))
        .collect::<Result<Vec<_>>>()?;
    let report = SummabilityReport {
        experiment: format!("weak-type-{}", operator.name()),
        runs,
    };
    report.validate()?;
    Ok(report)
}

fn weak_type_member(
    operator: WeakOperator,
    spec: &FunctionSpec,
    lambdas: &[f64],
    seed: u64,
) -> Result<RunRecord> {
    let f = spec.generate(seed)?;
    let mut run = base_record(spec, seed, &f);
    let name = operator.name();
    if operator == WeakOperator::SchRatio {
        let ratios = schipp_ratio(need_1d(&f, name)?);
        let top = ratios.iter().copied().fold(0.0, f64::max);
        let infinite = ratios.iter().filter(|r| r.is_infinite()).count();
        run.empirical_constant = Some(top);
        run.samples.push(Sample::new("max_ratio", Abscissa::None, top));
        run.samples.push(Sample::new(
            "infinite_ratio_measure",
            Abscissa::None,
            infinite as f64 / ratios.len() as f64,
        ));
        return Ok(run);
    }
    let (field, normalizer): (OperatorField, f64) = match operator {
        WeakOperator::M => (dyadic_maximal(need_2d(&f, name)?), 1.0 + run.entropy[1]),
        WeakOperator::M1 => (hybrid_maximal_1(need_2d(&f, name)?), 1.0 + run.entropy[1]),
        WeakOperator::M2 => (hybrid_maximal_2(need_2d(&f, name)?), 1.0 + run.entropy[1]),
        WeakOperator::V => (schipp_v_max(need_1d(&f, name)?), run.entropy[0]),
        WeakOperator::V1 => (hybrid_v_1(need_2d(&f, name)?), run.entropy[0]),
        WeakOperator::V2 => (hybrid_v_2(need_2d(&f, name)?), run.entropy[0]),
        WeakOperator::SchRatio => unreachable!("handled above"),
    };
    run.lambdas = lambdas.to_vec();
    run.measures = sweep(field.samples(), lambdas)?;
    run.normalizer = Some(normalizer);
    run.empirical_constant = Some(RunRecord::weak_constant(lambdas, &run.measures, normalizer));
    if matches!(operator, WeakOperator::M1 | WeakOperator::M2) {
        run.samples.push(Sample::new(
            "integral_ratio",
            Abscissa::None,
            field.integral() / normalizer,
        ));
    }
    Ok(run)
}

/// Runs one configured experiment. `seed_override` beats the section seed;
/// without either the seed is 0.
pub fn run_experiment(cfg: &ExperimentConfig, seed_override: Option<u64>) -> Result<SummabilityReport> {
    let seed = seed_override.or(cfg.seed).unwrap_or(0);
    let mut report = match &cfg.experiment {
        Experiment::BmoSweep { spec, lambdas } => run_bmo_sweep(spec, lambdas, seed)?,
        Experiment::ExpSummability(setup) => run_exp_summability(setup, seed)?,
        Experiment::PhiMeans1D(setup) => run_phi_means_1d(setup, seed)?,
        Experiment::WeakType {
            operator,
            specs,
            count,
            lambdas,
        } => run_weak_type_suite(*operator, specs, *count, lambdas, seed)?,
    };
    report.experiment = cfg.id.clone();
    Ok(report)
}

/// Runs experiments as independent parallel jobs; reports come back ordered
/// by experiment id.
pub fn run_all(cfgs: &[ExperimentConfig], seed_override: Option<u64>) -> Result<Vec<SummabilityReport>> {
    let mut reports = cfgs
        .par_iter()
        .map(|c| run_experiment(c, seed_override))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.experiment.cmp(&b.experiment));
    Ok(reports)
}
