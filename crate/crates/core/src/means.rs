//! Marcinkiewicz, strong and Φ-means of quadratic partial sums, BMO norms of
//! sequences and functions, and the `L(log L)^α` gauge.
//!
//! Window conventions:
//! - window A averages indices `k = 0..n-1` (`marcinkiewicz_mean`, `strong_mean`);
//! - window B averages indices `k = 1..m` (`phi_mean`, `phi_mean_1d`).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Result, WssError};
use crate::grid::{Grid1D, Grid2D};
use crate::partial_sums::{partial_sum_sequence_1d, DiagonalSource};
use crate::transform::wht_1d;

/// Above this exponent `exp(A t) - 1` is handled in log space.
pub const EXP_LOG_SPACE_THRESHOLD: f64 = 700.0;

/// A finite sequence `ξ_0..ξ_{L-1}` with `L` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct SummandSequence(Vec<f64>);

impl SummandSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_power_of_two() {
            return Err(WssError::data(format!(
                "sequence length {} is not a power of two",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(WssError::data(format!("non-finite term at index {i}")));
        }
        Ok(SummandSequence(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Integer dyadic interval `J = [j·2^m, (j+1)·2^m) ∩ ℕ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexInterval {
    pub j: usize,
    pub m: u32,
}

impl IndexInterval {
    pub fn len(self) -> usize {
        1 << self.m
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn range(self) -> std::ops::Range<usize> {
        (self.j << self.m)..((self.j + 1) << self.m)
    }

    /// Every member of the family contained in `[0, L)`, `L = 2^M`.
    pub fn all_within(len: usize) -> impl Iterator<Item = IndexInterval> {
        let levels = len.trailing_zeros();
        (0..=levels).flat_map(move |m| (0..len >> m).map(move |j| IndexInterval { j, m }))
    }
}

/// Increasing `Φ: [0,∞) → [0,∞)` with `Φ(0) = 0`.
#[derive(Clone)]
pub enum PhiFunction {
    /// `Φ(t) = t^p`.
    Power(f64),
    /// `Φ(t) = exp(A t) - 1`.
    ExpMinusOne(f64),
    Custom {
        name: String,
        phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFunction::Power(p) => write!(f, "power:{p}"),
            PhiFunction::ExpMinusOne(a) => write!(f, "exp:{a}"),
            PhiFunction::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl FromStr for PhiFunction {
    type Err = WssError;

    /// `power:<p>` or `exp:<A>`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, arg) = s
            .split_once(':')
            .ok_or_else(|| WssError::parse(0, format!("expected <kind>:<param> in {s:?}")))?;
        let value: f64 = arg
            .trim()
            .parse()
            .map_err(|_| WssError::parse(tag.len() + 1, format!("bad number {arg:?}")))?;
        let phi = match tag.trim() {
            "power" => PhiFunction::Power(value),
            "exp" => PhiFunction::ExpMinusOne(value),
            other => return Err(WssError::parse(0, format!("unknown phi kind {other:?}"))),
        };
        phi.validate()?;
        Ok(phi)
    }
}

impl PhiFunction {
    pub fn custom(name: &str, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let phi = PhiFunction::Custom {
            name: name.to_string(),
            phi: Arc::new(phi),
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            PhiFunction::Power(p) => t.powf(*p),
            PhiFunction::ExpMinusOne(a) => (a * t).exp_m1(),
            PhiFunction::Custom { phi, .. } => phi(t),
        }
    }

    /// `ln Φ(t)`, finite whenever `Φ(t) > 0` even if `Φ(t)` overflows.
    pub fn log_eval(&self, t: f64) -> f64 {
        match self {
            PhiFunction::Power(p) => p * t.ln(),
            PhiFunction::ExpMinusOne(a) => {
                let z = a * t;
                if z > EXP_LOG_SPACE_THRESHOLD {
                    z + (-(-z).exp()).ln_1p()
                } else {
                    z.exp_m1().ln()
                }
            }
            PhiFunction::Custom { phi, .. } => phi(t).ln(),
        }
    }

    fn overflows(&self, t: f64) -> bool {
        matches!(self, PhiFunction::ExpMinusOne(a) if a * t > EXP_LOG_SPACE_THRESHOLD)
    }

    /// Sampled check of `Φ(0) = 0`, finiteness and monotonicity on `[0, 64]`.
    pub fn validate(&self) -> Result<()> {
        match self {
            PhiFunction::Power(p) | PhiFunction::ExpMinusOne(p) if !(*p > 0.0 && p.is_finite()) => {
                return Err(WssError::usage(format!("{self}: parameter must be positive")));
            }
            _ => {}
        }
        if self.eval(0.0) != 0.0 {
            return Err(WssError::usage(format!("{self}: Φ(0) != 0")));
        }
        let mut prev = 0.0;
        for i in 1..=4096 {
            let v = self.eval(i as f64 / 64.0);
            if v.is_nan() || v < prev {
                return Err(WssError::usage(format!("{self}: not increasing")));
            }
            prev = v;
        }
        Ok(())
    }

    /// `(1/m) Σ Φ(t_i)` over the given deviations, switching to log-sum-exp
    /// when a term would overflow. May return `+inf` if the mean itself does.
    pub fn mean_of(&self, deviations: &[f64]) -> f64 {
        let m = deviations.len() as f64;
        if deviations.iter().any(|&t| self.overflows(t)) {
            return self.log_mean_of(deviations).exp();
        }
        deviations.iter().map(|&t| self.eval(t)).sum::<f64>() / m
    }

    /// `ln((1/m) Σ Φ(t_i))`.
    pub fn log_mean_of(&self, deviations: &[f64]) -> f64 {
        let logs: Vec<f64> = deviations.iter().map(|&t| self.log_eval(t)).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        top + sum.ln() - (deviations.len() as f64).ln()
    }
}

/// Raw `H_n^p f` or the deviation form with `|S_mm - f|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongForm {
    Raw,
    Deviation,
}

fn check_window_a<D: DiagonalSource>(field: &D, n: usize) -> Result<()> {
    let side = field.grid().side();
    if n == 0 || n > side {
        return Err(WssError::usage(format!("window length {n} outside 1..={side}")));
    }
    Ok(())
}

/// Evaluates `op(sequence, f(x,y))` at every grid point.
fn per_point<D, F>(field: &D, op: F) -> Grid2D
where
    D: DiagonalSource,
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    let f = field.grid();
    let side = f.side();
    let len = field.sequence_len();
    let samples: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map_init(
            || vec![0.0; len],
            |buf, p| {
                let (x, y) = (p / side, p % side);
                field.sequence_into(x, y, buf);
                op(buf, f.at(x, y))
            },
        )
        .collect();
    Grid2D::new(f.depth(), samples).expect("operator outputs are finite")
}

/// `(1/n) Σ_{k=0}^{n-1} S_kk`, window A.
pub fn marcinkiewicz_mean<D: DiagonalSource>(field: &D, n: usize) -> Result<Grid2D> {
    check_window_a(field, n)?;
    Ok(per_point(field, |seq, _| {
        seq[..n].iter().sum::<f64>() / n as f64
    }))
}

/// `((1/n) Σ_{k=0}^{n-1} |S_kk (- f)|^p)^{1/p}`, window A.
pub fn strong_mean<D: DiagonalSource>(
    field: &D,
    n: usize,
    p: f64,
    form: StrongForm,
) -> Result<Grid2D> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(WssError::usage(format!("strong mean exponent {p} must be positive")));
    }
    check_window_a(field, n)?;
    Ok(per_point(field, |seq, fv| {
        let centre = if form == StrongForm::Deviation { fv } else { 0.0 };
        let s: f64 = seq[..n].iter().map(|v| (v - centre).abs().powf(p)).sum();
        (s / n as f64).powf(1.0 / p)
    }))
}

/// `H_*^p f = sup_k H_{2^k}^p f` over the dyadic windows that fit the grid.
pub fn maximal_strong_mean<D: DiagonalSource>(field: &D, p: f64) -> Result<Grid2D> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(WssError::usage(format!("strong mean exponent {p} must be positive")));
    }
    let side = field.grid().side();
    Ok(per_point(field, |seq, _| {
        let mut acc = 0.0;
        let mut best = 0.0f64;
        for (k, v) in seq[..side].iter().enumerate() {
            acc += v.abs().powf(p);
            let len = k + 1;
            if len.is_power_of_two() {
                best = best.max((acc / len as f64).powf(1.0 / p));
            }
        }
        best
    }))
}

/// `(1/m) Σ_{n=1}^{m} Φ(|S_nn - f|)`, window B.
pub fn phi_mean<D: DiagonalSource>(field: &D, m: usize, phi: &PhiFunction) -> Result<Grid2D> {
    let side = field.grid().side();
    if m == 0 || m > side {
        return Err(WssError::usage(format!("Φ-mean length {m} outside 1..={side}")));
    }
    let grid = per_point(field, |seq, fv| {
        let devs: Vec<f64> = seq[1..=m].iter().map(|v| (v - fv).abs()).collect();
        phi.mean_of(&devs)
    });
    Ok(grid)
}

/// Φ-mean at a single point for every `m` in `ms` (window B).
pub fn phi_mean_trajectory(sequence: &[f64], value: f64, ms: &[usize], phi: &PhiFunction) -> Vec<f64> {
    let devs: Vec<f64> = sequence.iter().map(|v| (v - value).abs()).collect();
    ms.iter().map(|&m| phi.mean_of(&devs[1..=m])).collect()
}

/// 1D analogue `(1/m) Σ_{k=1}^{m} Φ(|S_k f - f|)`.
pub fn phi_mean_1d(f: &Grid1D, m: usize, phi: &PhiFunction) -> Result<Grid1D> {
    let n = f.len();
    if m == 0 || m > n {
        return Err(WssError::usage(format!("Φ-mean length {m} outside 1..={n}")));
    }
    let spectrum = wht_1d(f);
    let samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![0.0; n + 1],
            |buf, x| {
                partial_sum_sequence_1d(&spectrum, x, buf);
                let fv = f.samples()[x];
                let devs: Vec<f64> = buf[1..=m].iter().map(|v| (v - fv).abs()).collect();
                phi.mean_of(&devs)
            },
        )
        .collect();
    Grid1D::new(f.depth(), samples)
}

/// Largest RMS deviation from the block mean over all aligned dyadic blocks.
///
/// Block means are pairwise: the mean of a block is the average of its two
/// halves' means, built bottom-up as a pyramid. Constant blocks therefore
/// have exactly zero oscillation. Squared deviations are summed in
/// ascending index order.
fn max_block_oscillation(values: &[f64]) -> f64 {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    let mut best = 0.0f64;
    let mut means = values.to_vec();
    let mut width = 2;
    while width <= len {
        means = means.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        for (block, &mean) in values.chunks_exact(width).zip(&means) {
            best = best.max(deviation_rms(block, mean));
        }
        width *= 2;
    }
    best
}

/// Mean of a power-of-two block by recursive halving.
fn pairwise_mean(block: &[f64]) -> f64 {
    match block.len() {
        1 => block[0],
        n => 0.5 * (pairwise_mean(&block[..n / 2]) + pairwise_mean(&block[n / 2..])),
    }
}

#[inline]
fn deviation_rms(block: &[f64], mean: f64) -> f64 {
    let w = block.len() as f64;
    (block.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / w).sqrt()
}

#[inline]
fn block_oscillation(block: &[f64]) -> f64 {
    deviation_rms(block, pairwise_mean(block))
}

/// `BMO[ξ] = sup_{J ∈ F, J ⊆ [0,L)} ((1/|J|) Σ_{k∈J} |ξ_k - ξ^J|²)^{1/2}`.
pub fn bmo_sequence_norm(xi: &SummandSequence) -> f64 {
    max_block_oscillation(xi.values())
}

/// Oscillation of one member of the family.
pub fn interval_oscillation(xi: &SummandSequence, j: IndexInterval) -> Result<f64> {
    let r = j.range();
    if r.end > xi.len() {
        return Err(WssError::usage(format!(
            "interval {r:?} outside sequence of length {}",
            xi.len()
        )));
    }
    Ok(block_oscillation(&xi.values()[r]))
}

/// Dyadic BMO norm of a step function: largest `L²` oscillation over dyadic
/// intervals plus `|∫ f|`.
pub fn bmo_function_norm(f: &Grid1D) -> f64 {
    let mean = f.samples().iter().sum::<f64>() / f.len() as f64;
    max_block_oscillation(f.samples()) + mean.abs()
}

/// The sequence norm through step functions:
/// `sup_n ‖Σ_{k<2^n} ξ_k 1_{δ_k^n}‖_BMO` for `2^n <= L`.
pub fn bmo_sequence_norm_via_functions(xi: &SummandSequence) -> f64 {
    let v = xi.values();
    let mut best = v[0].abs();
    let mut len = 2;
    while len <= v.len() {
        let head = &v[..len];
        let mean = head.iter().sum::<f64>() / len as f64;
        best = best.max(max_block_oscillation(head) + mean.abs());
        len *= 2;
    }
    best
}

/// `BMO[n ↦ S_nn(x,y)]` over `n = 0..N-1` at every grid point.
pub fn bmo_of_diagonal_sums<D: DiagonalSource>(field: &D) -> Grid2D {
    let side = field.grid().side();
    per_point(field, |seq, _| max_block_oscillation(&seq[..side]))
}

/// `∫ |f| (log⁺|f|)^α` with `log⁺ u = 1_{(1,∞)}(u) log u`.
pub fn entropy_functional(f: &Grid2D, alpha: f64) -> Result<f64> {
    entropy_of(f.samples(), alpha)
}

pub fn entropy_functional_1d(f: &Grid1D, alpha: f64) -> Result<f64> {
    entropy_of(f.samples(), alpha)
}

fn entropy_of(samples: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(WssError::usage(format!("entropy exponent {alpha} must be >= 0")));
    }
    let total: f64 = samples
        .iter()
        .map(|v| {
            let a = v.abs();
            let lp = if a > 1.0 { a.ln() } else { 0.0 };
            a * lp.powf(alpha)
        })
        .sum();
    Ok(total / samples.len() as f64)
}
