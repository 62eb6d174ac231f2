//! Rectangular, quadratic and marginal Walsh–Fourier partial sums.
//!
//! Conventions: `S_n f = Σ_{k<n} f̂(k) w_k`, so `S_0 f ≡ 0`. In 2D the first
//! index acts on `x` and the second on `y`.
//!
//! Quadratic sums `S_{nn}` are produced incrementally. Going from `n` to
//! `n + 1` adds spectral row `{(n, m) : m <= n}` and column `{(m, n) : m < n}`:
//!
//! ```text
//! S_{n+1,n+1}(x,y) = S_{nn}(x,y) + w_n(x) R_n(y) + w_n(y) C_n(x)
//! R_n(y) = Σ_{m<=n} f̂(n,m) w_m(y),   C_n(x) = Σ_{m<n} f̂(m,n) w_m(x)
//! ```
//!
//! `R` and `C` are `N × N` tables, so the per-point sequence `n ↦ S_{nn}(x,y)`
//! costs `O(N)` and never requires the `(N+1) × N × N` field in memory.

use rayon::prelude::*;

use crate::dyadic::walsh_sign;
use crate::error::{Result, WssError};
use crate::grid::{Grid1D, Grid2D, Spectrum1D, Spectrum2D};
use crate::transform::{inverse_wht_2d, synthesize_truncated, wht_1d, wht_2d};

/// Default ceiling on the 2D bit depth for `O(N^3)` work and full
/// materialization of the diagonal field. Overridden by `WSS_MAX_B`.
pub const DEFAULT_MAX_BITS_2D: u32 = 8;

pub fn max_bits_2d() -> u32 {
    std::env::var("WSS_MAX_B")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_BITS_2D)
}

pub(crate) fn guard_bits_2d(bits: u32, what: &str) -> Result<()> {
    let limit = max_bits_2d();
    if bits > limit {
        return Err(WssError::Resource(format!(
            "{what} at B={bits} exceeds the limit B<={limit} (set WSS_MAX_B to override)"
        )));
    }
    Ok(())
}

pub fn partial_sum_1d(f: &Grid1D, n: usize) -> Result<Grid1D> {
    if n > f.len() {
        return Err(WssError::usage(format!(
            "partial sum index {n} exceeds {}",
            f.len()
        )));
    }
    let c = wht_1d(f);
    Grid1D::new(f.depth(), synthesize_truncated(c.coeffs(), n))
}

/// Writes `S_k f(x)` for `k = 0..=N` into `out` (length `N + 1`).
pub fn partial_sum_sequence_1d(spectrum: &Spectrum1D, x: usize, out: &mut [f64]) {
    let bits = spectrum.depth().bits();
    let c = spectrum.coeffs();
    debug_assert_eq!(out.len(), c.len() + 1);
    let mut acc = 0.0;
    out[0] = 0.0;
    for (k, &ck) in c.iter().enumerate() {
        acc += ck * walsh_sign(k, x, bits) as f64;
        out[k + 1] = acc;
    }
}

pub fn rectangular_partial_sum(f: &Grid2D, m: usize, n: usize) -> Result<Grid2D> {
    let side = f.side();
    if m > side || n > side {
        return Err(WssError::usage(format!(
            "rectangular indices ({m},{n}) exceed {side}"
        )));
    }
    let mut c = wht_2d(f);
    let coeffs = c.coeffs_mut();
    for a in 0..side {
        for b in 0..side {
            if a >= m || b >= n {
                coeffs[a * side + b] = 0.0;
            }
        }
    }
    Ok(inverse_wht_2d(&c))
}

/// `S_n^{(1)} f`: the 1D partial sum in `x` for every fixed `y`.
pub fn marginal_sum_1(f: &Grid2D, n: usize) -> Result<Grid2D> {
    let side = f.side();
    if n > side {
        return Err(WssError::usage(format!("marginal index {n} exceeds {side}")));
    }
    let columns: Vec<Vec<f64>> = (0..side)
        .into_par_iter()
        .map(|y| {
            let col = Grid1D::new(f.depth(), f.column(y)).expect("column of a valid grid");
            synthesize_truncated(wht_1d(&col).coeffs(), n)
        })
        .collect();
    Grid2D::from_fn(f.depth(), |x, y| columns[y][x])
}

/// `S_m^{(2)} f`: the 1D partial sum in `y` for every fixed `x`.
pub fn marginal_sum_2(f: &Grid2D, m: usize) -> Result<Grid2D> {
    let side = f.side();
    if m > side {
        return Err(WssError::usage(format!("marginal index {m} exceeds {side}")));
    }
    let samples: Vec<f64> = (0..side)
        .into_par_iter()
        .flat_map_iter(|x| {
            let row = Grid1D::new(f.depth(), f.row(x).to_vec()).expect("row of a valid grid");
            synthesize_truncated(wht_1d(&row).coeffs(), m)
        })
        .collect();
    Grid2D::new(f.depth(), samples)
}

/// `S_*^{(2)} f = sup_{1<=n<=N} |S_n^{(2)} f|`.
pub fn marginal_maximal_2(f: &Grid2D) -> Grid2D {
    let side = f.side();
    let bits = f.depth().bits();
    let samples: Vec<f64> = (0..side)
        .into_par_iter()
        .flat_map_iter(|x| {
            let row = Grid1D::new(f.depth(), f.row(x).to_vec()).expect("row of a valid grid");
            let c = wht_1d(&row);
            (0..side).map(move |y| {
                let mut acc = 0.0;
                let mut best = 0.0f64;
                for (k, &ck) in c.coeffs().iter().enumerate() {
                    acc += ck * walsh_sign(k, y, bits) as f64;
                    best = best.max(acc.abs());
                }
                best
            })
        })
        .collect();
    Grid2D::new(f.depth(), samples).expect("shape preserved")
}

/// Source of the per-point sequences `n ↦ S_{nn}(x, y; f)`, `n = 0..=N`.
pub trait DiagonalSource: Sync {
    fn grid(&self) -> &Grid2D;

    /// Writes `S_{nn}(x,y)` for `n = 0..=N` into `out` (length `N + 1`).
    fn sequence_into(&self, x: usize, y: usize, out: &mut [f64]);

    fn sequence_len(&self) -> usize {
        self.grid().side() + 1
    }

    fn sequence(&self, x: usize, y: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.sequence_len()];
        self.sequence_into(x, y, &mut out);
        out
    }
}

/// Streaming view of the quadratic partial sums: `O(N^2)` memory.
#[derive(Debug, Clone)]
pub struct DiagonalSums {
    f: Grid2D,
    row_terms: Vec<f64>,
    col_terms: Vec<f64>,
}

impl DiagonalSums {
    pub fn new(f: &Grid2D) -> Result<Self> {
        guard_bits_2d(f.depth().bits(), "quadratic partial sums")?;
        Ok(Self::from_spectrum(f.clone(), &wht_2d(f)))
    }

    fn from_spectrum(f: Grid2D, c: &Spectrum2D) -> Self {
        let side = c.side();
        let (row_terms, col_terms): (Vec<Vec<f64>>, Vec<Vec<f64>>) = (0..side)
            .into_par_iter()
            .map(|n| {
                let row: Vec<f64> = (0..side).map(|m| c.at(n, m)).collect();
                let col: Vec<f64> = (0..side).map(|m| c.at(m, n)).collect();
                (
                    synthesize_truncated(&row, n + 1),
                    synthesize_truncated(&col, n),
                )
            })
            .unzip();
        DiagonalSums {
            f,
            row_terms: row_terms.concat(),
            col_terms: col_terms.concat(),
        }
    }

    /// Dense `[n][x][y]` field. Subject to the same resource guard.
    pub fn materialize(&self) -> Result<DiagonalSumField> {
        guard_bits_2d(self.f.depth().bits(), "materialized diagonal field")?;
        let side = self.f.side();
        let len = side + 1;
        let per_point: Vec<Vec<f64>> = (0..side * side)
            .into_par_iter()
            .map(|p| self.sequence(p / side, p % side))
            .collect();
        let mut values = vec![0.0; len * side * side];
        for (p, seq) in per_point.iter().enumerate() {
            for (n, &v) in seq.iter().enumerate() {
                values[n * side * side + p] = v;
            }
        }
        Ok(DiagonalSumField {
            f: self.f.clone(),
            values,
        })
    }
}

impl DiagonalSource for DiagonalSums {
    fn grid(&self) -> &Grid2D {
        &self.f
    }

    fn sequence_into(&self, x: usize, y: usize, out: &mut [f64]) {
        let side = self.f.side();
        let bits = self.f.depth().bits();
        debug_assert_eq!(out.len(), side + 1);
        let mut acc = 0.0;
        out[0] = 0.0;
        for n in 0..side {
            let wx = walsh_sign(n, x, bits) as f64;
            let wy = walsh_sign(n, y, bits) as f64;
            acc += wx * self.row_terms[n * side + y] + wy * self.col_terms[n * side + x];
            out[n + 1] = acc;
        }
    }
}

/// Fully materialized `S_{nn}(x,y)` for `n = 0..=N`.
#[derive(Debug, Clone)]
pub struct DiagonalSumField {
    f: Grid2D,
    values: Vec<f64>,
}

impl DiagonalSumField {
    /// `S_{nn}` as a grid.
    pub fn level(&self, n: usize) -> Grid2D {
        let plane = self.f.side() * self.f.side();
        Grid2D::new(self.f.depth(), self.values[n * plane..(n + 1) * plane].to_vec())
            .expect("field planes are valid grids")
    }
}

impl DiagonalSource for DiagonalSumField {
    fn grid(&self) -> &Grid2D {
        &self.f
    }

    fn sequence_into(&self, x: usize, y: usize, out: &mut [f64]) {
        let side = self.f.side();
        let plane = side * side;
        let p = x * side + y;
        for (n, o) in out.iter_mut().enumerate() {
            *o = self.values[n * plane + p];
        }
    }
}

/// Quadratic partial sums of `f`, fully materialized.
pub fn quadratic_sums(f: &Grid2D) -> Result<DiagonalSumField> {
    DiagonalSums::new(f)?.materialize()
}
