//! Dyadic and hybrid maximal functions, Schipp's operators `V_n`, `V`, and
//! their two-dimensional hybrids `V_1`, `V_2`.
//!
//! All suprema over levels stop at the grid resolution `B`: finer cell
//! averages of a grid function equal its samples.
//!
//! `V_n` uses `e_j = 2^{-(j+1)}` and the weight `2^{j-1}` literally (so the
//! `j = 0` term carries `1/2`). Since `S_{2^n} f` is constant on level-`n`
//! cells and `1_{I_j}` is a level-`j` step function, the `t`-integral is an
//! exact sum over the `2^n` level-`n` cells of `t`.

use rayon::prelude::*;

use crate::error::{Result, WssError};
use crate::grid::{Grid1D, Grid2D};
use crate::partial_sums::partial_sum_sequence_1d;
use crate::transform::wht_1d;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldValues {
    OneD(Grid1D),
    TwoD(Grid2D),
}

/// Pointwise output of a nonnegative operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorField {
    pub label: String,
    pub values: FieldValues,
}

impl OperatorField {
    pub fn one_d(label: impl Into<String>, g: Grid1D) -> Self {
        OperatorField {
            label: label.into(),
            values: FieldValues::OneD(g),
        }
    }

    pub fn two_d(label: impl Into<String>, g: Grid2D) -> Self {
        OperatorField {
            label: label.into(),
            values: FieldValues::TwoD(g),
        }
    }

    pub fn samples(&self) -> &[f64] {
        match &self.values {
            FieldValues::OneD(g) => g.samples(),
            FieldValues::TwoD(g) => g.samples(),
        }
    }

    pub fn as_1d(&self) -> Option<&Grid1D> {
        match &self.values {
            FieldValues::OneD(g) => Some(g),
            FieldValues::TwoD(_) => None,
        }
    }

    pub fn as_2d(&self) -> Option<&Grid2D> {
        match &self.values {
            FieldValues::TwoD(g) => Some(g),
            FieldValues::OneD(_) => None,
        }
    }

    /// Grid average of the field, `∫ Op f`.
    pub fn integral(&self) -> f64 {
        let s = self.samples();
        s.iter().sum::<f64>() / s.len() as f64
    }
}

/// Normalized counting measure of `{field > λ}`.
pub fn superlevel_measure(field: &OperatorField, lambda: f64) -> Result<f64> {
    superlevel_of(field.samples(), lambda)
}

pub(crate) fn superlevel_of(samples: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(WssError::usage(format!("λ = {lambda} must be positive")));
    }
    let count = samples.iter().filter(|&&v| v > lambda).count();
    Ok(count as f64 / samples.len() as f64)
}

/// Cell averages of `v` at every level `n = 0..=B`, coarsest first.
fn average_pyramid(v: &[f64]) -> Vec<Vec<f64>> {
    let mut levels = vec![v.to_vec()];
    while levels.last().is_some_and(|l| l.len() > 1) {
        let fine = levels.last().expect("nonempty");
        let coarse = fine.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        levels.push(coarse);
    }
    levels.reverse();
    levels
}

fn maximal_1d_values(v: &[f64]) -> Vec<f64> {
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let pyramid = average_pyramid(&abs);
    let bits = v.len().trailing_zeros();
    (0..v.len())
        .map(|i| {
            pyramid
                .iter()
                .enumerate()
                .map(|(n, level)| level[i >> (bits - n as u32)])
                .fold(0.0, f64::max)
        })
        .collect()
}

/// One-dimensional dyadic maximal function `sup_n 2^n ∫_{I_n(x)} |g|`.
pub fn dyadic_maximal_1d(g: &Grid1D) -> OperatorField {
    let values = maximal_1d_values(g.samples());
    OperatorField::one_d("M", Grid1D::new(g.depth(), values).expect("finite"))
}

/// `Mf(x,y) = sup_n 2^{2n} ∫_{I_n(x)×I_n(y)} |f|`.
pub fn dyadic_maximal(f: &Grid2D) -> OperatorField {
    let side = f.side();
    let bits = f.depth().bits();
    // pyramid[n] holds level-n square averages, row-major with side 2^n.
    let mut pyramid: Vec<Vec<f64>> = vec![f.samples().iter().map(|v| v.abs()).collect()];
    let mut s = side;
    while s > 1 {
        let fine = pyramid.last().expect("nonempty");
        let h = s / 2;
        let mut coarse = vec![0.0; h * h];
        for a in 0..h {
            for b in 0..h {
                let (x, y) = (2 * a, 2 * b);
                coarse[a * h + b] = 0.25
                    * (fine[x * s + y] + fine[x * s + y + 1] + fine[(x + 1) * s + y] + fine[(x + 1) * s + y + 1]);
            }
        }
        pyramid.push(coarse);
        s = h;
    }
    pyramid.reverse();
    let samples: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|p| {
            let (x, y) = (p / side, p % side);
            pyramid
                .iter()
                .enumerate()
                .map(|(n, level)| {
                    let shift = bits - n as u32;
                    level[(x >> shift) * (1 << n) + (y >> shift)]
                })
                .fold(0.0, f64::max)
        })
        .collect();
    OperatorField::two_d("M", Grid2D::new(f.depth(), samples).expect("finite"))
}

/// `M_1 f(x,y) = sup_n 2^n ∫_{I_n(x)} |f(s,y)| ds`.
pub fn hybrid_maximal_1(f: &Grid2D) -> OperatorField {
    let side = f.side();
    let cols: Vec<Vec<f64>> = (0..side)
        .into_par_iter()
        .map(|y| maximal_1d_values(&f.column(y)))
        .collect();
    let g = Grid2D::from_fn(f.depth(), |x, y| cols[y][x]).expect("finite");
    OperatorField::two_d("M1", g)
}

/// `M_2 f(x,y) = sup_n 2^n ∫_{I_n(y)} |f(x,t)| dt`.
pub fn hybrid_maximal_2(f: &Grid2D) -> OperatorField {
    let side = f.side();
    let samples: Vec<f64> = (0..side)
        .into_par_iter()
        .flat_map_iter(|x| maximal_1d_values(f.row(x)))
        .collect();
    OperatorField::two_d("M2", Grid2D::new(f.depth(), samples).expect("finite"))
}

/// `V_n(x)` for each level-`n` cell of `x`, given the level-`n` averages `g`.
fn schipp_level(g: &[f64]) -> Vec<f64> {
    let cells = g.len();
    let n = cells.trailing_zeros();
    let norm = 1.0 / (cells as f64 * cells as f64);
    (0..cells)
        .map(|cx| {
            let mut total = 0.0;
            for ct in 0..cells {
                // t ∈ I_j  <=>  ct < 2^{n-j}  <=>  j <= n - bitlen(ct)
                let bitlen = usize::BITS - ct.leading_zeros();
                let top = (n - bitlen).min(n - 1);
                let mut inner = 0.0;
                for j in 0..=top {
                    let weight = (j as f64 - 1.0).exp2();
                    inner += weight * g[cx ^ ct ^ (1 << (n - 1 - j))];
                }
                total += inner * inner;
            }
            (total * norm).sqrt()
        })
        .collect()
}

fn schipp_level_values(f: &[f64], n: u32) -> Vec<f64> {
    let bits = f.len().trailing_zeros();
    let pyramid = average_pyramid(f);
    let per_cell = schipp_level(&pyramid[n as usize]);
    (0..f.len()).map(|i| per_cell[i >> (bits - n)]).collect()
}

fn schipp_max_values(f: &[f64]) -> Vec<f64> {
    let bits = f.len().trailing_zeros();
    let pyramid = average_pyramid(f);
    let mut best = vec![0.0f64; f.len()];
    for n in 1..=bits {
        let per_cell = schipp_level(&pyramid[n as usize]);
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.max(per_cell[i >> (bits - n)]);
        }
    }
    best
}

/// Schipp's operator
/// `V_n(x;f) = (2^{-n} ∫ (Σ_{j<n} 2^{j-1} 1_{I_j}(t) S_{2^n} f(x ⊕ t ⊕ e_j))² dt)^{1/2}`.
pub fn schipp_v(f: &Grid1D, n: u32) -> Result<OperatorField> {
    let bits = f.depth().bits();
    if n == 0 || n > bits {
        return Err(WssError::usage(format!("V_n needs 1 <= n <= {bits}, got {n}")));
    }
    let values = schipp_level_values(f.samples(), n);
    Ok(OperatorField::one_d(
        format!("V_{n}"),
        Grid1D::new(f.depth(), values).expect("finite"),
    ))
}

/// `V f = sup_{1<=n<=B} V_n f`.
pub fn schipp_v_max(f: &Grid1D) -> OperatorField {
    let values = schipp_max_values(f.samples());
    OperatorField::one_d("V", Grid1D::new(f.depth(), values).expect("finite"))
}

/// `V_1`: Schipp's maximal operator along `x` with `S^{(1)}_{2^n}`.
pub fn hybrid_v_1(f: &Grid2D) -> OperatorField {
    let side = f.side();
    let cols: Vec<Vec<f64>> = (0..side)
        .into_par_iter()
        .map(|y| schipp_max_values(&f.column(y)))
        .collect();
    OperatorField::two_d(
        "V1",
        Grid2D::from_fn(f.depth(), |x, y| cols[y][x]).expect("finite"),
    )
}

/// `V_2`: Schipp's maximal operator along `y` with `S^{(2)}_{2^n}`.
pub fn hybrid_v_2(f: &Grid2D) -> OperatorField {
    let side = f.side();
    let samples: Vec<f64> = (0..side)
        .into_par_iter()
        .flat_map_iter(|x| schipp_max_values(f.row(x)))
        .collect();
    OperatorField::two_d("V2", Grid2D::new(f.depth(), samples).expect("finite"))
}

/// Pointwise `sup_m (2^{-m} Σ_{l<2^m} |S_l f(x)|²)^{1/2} / V(x,f)`.
///
/// A zero numerator gives 0; a positive numerator over `V = 0` gives `+inf`,
/// which is why the result is a plain vector rather than a grid.
pub fn schipp_ratio(f: &Grid1D) -> Vec<f64> {
    let n = f.len();
    let spectrum = wht_1d(f);
    let v = schipp_max_values(f.samples());
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![0.0; n + 1],
            |buf, x| {
                partial_sum_sequence_1d(&spectrum, x, buf);
                let mut acc = 0.0;
                let mut lhs = 0.0f64;
                for (l, s) in buf[..n].iter().enumerate() {
                    acc += s * s;
                    if (l + 1).is_power_of_two() {
                        lhs = lhs.max((acc / (l + 1) as f64).sqrt());
                    }
                }
                if lhs == 0.0 {
                    0.0
                } else {
                    lhs / v[x]
                }
            },
        )
        .collect()
}
