//! Brute-force reference implementations.
//!
//! Each function evaluates a definition literally, with no shared fast path,
//! so the optimized operators can be checked against it. Costs are
//! polynomial but large; keep inputs small.

use crate::dyadic::{dyadic_add, unit_point, DyadicInterval, DyadicPoint};
use crate::grid::{Grid1D, Grid2D, Spectrum2D};
use crate::partial_sums::partial_sum_1d;
use crate::transform::{inverse_wht_2d, naive_wht_2d};

/// Enumerates every pair `a < b` and keeps those in the family of aligned
/// dyadic index intervals. Each mean is a recursive pairwise average and
/// squared deviations are summed in ascending index order.
pub fn bmo_by_enumeration(xi: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for a in 0..xi.len() {
        for b in a + 1..=xi.len() {
            let w = b - a;
            if !w.is_power_of_two() || a % w != 0 {
                continue;
            }
            let mean = pairwise_mean(&xi[a..b]);
            let mut d = 0.0;
            for &v in &xi[a..b] {
                d += (v - mean) * (v - mean);
            }
            best = best.max((d / w as f64).sqrt());
        }
    }
    best
}

fn pairwise_mean(v: &[f64]) -> f64 {
    if v.len() == 1 {
        return v[0];
    }
    let (lo, hi) = v.split_at(v.len() / 2);
    (pairwise_mean(lo) + pairwise_mean(hi)) / 2.0
}

/// `2^k ∫_{I_k(x)} f` at grid index `i`.
pub fn cell_average_1d(f: &Grid1D, k: u32, i: usize) -> f64 {
    let w = f.len() >> k;
    let start = (i / w) * w;
    f.samples()[start..start + w].iter().sum::<f64>() / w as f64
}

/// Average of `f` over the level-`k` square containing `(x, y)`.
pub fn cell_average_2d(f: &Grid2D, k: u32, x: usize, y: usize) -> f64 {
    let w = f.side() >> k;
    let (x0, y0) = ((x / w) * w, (y / w) * w);
    let mut s = 0.0;
    for a in x0..x0 + w {
        for b in y0..y0 + w {
            s += f.at(a, b);
        }
    }
    s / (w * w) as f64
}

/// `S_nn f` by zeroing every coefficient outside `[0,n)²` of the definitional
/// spectrum and synthesizing.
pub fn quadratic_sum_by_truncation(f: &Grid2D, n: usize) -> Grid2D {
    let side = f.side();
    let mut c = naive_wht_2d(f).coeffs().to_vec();
    for m in 0..side {
        for k in 0..side {
            if m >= n || k >= n {
                c[m * side + k] = 0.0;
            }
        }
    }
    inverse_wht_2d(&Spectrum2D::new(f.depth(), c).expect("shape preserved"))
}

/// `V_n(x; f)` by summing over every `t` on the grid with explicit
/// indicators `1_{I_j}(t)` and dyadic translates `x ⊕ t ⊕ e_j`.
pub fn schipp_v_by_enumeration(f: &Grid1D, n: u32) -> Vec<f64> {
    let d = f.depth();
    let s = partial_sum_1d(f, 1 << n).expect("n <= B");
    (0..d.size())
        .map(|xi| {
            let x = DyadicPoint::new(xi, d).expect("on grid");
            let mut integral = 0.0;
            for ti in 0..d.size() {
                let t = DyadicPoint::new(ti, d).expect("on grid");
                let mut inner = 0.0;
                for j in 0..n {
                    if DyadicInterval::origin(j).contains(t) {
                        let e = unit_point(j, d).expect("j < B");
                        let p = dyadic_add(dyadic_add(x, t).expect("same depth"), e)
                            .expect("same depth");
                        inner += (j as f64 - 1.0).exp2() * s.samples()[p.idx()];
                    }
                }
                integral += inner * inner;
            }
            integral /= d.size() as f64;
            ((-(n as f64)).exp2() * integral).sqrt()
        })
        .collect()
}

/// `sup_n` of the `|f|` average over the level-`n` square at every point.
pub fn dyadic_maximal_by_enumeration(f: &Grid2D) -> Vec<f64> {
    let side = f.side();
    let bits = f.depth().bits();
    let abs = Grid2D::from_fn(f.depth(), |x, y| f.at(x, y).abs()).expect("finite");
    let mut out = vec![0.0f64; side * side];
    for x in 0..side {
        for y in 0..side {
            for n in 0..=bits {
                out[x * side + y] = out[x * side + y].max(cell_average_2d(&abs, n, x, y));
            }
        }
    }
    out
}
