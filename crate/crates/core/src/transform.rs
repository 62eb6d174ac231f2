//! Walsh–Fourier analysis and synthesis in Paley order.
//!
//! Analysis carries the measure factor `2^{-B}` per axis so `f̂(k) = ∫ f w_k`
//! literally; synthesis carries none. The fast path is a natural-order
//! Hadamard butterfly followed by a bit-reversal permutation: with
//! `w_k(i) = (-1)^{popcount(k & rev(i))}` the Paley transform of `v` is the
//! natural-order transform read at `rev(k)`.

use rayon::prelude::*;

use crate::dyadic::{reverse_bits, walsh_sign, BitDepth};
use crate::grid::{Grid1D, Grid2D, Spectrum1D, Spectrum2D};
use crate::error::Result;

/// Unnormalized in-place Paley–Walsh transform: `v[k] <- Σ_i v[i] w_k(i)`.
///
/// The same kernel performs synthesis, since `Σ_k c_k w_k(i)` has the
/// identical sign pattern. `v.len()` must be a power of two.
pub fn paley_fwht_in_place(v: &mut [f64]) {
    let n = v.len();
    assert!(n.is_power_of_two(), "length {n} is not a power of two");
    let mut half = 1;
    while half < n {
        for block in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        half *= 2;
    }
    bit_reverse_permute(v);
}

fn bit_reverse_permute(v: &mut [f64]) {
    let bits = v.len().trailing_zeros();
    for i in 0..v.len() {
        let j = reverse_bits(i, bits);
        if i < j {
            v.swap(i, j);
        }
    }
}

fn scale(v: &mut [f64], factor: f64) {
    v.iter_mut().for_each(|x| *x *= factor);
}

pub fn wht_1d(f: &Grid1D) -> Spectrum1D {
    let mut coeffs = f.samples().to_vec();
    paley_fwht_in_place(&mut coeffs);
    scale(&mut coeffs, 1.0 / f.len() as f64);
    Spectrum1D::new(f.depth(), coeffs).expect("transform preserves shape")
}

/// Direct evaluation of `f̂(k) = 2^{-B} Σ_i f(i) w_k(i)`, ascending `i`.
pub fn naive_wht_1d(f: &Grid1D) -> Spectrum1D {
    let bits = f.depth().bits();
    let n = f.len();
    let coeffs = (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for (i, &v) in f.samples().iter().enumerate() {
                acc += v * walsh_sign(k, i, bits) as f64;
            }
            acc / n as f64
        })
        .collect();
    Spectrum1D::new(f.depth(), coeffs).expect("transform preserves shape")
}

pub fn inverse_wht_1d(c: &Spectrum1D) -> Grid1D {
    let mut samples = c.coeffs().to_vec();
    paley_fwht_in_place(&mut samples);
    Grid1D::new(c.depth(), samples).expect("transform preserves shape")
}

/// Row pass over `y` then column pass over `x`, unnormalized.
fn paley_fwht_2d_in_place(data: &mut [f64], side: usize) {
    data.par_chunks_mut(side).for_each(paley_fwht_in_place);
    let mut t = transpose(data, side);
    t.par_chunks_mut(side).for_each(paley_fwht_in_place);
    data.copy_from_slice(&transpose(&t, side));
}

fn transpose(data: &[f64], side: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for x in 0..side {
        for y in 0..side {
            out[y * side + x] = data[x * side + y];
        }
    }
    out
}

pub fn wht_2d(f: &Grid2D) -> Spectrum2D {
    let side = f.side();
    let mut coeffs = f.samples().to_vec();
    paley_fwht_2d_in_place(&mut coeffs, side);
    scale(&mut coeffs, 1.0 / (side * side) as f64);
    Spectrum2D::new(f.depth(), coeffs).expect("transform preserves shape")
}

/// Direct `O(N^4)` evaluation of `f̂(m,n) = 2^{-2B} Σ_{x,y} f(x,y) w_m(x) w_n(y)`.
pub fn naive_wht_2d(f: &Grid2D) -> Spectrum2D {
    let bits = f.depth().bits();
    let side = f.side();
    let coeffs = (0..side * side)
        .into_par_iter()
        .map(|mn| {
            let (m, n) = (mn / side, mn % side);
            let mut acc = 0.0;
            for x in 0..side {
                let wx = walsh_sign(m, x, bits);
                for y in 0..side {
                    acc += f.at(x, y) * (wx * walsh_sign(n, y, bits)) as f64;
                }
            }
            acc / (side * side) as f64
        })
        .collect();
    Spectrum2D::new(f.depth(), coeffs).expect("transform preserves shape")
}

pub fn inverse_wht_2d(c: &Spectrum2D) -> Grid2D {
    let mut samples = c.coeffs().to_vec();
    paley_fwht_2d_in_place(&mut samples, c.side());
    Grid2D::new(c.depth(), samples).expect("transform preserves shape")
}

/// `Σ_{k<n} c_k w_k(i)` for every grid index `i`: synthesis of a truncated
/// coefficient vector. Used by the partial-sum operators.
pub(crate) fn synthesize_truncated(coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut v = coeffs.to_vec();
    v[n..].iter_mut().for_each(|c| *c = 0.0);
    paley_fwht_in_place(&mut v);
    v
}

/// Samples of `w_k` on a `B`-bit grid.
pub fn walsh_grid_1d(depth: BitDepth, k: usize) -> Result<Grid1D> {
    Ok(inverse_wht_1d(&Spectrum1D::unit(depth, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{walsh, DyadicPoint};
    use proptest::prelude::*;

    fn depth(b: u32) -> BitDepth {
        BitDepth::new(b).unwrap()
    }

    fn lcg_samples(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn walsh_samples_have_unit_spectrum() {
        let d = depth(3);
        let f = Grid1D::from_fn(d, |i| {
            walsh(5, DyadicPoint::new(i, d).unwrap()).unwrap() as f64
        })
        .unwrap();
        let c = wht_1d(&f);
        let unit = Spectrum1D::unit(d, 5).unwrap();
        assert_eq!(c, unit);
        assert_eq!(naive_wht_1d(&f), unit);
        assert_eq!(inverse_wht_1d(&unit), f);
        assert_eq!(walsh_grid_1d(d, 5).unwrap(), f);
    }

    #[test]
    fn constant_function() {
        let d = depth(4);
        let c = wht_1d(&Grid1D::constant(d, 2.5).unwrap());
        assert_eq!(c.coeffs()[0], 2.5);
        assert!(c.coeffs()[1..].iter().all(|&v| v == 0.0));
        let one = inverse_wht_1d(&Spectrum1D::unit(d, 0).unwrap());
        assert!(one.samples().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn fast_matches_naive_1d() {
        let d = depth(8);
        let f = Grid1D::new(d, lcg_samples(256, 3)).unwrap();
        assert!(wht_1d(&f).max_abs_diff(&naive_wht_1d(&f)) <= 1e-12);
    }

    #[test]
    fn tensor_walsh_2d() {
        let d = depth(4);
        let b = d.bits();
        let f = Grid2D::from_fn(d, |x, y| (walsh_sign(3, x, b) * walsh_sign(6, y, b)) as f64)
            .unwrap();
        let unit = Spectrum2D::unit(d, 3, 6).unwrap();
        assert_eq!(wht_2d(&f), unit);
        assert_eq!(naive_wht_2d(&f), unit);
        assert_eq!(inverse_wht_2d(&unit), f);
        let one = wht_2d(&Grid2D::constant(d, 1.0).unwrap());
        assert_eq!(one, Spectrum2D::unit(d, 0, 0).unwrap());
    }

    #[test]
    fn fast_matches_naive_2d() {
        let d = depth(6);
        let f = Grid2D::new(d, lcg_samples(64 * 64, 11)).unwrap();
        assert!(wht_2d(&f).max_abs_diff(&naive_wht_2d(&f)) <= 1e-12);
    }

    #[test]
    fn translation_covariance_is_exact() {
        let d = depth(6);
        let f = Grid1D::new(d, lcg_samples(64, 5)).unwrap();
        let a = 45usize;
        let shifted = Grid1D::from_fn(d, |i| f.samples()[i ^ a]).unwrap();
        let lhs = wht_1d(&shifted);
        let rhs = wht_1d(&f);
        for k in 0..64 {
            let w = walsh_sign(k, a, 6) as f64;
            assert!((lhs.coeffs()[k] - w * rhs.coeffs()[k]).abs() <= 1e-15);
        }
    }

    proptest! {
        #[test]
        fn parseval_and_round_trip(bits in 1u32..=10, seed in any::<u64>()) {
            let d = depth(bits);
            let f = Grid1D::new(d, lcg_samples(d.size(), seed)).unwrap();
            let c = wht_1d(&f);
            let energy: f64 = f.samples().iter().map(|v| v * v).sum::<f64>() / d.size() as f64;
            let spec: f64 = c.coeffs().iter().map(|v| v * v).sum();
            prop_assert!((energy - spec).abs() <= 1e-12 * energy.max(1e-300));
            prop_assert!(inverse_wht_1d(&c).max_abs_diff(&f) <= 1e-12);
        }

        #[test]
        fn linearity(bits in 1u32..=8, seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let d = depth(bits);
            let f = Grid1D::new(d, lcg_samples(d.size(), seed)).unwrap();
            let g = Grid1D::new(d, lcg_samples(d.size(), seed ^ 0xabcd)).unwrap();
            let h = Grid1D::from_fn(d, |i| alpha * f.samples()[i] + beta * g.samples()[i]).unwrap();
            let (cf, cg, ch) = (wht_1d(&f), wht_1d(&g), wht_1d(&h));
            for k in 0..d.size() {
                let expect = alpha * cf.coeffs()[k] + beta * cg.coeffs()[k];
                prop_assert!((ch.coeffs()[k] - expect).abs() <= 1e-12);
            }
        }

        #[test]
        fn parseval_2d(bits in 1u32..=5, seed in any::<u64>()) {
            let d = depth(bits);
            let n = d.size();
            let f = Grid2D::new(d, lcg_samples(n * n, seed)).unwrap();
            let c = wht_2d(&f);
            let energy: f64 = f.samples().iter().map(|v| v * v).sum::<f64>() / (n * n) as f64;
            let spec: f64 = c.coeffs().iter().map(|v| v * v).sum();
            prop_assert!((energy - spec).abs() <= 1e-12 * energy.max(1e-300));
            prop_assert!(inverse_wht_2d(&c).max_abs_diff(&f) <= 1e-12);
        }
    }
}
