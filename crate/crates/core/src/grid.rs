//! Dyadic step functions and their Walsh spectra.
//!
//! 2D arrays are row-major with the first coordinate `x` selecting the row:
//! `samples[x * N + y] = f(x, y)` and `coeffs[m * N + n] = f̂(m, n)` where
//! `m` is the frequency along `x`.

use crate::dyadic::BitDepth;
use crate::error::{Result, WssError};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(WssError::data(format!("non-finite value at index {i}"))),
        None => Ok(()),
    }
}

/// A function constant on the `2^B` cells of `[0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    depth: BitDepth,
    samples: Vec<f64>,
}

impl Grid1D {
    pub fn new(depth: BitDepth, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != depth.size() {
            return Err(WssError::data(format!(
                "expected {} samples, got {}",
                depth.size(),
                samples.len()
            )));
        }
        check_finite(&samples)?;
        Ok(Grid1D { depth, samples })
    }

    pub fn from_fn(depth: BitDepth, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new(depth, (0..depth.size()).map(f).collect())
    }

    pub fn constant(depth: BitDepth, c: f64) -> Result<Self> {
        Self::new(depth, vec![c; depth.size()])
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn max_abs_diff(&self, other: &Grid1D) -> f64 {
        max_abs_diff(&self.samples, &other.samples)
    }

    /// `∫ |f|` on the grid.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() / self.len() as f64
    }
}

/// A function constant on the `2^B × 2^B` cells of `[0,1)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    depth: BitDepth,
    samples: Vec<f64>,
}

impl Grid2D {
    pub fn new(depth: BitDepth, samples: Vec<f64>) -> Result<Self> {
        if depth.bits() > BitDepth::MAX_2D {
            return Err(WssError::usage(format!(
                "2D bit depth {depth} exceeds {}",
                BitDepth::MAX_2D
            )));
        }
        let n = depth.size();
        if samples.len() != n * n {
            return Err(WssError::data(format!(
                "expected {}x{} samples, got {}",
                n,
                n,
                samples.len()
            )));
        }
        check_finite(&samples)?;
        Ok(Grid2D { depth, samples })
    }

    pub fn from_fn(depth: BitDepth, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = depth.size();
        let samples = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::new(depth, samples)
    }

    pub fn constant(depth: BitDepth, c: f64) -> Result<Self> {
        Self::new(depth, vec![c; depth.size() * depth.size()])
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    /// Cells per axis.
    pub fn side(&self) -> usize {
        self.depth.size()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.samples[x * self.side() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let n = self.side();
        &self.samples[x * n..(x + 1) * n]
    }

    /// The 1D slice `s ↦ f(s, y)`.
    pub fn column(&self, y: usize) -> Vec<f64> {
        let n = self.side();
        (0..n).map(|x| self.samples[x * n + y]).collect()
    }

    pub fn max_abs_diff(&self, other: &Grid2D) -> f64 {
        max_abs_diff(&self.samples, &other.samples)
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Walsh–Fourier coefficients `f̂(k)`, Paley order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    depth: BitDepth,
    coeffs: Vec<f64>,
}

impl Spectrum1D {
    pub fn new(depth: BitDepth, coeffs: Vec<f64>) -> Result<Self> {
        let g = Grid1D::new(depth, coeffs)?;
        Ok(Spectrum1D {
            depth: g.depth,
            coeffs: g.samples,
        })
    }

    /// The spectrum with a single unit coefficient at `k`.
    pub fn unit(depth: BitDepth, k: usize) -> Result<Self> {
        if k >= depth.size() {
            return Err(WssError::usage(format!("index {k} outside spectrum")));
        }
        let mut coeffs = vec![0.0; depth.size()];
        coeffs[k] = 1.0;
        Ok(Spectrum1D { depth, coeffs })
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn max_abs_diff(&self, other: &Spectrum1D) -> f64 {
        max_abs_diff(&self.coeffs, &other.coeffs)
    }
}

/// Double Walsh–Fourier coefficients, `coeffs[m * N + n] = f̂(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    depth: BitDepth,
    coeffs: Vec<f64>,
}

impl Spectrum2D {
    pub fn new(depth: BitDepth, coeffs: Vec<f64>) -> Result<Self> {
        let g = Grid2D::new(depth, coeffs)?;
        Ok(Spectrum2D {
            depth: g.depth,
            coeffs: g.samples,
        })
    }

    pub fn unit(depth: BitDepth, m: usize, n: usize) -> Result<Self> {
        let side = depth.size();
        if m >= side || n >= side {
            return Err(WssError::usage(format!("index ({m},{n}) outside spectrum")));
        }
        let mut coeffs = vec![0.0; side * side];
        coeffs[m * side + n] = 1.0;
        Spectrum2D::new(depth, coeffs)
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn side(&self) -> usize {
        self.depth.size()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn at(&self, m: usize, n: usize) -> f64 {
        self.coeffs[m * self.side() + n]
    }

    pub fn max_abs_diff(&self, other: &Spectrum2D) -> f64 {
        max_abs_diff(&self.coeffs, &other.coeffs)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "shape mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        let d = BitDepth::new(2).unwrap();
        assert!(matches!(Grid1D::new(d, vec![0.0; 3]), Err(WssError::Data(_))));
        assert!(matches!(
            Grid1D::new(d, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(WssError::Data(_))
        ));
        assert!(Grid2D::new(d, vec![0.0; 15]).is_err());
        assert!(Grid2D::new(BitDepth::new(13).unwrap(), vec![]).is_err());
    }

    #[test]
    fn layout_is_row_major_in_x() {
        let d = BitDepth::new(2).unwrap();
        let g = Grid2D::from_fn(d, |x, y| (10 * x + y) as f64).unwrap();
        assert_eq!(g.at(2, 3), 23.0);
        assert_eq!(g.row(1), &[10.0, 11.0, 12.0, 13.0]);
        assert_eq!(g.column(1), vec![1.0, 11.0, 21.0, 31.0]);
    }
}
