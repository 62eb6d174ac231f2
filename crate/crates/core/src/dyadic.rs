//! Arithmetic on the dyadic group discretized at `B` bits.
//!
//! A point `x = idx · 2^{-B}` is stored by its grid index. Bit `k` of the
//! binary expansion `x = Σ x_k 2^{-(k+1)}` is bit `B-1-k` of `idx`, so the
//! expansion digit `x_0` is the most significant bit of the index. Dyadic
//! addition is XOR of indices, and the Paley-ordered Walsh function `w_k`
//! is the character `(-1)^{popcount(k & rev_B(idx))}`.

use crate::error::{Result, WssError};

/// Number of dyadic bits of resolution; a grid has `2^B` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitDepth(u32);

impl BitDepth {
    pub const MAX_1D: u32 = 24;
    pub const MAX_2D: u32 = 12;

    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > Self::MAX_1D {
            return Err(WssError::usage(format!(
                "bit depth {bits} outside 1..={}",
                Self::MAX_1D
            )));
        }
        Ok(BitDepth(bits))
    }

    /// Bit depth admissible for a square 2D grid.
    pub fn new_2d(bits: u32) -> Result<Self> {
        if bits == 0 || bits > Self::MAX_2D {
            return Err(WssError::usage(format!(
                "2D bit depth {bits} outside 1..={}",
                Self::MAX_2D
            )));
        }
        Ok(BitDepth(bits))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    /// Grid size `N = 2^B`.
    #[inline]
    pub fn size(self) -> usize {
        1usize << self.0
    }
}

impl std::fmt::Display for BitDepth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reverse the low `bits` bits of `idx`.
#[inline]
pub fn reverse_bits(idx: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        idx.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `w_k` at grid index `idx` of a `bits`-bit grid, as `±1`. No range checks.
#[inline]
pub fn walsh_sign(k: usize, idx: usize, bits: u32) -> i32 {
    if (k & reverse_bits(idx, bits)).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// A grid point `x = idx · 2^{-B}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    idx: usize,
    depth: BitDepth,
}

impl DyadicPoint {
    pub fn new(idx: usize, depth: BitDepth) -> Result<Self> {
        if idx >= depth.size() {
            return Err(WssError::usage(format!(
                "index {idx} outside grid of size {}",
                depth.size()
            )));
        }
        Ok(DyadicPoint { idx, depth })
    }

    /// The grid point whose cell contains `x ∈ [0,1)`.
    pub fn from_real(x: f64, depth: BitDepth) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(WssError::usage(format!("point {x} outside [0,1)")));
        }
        let idx = (x * depth.size() as f64).floor() as usize;
        Self::new(idx.min(depth.size() - 1), depth)
    }

    pub fn zero(depth: BitDepth) -> Self {
        DyadicPoint { idx: 0, depth }
    }

    #[inline]
    pub fn idx(self) -> usize {
        self.idx
    }

    #[inline]
    pub fn depth(self) -> BitDepth {
        self.depth
    }

    pub fn to_real(self) -> f64 {
        self.idx as f64 / self.depth.size() as f64
    }

    /// Expansion digit `x_k` (`k = 0` is the coefficient of `1/2`).
    pub fn digit(self, k: u32) -> Result<u8> {
        if k >= self.depth.bits() {
            return Err(WssError::usage(format!(
                "digit {k} beyond resolution {}",
                self.depth
            )));
        }
        Ok(((self.idx >> (self.depth.bits() - 1 - k)) & 1) as u8)
    }
}

/// `x ⊕ y`: digitwise addition mod 2.
pub fn dyadic_add(x: DyadicPoint, y: DyadicPoint) -> Result<DyadicPoint> {
    if x.depth != y.depth {
        return Err(WssError::usage(format!(
            "mismatched bit depths {} and {}",
            x.depth, y.depth
        )));
    }
    Ok(DyadicPoint {
        idx: x.idx ^ y.idx,
        depth: x.depth,
    })
}

/// Rademacher function `r_n(x) = r_0(2^n x)`.
pub fn rademacher(n: u32, x: DyadicPoint) -> Result<i32> {
    if n >= x.depth.bits() {
        return Err(WssError::usage(format!(
            "r_{n} is not constant on cells of a {}-bit grid",
            x.depth
        )));
    }
    Ok(if x.digit(n)? == 0 { 1 } else { -1 })
}

/// Paley-ordered Walsh function `w_k(x)`.
pub fn walsh(k: usize, x: DyadicPoint) -> Result<i32> {
    if k >= x.depth.size() {
        return Err(WssError::usage(format!(
            "w_{k} is not resolved by a {}-bit grid",
            x.depth
        )));
    }
    Ok(walsh_sign(k, x.idx, x.depth.bits()))
}

/// Walsh–Dirichlet kernel `D_n(x) = Σ_{k<n} w_k(x)`, an integer.
pub fn dirichlet_kernel(n: usize, x: DyadicPoint) -> Result<i64> {
    if n == 0 || n > x.depth.size() {
        return Err(WssError::usage(format!(
            "D_{n} requires 1 <= n <= {}",
            x.depth.size()
        )));
    }
    let rev = reverse_bits(x.idx, x.depth.bits());
    Ok((0..n)
        .map(|k| if (k & rev).count_ones() & 1 == 0 { 1 } else { -1 })
        .sum())
}

/// The generator `e_j = 2^{-(j+1)}`, the point whose only nonzero digit is `x_j`.
pub fn unit_point(j: u32, depth: BitDepth) -> Result<DyadicPoint> {
    if j >= depth.bits() {
        return Err(WssError::usage(format!(
            "e_{j} not representable on a {depth}-bit grid"
        )));
    }
    Ok(DyadicPoint {
        idx: 1usize << (depth.bits() - 1 - j),
        depth,
    })
}

/// Half-open dyadic interval `[k·2^{-n}, (k+1)·2^{-n})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    level: u32,
    offset: usize,
}

impl DyadicInterval {
    pub fn new(level: u32, offset: usize) -> Result<Self> {
        if level >= usize::BITS || offset >= (1usize << level) {
            return Err(WssError::usage(format!(
                "offset {offset} invalid at level {level}"
            )));
        }
        Ok(DyadicInterval { level, offset })
    }

    /// `I_n = [0, 2^{-n})`.
    pub fn origin(level: u32) -> Self {
        DyadicInterval { level, offset: 0 }
    }

    /// `I_n(x) = x ⊕ I_n`, the level-`n` interval containing `x`.
    pub fn containing(x: DyadicPoint, level: u32) -> Result<Self> {
        if level > x.depth.bits() {
            return Err(WssError::usage(format!(
                "level {level} finer than the {}-bit grid",
                x.depth
            )));
        }
        Ok(DyadicInterval {
            level,
            offset: x.idx >> (x.depth.bits() - level),
        })
    }

    pub fn level(self) -> u32 {
        self.level
    }

    pub fn offset(self) -> usize {
        self.offset
    }

    pub fn measure(self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn contains(self, x: DyadicPoint) -> bool {
        self.level <= x.depth.bits() && (x.idx >> (x.depth.bits() - self.level)) == self.offset
    }

    /// Grid indices covered at resolution `depth` (requires `level <= B`).
    pub fn grid_range(self, depth: BitDepth) -> std::ops::Range<usize> {
        let width = 1usize << (depth.bits() - self.level);
        self.offset * width..(self.offset + 1) * width
    }
}
