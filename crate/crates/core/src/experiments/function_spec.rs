//! Single-token descriptions of test functions.
//!
//! Grammar: `kind[:params]@B=bits[,dim=1|2]`. Parameters are comma-separated
//! and either positional numbers or `key=value` pairs, depending on the kind:
//!
//! | kind              | params                               | dims |
//! |-------------------|--------------------------------------|------|
//! | `indicator-rect`  | `x0,x1,y0,y1` (2D) or `a,b` (1D)     | 1, 2 |
//! | `walsh-tensor`    | `m,n`                                | 2    |
//! | `walsh-sum`       | `k1,k2,...`                          | 1    |
//! | `random-step`     | `level=L,amp=A,seed=S` (all optional)| 1, 2 |
//! | `random-spectrum` | `support=K,amp=A,seed=S` (optional)  | 1, 2 |
//! | `spike`           | `level=k,target=T`                   | 1, 2 |
//!
//! `walsh-sum` defaults to `dim=1`; every other kind defaults to `dim=2`.

use std::fmt;
use std::str::FromStr;

use crate::dyadic::BitDepth;
use crate::error::{Result, WssError};
use crate::grid::{Grid1D, Grid2D, Spectrum1D, Spectrum2D};
use crate::transform::{inverse_wht_1d, inverse_wht_2d};

use super::rng::ExperimentRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// Half-open box `[x0,x1) × [y0,y1)`, or `[a,b)` in 1D.
    IndicatorRect { corners: Vec<f64> },
    WalshTensor { m: usize, n: usize },
    WalshSum { indices: Vec<usize> },
    /// Uniform values in `[-amp, amp)` on the level-`level` cells
    /// (default: the finest level).
    RandomStep {
        level: Option<u32>,
        amp: f64,
        seed: Option<u64>,
    },
    /// Uniform coefficients in `[-amp, amp)` below index `support` per axis.
    RandomSpectrum {
        support: usize,
        amp: f64,
        seed: Option<u64>,
    },
    /// `h · 1_{I_level × I_level}` with `∫ |f| (log⁺|f|)² = target`.
    Spike { level: u32, target: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    text: String,
    kind: FunctionKind,
    depth: BitDepth,
    dim: Dim,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratedFunction {
    OneD(Grid1D),
    TwoD(Grid2D),
}

impl GeneratedFunction {
    pub fn as_1d(&self) -> Option<&Grid1D> {
        match self {
            GeneratedFunction::OneD(g) => Some(g),
            GeneratedFunction::TwoD(_) => None,
        }
    }

    pub fn as_2d(&self) -> Option<&Grid2D> {
        match self {
            GeneratedFunction::TwoD(g) => Some(g),
            GeneratedFunction::OneD(_) => None,
        }
    }
}

const DEFAULT_SPECTRUM_SUPPORT: usize = 4;

impl FunctionSpec {
    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// The seed actually used: a `seed=` parameter overrides the run seed.
    pub fn effective_seed(&self, run_seed: u64) -> u64 {
        match &self.kind {
            FunctionKind::RandomStep { seed: Some(s), .. }
            | FunctionKind::RandomSpectrum { seed: Some(s), .. } => *s,
            _ => run_seed,
        }
    }

    /// Same spec at a different bit depth.
    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        let head = self.text.rsplit_once('@').map_or(&*self.text, |(h, _)| h);
        let dim = match self.dim {
            Dim::One => ",dim=1",
            Dim::Two => "",
        };
        format!("{head}@B={bits}{dim}").parse()
    }

    pub fn generate(&self, run_seed: u64) -> Result<GeneratedFunction> {
        let seed = self.effective_seed(run_seed);
        let d = self.depth;
        let n = d.size();
        let bits = d.bits();
        let out = match (&self.kind, self.dim) {
            (FunctionKind::IndicatorRect { corners }, Dim::One) => {
                let (a, b) = (corners[0], corners[1]);
                GeneratedFunction::OneD(Grid1D::from_fn(d, |i| {
                    indicator(a, b, i as f64 / n as f64)
                })?)
            }
            (FunctionKind::IndicatorRect { corners }, Dim::Two) => {
                let c = corners.clone();
                GeneratedFunction::TwoD(Grid2D::from_fn(d, |x, y| {
                    indicator(c[0], c[1], x as f64 / n as f64)
                        * indicator(c[2], c[3], y as f64 / n as f64)
                })?)
            }
            (FunctionKind::WalshTensor { m, n: k }, _) => {
                let mut s = Spectrum2D::new(d, vec![0.0; n * n])?;
                s.coeffs_mut()[m * n + k] = 1.0;
                GeneratedFunction::TwoD(inverse_wht_2d(&s))
            }
            (FunctionKind::WalshSum { indices }, _) => {
                let mut s = Spectrum1D::new(d, vec![0.0; n])?;
                for &k in indices {
                    s.coeffs_mut()[k] += 1.0;
                }
                GeneratedFunction::OneD(inverse_wht_1d(&s))
            }
            (FunctionKind::RandomStep { level, amp, .. }, dim) => {
                let level = level.unwrap_or(bits);
                let cells = 1usize << level;
                let shift = bits - level;
                let mut rng = ExperimentRng::new(seed);
                match dim {
                    Dim::One => {
                        let v: Vec<f64> = (0..cells).map(|_| rng.symmetric(*amp)).collect();
                        GeneratedFunction::OneD(Grid1D::from_fn(d, |i| v[i >> shift])?)
                    }
                    Dim::Two => {
                        let v: Vec<f64> =
                            (0..cells * cells).map(|_| rng.symmetric(*amp)).collect();
                        GeneratedFunction::TwoD(Grid2D::from_fn(d, |x, y| {
                            v[(x >> shift) * cells + (y >> shift)]
                        })?)
                    }
                }
            }
            (FunctionKind::RandomSpectrum { support, amp, .. }, dim) => {
                let k = *support;
                let mut rng = ExperimentRng::new(seed);
                match dim {
                    Dim::One => {
                        let mut s = Spectrum1D::new(d, vec![0.0; n])?;
                        for c in &mut s.coeffs_mut()[..k] {
                            *c = rng.symmetric(*amp);
                        }
                        GeneratedFunction::OneD(inverse_wht_1d(&s))
                    }
                    Dim::Two => {
                        let mut s = Spectrum2D::new(d, vec![0.0; n * n])?;
                        for m in 0..k {
                            for j in 0..k {
                                s.coeffs_mut()[m * n + j] = rng.symmetric(*amp);
                            }
                        }
                        GeneratedFunction::TwoD(inverse_wht_2d(&s))
                    }
                }
            }
            (FunctionKind::Spike { level, target }, dim) => {
                let cells = 1usize << (bits - level);
                match dim {
                    Dim::One => {
                        let h = spike_height(*target, (-(*level as f64)).exp2())?;
                        GeneratedFunction::OneD(Grid1D::from_fn(d, |i| {
                            if i < cells {
                                h
                            } else {
                                0.0
                            }
                        })?)
                    }
                    Dim::Two => {
                        let h = spike_height(*target, (-2.0 * *level as f64).exp2())?;
                        GeneratedFunction::TwoD(Grid2D::from_fn(d, |x, y| {
                            if x < cells && y < cells {
                                h
                            } else {
                                0.0
                            }
                        })?)
                    }
                }
            }
        };
        Ok(out)
    }
}

fn indicator(lo: f64, hi: f64, t: f64) -> f64 {
    if lo <= t && t < hi {
        1.0
    } else {
        0.0
    }
}

/// Largest residual accepted for the spike height equation.
pub const SPIKE_RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Solves `h (ln h)² · measure = target` for `h > 1` by bisection.
pub fn spike_height(target: f64, measure: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) || !(measure > 0.0) {
        return Err(WssError::usage(format!(
            "spike target {target} must be positive and finite"
        )));
    }
    let g = |h: f64| h * h.ln().powi(2) * measure;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while g(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = if (g(lo) - target).abs() <= (g(hi) - target).abs() {
        lo
    } else {
        hi
    };
    let residual = (g(h) - target).abs();
    if residual >= SPIKE_RESIDUAL_TOLERANCE {
        return Err(WssError::data(format!(
            "spike bisection stalled with residual {residual:e}"
        )));
    }
    Ok(h)
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A parameter with its byte offset in the token.
struct Param<'a> {
    pos: usize,
    key: Option<&'a str>,
    value: &'a str,
}

fn number<T: FromStr>(p: &Param<'_>, what: &str) -> Result<T> {
    p.value
        .trim()
        .parse()
        .map_err(|_| WssError::parse(p.pos, format!("invalid {what} '{}'", p.value)))
}

fn positional<'a>(params: &'a [Param<'a>], kind: &str) -> Result<&'a [Param<'a>]> {
    match params.iter().find(|p| p.key.is_some()) {
        Some(p) => Err(WssError::parse(p.pos, format!("{kind} takes positional parameters"))),
        None => Ok(params),
    }
}

fn split_params(body: &str, base: usize) -> Vec<Param<'_>> {
    if body.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut start = 0;
    for piece in body.split(',') {
        let pos = base + start;
        let p = match piece.split_once('=') {
            Some((k, v)) => Param {
                pos,
                key: Some(k.trim()),
                value: v,
            },
            None => Param {
                pos,
                key: None,
                value: piece,
            },
        };
        out.push(p);
        start += piece.len() + 1;
    }
    out
}

struct Keyed<'a> {
    params: Vec<Param<'a>>,
    allowed: &'static [&'static str],
}

impl<'a> Keyed<'a> {
    fn new(params: Vec<Param<'a>>, allowed: &'static [&'static str], kind: &str) -> Result<Self> {
        for p in &params {
            match p.key {
                Some(k) if allowed.contains(&k) => {}
                Some(k) => {
                    return Err(WssError::parse(p.pos, format!("unknown {kind} parameter '{k}'")))
                }
                None => return Err(WssError::parse(p.pos, format!("{kind} expects key=value"))),
            }
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].iter().any(|q| q.key == p.key) {
                return Err(WssError::parse(p.pos, "duplicate parameter"));
            }
        }
        Ok(Keyed { params, allowed })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        debug_assert!(self.allowed.contains(&key));
        self.params
            .iter()
            .find(|p| p.key == Some(key))
            .map(|p| number(p, key))
            .transpose()
    }
}

fn check_amp(amp: f64, pos: usize) -> Result<f64> {
    if amp.is_finite() && amp >= 0.0 {
        Ok(amp)
    } else {
        Err(WssError::parse(pos, format!("amplitude {amp} must be finite and >= 0")))
    }
}

impl FromStr for FunctionSpec {
    type Err = WssError;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let at = text
            .rfind('@')
            .ok_or_else(|| WssError::parse(text.len(), "missing '@B=' suffix"))?;
        let (head, tail) = (&text[..at], &text[at + 1..]);

        let mut bits = None;
        let mut dim = None;
        let mut off = at + 1;
        for piece in tail.split(',') {
            match piece.split_once('=') {
                Some(("B", v)) => {
                    let b: u32 = v
                        .parse()
                        .map_err(|_| WssError::parse(off + 2, format!("invalid bit depth '{v}'")))?;
                    bits = Some((b, off + 2));
                }
                Some(("dim", "1")) => dim = Some(Dim::One),
                Some(("dim", "2")) => dim = Some(Dim::Two),
                Some(("dim", v)) => {
                    return Err(WssError::parse(off + 4, format!("dim must be 1 or 2, got '{v}'")))
                }
                _ => return Err(WssError::parse(off, format!("unexpected '{piece}'"))),
            }
            off += piece.len() + 1;
        }
        let (bits, bits_pos) = bits.ok_or_else(|| WssError::parse(at + 1, "missing B=<bits>"))?;

        let (kind_name, body, body_pos) = match head.split_once(':') {
            Some((k, b)) => (k, b, k.len() + 1),
            None => (head, "", head.len()),
        };
        let params = split_params(body, body_pos);

        let default_dim = if kind_name == "walsh-sum" { Dim::One } else { Dim::Two };
        let dim = dim.unwrap_or(default_dim);
        let depth = match dim {
            Dim::One => BitDepth::new(bits),
            Dim::Two => BitDepth::new_2d(bits),
        }
        .map_err(|e| WssError::parse(bits_pos, e.to_string()))?;
        let size = depth.size();

        let kind = match kind_name {
            "indicator-rect" => {
                let ps = positional(&params, kind_name)?;
                let want = if dim == Dim::One { 2 } else { 4 };
                if ps.len() != want {
                    return Err(WssError::parse(
                        body_pos,
                        format!("indicator-rect needs {want} corners, got {}", ps.len()),
                    ));
                }
                let corners = ps
                    .iter()
                    .map(|p| number::<f64>(p, "corner"))
                    .collect::<Result<Vec<_>>>()?;
                for (i, pair) in corners.chunks(2).enumerate() {
                    let ok = 0.0 <= pair[0] && pair[0] <= pair[1] && pair[1] <= 1.0;
                    if !ok {
                        return Err(WssError::parse(
                            ps[2 * i].pos,
                            "corners must satisfy 0 <= lo <= hi <= 1",
                        ));
                    }
                }
                FunctionKind::IndicatorRect { corners }
            }
            "walsh-tensor" => {
                if dim == Dim::One {
                    return Err(WssError::parse(0, "walsh-tensor is two-dimensional; use walsh-sum"));
                }
                let ps = positional(&params, kind_name)?;
                if ps.len() != 2 {
                    return Err(WssError::parse(body_pos, "walsh-tensor needs indices m,n"));
                }
                let m: usize = number(&ps[0], "index")?;
                let n: usize = number(&ps[1], "index")?;
                for (v, p) in [(m, &ps[0]), (n, &ps[1])] {
                    if v >= size {
                        return Err(WssError::parse(p.pos, format!("index {v} >= 2^B = {size}")));
                    }
                }
                FunctionKind::WalshTensor { m, n }
            }
            "walsh-sum" => {
                if dim == Dim::Two {
                    return Err(WssError::parse(0, "walsh-sum is one-dimensional"));
                }
                let ps = positional(&params, kind_name)?;
                if ps.is_empty() {
                    return Err(WssError::parse(body_pos, "walsh-sum needs at least one index"));
                }
                let mut indices = Vec::with_capacity(ps.len());
                for p in ps {
                    let k: usize = number(p, "index")?;
                    if k >= size {
                        return Err(WssError::parse(p.pos, format!("index {k} >= 2^B = {size}")));
                    }
                    indices.push(k);
                }
                FunctionKind::WalshSum { indices }
            }
            "random-step" => {
                let kv = Keyed::new(params, &["level", "amp", "seed"], kind_name)?;
                let level: Option<u32> = kv.get("level")?;
                if let Some(l) = level {
                    if l > bits {
                        return Err(WssError::parse(body_pos, format!("level {l} exceeds B={bits}")));
                    }
                }
                let amp = check_amp(kv.get("amp")?.unwrap_or(1.0), body_pos)?;
                FunctionKind::RandomStep {
                    level,
                    amp,
                    seed: kv.get("seed")?,
                }
            }
            "random-spectrum" => {
                let kv = Keyed::new(params, &["support", "amp", "seed"], kind_name)?;
                let support = kv
                    .get("support")?
                    .unwrap_or(DEFAULT_SPECTRUM_SUPPORT.min(size));
                if support == 0 || support > size {
                    return Err(WssError::parse(
                        body_pos,
                        format!("support {support} outside 1..={size}"),
                    ));
                }
                let amp = check_amp(kv.get("amp")?.unwrap_or(1.0), body_pos)?;
                FunctionKind::RandomSpectrum {
                    support,
                    amp,
                    seed: kv.get("seed")?,
                }
            }
            "spike" => {
                let kv = Keyed::new(params, &["level", "target"], kind_name)?;
                let level: u32 = kv
                    .get("level")?
                    .ok_or_else(|| WssError::parse(body_pos, "spike needs level=k"))?;
                let target: f64 = kv
                    .get("target")?
                    .ok_or_else(|| WssError::parse(body_pos, "spike needs target=T"))?;
                if level > bits {
                    return Err(WssError::parse(body_pos, format!("level {level} exceeds B={bits}")));
                }
                if !(target > 0.0 && target.is_finite()) {
                    return Err(WssError::parse(body_pos, "spike target must be positive"));
                }
                FunctionKind::Spike { level, target }
            }
            other => return Err(WssError::parse(0, format!("unknown function kind '{other}'"))),
        };

        Ok(FunctionSpec {
            text: text.to_string(),
            kind,
            depth,
            dim,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::walsh_sign;
    use crate::means::{entropy_functional, entropy_functional_1d};

    fn spec(s: &str) -> FunctionSpec {
        s.parse().unwrap()
    }

    fn parse_pos(s: &str) -> usize {
        match s.parse::<FunctionSpec>() {
            Err(WssError::Parse { pos, .. }) => pos,
            other => panic!("expected parse error for {s}, got {other:?}"),
        }
    }

    #[test]
    fn lower_left_quadrant() {
        let g = spec("indicator-rect:0,0.5,0,0.5@B=4").generate(0).unwrap();
        let g = g.as_2d().unwrap();
        for x in 0..16 {
            for y in 0..16 {
                let inside = x < 8 && y < 8;
                assert_eq!(g.at(x, y), if inside { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn walsh_tensor_samples() {
        let g = spec("walsh-tensor:3,6@B=4").generate(0).unwrap();
        let g = g.as_2d().unwrap();
        for x in 0..16 {
            for y in 0..16 {
                let w = walsh_sign(3, x, 4) * walsh_sign(6, y, 4);
                assert_eq!(g.at(x, y), w as f64);
            }
        }
    }

    #[test]
    fn walsh_sum_is_one_dimensional() {
        let s = spec("walsh-sum:3,9@B=10");
        assert_eq!(s.dim(), Dim::One);
        let g = s.generate(0).unwrap();
        let g = g.as_1d().unwrap();
        for i in 0..1024 {
            assert_eq!(g.samples()[i], (walsh_sign(3, i, 10) + walsh_sign(9, i, 10)) as f64);
        }
    }

    #[test]
    fn spike_hits_entropy_target() {
        let s = spec("spike:level=2,target=10@B=6");
        let g = s.generate(0).unwrap();
        let g = g.as_2d().unwrap();
        let h = g.at(0, 0);
        let residual = (h * h.ln().powi(2) / 16.0 - 10.0).abs();
        assert!(residual < 1e-9, "residual {residual}");
        assert!((entropy_functional(g, 2.0).unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(g.at(15, 15), h);
        assert_eq!(g.at(16, 0), 0.0);

        let s1 = spec("spike:level=3,target=1@B=8,dim=1");
        let g1 = s1.generate(0).unwrap();
        assert!((entropy_functional_1d(g1.as_1d().unwrap(), 2.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_kinds_are_seeded() {
        let s = spec("random-step:level=2,amp=3@B=5");
        let a = s.generate(7).unwrap();
        assert_eq!(a, s.generate(7).unwrap());
        assert_ne!(a, s.generate(8).unwrap());
        let g = a.as_2d().unwrap();
        assert!(g.samples().iter().all(|v| v.abs() <= 3.0));
        assert_eq!(g.at(0, 0), g.at(7, 7));

        let pinned = spec("random-step:seed=5@B=4,dim=1");
        assert_eq!(pinned.effective_seed(99), 5);
        assert_eq!(pinned.generate(1).unwrap(), pinned.generate(2).unwrap());

        let r = spec("random-spectrum:support=3@B=4").generate(1).unwrap();
        let c = crate::transform::wht_2d(r.as_2d().unwrap());
        for m in 0..16 {
            for n in 0..16 {
                if m >= 3 || n >= 3 {
                    assert!(c.at(m, n).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn display_round_trips_and_rebits() {
        let s = spec("random-step:amp=2@B=5,dim=1");
        assert_eq!(s.to_string(), "random-step:amp=2@B=5,dim=1");
        let t = s.with_bits(7).unwrap();
        assert_eq!(t.depth().bits(), 7);
        assert_eq!(t.dim(), Dim::One);
        assert_eq!(spec("spike:level=2,target=1@B=5").with_bits(6).unwrap().to_string(),
            "spike:level=2,target=1@B=6");
    }

    #[test]
    fn malformed_specs_report_positions() {
        assert_eq!(parse_pos("indicator-rect:0,0.5,0,0.5"), 26);
        assert_eq!(parse_pos("blob:1@B=3"), 0);
        assert_eq!(parse_pos("walsh-tensor:3,x@B=4"), 15);
        assert_eq!(parse_pos("walsh-tensor:3,16@B=4"), 15);
        assert_eq!(parse_pos("walsh-tensor:3,6@B=q"), 19);
        assert_eq!(parse_pos("random-step:bogus=1@B=3"), 12);
        assert_eq!(parse_pos("indicator-rect:0.5,0.2,0,1@B=3"), 15);
        assert_eq!(parse_pos("walsh-tensor:1,1@B=13"), 19);
        assert!("spike:level=2@B=4".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn spike_bisection_residual() {
        for &t in &[1.0, 10.0, 100.0, 1e4] {
            let h = spike_height(t, 1.0 / 16.0).unwrap();
            assert!((h * h.ln().powi(2) / 16.0 - t).abs() < SPIKE_RESIDUAL_TOLERANCE);
        }
        assert!(spike_height(0.0, 1.0).is_err());
    }
}
