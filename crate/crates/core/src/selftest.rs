//! Quick oracle suites run by `wss selftest`.

use crate::dyadic::{dyadic_add, walsh, BitDepth, DyadicPoint};
use crate::experiments::function_spec::{spike_height, SPIKE_RESIDUAL_TOLERANCE};
use crate::experiments::rng::ExperimentRng;
use crate::grid::{Grid1D, Grid2D};
use crate::maximal::{dyadic_maximal, schipp_v};
use crate::means::{bmo_sequence_norm, SummandSequence};
use crate::oracles::{
    bmo_by_enumeration, cell_average_1d, dyadic_maximal_by_enumeration,
    quadratic_sum_by_truncation, schipp_v_by_enumeration,
};
use crate::partial_sums::{partial_sum_1d, quadratic_sums};
use crate::transform::{inverse_wht_1d, inverse_wht_2d, naive_wht_1d, naive_wht_2d, wht_1d, wht_2d};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error, or a count of mismatches.
    pub detail: String,
}

fn tolerance_check(name: &'static str, err: f64, tol: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: err <= tol,
        detail: format!("max error {err:.3e} (tolerance {tol:.0e})"),
    }
}

fn random_1d(bits: u32, rng: &mut ExperimentRng) -> Grid1D {
    let d = BitDepth::new(bits).expect("valid depth");
    let v: Vec<f64> = (0..d.size()).map(|_| rng.symmetric(1.0)).collect();
    Grid1D::new(d, v).expect("finite")
}

fn random_2d(bits: u32, rng: &mut ExperimentRng) -> Grid2D {
    let d = BitDepth::new(bits).expect("valid depth");
    let n = d.size();
    let v: Vec<f64> = (0..n * n).map(|_| rng.symmetric(1.0)).collect();
    Grid2D::new(d, v).expect("finite")
}

/// Runs every suite; deterministic.
pub fn run_all() -> Vec<CheckOutcome> {
    let mut rng = ExperimentRng::new(0x5e1f);
    let mut out = Vec::new();

    let mut err: f64 = 0.0;
    let mut round: f64 = 0.0;
    for bits in 1..=8 {
        let f = random_1d(bits, &mut rng);
        let c = wht_1d(&f);
        err = err.max(c.max_abs_diff(&naive_wht_1d(&f)));
        round = round.max(inverse_wht_1d(&c).max_abs_diff(&f));
    }
    for bits in 1..=5 {
        let f = random_2d(bits, &mut rng);
        let c = wht_2d(&f);
        err = err.max(c.max_abs_diff(&naive_wht_2d(&f)));
        round = round.max(inverse_wht_2d(&c).max_abs_diff(&f));
    }
    out.push(tolerance_check("fast transform vs definitional sum", err, 1e-10));
    out.push(tolerance_check("transform round trip", round, 1e-12));

    let d = BitDepth::new(5).expect("valid depth");
    let mut bad = 0usize;
    for k in 0..d.size() {
        for a in 0..d.size() {
            let x = DyadicPoint::new(a, d).expect("on grid");
            for b in 0..d.size() {
                let y = DyadicPoint::new(b, d).expect("on grid");
                let s = dyadic_add(x, y).expect("same depth");
                let lhs = walsh(k, s).expect("k < 2^B");
                let rhs = walsh(k, x).expect("k < 2^B") * walsh(k, y).expect("k < 2^B");
                bad += usize::from(lhs != rhs);
            }
        }
        for j in 0..d.size() {
            let dot: i64 = (0..d.size())
                .map(|i| {
                    let p = DyadicPoint::new(i, d).expect("on grid");
                    i64::from(walsh(k, p).expect("k") * walsh(j, p).expect("j"))
                })
                .sum();
            bad += usize::from(dot != if j == k { d.size() as i64 } else { 0 });
        }
    }
    out.push(CheckOutcome {
        name: "walsh character and orthogonality (B=5)",
        passed: bad == 0,
        detail: format!("{bad} mismatches"),
    });

    let f = random_1d(8, &mut rng);
    let mut err: f64 = 0.0;
    for k in 0..=8 {
        let s = partial_sum_1d(&f, 1 << k).expect("within grid");
        for i in 0..f.len() {
            err = err.max((s.samples()[i] - cell_average_1d(&f, k, i)).abs());
        }
    }
    out.push(tolerance_check("S_(2^k) equals cell averages", err, 1e-12));

    let f = random_2d(4, &mut rng);
    let field = quadratic_sums(&f).expect("small grid");
    let err = (0..=f.side())
        .map(|n| field.level(n).max_abs_diff(&quadratic_sum_by_truncation(&f, n)))
        .fold(0.0, f64::max);
    out.push(tolerance_check("incremental quadratic sums vs truncation", err, 1e-10));

    let mut bad = 0usize;
    for len in [1usize, 2, 4, 8, 16, 32, 64] {
        for _ in 0..8 {
            let v: Vec<f64> = (0..len).map(|_| rng.symmetric(10.0)).collect();
            let fast = bmo_sequence_norm(&SummandSequence::new(v.clone()).expect("finite"));
            bad += usize::from(fast != bmo_by_enumeration(&v));
        }
    }
    out.push(CheckOutcome {
        name: "sequence BMO vs enumeration (exact)",
        passed: bad == 0,
        detail: format!("{bad} mismatches"),
    });

    let f = random_1d(5, &mut rng);
    let mut err: f64 = 0.0;
    for n in 1..=5 {
        let fast = schipp_v(&f, n).expect("n <= B");
        let brute = schipp_v_by_enumeration(&f, n);
        for (a, b) in fast.samples().iter().zip(&brute) {
            err = err.max((a - b).abs());
        }
    }
    out.push(tolerance_check("Schipp V_n vs t-enumeration", err, 1e-12));

    let f = random_2d(4, &mut rng);
    let fast = dyadic_maximal(&f);
    let err = fast
        .samples()
        .iter()
        .zip(dyadic_maximal_by_enumeration(&f))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push(tolerance_check("dyadic maximal vs enumeration", err, 1e-12));

    let mut worst: f64 = 0.0;
    for target in [1.0, 10.0, 100.0] {
        let mu = 1.0 / 16.0;
        let h = spike_height(target, mu).expect("positive target");
        worst = worst.max((h * h.ln().powi(2) * mu - target).abs());
    }
    out.push(tolerance_check("spike height bisection residual", worst, SPIKE_RESIDUAL_TOLERANCE));

    out
}
