//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Reference values come from brute-force oracles defined in this file, not
//! from the library's fast paths. Criteria listed in `KNOWN_UNATTAINABLE`
//! are still run and still print FAIL when they fail; they do not fail the
//! process because the target is provably out of reach for the prescribed
//! inputs (see the README's acceptance section).

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use wss_core::dyadic::{dyadic_add, walsh, BitDepth, DyadicPoint};
use wss_core::experiments::config::SummabilitySetup;
use wss_core::experiments::rng::ExperimentRng;
use wss_core::experiments::{
    run_phi_means_1d, run_bmo_sweep, run_exp_summability, run_weak_type_suite, FunctionSpec, WeakOperator,
};
use wss_core::grid::{Grid1D, Grid2D};
use wss_core::means::{bmo_sequence_norm, PhiFunction, SummandSequence};
use wss_core::partial_sums::{partial_sum_1d, quadratic_sums, rectangular_partial_sum};
use wss_core::transform::{inverse_wht_1d, inverse_wht_2d, wht_1d, wht_2d};

const KNOWN_UNATTAINABLE: &[u32] = &[9];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

// ---- oracles -------------------------------------------------------------

/// `w_k(x) = Π_n r_n(x)^{k_n}` from the binary digits of `k` and `x`.
fn walsh_by_digits(k: usize, idx: usize, bits: u32) -> f64 {
    let mut sign = 1.0;
    for n in 0..bits {
        let k_n = (k >> n) & 1;
        let x_n = (idx >> (bits - 1 - n)) & 1;
        if k_n == 1 && x_n == 1 {
            sign = -sign;
        }
    }
    sign
}

fn walsh_table(bits: u32) -> Vec<Vec<f64>> {
    let n = 1usize << bits;
    (0..n)
        .map(|k| (0..n).map(|x| walsh_by_digits(k, x, bits)).collect())
        .collect()
}

fn naive_coeffs_1d(v: &[f64], w: &[Vec<f64>]) -> Vec<f64> {
    let n = v.len();
    (0..n)
            .map(|k| (0..n).map(|i| v[i] * w[k][i]).sum::<f64>() / n as f64)
        .collect()
}

fn naive_coeffs_2d(v: &[f64], side: usize, w: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; side * side];
    for m in 0..side {
        for k in 0..side {
            let mut acc = 0.0;
            for x in 0..side {
                for y in 0..side {
                    acc += v[x * side + y] * w[m][x] * w[k][y];
                }
            }
            out[m * side + k] = acc / (side * side) as f64;
        }
    }
    out
}

fn cell_mean(v: &[f64], lo: usize, len: usize) -> f64 {
    v[lo..lo + len].iter().sum::<f64>() / len as f64
}

/// Mean of a power-of-two block as the average of its halves' means.
fn pairwise_mean(v: &[f64]) -> f64 {
    if v.len() == 1 {
        return v[0];
    }
    let (lo, hi) = v.split_at(v.len() / 2);
    (pairwise_mean(lo) + pairwise_mean(hi)) / 2.0
}

fn bmo_by_enumeration(xi: &[f64]) -> f64 {
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

fn random_vec(rng: &mut ExperimentRng, len: usize, amp: f64) -> Vec<f64> {
    (0..len).map(|_| rng.symmetric(amp)).collect()
}

fn depth(bits: u32) -> BitDepth {
    BitDepth::new(bits).unwrap()
}

fn spec(s: &str) -> FunctionSpec {
    s.parse().unwrap()
}

// ---- criteria ------------------------------------------------------------

fn transform_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ExperimentRng::new(1);
    let tables: Vec<Vec<Vec<f64>>> = (0..=10).map(walsh_table).collect();
    let (mut err, mut round) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let b1 = 1 + (i % 10) as u32;
        let f = Grid1D::new(depth(b1), random_vec(&mut rng, 1 << b1, 1.0)).unwrap();
        let c = wht_1d(&f);
        let oracle = naive_coeffs_1d(f.samples(), &tables[b1 as usize]);
        for (a, b) in c.coeffs().iter().zip(&oracle) {
            err = err.max((a - b).abs());
        }
        round = round.max(inverse_wht_1d(&c).max_abs_diff(&f));

        let b2 = 1 + (i % 6) as u32;
        let side = 1usize << b2;
        let g = Grid2D::new(depth(b2), random_vec(&mut rng, side * side, 1.0)).unwrap();
        let c2 = wht_2d(&g);
        let oracle = naive_coeffs_2d(g.samples(), side, &tables[b2 as usize]);
        for (a, b) in c2.coeffs().iter().zip(&oracle) {
            err = err.max((a - b).abs());
        }
        round = round.max(inverse_wht_2d(&c2).max_abs_diff(&g));
    }
    let secs = start.elapsed();
    outcome(
        err <= 1e-10 && round <= 1e-12 && secs <= Duration::from_secs(30),
        format!("max error {err:.2e}, round trip {round:.2e}, {:.1}s", secs.as_secs_f64()),
    )
}

fn exact_algebra() -> Outcome {
    let mut failures = 0usize;
    let mut checked = 0usize;
    let mut check = |ok: bool| {
        checked += 1;
        failures += usize::from(!ok);
    };
    for bits in 1..=6 {
        let d = depth(bits);
        let n = d.size();
        let pt = |i| DyadicPoint::new(i, d).unwrap();
        let zero = DyadicPoint::zero(d);
        for a in 0..n {
            check(dyadic_add(pt(a), zero).unwrap() == pt(a));
            check(dyadic_add(pt(a), pt(a)).unwrap() == zero);
            for b in 0..n {
                let ab = dyadic_add(pt(a), pt(b)).unwrap();
                check(ab == dyadic_add(pt(b), pt(a)).unwrap());
                for c in 0..n {
                    let left = dyadic_add(ab, pt(c)).unwrap();
                    let right = dyadic_add(pt(a), dyadic_add(pt(b), pt(c)).unwrap()).unwrap();
                    check(left == right);
                }
                for k in 0..n {
                    let lhs = walsh(k, ab).unwrap();
                    check(lhs == walsh(k, pt(a)).unwrap() * walsh(k, pt(b)).unwrap());
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                let dot: i64 = (0..n)
                    .map(|i| i64::from(walsh(j, pt(i)).unwrap() * walsh(k, pt(i)).unwrap()))
                    .sum();
                check(dot == if j == k { n as i64 } else { 0 });
            }
        }
    }
    let d = depth(12);
    let n = d.size();
    let mut rng = ExperimentRng::new(2);
    let pick = |r: &mut ExperimentRng| ((r.unit() * n as f64) as usize).min(n - 1);
    for _ in 0..100_000 {
        let (a, b, c, k) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let (x, y, z) = (
            DyadicPoint::new(a, d).unwrap(),
            DyadicPoint::new(b, d).unwrap(),
            DyadicPoint::new(c, d).unwrap(),
        );
        let xy = dyadic_add(x, y).unwrap();
        check(xy == dyadic_add(y, x).unwrap());
        check(
            dyadic_add(xy, z).unwrap() == dyadic_add(x, dyadic_add(y, z).unwrap()).unwrap(),
        );
        check(walsh(k, xy).unwrap() == walsh(k, x).unwrap() * walsh(k, y).unwrap());
    }
    for _ in 0..2_000 {
        let (j, k) = (pick(&mut rng), pick(&mut rng));
        let dot: i64 = (0..n)
            .map(|i| {
                let p = DyadicPoint::new(i, d).unwrap();
                i64::from(walsh(j, p).unwrap() * walsh(k, p).unwrap())
            })
            .sum();
        check(dot == if j == k { n as i64 } else { 0 });
    }
    outcome(failures == 0, format!("{failures} mismatches in {checked} integer checks"))
}

fn martingale_identity() -> Outcome {
    let mut rng = ExperimentRng::new(3);
    let mut err = 0.0f64;
    let f = Grid1D::new(depth(10), random_vec(&mut rng, 1024, 1.0)).unwrap();
    for k in 0..=10u32 {
        let s = partial_sum_1d(&f, 1 << k).unwrap();
        let w = 1024 >> k;
        for i in 0..1024 {
            err = err.max((s.samples()[i] - cell_mean(f.samples(), (i / w) * w, w)).abs());
        }
    }
    let side = 64;
    let g = Grid2D::new(depth(6), random_vec(&mut rng, side * side, 1.0)).unwrap();
    for k in 0..=6u32 {
        let s = rectangular_partial_sum(&g, 1 << k, 1 << k).unwrap();
        let w = side >> k;
        for x in 0..side {
            for y in 0..side {
                let (x0, y0) = ((x / w) * w, (y / w) * w);
                let mut acc = 0.0;
                for a in x0..x0 + w {
                    for b in y0..y0 + w {
                        acc += g.at(a, b);
                    }
                }
                err = err.max((s.at(x, y) - acc / (w * w) as f64).abs());
            }
        }
    }
    outcome(err <= 1e-12, format!("max error {err:.2e}"))
}

fn quadratic_sum_oracle() -> Outcome {
    let bits = 5;
    let side = 1usize << bits;
    let w = walsh_table(bits);
    let mut rng = ExperimentRng::new(4);
    let mut err = 0.0f64;
    for _ in 0..50 {
        let f = Grid2D::new(depth(bits), random_vec(&mut rng, side * side, 1.0)).unwrap();
        let c = naive_coeffs_2d(f.samples(), side, &w);
        let field = quadratic_sums(&f).unwrap();
        for n in 0..=side {
            // Truncate to [0,n)² and synthesize: T[m][y] = Σ_{k<n} c[m][k] w_k(y).
            let mut t = vec![0.0; n * side];
            for m in 0..n {
                for y in 0..side {
                    t[m * side + y] = (0..n).map(|k| c[m * side + k] * w[k][y]).sum();
                }
            }
            let level = field.level(n);
            for x in 0..side {
                for y in 0..side {
                    let s: f64 = (0..n).map(|m| w[m][x] * t[m * side + y]).sum();
                    err = err.max((level.at(x, y) - s).abs());
                }
            }
        }
    }
    outcome(err <= 1e-10, format!("max error {err:.2e} over 50 functions, n = 0..=32"))
}

fn bmo_enumeration() -> Outcome {
    let mut rng = ExperimentRng::new(5);
    let (mut mismatches, mut nonzero_const) = (0usize, 0usize);
    let (mut shift_err, mut homog_err) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let len = 1usize << ((rng.unit() * 9.0) as u32).min(8);
        let v = random_vec(&mut rng, len, 5.0);
        let norm = bmo_sequence_norm(&SummandSequence::new(v.clone()).unwrap());
        mismatches += usize::from(norm != bmo_by_enumeration(&v));

        let c = rng.symmetric(10.0);
        let constant = SummandSequence::new(vec![c; len]).unwrap();
        nonzero_const += usize::from(bmo_sequence_norm(&constant) != 0.0);

        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let s = bmo_sequence_norm(&SummandSequence::new(shifted).unwrap());
        shift_err = shift_err.max((s - norm).abs());

        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let h = bmo_sequence_norm(&SummandSequence::new(scaled).unwrap());
        homog_err = homog_err.max((h - c.abs() * norm).abs() / (1.0 + c.abs() * norm));
    }
    outcome(
        mismatches == 0 && nonzero_const == 0 && shift_err <= 1e-12 && homog_err <= 1e-12,
        format!(
            "{mismatches} mismatches, {nonzero_const} nonzero constants, \
             shift {shift_err:.2e}, homogeneity {homog_err:.2e}"
        ),
    )
}

fn schipp_desk_check() -> Outcome {
    let start = Instant::now();
    let mut maxima = Vec::new();
    for bits in [6, 7, 8] {
        let family = [spec(&format!("random-step@B={bits},dim=1"))];
        let rep = run_weak_type_suite(WeakOperator::SchRatio, &family, 100, &[], 6_000).unwrap();
        maxima.push(rep.family_constant().unwrap());
    }
    let secs = start.elapsed();
    let finite = maxima.iter().all(|m| m.is_finite() && *m > 0.0);
    let growth = maxima[2] / maxima[0];
    outcome(
        finite && growth <= 2.0 && secs <= Duration::from_secs(120),
        format!(
            "max ratio B=6,7,8: {:.4}, {:.4}, {:.4}; growth {growth:.3}; {:.1}s",
            maxima[0],
            maxima[1],
            maxima[2],
            secs.as_secs_f64()
        ),
    )
}

fn weak_type_stability() -> Outcome {
    let start = Instant::now();
    let lambdas = wss_core::experiments::config::default_lambdas();
    let mut ok = true;
    let mut parts = Vec::new();
    for target in [1.0, 10.0, 100.0] {
        let consts: Vec<f64> = [5, 6, 7]
            .iter()
            .map(|b| {
                let s = spec(&format!("spike:level=2,target={target}@B={b}"));
                run_bmo_sweep(&s, &lambdas, 0).unwrap().runs[0].empirical_constant.unwrap()
            })
            .collect();
        let hi = consts.iter().copied().fold(f64::MIN, f64::max);
        let lo = consts.iter().copied().fold(f64::MAX, f64::min);
        let spread = hi / lo;
        ok &= lo > 0.0 && spread <= 2.0;
        parts.push(format!("T={target}: {:.4}/{:.4}/{:.4}", consts[0], consts[1], consts[2]));
    }
    let secs = start.elapsed();
    ok &= secs <= Duration::from_secs(300);
    outcome(ok, format!("{}; {:.1}s", parts.join("; "), secs.as_secs_f64()))
}

fn summability_setup(s: &str, probes: Option<Vec<Vec<f64>>>, ms: Option<Vec<usize>>) -> SummabilitySetup {
    SummabilitySetup {
        spec: spec(s),
        phi: PhiFunction::ExpMinusOne(1.0),
        probes,
        ms,
        epsilon: 0.01,
        fit_from: 8,
    }
}

fn exponential_decay() -> Outcome {
    let setup = summability_setup("indicator-rect:0,0.5,0,0.5@B=7", Some(vec![vec![0.25, 0.25]]), None);
    let rep = run_exp_summability(&setup, 0).unwrap();
    let traj: Vec<(usize, f64)> = rep.runs[0]
        .samples_named("phi_mean[x=0.25,y=0.25]")
        .map(|s| match s.at {
            wss_core::experiments::Abscissa::Index(m) => (m, s.value),
            _ => unreachable!(),
        })
        .collect();
    let at = |m: usize| traj.iter().find(|p| p.0 == m).unwrap().1;
    let ratio = at(128) / at(4);
    let tail: Vec<f64> = traj.iter().filter(|p| p.0 >= 8).map(|p| p.1).collect();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);

    let resolved = summability_setup("random-spectrum:support=4@B=7", None, None);
    let rep = run_exp_summability(&resolved, 21).unwrap();
    let slopes: Vec<f64> = rep.runs[0]
        .samples
        .iter()
        .filter(|s| s.param.starts_with("decay_exponent["))
        .map(|s| s.value)
        .collect();
    let worst = slopes.iter().map(|s| (s + 1.0).abs()).fold(0.0, f64::max);
    outcome(
        ratio <= 0.25 && monotone && !slopes.is_empty() && worst <= 0.01,
        format!(
            "mean(128)/mean(4) = {ratio:.4}, nonincreasing after 8: {monotone}; \
             {} fitted exponents, max |slope + 1| = {worst:.2e}",
            slopes.len()
        ),
    )
}

fn phi_means_exceptional_set() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for s in ["walsh-sum:3,9@B=10", "random-step@B=10,dim=1"] {
        let setup = summability_setup(s, None, Some(vec![1024]));
        let rep = run_phi_means_1d(&setup, 9).unwrap();
        let measure = rep.runs[0].sample("exceptional_measure[eps=0.01]").unwrap();
        let top = rep.runs[0].sample("max_phi_mean").unwrap();
        ok &= measure <= 0.02;
        parts.push(format!("{s}: measure {measure:.4} (max mean {top:.4})"));
    }
    outcome(ok, parts.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("det.cfg");
    std::fs::write(
        &cfg,
        "[a-weak]\nkind = weak-type\noperator = M1\nspecs = random-step@B=5; random-step:level=3@B=6\n\
         count = 6\n\n[b-bmo]\nkind = bmo-sweep\nspec = random-step@B=6\n\n\
         [c-phi1d]\nkind = phi-means-1d\nspec = random-step@B=9,dim=1\n\n\
         [d-sch]\nkind = weak-type\noperator = Sch-ratio\nspecs = random-step@B=7,dim=1\ncount = 8\n",
    )
    .unwrap();
    let run = |threads: &str, out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_wss"))
            .args(["run", cfg.to_str().unwrap(), "--threads", threads, "--seed", "17", "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out.join("det.csv")).unwrap()
    };
    let one = run("1", &dir.path().join("one"));
    let many = run("4", &dir.path().join("four"));
    let rows = one.iter().filter(|&&b| b == b'\n').count();
    outcome(
        one == many && rows > 1,
        format!("{} bytes, {rows} lines, identical: {}", one.len(), one == many),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "transform oracle equivalence", transform_equivalence),
        (2, "exact dyadic algebra", exact_algebra),
        (3, "martingale identity", martingale_identity),
        (4, "incremental quadratic sums", quadratic_sum_oracle),
        (5, "sequence BMO vs enumeration", bmo_enumeration),
        (6, "Schipp ratio desk check", schipp_desk_check),
        (7, "weak-type stability of the BMO field", weak_type_stability),
        (8, "exponential summability decay", exponential_decay),
        (9, "one-dimensional Φ-mean exceptional set", phi_means_exceptional_set),
        (10, "determinism across thread counts", determinism),
    ];
    let mut unexpected = Vec::new();
    let mut known = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {tag}  {name}: {} [{:.2}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.passed {
            if KNOWN_UNATTAINABLE.contains(&id) {
                known.push(id);
            } else {
                unexpected.push(id);
            }
        }
    }
    for id in KNOWN_UNATTAINABLE {
        if !known.contains(id) {
            println!("note: criterion {id} is listed as unattainable but passed");
        }
    }
    println!(
        "acceptance: {} passed, {} failed (unattainable as specified: {:?}, unexpected: {:?})",
        10 - known.len() - unexpected.len(),
        known.len() + unexpected.len(),
        known,
        unexpected
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
