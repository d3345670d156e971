//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use latcount::bounds::{default_rho, skriganov_bound_inhomogeneous};
use latcount::boxcount::{count_points, AlignedBox};
use latcount::dio::{build_application, dist_to_integer, lemma41_check, phi_from_cf, IrrationalSpec};
use latcount::dual_compare::{example31_build, nu_profile_compare};
use latcount::linalg::{dual_basis, LatticeBasis};
use latcount::nu::{delta_set, geometric_grid, hermite_threshold, s_sum, star, weak_admissibility_probe};
use latcount::prelude::*;
use latcount::reduction::successive_minima;
use latcount::sample::{random_box, random_unimodular};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type S = BigFloat;

fn bf(s: &str) -> S {
    S::parse_decimal(s).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Brute force over the integer bounding box of the preimage `B⁻¹(box)`.
fn naive_count(l: &LatticeBasis<S>, b: &AlignedBox<S>) -> u64 {
    let n = l.dim();
    let inv = l.basis().inverse().unwrap();
    let upper = b.upper();
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let (mut lo, mut hi) = (S::zero(), S::zero());
            for j in 0..n {
                let a = inv[(i, j)].clone() * b.y[j].clone();
                let c = inv[(i, j)].clone() * upper[j].clone();
                let (mn, mx) = if a < c { (a, c) } else { (c, a) };
                lo = lo + mn;
                hi = hi + mx;
            }
            (lo.floor_i64().unwrap() - 1, hi.ceil_i64().unwrap() + 1)
        })
        .collect();
    let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut count = 0;
    loop {
        let x = l.vector(&z);
        if (0..n).all(|i| x[i] >= b.y[i] && x[i] <= upper[i]) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return count;
            }
            if z[k] < ranges[k].1 {
                z[k] += 1;
                break;
            }
            z[k] = ranges[k].0;
            k += 1;
        }
    }
}

fn oracle_counting() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    let ten = bf("10");
    for i in 0..200u64 {
        let n = 2 + (i % 2) as usize;
        let mut r = rng(10_000 + i);
        let l = random_unimodular::<S, _>(&mut r, n).unwrap();
        let b = random_box(&mut r, n, &ten).unwrap();
        if count_points(&l, &b).unwrap().count != naive_count(&l, &b) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(mismatches == 0 && elapsed < Duration::from_secs(60), format!("200 instances, {mismatches} mismatches, {elapsed:.1?}"))
}

fn mahler() -> Outcome {
    let slack = bf("1e-20");
    let mut violations = 0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in 2..=5usize {
        let upper = S::from_int((1..=n as i64).product());
        for seed in 0..100u64 {
            let l = random_unimodular::<S, _>(&mut rng(20_000 + 100 * n as u64 + seed), n).unwrap();
            let p = successive_minima(&l).unwrap().lambdas;
            let d = successive_minima(&dual_basis(&l).unwrap()).unwrap().lambdas;
            for i in 0..n {
                let x = d[i].clone() * p[n - 1 - i].clone();
                let f = x.to_f64().unwrap();
                lo = lo.min(f);
                hi = hi.max(f / (1..=n).product::<usize>() as f64);
                if x < S::one() - slack.clone() || x > upper.clone() + slack.clone() {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("400 lattices, {violations} violations, min product {lo:.4}, max product/n! {hi:.4}"))
}

fn planar_equality() -> Outcome {
    let start = hermite_threshold::<S>(2).unwrap() * bf("1.01");
    let grid = geometric_grid(&start, &bf("50"), 20).unwrap();
    let mut worst = S::zero();
    for seed in 0..20u64 {
        let l = random_unimodular::<S, _>(&mut rng(30_000 + seed), 2).unwrap();
        worst = worst.max_of(nu_profile_compare(&l, &grid).unwrap().max_abs_discrepancy);
    }
    outcome(worst <= bf("1e-25"), format!("20 lattices x 20 radii, max |ν(Γ,ρ) - ν(Γ⊥,ρ)| = {worst}"))
}

fn coordinate_plane_construction() -> Outcome {
    let rho_max = bf("20");
    let mut failures = Vec::new();
    let start = Instant::now();
    for n in [3usize, 4] {
        for seed in 1..=5u64 {
            let e = example31_build::<S>(n, seed).unwrap();
            let dual = weak_admissibility_probe(&e.dual, &rho_max, 25).unwrap();
            let primal = weak_admissibility_probe(&e.lattice, &rho_max, 25).unwrap();
            let ok = e.dual_corner.abs() <= bf("1e-40") && dual.is_flagged() && !primal.is_flagged();
            if !ok {
                failures.push(format!("n={n} seed={seed}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("10 constructions, dual flagged and primal clean up to ρ = 20; failures {failures:?}, {:.1?}", start.elapsed()),
    )
}

fn lemma_lower_bound() -> Outcome {
    let spec = IrrationalSpec::golden();
    let alpha: S = spec.value().unwrap();
    let phi = phi_from_cf::<S>(&spec, 1_000_000).unwrap();
    let c = phi.constant_value().cloned().unwrap_or_else(S::zero);
    let brute = (1..=1000i64)
        .map(|q| S::from_int(q) * dist_to_integer(&(S::from_int(q) * alpha.clone())))
        .reduce(|a, b| a.min_of(b))
        .unwrap();
    let grid = geometric_grid(&bf("1.2"), &bf("50"), 30).unwrap();
    let report = lemma41_check(&alpha, &phi, &grid).unwrap();
    let pass = c == bf("0.38") && brute >= c && report.worst_margin >= S::zero() && report.max_equality_gap <= bf("1e-25");
    outcome(
        pass,
        format!(
            "φ = {c} (brute min over q <= 1000: {brute}), worst margin {}, primal/dual gap {}",
            report.worst_margin, report.max_equality_gap
        ),
    )
}

fn sweep_args() -> Vec<&'static str> {
    vec!["latcount", "dio-sweep", "--alpha", "surd:-1,1,5,2", "--y", "0.3", "--eps", "0.5", "--t", "100,1000,10000,100000,1000000"]
}

fn growth(sweep: &str, elapsed: Duration) -> Outcome {
    let body: Vec<&str> = sweep.lines().filter(|l| !l.starts_with('#')).collect();
    let header: Vec<&str> = body[0].split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (ae, lv, od) = (col("abs_error"), col("ln_vol"), col("oracle_diff"));
    let mut ratio = S::zero();
    let mut diff = 0i64;
    for line in &body[1..] {
        let f: Vec<&str> = line.split(',').collect();
        ratio = ratio.max_of(bf(f[ae]) / bf(f[lv]));
        diff = diff.max(f[od].parse().unwrap());
    }
    let pass = body.len() == 6 && ratio <= bf("10") && diff <= 2 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!("t = 1e2..1e6, max |N - εt|/ln(εt) = {:.4}, max |N - #(Γ∩B)| = {diff}, {elapsed:.1?}", ratio.to_f64().unwrap()),
    )
}

fn bound_pipeline() -> Outcome {
    let alpha: S = IrrationalSpec::golden().value().unwrap();
    let floor = S::from_int(4) + S::from_int(2).ln();
    let ts = geometric_grid(&bf("20"), &bf("2000"), 10).unwrap();
    let mut c = S::zero();
    let mut problems = Vec::new();
    for t in &ts {
        let app = build_application(&alpha, &bf("0.3"), &bf("0.5"), t).unwrap();
        let rho = default_rho(&app.region).unwrap();
        let r = skriganov_bound_inhomogeneous(&app.lattice, &app.region, &rho).unwrap();
        let finite = r.rhs_total.to_f64().is_some_and(f64::is_finite);
        if !(finite && r.rhs_total > S::zero() && r.r >= floor && star(&r.two_r_t, 2).unwrap() == r.two_r_t) {
            problems.push(t.to_f64().unwrap());
        }
        c = c.max_of(r.abs_error.clone() / r.rhs_total.clone());
    }
    outcome(
        problems.is_empty() && c <= bf("10"),
        format!("10 instances, fitted C = max error/RHS = {:.3e}; bad instances {problems:?}", c.to_f64().unwrap()),
    )
}

fn delta_and_s() -> Outcome {
    let mut mismatches = Vec::new();
    for n in [2usize, 3] {
        for r in [1i64, 2, 4] {
            let got = delta_set::<S>(n, &S::from_int(r)).unwrap().exponent_vectors.len();
            let mut expected = 0;
            let mut m = vec![-r; n];
            'outer: loop {
                if m.iter().sum::<i64>() == 0 && m.iter().map(|x| x * x).sum::<i64>() < r * r {
                    expected += 1;
                }
                for k in 0..n {
                    if m[k] < r {
                        m[k] += 1;
                        continue 'outer;
                    }
                    m[k] = -r;
                }
                break;
            }
            if got != expected {
                mismatches.push((n, r, got, expected));
            }
        }
    }
    let s = s_sum(&LatticeBasis::<S>::identity(2), &bf("2")).unwrap().value;
    outcome(mismatches.is_empty() && s == bf("9"), format!("#Δ mismatches {mismatches:?}, S(Z^2, 2) = {s}"))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };
    report("1 oracle counting", oracle_counting());
    report("2 Mahler relation", mahler());
    report("3 planar primal/dual equality", planar_equality());
    report("4 coordinate-plane construction", coordinate_plane_construction());
    report("5 lower bound for ν on the application lattice", lemma_lower_bound());

    let t0 = Instant::now();
    let (first, code) = latcount_cli::run_args(sweep_args());
    let elapsed = t0.elapsed();
    report(
        "6 Diophantine error growth",
        if code == 0 { growth(&first, elapsed) } else { outcome(false, format!("dio-sweep exited {code}: {first}")) },
    );
    report("7 bound pipeline", bound_pipeline());
    report("8 Δ and S", delta_and_s());
    let (second, code2) = latcount_cli::run_args(sweep_args());
    report(
        "9 determinism",
        outcome(
            code == 0 && code2 == 0 && first == second,
            format!("two dio-sweep runs, {} bytes, identical: {}", first.len(), first == second),
        ),
    );

    let failed = results.iter().filter(|r| !r.1.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
