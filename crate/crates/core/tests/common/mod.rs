#![allow(dead_code)]

use latcount::boxcount::AlignedBox;
use latcount::linalg::{LatticeBasis, MatrixN};
use latcount::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn bf(s: &str) -> BigFloat {
    BigFloat::parse_decimal(s).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unimodular(seed: u64, n: usize) -> LatticeBasis<BigFloat> {
    latcount::sample::random_unimodular(&mut rng(seed), n).unwrap()
}

/// Every integer point in the preimage bounding box, tested one by one.
pub fn naive_count(l: &LatticeBasis<BigFloat>, b: &AlignedBox<BigFloat>) -> u64 {
    let n = l.dim();
    let inv = l.basis().inverse().unwrap();
    let upper = b.upper();
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let (mut lo, mut hi) = (BigFloat::zero(), BigFloat::zero());
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

/// All `z ≠ 0` with `|zᵢ| ≤ k` and `‖Bz‖ < rho`, first nonzero coordinate positive.
pub fn brute_short(l: &LatticeBasis<BigFloat>, rho: &BigFloat, k: i64) -> Vec<Vec<i64>> {
    let n = l.dim();
    let rho_sq = rho.clone() * rho.clone();
    let mut out = Vec::new();
    let mut z = vec![-k; n];
    loop {
        if let Some(&first) = z.iter().find(|&&c| c != 0) {
            let x = l.vector(&z);
            if first > 0 && latcount::linalg::norm_sq(&x) < rho_sq {
                out.push(z.clone());
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if z[i] < k {
                z[i] += 1;
                break;
            }
            z[i] = -k;
            i += 1;
        }
    }
}

pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

pub fn matrix_from(rows: &[&[&str]]) -> MatrixN<BigFloat> {
    MatrixN::from_rows(rows.iter().map(|r| r.iter().map(|s| bf(s)).collect()).collect()).unwrap()
}
