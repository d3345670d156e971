//! The minimal coordinate product `ν(Γ,ρ)`, Hermite constants, the dyadic
//! family `Δ_r` and the sum `S(Γ,r)`.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;

use crate::boxcount::{AlignedBox, BoxCounter};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, LatticeBasis};
use crate::reduction::{tie_break, Enumerator, ShortVector};
use crate::scalar::Real;

/// Above this many expected short vectors, `nu` switches from ball
/// enumeration to the hyperbolic box cover.
pub const ENUMERATION_LIMIT: f64 = 2.0e5;

#[derive(Clone, Debug, PartialEq)]
pub struct HermiteConstant<T> {
    pub value: T,
    /// False when `value` is only the upper bound `(4/3)^{(n−1)/2}`.
    pub exact: bool,
}

/// `γₙ`, exact for `n ≤ 8`.
pub fn hermite_constant<T: Real>(n: usize) -> Result<HermiteConstant<T>> {
    // γₙⁿ as a fraction
    let power: Option<(i64, i64)> = match n {
        2 => Some((4, 3)),
        3 => Some((2, 1)),
        4 => Some((4, 1)),
        5 => Some((8, 1)),
        6 => Some((64, 3)),
        7 => Some((64, 1)),
        8 => Some((256, 1)),
        _ => None,
    };
    match (n, power) {
        (0 | 1, _) => Err(Error::InvalidArgument(format!("Hermite constant needs n >= 2, got {n}"))),
        (_, Some((a, b))) => Ok(HermiteConstant { value: T::ratio(a, b).nth_root(n as u32), exact: true }),
        (_, None) => {
            let value = T::ratio(4, 3).sqrt().powi(n as i32 - 1);
            Ok(HermiteConstant { value, exact: false })
        }
    }
}

/// `γₙ^{1/2}`, the radius above which `ν` is defined for unimodular lattices.
pub fn hermite_threshold<T: Real>(n: usize) -> Result<T> {
    Ok(hermite_constant::<T>(n)?.value.sqrt())
}

/// `x⋆ = max(γₙ, x)`.
pub fn star<T: Real>(x: &T, n: usize) -> Result<T> {
    Ok(hermite_constant::<T>(n)?.value.max_of(x.clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NuValue<T> {
    pub value: T,
    pub minimizer: ShortVector<T>,
}

/// Orders candidates by coordinate product, then norm, then integer coordinates.
fn nu_order<T: Real>(a: &(T, ShortVector<T>), b: &(T, ShortVector<T>)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.1.norm_sq.partial_cmp(&b.1.norm_sq).unwrap_or(Ordering::Equal))
        .then_with(|| tie_break(&a.1.z, &b.1.z))
}

fn keep_min<T: Real>(best: &mut Option<(T, ShortVector<T>)>, sv: ShortVector<T>) {
    let cand = (sv.product(), sv);
    if best.as_ref().map_or(true, |b| nu_order(&cand, b) == Ordering::Less) {
        *best = Some(cand);
    }
}

/// Expected number of `±` pairs of lattice vectors in the open ball of radius `rho`.
pub fn expected_short_vectors<T: Real>(lattice: &LatticeBasis<T>, rho: &T) -> f64 {
    let n = lattice.dim() as f64;
    let log_ball = n / 2.0 * std::f64::consts::PI.ln() - ln_gamma(n / 2.0 + 1.0);
    let log_rho = rho.to_f64().unwrap_or(f64::INFINITY).ln();
    let log_det = lattice.det().abs().to_f64().unwrap_or(1.0).ln();
    (log_ball + n * log_rho - log_det).exp() / 2.0
}

fn ln_gamma(x: f64) -> f64 {
    // x is a positive multiple of 1/2 here
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as u64).map(|k| (k as f64).ln()).sum()
    } else {
        let mut acc = 0.5 * std::f64::consts::PI.ln();
        let mut k = 0.5;
        while k < x - 1e-9 {
            acc += k.ln();
            k += 1.0;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NuStrategy {
    Auto,
    Enumerate,
    BoxCover,
}

/// `ν(Γ,ρ) = min{|x₁⋯xₙ| : x ∈ Γ, 0 < ‖x‖ < ρ}` and a minimizer.
pub fn nu<T: Real>(lattice: &LatticeBasis<T>, rho: &T) -> Result<NuValue<T>> {
    nu_with(lattice, rho, NuStrategy::Auto)
}

pub fn nu_with<T: Real>(lattice: &LatticeBasis<T>, rho: &T, strategy: NuStrategy) -> Result<NuValue<T>> {
    let n = lattice.dim();
    if lattice.is_unimodular() {
        let threshold = hermite_threshold::<T>(n)?;
        if *rho <= threshold {
            return Err(Error::BelowHermiteThreshold {
                rho: rho.to_decimal_string(),
                threshold: threshold.to_decimal_string(),
            });
        }
    }
    let enumerator = Enumerator::new(lattice)?;
    let use_cover = match strategy {
        NuStrategy::Enumerate => false,
        NuStrategy::BoxCover => true,
        NuStrategy::Auto => expected_short_vectors(lattice, rho) > ENUMERATION_LIMIT,
    };
    if !use_cover {
        let mut best = None;
        enumerator.for_each_below(rho, |sv| keep_min(&mut best, sv))?;
        return best
            .map(|(value, minimizer)| NuValue { value, minimizer })
            .ok_or_else(|| Error::EmptyCandidateSet { rho: rho.to_decimal_string() });
    }
    nu_box_cover(lattice, &enumerator, rho)
}

/// Exact `ν` at radii too large to enumerate.
///
/// A first candidate with product `c₀` comes from a small ball. Any better
/// vector `x` with `‖x‖ < ρ ≤ 2^L` has `|xᵢ| ≤ 2^{ℓᵢ}` with `ℓᵢ ≤ L` and, unless
/// some `|xᵢ| ≤ 2^F`, `Σℓᵢ < log₂c₀ + n`. The maximal such boxes together with
/// the `n` thin slabs `|xᵢ| ≤ 2^F` cover every candidate and each holds only a
/// few lattice points, which the box counter visits exactly.
fn nu_box_cover<T: Real>(lattice: &LatticeBasis<T>, enumerator: &Enumerator<T>, rho: &T) -> Result<NuValue<T>> {
    let n = lattice.dim();
    // seed radius sized to a cheap enumeration, never below the first reduced vector
    let log_scale = (ENUMERATION_LIMIT / 8.0).ln() - (expected_short_vectors(lattice, rho).ln());
    let shrink = T::from_f64((log_scale / n as f64).exp()).expect("finite");
    let seed_radius = (rho.clone() * shrink)
        .max_of(enumerator.first_norm().clone() * T::ratio(11, 10))
        .min_of(rho.clone());
    let mut best = None;
    enumerator.for_each_below(&seed_radius, |sv| keep_min(&mut best, sv))?;
    let Some((c0, _)) = best.clone() else {
        return Err(Error::EmptyCandidateSet { rho: seed_radius.to_decimal_string() });
    };
    if c0.is_zero() {
        let (value, minimizer) = best.expect("seeded");
        return Ok(NuValue { value, minimizer });
    }

    let log2 = |x: &T| (x.ln() / T::ln2()).to_f64().expect("finite logarithm");
    let big = log2(rho).ceil() as i64 + 1;
    let log_c0 = log2(&c0);
    let fine = (log_c0 - 1.0 - (n as f64 - 1.0) * (big as f64 + 1.0)).floor() as i64;
    let sum_cap = (n as f64 + log_c0 + 1e-9).floor() as i64;

    let half_widths = boxes_for_cover(n, fine, big, sum_cap);
    let two = T::from_int(2);
    let rho_sq = rho.clone() * rho.clone();
    let mut visit_box = |levels: &[i64]| -> Result<()> {
        let half: Vec<T> = levels.iter().map(|&l| two.powi(l as i32)).collect();
        let b = AlignedBox::new(
            half.iter().map(|h| h.clone() * two.clone()).collect(),
            half.iter().map(|h| -h.clone()).collect(),
        )?;
        let counter = BoxCounter::new(lattice, &b)?;
        counter.for_each_point(|z, _, _| {
            let Some(&lead) = z.iter().find(|&&c| c != 0) else { return };
            let z: Vec<i64> = if lead < 0 { z.iter().map(|c| -c).collect() } else { z.to_vec() };
            // recomputed from z so both strategies agree bit for bit
            let v = lattice.vector(&z);
            let nsq = norm_sq(&v);
            if nsq < rho_sq {
                keep_min(&mut best, ShortVector { z, v, norm_sq: nsq });
            }
        })?;
        Ok(())
    };
    for levels in &half_widths {
        visit_box(levels)?;
    }
    for i in 0..n {
        let mut levels = vec![big; n];
        levels[i] = fine;
        visit_box(&levels)?;
    }
    let (value, minimizer) = best.expect("seeded");
    Ok(NuValue { value, minimizer })
}

/// Maximal `ℓ ∈ [lo, hi]ⁿ` with `Σℓ ≤ cap`.
fn boxes_for_cover(n: usize, lo: i64, hi: i64, cap: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, lo: i64, hi: i64, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let used: i64 = cur.iter().sum();
        let remaining = n - cur.len();
        if remaining == 1 {
            let last = hi.min(cap - used);
            if last < lo {
                return;
            }
            cur.push(last);
            let total = used + last;
            if cur.iter().all(|&l| l == hi || total == cap) {
                out.push(cur.clone());
            }
            cur.pop();
            return;
        }
        for l in lo..=hi {
            if used + l + lo * (remaining as i64 - 1) > cap {
                break;
            }
            cur.push(l);
            rec(n, lo, hi, cap, cur, out);
            cur.pop();
        }
    }
    if n > 0 {
        rec(n, lo, hi, cap, &mut cur, &mut out);
    }
    out
}

/// True when some coordinate of `x` is negligible relative to `‖x‖`.
pub fn has_zero_coordinate<T: Real>(x: &[T]) -> bool {
    let threshold = T::tolerance(1e-30) * norm_sq(x).sqrt();
    x.iter().any(|c| c.abs() < threshold)
}

/// Samples of `ν(Γ,·)` on a radius grid.
#[derive(Clone, Debug)]
pub struct NuProfile<T> {
    pub rho_grid: Vec<T>,
    pub values: Vec<T>,
    pub minimizers: Vec<ShortVector<T>>,
    pub zero_flags: Vec<bool>,
}

impl<T: Real> NuProfile<T> {
    /// First radius whose minimizer has a vanishing coordinate.
    pub fn first_flag(&self) -> Option<&T> {
        self.zero_flags.iter().position(|&f| f).map(|i| &self.rho_grid[i])
    }

    pub fn is_flagged(&self) -> bool {
        self.zero_flags.iter().any(|&f| f)
    }

    /// CSV with columns `rho, nu, x1..xn, zero_flag`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.minimizers.first().map_or(0, |m| m.v.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["rho".to_string(), "nu".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("zero_flag".into());
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.rho_grid.len() {
            let mut row = vec![self.rho_grid[i].to_decimal_string(), self.values[i].to_decimal_string()];
            row.extend(self.minimizers[i].v.iter().map(|x| x.to_decimal_string()));
            row.push(self.zero_flags[i].to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("CSV output failed: {e}"))
}

/// `count` radii in geometric progression from `start` to `end`.
pub fn geometric_grid<T: Real>(start: &T, end: &T, count: usize) -> Result<Vec<T>> {
    if count == 0 || *start <= T::zero() || (count > 1 && *end <= *start) {
        return Err(Error::InvalidArgument("grid needs 0 < start < end and at least one point".into()));
    }
    if count == 1 {
        return Ok(vec![end.clone()]);
    }
    let ratio = (end.clone() / start.clone()).ln();
    let steps = T::from_int(count as i64 - 1);
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                start.clone()
            } else if i == count - 1 {
                end.clone()
            } else {
                start.clone() * (ratio.clone() * T::from_int(i as i64) / steps.clone()).exp()
            }
        })
        .collect())
}

/// `ν` on every radius of `grid` (ascending), sharing a single enumeration when affordable.
pub fn nu_profile<T: Real>(lattice: &LatticeBasis<T>, grid: &[T]) -> Result<NuProfile<T>> {
    let Some(rho_max) = grid.last() else {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    };
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("radius grid must be ascending".into()));
    }
    let n = lattice.dim();
    if lattice.is_unimodular() {
        let threshold = hermite_threshold::<T>(n)?;
        if grid[0] <= threshold {
            return Err(Error::BelowHermiteThreshold {
                rho: grid[0].to_decimal_string(),
                threshold: threshold.to_decimal_string(),
            });
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut minimizers = Vec::with_capacity(grid.len());
    if expected_short_vectors(lattice, rho_max) > ENUMERATION_LIMIT * 4.0 {
        for rho in grid {
            let v = nu(lattice, rho)?;
            values.push(v.value);
            minimizers.push(v.minimizer);
        }
    } else {
        // bin i holds vectors with grid[i-1] ≤ ‖v‖ < grid[i]; a running minimum
        // over the bins then gives ν at every radius without sorting
        let squares: Vec<T> = grid.iter().map(|r| r.clone() * r.clone()).collect();
        let mut bins: Vec<Option<(T, ShortVector<T>)>> = vec![None; grid.len()];
        Enumerator::new(lattice)?.for_each_below(rho_max, |sv| {
            let i = squares.partition_point(|s| *s <= sv.norm_sq);
            if i < bins.len() {
                keep_min(&mut bins[i], sv);
            }
        })?;
        let mut best: Option<(T, ShortVector<T>)> = None;
        for (rho, bin) in grid.iter().zip(bins) {
            if let Some(cand) = bin {
                if best.as_ref().map_or(true, |b| nu_order(&cand, b) == Ordering::Less) {
                    best = Some(cand);
                }
            }
            let Some((value, minimizer)) = best.clone() else {
                return Err(Error::EmptyCandidateSet { rho: rho.to_decimal_string() });
            };
            values.push(value);
            minimizers.push(minimizer);
        }
    }
    let zero_flags = minimizers.iter().map(|m| has_zero_coordinate(&m.v)).collect();
    Ok(NuProfile { rho_grid: grid.to_vec(), values, minimizers, zero_flags })
}

/// `ν` on a geometric grid from `1.01·γₙ^{1/2}` to `rho_max`, flagging
/// minimizers with a vanishing coordinate.
pub fn weak_admissibility_probe<T: Real>(lattice: &LatticeBasis<T>, rho_max: &T, grid: usize) -> Result<NuProfile<T>> {
    if !lattice.is_unimodular() {
        return Err(Error::NotUnimodular { det: lattice.det().to_decimal_string() });
    }
    let start = hermite_threshold::<T>(lattice.dim())? * T::ratio(101, 100);
    nu_profile(lattice, &geometric_grid(&start, rho_max, grid)?)
}

/// `Δ_r = {m ∈ ℤⁿ : Σmᵢ = 0, ‖m‖ < r}`, representing `diag(2^{m₁},…,2^{mₙ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaFamily<T> {
    pub r: T,
    pub exponent_vectors: Vec<Vec<i64>>,
}

pub fn delta_set<T: Real>(n: usize, r: &T) -> Result<DeltaFamily<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("delta family needs n >= 2, got {n}")));
    }
    if *r <= T::zero() {
        return Err(Error::InvalidArgument("delta family needs r > 0".into()));
    }
    let r_sq = r.clone() * r.clone();
    let bound = r.ceil_i64()?;
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec<T: Real>(i: usize, sum: i64, sq: i64, bound: i64, r_sq: &T, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = cur.len();
        if i == n - 1 {
            let last = -sum;
            let total = sq + last * last;
            if T::from_int(total) < *r_sq {
                cur[i] = last;
                out.push(cur.clone());
            }
            return;
        }
        for m in -bound..=bound {
            let sq2 = sq + m * m;
            if T::from_int(sq2) >= *r_sq {
                continue;
            }
            cur[i] = m;
            rec(i + 1, sum + m, sq2, bound, r_sq, cur, out);
        }
    }
    rec(0, 0, 0, bound, &r_sq, &mut cur, &mut out);
    Ok(DeltaFamily { r: r.clone(), exponent_vectors: out })
}

#[derive(Clone, Debug)]
pub struct SSum<T> {
    pub value: T,
    pub members: usize,
    pub max_term: T,
    pub max_term_exponents: Vec<i64>,
}

/// `S(Γ,r) = Σ_{δ∈Δ_r} λ₁(δΓ)^{−n}`, terms evaluated in parallel.
pub fn s_sum<T: Real>(lattice: &LatticeBasis<T>, r: &T) -> Result<SSum<T>> {
    let n = lattice.dim();
    let family = delta_set::<T>(n, r)?;
    let two = T::from_int(2);
    let terms: Vec<(Vec<i64>, T)> = family
        .exponent_vectors
        .par_iter()
        .map(|m| {
            let scale: Vec<T> = m.iter().map(|&e| two.powi(e as i32)).collect();
            let term = lattice
                .scale_coordinates(&scale)
                .and_then(|l| crate::reduction::shortest_vector(&l))
                .map(|(_, l1)| T::one() / l1.powi(n as i32))
                .map_err(|e| Error::SumTerm { exponents: m.clone(), source: Box::new(e) })?;
            Ok((m.clone(), term))
        })
        .collect::<Result<_>>()?;
    let mut value = T::zero();
    let mut max: Option<(Vec<i64>, T)> = None;
    for (m, term) in terms {
        value = value + term.clone();
        if max.as_ref().map_or(true, |(_, t)| term > *t) {
            max = Some((m, term));
        }
    }
    let (max_term_exponents, max_term) = max.expect("Δ_r contains 0");
    Ok(SSum { value, members: family.exponent_vectors.len(), max_term, max_term_exponents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::MatrixN;
    use crate::scalar::BigFloat;
    use crate::prelude::*;

    fn bf(s: &str) -> BigFloat {
        BigFloat::parse_decimal(s).unwrap()
    }

    #[test]
    fn hermite_values() {
        let g2 = hermite_constant::<BigFloat>(2).unwrap();
        assert!(g2.exact);
        assert!((g2.value.clone() * g2.value - bf("4") / bf("3")).abs() < bf("1e-45"));
        let g8 = hermite_constant::<BigFloat>(8).unwrap();
        assert!((g8.value - bf("2")).abs() < bf("1e-45"));
        let g9 = hermite_constant::<BigFloat>(9).unwrap();
        assert!(!g9.exact);
        assert!((g9.value - (bf("4") / bf("3")).powi(4)).abs() < bf("1e-45"));
        assert!(hermite_constant::<f64>(1).is_err());
    }

    #[test]
    fn star_examples() {
        let g2 = hermite_constant::<f64>(2).unwrap().value;
        assert_eq!(star(&0.5, 2).unwrap(), g2);
        assert_eq!(star(&10.0, 2).unwrap(), 10.0);
        let g3 = hermite_constant::<f64>(3).unwrap().value;
        assert_eq!(star(&g3, 3).unwrap(), g3);
    }

    #[test]
    fn nu_of_integer_lattice_is_zero_at_e1() {
        let z3 = LatticeBasis::<BigFloat>::identity(3);
        let v = nu(&z3, &bf("1.5")).unwrap();
        assert!(v.value.is_zero());
        assert_eq!(v.minimizer.z, vec![1, 0, 0]);
        assert!(matches!(nu(&z3, &bf("1.05")), Err(Error::BelowHermiteThreshold { .. })));
    }

    #[test]
    fn nu_on_non_unimodular_lattice_without_candidates() {
        let l = LatticeBasis::new(MatrixN::diagonal(&[bf("3"), bf("3")])).unwrap();
        assert!(matches!(nu(&l, &bf("2")), Err(Error::EmptyCandidateSet { .. })));
    }

    #[test]
    fn delta_family_examples() {
        let d = delta_set::<f64>(2, &2.0).unwrap();
        assert_eq!(d.exponent_vectors, vec![vec![-1, 1], vec![0, 0], vec![1, -1]]);
        assert_eq!(delta_set::<f64>(2, &1.0).unwrap().exponent_vectors, vec![vec![0, 0]]);
        assert_eq!(delta_set::<f64>(3, &2.0).unwrap().exponent_vectors.len(), 7);
    }

    #[test]
    fn s_sum_of_z2() {
        let z2 = LatticeBasis::<BigFloat>::identity(2);
        assert_eq!(s_sum(&z2, &bf("1")).unwrap().value, bf("1"));
        let s = s_sum(&z2, &bf("2")).unwrap();
        assert_eq!(s.value, bf("9"));
        assert_eq!(s.members, 3);
        assert_eq!(s.max_term, bf("4"));
    }

    #[test]
    fn cover_boxes_are_maximal() {
        let boxes = boxes_for_cover(2, -3, 2, 0);
        assert_eq!(boxes, vec![vec![-2, 2], vec![-1, 1], vec![0, 0], vec![1, -1], vec![2, -2]]);
        let boxes = boxes_for_cover(3, -1, 1, 0);
        assert!(boxes.iter().all(|b| b.iter().sum::<i64>() == 0 || b.iter().all(|&l| l == 1)));
    }

    fn golden_lattice() -> LatticeBasis<BigFloat> {
        let alpha = (bf("5").sqrt() - bf("1")) / bf("2");
        let s = alpha.sqrt();
        LatticeBasis::from_rows(vec![
            vec![bf("1") / s.clone(), alpha.clone() / s.clone()],
            vec![bf("1") / s.clone(), bf("2") * alpha / s],
        ])
        .unwrap()
    }

    #[test]
    fn box_cover_matches_enumeration() {
        let l = golden_lattice();
        for rho in ["1.2", "7", "40"] {
            let a = nu_with(&l, &bf(rho), NuStrategy::Enumerate).unwrap();
            let b = nu_with(&l, &bf(rho), NuStrategy::BoxCover).unwrap();
            assert_eq!(a, b, "rho = {rho}");
        }
        let l3 = LatticeBasis::from_rows(vec![
            vec![bf("1.1"), bf("0.3"), bf("-0.7")],
            vec![bf("0.2"), bf("0.9"), bf("0.45")],
            vec![bf("-0.35"), bf("0.15"), bf("1.05")],
        ])
        .unwrap();
        for rho in ["2", "9"] {
            let a = nu_with(&l3, &bf(rho), NuStrategy::Enumerate).unwrap();
            let b = nu_with(&l3, &bf(rho), NuStrategy::BoxCover).unwrap();
            assert_eq!(a, b, "rho = {rho}");
        }
    }

    #[test]
    fn box_cover_handles_huge_radius() {
        let v = nu(&golden_lattice(), &bf("1e7")).unwrap();
        // badly approximable: q·‖qα‖ stays above 0.38, so ν ≥ 0.38/4
        assert!(v.value > bf("0.095"));
        assert!(v.minimizer.norm_sq < bf("1e14"));
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = geometric_grid(&bf("1.2"), &bf("50"), 30).unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], bf("1.2"));
        assert_eq!(g[29], bf("50"));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn probe_flags_integer_lattice_immediately() {
        let p = weak_admissibility_probe(&LatticeBasis::<BigFloat>::identity(3), &bf("5"), 8).unwrap();
        assert!(p.zero_flags[0]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rho,nu,x1,x2,x3,zero_flag\n"));
        assert_eq!(text.lines().count(), 9);
    }
}
