//! LLL reduction, Fincke–Pohst enumeration and successive minima.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, LatticeBasis, MatrixN};
use crate::scalar::Real;

pub const DEFAULT_DELTA: (i64, i64) = (99, 100);
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// A lattice vector together with its integer coordinates `z` and `v = B·z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortVector<T> {
    pub z: Vec<i64>,
    pub v: Vec<T>,
    pub norm_sq: T,
}

impl<T: Real> ShortVector<T> {
    pub fn norm(&self) -> T {
        self.norm_sq.sqrt()
    }

    /// Absolute coordinate product `|v₁⋯vₙ|`.
    pub fn product(&self) -> T {
        self.v.iter().fold(T::one(), |acc, x| acc * x.abs())
    }
}

/// Orders equal values by descending lexicographic `z`, so that `e₁` precedes `e₂`.
pub fn tie_break(a: &[i64], b: &[i64]) -> Ordering {
    b.cmp(a)
}

/// Total order by squared norm, then by [`tie_break`].
pub fn by_norm<T: Real>(a: &ShortVector<T>, b: &ShortVector<T>) -> Ordering {
    a.norm_sq.partial_cmp(&b.norm_sq).unwrap_or(Ordering::Equal).then_with(|| tie_break(&a.z, &b.z))
}

/// All nonzero lattice vectors with `‖v‖ < rho`, one per `±` pair.
#[derive(Clone, Debug)]
pub struct ShortVectorSet<T> {
    pub rho: T,
    pub vectors: Vec<ShortVector<T>>,
}

impl<T: Real> ShortVectorSet<T> {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct MinimaVector<T> {
    pub lambdas: Vec<T>,
    pub witnesses: Vec<ShortVector<T>>,
}

struct Gso<T> {
    mu: Vec<Vec<T>>,
    bsq: Vec<T>,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn gram_schmidt<T: Real>(b: &[Vec<T>]) -> Gso<T> {
    let n = b.len();
    let mut star: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut mu = vec![vec![T::zero(); n]; n];
    let mut bsq: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = b[i].clone();
        for j in 0..i {
            let m = dot(&b[i], &star[j]) / bsq[j].clone();
            for (sk, tk) in s.iter_mut().zip(&star[j]) {
                *sk = sk.clone() - m.clone() * tk.clone();
            }
            mu[i][j] = m;
        }
        mu[i][i] = T::one();
        bsq.push(norm_sq(&s));
        star.push(s);
    }
    Gso { mu, bsq }
}

fn checked_combine(a: i128, q: i128, b: i128) -> Result<i128> {
    q.checked_mul(b).and_then(|qb| a.checked_sub(qb)).ok_or(Error::Overflow("LLL transform"))
}

/// A reduced basis with the integer change of basis from the input.
#[derive(Clone, Debug)]
pub struct Reduction<T> {
    pub reduced: LatticeBasis<T>,
    /// Column `j` holds the integer coordinates of reduced vector `j` in the input basis.
    pub transform: Vec<Vec<i128>>,
}

/// LLL reduction of the columns of `lattice` with Lovász parameter `delta`.
pub fn lll_reduce<T: Real>(lattice: &LatticeBasis<T>, delta: &T) -> Result<LatticeBasis<T>> {
    Ok(lll_with_transform(lattice, delta)?.reduced)
}

pub fn lll_with_transform<T: Real>(lattice: &LatticeBasis<T>, delta: &T) -> Result<Reduction<T>> {
    let quarter = T::ratio(1, 4);
    if !(*delta > quarter && *delta < T::one()) {
        return Err(Error::InvalidArgument(format!("LLL delta must lie in (1/4, 1), got {delta}")));
    }
    let n = lattice.dim();
    let mut b: Vec<Vec<T>> = (0..n).map(|j| lattice.column(j)).collect();
    // u[j] = coordinates of b[j] in the input basis
    let mut u: Vec<Vec<i128>> = (0..n).map(|j| (0..n).map(|i| (i == j) as i128).collect()).collect();
    let mut gso = gram_schmidt(&b);
    let half = T::ratio(1, 2);
    let mut k = 1;
    let mut swaps = 0u64;
    while k < n {
        for j in (0..k).rev() {
            if gso.mu[k][j].abs() <= half {
                continue;
            }
            let q = gso.mu[k][j].round();
            let qi = q.round_i128()?;
            for i in 0..n {
                b[k][i] = b[k][i].clone() - q.clone() * b[j][i].clone();
                u[k][i] = checked_combine(u[k][i], qi, u[j][i])?;
            }
            for i in 0..j {
                gso.mu[k][i] = gso.mu[k][i].clone() - q.clone() * gso.mu[j][i].clone();
            }
            gso.mu[k][j] = gso.mu[k][j].clone() - q;
        }
        let m = gso.mu[k][k - 1].clone();
        if gso.bsq[k] >= (delta.clone() - m.clone() * m) * gso.bsq[k - 1].clone() {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            gso = gram_schmidt(&b);
            k = (k - 1).max(1);
            swaps += 1;
            if swaps > 1_000_000 {
                return Err(Error::PrecisionExhausted("LLL failed to terminate".into()));
            }
        }
    }
    // rebuild from the integer transform so reduced vectors are exact lattice vectors
    let cols: Vec<Vec<T>> = u
        .iter()
        .map(|c| {
            let z: Vec<i64> = c.iter().map(|&x| x as i64).collect();
            if c.iter().any(|&x| i64::try_from(x).is_err()) {
                return Err(Error::Overflow("LLL transform"));
            }
            Ok(lattice.vector(&z))
        })
        .collect::<Result<_>>()?;
    let reduced = LatticeBasis::new(MatrixN::from_fn(n, |i, j| cols[j][i].clone()))?;
    Ok(Reduction { reduced, transform: u })
}

/// Depth-first short-vector enumeration over an LLL-reduced basis.
pub struct Enumerator<T> {
    original: LatticeBasis<T>,
    transform: Vec<Vec<i128>>,
    mu: Vec<Vec<T>>,
    bsq: Vec<T>,
    first_norm: T,
    budget: u64,
}

impl<T: Real> Enumerator<T> {
    pub fn new(lattice: &LatticeBasis<T>) -> Result<Self> {
        let delta = T::ratio(DEFAULT_DELTA.0, DEFAULT_DELTA.1);
        let red = lll_with_transform(lattice, &delta)?;
        let n = lattice.dim();
        let cols: Vec<Vec<T>> = (0..n).map(|j| red.reduced.column(j)).collect();
        let gso = gram_schmidt(&cols);
        Ok(Enumerator {
            original: lattice.clone(),
            transform: red.transform,
            mu: gso.mu,
            bsq: gso.bsq,
            first_norm: norm_sq(&cols[0]).sqrt(),
            budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn lattice(&self) -> &LatticeBasis<T> {
        &self.original
    }

    /// Norm of the first reduced basis vector, an upper bound for `λ₁`.
    pub fn first_norm(&self) -> &T {
        &self.first_norm
    }

    fn to_original(&self, u: &[i64]) -> Result<Vec<i64>> {
        let n = u.len();
        let mut z = vec![0i64; n];
        for (i, zi) in z.iter_mut().enumerate() {
            let mut acc: i128 = 0;
            for (j, &uj) in u.iter().enumerate() {
                if uj != 0 {
                    let term = self.transform[j][i].checked_mul(uj as i128).ok_or(Error::Overflow("enumeration"))?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow("enumeration"))?;
                }
            }
            *zi = i64::try_from(acc).map_err(|_| Error::Overflow("enumeration"))?;
        }
        if let Some(&first) = z.iter().find(|&&c| c != 0) {
            if first < 0 {
                z.iter_mut().for_each(|c| *c = -*c);
            }
        }
        Ok(z)
    }

    /// Calls `visit` once per `±` pair of lattice vectors with `0 < ‖v‖ < rho`.
    /// Returns the number of visited search nodes.
    pub fn for_each_below(&self, rho: &T, mut visit: impl FnMut(ShortVector<T>)) -> Result<u64> {
        if *rho <= T::zero() {
            return Err(Error::InvalidArgument("enumeration radius must be positive".into()));
        }
        let n = self.bsq.len();
        let inflate = T::one() + T::tolerance(1e-20);
        let radius_sq = rho.clone() * rho.clone() * inflate.clone() * inflate;
        let strict_sq = rho.clone() * rho.clone();

        let mut u = vec![0i64; n];
        let mut upper = vec![0i64; n];
        let mut partial = vec![T::zero(); n + 1];
        let mut centers = vec![T::zero(); n];
        let mut nodes = 0u64;
        let mut found = 0u64;

        // iterative DFS; level k ranges over n-1 ..= 0
        let mut k = n - 1;
        let mut enter = true;
        loop {
            if enter {
                enter = false;
                nodes += 1;
                if nodes > self.budget {
                    return Err(Error::BudgetExceeded { budget: self.budget, partial: found });
                }
                let c = (k + 1..n).fold(T::zero(), |acc, j| acc - self.mu[j][k].clone() * T::from_int(u[j]));
                let room = radius_sq.clone() - partial[k + 1].clone();
                let (mut lo, hi) = if room.is_negative() {
                    (1, 0)
                } else {
                    let w = (room / self.bsq[k].clone()).sqrt();
                    ((c.clone() - w.clone()).ceil_i64()?, (c.clone() + w).floor_i64()?)
                };
                if u[k + 1..].iter().all(|&x| x == 0) {
                    lo = lo.max(0);
                }
                centers[k] = c;
                u[k] = lo;
                upper[k] = hi;
            }
            if u[k] > upper[k] {
                u[k] = 0;
                if k == n - 1 {
                    break;
                }
                k += 1;
                u[k] += 1;
                continue;
            }
            let d = T::from_int(u[k]) - centers[k].clone();
            let level = partial[k + 1].clone() + self.bsq[k].clone() * d.clone() * d;
            if level > radius_sq {
                u[k] += 1;
                continue;
            }
            if k == 0 {
                if u.iter().any(|&x| x != 0) {
                    let z = self.to_original(&u)?;
                    let v = self.original.vector(&z);
                    let nsq = norm_sq(&v);
                    if nsq < strict_sq && nsq > T::zero() {
                        found += 1;
                        visit(ShortVector { z, v, norm_sq: nsq });
                    }
                }
                u[0] += 1;
            } else {
                partial[k] = level;
                k -= 1;
                enter = true;
            }
        }
        Ok(nodes)
    }

    pub fn enumerate_below(&self, rho: &T) -> Result<ShortVectorSet<T>> {
        let mut vectors = Vec::new();
        self.for_each_below(rho, |sv| vectors.push(sv))?;
        vectors.sort_by(by_norm);
        Ok(ShortVectorSet { rho: rho.clone(), vectors })
    }

    pub fn shortest_vector(&self) -> Result<ShortVector<T>> {
        let rho = self.first_norm.clone() * (T::one() + T::tolerance(1e-15));
        let mut best: Option<ShortVector<T>> = None;
        self.for_each_below(&rho, |sv| {
            if best.as_ref().map_or(true, |b| by_norm(&sv, b) == Ordering::Less) {
                best = Some(sv);
            }
        })?;
        best.ok_or_else(|| Error::CheckFailed("no vector found at first reduced norm".into()))
    }

    pub fn successive_minima(&self) -> Result<MinimaVector<T>> {
        let n = self.bsq.len();
        // the reduced basis itself supplies n independent vectors below this radius
        let max_bsq = (0..n)
            .map(|j| {
                let z: Vec<i64> = self.transform[j].iter().map(|&x| x as i64).collect();
                norm_sq(&self.original.vector(&z))
            })
            .fold(T::zero(), T::max_of);
        let mut rho = max_bsq.sqrt() * (T::one() + T::tolerance(1e-15));
        loop {
            let set = self.enumerate_below(&rho)?;
            let mut witnesses: Vec<ShortVector<T>> = Vec::with_capacity(n);
            for sv in set.vectors {
                let mut rows: Vec<&[i64]> = witnesses.iter().map(|w| w.z.as_slice()).collect();
                rows.push(&sv.z);
                if integer_rank(&rows) == rows.len() {
                    witnesses.push(sv);
                    if witnesses.len() == n {
                        let lambdas = witnesses.iter().map(|w| w.norm()).collect();
                        return Ok(MinimaVector { lambdas, witnesses });
                    }
                }
            }
            rho = rho * T::from_int(2);
        }
    }
}

/// Exact rank of a set of integer vectors.
pub fn integer_rank(rows: &[&[i64]]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[rank][c];
            for cc in c..cols {
                let delta = &f * &m[rank][cc];
                m[r][cc] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

pub fn enumerate_below<T: Real>(lattice: &LatticeBasis<T>, rho: &T) -> Result<ShortVectorSet<T>> {
    Enumerator::new(lattice)?.enumerate_below(rho)
}

/// A shortest nonzero vector and `λ₁`.
pub fn shortest_vector<T: Real>(lattice: &LatticeBasis<T>) -> Result<(ShortVector<T>, T)> {
    let sv = Enumerator::new(lattice)?.shortest_vector()?;
    let norm = sv.norm();
    Ok((sv, norm))
}

pub fn successive_minima<T: Real>(lattice: &LatticeBasis<T>) -> Result<MinimaVector<T>> {
    Enumerator::new(lattice)?.successive_minima()
}

/// Checks size reduction and the Lovász condition.
pub fn is_lll_reduced<T: Real>(lattice: &LatticeBasis<T>, delta: &T) -> bool {
    let n = lattice.dim();
    let cols: Vec<Vec<T>> = (0..n).map(|j| lattice.column(j)).collect();
    let gso = gram_schmidt(&cols);
    let slack = T::tolerance(1e-20);
    let half = T::ratio(1, 2) + slack.clone();
    for i in 1..n {
        for j in 0..i {
            if gso.mu[i][j].abs() > half {
                return false;
            }
        }
        let m = gso.mu[i][i - 1].clone();
        let rhs = (delta.clone() - m.clone() * m) * gso.bsq[i - 1].clone();
        if gso.bsq[i].clone() * (T::one() + slack.clone()) < rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;
    use num_traits::Signed;

    fn lattice(rows: Vec<Vec<f64>>) -> LatticeBasis<f64> {
        LatticeBasis::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_is_already_reduced() {
        let id = LatticeBasis::<f64>::identity(3);
        let red = lll_reduce(&id, &0.99).unwrap();
        assert_eq!(red.basis(), id.basis());
    }

    #[test]
    fn skew_basis_reduces_to_unit_vectors() {
        // columns (1, 10^6) and (0, 1)
        let l = LatticeBasis::<BigFloat>::from_rows(vec![
            vec![BigFloat::from_int(1), BigFloat::from_int(0)],
            vec![BigFloat::from_int(1_000_000), BigFloat::from_int(1)],
        ])
        .unwrap();
        let delta = BigFloat::ratio(99, 100);
        let red = lll_with_transform(&l, &delta).unwrap();
        assert!(is_lll_reduced(&red.reduced, &delta));
        let first = norm_sq(&red.reduced.column(0));
        assert_eq!(first, BigFloat::from_int(1));
        let det = MatrixN::from_fn(2, |i, j| BigFloat::from_i128_exact(red.transform[j][i])).determinant();
        assert_eq!(det.abs(), BigFloat::from_int(1));
    }

    #[test]
    fn rejects_bad_delta() {
        let id = LatticeBasis::<f64>::identity(2);
        assert!(lll_reduce(&id, &0.2).is_err());
        assert!(lll_reduce(&id, &1.0).is_err());
    }

    #[test]
    fn z2_below_one_and_a_half() {
        let set = enumerate_below(&LatticeBasis::<f64>::identity(2), &1.5).unwrap();
        let zs: Vec<Vec<i64>> = set.vectors.iter().map(|s| s.z.clone()).collect();
        assert_eq!(zs, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]);
    }

    #[test]
    fn anisotropic_diagonal() {
        let l = lattice(vec![vec![0.5, 0.0], vec![0.0, 2.0]]);
        let set = enumerate_below(&l, &1.1).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.vectors[0].v, vec![0.5, 0.0]);
        let set = enumerate_below(&l, &0.5).unwrap();
        assert!(set.is_empty());
        let (_, l1) = shortest_vector(&l).unwrap();
        assert_eq!(l1, 0.5);
        let m = successive_minima(&l).unwrap();
        assert_eq!(m.lambdas, vec![0.5, 2.0]);
        assert_eq!(m.witnesses[1].z, vec![0, 1]);
    }

    #[test]
    fn minima_of_integer_lattice() {
        let m = successive_minima(&LatticeBasis::<BigFloat>::identity(4)).unwrap();
        assert!(m.lambdas.iter().all(|l| *l == BigFloat::from_int(1)));
        let zs: Vec<Vec<i64>> = m.witnesses.iter().map(|w| w.z.clone()).collect();
        assert_eq!(zs[0], vec![1, 0, 0, 0]);
    }

    #[test]
    fn budget_is_reported() {
        let e = Enumerator::new(&LatticeBasis::<f64>::identity(3)).unwrap().with_budget(10);
        match e.enumerate_below(&5.0) {
            Err(Error::BudgetExceeded { budget: 10, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rank_of_integer_rows() {
        assert_eq!(integer_rank(&[&[1, 2, 3], &[2, 4, 6]]), 1);
        assert_eq!(integer_rank(&[&[1, 0, 3], &[0, 4, 6], &[1, 4, 9]]), 2);
        assert_eq!(integer_rank(&[&[1, 0], &[1, 1]]), 2);
    }
}
