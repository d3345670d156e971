//! Seeded random inputs for experiments: unimodular lattices and boxes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{LatticeBasis, MatrixN};
use crate::scalar::Real;

/// A uniform decimal in `(−1, 1)` with `digits` random digits, parsed exactly
/// at the working precision so results do not depend on `f64` rounding.
pub fn random_unit_decimal<T: Real, R: Rng + ?Sized>(rng: &mut R, digits: usize) -> Result<T> {
    let sign = if rng.gen::<bool>() { "-" } else { "" };
    let body: String = (0..digits).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
    T::parse_decimal(&format!("{sign}0.{body}"))
}

/// A uniform decimal in `[lo, hi)` with 30 random digits.
pub fn random_in<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: &T, hi: &T) -> Result<T> {
    let body: String = (0..30).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
    let u = T::parse_decimal(&format!("0.{body}"))?;
    Ok(lo.clone() + (hi.clone() - lo.clone()) * u)
}

/// A random lattice of determinant `+1`.
///
/// Entries are drawn from `(−1, 1)`; draws whose determinant is below `2^{−n}`
/// times the Hadamard bound are rejected so the reduced bases stay well
/// conditioned, then the basis is rescaled by `|det|^{−1/n}`.
pub fn random_unimodular<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<LatticeBasis<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    for _ in 0..1000 {
        let mut m = MatrixN::from_fn(n, |_, _| T::zero());
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = random_unit_decimal(rng, 30)?;
            }
        }
        let det = m.determinant();
        let hadamard = (0..n)
            .map(|j| m.column(j).iter().fold(T::zero(), |a, x| a + x.clone() * x.clone()).sqrt())
            .fold(T::one(), |a, x| a * x);
        if det.abs() < hadamard / T::from_int(1i64 << n) {
            continue;
        }
        let scale = T::one() / det.abs().nth_root(n as u32);
        let mut m = m.scale(&scale);
        if det < T::zero() {
            for i in 0..n {
                m[(i, 0)] = -m[(i, 0)].clone();
            }
        }
        let l = LatticeBasis::new(m)?;
        if !l.is_unimodular() {
            return Err(Error::CheckFailed("rescaled lattice is not unimodular".into()));
        }
        return Ok(l);
    }
    Err(Error::DegenerateDraw { attempts: 1000 })
}

/// A box with sides in `[1, max_side]` and offset in `[−max_side, max_side]ⁿ`.
pub fn random_box<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, max_side: &T) -> Result<crate::boxcount::AlignedBox<T>> {
    let one = T::one();
    let t = (0..n).map(|_| random_in(rng, &one, max_side)).collect::<Result<Vec<_>>>()?;
    let lo = -max_side.clone();
    let y = (0..n).map(|_| random_in(rng, &lo, max_side)).collect::<Result<Vec<_>>>()?;
    crate::boxcount::AlignedBox::new(t, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_unimodular_and_reproducible() {
        for n in 2..=5 {
            let mut a = ChaCha8Rng::seed_from_u64(7);
            let mut b = ChaCha8Rng::seed_from_u64(7);
            let la: LatticeBasis<BigFloat> = random_unimodular(&mut a, n).unwrap();
            let lb: LatticeBasis<BigFloat> = random_unimodular(&mut b, n).unwrap();
            assert!(la.is_unimodular());
            assert!(*la.det() > BigFloat::zero());
            assert_eq!(la.basis(), lb.basis());
        }
    }

    #[test]
    fn boxes_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ten = BigFloat::from_int(10);
        for _ in 0..20 {
            let b = random_box(&mut rng, 3, &ten).unwrap();
            assert!(b.t.iter().all(|s| *s >= BigFloat::one() && *s <= ten));
            assert!(b.y.iter().all(|s| s.abs() <= ten));
        }
    }
}
