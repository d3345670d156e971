//! Comparing `ν` on a lattice and its dual: the structural conditions under
//! which they agree, and a construction where they do not.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dual_basis, LatticeBasis, MatrixN};
use crate::nu::{csv_err, nu_profile};
use crate::sample::random_unit_decimal;
use crate::scalar::Real;

fn near_integer<T: Real>(x: &T) -> Option<i64> {
    let r = x.round();
    if (x.clone() - r.clone()).abs() <= T::tolerance(1e-30) {
        r.to_i64()
    } else {
        None
    }
}

/// Exactly one entry `±1` in every row and column, zeros elsewhere.
pub fn is_signed_permutation<T: Real>(s: &MatrixN<T>) -> bool {
    let n = s.dim();
    let mut col_hits = vec![0usize; n];
    for i in 0..n {
        let mut row_hits = 0;
        for (j, hits) in col_hits.iter_mut().enumerate() {
            match near_integer(&s[(i, j)]) {
                Some(0) => {}
                Some(1) | Some(-1) => {
                    row_hits += 1;
                    *hits += 1;
                }
                _ => return false,
            }
        }
        if row_hits != 1 {
            return false;
        }
    }
    col_hits.iter().all(|&h| h == 1)
}

/// `[[0, I_m], [−I_m, 0]]`.
pub fn symplectic_form<T: Real>(m: usize) -> Result<MatrixN<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("symplectic form needs m >= 1".into()));
    }
    Ok(MatrixN::from_fn(2 * m, |i, j| {
        if j == i + m {
            T::one()
        } else if i == j + m {
            -T::one()
        } else {
            T::zero()
        }
    }))
}

#[derive(Clone, Debug)]
pub struct PropConditions<T> {
    /// `max |(AᵀSA − R)ᵢⱼ|`
    pub residual: T,
    pub s_signed_permutation: bool,
    pub r_integral: bool,
    pub r_det: Option<i64>,
}

impl<T: Real> PropConditions<T> {
    pub fn holds(&self) -> bool {
        self.s_signed_permutation
            && self.r_integral
            && matches!(self.r_det, Some(1) | Some(-1))
            && self.residual <= T::tolerance(1e-25)
    }
}

/// Checks `AᵀSA = R` with `S` a signed permutation and `R ∈ GL_n(ℤ)`.
pub fn check_prop_conditions<T: Real>(a: &MatrixN<T>, s: &MatrixN<T>, r: &MatrixN<T>) -> Result<PropConditions<T>> {
    let n = a.dim();
    for m in [s, r] {
        if m.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
        }
    }
    if a.determinant().is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let lhs = a.transpose().mul(s)?.mul(a)?;
    let mut residual = T::zero();
    for i in 0..n {
        for j in 0..n {
            residual = residual.max_of((lhs[(i, j)].clone() - r[(i, j)].clone()).abs());
        }
    }
    let ints: Option<Vec<Vec<i64>>> =
        (0..n).map(|i| (0..n).map(|j| near_integer(&r[(i, j)])).collect()).collect();
    let r_det = ints.as_ref().and_then(|rows| {
        let m = MatrixN::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| num_rational::BigRational::from_integer(x.into())).collect())
                .collect(),
        )
        .ok()?;
        let d = m.determinant();
        d.is_integer().then(|| num_traits::ToPrimitive::to_i64(&d.to_integer())).flatten()
    });
    Ok(PropConditions { residual, s_signed_permutation: is_signed_permutation(s), r_integral: ints.is_some(), r_det })
}

pub fn verify_prop_conditions<T: Real>(a: &MatrixN<T>, s: &MatrixN<T>, r: &MatrixN<T>) -> Result<bool> {
    Ok(check_prop_conditions(a, s, r)?.holds())
}

#[derive(Clone, Debug)]
pub struct ComparisonRow<T> {
    pub rho: T,
    pub nu_primal: T,
    pub nu_dual: T,
    pub abs_diff: T,
}

#[derive(Clone, Debug)]
pub struct DualComparison<T> {
    pub rows: Vec<ComparisonRow<T>>,
    pub max_abs_discrepancy: T,
    pub primal_flagged: bool,
    pub dual_flagged: bool,
}

impl<T: Real> DualComparison<T> {
    /// CSV with columns `rho, nu_primal, nu_dual, abs_diff`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rho", "nu_primal", "nu_dual", "abs_diff"]).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.rho.to_decimal_string(),
                r.nu_primal.to_decimal_string(),
                r.nu_dual.to_decimal_string(),
                r.abs_diff.to_decimal_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))?;
        Ok(())
    }
}

/// `ν(Γ,ρ)` against `ν(Γ⊥,ρ)` on an ascending grid.
pub fn nu_profile_compare<T: Real>(lattice: &LatticeBasis<T>, rho_grid: &[T]) -> Result<DualComparison<T>> {
    if !lattice.is_unimodular() {
        return Err(Error::NotUnimodular { det: lattice.det().to_decimal_string() });
    }
    let dual = dual_basis(lattice)?;
    let (primal, dual) = rayon::join(|| nu_profile(lattice, rho_grid), || nu_profile(&dual, rho_grid));
    let (primal, dual) = (primal?, dual?);
    let mut max = T::zero();
    let rows = rho_grid
        .iter()
        .enumerate()
        .map(|(i, rho)| {
            let abs_diff = (primal.values[i].clone() - dual.values[i].clone()).abs();
            max = max.clone().max_of(abs_diff.clone());
            ComparisonRow { rho: rho.clone(), nu_primal: primal.values[i].clone(), nu_dual: dual.values[i].clone(), abs_diff }
        })
        .collect();
    Ok(DualComparison { rows, max_abs_discrepancy: max, primal_flagged: primal.is_flagged(), dual_flagged: dual.is_flagged() })
}

/// A unimodular lattice whose dual basis has a vanishing `(n,n)` entry.
#[derive(Clone, Debug)]
pub struct Example31<T> {
    pub lattice: LatticeBasis<T>,
    pub dual: LatticeBasis<T>,
    /// `((A⁻¹)ᵀ)_{n,n}`
    pub dual_corner: T,
    pub attempts: u32,
}

const MAX_DRAWS: u32 = 10;

/// Builds `A₀ = [[A′₀, x], [r, y]]` with `r` the last row of `A′₀` and
/// `y ≠ x_{n−1}`, swaps its first and last rows and rescales by
/// `|det A₀|^{−1/n}`. The `(n,n)` minor then has two equal rows, so the
/// `(n,n)` entry of `(A⁻¹)ᵀ` vanishes and the dual meets a coordinate hyperplane.
pub fn example31_build<T: Real>(n: usize, seed: u64) -> Result<Example31<T>> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("construction needs n >= 3, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let digits = 50;
    for attempt in 1..=MAX_DRAWS {
        let mut rows: Vec<Vec<T>> = (0..n - 1)
            .map(|_| (0..n).map(|_| random_unit_decimal(&mut rng, digits)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let mut last: Vec<T> = rows[n - 2][..n - 1].to_vec();
        let y = loop {
            let y: T = random_unit_decimal(&mut rng, digits)?;
            if y != rows[n - 2][n - 1] {
                break y;
            }
        };
        last.push(y);
        rows.push(last);
        let a0 = MatrixN::from_rows(rows.clone())?;
        let det = a0.determinant();
        if det.abs() < T::tolerance(1e-10) {
            continue;
        }
        rows.swap(0, n - 1);
        let scale = T::one() / det.abs().nth_root(n as u32);
        let scaled = rows.into_iter().map(|r| r.into_iter().map(|x| x * scale.clone()).collect()).collect();
        let lattice = LatticeBasis::from_rows(scaled)?;
        let dual = dual_basis(&lattice)?;
        let dual_corner = dual.basis()[(n - 1, n - 1)].clone();
        if dual_corner.abs() > T::tolerance(1e-40) {
            return Err(Error::PrecisionExhausted(format!(
                "dual corner entry {} does not vanish at this precision",
                dual_corner.to_decimal_string()
            )));
        }
        if !lattice.is_unimodular() {
            return Err(Error::CheckFailed("rescaled construction is not unimodular".into()));
        }
        return Ok(Example31 { lattice, dual, dual_corner, attempts: attempt });
    }
    Err(Error::DegenerateDraw { attempts: MAX_DRAWS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dio::application_lattice;
    use crate::nu::geometric_grid;
    use crate::prelude::*;

    fn bf(s: &str) -> BigFloat {
        BigFloat::parse_decimal(s).unwrap()
    }

    #[test]
    fn signed_permutations() {
        assert!(is_signed_permutation(&MatrixN::<f64>::identity(3)));
        assert!(is_signed_permutation(&symplectic_form::<f64>(1).unwrap()));
        let shear = MatrixN::from_rows(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_signed_permutation(&shear));
        let doubled = MatrixN::from_rows(vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_signed_permutation(&doubled));
    }

    #[test]
    fn symplectic_form_shape() {
        let j = symplectic_form::<f64>(1).unwrap();
        assert_eq!(j, MatrixN::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap());
        for m in 1..=4 {
            let j = symplectic_form::<f64>(m).unwrap();
            assert_eq!(j.transpose(), j.scale(&-1.0));
            assert_eq!(j.mul(&j).unwrap(), MatrixN::identity(2 * m).scale(&-1.0));
        }
    }

    #[test]
    fn prop_conditions() {
        let alpha = (bf("5").sqrt() - bf("1")) / bf("2");
        let a = application_lattice(&alpha).unwrap();
        let j = symplectic_form::<BigFloat>(1).unwrap();
        assert!(verify_prop_conditions(a.basis(), &j, &j).unwrap());
        let id = MatrixN::<BigFloat>::identity(3);
        assert!(verify_prop_conditions(&id, &id, &id).unwrap());
        let a4 = MatrixN::from_fn(4, |i, j| if i == j { bf("1") } else { BigFloat::from_int((i * 4 + j) as i64) / bf("17") });
        let j4 = symplectic_form::<BigFloat>(2).unwrap();
        assert!(!verify_prop_conditions(&a4, &j4, &j4).unwrap());
    }

    #[test]
    fn planar_lattices_have_equal_profiles() {
        let alpha = (bf("5").sqrt() - bf("1")) / bf("2");
        let a = application_lattice(&alpha).unwrap();
        let grid = geometric_grid(&bf("1.2"), &bf("30"), 12).unwrap();
        let c = nu_profile_compare(&a, &grid).unwrap();
        assert!(c.max_abs_discrepancy <= bf("1e-25"));
        let z3 = LatticeBasis::<BigFloat>::identity(3);
        let c = nu_profile_compare(&z3, &geometric_grid(&bf("1.3"), &bf("4"), 5).unwrap()).unwrap();
        assert!(c.rows.iter().all(|r| r.nu_primal.is_zero() && r.nu_dual.is_zero()));
    }

    #[test]
    fn construction_has_vanishing_dual_corner() {
        let e = example31_build::<BigFloat>(3, 1).unwrap();
        assert!(e.dual_corner.abs() <= bf("1e-40"));
        assert!(e.lattice.is_unimodular());
        assert!(example31_build::<BigFloat>(2, 1).is_err());
        // same seed, same lattice
        let again = example31_build::<BigFloat>(3, 1).unwrap();
        assert_eq!(again.lattice.basis(), e.lattice.basis());
    }
}
