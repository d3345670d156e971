//! Dense square matrices, lattice bases and their duals.

use std::ops::Index;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixN<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> MatrixN<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            data.extend(row);
        }
        Ok(MatrixN { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        MatrixN { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        MatrixN::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> MatrixN<U> {
        MatrixN { n: self.n, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.data.swap(a * self.n + j, b * self.n + j);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for MatrixN<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for MatrixN<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Field> MatrixN<T> {
    pub fn identity(n: usize) -> Self {
        MatrixN::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        MatrixN::from_fn(d.len(), |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn mul(&self, rhs: &MatrixN<T>) -> Result<MatrixN<T>> {
        if rhs.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: rhs.n });
        }
        Ok(MatrixN::from_fn(self.n, |i, j| {
            (0..self.n).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * rhs[(k, j)].clone())
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn scale(&self, s: &T) -> MatrixN<T> {
        self.map(|x| x.clone() * s.clone())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| {
            let a = x.abs();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    /// Gaussian elimination with partial pivoting. Exact for exact fields.
    pub fn determinant(&self) -> T {
        let mut a = self.clone();
        let n = self.n;
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .abs()
                        .partial_cmp(&a[(y, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            if a[(pivot, col)].is_zero() {
                return T::zero();
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let factor = a[(r, col)].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let delta = factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - delta;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse; fails when a pivot is negligible.
    pub fn inverse(&self) -> Result<MatrixN<T>> {
        let n = self.n;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut inv = MatrixN::<T>::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .abs()
                        .partial_cmp(&a[(y, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            if a[(pivot, col)].negligible(&scale) {
                return Err(Error::DegenerateLattice);
            }
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / p.clone();
                inv[(col, c)] = inv[(col, c)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in 0..n {
                    let da = factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - da;
                    let di = factor.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = inv[(r, c)].clone() - di;
                }
            }
        }
        Ok(inv)
    }
}

/// Determinant of a square matrix.
pub fn determinant<T: Field>(m: &MatrixN<T>) -> T {
    m.determinant()
}

/// Spectral norm (largest singular value).
///
/// Diagonal matrices are answered exactly. Otherwise the largest eigenvalue of
/// `MᵀM` is taken from its characteristic polynomial for `n ≤ 3` and from a
/// symmetric power iteration above that.
pub fn operator_norm<T: Real>(m: &MatrixN<T>) -> T {
    let n = m.dim();
    if m.is_diagonal() {
        return (0..n).map(|i| m[(i, i)].abs()).fold(T::zero(), T::max_of);
    }
    let gram = m.transpose().mul(m).expect("same dimension");
    let lambda = match n {
        1 => gram[(0, 0)].clone(),
        2 => largest_eigen_2x2(&gram),
        3 => largest_eigen_3x3(&gram),
        _ => largest_eigen_power(&gram),
    };
    lambda.max_of(T::zero()).sqrt()
}

fn largest_eigen_2x2<T: Real>(s: &MatrixN<T>) -> T {
    let two = T::from_int(2);
    let a = s[(0, 0)].clone();
    let b = s[(0, 1)].clone();
    let c = s[(1, 1)].clone();
    let mean = (a.clone() + c.clone()) / two.clone();
    let half_diff = (a - c) / two;
    mean + (half_diff.clone() * half_diff + b.clone() * b).sqrt()
}

/// Newton's method on the characteristic polynomial, started at the trace.
/// All roots are real and the trace bounds them from above, so the iterates
/// decrease monotonically to the largest root.
fn largest_eigen_3x3<T: Real>(s: &MatrixN<T>) -> T {
    let e = |i: usize, j: usize| s[(i, j)].clone();
    let trace = e(0, 0) + e(1, 1) + e(2, 2);
    let minors = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0)
        + e(1, 1) * e(2, 2)
        - e(1, 2) * e(2, 1);
    let det = s.determinant();
    let p = |x: &T| {
        x.clone() * x.clone() * x.clone() - trace.clone() * x.clone() * x.clone() + minors.clone() * x.clone()
            - det.clone()
    };
    let dp = |x: &T| {
        T::from_int(3) * x.clone() * x.clone() - T::from_int(2) * trace.clone() * x.clone() + minors.clone()
    };
    let mut x = trace.clone();
    let tol = T::epsilon() * T::from_int(4);
    for _ in 0..500 {
        let d = dp(&x);
        if d.is_zero() {
            break;
        }
        let step = p(&x) / d;
        let next = x.clone() - step.clone();
        let done = step.abs() <= tol.clone() * x.abs().max_of(T::one());
        if next >= x {
            // monotone phase is over: rounding noise only
            break;
        }
        x = next;
        if done {
            break;
        }
    }
    x
}

fn largest_eigen_power<T: Real>(s: &MatrixN<T>) -> T {
    let n = s.dim();
    let threshold = T::tolerance(1e-25);
    let mut v: Vec<T> = (0..n)
        .map(|i| T::one() + T::ratio(i as i64 + 1, 7) * T::ratio(41, 100))
        .collect();
    let norm = |v: &[T]| v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone()).sqrt();
    let mut lambda = T::zero();
    for _ in 0..200_000 {
        let nv = norm(&v);
        if nv.is_zero() {
            return T::zero();
        }
        v = v.into_iter().map(|x| x / nv.clone()).collect();
        let w = s.mul_vec(&v);
        let rq = v.iter().zip(&w).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let change = (rq.clone() - lambda.clone()).abs();
        lambda = rq;
        v = w;
        if change <= threshold.clone() * lambda.abs().max_of(T::epsilon()) {
            break;
        }
    }
    lambda
}

/// Parses a JSON array of rows, each entry a decimal string or a number.
pub fn parse_matrix<T: Real>(text: &str) -> Result<MatrixN<T>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix literal: {e}")))?;
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Parse("matrix literal must be an array of rows".into()))?;
    let parsed = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(|entry| match entry {
                    Value::String(s) => T::parse_decimal(s),
                    Value::Number(num) => T::parse_decimal(&num.to_string()),
                    other => Err(Error::Parse(format!("matrix entry {other} is not a number"))),
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixN::from_rows(parsed).map_err(|e| Error::Parse(format!("matrix literal: {e}")))
}

/// A full-rank lattice `Γ = B·ℤⁿ`; the columns of `basis` generate it.
#[derive(Clone, Debug)]
pub struct LatticeBasis<T> {
    basis: MatrixN<T>,
    det: T,
    unimodular: bool,
}

impl<T: Real> LatticeBasis<T> {
    pub fn new(basis: MatrixN<T>) -> Result<Self> {
        let n = basis.dim();
        let det = basis.determinant();
        let hadamard = (0..n)
            .map(|j| basis.column(j).iter().fold(T::zero(), |a, x| a + x.clone() * x.clone()).sqrt())
            .fold(T::one(), |a, x| a * x);
        if det.is_zero() || det.negligible(&hadamard) {
            return Err(Error::DegenerateLattice);
        }
        let abs_det = det.abs();
        let tol = T::tolerance(1e-30) * abs_det.clone().max_of(T::one());
        let unimodular = (abs_det - T::one()).abs() <= tol;
        Ok(LatticeBasis { basis, det, unimodular })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(MatrixN::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(MatrixN::identity(n)).expect("identity is nonsingular")
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &MatrixN<T> {
        &self.basis
    }

    pub fn det(&self) -> &T {
        &self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodular
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.basis.column(j)
    }

    /// The lattice vector `B·z`.
    pub fn vector(&self, z: &[i64]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .zip(z)
                    .filter(|(_, &c)| c != 0)
                    .fold(T::zero(), |acc, (b, &c)| acc + b.clone() * T::from_int(c))
            })
            .collect()
    }

    pub fn gram(&self) -> MatrixN<T> {
        self.basis.transpose().mul(&self.basis).expect("square")
    }

    /// The lattice `D·Γ` for the diagonal matrix `D = diag(d)`.
    pub fn scale_coordinates(&self, d: &[T]) -> Result<Self> {
        let n = self.dim();
        if d.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: d.len() });
        }
        Self::new(MatrixN::from_fn(n, |i, j| d[i].clone() * self.basis[(i, j)].clone()))
    }

    /// The lattice `M·Γ`.
    pub fn transform(&self, m: &MatrixN<T>) -> Result<Self> {
        Self::new(m.mul(&self.basis)?)
    }
}

/// Euclidean norm of a vector.
pub fn norm<T: Real>(v: &[T]) -> T {
    norm_sq(v).sqrt()
}

pub fn norm_sq<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
}

/// Basis `(B⁻¹)ᵀ` of the dual lattice `Γ⊥ = {w : ⟨v, w⟩ ∈ ℤ for all v ∈ Γ}`.
pub fn dual_basis<T: Real>(lattice: &LatticeBasis<T>) -> Result<LatticeBasis<T>> {
    let inv = lattice.basis.inverse()?;
    LatticeBasis::new(inv.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    fn big(s: &str) -> BigFloat {
        BigFloat::parse_decimal(s).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&MatrixN::<f64>::identity(3)), 1.0);
        let alpha = (BigFloat::from_int(5).sqrt() - BigFloat::one()) / BigFloat::from_int(2);
        let s = alpha.sqrt();
        let m = MatrixN::from_rows(vec![
            vec![BigFloat::one() / s.clone(), alpha.clone() / s.clone()],
            vec![BigFloat::one() / s.clone(), BigFloat::from_int(2) * alpha / s],
        ])
        .unwrap();
        assert!((determinant(&m) - BigFloat::one()).abs() < big("1e-45"));
        let singular = MatrixN::from_rows(vec![vec![1.5, 2.0, 3.0], vec![1.5, 2.0, 3.0], vec![0.0, 1.0, 7.0]]).unwrap();
        assert_eq!(determinant(&singular), 0.0);
    }

    #[test]
    fn determinant_is_exact_over_rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let m = MatrixN::from_rows(vec![vec![r(1, 3), r(2, 7)], vec![r(5, 11), r(1, 2)]]).unwrap();
        assert_eq!(determinant(&m), r(1, 6) - r(10, 77));
    }

    #[test]
    fn dual_basis_examples() {
        let id = LatticeBasis::<f64>::identity(3);
        assert_eq!(dual_basis(&id).unwrap().basis(), &MatrixN::identity(3));

        let d = LatticeBasis::new(MatrixN::diagonal(&[2.0, 0.5])).unwrap();
        assert_eq!(dual_basis(&d).unwrap().basis(), &MatrixN::diagonal(&[0.5, 2.0]));

        let singular = MatrixN::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(LatticeBasis::new(singular), Err(Error::DegenerateLattice)));
    }

    #[test]
    fn dual_of_application_matrix_is_inverse_transpose() {
        let alpha = (BigFloat::from_int(5).sqrt() - BigFloat::one()) / BigFloat::from_int(2);
        let s = alpha.sqrt();
        let a = LatticeBasis::from_rows(vec![
            vec![BigFloat::one() / s.clone(), alpha.clone() / s.clone()],
            vec![BigFloat::one() / s.clone(), BigFloat::from_int(2) * alpha / s],
        ])
        .unwrap();
        assert!(a.is_unimodular());
        let dual = dual_basis(&a).unwrap();
        let product = a.basis().transpose().mul(dual.basis()).unwrap();
        let id = MatrixN::<BigFloat>::identity(2);
        for i in 0..2 {
            for j in 0..2 {
                assert!((product[(i, j)].clone() - id[(i, j)].clone()).abs() < big("1e-30"));
            }
        }
        assert!((dual.det().clone() * a.det().clone() - BigFloat::one()).abs() < big("1e-40"));
    }

    #[test]
    fn operator_norm_diagonal_and_identity() {
        let d = MatrixN::diagonal(&[big("0.5"), big("-3"), big("2")]);
        assert_eq!(operator_norm(&d), big("3"));
        assert_eq!(operator_norm(&MatrixN::<BigFloat>::identity(4)), BigFloat::one());
    }

    #[test]
    fn operator_norm_dense_paths_agree_with_each_other() {
        // a 3x3 and 4x4 block-diagonal embedding of the same 2x2 block must
        // give the same norm through the cubic and the power-iteration paths
        let m2 = MatrixN::from_rows(vec![vec![big("1.25"), big("-0.5")], vec![big("2"), big("0.75")]]).unwrap();
        let embed = |n: usize| {
            MatrixN::from_fn(n, |i, j| {
                if i < 2 && j < 2 {
                    m2[(i, j)].clone()
                } else if i == j {
                    big("0.1")
                } else {
                    BigFloat::zero()
                }
            })
        };
        let a = operator_norm(&m2);
        let b = operator_norm(&embed(3));
        let c = operator_norm(&embed(4));
        assert!((a.clone() - b).abs() < big("1e-40"));
        assert!((a - c).abs() < big("1e-24"));
    }

    #[test]
    fn parse_matrix_accepts_strings_and_numbers() {
        let m: MatrixN<BigFloat> = parse_matrix(r#"[["1.5", 2], ["0.25", "-1e-3"]]"#).unwrap();
        assert_eq!(m[(1, 1)], big("-0.001"));
        assert!(parse_matrix::<f64>("[[1,2],[3]]").is_err());
        assert!(parse_matrix::<f64>("[[1,2],[3,\"x\"]]").is_err());
        assert!(parse_matrix::<f64>("not json").is_err());
    }
}
