//! Aligned boxes and exact lattice-point counts.

use crate::error::{Error, Result};
use crate::linalg::{LatticeBasis, MatrixN};
use crate::reduction::lll_with_transform;
use crate::scalar::Real;

pub const DEFAULT_COUNT_BUDGET: u64 = 1_000_000_000;
const MAX_STORED_WARNINGS: usize = 1000;

/// The closed box `𝒯[0,1]ⁿ + y` with `𝒯 = diag(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignedBox<T> {
    pub t: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> AlignedBox<T> {
    pub fn new(t: Vec<T>, y: Vec<T>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: t.len(), got: y.len() });
        }
        if t.is_empty() {
            return Err(Error::InvalidArgument("box must have at least one side".into()));
        }
        if let Some(bad) = t.iter().find(|ti| **ti <= T::zero()) {
            return Err(Error::InvalidArgument(format!("box side lengths must be positive, got {bad}")));
        }
        Ok(AlignedBox { t, y })
    }

    /// `[0, side]ⁿ`.
    pub fn cube(n: usize, side: T) -> Self {
        AlignedBox::new(vec![side; n], vec![T::zero(); n]).expect("positive side")
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn volume(&self) -> T {
        volume(self)
    }

    pub fn upper(&self) -> Vec<T> {
        self.y.iter().zip(&self.t).map(|(a, b)| a.clone() + b.clone()).collect()
    }

    pub fn translate(&self, v: &[T]) -> Self {
        let y = self.y.iter().zip(v).map(|(a, b)| a.clone() + b.clone()).collect();
        AlignedBox { t: self.t.clone(), y }
    }

    /// The box `s·B` (both sides and translation scaled).
    pub fn dilate(&self, s: &T) -> Self {
        AlignedBox {
            t: self.t.iter().map(|x| x.clone() * s.clone()).collect(),
            y: self.y.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    /// `|∂B| = 2 Σᵢ Π_{j≠i} tⱼ`.
    pub fn surface_area(&self) -> T {
        let n = self.dim();
        let faces = (0..n).fold(T::zero(), |acc, i| {
            acc + (0..n).filter(|&j| j != i).fold(T::one(), |p, j| p * self.t[j].clone())
        });
        T::from_int(2) * faces
    }
}

pub fn volume<T: Real>(b: &AlignedBox<T>) -> T {
    b.t.iter().fold(T::one(), |acc, x| acc * x.clone())
}

/// `T = (t₁⋯tₙ)^{1/n} / min tᵢ`, always `≥ 1`.
pub fn t_quantity<T: Real>(b: &AlignedBox<T>) -> T {
    let n = b.dim() as u32;
    let min = b.t.iter().cloned().reduce(T::min_of).expect("non-empty");
    let t = volume(b).nth_root(n) / min;
    // the geometric mean never falls below the minimum; clamp rounding noise
    t.max_of(T::one())
}

#[derive(Clone, Debug)]
pub struct Normalization<T> {
    pub u: MatrixN<T>,
    pub lambda: LatticeBasis<T>,
    pub tbar: T,
}

/// `U = t̄𝒯⁻¹` with `t̄ = (det 𝒯)^{1/n}`, and `Λ = UΓ`.
pub fn normalize<T: Real>(lattice: &LatticeBasis<T>, b: &AlignedBox<T>) -> Result<Normalization<T>> {
    let n = lattice.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
    }
    let tbar = volume(b).nth_root(n as u32);
    let diag: Vec<T> = b.t.iter().map(|ti| tbar.clone() / ti.clone()).collect();
    let u = MatrixN::diagonal(&diag);
    let lambda = lattice.scale_coordinates(&diag)?;
    Ok(Normalization { u, lambda, tbar })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountResult {
    pub count: u64,
    /// Integer coordinates of counted points lying within tolerance of a face
    /// (at most the first thousand are kept).
    pub boundary_warnings: Vec<Vec<i64>>,
    pub boundary_total: u64,
}

struct VertexSystem<T> {
    rows: Vec<usize>,
    inv: MatrixN<T>,
}

/// Enumerates `Γ ∩ B` for a fixed lattice and box.
///
/// The basis is LLL-reduced in box-normalized coordinates, then integer
/// coordinates are fixed from the last to the first; each coordinate ranges
/// over the exact projection of the remaining slab, found by visiting the
/// vertices of the constraint polytope.
pub struct BoxCounter<T> {
    lattice: LatticeBasis<T>,
    transform: Vec<Vec<i128>>,
    reduced: MatrixN<T>,
    lo: Vec<T>,
    hi: Vec<T>,
    face_lo: Vec<T>,
    face_hi: Vec<T>,
    tol: Vec<T>,
    slack: Vec<T>,
    systems: Vec<Vec<VertexSystem<T>>>,
    budget: u64,
}

impl<T: Real> BoxCounter<T> {
    pub fn new(lattice: &LatticeBasis<T>, b: &AlignedBox<T>) -> Result<Self> {
        let n = lattice.dim();
        if b.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
        }
        let inv_t: Vec<T> = b.t.iter().map(|ti| T::one() / ti.clone()).collect();
        let scaled = lattice.scale_coordinates(&inv_t)?;
        let red = lll_with_transform(&scaled, &T::ratio(99, 100))?;
        let cols: Vec<Vec<T>> = red
            .transform
            .iter()
            .map(|c| {
                let z = c.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow("box reduction"))).collect::<Result<Vec<_>>>()?;
                Ok(lattice.vector(&z))
            })
            .collect::<Result<_>>()?;
        let reduced = MatrixN::from_fn(n, |i, j| cols[j][i].clone());

        let tol: Vec<T> = b.t.iter().map(|ti| T::tolerance(1e-25) * ti.clone()).collect();
        let face_lo = b.y.clone();
        let face_hi = b.upper();
        let lo: Vec<T> = face_lo.iter().zip(&tol).map(|(a, e)| a.clone() - e.clone()).collect();
        let hi: Vec<T> = face_hi.iter().zip(&tol).map(|(a, e)| a.clone() + e.clone()).collect();
        let slack = (0..n)
            .map(|i| {
                let scale = b.t[i].clone().max_of(lo[i].abs()).max_of(hi[i].abs()).max_of(T::one());
                T::tolerance(1e-30) * scale
            })
            .collect();

        let mut systems = Vec::with_capacity(n);
        for k in 0..n {
            let mut level = Vec::new();
            if k > 0 {
                for rows in subsets(n, k + 1) {
                    let sub = MatrixN::from_fn(k + 1, |a, c| reduced[(rows[a], c)].clone());
                    if let Ok(inv) = sub.inverse() {
                        level.push(VertexSystem { rows, inv });
                    }
                }
            }
            systems.push(level);
        }
        Ok(BoxCounter {
            lattice: lattice.clone(),
            transform: red.transform,
            reduced,
            lo,
            hi,
            face_lo,
            face_hi,
            tol,
            slack,
            systems,
            budget: DEFAULT_COUNT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn lattice(&self) -> &LatticeBasis<T> {
        &self.lattice
    }

    /// Range of `w_k` over the slab with `w_{k+1..}` fixed; `fixed[i]` holds
    /// the contribution of those coordinates to row `i`.
    fn range(&self, k: usize, fixed: &[T]) -> Result<Option<(i64, i64)>> {
        let n = fixed.len();
        let (mn, mx) = if k == 0 {
            let mut mn: Option<T> = None;
            let mut mx: Option<T> = None;
            for i in 0..n {
                let a = &self.reduced[(i, 0)];
                let lo = self.lo[i].clone() - fixed[i].clone();
                let hi = self.hi[i].clone() - fixed[i].clone();
                if a.is_zero() {
                    if lo > self.slack[i] || hi < -self.slack[i].clone() {
                        return Ok(None);
                    }
                    continue;
                }
                let (p, q) = (lo / a.clone(), hi / a.clone());
                let (p, q) = if a.is_negative() { (q, p) } else { (p, q) };
                mn = Some(match mn {
                    Some(m) => m.max_of(p),
                    None => p,
                });
                mx = Some(match mx {
                    Some(m) => m.min_of(q),
                    None => q,
                });
            }
            match (mn, mx) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::DegenerateLattice),
            }
        } else {
            let mut best: Option<(T, T)> = None;
            let mut rhs = vec![T::zero(); k + 1];
            let mut w = vec![T::zero(); k + 1];
            for sys in &self.systems[k] {
                for mask in 0u32..(1 << (k + 1)) {
                    for (a, &row) in sys.rows.iter().enumerate() {
                        let bound = if mask >> a & 1 == 1 { &self.hi[row] } else { &self.lo[row] };
                        rhs[a] = bound.clone() - fixed[row].clone();
                    }
                    for (a, wa) in w.iter_mut().enumerate() {
                        *wa = (0..=k).fold(T::zero(), |acc, c| acc + sys.inv[(a, c)].clone() * rhs[c].clone());
                    }
                    let feasible = (0..n).filter(|i| !sys.rows.contains(i)).all(|i| {
                        let val = (0..=k).fold(fixed[i].clone(), |acc, c| acc + self.reduced[(i, c)].clone() * w[c].clone());
                        val >= self.lo[i].clone() - self.slack[i].clone() && val <= self.hi[i].clone() + self.slack[i].clone()
                    });
                    if feasible {
                        let wk = w[k].clone();
                        best = Some(match best {
                            Some((a, b)) => (a.min_of(wk.clone()), b.max_of(wk)),
                            None => (wk.clone(), wk),
                        });
                    }
                }
            }
            match best {
                Some(p) => p,
                None => return Ok(None),
            }
        };
        let pad = |x: &T| T::tolerance(1e-20) * (T::one() + x.abs());
        let lo = (mn.clone() - pad(&mn)).ceil_i64()?;
        let hi = (mx.clone() + pad(&mx)).floor_i64()?;
        Ok((lo <= hi).then_some((lo, hi)))
    }

    /// Calls `visit(z, x, on_boundary)` for every lattice point `x = B·z` in the closed box.
    pub fn for_each_point(&self, mut visit: impl FnMut(&[i64], &[T], bool)) -> Result<u64> {
        let n = self.lattice.dim();
        let mut w = vec![0i64; n];
        let mut visited = 0u64;
        let mut count = 0u64;
        self.descend(n - 1, &mut w, &vec![T::zero(); n], &mut visited, &mut count, &mut visit)?;
        Ok(count)
    }

    fn descend(
        &self,
        k: usize,
        w: &mut Vec<i64>,
        fixed: &[T],
        visited: &mut u64,
        count: &mut u64,
        visit: &mut impl FnMut(&[i64], &[T], bool),
    ) -> Result<()> {
        let n = w.len();
        let Some((lo, hi)) = self.range(k, fixed)? else { return Ok(()) };
        *visited += (hi - lo + 1) as u64;
        if *visited > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget, partial: *count });
        }
        if k > 0 {
            for wk in lo..=hi {
                w[k] = wk;
                let wt = T::from_int(wk);
                let next: Vec<T> =
                    (0..n).map(|i| fixed[i].clone() + self.reduced[(i, k)].clone() * wt.clone()).collect();
                self.descend(k - 1, w, &next, visited, count, visit)?;
            }
            w[k] = 0;
            return Ok(());
        }
        // leaf row: x = fixed + w₀·b′₀, z = U·w
        let mut zbase = vec![0i128; n];
        for (j, &wj) in w.iter().enumerate().skip(1) {
            if wj != 0 {
                for (i, zi) in zbase.iter_mut().enumerate() {
                    *zi = self.transform[j][i]
                        .checked_mul(wj as i128)
                        .and_then(|p| zi.checked_add(p))
                        .ok_or(Error::Overflow("box enumeration"))?;
                }
            }
        }
        let mut z = vec![0i64; n];
        let mut x = vec![T::zero(); n];
        for w0 in lo..=hi {
            let w0t = T::from_int(w0);
            for i in 0..n {
                x[i] = fixed[i].clone() + self.reduced[(i, 0)].clone() * w0t.clone();
            }
            if !(0..n).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i]) {
                continue;
            }
            for (i, zi) in z.iter_mut().enumerate() {
                let v = self.transform[0][i]
                    .checked_mul(w0 as i128)
                    .and_then(|p| p.checked_add(zbase[i]))
                    .ok_or(Error::Overflow("box enumeration"))?;
                *zi = i64::try_from(v).map_err(|_| Error::Overflow("box enumeration"))?;
            }
            let boundary = (0..n).any(|i| {
                (x[i].clone() - self.face_lo[i].clone()).abs() <= self.tol[i]
                    || (x[i].clone() - self.face_hi[i].clone()).abs() <= self.tol[i]
            });
            *count += 1;
            visit(&z, &x, boundary);
        }
        Ok(())
    }

    pub fn count(&self) -> Result<CountResult> {
        let mut boundary_warnings = Vec::new();
        let mut boundary_total = 0u64;
        let count = self.for_each_point(|z, _, boundary| {
            if boundary {
                boundary_total += 1;
                if boundary_warnings.len() < MAX_STORED_WARNINGS {
                    boundary_warnings.push(z.to_vec());
                }
            }
        })?;
        Ok(CountResult { count, boundary_warnings, boundary_total })
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `#(Γ ∩ B)` for the closed box `B`.
pub fn count_points<T: Real>(lattice: &LatticeBasis<T>, b: &AlignedBox<T>) -> Result<CountResult> {
    BoxCounter::new(lattice, b)?.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;

    fn bf(s: &str) -> BigFloat {
        BigFloat::parse_decimal(s).unwrap()
    }

    #[test]
    fn volume_and_t_quantity() {
        let unit = AlignedBox::cube(3, 1.0);
        assert_eq!(volume(&unit), 1.0);
        assert_eq!(t_quantity(&unit), 1.0);
        let b = AlignedBox::new(vec![2.0, 3.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(volume(&b), 6.0);
        let b = AlignedBox::new(vec![bf("1"), bf("4")], vec![bf("0"), bf("0")]).unwrap();
        assert_eq!(t_quantity(&b), bf("2"));
        assert!(AlignedBox::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn closed_box_counts_on_integer_lattice() {
        let z2 = LatticeBasis::<BigFloat>::identity(2);
        let r = count_points(&z2, &AlignedBox::cube(2, bf("1"))).unwrap();
        assert_eq!(r.count, 4);
        assert_eq!(r.boundary_total, 4);
        let b = AlignedBox::new(vec![bf("2"), bf("3")], vec![bf("0"), bf("0")]).unwrap();
        let r = count_points(&z2, &b).unwrap();
        assert_eq!(r.count, 12);
        assert_eq!(r.boundary_total, 10);
        let b = AlignedBox::new(vec![bf("0.5"), bf("0.5")], vec![bf("0.25"), bf("0.25")]).unwrap();
        assert_eq!(count_points(&z2, &b).unwrap().count, 0);
    }

    #[test]
    fn normalization_of_anisotropic_box() {
        let b = AlignedBox::new(vec![bf("1"), bf("4")], vec![bf("0"), bf("0")]).unwrap();
        let nz = normalize(&LatticeBasis::identity(2), &b).unwrap();
        assert_eq!(nz.tbar, bf("2"));
        assert_eq!(nz.u, MatrixN::diagonal(&[bf("2"), bf("0.5")]));
        assert_eq!(crate::linalg::operator_norm(&nz.u), t_quantity(&b));
    }

    #[test]
    fn surface_area_of_unit_cube() {
        assert_eq!(AlignedBox::cube(3, 1.0).surface_area(), 6.0);
        assert_eq!(AlignedBox::cube(2, 1.0).surface_area(), 4.0);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let z2 = LatticeBasis::<f64>::identity(2);
        let c = BoxCounter::new(&z2, &AlignedBox::cube(2, 100.0)).unwrap().with_budget(50);
        assert!(matches!(c.count(), Err(Error::BudgetExceeded { budget: 50, .. })));
    }
}
