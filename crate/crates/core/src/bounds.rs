//! Evaluation of the inhomogeneous and homogeneous counting-error bounds.
//!
//! The implied constants are not explicit, so reports expose every
//! intermediate quantity and the raw right-hand side; callers fit constants.

use serde::{Serialize, Serializer};

use crate::boxcount::{count_points, t_quantity, volume, AlignedBox};
use crate::error::{Error, Result};
use crate::linalg::{dual_basis, LatticeBasis};
use crate::nu::{hermite_threshold, nu, star, s_sum};
use crate::reduction::successive_minima;
use crate::scalar::Real;

pub(crate) fn as_decimal<T: Real, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_decimal_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct BoundReport<T> {
    pub count: u64,
    #[serde(serialize_with = "as_decimal")]
    pub volume: T,
    #[serde(serialize_with = "as_decimal")]
    pub abs_error: T,
    #[serde(rename = "T", serialize_with = "as_decimal")]
    pub t: T,
    #[serde(rename = "T_star", serialize_with = "as_decimal")]
    pub t_star: T,
    #[serde(serialize_with = "as_decimal")]
    pub rho: T,
    #[serde(rename = "rho_T", serialize_with = "as_decimal")]
    pub rho_t: T,
    #[serde(rename = "nu_rhoT", serialize_with = "as_decimal")]
    pub nu_rho_t: T,
    #[serde(rename = "R", serialize_with = "as_decimal")]
    pub r: T,
    #[serde(rename = "two_R_T", serialize_with = "as_decimal")]
    pub two_r_t: T,
    #[serde(rename = "nu_Tstar", serialize_with = "as_decimal")]
    pub nu_tstar: T,
    #[serde(rename = "nu_2RT", serialize_with = "as_decimal")]
    pub nu_2rt: T,
    #[serde(serialize_with = "as_decimal")]
    pub term_volume: T,
    #[serde(serialize_with = "as_decimal")]
    pub term_remainder: T,
    #[serde(serialize_with = "as_decimal")]
    pub rhs_total: T,
    pub boundary_points: u64,
}

impl<T: Real> BoundReport<T> {
    /// `(term_volume + term_remainder) / nu_Tstar` from the stored fields.
    pub fn reassemble(&self) -> T {
        (self.term_volume.clone() + self.term_remainder.clone()) / self.nu_tstar.clone()
    }
}

fn require_unimodular<T: Real>(lattice: &LatticeBasis<T>) -> Result<()> {
    if lattice.is_unimodular() {
        Ok(())
    } else {
        Err(Error::NotUnimodular { det: lattice.det().to_decimal_string() })
    }
}

fn nonzero_nu<T: Real>(dual: &LatticeBasis<T>, radius: &T) -> Result<T> {
    let v = nu(dual, radius)?.value;
    if v.is_zero() {
        return Err(Error::NotWeaklyAdmissible { radius: radius.to_decimal_string() });
    }
    Ok(v)
}

/// `ρ = max(vol(B)^{2−2/n}, 1.01·γₙ^{1/2})`, the admissible-case choice.
pub fn default_rho<T: Real>(b: &AlignedBox<T>) -> Result<T> {
    let n = b.dim();
    let vol = volume(b);
    let floor = hermite_threshold::<T>(n)? * T::ratio(101, 100);
    Ok(vol.powi(2 * n as i32 - 2).nth_root(n as u32).max_of(floor))
}

/// Right-hand side `(vol(B)^{1−1/n}/√ρ + R^{n−1}/ν(Γ⊥,2^R T)) / ν(Γ⊥,T⋆)`
/// with `R = n² + ln(ρⁿ/ν(Γ⊥,ρT))`, together with `|#(Γ∩B) − vol(B)|`.
pub fn skriganov_bound_inhomogeneous<T: Real>(lattice: &LatticeBasis<T>, b: &AlignedBox<T>, rho: &T) -> Result<BoundReport<T>> {
    require_unimodular(lattice)?;
    let n = lattice.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
    }
    let threshold = hermite_threshold::<T>(n)?;
    if *rho <= threshold {
        return Err(Error::BelowHermiteThreshold { rho: rho.to_decimal_string(), threshold: threshold.to_decimal_string() });
    }
    let dual = dual_basis(lattice)?;
    let t = t_quantity(b);
    let t_star = star(&t, n)?;
    let rho_t = rho.clone() * t.clone();

    let ((nu_tstar, chain), counted) = rayon::join(
        || {
            rayon::join(
                || nonzero_nu(&dual, &t_star),
                || -> Result<(T, T, T, T)> {
                    let nu_rho_t = nonzero_nu(&dual, &rho_t)?;
                    let nn = T::from_int((n * n) as i64);
                    let r = nn + (rho.powi(n as i32) / nu_rho_t.clone()).ln();
                    let two_r_t = r.exp2() * t.clone();
                    if star(&two_r_t, n)? != two_r_t {
                        return Err(Error::CheckFailed("(2^R T)⋆ differs from 2^R T".into()));
                    }
                    let nu_2rt = nonzero_nu(&dual, &two_r_t)?;
                    Ok((nu_rho_t, r, two_r_t, nu_2rt))
                },
            )
        },
        || count_points(lattice, b),
    );
    let nu_tstar = nu_tstar?;
    let (nu_rho_t, r, two_r_t, nu_2rt) = chain?;
    let counted = counted?;

    let vol = volume(b);
    let term_volume = vol.clone() / vol.nth_root(n as u32) / rho.sqrt();
    let term_remainder = r.powi(n as i32 - 1) / nu_2rt.clone();
    let rhs_total = (term_volume.clone() + term_remainder.clone()) / nu_tstar.clone();
    let abs_error = (T::from_int(counted.count as i64) - vol.clone()).abs();
    Ok(BoundReport {
        count: counted.count,
        volume: vol,
        abs_error,
        t,
        t_star,
        rho: rho.clone(),
        rho_t,
        nu_rho_t,
        r,
        two_r_t,
        nu_tstar,
        nu_2rt,
        term_volume,
        term_remainder,
        rhs_total,
        boundary_points: counted.boundary_total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct HomogeneousReport<T> {
    pub count: u64,
    #[serde(serialize_with = "as_decimal")]
    pub volume: T,
    #[serde(serialize_with = "as_decimal")]
    pub abs_error: T,
    #[serde(serialize_with = "as_decimal")]
    pub t: T,
    #[serde(serialize_with = "as_decimal")]
    pub rho: T,
    #[serde(serialize_with = "as_decimal")]
    pub surface_area: T,
    #[serde(serialize_with = "as_decimal")]
    pub lambda_n: T,
    #[serde(rename = "nu_rho", serialize_with = "as_decimal")]
    pub nu_rho: T,
    #[serde(serialize_with = "as_decimal")]
    pub r: T,
    #[serde(serialize_with = "as_decimal")]
    pub s_sum: T,
    pub s_members: usize,
    #[serde(serialize_with = "as_decimal")]
    pub term_surface: T,
    #[serde(serialize_with = "as_decimal")]
    pub rhs_total: T,
    pub boundary_points: u64,
}

/// Right-hand side `(|∂B|λₙ(Γ))ⁿ·(t^{n−1}ρ^{−1/2} + S(Γ⊥,r))` with
/// `r = n² + ln(ρⁿ/ν(Γ⊥,ρ))`, together with `|#(Γ∩tB) − tⁿ|`.
pub fn skriganov_bound_homogeneous<T: Real>(
    lattice: &LatticeBasis<T>,
    unit: &AlignedBox<T>,
    t: &T,
    rho: &T,
) -> Result<HomogeneousReport<T>> {
    require_unimodular(lattice)?;
    let n = lattice.dim();
    if unit.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: unit.dim() });
    }
    if (volume(unit) - T::one()).abs() > T::tolerance(1e-30) {
        return Err(Error::AssumptionViolated(format!("box must have volume 1, got {}", volume(unit))));
    }
    if *t <= T::zero() {
        return Err(Error::InvalidArgument("dilation t must be positive".into()));
    }
    let surface_area = unit.surface_area();
    if surface_area < T::one() {
        return Err(Error::CheckFailed("surface area below 1".into()));
    }
    let dual = dual_basis(lattice)?;
    let lambda_n = successive_minima(lattice)?.lambdas.pop().expect("n >= 1");
    let nu_rho = nonzero_nu(&dual, rho)?;
    let r = T::from_int((n * n) as i64) + (rho.powi(n as i32) / nu_rho.clone()).ln();
    let s = s_sum(&dual, &r)?;
    let term_surface = t.powi(n as i32 - 1) / rho.sqrt();
    let rhs_total = (surface_area.clone() * lambda_n.clone()).powi(n as i32) * (term_surface.clone() + s.value.clone());
    let region = unit.dilate(t);
    let counted = count_points(lattice, &region)?;
    let vol = volume(&region);
    let abs_error = (T::from_int(counted.count as i64) - vol.clone()).abs();
    Ok(HomogeneousReport {
        count: counted.count,
        volume: vol,
        abs_error,
        t: t.clone(),
        rho: rho.clone(),
        surface_area,
        lambda_n,
        nu_rho,
        r,
        s_sum: s.value,
        s_members: s.members,
        term_surface,
        rhs_total,
        boundary_points: counted.boundary_total,
    })
}
