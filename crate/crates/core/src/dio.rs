//! Inhomogeneous Diophantine counting: continued fractions, lower bounds for
//! `q·‖qα‖`, the counter `N_{α,y}(ε,t)` and its lattice embedding.

use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::boxcount::{count_points, AlignedBox};
use crate::error::{Error, Result};
use crate::linalg::{dual_basis, LatticeBasis};
use crate::nu::nu_profile;
use crate::scalar::{parse_rational, precision_digits, Real};

/// An irrational `α ∈ (0,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrrationalSpec {
    /// `(a + b√c)/d`
    Surd { a: i64, b: i64, c: i64, d: i64 },
    /// A decimal truncation of an irrational number.
    Decimal(String),
}

impl fmt::Display for IrrationalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrationalSpec::Surd { a, b, c, d } => write!(f, "surd:{a},{b},{c},{d}"),
            IrrationalSpec::Decimal(s) => write!(f, "dec:{s}"),
        }
    }
}

impl IrrationalSpec {
    /// `(√5 − 1)/2`
    pub fn golden() -> Self {
        IrrationalSpec::Surd { a: -1, b: 1, c: 5, d: 2 }
    }

    /// Parses `surd:a,b,c,d` or `dec:<digits>`.
    pub fn parse(s: &str) -> Result<Self> {
        let spec = if let Some(rest) = s.strip_prefix("surd:") {
            let parts: Vec<i64> = rest
                .split(',')
                .map(|p| p.trim().parse::<i64>().map_err(|e| Error::Parse(format!("surd component {p:?}: {e}"))))
                .collect::<Result<_>>()?;
            let [a, b, c, d] = parts[..] else {
                return Err(Error::Parse(format!("surd needs four integers a,b,c,d, got {rest:?}")));
            };
            IrrationalSpec::Surd { a, b, c, d }
        } else if let Some(rest) = s.strip_prefix("dec:") {
            parse_rational(rest)?;
            IrrationalSpec::Decimal(rest.trim().to_string())
        } else {
            return Err(Error::Parse(format!("alpha must be surd:a,b,c,d or dec:<digits>, got {s:?}")));
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        match self {
            IrrationalSpec::Surd { b, c, d, .. } => {
                if *d == 0 {
                    return Err(Error::InvalidArgument("surd denominator is zero".into()));
                }
                if *c < 0 {
                    return Err(Error::InvalidArgument("surd radicand is negative".into()));
                }
                if *b == 0 || is_square(*c as u128) {
                    return Err(Error::RationalInput);
                }
            }
            IrrationalSpec::Decimal(_) => {}
        }
        let v = self.value::<f64>()?;
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0,1), got {self}")));
        }
        Ok(())
    }

    pub fn value<T: Real>(&self) -> Result<T> {
        match self {
            IrrationalSpec::Surd { a, b, c, d } => Ok((T::from_int(*a) + T::from_int(*b) * T::from_int(*c).sqrt()) / T::from_int(*d)),
            IrrationalSpec::Decimal(s) => T::parse_decimal(s),
        }
    }
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn is_square(n: u128) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Partial quotients `a₁..a_k` of `α = [0; a₁, a₂, …]` and convergents `pᵢ/qᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub quotients: Vec<i64>,
    pub convergents: Vec<(i128, i128)>,
}

/// `(P + √D)/Q` with `Q | D − P²`; the complete quotients of a quadratic surd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct SurdState {
    p: i128,
    q: i128,
    d: i128,
}

impl SurdState {
    fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let over = || Error::Overflow("surd normalization");
        let s = b.signum() as i128;
        let mut p = a as i128 * s;
        let mut q = d as i128 * s;
        let mut dd = (b as i128).checked_mul(b as i128).and_then(|x| x.checked_mul(c as i128)).ok_or_else(over)?;
        if (dd - p * p).rem_euclid(q) != 0 {
            let m = q.abs();
            p = p.checked_mul(m).ok_or_else(over)?;
            dd = dd.checked_mul(m * m).ok_or_else(over)?;
            q = q.checked_mul(m).ok_or_else(over)?;
        }
        Ok(SurdState { p, q, d: dd })
    }

    fn floor(&self) -> i128 {
        let s = isqrt(self.d as u128) as i128;
        if self.q > 0 {
            (self.p + s).div_euclid(self.q)
        } else {
            -((self.p + s).div_euclid(-self.q) + 1)
        }
    }

    /// Returns `⌊x⌋` and the next complete quotient `1/(x − ⌊x⌋)`.
    fn step(&self) -> Result<(i128, SurdState)> {
        let a = self.floor();
        let p = a.checked_mul(self.q).and_then(|x| x.checked_sub(self.p)).ok_or(Error::Overflow("surd expansion"))?;
        let q = (self.d - p * p) / self.q;
        Ok((a, SurdState { p, q, d: self.d }))
    }

    fn value<T: Real>(&self) -> T {
        (T::from_i128_exact(self.p) + T::from_i128_exact(self.d).sqrt()) / T::from_i128_exact(self.q)
    }
}

fn convergents(quotients: &[i64]) -> Result<Vec<(i128, i128)>> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, 0i128, 1i128);
    let mut out = Vec::with_capacity(quotients.len());
    for &a in quotients {
        let next = |x1: i128, x0: i128| (a as i128).checked_mul(x1).and_then(|v| v.checked_add(x0));
        let p = next(p1, p0).ok_or(Error::Overflow("convergent"))?;
        let q = next(q1, q0).ok_or(Error::Overflow("convergent"))?;
        (p0, q0, p1, q1) = (p1, q1, p, q);
        out.push((p, q));
    }
    Ok(out)
}

/// Largest convergent denominator whose quotients a decimal literal of
/// `digits` significant digits still determines: the literal is within
/// `10^{-digits}` of `α`, and a convergent survives while `q² ≪ 10^{digits}`.
fn trusted(q: i128, digits: u32) -> bool {
    2.0 * (q as f64).log10() < digits as f64 - 10.0
}

fn significant_digits(literal: &str) -> u32 {
    let mantissa = literal.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').len() as u32
}

pub fn continued_fraction(alpha: &IrrationalSpec, k: usize) -> Result<ContinuedFraction> {
    match alpha {
        IrrationalSpec::Surd { a, b, c, d } => {
            let mut state = SurdState::new(*a, *b, *c, *d)?;
            let (a0, next) = state.step()?;
            if a0 != 0 {
                return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
            }
            state = next;
            let mut quotients = Vec::with_capacity(k);
            for _ in 0..k {
                let (a, next) = state.step()?;
                quotients.push(i64::try_from(a).map_err(|_| Error::Overflow("partial quotient"))?);
                state = next;
            }
            let convergents = convergents(&quotients)?;
            Ok(ContinuedFraction { quotients, convergents })
        }
        IrrationalSpec::Decimal(s) => {
            let digits = significant_digits(s).min(precision_digits());
            let mut x: BigRational = parse_rational(s)?;
            let mut quotients = Vec::with_capacity(k);
            let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, 0i128, 1i128);
            let a0 = x.floor();
            if !a0.is_zero() {
                return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
            }
            x -= a0;
            for _ in 0..k {
                if x.is_zero() {
                    return Err(Error::RationalInput);
                }
                x = x.recip();
                let a_big = x.floor();
                x -= &a_big;
                let a = a_big.to_integer().to_i64().ok_or(Error::Overflow("partial quotient"))?;
                if x.is_zero() && quotients.len() + 1 < k {
                    return Err(Error::RationalInput);
                }
                let p = (a as i128).checked_mul(p1).and_then(|v| v.checked_add(p0));
                let q = (a as i128).checked_mul(q1).and_then(|v| v.checked_add(q0));
                let (Some(p), Some(q)) = (p, q) else {
                    return Err(Error::PrecisionExhausted("convergent denominators overflow".into()));
                };
                if !trusted(q, digits) {
                    return Err(Error::PrecisionExhausted(format!(
                        "quotient {} needs more than the {digits} digits available",
                        quotients.len() + 1
                    )));
                }
                quotients.push(a);
                (p0, q0, p1, q1) = (p1, q1, p, q);
            }
            let convergents = convergents(&quotients)?;
            Ok(ContinuedFraction { quotients, convergents })
        }
    }
}

/// `‖x‖`, the distance to the nearest integer.
pub fn dist_to_integer<T: Real>(x: &T) -> T {
    (x.clone() - x.round()).abs()
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhiKind<T> {
    /// `φ ≡ c` for all `q ≥ 1`.
    Constant(T),
    /// `φ(q) = value` for `q` up to the next step; steps ascend in `q`.
    Table(Vec<(i128, T)>),
}

/// A certified non-increasing `φ` with `q·‖qα‖ ≥ φ(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiBound<T> {
    pub kind: PhiKind<T>,
    /// Largest convergent denominator scanned.
    pub max_q_checked: i128,
    /// `min q·‖qα‖` over the scanned convergents, and where it occurs.
    pub min_observed: T,
    pub argmin_q: i128,
    /// Upper end of the range where the bound is certified (`None` = all `q`).
    pub valid_up_to: Option<i128>,
}

impl<T: Real> PhiBound<T> {
    pub fn constant(c: T) -> Self {
        PhiBound { kind: PhiKind::Constant(c.clone()), max_q_checked: 0, min_observed: c, argmin_q: 0, valid_up_to: None }
    }

    pub fn eval(&self, q: &T) -> Result<T> {
        match &self.kind {
            PhiKind::Constant(c) => Ok(c.clone()),
            PhiKind::Table(steps) => {
                if let Some(limit) = self.valid_up_to {
                    if *q > T::from_i128_exact(limit) {
                        return Err(Error::AssumptionViolated(format!(
                            "tabulated phi is certified only up to q = {limit}, asked for {q}"
                        )));
                    }
                }
                let mut value = steps.first().map(|s| s.1.clone()).ok_or(Error::CheckFailed("empty phi table".into()))?;
                for (start, v) in steps {
                    if T::from_i128_exact(*start) <= *q {
                        value = v.clone();
                    }
                }
                Ok(value)
            }
        }
    }

    pub fn constant_value(&self) -> Option<&T> {
        match &self.kind {
            PhiKind::Constant(c) => Some(c),
            PhiKind::Table(_) => None,
        }
    }
}

/// Rounds `x > 0` down to two significant decimal digits.
pub fn floor_two_digits<T: Real>(x: &T) -> T {
    let mut scale = 0i32;
    let mut y = x.clone();
    let ten = T::from_int(10);
    while y < ten {
        y = y * ten.clone();
        scale += 1;
    }
    while y >= T::from_int(100) {
        y = y / ten.clone();
        scale -= 1;
    }
    y.floor() / ten.powi(scale)
}

/// Certified lower bound for `q·‖qα‖` from the convergents of `α`.
///
/// Between consecutive convergent denominators `q_k ≤ q < q_{k+1}` one has
/// `q·‖qα‖ ≥ q_k‖q_kα‖`, so scanning convergents up to `q_max` certifies the
/// running minimum for every `q ≤ q_max`. For a quadratic surd the expansion is
/// periodic and `q_k‖q_kα‖ ≥ 1/(α_{k+1} + 1/a_k)` over the finitely many
/// states of the period extends the certificate to all `q`.
pub fn phi_from_cf<T: Real>(alpha: &IrrationalSpec, q_max: i128) -> Result<PhiBound<T>> {
    if q_max < 1 {
        return Err(Error::InvalidArgument("q_max must be at least 1".into()));
    }
    let value: T = alpha.value()?;
    let q1 = dist_to_integer(&value);
    let mut scan: Vec<(i128, T)> = vec![(1, q1)];
    let mut k = 8;
    let cf = loop {
        let cf = continued_fraction(alpha, k)?;
        if cf.convergents.last().map_or(true, |c| c.1 > q_max) {
            break cf;
        }
        k *= 2;
    };
    for &(_, q) in cf.convergents.iter().filter(|c| c.1 <= q_max && c.1 > 1) {
        let qt = T::from_i128_exact(q);
        scan.push((q, qt.clone() * dist_to_integer(&(qt * value.clone()))));
    }
    let max_q_checked = scan.last().map(|s| s.0).unwrap_or(1);
    let (argmin_q, min_observed) = scan
        .iter()
        .cloned()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("q = 1 is scanned");

    match alpha {
        IrrationalSpec::Surd { a, b, c, d } => {
            let tail = periodic_tail_bound::<T>(*a, *b, *c, *d)?;
            let c = floor_two_digits(&min_observed.clone().min_of(tail));
            Ok(PhiBound { kind: PhiKind::Constant(c), max_q_checked, min_observed, argmin_q, valid_up_to: None })
        }
        IrrationalSpec::Decimal(_) => {
            let mut steps: Vec<(i128, T)> = Vec::new();
            let mut running: Option<T> = None;
            for (q, v) in scan {
                let m = match running {
                    Some(r) if r <= v => r,
                    _ => v,
                };
                running = Some(m.clone());
                let clean = floor_two_digits(&m);
                if steps.last().map_or(true, |s| s.1 != clean) {
                    steps.push((q, clean));
                }
            }
            Ok(PhiBound { kind: PhiKind::Table(steps), max_q_checked, min_observed, argmin_q, valid_up_to: Some(q_max) })
        }
    }
}

/// `min 1/(α_{k+1} + 1/a_k)` over all `k ≥ 1`, using periodicity of the expansion.
fn periodic_tail_bound<T: Real>(a: i64, b: i64, c: i64, d: i64) -> Result<T> {
    let (a0, mut state) = SurdState::new(a, b, c, d)?.step()?;
    debug_assert_eq!(a0, 0);
    let mut seen = std::collections::HashSet::new();
    let mut best: Option<T> = None;
    loop {
        let (ak, next) = state.step()?;
        if !seen.insert((state, ak)) {
            break;
        }
        let bound = T::one() / (next.value::<T>() + T::one() / T::from_i128_exact(ak));
        best = Some(match best {
            Some(b) => b.min_of(bound),
            None => bound,
        });
        state = next;
        if seen.len() > 100_000 {
            return Err(Error::CheckFailed("surd expansion did not become periodic".into()));
        }
    }
    best.ok_or(Error::CheckFailed("empty period".into()))
}

/// `N_{α,y}(ε,t) = #{(p,q) ∈ ℤ×ℕ : 0 ≤ p + qα − y ≤ ε, q ≤ t}`.
pub fn count_n<T: Real>(alpha: &T, y: &T, eps: &T, t: &T) -> Result<u64> {
    if *eps <= T::zero() || *t <= T::zero() {
        return Err(Error::InvalidArgument("count needs eps > 0 and t > 0".into()));
    }
    let q_top = t.floor_i64()?;
    const CHUNK: i64 = 4096;
    let chunks: Vec<i64> = (0..(q_top + CHUNK - 1) / CHUNK).collect();
    let partial: Vec<Result<u64>> = chunks
        .par_iter()
        .map(|&c| {
            let mut total = 0u64;
            for q in (c * CHUNK + 1)..=((c + 1) * CHUNK).min(q_top) {
                let base = y.clone() - alpha.clone() * T::from_int(q);
                let lo = base.ceil_i64()?;
                let hi = (base + eps.clone()).floor_i64()?;
                if hi >= lo {
                    total += (hi - lo + 1) as u64;
                }
            }
            Ok(total)
        })
        .collect();
    partial.into_iter().sum()
}

/// The embedding lattice `A = α^{-1/2}(1 α; 1 2α)` and box
/// `α^{-1/2}([y, y+ε] × [y, y+αt])`.
#[derive(Clone, Debug)]
pub struct Application<T> {
    pub alpha: T,
    pub lattice: LatticeBasis<T>,
    pub region: AlignedBox<T>,
}

pub fn check_assumptions<T: Real>(alpha: &T, eps: &T, t: &T) -> Result<()> {
    let et = eps.clone() * t.clone();
    if et <= T::from_int(4) {
        return Err(Error::AssumptionViolated(format!("εt > 4 fails: εt = {}", et.to_decimal_string())));
    }
    if *eps <= T::zero() || *eps >= alpha.sqrt() {
        return Err(Error::AssumptionViolated(format!(
            "0 < ε < √α fails: ε = {}, √α = {}",
            eps.to_decimal_string(),
            alpha.sqrt().to_decimal_string()
        )));
    }
    Ok(())
}

pub fn application_lattice<T: Real>(alpha: &T) -> Result<LatticeBasis<T>> {
    let s = alpha.sqrt();
    LatticeBasis::from_rows(vec![
        vec![T::one() / s.clone(), alpha.clone() / s.clone()],
        vec![T::one() / s.clone(), T::from_int(2) * alpha.clone() / s],
    ])
}

pub fn build_application<T: Real>(alpha: &T, y: &T, eps: &T, t: &T) -> Result<Application<T>> {
    check_assumptions(alpha, eps, t)?;
    let lattice = application_lattice(alpha)?;
    let s = alpha.sqrt();
    let region = AlignedBox::new(
        vec![eps.clone() / s.clone(), s.clone() * t.clone()],
        vec![y.clone() / s.clone(), y.clone() / s],
    )?;
    Ok(Application { alpha: alpha.clone(), lattice, region })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DioCountResult<T> {
    pub n: u64,
    pub volume: T,
    pub abs_error: T,
    pub e: T,
    pub e_prime: T,
    pub bound: T,
}

impl<T: Real> DioCountResult<T> {
    /// Recomputes `E`, `E′` and the bound from `ε`, `t` and `φ`.
    pub fn assemble(n: u64, eps: &T, t: &T, phi: &PhiBound<T>) -> Result<Self> {
        let volume = eps.clone() * t.clone();
        let e = volume.clone() / phi.eval(&(T::from_int(4) * t.clone() * volume.sqrt()))?;
        let e_prime = T::from_int(168) * (volume.clone() * t.clone() * t.clone()).sqrt() * e.clone();
        let phi_e = phi.eval(&e_prime)?;
        let bound = e.ln() / (phi_e.clone() * phi_e);
        let abs_error = (T::from_int(n as i64) - volume.clone()).abs();
        Ok(DioCountResult { n, volume, abs_error, e, e_prime, bound })
    }
}

/// `N`, `|N − εt|`, `E = εt/φ(4t√(εt))`, `E′ = 168√(εt³)E` and `ln E/φ(E′)²`.
pub fn corollary_bound<T: Real>(alpha: &T, y: &T, eps: &T, t: &T, phi: &PhiBound<T>) -> Result<DioCountResult<T>> {
    check_assumptions(alpha, eps, t)?;
    let n = count_n(alpha, y, eps, t)?;
    DioCountResult::assemble(n, eps, t, phi)
}

/// `#(Γ ∩ B)` for the embedding; differs from `N` only in edge rows.
pub fn application_box_count<T: Real>(alpha: &T, y: &T, eps: &T, t: &T) -> Result<u64> {
    let app = build_application(alpha, y, eps, t)?;
    Ok(count_points(&app.lattice, &app.region)?.count)
}

#[derive(Clone, Debug)]
pub struct Lemma41Row<T> {
    pub rho: T,
    pub nu_primal: T,
    pub nu_dual: T,
    pub lower_bound: T,
}

#[derive(Clone, Debug)]
pub struct Lemma41Report<T> {
    pub rows: Vec<Lemma41Row<T>>,
    /// `min (ν − φ(4ρ/√α)/4)`; negative means the bound fails somewhere.
    pub worst_margin: T,
    pub max_equality_gap: T,
}

impl<T: Real> Lemma41Report<T> {
    pub fn max_violation(&self) -> T {
        (-self.worst_margin.clone()).max_of(T::zero())
    }
}

/// Checks `ν(Γ⊥,ρ) = ν(Γ,ρ) ≥ φ(4ρ/√α)/4` on the embedding lattice.
pub fn lemma41_check<T: Real>(alpha: &T, phi: &PhiBound<T>, rho_grid: &[T]) -> Result<Lemma41Report<T>> {
    let lattice = application_lattice(alpha)?;
    let dual = dual_basis(&lattice)?;
    let primal = nu_profile(&lattice, rho_grid)?;
    let dual = nu_profile(&dual, rho_grid)?;
    let s = alpha.sqrt();
    let mut rows = Vec::with_capacity(rho_grid.len());
    let mut worst: Option<T> = None;
    let mut gap = T::zero();
    for (i, rho) in rho_grid.iter().enumerate() {
        let lower = phi.eval(&(T::from_int(4) * rho.clone() / s.clone()))? / T::from_int(4);
        let margin = primal.values[i].clone() - lower.clone();
        worst = Some(worst.map_or(margin.clone(), |w: T| w.min_of(margin)));
        gap = gap.max_of((primal.values[i].clone() - dual.values[i].clone()).abs());
        rows.push(Lemma41Row {
            rho: rho.clone(),
            nu_primal: primal.values[i].clone(),
            nu_dual: dual.values[i].clone(),
            lower_bound: lower,
        });
    }
    Ok(Lemma41Report { rows, worst_margin: worst.expect("non-empty grid"), max_equality_gap: gap })
}
