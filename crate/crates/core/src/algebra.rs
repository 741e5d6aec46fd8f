//! Cubic relations on `T` and the Hecke normalization.
//!
//! All relations live on `C^2 (x) C^2 (x) C^2` with `T12 = T (x) I2` and
//! `T23 = I2 (x) T`. Residuals are the largest absolute entry of
//! `lhs - rhs`, divided by `max(1, |T|^3)` where `|T|` is the largest entry
//! modulus.

use crate::error::{Error, Result};
use crate::hamiltonian::TMatrix;
use crate::linalg::{identity, kron, max_abs, CMatrix, ResidualReport, C64};

/// Default tolerance for relation residuals.
pub const RELATION_TOL: f64 = 1e-10;
/// Hopping amplitudes at or below this modulus count as zero.
pub const HOPPING_ZERO: f64 = 1e-14;

pub fn t12(t: &CMatrix) -> CMatrix {
    kron(t, &identity(2))
}

pub fn t23(t: &CMatrix) -> CMatrix {
    kron(&identity(2), t)
}

fn relation_report(t: &CMatrix, lhs: &CMatrix, rhs: &CMatrix, tol: f64) -> ResidualReport {
    let scale = max_abs(t).powi(3).max(1.0);
    ResidualReport::new(max_abs(&(lhs - rhs)), scale, tol)
}

/// Names of the three relations checked by [`check_hecke_system`].
pub const HECKE_RELATIONS: [&str; 3] = [
    "T12 T23 T12 - m T12 = T23 T12 T23 - m T23",
    "T12^2 T23 = T12 T23^2",
    "T23^2 T12 = T23 T12^2",
];

/// Residuals of the three cubic relations that `T` must satisfy when both
/// hoppings are nonzero (`m = m24 * m42`).
pub fn check_hecke_system(t: &TMatrix) -> Result<[ResidualReport; 3]> {
    check_hecke_system_with(t, RELATION_TOL)
}

pub fn check_hecke_system_with(t: &TMatrix, tol: f64) -> Result<[ResidualReport; 3]> {
    let m = t.hopping_product();
    if t.m24.norm() <= HOPPING_ZERO || t.m42.norm() <= HOPPING_ZERO {
        return Err(Error::ZeroHopping { m24: t.m24, m42: t.m42 });
    }
    let a = t12(&t.t);
    let b = t23(&t.t);
    let ab = &a * &b;
    let ba = &b * &a;
    let aa = &a * &a;
    let bb = &b * &b;
    Ok([
        relation_report(&t.t, &(&ab * &a - &a * m), &(&ba * &b - &b * m), tol),
        relation_report(&t.t, &(&aa * &b), &(&a * &bb), tol),
        relation_report(&t.t, &(&bb * &a), &(&b * &aa), tol),
    ])
}

/// `T12 T23 T12 + T12 T23^2 = T23 T12 T23 + T12^2 T23`.
pub fn check_tn(t: &CMatrix, tol: f64) -> ResidualReport {
    let a = t12(t);
    let b = t23(t);
    let lhs = &a * &b * &a + &a * &b * &b;
    let rhs = &b * &a * &b + &a * &a * &b;
    relation_report(t, &lhs, &rhs, tol)
}

/// `T12 T23 T12 + T23^2 T12 = T23 T12 T23 + T23 T12^2`.
pub fn check_sn(t: &CMatrix, tol: f64) -> ResidualReport {
    let a = t12(t);
    let b = t23(t);
    let lhs = &a * &b * &a + &b * &b * &a;
    let rhs = &b * &a * &b + &b * &a * &a;
    relation_report(t, &lhs, &rhs, tol)
}

/// Braid relation `X12 X23 X12 = X23 X12 X23`.
pub fn check_braid(x: &CMatrix, tol: f64) -> ResidualReport {
    let a = t12(x);
    let b = t23(x);
    relation_report(x, &(&a * &b * &a), &(&b * &a * &b), tol)
}

fn proportional_residual(t: &CMatrix, t2: &CMatrix, mu: C64) -> f64 {
    let diff = max_abs(&(t2 - t * mu));
    let scale = max_abs(t2).max(mu.norm() * max_abs(t));
    if scale < 1e-300 {
        diff
    } else {
        diff / scale
    }
}

/// The scalar `mu` with `T^2 = mu T`.
pub fn compute_mu(t: &CMatrix) -> Result<C64> {
    compute_mu_with(t, RELATION_TOL)
}

pub fn compute_mu_with(t: &CMatrix, tol: f64) -> Result<C64> {
    let tmax = max_abs(t);
    if tmax == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let t2 = t * t;
    let mut candidates = Vec::with_capacity(2);
    let tr = t.trace();
    if tr.norm() > 1e-12 * tmax {
        candidates.push(t2.trace() / tr);
    }
    // fit from the largest entry (first in row-major order on ties)
    let mut best = (0, 0);
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            if t[(i, j)].norm() > t[best].norm() {
                best = (i, j);
            }
        }
    }
    candidates.push(t2[best] / t[best]);
    let mut closest = f64::INFINITY;
    for mu in candidates {
        let r = proportional_residual(t, &t2, mu);
        if r <= tol {
            return Ok(mu);
        }
        closest = closest.min(r);
    }
    Err(Error::NotProportional { residual: closest })
}

/// `T = tau * T~ + rho * I` with `T~^2 = mu~ T~ + I`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeNormalization {
    pub mu: C64,
    /// Root of `rho^2 - mu rho + m24 m42 = 0`.
    pub rho: C64,
    /// Principal square root of `m24 m42`.
    pub tau: C64,
    /// `rho / tau`, a root of `x^2 + mu~ x - 1 = 0`.
    pub x: C64,
    /// `(mu - 2 rho) / tau`.
    pub mu_tilde: C64,
    pub t_tilde: CMatrix,
}

impl HeckeNormalization {
    /// Residual of `T~^2 - mu~ T~ - I`.
    pub fn quadratic_residual(&self) -> ResidualReport {
        let tt = &self.t_tilde;
        let lhs = tt * tt - tt * self.mu_tilde;
        ResidualReport::compare(&lhs, &identity(tt.nrows()), RELATION_TOL)
    }
}

/// `mu^2 - 4 m` below this fraction of `max(|mu|^2, 4|m|)` is a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

/// `sqrt(mu^2 - 4 m)`, exactly zero at a double root. Rounding in `mu` alone
/// puts `mu^2 - 4 m` near 1e-16, and its square root near 1e-8, so the
/// unsnapped value cannot tell a double root from a small `mu~`.
pub fn hecke_discriminant(mu: C64, m: C64) -> C64 {
    let d2 = mu * mu - m * 4.0;
    if d2.norm() <= DOUBLE_ROOT_TOL * mu.norm_sqr().max(4.0 * m.norm()) {
        C64::new(0.0, 0.0)
    } else {
        d2.sqrt()
    }
}

fn rank_roots(a: C64, b: C64) -> [C64; 2] {
    let key = |z: C64| (z.norm(), z.re);
    if key(b) > key(a) {
        [b, a]
    } else {
        [a, b]
    }
}

/// Both normalizations, canonical one first (the `rho` root of larger
/// modulus, ties broken by larger real part).
pub fn hecke_normalizations(t: &TMatrix) -> Result<[HeckeNormalization; 2]> {
    let m = t.hopping_product();
    if t.m24.norm() <= HOPPING_ZERO || t.m42.norm() <= HOPPING_ZERO {
        return Err(Error::ZeroHopping { m24: t.m24, m42: t.m42 });
    }
    let mu = compute_mu(&t.t)?;
    let disc = hecke_discriminant(mu, m);
    let big = if (mu + disc).norm() >= (mu - disc).norm() {
        (mu + disc) / 2.0
    } else {
        (mu - disc) / 2.0
    };
    // the product of the roots is m, which avoids cancellation in the small one
    let small = if disc == C64::new(0.0, 0.0) { big } else { m / big };
    let tau = m.sqrt();
    let id = identity(4);
    let build = |rho: C64| HeckeNormalization {
        mu,
        rho,
        tau,
        x: rho / tau,
        mu_tilde: (mu - rho * 2.0) / tau,
        t_tilde: (&t.t - &id * rho) / tau,
    };
    let [first, second] = rank_roots(big, small);
    Ok([build(first), build(second)])
}

pub fn hecke_normalize(t: &TMatrix) -> Result<HeckeNormalization> {
    let [canonical, _] = hecke_normalizations(t)?;
    Ok(canonical)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraCase {
    Hecke,
    Tn,
    Sn,
    Unclassified,
}

impl AlgebraCase {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraCase::Hecke => "Hecke",
            AlgebraCase::Tn => "Tn",
            AlgebraCase::Sn => "Sn",
            AlgebraCase::Unclassified => "Unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraClassification {
    pub case: AlgebraCase,
    pub residuals: Vec<(&'static str, ResidualReport)>,
    pub normalization: Option<HeckeNormalization>,
}

pub fn classify(t: &TMatrix) -> Result<AlgebraClassification> {
    classify_with(t, RELATION_TOL)
}

pub fn classify_with(t: &TMatrix, tol: f64) -> Result<AlgebraClassification> {
    let z24 = t.m24.norm() <= HOPPING_ZERO;
    let z42 = t.m42.norm() <= HOPPING_ZERO;
    match (z24, z42) {
        (true, true) => Err(Error::BothHoppingsZero),
        (false, false) => {
            let rels = check_hecke_system_with(t, tol)?;
            let mut residuals: Vec<_> = HECKE_RELATIONS.iter().copied().zip(rels).collect();
            let mut case = AlgebraCase::Unclassified;
            let mut normalization = None;
            if rels.iter().all(|r| r.passed) {
                match compute_mu_with(&t.t, tol) {
                    Ok(mu) => {
                        let t2 = &t.t * &t.t;
                        residuals.push(("T^2 = mu T", ResidualReport::compare(&t2, &(&t.t * mu), tol)));
                        normalization = Some(hecke_normalize(t)?);
                        case = AlgebraCase::Hecke;
                    }
                    Err(Error::NotProportional { residual }) => {
                        residuals.push(("T^2 = mu T", ResidualReport::new(residual, 1.0, tol)));
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(AlgebraClassification {
                case,
                residuals,
                normalization,
            })
        }
        (true, false) => {
            let r = check_tn(&t.t, tol);
            Ok(AlgebraClassification {
                case: if r.passed {
                    AlgebraCase::Tn
                } else {
                    AlgebraCase::Unclassified
                },
                residuals: vec![("Tn relation", r)],
                normalization: None,
            })
        }
        (false, true) => {
            let r = check_sn(&t.t, tol);
            Ok(AlgebraClassification {
                case: if r.passed {
                    AlgebraCase::Sn
                } else {
                    AlgebraCase::Unclassified
                },
                residuals: vec![("Sn relation", r)],
                normalization: None,
            })
        }
    }
}
