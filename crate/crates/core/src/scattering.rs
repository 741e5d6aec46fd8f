//! Two-particle scattering built from `T` and the hopping amplitudes.
//!
//! ```text
//! Lambda(z1, z2) = T - (m42 z1 + m24 / z2) I
//! S~(z1, z2)     = -(z2 / z1) Lambda(z1, z2) Lambda(z2, z1)^-1
//! S(z1, z2)      = P S~(z1, z2)
//! ```
//!
//! `S~` acts on `C^2 (x) C^2` (internal states of two particles). Transfer
//! matrices use an auxiliary copy of `C^2` as the last tensor factor.

use rand::Rng;

use crate::algebra::{compute_mu, hecke_discriminant, HOPPING_ZERO};
use crate::catalog::swap4;
use crate::error::{Error, Result};
use crate::hamiltonian::TMatrix;
use crate::linalg::{self, embed_ordered, identity, kron, max_abs, partial_trace_last, CMatrix, ResidualReport, C64};
use crate::sample::random_complex;

/// `Lambda(z2, z1)` is treated as singular below this reciprocal condition number.
pub const RCOND_GUARD: f64 = 1e-12;
/// Rapidity draws are rejected when some `|det Lambda|` falls below this.
pub const DET_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringContext {
    pub t: CMatrix,
    pub m24: C64,
    pub m42: C64,
}

impl From<&TMatrix> for ScatteringContext {
    fn from(t: &TMatrix) -> Self {
        Self {
            t: t.t.clone(),
            m24: t.m24,
            m42: t.m42,
        }
    }
}

impl ScatteringContext {
    pub fn new(t: CMatrix, m24: C64, m42: C64) -> Self {
        Self { t, m24, m42 }
    }

    pub fn lambda(&self, z1: C64, z2: C64) -> CMatrix {
        &self.t - identity(4) * (self.m42 * z1 + self.m24 / z2)
    }

    pub fn s_check(&self, z1: C64, z2: C64) -> Result<CMatrix> {
        if z1.norm() == 0.0 || z2.norm() == 0.0 {
            return Err(Error::ZeroRapidity);
        }
        let l12 = self.lambda(z1, z2);
        let l21 = self.lambda(z2, z1);
        let rcond = linalg::rcond(&l21);
        if rcond.is_nan() || rcond < RCOND_GUARD {
            return Err(Error::SingularLambda {
                det: linalg::determinant(&l21),
                rcond,
            });
        }
        // Lambda(z1, z2) and Lambda(z2, z1) commute, so the order of the
        // inverse does not matter.
        let q = l21.lu().solve(&l12).ok_or(Error::SingularLambda {
            det: C64::new(0.0, 0.0),
            rcond,
        })?;
        Ok(q * (-z2 / z1))
    }

    pub fn s_matrix(&self, z1: C64, z2: C64) -> Result<CMatrix> {
        Ok(swap4() * self.s_check(z1, z2)?)
    }

    /// Context whose `S~(z1, z2)` is the transpose of this one's
    /// `S~(1/z2, 1/z1)`.
    pub fn dualize(&self) -> Self {
        Self {
            t: self.t.transpose(),
            m24: self.m42,
            m42: self.m24,
        }
    }

    /// Whether `S~(z1, z2)` is well defined for every ordered pair of `zs`.
    pub fn well_defined(&self, zs: &[C64]) -> bool {
        zs.iter().enumerate().all(|(i, &a)| {
            a.norm() > 0.0
                && zs.iter().enumerate().all(|(j, &b)| {
                    i == j || {
                        let l = self.lambda(b, a);
                        linalg::determinant(&l).norm() >= DET_GUARD && linalg::rcond(&l) >= RCOND_GUARD
                    }
                })
        })
    }

    /// Draw `n` rapidities away from the singular set of `Lambda`; returns
    /// the draw and the number of rejected attempts.
    pub fn draw_rapidities<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> (Vec<C64>, usize) {
        let mut rejected = 0;
        loop {
            let zs: Vec<C64> = (0..n).map(|_| random_complex(rng)).collect();
            if self.well_defined(&zs) {
                return (zs, rejected);
            }
            rejected += 1;
        }
    }
}

/// `S(z, z) = -P`.
pub fn check_regularity(ctx: &ScatteringContext, z: C64, tol: f64) -> Result<ResidualReport> {
    let s = ctx.s_matrix(z, z)?;
    Ok(ResidualReport::compare(&s, &(-swap4()), tol))
}

/// `S~(z1, z2) S~(z2, z1) = I`.
pub fn check_unitarity(ctx: &ScatteringContext, z1: C64, z2: C64, tol: f64) -> Result<ResidualReport> {
    let prod = ctx.s_check(z1, z2)? * ctx.s_check(z2, z1)?;
    Ok(ResidualReport::compare(&prod, &identity(4), tol))
}

/// Braided Yang-Baxter equation on `C^2 (x) C^2 (x) C^2`:
/// `S~12(z1,z2) S~23(z1,z3) S~12(z2,z3) = S~23(z2,z3) S~12(z1,z3) S~23(z1,z2)`.
pub fn check_ybe(ctx: &ScatteringContext, z1: C64, z2: C64, z3: C64, tol: f64) -> Result<ResidualReport> {
    let i2 = identity(2);
    let s12 = |a, b| ctx.s_check(a, b).map(|s| kron(&s, &i2));
    let s23 = |a, b| ctx.s_check(a, b).map(|s| kron(&i2, &s));
    let lhs = s12(z1, z2)? * s23(z1, z3)? * s12(z2, z3)?;
    let rhs = s23(z2, z3)? * s12(z1, z3)? * s23(z1, z2)?;
    Ok(ResidualReport::compare(&lhs, &rhs, tol))
}

/// `t(z; zs) = tr_0 S_10(z_1, z) ... S_M0(z_M, z)`, a `2^M x 2^M` matrix.
///
/// `S_{k,j}` puts the first tensor slot of `S` on factor `j` and the second
/// on `k`. With this placement the braided YBE checked by [`check_ybe`] is
/// the standard YBE of the `S_{k,j}`, so transfer matrices commute.
pub fn transfer_matrix(ctx: &ScatteringContext, z: C64, zs: &[C64]) -> Result<CMatrix> {
    let m = zs.len();
    if m == 0 {
        return Err(Error::Geometry("transfer matrix needs at least one particle".into()));
    }
    let n = m + 1;
    let mut prod = identity(1 << n);
    for (j, &zj) in zs.iter().enumerate() {
        let s = ctx.s_matrix(zj, z)?;
        prod *= embed_ordered(&s, m, j, n, 2);
    }
    Ok(partial_trace_last(&prod, 2))
}

/// Ordered product `S_{j+1,j} ... S_{M,j} S_{1,j} ... S_{j-1,j}` with
/// `S_{k,j} = S(z_k, z_j)` placed as in [`transfer_matrix`]; `j` is 1-based.
/// On an amplitude `A` the Bethe equations read `z_j^L A = product * A`.
pub fn bethe_product(ctx: &ScatteringContext, j: usize, zs: &[C64]) -> Result<CMatrix> {
    let m = zs.len();
    if j == 0 || j > m {
        return Err(Error::Geometry(format!("particle {j} of {m}")));
    }
    let order = (j + 1..=m).chain(1..j);
    let mut prod = identity(1 << m);
    for k in order {
        let s = ctx.s_matrix(zs[k - 1], zs[j - 1])?;
        prod *= embed_ordered(&s, j - 1, k - 1, m, 2);
    }
    Ok(prod)
}

/// `[t(x; zs), t(y; zs)] = 0`.
pub fn check_transfer_commutation(
    ctx: &ScatteringContext,
    x: C64,
    y: C64,
    zs: &[C64],
    tol: f64,
) -> Result<ResidualReport> {
    let a = transfer_matrix(ctx, x, zs)?;
    let b = transfer_matrix(ctx, y, zs)?;
    let diff = max_abs(&linalg::commutator(&a, &b));
    Ok(ResidualReport::new(diff, max_abs(&a) * max_abs(&b), tol))
}

/// `-t(z_j; zs)` against [`bethe_product`] for every `j`; the worst residual.
pub fn check_bethe_form(ctx: &ScatteringContext, zs: &[C64], tol: f64) -> Result<ResidualReport> {
    let mut worst: Option<ResidualReport> = None;
    for j in 1..=zs.len() {
        let t = -transfer_matrix(ctx, zs[j - 1], zs)?;
        let p = bethe_product(ctx, j, zs)?;
        let r = ResidualReport::compare(&t, &p, tol);
        if worst.is_none_or(|w| r.rel > w.rel) {
            worst = Some(r);
        }
    }
    worst.ok_or_else(|| Error::Geometry("no particles".into()))
}

/// Sign convention for the square root in the change of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaBranch {
    #[default]
    Principal,
    Negated,
}

/// The change of variables `x -> z` under which `S~` depends only on the
/// ratio of its arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baxterisation {
    pub mu: C64,
    pub delta: C64,
    pub m42: C64,
}

impl Baxterisation {
    /// Requires both hoppings nonzero and `T^2 = mu T`.
    pub fn new(ctx: &ScatteringContext, branch: DeltaBranch) -> Result<Self> {
        if ctx.m24.norm() <= HOPPING_ZERO || ctx.m42.norm() <= HOPPING_ZERO {
            return Err(Error::WrongCase { expected: "Hecke" });
        }
        let mu = compute_mu(&ctx.t)?;
        let mut delta = hecke_discriminant(mu, ctx.m24 * ctx.m42);
        if delta == C64::new(0.0, 0.0) {
            return Err(Error::DegenerateChangeOfVariable(format!(
                "delta = sqrt(mu^2 - 4 m24 m42) vanishes (mu = {})",
                crate::linalg::show(mu)
            )));
        }
        if branch == DeltaBranch::Negated {
            delta = -delta;
        }
        Ok(Self {
            mu,
            delta,
            m42: ctx.m42,
        })
    }

    /// `z(x) = [mu (1 - x) + delta (1 + x)] / [2 m42 (1 - x)]`.
    pub fn z(&self, x: C64) -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        if (one - x).norm() <= 1e-13 {
            return Err(Error::DegenerateChangeOfVariable(format!(
                "x = {} is 1",
                crate::linalg::show(x)
            )));
        }
        Ok((self.mu * (one - x) + self.delta * (one + x)) / (self.m42 * 2.0 * (one - x)))
    }
}

// Index of the largest entry; entries within a relative 1e-9 of the maximum
// tie and the first in row-major order wins.
fn normalizing_index(a: &CMatrix) -> (usize, usize) {
    let max = max_abs(a);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if a[(i, j)].norm() >= max * (1.0 - 1e-9) {
                return (i, j);
            }
        }
    }
    (0, 0)
}

/// Compare `S~(z(x1), z(x2))` with `S~(z(c x1), z(c x2))`, each divided by
/// its entry at the position of the largest entry of the first.
pub fn check_ratio_dependence(
    ctx: &ScatteringContext,
    x1: C64,
    x2: C64,
    scale: C64,
    branch: DeltaBranch,
    tol: f64,
) -> Result<ResidualReport> {
    if scale.norm() == 0.0 {
        return Err(Error::DegenerateChangeOfVariable("scale c is zero".into()));
    }
    let bax = Baxterisation::new(ctx, branch)?;
    let a = ctx.s_check(bax.z(x1)?, bax.z(x2)?)?;
    let b = ctx.s_check(bax.z(scale * x1)?, bax.z(scale * x2)?)?;
    let idx = normalizing_index(&a);
    if b[idx].norm() == 0.0 {
        return Ok(ResidualReport::new(f64::INFINITY, 1.0, tol));
    }
    let an = &a / a[idx];
    let bn = &b / b[idx];
    Ok(ResidualReport::compare(&an, &bn, tol))
}

/// The dual context's `S~(z1, z2)` against `S~(1/z2, 1/z1)^t` of the original.
pub fn check_duality(ctx: &ScatteringContext, z1: C64, z2: C64, tol: f64) -> Result<ResidualReport> {
    let dual = ctx.dualize().s_check(z1, z2)?;
    let one = C64::new(1.0, 0.0);
    let orig = ctx.s_check(one / z2, one / z1)?.transpose();
    Ok(ResidualReport::compare(&dual, &orig, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{random_instance, Family};
    use crate::linalg::{c, ONE, ZERO};
    use crate::sample::{random_matrix, seeded_rng};

    fn h12_ctx(seed: u64) -> ScatteringContext {
        let mut rng = seeded_rng(seed);
        ScatteringContext::from(&random_instance(Family::H12, &mut rng).t)
    }

    #[test]
    fn scalar_lambda_for_zero_t() {
        let ctx = ScatteringContext::new(CMatrix::zeros(4, 4), c(0.7, 0.1), c(-0.3, 0.5));
        let (z1, z2) = (c(1.2, 0.3), c(-0.4, 0.9));
        let s = ctx.s_check(z1, z2).unwrap();
        let k = -(z2 / z1) * (ctx.m42 * z1 + ctx.m24 / z2) / (ctx.m42 * z2 + ctx.m24 / z1);
        assert!(ResidualReport::compare(&s, &(identity(4) * k), 1e-14).passed);
    }

    #[test]
    fn regular_and_unitary() {
        let ctx = h12_ctx(1);
        let mut rng = seeded_rng(2);
        let (zs, _) = ctx.draw_rapidities(&mut rng, 2);
        let s = ctx.s_check(zs[0], zs[0]).unwrap();
        assert!(max_abs(&(s + identity(4))) <= 1e-13);
        assert!(check_regularity(&ctx, zs[0], 1e-13).unwrap().passed);
        assert!(check_unitarity(&ctx, zs[0], zs[1], 1e-11).unwrap().passed);
    }

    #[test]
    fn zero_rapidity_is_rejected() {
        let ctx = h12_ctx(1);
        assert!(matches!(ctx.s_check(ZERO, ONE), Err(Error::ZeroRapidity)));
    }

    #[test]
    fn singular_lambda_is_rejected() {
        // T = 0 with m24 = m42 = 1: Lambda(z2, z1) = -(z2 + 1/z1) vanishes at z2 = -1/z1
        let ctx = ScatteringContext::new(CMatrix::zeros(4, 4), ONE, ONE);
        let z1 = c(2.0, 0.0);
        assert!(matches!(ctx.s_check(z1, -ONE / z1), Err(Error::SingularLambda { .. })));
    }

    #[test]
    fn ybe_holds_for_catalog_and_fails_for_random() {
        let ctx = h12_ctx(3);
        let mut rng = seeded_rng(4);
        let (zs, _) = ctx.draw_rapidities(&mut rng, 3);
        assert!(check_ybe(&ctx, zs[0], zs[1], zs[2], 1e-9).unwrap().passed);
        let z = zs[0];
        assert!(check_ybe(&ctx, z, z, z, 1e-13).unwrap().passed);

        let bad = ScatteringContext::new(random_matrix(&mut rng, 4, 4), ONE, ONE);
        let (zs, _) = bad.draw_rapidities(&mut rng, 3);
        assert!(check_ybe(&bad, zs[0], zs[1], zs[2], 1e-3).unwrap().rel > 1e-3);
    }

    #[test]
    fn single_particle_transfer_matrix() {
        let ctx = h12_ctx(5);
        let z = c(0.8, 0.4);
        let t = transfer_matrix(&ctx, z, &[z]).unwrap();
        assert!(ResidualReport::compare(&t, &(-identity(2)), 1e-13).passed);
    }

    #[test]
    fn transfer_matrices_commute() {
        let ctx = h12_ctx(6);
        let mut rng = seeded_rng(7);
        let (zs, _) = ctx.draw_rapidities(&mut rng, 5);
        let r = check_transfer_commutation(&ctx, zs[3], zs[4], &zs[..3], 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn transfer_matrices_commute_for_every_family() {
        let mut rng = seeded_rng(21);
        for f in Family::ALL {
            let ctx = ScatteringContext::from(&random_instance(f, &mut rng).t);
            let (zs, _) = ctx.draw_rapidities(&mut rng, 5);
            let r = check_transfer_commutation(&ctx, zs[3], zs[4], &zs[..3], 1e-9).unwrap();
            assert!(r.passed, "{f}: {}", r.rel);
        }
    }

    #[test]
    fn zero_mu_tilde_has_no_change_of_variable() {
        let mut rng = seeded_rng(22);
        for f in [Family::H13, Family::H14, Family::H03] {
            let inst = random_instance(f, &mut rng);
            let n = crate::algebra::hecke_normalize(&inst.t).unwrap();
            assert_eq!(n.mu_tilde, ZERO, "{f}");
            let ctx = ScatteringContext::from(&inst.t);
            assert!(matches!(
                Baxterisation::new(&ctx, DeltaBranch::Principal),
                Err(Error::DegenerateChangeOfVariable(_))
            ));
        }
    }

    #[test]
    fn bethe_form_matches_transfer_matrix() {
        let ctx = h12_ctx(8);
        let mut rng = seeded_rng(9);
        let (zs, _) = ctx.draw_rapidities(&mut rng, 2);
        assert!(check_bethe_form(&ctx, &zs, 1e-10).unwrap().passed);
        // j = 1 of two particles is S_21(z2, z1)
        let direct = embed_ordered(&ctx.s_matrix(zs[1], zs[0]).unwrap(), 0, 1, 2, 2);
        let p = bethe_product(&ctx, 1, &zs).unwrap();
        assert!(ResidualReport::compare(&p, &direct, 1e-14).passed);
    }

    #[test]
    fn ratio_dependence() {
        let ctx = h12_ctx(10);
        let (x1, x2) = (c(0.3, 0.2), c(-0.5, 0.7));
        let r = check_ratio_dependence(&ctx, x1, x2, ONE, DeltaBranch::Principal, 1e-9).unwrap();
        assert_eq!(r.max_abs, 0.0);
        for branch in [DeltaBranch::Principal, DeltaBranch::Negated] {
            let r = check_ratio_dependence(&ctx, x1, x2, c(1.3, -0.6), branch, 1e-9).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let mut rng = seeded_rng(11);
        let sn = ScatteringContext::from(&random_instance(Family::S4, &mut rng).t);
        assert!(matches!(
            check_ratio_dependence(&sn, x1, x2, ONE, DeltaBranch::Principal, 1e-9),
            Err(Error::WrongCase { .. })
        ));
        assert!(matches!(
            check_ratio_dependence(&ctx, ONE, x2, ONE, DeltaBranch::Principal, 1e-9),
            Err(Error::DegenerateChangeOfVariable(_))
        ));
    }

    #[test]
    fn dualize_is_pointwise_and_involutive() {
        let mut rng = seeded_rng(12);
        let ctx = ScatteringContext::from(&random_instance(Family::S6, &mut rng).t);
        let (zs, _) = ctx.draw_rapidities(&mut rng, 2);
        assert!(check_duality(&ctx, zs[0], zs[1], 1e-11).unwrap().passed);
        let twice = ctx.dualize().dualize();
        let a = twice.s_check(zs[0], zs[1]).unwrap();
        let b = ctx.s_check(zs[0], zs[1]).unwrap();
        assert!(ResidualReport::compare(&a, &b, 1e-11).passed);
    }
}
