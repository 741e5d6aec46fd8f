//! Known solution families for `T` and their gauge moves.
//!
//! Hecke families are stored as the normalized matrix `T~` and turned into
//! `T = tau T~ + rho I` through the branch data in [`Branch`]; `S_n` families
//! are stored verbatim and their `T_n` duals are the full transposes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::algebra::{AlgebraCase, HOPPING_ZERO};
use crate::error::{Error, Result};
use crate::hamiltonian::TMatrix;
use crate::linalg::{c, identity, inverse, kron, CMatrix, C64, ONE, ZERO};
use crate::sample::random_complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    H11,
    H12,
    H13,
    H21H22,
    H14,
    H03,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    T1t,
    T2t,
    T3t,
    T4t,
    T5t,
    T6t,
    T7t,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Any complex value (family-specific exclusions apply).
    Complex,
    /// `+1` or `-1`.
    Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
}

const fn cx(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Complex,
    }
}

const fn sign(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Sign,
    }
}

const P_H11: &[ParamSpec] = &[cx("theta"), sign("epsilon")];
const P_AB: &[ParamSpec] = &[cx("a"), cx("b")];
const P_H13: &[ParamSpec] = &[cx("a"), cx("b"), sign("epsilon")];
const P_H21: &[ParamSpec] = &[cx("a"), cx("b"), sign("epsilon")];
const P_H14: &[ParamSpec] = &[cx("a"), sign("epsilon")];
const P_NONE: &[ParamSpec] = &[];
const P_ABCD: &[ParamSpec] = &[cx("a"), cx("b"), cx("c"), cx("d")];
const P_ABC: &[ParamSpec] = &[cx("a"), cx("b"), cx("c")];

impl Family {
    pub const ALL: [Family; 20] = [
        Family::H11,
        Family::H12,
        Family::H13,
        Family::H21H22,
        Family::H14,
        Family::H03,
        Family::S1,
        Family::S2,
        Family::S3,
        Family::S4,
        Family::S5,
        Family::S6,
        Family::S7,
        Family::T1t,
        Family::T2t,
        Family::T3t,
        Family::T4t,
        Family::T5t,
        Family::T6t,
        Family::T7t,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::H11 => "T_H11",
            Family::H12 => "T_H12",
            Family::H13 => "T_H13",
            Family::H21H22 => "T_H21_H22",
            Family::H14 => "T_H14",
            Family::H03 => "T_H03",
            Family::S1 => "T_1",
            Family::S2 => "T_2",
            Family::S3 => "T_3",
            Family::S4 => "T_4",
            Family::S5 => "T_5",
            Family::S6 => "T_6",
            Family::S7 => "T_7",
            Family::T1t => "T_1t",
            Family::T2t => "T_2t",
            Family::T3t => "T_3t",
            Family::T4t => "T_4t",
            Family::T5t => "T_5t",
            Family::T6t => "T_6t",
            Family::T7t => "T_7t",
        }
    }

    pub fn case(self) -> AlgebraCase {
        use Family::*;
        match self {
            H11 | H12 | H13 | H21H22 | H14 | H03 => AlgebraCase::Hecke,
            S1 | S2 | S3 | S4 | S5 | S6 | S7 => AlgebraCase::Sn,
            _ => AlgebraCase::Tn,
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        use Family::*;
        match self {
            H11 => P_H11,
            H12 => P_AB,
            H13 => P_H13,
            H21H22 => P_H21,
            H14 => P_H14,
            H03 => P_NONE,
            S1 | S2 | T1t | T2t => P_ABCD,
            S3 | S4 | S5 | T3t | T4t | T5t => P_ABC,
            S6 | S7 | T6t | T7t => P_AB,
        }
    }

    /// The `S_n` family a `T_n` dual is the transpose of.
    pub fn sn_source(self) -> Option<Family> {
        use Family::*;
        Some(match self {
            T1t => S1,
            T2t => S2,
            T3t => S3,
            T4t => S4,
            T5t => S5,
            T6t => S6,
            T7t => S7,
            _ => return None,
        })
    }

    /// Draw valid parameters: complex values with modulus in `[0.5, 2]` and
    /// uniform argument, signs uniform.
    pub fn random_params<R: Rng + ?Sized>(self, rng: &mut R) -> Params {
        let mut p = Params::new();
        for spec in self.params() {
            let v = match spec.kind {
                ParamKind::Complex => random_complex(rng),
                ParamKind::Sign => {
                    if rng.gen_bool(0.5) {
                        ONE
                    } else {
                        -ONE
                    }
                }
            };
            p.insert(spec.name.to_string(), v);
        }
        p
    }

    /// Hopping amplitudes compatible with the family's case.
    pub fn random_hoppings<R: Rng + ?Sized>(self, rng: &mut R) -> (C64, C64) {
        let a = random_complex(rng);
        let b = random_complex(rng);
        match self.case() {
            AlgebraCase::Hecke => (a, b),
            AlgebraCase::Sn => (a, ZERO),
            _ => (ZERO, b),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidParameters {
                family: s.to_string(),
                reason: "unknown family".into(),
            })
    }
}

pub type Params = BTreeMap<String, C64>;

/// Which Hecke normalization an instantiation uses.
///
/// `x_root` picks a root of `x^2 + mu~ x - 1 = 0` (0: `(-mu~ + s)/2`, 1:
/// `(-mu~ - s)/2` with `s` the principal root of `mu~^2 + 4`); `tau_sign`
/// multiplies the principal square root of `m24 m42`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub x_root: u8,
    pub tau_sign: i8,
}

impl Default for Branch {
    fn default() -> Self {
        Self { x_root: 0, tau_sign: 1 }
    }
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch { x_root: 0, tau_sign: 1 },
        Branch { x_root: 1, tau_sign: 1 },
        Branch {
            x_root: 0,
            tau_sign: -1,
        },
        Branch {
            x_root: 1,
            tau_sign: -1,
        },
    ];
}

impl FromStr for Branch {
    type Err = Error;

    /// `"<x_root><sign>"`, e.g. `0+` or `1-`; a bare root index means `+`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameters {
            family: "branch".into(),
            reason: format!("expected 0+, 0-, 1+ or 1-, got {s:?}"),
        };
        let mut chars = s.trim().chars();
        let x_root = match chars.next() {
            Some('0') => 0,
            Some('1') => 1,
            _ => return Err(bad()),
        };
        let tau_sign = match chars.next() {
            None | Some('+') => 1,
            Some('-') => -1,
            _ => return Err(bad()),
        };
        if chars.next().is_some() {
            return Err(bad());
        }
        Ok(Self { x_root, tau_sign })
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.x_root, if self.tau_sign < 0 { '-' } else { '+' })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub family: Family,
    pub params: Params,
    pub branch: Branch,
}

impl CatalogEntry {
    pub fn new(family: Family, params: Params) -> Self {
        Self {
            family,
            params,
            branch: Branch::default(),
        }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }
}

/// One `(x, mu, rho, tau)` solution of the Hecke dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XMu {
    pub x: C64,
    pub mu: C64,
    pub rho: C64,
    pub tau: C64,
}

/// All four `(x, mu, rho, tau)` quadruples for the given `mu~`, in the
/// order of [`Branch::ALL`]. They satisfy `tau^2 = m24 m42`, `rho = x tau`,
/// `x^2 + mu~ x - 1 = 0` and `mu = tau (mu~ + 2x)`, hence
/// `rho^2 - mu rho + m24 m42 = 0`.
pub fn solve_x_mu(mu_tilde: C64, m24: C64, m42: C64) -> Result<[XMu; 4]> {
    if m24.norm() <= HOPPING_ZERO || m42.norm() <= HOPPING_ZERO {
        return Err(Error::ZeroHopping { m24, m42 });
    }
    let s = (mu_tilde * mu_tilde + 4.0).sqrt();
    if s.norm() < 1e-13 {
        return Err(Error::DegenerateX(format!(
            "mu~ = {}: the two x roots coincide and mu vanishes",
            crate::linalg::show(mu_tilde)
        )));
    }
    let xs = [(-mu_tilde + s) / 2.0, (-mu_tilde - s) / 2.0];
    let tau0 = (m24 * m42).sqrt();
    Ok(Branch::ALL.map(|b| {
        let x = xs[b.x_root as usize];
        let tau = tau0 * b.tau_sign as f64;
        XMu {
            x,
            mu: tau * (mu_tilde + x * 2.0),
            rho: x * tau,
            tau,
        }
    }))
}

pub fn branch_solution(mu_tilde: C64, m24: C64, m42: C64, branch: Branch) -> Result<XMu> {
    let all = solve_x_mu(mu_tilde, m24, m42)?;
    let idx = Branch::ALL
        .iter()
        .position(|b| *b == branch)
        .ok_or_else(|| Error::InvalidParameters {
            family: "branch".into(),
            reason: format!("no branch {branch}"),
        })?;
    Ok(all[idx])
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeckeData {
    pub mu_tilde: C64,
    pub t_tilde: CMatrix,
    pub solution: XMu,
}

/// A catalog matrix together with how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Instantiation {
    pub entry: CatalogEntry,
    pub t: TMatrix,
    pub hecke: Option<HeckeData>,
}

fn invalid(family: Family, reason: impl Into<String>) -> Error {
    Error::InvalidParameters {
        family: family.id().to_string(),
        reason: reason.into(),
    }
}

fn get(family: Family, params: &Params, name: &str) -> Result<C64> {
    let v = *params
        .get(name)
        .ok_or_else(|| invalid(family, format!("missing parameter {name}")))?;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(invalid(family, format!("{name} is not finite")));
    }
    Ok(v)
}

fn get_sign(family: Family, params: &Params, name: &str) -> Result<f64> {
    let v = get(family, params, name)?;
    if v == ONE {
        Ok(1.0)
    } else if v == -ONE {
        Ok(-1.0)
    } else {
        Err(invalid(family, format!("{name} must be +1 or -1, got {v}")))
    }
}

fn nonzero(family: Family, name: &str, v: C64) -> Result<C64> {
    if v.norm() < 1e-300 {
        Err(invalid(family, format!("{name} must be nonzero")))
    } else {
        Ok(v)
    }
}

fn check_known(family: Family, params: &Params) -> Result<()> {
    for k in params.keys() {
        if !family.params().iter().any(|p| p.name == k) {
            return Err(invalid(family, format!("unknown parameter {k}")));
        }
    }
    Ok(())
}

fn rows(r: [[C64; 4]; 4]) -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| r[i][j])
}

/// `T~` and `mu~` for a Hecke family.
pub fn hecke_form(family: Family, params: &Params) -> Result<(CMatrix, C64)> {
    check_known(family, params)?;
    let z = ZERO;
    Ok(match family {
        Family::H11 => {
            let th = get(family, params, "theta")?;
            let e = c(get_sign(family, params, "epsilon")?, 0.0);
            let (s, ch) = (th.sinh(), th.cosh());
            (
                rows([[s + e, z, z, s], [z, s, ch, z], [z, ch, s, z], [s, z, z, s - e]]),
                s * 2.0,
            )
        }
        Family::H12 => {
            let a = nonzero(family, "a", get(family, params, "a")?)?;
            let b = get(family, params, "b")?;
            let ai = a.inv();
            (
                rows([[a, z, z, b], [z, z, ai, z], [z, a, a - ai, z], [z, z, z, -ai]]),
                a - ai,
            )
        }
        Family::H13 => {
            let a = get(family, params, "a")?;
            let b = get(family, params, "b")?;
            let e = get_sign(family, params, "epsilon")?;
            let o = ONE;
            let m = rows([[o, b, -b, a * b], [z, z, o, -a], [z, o, z, a], [z, z, z, o]]);
            (m * c(e, 0.0), ZERO)
        }
        Family::H21H22 => {
            let a = nonzero(family, "a", get(family, params, "a")?)?;
            let b = nonzero(family, "b", get(family, params, "b")?)?;
            let e = get_sign(family, params, "epsilon")?;
            let ai = a.inv();
            let corner = if e > 0.0 { a } else { -ai };
            (
                rows([[a, z, z, z], [z, z, b.inv(), z], [z, b, a - ai, z], [z, z, z, corner]]),
                a - ai,
            )
        }
        Family::H14 => {
            let a = nonzero(family, "a", get(family, params, "a")?)?;
            let e = c(get_sign(family, params, "epsilon")?, 0.0);
            (
                // braided: the anti-diagonal form times P on the left
                rows([[z, z, z, a], [z, e, z, z], [z, z, e, z], [a.inv(), z, z, z]]),
                ZERO,
            )
        }
        Family::H03 => (identity(4), ZERO),
        _ => return Err(invalid(family, "not a Hecke family")),
    })
}

/// `mu~` computed through the `(p, q, k)` parameters of the Hecke table,
/// independently of [`hecke_form`].
pub fn table_mu_tilde(family: Family, params: &Params) -> Result<Option<C64>> {
    check_known(family, params)?;
    Ok(Some(match family {
        Family::H11 => {
            let th = get(family, params, "theta")?;
            let e = get_sign(family, params, "epsilon")?;
            let p = (th.exp() / 2.0).sqrt();
            let q = c(e, 0.0) / (p * 2.0);
            (p * p - q * q) * 2.0
        }
        Family::H12 => {
            let p = nonzero(family, "a", get(family, params, "a")?)?;
            let q = p.inv();
            p - q
        }
        Family::H21H22 => {
            let a = nonzero(family, "a", get(family, params, "a")?)?;
            let b = nonzero(family, "b", get(family, params, "b")?)?;
            let k = a.sqrt();
            let p = b / k;
            let q = (k * k * p).inv();
            k * k - p * q
        }
        Family::H13 | Family::H14 | Family::H03 => ZERO,
        _ => return Ok(None),
    }))
}

/// Verbatim `S_n` matrix.
pub fn sn_form(family: Family, params: &Params) -> Result<CMatrix> {
    check_known(family, params)?;
    let g = |n: &str| get(family, params, n);
    let z = ZERO;
    Ok(match family {
        Family::S1 => {
            let (a, b, cc, d) = (g("a")?, g("b")?, g("c")?, g("d")?);
            rows([[z, z, z, z], [b, cc, z, z], [d, z, z, z], [z, a, z, z]])
        }
        Family::S2 => {
            let (a, b, cc, d) = (g("a")?, g("b")?, g("c")?, g("d")?);
            rows([[z, b, cc, d], [z, z, z, a], [z, z, z, b + cc - a], [z, z, z, z]])
        }
        Family::S3 => {
            let (a, b) = (g("a")?, g("b")?);
            let cc = nonzero(family, "c", g("c")?)?;
            rows([[z, z, z, z], [b, a * b / cc, z, z], [cc, z, a, z], [z, z, z, z]])
        }
        Family::S4 => {
            let (a, b, cc) = (g("a")?, g("b")?, g("c")?);
            rows([[z, z, z, z], [z, b, z, z], [z, cc, z, z], [z, z, z, a]])
        }
        Family::S5 => {
            let (a, b, cc) = (g("a")?, g("b")?, g("c")?);
            rows([[a, z, z, z], [z, b, z, z], [z, z, cc, z], [z, z, z, z]])
        }
        Family::S6 => {
            let (a, b) = (g("a")?, g("b")?);
            rows([[z, z, z, z], [b, z, z, a], [z, z, z, z], [z, -b, b, z]])
        }
        Family::S7 => {
            let (a, b) = (g("a")?, g("b")?);
            rows([[-a, z, z, z], [b, z, a, z], [z, z, -a, z], [z, z, z, z]])
        }
        f => match f.sn_source() {
            Some(src) => sn_form(src, params)?.transpose(),
            None => return Err(invalid(f, "not an S_n or T_n family")),
        },
    })
}

/// Build `T` for a catalog entry with the given hoppings.
pub fn instantiate(entry: &CatalogEntry, m24: C64, m42: C64) -> Result<Instantiation> {
    let family = entry.family;
    let z24 = m24.norm() <= HOPPING_ZERO;
    let z42 = m42.norm() <= HOPPING_ZERO;
    match family.case() {
        AlgebraCase::Hecke => {
            if z24 || z42 {
                return Err(invalid(family, "Hecke families need m24 * m42 != 0"));
            }
            let (t_tilde, mu_tilde) = hecke_form(family, &entry.params)?;
            let sol = branch_solution(mu_tilde, m24, m42, entry.branch)?;
            let t = &t_tilde * sol.tau + identity(4) * sol.rho;
            if t.iter().all(|v| v.norm() <= 1e-14 * sol.tau.norm()) {
                return Err(Error::DegenerateX(format!(
                    "{family} with x = {} gives T = 0",
                    crate::linalg::show(sol.x)
                )));
            }
            Ok(Instantiation {
                entry: entry.clone(),
                t: TMatrix::new(t, m24, m42)?,
                hecke: Some(HeckeData {
                    mu_tilde,
                    t_tilde,
                    solution: sol,
                }),
            })
        }
        case => {
            let ok = match case {
                AlgebraCase::Sn => !z24 && z42,
                _ => z24 && !z42,
            };
            if !ok {
                return Err(invalid(
                    family,
                    match case {
                        AlgebraCase::Sn => "S_n families need m42 = 0 and m24 != 0",
                        _ => "T_n families need m24 = 0 and m42 != 0",
                    },
                ));
            }
            Ok(Instantiation {
                entry: entry.clone(),
                t: TMatrix::new(sn_form(family, &entry.params)?, m24, m42)?,
                hecke: None,
            })
        }
    }
}

/// Random valid instantiation of a family.
pub fn random_instance<R: Rng + ?Sized>(family: Family, rng: &mut R) -> Instantiation {
    loop {
        let params = family.random_params(rng);
        let (m24, m42) = family.random_hoppings(rng);
        if let Ok(inst) = instantiate(&CatalogEntry::new(family, params), m24, m42) {
            return inst;
        }
    }
}

/// 4x4 swap of the two tensor factors.
pub fn swap4() -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| if i == (j % 2) * 2 + j / 2 { ONE } else { ZERO })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeckeGauge {
    /// `lambda (g (x) g) X (g (x) g)^-1`.
    Conjugate,
    /// Transpose in both factors.
    Transpose,
    /// `P X P`.
    Permute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TnSnGauge {
    /// `lambda (g (x) g) X (g (x) g)^-1`.
    Conjugate,
    /// `P X^t P`.
    Dual,
}

fn conjugate(x: &CMatrix, g: &CMatrix, lambda: C64) -> Result<CMatrix> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::Shape {
            expected_rows: 2,
            expected_cols: 2,
            rows: g.nrows(),
            cols: g.ncols(),
        });
    }
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let scale = crate::linalg::max_abs(g).powi(2);
    if det.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::SingularG { det });
    }
    let gg = kron(g, g);
    let inv = inverse(&gg).map_err(|_| Error::SingularG { det })?;
    Ok(&gg * x * inv * lambda)
}

pub fn gauge_hecke(x: &CMatrix, g: &CMatrix, lambda: C64, which: HeckeGauge) -> Result<CMatrix> {
    match which {
        HeckeGauge::Conjugate => conjugate(x, g, lambda),
        HeckeGauge::Transpose => Ok(x.transpose()),
        HeckeGauge::Permute => {
            let p = swap4();
            Ok(&p * x * &p)
        }
    }
}

pub fn gauge_tn_sn(x: &CMatrix, g: &CMatrix, lambda: C64, which: TnSnGauge) -> Result<CMatrix> {
    match which {
        TnSnGauge::Conjugate => conjugate(x, g, lambda),
        TnSnGauge::Dual => {
            let p = swap4();
            Ok(&p * x.transpose() * &p)
        }
    }
}

/// Full 4x4 transpose, mapping `S_n` solutions to `T_n` solutions.
pub fn dual_to_tn(t: &CMatrix) -> CMatrix {
    t.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_sn, check_tn, compute_mu};
    use crate::linalg::max_abs;
    use crate::sample::{random_invertible, seeded_rng};

    fn params(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), c(*v, 0.0))).collect()
    }

    fn real_rows(r: [[f64; 4]; 4]) -> CMatrix {
        CMatrix::from_fn(4, 4, |i, j| c(r[i][j], 0.0))
    }

    #[test]
    fn twenty_families() {
        let count = |case| Family::ALL.iter().filter(|f| f.case() == case).count();
        assert_eq!(count(AlgebraCase::Hecke), 6);
        assert_eq!(count(AlgebraCase::Sn), 7);
        assert_eq!(count(AlgebraCase::Tn), 7);
        for f in Family::ALL {
            assert_eq!(f.id().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn h03_is_scalar() {
        let inst = instantiate(&CatalogEntry::new(Family::H03, Params::new()), ONE, ONE).unwrap();
        let sol = inst.hecke.unwrap().solution;
        assert_eq!(inst.t.t, identity(4) * (sol.tau + sol.rho));
    }

    #[test]
    fn h03_collapsing_branch_is_rejected() {
        let entry = CatalogEntry::new(Family::H03, Params::new()).with_branch(Branch { x_root: 1, tau_sign: 1 });
        assert!(matches!(instantiate(&entry, ONE, ONE), Err(Error::DegenerateX(_))));
    }

    #[test]
    fn s1_verbatim() {
        let p = params(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let inst = instantiate(&CatalogEntry::new(Family::S1, p), ONE, ZERO).unwrap();
        let expect = real_rows([
            [0.0; 4],
            [2.0, 3.0, 0.0, 0.0],
            [4.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(inst.t.t, expect);
    }

    #[test]
    fn s2_corner_entry() {
        let p = params(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let t = sn_form(Family::S2, &p).unwrap();
        assert_eq!(t[(2, 3)], c(4.0, 0.0));
        // strictly upper triangular, and its dual strictly lower triangular
        let d = dual_to_tn(&t);
        for i in 0..4 {
            for j in 0..=i {
                assert_eq!(t[(i, j)], ZERO);
                assert_eq!(d[(j, i)], ZERO);
            }
        }
    }

    #[test]
    fn h11_at_zero_rapidity() {
        let p = params(&[("theta", 0.0), ("epsilon", 1.0)]);
        let (tt, mt) = hecke_form(Family::H11, &p).unwrap();
        let expect = real_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ]);
        assert_eq!(tt, expect);
        assert_eq!(mt, ZERO);
    }

    #[test]
    fn s3_requires_nonzero_c() {
        let p = params(&[("a", 1.0), ("b", 2.0), ("c", 0.0)]);
        let e = instantiate(&CatalogEntry::new(Family::S3, p), ONE, ZERO);
        assert!(matches!(e, Err(Error::InvalidParameters { .. })));
    }

    #[test]
    fn case_guards_on_hoppings() {
        let p = params(&[("a", 1.0), ("b", 2.0)]);
        assert!(instantiate(&CatalogEntry::new(Family::H12, p.clone()), ONE, ZERO).is_err());
        assert!(instantiate(&CatalogEntry::new(Family::S6, p.clone()), ONE, ONE).is_err());
        assert!(instantiate(&CatalogEntry::new(Family::T6t, p), ZERO, ONE).is_ok());
    }

    #[test]
    fn unknown_and_bad_params_are_rejected() {
        let p = params(&[("a", 1.0), ("z", 2.0)]);
        assert!(hecke_form(Family::H12, &p).is_err());
        let p = params(&[("a", 1.0), ("epsilon", 0.5)]);
        assert!(hecke_form(Family::H14, &p).is_err());
    }

    #[test]
    fn solve_x_mu_at_zero_mu_tilde() {
        // x = +-1, mu = 2 tau x, rho = tau x
        let all = solve_x_mu(ZERO, ONE, ONE).unwrap();
        for s in all {
            assert!((s.x * s.x - ONE).norm() < 1e-15);
            assert!((s.rho * s.rho - s.mu * s.rho + ONE).norm() < 1e-11);
            assert!((s.tau * s.tau - ONE).norm() < 1e-11);
        }
    }

    #[test]
    fn solve_x_mu_golden_ratio() {
        let all = solve_x_mu(ONE, ONE, ONE).unwrap();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        assert!((all[0].x - c(phi, 0.0)).norm() < 1e-15);
        assert!((all[1].x - c(-phi - 1.0, 0.0)).norm() < 1e-15);
        for s in all {
            assert!(((s.mu - s.rho * 2.0) / s.tau - ONE).norm() < 1e-10);
        }
    }

    #[test]
    fn solve_x_mu_degenerate_and_zero_hopping() {
        assert!(matches!(solve_x_mu(c(0.0, 2.0), ONE, ONE), Err(Error::DegenerateX(_))));
        assert!(matches!(solve_x_mu(ONE, ZERO, ONE), Err(Error::ZeroHopping { .. })));
    }

    #[test]
    fn hecke_mu_matches_dictionary_mu() {
        let mut rng = seeded_rng(5);
        for f in Family::ALL.iter().filter(|f| f.case() == AlgebraCase::Hecke) {
            for _ in 0..5 {
                let inst = random_instance(*f, &mut rng);
                let mu = compute_mu(&inst.t.t).unwrap();
                let sol = inst.hecke.as_ref().unwrap().solution;
                assert!((mu - sol.mu).norm() <= 1e-9 * sol.mu.norm().max(1.0), "{f}");
                let dict = table_mu_tilde(*f, &inst.entry.params).unwrap().unwrap();
                assert!((dict - inst.hecke.unwrap().mu_tilde).norm() < 1e-9, "{f}");
            }
        }
    }

    #[test]
    fn hecke_families_satisfy_the_hecke_system() {
        use crate::algebra::check_hecke_system;
        let mut rng = seeded_rng(14);
        for f in Family::ALL.into_iter().filter(|f| f.case() == AlgebraCase::Hecke) {
            for _ in 0..10 {
                let inst = random_instance(f, &mut rng);
                for r in check_hecke_system(&inst.t).unwrap() {
                    assert!(r.passed, "{f}: {}", r.rel);
                }
            }
        }
    }

    #[test]
    fn sn_and_tn_families_satisfy_their_relation() {
        let mut rng = seeded_rng(6);
        for f in Family::ALL.iter().filter(|f| f.case() != AlgebraCase::Hecke) {
            for _ in 0..5 {
                let inst = random_instance(*f, &mut rng);
                let r = match f.case() {
                    AlgebraCase::Sn => check_sn(&inst.t.t, 1e-10),
                    _ => check_tn(&inst.t.t, 1e-10),
                };
                assert!(r.passed, "{f}: {r:?}");
            }
        }
    }

    #[test]
    fn gauge_identities() {
        let mut rng = seeded_rng(7);
        let t = crate::sample::random_matrix(&mut rng, 4, 4);
        let i2 = identity(2);
        assert_eq!(gauge_hecke(&t, &i2, ONE, HeckeGauge::Conjugate).unwrap(), t);
        let once = gauge_hecke(&t, &i2, ONE, HeckeGauge::Permute).unwrap();
        assert_eq!(gauge_hecke(&once, &i2, ONE, HeckeGauge::Permute).unwrap(), t);
        let once = gauge_tn_sn(&t, &i2, ONE, TnSnGauge::Dual).unwrap();
        assert_eq!(gauge_tn_sn(&once, &i2, ONE, TnSnGauge::Dual).unwrap(), t);
        assert!(matches!(
            gauge_hecke(&t, &CMatrix::zeros(2, 2), ONE, HeckeGauge::Conjugate),
            Err(Error::SingularG { .. })
        ));
    }

    #[test]
    fn sn_relation_survives_conjugation() {
        let mut rng = seeded_rng(8);
        let inst = random_instance(Family::S5, &mut rng);
        let g = random_invertible(&mut rng, 2);
        let lambda = random_complex(&mut rng);
        let moved = gauge_tn_sn(&inst.t.t, &g, lambda, TnSnGauge::Conjugate).unwrap();
        assert!(check_sn(&moved, 1e-10).passed);
        assert!(max_abs(&(&moved - &inst.t.t)) > 1e-3);
    }
}
