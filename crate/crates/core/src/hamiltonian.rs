//! Local Hamiltonians on `C^3 (x) C^3` with the 33-entry vertex pattern.
//!
//! Basis order is `|11>, |12>, |13>, |21>, |22>, |23>, |31>, |32>, |33>`
//! (site-1 label major) and entries are addressed 1-based as `m_ij`, so
//! `m24` is the matrix element `<12|h|21>`.
//! State `1` is the empty site, `2` and `3` are the two internal states of a
//! particle.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64, ONE, ZERO};
use crate::sample::random_complex;

/// Rows/columns (1-based) of the two 4x4 blocks of the pattern.
pub const HOP_BLOCK: [usize; 4] = [2, 3, 4, 7];
pub const PAIR_BLOCK: [usize; 4] = [5, 6, 8, 9];

/// Off-pattern entries smaller than this are flushed to zero with a note.
pub const PATTERN_FLUSH: f64 = 1e-14;
/// Default absolute tolerance for the solvability constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// True when the 1-based position `(i, j)` belongs to the 33-entry pattern.
pub fn on_pattern(i: usize, j: usize) -> bool {
    (i == 1 && j == 1)
        || (HOP_BLOCK.contains(&i) && HOP_BLOCK.contains(&j))
        || (PAIR_BLOCK.contains(&i) && PAIR_BLOCK.contains(&j))
}

/// Single-site charge `q = diag(0, 1, 1)`.
pub fn site_charge() -> CMatrix {
    CMatrix::from_diagonal(&linalg::CVector::from_column_slice(&[ZERO, ONE, ONE]))
}

/// A 9x9 local Hamiltonian known to respect the 33-entry pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian33 {
    m: CMatrix,
    flushed: Vec<(usize, usize)>,
}

impl LocalHamiltonian33 {
    /// Entry `m_ij`, 1-based.
    #[inline]
    pub fn m(&self, i: usize, j: usize) -> C64 {
        self.m[(i - 1, j - 1)]
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Off-pattern positions that held tiny nonzero values and were flushed.
    pub fn flushed_entries(&self) -> &[(usize, usize)] {
        &self.flushed
    }

    pub fn m24(&self) -> C64 {
        self.m(2, 4)
    }

    pub fn m42(&self) -> C64 {
        self.m(4, 2)
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
            flushed: Vec::new(),
        }
    }
}

/// Accept a 9x9 matrix whose off-pattern entries vanish.
pub fn validate_pattern(raw: &CMatrix) -> Result<LocalHamiltonian33> {
    if raw.nrows() != 9 || raw.ncols() != 9 {
        return Err(Error::Shape {
            expected_rows: 9,
            expected_cols: 9,
            rows: raw.nrows(),
            cols: raw.ncols(),
        });
    }
    let mut m = raw.clone();
    let mut bad = Vec::new();
    let mut flushed = Vec::new();
    for i in 1..=9 {
        for j in 1..=9 {
            if on_pattern(i, j) {
                continue;
            }
            let v = m[(i - 1, j - 1)];
            if v == ZERO {
                continue;
            }
            if v.norm() < PATTERN_FLUSH {
                flushed.push((i, j));
                m[(i - 1, j - 1)] = ZERO;
            } else {
                bad.push((i, j));
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::PatternViolation { positions: bad });
    }
    Ok(LocalHamiltonian33 { m, flushed })
}

/// Names of the nine solvability relations, in report order.
pub const CONSTRAINT_NAMES: [&str; 9] = [
    "m23+m47",
    "m32+m74",
    "m27",
    "m34",
    "m43",
    "m72",
    "m24-m37",
    "m42-m73",
    "m22+m44-m33-m77",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// One residual per entry of [`CONSTRAINT_NAMES`], same order.
    pub residuals: Vec<(&'static str, C64)>,
    pub tolerance: f64,
    pub passed: bool,
}

impl ConstraintReport {
    pub fn violated(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .filter(|(_, r)| r.norm() > self.tolerance)
            .map(|(n, _)| *n)
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, (_, r)| m.max(r.norm()))
    }
}

pub fn check_cba_constraints(h: &LocalHamiltonian33) -> ConstraintReport {
    check_cba_constraints_with(h, CONSTRAINT_TOL)
}

pub fn check_cba_constraints_with(h: &LocalHamiltonian33, tolerance: f64) -> ConstraintReport {
    let m = |i, j| h.m(i, j);
    let values = [
        m(2, 3) + m(4, 7),
        m(3, 2) + m(7, 4),
        m(2, 7),
        m(3, 4),
        m(4, 3),
        m(7, 2),
        m(2, 4) - m(3, 7),
        m(4, 2) - m(7, 3),
        (m(2, 2) + m(4, 4)) - (m(3, 3) + m(7, 7)),
    ];
    let residuals: Vec<_> = CONSTRAINT_NAMES.iter().copied().zip(values).collect();
    let passed = residuals.iter().all(|(_, r)| r.norm() <= tolerance);
    ConstraintReport {
        residuals,
        tolerance,
        passed,
    }
}

fn require_constraints(h: &LocalHamiltonian33) -> Result<()> {
    let report = check_cba_constraints(h);
    if report.passed {
        Ok(())
    } else {
        Err(Error::ConstraintsNotSatisfied {
            violated: report.violated(),
        })
    }
}

/// The 4x4 two-particle scattering kernel, indexed by `{5, 6, 8, 9}`, with
/// the hopping amplitudes it was extracted alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct TMatrix {
    pub t: CMatrix,
    pub m24: C64,
    pub m42: C64,
}

impl TMatrix {
    pub fn new(t: CMatrix, m24: C64, m42: C64) -> Result<Self> {
        if t.nrows() != 4 || t.ncols() != 4 {
            return Err(Error::Shape {
                expected_rows: 4,
                expected_cols: 4,
                rows: t.nrows(),
                cols: t.ncols(),
            });
        }
        Ok(Self { t, m24, m42 })
    }

    /// Product `m24 * m42`.
    pub fn hopping_product(&self) -> C64 {
        self.m24 * self.m42
    }
}

/// Offsets added to `m_ij` to obtain `t_ij` on the pair block.
fn t_offsets(h: &LocalHamiltonian33) -> [[C64; 4]; 4] {
    let m = |i, j| h.m(i, j);
    let (m11, m22, m33, m44, m77) = (m(1, 1), m(2, 2), m(3, 3), m(4, 4), m(7, 7));
    let (m23, m32) = (m(2, 3), m(3, 2));
    // rows/cols in the order 5, 6, 8, 9
    [
        [m11 - m22 - m44, -m23, m23, ZERO],
        [-m32, m11 - m33 - m44, ZERO, m23],
        [m32, ZERO, m11 - m22 - m77, -m23],
        [ZERO, m32, -m32, m11 - m33 - m77],
    ]
}

pub fn extract_t(h: &LocalHamiltonian33) -> Result<TMatrix> {
    require_constraints(h)?;
    let off = t_offsets(h);
    let t = CMatrix::from_fn(4, 4, |a, b| h.m(PAIR_BLOCK[a], PAIR_BLOCK[b]) + off[a][b]);
    TMatrix::new(t, h.m24(), h.m42())
}

/// The eight parameters of `h` not fixed by `T`; `m77` follows from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParams {
    pub m11: C64,
    pub m22: C64,
    pub m33: C64,
    pub m44: C64,
    pub m23: C64,
    pub m32: C64,
    pub m24: C64,
    pub m42: C64,
}

impl FreeParams {
    pub fn zero() -> Self {
        Self {
            m11: ZERO,
            m22: ZERO,
            m33: ZERO,
            m44: ZERO,
            m23: ZERO,
            m32: ZERO,
            m24: ZERO,
            m42: ZERO,
        }
    }

    /// `m77 = m22 + m44 - m33`.
    pub fn m77(&self) -> C64 {
        self.m22 + self.m44 - self.m33
    }

    pub fn read_off(h: &LocalHamiltonian33) -> Self {
        Self {
            m11: h.m(1, 1),
            m22: h.m(2, 2),
            m33: h.m(3, 3),
            m44: h.m(4, 4),
            m23: h.m(2, 3),
            m32: h.m(3, 2),
            m24: h.m24(),
            m42: h.m42(),
        }
    }

    /// Random draw with the given hoppings; every other value has modulus
    /// in `[0.5, 2]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, m24: C64, m42: C64) -> Self {
        Self {
            m11: random_complex(rng),
            m22: random_complex(rng),
            m33: random_complex(rng),
            m44: random_complex(rng),
            m23: random_complex(rng),
            m32: random_complex(rng),
            m24,
            m42,
        }
    }
}

/// `h = h_tilde + T9 + m11 * I9`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub h_tilde: CMatrix,
    pub t9: CMatrix,
    pub m11: C64,
}

impl Decomposition {
    pub fn reconstruct(&self) -> CMatrix {
        &self.h_tilde + &self.t9 + linalg::identity(9) * self.m11
    }
}

fn h_tilde(f: &FreeParams) -> CMatrix {
    let p22 = f.m22 - f.m11;
    let p33 = f.m33 - f.m11;
    let p44 = f.m44 - f.m11;
    let p77 = f.m77() - f.m11;
    let (m23, m32, m24, m42) = (f.m23, f.m32, f.m24, f.m42);
    let mut h = CMatrix::zeros(9, 9);
    let mut set = |i: usize, j: usize, v: C64| h[(i - 1, j - 1)] = v;
    set(2, 2, p22);
    set(2, 3, m23);
    set(2, 4, m24);
    set(3, 2, m32);
    set(3, 3, p33);
    set(3, 7, m24);
    set(4, 2, m42);
    set(4, 4, p44);
    set(4, 7, -m23);
    set(7, 3, m42);
    set(7, 4, -m32);
    set(7, 7, p77);

    set(5, 5, p22 + p44);
    set(5, 6, m23);
    set(5, 8, -m23);
    set(6, 5, m32);
    set(6, 6, p33 + p44);
    set(6, 9, -m23);
    set(8, 5, -m32);
    set(8, 8, p22 + p77);
    set(8, 9, m23);
    set(9, 6, -m32);
    set(9, 8, m32);
    set(9, 9, p33 + p77);
    h
}

fn t9(t: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(9, 9);
    for a in 0..4 {
        for b in 0..4 {
            out[(PAIR_BLOCK[a] - 1, PAIR_BLOCK[b] - 1)] = t[(a, b)];
        }
    }
    out
}

pub fn decompose(h: &LocalHamiltonian33) -> Result<Decomposition> {
    let t = extract_t(h)?;
    let free = FreeParams::read_off(h);
    Ok(Decomposition {
        h_tilde: h_tilde(&free),
        t9: t9(&t.t),
        m11: free.m11,
    })
}

/// Assemble the unique constrained `h` with the given `T` and free parameters.
pub fn build_from_t(t: &CMatrix, free: &FreeParams) -> Result<LocalHamiltonian33> {
    if t.nrows() != 4 || t.ncols() != 4 {
        return Err(Error::Shape {
            expected_rows: 4,
            expected_cols: 4,
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    // Entry-wise inverse of the T offsets; equal to h_tilde + T9 + m11 * I
    // up to rounding, but keeps the free parameters bit-exact.
    let mut m = CMatrix::zeros(9, 9);
    let mut set = |i: usize, j: usize, v: C64| m[(i - 1, j - 1)] = v;
    set(1, 1, free.m11);
    set(2, 2, free.m22);
    set(3, 3, free.m33);
    set(4, 4, free.m44);
    set(7, 7, free.m77());
    set(2, 3, free.m23);
    set(4, 7, -free.m23);
    set(3, 2, free.m32);
    set(7, 4, -free.m32);
    set(2, 4, free.m24);
    set(3, 7, free.m24);
    set(4, 2, free.m42);
    set(7, 3, free.m42);
    let partial = validate_pattern(&m)?;
    let off = t_offsets(&partial);
    for a in 0..4 {
        for b in 0..4 {
            m[(PAIR_BLOCK[a] - 1, PAIR_BLOCK[b] - 1)] = t[(a, b)] - off[a][b];
        }
    }
    validate_pattern(&m)
}

/// Total charge `Q` on `len` sites.
pub fn build_charge(len: usize) -> Result<CMatrix> {
    build_charge_with_cap(len, linalg::DEFAULT_EMBED_CAP)
}

pub fn build_charge_with_cap(len: usize, cap: usize) -> Result<CMatrix> {
    if len == 0 {
        return Err(Error::Geometry("empty chain".into()));
    }
    let dim = 3usize
        .checked_pow(len as u32)
        .filter(|&d| d <= cap)
        .ok_or(Error::DimensionCap {
            dim: 3usize.saturating_pow(len as u32),
            cap,
        })?;
    // the charge is the number of non-empty sites in the basis label
    let mut q = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let mut rest = idx;
        let mut n = 0;
        for _ in 0..len {
            if rest % 3 != 0 {
                n += 1;
            }
            rest /= 3;
        }
        q[(idx, idx)] = c(n as f64, 0.0);
    }
    Ok(q)
}

/// Periodic chain Hamiltonian `sum_l h_{l, l+1}` on `len >= 2` sites.
pub fn build_chain(h: &LocalHamiltonian33, len: usize) -> Result<CMatrix> {
    build_chain_with_cap(h, len, linalg::DEFAULT_EMBED_CAP)
}

pub fn build_chain_with_cap(h: &LocalHamiltonian33, len: usize, cap: usize) -> Result<CMatrix> {
    let mut total: Option<CMatrix> = None;
    for site in 1..=len {
        let term = linalg::embed_pair_with_cap(h.matrix(), site, len, 3, cap)?;
        total = Some(match total {
            None => term,
            Some(acc) => acc + term,
        });
    }
    total.ok_or_else(|| Error::Geometry("empty chain".into()))
}

/// One configuration of an `M`-particle sector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    /// Occupied sites, 1-based and increasing.
    pub positions: Vec<usize>,
    /// Internal state of each particle, `2` or `3`.
    pub labels: Vec<u8>,
}

impl Configuration {
    fn site_states(&self, len: usize) -> Vec<u8> {
        let mut s = vec![1u8; len];
        for (&x, &n) in self.positions.iter().zip(&self.labels) {
            s[x - 1] = n;
        }
        s
    }

    fn from_site_states(s: &[u8]) -> Self {
        let mut positions = Vec::new();
        let mut labels = Vec::new();
        for (i, &v) in s.iter().enumerate() {
            if v != 1 {
                positions.push(i + 1);
                labels.push(v);
            }
        }
        Self { positions, labels }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub len: usize,
    pub particles: usize,
    pub states: Vec<Configuration>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(L, M) * 2^M`.
pub fn sector_dim(len: usize, particles: usize) -> usize {
    binomial(len, particles) << particles
}

impl SectorBasis {
    /// All configurations, sorted by positions then labels.
    pub fn new(len: usize, particles: usize) -> Self {
        let mut states = Vec::with_capacity(sector_dim(len, particles));
        let mut pos: Vec<usize> = (1..=particles).collect();
        loop {
            for mask in 0..(1u32 << particles) {
                let labels = (0..particles)
                    .map(|k| if mask >> (particles - 1 - k) & 1 == 0 { 2 } else { 3 })
                    .collect();
                states.push(Configuration {
                    positions: pos.clone(),
                    labels,
                });
            }
            // next combination in lexicographic order
            let mut k = particles;
            while k > 0 && pos[k - 1] == len - particles + k {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            pos[k - 1] += 1;
            for j in k..particles {
                pos[j] = pos[j - 1] + 1;
            }
        }
        Self { len, particles, states }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

/// Matrix of the periodic chain Hamiltonian on the `M`-particle sector,
/// built by acting with `h` on neighbouring pairs of each configuration.
pub fn sector_hamiltonian(h: &LocalHamiltonian33, len: usize, particles: usize) -> Result<(SectorBasis, CMatrix)> {
    sector_hamiltonian_with_cap(h, len, particles, linalg::DEFAULT_EIG_CAP)
}

pub fn sector_hamiltonian_with_cap(
    h: &LocalHamiltonian33,
    len: usize,
    particles: usize,
    cap: usize,
) -> Result<(SectorBasis, CMatrix)> {
    if len < 2 || particles > len {
        return Err(Error::Geometry(format!(
            "{particles} particles on a chain of {len} sites"
        )));
    }
    let dim = sector_dim(len, particles);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let basis = SectorBasis::new(len, particles);
    let index: HashMap<&Configuration, usize> = basis.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for (col, conf) in basis.states.iter().enumerate() {
        let sites = conf.site_states(len);
        for l in 0..len {
            let r = (l + 1) % len;
            let local_in = (sites[l] as usize - 1) * 3 + (sites[r] as usize - 1);
            for local_out in 0..9 {
                let v = h.matrix()[(local_out, local_in)];
                if v == ZERO {
                    continue;
                }
                let mut next = sites.clone();
                next[l] = (local_out / 3) as u8 + 1;
                next[r] = (local_out % 3) as u8 + 1;
                let target = Configuration::from_site_states(&next);
                let row = *index
                    .get(&target)
                    .ok_or_else(|| Error::Geometry("local Hamiltonian does not conserve particle number".into()))?;
                out[(row, col)] += v;
            }
        }
    }
    Ok((basis, out))
}
