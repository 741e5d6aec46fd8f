//! Bethe-ansatz energies and their comparison with exact sector spectra.
//!
//! Plane waves with rapidities `z_j` have energy
//! `E = L m11 + sum_j eps(z_j)` with
//! `eps(z) = m22 + m44 - 2 m11 + m24 / z + m42 z`. On a ring of `L` sites
//! the rapidities are quantized by `z_j^L A = -t(z_j; z_1..z_M) A`.

use std::f64::consts::TAU;

use crate::algebra::HOPPING_ZERO;
use crate::error::{Error, Result};
use crate::hamiltonian::{check_cba_constraints, sector_hamiltonian, LocalHamiltonian33};
use crate::linalg::{self, eig_general, greedy_pairing, null_vector, CMatrix, CVector, C64};
use crate::scattering::{transfer_matrix, ScatteringContext};

/// Single-particle energy `eps(z)`.
pub fn epsilon(z: C64, h: &LocalHamiltonian33) -> Result<C64> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroRapidity);
    }
    Ok(h.m(2, 2) + h.m(4, 4) - h.m(1, 1) * 2.0 + h.m24() / z + h.m42() * z)
}

/// `L m11 + sum eps(z_j)`.
pub fn energy(h: &LocalHamiltonian33, len: usize, zs: &[C64]) -> Result<C64> {
    let mut e = h.m(1, 1) * len as f64;
    for &z in zs {
        e += epsilon(z, h)?;
    }
    Ok(e)
}

fn require_hopping(h: &LocalHamiltonian33) -> Result<()> {
    if h.m24().norm() <= HOPPING_ZERO && h.m42().norm() <= HOPPING_ZERO {
        Err(Error::BothHoppingsZero)
    } else {
        Ok(())
    }
}

/// `{L m11 + eps(w^k) : k = 0..L-1}`, each value listed twice (the two
/// internal states), `w = exp(2 pi i / L)`.
pub fn one_magnon_prediction(h: &LocalHamiltonian33, len: usize) -> Result<Vec<C64>> {
    let report = check_cba_constraints(h);
    if !report.passed {
        return Err(Error::ConstraintsNotSatisfied {
            violated: report.violated(),
        });
    }
    require_hopping(h)?;
    let mut out = Vec::with_capacity(2 * len);
    for k in 0..len {
        let z = C64::from_polar(1.0, TAU * k as f64 / len as f64);
        let e = energy(h, len, &[z])?;
        out.push(e);
        out.push(e);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheRootSet {
    pub len: usize,
    pub zs: Vec<C64>,
    /// Common eigenvector of the Bethe equations, unit norm.
    pub amplitude: CVector,
    /// Index of the eigenvalue branch the root was seeded on.
    pub branch: usize,
    /// Per-equation residuals from [`bethe_residual`].
    pub residuals: Vec<f64>,
}

impl BetheRootSet {
    pub fn particles(&self) -> usize {
        self.zs.len()
    }

    pub fn energy(&self, h: &LocalHamiltonian33) -> Result<C64> {
        energy(h, self.len, &self.zs)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// `|z_j^L A + t(z_j; zs) A| / |A|` for every `j`.
pub fn bethe_residual(ctx: &ScatteringContext, len: usize, zs: &[C64], amplitude: &CVector) -> Result<Vec<f64>> {
    let norm = amplitude.norm();
    if norm == 0.0 {
        return Err(Error::Geometry("zero amplitude".into()));
    }
    zs.iter()
        .map(|&z| {
            let t = transfer_matrix(ctx, z, zs)?;
            let r = amplitude * z.powu(len as u32) + t * amplitude;
            Ok(r.norm() / norm)
        })
        .collect()
}

/// Where Newton iterations for two particles start.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedGrid {
    /// Radial factors applied to `(w^a, w^b)`.
    pub perturbation: (f64, f64),
    /// Eigenvalue branches (0..4) tried from every starting point.
    pub branches: Vec<usize>,
    pub max_iterations: usize,
    /// Required residual of the returned root sets.
    pub tolerance: f64,
    /// Roots closer than this (as unordered pairs) are merged.
    pub dedup: f64,
}

impl Default for SeedGrid {
    fn default() -> Self {
        Self {
            perturbation: (1.05, 0.97),
            branches: vec![0, 1, 2, 3],
            max_iterations: 80,
            tolerance: 1e-8,
            dedup: 1e-7,
        }
    }
}

/// Seed that did not produce a root, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedFailure {
    pub seed: (usize, usize, usize),
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheSolveReport {
    /// Distinct root sets, in order of first discovery.
    pub roots: Vec<BetheRootSet>,
    pub failures: Vec<SeedFailure>,
    /// Converged seeds rejected as duplicates or coincident rapidities.
    pub discarded: usize,
}

// Bethe operator of the first particle, S21(z2, z1) = P S~(z2, z1).
fn bethe_b(ctx: &ScatteringContext, z1: C64, z2: C64) -> Result<CMatrix> {
    ctx.s_matrix(z2, z1)
}

struct EigenPair {
    value: C64,
    right: CVector,
    left: CVector,
}

fn eigenpairs(b: &CMatrix) -> Result<Vec<EigenPair>> {
    let n = b.nrows();
    let id = linalg::identity(n);
    eig_general(b)?
        .into_iter()
        .map(|value| {
            let right = null_vector(&(b - &id * value));
            let left = null_vector(&(b.adjoint() - &id * value.conj()));
            Ok(EigenPair { value, right, left })
        })
        .collect()
}

fn overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm() / (a.norm() * b.norm())
}

// d(beta)/dz for a simple eigenvalue: u^H (dB) v / (u^H v).
fn eigen_derivative(pair: &EigenPair, db: &CMatrix) -> Result<C64> {
    let denom = pair.left.dotc(&pair.right);
    if denom.norm() < 1e-12 {
        return Err(Error::NoConvergence("eigenvalue is not simple".into()));
    }
    Ok(pair.left.dotc(&(db * &pair.right)) / denom)
}

fn step_size(z: C64) -> f64 {
    1e-6 * z.norm().max(1.0)
}

struct Newton<'a> {
    ctx: &'a ScatteringContext,
    len: usize,
    grid: &'a SeedGrid,
}

impl Newton<'_> {
    fn select(&self, pairs: Vec<EigenPair>, previous: &CVector) -> Result<EigenPair> {
        let mut best = None;
        let mut best_overlap = -1.0;
        for p in pairs {
            let o = overlap(previous, &p.right);
            if o > best_overlap {
                best_overlap = o;
                best = Some(p);
            }
        }
        if best_overlap < 0.7 {
            return Err(Error::BranchCollision {
                overlap: best_overlap.max(0.0),
            });
        }
        Ok(best.expect("four eigenpairs"))
    }

    fn residual(&self, z1: C64, z2: C64, beta: C64) -> f64 {
        let l = self.len as u32;
        (z1.powu(l) - beta).norm().max((z2.powu(l) - beta.inv()).norm())
    }

    fn run(&self, mut z1: C64, mut z2: C64, branch: usize) -> Result<(C64, C64, CVector)> {
        let l = self.len as u32;
        let mut pairs = eigenpairs(&bethe_b(self.ctx, z1, z2)?)?;
        if branch >= pairs.len() {
            return Err(Error::Geometry(format!("branch {branch} of {}", pairs.len())));
        }
        let mut current = pairs.swap_remove(branch);
        for _ in 0..self.grid.max_iterations {
            let beta = current.value;
            if self.residual(z1, z2, beta) <= self.grid.tolerance * 1e-2 {
                return Ok((z1, z2, current.right));
            }
            let h1 = step_size(z1);
            let h2 = step_size(z2);
            let db1 = (bethe_b(self.ctx, z1 + h1, z2)? - bethe_b(self.ctx, z1 - h1, z2)?) / C64::new(2.0 * h1, 0.0);
            let db2 = (bethe_b(self.ctx, z1, z2 + h2)? - bethe_b(self.ctx, z1, z2 - h2)?) / C64::new(2.0 * h2, 0.0);
            let b1 = eigen_derivative(&current, &db1)?;
            let b2 = eigen_derivative(&current, &db2)?;
            // F1 = z1^L - beta, F2 = z2^L beta - 1
            let f1 = z1.powu(l) - beta;
            let f2 = z2.powu(l) * beta - 1.0;
            let j11 = z1.powu(l - 1) * l as f64 - b1;
            let j12 = -b2;
            let j21 = z2.powu(l) * b1;
            let j22 = z2.powu(l - 1) * beta * l as f64 + z2.powu(l) * b2;
            let det = j11 * j22 - j12 * j21;
            if det.norm() < 1e-300 || !det.re.is_finite() {
                return Err(Error::NoConvergence("singular Newton system".into()));
            }
            let mut d1 = -(j22 * f1 - j12 * f2) / det;
            let mut d2 = -(-j21 * f1 + j11 * f2) / det;
            // keep each update within a quarter of the current modulus
            let limit = 0.25 * z1.norm().min(z2.norm());
            let big = d1.norm().max(d2.norm());
            if big > limit {
                d1 *= limit / big;
                d2 *= limit / big;
            }
            z1 += d1;
            z2 += d2;
            if !(z1.norm() > 1e-8 && z2.norm() > 1e-8 && z1.norm() < 1e8 && z2.norm() < 1e8) {
                return Err(Error::NoConvergence("rapidity left the search region".into()));
            }
            let pairs = eigenpairs(&bethe_b(self.ctx, z1, z2)?)?;
            current = self.select(pairs, &current.right)?;
        }
        Err(Error::NoConvergence(format!(
            "no convergence after {} iterations",
            self.grid.max_iterations
        )))
    }
}

/// Solve the two-particle Bethe equations from a grid of seeds
/// `(w^a p1, w^b p2)` over all `a, b` and the configured branches.
pub fn solve_bethe_two(
    ctx: &ScatteringContext,
    h: &LocalHamiltonian33,
    len: usize,
    grid: &SeedGrid,
) -> Result<BetheSolveReport> {
    require_hopping(h)?;
    if !(2..=12).contains(&len) {
        return Err(Error::Geometry(format!(
            "two-particle solver supports 2 <= L <= 12, got {len}"
        )));
    }
    let newton = Newton { ctx, len, grid };
    let mut roots: Vec<BetheRootSet> = Vec::new();
    let mut failures = Vec::new();
    let mut discarded = 0;
    for a in 0..len {
        for b in 0..len {
            for &branch in &grid.branches {
                let w = |k: usize, r: f64| C64::from_polar(r, TAU * k as f64 / len as f64);
                let z1 = w(a, grid.perturbation.0);
                let z2 = w(b, grid.perturbation.1);
                let outcome = newton.run(z1, z2, branch).and_then(|(z1, z2, amp)| {
                    let zs = vec![z1, z2];
                    let residuals = bethe_residual(ctx, len, &zs, &amp)?;
                    Ok(BetheRootSet {
                        len,
                        zs,
                        amplitude: amp.normalize(),
                        branch,
                        residuals,
                    })
                });
                match outcome {
                    Ok(root) => {
                        let (z1, z2) = (root.zs[0], root.zs[1]);
                        let duplicate = roots.iter().any(|r| {
                            let (u1, u2) = (r.zs[0], r.zs[1]);
                            ((u1 - z1).norm() < grid.dedup && (u2 - z2).norm() < grid.dedup)
                                || ((u1 - z2).norm() < grid.dedup && (u2 - z1).norm() < grid.dedup)
                        });
                        if (z1 - z2).norm() < 1e-8 || duplicate || root.max_residual() > grid.tolerance {
                            discarded += 1;
                        } else {
                            roots.push(root);
                        }
                    }
                    Err(error) => failures.push(SeedFailure {
                        seed: (a, b, branch),
                        error,
                    }),
                }
            }
        }
    }
    Ok(BetheSolveReport {
        roots,
        failures,
        discarded,
    })
}

/// Exact eigenvalues of an `M`-particle sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpectrum {
    pub len: usize,
    pub particles: usize,
    pub eigenvalues: Vec<C64>,
}

pub fn sector_spectrum(h: &LocalHamiltonian33, len: usize, particles: usize) -> Result<SectorSpectrum> {
    let (_, m) = sector_hamiltonian(h, len, particles)?;
    Ok(SectorSpectrum {
        len,
        particles,
        eigenvalues: eig_general(&m)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    /// Both multisets must pair up completely.
    Multiset,
    /// Every predicted value must pair with a distinct exact one.
    Containment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMatch {
    pub matched: usize,
    pub unmatched_predicted: usize,
    pub unmatched_exact: usize,
    pub max_distance: f64,
    pub passed: bool,
}

pub fn compare_spectra(predicted: &[C64], exact: &[C64], tol: f64, mode: MatchMode) -> SpectrumMatch {
    let p = greedy_pairing(predicted, exact, tol);
    let unmatched_predicted = p.unmatched_a.len();
    let unmatched_exact = p.unmatched_b.len();
    let passed = match mode {
        MatchMode::Multiset => unmatched_predicted == 0 && unmatched_exact == 0,
        MatchMode::Containment => unmatched_predicted == 0,
    };
    SpectrumMatch {
        matched: p.pairs.len(),
        unmatched_predicted,
        unmatched_exact,
        max_distance: p.max_distance(),
        passed,
    }
}
