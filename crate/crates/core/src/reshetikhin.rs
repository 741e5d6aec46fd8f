//! The Reshetikhin criterion for difference-form R-matrices:
//! `[h12 + h23, [h12, h23]] = A23 - A12` for some 9x9 matrix `A`.
//!
//! The best `A` is found by least squares over all 81 entries, so a large
//! residual rules out every `A` at once.

use std::sync::OnceLock;

use crate::algebra::AlgebraCase;
use crate::catalog::swap4;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_from_t, FreeParams};
use crate::linalg::{commutator, frobenius, identity, kron, CMatrix, LeastSquares, C64, ONE};

pub const HOLDS_TOL: f64 = 1e-10;
pub const FAILS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// Residual between [`HOLDS_TOL`] and [`FAILS_TOL`].
    Inconclusive,
    Fails,
}

impl Verdict {
    pub fn from_residual(r: f64) -> Self {
        if r <= HOLDS_TOL {
            Verdict::Holds
        } else if r <= FAILS_TOL {
            Verdict::Inconclusive
        } else {
            Verdict::Fails
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fails => "fails",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReshetikhinResult {
    /// Least-squares residual divided by the Frobenius norm of the left side
    /// (absolute when that norm is below 1e-12).
    pub residual: f64,
    pub a_matrix: CMatrix,
    pub holds: bool,
    pub verdict: Verdict,
}

// The map A -> I3 (x) A - A (x) I3 on column-major vec(A).
fn difference_map() -> &'static LeastSquares {
    static SOLVER: OnceLock<LeastSquares> = OnceLock::new();
    SOLVER.get_or_init(|| {
        let i3 = identity(3);
        let mut m = CMatrix::zeros(729, 81);
        for k in 0..81 {
            let mut e = CMatrix::zeros(9, 9);
            e[(k % 9, k / 9)] = ONE;
            let img = kron(&i3, &e) - kron(&e, &i3);
            m.set_column(k, &CMatrix::from_column_slice(729, 1, img.as_slice()).column(0));
        }
        LeastSquares::new(&m)
    })
}

/// Left side `[h12 + h23, [h12, h23]]` on three sites.
pub fn criterion_lhs(h: &CMatrix) -> CMatrix {
    let i3 = identity(3);
    let h12 = kron(h, &i3);
    let h23 = kron(&i3, h);
    commutator(&(&h12 + &h23), &commutator(&h12, &h23))
}

pub fn check_reshetikhin(h: &CMatrix) -> Result<ReshetikhinResult> {
    if h.nrows() != 9 || h.ncols() != 9 {
        return Err(Error::Shape {
            expected_rows: 9,
            expected_cols: 9,
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let lhs = criterion_lhs(h);
    let b = CMatrix::from_column_slice(729, 1, lhs.as_slice());
    let (x, abs) = difference_map().solve(&b);
    let norm = frobenius(&lhs);
    let residual = if norm < 1e-12 { abs } else { abs / norm };
    let verdict = Verdict::from_residual(residual);
    Ok(ReshetikhinResult {
        residual,
        a_matrix: CMatrix::from_column_slice(9, 9, x.as_slice()),
        holds: verdict == Verdict::Holds,
        verdict,
    })
}

/// The images of `T` the criterion is scanned over: `T`, `P T P` and `T^t`
/// for the Hecke case, `T` and `P T^t P` otherwise.
pub fn orbit(t: &CMatrix, case: AlgebraCase) -> Vec<(&'static str, CMatrix)> {
    let p = swap4();
    match case {
        AlgebraCase::Hecke => vec![("T", t.clone()), ("P T P", &p * t * &p), ("T^t", t.transpose())],
        _ => vec![("T", t.clone()), ("P T^t P", &p * t.transpose() * &p)],
    }
}

/// Criterion for `h` rebuilt from `lambda * T` at each dilatation.
pub fn dilatation_scan(t: &CMatrix, free: &FreeParams, lambdas: &[C64]) -> Result<Vec<(C64, ReshetikhinResult)>> {
    lambdas
        .iter()
        .map(|&l| {
            let h = build_from_t(&(t * l), free)?;
            Ok((l, check_reshetikhin(h.matrix())?))
        })
        .collect()
}
