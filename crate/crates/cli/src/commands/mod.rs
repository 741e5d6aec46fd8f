//! One function per verb. Each returns a [`Body`]; the driver turns it into a
//! report and an exit status.

pub mod bethe;
pub mod catalog;
pub mod classify;
pub mod reshetikhin;
pub mod spectrum;
pub mod suites;
pub mod validate;
pub mod verify;

use cba33::hamiltonian::{check_cba_constraints, sector_hamiltonian_with_cap, ConstraintReport, LocalHamiltonian33};
use cba33::linalg::{eig_general_with, EigConfig, C64};
use cba33::sample::SeededRng;
use cba33::Error;
use serde_json::{json, Map, Value};

use crate::config::SuiteConfig;
use crate::error::{CliError, Context};
use crate::report::Check;

/// Checks, command data and notes, in the order they were produced.
#[derive(Debug, Default)]
pub struct Body {
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    pub notes: Vec<String>,
}

impl Body {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.data.insert(key.to_string(), v);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
}

/// One mandatory check per constraint relation, at the same absolute
/// tolerance the library applies before building predictions.
pub fn constraint_checks(h: &LocalHamiltonian33, body: &mut Body) -> ConstraintReport {
    let report = check_cba_constraints(h);
    for (name, r) in &report.residuals {
        body.push(Check::value(format!("constraint {name}"), r.norm(), report.tolerance));
    }
    report
}

/// Give up on a randomized check after this many singular draws.
pub const MAX_RESAMPLES: usize = 100;

/// Run `f` on fresh draws until it does not hit a singular sample.
pub fn sample<T>(
    rng: &mut SeededRng,
    resampled: &mut usize,
    what: &str,
    mut f: impl FnMut(&mut SeededRng) -> cba33::Result<T>,
) -> Result<T, CliError> {
    let mut tries = 0;
    loop {
        match f(rng) {
            Err(Error::SingularLambda { .. } | Error::ZeroRapidity) if tries < MAX_RESAMPLES => {
                tries += 1;
                *resampled += 1;
            }
            r => return r.context(what),
        }
    }
}

/// Exact eigenvalues of an `M`-particle sector under the configured caps.
pub fn exact_sector(
    h: &LocalHamiltonian33,
    len: usize,
    particles: usize,
    cfg: &SuiteConfig,
) -> Result<Vec<C64>, CliError> {
    let what = format!("sector L={len} M={particles}");
    let (_, m) = sector_hamiltonian_with_cap(h, len, particles, cfg.caps.embed).context(&what)?;
    let eig = EigConfig {
        max_dim: cfg.caps.eig,
        ..EigConfig::default()
    };
    eig_general_with(&m, &eig).context(&what)
}

/// Details of a multiset/containment comparison.
pub fn match_detail(m: &cba33::bethe::SpectrumMatch) -> Value {
    json!({
        "matched": m.matched,
        "unmatched_predicted": m.unmatched_predicted,
        "unmatched_exact": m.unmatched_exact,
        "max_distance": m.max_distance,
    })
}
