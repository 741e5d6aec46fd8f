use std::f64::consts::TAU;

use cba33::bethe::{compare_spectra, energy, solve_bethe_two, MatchMode, SeedGrid};
use cba33::hamiltonian::extract_t;
use cba33::linalg::C64;
use cba33::scattering::ScatteringContext;
use serde_json::{json, Value};

use super::{constraint_checks, exact_sector, match_detail, suites::roots_json, Body};
use crate::config::SuiteConfig;
use crate::error::{CliError, Context};
use crate::input::Model;
use crate::report::{cx, Check};

/// Bethe roots for `M = 1` (plane waves) or `M = 2` (Newton from a seed
/// grid), each energy checked against the exact sector.
pub fn run(model: &Model, cfg: &SuiteConfig) -> Result<Body, CliError> {
    let (len, particles) = (cfg.len, cfg.particles);
    let h = &model.h;
    let mut body = Body::default();
    if !constraint_checks(h, &mut body).passed {
        return Ok(body);
    }
    let exact = exact_sector(h, len, particles, cfg)?;
    let (roots, energies) = match particles {
        1 => {
            let mut out = Vec::new();
            let mut es = Vec::new();
            for k in 0..len {
                let z = C64::from_polar(1.0, TAU * k as f64 / len as f64);
                let e = energy(h, len, &[z]).context("energy")?;
                out.push(json!({ "z": [cx(z)], "energy": cx(e) }));
                es.push(e);
            }
            (Value::Array(out), es)
        }
        2 => {
            let ctx = ScatteringContext::from(&extract_t(h).context("T")?);
            let report = solve_bethe_two(&ctx, h, len, &SeedGrid::default()).context("bethe M=2")?;
            let es = report
                .roots
                .iter()
                .map(|r| r.energy(h))
                .collect::<cba33::Result<Vec<_>>>()
                .context("energy")?;
            body.push(
                Check::new("roots converged", !report.roots.is_empty()).with_detail(json!({
                    "roots": report.roots.len(),
                    "failed_seeds": report.failures.len(),
                    "discarded": report.discarded,
                })),
            );
            (roots_json(&report.roots, &es), es)
        }
        m => return Err(CliError::Input(format!("bethe supports M = 1 or M = 2, got M = {m}"))),
    };
    let m = compare_spectra(&energies, &exact, cfg.tolerances.bethe, MatchMode::Containment);
    body.push(Check {
        residual: Some(m.max_distance),
        tolerance: Some(cfg.tolerances.bethe),
        detail: Some(match_detail(&m)),
        ..Check::new("energies in exact spectrum", m.passed)
    });
    body.set("len", json!(len));
    body.set("particles", json!(particles));
    body.set("roots", roots);
    Ok(body)
}
