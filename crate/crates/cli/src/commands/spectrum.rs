use cba33::bethe::{compare_spectra, one_magnon_prediction, MatchMode};
use cba33::hamiltonian::{check_cba_constraints, sector_dim};
use cba33::linalg::sort_eigenvalues;
use serde_json::json;

use super::{exact_sector, match_detail, Body};
use crate::config::SuiteConfig;
use crate::error::{CliError, Context};
use crate::input::Model;
use crate::report::{cx, cx_list, Check};

/// Exact eigenvalues of the `(L, M)` sector; for `M <= 1` also the
/// closed-form prediction.
pub fn run(model: &Model, cfg: &SuiteConfig) -> Result<Body, CliError> {
    let (len, particles) = (cfg.len, cfg.particles);
    let h = &model.h;
    let mut body = Body::default();
    let mut ev = exact_sector(h, len, particles, cfg)?;
    sort_eigenvalues(&mut ev);
    body.set("len", json!(len));
    body.set("particles", json!(particles));
    body.set("dimension", json!(sector_dim(len, particles)));
    body.set("eigenvalues", cx_list(&ev));
    let tol = cfg.tolerances;
    match particles {
        0 => {
            let expect = h.m(1, 1) * len as f64;
            body.push(
                Check::value(
                    "M=0 energy is L m11",
                    (ev[0] - expect).norm() / expect.norm().max(1.0),
                    tol.identity,
                )
                .with_detail(json!({ "predicted": cx(expect) })),
            );
        }
        1 if check_cba_constraints(h).passed => {
            let pred = one_magnon_prediction(h, len).context("one-magnon prediction")?;
            let m = compare_spectra(&pred, &ev, tol.eigen, MatchMode::Multiset);
            body.push(Check {
                residual: Some(m.max_distance),
                tolerance: Some(tol.eigen),
                detail: Some(match_detail(&m)),
                ..Check::new("M=1 one-magnon multiset", m.passed)
            });
        }
        1 => body.note("constraints fail; no one-magnon prediction"),
        _ => {}
    }
    Ok(body)
}
