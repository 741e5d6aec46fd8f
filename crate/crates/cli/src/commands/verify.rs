use cba33::algebra::{classify_with, AlgebraCase};
use cba33::hamiltonian::extract_t;
use cba33::sample::seeded_rng;
use cba33::scattering::ScatteringContext;
use serde_json::json;

use super::suites::{reshetikhin_suite, spectrum_suite, ybe_suite};
use super::{constraint_checks, Body};
use crate::config::{Suite, SuiteConfig};
use crate::error::{CliError, Context};
use crate::input::Model;

pub fn run(model: &Model, cfg: &SuiteConfig) -> Result<Body, CliError> {
    let suite = cfg.suite.unwrap_or(Suite::All);
    let h = &model.h;
    let mut body = Body::default();
    if !constraint_checks(h, &mut body).passed {
        body.note("constraints fail; suites not run");
        return Ok(body);
    }
    let t = extract_t(h).context("T")?;
    let case = match classify_with(&t, cfg.tolerances.identity) {
        Ok(c) => c.case,
        Err(cba33::Error::BothHoppingsZero) => AlgebraCase::Unclassified,
        Err(e) => return Err(e).context("classify"),
    };
    body.set("case", json!(case.name()));
    let ctx = ScatteringContext::from(&t);
    let mut rng = seeded_rng(cfg.seed);
    if matches!(suite, Suite::Ybe | Suite::All) {
        ybe_suite(&ctx, case, cfg, &mut rng, &mut body)?;
    }
    if matches!(suite, Suite::Spectrum | Suite::All) {
        spectrum_suite(h, &ctx, cfg, &mut body)?;
    }
    if matches!(suite, Suite::Reshetikhin | Suite::All) {
        reshetikhin_suite(h, cfg.reshetikhin_expect, &mut body)?;
    }
    Ok(body)
}
