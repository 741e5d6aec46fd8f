use cba33::reshetikhin::check_reshetikhin;

use super::{suites::reshetikhin_suite, Body};
use crate::config::SuiteConfig;
use crate::error::{CliError, Context};
use crate::input::Model;
use crate::report::matrix;

pub fn run(model: &Model, cfg: &SuiteConfig) -> Result<Body, CliError> {
    let mut body = Body::default();
    reshetikhin_suite(&model.h, cfg.reshetikhin_expect, &mut body)?;
    let r = check_reshetikhin(model.h.matrix()).context("reshetikhin")?;
    body.set("a_matrix", matrix(&r.a_matrix));
    Ok(body)
}
