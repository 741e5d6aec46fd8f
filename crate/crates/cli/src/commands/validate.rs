use serde_json::json;

use super::{constraint_checks, Body};
use crate::error::CliError;
use crate::input::Model;

pub fn run(model: &Model) -> Result<Body, CliError> {
    let mut body = Body::default();
    let report = constraint_checks(&model.h, &mut body);
    body.set("verdict", json!(if report.passed { "pass" } else { "fail" }));
    body.set("violated", json!(report.violated()));
    let flushed: Vec<String> = model
        .h
        .flushed_entries()
        .iter()
        .map(|(i, j)| format!("m{i}{j}"))
        .collect();
    if !flushed.is_empty() {
        body.note(format!(
            "entries below the pattern threshold were set to zero: {flushed:?}"
        ));
    }
    Ok(body)
}
