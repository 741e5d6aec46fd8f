use cba33::algebra::classify;
use cba33::catalog::{Family, ParamKind};
use cba33::linalg::C64;
use cba33::sample::seeded_rng;
use cba33::scattering::ScatteringContext;
use serde_json::{json, Value};

use super::suites::max_ybe_residual;
use super::{constraint_checks, Body};
use crate::config::{CatalogSpec, ModelSource, SuiteConfig};
use crate::error::{CliError, Context};
use crate::input::{catalog_entry, resolve, Model};
use crate::report::{cx, matrix, Check};

pub fn list() -> Body {
    let mut body = Body::default();
    let families: Vec<Value> = Family::ALL
        .iter()
        .map(|f| {
            let params: Vec<Value> = f
                .params()
                .iter()
                .map(|p| {
                    json!({
                        "name": p.name,
                        "kind": match p.kind {
                            ParamKind::Complex => "complex",
                            ParamKind::Sign => "sign",
                        },
                    })
                })
                .collect();
            let mut v = json!({ "id": f.id(), "case": f.case().name(), "params": params });
            if let Some(src) = f.sn_source() {
                v["transpose_of"] = json!(src.id());
            }
            v
        })
        .collect();
    body.set("count", json!(families.len()));
    body.set("families", Value::Array(families));
    body
}

pub fn instantiate(model: &Model) -> Result<Body, CliError> {
    let inst = model
        .instantiation
        .as_ref()
        .ok_or_else(|| CliError::Input("catalog instantiate needs a catalog spec".into()))?;
    let mut body = Body::default();
    constraint_checks(&model.h, &mut body);
    let cl = classify(&inst.t).context("classify")?;
    let expected = inst.entry.family.case();
    body.push(Check::new(
        format!("classified as {}", expected.name()),
        cl.case == expected,
    ));
    body.set("family", json!(inst.entry.family.id()));
    body.set("case", json!(cl.case.name()));
    body.set("t", matrix(&inst.t.t));
    body.set("h", matrix(model.h.matrix()));
    if let Some(hk) = &inst.hecke {
        body.set("branch", json!(inst.entry.branch.to_string()));
        body.set(
            "hecke",
            json!({
                "mu_tilde": cx(hk.mu_tilde),
                "t_tilde": matrix(&hk.t_tilde),
                "x": cx(hk.solution.x),
                "mu": cx(hk.solution.mu),
                "rho": cx(hk.solution.rho),
                "tau": cx(hk.solution.tau),
            }),
        );
    }
    Ok(body)
}

/// Linear sweep of one complex parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub from: C64,
    pub to: C64,
    pub points: usize,
}

impl Sweep {
    pub fn value(&self, k: usize) -> C64 {
        if self.points <= 1 {
            return self.from;
        }
        self.from + (self.to - self.from) * (k as f64 / (self.points - 1) as f64)
    }
}

/// One YBE row per sweep point, evaluated on `draws` random triples.
pub fn sweep(spec: &CatalogSpec, sw: &Sweep, cfg: &SuiteConfig) -> Result<Body, CliError> {
    let entry = catalog_entry(spec, cfg.branch.as_deref())?;
    let family = entry.family;
    match family.params().iter().find(|p| p.name == sw.param) {
        Some(p) if p.kind == ParamKind::Complex => {}
        Some(_) => return Err(CliError::Input(format!("{} is a sign and cannot be swept", sw.param))),
        None => return Err(CliError::Input(format!("{family} has no parameter {}", sw.param))),
    }
    if sw.points == 0 {
        return Err(CliError::Input("--points must be positive".into()));
    }
    let mut body = Body::default();
    let mut rows = Vec::new();
    for k in 0..sw.points {
        let v = sw.value(k);
        let mut s = spec.clone();
        s.params.insert(sw.param.clone(), [v.re, v.im]);
        let row = resolve(&ModelSource::Catalog { spec: s }, cfg.branch.as_deref()).and_then(|m| {
            let inst = m.instantiation.expect("catalog source");
            let ctx = ScatteringContext::from(&inst.t);
            let mut rng = seeded_rng(cfg.seed.wrapping_add(k as u64));
            let (worst, resampled) = max_ybe_residual(&ctx, cfg.draws, &mut rng, cfg.tolerances.ybe)?;
            let case = classify(&inst.t).context("classify")?.case;
            Ok((worst, resampled, case))
        });
        match row {
            Ok((worst, resampled, case)) => {
                body.push(Check::value("sweep ybe", worst, cfg.tolerances.ybe).at(k));
                rows.push(json!({
                    "value": cx(v),
                    "case": case.name(),
                    "ybe_max": worst,
                    "resampled": resampled,
                }));
            }
            Err(e) => {
                body.push(
                    Check::new("sweep ybe", false)
                        .at(k)
                        .with_detail(json!({ "error": e.to_string() })),
                );
                rows.push(json!({ "value": cx(v), "error": e.to_string() }));
            }
        }
    }
    body.set("family", json!(family.id()));
    body.set("param", json!(sw.param));
    body.set("rows", Value::Array(rows));
    Ok(body)
}
