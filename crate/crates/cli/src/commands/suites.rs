//! The verification suites behind `verify` (and the per-row checks of
//! `catalog sweep`).

use std::cell::Cell;

use cba33::algebra::{classify_with, AlgebraCase};
use cba33::bethe::{compare_spectra, one_magnon_prediction, solve_bethe_two, MatchMode, SeedGrid};
use cba33::hamiltonian::{build_from_t, extract_t, FreeParams, LocalHamiltonian33};
use cba33::linalg::C64;
use cba33::reshetikhin::{check_reshetikhin, dilatation_scan, orbit, Verdict, HOLDS_TOL};
use cba33::sample::{random_complex, SeededRng};
use cba33::scattering::{
    check_bethe_form, check_duality, check_ratio_dependence, check_regularity, check_transfer_commutation,
    check_unitarity, check_ybe, Baxterisation, DeltaBranch, ScatteringContext,
};
use cba33::Error;
use serde_json::{json, Value};

use super::{exact_sector, match_detail, sample, Body};
use crate::config::{Expectation, SuiteConfig};
use crate::error::{CliError, Context};
use crate::report::{cx, cx_list, Check};

fn draw(ctx: &ScatteringContext, rng: &mut SeededRng, n: usize, rejected: &Cell<usize>) -> Vec<C64> {
    let (zs, r) = ctx.draw_rapidities(rng, n);
    rejected.set(rejected.get() + r);
    zs
}

/// Largest YBE residual over `draws` random triples.
pub fn max_ybe_residual(
    ctx: &ScatteringContext,
    draws: usize,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<(f64, usize), CliError> {
    let mut resampled = 0;
    let rej = Cell::new(0);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let r = sample(rng, &mut resampled, "ybe", |rng| {
            let zs = draw(ctx, rng, 3, &rej);
            check_ybe(ctx, zs[0], zs[1], zs[2], tol)
        })?;
        worst = worst.max(r.rel);
    }
    Ok((worst, resampled + rej.get()))
}

/// Regularity, unitarity, braided YBE, transfer-matrix commutation, the
/// Bethe form of the transfer matrix, duality and (Hecke case) the
/// ratio dependence after the change of variables.
pub fn ybe_suite(
    ctx: &ScatteringContext,
    case: AlgebraCase,
    cfg: &SuiteConfig,
    rng: &mut SeededRng,
    body: &mut Body,
) -> Result<(), CliError> {
    let tol = cfg.tolerances;
    let mut resampled = 0;
    let rej = Cell::new(0);
    for k in 0..cfg.draws {
        let (z, r) = sample(rng, &mut resampled, "regularity", |rng| {
            let z = random_complex(rng);
            Ok((z, check_regularity(ctx, z, tol.identity)?))
        })?;
        body.push(
            Check::residual("regularity", &r)
                .at(k)
                .with_detail(json!({ "z": cx(z) })),
        );
    }
    for k in 0..cfg.draws {
        let (zs, r) = sample(rng, &mut resampled, "unitarity", |rng| {
            let zs = draw(ctx, rng, 2, &rej);
            Ok((zs.clone(), check_unitarity(ctx, zs[0], zs[1], tol.identity)?))
        })?;
        body.push(
            Check::residual("unitarity", &r)
                .at(k)
                .with_detail(json!({ "z": cx_list(&zs) })),
        );
    }
    for (name, c) in [("ybe", ctx.clone()), ("ybe dual", ctx.dualize())] {
        for k in 0..cfg.draws {
            let (zs, r) = sample(rng, &mut resampled, name, |rng| {
                let zs = draw(&c, rng, 3, &rej);
                Ok((zs.clone(), check_ybe(&c, zs[0], zs[1], zs[2], tol.ybe)?))
            })?;
            body.push(
                Check::residual(name, &r)
                    .at(k)
                    .with_detail(json!({ "z": cx_list(&zs) })),
            );
        }
    }
    for m in 2..=4 {
        let name = format!("transfer commutation M={m}");
        for k in 0..cfg.draws {
            let (zs, r) = sample(rng, &mut resampled, &name, |rng| {
                let zs = draw(ctx, rng, m + 2, &rej);
                Ok((
                    zs.clone(),
                    check_transfer_commutation(ctx, zs[m], zs[m + 1], &zs[..m], tol.ybe)?,
                ))
            })?;
            body.push(
                Check::residual(&name, &r)
                    .at(k)
                    .with_detail(json!({ "z": cx_list(&zs) })),
            );
        }
    }
    for k in 0..cfg.draws {
        let (zs, r) = sample(rng, &mut resampled, "bethe form", |rng| {
            let zs = draw(ctx, rng, 2, &rej);
            Ok((zs.clone(), check_bethe_form(ctx, &zs, tol.identity)?))
        })?;
        body.push(
            Check::residual("bethe form M=2", &r)
                .at(k)
                .with_detail(json!({ "z": cx_list(&zs) })),
        );
    }
    for k in 0..cfg.draws {
        let (zs, r) = sample(rng, &mut resampled, "duality", |rng| {
            let zs = draw(ctx, rng, 2, &rej);
            Ok((zs.clone(), check_duality(ctx, zs[0], zs[1], tol.identity)?))
        })?;
        body.push(
            Check::residual("duality", &r)
                .at(k)
                .with_detail(json!({ "z": cx_list(&zs) })),
        );
    }
    if case == AlgebraCase::Hecke {
        match Baxterisation::new(ctx, DeltaBranch::Principal) {
            Ok(_) => {
                for k in 0..cfg.draws {
                    let (x, r) = sample(rng, &mut resampled, "ratio dependence", |rng| {
                        let x = [random_complex(rng), random_complex(rng), random_complex(rng)];
                        let r = check_ratio_dependence(ctx, x[0], x[1], x[2], DeltaBranch::Principal, tol.ybe);
                        match r {
                            // x = 1 or c x = 1: draw again
                            Err(Error::DegenerateChangeOfVariable(_)) => Err(Error::ZeroRapidity),
                            r => Ok((x, r?)),
                        }
                    })?;
                    body.push(
                        Check::residual("ratio dependence", &r)
                            .at(k)
                            .with_detail(json!({ "x1": cx(x[0]), "x2": cx(x[1]), "c": cx(x[2]) })),
                    );
                }
            }
            Err(e @ Error::DegenerateChangeOfVariable(_)) => {
                body.note(format!("ratio dependence skipped: {e}"));
            }
            Err(e) => return Err(e).context("ratio dependence"),
        }
    }
    resampled += rej.get();
    if resampled > 0 {
        body.note(format!("resampled {resampled} singular rapidity draws"));
    }
    Ok(())
}

/// `M = 0`, `M = 1` and `M = 2` predictions against exact sector spectra.
pub fn spectrum_suite(
    h: &LocalHamiltonian33,
    ctx: &ScatteringContext,
    cfg: &SuiteConfig,
    body: &mut Body,
) -> Result<(), CliError> {
    let len = cfg.len;
    let tol = cfg.tolerances;
    let e0 = exact_sector(h, len, 0, cfg)?;
    let expect = h.m(1, 1) * len as f64;
    body.push(
        Check::value(
            "M=0 energy is L m11",
            (e0[0] - expect).norm() / expect.norm().max(1.0),
            tol.identity,
        )
        .with_detail(json!({ "exact": cx(e0[0]), "predicted": cx(expect) })),
    );
    let exact1 = exact_sector(h, len, 1, cfg)?;
    let pred = one_magnon_prediction(h, len).context("one-magnon prediction")?;
    let m = compare_spectra(&pred, &exact1, tol.eigen, MatchMode::Multiset);
    body.push(Check {
        residual: Some(m.max_distance),
        tolerance: Some(tol.eigen),
        detail: Some(match_detail(&m)),
        ..Check::new("M=1 one-magnon multiset", m.passed)
    });
    if !(2..=12).contains(&len) {
        body.note(format!("M=2 Bethe check needs 2 <= L <= 12, got L={len}"));
        return Ok(());
    }
    let report = solve_bethe_two(ctx, h, len, &SeedGrid::default()).context("bethe M=2")?;
    let exact2 = exact_sector(h, len, 2, cfg)?;
    let energies = report
        .roots
        .iter()
        .map(|r| r.energy(h))
        .collect::<cba33::Result<Vec<_>>>()
        .context("bethe energies")?;
    body.push(
        Check::new("M=2 Bethe roots converged", !report.roots.is_empty()).with_detail(json!({
            "roots": report.roots.len(),
            "failed_seeds": report.failures.len(),
            "discarded": report.discarded,
        })),
    );
    let m = compare_spectra(&energies, &exact2, tol.bethe, MatchMode::Containment);
    body.push(Check {
        residual: Some(m.max_distance),
        tolerance: Some(tol.bethe),
        detail: Some(match_detail(&m)),
        ..Check::new("M=2 Bethe energies in exact spectrum", m.passed)
    });
    body.set("bethe_roots", roots_json(&report.roots, &energies));
    Ok(())
}

pub fn roots_json(roots: &[cba33::bethe::BetheRootSet], energies: &[C64]) -> Value {
    Value::Array(
        roots
            .iter()
            .zip(energies)
            .map(|(r, &e)| {
                json!({
                    "z": cx_list(&r.zs),
                    "energy": cx(e),
                    "residual": r.max_residual(),
                    "branch": r.branch,
                })
            })
            .collect(),
    )
}

/// The criterion on `h`, on the orbit images of its `T`, and on a few
/// dilatations of `T`. Only the first check can be mandatory.
pub fn reshetikhin_suite(h: &LocalHamiltonian33, expect: Expectation, body: &mut Body) -> Result<(), CliError> {
    let r = check_reshetikhin(h.matrix()).context("reshetikhin")?;
    let passed = match expect {
        Expectation::Report => true,
        Expectation::Holds => r.verdict == Verdict::Holds,
        Expectation::Fails => r.verdict == Verdict::Fails,
    };
    let mut check = Check {
        residual: Some(r.residual),
        tolerance: Some(HOLDS_TOL),
        detail: Some(json!({ "verdict": r.verdict.name(), "holds": r.holds, "expect": expect })),
        ..Check::new("reshetikhin", passed)
    };
    if expect == Expectation::Report {
        check = check.informational();
    }
    body.push(check);
    body.set(
        "reshetikhin",
        json!({ "holds": r.holds, "verdict": r.verdict.name(), "residual": r.residual }),
    );

    let Ok(t) = extract_t(h) else {
        return Ok(());
    };
    let free = FreeParams::read_off(h);
    let case = match classify_with(&t, cba33::algebra::RELATION_TOL) {
        Ok(c) => c.case,
        Err(_) => AlgebraCase::Unclassified,
    };
    for (name, image) in orbit(&t.t, case).into_iter().skip(1) {
        let h2 = build_from_t(&image, &free).context("orbit")?;
        let r = check_reshetikhin(h2.matrix()).context("orbit")?;
        body.push(
            Check::value(format!("reshetikhin orbit {name}"), r.residual, HOLDS_TOL)
                .informational()
                .with_detail(json!({ "verdict": r.verdict.name() })),
        );
    }
    let lambdas = [C64::new(0.5, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 1.0)];
    for (l, r) in dilatation_scan(&t.t, &free, &lambdas).context("dilatation")? {
        body.push(
            Check::value("reshetikhin dilatation", r.residual, HOLDS_TOL)
                .informational()
                .with_detail(json!({ "lambda": cx(l), "verdict": r.verdict.name() })),
        );
    }
    Ok(())
}
