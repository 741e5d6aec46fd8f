//! Algebra classification plus two reports that do not affect the exit
//! status: catalog families sharing the gauge-invariant fingerprint of `T`,
//! and whether `-h` is a Markov rate matrix.

use cba33::algebra::{classify_with, compute_mu, hecke_normalizations, AlgebraCase, HeckeNormalization};
use cba33::catalog::{gauge_hecke, gauge_tn_sn, random_instance, swap4, Family, HeckeGauge, TnSnGauge};
use cba33::hamiltonian::{extract_t, LocalHamiltonian33, TMatrix};
use cba33::linalg::{eig_general, identity, max_abs, numerical_rank, partial_trace_last, CMatrix, C64};
use cba33::sample::{random_complex, random_invertible, seeded_rng};
use serde::Serialize;
use serde_json::{json, Value};

use super::{constraint_checks, Body};
use crate::config::SuiteConfig;
use crate::error::{CliError, Context};
use crate::input::Model;
use crate::report::{cx, matrix, Check};

/// Discrete data of `T` that survives every gauge move of its case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    /// `(is_zero, algebraic, geometric)` multiplicity per eigenvalue cluster.
    pub clusters: Vec<(bool, usize, usize)>,
    /// Ranks of the two partial traces, sorted.
    pub partial_trace_ranks: (usize, usize),
}

const CLUSTER_TOL: f64 = 1e-3;
const RANK_TOL: f64 = 1e-7;

fn rank_or_zero(a: &CMatrix, scale: f64) -> usize {
    if max_abs(a) <= 1e-10 * scale {
        0
    } else {
        numerical_rank(a, RANK_TOL)
    }
}

/// For the Hecke case the zero flags are dropped: `T` is only fixed up to
/// the shift `rho I`.
pub fn fingerprint(t: &CMatrix, case: AlgebraCase) -> Result<Fingerprint, CliError> {
    let scale = max_abs(t).max(1e-300);
    let ev = eig_general(t).context("fingerprint")?;
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for z in ev {
        match clusters.iter_mut().find(|c| (c[0] - z).norm() <= CLUSTER_TOL * scale) {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    let mut out: Vec<(bool, usize, usize)> = clusters
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<C64>() / c.len() as f64;
            let geo = 4 - rank_or_zero(&(t - identity(4) * mean), scale);
            let zero = case != AlgebraCase::Hecke && mean.norm() <= CLUSTER_TOL * scale;
            (zero, c.len(), geo)
        })
        .collect();
    out.sort();
    let p = swap4();
    let r2 = rank_or_zero(&partial_trace_last(t, 2), scale);
    let r1 = rank_or_zero(&partial_trace_last(&(&p * t * &p), 2), scale);
    Ok(Fingerprint {
        clusters: out,
        partial_trace_ranks: (r1.min(r2), r1.max(r2)),
    })
}

/// `-h` read as a rate matrix: zero column sums, nonnegative real
/// off-diagonal rates, vanishing imaginary parts.
pub fn markov_generator(h: &LocalHamiltonian33, tol: f64) -> Value {
    let w = -h.matrix();
    let mut col_sum: f64 = 0.0;
    let mut min_rate = f64::INFINITY;
    let mut max_imag: f64 = 0.0;
    for j in 0..9 {
        let s: C64 = w.column(j).iter().sum();
        col_sum = col_sum.max(s.norm());
        for i in 0..9 {
            max_imag = max_imag.max(w[(i, j)].im.abs());
            if i != j {
                min_rate = min_rate.min(w[(i, j)].re);
            }
        }
    }
    json!({
        "column_sum_max": col_sum,
        "min_offdiagonal_rate": min_rate,
        "max_imaginary": max_imag,
        "is_generator": col_sum <= tol && min_rate >= -tol && max_imag <= tol,
    })
}

fn normalization_json(n: &HeckeNormalization) -> Value {
    json!({
        "mu": cx(n.mu),
        "mu_tilde": cx(n.mu_tilde),
        "rho": cx(n.rho),
        "tau": cx(n.tau),
        "x": cx(n.x),
        "quadratic_residual": n.quadratic_residual().rel,
    })
}

fn probes(t: &TMatrix, case: AlgebraCase, fp: &Fingerprint, seed: u64, body: &mut Body) -> Result<(), CliError> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::new();
    for k in 0..3 {
        let g = random_invertible(&mut rng, 2);
        let moves: Vec<(&str, CMatrix)> = if case == AlgebraCase::Hecke {
            vec![
                (
                    "conjugate",
                    gauge_hecke(&t.t, &g, C64::new(1.0, 0.0), HeckeGauge::Conjugate).context("gauge")?,
                ),
                (
                    "transpose",
                    gauge_hecke(&t.t, &g, C64::new(1.0, 0.0), HeckeGauge::Transpose).context("gauge")?,
                ),
                (
                    "permute",
                    gauge_hecke(&t.t, &g, C64::new(1.0, 0.0), HeckeGauge::Permute).context("gauge")?,
                ),
            ]
        } else {
            let lambda = random_complex(&mut rng);
            vec![
                (
                    "conjugate",
                    gauge_tn_sn(&t.t, &g, lambda, TnSnGauge::Conjugate).context("gauge")?,
                ),
                ("dual", gauge_tn_sn(&t.t, &g, lambda, TnSnGauge::Dual).context("gauge")?),
            ]
        };
        for (name, image) in moves {
            let tm = TMatrix::new(image.clone(), t.m24, t.m42).context("gauge")?;
            let c = classify_with(&tm, cba33::algebra::RELATION_TOL).context("gauge")?;
            let same = c.case == case && fingerprint(&image, case)? == *fp;
            body.push(Check::new(format!("gauge probe {name}"), same).informational().at(k));
            out.push(json!({ "move": name, "probe": k, "case": c.case.name() }));
        }
    }
    body.set("gauge_probes", Value::Array(out));
    Ok(())
}

/// Families of the same case whose random instances share the fingerprint.
fn candidates(case: AlgebraCase, fp: &Fingerprint, seed: u64) -> Result<Vec<&'static str>, CliError> {
    let mut rng = seeded_rng(seed ^ 0x5eed);
    let mut out = Vec::new();
    for f in Family::ALL.into_iter().filter(|f| f.case() == case) {
        let mut hit = false;
        for _ in 0..3 {
            let inst = random_instance(f, &mut rng);
            hit |= fingerprint(&inst.t.t, case)? == *fp;
        }
        if hit {
            out.push(f.id());
        }
    }
    Ok(out)
}

pub fn run(model: &Model, cfg: &SuiteConfig) -> Result<Body, CliError> {
    let h = &model.h;
    let tol = cfg.tolerances.identity;
    let mut body = Body::default();
    let markov = markov_generator(h, tol);
    body.push(Check::new("markov generator", markov["is_generator"] == true).informational());
    body.set("markov_generator", markov);
    if !constraint_checks(h, &mut body).passed {
        body.note("constraints fail; T is not classified");
        return Ok(body);
    }
    let t = extract_t(h).context("T")?;
    let cl = classify_with(&t, tol).context("classify")?;
    body.set("case", json!(cl.case.name()));
    body.set("t", matrix(&t.t));
    body.set("m24", cx(t.m24));
    body.set("m42", cx(t.m42));
    for (name, r) in &cl.residuals {
        body.push(Check::residual(format!("relation {name}"), r).informational());
    }
    match cl.case {
        AlgebraCase::Hecke => {
            let [canonical, other] = hecke_normalizations(&t).context("normalization")?;
            body.set("mu", cx(canonical.mu));
            body.set("mu_tilde", cx(canonical.mu_tilde));
            body.set("normalization", normalization_json(&canonical));
            body.set("normalization_other_root", normalization_json(&other));
        }
        _ => {
            if let Ok(mu) = compute_mu(&t.t) {
                body.set("mu", cx(mu));
            }
        }
    }
    if cl.case != AlgebraCase::Unclassified {
        let fp = fingerprint(&t.t, cl.case)?;
        let found = candidates(cl.case, &fp, cfg.seed)?;
        if let Some(inst) = &model.instantiation {
            let id = inst.entry.family.id();
            body.push(Check::new("catalog family among candidates", found.contains(&id)).informational());
        }
        body.set("fingerprint", json!(fp));
        body.set("family_candidates", json!(found));
        probes(&t, cl.case, &fp, cfg.seed, &mut body)?;
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_of_identity_and_nilpotent() {
        let f = fingerprint(&identity(4), AlgebraCase::Hecke).unwrap();
        assert_eq!(f.clusters, vec![(false, 4, 4)]);
        assert_eq!(f.partial_trace_ranks, (2, 2));
        let mut n = CMatrix::zeros(4, 4);
        n[(0, 1)] = C64::new(1.0, 0.0);
        let f = fingerprint(&n, AlgebraCase::Sn).unwrap();
        assert_eq!(f.clusters, vec![(true, 4, 3)]);
    }

    #[test]
    fn stochastic_hopping_is_a_generator() {
        // hop 2 <-> 4 at unit rate: h = -W
        let mut m = CMatrix::zeros(9, 9);
        let one = C64::new(1.0, 0.0);
        m[(1, 1)] = one;
        m[(3, 3)] = one;
        m[(1, 3)] = -one;
        m[(3, 1)] = -one;
        m[(6, 6)] = one;
        m[(2, 2)] = one;
        let h = cba33::hamiltonian::validate_pattern(&m).unwrap();
        let v = markov_generator(&h, 1e-12);
        assert_eq!(v["is_generator"], false);
        m[(2, 2)] = C64::new(0.0, 0.0);
        m[(6, 6)] = C64::new(0.0, 0.0);
        let h = cba33::hamiltonian::validate_pattern(&m).unwrap();
        assert_eq!(markov_generator(&h, 1e-12)["is_generator"], true);
    }
}
