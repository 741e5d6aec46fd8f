//! Model files and catalog specs.
//!
//! A model file lists the nonzero entries of the local Hamiltonian:
//! `{"entries": {"m11": [re, im], ...}}`; absent entries are zero. A catalog
//! spec names a family instead:
//! `{"family": "T_H12", "params": {...}, "m24": [re, im], "m42": [re, im],
//!   "free": {...}, "branch": "0+"}`.

use std::collections::BTreeMap;
use std::path::Path;

use cba33::algebra::AlgebraCase;
use cba33::catalog::{instantiate, Branch, CatalogEntry, Family, Instantiation, Params};
use cba33::hamiltonian::{build_from_t, on_pattern, validate_pattern, FreeParams, LocalHamiltonian33};
use cba33::linalg::{CMatrix, C64};
use serde_json::{Map, Value};

use crate::config::{CatalogSpec, ModelSource};
use crate::error::{CliError, Context};

/// Free parameters a catalog spec may set; `m24`/`m42` live at top level.
pub const FREE_KEYS: [&str; 6] = ["m11", "m22", "m33", "m44", "m23", "m32"];

/// A resolved model: the Hamiltonian and, for catalog specs, how it was built.
#[derive(Debug, Clone)]
pub struct Model {
    pub h: LocalHamiltonian33,
    pub instantiation: Option<Instantiation>,
}

// 1-based line of the first occurrence of `"key"`, for error messages.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

struct Doc<'a> {
    text: &'a str,
}

impl Doc<'_> {
    fn err(&self, path: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
        let at = match line_of(self.text, key) {
            Some(l) => format!("line {l}, "),
            None => String::new(),
        };
        CliError::Input(format!("{at}key {path}: {msg}"))
    }

    fn complex(&self, path: &str, key: &str, v: &Value, allow_real: bool) -> Result<[f64; 2], CliError> {
        let pair = match v {
            Value::Array(items) if items.len() == 2 => (items[0].as_f64(), items[1].as_f64()),
            Value::Number(n) if allow_real => (n.as_f64(), Some(0.0)),
            _ => (None, None),
        };
        match pair {
            (Some(re), Some(im)) if re.is_finite() && im.is_finite() => Ok([re, im]),
            _ => Err(self.err(path, key, format!("expected [re, im] with finite numbers, got {v}"))),
        }
    }

    fn object<'v>(&self, path: &str, key: &str, v: &'v Value) -> Result<&'v Map<String, Value>, CliError> {
        v.as_object()
            .ok_or_else(|| self.err(path, key, format!("expected an object, got {v}")))
    }
}

/// Parse the `mIJ` key of a model entry into 1-based indices.
pub fn entry_index(key: &str) -> Option<(usize, usize)> {
    let b = key.as_bytes();
    if b.len() != 3 || b[0] != b'm' {
        return None;
    }
    let digit = |c: u8| (b'1'..=b'9').contains(&c).then(|| (c - b'0') as usize);
    Some((digit(b[1])?, digit(b[2])?))
}

pub fn parse_model_text(text: &str) -> Result<ModelSource, CliError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let doc = Doc { text };
    let obj = root
        .as_object()
        .ok_or_else(|| CliError::Input("model document must be an object".into()))?;
    if obj.contains_key("family") {
        parse_catalog(&doc, obj).map(|spec| ModelSource::Catalog { spec })
    } else if obj.contains_key("entries") {
        for k in obj.keys() {
            if k != "entries" {
                return Err(doc.err(k, k, "unknown key in a model file"));
            }
        }
        parse_entries(&doc, &obj["entries"]).map(|entries| ModelSource::Inline { entries })
    } else {
        Err(CliError::Input(
            "model document needs either \"entries\" or \"family\"".into(),
        ))
    }
}

fn parse_entries(doc: &Doc, v: &Value) -> Result<BTreeMap<String, [f64; 2]>, CliError> {
    let mut out = BTreeMap::new();
    for (k, x) in doc.object("entries", "entries", v)? {
        let path = format!("entries.{k}");
        let (i, j) = entry_index(k).ok_or_else(|| doc.err(&path, k, "entry keys are m<row><col> with digits 1-9"))?;
        if !on_pattern(i, j) {
            return Err(doc.err(&path, k, format!("({i},{j}) is outside the 33-vertex pattern")));
        }
        out.insert(k.clone(), doc.complex(&path, k, x, false)?);
    }
    Ok(out)
}

fn parse_catalog(doc: &Doc, obj: &Map<String, Value>) -> Result<CatalogSpec, CliError> {
    for k in obj.keys() {
        if !["family", "params", "m24", "m42", "free", "branch"].contains(&k.as_str()) {
            return Err(doc.err(k, k, "unknown key in a catalog spec"));
        }
    }
    let family_name = obj["family"]
        .as_str()
        .ok_or_else(|| doc.err("family", "family", "expected a string"))?;
    let family: Family = family_name.parse().map_err(|e| doc.err("family", "family", e))?;
    let mut params = BTreeMap::new();
    if let Some(p) = obj.get("params") {
        for (k, x) in doc.object("params", "params", p)? {
            let path = format!("params.{k}");
            if !family.params().iter().any(|s| s.name == k) {
                let names: Vec<&str> = family.params().iter().map(|s| s.name).collect();
                return Err(doc.err(&path, k, format!("{family} takes {names:?}")));
            }
            params.insert(k.clone(), doc.complex(&path, k, x, true)?);
        }
    }
    for s in family.params() {
        if !params.contains_key(s.name) {
            return Err(doc.err("params", "params", format!("missing {} for {family}", s.name)));
        }
    }
    // absent hoppings default to the unit values allowed by the family's case
    let (d24, d42) = match family.case() {
        AlgebraCase::Sn => ([1.0, 0.0], [0.0, 0.0]),
        AlgebraCase::Tn => ([0.0, 0.0], [1.0, 0.0]),
        _ => ([1.0, 0.0], [1.0, 0.0]),
    };
    let hop = |k: &str, d: [f64; 2]| match obj.get(k) {
        Some(x) => doc.complex(k, k, x, true),
        None => Ok(d),
    };
    let m24 = hop("m24", d24)?;
    let m42 = hop("m42", d42)?;
    let mut free = BTreeMap::new();
    if let Some(f) = obj.get("free") {
        for (k, x) in doc.object("free", "free", f)? {
            let path = format!("free.{k}");
            if !FREE_KEYS.contains(&k.as_str()) {
                return Err(doc.err(
                    &path,
                    k,
                    format!("free parameters are {FREE_KEYS:?} (m77 follows, m24/m42 are top-level)"),
                ));
            }
            free.insert(k.clone(), doc.complex(&path, k, x, true)?);
        }
    }
    let branch = match obj.get("branch") {
        None => Branch::default(),
        Some(Value::String(s)) => s.parse().map_err(|e| doc.err("branch", "branch", e))?,
        Some(Value::Object(b)) => {
            let x_root = b.get("x_root").and_then(Value::as_u64);
            let tau_sign = b.get("tau_sign").and_then(Value::as_i64);
            match (x_root, tau_sign, b.len()) {
                (Some(x @ 0..=1), Some(t @ (-1 | 1)), 2) => Branch {
                    x_root: x as u8,
                    tau_sign: t as i8,
                },
                _ => return Err(doc.err("branch", "branch", "expected {\"x_root\": 0|1, \"tau_sign\": 1|-1}")),
            }
        }
        Some(v) => return Err(doc.err("branch", "branch", format!("expected a string or object, got {v}"))),
    };
    Ok(CatalogSpec {
        family: family.id().to_string(),
        params,
        m24,
        m42,
        free,
        branch: branch.to_string(),
    })
}

pub fn read_model(path: &Path) -> Result<ModelSource, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_model_text(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn c(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// Build the catalog entry a spec describes, with an optional branch override.
pub fn catalog_entry(spec: &CatalogSpec, branch: Option<&str>) -> Result<CatalogEntry, CliError> {
    let family: Family = spec.family.parse().context("family")?;
    let params: Params = spec.params.iter().map(|(k, v)| (k.clone(), c(*v))).collect();
    let branch: Branch = branch.unwrap_or(&spec.branch).parse().context("branch")?;
    Ok(CatalogEntry::new(family, params).with_branch(branch))
}

pub fn free_params(spec: &CatalogSpec) -> FreeParams {
    let get = |k: &str| spec.free.get(k).map(|v| c(*v)).unwrap_or_default();
    FreeParams {
        m11: get("m11"),
        m22: get("m22"),
        m33: get("m33"),
        m44: get("m44"),
        m23: get("m23"),
        m32: get("m32"),
        m24: c(spec.m24),
        m42: c(spec.m42),
    }
}

/// Turn a parsed source into a Hamiltonian.
pub fn resolve(source: &ModelSource, branch: Option<&str>) -> Result<Model, CliError> {
    match source {
        ModelSource::Inline { entries } => {
            let mut m = CMatrix::zeros(9, 9);
            for (k, v) in entries {
                let (i, j) =
                    entry_index(k).ok_or_else(|| CliError::Input(format!("key entries.{k}: not an entry name")))?;
                m[(i - 1, j - 1)] = c(*v);
            }
            Ok(Model {
                h: validate_pattern(&m).context("model")?,
                instantiation: None,
            })
        }
        ModelSource::Catalog { spec } => {
            let entry = catalog_entry(spec, branch)?;
            let inst = instantiate(&entry, c(spec.m24), c(spec.m42)).context(&spec.family)?;
            let h = build_from_t(&inst.t.t, &free_params(spec)).context(&spec.family)?;
            Ok(Model {
                h,
                instantiation: Some(inst),
            })
        }
        ModelSource::File { path } => resolve(&read_model(Path::new(path))?, branch),
    }
}
