//! Output formats for loops: a one-line pretty form, a C-like listing with
//! exact fraction literals, and the JSON document format.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{Matrix, Rat, Vector};
use crate::loops::{AffineLoop, Certificate, LinearLoop, Loop, SynthesizedLoop, TraceStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Pretty,
    CLike,
    Json,
}

/// Default names `x1, …, xd`.
pub fn default_vars(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

/// Names for an augmented loop: a fresh name for the constant-one coordinate
/// followed by the original names.
pub fn augmented_vars(vars: &[String]) -> Vec<String> {
    let mut fresh = "one".to_string();
    while vars.contains(&fresh) {
        fresh.push('_');
    }
    std::iter::once(fresh).chain(vars.iter().cloned()).collect()
}

fn tuple(items: &[String]) -> String {
    format!("({})", items.join(","))
}

/// `3/5·x − 4/5·y + 1` for row `i` of `M·x + t`.
fn affine_row(row: &[Rat], constant: Option<&Rat>, vars: &[String]) -> String {
    let mut out = String::new();
    let mut push = |coeff: &Rat, name: Option<&str>| {
        if coeff.is_zero() {
            return;
        }
        let first = out.is_empty();
        match (coeff.is_negative(), first) {
            (true, true) => out.push('−'),
            (true, false) => out.push_str(" − "),
            (false, false) => out.push_str(" + "),
            (false, true) => {}
        }
        let mag = coeff.abs();
        match name {
            Some(v) if mag.is_one() => out.push_str(v),
            Some(v) => {
                out.push_str(&mag.to_string());
                out.push('·');
                out.push_str(v);
            }
            None => out.push_str(&mag.to_string()),
        }
    };
    for (q, v) in row.iter().zip(vars) {
        push(q, Some(v));
    }
    if let Some(t) = constant {
        push(t, None);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `(x,y) ← (2,-1); while ⋆ do (x,y) ← (…)`
pub fn pretty(lp: &Loop, vars: &[String]) -> String {
    let lhs = tuple(vars);
    let init: Vec<String> = lp.init().iter().map(|q| q.to_string()).collect();
    let m = lp.update();
    let rows: Vec<String> = (0..lp.dim())
        .map(|i| affine_row(m.row(i), lp.translation().map(|t| &t[i]), vars))
        .collect();
    format!("{lhs} ← {}; while ⋆ do {lhs} ← ({})", tuple(&init), rows.join(", "))
}

fn c_literal(q: &Rat) -> String {
    format!("Q({}, {})", q.numer(), q.denom())
}

fn c_row(row: &[Rat], constant: Option<&Rat>, vars: &[String]) -> String {
    let mut terms: Vec<String> = row
        .iter()
        .zip(vars)
        .filter(|(q, _)| !q.is_zero())
        .map(|(q, v)| format!("{} * {v}", c_literal(q)))
        .collect();
    if let Some(t) = constant.filter(|t| !t.is_zero()) {
        terms.push(c_literal(t));
    }
    if terms.is_empty() {
        terms.push(c_literal(&Rat::zero()));
    }
    terms.join(" + ")
}

/// C-like listing. `Q(p, q)` denotes the exact rational `p/q`.
pub fn c_like(lp: &Loop, vars: &[String], invariant: &str, certificate: Option<&Certificate>) -> String {
    let mut out = String::new();
    out.push_str(&format!("/* invariant: {invariant}\n"));
    if let Some(c) = certificate {
        out.push_str(&format!(" * orbit: {c}\n"));
    }
    out.push_str(" * Q(p, q) is the exact rational p/q\n */\n");
    let decls: Vec<String> = vars
        .iter()
        .zip(lp.init().iter())
        .map(|(v, q)| format!("{v} = {}", c_literal(q)))
        .collect();
    out.push_str(&format!("Q {};\n", decls.join(", ")));
    out.push_str("while (nondet()) {\n");
    let m = lp.update();
    for (i, v) in vars.iter().enumerate() {
        let rhs = c_row(m.row(i), lp.translation().map(|t| &t[i]), vars);
        out.push_str(&format!("    Q {v}_next = {rhs};\n"));
    }
    for v in vars {
        out.push_str(&format!("    {v} = {v}_next;\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    Linear,
    Affine,
}

/// The JSON loop document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDocument {
    pub kind: LoopKind,
    pub dim: usize,
    #[serde(with = "crate::exact::text::matrix")]
    pub update: Matrix,
    #[serde(with = "crate::exact::text::vector")]
    pub init: Vector,
    #[serde(
        with = "crate::exact::text::opt_vector",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub translation: Option<Vector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vars: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceStep>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("malformed loop document: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Invalid(String),
}

impl LoopDocument {
    pub fn from_loop(lp: &Loop) -> LoopDocument {
        LoopDocument {
            kind: if lp.is_affine() {
                LoopKind::Affine
            } else {
                LoopKind::Linear
            },
            dim: lp.dim(),
            update: lp.update().clone(),
            init: lp.init().clone(),
            translation: lp.translation().cloned(),
            vars: None,
            certificate: None,
            trace: None,
        }
    }

    pub fn from_synthesized(s: &SynthesizedLoop, vars: Option<Vec<String>>, with_trace: bool) -> LoopDocument {
        LoopDocument {
            vars,
            certificate: Some(s.certificate.clone()),
            trace: with_trace.then(|| s.trace.clone()),
            ..LoopDocument::from_loop(&s.body)
        }
    }

    pub fn to_loop(&self) -> Loop {
        match &self.translation {
            None => Loop::Linear(LinearLoop {
                update: self.update.clone(),
                init: self.init.clone(),
            }),
            Some(t) => Loop::Affine(AffineLoop {
                update: self.update.clone(),
                init: self.init.clone(),
                translation: t.clone(),
            }),
        }
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        let bad = |m: String| Err(SchemaError::Invalid(m));
        let d = self.dim;
        if d == 0 {
            return bad("dim must be positive".into());
        }
        if self.update.rows() != d || self.update.cols() != d {
            return bad(format!(
                "update is {}x{}, expected {d}x{d}",
                self.update.rows(),
                self.update.cols()
            ));
        }
        if self.init.dim() != d {
            return bad(format!("init has {} entries, expected {d}", self.init.dim()));
        }
        match (self.kind, &self.translation) {
            (LoopKind::Linear, Some(_)) => return bad("linear loop with a translation".into()),
            (LoopKind::Affine, None) => return bad("affine loop without a translation".into()),
            (_, Some(t)) if t.dim() != d => return bad(format!("translation has {} entries, expected {d}", t.dim())),
            _ => {}
        }
        if let Some(vars) = &self.vars {
            if vars.len() != d {
                return bad(format!("vars has {} names, expected {d}", vars.len()));
            }
            for (i, v) in vars.iter().enumerate() {
                if vars[..i].contains(v) {
                    return bad(format!("variable {v:?} repeated"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<LoopDocument, SchemaError> {
        let doc: LoopDocument = serde_json::from_str(text).map_err(|e| SchemaError::Json(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}
