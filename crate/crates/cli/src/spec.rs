//! Spec files: JSON with `//` and `/* */` comments, version 1.
//!
//! ```text
//! {
//!   "version": 1,
//!   "seed": 42,                       // optional
//!   "objects": { "rot": { "type": "pencil", "n": 2, "a": 1, "b": 1, "f1": "z1", "f2": "z2" } },
//!   "tasks": [ { "kind": "check_integrability", "object": "rot" } ]
//! }
//! ```

use std::collections::BTreeMap;

use foliation_core::foliation::{make_factored, make_logarithmic, make_pencil, FoliationSpec};
use foliation_core::forms::parse_basis_label;
use foliation_core::holonomy::{parse_word, su2_diagonal, Word};
use foliation_core::perturb::LocalData;
use foliation_core::sampling::Region;
use foliation_core::scalar::Coefficient;
use foliation_core::{Poly, PolyForm, QComplex, Representation, SymplecticFrame};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex;
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expr::{parse_constant, parse_formal, parse_holomorphic, ExprError};

type C64 = Complex<f64>;

pub const SUPPORTED_VERSION: u64 = 1;

pub const TASK_KINDS: [&str; 10] = [
    "check_integrability",
    "classify",
    "find_singular",
    "regularity",
    "bad_set",
    "perturb",
    "key_inequality",
    "w_search",
    "holonomy",
    "pu2_test",
];

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("unsupported spec version {0} (expected {SUPPORTED_VERSION})")]
    Version(u64),
    #[error("task {index}: unknown task kind {kind:?}")]
    UnknownTask { index: usize, kind: String },
    #[error("task {index} ({kind}): unresolved object reference {name:?}")]
    UnresolvedRef { index: usize, kind: String, name: String },
    #[error("task {index} ({kind}): object {name:?} is a {found}, expected a {expected}")]
    WrongObject {
        index: usize,
        kind: String,
        name: String,
        found: &'static str,
        expected: &'static str,
    },
    #[error("object {name:?}: {msg}")]
    BadObject { name: String, msg: String },
    #[error("task {index} ({kind}): {msg}")]
    BadParams { index: usize, kind: String, msg: String },
}

/// Removes comments, keeping line structure so parse errors point at the
/// right line.
pub fn strip_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut chars = src.chars().peekable();
    let mut in_string = false;
    while let Some(c) = chars.next() {
        if in_string {
            out.push(c);
            if c == '\\' {
                if let Some(n) = chars.next() {
                    out.push(n);
                }
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match (c, chars.peek()) {
            ('"', _) => {
                in_string = true;
                out.push(c);
            }
            ('/', Some('/')) => {
                for n in chars.by_ref() {
                    if n == '\n' {
                        out.push('\n');
                        break;
                    }
                }
            }
            ('/', Some('*')) => {
                chars.next();
                let mut prev = ' ';
                for n in chars.by_ref() {
                    if n == '\n' {
                        out.push('\n');
                    }
                    if prev == '*' && n == '/' {
                        break;
                    }
                    prev = n;
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// A number or a constant expression such as `"1/2 + i"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn exact(&self) -> Result<QComplex, ExprError> {
        match self {
            Num::Float(x) => parse_constant(&format!("{x:e}")),
            Num::Text(s) => parse_constant(s),
        }
    }

    pub fn float(&self) -> Result<C64, ExprError> {
        Ok(self.exact()?.to_complex::<f64>())
    }
}

pub fn point(v: &[Num]) -> Result<Vec<C64>, ExprError> {
    v.iter().map(Num::float).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawMatrix {
    Entries([[Num; 2]; 2]),
    Angle { diagonal_angle: f64 },
}

fn default_zero() -> String {
    "0".into()
}

fn default_one() -> String {
    "1".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RawObject {
    Pencil {
        n: usize,
        a: Num,
        b: Num,
        f1: String,
        f2: String,
    },
    Logarithmic {
        n: usize,
        lambda: Vec<Num>,
        f: Vec<String>,
    },
    Raw {
        n: usize,
        /// Basis label (`dz1`, `dzbar2`, ...) to coefficient in `(z, z̄)`.
        coefficients: BTreeMap<String, String>,
    },
    Factored {
        n: usize,
        h: String,
        f: String,
    },
    Representation {
        generators: BTreeMap<String, RawMatrix>,
        #[serde(default)]
        relations: Vec<String>,
    },
    Local {
        n: usize,
        #[serde(default)]
        center: Option<Vec<Num>>,
        c: f64,
        f: String,
        #[serde(default = "default_zero")]
        noise: String,
        #[serde(default)]
        kappa: f64,
        #[serde(default = "default_one")]
        h: String,
    },
    Map {
        n: usize,
        components: Vec<String>,
    },
}

/// A named object of a spec file.
#[derive(Debug, Clone)]
pub enum Object {
    Foliation(FoliationSpec),
    Representation(Representation),
    Local(LocalData),
    Map { n: usize, components: Vec<Poly> },
}

impl Object {
    pub fn type_name(&self) -> &'static str {
        match self {
            Object::Foliation(_) => "foliation",
            Object::Representation(_) => "representation",
            Object::Local(_) => "local",
            Object::Map { .. } => "map",
        }
    }
}

fn build_object(name: &str, raw: RawObject) -> Result<Object, SpecError> {
    let bad = |msg: String| SpecError::BadObject {
        name: name.to_string(),
        msg,
    };
    let e = |x: &dyn std::fmt::Display| bad(x.to_string());
    let real = |v: &Num| -> Result<foliation_core::Rational, SpecError> {
        let q = v.exact().map_err(|x| e(&x))?;
        if !q.im.is_zero() {
            return Err(bad("pencil exponents must be real".into()));
        }
        Ok(q.re)
    };
    Ok(match raw {
        RawObject::Pencil { n, a, b, f1, f2 } => {
            let f1 = parse_holomorphic(&f1, n).map_err(|x| e(&x))?;
            let f2 = parse_holomorphic(&f2, n).map_err(|x| e(&x))?;
            Object::Foliation(make_pencil(&real(&a)?, &real(&b)?, &f1, &f2).map_err(|x| e(&x))?)
        }
        RawObject::Logarithmic { n, lambda, f } => {
            let lambda: Vec<QComplex> = lambda.iter().map(|l| l.exact()).collect::<Result<_, _>>().map_err(|x| e(&x))?;
            let f: Vec<Poly> = f.iter().map(|s| parse_holomorphic(s, n)).collect::<Result<_, _>>().map_err(|x| e(&x))?;
            Object::Foliation(make_logarithmic(&lambda, &f).map_err(|x| e(&x))?)
        }
        RawObject::Raw { n, coefficients } => {
            let mut terms = Vec::new();
            for (label, s) in &coefficients {
                let idx = parse_basis_label(n, label).map_err(|x| e(&x))?;
                terms.push((vec![idx], parse_formal(s, n).map_err(|x| e(&x))?));
            }
            let alpha = PolyForm::from_terms(n, 1, terms).map_err(|x| e(&x))?;
            Object::Foliation(FoliationSpec::raw(alpha).map_err(|x| e(&x))?)
        }
        RawObject::Factored { n, h, f } => {
            let h = parse_holomorphic(&h, n).map_err(|x| e(&x))?;
            let f = parse_holomorphic(&f, n).map_err(|x| e(&x))?;
            Object::Foliation(make_factored(&h, &f).map_err(|x| e(&x))?)
        }
        RawObject::Representation { generators, relations } => {
            let mut images = Vec::new();
            for (g, m) in generators {
                let m = match m {
                    RawMatrix::Angle { diagonal_angle } => su2_diagonal(diagonal_angle),
                    RawMatrix::Entries(rows) => {
                        let f = |v: &Num| v.float().map_err(|x| e(&x));
                        Matrix2::new(f(&rows[0][0])?, f(&rows[0][1])?, f(&rows[1][0])?, f(&rows[1][1])?)
                    }
                };
                images.push((g, m));
            }
            let relations: Vec<Word> = relations.iter().map(|w| parse_word(w)).collect::<Result<_, _>>().map_err(|x| e(&x))?;
            Object::Representation(Representation::new(images, relations).map_err(|x| e(&x))?)
        }
        RawObject::Local {
            n,
            center,
            c,
            f,
            noise,
            kappa,
            h,
        } => {
            let center = match center {
                Some(v) => point(&v).map_err(|x| e(&x))?,
                None => vec![C64::new(0.0, 0.0); n],
            };
            if center.len() != n {
                return Err(bad(format!("center has {} entries, expected {n}", center.len())));
            }
            let f = parse_formal(&f, n).map_err(|x| e(&x))?;
            let noise = parse_formal(&noise, n).map_err(|x| e(&x))?;
            let h = parse_formal(&h, n).map_err(|x| e(&x))?;
            Object::Local(LocalData::new(center, c, &f, &noise, kappa, &h).map_err(|x| e(&x))?)
        }
        RawObject::Map { n, components } => {
            if n == 0 || components.is_empty() {
                return Err(bad("map needs n >= 1 and at least one component".into()));
            }
            let components = components
                .iter()
                .map(|s| parse_formal(s, n))
                .collect::<Result<_, _>>()
                .map_err(|x| e(&x))?;
            Object::Map { n, components }
        }
    })
}

/// Sampling region parameters: a ball (`center`, `radius`) or a box in real
/// coordinates (`lo`, `hi`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RegionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
}

impl RegionParams {
    pub fn region(&self, n: usize) -> Result<Region, String> {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => {
                if self.center.is_some() || self.radius.is_some() {
                    return Err("region: give either center/radius or lo/hi".into());
                }
                if lo.len() != 2 * n || hi.len() != 2 * n {
                    return Err(format!("region box needs {} bounds per side", 2 * n));
                }
                Ok(Region::Box {
                    lo: lo.clone(),
                    hi: hi.clone(),
                })
            }
            (None, None) => {
                let center = match &self.center {
                    Some(c) => point(c).map_err(|e| e.to_string())?,
                    None => vec![C64::new(0.0, 0.0); n],
                };
                if center.len() != n {
                    return Err(format!("region center needs {n} entries"));
                }
                let r = self.radius.unwrap_or(1.0);
                if !(r > 0.0 && r.is_finite()) {
                    return Err("region radius must be positive".into());
                }
                Ok(Region::ball(center, r))
            }
            _ => Err("region box needs both lo and hi".into()),
        }
    }
}

fn frame(n: usize, j: &Option<Vec<Vec<f64>>>) -> Result<SymplecticFrame, String> {
    match j {
        None => Ok(SymplecticFrame::standard(n)),
        Some(rows) => {
            if rows.len() != 2 * n || rows.iter().any(|r| r.len() != 2 * n) {
                return Err(format!("complex_structure must be {0}x{0}", 2 * n));
            }
            let m = DMatrix::from_fn(2 * n, 2 * n, |i, k| rows[i][k]);
            SymplecticFrame::with_complex_structure(n, m).map_err(|e| e.to_string())
        }
    }
}

fn d_tol() -> f64 {
    1e-9
}
fn d_samples() -> usize {
    2000
}
fn d_key_samples() -> usize {
    10_000
}
fn d_eps_prime() -> f64 {
    foliation_core::perturb::DEFAULT_EPS_PRIME
}
fn d_lo() -> f64 {
    -1.0
}
fn d_hi() -> f64 {
    1.0
}
fn d_grid() -> usize {
    3
}
fn d_newton() -> usize {
    60
}
fn d_candidates() -> usize {
    256
}
fn d_w_samples() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmptyParams {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyParams {
    pub point: Vec<Num>,
    #[serde(default = "d_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindSingularParams {
    #[serde(default = "d_lo")]
    pub lo: f64,
    #[serde(default = "d_hi")]
    pub hi: f64,
    #[serde(default = "d_grid")]
    pub grid: usize,
    #[serde(default = "d_newton")]
    pub newton_iters: usize,
    #[serde(default = "d_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityParams {
    #[serde(default)]
    pub kupka_points: Vec<Vec<Num>>,
    pub gamma: f64,
    #[serde(default)]
    pub region: RegionParams,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_structure: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BadSetParams {
    #[serde(default)]
    pub region: RegionParams,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_structure: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbParams {
    #[serde(default = "d_eps_prime")]
    pub eps_prime: f64,
    #[serde(default)]
    pub probes: Vec<Vec<Num>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyInequalityParams {
    #[serde(default = "d_eps_prime")]
    pub eps_prime: f64,
    #[serde(default = "d_key_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_structure: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WSearchParams {
    pub delta: f64,
    #[serde(default = "d_candidates")]
    pub candidates: usize,
    #[serde(default = "d_w_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Also report the η-transversality estimate of `t − w` at this `η`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyParams {
    pub word: String,
    /// Affine value `λ`, or a homogeneous pair `[z1, z2]`.
    pub lambda: LambdaParam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaParam {
    Pair([Num; 2]),
    Affine(Num),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pu2Params {
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskParams {
    CheckIntegrability,
    Classify(ClassifyParams),
    FindSingular(FindSingularParams),
    Regularity(RegularityParams),
    BadSet(BadSetParams),
    Perturb(PerturbParams),
    KeyInequality(KeyInequalityParams),
    WSearch(WSearchParams),
    Holonomy(HolonomyParams),
    Pu2Test(Pu2Params),
}

impl TaskParams {
    /// Parameters with defaults applied, for the report.
    pub fn resolved(&self) -> Value {
        let v = match self {
            TaskParams::CheckIntegrability => serde_json::to_value(EmptyParams {}),
            TaskParams::Classify(p) => serde_json::to_value(p),
            TaskParams::FindSingular(p) => serde_json::to_value(p),
            TaskParams::Regularity(p) => serde_json::to_value(p),
            TaskParams::BadSet(p) => serde_json::to_value(p),
            TaskParams::Perturb(p) => serde_json::to_value(p),
            TaskParams::KeyInequality(p) => serde_json::to_value(p),
            TaskParams::WSearch(p) => serde_json::to_value(p),
            TaskParams::Holonomy(p) => serde_json::to_value(p),
            TaskParams::Pu2Test(p) => serde_json::to_value(p),
        };
        v.expect("params serialize")
    }

    fn expected_object(&self) -> &'static str {
        match self {
            TaskParams::Perturb(_) | TaskParams::KeyInequality(_) => "local",
            TaskParams::WSearch(_) => "map",
            TaskParams::Holonomy(_) | TaskParams::Pu2Test(_) => "representation",
            _ => "foliation",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Task {
    pub index: usize,
    pub kind: String,
    pub object: String,
    pub params: TaskParams,
    /// Frame resolved from `complex_structure`, where the task takes one.
    pub frame: Option<SymplecticFrame>,
    pub region: Option<Region>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    kind: String,
    object: String,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    version: u64,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    objects: BTreeMap<String, Value>,
    #[serde(default)]
    tasks: Vec<RawTask>,
}

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub version: u64,
    pub seed: Option<u64>,
    pub objects: BTreeMap<String, Object>,
    pub tasks: Vec<Task>,
    /// `sha256:<hex>` of the file bytes.
    pub digest: String,
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

fn params<T: DeserializeOwned>(v: &Option<Value>, index: usize, kind: &str) -> Result<T, SpecError> {
    let v = v.clone().unwrap_or(Value::Object(Default::default()));
    serde_json::from_value(v).map_err(|e| SpecError::BadParams {
        index,
        kind: kind.to_string(),
        msg: e.to_string(),
    })
}

fn check_csv_name(name: &Option<String>) -> Result<(), String> {
    match name {
        Some(n) if n.is_empty() || n.contains(['/', '\\']) || n.starts_with('.') => {
            Err(format!("csv must be a plain file name, got {n:?}"))
        }
        _ => Ok(()),
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let digest = format!("sha256:{:x}", Sha256::digest(text.as_bytes()));
    let raw: RawSpec = parse_json(&strip_comments(text))?;
    if raw.version != SUPPORTED_VERSION {
        return Err(SpecError::Version(raw.version));
    }
    let mut objects = BTreeMap::new();
    for (name, v) in raw.objects {
        let o: RawObject = serde_json::from_value(v).map_err(|e| SpecError::BadObject {
            name: name.clone(),
            msg: e.to_string(),
        })?;
        let built = build_object(&name, o)?;
        objects.insert(name, built);
    }
    let mut tasks = Vec::new();
    for (index, t) in raw.tasks.into_iter().enumerate() {
        let kind = t.kind.clone();
        let p = match kind.as_str() {
            "check_integrability" => {
                let _: EmptyParams = params(&t.params, index, &kind)?;
                TaskParams::CheckIntegrability
            }
            "classify" => TaskParams::Classify(params(&t.params, index, &kind)?),
            "find_singular" => TaskParams::FindSingular(params(&t.params, index, &kind)?),
            "regularity" => TaskParams::Regularity(params(&t.params, index, &kind)?),
            "bad_set" => TaskParams::BadSet(params(&t.params, index, &kind)?),
            "perturb" => TaskParams::Perturb(params(&t.params, index, &kind)?),
            "key_inequality" => TaskParams::KeyInequality(params(&t.params, index, &kind)?),
            "w_search" => TaskParams::WSearch(params(&t.params, index, &kind)?),
            "holonomy" => TaskParams::Holonomy(params(&t.params, index, &kind)?),
            "pu2_test" => TaskParams::Pu2Test(params(&t.params, index, &kind)?),
            _ => return Err(SpecError::UnknownTask { index, kind }),
        };
        let obj = objects.get(&t.object).ok_or_else(|| SpecError::UnresolvedRef {
            index,
            kind: kind.clone(),
            name: t.object.clone(),
        })?;
        if obj.type_name() != p.expected_object() {
            return Err(SpecError::WrongObject {
                index,
                kind,
                name: t.object,
                found: obj.type_name(),
                expected: p.expected_object(),
            });
        }
        let bad = |msg: String| SpecError::BadParams {
            index,
            kind: kind.clone(),
            msg,
        };
        let n = match obj {
            Object::Foliation(s) => s.n(),
            Object::Local(l) => l.n(),
            Object::Map { n, .. } => *n,
            Object::Representation(_) => 0,
        };
        let (frame, region) = match &p {
            TaskParams::Regularity(r) => (Some(frame(n, &r.complex_structure).map_err(bad)?), Some(r.region.region(n).map_err(bad)?)),
            TaskParams::BadSet(b) => {
                check_csv_name(&b.csv).map_err(bad)?;
                (Some(frame(n, &b.complex_structure).map_err(bad)?), Some(b.region.region(n).map_err(bad)?))
            }
            TaskParams::KeyInequality(k) => (Some(frame(n, &k.complex_structure).map_err(bad)?), None),
            TaskParams::WSearch(w) => {
                check_csv_name(&w.csv).map_err(bad)?;
                (None, None)
            }
            TaskParams::Holonomy(h) => {
                parse_word(&h.word).map_err(|e| bad(e.to_string()))?;
                (None, None)
            }
            TaskParams::Pu2Test(w) => {
                for word in &w.words {
                    parse_word(word).map_err(|e| bad(e.to_string()))?;
                }
                (None, None)
            }
            _ => (None, None),
        };
        tasks.push(Task {
            index,
            kind,
            object: t.object,
            params: p,
            frame,
            region,
        });
    }
    Ok(SpecFile {
        version: raw.version,
        seed: raw.seed,
        objects,
        tasks,
        digest,
    })
}

pub fn load_spec(path: &std::path::Path) -> Result<SpecFile, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_keep_lines() {
        let src = "{\n  // note\n  \"a\": \"x // not a comment\", /* multi\nline */ \"b\": 1\n}";
        let out = strip_comments(src);
        assert_eq!(out.lines().count(), src.lines().count());
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["a"], "x // not a comment");
        assert_eq!(v["b"], 1);
    }

    #[test]
    fn minimal_spec() {
        let s = parse_spec(
            r#"{ "version": 1,
                 "objects": { "rot": { "type": "pencil", "n": 2, "a": 1, "b": "1", "f1": "z1", "f2": "z2" } },
                 "tasks": [ { "kind": "check_integrability", "object": "rot" } ] }"#,
        )
        .unwrap();
        assert_eq!(s.tasks.len(), 1);
        assert!(s.digest.starts_with("sha256:"));
    }

    #[test]
    fn rejections() {
        let unknown = r#"{ "version": 1, "objects": { "r": { "type": "pencil", "n": 2, "a": 1, "b": 1, "f1": "z1", "f2": "z2" } },
                          "tasks": [ { "kind": "frobnicate", "object": "r" } ] }"#;
        let err = parse_spec(unknown).unwrap_err();
        assert!(err.to_string().contains("frobnicate"));

        let unresolved = r#"{ "version": 1, "tasks": [ { "kind": "classify", "object": "nope", "params": { "point": [0, 0] } } ] }"#;
        assert!(matches!(parse_spec(unresolved), Err(SpecError::UnresolvedRef { .. })));

        let syntax = "{\n \"version\": 1,\n \"tasks\": [ ,\n}";
        match parse_spec(syntax) {
            Err(SpecError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_spec(r#"{ "version": 2 }"#), Err(SpecError::Version(2))));
    }

    #[test]
    fn object_kinds() {
        let s = parse_spec(
            r#"{ "version": 1, "objects": {
                "log": { "type": "logarithmic", "n": 2, "lambda": [1, "-1/2", "1/2"], "f": ["z1", "z1 - z2", "z2"] },
                "raw": { "type": "raw", "n": 3, "coefficients": { "dz1": "z2", "dz3": "1" } },
                "fac": { "type": "factored", "n": 2, "h": "1 + z1", "f": "z1 z2" },
                "rho": { "type": "representation", "generators": { "g": [["0", "-1"], ["1", "0"]], "h": { "diagonal_angle": 1.0 } }, "relations": ["g g g g"] },
                "loc": { "type": "local", "n": 1, "c": 0.1, "f": "z1^2", "noise": "zbar1^2", "kappa": 0.01 },
                "t": { "type": "map", "n": 2, "components": ["z1 z2", "z1^2 - z2^2"] }
            } }"#,
        )
        .unwrap();
        let kinds: Vec<&str> = s.objects.values().map(|o| o.type_name()).collect();
        assert_eq!(kinds, ["foliation", "local", "foliation", "foliation", "representation", "map"]);
    }
}
