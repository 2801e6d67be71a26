//! Executes the tasks of a spec file.

use std::time::{SystemTime, UNIX_EPOCH};

use foliation_core::foliation::{check_integrability, classify_point, find_singular_points, Integrability, PointReport, SingularSearch};
use foliation_core::forms::basis_label;
use foliation_core::holonomy::{holonomy_eval, parse_word, pu2_triviality, Word};
use foliation_core::perturb::{blend_perturbation, verify_key_inequality};
use foliation_core::sampling::{sample_region, to_real, Region};
use foliation_core::scalar::format_rational;
use foliation_core::transversality::{
    bad_set_scan, format_17, local_perturbation_search, regularity_report, rows_to_csv, sample_map,
    transversality_estimate, FloatOneForm, OffsetScorer, RegularityParams as CoreRegularity, SampledMap,
    MODEL_BALL_RADIUS,
};
use foliation_core::{Covector, PencilParameter, Poly, PolyForm, QComplex};
use num_complex::Complex;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::report::{num, Metadata, Outputs, Report, TaskResult, TaskStatus, TOOL_VERSION};
use crate::spec::{point, LambdaParam, Object, SpecFile, Task, TaskParams};

type C64 = Complex<f64>;

/// Bad points listed individually in a report before truncation.
const MAX_LISTED_POINTS: usize = 50;

/// Probes used for the exact-support check of `perturb`.
const SUPPORT_PROBES: usize = 100;

pub fn complex(z: C64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn complex_vec(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| complex(*z)).collect())
}

fn covector(c: &Covector) -> Value {
    json!({ "dz": complex_vec(&c.a), "dzbar": complex_vec(&c.b) })
}

fn exact_coeff(q: &QComplex) -> String {
    match (q.re.is_zero(), q.im.is_zero()) {
        (_, true) => format_rational(&q.re),
        (true, false) => format!("{}i", format_rational(&q.im)),
        _ => format!("{} + {}i", format_rational(&q.re), format_rational(&q.im)),
    }
}

/// Text form of a polynomial in the formal variables `(z, z̄)` of `ℂⁿ`,
/// readable by the spec-file parser.
pub fn format_formal(p: &Poly, n: usize) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = p
        .terms()
        .map(|(e, c)| {
            let mut parts = vec![format!("({})", exact_coeff(c))];
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = if v < n { format!("z{}", v + 1) } else { format!("zbar{}", v - n + 1) };
                parts.push(if k == 1 { name } else { format!("{name}^{k}") });
            }
            parts.join("*")
        })
        .collect();
    terms.join(" + ")
}

pub fn format_form(f: &PolyForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let n = f.n();
    let terms: Vec<String> = f
        .terms()
        .map(|(idx, c)| {
            let basis: Vec<String> = idx.iter().map(|&k| basis_label(n, k)).collect();
            format!("[{}] {}", format_formal(c, n), basis.join("^"))
        })
        .collect();
    terms.join(" + ")
}

fn point_report(r: &PointReport) -> Value {
    Outputs::new()
        .set("point", complex_vec(&r.point))
        .set("class", r.class.to_string())
        .float("alpha_norm", r.alpha_norm)
        .set("dalpha_rank", r.dalpha_rank)
        .set("radical_dim", r.radical_dim)
        .build()
}

type TaskOutcome = Result<(String, Value, Vec<(String, String)>), String>;

fn run_task(spec: &SpecFile, task: &Task, seed: u64) -> TaskOutcome {
    let obj = &spec.objects[&task.object];
    let e = |x: &dyn std::fmt::Display| x.to_string();
    match (&task.params, obj) {
        (TaskParams::CheckIntegrability, Object::Foliation(f)) => {
            let res = check_integrability(f).map_err(|x| e(&x))?;
            let mut out = Outputs::new()
                .set("provenance", f.provenance().kind())
                .set("twist", f.twist().map_or(Value::Null, Value::from))
                .set("projectivizable", f.projectivizable().map_or(Value::Null, Value::from));
            let summary = match &res {
                Integrability::Integrable => {
                    out = out.set("integrable", true).set("witness", Value::Null);
                    "integrable".to_string()
                }
                Integrability::NotIntegrable { witness } => {
                    out = out.set("integrable", false).set("witness", format_form(witness));
                    "NOT integrable (alpha ^ dalpha != 0)".to_string()
                }
            };
            Ok((summary, out.build(), vec![]))
        }
        (TaskParams::Classify(p), Object::Foliation(f)) => {
            let pt = point(&p.point).map_err(|x| e(&x))?;
            let r = classify_point(f, &pt, p.tol).map_err(|x| e(&x))?;
            Ok((format!("{} (rank {})", r.class, r.dalpha_rank), point_report(&r), vec![]))
        }
        (TaskParams::FindSingular(p), Object::Foliation(f)) => {
            let search = SingularSearch {
                lo: p.lo,
                hi: p.hi,
                grid: p.grid,
                newton_iters: p.newton_iters,
                tol: p.tol,
            };
            let pts = find_singular_points(f, &search).map_err(|x| e(&x))?;
            let classes: Vec<String> = pts.iter().map(|r| r.class.to_string()).collect();
            let summary = format!("{} singular point(s) [{}]", pts.len(), classes.join(", "));
            let out = Outputs::new()
                .set("count", pts.len())
                .set("points", Value::Array(pts.iter().map(point_report).collect()))
                .build();
            Ok((summary, out, vec![]))
        }
        (TaskParams::Regularity(p), Object::Foliation(f)) => {
            let kupka: Vec<Vec<C64>> = p.kupka_points.iter().map(|k| point(k)).collect::<Result<_, _>>().map_err(|x| e(&x))?;
            let params = CoreRegularity {
                kupka_points: kupka,
                gamma: p.gamma,
                region: task.region.clone().expect("region resolved at load"),
                samples: p.samples,
                seed,
                tol: p.tol,
            };
            let frame = task.frame.as_ref().expect("frame resolved at load");
            let r = regularity_report(f, frame, &params).map_err(|x| e(&x))?;
            let listed: Vec<Value> = r.bad_points.iter().take(MAX_LISTED_POINTS).map(|b| complex_vec(&b.point)).collect();
            let out = Outputs::new()
                .float("gamma", r.gamma)
                .float("epsilon", r.epsilon)
                .float("kupka_margin", r.kupka_margin)
                .float("leaf_angle_max", r.leaf_angle_max)
                .set("bad_point_count", r.bad_points.len())
                .set("bad_points", Value::Array(listed))
                .set("notes", r.notes.clone())
                .set("samples", r.samples)
                .build();
            let summary = format!(
                "epsilon {:.3e}, leaf angle max {:.3e}, {} bad point(s)",
                r.epsilon,
                r.leaf_angle_max,
                r.bad_points.len()
            );
            Ok((summary, out, vec![]))
        }
        (TaskParams::BadSet(p), Object::Foliation(f)) => {
            let field = FloatOneForm::new(f.alpha()).map_err(|x| e(&x))?;
            let region = task.region.as_ref().expect("region resolved at load");
            let frame = task.frame.as_ref().expect("frame resolved at load");
            let bad = bad_set_scan(&field, frame, region, p.samples, seed).map_err(|x| e(&x))?;
            let mut files = Vec::new();
            if let Some(name) = &p.csv {
                let dim = 2 * f.n();
                let mut text: String = (1..=dim).map(|k| format!("x{k},")).collect();
                text.push_str("norm_10,norm_01\n");
                for b in &bad {
                    let row: Vec<String> = to_real(&b.point).into_iter().chain([b.norm_10, b.norm_01]).map(format_17).collect();
                    text.push_str(&row.join(","));
                    text.push('\n');
                }
                files.push((name.clone(), text));
            }
            let listed: Vec<Value> = bad
                .iter()
                .take(MAX_LISTED_POINTS)
                .map(|b| json!({ "point": complex_vec(&b.point), "norm_10": num(b.norm_10), "norm_01": num(b.norm_01) }))
                .collect();
            let out = Outputs::new()
                .set("count", bad.len())
                .float("fraction", bad.len() as f64 / p.samples as f64)
                .set("points", Value::Array(listed))
                .set("samples", p.samples)
                .build();
            Ok((format!("{} bad point(s) of {} samples", bad.len(), p.samples), out, files))
        }
        (TaskParams::Perturb(p), Object::Local(data)) => {
            let res = blend_perturbation(data, p.eps_prime).map_err(|x| e(&x))?;
            let n = data.n();
            let hessian: Vec<Value> = (0..n).map(|i| Value::Array((0..n).map(|j| complex(res.hessian[(i, j)])).collect())).collect();
            let sigma_min = res.takagi.sigma.iter().copied().fold(f64::INFINITY, f64::min);
            let shell = Region::shell(data.center().to_vec(), 2.0 * data.c(), 4.0 * data.c());
            let support = sample_region(&shell, SUPPORT_PROBES, seed).map_err(|x| e(&x))?;
            let exact = support.iter().filter(|z| res.alpha_hat(z) == data.alpha(z)).count();
            let probes: Vec<Value> = p
                .probes
                .iter()
                .map(|q| {
                    let z = point(q).map_err(|x| e(&x))?;
                    if z.len() != n {
                        return Err(format!("probe has {} coordinates, expected {n}", z.len()));
                    }
                    Ok(json!({ "point": complex_vec(&z), "alpha_hat": covector(&res.alpha_hat(&z)), "alpha": covector(&data.alpha(&z)) }))
                })
                .collect::<Result<_, String>>()?;
            let (h_min, h_max) = data.h_bounds();
            let out = Outputs::new()
                .set("hessian", Value::Array(hessian))
                .set("takagi_sigma", Value::Array(res.takagi.sigma.iter().map(|s| num(*s)).collect()))
                .float("h_min", h_min)
                .float("h_max", h_max)
                .float("kappa", data.kappa())
                .float("c", data.c())
                .set("support_probes", SUPPORT_PROBES)
                .set("support_exact", exact)
                .set("probes", Value::Array(probes))
                .set("notes", data.notes().to_vec())
                .build();
            let summary = format!("takagi sigma_min {sigma_min:.3e}; support exact at {exact}/{SUPPORT_PROBES} probes");
            Ok((summary, out, vec![]))
        }
        (TaskParams::KeyInequality(p), Object::Local(data)) => {
            let res = blend_perturbation(data, p.eps_prime).map_err(|x| e(&x))?;
            let frame = task.frame.as_ref().expect("frame resolved at load");
            let s = verify_key_inequality(&res, frame, p.samples, seed).map_err(|x| e(&x))?;
            let out = Outputs::new()
                .float("inner_pass_fraction", s.inner_pass_fraction)
                .float("annulus_pass_fraction", s.annulus_pass_fraction)
                .float("min_margin", s.min_margin)
                .float("min_relative_margin", s.min_relative_margin)
                .set("passed", s.passed())
                .set("samples", s.samples)
                .build();
            let summary = format!(
                "inner {:.4}, annulus {:.4}: {}",
                s.inner_pass_fraction,
                s.annulus_pass_fraction,
                if s.passed() { "pass" } else { "FLAGGED" }
            );
            Ok((summary, out, vec![]))
        }
        (TaskParams::WSearch(p), Object::Map { n, components }) => {
            let ball = Region::centered_ball(*n, MODEL_BALL_RADIUS);
            let t = SampledMap::from_polys(ball.clone(), components).map_err(|x| e(&x))?;
            let r = local_perturbation_search(&t, p.delta, p.candidates, p.samples, seed).map_err(|x| e(&x))?;
            let baseline = OffsetScorer::new(&t, p.samples, seed).map_err(|x| e(&x))?.score(&vec![C64::new(0.0, 0.0); *n]);
            let shifted: Vec<_> = components
                .iter()
                .zip(&r.w)
                .map(|(c, w)| {
                    let f = c.to_float::<f64>();
                    f.checked_sub(&foliation_core::polycore::SparsePoly::constant(f.n_vars(), *w))
                })
                .collect::<Result<_, _>>()
                .map_err(|x| e(&x))?;
            let shifted = SampledMap::from_polys(ball, &shifted).map_err(|x| e(&x))?;
            let mut out = Outputs::new()
                .set("w", complex_vec(&r.w))
                .float("achieved", r.achieved)
                .float("baseline", baseline)
                .set("evaluations", r.evaluations)
                .set("budget_exhausted", r.budget_exhausted)
                .float("model_ball_radius", MODEL_BALL_RADIUS);
            if let Some(eta) = p.eta {
                let est = transversality_estimate(&shifted, eta, p.samples, seed).map_err(|x| e(&x))?;
                out = out.set("estimate", json!({ "eta": num(eta), "value": num(est.value), "hits": est.hits }));
            }
            let mut files = Vec::new();
            if let Some(name) = &p.csv {
                let rows = sample_map(&shifted, p.samples, seed).map_err(|x| e(&x))?;
                files.push((name.clone(), rows_to_csv(&rows)));
            }
            let summary = format!("achieved {:.4e} (w = 0: {:.4e})", r.achieved, baseline);
            Ok((summary, out.build(), files))
        }
        (TaskParams::Holonomy(p), Object::Representation(rho)) => {
            let word = parse_word(&p.word).map_err(|x| e(&x))?;
            let lam = match &p.lambda {
                LambdaParam::Affine(l) => PencilParameter::affine(l.float().map_err(|x| e(&x))?),
                LambdaParam::Pair([a, b]) => {
                    PencilParameter::new(a.float().map_err(|x| e(&x))?, b.float().map_err(|x| e(&x))?).map_err(|x| e(&x))?
                }
            };
            let out_lam = holonomy_eval(rho, &word, &lam).map_err(|x| e(&x))?;
            let affine = |l: &PencilParameter| l.lambda().map_or(Value::String("inf".into()), complex);
            let summary = match out_lam.lambda() {
                Some(z) => format!("lambda -> {:.6} {:+.6}i", z.re, z.im),
                None => "lambda -> infinity".into(),
            };
            let out = Outputs::new()
                .set("input", complex_vec(&[lam.z1, lam.z2]))
                .set("output", complex_vec(&[out_lam.z1, out_lam.z2]))
                .set("input_affine", affine(&lam))
                .set("output_affine", affine(&out_lam))
                .float("chordal_displacement", lam.chordal_distance(&out_lam))
                .build();
            Ok((summary, out, vec![]))
        }
        (TaskParams::Pu2Test(p), Object::Representation(rho)) => {
            let words: Vec<Word> = p.words.iter().map(|w| parse_word(w)).collect::<Result<_, _>>().map_err(|x| e(&x))?;
            let v = pu2_triviality(rho, &words).map_err(|x| e(&x))?;
            let witness = v.witness.as_ref().map(|w| {
                w.iter()
                    .map(|(g, k)| if *k == 1 { g.clone() } else { format!("{g}^-1") })
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            let summary = match &witness {
                None => format!("trivial in PU(2) on {} word(s)", words.len()),
                Some(w) => format!("nontrivial in PU(2), witness {w:?}"),
            };
            let out = Outputs::new()
                .set("trivial_in_pu2", v.trivial_in_pu2)
                .set("witness", witness.map_or(Value::Null, Value::from))
                .float("max_residual", v.max_residual)
                .set("words_checked", words.len())
                .build();
            Ok((summary, out, vec![]))
        }
        _ => Err(format!("object {:?} has the wrong type for {}", task.object, task.kind)),
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

/// Runs every task in order. The returned files are `(name, contents)`
/// CSV dumps requested by tasks.
pub fn run(spec: &SpecFile, seed: u64) -> (Report, Vec<(String, String)>) {
    let started = now_ms();
    let mut results = Vec::new();
    let mut files = Vec::new();
    for task in &spec.tasks {
        let task_seed = match &task.params {
            TaskParams::Regularity(p) => p.seed,
            TaskParams::BadSet(p) => p.seed,
            TaskParams::KeyInequality(p) => p.seed,
            TaskParams::WSearch(p) => p.seed,
            _ => None,
        }
        .unwrap_or(seed);
        let (status, summary, outputs, error) = match run_task(spec, task, task_seed) {
            Ok((summary, outputs, mut f)) => {
                files.append(&mut f);
                (TaskStatus::Ok, summary, outputs, None)
            }
            Err(msg) => (TaskStatus::Failed, String::new(), Value::Null, Some(msg)),
        };
        results.push(TaskResult {
            index: task.index,
            kind: task.kind.clone(),
            object: Some(task.object.clone()),
            params: task.params.resolved(),
            seed: task_seed,
            status,
            summary,
            outputs,
            error,
        });
    }
    let mut warnings = Vec::new();
    for (name, obj) in &spec.objects {
        match obj {
            Object::Foliation(f) => warnings.extend(f.warnings().iter().map(|w| format!("{name}: {w}"))),
            Object::Local(l) => warnings.extend(l.notes().iter().map(|w| format!("{name}: {w}"))),
            _ => {}
        }
    }
    let report = Report {
        tool_version: TOOL_VERSION.into(),
        spec_digest: spec.digest.clone(),
        seed,
        results,
        warnings,
        metadata: Metadata {
            started_unix_ms: started,
            finished_unix_ms: now_ms(),
        },
    };
    (report, files)
}
