//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use foliation_core::foliation::{
    check_integrability, classify_point, make_logarithmic, make_pencil, FoliationError, FoliationSpec, PointClass,
};
use foliation_core::geometry::{kernel_symplectic_check, subspace_angles, AngleMode, Subspace};
use foliation_core::holonomy::{
    holonomy_eval, invert_word, pu2_triviality, su2, su2_diagonal, PencilParameter, Representation, Word,
};
use foliation_core::perturb::{blend_perturbation, takagi_reduce, verify_key_inequality, LocalData, DEFAULT_EPS_PRIME};
use foliation_core::sampling::{sample_region, Region};
use foliation_core::scalar::{qc, rat};
use foliation_core::transversality::{local_perturbation_search, SampledMap, MODEL_BALL_RADIUS};
use foliation_core::{Covector, Poly, PolyForm, QComplex, SymplecticFrame};
use foliation_lab::report::parse_report;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type C = Complex<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_int(r: &mut ChaCha8Rng, k: i64) -> QComplex {
    qc(r.random_range(-k..=k), r.random_range(-k..=k))
}

/// Random polynomial in `n` variables of total degree ≤ `deg`, never zero.
fn random_poly(r: &mut ChaCha8Rng, n: usize, deg: u32, terms: usize) -> Poly {
    loop {
        let mut p = Poly::zero(n);
        for _ in 0..terms {
            let mut e = vec![0u32; n];
            let d = r.random_range(0..=deg);
            for _ in 0..d {
                e[r.random_range(0..n)] += 1;
            }
            p = &p + &Poly::monomial(e, gaussian_int(r, 3));
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random homogeneous polynomial of degree `deg ≥ 1`.
fn random_homogeneous(r: &mut ChaCha8Rng, n: usize, deg: u32, terms: usize) -> Poly {
    loop {
        let mut p = Poly::zero(n);
        for _ in 0..terms {
            let mut e = vec![0u32; n];
            for _ in 0..deg {
                e[r.random_range(0..n)] += 1;
            }
            p = &p + &Poly::monomial(e, gaussian_int(r, 3));
        }
        if !p.is_zero() {
            return p;
        }
    }
}

fn integrability_suite() -> Outcome {
    let mut r = rng(1);
    let mut failures = Vec::new();
    let mut pencils = 0;
    while pencils < 100 {
        let n = r.random_range(2..=4);
        let f1 = random_poly(&mut r, n, 3, 3);
        let f2 = random_poly(&mut r, n, 3, 3);
        let (a, b) = (rat(r.random_range(1..=5), r.random_range(1..=3)), rat(r.random_range(1..=5), 1));
        match make_pencil(&a, &b, &f1, &f2) {
            Err(FoliationError::ZeroForm) => continue,
            Ok(spec) => {
                pencils += 1;
                if !check_integrability(&spec).unwrap().is_integrable() {
                    failures.push(format!("pencil {pencils}"));
                }
            }
            Err(e) => failures.push(format!("pencil construction: {e}")),
        }
    }
    let mut logs = 0;
    while logs < 50 {
        let n = r.random_range(2..=4);
        let p = r.random_range(2..=4);
        let f: Vec<Poly> = (0..p).map(|_| random_poly(&mut r, n, 2, 2)).collect();
        if f.iter().any(|g| g.total_degree() == Some(0)) {
            continue;
        }
        let lambda: Vec<QComplex> = (0..p).map(|_| gaussian_int(&mut r, 4)).collect();
        match make_logarithmic(&lambda, &f) {
            Err(FoliationError::ZeroForm) => continue,
            Ok(spec) => {
                logs += 1;
                if !check_integrability(&spec).unwrap().is_integrable() {
                    failures.push(format!("logarithmic {logs}"));
                }
            }
            Err(e) => failures.push(format!("logarithmic construction: {e}")),
        }
    }
    let mut rejected = 0;
    for spec in non_integrable_forms() {
        if !check_integrability(&spec).unwrap().is_integrable() {
            rejected += 1;
        }
    }
    if rejected != 10 {
        failures.push(format!("only {rejected}/10 non-integrable forms rejected"));
    }
    outcome(failures.is_empty(), format!("100 pencils, 50 logarithmic, {rejected}/10 rejected {failures:?}"))
}

/// Contact-type forms `z_j dz_i + dz_k` and variants.
fn non_integrable_forms() -> Vec<FoliationSpec> {
    let mut out = Vec::new();
    let form = |n: usize, terms: &[(usize, Poly)]| {
        let mut coeffs = vec![Poly::zero(n); n];
        for (i, c) in terms {
            coeffs[*i] = &coeffs[*i] + c;
        }
        FoliationSpec::raw(PolyForm::holomorphic_one_form(&coeffs).unwrap()).unwrap()
    };
    let z = |n: usize, i: usize| Poly::var(n, i);
    let one = |n: usize| Poly::one(n);
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
        out.push(form(3, &[(i, z(3, j)), (k, one(3))]));
    }
    out.push(form(3, &[(0, z(3, 1).scale(&qc(2, 1))), (2, one(3).scale(&qc(2, 1)))]));
    out.push(form(3, &[(0, &z(3, 1) + &(&z(3, 0) * &z(3, 0))), (2, one(3))]));
    out.push(form(4, &[(1, z(4, 0)), (3, z(4, 2))]));
    out.push(form(4, &[(0, z(4, 1)), (3, &one(4) + &z(4, 3))]));
    out
}

fn euler_suite() -> Outcome {
    let mut r = rng(2);
    let mut bad = 0;
    let mut done = 0;
    while done < 50 {
        let n = r.random_range(2..=4);
        let (d1, d2) = (r.random_range(1..=3u32), r.random_range(1..=3u32));
        let f1 = random_homogeneous(&mut r, n, d1, 3);
        let f2 = random_homogeneous(&mut r, n, d2, 3);
        let (a, b) = (r.random_range(1..=5i64), r.random_range(1..=5i64));
        let spec = match make_pencil(&rat(a, 1), &rat(b, 1), &f1, &f2) {
            Err(FoliationError::ZeroForm) => continue,
            other => other.unwrap(),
        };
        done += 1;
        let expected = (&f1 * &f2).scale(&qc(a * d2 as i64 - b * d1 as i64, 0));
        if spec.alpha().radial_contraction().unwrap() != expected {
            bad += 1;
        }
    }
    let mut logs = 0;
    while logs < 50 {
        let n = r.random_range(2..=4);
        let p = r.random_range(2..=4);
        let degs: Vec<u32> = (0..p).map(|_| r.random_range(1..=2)).collect();
        let f: Vec<Poly> = degs.iter().map(|d| random_homogeneous(&mut r, n, *d, 2)).collect();
        let lambda: Vec<QComplex> = (0..p).map(|_| gaussian_int(&mut r, 4)).collect();
        let spec = match make_logarithmic(&lambda, &f) {
            Err(FoliationError::ZeroForm) => continue,
            other => other.unwrap(),
        };
        logs += 1;
        let total = lambda.iter().zip(&degs).fold(qc(0, 0), |acc, (l, d)| acc + l * qc(*d as i64, 0));
        let prod = f.iter().fold(Poly::one(n), |acc, g| &acc * g);
        if spec.alpha().radial_contraction().unwrap() != prod.scale(&total) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad} mismatches over 50 pencils + 50 logarithmic"))
}

fn kupka_suite() -> Outcome {
    let origin = |n: usize| vec![C::new(0.0, 0.0); n];
    let rotation = PolyForm::holomorphic_one_form(&[Poly::var(2, 1), Poly::var(2, 0).scale(&qc(-1, 0))]).unwrap();
    let radial = |n: usize| PolyForm::holomorphic_one_form(&(0..n).map(|i| Poly::var(n, i)).collect::<Vec<_>>()).unwrap();
    let classify = |form: &PolyForm, n: usize| {
        classify_point(&FoliationSpec::raw(form.clone()).unwrap(), &origin(n), 1e-9).unwrap().class
    };
    let mut fails = Vec::new();
    if classify(&rotation, 2) != PointClass::Kupka {
        fails.push("rotation".to_string());
    }
    for n in [2, 3] {
        if classify(&radial(n), n) != PointClass::DegenerateSingular {
            fails.push(format!("radial n={n}"));
        }
    }
    let mut r = rng(3);
    for k in 0..20 {
        let n = r.random_range(2..=4);
        // Φ(0) = 0 with surjective linear part: a submersion germ onto ℂ²
        let map: Vec<Poly> = loop {
            let lin: Vec<Vec<i64>> = (0..2).map(|_| (0..n).map(|_| r.random_range(-2..=2)).collect()).collect();
            let det_ok = (0..n).any(|i| (0..n).any(|j| lin[0][i] * lin[1][j] - lin[0][j] * lin[1][i] != 0));
            if !det_ok {
                continue;
            }
            break lin
                .iter()
                .map(|row| {
                    let linear = row.iter().enumerate().fold(Poly::zero(n), |acc, (i, c)| &acc + &Poly::var(n, i).scale(&qc(*c, 0)));
                    let quad = random_homogeneous(&mut r, n, 2, 2);
                    &linear + &quad
                })
                .collect();
        };
        let (model, expected) = if k % 2 == 0 {
            (&rotation, PointClass::Kupka)
        } else {
            (&radial(2), PointClass::DegenerateSingular)
        };
        let pulled = model.pullback(&map).unwrap();
        let got = classify(&pulled, n);
        if got != expected {
            fails.push(format!("pullback {k}: {got} != {expected}"));
        }
    }
    outcome(fails.is_empty(), format!("canonical models + 20 pullbacks {fails:?}"))
}

fn f64_rational(x: f64) -> QComplex {
    Complex::new(foliation_core::scalar::rational_from_f64(x).unwrap(), rat(0, 1))
}

fn cqc(z: C) -> QComplex {
    Complex::new(
        foliation_core::scalar::rational_from_f64(z.re).unwrap(),
        foliation_core::scalar::rational_from_f64(z.im).unwrap(),
    )
}

/// `f = ½ zᵀAz + small cubic` with `A = U diag(σ) Uᵀ`, `σ ≥ 0.5`, `U` a real
/// rotation; noise is a random anti-holomorphic quadratic.
fn random_local(r: &mut ChaCha8Rng) -> (LocalData, f64) {
    let n = r.random_range(2..=3);
    let sigmas: Vec<f64> = (0..n).map(|_| r.random_range(0.5..2.0)).collect();
    let g = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    let q = g.qr().q();
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(sigmas.clone())) * q.transpose();
    let mut f = Poly::zero(2 * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = vec![0u32; 2 * n];
            e[i] += 1;
            e[j] += 1;
            f = &f + &Poly::monomial(e, f64_rational(0.5 * a[(i, j)]));
        }
    }
    for _ in 0..2 {
        let mut e = vec![0u32; 2 * n];
        for _ in 0..3 {
            e[r.random_range(0..n)] += 1;
        }
        f = &f + &Poly::monomial(e, cqc(C::new(r.random_range(-0.1..0.1), r.random_range(-0.1..0.1))));
    }
    let mut noise = Poly::zero(2 * n);
    for _ in 0..2 {
        let mut e = vec![0u32; 2 * n];
        e[n + r.random_range(0..n)] += 1;
        e[n + r.random_range(0..n)] += 1;
        noise = &noise + &Poly::monomial(e, cqc(C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))));
    }
    let kappa = r.random_range(0.0..0.01);
    let mut h = Poly::one(2 * n);
    let mut e = vec![0u32; 2 * n];
    e[r.random_range(0..n)] = 1;
    h = &h + &Poly::monomial(e, cqc(C::new(r.random_range(-0.2..0.2), r.random_range(-0.2..0.2))));
    let center = vec![C::new(0.0, 0.0); n];
    let smin = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
    (LocalData::new(center, 0.1, &f, &noise, kappa, &h).unwrap(), smin)
}

fn key_inequality_suite() -> Outcome {
    let mut r = rng(4);
    let mut fails = Vec::new();
    let mut worst = f64::INFINITY;
    for k in 0..20 {
        let (data, smin) = random_local(&mut r);
        let res = blend_perturbation(&data, DEFAULT_EPS_PRIME).unwrap();
        let tak_min = res.takagi.sigma.iter().copied().fold(f64::INFINITY, f64::min);
        if tak_min < 0.5 - 1e-9 || (tak_min - smin).abs() > 1e-9 {
            fails.push(format!("instance {k}: sigma_min {tak_min} vs {smin}"));
        }
        let frame = SymplecticFrame::standard(data.n());
        let s = verify_key_inequality(&res, &frame, 10_000, 100 + k).unwrap();
        worst = worst.min(s.inner_pass_fraction.min(s.annulus_pass_fraction));
        if !s.passed() {
            fails.push(format!("instance {k}: inner {} annulus {}", s.inner_pass_fraction, s.annulus_pass_fraction));
        }
    }
    // weak Hessian diag(1, 1e-3) with strong anti-holomorphic noise
    let weak = &Poly::monomial(vec![2, 0, 0, 0], foliation_core::scalar::qc_ratio((1, 2), (0, 1)))
        + &Poly::monomial(vec![0, 2, 0, 0], foliation_core::scalar::qc_ratio((1, 2000), (0, 1)));
    let noise = Poly::monomial(vec![0, 0, 0, 2], qc(1, 0));
    let data = LocalData::new(vec![C::new(0.0, 0.0); 2], 0.1, &weak, &noise, 0.1, &Poly::one(4)).unwrap();
    let res = blend_perturbation(&data, 0.5e-3).unwrap();
    let s = verify_key_inequality(&res, &SymplecticFrame::standard(2), 10_000, 7).unwrap();
    let failure_shown = !s.passed();
    if !failure_shown {
        fails.push("constructed failure case passed".into());
    }
    outcome(
        fails.is_empty(),
        format!(
            "20 instances min pass fraction {worst}; failure case inner {:.4} annulus {:.4} {fails:?}",
            s.inner_pass_fraction, s.annulus_pass_fraction
        ),
    )
}

fn support_suite() -> Outcome {
    let mut r = rng(5);
    let mut mismatches = 0;
    let mut total = 0;
    for k in 0..5 {
        let (data, _) = random_local(&mut r);
        let res = blend_perturbation(&data, DEFAULT_EPS_PRIME).unwrap();
        let c = data.c();
        let pts = sample_region(&Region::shell(data.center().to_vec(), 2.0 * c * (1.0 + 1e-12), 10.0 * c), 100, k).unwrap();
        for p in pts {
            total += 1;
            let (x, y) = (res.alpha_hat(&p), data.alpha(&p));
            let bitwise = x.a.iter().chain(&x.b).zip(y.a.iter().chain(&y.b)).all(|(u, v)| {
                u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()
            });
            if !bitwise {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} of {total} probes differ"))
}

fn takagi_suite() -> Outcome {
    let mut r = rng(6);
    let mut worst_rec = 0.0f64;
    let mut worst_h = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(1..=6);
        let g = DMatrix::from_fn(n, n, |_, _| C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let a = &g + g.transpose();
        let t = takagi_reduce(&a).unwrap();
        worst_rec = worst_rec.max((t.reconstruct() - &a).norm() / a.norm());
        for _ in 0..100 {
            let z: Vec<C> = (0..n).map(|_| C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
            let zv = DVector::from_vec(z.clone());
            let h = (zv.transpose() * &a * &zv)[(0, 0)] * 0.5;
            let w = t.coordinate_map(&z);
            let hw = w.iter().map(|x| x * x).sum::<C>() * 0.5;
            worst_h = worst_h.max((h - hw).norm());
        }
    }
    outcome(
        worst_rec <= 1e-9 && worst_h <= 1e-9,
        format!("max relative reconstruction {worst_rec:.2e}, max |H - sum w^2/2| {worst_h:.2e}"),
    )
}

/// Test-side model maps with hand-written derivatives.
struct ModelMap {
    n: usize,
    m: usize,
    eval: fn(&[C]) -> Vec<C>,
    jac: fn(&[C]) -> DMatrix<C>,
}

fn model_maps() -> Vec<(&'static str, ModelMap, Vec<String>)> {
    vec![
        (
            "z^2",
            ModelMap { n: 1, m: 1, eval: |z| vec![z[0] * z[0]], jac: |z| DMatrix::from_element(1, 1, z[0] * 2.0) },
            vec!["z1^2".into()],
        ),
        (
            "(z1^2, z2)",
            ModelMap {
                n: 2,
                m: 2,
                eval: |z| vec![z[0] * z[0], z[1]],
                jac: |z| DMatrix::from_row_slice(2, 2, &[z[0] * 2.0, C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]),
            },
            vec!["z1^2".into(), "z2".into()],
        ),
        (
            "(z1 z2, z1^2 - z2^2)",
            ModelMap {
                n: 2,
                m: 2,
                eval: |z| vec![z[0] * z[1], z[0] * z[0] - z[1] * z[1]],
                jac: |z| DMatrix::from_row_slice(2, 2, &[z[1], z[0], z[0] * 2.0, -z[1] * 2.0]),
            },
            vec!["z1 z2".into(), "z1^2 - z2^2".into()],
        ),
    ]
}

/// Exhaustive offset grid: a uniform grid of about `10⁴` points on the
/// cube `[-δ, δ]^{2m}` restricted to the ball `|w| ≤ δ`.
fn oracle_best(map: &ModelMap, pts: &[Vec<C>], delta: f64) -> f64 {
    let probes: Vec<(Vec<C>, f64)> = pts
        .iter()
        .map(|p| {
            let sv = (map.jac)(p).singular_values();
            (
                (map.eval)(p),
                sv.iter().copied().fold(f64::INFINITY, f64::min),
            )
        })
        .collect();
    let dims = 2 * map.m;
    let per_axis = (10_000f64).powf(1.0 / dims as f64).round() as usize;
    let axis: Vec<f64> = (0..per_axis).map(|k| -delta + 2.0 * delta * k as f64 / (per_axis - 1) as f64).collect();
    let total = per_axis.pow(dims as u32);
    (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut w = Vec::with_capacity(map.m);
            for _ in 0..map.m {
                let re = axis[idx % per_axis];
                idx /= per_axis;
                let im = axis[idx % per_axis];
                idx /= per_axis;
                w.push(C::new(re, im));
            }
            (w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= delta).then_some(w)
        })
        .map(|w| {
            probes
                .iter()
                .map(|(v, s)| v.iter().zip(&w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt().max(*s))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

fn w_search_suite() -> Outcome {
    let delta = 0.1;
    let samples = 4096;
    let seed = 8;
    let mut fails = Vec::new();
    let mut lines = Vec::new();
    for (name, map, comps) in model_maps() {
        let polys: Vec<Poly> = comps.iter().map(|s| foliation_lab::expr::parse_holomorphic(s, map.n).unwrap()).collect();
        assert_eq!(polys.len(), map.m);
        let t = SampledMap::from_polys(Region::centered_ball(map.n, MODEL_BALL_RADIUS), &polys).unwrap();
        let res = local_perturbation_search(&t, delta, 256, samples, seed).unwrap();
        let pts = sample_region(&Region::centered_ball(map.n, MODEL_BALL_RADIUS), samples, seed).unwrap();
        let best = oracle_best(&map, &pts, delta);
        let wn = res.w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        lines.push(format!("{name}: {:.4} vs grid {:.4}", res.achieved, best));
        if res.achieved < 0.9 * best || wn > delta * (1.0 + 1e-12) {
            fails.push(name);
        }
    }
    outcome(fails.is_empty(), format!("{} {fails:?}", lines.join("; ")))
}

/// Test-side oracle: real kernel of the covector and rank of `ω₀` on it.
fn oracle_kernel_rank(c: &Covector) -> usize {
    let n = c.dim();
    let mut rows = DMatrix::<f64>::zeros(2, 2 * n);
    for i in 0..n {
        let dx = c.a[i] + c.b[i];
        let dy = (c.a[i] - c.b[i]) * C::new(0.0, 1.0);
        rows[(0, i)] = dx.re;
        rows[(1, i)] = dx.im;
        rows[(0, n + i)] = dy.re;
        rows[(1, n + i)] = dy.im;
    }
    let full = rows.transpose() * &rows;
    let eig = full.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let kernel = DMatrix::from_fn(2 * n, 2 * n - 2, |i, k| eig.eigenvectors[(i, order[k])]);
    let mut omega = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    let restricted = kernel.transpose() * omega * &kernel;
    restricted.singular_values().iter().filter(|s| **s > 1e-9).count()
}

fn symplectic_suite() -> Outcome {
    let results: Vec<(usize, usize, usize)> = [2usize, 3, 4]
        .par_iter()
        .map(|&n| {
            let frame = SymplecticFrame::standard(n);
            let mut r = rng(9 + n as u64);
            let (mut hits, mut counter, mut disagreements) = (0, 0, 0);
            for _ in 0..33_334 {
                let mut draw = || -> Vec<C> { (0..n).map(|_| C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect() };
                let c = Covector::new(draw(), draw());
                let check = kernel_symplectic_check(&c, &frame).unwrap();
                if check.criterion {
                    hits += 1;
                    let oracle = oracle_kernel_rank(&c);
                    if oracle != 2 * n - 2 {
                        counter += 1;
                    }
                    if !check.symplectic || check.omega_rank != oracle {
                        disagreements += 1;
                    }
                }
            }
            (hits, counter, disagreements)
        })
        .collect();
    let hits: usize = results.iter().map(|x| x.0).sum();
    let counter: usize = results.iter().map(|x| x.1).sum();
    let dis: usize = results.iter().map(|x| x.2).sum();
    outcome(
        counter == 0 && dis == 0,
        format!("100002 covectors, {hits} satisfy the criterion, {counter} counterexamples, {dis} oracle disagreements"),
    )
}

fn angle_suite() -> Outcome {
    let mut r = rng(10);
    let mut violations = 0;
    for _ in 0..1000 {
        let d = r.random_range(4..=8);
        let du = r.random_range(1..d);
        let dv = r.random_range(1..d);
        let dw = r.random_range(dv..=d);
        let m = DMatrix::from_fn(d, du + dw, |_, _| r.random_range(-1.0..1.0));
        let u = Subspace::span(&m.columns(0, du).into_owned());
        let w = Subspace::span(&m.columns(du, dw).into_owned());
        let v = Subspace::span(&m.columns(du, dv).into_owned());
        let av = subspace_angles(&u, &v, AngleMode::MinTransversal).unwrap();
        let aw = subspace_angles(&u, &w, AngleMode::MinTransversal).unwrap();
        if av > aw + 1e-9 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations over 1000 triples"))
}

fn holonomy_suite() -> Outcome {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    let names = ["a", "b", "c"];
    for _ in 0..1000 {
        let images: Vec<(String, _)> = names
            .iter()
            .map(|g| {
                let t = r.random_range(0.0..std::f64::consts::FRAC_PI_2);
                let a = C::from_polar(t.cos(), r.random_range(0.0..6.3));
                let b = C::from_polar(t.sin(), r.random_range(0.0..6.3));
                (g.to_string(), su2(a, b))
            })
            .collect();
        let rho = Representation::new(images, vec![]).unwrap();
        let len = r.random_range(0..12);
        let word: Word = (0..len)
            .map(|_| (names[r.random_range(0..3)].to_string(), if r.random_bool(0.5) { 1 } else { -1 }))
            .collect();
        let split = r.random_range(0..=len);
        let (w1, w2) = word.split_at(split);
        let point = |r: &mut ChaCha8Rng| {
            PencilParameter::new(C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)), C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
                .unwrap()
        };
        let (p, q) = (point(&mut r), point(&mut r));
        let whole = holonomy_eval(&rho, &word, &p).unwrap();
        let nested = holonomy_eval(&rho, w1, &holonomy_eval(&rho, w2, &p).unwrap()).unwrap();
        let back = holonomy_eval(&rho, &[word.clone(), invert_word(&word)].concat(), &p).unwrap();
        let iso = (p.chordal_distance(&q) - whole.chordal_distance(&holonomy_eval(&rho, &word, &q).unwrap())).abs();
        worst = worst.max(whole.chordal_distance(&nested)).max(back.chordal_distance(&p)).max(iso);
    }
    let g: Word = vec![("g".into(), 1)];
    let minus = Representation::new([("g".to_string(), su2(C::new(-1.0, 0.0), C::new(0.0, 0.0)))], vec![]).unwrap();
    let diag = Representation::new([("g".to_string(), su2_diagonal(std::f64::consts::FRAC_PI_2))], vec![]).unwrap();
    let trivial = Representation::<f64>::trivial(&["g"]);
    let words = [g.clone(), vec![("g".into(), 1), ("g".into(), 1)]];
    let v1 = pu2_triviality(&minus, &words).unwrap();
    let v2 = pu2_triviality(&diag, &words).unwrap();
    let v3 = pu2_triviality(&trivial, &words).unwrap();
    let cases = v1.trivial_in_pu2 && !v2.trivial_in_pu2 && v2.witness.as_ref() == Some(&g) && v3.trivial_in_pu2;
    outcome(worst <= 1e-12 && cases, format!("max composition/inverse/isometry defect {worst:.2e}; canonical cases {}", if cases { "ok" } else { "wrong" }))
}

fn cli_suite() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_foliation-lab");
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut payloads = Vec::new();
    for d in &dirs {
        let status = Command::new(bin)
            .arg("run")
            .arg(fixtures.join("reference.json"))
            .args(["--seed", "42", "--format", "json", "--out"])
            .arg(d.path())
            .output()
            .unwrap();
        if status.status.code() != Some(0) {
            return outcome(false, format!("reference run exited {:?}", status.status.code()));
        }
        let text = std::fs::read_to_string(d.path().join("report.json")).unwrap();
        // timestamps live only in the metadata block
        let bytes: Vec<&str> = text.lines().filter(|l| !l.contains("_unix_ms")).collect();
        let bytes = bytes.join("\n");
        parse_report(&text).unwrap();
        payloads.push(bytes);
    }
    let identical = payloads[0] == payloads[1];
    let mut rejected = 0;
    for name in ["bad_syntax.json", "unknown_task.json", "unresolved_ref.json"] {
        let o = Command::new(bin).arg("validate").arg(fixtures.join(name)).output().unwrap();
        if o.status.code() == Some(1) {
            rejected += 1;
        }
    }
    outcome(identical && rejected == 3, format!("reports identical: {identical}; {rejected}/3 malformed fixtures rejected"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 11] = [
        ("exact integrability suite", integrability_suite, Some(Duration::from_secs(120))),
        ("Euler/projectivizability identities", euler_suite, None),
        ("Kupka classification", kupka_suite, None),
        ("key inequality", key_inequality_suite, Some(Duration::from_secs(60))),
        ("support exactness", support_suite, None),
        ("Takagi round trip", takagi_suite, None),
        ("w-search vs exhaustive grid", w_search_suite, Some(Duration::from_secs(120))),
        ("symplectic-criterion implication", symplectic_suite, None),
        ("angle monotonicity", angle_suite, None),
        ("holonomy algebra", holonomy_suite, None),
        ("CLI determinism and validation", cli_suite, None),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > *limit {
                o.pass = false;
                o.detail.push_str(&format!(" (over the {}s budget)", limit.as_secs()));
            }
        }
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} [{:.1}s] {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
