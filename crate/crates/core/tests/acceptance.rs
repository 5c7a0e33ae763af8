//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use fracjordan::quadforms::{fractional_form, QuadratureSpec};
use fracjordan::specialfn::{hardy_const, li_const, ExponentTriple};
use fracjordan::testfuncs::{weighted_norm, RadialProfile};
use fracjordan::transforms::{fourier_power_pairing, hankel_value, spectral_form};
use fracjordan::verify::{
    check_a2_identity, check_li_identity, default_triples, kernel_positivity, log_grid, positivity_scan,
    random_profiles, sharpness_probe, DEFAULT_SEED,
};

type Outcome = Result<String, String>;

/// Gamma by upward shift and the Stirling series.
fn gamma_oracle(x: f64) -> f64 {
    let mut shift = 1.0;
    let mut z = x;
    while z < 12.0 {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    ((z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series).exp() / shift
}

fn sphere_oracle(n: u32) -> f64 {
    2.0 * PI.powf(0.5 * n as f64) / gamma_oracle(0.5 * n as f64)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.1}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let c = hardy_const(2.0, 3).map_err(|e| e.to_string())?;
    ensure((c - 0.25).abs() <= 1e-12, || format!("C(2,3) = {c}"))?;
    for (a, n) in [(1.0, 2u32), (1.0, 3), (2.0, 3), (0.5, 4)] {
        let l = li_const(a, n as f64 - a, n).map_err(|e| e.to_string())?;
        ensure(l == 0.0, || format!("L({a}, n-a, {n}) = {l}"))?;
    }
    let mut count = 0;
    for n in 3..=6u32 {
        let mut b = 0.5;
        while b <= n as f64 - 2.0 + 1e-12 {
            let l = li_const(2.0, b, n).map_err(|e| e.to_string())?;
            let want = 0.25 * ((n as f64 - 2.0).powi(2) - b * b);
            ensure((l - want).abs() <= 1e-10, || format!("L(2,{b},{n}) = {l}, want {want}"))?;
            count += 1;
            b += 0.5;
        }
    }
    timed(Duration::from_secs(1), start)?;
    Ok(format!("C(2,3) = 1/4, four vanishing constants, {count} a = 2 constants"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in 2..=5u32 {
        for alpha in [0.5, 1.0, 1.5, 2.0, 2.5] {
            if alpha >= n as f64 {
                continue;
            }
            let r = fourier_power_pairing(alpha, n).map_err(|e| e.to_string())?;
            ensure(r.passed && r.rel_discrepancy <= 1e-12, || format!("alpha={alpha} n={n}: {r:?}"))?;
            // int |x|^{-alpha} e^{-|x|^2/2} dx by the radial moment
            let want = sphere_oracle(n) * 2f64.powf(0.5 * (n as f64 - alpha) - 1.0) * gamma_oracle(0.5 * (n as f64 - alpha));
            ensure((r.lhs.value - want).abs() <= 1e-12 * want, || format!("alpha={alpha} n={n}: {} vs {want}", r.lhs.value))?;
            count += 1;
        }
    }
    timed(Duration::from_secs(1), start)?;
    Ok(format!("{count} (alpha, n) pairs agree to 1e-12"))
}

fn criterion_3() -> Outcome {
    let g = RadialProfile::gaussian();
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for n in 1..=3u32 {
        for a in [0.5, 1.0, 1.5] {
            let start = Instant::now();
            let s = spectral_form(&g, a, n).map_err(|e| e.to_string())?;
            let f = fractional_form(&g, a, n, &spec).map_err(|e| e.to_string())?;
            let rel = (f.value - s.value).abs() / s.value;
            ensure(rel <= 1e-3, || format!("a={a} n={n}: fractional {} spectral {}", f.value, s.value))?;
            let closed = PI.powf(0.5 * n as f64) * gamma_oracle(0.5 * (n as f64 + a)) / gamma_oracle(0.5 * n as f64);
            let rel_closed = (s.value - closed).abs() / closed;
            ensure(rel_closed <= 1e-6, || format!("a={a} n={n}: spectral {} closed {closed}", s.value))?;
            timed(Duration::from_secs(60), start)?;
            worst = worst.max(rel);
            worst_closed = worst_closed.max(rel_closed);
        }
    }
    Ok(format!("worst cross-route {worst:.1e}, worst spectral vs closed form {worst_closed:.1e}"))
}

fn criterion_4() -> Outcome {
    let coarse = QuadratureSpec { panels_per_unit: 1, gl_order: 4, ..QuadratureSpec::default() };
    let refined = coarse.refined();
    let profiles = [RadialProfile::gaussian(), RadialProfile::gaussian_poly(vec![0.0, 0.0, 1.0]).unwrap()];
    let mut worst_ratio: f64 = 0.0;
    for (a, b, n) in [(1.0, 1.0, 3u32), (0.5, 1.5, 4), (1.0, 0.5, 2), (1.5, 1.0, 3)] {
        let t = ExponentTriple::new(a, b, n).map_err(|e| e.to_string())?;
        for p in &profiles {
            let start = Instant::now();
            let r = check_li_identity(p, &t, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
            ensure(r.passed && r.rel_discrepancy <= 1e-2, || format!("({a},{b},{n}) {}: {r:?}", p.describe()))?;
            let r0 = check_li_identity(p, &t, &coarse).map_err(|e| e.to_string())?;
            let r1 = check_li_identity(p, &t, &refined).map_err(|e| e.to_string())?;
            let floor = 1e-12;
            let ratio = r1.abs_discrepancy / r0.abs_discrepancy;
            ensure(ratio <= 0.7 || r0.rel_discrepancy <= floor, || {
                format!(
                    "({a},{b},{n}) {}: discrepancy {:.3e} -> {:.3e} under refinement",
                    p.describe(),
                    r0.abs_discrepancy,
                    r1.abs_discrepancy
                )
            })?;
            worst_ratio = worst_ratio.max(ratio);
            timed(Duration::from_secs(300), start)?;
        }
    }
    Ok(format!("8 cases pass at 1e-2; worst refinement ratio {worst_ratio:.3}"))
}

fn criterion_5() -> Outcome {
    let g = RadialProfile::gaussian();
    let spec = QuadratureSpec::default();
    for (b, n) in [(1.0, 3u32), (1.0, 5), (2.0, 5)] {
        let r = check_a2_identity(&g, b, n, &spec).map_err(|e| e.to_string())?;
        ensure(r.passed && r.rel_discrepancy <= 1e-3, || format!("b={b} n={n}: {r:?}"))?;
        let c = r.condition("hardy-bound").ok_or("missing hardy-bound condition")?;
        let margin = c.lhs - c.rhs;
        // (phi, |q|^{-2} phi) for phi = r^{b/2} e^{-r^2/2}: |S| Gamma((b+n-2)/2) / 2
        let norm = sphere_oracle(n) * 0.5 * gamma_oracle(0.5 * (b + n as f64 - 2.0));
        let expected = 0.25 * ((n as f64 - 2.0).powi(2) - b * b) * norm;
        if b == n as f64 - 2.0 {
            ensure(margin.abs() <= 1e-2 * c.lhs.abs(), || format!("b=n-2: margin {margin} not zero"))?;
        } else {
            ensure((margin - expected).abs() <= 1e-2 * expected, || format!("b={b} n={n}: margin {margin} vs {expected}"))?;
        }
        let direct = weighted_norm(&g, b - 2.0, n).map_err(|e| e.to_string())?;
        ensure((direct - norm).abs() <= 1e-10 * norm, || format!("weighted norm {direct} vs {norm}"))?;
    }
    Ok("three cases agree at 1e-3; equality at b = n - 2, margin reproduced otherwise".into())
}

fn criterion_6() -> Outcome {
    let family = random_profiles(10, DEFAULT_SEED);
    let spec = QuadratureSpec::default();
    let triples = default_triples();
    for named in [(2.0, 1.0, 3u32), (1.0, 1.0, 3), (1.0, 1.0, 2)] {
        ensure(triples.iter().any(|t| (t.a, t.b, t.n) == named), || format!("{named:?} missing from the grid"))?;
    }
    let mut total = 0;
    let mut with_bound = 0;
    let mut min_ratio = f64::INFINITY;
    for t in &triples {
        for r in positivity_scan(&family, t, &spec) {
            ensure(r.passed, || format!("({}, {}, {}): {r:?}", t.a, t.b, t.n))?;
            ensure(r.lhs.value > -r.lhs.error, || format!("negative form: {r:?}"))?;
            if let Some(c) = r.condition("weighted-hardy-bound") {
                ensure(c.lhs >= c.rhs - c.abs_tolerance, || format!("bound violated: {c:?}"))?;
                with_bound += 1;
            }
            let norm = weighted_norm(r.params.profile.as_ref().unwrap(), t.b - t.a, t.n);
            if let Ok(norm) = norm {
                min_ratio = min_ratio.min(r.lhs.value / norm);
            }
            total += 1;
        }
    }
    Ok(format!(
        "{total} reports over {} triples positive, {with_bound} with the weighted Hardy bound; smallest quotient {min_ratio:.3}",
        triples.len()
    ))
}

fn criterion_7() -> Outcome {
    let grid = log_grid(1e-3, 1e3, 1000);
    let mut critical = 0;
    let mut count = 0;
    for t in default_triples() {
        let r = kernel_positivity(t.a, t.b, t.n, &grid).map_err(|e| e.to_string())?;
        ensure(r.passed && r.lhs.value >= 0.0, || format!("({}, {}, {}): {r:?}", t.a, t.b, t.n))?;
        let at_one = r.condition("zero-at-one").ok_or("missing zero-at-one")?;
        ensure(at_one.lhs == 0.0, || format!("f(1) = {}", at_one.lhs))?;
        if t.b == t.n as f64 - t.a {
            let z = r.condition("identically-zero").ok_or("missing identically-zero")?;
            ensure(z.lhs == 0.0, || format!("max |f| = {} at b = n - a", z.lhs))?;
            critical += 1;
        }
        // the numerator evaluated directly from its four powers
        let c = 0.5 * (t.n as f64 - t.a);
        for &y in &[0.01f64, 0.5, 3.0, 200.0] {
            let direct: f64 = y.powf(c) + y.powf(-c) - y.powf(0.5 * t.b) - y.powf(-0.5 * t.b);
            let got = fracjordan::verify::kernel_numerator(y, t.a, t.b, t.n);
            ensure((got - direct).abs() <= 1e-12 * (y.powf(c) + y.powf(-c)), || format!("f({y}) = {got} vs {direct}"))?;
        }
        count += 1;
    }
    Ok(format!("{count} triples non-negative on 1000 points, {critical} critical triples identically zero"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let t = ExponentTriple::new(1.0, 1.0, 3).map_err(|e| e.to_string())?;
    let reports = sharpness_probe(&t, &[10.0, 100.0, 1000.0], &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    let q: Vec<f64> = reports.iter().map(|r| r.lhs.value).collect();
    ensure(reports.iter().all(|r| r.passed), || format!("{reports:?}"))?;
    ensure(q[0] > q[1] && q[1] > q[2] && q[2] > 0.5, || format!("Q = {q:?}"))?;
    ensure(q[2] - 0.5 <= 0.05, || format!("Q(1000) - 1/2 = {}", q[2] - 0.5))?;
    timed(Duration::from_secs(600), start)?;
    Ok(format!("Q(10) = {:.6}, Q(100) = {:.6}, Q(1000) = {:.6}", q[0], q[1], q[2]))
}

fn criterion_9() -> Outcome {
    let g = RadialProfile::gaussian();
    let mut worst: f64 = 0.0;
    for n in 1..=4u32 {
        for rho in log_grid(1e-2, 10.0, 61) {
            let got = hankel_value(&g, n, rho).map_err(|e| e.to_string())?;
            let want = (-0.5 * rho * rho).exp();
            // relative where representable, otherwise at the cancellation floor
            ensure((got - want).abs() <= 1e-6 * want + 1e-14, || format!("n={n} rho={rho}: {got} vs {want}"))?;
            if want > 1e-8 {
                worst = worst.max((got - want).abs() / want);
            }
        }
    }
    // Parseval on seeded polynomial profiles of degree up to 6
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut worst_parseval: f64 = 0.0;
    for k in 0..6 {
        let degree = 1 + k;
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = 1 + (k as u32 % 4);
        let p = RadialProfile::gaussian_poly(coeffs.clone()).map_err(|e| e.to_string())?;
        // |S| sum c_i c_j Gamma((i+j+n)/2) / 2
        let mut norm = 0.0;
        for (i, ci) in coeffs.iter().enumerate() {
            for (j, cj) in coeffs.iter().enumerate() {
                norm += ci * cj * 0.5 * gamma_oracle(0.5 * (i + j + n as usize) as f64);
            }
        }
        norm *= sphere_oracle(n);
        let s = spectral_form(&p, 0.0, n).map_err(|e| e.to_string())?;
        let rel = (s.value - norm).abs() / norm;
        ensure(rel <= 1e-8, || format!("Parseval {coeffs:?} n={n}: {} vs {norm}", s.value))?;
        worst_parseval = worst_parseval.max(rel);
    }
    Ok(format!("fixed point worst relative error {worst:.1e}; Parseval worst {worst_parseval:.1e}"))
}

fn run_cli(args: &[&str], workers: Option<&str>) -> (i32, String, Duration) {
    let start = Instant::now();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fracjordan"));
    cmd.args(args);
    if let Some(w) = workers {
        cmd.env("FRACJORDAN_WORKERS", w);
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), start.elapsed())
}

fn strip_runtime(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("runtime_ms");
            m.values_mut().for_each(strip_runtime);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_runtime),
        _ => {}
    }
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let (code, _, took) = run_cli(&["report-all", "--out", first.to_str().unwrap(), "--format", "csv"], None);
    ensure(code == 0, || format!("report-all exit {code}"))?;
    ensure(took < Duration::from_secs(600), || format!("report-all took {:.0}s", took.as_secs_f64()))?;
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(first.join("summary.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    ensure(summary["failed"] == 0 && summary["schema"] == 1, || format!("summary {summary}"))?;

    let mut reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(first.join("reports.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    for r in reports.as_array().ok_or("reports.json is not an array")? {
        for key in ["schema", "check_name", "params", "lhs", "rhs", "rel_discrepancy", "tolerance", "passed", "runtime_ms"] {
            ensure(r.get(key).is_some(), || format!("report lacks `{key}`"))?;
        }
        ensure(r["lhs"]["value"].is_f64() && r["lhs"]["error"].is_f64(), || "lhs lacks value/error".into())?;
        ensure(r["rhs"]["value"].is_f64() && r["rhs"]["error"].is_f64(), || "rhs lacks value/error".into())?;
    }

    let (code, _, _) = run_cli(&["report-all", "--out", second.to_str().unwrap(), "--format", "csv"], Some("1"));
    ensure(code == 0, || format!("second report-all exit {code}"))?;
    let mut again: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(second.join("reports.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    strip_runtime(&mut reports);
    strip_runtime(&mut again);
    ensure(
        serde_json::to_string(&reports).unwrap() == serde_json::to_string(&again).unwrap(),
        || "reruns differ beyond runtime_ms".into(),
    )?;

    let cutoff = r#"{"family":"PowerCutoff","gamma_exp":1.0,"cutoff_scale":1000}"#;
    let cases: [(&[&str], i32); 6] = [
        (&["check", "li-identity", "--a", "1", "--b", "1", "--n", "3", "--profile", "gaussian"], 0),
        (&["check", "kernel-positivity", "--a", "1", "--b", "1", "--n", "3"], 0),
        (&["check", "li-identity", "--a", "1", "--b", "1", "--n", "3", "--ppu", "1", "--gl-order", "4", "--tolerance", "1e-9"], 1),
        (&["check", "fractional", "--a", "2", "--n", "3"], 2),
        (&["constants", "--a", "0", "--b", "1", "--n", "3"], 2),
        (&["check", "fractional", "--a", "1", "--n", "3", "--profile", cutoff], 3),
    ];
    for (args, want) in cases {
        let (code, _, _) = run_cli(args, None);
        ensure(code == want, || format!("{args:?}: exit {code}, expected {want}"))?;
    }
    let (code, text, _) = run_cli(&["check", "li-identity", "--a", "1", "--b", "1", "--n", "3"], None);
    ensure(code == 0, || format!("li-identity exit {code}"))?;
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    ensure(report["schema"] == 1 && report["passed"] == true, || format!("report {report}"))?;
    Ok(format!(
        "report-all exit 0 in {:.0}s with {} passed; reruns identical; exit codes 0/1/2/3 as specified",
        took.as_secs_f64(),
        summary["passed"]
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("constants", criterion_1),
        ("Fourier convention", criterion_2),
        ("cross-route form agreement", criterion_3),
        ("ground-state identity", criterion_4),
        ("a = 2 identity", criterion_5),
        ("positivity", criterion_6),
        ("kernel positivity", criterion_7),
        ("sharpness", criterion_8),
        ("transform properties", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
