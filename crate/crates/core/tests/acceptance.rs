//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p faultsel --test acceptance`.

mod common;

use common::*;
use faultsel::pipeline::{run_pipeline, EvalReport, Method, PipelineConfig, Route};
use faultsel::report::{comparison_table_csv, detail_csv};
use faultsel::synthdata::{generate_cylinder, generate_gear, CylinderGenParams, GearGenParams, DEFAULT_DATA_SEED};
use std::time::{Duration, Instant};

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> (bool, String) {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let (ok, msg) = match result {
        Ok(m) => (true, m),
        Err(m) => (false, m),
    };
    let time = format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
    let note = if in_time { time } else { format!("{time}, over budget") };
    (ok && in_time, format!("{msg} [{note}]"))
}

fn all(checks: Vec<Check>) -> Check {
    let mut parts = Vec::new();
    for c in checks {
        parts.push(c?);
    }
    Ok(parts.join("; "))
}

fn mean_at(reports: &[EvalReport], method: Method, k: usize) -> f64 {
    reports
        .iter()
        .find(|r| r.method == method && r.k == k)
        .map(|r| r.mean_accuracy)
        .unwrap_or(f64::NAN)
}

fn series(reports: &[EvalReport], method: Method, ks: &[usize]) -> Vec<f64> {
    ks.iter().map(|&k| mean_at(reports, method, k)).collect()
}

fn fmt_series(v: &[f64]) -> String {
    v.iter().map(|a| format!("{a:.2}")).collect::<Vec<_>>().join("/")
}

const KS: [usize; 4] = [3, 5, 7, 10];

fn gear_reports(route: Route) -> Vec<EvalReport> {
    let ds = generate_gear(&GearGenParams::default(), DEFAULT_DATA_SEED).expect("gear data");
    let cfg = PipelineConfig {
        route,
        ..PipelineConfig::default()
    };
    run_pipeline(&ds, &cfg).expect("gear pipeline")
}

fn cylinder_reports(seeds: Vec<u64>) -> Vec<EvalReport> {
    let ds = generate_cylinder(&CylinderGenParams::default(), DEFAULT_DATA_SEED).expect("cylinder data");
    let cfg = PipelineConfig {
        route: Route::Sof,
        seeds,
        ..PipelineConfig::default()
    };
    run_pipeline(&ds, &cfg).expect("cylinder pipeline")
}

fn gear_trends(out: &mut Vec<Outcome>) {
    let start = Instant::now();
    let time256 = gear_reports(Route::Time256);
    let time64 = gear_reports(Route::Time64);
    let freq = gear_reports(Route::Freq);
    let elapsed = start.elapsed();

    let (fp, fa) = (mean_at(&freq, Method::Pca, 10), mean_at(&freq, Method::Ard, 10));
    out.push(Outcome {
        id: "6a",
        title: "frequency route at k=10, both methods >= 95%",
        passed: fp >= 95.0 && fa >= 95.0,
        detail: format!("PCA {fp:.2}, ARD {fa:.2}"),
    });

    let ard256 = series(&time256, Method::Ard, &KS);
    out.push(Outcome {
        id: "6b",
        title: "ARD on time-256 nondecreasing in k within 2 points per step",
        passed: ard256.windows(2).all(|w| w[1] >= w[0] - 2.0),
        detail: format!("ARD k=3/5/7/10: {}", fmt_series(&ard256)),
    });

    let pca256 = series(&time256, Method::Pca, &KS);
    let spread = pca256.iter().cloned().fold(f64::MIN, f64::max) - pca256.iter().cloned().fold(f64::MAX, f64::min);
    out.push(Outcome {
        id: "6c",
        title: "PCA spread across k on time-256 <= 8 points",
        passed: spread <= 8.0,
        detail: format!("PCA k=3/5/7/10: {} (spread {spread:.2})", fmt_series(&pca256)),
    });

    let best = |r: &[EvalReport], m: Method| series(r, m, &KS).into_iter().fold(f64::MIN, f64::max);
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [Method::Pca, Method::Ard] {
        let (b64, b256) = (best(&time64, m), best(&time256, m));
        ok &= b64 < b256;
        parts.push(format!("{} best 64: {b64:.2} vs 256: {b256:.2}", m.name().to_uppercase()));
    }
    out.push(Outcome {
        id: "6d",
        title: "time-64 best strictly below time-256 best, both methods",
        passed: ok,
        detail: parts.join(", "),
    });

    out.push(Outcome {
        id: "6",
        title: "gear trend suite runtime < 5 minutes",
        passed: elapsed <= Duration::from_secs(300),
        detail: format!("{:.1}s", elapsed.as_secs_f64()),
    });
}

fn cylinder_trend() -> Check {
    let r = cylinder_reports(vec![1, 2, 3, 4, 5]);
    let (p3, p10) = (mean_at(&r, Method::Pca, 3), mean_at(&r, Method::Pca, 10));
    let (a3, a10) = (mean_at(&r, Method::Ard, 3), mean_at(&r, Method::Ard, 10));
    let detail = format!("PCA k=3 {p3:.2} k=10 {p10:.2}; ARD k=3 {a3:.2} k=10 {a10:.2}");
    if p10 >= 85.0 && a10 >= 85.0 && p3 < p10 && a3 < a10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn determinism() -> Check {
    let render = |r: &[EvalReport]| format!("{}{}", comparison_table_csv(r), detail_csv(r));
    let a = render(&cylinder_reports(vec![1, 2]));
    let b = render(&cylinder_reports(vec![1, 2]));
    let c = render(&gear_reports(Route::Time64));
    let d = render(&gear_reports(Route::Time64));
    if a == b && c == d {
        Ok(format!("cylinder and gear CSVs byte-identical ({} + {} bytes)", a.len(), c.len()))
    } else {
        Err("reruns produced different CSV bytes".into())
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut out = Vec::new();
    let mut push = |id, title, (passed, detail): (bool, String)| {
        out.push(Outcome {
            id,
            title,
            passed,
            detail,
        })
    };

    push("1", "analytic gradients match central differences", timed(secs(5), || check_gradients(20, 1)));
    push("2", "eigensolver matches characteristic-polynomial roots", timed(secs(2), || check_eigen_3x3(100, 2)));
    push("3", "SCG reaches the linear solve on SPD quadratics", timed(secs(5), || check_scg_quadratics(20, 3)));
    push("4", "ARD separates relevant from noise inputs", timed(secs(60), || check_ard_relevance(&[1, 2, 3, 4, 5])));
    push(
        "5",
        "SOF and PCA agree with brute-force oracles",
        timed(secs(5), || {
            all(vec![
                check_sof_brute_force(5),
                check_pca_isotropic(5),
                check_pca_projection_variance(5),
                check_pca_max_variance(5),
            ])
        }),
    );
    gear_trends(&mut out);
    let mut push = |id, title, (passed, detail): (bool, String)| {
        out.push(Outcome {
            id,
            title,
            passed,
            detail,
        })
    };
    push("7", "cylinder route with SOF pre-selection", timed(secs(120), cylinder_trend));
    push("8", "identical seeds give byte-identical result CSVs", timed(secs(300), determinism));
    push(
        "9",
        "feature suite oracles and Burg stability",
        timed(secs(30), || {
            all(vec![
                check_moments(9),
                check_ar_recovery(9),
                check_ma_recovery(9),
                check_arma_recovery(9),
                check_burg_stability(1000, 9),
            ])
        }),
    );

    let mut failed = 0;
    for o in &out {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {}: {}", o.id, o.title, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", out.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
