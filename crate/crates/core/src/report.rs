//! Result tables and charts.

use crate::pipeline::{EvalReport, Method};
use std::fmt::Write as _;

fn mean_for(reports: &[EvalReport], method: Method, k: usize) -> Option<f64> {
    reports
        .iter()
        .find(|r| r.method == method && r.k == k)
        .map(|r| r.mean_accuracy)
}

fn methods_in(reports: &[EvalReport]) -> Vec<Method> {
    let mut m: Vec<Method> = reports.iter().map(|r| r.method).collect();
    m.sort();
    m.dedup();
    m
}

fn ks_in(reports: &[EvalReport]) -> Vec<usize> {
    let mut ks: Vec<usize> = reports.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Wide table: `Number of inputs` then one `<METHOD> Classification` column
/// per method, one row per k ascending.
pub fn comparison_table_csv(reports: &[EvalReport]) -> String {
    let methods = methods_in(reports);
    let mut out = String::from("Number of inputs");
    for m in &methods {
        write!(out, ",{} Classification", m.name().to_uppercase()).unwrap();
    }
    out.push('\n');
    for k in ks_in(reports) {
        write!(out, "{k}").unwrap();
        for &m in &methods {
            match mean_for(reports, m, k) {
                Some(v) => write!(out, ",{v:.2}").unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Long table, one row per (method, k) with per-seed accuracies and the
/// aggregated decision counts.
pub fn detail_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(
        "route,method,k,mean_accuracy,seed_accuracies,true_pos,true_neg,false_pos,false_neg,wrong_severity\n",
    );
    for r in reports {
        let per_seed: Vec<String> = r.accuracies.iter().map(|a| format!("{a:.4}")).collect();
        let c = &r.confusion;
        writeln!(
            out,
            "{},{},{},{:.4},{},{},{},{},{},{}",
            r.route,
            r.method,
            r.k,
            r.mean_accuracy,
            per_seed.join(";"),
            c.true_pos,
            c.true_neg,
            c.false_pos,
            c.false_neg,
            c.wrong_severity
        )
        .unwrap();
    }
    out
}

const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

/// Accuracy-versus-k line chart, one polyline per method.
pub fn trend_svg(reports: &[EvalReport], title: &str) -> String {
    let (w, h) = (480.0, 320.0);
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 50.0);
    let ks = ks_in(reports);
    let k_min = *ks.first().unwrap_or(&0) as f64;
    let k_max = *ks.last().unwrap_or(&1) as f64;
    let k_span = (k_max - k_min).max(1.0);
    let x_of = |k: f64| left + (k - k_min) / k_span * (w - left - right);
    let y_of = |acc: f64| top + (100.0 - acc) / 100.0 * (h - top - bottom);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    )
    .unwrap();
    // axes
    writeln!(
        s,
        r#"<polyline points="{left},{top} {left},{} {},{}" fill="none" stroke="black"/>"#,
        h - bottom,
        w - right,
        h - bottom
    )
    .unwrap();
    for acc in [0.0, 25.0, 50.0, 75.0, 100.0] {
        let y = y_of(acc);
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{acc:.0}</text>"#,
            left - 6.0,
            y + 3.0
        )
        .unwrap();
        writeln!(
            s,
            r##"<line x1="{left}" y1="{y}" x2="{}" y2="{y}" stroke="#dddddd"/>"##,
            w - right
        )
        .unwrap();
    }
    for &k in &ks {
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{k}</text>"#,
            x_of(k as f64),
            h - bottom + 14.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">Number of inputs</text>"#,
        (left + w - right) / 2.0,
        h - 12.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 14 {})">Classification (%)</text>"#,
        (top + h - bottom) / 2.0,
        (top + h - bottom) / 2.0
    )
    .unwrap();
    for (i, m) in methods_in(reports).into_iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ks
            .iter()
            .filter_map(|&k| mean_for(reports, m, k).map(|a| format!("{:.2},{:.2}", x_of(k as f64), y_of(a))))
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        )
        .unwrap();
        for p in &pts {
            let (px, py) = p.split_once(',').unwrap();
            writeln!(s, r#"<circle cx="{px}" cy="{py}" r="3" fill="{color}"/>"#).unwrap();
        }
        let ly = top + 14.0 * i as f64;
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            w - right - 40.0,
            ly + 10.0,
            m.name().to_uppercase()
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
