use std::fmt::Write;

use crate::report::{OutputReport, Results};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 2] = ["#4c72b0", "#dd8452"];

/// A cluster of bars sharing one x-axis label. `None` draws an empty bar.
struct Group {
    label: String,
    values: Vec<Option<f64>>,
}

struct Chart {
    title: String,
    series: Vec<String>,
    groups: Vec<Group>,
    /// Dotted horizontal reference lines, one per series where known.
    theory: Vec<f64>,
}

fn chart_for(report: &OutputReport) -> Chart {
    match &report.results {
        Results::Histogram(h) => Chart {
            title: format!("{}: {} shots", report.command, h.shots),
            series: vec!["frequency".into()],
            groups: h
                .counts
                .keys()
                .map(|k| Group {
                    label: k.clone(),
                    values: vec![Some(h.frequency(k))],
                })
                .collect(),
            theory: vec![],
        },
        Results::Analytic(a) => Chart {
            title: format!("{}: exact probabilities", report.command),
            series: vec!["probability".into()],
            groups: a
                .outcomes
                .iter()
                .zip(&a.probabilities)
                .map(|(k, &p)| Group {
                    label: k.clone(),
                    values: vec![Some(p)],
                })
                .collect(),
            theory: vec![],
        },
        Results::Prep(p) => Chart {
            title: format!("prepared state: {} shots", p.shots),
            series: vec!["P(0)".into(), "P(1)".into()],
            groups: vec![
                Group {
                    label: "0".into(),
                    values: vec![Some(p.p0), None],
                },
                Group {
                    label: "1".into(),
                    values: vec![None, Some(p.p1)],
                },
            ],
            theory: vec![p.theory_p0, p.theory_p1],
        },
        Results::Teleport(t) => Chart {
            title: format!("teleportation ({}): {} shots", t.mode, t.shots),
            series: vec!["alpha".into(), "beta".into()],
            groups: t
                .per_outcome
                .iter()
                .map(|(k, s)| Group {
                    label: format!("m_i m_A = {k}"),
                    values: vec![s.p_alpha, s.p_beta],
                })
                .collect(),
            theory: vec![t.theory_p_alpha, t.theory_p_beta],
        },
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(report: &OutputReport) -> String {
    let chart = chart_for(report);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (1.0 - v.clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&chart.title)
    );

    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#e0e0e0"/><text x="{2}" y="{3:.2}" text-anchor="end">{v:.2}</text>"##,
            y(v),
            WIDTH - RIGHT,
            LEFT - 6.0,
            y(v) + 4.0
        );
    }

    if chart.groups.is_empty() {
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" text-anchor="middle" fill="#888">no data</text>"##,
            LEFT + plot_w / 2.0,
            TOP + plot_h / 2.0
        );
    }
    let slot = plot_w / chart.groups.len().max(1) as f64;
    let nseries = chart.series.len().max(1) as f64;
    let bar_w = slot * 0.7 / nseries;
    for (g, group) in chart.groups.iter().enumerate() {
        let x0 = LEFT + slot * g as f64 + slot * 0.15;
        for (k, value) in group.values.iter().enumerate() {
            let x = x0 + bar_w * k as f64;
            let color = COLORS[k % COLORS.len()];
            match value {
                Some(v) => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x:.2}" y="{:.2}" width="{bar_w:.2}" height="{:.2}" fill="{color}"/>"#,
                        y(*v),
                        plot_h * v.clamp(0.0, 1.0)
                    );
                }
                None if chart.series.len() == 1 || group.values.iter().all(Option::is_none) => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x:.2}" y="{TOP}" width="{bar_w:.2}" height="{plot_h}" fill="none" stroke="{color}" stroke-dasharray="2 2"/>"#
                    );
                }
                None => {}
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + slot * (g as f64 + 0.5),
            HEIGHT - BOTTOM + 18.0,
            escape(&group.label)
        );
    }

    for (k, &v) in chart.theory.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<line class="theory" x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="{2}" stroke-width="1.5" stroke-dasharray="2 4"/>"#,
            y(v),
            WIDTH - RIGHT,
            COLORS[k % COLORS.len()]
        );
    }

    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{0}" stroke="black"/><line x1="{LEFT}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        TOP + plot_h,
        WIDTH - RIGHT
    );
    for (k, name) in chart.series.iter().enumerate() {
        let lx = WIDTH - RIGHT - 110.0;
        let ly = TOP + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{ly}">{}</text>"#,
            ly - 9.0,
            COLORS[k % COLORS.len()],
            lx + 14.0,
            escape(name)
        );
    }
    if !chart.theory.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="gray">dotted: theory</text>"#,
            WIDTH - RIGHT - 110.0,
            TOP + 14.0 * chart.series.len() as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
