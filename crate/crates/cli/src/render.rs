//! Text table and SVG diagram rendering of reports.

use std::fmt::Write as _;

use modmi::pipeline::{InfoReport, Role};

/// Decimal places of table cells.
pub const PRECISION: usize = 4;

pub fn fmt_cell(v: f64) -> String {
    let s = format!("{v:.PRECISION$}");
    if s.strip_prefix('-').is_some_and(|r| r.chars().all(|c| c == '0' || c == '.')) {
        s[1..].to_string()
    } else {
        s
    }
}

enum Column {
    Entropy(String),
    Pair(String, String),
    Triple,
}

struct Layout {
    header: Vec<String>,
    columns: Vec<Column>,
}

/// Column order follows the role triple: `H(T) H(S) H(V) I(T;V) I(T;S)
/// I(V;S) I(V;T;S)`, keeping only what the report holds. Reports without
/// roles fall back to stream names.
fn layout(report: &InfoReport) -> Layout {
    let mut header = Vec::new();
    let mut columns = Vec::new();
    let role = |r: Role| report.role_name(r).map(str::to_string);
    let with_roles = report.streams.iter().all(|s| s.role.is_some());
    if with_roles {
        for r in [Role::T, Role::S, Role::V] {
            if let Some(name) = role(r) {
                header.push(format!("H({})", r.symbol()));
                columns.push(Column::Entropy(name));
            }
        }
        for (a, b) in [(Role::T, Role::V), (Role::T, Role::S), (Role::V, Role::S)] {
            if let (Some(x), Some(y)) = (role(a), role(b)) {
                header.push(format!("I({};{})", a.symbol(), b.symbol()));
                columns.push(Column::Pair(x, y));
            }
        }
        if report.quantities.trivariate_mmi.is_some() {
            header.push("I(V;T;S)".into());
            columns.push(Column::Triple);
        }
    } else {
        let names: Vec<&str> = report.streams.iter().map(|s| s.name.as_str()).collect();
        for n in &names {
            header.push(format!("H({n})"));
            columns.push(Column::Entropy(n.to_string()));
        }
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                header.push(format!("I({};{})", names[i], names[j]));
                columns.push(Column::Pair(names[i].into(), names[j].into()));
            }
        }
    }
    Layout { header, columns }
}

fn row(report: &InfoReport, columns: &[Column]) -> Vec<String> {
    let q = &report.quantities;
    columns
        .iter()
        .map(|c| {
            let v = match c {
                Column::Entropy(n) => q.h(n),
                Column::Pair(a, b) => q.mi(a, b),
                Column::Triple => q.trivariate_mmi,
            };
            v.map_or_else(|| "-".to_string(), fmt_cell)
        })
        .collect()
}

/// Header line plus one row.
pub fn table(report: &InfoReport) -> String {
    let l = layout(report);
    format!("{}\n{}\n", l.header.join(" "), row(report, &l.columns).join(" "))
}

/// One row per report, led by the cluster count.
pub fn sweep_table(reports: &[InfoReport]) -> String {
    let Some(first) = reports.first() else {
        return String::new();
    };
    let l = layout(first);
    let mut out = format!("k {}\n", l.header.join(" "));
    for r in reports {
        let _ = writeln!(out, "{} {}", r.config.clusters, row(r, &l.columns).join(" "));
    }
    out
}

/// Parses a table produced by [`table`] or [`sweep_table`] into its header
/// and numeric rows.
pub fn parse_table(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines.next()?.split(' ').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(' ').map(|c| c.parse().ok()).collect::<Option<Vec<f64>>>())
        .collect::<Option<_>>()?;
    Some((header, rows))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Three-circle information diagram: V upper left, S upper right, T below.
/// Each of the seven regions carries its value; circle titles carry the
/// entropies.
pub fn svg(report: &InfoReport) -> Option<String> {
    let q = &report.quantities;
    let regions = q.regions.as_ref()?;
    let names: Vec<&str> = [Role::V, Role::T, Role::S]
        .iter()
        .map(|&r| report.role_name(r))
        .collect::<Option<_>>()?;
    let [v, t, s] = [names[0], names[1], names[2]];
    let region = |key: String| regions.get(&key).copied();
    let unique = |x: &str, a: &str, b: &str| {
        region(format!("H({x}|{a},{b})")).or_else(|| region(format!("H({x}|{b},{a})")))
    };
    let pair = |a: &str, b: &str, z: &str| {
        region(format!("I({a};{b}|{z})")).or_else(|| region(format!("I({b};{a}|{z})")))
    };
    let center = q.trivariate_mmi?;

    let (cv, cs, ct) = ((230.0, 210.0), (370.0, 210.0), (300.0, 330.0));
    let r = 130.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="560" viewBox="0 0 600 560" font-family="sans-serif" font-size="14" text-anchor="middle">"#
    );
    let _ = writeln!(out, r#"<rect width="600" height="560" fill="white"/>"#);
    for ((x, y), color, name) in [(cv, "#4e79a7", v), (cs, "#e15759", s), (ct, "#59a14f", t)] {
        let _ = writeln!(
            out,
            r#"<circle cx="{x}" cy="{y}" r="{r}" fill="{color}" fill-opacity="0.25" stroke="{color}" stroke-width="2"><title>{}</title></circle>"#,
            escape(name)
        );
    }
    let mut label = |x: f64, y: f64, text: String, weight: &str| {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{y}" font-weight="{weight}">{}</text>"#,
            escape(&text)
        );
    };
    let h = |n: &str| q.h(n).map_or("-".into(), fmt_cell);
    label(cv.0 - 60.0, 60.0, format!("H({v}) = {}", h(v)), "bold");
    label(cs.0 + 60.0, 60.0, format!("H({s}) = {}", h(s)), "bold");
    label(ct.0, 490.0, format!("H({t}) = {}", h(t)), "bold");

    let cell = |v: Option<f64>| v.map_or("-".into(), fmt_cell);
    label(cv.0 - 60.0, cv.1 - 20.0, cell(unique(v, t, s)), "normal");
    label(cs.0 + 60.0, cs.1 - 20.0, cell(unique(s, v, t)), "normal");
    label(ct.0, ct.1 + 75.0, cell(unique(t, v, s)), "normal");
    label(300.0, 165.0, cell(pair(v, s, t)), "normal");
    label(220.0, 315.0, cell(pair(v, t, s)), "normal");
    label(380.0, 315.0, cell(pair(t, s, v)), "normal");
    label(300.0, 255.0, fmt_cell(center), "bold");
    let _ = writeln!(
        out,
        r#"<text x="300" y="540" font-size="12">log base {}</text>"#,
        q.log_base
    );
    out.push_str("</svg>\n");
    Some(out)
}
