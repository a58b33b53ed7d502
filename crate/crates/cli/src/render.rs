//! Text, JSON and DOT renderings of command results.

use std::fmt::Write as _;

use num_rational::BigRational;
use plumb_core::census::{ClassificationReport, E8Report};
use plumb_core::engine::{ArStatus, DInvariant, Verdicts};
use plumb_core::graph::{determinant, h1_order, is_minimal, BlowDown, ReductionTrace};
use plumb_core::rational::{display, to_json_pair};
use plumb_core::relations::{GradedTable, HfSummary};
use plumb_core::{canonical_code, BasicSet, CharVector, PlumbingForest};
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

pub enum Report {
    Check {
        forest: PlumbingForest,
        negdef: bool,
        spinc: Option<usize>,
    },
    Invariants {
        forest: PlumbingForest,
        basic: BasicSet,
        verdicts: Verdicts,
        d: Vec<DInvariant>,
        hf: HfSummary,
    },
    Basic {
        forest: PlumbingForest,
        basic: BasicSet,
    },
    Dinv {
        forest: PlumbingForest,
        d: Vec<DInvariant>,
    },
    Hf {
        forest: PlumbingForest,
        table: GradedTable,
    },
    Reduce {
        forest: PlumbingForest,
        reduced: PlumbingForest,
        trace: ReductionTrace,
    },
    VerifyE8(E8Report),
    VerifyClassification(ClassificationReport),
    /// Output already written (census streams its records).
    Nothing,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn vec_str(k: &CharVector) -> String {
    let parts: Vec<_> = k.pairings().iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn graph_json(f: &PlumbingForest) -> Value {
    json!({
        "vertices": f.ids().iter().zip(f.weights())
            .map(|(id, w)| json!({"id": id, "weight": w}))
            .collect::<Vec<_>>(),
        "edges": f.edges().iter()
            .map(|&(a, b)| json!([f.ids()[a], f.ids()[b]]))
            .collect::<Vec<_>>(),
    })
}

fn basic_json(basic: &BasicSet) -> Value {
    Value::Array(
        basic
            .classes
            .iter()
            .map(|c| {
                json!({
                    "class": c.class.index,
                    "representative": c.class.representative.pairings(),
                    "box_count": c.box_count,
                    "overflow": c.overflow,
                    "vectors": c.basic.iter().map(|b| json!({
                        "initial": b.initial.pairings(),
                        "terminal": b.terminal.pairings(),
                        "steps": b.steps,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn d_json(d: &[DInvariant]) -> Value {
    Value::Array(
        d.iter()
            .map(|x| json!({"class": x.class, "d": to_json_pair(&x.d), "d_minus": to_json_pair(&x.d_minus)}))
            .collect(),
    )
}

fn counts_json(counts: &[(BigRational, usize)]) -> Value {
    Value::Array(counts.iter().map(|(deg, c)| json!([to_json_pair(deg), c])).collect())
}

fn ar_json(ar: &ArStatus) -> Value {
    match ar {
        ArStatus::Yes { vertex, delta } => json!({"vertex": vertex, "delta": delta}),
        ArStatus::Unknown { bound } => json!({"unknown_up_to": bound}),
    }
}

fn hf_json(hf: &HfSummary) -> Value {
    json!({
        "max_u": hf.params.max_u,
        "expansion": hf.params.expansion,
        "certified": hf.certified,
        "reduced_rank": hf.total_reduced_rank,
        "classes": hf.classes.iter().map(|c| json!({
            "class": c.class,
            "bottom": to_json_pair(&c.bottom),
            "reduced_rank": c.reduced_rank,
            "counts": counts_json(&c.counts),
        })).collect::<Vec<_>>(),
    })
}

fn table_json(t: &GradedTable) -> Value {
    json!({
        "max_u": t.params.max_u,
        "expansion": t.params.expansion,
        "classes": t.classes.iter().map(|c| json!({
            "class": c.class.index,
            "representative": c.class.representative.pairings(),
            "bottom": to_json_pair(&c.bottom),
            "converged": c.converged,
            "reduced_rank": c.reduced_rank(),
            "lattice_points": c.lattice_points,
            "states": c.states,
            "counts": counts_json(&c.counts),
        })).collect::<Vec<_>>(),
    })
}

fn check_fields(f: &PlumbingForest) -> (String, String) {
    let det = determinant(f);
    let h1 = h1_order(f);
    let h1 = if h1 == 0.into() { "infinite".to_string() } else { h1.to_string() };
    (det.to_string(), h1)
}

/// Integer when it fits, decimal string otherwise.
fn det_value(det: String) -> Value {
    det.parse::<i64>().map(Value::from).unwrap_or(Value::String(det))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Graph diagram with an optional table of rows attached as a side node.
fn dot(f: &PlumbingForest, title: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::from("graph plumbing {\n  node [shape=circle, fontname=\"Helvetica\"];\n");
    for (i, (id, w)) in f.ids().iter().zip(f.weights()).enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{}\\n{w}\"];", dot_escape(id));
    }
    for &(a, b) in f.edges() {
        let _ = writeln!(out, "  n{a} -- n{b};");
    }
    if !header.is_empty() {
        let mut table = format!(
            "<table border=\"0\" cellborder=\"1\" cellspacing=\"0\"><tr><td colspan=\"{}\"><b>{}</b></td></tr><tr>",
            header.len(),
            html_escape(title)
        );
        for h in header {
            let _ = write!(table, "<td><b>{}</b></td>", html_escape(h));
        }
        table.push_str("</tr>");
        for row in rows {
            table.push_str("<tr>");
            for cell in row {
                let _ = write!(table, "<td>{}</td>", html_escape(cell));
            }
            table.push_str("</tr>");
        }
        table.push_str("</table>");
        let _ = writeln!(out, "  table [shape=plaintext, label=<{table}>];");
    }
    out.push_str("}\n");
    out
}

fn basic_rows(basic: &BasicSet) -> Vec<Vec<String>> {
    basic
        .classes
        .iter()
        .map(|c| {
            let vs: Vec<_> = c.basic.iter().map(|b| vec_str(&b.initial)).collect();
            vec![c.class.index.to_string(), vec_str(&c.class.representative), vs.join(" ")]
        })
        .collect()
}

fn counts_str(counts: &[(BigRational, usize)]) -> String {
    counts
        .iter()
        .map(|(d, c)| format!("{}:{c}", display(d)))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        match self {
            Report::VerifyE8(r) if !r.passed => 1,
            Report::VerifyClassification(r) if !r.passed() => 1,
            _ => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = self.json();
                if v.is_null() {
                    String::new()
                } else {
                    format!("{v}\n")
                }
            }
            Format::Text => self.text(),
            Format::Dot => self.dot(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Report::Check { forest, negdef, spinc } => {
                let (det, h1) = check_fields(forest);
                json!({
                    "graph": graph_json(forest),
                    "code": canonical_code(forest),
                    "negdef": negdef,
                    "det": det_value(det),
                    "h1": h1,
                    "spinc": spinc,
                    "minimal": is_minimal(forest),
                })
            }
            Report::Invariants { forest, basic, verdicts, d, hf } => {
                let (det, _) = check_fields(forest);
                json!({
                    "graph": graph_json(forest),
                    "det": det_value(det),
                    "spinc": basic.spinc_count(),
                    "basic": basic_json(basic),
                    "basic_count": basic.total_basic(),
                    "rational": verdicts.rational,
                    "lspace": yes_no(verdicts.lspace.lspace),
                    "certified": verdicts.lspace.certified,
                    "ar": ar_json(&verdicts.ar),
                    "d": d_json(d),
                    "hf": hf_json(hf),
                })
            }
            Report::Basic { forest, basic } => json!({
                "graph": graph_json(forest),
                "box_size": basic.box_size,
                "canonical_class": basic.canonical_class,
                "basic": basic_json(basic),
            }),
            Report::Dinv { forest, d } => json!({"graph": graph_json(forest), "d": d_json(d)}),
            Report::Hf { forest, table } => json!({"graph": graph_json(forest), "hf": table_json(table)}),
            Report::Reduce { forest, reduced, trace } => json!({
                "input": graph_json(forest),
                "reduced": graph_json(reduced),
                "moves": trace.moves.iter().map(|m| json!({
                    "kind": kind_str(m.kind),
                    "removed": m.removed,
                    "neighbors": m.neighbors,
                })).collect::<Vec<_>>(),
            }),
            Report::VerifyE8(r) => json!({
                "max_vertices": r.max_vertices,
                "trees": r.trees,
                "negdef": r.negative_definite,
                "hits": r.hits,
                "passed": r.passed,
            }),
            Report::VerifyClassification(r) => json!({
                "max_vertices": r.max_vertices,
                "min_weight": r.min_weight,
                "graphs": r.graphs,
                "rationality_checked": r.rationality_checked,
                "rational_zhs": r.rational_zhs,
                "violations_a": r.violations_a,
                "violations_b": r.violations_b,
                "violations_c": r.violations_c,
                "skipped": r.skipped,
                "passed": r.passed(),
            }),
            Report::Nothing => Value::Null,
        }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Check { forest, negdef, spinc } => {
                let (det, h1) = check_fields(forest);
                let _ = writeln!(s, "vertices: {}", forest.len());
                let _ = writeln!(s, "negative definite: {}", yes_no(*negdef));
                let _ = writeln!(s, "det: {det}");
                let _ = writeln!(s, "|H1|: {h1}");
                match spinc {
                    Some(n) => {
                        let _ = writeln!(s, "spin^c classes: {n}");
                    }
                    None => s.push_str("spin^c classes: n/a\n"),
                }
                let _ = writeln!(s, "minimal: {}", yes_no(is_minimal(forest)));
            }
            Report::Invariants { forest, basic, verdicts, d, hf } => {
                let (det, _) = check_fields(forest);
                let _ = writeln!(s, "det: {det}");
                let _ = writeln!(s, "spin^c classes: {}", basic.spinc_count());
                let _ = writeln!(s, "basic vectors: {}", basic.total_basic());
                let _ = writeln!(s, "rational: {}", yes_no(verdicts.rational));
                let cert = if verdicts.lspace.certified { "certified" } else { "uncertified" };
                let _ = writeln!(s, "L-space: {} ({cert})", yes_no(verdicts.lspace.lspace));
                match &verdicts.ar {
                    ArStatus::Yes { vertex, delta } => {
                        let _ = writeln!(s, "almost rational: yes (vertex {}, lowered by {delta})", forest.ids()[*vertex]);
                    }
                    ArStatus::Unknown { bound } => {
                        let _ = writeln!(s, "almost rational: unknown (tried up to {bound})");
                    }
                }
                let ds: Vec<_> = d.iter().map(|x| display(&x.d)).collect();
                let _ = writeln!(s, "d: [{}]", ds.join(", "));
                let _ = writeln!(s, "reduced rank: {}", hf.total_reduced_rank);
                for c in &hf.classes {
                    let _ = writeln!(s, "  class {} bottom {}: {}", c.class, display(&c.bottom), counts_str(&c.counts));
                }
            }
            Report::Basic { basic, .. } => {
                let _ = writeln!(s, "box size: {}", basic.box_size);
                for c in &basic.classes {
                    let _ = writeln!(
                        s,
                        "class {} {}: {} basic, {} overflow",
                        c.class.index,
                        vec_str(&c.class.representative),
                        c.basic.len(),
                        c.overflow
                    );
                    for b in &c.basic {
                        let _ = writeln!(s, "  {} -> {} in {} steps", vec_str(&b.initial), vec_str(&b.terminal), b.steps);
                    }
                }
            }
            Report::Dinv { d, .. } => {
                for x in d {
                    let _ = writeln!(s, "class {}: d = {}", x.class, display(&x.d));
                }
            }
            Report::Hf { table, .. } => {
                let _ = writeln!(s, "max U power {}, expansion {}", table.params.max_u, table.params.expansion);
                for c in &table.classes {
                    let status = if c.converged { "" } else { " (not converged)" };
                    let _ = writeln!(
                        s,
                        "class {} bottom {} reduced rank {}{status}: {}",
                        c.class.index,
                        display(&c.bottom),
                        c.reduced_rank(),
                        counts_str(&c.counts)
                    );
                }
            }
            Report::Reduce { reduced, trace, .. } => {
                for m in &trace.moves {
                    let _ = writeln!(s, "# blow down {} ({})", m.removed, kind_str(m.kind));
                }
                s.push_str(&reduced.to_text());
            }
            Report::VerifyE8(r) => {
                let _ = writeln!(
                    s,
                    "{} trees, {} negative definite, unimodular: {}",
                    r.trees,
                    r.negative_definite,
                    r.hits.join(" ")
                );
                s.push_str(if r.passed { "PASS\n" } else { "FAIL\n" });
            }
            Report::VerifyClassification(r) => {
                let _ = writeln!(
                    s,
                    "{} minimal weightings, rationality decided for {} graphs",
                    r.graphs, r.rationality_checked
                );
                let _ = writeln!(s, "rational unimodular: {}", r.rational_zhs.join(" "));
                for (name, v) in [("a", &r.violations_a), ("b", &r.violations_b), ("c", &r.violations_c)] {
                    if !v.is_empty() {
                        let _ = writeln!(s, "counterexamples ({name}): {}", v.join(" "));
                    }
                }
                if !r.skipped.is_empty() {
                    let _ = writeln!(s, "skipped over budget: {}", r.skipped.join(" "));
                }
                s.push_str(if r.passed() { "PASS\n" } else { "FAIL\n" });
            }
            Report::Nothing => {}
        }
        s
    }

    fn dot(&self) -> String {
        match self {
            Report::Check { forest, .. } => dot(forest, "", &[], &[]),
            Report::Basic { forest, basic } => dot(
                forest,
                "basic vectors",
                &["class", "representative", "basic"],
                &basic_rows(basic),
            ),
            Report::Invariants { forest, basic, d, hf, .. } => {
                let rows: Vec<_> = basic_rows(basic)
                    .into_iter()
                    .zip(d)
                    .zip(&hf.classes)
                    .map(|((mut row, d), c)| {
                        row.push(display(&d.d));
                        row.push(counts_str(&c.counts));
                        row
                    })
                    .collect();
                dot(forest, "invariants", &["class", "representative", "basic", "d", "degree:count"], &rows)
            }
            Report::Dinv { forest, d } => {
                let rows: Vec<_> = d.iter().map(|x| vec![x.class.to_string(), display(&x.d)]).collect();
                dot(forest, "d-invariants", &["class", "d"], &rows)
            }
            Report::Hf { forest, table } => {
                let rows: Vec<_> = table
                    .classes
                    .iter()
                    .map(|c| vec![c.class.index.to_string(), display(&c.bottom), counts_str(&c.counts)])
                    .collect();
                dot(forest, "degree counts", &["class", "bottom", "degree:count"], &rows)
            }
            Report::Reduce { reduced, .. } => dot(reduced, "", &[], &[]),
            // no graph to draw
            Report::VerifyE8(_) | Report::VerifyClassification(_) | Report::Nothing => self.text(),
        }
    }
}

fn kind_str(kind: BlowDown) -> &'static str {
    match kind {
        BlowDown::Isolated => "isolated",
        BlowDown::Leaf => "leaf",
        BlowDown::Interior => "interior",
    }
}
