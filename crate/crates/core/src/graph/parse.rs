//! Line-oriented graph files and the JSON mirror.
//!
//! ```text
//! # comment
//! vertex a -2
//! vertex b -3
//! edge a b
//! chain -2 -2 -2      # path with ids c1, c2, c3
//! ```

use std::collections::HashMap;

use serde::Deserialize;

use super::PlumbingForest;
use crate::error::{Error, Result};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn weight(tok: &Token<'_>, line: usize) -> Result<i64> {
    tok.text
        .parse()
        .map_err(|_| syntax(line, tok.column, format!("expected an integer weight, found `{}`", tok.text)))
}

/// Parses the line-oriented graph format. Vertices keep file order; chain
/// vertices are numbered `c1, c2, ...` continuing across `chain` lines.
pub fn parse_forest(text: &str) -> Result<PlumbingForest> {
    let mut vertices: Vec<(String, i64)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut pending_edges: Vec<(String, String, usize)> = Vec::new();
    let mut direct_edges: Vec<(usize, usize)> = Vec::new();
    let mut chain_counter = 0usize;

    let mut add_vertex = |vertices: &mut Vec<(String, i64)>, id: String, w: i64| -> Result<usize> {
        if index.contains_key(&id) {
            return Err(Error::DuplicateVertex(id));
        }
        index.insert(id.clone(), vertices.len());
        vertices.push((id, w));
        Ok(vertices.len() - 1)
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "vertex" => {
                if toks.len() != 3 {
                    return Err(syntax(line, head.column, "expected `vertex <id> <weight>`"));
                }
                let w = weight(&toks[2], line)?;
                add_vertex(&mut vertices, toks[1].text.to_string(), w)?;
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(syntax(line, head.column, "expected `edge <id> <id>`"));
                }
                pending_edges.push((toks[1].text.to_string(), toks[2].text.to_string(), line));
            }
            "chain" => {
                if toks.len() < 2 {
                    return Err(syntax(line, head.column, "`chain` needs at least one weight"));
                }
                let mut prev = None;
                for tok in &toks[1..] {
                    let w = weight(tok, line)?;
                    chain_counter += 1;
                    let v = add_vertex(&mut vertices, format!("c{chain_counter}"), w)?;
                    if let Some(p) = prev {
                        direct_edges.push((p, v));
                    }
                    prev = Some(v);
                }
            }
            other => {
                return Err(syntax(line, head.column, format!("unknown directive `{other}`")));
            }
        }
    }

    let mut edges = direct_edges;
    for (a, b, line) in pending_edges {
        let ia = *index
            .get(&a)
            .ok_or(Error::UnknownEndpoint { id: a.clone(), line })?;
        let ib = *index
            .get(&b)
            .ok_or(Error::UnknownEndpoint { id: b.clone(), line })?;
        edges.push((ia, ib));
    }
    PlumbingForest::new(vertices, edges)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonId {
    Text(String),
    Number(i64),
}

impl JsonId {
    fn into_string(self) -> String {
        match self {
            JsonId::Text(s) => s,
            JsonId::Number(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct JsonVertex {
    id: JsonId,
    weight: i64,
}

#[derive(Deserialize)]
struct JsonGraph {
    vertices: Vec<JsonVertex>,
    #[serde(default)]
    edges: Vec<(JsonId, JsonId)>,
}

/// Parses `{"vertices":[{"id":..,"weight":..}], "edges":[[..,..]]}`.
pub fn parse_forest_json(text: &str) -> Result<PlumbingForest> {
    let graph: JsonGraph = serde_json::from_str(text)?;
    let vertices: Vec<(String, i64)> = graph
        .vertices
        .into_iter()
        .map(|v| (v.id.into_string(), v.weight))
        .collect();
    let index: HashMap<&str, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.as_str(), i))
        .collect();
    let mut edges = Vec::with_capacity(graph.edges.len());
    for (a, b) in graph.edges {
        let (a, b) = (a.into_string(), b.into_string());
        let ia = *index.get(a.as_str()).ok_or(Error::UnknownEndpoint { id: a.clone(), line: 0 })?;
        let ib = *index.get(b.as_str()).ok_or(Error::UnknownEndpoint { id: b.clone(), line: 0 })?;
        edges.push((ia, ib));
    }
    PlumbingForest::new(vertices, edges)
}
