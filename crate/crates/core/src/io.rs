//! Text and JSON input formats, and the builtin zoo of named spaces.
//!
//! Poset text format:
//!
//! ```text
//! # the minimal circle
//! elements: a b c d
//! a < c
//! a < d
//! b < c
//! b < d
//! ```
//!
//! JSON: `{"elements": ["a", ...], "hasse": [["a", "c"], ...]}`.
//!
//! Complex text format: one facet per line, vertices separated by
//! whitespace. JSON: `{"facets": [["a", "b"], ...]}`.

use std::collections::HashMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::poset::{antichain, build_poset, chain, fence, sphere, wedge_fence, FinitePoset};
use crate::simplicial::{cycle, simplex, simplex_boundary, SimplicialComplex};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    parse_err(e.line(), e.column(), e.to_string())
}

/// Whitespace-separated tokens of a line with their 1-based columns, up to
/// a `#` comment.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &body[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &body[s..]));
    }
    out.into_iter()
        .map(|(byte, t)| (body[..byte].chars().count() + 1, t))
        .collect()
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetJson {
    elements: Vec<String>,
    #[serde(default)]
    hasse: Vec<(String, String)>,
}

/// Parses a poset in either the text or the JSON format.
pub fn parse_poset(text: &str) -> Result<FinitePoset> {
    if looks_like_json(text) {
        let raw: PosetJson = serde_json::from_str(text).map_err(json_err)?;
        let index: HashMap<&str, usize> = raw.elements.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut edges = Vec::with_capacity(raw.hasse.len());
        for (a, b) in &raw.hasse {
            let find = |l: &String| index.get(l.as_str()).copied().ok_or_else(|| Error::UnknownLabel(l.clone()));
            edges.push((find(a)?, find(b)?));
        }
        return build_poset(raw.elements, &edges);
    }
    let mut labels: Option<Vec<String>> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = tokens(line);
        let Some(&(col, first)) = toks.first() else {
            continue;
        };
        if let Some(rest) = first.strip_prefix("elements:") {
            if labels.is_some() {
                return Err(parse_err(lineno, col, "elements listed twice"));
            }
            let mut ls: Vec<String> = Vec::new();
            if !rest.is_empty() {
                ls.push(rest.to_string());
            }
            ls.extend(toks[1..].iter().map(|(_, t)| t.to_string()));
            for (i, l) in ls.iter().enumerate() {
                if index.insert(l.clone(), i).is_some() {
                    let c = toks.iter().rev().find(|(_, t)| *t == l).map_or(col, |(c, _)| *c);
                    return Err(parse_err(lineno, c, format!("duplicate element `{}`", l)));
                }
            }
            labels = Some(ls);
            continue;
        }
        if labels.is_none() {
            return Err(parse_err(lineno, col, "expected `elements:` before any relation"));
        }
        if toks.len() != 3 || !matches!(toks[1].1, "<" | ">") {
            return Err(parse_err(lineno, col, "expected a relation `x < y`"));
        }
        let lookup = |(c, t): (usize, &str)| {
            index
                .get(t)
                .copied()
                .ok_or_else(|| parse_err(lineno, c, format!("unknown element `{}`", t)))
        };
        let a = lookup(toks[0])?;
        let b = lookup(toks[2])?;
        edges.push(if toks[1].1 == "<" { (a, b) } else { (b, a) });
    }
    let labels = labels.ok_or_else(|| parse_err(1, 1, "missing `elements:` line"))?;
    build_poset(labels, &edges)
}

/// Serializes a poset to the JSON format.
pub fn poset_to_json(p: &FinitePoset) -> serde_json::Value {
    let hasse: Vec<[&str; 2]> = p.hasse_edges().iter().map(|&(a, b)| [p.label(a), p.label(b)]).collect();
    serde_json::json!({ "elements": p.labels(), "hasse": hasse })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Vertex {
    Name(String),
    Number(i64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    facets: Vec<Vec<Vertex>>,
}

/// Parses a simplicial complex in either the text or the JSON format.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    let facets: Vec<Vec<String>> = if looks_like_json(text) {
        let raw: ComplexJson = serde_json::from_str(text).map_err(json_err)?;
        raw.facets
            .into_iter()
            .map(|f| {
                f.into_iter()
                    .map(|v| match v {
                        Vertex::Name(s) => s,
                        Vertex::Number(n) => n.to_string(),
                    })
                    .collect()
            })
            .collect()
    } else {
        text.lines()
            .map(tokens)
            .filter(|t| !t.is_empty())
            .map(|t| t.into_iter().map(|(_, s)| s.to_string()).collect())
            .collect()
    };
    if facets.iter().any(Vec::is_empty) {
        return Err(parse_err(1, 1, "empty facet"));
    }
    SimplicialComplex::from_labeled_facets(&facets)
}

fn zoo_args(name: &str, expected: usize) -> Result<Vec<usize>> {
    let parts: Vec<&str> = name.split(':').skip(1).collect();
    if parts.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "`{}` takes {} parameter{}",
            name.split(':').next().unwrap_or(name),
            expected,
            if expected == 1 { "" } else { "s" }
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("`{}` is not a nonnegative integer in `{}`", p, name)))
        })
        .collect()
}

/// Names accepted by [`zoo_poset`].
pub const POSET_ZOO: &[&str] = &["sphere:m", "fence:m", "wedge_fence:n:m", "chain:k", "antichain:k"];

/// Names accepted by [`zoo_complex`].
pub const COMPLEX_ZOO: &[&str] = &["cycle:m", "simplex:d", "boundary:d"];

/// A named poset: `sphere:m`, `fence:m`, `wedge_fence:n:m`, `chain:k` (`k`
/// elements) or `antichain:k`. `Ok(None)` when the family name is unknown.
pub fn zoo_poset(name: &str) -> Result<Option<FinitePoset>> {
    let family = name.split(':').next().unwrap_or("");
    Ok(Some(match family {
        "sphere" => sphere(zoo_args(name, 1)?[0]),
        "fence" => fence(zoo_args(name, 1)?[0]),
        "wedge_fence" => {
            let a = zoo_args(name, 2)?;
            wedge_fence(a[0], a[1])?
        }
        "chain" => chain(zoo_args(name, 1)?[0]),
        "antichain" => antichain(zoo_args(name, 1)?[0]),
        _ => return Ok(None),
    }))
}

/// A named complex: `cycle:m`, `simplex:d` or `boundary:d` (of the
/// `d`-simplex). `Ok(None)` when the family name is unknown.
pub fn zoo_complex(name: &str) -> Result<Option<SimplicialComplex>> {
    let family = name.split(':').next().unwrap_or("");
    Ok(Some(match family {
        "cycle" => cycle(zoo_args(name, 1)?[0])?,
        "simplex" => simplex(zoo_args(name, 1)?[0]),
        "boundary" => simplex_boundary(zoo_args(name, 1)?[0])?,
        _ => return Ok(None),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_posets_agree() {
        let text = "# circle\nelements: a b c d\na < c\na < d\nb < c  # trailing comment\nd > b\n";
        let p = parse_poset(text).unwrap();
        let q = parse_poset(r#"{"elements": ["a","b","c","d"], "hasse": [["a","c"],["a","d"],["b","c"],["b","d"]]}"#).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.hasse_edges().len(), 4);
        let again = parse_poset(&poset_to_json(&p).to_string()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_poset("elements: a b\na < z\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 2,
                column: 5,
                message: "unknown element `z`".into()
            }
        );
        assert!(matches!(parse_poset("a < b\n"), Err(Error::Parse { line: 1, column: 1, .. })));
        assert!(matches!(parse_poset("elements: a b\n  a <= b\n"), Err(Error::Parse { line: 2, column: 3, .. })));
        assert!(matches!(parse_poset("{\"elements\": [\"a\",\n 3]}"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_poset("elements: a b\na < b\nb < a\n"), Err(Error::CycleDetected(_))));
    }

    #[test]
    fn complexes_parse() {
        let k = parse_complex("a b\nb c\n# comment\n\nc a\n").unwrap();
        assert_eq!(k.facets().len(), 3);
        let j = parse_complex(r#"{"facets": [[1, 2], [2, 3], [3, 1]]}"#).unwrap();
        assert_eq!(j.facets().len(), 3);
        assert!(parse_complex("{\"facets\": [[]]}").is_err());
    }

    #[test]
    fn zoo_names() {
        assert_eq!(zoo_poset("sphere:1").unwrap().unwrap().len(), 4);
        assert_eq!(zoo_poset("wedge_fence:2:3").unwrap().unwrap().len(), 7);
        assert_eq!(zoo_poset("chain:3").unwrap().unwrap().len(), 3);
        assert!(zoo_poset("torus:1").unwrap().is_none());
        assert!(zoo_poset("fence:x").is_err());
        assert!(zoo_poset("fence").is_err());
        assert_eq!(zoo_complex("cycle:4").unwrap().unwrap().vertex_count(), 4);
        assert!(zoo_complex("sphere:1").unwrap().is_none());
    }
}
