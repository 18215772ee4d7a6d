//! Line-oriented network files.
//!
//! ```text
//! SWNET v1
//! N 4
//! SPRIME 0
//! TPRIME 1
//! VERT 0 KSET -
//! VERT 1 KSET s->t
//! VERT 2 FOUR 0:1/2^1;1:1/2^1
//! VERT 3
//! EDGE 0 2 s->u1
//! END 4 1
//! ```
//!
//! The closing `END <vertices> <edges>` line makes truncated files detectable.

use std::fmt::Write as _;

use super::{Annotation, Label, NetEdge, SwitchingNetwork};
use crate::cutspace::CutFunction;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, VertexSpace};

const MAGIC: &str = "SWNET v1";

impl SwitchingNetwork {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(64 * (self.vertex_count + self.edges.len()));
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "N {}", self.space.n()).unwrap();
        writeln!(out, "SPRIME {}", self.s_prime).unwrap();
        writeln!(out, "TPRIME {}", self.t_prime).unwrap();
        for (v, a) in self.annotations.iter().enumerate() {
            match a {
                None => writeln!(out, "VERT {v}"),
                Some(Annotation::Knowledge(k)) if k.is_empty() => writeln!(out, "VERT {v} KSET -"),
                Some(Annotation::Knowledge(k)) => writeln!(out, "VERT {v} KSET {}", k.to_text()),
                Some(Annotation::Fourier(f)) => writeln!(out, "VERT {v} FOUR {}", f.to_text()),
            }
            .unwrap();
        }
        for e in &self.edges {
            writeln!(out, "EDGE {} {} {}", e.a, e.b, e.label).unwrap();
        }
        writeln!(out, "END {} {}", self.vertex_count, self.edges.len()).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<SwitchingNetwork> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("unexpected end of file, expected {what}")))
        };
        let (ln, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::parse(ln, format!("expected `{MAGIC}`")));
        }
        let header = |(ln, line): (usize, &str), key: &str| -> Result<usize> {
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| Error::parse(ln, format!("expected `{key} <int>`")))
        };
        let n = header(next("N")?, "N")?;
        let space = VertexSpace::new(n).map_err(|e| Error::parse(2, e.to_string()))?;
        let s_prime = header(next("SPRIME")?, "SPRIME")?;
        let t_prime = header(next("TPRIME")?, "TPRIME")?;
        let mut annotations = Vec::new();
        let mut edges = Vec::new();
        let mut end: Option<(usize, usize, usize)> = None;
        for (ln, line) in lines {
            if end.is_some() {
                return Err(Error::parse(ln, "content after END"));
            }
            let parts: Vec<&str> = line.split(' ').collect();
            let int = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| Error::parse(ln, format!("expected an integer, got `{s}`")))
            };
            match parts.as_slice() {
                ["VERT", id, rest @ ..] => {
                    if !edges.is_empty() {
                        return Err(Error::parse(ln, "VERT after EDGE"));
                    }
                    if int(id)? != annotations.len() {
                        return Err(Error::parse(ln, format!("expected vertex {}", annotations.len())));
                    }
                    annotations.push(match rest {
                        [] => None,
                        ["KSET", "-"] => Some(Annotation::Knowledge(EdgeSet::empty(n))),
                        ["KSET", list] => Some(Annotation::Knowledge(
                            EdgeSet::parse_text(n, list).map_err(|m| Error::parse(ln, m))?,
                        )),
                        ["FOUR", terms] => Some(Annotation::Fourier(
                            CutFunction::parse_text(space, terms).map_err(|m| Error::parse(ln, m))?,
                        )),
                        _ => return Err(Error::parse(ln, "malformed VERT annotation")),
                    });
                }
                ["EDGE", a, b, label] => {
                    let label: Label = label.parse().map_err(|m: String| Error::parse(ln, m))?;
                    let (a, b) = (int(a)?, int(b)?);
                    if a > b || a >= annotations.len() || b >= annotations.len() {
                        return Err(Error::parse(ln, "edge endpoints must be known vertices with a <= b"));
                    }
                    let e = NetEdge::new(a as u32, b as u32, label);
                    if edges.last().is_some_and(|last: &NetEdge| *last >= e) {
                        return Err(Error::parse(ln, "edges must be sorted and distinct"));
                    }
                    edges.push(e);
                }
                ["END", v, e] => end = Some((ln, int(v)?, int(e)?)),
                _ => return Err(Error::parse(ln, format!("unrecognized line `{line}`"))),
            }
        }
        let (ln, v, e) = end.ok_or_else(|| Error::parse(0, "missing END line (truncated file?)"))?;
        if v != annotations.len() || e != edges.len() {
            return Err(Error::parse(ln, "END counts do not match the file body"));
        }
        SwitchingNetwork::new(space, v, s_prime, t_prime, edges, annotations)
            .map_err(|err| Error::parse(ln, err.to_string()))
    }
}
