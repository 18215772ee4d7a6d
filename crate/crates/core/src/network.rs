//! Switching networks: acceptance, monotone soundness and completeness, and `G'(H)`.

mod serial;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cutspace::{can_transition, CutFunction};
use crate::error::{Error, Result};
use crate::graph::{enumerate_cuts, path_input, simple_st_paths, Cut, Edge, EdgeSet, InputGraph, Limits, VertexSet, VertexSpace};
use crate::scalar::Dyadic;

/// An edge label `e` or `¬e`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub negated: bool,
    pub edge: Edge,
}

impl Label {
    pub fn positive(edge: Edge) -> Label {
        Label { negated: false, edge }
    }

    pub fn negative(edge: Edge) -> Label {
        Label { negated: true, edge }
    }

    /// Whether the label is satisfied by input `g`.
    pub fn consistent_with(&self, g: &InputGraph) -> bool {
        g.contains(self.edge) != self.negated
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!")?;
        }
        write!(f, "{}", self.edge)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Label, String> {
        match s.strip_prefix('!') {
            Some(rest) => Ok(Label::negative(rest.parse()?)),
            None => Ok(Label::positive(s.parse()?)),
        }
    }
}

/// Per-vertex annotation of a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Annotation {
    Knowledge(EdgeSet),
    Fourier(CutFunction<Dyadic>),
}

/// An undirected labeled edge; stored with `a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetEdge {
    pub a: u32,
    pub b: u32,
    pub label: Label,
}

impl NetEdge {
    pub fn new(a: u32, b: u32, label: Label) -> NetEdge {
        NetEdge {
            a: a.min(b),
            b: a.max(b),
            label,
        }
    }
}

/// `<G', s', t', μ'>`. Edges are kept sorted with one copy per (pair, label);
/// self-loops are dropped since they never affect connectivity.
#[derive(Clone, Debug)]
pub struct SwitchingNetwork {
    space: VertexSpace,
    vertex_count: usize,
    s_prime: usize,
    t_prime: usize,
    annotations: Vec<Option<Annotation>>,
    edges: Vec<NetEdge>,
    offsets: Vec<u32>,
    adjacency: Vec<(u32, u32)>,
}

impl PartialEq for SwitchingNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.vertex_count == other.vertex_count
            && self.s_prime == other.s_prime
            && self.t_prime == other.t_prime
            && self.annotations == other.annotations
            && self.edges == other.edges
    }
}

impl SwitchingNetwork {
    pub fn new(
        space: VertexSpace,
        vertex_count: usize,
        s_prime: usize,
        t_prime: usize,
        mut edges: Vec<NetEdge>,
        mut annotations: Vec<Option<Annotation>>,
    ) -> Result<SwitchingNetwork> {
        let bad = |m: String| Err(Error::InvalidNetwork(m));
        if vertex_count > u32::MAX as usize {
            return bad("too many vertices".into());
        }
        if s_prime >= vertex_count || t_prime >= vertex_count {
            return bad("endpoint id out of range".into());
        }
        if s_prime == t_prime {
            return bad("s' and t' coincide".into());
        }
        if annotations.is_empty() {
            annotations = vec![None; vertex_count];
        }
        if annotations.len() != vertex_count {
            return bad(format!("{} annotations for {vertex_count} vertices", annotations.len()));
        }
        for a in annotations.iter().flatten() {
            let n = match a {
                Annotation::Knowledge(k) => k.n(),
                Annotation::Fourier(f) => f.space().n(),
            };
            if n != space.n() {
                return Err(Error::SpaceMismatch {
                    left: space.n(),
                    right: n,
                });
            }
        }
        for e in &mut edges {
            *e = NetEdge::new(e.a, e.b, e.label);
            if e.b as usize >= vertex_count {
                return bad(format!("edge endpoint {} out of range", e.b));
            }
            if !space.contains(e.label.edge.from) || !space.contains(e.label.edge.to) {
                return bad(format!("label {} outside the ground space", e.label));
            }
        }
        edges.retain(|e| e.a != e.b);
        edges.par_sort_unstable();
        edges.dedup();
        let mut degree = vec![0u32; vertex_count + 1];
        for e in &edges {
            degree[e.a as usize + 1] += 1;
            degree[e.b as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0u32, 0u32); offsets[vertex_count] as usize];
        for (i, e) in edges.iter().enumerate() {
            for (x, y) in [(e.a, e.b), (e.b, e.a)] {
                adjacency[fill[x as usize] as usize] = (y, i as u32);
                fill[x as usize] += 1;
            }
        }
        Ok(SwitchingNetwork {
            space,
            vertex_count,
            s_prime,
            t_prime,
            annotations,
            edges,
            offsets,
            adjacency,
        })
    }

    pub fn space(&self) -> VertexSpace {
        self.space
    }

    /// Size in the usual sense: the number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn s_prime(&self) -> usize {
        self.s_prime
    }

    pub fn t_prime(&self) -> usize {
        self.t_prime
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    pub fn annotation(&self, v: usize) -> Option<&Annotation> {
        self.annotations[v].as_ref()
    }

    pub fn annotations(&self) -> &[Option<Annotation>] {
        &self.annotations
    }

    pub fn is_monotone(&self) -> bool {
        self.edges.iter().all(|e| !e.label.negated)
    }

    /// `(neighbour, edge index)` pairs incident to `v`.
    pub fn neighbours(&self, v: usize) -> &[(u32, u32)] {
        &self.adjacency[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn has_edge(&self, a: usize, b: usize, label: Label) -> bool {
        self.edges
            .binary_search(&NetEdge::new(a as u32, b as u32, label))
            .is_ok()
    }

    /// Shortest `s' -> t'` path over allowed edges, avoiding blocked vertices.
    pub fn find_path(&self, allowed: impl Fn(&NetEdge) -> bool, blocked: Option<&[bool]>) -> Option<Walk> {
        let is_blocked = |v: usize| blocked.is_some_and(|b| b[v]);
        if is_blocked(self.s_prime) || is_blocked(self.t_prime) {
            return None;
        }
        let mut parent = vec![u32::MAX; self.vertex_count];
        let mut via = vec![u32::MAX; self.vertex_count];
        parent[self.s_prime] = self.s_prime as u32;
        let mut queue = VecDeque::from([self.s_prime]);
        while let Some(v) = queue.pop_front() {
            if v == self.t_prime {
                let mut vertices = vec![v];
                let mut labels = Vec::new();
                let mut cur = v;
                while cur != self.s_prime {
                    labels.push(self.edges[via[cur] as usize].label);
                    cur = parent[cur] as usize;
                    vertices.push(cur);
                }
                vertices.reverse();
                labels.reverse();
                return Some(Walk { vertices, labels });
            }
            for &(w, ei) in self.neighbours(v) {
                let w = w as usize;
                if parent[w] == u32::MAX && !is_blocked(w) && allowed(&self.edges[ei as usize]) {
                    parent[w] = v as u32;
                    via[w] = ei;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// A path in a network: vertex ids and the label of each traversed edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<usize>,
    pub labels: Vec<Label>,
}

/// An accepting path for `g`, if one exists.
pub fn accepts(net: &SwitchingNetwork, g: &InputGraph) -> Result<Option<Walk>> {
    net.space.check(&g.space())?;
    Ok(net.find_path(|e| e.label.consistent_with(g), None))
}

fn require_monotone(net: &SwitchingNetwork) -> Result<()> {
    if net.is_monotone() {
        Ok(())
    } else {
        Err(Error::Precondition("this check applies to monotone networks only".into()))
    }
}

/// `None` if sound; otherwise a cut whose uncrossed edges still connect `s'` to `t'`.
pub fn is_sound_monotone(net: &SwitchingNetwork, limits: &Limits) -> Result<Option<Cut>> {
    require_monotone(net)?;
    let cuts = enumerate_cuts(&net.space, limits)?;
    Ok(cuts
        .par_iter()
        .find_first(|c| net.find_path(|e| !e.label.edge.crosses(c), None).is_some())
        .copied())
}

/// `None` if every simple `s -> t` path input is accepted; otherwise the first that is not.
pub fn is_complete_monotone(net: &SwitchingNetwork, limits: &Limits) -> Result<Option<InputGraph>> {
    require_monotone(net)?;
    let paths = simple_st_paths(&net.space, limits)?;
    Ok(paths
        .par_iter()
        .map(|p| path_input(&net.space, p))
        .find_first(|g| net.find_path(|e| e.label.consistent_with(g), None).is_none()))
}

/// Outcome of checking a network against the accept and reject sets of an input set.
#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub accepted: usize,
    pub first_missed: Option<usize>,
    pub rejected: usize,
    pub first_wrongly_accepted: Option<usize>,
    /// Present when soundness had to be checked; `Some(None)` means sound.
    pub soundness: Option<Option<Cut>>,
    /// Present when completeness had to be checked; `Some(None)` means complete.
    pub completeness: Option<Option<InputGraph>>,
}

impl SolveReport {
    pub fn solves(&self) -> bool {
        self.first_missed.is_none()
            && self.first_wrongly_accepted.is_none()
            && !matches!(self.soundness, Some(Some(_)))
            && !matches!(self.completeness, Some(Some(_)))
    }
}

/// Checks that `net` accepts all of `accept` and rejects all of `reject`, adding
/// soundness when `reject` is empty and completeness when `accept` is empty.
pub fn solves(
    net: &SwitchingNetwork,
    accept: &[InputGraph],
    reject: &[InputGraph],
    limits: &Limits,
) -> Result<SolveReport> {
    for g in accept.iter().chain(reject) {
        net.space.check(&g.space())?;
    }
    let accepted_flags: Vec<bool> = accept
        .par_iter()
        .map(|g| net.find_path(|e| e.label.consistent_with(g), None).is_some())
        .collect();
    let rejected_flags: Vec<bool> = reject
        .par_iter()
        .map(|g| net.find_path(|e| e.label.consistent_with(g), None).is_none())
        .collect();
    let mut report = SolveReport {
        accepted: accepted_flags.iter().filter(|&&b| b).count(),
        first_missed: accepted_flags.iter().position(|&b| !b),
        rejected: rejected_flags.iter().filter(|&&b| b).count(),
        first_wrongly_accepted: rejected_flags.iter().position(|&b| !b),
        ..SolveReport::default()
    };
    if reject.is_empty() {
        report.soundness = Some(is_sound_monotone(net, limits)?);
    }
    if accept.is_empty() {
        report.completeness = Some(is_complete_monotone(net, limits)?);
    }
    Ok(report)
}

/// Interning builder for `G'(H)`: vertex 0 is `s' = -e_{}`, vertex 1 is `t' = e_{}`.
#[derive(Clone, Debug)]
pub struct GhBuilder {
    space: VertexSpace,
    functions: Vec<CutFunction<Dyadic>>,
    index: HashMap<CutFunction<Dyadic>, u32>,
    edges: Vec<NetEdge>,
    inserted: usize,
}

impl GhBuilder {
    pub fn new(space: VertexSpace) -> GhBuilder {
        let mut b = GhBuilder {
            space,
            functions: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            inserted: 0,
        };
        b.intern(CutFunction::constant(space, -Dyadic::ONE));
        b.intern(CutFunction::constant(space, Dyadic::ONE));
        b
    }

    /// Id of `f`, adding it if new.
    pub fn intern(&mut self, f: CutFunction<Dyadic>) -> u32 {
        self.inserted += 1;
        if let Some(&id) = self.index.get(&f) {
            return id;
        }
        let id = self.functions.len() as u32;
        self.index.insert(f.clone(), id);
        self.functions.push(f);
        id
    }

    pub fn id_of(&self, f: &CutFunction<Dyadic>) -> Option<u32> {
        self.index.get(f).copied()
    }

    pub fn function(&self, id: u32) -> &CutFunction<Dyadic> {
        &self.functions[id as usize]
    }

    pub fn functions(&self) -> &[CutFunction<Dyadic>] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Number of `intern` calls, i.e. the function count before de-duplication.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Adds an edge after checking the transition condition.
    pub fn add_edge(&mut self, a: u32, b: u32, label: Edge) -> Result<()> {
        if a == b {
            return Ok(());
        }
        if !can_transition(&self.functions[a as usize], &self.functions[b as usize], label)? {
            return Err(Error::InvalidTransition {
                from: a as usize,
                to: b as usize,
                label: label.to_string(),
            });
        }
        self.edges.push(NetEdge::new(a, b, Label::positive(label)));
        Ok(())
    }

    /// Adds an edge whose transition was already checked by the caller.
    pub(crate) fn push_checked_edge(&mut self, a: u32, b: u32, label: Edge) {
        if a != b {
            self.edges.push(NetEdge::new(a, b, Label::positive(label)));
        }
    }

    /// Adds every edge allowed by the transition condition for the given labels.
    pub fn add_all_edges(&mut self, labels: &[Edge]) -> Result<()> {
        let fs = &self.functions;
        let found: Vec<NetEdge> = (0..fs.len())
            .into_par_iter()
            .map(|i| -> Result<Vec<NetEdge>> {
                let mut out = Vec::new();
                for j in i + 1..fs.len() {
                    for &l in labels {
                        if can_transition(&fs[i], &fs[j], l)? {
                            out.push(NetEdge::new(i as u32, j as u32, Label::positive(l)));
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        self.edges.extend(found);
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn finish(self) -> Result<SwitchingNetwork> {
        let annotations = self
            .functions
            .into_iter()
            .map(|f| Some(Annotation::Fourier(f)))
            .collect::<Vec<_>>();
        SwitchingNetwork::new(self.space, annotations.len(), 0, 1, self.edges, annotations)
    }
}

/// How `build_gh` chooses edges.
#[derive(Clone, Debug)]
pub enum GhMode {
    /// Every (pair, label) allowed by the transition condition.
    Full,
    /// Exactly the given `(f, g, label)` triples, each checked.
    Constructive(Vec<(CutFunction<Dyadic>, CutFunction<Dyadic>, Edge)>),
}

/// `G'(H)` for a function set containing `-e_{}` and `e_{}`.
pub fn build_gh(h_set: &[CutFunction<Dyadic>], labels: &[Edge], mode: GhMode) -> Result<SwitchingNetwork> {
    let space = h_set
        .first()
        .ok_or(Error::MissingEndpoint("s'"))?
        .space();
    let minus = CutFunction::constant(space, -Dyadic::ONE);
    let plus = CutFunction::constant(space, Dyadic::ONE);
    if !h_set.contains(&minus) {
        return Err(Error::MissingEndpoint("s'"));
    }
    if !h_set.contains(&plus) {
        return Err(Error::MissingEndpoint("t'"));
    }
    let mut b = GhBuilder::new(space);
    for h in h_set {
        space.check(&h.space())?;
        b.intern(h.clone());
    }
    match mode {
        GhMode::Full => b.add_all_edges(labels)?,
        GhMode::Constructive(triples) => {
            for (f, g, l) in triples {
                let (a, c) = match (b.id_of(&f), b.id_of(&g)) {
                    (Some(a), Some(c)) => (a, c),
                    _ => {
                        return Err(Error::Precondition(
                            "constructive edge endpoint is not in the function set".into(),
                        ))
                    }
                };
                b.add_edge(a, c, l)?;
            }
        }
    }
    b.finish()
}

/// The knowledge set annotation as a vertex set of `s -> v` targets, when it has that form.
pub fn kv_vertices(k: &EdgeSet) -> Option<VertexSet> {
    let mut vs = VertexSet::EMPTY;
    for e in k.iter() {
        if !e.from.is_s() {
            return None;
        }
        vs = vs.with(e.to.interior_index()?);
    }
    Some(vs)
}
