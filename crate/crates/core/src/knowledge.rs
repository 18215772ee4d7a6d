//! Knowledge sets and certain-knowledge switching networks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet, InputGraph, Limits, Vertex, VertexSet, VertexSpace};
use crate::network::{Annotation, Label, NetEdge, SwitchingNetwork};

/// A directed graph on the ground set, compared through its transitive closure.
///
/// The raw edge set is what is stored; the closure is computed once on demand.
#[derive(Clone)]
pub struct KnowledgeSet {
    edges: EdgeSet,
    closure: OnceLock<EdgeSet>,
}

impl KnowledgeSet {
    pub fn new(edges: EdgeSet) -> KnowledgeSet {
        KnowledgeSet {
            edges,
            closure: OnceLock::new(),
        }
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(space: &VertexSpace, edges: I) -> KnowledgeSet {
        KnowledgeSet::new(EdgeSet::from_edges(space.n(), edges))
    }

    pub fn empty(space: &VertexSpace) -> KnowledgeSet {
        KnowledgeSet::new(EdgeSet::empty(space.n()))
    }

    /// `{s -> t}`, the knowledge set of `t'`.
    pub fn st(space: &VertexSpace) -> KnowledgeSet {
        KnowledgeSet::from_edges(space, [Edge::ST])
    }

    /// `K_V = {s -> v : v in V}`.
    pub fn from_vertex_set(space: &VertexSpace, vs: VertexSet) -> KnowledgeSet {
        KnowledgeSet::from_edges(space, vs.vertices().map(|v| Edge::new(Vertex::S, v)))
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.edges.n()
    }

    pub fn with(&self, e: Edge) -> KnowledgeSet {
        KnowledgeSet::new(self.edges.with(e))
    }

    pub fn closure(&self) -> &EdgeSet {
        self.closure.get_or_init(|| closure_of(&self.edges))
    }

    pub fn knows_st(&self) -> bool {
        self.edges.has_path(Vertex::S, Vertex::T)
    }

    /// Endpoints of raw edges, as a bitmask over vertex ids.
    pub fn endpoints(&self) -> u64 {
        let mut mask = 0u64;
        for e in self.edges.iter() {
            mask |= e.from.bit() | e.to.bit();
        }
        mask
    }
}

impl PartialEq for KnowledgeSet {
    /// Raw equality. Use [`k_equal`] for closure equality.
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges
    }
}

impl Eq for KnowledgeSet {}

impl fmt::Debug for KnowledgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.edges, f)
    }
}

/// Transitive closure; collapses to the complete graph once `s` reaches `t`.
pub fn closure_of(edges: &EdgeSet) -> EdgeSet {
    let n = edges.n();
    if edges.has_path(Vertex::S, Vertex::T) {
        return EdgeSet::complete(n);
    }
    EdgeSet::from_edges(
        n,
        (0..n).flat_map(|a| {
            let va = Vertex::from_id(a);
            let reach = edges.reachable_from(va) & !va.bit();
            (0..n)
                .filter(move |b| reach >> b & 1 == 1)
                .map(move |b| Edge::new(va, Vertex::from_id(b)))
        }),
    )
}

pub fn k_equal(k1: &KnowledgeSet, k2: &KnowledgeSet) -> bool {
    k1.closure() == k2.closure()
}

pub fn k_subset(k1: &KnowledgeSet, k2: &KnowledgeSet) -> bool {
    k1.closure().is_subset(k2.closure())
}

/// Condition 2 of a valid description: each side is implied by the other plus `label`.
pub fn step_valid(k1: &KnowledgeSet, k2: &KnowledgeSet, label: Edge) -> bool {
    let up1 = closure_of(&k1.edges().with(label));
    let up2 = closure_of(&k2.edges().with(label));
    k2.closure().is_subset(&up1) && k1.closure().is_subset(&up2)
}

/// Raw knowledge sets encoded as bitmasks over the `N(N-1)` possible edges,
/// with the reversible operations as graph moves.
#[derive(Clone, Debug)]
pub struct OpsGraph {
    n: usize,
    index: Vec<Vec<u8>>,
    edges: Vec<Edge>,
    label_bit: u64,
    st_bit: u64,
}

impl OpsGraph {
    pub fn new(space: &VertexSpace, label: Edge) -> Result<OpsGraph> {
        let n = space.n();
        if n * (n - 1) > 64 {
            return Err(Error::Precondition(format!(
                "operation search needs at most 8 vertices, got {n}"
            )));
        }
        let edges = space.all_edges();
        let mut index = vec![vec![u8::MAX; n]; n];
        for (i, e) in edges.iter().enumerate() {
            index[e.from.id()][e.to.id()] = i as u8;
        }
        let bit = |e: Edge| 1u64 << index[e.from.id()][e.to.id()];
        Ok(OpsGraph {
            n,
            label_bit: bit(label),
            st_bit: bit(Edge::ST),
            index,
            edges,
        })
    }

    pub fn state_bits(&self) -> usize {
        self.edges.len()
    }

    pub fn encode(&self, set: &EdgeSet) -> u64 {
        set.iter()
            .map(|e| 1u64 << self.index[e.from.id()][e.to.id()])
            .fold(0, |a, b| a | b)
    }

    pub fn decode(&self, state: u64) -> EdgeSet {
        EdgeSet::from_edges(
            self.n,
            self.edges
                .iter()
                .enumerate()
                .filter(|(i, _)| state >> i & 1 == 1)
                .map(|(_, &e)| e),
        )
    }

    /// States reachable by one application of operation 1, 2 or 3.
    pub fn moves(&self, state: u64) -> Vec<u64> {
        let mut out = vec![state ^ self.label_bit];
        if state & self.st_bit != 0 {
            for i in 0..self.edges.len() {
                let b = 1u64 << i;
                if b != self.st_bit {
                    out.push(state ^ b);
                }
            }
        }
        let mut rows = vec![0u64; self.n];
        for (i, e) in self.edges.iter().enumerate() {
            if state >> i & 1 == 1 {
                rows[e.from.id()] |= e.to.bit();
            }
        }
        for a in 0..self.n {
            let mut two_step = 0u64;
            let mut mid = rows[a];
            while mid != 0 {
                let v = mid.trailing_zeros() as usize;
                mid &= mid - 1;
                two_step |= rows[v];
            }
            two_step &= !(1u64 << a);
            while two_step != 0 {
                let b = two_step.trailing_zeros() as usize;
                two_step &= two_step - 1;
                out.push(state ^ 1u64 << self.index[a][b]);
            }
        }
        out
    }
}

/// Result of a bounded search over the reversible operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpsOutcome {
    Reachable { steps: usize },
    /// The whole reachable component was explored without meeting the target.
    Unreachable { explored: usize },
    BudgetExhausted { explored: usize },
}

impl OpsOutcome {
    pub fn is_reachable(&self) -> bool {
        matches!(self, OpsOutcome::Reachable { .. })
    }
}

/// Breadth-first search from the raw set `k1` to the raw set `k2` using
/// operations 1-3 with `label` as the operation-1 edge.
pub fn ops_reachable(k1: &KnowledgeSet, k2: &KnowledgeSet, label: Edge, budget: usize) -> Result<OpsOutcome> {
    if k1.n() != k2.n() {
        return Err(Error::SpaceMismatch {
            left: k1.n(),
            right: k2.n(),
        });
    }
    let space = VertexSpace::new(k1.n())?;
    let graph = OpsGraph::new(&space, label)?;
    let start = graph.encode(k1.edges());
    let goal = graph.encode(k2.edges());
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, depth)) = queue.pop_front() {
        if state == goal {
            return Ok(OpsOutcome::Reachable { steps: depth });
        }
        for next in graph.moves(state) {
            if seen.insert(next) {
                if seen.len() > budget {
                    return Ok(OpsOutcome::BudgetExhausted { explored: seen.len() });
                }
                queue.push_back((next, depth + 1));
            }
        }
    }
    Ok(OpsOutcome::Unreachable { explored: seen.len() })
}

/// Component id of every raw state under operations 1-3, numbered in order of
/// first appearance; equal ids mean [`ops_reachable`] succeeds.
pub fn ops_components(space: &VertexSpace, label: Edge, budget: usize) -> Result<Vec<u32>> {
    let graph = OpsGraph::new(space, label)?;
    let states = 1usize << graph.state_bits();
    if states > budget {
        return Err(Error::EnumerationTooLarge {
            what: "operation state space",
            required: states as u128,
            limit: budget as u128,
        });
    }
    let mut comp = vec![u32::MAX; states];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for root in 0..states {
        if comp[root] != u32::MAX {
            continue;
        }
        comp[root] = next;
        stack.push(root as u64);
        while let Some(state) = stack.pop() {
            for m in graph.moves(state) {
                if comp[m as usize] == u32::MAX {
                    comp[m as usize] = next;
                    stack.push(m);
                }
            }
        }
        next += 1;
    }
    Ok(comp)
}

/// Knowledge set per network vertex.
#[derive(Clone, Debug)]
pub struct CkDescription {
    pub assignment: Vec<KnowledgeSet>,
}

impl CkDescription {
    /// Reads `KSET` annotations; `None` if some vertex lacks one.
    pub fn from_annotations(net: &SwitchingNetwork) -> Option<CkDescription> {
        let assignment = (0..net.vertex_count())
            .map(|v| match net.annotation(v) {
                Some(Annotation::Knowledge(k)) => Some(KnowledgeSet::new(k.clone())),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(CkDescription { assignment })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CkViolation {
    SourceNotEmpty,
    SinkNotSt,
    Edge { a: usize, b: usize, label: Edge },
}

/// Checks conditions 1 and 2; returns the first violation found, if any.
pub fn validate_ck(net: &SwitchingNetwork, d: &CkDescription) -> Result<Option<CkViolation>> {
    if !net.is_monotone() {
        return Err(Error::Precondition(
            "certain-knowledge descriptions apply to monotone networks only".into(),
        ));
    }
    if d.assignment.len() < net.vertex_count() {
        return Err(Error::IncompleteDescription {
            vertex: d.assignment.len(),
        });
    }
    let space = net.space();
    if let Some(k) = d.assignment.iter().find(|k| k.n() != space.n()) {
        return Err(Error::SpaceMismatch {
            left: space.n(),
            right: k.n(),
        });
    }
    if !k_equal(&d.assignment[net.s_prime()], &KnowledgeSet::empty(&space)) {
        return Ok(Some(CkViolation::SourceNotEmpty));
    }
    if !k_equal(&d.assignment[net.t_prime()], &KnowledgeSet::st(&space)) {
        return Ok(Some(CkViolation::SinkNotSt));
    }
    let bad = net.edges().par_iter().find_first(|e| {
        !step_valid(&d.assignment[e.a as usize], &d.assignment[e.b as usize], e.label.edge)
    });
    Ok(bad.map(|e| CkViolation::Edge {
        a: e.a as usize,
        b: e.b as usize,
        label: e.label.edge,
    }))
}

/// Incrementally grown certain-knowledge network with every condition-2 edge.
///
/// Closures of each vertex set, with and without each label, are cached so
/// adding a vertex costs one subset test per (existing vertex, label).
#[derive(Clone, Debug)]
pub struct CkNetworkBuilder {
    space: VertexSpace,
    labels: Vec<Edge>,
    sets: Vec<KnowledgeSet>,
    lifted: Vec<Vec<EdgeSet>>,
    lookup: HashMap<EdgeSet, usize>,
    edges: Vec<(u32, u32, Edge)>,
}

impl CkNetworkBuilder {
    /// Starts with `s'` (the empty set) as vertex 0 and `t'` (`{s -> t}`) as vertex 1.
    pub fn new(space: VertexSpace, labels: Vec<Edge>) -> CkNetworkBuilder {
        let mut b = CkNetworkBuilder {
            space,
            labels,
            sets: Vec::new(),
            lifted: Vec::new(),
            lookup: HashMap::new(),
            edges: Vec::new(),
        };
        b.add(KnowledgeSet::empty(&space));
        b.add(KnowledgeSet::st(&space));
        b
    }

    pub fn vertex_count(&self) -> usize {
        self.sets.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adds a vertex unless a closure-equal one exists; returns its id.
    pub fn add(&mut self, k: KnowledgeSet) -> usize {
        let key = k.closure().clone();
        if let Some(&id) = self.lookup.get(&key) {
            return id;
        }
        let id = self.sets.len();
        let lifted: Vec<EdgeSet> = self
            .labels
            .iter()
            .map(|&l| closure_of(&k.closure().with(l)))
            .collect();
        let kc = k.closure();
        let new_edges: Vec<(u32, u32, Edge)> = (0..id)
            .into_par_iter()
            .flat_map_iter(|other| {
                let (ko, lo) = (self.sets[other].closure(), &self.lifted[other]);
                let lifted = &lifted;
                self.labels
                    .iter()
                    .enumerate()
                    .filter(move |&(li, _)| kc.is_subset(&lo[li]) && ko.is_subset(&lifted[li]))
                    .map(move |(_, &l)| (other as u32, id as u32, l))
            })
            .collect();
        self.edges.extend(new_edges);
        self.lookup.insert(key, id);
        self.sets.push(k);
        self.lifted.push(lifted);
        id
    }

    /// Drops every vertex and edge added after the given counts.
    pub fn truncate(&mut self, vertices: usize, edges: usize) {
        for k in self.sets.drain(vertices..) {
            self.lookup.remove(k.closure());
        }
        self.lifted.truncate(vertices);
        self.edges.truncate(edges);
    }

    pub fn sets(&self) -> &[KnowledgeSet] {
        &self.sets
    }

    pub fn index_of(&self, k: &KnowledgeSet) -> Option<usize> {
        self.lookup.get(k.closure()).copied()
    }

    pub fn to_network(&self) -> Result<(SwitchingNetwork, CkDescription)> {
        let edges = self
            .edges
            .iter()
            .map(|&(a, b, l)| NetEdge::new(a, b, Label::positive(l)))
            .collect();
        let annotations = self
            .sets
            .iter()
            .map(|k| Some(Annotation::Knowledge(k.edges().clone())))
            .collect();
        let net = SwitchingNetwork::new(self.space, self.sets.len(), 0, 1, edges, annotations)?;
        Ok((
            net,
            CkDescription {
                assignment: self.sets.clone(),
            },
        ))
    }

    /// Whether `s'` reaches `t'` using only edges whose labels are in `g`.
    pub fn accepts(&self, g: &InputGraph) -> bool {
        let n = self.sets.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b, l) in &self.edges {
            if g.contains(l) {
                adj[a as usize].push(b as usize);
                adj[b as usize].push(a as usize);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            if v == 1 {
                return true;
            }
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }
}

/// Which labels network builders consider.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LabelUniverse {
    /// Every edge except those entering `s` or leaving `t`.
    #[default]
    Forward,
    All,
}

impl LabelUniverse {
    pub fn labels(self, space: &VertexSpace) -> Vec<Edge> {
        match self {
            LabelUniverse::Forward => space.forward_edges(),
            LabelUniverse::All => space.all_edges(),
        }
    }
}

pub fn basic_ck_size(interior: usize, m: usize) -> u128 {
    let mut total = 1u128; // t'
    let mut binom = 1u128;
    for j in 0..=m.min(interior) {
        total += binom;
        binom = binom * (interior - j) as u128 / (j as u128 + 1);
    }
    total
}

/// `G'(V(G), m)`: vertices `K_V` for `|V| <= m` plus `t'`, all condition-2 edges.
///
/// Vertex 0 is `s' = K_{}` and vertex 1 is `t'`; the rest follow by size, then bitmask.
pub fn build_basic_ck(
    space: &VertexSpace,
    m: usize,
    universe: LabelUniverse,
    limits: &Limits,
) -> Result<(SwitchingNetwork, CkDescription)> {
    let interior = space.interior_count();
    if m > interior {
        return Err(Error::Precondition(format!(
            "m = {m} exceeds the interior size {interior}"
        )));
    }
    let size = basic_ck_size(interior, m);
    if size > limits.max_network_vertices {
        return Err(Error::EnumerationTooLarge {
            what: "basic certain-knowledge network",
            required: size,
            limit: limits.max_network_vertices,
        });
    }
    let mut builder = CkNetworkBuilder::new(*space, universe.labels(space));
    let mut subsets: Vec<VertexSet> = space
        .full_interior()
        .subsets()
        .filter(|v| !v.is_empty() && v.len() <= m)
        .collect();
    subsets.sort_by_key(|v| (v.len(), v.bits()));
    for v in subsets {
        builder.add(KnowledgeSet::from_vertex_set(space, v));
    }
    builder.to_network()
}

/// The least `m` for which `G'(V(G0), m)` accepts every graph in `inputs`.
pub fn compute_sc(inputs: &[InputGraph], limits: &Limits) -> Result<usize> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::Precondition("sc of an empty input set".into()))?;
    let space = first.space();
    for g in inputs {
        space.check(&g.space())?;
        if !g.has_st_path() {
            return Err(Error::Precondition(
                "sc is defined here only for inputs containing an s-t path".into(),
            ));
        }
    }
    let mut builder = CkNetworkBuilder::new(space, LabelUniverse::Forward.labels(&space));
    for m in 0..=space.interior_count() {
        if basic_ck_size(space.interior_count(), m) > limits.max_network_vertices {
            return Err(Error::EnumerationTooLarge {
                what: "basic certain-knowledge network",
                required: basic_ck_size(space.interior_count(), m),
                limit: limits.max_network_vertices,
            });
        }
        if m > 0 {
            let mut layer: Vec<VertexSet> = space
                .full_interior()
                .subsets()
                .filter(|v| v.len() == m)
                .collect();
            layer.sort();
            for v in layer {
                builder.add(KnowledgeSet::from_vertex_set(&space, v));
            }
        }
        if inputs.par_iter().all(|g| builder.accepts(g)) {
            return Ok(m);
        }
    }
    Err(Error::ConstructionInfeasible(
        "no m up to the interior size accepts every input".into(),
    ))
}
