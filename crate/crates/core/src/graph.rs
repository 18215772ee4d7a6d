//! Ground sets, directed input graphs, s-t cuts and augmented input families.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest ground set supported; vertex sets are `u64` bitmasks.
pub const MAX_VERTICES: usize = 64;

/// A vertex of the ground set. `s` is id 0, `t` is id 1 and interior vertex
/// `i` (0-based, in the fixed interior ordering) is id `i + 2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(u8);

impl Vertex {
    pub const S: Vertex = Vertex(0);
    pub const T: Vertex = Vertex(1);

    pub fn interior(index: usize) -> Vertex {
        assert!(index + 2 < MAX_VERTICES, "interior index {index} out of range");
        Vertex(index as u8 + 2)
    }

    pub fn from_id(id: usize) -> Vertex {
        assert!(id < MAX_VERTICES);
        Vertex(id as u8)
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn bit(self) -> u64 {
        1u64 << self.0
    }

    pub fn interior_index(self) -> Option<usize> {
        (self.0 >= 2).then(|| self.0 as usize - 2)
    }

    pub fn is_s(self) -> bool {
        self == Vertex::S
    }

    pub fn is_t(self) -> bool {
        self == Vertex::T
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "s"),
            1 => write!(f, "t"),
            i => write!(f, "u{}", i - 1),
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Vertex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "s" => Ok(Vertex::S),
            "t" => Ok(Vertex::T),
            _ => {
                let idx: usize = s
                    .strip_prefix('u')
                    .and_then(|d| d.parse().ok())
                    .filter(|&i: &usize| i >= 1 && i + 1 < MAX_VERTICES)
                    .ok_or_else(|| format!("unknown vertex name `{s}`"))?;
                Ok(Vertex::interior(idx - 1))
            }
        }
    }
}

/// A set of interior vertices as a bitmask over the interior ordering
/// (bit `i` is interior vertex `i`). This is also the canonical cut index
/// and Fourier basis index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(interior: usize) -> VertexSet {
        VertexSet(low_bits(interior))
    }

    pub fn singleton(index: usize) -> VertexSet {
        VertexSet(1u64 << index)
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(vs: I) -> VertexSet {
        let mut mask = 0;
        for v in vs {
            let i = v.interior_index().expect("s and t are not interior vertices");
            mask |= 1u64 << i;
        }
        VertexSet(mask)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains_index(self, index: usize) -> bool {
        index < 64 && self.0 >> index & 1 == 1
    }

    pub fn contains(self, v: Vertex) -> bool {
        v.interior_index().is_some_and(|i| self.contains_index(i))
    }

    pub fn with(self, index: usize) -> VertexSet {
        VertexSet(self.0 | 1u64 << index)
    }

    pub fn without(self, index: usize) -> VertexSet {
        VertexSet(self.0 & !(1u64 << index))
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Interior indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                i
            })
        })
    }

    pub fn vertices(self) -> impl Iterator<Item = Vertex> {
        self.indices().map(Vertex::interior)
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = VertexSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(VertexSet(cur))
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.vertices()).finish()
    }
}

pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The ground set `V(G)`: `s`, `t` and `n - 2` interior vertices in a fixed order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexSpace {
    n: usize,
}

impl VertexSpace {
    pub fn new(n: usize) -> Result<VertexSpace> {
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(Error::InvalidSpace(format!(
                "vertex count must lie in 2..={MAX_VERTICES}, got {n}"
            )));
        }
        Ok(VertexSpace { n })
    }

    pub fn with_interior(interior: usize) -> Result<VertexSpace> {
        VertexSpace::new(interior + 2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interior_count(&self) -> usize {
        self.n - 2
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.id() < self.n
    }

    pub fn interior(&self) -> impl Iterator<Item = Vertex> {
        (0..self.n - 2).map(Vertex::interior)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..self.n).map(Vertex::from_id)
    }

    pub fn full_interior(&self) -> VertexSet {
        VertexSet::full(self.n - 2)
    }

    /// All simple directed edges `v1 -> v2`, `v1 != v2`, in lexicographic id order.
    pub fn all_edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1));
        for a in self.vertices() {
            for b in self.vertices() {
                if a != b {
                    out.push(Edge::new(a, b));
                }
            }
        }
        out
    }

    /// Edges that can cross some cut: none enter `s`, none leave `t`.
    pub fn forward_edges(&self) -> Vec<Edge> {
        self.all_edges()
            .into_iter()
            .filter(|e| !e.to.is_s() && !e.from.is_t())
            .collect()
    }

    pub(crate) fn check(&self, other: &VertexSpace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SpaceMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// A directed edge `from -> to` of the ground set (also the label alphabet of networks).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
}

impl Edge {
    pub fn new(from: Vertex, to: Vertex) -> Edge {
        Edge { from, to }
    }

    pub const ST: Edge = Edge {
        from: Vertex::S,
        to: Vertex::T,
    };

    /// True iff the edge goes from the left to the right side of `cut`.
    pub fn crosses(&self, cut: &Cut) -> bool {
        cut.is_left(self.from) && !cut.is_left(self.to)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Edge {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("->")
            .ok_or_else(|| format!("edge `{s}` lacks `->`"))?;
        let (a, b): (Vertex, Vertex) = (a.parse()?, b.parse()?);
        if a == b {
            return Err(format!("self-loop `{s}`"));
        }
        Ok(Edge::new(a, b))
    }
}

/// A simple directed edge set stored as out-neighbour bitmask rows.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSet {
    rows: Vec<u64>,
}

impl EdgeSet {
    pub fn empty(n: usize) -> EdgeSet {
        EdgeSet { rows: vec![0; n] }
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> EdgeSet {
        let mut set = EdgeSet::empty(n);
        for e in edges {
            set.insert(e);
        }
        set
    }

    /// Complete directed graph on `n` vertices.
    pub fn complete(n: usize) -> EdgeSet {
        let all = low_bits(n);
        EdgeSet {
            rows: (0..n).map(|v| all & !(1u64 << v)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn insert(&mut self, e: Edge) {
        assert!(e.from != e.to, "self-loops are not allowed");
        assert!(e.from.id() < self.n() && e.to.id() < self.n(), "edge outside space");
        self.rows[e.from.id()] |= e.to.bit();
    }

    pub fn remove(&mut self, e: Edge) {
        self.rows[e.from.id()] &= !e.to.bit();
    }

    pub fn with(&self, e: Edge) -> EdgeSet {
        let mut out = self.clone();
        out.insert(e);
        out
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.rows
            .get(e.from.id())
            .is_some_and(|row| row & e.to.bit() != 0)
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// Edges in lexicographic `(from, to)` id order.
    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, &row)| {
            let mut rest = row;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Edge::new(Vertex::from_id(a), Vertex::from_id(b))
                })
            })
        })
    }

    /// Bitmask of vertices reachable from `v` by a directed path (excluding `v`
    /// itself unless it lies on a cycle).
    pub fn reachable_from(&self, v: Vertex) -> u64 {
        let mut seen = 0u64;
        let mut frontier = self.rows[v.id()];
        while frontier & !seen != 0 {
            let new = frontier & !seen;
            seen |= new;
            let mut rest = new;
            frontier = 0;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                frontier |= self.rows[u];
            }
        }
        seen
    }

    pub fn has_path(&self, from: Vertex, to: Vertex) -> bool {
        self.reachable_from(from) & to.bit() != 0
    }

    /// Comma-separated `a->b` list in canonical order.
    pub fn to_text(&self) -> String {
        self.iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_text(n: usize, text: &str) -> std::result::Result<EdgeSet, String> {
        let mut set = EdgeSet::empty(n);
        for part in text.split(',').filter(|p| !p.is_empty()) {
            let e: Edge = part.parse()?;
            if e.from.id() >= n || e.to.id() >= n {
                return Err(format!("edge `{part}` outside a space of {n} vertices"));
            }
            set.insert(e);
        }
        Ok(set)
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A simple directed graph on a vertex space.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InputGraph {
    space: VertexSpace,
    edges: EdgeSet,
}

impl InputGraph {
    pub fn new<I: IntoIterator<Item = Edge>>(space: VertexSpace, edges: I) -> Result<InputGraph> {
        let mut set = EdgeSet::empty(space.n());
        for e in edges {
            if !space.contains(e.from) || !space.contains(e.to) {
                return Err(Error::InvalidSpace(format!(
                    "edge {e} outside a space of {} vertices",
                    space.n()
                )));
            }
            if e.from == e.to {
                return Err(Error::InvalidSpace(format!("self-loop {e}")));
            }
            set.insert(e);
        }
        Ok(InputGraph { space, edges: set })
    }

    pub fn from_edge_set(space: VertexSpace, edges: EdgeSet) -> InputGraph {
        assert_eq!(space.n(), edges.n());
        InputGraph { space, edges }
    }

    /// The path `s -> w1 -> ... -> wk -> t` on a space with exactly `k` interior vertices.
    pub fn path(k: usize) -> Result<InputGraph> {
        let space = VertexSpace::with_interior(k)?;
        let mut seq = vec![Vertex::S];
        seq.extend(space.interior());
        seq.push(Vertex::T);
        InputGraph::new(space, seq.windows(2).map(|w| Edge::new(w[0], w[1])))
    }

    pub fn space(&self) -> VertexSpace {
        self.space
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn has_st_path(&self) -> bool {
        self.edges.has_path(Vertex::S, Vertex::T)
    }
}

/// An s-t cut, identified by the interior vertices on its left side.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Cut {
    interior: usize,
    left: VertexSet,
}

impl Cut {
    pub fn from_index(space: &VertexSpace, index: u64) -> Cut {
        let interior = space.interior_count();
        assert!(index & !low_bits(interior) == 0, "cut index out of range");
        Cut {
            interior,
            left: VertexSet(index),
        }
    }

    pub fn from_left(space: &VertexSpace, left: VertexSet) -> Cut {
        Cut::from_index(space, left.bits())
    }

    /// Canonical index: bit `i` set iff interior vertex `i` is on the left.
    pub fn index(&self) -> u64 {
        self.left.bits()
    }

    pub fn left_interior(&self) -> VertexSet {
        self.left
    }

    pub fn is_left(&self, v: Vertex) -> bool {
        match v.interior_index() {
            None => v.is_s(),
            Some(i) => self.left.contains_index(i),
        }
    }
}

/// Resource caps for every exhaustive enumeration in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest interior size for which all `2^(N-2)` cuts are enumerated.
    pub max_cut_bits: usize,
    pub max_family: u128,
    pub max_paths: u128,
    pub max_network_vertices: u128,
    pub max_rounds: usize,
    /// State budget for knowledge-operation searches.
    pub ops_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cut_bits: 24,
            max_family: 1 << 22,
            max_paths: 1 << 22,
            max_network_vertices: 1 << 24,
            max_rounds: 100_000,
            ops_budget: 1 << 22,
        }
    }
}

impl Limits {
    pub(crate) fn check_cuts(&self, space: &VertexSpace) -> Result<()> {
        let bits = space.interior_count();
        if bits > self.max_cut_bits {
            return Err(Error::EnumerationTooLarge {
                what: "cut enumeration",
                required: 1u128 << bits,
                limit: 1u128 << self.max_cut_bits,
            });
        }
        Ok(())
    }
}

pub fn enumerate_cuts(space: &VertexSpace, limits: &Limits) -> Result<Vec<Cut>> {
    limits.check_cuts(space)?;
    Ok((0..1u64 << space.interior_count())
        .map(|i| Cut::from_index(space, i))
        .collect())
}

/// `G(G0, V0, L, R, phi)` with `phi` mapping `v0[i]` to interior vertex `i` of `g0`.
pub fn build_augmented_input(
    g0: &InputGraph,
    space: &VertexSpace,
    v0: &[Vertex],
    left: VertexSet,
    right: VertexSet,
) -> Result<InputGraph> {
    let bad = |msg: String| Err(Error::InvalidFamilyParameters(msg));
    let k = g0.space().interior_count();
    if v0.len() != k {
        return bad(format!("V0 has {} vertices, base graph has {k} interior", v0.len()));
    }
    let mut v0_set = VertexSet::EMPTY;
    for &v in v0 {
        match v.interior_index() {
            Some(i) if space.contains(v) && !v0_set.contains_index(i) => v0_set = v0_set.with(i),
            _ => return bad(format!("V0 entry {v} is not a fresh interior vertex")),
        }
    }
    let full = space.full_interior();
    if !left.is_subset(full) || !right.is_subset(full) {
        return bad("L or R leaves the space".into());
    }
    if !left.is_disjoint(right) || !v0_set.is_disjoint(left.union(right)) {
        return bad("V0, L and R overlap".into());
    }
    if v0_set.union(left).union(right) != full {
        return bad("V0, L and R do not cover the interior".into());
    }
    let lift = |w: Vertex| match w.interior_index() {
        None => w,
        Some(i) => v0[i],
    };
    let mut edges = EdgeSet::empty(space.n());
    for v in left.vertices() {
        edges.insert(Edge::new(Vertex::S, v));
    }
    for v in right.vertices() {
        edges.insert(Edge::new(v, Vertex::T));
    }
    for e in g0.edges().iter() {
        edges.insert(Edge::new(lift(e.from), lift(e.to)));
    }
    Ok(InputGraph::from_edge_set(*space, edges))
}

/// One member of an augmented family together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    /// `v0[i]` is the preimage of interior vertex `i` of the base graph.
    pub v0: Vec<Vertex>,
    pub left: VertexSet,
    pub right: VertexSet,
    pub graph: InputGraph,
}

impl FamilyMember {
    pub fn v0_set(&self) -> VertexSet {
        VertexSet::from_vertices(self.v0.iter().copied())
    }
}

#[derive(Clone, Debug)]
pub struct InputFamily {
    pub base: InputGraph,
    pub space: VertexSpace,
    pub allow_left: bool,
    pub allow_right: bool,
    pub members: Vec<FamilyMember>,
}

impl InputFamily {
    pub fn graphs(&self) -> impl Iterator<Item = &InputGraph> {
        self.members.iter().map(|m| &m.graph)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn k(&self) -> usize {
        self.base.space().interior_count()
    }
}

/// Number of ordered selections of `k` items out of `n`.
pub fn falling_factorial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    ((n - k + 1)..=n).map(|x| x as u128).product()
}

pub fn factorial(k: usize) -> u128 {
    falling_factorial(k, k)
}

/// Closed-form member count before de-duplication.
pub fn family_size(interior: usize, k: usize, allow_left: bool, allow_right: bool) -> u128 {
    if k > interior {
        return 0;
    }
    let rest = interior - k;
    let splits: u128 = match (allow_left, allow_right) {
        (true, true) => 1u128.checked_shl(rest as u32).unwrap_or(u128::MAX),
        (true, false) | (false, true) => 1,
        (false, false) => u128::from(rest == 0),
    };
    falling_factorial(interior, k).saturating_mul(splits)
}

/// All distinct graphs `G(g0, V0, L, R, phi)` on `space`.
///
/// With `allow_right == false` the right side is empty and every vertex outside
/// `V0` lies in `L`; symmetrically for `allow_left == false`.
pub fn enumerate_family(
    g0: &InputGraph,
    space: &VertexSpace,
    allow_left: bool,
    allow_right: bool,
    limits: &Limits,
) -> Result<InputFamily> {
    let interior = space.interior_count();
    let k = g0.space().interior_count();
    if k > interior {
        return Err(Error::InvalidFamilyParameters(format!(
            "base graph has {k} interior vertices, target space only {interior}"
        )));
    }
    let size = family_size(interior, k, allow_left, allow_right);
    if size > limits.max_family {
        return Err(Error::EnumerationTooLarge {
            what: "input family",
            required: size,
            limit: limits.max_family,
        });
    }
    let mut members = Vec::with_capacity(size as usize);
    let mut seen = HashSet::new();
    for v0 in ordered_selections(interior, k) {
        let v0: Vec<Vertex> = v0.into_iter().map(Vertex::interior).collect();
        let rest = space.full_interior().difference(VertexSet::from_vertices(v0.iter().copied()));
        let splits: Vec<VertexSet> = match (allow_left, allow_right) {
            (true, true) => rest.subsets().collect(),
            (true, false) => vec![rest],
            (false, true) => vec![VertexSet::EMPTY],
            (false, false) if rest.is_empty() => vec![VertexSet::EMPTY],
            (false, false) => vec![],
        };
        for left in splits {
            let right = rest.difference(left);
            let graph = build_augmented_input(g0, space, &v0, left, right)?;
            if seen.insert(graph.edges().clone()) {
                members.push(FamilyMember {
                    v0: v0.clone(),
                    left,
                    right,
                    graph,
                });
            }
        }
    }
    Ok(InputFamily {
        base: g0.clone(),
        space: *space,
        allow_left,
        allow_right,
        members,
    })
}

/// Ordered selections of `k` distinct indices from `0..n`, lexicographically.
pub fn ordered_selections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, used: u64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if used >> i & 1 == 0 {
                cur.push(i);
                rec(n, k, used | 1 << i, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Every simple directed `s -> t` path, as its sequence of interior vertices.
pub fn simple_st_paths(space: &VertexSpace, limits: &Limits) -> Result<Vec<Vec<Vertex>>> {
    let interior = space.interior_count();
    let count: u128 = (0..=interior).map(|j| falling_factorial(interior, j)).sum();
    if count > limits.max_paths {
        return Err(Error::EnumerationTooLarge {
            what: "simple s-t paths",
            required: count,
            limit: limits.max_paths,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for len in 0..=interior {
        for sel in ordered_selections(interior, len) {
            out.push(sel.into_iter().map(Vertex::interior).collect());
        }
    }
    Ok(out)
}

/// The input graph consisting of exactly the path `s -> inner... -> t`.
pub fn path_input(space: &VertexSpace, inner: &[Vertex]) -> InputGraph {
    let mut edges = EdgeSet::empty(space.n());
    let mut prev = Vertex::S;
    for &v in inner.iter().chain(std::iter::once(&Vertex::T)) {
        edges.insert(Edge::new(prev, v));
        prev = v;
    }
    InputGraph::from_edge_set(*space, edges)
}

/// Contents of an input-family file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyFile {
    pub name: String,
    pub space: VertexSpace,
    pub k: usize,
    pub graphs: Vec<InputGraph>,
}

impl FamilyFile {
    pub fn from_family(name: &str, family: &InputFamily) -> FamilyFile {
        FamilyFile {
            name: name.to_string(),
            space: family.space,
            k: family.k(),
            graphs: family.graphs().cloned().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("FAMILY {} N={} K={}\n", self.name, self.space.n(), self.k);
        for (i, g) in self.graphs.iter().enumerate() {
            out.push_str(&format!("GRAPH {i} EDGES {}\n", g.edges().to_text()));
        }
        out
    }

    pub fn parse(text: &str) -> Result<FamilyFile> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty family file"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let field = |p: &str, key: &str| -> Result<usize> {
            p.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(1, format!("expected {key}<int>, got `{p}`")))
        };
        if parts.len() != 4 || parts[0] != "FAMILY" {
            return Err(Error::parse(1, "expected `FAMILY <name> N=<N> K=<k>`"));
        }
        let n = field(parts[2], "N=")?;
        let k = field(parts[3], "K=")?;
        let space = VertexSpace::new(n).map_err(|e| Error::parse(1, e.to_string()))?;
        let mut graphs = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.splitn(4, ' ');
            let (tag, idx, kw) = (it.next(), it.next(), it.next());
            let rest = it.next().unwrap_or("");
            if tag != Some("GRAPH") || kw != Some("EDGES") {
                return Err(Error::parse(lineno, "expected `GRAPH <index> EDGES <list>`"));
            }
            let idx: usize = idx
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(lineno, "bad graph index"))?;
            if idx != graphs.len() {
                return Err(Error::parse(lineno, format!("expected graph index {}", graphs.len())));
            }
            let edges = EdgeSet::parse_text(n, rest.trim()).map_err(|m| Error::parse(lineno, m))?;
            graphs.push(InputGraph::from_edge_set(space, edges));
        }
        Ok(FamilyFile {
            name: parts[1].to_string(),
            space,
            k,
            graphs,
        })
    }
}
