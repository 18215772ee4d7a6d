//! The input-independent Fourier-function network.
//!
//! Each chain of [`super::chains`] depends on its input only through the signs
//! `θ` and the side of each moving vertex. Enumerating every sign pattern and
//! both sides of every step gives a finite family of step graphs per
//! (partition, index set, distinguished vertices); their union, with shared
//! functions merged, is the network.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bounds::thm2_bound;
use crate::cutspace::{can_transition, CutFunction};
use crate::error::{Error, Result};
use crate::graph::{low_bits, Edge, InputGraph, Limits, Vertex, VertexSet, VertexSpace};
use crate::knowledge::compute_sc;
use crate::network::{GhBuilder, SwitchingNetwork};
use crate::scalar::Dyadic;

use super::chains::{grown_block, progress_function};
use super::cover::{build_partition_cover, index_masks, PartitionCover};
use super::{block_function, Partition, SignedBlock};

type F = CutFunction<Dyadic>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Thm2Mode {
    /// Only the chain edges, each checked against the transition condition.
    #[default]
    Constructive,
    /// Every edge the transition condition allows between the chain functions.
    Full,
}

#[derive(Clone, Debug, Default)]
pub struct Thm2Options {
    pub seed: u64,
    pub mode: Thm2Mode,
    pub limits: Limits,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FamilyCounts {
    pub start: usize,
    pub progress: usize,
    pub switch: usize,
}

#[derive(Clone, Debug)]
pub struct Thm2Build {
    pub network: SwitchingNetwork,
    pub index: HashMap<F, u32>,
    pub cover: PartitionCover,
    pub k: usize,
    pub m: usize,
    pub families: FamilyCounts,
    /// Functions generated before merging duplicates.
    pub generated: usize,
    pub bound: BigUint,
    /// Whether some base graph has the edge `s -> t`, adding a shortcut from every vertex to `t'`.
    pub st_shortcut: bool,
    pub mode: Thm2Mode,
}

impl Thm2Build {
    pub fn size(&self) -> usize {
        self.network.vertex_count()
    }

    pub fn id_of(&self, f: &F) -> Option<u32> {
        self.index.get(f).copied()
    }

    /// `key=value` lines describing the build.
    pub fn manifest(&self) -> String {
        let n = self.network.space().n();
        [
            format!("N={n}"),
            format!("k={}", self.k),
            format!("m={}", self.m),
            format!("seed={}", self.cover.seed),
            format!("mode={:?}", self.mode),
            format!("cover_rounds={}", self.cover.rounds),
            format!("cover_size={}", self.cover.len()),
            format!("cover_budget={}", self.cover.budget),
            format!("start_families={}", self.families.start),
            format!("progress_families={}", self.families.progress),
            format!("switch_families={}", self.families.switch),
            format!("functions_generated={}", self.generated),
            format!("functions_distinct={}", self.size()),
            format!("edges={}", self.network.edges().len()),
            format!("st_shortcut={}", self.st_shortcut),
            format!("size_bound={}", self.bound),
        ]
        .join("\n")
            + "\n"
    }
}

/// One step graph with locally numbered functions.
#[derive(Default)]
struct Piece {
    functions: Vec<F>,
    local: HashMap<F, u32>,
    edges: Vec<(u32, u32, Edge)>,
}

impl Piece {
    fn id(&mut self, f: F) -> u32 {
        if let Some(&id) = self.local.get(&f) {
            return id;
        }
        let id = self.functions.len() as u32;
        self.local.insert(f.clone(), id);
        self.functions.push(f);
        id
    }

    fn edge(&mut self, a: u32, b: u32, label: Edge) -> Result<()> {
        if a == b {
            return Ok(());
        }
        let (f, g) = (&self.functions[a as usize], &self.functions[b as usize]);
        if !can_transition(f, g, label)? {
            return Err(Error::InvalidTransition {
                from: a as usize,
                to: b as usize,
                label: label.to_string(),
            });
        }
        self.edges.push((a, b, label));
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Job {
    /// Grows block `j` from `{star}` and also closes with `star -> t`.
    Start { r: usize, mask: u64, j: usize, signs: u64, star: usize },
    Progress { r: usize, mask: u64, j: usize, l: usize, signs: u64, star_l: usize, star_j: usize },
    Switch { from: usize, to: usize, mask: u64 },
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    VertexSet(mask).indices()
}

fn sign(signs: u64, i: usize) -> i8 {
    if signs >> i & 1 == 1 {
        -1
    } else {
        1
    }
}

fn signed_blocks(q: &Partition, mask: u64, signs: u64) -> Vec<SignedBlock> {
    bits(mask).map(|i| SignedBlock::new(q.block(i), sign(signs, i))).collect()
}

/// BFS over `(n, σ)` where moving vertices of `block` other than `star` flip `σ` on `s -> x`.
fn walk_block(
    piece: &mut Piece,
    space: VertexSpace,
    block: VertexSet,
    star: usize,
    at: impl Fn(usize, i8) -> F,
) -> Result<u32> {
    let first = piece.id(at(0, 1));
    let mut frontier = vec![(1i8, first)];
    for n in 0..space.interior_count() {
        let mut next: Vec<(i8, u32)> = Vec::with_capacity(2);
        let mut reach = |sigma: i8, piece: &mut Piece| -> u32 {
            if let Some(&(_, id)) = next.iter().find(|(s, _)| *s == sigma) {
                return id;
            }
            let id = piece.id(at(n + 1, sigma));
            next.push((sigma, id));
            id
        };
        for &(sigma, id) in &frontier {
            if block.contains_index(n) && n != star {
                let x = Vertex::interior(n);
                let flipped = reach(-sigma, piece);
                piece.edge(id, flipped, Edge::new(Vertex::S, x))?;
                let kept = reach(sigma, piece);
                piece.edge(id, kept, Edge::new(x, Vertex::T))?;
            } else {
                reach(sigma, piece);
            }
        }
        frontier = next;
    }
    Ok(first)
}

fn run_job(job: &Job, space: VertexSpace, cover: &PartitionCover) -> Result<Piece> {
    let mut piece = Piece::default();
    match *job {
        Job::Start { r, mask, j, signs, star } => {
            let q = &cover.partitions[r];
            let red = signed_blocks(q, mask & !(1 << j), signs);
            let f = piece.id(block_function(space, &red));
            let block = q.block(j);
            let h0 = walk_block(&mut piece, space, block, star, |n, sigma| {
                let mut blocks = red.clone();
                blocks.push(SignedBlock::new(grown_block(block, star, n), sigma));
                block_function(space, &blocks)
            })?;
            let v = Vertex::interior(star);
            piece.edge(f, h0, Edge::new(Vertex::S, v))?;
            let one = piece.id(CutFunction::constant(space, Dyadic::ONE));
            piece.edge(h0, one, Edge::new(v, Vertex::T))?;
        }
        Job::Progress { r, mask, j, l, signs, star_l, star_j } => {
            let q = &cover.partitions[r];
            let red_mask = mask & !(1 << j);
            let f_fn = block_function::<Dyadic>(space, &signed_blocks(q, red_mask, signs));
            let others = signed_blocks(q, red_mask & !(1 << l), signs);
            let i_len = mask.count_ones() as usize;
            let block = q.block(l);
            let f = piece.id(f_fn.clone());
            let a0 = walk_block(&mut piece, space, block, star_l, |n, sigma| {
                progress_function(&f_fn, &others, grown_block(block, star_l, n), sigma, star_j, i_len)
            })?;
            piece.edge(f, a0, Edge::new(Vertex::interior(star_l), Vertex::interior(star_j)))?;
        }
        Job::Switch { from, to, mask } => {
            let (u, v) = (&cover.partitions[from], &cover.partitions[to]);
            let at = |n: usize, signs: u64| {
                let done = low_bits(n);
                let blocks: Vec<SignedBlock> = bits(mask)
                    .map(|i| {
                        let w = VertexSet(v.block(i).bits() & done | u.block(i).bits() & !done);
                        SignedBlock::new(w, sign(signs, i))
                    })
                    .collect();
                block_function::<Dyadic>(space, &blocks)
            };
            let patterns: Vec<u64> = VertexSet(mask).subsets().map(|s| s.bits()).collect();
            let mut ids: Vec<u32> = patterns.iter().map(|&p| piece.id(at(0, p))).collect();
            for n in 0..space.interior_count() {
                let next: Vec<u32> = patterns.iter().map(|&p| piece.id(at(n + 1, p))).collect();
                let (a, b) = (u.block_of(n), v.block_of(n));
                let flip = if a != b { mask & (1 << a | 1 << b) } else { 0 };
                if flip != 0 {
                    let x = Vertex::interior(n);
                    let pos = |p: u64| patterns.iter().position(|&q| q == p).expect("closed under flips");
                    for (pi, &p) in patterns.iter().enumerate() {
                        piece.edge(ids[pi], next[pos(p ^ flip)], Edge::new(Vertex::S, x))?;
                        piece.edge(ids[pi], next[pi], Edge::new(x, Vertex::T))?;
                    }
                }
                ids = next;
            }
        }
    }
    Ok(piece)
}

fn jobs(cover: &PartitionCover, k: usize, m: usize) -> (Vec<Job>, FamilyCounts) {
    let masks = index_masks(k, m);
    let mut out = Vec::new();
    let mut counts = FamilyCounts::default();
    for (r, q) in cover.partitions.iter().enumerate() {
        for &mask in &masks {
            for j in bits(mask) {
                let red = mask & !(1 << j);
                for signs in VertexSet(red).subsets() {
                    for star in q.block(j).indices() {
                        out.push(Job::Start { r, mask, j, signs: signs.bits(), star });
                        counts.start += 1;
                    }
                    for l in bits(red) {
                        for star_l in q.block(l).indices() {
                            for star_j in q.block(j).indices() {
                                out.push(Job::Progress { r, mask, j, l, signs: signs.bits(), star_l, star_j });
                                counts.progress += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let q = cover.partitions.len();
    for from in 0..q {
        for to in 0..q {
            if from != to {
                for &mask in &masks {
                    out.push(Job::Switch { from, to, mask });
                    counts.switch += 1;
                }
            }
        }
    }
    (out, counts)
}

/// Builds the network solving every augmentation of the base graphs `i0` on `space`.
pub fn build_thm2_network(i0: &[InputGraph], space: VertexSpace, options: &Thm2Options) -> Result<Thm2Build> {
    let first = i0
        .first()
        .ok_or_else(|| Error::Precondition("at least one base graph is required".into()))?;
    let base_space = first.space();
    for g in i0 {
        base_space.check(&g.space())?;
    }
    let k = base_space.interior_count();
    if k == 0 || k > space.interior_count() {
        return Err(Error::Precondition(format!(
            "base graphs need between 1 and {} interior vertices, got {k}",
            space.interior_count()
        )));
    }
    let limits = &options.limits;
    let m = compute_sc(i0, limits)?.max(1);
    let cover = build_partition_cover(space, k, m, options.seed, limits)?;
    let (jobs, families) = jobs(&cover, k, m);
    let pieces: Vec<Piece> = jobs
        .par_iter()
        .map(|job| run_job(job, space, &cover))
        .collect::<Result<_>>()?;
    let generated: usize = pieces.iter().map(|p| p.functions.len()).sum();
    if generated as u128 > limits.max_network_vertices {
        return Err(Error::EnumerationTooLarge {
            what: "network functions",
            required: generated as u128,
            limit: limits.max_network_vertices,
        });
    }
    let mut builder = GhBuilder::new(space);
    for piece in pieces {
        let ids: Vec<u32> = piece.functions.into_iter().map(|f| builder.intern(f)).collect();
        if options.mode == Thm2Mode::Constructive {
            for (a, b, l) in piece.edges {
                builder.push_checked_edge(ids[a as usize], ids[b as usize], l);
            }
        }
    }
    if options.mode == Thm2Mode::Full {
        builder.add_all_edges(&space.forward_edges())?;
    }
    let st_shortcut = i0.iter().any(|g| g.contains(Edge::ST));
    if st_shortcut && options.mode == Thm2Mode::Constructive {
        for v in (0..builder.len() as u32).filter(|&v| v != 1) {
            builder.add_edge(v, 1, Edge::ST)?;
        }
    }
    let network = builder.finish()?;
    let bound = thm2_bound(space.n(), k, m);
    if BigUint::from(network.vertex_count()) > bound {
        return Err(Error::BoundViolation {
            size: network.vertex_count().to_string(),
            bound: bound.to_string(),
        });
    }
    let index = network
        .annotations()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            Some(crate::network::Annotation::Fourier(f)) => Some((f.clone(), i as u32)),
            _ => None,
        })
        .collect();
    Ok(Thm2Build {
        network,
        index,
        cover,
        k,
        m,
        families,
        generated,
        bound,
        st_shortcut,
        mode: options.mode,
    })
}
