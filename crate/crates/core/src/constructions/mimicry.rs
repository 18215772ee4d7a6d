//! Replays certain-knowledge steps of `G'(V(G0), m)` on the Fourier-function network.
//!
//! For an augmented input with distinguished vertices `v*_i = v0[i]` the state
//! `K_I` of the small network corresponds to the block-knowledge function of
//! `I` in some cover partition. Each small-network step consistent with `G0`
//! becomes a chain (preceded by a partition switch when the current partition
//! does not separate the new index set), and every link of that chain must be
//! a network edge whose label the augmented input contains.

use rayon::prelude::*;

use crate::cutspace::CutFunction;
use crate::error::{Error, Result};
use crate::graph::{Edge, FamilyMember, InputGraph, Limits, VertexSet};
use crate::knowledge::{build_basic_ck, LabelUniverse};
use crate::network::{kv_vertices, Annotation, Label};
use crate::scalar::Dyadic;

use super::chains::{Chain, ChainKind, ChainSpec};
use super::thm2::Thm2Build;
use super::{gen_base_function, theta};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MimicryReport {
    pub members: usize,
    /// Small-network steps (with direction) consistent with the base graph.
    pub steps: usize,
    /// (member, step, starting partition) combinations replayed.
    pub splices: usize,
    pub links: usize,
    pub failures: usize,
    /// A few failure descriptions.
    pub examples: Vec<String>,
}

impl MimicryReport {
    pub fn ok(&self) -> bool {
        self.failures == 0 && self.splices > 0
    }

    fn merge(mut self, other: MimicryReport) -> MimicryReport {
        self.splices += other.splices;
        self.links += other.links;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < 8 {
                self.examples.push(e);
            }
        }
        self
    }

    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.examples.len() < 8 {
            self.examples.push(msg);
        }
    }
}

/// A small-network state: `K_I` as an index mask, or `t'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Blocks(u64),
    Accept,
}

struct Step {
    from: u64,
    to: State,
    label: Edge,
}

fn base_steps(base: &InputGraph, m: usize, limits: &Limits) -> Result<Vec<Step>> {
    let (net, _) = build_basic_ck(&base.space(), m, LabelUniverse::Forward, limits)?;
    let state = |v: usize| -> Result<State> {
        if v == net.t_prime() {
            return Ok(State::Accept);
        }
        match net.annotation(v) {
            Some(Annotation::Knowledge(k)) => kv_vertices(k)
                .map(|w| State::Blocks(w.bits()))
                .ok_or_else(|| Error::InvalidNetwork(format!("vertex {v} is not of the form K_V"))),
            _ => Err(Error::InvalidNetwork(format!("vertex {v} lacks a knowledge set"))),
        }
    };
    let mut steps = Vec::new();
    for e in net.edges() {
        if !e.label.consistent_with(base) {
            continue;
        }
        let (a, b) = (state(e.a as usize)?, state(e.b as usize)?);
        for (x, y) in [(a, b), (b, a)] {
            if let State::Blocks(from) = x {
                steps.push(Step { from, to: y, label: e.label.edge });
            }
        }
    }
    Ok(steps)
}

fn mask_indices(mask: u64) -> Vec<usize> {
    VertexSet(mask).indices().collect()
}

struct Replay<'a> {
    build: &'a Thm2Build,
    member: &'a FamilyMember,
    stars: Vec<usize>,
    report: MimicryReport,
}

impl Replay<'_> {
    fn spec(&self, kind: ChainKind, r: usize, mask: u64) -> ChainSpec {
        ChainSpec {
            kind,
            partition: self.build.cover.partitions[r].clone(),
            source: None,
            i_set: mask_indices(mask),
            stars: self.member.v0.clone(),
            left: self.member.left,
            right: self.member.right,
        }
    }

    fn id(&self, f: &CutFunction<Dyadic>) -> Option<u32> {
        self.build.id_of(f)
    }

    fn check_chain(&mut self, chain: &Chain<Dyadic>, what: &str) -> bool {
        for (f, g, label) in chain.steps() {
            self.report.links += 1;
            let ok = match (self.id(f), self.id(g)) {
                (Some(a), Some(b)) => {
                    self.build.network.has_edge(a as usize, b as usize, Label::positive(label))
                        && self.member.graph.contains(label)
                }
                _ => false,
            };
            if !ok {
                self.report.fail(format!("{what}: missing link labeled {label}"));
                return false;
            }
        }
        true
    }

    fn generate(&mut self, spec: &ChainSpec, what: &str) -> Option<Chain<Dyadic>> {
        match spec.generate::<Dyadic>() {
            Ok(c) => Some(c),
            Err(e) => {
                self.report.fail(format!("{what}: {e}"));
                None
            }
        }
    }

    fn replay(&mut self, step: &Step, r: usize) {
        self.report.splices += 1;
        let from = step.from;
        let what = format!("v0={:?} L={:#b} step {:#b} -> {:?} via {} in partition {r}", self.stars, self.member.left.bits(), from, step.to, step.label);
        if step.label == Edge::ST {
            let start = self.base_function(r, from);
            let ok = match start.and_then(|f| self.id(&f)) {
                Some(a) => self.build.network.has_edge(a as usize, self.build.network.t_prime(), Label::positive(Edge::ST)),
                None => false,
            };
            self.report.links += 1;
            if !ok || !self.member.graph.contains(Edge::ST) {
                self.report.fail(format!("{what}: no s->t shortcut"));
            }
            return;
        }
        let (kind, to_mask) = match (step.to, step.label.from.interior_index(), step.label.to.interior_index()) {
            // knowing w_l -> t with s -> w_l already known leads straight to t',
            // whichever small-network vertex the step lands on
            (_, Some(l), None) if from >> l & 1 == 1 => (ChainKind::End { l }, None),
            (State::Blocks(to), a, Some(j)) if to == from | 1 << j && from >> j & 1 == 0 => match a {
                None => (ChainKind::Start { j }, Some(to)),
                Some(l) if from >> l & 1 == 1 => (ChainKind::Progress { l, j }, Some(to)),
                _ => return self.report.fail(format!("{what}: unrecognized step shape")),
            },
            (State::Blocks(to), a, Some(j)) if to | 1 << j == from && to != from => match a {
                None => (ChainKind::Start { j }, None),
                Some(l) if to >> l & 1 == 1 => (ChainKind::Progress { l, j }, None),
                _ => return self.report.fail(format!("{what}: unrecognized step shape")),
            },
            _ => return self.report.fail(format!("{what}: unrecognized step shape")),
        };
        match to_mask {
            // growing I: switch first if r does not separate the new set
            Some(to) => {
                let r2 = if self.build.cover.partitions[r].covers(&self.stars, to) {
                    r
                } else {
                    match self.build.cover.find(&self.stars, to) {
                        Some(r2) => r2,
                        None => return self.report.fail(format!("{what}: no partition covers the target")),
                    }
                };
                if r2 != r && from != 0 {
                    let mut sw = self.spec(ChainKind::Switch, r2, from);
                    sw.source = Some(self.build.cover.partitions[r].clone());
                    let Some(chain) = self.generate(&sw, &what) else { return };
                    if !self.check_chain(&chain, &format!("{what} (switch to {r2})")) {
                        return;
                    }
                }
                let spec = self.spec(kind, r2, to);
                if let Some(chain) = self.generate(&spec, &what) {
                    self.check_chain(&chain, &what);
                }
            }
            None => {
                let spec = self.spec(kind, r, from);
                if let Some(chain) = self.generate(&spec, &what) {
                    let chain = if matches!(kind, ChainKind::End { .. }) { chain } else { chain.reversed() };
                    self.check_chain(&chain, &what);
                }
            }
        }
    }

    fn base_function(&self, r: usize, mask: u64) -> Option<CutFunction<Dyadic>> {
        let q = &self.build.cover.partitions[r];
        let i_set = mask_indices(mask);
        let signs: Vec<i8> = i_set.iter().map(|&i| theta(q.block(i), self.member.left)).collect();
        gen_base_function(q, &i_set, &signs).ok()
    }
}

/// Replays every step of `G'(V(base), m)` consistent with `base`, from every
/// cover partition that separates the starting set, for every member.
pub fn check_mimicry(
    build: &Thm2Build,
    base: &InputGraph,
    members: &[FamilyMember],
    limits: &Limits,
) -> Result<MimicryReport> {
    if base.space().interior_count() != build.k {
        return Err(Error::Precondition(format!(
            "base graph has {} interior vertices, the network was built for {}",
            base.space().interior_count(),
            build.k
        )));
    }
    let steps = base_steps(base, build.m, limits)?;
    let report = members
        .par_iter()
        .map(|member| {
            let stars: Vec<usize> = member.v0.iter().map(|v| v.interior_index().unwrap_or(usize::MAX)).collect();
            let mut replay = Replay {
                build,
                member,
                stars,
                report: MimicryReport::default(),
            };
            for step in &steps {
                for r in 0..build.cover.len() {
                    if step.from == 0 || build.cover.partitions[r].covers(&replay.stars, step.from) {
                        replay.replay(step, r);
                    }
                }
            }
            replay.report
        })
        .reduce(MimicryReport::default, MimicryReport::merge);
    Ok(MimicryReport {
        members: members.len(),
        steps: steps.len(),
        ..report
    })
}
