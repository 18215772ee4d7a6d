//! Step families between block-knowledge functions.
//!
//! Every chain walks the interior vertices `v_1, ..., v_{N-2}` in index order.
//! A step at `v_{n+1}` is labeled `s -> v_{n+1}` when the vertex is on the left,
//! `v_{n+1} -> t` when it is on the right, and is a no-op when the two
//! functions coincide. Chains therefore have `N - 1` functions per phase.

use crate::cutspace::{can_transition, CutFunction};
use crate::error::{Error, Result};
use crate::graph::{low_bits, Edge, Vertex, VertexSet, VertexSpace};
use crate::scalar::Coefficient;

use super::{block_function, theta, Partition, SignedBlock};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// From the functions of `I \ {j}` to those of `I`, entering with `s -> v*_j`.
    Start { j: usize },
    /// From the functions of `I` to `e_{}`, leaving with `v*_l -> t`.
    End { l: usize },
    /// From `I \ {j}` to `I`, entering with `v*_l -> v*_j`.
    Progress { l: usize, j: usize },
    /// From the blocks of `source` to the blocks of `partition` with `I` fixed.
    Switch,
}

/// One concrete chain: partitions, block indices, distinguished vertices, and the input's `L`/`R`.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub partition: Partition,
    /// Starting partition of a switch.
    pub source: Option<Partition>,
    /// Block indices `I`, 0-based.
    pub i_set: Vec<usize>,
    /// `v*_i` for every block `i`.
    pub stars: Vec<Vertex>,
    pub left: VertexSet,
    pub right: VertexSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainLink<T> {
    pub function: CutFunction<T>,
    /// Label of the step into this link; `None` on the first link and on no-ops.
    pub label: Option<Edge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chain<T> {
    pub links: Vec<ChainLink<T>>,
}

impl<T: Coefficient> Chain<T> {
    fn starting_at(f: CutFunction<T>) -> Chain<T> {
        Chain {
            links: vec![ChainLink { function: f, label: None }],
        }
    }

    fn push(&mut self, f: CutFunction<T>, label: Option<Edge>) {
        self.links.push(ChainLink { function: f, label });
    }

    pub fn first(&self) -> &CutFunction<T> {
        &self.links[0].function
    }

    pub fn last(&self) -> &CutFunction<T> {
        &self.links[self.links.len() - 1].function
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// `(from, to, label)` for every labeled step.
    pub fn steps(&self) -> impl Iterator<Item = (&CutFunction<T>, &CutFunction<T>, Edge)> {
        self.links
            .windows(2)
            .filter_map(|w| w[1].label.map(|l| (&w[0].function, &w[1].function, l)))
    }

    pub fn reversed(&self) -> Chain<T> {
        let k = self.links.len();
        let links = (0..k)
            .map(|i| ChainLink {
                function: self.links[k - 1 - i].function.clone(),
                label: if i == 0 { None } else { self.links[k - i].label },
            })
            .collect();
        Chain { links }
    }

    /// Checks every step: labeled steps must be transitions, unlabeled ones identities.
    pub fn validate(&self) -> Result<()> {
        for (i, w) in self.links.windows(2).enumerate() {
            let ok = match w[1].label {
                Some(l) => can_transition(&w[0].function, &w[1].function, l)?,
                None => w[0].function == w[1].function,
            };
            if !ok {
                return Err(Error::InvalidTransition {
                    from: i,
                    to: i + 1,
                    label: w[1].label.map_or("no-op".into(), |l| l.to_string()),
                });
            }
        }
        Ok(())
    }
}

/// `V_{in} = {v*} ∪ (V ∩ {v_1..v_n})`.
pub(crate) fn grown_block(block: VertexSet, star: usize, n: usize) -> VertexSet {
    VertexSet(block.bits() & low_bits(n)).with(star)
}

/// `f + 2^{1-|I|} Σ_{J ⊆ others} (-1)^{|J|} (Π θ) [e_U - σ e_{U∪V_ln} + e_{U∪v*_j} - σ e_{U∪V_ln∪v*_j}]`.
pub(crate) fn progress_function<T: Coefficient>(
    f: &CutFunction<T>,
    others: &[SignedBlock],
    v_ln: VertexSet,
    sigma: i8,
    star_j: usize,
    i_len: usize,
) -> CutFunction<T> {
    let mut out = f.clone();
    let scale = T::pow2(1 - i_len as i32);
    let star = VertexSet::singleton(star_j);
    for choice in 0u64..1 << others.len() {
        let mut u = VertexSet::EMPTY;
        let mut sign = 1i64;
        for (i, b) in others.iter().enumerate() {
            if choice >> i & 1 == 1 {
                u = u.union(b.set);
                sign *= -(b.sign as i64);
            }
        }
        let c = T::from_i64(sign) * scale.clone();
        let cs = T::from_i64(sign * sigma as i64) * scale.clone();
        out.add_term(u.bits(), c.clone());
        out.add_term(u.union(v_ln).bits(), -cs.clone());
        out.add_term(u.union(star).bits(), c);
        out.add_term(u.union(v_ln).union(star).bits(), -cs);
    }
    out
}

/// Label for moving vertex `x` under the input's sides.
fn side_label(x: usize, left: VertexSet, right: VertexSet) -> Result<Edge> {
    let v = Vertex::interior(x);
    if left.contains_index(x) {
        Ok(Edge::new(Vertex::S, v))
    } else if right.contains_index(x) {
        Ok(Edge::new(v, Vertex::T))
    } else {
        Err(Error::Precondition(format!("vertex {v} moves but lies in neither L nor R")))
    }
}

impl ChainSpec {
    pub fn space(&self) -> VertexSpace {
        self.partition.space()
    }

    fn star(&self, i: usize) -> Result<usize> {
        self.stars
            .get(i)
            .and_then(|v| v.interior_index())
            .ok_or_else(|| Error::Precondition(format!("no interior distinguished vertex for block {i}")))
    }

    fn signed(&self, i: usize) -> SignedBlock {
        let b = self.partition.block(i);
        SignedBlock::new(b, theta(b, self.left))
    }

    /// Checks the hypotheses shared by all chain kinds.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        let k = self.partition.block_count();
        if self.stars.len() != k {
            return bad(format!("{} distinguished vertices for {k} blocks", self.stars.len()));
        }
        let v0 = VertexSet::from_vertices(self.stars.iter().copied());
        if v0.len() != k || self.stars.iter().any(|v| v.interior_index().is_none()) {
            return bad("distinguished vertices must be distinct interior vertices".into());
        }
        if !self.left.is_disjoint(self.right) || !v0.is_disjoint(self.left.union(self.right)) {
            return bad("L, R and the distinguished vertices must be disjoint".into());
        }
        if self.i_set.is_empty() || self.i_set.iter().any(|&i| i >= k) {
            return bad("I must be a nonempty set of block indices".into());
        }
        let mut partitions = vec![&self.partition];
        if let Some(src) = &self.source {
            src.space().check(&self.space())?;
            if src.block_count() != k {
                return bad("switch partitions differ in block count".into());
            }
            partitions.push(src);
        }
        for q in partitions {
            for &i in &self.i_set {
                let star = self.star(i)?;
                if q.block(i).intersection(v0) != VertexSet::singleton(star) {
                    return bad(format!("block {i} must meet the distinguished vertices exactly in v*_{i}"));
                }
                if !q.block(i).without(star).is_subset(self.left.union(self.right)) {
                    return bad(format!("block {i} has vertices outside L and R"));
                }
            }
        }
        let has = |x: usize| self.i_set.contains(&x);
        match self.kind {
            ChainKind::Start { j } if !has(j) => bad("j must lie in I".into()),
            ChainKind::End { l } if !has(l) => bad("l must lie in I".into()),
            ChainKind::Progress { l, j } if !has(l) || !has(j) || l == j => {
                bad("progress needs distinct l and j in I".into())
            }
            ChainKind::Switch if self.source.is_none() => bad("switch needs a source partition".into()),
            _ => Ok(()),
        }
    }

    pub fn generate<T: Coefficient>(&self) -> Result<Chain<T>> {
        self.check()?;
        match self.kind {
            ChainKind::Start { j } => self.start_chain(j),
            ChainKind::End { l } => self.end_chain(l),
            ChainKind::Progress { l, j } => self.progress_chain(l, j),
            ChainKind::Switch => self.switch_chain(),
        }
    }

    /// `f = base(I \ {j})`, then `h_0, ..., h_{N-2} = base(I)`.
    fn start_chain<T: Coefficient>(&self, j: usize) -> Result<Chain<T>> {
        let space = self.space();
        let red: Vec<SignedBlock> = self.i_set.iter().filter(|&&i| i != j).map(|&i| self.signed(i)).collect();
        let mut chain = Chain::starting_at(block_function(space, &red));
        let h0 = self.h_sequence(&red, j)?;
        let star = self.star(j)?;
        let mut first = true;
        for link in h0.links {
            let label = if first { Some(Edge::new(Vertex::S, Vertex::interior(star))) } else { link.label };
            first = false;
            chain.push(link.function, label);
        }
        Ok(chain)
    }

    /// `h_0, ..., h_{N-2}` growing block `j` from `{v*_j}` to `V_j`.
    fn h_sequence<T: Coefficient>(&self, red: &[SignedBlock], j: usize) -> Result<Chain<T>> {
        let space = self.space();
        let star = self.star(j)?;
        let block = self.partition.block(j);
        let h = |n: usize| {
            let vjn = grown_block(block, star, n);
            let mut blocks = red.to_vec();
            blocks.push(SignedBlock::new(vjn, theta(vjn, self.left)));
            block_function::<T>(space, &blocks)
        };
        let mut chain = Chain::starting_at(h(0));
        for n in 0..space.interior_count() {
            let label = if block.contains_index(n) && n != star {
                Some(side_label(n, self.left, self.right)?)
            } else {
                None
            };
            chain.push(h(n + 1), label);
        }
        Ok(chain)
    }

    fn end_chain<T: Coefficient>(&self, l: usize) -> Result<Chain<T>> {
        let space = self.space();
        let red: Vec<SignedBlock> = self.i_set.iter().filter(|&&i| i != l).map(|&i| self.signed(i)).collect();
        let mut chain = self.h_sequence::<T>(&red, l)?.reversed();
        let star = self.star(l)?;
        chain.push(
            CutFunction::constant(space, T::one()),
            Some(Edge::new(Vertex::interior(star), Vertex::T)),
        );
        Ok(chain)
    }

    fn progress_chain<T: Coefficient>(&self, l: usize, j: usize) -> Result<Chain<T>> {
        let space = self.space();
        let red: Vec<SignedBlock> = self.i_set.iter().filter(|&&i| i != j).map(|&i| self.signed(i)).collect();
        let others: Vec<SignedBlock> = self
            .i_set
            .iter()
            .filter(|&&i| i != j && i != l)
            .map(|&i| self.signed(i))
            .collect();
        let f = block_function::<T>(space, &red);
        let (star_l, star_j) = (self.star(l)?, self.star(j)?);
        let block_l = self.partition.block(l);
        let a = |n: usize| {
            let vln = grown_block(block_l, star_l, n);
            progress_function(&f, &others, vln, theta(vln, self.left), star_j, self.i_set.len())
        };
        let mut chain = Chain::starting_at(f.clone());
        chain.push(a(0), Some(Edge::new(Vertex::interior(star_l), Vertex::interior(star_j))));
        for n in 0..space.interior_count() {
            let label = if block_l.contains_index(n) && n != star_l {
                Some(side_label(n, self.left, self.right)?)
            } else {
                None
            };
            chain.push(a(n + 1), label);
        }
        let h = self.h_sequence::<T>(&red, j)?;
        if chain.last() != h.first() {
            return Err(Error::ConstructionInfeasible(
                "progress chain does not splice onto the start sequence".into(),
            ));
        }
        chain.links.extend(h.links.into_iter().skip(1));
        Ok(chain)
    }

    fn switch_chain<T: Coefficient>(&self) -> Result<Chain<T>> {
        let space = self.space();
        let source = self.source.as_ref().expect("checked");
        let target = &self.partition;
        let h = |n: usize| {
            let done = low_bits(n);
            let blocks: Vec<SignedBlock> = self
                .i_set
                .iter()
                .map(|&i| {
                    let w = VertexSet(target.block(i).bits() & done | source.block(i).bits() & !done);
                    SignedBlock::new(w, theta(w, self.left))
                })
                .collect();
            block_function::<T>(space, &blocks)
        };
        let mut chain = Chain::starting_at(h(0));
        for n in 0..space.interior_count() {
            let (a, b) = (source.block_of(n), target.block_of(n));
            let moves = a != b && (self.i_set.contains(&a) || self.i_set.contains(&b));
            let label = if moves { Some(side_label(n, self.left, self.right)?) } else { None };
            chain.push(h(n + 1), label);
        }
        Ok(chain)
    }
}

pub fn gen_start_chain<T: Coefficient>(spec: &ChainSpec) -> Result<Chain<T>> {
    expect_kind(spec, matches!(spec.kind, ChainKind::Start { .. }))?;
    spec.generate()
}

pub fn gen_end_chain<T: Coefficient>(spec: &ChainSpec) -> Result<Chain<T>> {
    expect_kind(spec, matches!(spec.kind, ChainKind::End { .. }))?;
    spec.generate()
}

pub fn gen_progress_chain<T: Coefficient>(spec: &ChainSpec) -> Result<Chain<T>> {
    expect_kind(spec, matches!(spec.kind, ChainKind::Progress { .. }))?;
    spec.generate()
}

pub fn gen_switch_chain<T: Coefficient>(spec: &ChainSpec) -> Result<Chain<T>> {
    expect_kind(spec, spec.kind == ChainKind::Switch)?;
    spec.generate()
}

fn expect_kind(spec: &ChainSpec, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("wrong chain kind {:?}", spec.kind)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gen_base_function;
    use crate::graph::ordered_selections;
    use crate::scalar::Dyadic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F = CutFunction<Dyadic>;

    fn sp(n: usize) -> VertexSpace {
        VertexSpace::new(n).unwrap()
    }

    fn base(q: &Partition, i_set: &[usize], left: VertexSet) -> F {
        let signs: Vec<i8> = i_set.iter().map(|&i| theta(q.block(i), left)).collect();
        gen_base_function(q, i_set, &signs).unwrap()
    }

    fn spec(kind: ChainKind, q: Partition, i_set: Vec<usize>, stars: Vec<usize>, left: u64, right: u64) -> ChainSpec {
        ChainSpec {
            kind,
            partition: q,
            source: None,
            i_set,
            stars: stars.into_iter().map(Vertex::interior).collect(),
            left: VertexSet(left),
            right: VertexSet(right),
        }
    }

    #[test]
    fn single_vertex_start() {
        let s = sp(3);
        let q = Partition::new(s, vec![VertexSet(1)]).unwrap();
        let c: Chain<Dyadic> = spec(ChainKind::Start { j: 0 }, q, vec![0], vec![0], 0, 0).generate().unwrap();
        assert_eq!(c.first(), &F::constant(s, -Dyadic::ONE));
        assert_eq!(c.links[1].function, F::basis(s, VertexSet(1)));
        assert_eq!(c.links[1].label, Some("s->u1".parse().unwrap()));
        assert!(c.links[2..].iter().all(|l| l.label.is_none()));
        assert_eq!(c.last(), &F::basis(s, VertexSet(1)));
        c.validate().unwrap();
    }

    #[test]
    fn single_vertex_end() {
        let s = sp(3);
        let q = Partition::new(s, vec![VertexSet(1)]).unwrap();
        let c: Chain<Dyadic> = spec(ChainKind::End { l: 0 }, q, vec![0], vec![0], 0, 0).generate().unwrap();
        assert_eq!(c.first(), &F::basis(s, VertexSet(1)));
        assert_eq!(c.last(), &F::constant(s, Dyadic::ONE));
        assert_eq!(c.links.last().unwrap().label, Some("u1->t".parse().unwrap()));
        c.validate().unwrap();
    }

    #[test]
    fn two_singleton_progress() {
        let s = sp(4);
        let q = Partition::new(s, vec![VertexSet(1), VertexSet(2)]).unwrap();
        let c: Chain<Dyadic> = spec(ChainKind::Progress { l: 0, j: 1 }, q, vec![0, 1], vec![0, 1], 0, 0)
            .generate()
            .unwrap();
        assert_eq!(c.first(), &F::basis(s, VertexSet(1)));
        assert_eq!(c.links[1].label, Some("u1->u2".parse().unwrap()));
        let half = Dyadic::new(1, 1);
        let want = F::from_terms(s, [(VertexSet(0), half), (VertexSet(1), half), (VertexSet(2), half), (VertexSet(3), -half)]);
        assert_eq!(c.links[1].function, want);
        assert_eq!(c.last(), &want);
        c.validate().unwrap();
    }

    #[test]
    fn identical_partitions_switch_is_static() {
        let s = sp(6);
        let q = Partition::new(s, vec![VertexSet(0b0011), VertexSet(0b1100)]).unwrap();
        let mut sp_ = spec(ChainKind::Switch, q.clone(), vec![0, 1], vec![0, 2], 0b1000, 0b0010);
        sp_.source = Some(q);
        let c: Chain<Dyadic> = sp_.generate().unwrap();
        assert!(c.links.iter().skip(1).all(|l| l.label.is_none()));
        assert!(c.links.iter().all(|l| l.function == *c.first()));
    }

    #[test]
    fn hypothesis_violations_are_rejected() {
        let s = sp(5);
        let q = Partition::new(s, vec![VertexSet(0b011), VertexSet(0b100)]).unwrap();
        // block 0 contains both distinguished vertices
        assert!(spec(ChainKind::Start { j: 0 }, q.clone(), vec![0], vec![0, 1], 0b100, 0).generate::<Dyadic>().is_err());
        // vertex 1 is in neither L nor R
        assert!(spec(ChainKind::Start { j: 0 }, q.clone(), vec![0], vec![0, 2], 0, 0).generate::<Dyadic>().is_err());
        assert!(spec(ChainKind::Progress { l: 0, j: 0 }, q.clone(), vec![0], vec![0, 2], 0b10, 0).generate::<Dyadic>().is_err());
        assert!(gen_end_chain::<Dyadic>(&spec(ChainKind::Start { j: 0 }, q, vec![0], vec![0, 2], 0b10, 0)).is_err());
    }

    fn random_partition(s: VertexSpace, k: usize, rng: &mut ChaCha8Rng) -> Partition {
        let assign: Vec<usize> = (0..s.interior_count()).map(|_| rng.random_range(0..k)).collect();
        Partition::from_assignment(s, k, &assign).unwrap()
    }

    /// Every chain kind for every admissible configuration at k = 2, N = 6, and sampled at k = 3.
    fn sweep(n: usize, k: usize, trials: usize, seed: u64) {
        let s = sp(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interior = s.interior_count();
        let selections = ordered_selections(interior, k);
        let mut checked = 0;
        for _ in 0..trials {
            let q = random_partition(s, k, &mut rng);
            let u = random_partition(s, k, &mut rng);
            let stars = &selections[rng.random_range(0..selections.len())];
            let v0 = VertexSet::from_vertices(stars.iter().map(|&i| Vertex::interior(i)));
            let rest = s.full_interior().difference(v0);
            let left = VertexSet(rng.random::<u64>() & rest.bits());
            let right = rest.difference(left);
            for i_mask in 1u64..1 << k {
                let i_set: Vec<usize> = (0..k).filter(|i| i_mask >> i & 1 == 1).collect();
                let mut kinds = vec![];
                for &j in &i_set {
                    kinds.push(ChainKind::Start { j });
                    kinds.push(ChainKind::End { l: j });
                    for &l in &i_set {
                        if l != j {
                            kinds.push(ChainKind::Progress { l, j });
                        }
                    }
                }
                kinds.push(ChainKind::Switch);
                for kind in kinds {
                    let mut c = spec(kind, q.clone(), i_set.clone(), stars.clone(), left.bits(), right.bits());
                    if kind == ChainKind::Switch {
                        c.source = Some(u.clone());
                    }
                    if c.check().is_err() {
                        continue;
                    }
                    let chain: Chain<Dyadic> = c.generate().unwrap();
                    chain.validate().unwrap();
                    assert_eq!(chain.len(), match kind {
                        ChainKind::Start { .. } | ChainKind::End { .. } => interior + 2,
                        ChainKind::Progress { .. } => 2 * interior + 2,
                        ChainKind::Switch => interior + 1,
                    });
                    let red: Vec<usize> = match kind {
                        ChainKind::Start { j } | ChainKind::Progress { j, .. } => i_set.iter().copied().filter(|&i| i != j).collect(),
                        _ => vec![],
                    };
                    match kind {
                        ChainKind::Start { .. } | ChainKind::Progress { .. } => {
                            assert_eq!(chain.first(), &base(&q, &red, left));
                            assert_eq!(chain.last(), &base(&q, &i_set, left));
                        }
                        ChainKind::End { .. } => {
                            assert_eq!(chain.first(), &base(&q, &i_set, left));
                            assert_eq!(chain.last(), &F::constant(s, Dyadic::ONE));
                        }
                        ChainKind::Switch => {
                            assert_eq!(chain.first(), &base(&u, &i_set, left));
                            assert_eq!(chain.last(), &base(&q, &i_set, left));
                        }
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > trials, "too few admissible configurations: {checked}");
    }

    #[test]
    fn chains_are_valid_at_two_blocks() {
        sweep(6, 2, 300, 1);
        sweep(8, 2, 100, 2);
    }

    #[test]
    fn chains_are_valid_at_three_blocks() {
        sweep(8, 3, 200, 3);
    }

    #[test]
    fn signed_basis_walk_reaches_the_last_prefix() {
        // -e_{} to ±e_{V_m}, taking s -> v_i for v_i in L and v_i -> t otherwise
        let s = sp(7);
        for left in 0u64..32 {
            let mut f = F::constant(s, -Dyadic::ONE);
            for i in 0..5 {
                let next_set = VertexSet(low_bits(i + 1));
                let v = Vertex::interior(i);
                let (label, flip) = if left >> i & 1 == 1 { (Edge::new(Vertex::S, v), true) } else { (Edge::new(v, Vertex::T), false) };
                let plus = F::basis(s, next_set);
                let (pos, neg) = (plus.clone(), -&plus);
                let sign_now = f.coeff(low_bits(i)) ;
                let next = if (sign_now == Dyadic::ONE) != flip { pos } else { neg };
                assert!(can_transition(&f, &next, label).unwrap());
                f = next;
            }
            assert!(f == F::basis(s, VertexSet(0b11111)) || f == -&F::basis(s, VertexSet(0b11111)));
        }
    }
}
