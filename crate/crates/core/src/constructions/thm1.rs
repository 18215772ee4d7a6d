//! Certain-knowledge network for directed paths of length `k + 1` from random orderings.
//!
//! Each ordering `v_1, ..., v_{N-2}` of the interior contributes the prefix
//! sets `K_{v_1}, K_{v_1 v_2}, ...`; an input whose path vertices appear in
//! increasing order is accepted through them. Orderings are drawn until every
//! member of the one-sided family is accepted.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::thm1_bound;
use crate::error::{Error, Result};
use crate::graph::{enumerate_family, factorial, FamilyMember, InputGraph, Limits, VertexSet, VertexSpace};
use crate::knowledge::{validate_ck, CkDescription, CkNetworkBuilder, KnowledgeSet, LabelUniverse};
use crate::network::{is_sound_monotone, SwitchingNetwork};

/// Candidate orderings tried before settling for the best of them.
const BATCH: usize = 8;

#[derive(Clone, Debug)]
pub struct Thm1Build {
    pub network: SwitchingNetwork,
    pub description: CkDescription,
    /// Kept orderings, as interior indices.
    pub orderings: Vec<Vec<usize>>,
    /// Orderings drawn, kept or not.
    pub rounds: usize,
    pub family_size: usize,
    pub bound: u128,
    pub seed: u64,
}

impl Thm1Build {
    pub fn size(&self) -> usize {
        self.network.vertex_count()
    }
}

/// Whether the path vertices `v0[0], ..., v0[k-1]` appear in this order in `ordering`.
pub fn ordering_accepts(ordering: &[usize], member: &FamilyMember) -> bool {
    let mut pos = vec![usize::MAX; ordering.len()];
    for (p, &x) in ordering.iter().enumerate() {
        if x < pos.len() {
            pos[x] = p;
        }
    }
    let at = |i: usize| member.v0[i].interior_index().map_or(usize::MAX, |x| pos.get(x).copied().unwrap_or(usize::MAX));
    (0..member.v0.len()).all(|i| at(i) != usize::MAX) && (1..member.v0.len()).all(|i| at(i - 1) < at(i))
}

fn add_ordering(builder: &mut CkNetworkBuilder, space: &VertexSpace, ordering: &[usize]) {
    let mut prefix = VertexSet::EMPTY;
    for &x in ordering {
        prefix = prefix.with(x);
        builder.add(KnowledgeSet::from_vertex_set(space, prefix));
    }
}

pub fn build_thm1_network(space: VertexSpace, k: usize, seed: u64, limits: &Limits) -> Result<Thm1Build> {
    let interior = space.interior_count();
    if k == 0 || k > interior {
        return Err(Error::Precondition(format!("need 1 <= k <= {interior}, got k = {k}")));
    }
    let path = InputGraph::path(k)?;
    let family = enumerate_family(&path, &space, true, false, limits)?;
    let bound = thm1_bound(space.n(), k);
    let mut builder = CkNetworkBuilder::new(space, LabelUniverse::Forward.labels(&space));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining: Vec<&FamilyMember> = family.members.iter().collect();
    let mut orderings = Vec::new();
    let mut rounds = 0usize;
    let k_fact = factorial(k);
    while !remaining.is_empty() {
        let mut best: Option<(Vec<usize>, usize)> = None;
        let mut kept = false;
        for _ in 0..BATCH {
            if rounds >= limits.max_rounds {
                return Err(Error::SeedRetry { builder: "ordering network", rounds });
            }
            rounds += 1;
            let mut ordering: Vec<usize> = (0..interior).collect();
            ordering.shuffle(&mut rng);
            let (v, e) = (builder.vertex_count(), builder.edge_count());
            add_ordering(&mut builder, &space, &ordering);
            let newly = remaining.par_iter().filter(|m| builder.accepts(&m.graph)).count();
            if (newly as u128) * k_fact >= remaining.len() as u128 {
                orderings.push(ordering);
                kept = true;
                break;
            }
            builder.truncate(v, e);
            if best.as_ref().is_none_or(|b| newly > b.1) {
                best = Some((ordering, newly));
            }
        }
        if !kept {
            match best {
                Some((ordering, newly)) if newly > 0 => {
                    add_ordering(&mut builder, &space, &ordering);
                    orderings.push(ordering);
                }
                _ => continue,
            }
        }
        remaining = remaining.into_par_iter().filter(|m| !builder.accepts(&m.graph)).collect();
    }
    let (network, description) = builder.to_network()?;
    if network.vertex_count() as u128 > bound {
        return Err(Error::BoundViolation {
            size: network.vertex_count().to_string(),
            bound: bound.to_string(),
        });
    }
    if let Some(v) = validate_ck(&network, &description)? {
        return Err(Error::InvalidNetwork(format!("description violated: {v:?}")));
    }
    if let Some(cut) = is_sound_monotone(&network, limits)? {
        return Err(Error::InvalidNetwork(format!("accepts an input with cut {}", cut.index())));
    }
    Ok(Thm1Build {
        network,
        description,
        orderings,
        rounds,
        family_size: family.len(),
        bound,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;
    use crate::network::accepts;

    #[test]
    fn ordering_acceptance() {
        let s = VertexSpace::new(6).unwrap();
        let family = enumerate_family(&InputGraph::path(2).unwrap(), &s, true, false, &Limits::default()).unwrap();
        let ordering = [3, 1, 0, 2];
        for m in &family.members {
            let (a, b) = (m.v0[0].interior_index().unwrap(), m.v0[1].interior_index().unwrap());
            let want = ordering.iter().position(|&x| x == a) < ordering.iter().position(|&x| x == b);
            assert_eq!(ordering_accepts(&ordering, m), want);
        }
        let m = &family.members[0];
        assert!(!ordering_accepts(&[2, 3], m) || m.v0.iter().all(|v| [Vertex::interior(2), Vertex::interior(3)].contains(v)));
    }

    #[test]
    fn accepts_the_family_within_bound() {
        let s = VertexSpace::new(8).unwrap();
        let limits = Limits::default();
        let b = build_thm1_network(s, 2, 4, &limits).unwrap();
        assert!(b.size() as u128 <= b.bound);
        let family = enumerate_family(&InputGraph::path(2).unwrap(), &s, true, false, &limits).unwrap();
        for m in &family.members {
            assert!(accepts(&b.network, &m.graph).unwrap().is_some());
            assert!(b.orderings.iter().any(|o| ordering_accepts(o, m)));
        }
        let again = build_thm1_network(s, 2, 4, &limits).unwrap();
        assert_eq!(again.network, b.network);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = VertexSpace::new(5).unwrap();
        assert!(build_thm1_network(s, 0, 1, &Limits::default()).is_err());
        assert!(build_thm1_network(s, 4, 1, &Limits::default()).is_err());
    }
}
