//! Partitions of the interior into `k` blocks and a randomized cover of all requirements.
//!
//! A requirement is an ordered tuple of distinct distinguished vertices
//! `(v*_1, ..., v*_k)` with a nonempty index set `I`, `|I| <= m`. A partition
//! satisfies it when `v*_i` lies in block `i` for every `i ∈ I` and no other
//! distinguished vertex lies in a block indexed by `I`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{falling_factorial, ordered_selections, Limits, VertexSet, VertexSpace};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    space: VertexSpace,
    blocks: Vec<VertexSet>,
    owner: Vec<u8>,
}

impl Partition {
    /// Blocks must be pairwise disjoint and cover the interior; empty blocks are allowed.
    pub fn new(space: VertexSpace, blocks: Vec<VertexSet>) -> Result<Partition> {
        if blocks.is_empty() || blocks.len() > 64 {
            return Err(Error::Precondition("a partition needs 1 to 64 blocks".into()));
        }
        let mut seen = VertexSet::EMPTY;
        for b in &blocks {
            if !b.is_disjoint(seen) {
                return Err(Error::Precondition("partition blocks overlap".into()));
            }
            seen = seen.union(*b);
        }
        if seen != space.full_interior() {
            return Err(Error::Precondition("partition blocks do not cover the interior".into()));
        }
        let mut owner = vec![0u8; space.interior_count()];
        for (i, b) in blocks.iter().enumerate() {
            for x in b.indices() {
                owner[x] = i as u8;
            }
        }
        Ok(Partition { space, blocks, owner })
    }

    /// `assign[x]` is the block of interior vertex `x`.
    pub fn from_assignment(space: VertexSpace, k: usize, assign: &[usize]) -> Result<Partition> {
        if assign.len() != space.interior_count() || assign.iter().any(|&b| b >= k) {
            return Err(Error::Precondition("assignment must map every interior vertex into 0..k".into()));
        }
        let mut blocks = vec![VertexSet::EMPTY; k];
        for (x, &b) in assign.iter().enumerate() {
            blocks[b] = blocks[b].with(x);
        }
        Partition::new(space, blocks)
    }

    pub fn space(&self) -> VertexSpace {
        self.space
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> VertexSet {
        self.blocks[i]
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    /// Block containing interior vertex `x`.
    pub fn block_of(&self, x: usize) -> usize {
        self.owner[x] as usize
    }

    /// Whether this partition separates the distinguished vertices of `i_mask`.
    pub fn covers(&self, stars: &[usize], i_mask: u64) -> bool {
        requirement_satisfied(self, stars, i_mask)
    }
}

/// `stars[i]` is the interior index of `v*_i`; bit `i` of `i_mask` marks `i ∈ I`.
pub fn requirement_satisfied(q: &Partition, stars: &[usize], i_mask: u64) -> bool {
    stars.iter().enumerate().all(|(i, &x)| {
        let b = q.block_of(x);
        if i_mask >> i & 1 == 1 {
            b == i
        } else {
            i_mask >> b & 1 == 0
        }
    })
}

/// All nonempty index masks over `k` blocks with at most `m` bits.
pub fn index_masks(k: usize, m: usize) -> Vec<u64> {
    (1u64..1 << k).filter(|s| s.count_ones() as usize <= m).collect()
}

#[derive(Clone, Debug)]
pub struct PartitionCover {
    pub partitions: Vec<Partition>,
    pub seed: u64,
    /// Random partitions drawn, kept or not.
    pub rounds: usize,
    pub requirements: usize,
    /// `2k (4k)^m ⌈lg N⌉`, the size the random argument guarantees.
    pub budget: f64,
}

impl PartitionCover {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    /// First partition covering the requirement, if any.
    pub fn find(&self, stars: &[usize], i_mask: u64) -> Option<usize> {
        self.partitions.iter().position(|q| requirement_satisfied(q, stars, i_mask))
    }
}

pub(crate) fn ceil_lg(n: usize) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

/// Draws uniform block assignments, keeping each one that covers an uncovered
/// requirement, until every requirement is covered; then re-checks coverage exhaustively.
pub fn build_partition_cover(
    space: VertexSpace,
    k: usize,
    m: usize,
    seed: u64,
    limits: &Limits,
) -> Result<PartitionCover> {
    let interior = space.interior_count();
    if k == 0 || k > interior || m == 0 {
        return Err(Error::Precondition(format!(
            "a partition cover needs 1 <= k <= {interior} and m >= 1 (got k = {k}, m = {m})"
        )));
    }
    let masks = index_masks(k, m);
    let count = falling_factorial(interior, k).saturating_mul(masks.len() as u128);
    if count > limits.max_family {
        return Err(Error::EnumerationTooLarge {
            what: "cover requirements",
            required: count,
            limit: limits.max_family,
        });
    }
    let selections = ordered_selections(interior, k);
    let requirements: Vec<(usize, u64)> = (0..selections.len())
        .flat_map(|s| masks.iter().map(move |&mask| (s, mask)))
        .collect();
    let mut uncovered: Vec<usize> = (0..requirements.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partitions = Vec::new();
    let mut rounds = 0;
    while !uncovered.is_empty() {
        if rounds >= limits.max_rounds {
            return Err(Error::SeedRetry {
                builder: "partition cover",
                rounds,
            });
        }
        rounds += 1;
        let assign: Vec<usize> = (0..interior).map(|_| rng.random_range(0..k)).collect();
        let q = Partition::from_assignment(space, k, &assign)?;
        let before = uncovered.len();
        uncovered = uncovered
            .into_par_iter()
            .filter(|&r| {
                let (s, mask) = requirements[r];
                !requirement_satisfied(&q, &selections[s], mask)
            })
            .collect();
        if uncovered.len() < before {
            partitions.push(q);
        }
    }
    let missing = requirements.par_iter().find_any(|&&(s, mask)| {
        !partitions.iter().any(|q| requirement_satisfied(q, &selections[s], mask))
    });
    if let Some(&(s, mask)) = missing {
        return Err(Error::ConstructionInfeasible(format!(
            "cover misses stars {:?} with index mask {mask:#b}",
            selections[s]
        )));
    }
    Ok(PartitionCover {
        partitions,
        seed,
        rounds,
        requirements: requirements.len(),
        budget: 2.0 * k as f64 * (4.0 * k as f64).powi(m as i32) * ceil_lg(space.n()) as f64,
    })
}

/// Probability that a uniform assignment satisfies a requirement with `|I| = size`.
pub fn requirement_probability(k: usize, size: usize) -> f64 {
    let k = k as f64;
    let size_f = size as f64;
    k.powf(-size_f) * ((k - size_f) / k).powf(k - size_f)
}

/// Monte Carlo estimate of [`requirement_probability`] for the first `size` indices.
pub fn estimate_requirement_probability(space: VertexSpace, k: usize, size: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stars: Vec<usize> = (0..k).collect();
    let mask = (1u64 << size) - 1;
    let mut hits = 0usize;
    let interior = space.interior_count();
    for _ in 0..samples {
        let assign: Vec<usize> = (0..interior).map(|_| rng.random_range(0..k)).collect();
        let q = Partition::from_assignment(space, k, &assign).expect("valid assignment");
        hits += usize::from(requirement_satisfied(&q, &stars, mask));
    }
    hits as f64 / samples as f64
}
