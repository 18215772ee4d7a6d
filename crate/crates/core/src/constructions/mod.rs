//! Explicit network builders.
//!
//! [`thm1`] builds a certain-knowledge network from random vertex orderings.
//! The rest of the module builds a Fourier-function network: [`chains`] holds
//! the step families between "block knowledge" functions, [`cover`] holds the
//! partition cover they are indexed by, [`thm2`] assembles every family into one
//! input-independent network, and [`mimicry`] replays certain-knowledge walks on it.

pub mod chains;
pub mod cover;
pub mod mimicry;
pub mod thm1;
pub mod thm2;

use crate::cutspace::CutFunction;
use crate::error::{Error, Result};
use crate::graph::{VertexSet, VertexSpace};
use crate::scalar::Coefficient;

pub use chains::{Chain, ChainKind, ChainLink, ChainSpec};
pub use cover::{build_partition_cover, requirement_satisfied, Partition, PartitionCover};
pub use mimicry::{check_mimicry, MimicryReport};
pub use thm1::{build_thm1_network, ordering_accepts, Thm1Build};
pub use thm2::{build_thm2_network, Thm2Build, Thm2Options};

/// `(-1)^{|V ∩ L|}`.
pub fn theta(v: VertexSet, left: VertexSet) -> i8 {
    if v.intersection(left).len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A block with its sign: one factor of a block-knowledge function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedBlock {
    pub set: VertexSet,
    pub sign: i8,
}

impl SignedBlock {
    pub fn new(set: VertexSet, sign: i8) -> SignedBlock {
        debug_assert!(sign == 1 || sign == -1);
        SignedBlock { set, sign }
    }
}

/// `e_{} - 2^{1-|B|} Σ_{J ⊆ B} (-1)^{|J|} (Π_{i∈J} θ_i) e_{∪_{i∈J} B_i}`.
///
/// With singleton blocks and positive signs this is the cut function of `K_V`;
/// with partition blocks it treats each block as one vertex.
pub fn block_function<T: Coefficient>(space: VertexSpace, blocks: &[SignedBlock]) -> CutFunction<T> {
    let mut f = CutFunction::constant(space, T::one());
    let scale = T::pow2(1 - blocks.len() as i32);
    for choice in 0u64..1 << blocks.len() {
        let mut set = VertexSet::EMPTY;
        let mut sign = 1i64;
        for (i, b) in blocks.iter().enumerate() {
            if choice >> i & 1 == 1 {
                set = set.union(b.set);
                sign *= -(b.sign as i64);
            }
        }
        f.add_term(set.bits(), -(T::from_i64(sign) * scale.clone()));
    }
    f
}

/// The cut function of the knowledge set `K_V`.
pub fn embed_knowledge<T: Coefficient>(space: VertexSpace, v: VertexSet) -> CutFunction<T> {
    let blocks: Vec<SignedBlock> = v
        .indices()
        .map(|i| SignedBlock::new(VertexSet::singleton(i), 1))
        .collect();
    block_function(space, &blocks)
}

/// The block-knowledge function of the blocks of `q` indexed by `i_set` with signs `signs`.
pub fn gen_base_function<T: Coefficient>(q: &Partition, i_set: &[usize], signs: &[i8]) -> Result<CutFunction<T>> {
    if i_set.len() != signs.len() {
        return Err(Error::Precondition("one sign per index is required".into()));
    }
    let mut blocks = Vec::with_capacity(i_set.len());
    for (&i, &s) in i_set.iter().zip(signs) {
        if i >= q.block_count() {
            return Err(Error::Precondition(format!("block index {i} out of range")));
        }
        if s != 1 && s != -1 {
            return Err(Error::Precondition("signs must be +1 or -1".into()));
        }
        blocks.push(SignedBlock::new(q.block(i), s));
    }
    Ok(block_function(q.space(), &blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dyadic;

    fn sp(n: usize) -> VertexSpace {
        VertexSpace::new(n).unwrap()
    }

    #[test]
    fn theta_examples() {
        let left = VertexSet(0b0110);
        assert_eq!(theta(VertexSet(0b1001), left), 1);
        assert_eq!(theta(VertexSet(0b0011), left), -1);
        assert_eq!(theta(VertexSet(0b0111), left), 1);
    }

    #[test]
    fn embed_examples() {
        let s = sp(4);
        let half = Dyadic::new(1, 1);
        assert_eq!(embed_knowledge::<Dyadic>(s, VertexSet::EMPTY), CutFunction::constant(s, -Dyadic::ONE));
        assert_eq!(embed_knowledge::<Dyadic>(s, VertexSet(1)), CutFunction::basis(s, VertexSet(1)));
        let want = CutFunction::from_terms(
            s,
            [(VertexSet(0), half), (VertexSet(1), half), (VertexSet(2), half), (VertexSet(3), -half)],
        );
        assert_eq!(embed_knowledge::<Dyadic>(s, VertexSet(3)), want);
    }

    #[test]
    fn embedding_is_the_crossing_sign() {
        // +1 on cuts crossed by some s -> v with v in V, -1 elsewhere
        let s = sp(6);
        for v in s.full_interior().subsets() {
            let f = embed_knowledge::<Dyadic>(s, v);
            for c in 0..1u64 << 4 {
                let crossed = v.bits() & !c != 0;
                let want = if crossed { Dyadic::ONE } else { -Dyadic::ONE };
                assert_eq!(f.evaluate(&crate::graph::Cut::from_index(&s, c)), want);
            }
        }
    }

    #[test]
    fn base_function_examples() {
        let s = sp(4);
        let q = Partition::new(s, vec![VertexSet(1), VertexSet(2)]).unwrap();
        let f: CutFunction<Dyadic> = gen_base_function(&q, &[0], &[1]).unwrap();
        assert_eq!(f, CutFunction::basis(s, VertexSet(1)));
        let f: CutFunction<Dyadic> = gen_base_function(&q, &[], &[]).unwrap();
        assert_eq!(f, CutFunction::constant(s, -Dyadic::ONE));
        let f: CutFunction<Dyadic> = gen_base_function(&q, &[0, 1], &[1, 1]).unwrap();
        assert_eq!(f, embed_knowledge(s, VertexSet(3)));
        assert!(gen_base_function::<Dyadic>(&q, &[0], &[]).is_err());
        assert!(gen_base_function::<Dyadic>(&q, &[5], &[1]).is_err());
    }

    #[test]
    fn scalar_genericity() {
        let s = sp(5);
        let d = embed_knowledge::<Dyadic>(s, VertexSet(0b101));
        let r = embed_knowledge::<num_rational::BigRational>(s, VertexSet(0b101));
        assert_eq!(d.map(|c| c.to_rational()), r);
        let f = embed_knowledge::<f64>(s, VertexSet(0b101));
        assert_eq!(f.coeff(0), 0.5);
    }
}
