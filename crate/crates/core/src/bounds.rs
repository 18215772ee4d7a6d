//! Useful knowledge sets, overlap probabilities and the closed-form size bounds.
//!
//! Logarithms of integers that are not powers of two are rounded outward to a
//! multiple of `2^-12`: up where a larger value weakens the claim (upper
//! bounds, probability bounds, and denominators of lower bounds), down otherwise.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constructions::cover::ceil_lg;
use crate::error::{Error, Result};
use crate::graph::{factorial, FamilyMember, VertexSet};
use crate::knowledge::{CkDescription, KnowledgeSet};
use crate::network::{accepts, SwitchingNetwork};
use crate::scalar::log2_rational;

/// Fractional bits kept by [`lg_upper`] and [`lg_lower`].
pub const LG_FRACTION_BITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl BoundParams {
    pub fn new(n: usize, k: usize, m: usize) -> Result<BoundParams> {
        if n < k + 2 {
            return Err(Error::Precondition(format!("need N >= k + 2, got N = {n}, k = {k}")));
        }
        Ok(BoundParams { n, k, m })
    }

    fn require_dense(&self) -> Result<()> {
        if (self.n as u128) < 10 * (self.k as u128).pow(2) {
            return Err(Error::Precondition(format!(
                "need N >= 10k^2, got N = {}, k = {}",
                self.n, self.k
            )));
        }
        Ok(())
    }
}

fn big(x: usize) -> BigInt {
    BigInt::from(x)
}

fn ratio(a: BigInt, b: BigInt) -> BigRational {
    BigRational::new(a, b)
}

fn lg_exact(x: &BigUint) -> Option<u64> {
    (x.count_ones() == 1).then(|| x.bits() - 1)
}

/// Smallest multiple of `2^-12` that is at least `lg x`; exact on powers of two.
pub fn lg_upper(x: &BigUint) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::Precondition("lg of zero".into()));
    }
    if let Some(e) = lg_exact(x) {
        return Ok(BigRational::from_integer(BigInt::from(e)));
    }
    // x^(2^d) is not a power of two, so its bit length is the ceiling of its lg
    let p = x.pow(1u32 << LG_FRACTION_BITS).bits();
    Ok(ratio(BigInt::from(p), BigInt::from(1u64 << LG_FRACTION_BITS)))
}

/// Largest multiple of `2^-12` that is at most `lg x`; exact on powers of two.
pub fn lg_lower(x: &BigUint) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::Precondition("lg of zero".into()));
    }
    if let Some(e) = lg_exact(x) {
        return Ok(BigRational::from_integer(BigInt::from(e)));
    }
    let p = x.pow(1u32 << LG_FRACTION_BITS).bits() - 1;
    Ok(ratio(BigInt::from(p), BigInt::from(1u64 << LG_FRACTION_BITS)))
}

/// The member data that usefulness depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sides {
    pub v0: VertexSet,
    pub left: VertexSet,
    pub right: VertexSet,
}

impl From<&FamilyMember> for Sides {
    fn from(m: &FamilyMember) -> Sides {
        Sides {
            v0: m.v0_set(),
            left: m.left,
            right: m.right,
        }
    }
}

/// Edge shapes obtainable without the merge operation, endpoints meeting `V0`
/// in at least `m` vertices, and not equivalent to `{s -> t}`.
pub fn is_useful(k: &KnowledgeSet, sides: Sides, m: usize) -> bool {
    if k.knows_st() {
        return false;
    }
    let side = |v: crate::graph::Vertex, set: VertexSet| v.interior_index().is_some_and(|i| set.contains_index(i));
    let mut touched = VertexSet::EMPTY;
    for e in k.edges().iter() {
        let from_ok = e.from.is_s() || side(e.from, sides.v0);
        let to_ok = e.to.is_t() || side(e.to, sides.v0);
        let shaped = (from_ok && to_ok)
            || (e.from.is_s() && side(e.to, sides.left))
            || (e.to.is_t() && side(e.from, sides.right));
        if !shaped {
            return false;
        }
        for v in [e.from, e.to] {
            if let Some(i) = v.interior_index() {
                touched = touched.with(i);
            }
        }
    }
    touched.intersection(sides.v0).len() >= m
}

/// `p(y)`: probability that a uniform `k`-subset of the `N - 2` interior
/// vertices meets a fixed `x`-subset in exactly `y` vertices.
pub fn overlap_probability(x: usize, y: usize, k: usize, n: usize) -> Result<BigRational> {
    if n < 2 || x > n - 2 || k > n - 2 {
        return Err(Error::Precondition(format!("need x, k <= N - 2 (x = {x}, k = {k}, N = {n})")));
    }
    if y > x || y > k || k - y > n - 2 - x {
        return Ok(BigRational::zero());
    }
    let num = binomial(big(x), big(y)) * binomial(big(n - 2 - x), big(k - y));
    Ok(ratio(num, binomial(big(n - 2), big(k))))
}

/// `Σ_{y >= m} p(y)`.
pub fn exact_overlap_tail(x: usize, k: usize, m: usize, n: usize) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for y in m..=x.min(k) {
        total += overlap_probability(x, y, k, n)?;
    }
    if m > x.min(k) {
        overlap_probability(x, 0, k, n)?;
    }
    Ok(total)
}

/// `Σ_{y >= m} p(y) 2^(y - x)`: the useful probability when every vertex
/// outside `V0` lands on either side with probability one half.
pub fn exact_two_sided_tail(x: usize, k: usize, m: usize, n: usize) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for y in m..=x.min(k) {
        total += overlap_probability(x, y, k, n)? / BigRational::from_integer(BigInt::one() << (x - y));
    }
    overlap_probability(x, 0, k, n)?;
    Ok(total)
}

/// `2 (2k (k + lg(kN)) / N)^m`.
pub fn useful_prob_bound(p: BoundParams) -> Result<BigRational> {
    p.require_dense()?;
    let lg = lg_upper(&BigUint::from(p.k * p.n))?;
    let base = (BigRational::from_integer(big(p.k)) + lg) * big(2 * p.k) / big(p.n);
    Ok(BigRational::from_integer(big(2)) * Pow::pow(&base, p.m as u32))
}

/// `N^-m`, the bound for endpoint sets too large for the hypergeometric branch.
pub fn first_branch_bound(p: BoundParams) -> BigRational {
    ratio(BigInt::one(), big(p.n).pow(p.m as u32))
}

/// Whether `x` endpoints fall in the `N^-m` branch: `x >= k + m lg N`, decided as `2^(x-k) >= N^m`.
pub fn in_first_branch(x: usize, p: BoundParams) -> bool {
    x >= p.k && (BigUint::one() << (x - p.k)) >= BigUint::from(p.n).pow(p.m as u32)
}

/// Uniform sampler over family members `(V0, L, R)`.
#[derive(Clone, Copy, Debug)]
pub struct FamilySampler {
    pub interior: usize,
    pub k: usize,
    /// When false every vertex outside `V0` lies in `L`.
    pub allow_right: bool,
}

impl FamilySampler {
    pub fn sample(&self, rng: &mut impl Rng) -> Sides {
        let mut pool: Vec<usize> = (0..self.interior).collect();
        let mut v0 = VertexSet::EMPTY;
        for i in 0..self.k {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
            v0 = v0.with(pool[i]);
        }
        let rest = VertexSet::full(self.interior).difference(v0);
        let left = if self.allow_right {
            VertexSet(rng.random::<u64>() & rest.bits())
        } else {
            rest
        };
        Sides {
            v0,
            left,
            right: rest.difference(left),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Whether `value` lies within `sigmas` standard errors (exact agreement when the error is 0).
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.stderr + 1e-12
    }
}

const MC_CHUNK: usize = 4096;

/// Frequency of [`is_useful`] over sampled members; chunk `i` uses ChaCha stream `i`,
/// so the estimate does not depend on the worker count.
pub fn mc_useful_prob(k: &KnowledgeSet, sampler: FamilySampler, m: usize, samples: usize, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::Precondition("zero samples".into()));
    }
    if sampler.k > sampler.interior || sampler.interior + 2 != k.n() {
        return Err(Error::Precondition("sampler does not match the knowledge set's vertex space".into()));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            (0..count).filter(|_| is_useful(k, sampler.sample(&mut rng), m)).count()
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(Estimate {
        mean: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// Whether every member-consistent `s' -> t'` path passes a vertex whose set is useful.
pub fn audit_useful_vertex(net: &SwitchingNetwork, d: &CkDescription, member: &FamilyMember, m: usize) -> Result<bool> {
    if d.assignment.len() < net.vertex_count() {
        return Err(Error::IncompleteDescription { vertex: d.assignment.len() });
    }
    if accepts(net, &member.graph)?.is_none() {
        return Err(Error::NotApplicable("the network does not accept this member".into()));
    }
    let sides = Sides::from(member);
    let blocked: Vec<bool> = d.assignment[..net.vertex_count()]
        .iter()
        .map(|k| is_useful(k, sides, m))
        .collect();
    let path = net.find_path(|e| e.label.consistent_with(&member.graph), Some(&blocked));
    Ok(path.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Ordering network size, `2N k! k lg N`.
    Thm1,
    /// Fourier network size, `2^(5m+3) k^(3m+2) N^3 lg N`.
    Thm2,
    /// Certain-knowledge lower bound, `½ (N / (2k(k + lg(kN))))^m`.
    Thm3,
}

impl std::str::FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "thm1" => Ok(BoundKind::Thm1),
            "thm2" => Ok(BoundKind::Thm2),
            "thm3" => Ok(BoundKind::Thm3),
            _ => Err(format!("unknown bound `{s}` (expected thm1, thm2 or thm3)")),
        }
    }
}

pub fn thm1_bound(n: usize, k: usize) -> u128 {
    2 * n as u128 * factorial(k) * k as u128 * ceil_lg(n) as u128
}

pub fn thm2_bound(n: usize, k: usize, m: usize) -> BigUint {
    (BigUint::one() << (5 * m + 3)) * BigUint::from(k).pow(3 * m as u32 + 2) * BigUint::from(n).pow(3u32) * BigUint::from(ceil_lg(n))
}

pub fn thm3_bound(p: BoundParams) -> Result<BigRational> {
    p.require_dense()?;
    let lg = lg_upper(&BigUint::from(p.k * p.n))?;
    let denom = (BigRational::from_integer(big(p.k)) + lg) * big(2 * p.k);
    let base = BigRational::from_integer(big(p.n)) / denom;
    Ok(Pow::pow(&base, p.m as u32) / BigRational::from_integer(big(2)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundValue {
    pub exact: BigRational,
    pub log2: f64,
}

pub fn eval_bound(kind: BoundKind, p: BoundParams) -> Result<BoundValue> {
    let exact = match kind {
        BoundKind::Thm1 => BigRational::from_integer(BigInt::from(thm1_bound(p.n, p.k))),
        BoundKind::Thm2 => BigRational::from_integer(BigInt::from(thm2_bound(p.n, p.k, p.m))),
        BoundKind::Thm3 => thm3_bound(p)?,
    };
    let log2 = if exact.is_positive() { log2_rational(&exact) } else { f64::NEG_INFINITY };
    Ok(BoundValue { exact, log2 })
}

/// Exponent `c` that the upper-bound column must stay below.
pub const CROSSOVER_EXPONENT: f64 = 12.0;

#[derive(Clone, Debug, PartialEq)]
pub struct CrossoverRow {
    pub lg_n: u32,
    pub k: u64,
    pub m: usize,
    pub upper_log2: f64,
    pub corollary_log2: f64,
    pub lower_log2: f64,
}

impl CrossoverRow {
    pub fn upper_exponent(&self) -> f64 {
        self.upper_log2 / self.lg_n as f64
    }

    pub fn lower_exponent(&self) -> f64 {
        self.lower_log2 / self.lg_n as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossoverReport {
    pub rows: Vec<CrossoverRow>,
}

/// `k = 2^⌈√lg N⌉` and `m = 1 + lg k` for each `lg N`; bounds in `log2` form.
pub fn crossover_report(lg_values: &[u32]) -> Result<CrossoverReport> {
    let mut rows = Vec::with_capacity(lg_values.len());
    for &lg_n in lg_values {
        if !(1..=120).contains(&lg_n) {
            return Err(Error::Precondition(format!("lg N = {lg_n} out of range 1..=120")));
        }
        let a = (0u32..).find(|a| a * a >= lg_n).expect("bounded");
        let k = 1u64 << a;
        let m = 1 + a as usize;
        let (af, nf) = (a as f64, lg_n as f64);
        let lglg = (lg_n as f64).log2();
        let upper_log2 = (5 * m + 3) as f64 + (3 * m + 2) as f64 * af + 3.0 * nf + lglg;
        let corollary_log2 = 8.0 + (3.0 * af + 10.0) * af + 3.0 * nf + lglg;
        // lg(kN) = a + lg N exactly
        let inner = (k as u128) + (a + lg_n) as u128;
        let lower_log2 = -1.0 + m as f64 * (nf - ((2 * k) as f64).log2() - (inner as f64).log2());
        rows.push(CrossoverRow {
            lg_n,
            k,
            m,
            upper_log2,
            corollary_log2,
            lower_log2,
        });
    }
    Ok(CrossoverReport { rows })
}

impl CrossoverReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:>5} {:>6} {:>3} {:>12} {:>12} {:>9} {:>12} {:>9}",
            "lgN", "k", "m", "lg_upper", "lg_corollary", "upper_exp", "lg_lower", "lower_exp"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>5} {:>6} {:>3} {:>12.3} {:>12.3} {:>9.4} {:>12.3} {:>9.4}",
                r.lg_n,
                r.k,
                r.m,
                r.upper_log2,
                r.corollary_log2,
                r.upper_exponent(),
                r.lower_log2,
                r.lower_exponent()
            )
            .unwrap();
        }
        out
    }

    /// Tab-separated rows under a `#`-prefixed header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#lg_n\tk\tm\tlog2_upper\tlog2_corollary\tupper_exponent\tlog2_lower\tlower_exponent\n");
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                r.lg_n,
                r.k,
                r.m,
                r.upper_log2,
                r.corollary_log2,
                r.upper_exponent(),
                r.lower_log2,
                r.lower_exponent()
            )
            .unwrap();
        }
        out
    }

    pub fn max_upper_exponent(&self) -> f64 {
        self.rows.iter().map(CrossoverRow::upper_exponent).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Failed checks; empty when the upper bound is polynomial with exponent below
    /// [`CROSSOVER_EXPONENT`] and the lower bound's exponent keeps growing with `m`.
    pub fn check(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for r in &self.rows {
            if r.upper_log2 > r.corollary_log2 + 1e-9 {
                failures.push(format!("lg N = {}: upper bound exceeds the simplified form", r.lg_n));
            }
            if r.upper_exponent() >= CROSSOVER_EXPONENT {
                failures.push(format!("lg N = {}: upper exponent {:.3} >= {CROSSOVER_EXPONENT}", r.lg_n, r.upper_exponent()));
            }
        }
        for w in self.rows.windows(2) {
            if w[1].m < w[0].m {
                failures.push(format!("m decreases at lg N = {}", w[1].lg_n));
            }
        }
        // the lower exponent, sampled where m steps up, must rise strictly
        let steps: Vec<&CrossoverRow> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, r)| *i == 0 || self.rows[i - 1].m != r.m)
            .map(|(_, r)| r)
            .collect();
        if steps.len() < 2 {
            failures.push("m never grows over the sweep".into());
        }
        for w in steps.windows(2) {
            if w[1].lower_exponent() <= w[0].lower_exponent() {
                failures.push(format!("lower exponent does not rise from m = {} to m = {}", w[0].m, w[1].m));
            }
        }
        failures
    }
}

/// `f64` view of an exact rational.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
