//! Functions on s-t cuts, stored as sparse expansions in the basis `e_V`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::graph::{enumerate_cuts, Cut, Edge, Limits, VertexSet, VertexSpace};
use crate::scalar::{Coefficient, Dyadic};
use num_traits::Zero;

/// `Σ_V c_V e_V` with `e_V(C) = (-1)^{|V ∩ L(C)|}`. Zero coefficients are never stored,
/// so two functions are equal exactly when their coefficient maps are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutFunction<T> {
    space: VertexSpace,
    coeffs: BTreeMap<u64, T>,
}

impl<T: Coefficient> CutFunction<T> {
    pub fn zero(space: VertexSpace) -> Self {
        CutFunction {
            space,
            coeffs: BTreeMap::new(),
        }
    }

    /// `e_V`.
    pub fn basis(space: VertexSpace, v: VertexSet) -> Self {
        Self::term(space, v, T::one())
    }

    /// `c · e_V`.
    pub fn term(space: VertexSpace, v: VertexSet, c: T) -> Self {
        let mut f = Self::zero(space);
        f.add_term(v.bits(), c);
        f
    }

    /// The constant function `c`, i.e. `c · e_{}`.
    pub fn constant(space: VertexSpace, c: T) -> Self {
        Self::term(space, VertexSet::EMPTY, c)
    }

    pub fn from_terms<I: IntoIterator<Item = (VertexSet, T)>>(space: VertexSpace, terms: I) -> Self {
        let mut f = Self::zero(space);
        for (v, c) in terms {
            f.add_term(v.bits(), c);
        }
        f
    }

    pub fn space(&self) -> VertexSpace {
        self.space
    }

    /// Adds `c · e_mask`, dropping the entry if it cancels.
    pub fn add_term(&mut self, mask: u64, c: T) {
        debug_assert_eq!(mask & !self.space.full_interior().bits(), 0);
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&mask) {
            Some(old) => {
                let sum = old.clone() + c;
                if sum.is_zero() {
                    self.coeffs.remove(&mask);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.coeffs.insert(mask, c);
            }
        }
    }

    pub fn coeff(&self, mask: u64) -> T {
        self.coeffs.get(&mask).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &T)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.space);
        for (&m, v) in &self.coeffs {
            out.add_term(m, v.clone() * c.clone());
        }
        out
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> CutFunction<U> {
        let mut out = CutFunction::zero(self.space);
        for (&m, v) in &self.coeffs {
            out.add_term(m, f(v));
        }
        out
    }

    pub fn evaluate(&self, cut: &Cut) -> T {
        let left = cut.left_interior().bits();
        self.coeffs.iter().fold(T::zero(), |acc, (&m, c)| {
            if (m & left).count_ones() % 2 == 1 {
                acc - c.clone()
            } else {
                acc + c.clone()
            }
        })
    }

    /// Inner product, computed coefficient-wise.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.space.check(&other.space)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(small.coeffs.iter().fold(T::zero(), |acc, (m, c)| match large.coeffs.get(m) {
            Some(d) => acc + c.clone() * d.clone(),
            None => acc,
        }))
    }

    /// Inner product `2^{2-N} Σ_C f(C) g(C)` by enumerating cuts.
    pub fn dot_by_enumeration(&self, other: &Self, limits: &Limits) -> Result<T> {
        self.space.check(&other.space)?;
        let sum = enumerate_cuts(&self.space, limits)?
            .iter()
            .fold(T::zero(), |acc, c| acc + self.evaluate(c) * other.evaluate(c));
        Ok(sum * T::pow2(2 - self.space.n() as i32))
    }
}

impl<T: Coefficient> Add for &CutFunction<T> {
    type Output = CutFunction<T>;
    fn add(self, rhs: &CutFunction<T>) -> CutFunction<T> {
        let mut out = self.clone();
        for (&m, c) in &rhs.coeffs {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl<T: Coefficient> Sub for &CutFunction<T> {
    type Output = CutFunction<T>;
    fn sub(self, rhs: &CutFunction<T>) -> CutFunction<T> {
        let mut out = self.clone();
        for (&m, c) in &rhs.coeffs {
            out.add_term(m, -c.clone());
        }
        out
    }
}

impl<T: Coefficient> Neg for &CutFunction<T> {
    type Output = CutFunction<T>;
    fn neg(self) -> CutFunction<T> {
        CutFunction {
            space: self.space,
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, -c.clone())).collect(),
        }
    }
}

/// How a label meets the cuts, which selects the coefficient test in [`can_transition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelShape {
    /// `s -> t`: crosses every cut.
    SourceSink,
    /// `s -> v`.
    FromSource(u32),
    /// `v -> t`.
    ToSink(u32),
    /// `v1 -> v2` between interior vertices.
    Interior(u32, u32),
    /// Into `s` or out of `t`: crosses no cut.
    Never,
}

impl LabelShape {
    pub fn of(label: Edge) -> LabelShape {
        if label.to.is_s() || label.from.is_t() {
            return LabelShape::Never;
        }
        match (label.from.interior_index(), label.to.interior_index()) {
            (None, None) => LabelShape::SourceSink,
            (None, Some(b)) => LabelShape::FromSource(b as u32),
            (Some(a), None) => LabelShape::ToSink(a as u32),
            (Some(a), Some(b)) => LabelShape::Interior(a as u32, b as u32),
        }
    }
}

/// Whether `g - f` vanishes on every cut `label` does not cross, decided on coefficients.
pub fn can_transition<T: Coefficient>(f: &CutFunction<T>, g: &CutFunction<T>, label: Edge) -> Result<bool> {
    f.space.check(&g.space)?;
    if !f.space.contains(label.from) || !f.space.contains(label.to) {
        return Err(Error::Precondition(format!("label {label} is outside the vertex space")));
    }
    let d = g - f;
    Ok(match LabelShape::of(label) {
        LabelShape::SourceSink => true,
        LabelShape::Never => d.is_zero(),
        LabelShape::FromSource(b) => {
            let bit = 1u64 << b;
            d.terms().all(|(m, c)| d.coeff(m ^ bit) == *c)
        }
        LabelShape::ToSink(a) => {
            let bit = 1u64 << a;
            d.terms().all(|(m, c)| d.coeff(m ^ bit) == -c.clone())
        }
        LabelShape::Interior(a, b) => {
            let (ba, bb) = (1u64 << a, 1u64 << b);
            let sign = |m: u64| m & ba != 0;
            d.terms().all(|(m, c)| {
                let base = m & !(ba | bb);
                let c0 = if sign(m) { -c.clone() } else { c.clone() };
                [base, base | ba, base | bb, base | ba | bb].into_iter().all(|q| {
                    let want = if sign(q) { -c0.clone() } else { c0.clone() };
                    d.coeff(q) == want
                })
            })
        }
    })
}

/// Definitional version of [`can_transition`]: evaluates `g - f` on every uncrossed cut.
pub fn can_transition_bruteforce<T: Coefficient>(
    f: &CutFunction<T>,
    g: &CutFunction<T>,
    label: Edge,
    limits: &Limits,
) -> Result<bool> {
    f.space.check(&g.space)?;
    let d = g - f;
    Ok(enumerate_cuts(&f.space, limits)?
        .iter()
        .filter(|c| !label.crosses(c))
        .all(|c| d.evaluate(c).is_zero()))
}

/// A path through a function set: indices into the set and the label of each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachWitness {
    pub functions: Vec<usize>,
    pub labels: Vec<Edge>,
}

/// Breadth-first search from `f` to `g` inside `h_set`, one transition per step.
pub fn reach<T: Coefficient + Ord>(
    h_set: &[CutFunction<T>],
    f: &CutFunction<T>,
    g: &CutFunction<T>,
    labels: &[Edge],
) -> Result<Option<ReachWitness>> {
    let position = |x: &CutFunction<T>| {
        h_set
            .iter()
            .position(|h| h == x)
            .ok_or_else(|| Error::Precondition("endpoint is not in the function set".into()))
    };
    let (start, goal) = (position(f)?, position(g)?);
    let mut parent: HashMap<usize, (usize, Edge)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = vec![false; h_set.len()];
    seen[start] = true;
    while let Some(i) = queue.pop_front() {
        if i == goal {
            let mut functions = vec![goal];
            let mut steps = Vec::new();
            let mut cur = goal;
            while let Some(&(p, l)) = parent.get(&cur) {
                functions.push(p);
                steps.push(l);
                cur = p;
            }
            functions.reverse();
            steps.reverse();
            return Ok(Some(ReachWitness {
                functions,
                labels: steps,
            }));
        }
        for (j, h) in h_set.iter().enumerate() {
            if seen[j] {
                continue;
            }
            for &l in labels {
                if can_transition(&h_set[i], h, l)? {
                    seen[j] = true;
                    parent.insert(j, (i, l));
                    queue.push_back(j);
                    break;
                }
            }
        }
    }
    Ok(None)
}

impl CutFunction<Dyadic> {
    /// Terms `<mask-hex>:<mantissa>/2^<exponent>` joined by `;`, sorted by mask; `0` when empty.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                out.push(';');
            }
            write!(out, "{m:x}:{c}").unwrap();
        }
        out
    }

    pub fn parse_text(space: VertexSpace, text: &str) -> std::result::Result<Self, String> {
        let mut f = Self::zero(space);
        if text == "0" {
            return Ok(f);
        }
        let mut last: Option<u64> = None;
        for term in text.split(';') {
            let (m, c) = term
                .split_once(':')
                .ok_or_else(|| format!("malformed term `{term}`"))?;
            let m = u64::from_str_radix(m, 16).map_err(|_| format!("bad mask `{m}`"))?;
            if m & !space.full_interior().bits() != 0 {
                return Err(format!("mask `{m:x}` outside the interior"));
            }
            if last.is_some_and(|l| l >= m) {
                return Err("terms must be strictly increasing by mask".into());
            }
            last = Some(m);
            let c: Dyadic = c.parse().map_err(|e| format!("{e}"))?;
            if c.is_zero() {
                return Err("zero coefficients are not stored".into());
            }
            f.add_term(m, c);
        }
        Ok(f)
    }
}
