//! `l`- and `m`-sequences, their exact checkers, and per-vertex smoothing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::bits::Bits;
use crate::density::{at_least_fraction, missing_within};
use crate::scalar::Real;
use crate::tournament::{Tournament, VertexSet};
use crate::transitive::transitive_order;

/// Disjoint sets `S_1..S_k`, each `c`-linear, with `d(S_i, S_j) >= 1 - lambda`
/// for `i < j`; per vertex as well when `smooth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSequence {
    pub sets: Vec<VertexSet>,
    pub c: BigRational,
    pub lambda: BigRational,
    pub smooth: bool,
}

impl LSequence {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// `S_1, T_1, S_2, ..., T_t, S_{t+1}`: linear parts at even indices (0-based),
/// transitive `(c1, epsilon)`-big parts at odd ones.
#[derive(Debug, Clone, PartialEq)]
pub struct MSequence<R: Real> {
    pub sets: Vec<VertexSet>,
    pub c1: BigRational,
    pub c2: BigRational,
    pub lambda: BigRational,
    pub epsilon: R,
    pub smooth: bool,
}

impl<R: Real> MSequence<R> {
    pub fn t(&self) -> usize {
        self.sets.len() / 2
    }

    pub fn linear(&self, i: usize) -> &VertexSet {
        &self.sets[2 * i]
    }

    pub fn transitive(&self, i: usize) -> &VertexSet {
        &self.sets[2 * i + 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceViolation {
    #[error("sequence is empty")]
    NoSets,
    #[error("m-sequence must have odd length, got {0}")]
    EvenLength(usize),
    #[error("set {0} is empty")]
    Empty(usize),
    #[error("set {0} leaves the vertex range")]
    OutOfRange(usize),
    #[error("sets {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("set {index} has {size} vertices, below the linear bound")]
    NotLinear { index: usize, size: usize },
    #[error("set {index} has {size} vertices, below the bigness bound {need}")]
    NotBig { index: usize, size: usize, need: usize },
    #[error("set {0} is not transitive")]
    NotTransitive(usize),
    #[error("density from set {0} to set {1} is below 1 - lambda")]
    Density(usize, usize),
    #[error("vertex {vertex} of set {i} breaks smoothness against set {j}")]
    Vertex { i: usize, j: usize, vertex: usize },
}

pub(crate) fn to_bits(t: &Tournament, sets: &[VertexSet]) -> Vec<Bits> {
    sets.iter().map(|s| s.to_bits(t.n())).collect()
}

pub(crate) fn to_sets(bits: &[Bits]) -> Vec<VertexSet> {
    bits.iter().map(VertexSet::from_bits).collect()
}

/// `d(x, y) >= 1 - slack`, exactly.
pub(crate) fn dense(t: &Tournament, x: &Bits, y: &Bits, slack: &BigRational) -> bool {
    let pairs = (x.count() * y.count()) as u64;
    missing_within(pairs - t.edges_between(x, y), pairs, slack)
}

/// Whether every vertex of every set is within `slack` of complete towards
/// all later sets and from all earlier sets.
pub fn is_smooth(t: &Tournament, sets: &[Bits], slack: &BigRational) -> bool {
    first_rough(t, sets, slack).is_none()
}

fn vertex_ok(t: &Tournament, sets: &[Bits], i: usize, v: usize, j: usize, slack: &BigRational) -> bool {
    let size = sets[j].count() as u64;
    let agree = if j > i {
        t.out_row(v).intersection_count(&sets[j])
    } else {
        t.in_row(v).intersection_count(&sets[j])
    } as u64;
    missing_within(size - agree, size, slack)
}

fn first_rough(t: &Tournament, sets: &[Bits], slack: &BigRational) -> Option<(usize, usize, usize)> {
    for i in 0..sets.len() {
        for v in sets[i].iter() {
            for j in (0..sets.len()).filter(|&j| j != i) {
                if !vertex_ok(t, sets, i, v, j, slack) {
                    return Some((i, j, v));
                }
            }
        }
    }
    None
}

/// Removes, in one pass against the input sets, every vertex that falls
/// more than `slack` short towards some other set.
pub(crate) fn prune(t: &Tournament, sets: &[Bits], slack: &BigRational) -> Vec<Bits> {
    (0..sets.len())
        .map(|i| {
            let mut keep = sets[i].clone();
            for v in sets[i].iter() {
                if (0..sets.len()).any(|j| j != i && !vertex_ok(t, sets, i, v, j, slack)) {
                    keep.remove(v);
                }
            }
            keep
        })
        .collect()
}

/// Drops vertices with `d({v}, S_j) < 1 - W*lambda` (later `j`) or
/// `d(S_j, {v}) < 1 - W*lambda` (earlier `j`). With `W >= 2(k-1)` each set
/// keeps at least half its vertices, and the result is smooth for slack
/// `2 W lambda`; `smooth` is set from an exact check.
pub fn smooth_filter(t: &Tournament, seq: &LSequence, w: u64) -> LSequence {
    let bits = to_bits(t, &seq.sets);
    let slack = &seq.lambda * BigRational::from_integer(BigInt::from(w));
    let kept = prune(t, &bits, &slack);
    let lambda = slack * BigRational::from_integer(BigInt::from(2));
    let smooth = kept.iter().all(|b| !b.is_empty()) && is_smooth(t, &kept, &lambda);
    LSequence {
        sets: to_sets(&kept),
        c: &seq.c / BigRational::from_integer(BigInt::from(2)),
        lambda,
        smooth,
    }
}

fn check_common(
    t: &Tournament,
    sets: &[VertexSet],
    lambda: &BigRational,
    smooth: bool,
) -> Result<Vec<Bits>, SequenceViolation> {
    if sets.is_empty() {
        return Err(SequenceViolation::NoSets);
    }
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(SequenceViolation::Empty(i));
        }
        if s.max().is_some_and(|m| m >= t.n()) {
            return Err(SequenceViolation::OutOfRange(i));
        }
    }
    let bits = to_bits(t, sets);
    for i in 0..bits.len() {
        for j in (i + 1)..bits.len() {
            if bits[i].intersects(&bits[j]) {
                return Err(SequenceViolation::Overlap(i, j));
            }
            if !dense(t, &bits[i], &bits[j], lambda) {
                return Err(SequenceViolation::Density(i, j));
            }
        }
    }
    if smooth {
        if let Some((i, j, vertex)) = first_rough(t, &bits, lambda) {
            return Err(SequenceViolation::Vertex { i, j, vertex });
        }
    }
    Ok(bits)
}

fn check_linear(t: &Tournament, index: usize, s: &VertexSet, c: &BigRational) -> Result<(), SequenceViolation> {
    if at_least_fraction(s.len() as u64, t.n() as u64, c) {
        Ok(())
    } else {
        Err(SequenceViolation::NotLinear {
            index,
            size: s.len(),
        })
    }
}

/// Every stated property of `seq`, with exact arithmetic.
pub fn check_l_sequence(t: &Tournament, seq: &LSequence) -> Result<(), SequenceViolation> {
    check_common(t, &seq.sets, &seq.lambda, seq.smooth)?;
    for (i, s) in seq.sets.iter().enumerate() {
        check_linear(t, i, s, &seq.c)?;
    }
    Ok(())
}

/// `⌈c1 n^epsilon⌉`.
pub(crate) fn bigness<R: Real>(c1: &BigRational, n: usize, epsilon: R) -> usize {
    if c1.is_zero() {
        return 0;
    }
    let c = R::lit(c1.to_f64().unwrap_or(0.0));
    (c * R::of(n).powf(epsilon)).ceil().to_usize().unwrap_or(usize::MAX)
}

/// Every stated property of `seq`, including positional typing.
pub fn check_m_sequence<R: Real>(t: &Tournament, seq: &MSequence<R>) -> Result<(), SequenceViolation> {
    if seq.sets.len() % 2 == 0 {
        return Err(SequenceViolation::EvenLength(seq.sets.len()));
    }
    check_common(t, &seq.sets, &seq.lambda, seq.smooth)?;
    let need = bigness(&seq.c1, t.n(), seq.epsilon);
    for (i, s) in seq.sets.iter().enumerate() {
        if i % 2 == 0 {
            check_linear(t, i, s, &seq.c2)?;
        } else {
            if transitive_order(t, s.as_slice()).is_none() {
                return Err(SequenceViolation::NotTransitive(i));
            }
            if s.len() < need {
                return Err(SequenceViolation::NotBig {
                    index: i,
                    size: s.len(),
                    need,
                });
            }
        }
    }
    Ok(())
}
