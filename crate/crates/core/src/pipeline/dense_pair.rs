//! Either a copy of `H` with one vertex in each of `S_1..S_h`, or two large
//! disjoint sets with density at least `1 - lambda` from the first to the second.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::density::{at_least_fraction, rational};
use crate::structure::Embedding;
use crate::tournament::{Tournament, VertexSet};

use super::sequences::dense;
use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensePair {
    /// `map[i]` lies in `S_i`.
    Embedding(Embedding),
    /// `d(x1, x2) >= 1 - lambda`.
    Pair { x1: VertexSet, x2: VertexSet },
}

pub(crate) enum DensePairBits {
    Embedding(Vec<usize>),
    Pair(Bits, Bits),
}

/// `lambda^h c / h`: the guaranteed linear size of either side of the pair.
pub fn dense_pair_bound(h: usize, c: &BigRational, lambda: &BigRational) -> BigRational {
    num_traits::pow(lambda.clone(), h) * c / BigRational::from_integer(BigInt::from(h))
}

/// Walks the pattern vertices in index order. For the current vertex it takes
/// the first candidate in its set that has at least a `lambda` share of both
/// out- and in-neighbours in every remaining set, narrows each remaining set to
/// the side the pattern asks for, and continues with `lambda c`. If no
/// candidate qualifies, every candidate is nearly complete to or from some
/// remaining set; the largest of those `2(h-1)` classes, with the set it
/// faces, is the pair.
///
/// Requires pairwise disjoint sets with `|S_i| >= c |Z|` and
/// `0 < lambda <= 1/2`.
pub fn dense_pair_or_h(
    z: &Tournament,
    h: &Tournament,
    sets: &[VertexSet],
    c: &BigRational,
    lambda: &BigRational,
) -> Result<DensePair, PipelineError> {
    let bad = |m: &str| Err(PipelineError::PreconditionViolated(m.to_string()));
    if sets.len() != h.n() {
        return bad("need exactly one set per pattern vertex");
    }
    if *lambda <= BigRational::zero() || *lambda > rational(1, 2) {
        return bad("lambda must lie in (0, 1/2]");
    }
    if *c <= BigRational::zero() || *c > BigRational::one() {
        return bad("c must lie in (0, 1]");
    }
    for s in sets {
        z.check_set(s)
            .map_err(|e| PipelineError::PreconditionViolated(e.to_string()))?;
        if !at_least_fraction(s.len() as u64, z.n() as u64, c) {
            return bad("a set is not c-linear");
        }
    }
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            if !sets[i].is_disjoint(&sets[j]) {
                return bad("sets must be pairwise disjoint");
            }
        }
    }
    let bits: Vec<Bits> = sets.iter().map(|s| s.to_bits(z.n())).collect();
    match dense_pair_bits(z, h, bits, lambda) {
        DensePairBits::Embedding(map) => {
            let e = Embedding { map };
            let inside = e.map.iter().zip(sets).all(|(&v, s)| s.contains(v));
            if !inside || !e.verify(z, h) {
                return Err(PipelineError::Shortfall("embedding failed verification".into()));
            }
            Ok(DensePair::Embedding(e))
        }
        DensePairBits::Pair(x1, x2) => {
            let bound = dense_pair_bound(h.n(), c, lambda);
            let n = z.n() as u64;
            if !at_least_fraction(x1.count() as u64, n, &bound)
                || !at_least_fraction(x2.count() as u64, n, &bound)
                || !dense(z, &x1, &x2, lambda)
            {
                return Err(PipelineError::Shortfall("dense pair failed verification".into()));
            }
            Ok(DensePair::Pair {
                x1: VertexSet::from_bits(&x1),
                x2: VertexSet::from_bits(&x2),
            })
        }
    }
}

pub(crate) fn dense_pair_bits(
    z: &Tournament,
    h: &Tournament,
    sets: Vec<Bits>,
    lambda: &BigRational,
) -> DensePairBits {
    let order: Vec<usize> = (0..h.n()).collect();
    let mut map = vec![usize::MAX; h.n()];
    match descend(z, h, &order, sets, lambda, &mut map) {
        None => DensePairBits::Embedding(map),
        Some((a, b)) => DensePairBits::Pair(a, b),
    }
}

fn descend(
    z: &Tournament,
    h: &Tournament,
    order: &[usize],
    sets: Vec<Bits>,
    lambda: &BigRational,
    map: &mut [usize],
) -> Option<(Bits, Bits)> {
    let a = order[0];
    if order.len() == 1 {
        map[a] = sets[0].first().expect("linear sets are nonempty");
        return None;
    }
    let share = |count: usize, j: usize| at_least_fraction(count as u64, sets[j].count() as u64, lambda);
    for s in sets[0].iter() {
        let regular = (1..order.len()).all(|j| {
            share(z.out_row(s).intersection_count(&sets[j]), j)
                && share(z.in_row(s).intersection_count(&sets[j]), j)
        });
        if regular {
            map[a] = s;
            let narrowed: Vec<Bits> = (1..order.len())
                .map(|j| {
                    let side = if h.beats(a, order[j]) {
                        z.out_row(s)
                    } else {
                        z.in_row(s)
                    };
                    sets[j].intersection(side)
                })
                .collect();
            return descend(z, h, &order[1..], narrowed, lambda, map);
        }
    }
    // class 2(j-1): nearly beats S_j; class 2(j-1)+1: nearly beaten by S_j
    let mut classes = vec![Bits::new(z.n()); 2 * (order.len() - 1)];
    for s in sets[0].iter() {
        for j in 1..order.len() {
            if !share(z.in_row(s).intersection_count(&sets[j]), j) {
                classes[2 * (j - 1)].insert(s);
            }
            if !share(z.out_row(s).intersection_count(&sets[j]), j) {
                classes[2 * (j - 1) + 1].insert(s);
            }
        }
    }
    let best = (0..classes.len())
        .max_by(|&x, &y| classes[x].count().cmp(&classes[y].count()).then(y.cmp(&x)))
        .expect("at least one class");
    let j = best / 2 + 1;
    let class = classes[best].clone();
    Some(if best % 2 == 0 {
        (class, sets[j].clone())
    } else {
        (sets[j].clone(), class)
    })
}
