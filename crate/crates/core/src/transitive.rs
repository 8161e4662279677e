//! Transitive subtournaments: recognition, an exact branch-and-bound solver,
//! the classical greedy extraction, and the constructive bound for tournaments
//! avoiding a prime star.

use thiserror::Error;

use std::collections::HashMap;

use crate::bits::Bits;
use crate::tournament::{Tournament, VertexSet};

pub use crate::star_free::{star_free_transitive, StarFreeConfig, StarFreeError, StarShape};

/// Vertex count above which [`max_transitive_exact`] refuses to run.
pub const DEFAULT_EXACT_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Greedy,
    StarFree,
    Merge,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::StarFree => "star_free",
            Method::Merge => "merge",
        }
    }
}

/// A transitive vertex set listed in its transitive order: every vertex beats
/// every later one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitiveWitness {
    pub order: Vec<usize>,
    pub method: Method,
}

impl TransitiveWitness {
    pub fn new(order: Vec<usize>, method: Method) -> Self {
        TransitiveWitness { order, method }
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::new(self.order.iter().copied())
    }

    /// Checks the order pairwise against `t`.
    pub fn verify(&self, t: &Tournament) -> bool {
        let mut seen = Bits::new(t.n());
        for &v in &self.order {
            if v >= t.n() || seen.contains(v) {
                return false;
            }
            seen.insert(v);
        }
        self.order
            .iter()
            .enumerate()
            .all(|(i, &a)| self.order[i + 1..].iter().all(|&b| t.beats(a, b)))
    }

    /// Maps vertex labels through `map` (e.g. from an induced subtournament).
    pub fn relabel(&self, map: &[usize]) -> Self {
        TransitiveWitness {
            order: self.order.iter().map(|&v| map[v]).collect(),
            method: self.method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransitiveError {
    #[error("{n} vertices exceeds the exact-solver cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    StarFree(#[from] StarFreeError),
}

/// Returns the transitive order of `s` if `t|s` is acyclic.
///
/// A tournament is transitive iff its outdegrees are exactly `0..k`, so sorting
/// by outdegree inside `s` both decides and orders.
pub fn is_transitive(t: &Tournament, s: &VertexSet) -> Option<Vec<usize>> {
    transitive_order(t, s.as_slice())
}

pub fn transitive_order(t: &Tournament, vertices: &[usize]) -> Option<Vec<usize>> {
    let k = vertices.len();
    let set = Bits::from_indices(t.n(), vertices.iter().copied());
    if set.count() != k {
        return None;
    }
    let mut by_deg: Vec<Option<usize>> = vec![None; k];
    for &v in vertices {
        let d = t.out_row(v).intersection_count(&set);
        if by_deg[d].is_some() {
            return None;
        }
        by_deg[d] = Some(v);
    }
    Some(by_deg.into_iter().rev().map(|v| v.expect("degrees distinct")).collect())
}

pub fn max_transitive_exact(t: &Tournament) -> Result<TransitiveWitness, TransitiveError> {
    max_transitive_exact_capped(t, DEFAULT_EXACT_CAP)
}

pub fn max_transitive_exact_capped(
    t: &Tournament,
    cap: usize,
) -> Result<TransitiveWitness, TransitiveError> {
    if t.n() > cap {
        return Err(TransitiveError::TooLarge { n: t.n(), cap });
    }
    Ok(TransitiveWitness::new(
        max_transitive_within(t, &Bits::full(t.n())),
        Method::Exact,
    ))
}

/// Largest transitive subset of `candidates`, in transitive order. No size cap.
///
/// Recurses on the source of the transitive set: `tr(C) = 1 + max_v tr(C ∩ N+(v))`,
/// memoized on `C`. Substitution structures reach few distinct candidate sets,
/// so the memo keeps iterated substitutions cheap. Inside a set, sources are
/// tried by decreasing outdegree and the search stops once `1 + outdegree`
/// cannot beat the best found or the best meets `|C|` minus a greedy packing of
/// vertex-disjoint cyclic triangles (a transitive set misses at least one
/// vertex of every cyclic triangle). Ties resolve towards the smallest vertex
/// label, so the result is deterministic.
pub fn max_transitive_within(t: &Tournament, candidates: &Bits) -> Vec<usize> {
    let mut memo = HashMap::new();
    solve(t, candidates, &mut memo);
    let mut chain = Vec::new();
    let mut cand = candidates.clone();
    while !cand.is_empty() {
        let want = memo[&cand];
        let v = sources(t, &cand)
            .into_iter()
            .map(|(_, v)| v)
            .find(|&v| {
                let rest = cand.intersection(t.out_row(v));
                1 + if rest.is_empty() { 0 } else { memo.get(&rest).copied().unwrap_or(0) } == want
            })
            .expect("memo holds an optimal source");
        chain.push(v);
        cand.intersect_with(t.out_row(v));
    }
    chain
}

fn sources(t: &Tournament, cand: &Bits) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = cand
        .iter()
        .map(|v| (t.out_row(v).intersection_count(cand), v))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    order
}

fn solve(t: &Tournament, cand: &Bits, memo: &mut HashMap<Bits, usize>) -> usize {
    if cand.is_empty() {
        return 0;
    }
    if let Some(&v) = memo.get(cand) {
        return v;
    }
    let order = sources(t, cand);
    let best = if order[0].0 == 0 {
        1
    } else {
        let ub = cand.count() - triangle_packing(t, cand);
        let mut best = 0;
        for (deg, v) in order {
            if 1 + deg <= best || best == ub {
                // sorted descending: nothing later can do better
                break;
            }
            best = best.max(1 + solve(t, &cand.intersection(t.out_row(v)), memo));
        }
        best
    };
    memo.insert(cand.clone(), best);
    best
}

/// Size of a greedy packing of vertex-disjoint cyclic triangles inside `cand`.
fn triangle_packing(t: &Tournament, cand: &Bits) -> usize {
    let mut rest = cand.clone();
    let mut count = 0;
    for u in cand.iter() {
        if !rest.contains(u) {
            continue;
        }
        let outs = rest.intersection(t.out_row(u));
        let ins = rest.intersection(t.in_row(u));
        if ins.is_empty() {
            continue;
        }
        let mut found = None;
        for v in outs.iter() {
            if let Some(w) = t.out_row(v).intersection(&ins).first() {
                found = Some((v, w));
                break;
            }
        }
        if let Some((v, w)) = found {
            rest.remove(u);
            rest.remove(v);
            rest.remove(w);
            count += 1;
        }
    }
    count
}

/// Classical Ramsey extraction: pick a vertex, keep the larger of its out- and
/// in-neighbourhoods, repeat. Guarantees at least `floor(log2 n) + 1` vertices.
pub fn greedy_transitive(t: &Tournament) -> TransitiveWitness {
    TransitiveWitness::new(greedy_within(t, &Bits::full(t.n())), Method::Greedy)
}

pub fn greedy_within(t: &Tournament, candidates: &Bits) -> Vec<usize> {
    let mut cand = candidates.clone();
    let mut head = Vec::new();
    let mut tail = Vec::new();
    while !cand.is_empty() {
        // the vertex whose larger side is largest; smallest label on ties
        let (v, outs, ins) = cand
            .iter()
            .map(|v| {
                (
                    v,
                    t.out_row(v).intersection_count(&cand),
                    t.in_row(v).intersection_count(&cand),
                )
            })
            .max_by(|a, b| a.1.max(a.2).cmp(&b.1.max(b.2)).then(b.0.cmp(&a.0)))
            .expect("nonempty");
        if outs >= ins {
            head.push(v);
            cand.intersect_with(t.out_row(v));
        } else {
            tail.push(v);
            cand.intersect_with(t.in_row(v));
        }
    }
    head.extend(tail.into_iter().rev());
    head
}

/// Lower bound guaranteed by [`greedy_transitive`].
pub fn ramsey_floor(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{gen_c5, gen_random, gen_transitive};

    fn naive_tr(t: &Tournament) -> usize {
        let n = t.n();
        (0u32..(1 << n))
            .filter(|m| {
                let s: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
                !s.is_empty() && transitive_order(t, &s).is_some()
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn recognition() {
        let c3 = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(is_transitive(&c3, &VertexSet::new([0, 1])).is_some());
        assert!(is_transitive(&c3, &VertexSet::new([2])).is_some());
        assert!(is_transitive(&c3, &c3.vertices()).is_none());
        let t6 = gen_transitive(6);
        assert_eq!(is_transitive(&t6, &VertexSet::new([1, 4, 5])), Some(vec![1, 4, 5]));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(max_transitive_exact(&gen_transitive(7)).unwrap().size(), 7);
        assert_eq!(max_transitive_exact(&gen_c5()).unwrap().size(), 3);
        let c3 = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(max_transitive_exact(&c3).unwrap().size(), 2);
        assert!(matches!(
            max_transitive_exact(&gen_random(25, 1)),
            Err(TransitiveError::TooLarge { n: 25, cap: 24 })
        ));
    }

    #[test]
    fn exact_matches_naive() {
        for seed in 0..60 {
            let t = gen_random(4 + (seed as usize % 9), seed);
            let w = max_transitive_exact(&t).unwrap();
            assert!(w.verify(&t));
            assert_eq!(w.size(), naive_tr(&t), "seed {seed}");
        }
    }

    #[test]
    fn greedy_meets_ramsey_floor() {
        assert_eq!(greedy_transitive(&gen_transitive(1)).size(), 1);
        for seed in 0..200 {
            let t = gen_random(8, seed);
            let w = greedy_transitive(&t);
            assert!(w.verify(&t));
            assert!(w.size() >= 4);
        }
        let t = gen_transitive(16);
        assert!(greedy_transitive(&t).size() >= 5);
        assert_eq!(max_transitive_exact(&t).unwrap().size(), 16);
    }

    #[test]
    fn ramsey_floor_values() {
        assert_eq!(ramsey_floor(1), 1);
        assert_eq!(ramsey_floor(7), 3);
        assert_eq!(ramsey_floor(8), 4);
        assert_eq!(ramsey_floor(512), 10);
    }
}
