//! Homogeneous sets, primality, partitioning number and quotients of small
//! pattern tournaments; induced-copy search; `H`-farness.

use std::collections::HashSet;

use rand_core::Rng;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::bits::Bits;
use crate::tournament::{substitute, Tournament, VertexSet};

/// Largest pattern size for which subsets are enumerated exhaustively.
pub const DEFAULT_STRUCTURE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("{n} vertices exceeds the exhaustive-analysis cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("a single-vertex tournament has no homogeneous partitioning with two or more parts")]
    SingleVertex,
    #[error("pattern must be prime")]
    NotPrime,
}

/// True iff every vertex outside `s` is complete to `s` or complete from `s`.
pub fn is_homogeneous(h: &Tournament, s: &VertexSet) -> bool {
    let sb = s.to_bits(h.n());
    let k = sb.count();
    (0..h.n())
        .filter(|v| !sb.contains(*v))
        .all(|v| matches!(h.out_row(v).intersection_count(&sb), c if c == 0 || c == k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomoStructure {
    /// Every homogeneous set `S` with `1 < |S| < |H|`.
    pub homo_sets: Vec<VertexSet>,
    pub is_prime: bool,
    /// Minimum number of parts over homogeneous partitionings with at least two
    /// parts; `|H|` for prime `H` and `1` for the single vertex.
    pub p: usize,
    /// Every partition of `V(H)` into at least two homogeneous sets.
    pub partitions: Vec<Vec<VertexSet>>,
}

fn homogeneous_masks(h: &Tournament) -> Vec<u32> {
    let n = h.n();
    let rows: Vec<u32> = (0..n)
        .map(|v| h.out_row(v).iter().fold(0u32, |m, j| m | 1 << j))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    (1..=full)
        .filter(|&s| {
            (0..n).all(|v| {
                if s >> v & 1 == 1 {
                    return true;
                }
                let o = rows[v] & s;
                o == 0 || o == s
            })
        })
        .collect()
}

fn mask_to_set(m: u32) -> VertexSet {
    VertexSet::new((0..32).filter(|i| m >> i & 1 == 1))
}

/// Partitions of the full mask into at least two homogeneous parts.
fn homogeneous_partitions(n: usize, masks: &[u32]) -> Vec<Vec<u32>> {
    let full: u32 = (1u32 << n) - 1;
    let mut by_low: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &m in masks {
        if m != full {
            by_low[m.trailing_zeros() as usize].push(m);
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(uncovered: u32, by_low: &[Vec<u32>], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if uncovered == 0 {
            out.push(cur.clone());
            return;
        }
        let v = uncovered.trailing_zeros() as usize;
        for &m in &by_low[v] {
            if m & !uncovered == 0 {
                cur.push(m);
                rec(uncovered & !m, by_low, cur, out);
                cur.pop();
            }
        }
    }
    rec(full, &by_low, &mut cur, &mut out);
    out
}

pub fn analyze_homogeneous(h: &Tournament) -> Result<HomoStructure, StructureError> {
    analyze_homogeneous_capped(h, DEFAULT_STRUCTURE_CAP)
}

pub fn analyze_homogeneous_capped(
    h: &Tournament,
    cap: usize,
) -> Result<HomoStructure, StructureError> {
    let n = h.n();
    if n > cap.min(31) {
        return Err(StructureError::TooLarge { n, cap });
    }
    let masks = homogeneous_masks(h);
    let homo_sets: Vec<VertexSet> = masks
        .iter()
        .filter(|m| m.count_ones() > 1 && (m.count_ones() as usize) < n)
        .map(|&m| mask_to_set(m))
        .collect();
    let partitions: Vec<Vec<VertexSet>> = if n == 1 {
        Vec::new()
    } else {
        homogeneous_partitions(n, &masks)
            .into_iter()
            .map(|p| p.into_iter().map(mask_to_set).collect())
            .collect()
    };
    let p = partitions.iter().map(Vec::len).min().unwrap_or(1);
    Ok(HomoStructure {
        is_prime: homo_sets.is_empty(),
        homo_sets,
        p,
        partitions,
    })
}

/// A tournament on the parts of a homogeneous partitioning. Part `i` of
/// `partition` corresponds to vertex `part_map[i]` of `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub q: Tournament,
    pub partition: Vec<VertexSet>,
    pub part_map: Vec<usize>,
}

impl Quotient {
    pub fn from_partition(h: &Tournament, partition: Vec<VertexSet>) -> Self {
        let reps: Vec<usize> = partition
            .iter()
            .map(|p| p.iter().next().expect("nonempty part"))
            .collect();
        let q = Tournament::from_fn(reps.len(), |i, j| h.beats(reps[i], reps[j]));
        Quotient {
            q,
            part_map: (0..partition.len()).collect(),
            partition,
        }
    }
}

/// One quotient per homogeneous partitioning with at least two parts, in the
/// order the partitions are enumerated (not reduced up to isomorphism).
pub fn enumerate_quotients(h: &Tournament) -> Result<Vec<Quotient>, StructureError> {
    enumerate_quotients_capped(h, DEFAULT_STRUCTURE_CAP)
}

pub fn enumerate_quotients_capped(
    h: &Tournament,
    cap: usize,
) -> Result<Vec<Quotient>, StructureError> {
    if h.n() == 1 {
        return Err(StructureError::SingleVertex);
    }
    let st = analyze_homogeneous_capped(h, cap)?;
    Ok(st
        .partitions
        .into_iter()
        .map(|p| Quotient::from_partition(h, p))
        .collect())
}

/// An orientation-preserving injection: vertex `a` of the pattern goes to `map[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn verify(&self, t: &Tournament, h: &Tournament) -> bool {
        if self.map.len() != h.n() || self.map.iter().any(|&v| v >= t.n()) {
            return false;
        }
        let img: HashSet<usize> = self.map.iter().copied().collect();
        if img.len() != self.map.len() {
            return false;
        }
        (0..h.n()).all(|a| {
            (0..h.n())
                .filter(|&b| b != a)
                .all(|b| h.beats(a, b) == t.beats(self.map[a], self.map[b]))
        })
    }

    pub fn relabel(&self, map: &[usize]) -> Self {
        Embedding {
            map: self.map.iter().map(|&v| map[v]).collect(),
        }
    }

    pub fn image(&self) -> VertexSet {
        VertexSet::new(self.map.iter().copied())
    }
}

/// Finds an induced copy of `h` in `t`, if one exists.
///
/// Backtracking with forward checking: every unassigned pattern vertex keeps a
/// candidate bitset that is intersected with the out- or in-row of each newly
/// placed vertex; the unassigned vertex with the smallest domain goes next
/// (ties: larger |out - in| in `h`, then smaller label). The first embedding in
/// this deterministic order is returned.
pub fn find_embedding(t: &Tournament, h: &Tournament) -> Option<Embedding> {
    find_embedding_within(t, h, &Bits::full(t.n()))
}

/// As [`find_embedding`], restricted to vertices in `allowed`.
pub fn find_embedding_within(t: &Tournament, h: &Tournament, allowed: &Bits) -> Option<Embedding> {
    let k = h.n();
    if k == 0 || k > allowed.count() {
        return if k == 0 { Some(Embedding { map: vec![] }) } else { None };
    }
    let tdeg: Vec<(usize, usize)> = (0..t.n()).map(|v| (t.outdegree(v), t.indegree(v))).collect();
    let mut domains: Vec<Bits> = (0..k)
        .map(|a| {
            let (ho, hi) = (h.outdegree(a), h.indegree(a));
            let mut d = allowed.clone();
            for v in allowed.iter() {
                if tdeg[v].0 < ho || tdeg[v].1 < hi {
                    d.remove(v);
                }
            }
            d
        })
        .collect();
    if domains.iter().any(Bits::is_empty) {
        return None;
    }
    let skew: Vec<usize> = (0..k)
        .map(|a| h.outdegree(a).abs_diff(h.indegree(a)))
        .collect();
    let mut map = vec![usize::MAX; k];
    let mut assigned = vec![false; k];
    if embed_rec(t, h, &skew, &mut domains, &mut map, &mut assigned, 0) {
        Some(Embedding { map })
    } else {
        None
    }
}

fn embed_rec(
    t: &Tournament,
    h: &Tournament,
    skew: &[usize],
    domains: &mut [Bits],
    map: &mut [usize],
    assigned: &mut [bool],
    depth: usize,
) -> bool {
    let k = h.n();
    if depth == k {
        return true;
    }
    let a = (0..k)
        .filter(|&a| !assigned[a])
        .min_by(|&x, &y| {
            domains[x]
                .count()
                .cmp(&domains[y].count())
                .then(skew[y].cmp(&skew[x]))
                .then(x.cmp(&y))
        })
        .expect("unassigned vertex");
    assigned[a] = true;
    let cands = domains[a].clone();
    for x in cands.iter() {
        let saved: Vec<(usize, Bits)> = (0..k)
            .filter(|&b| !assigned[b])
            .map(|b| (b, domains[b].clone()))
            .collect();
        let mut dead = false;
        for &(b, _) in &saved {
            let row = if h.beats(a, b) { t.out_row(x) } else { t.in_row(x) };
            domains[b].intersect_with(row);
            if domains[b].is_empty() {
                dead = true;
                break;
            }
        }
        if !dead {
            map[a] = x;
            if embed_rec(t, h, skew, domains, map, assigned, depth + 1) {
                return true;
            }
        }
        for (b, d) in saved {
            domains[b] = d;
        }
    }
    assigned[a] = false;
    map[a] = usize::MAX;
    false
}

/// True iff `t` contains no quotient of `h` with at least two vertices.
pub fn is_h_far(t: &Tournament, h: &Tournament) -> Result<bool, StructureError> {
    Ok(first_quotient_copy(t, h)?.is_none())
}

/// A copy in `t` of some quotient of `h`, checking smaller quotients first.
/// Quotients with identical labelled adjacency are searched once.
pub fn first_quotient_copy(
    t: &Tournament,
    h: &Tournament,
) -> Result<Option<(Quotient, Embedding)>, StructureError> {
    let mut quotients = enumerate_quotients(h)?;
    quotients.sort_by_key(|q| q.q.n());
    let mut seen = HashSet::new();
    for q in quotients {
        if !seen.insert(q.q.clone()) {
            continue;
        }
        if let Some(e) = find_embedding(t, &q.q) {
            return Ok(Some((q, e)));
        }
    }
    Ok(None)
}

/// Random `h`-free tournament for prime `h`, built as a random substitution tree.
///
/// Every internal node substitutes into a random quotient on at most
/// `max_quotient` vertices that does not contain `h`; a prime subtournament of a
/// substitution lies inside one block or meets each block at most once, so the
/// result is `h`-free by construction.
pub fn gen_h_free(
    n: usize,
    h: &Tournament,
    max_quotient: usize,
    seed: u64,
) -> Result<Tournament, StructureError> {
    if h.n() < 3 || !analyze_homogeneous(h)?.is_prime {
        return Err(StructureError::NotPrime);
    }
    let mut rng = SplitMix64::from_seed(seed.to_le_bytes());
    Ok(h_free_tree(n.max(1), h, max_quotient.max(2), &mut rng))
}

fn below(rng: &mut SplitMix64, bound: usize) -> usize {
    (rng.next_u64() % bound as u64) as usize
}

fn h_free_tree(n: usize, h: &Tournament, max_q: usize, rng: &mut SplitMix64) -> Tournament {
    if n == 1 {
        return Tournament::from_fn(1, |_, _| true);
    }
    let q = 2 + below(rng, max_q.min(n) - 1);
    let mut quotient = Tournament::from_fn(q, |_, _| rng.next_u64() >> 63 == 1);
    let mut tries = 0;
    while q >= h.n() && find_embedding(&quotient, h).is_some() {
        tries += 1;
        quotient = if tries < 32 {
            Tournament::from_fn(q, |_, _| rng.next_u64() >> 63 == 1)
        } else {
            Tournament::from_fn(q, |_, _| true)
        };
    }
    // q - 1 distinct cut points in 1..n
    let mut points: Vec<usize> = (1..n).collect();
    for i in 0..(q - 1) {
        let j = i + below(rng, points.len() - i);
        points.swap(i, j);
    }
    let mut cuts: Vec<usize> = points[..q - 1].to_vec();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);
    let parts: Vec<Tournament> = cuts
        .windows(2)
        .map(|w| h_free_tree(w[1] - w[0], h, max_q, rng))
        .collect();
    substitute(&quotient, &parts).expect("arity matches").0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{gen_c5, gen_random, gen_transitive};

    fn c3() -> Tournament {
        Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn c3_blown() -> Tournament {
        let k1 = gen_transitive(1);
        substitute(&c3(), &[gen_transitive(2), k1.clone(), k1]).unwrap().0
    }

    #[test]
    fn homogeneity_examples() {
        let h = c3_blown();
        assert!(is_homogeneous(&h, &VertexSet::new([2])));
        assert!(is_homogeneous(&h, &h.vertices()));
        assert!(is_homogeneous(&h, &VertexSet::new([0, 1])));
        assert!(!is_homogeneous(&h, &VertexSet::new([0, 2])));
    }

    #[test]
    fn analysis_examples() {
        let s = analyze_homogeneous(&c3()).unwrap();
        assert!(s.is_prime);
        assert_eq!(s.p, 3);
        let s = analyze_homogeneous(&gen_c5()).unwrap();
        assert!(s.is_prime);
        assert_eq!(s.p, 5);
        let s = analyze_homogeneous(&c3_blown()).unwrap();
        assert!(!s.is_prime);
        assert_eq!(s.p, 3);
        assert_eq!(s.homo_sets, vec![VertexSet::new([0, 1])]);
        assert_eq!(analyze_homogeneous(&gen_transitive(1)).unwrap().p, 1);
        assert_eq!(analyze_homogeneous(&gen_transitive(5)).unwrap().p, 2);
        assert!(matches!(
            analyze_homogeneous(&gen_random(17, 0)),
            Err(StructureError::TooLarge { n: 17, .. })
        ));
    }

    #[test]
    fn quotient_examples() {
        let qs = enumerate_quotients(&gen_c5()).unwrap();
        assert_eq!(qs.len(), 1);
        assert_eq!(qs[0].q, gen_c5());
        let mut sizes: Vec<usize> = enumerate_quotients(&c3_blown())
            .unwrap()
            .iter()
            .map(|q| q.q.n())
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 4]);
        let qs = enumerate_quotients(&gen_transitive(2)).unwrap();
        assert_eq!(qs.len(), 1);
        assert_eq!(qs[0].q, gen_transitive(2));
        assert_eq!(
            enumerate_quotients(&gen_transitive(1)),
            Err(StructureError::SingleVertex)
        );
    }

    #[test]
    fn embedding_examples() {
        assert!(find_embedding(&gen_transitive(5), &c3()).is_none());
        let e = find_embedding(&gen_c5(), &c3()).unwrap();
        assert!(e.verify(&gen_c5(), &c3()));
        let e = find_embedding(&gen_random(9, 4), &gen_transitive(1)).unwrap();
        assert_eq!(e.map, vec![0]);
        assert!(find_embedding(&c3(), &gen_c5()).is_none());
    }

    #[test]
    fn far_examples() {
        assert!(is_h_far(&gen_transitive(2), &c3()).unwrap());
        assert!(!is_h_far(&gen_c5(), &c3()).unwrap());
        assert!(!is_h_far(&gen_random(12, 1), &gen_c5()).unwrap());
    }

    #[test]
    fn h_free_generator_is_free() {
        let h = gen_c5();
        for seed in 0..20 {
            let t = gen_h_free(40, &h, 4, seed).unwrap();
            assert_eq!(t.n(), 40);
            assert!(find_embedding(&t, &h).is_none(), "seed {seed}");
        }
        assert_eq!(gen_h_free(5, &gen_transitive(3), 4, 0), Err(StructureError::NotPrime));
    }
}
