//! Transitive sets in tournaments avoiding a prime star.
//!
//! Start from a large transitive set `L`, split it along its order into
//! `L_1..L_l` of size `⌊|L|/l⌋` followed by the remainder `R`, and look at every
//! outside vertex `w`. If `w` sees every `L_i` the way the center of `H` sees its
//! `i`-th leaf, the pattern is found. Otherwise some `L_{i0}` is missed by at
//! least a `1/l` share of the outside vertices; those form a set `S` that is
//! complete to or from `L_{i0}`, so a transitive set of `S` (found recursively)
//! merges with `L_{i0}`. The merge replaces `L` while it is larger.

use thiserror::Error;

use crate::bits::Bits;
use crate::orderings::{find_star_ordering, GalaxyDecomposition, OrderingError};
use crate::scalar::Real;
use crate::structure::{analyze_homogeneous, Embedding, StructureError};
use crate::tournament::Tournament;
use crate::transitive::{greedy_within, max_transitive_within, Method, TransitiveWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarFreeError {
    #[error("pattern is not a star")]
    NotAStar,
    #[error("pattern is not prime")]
    NotPrime,
    #[error("pattern found in the host tournament")]
    FoundH(Embedding),
    #[error("witness of size {size} is below the guaranteed {bound}")]
    BoundNotMet { size: usize, bound: usize },
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A star pattern seen from its center: the remaining vertices in transitive
/// order, and on which side of the center each of them sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarShape {
    pub h: usize,
    pub center: usize,
    pub leaves: Vec<usize>,
    /// `center_beats[i]` iff the center beats `leaves[i]` in the pattern.
    pub center_beats: Vec<bool>,
}

impl StarShape {
    /// Shape from a single-star decomposition of `h`.
    pub fn from_decomposition(
        h: &Tournament,
        d: &GalaxyDecomposition,
    ) -> Result<Self, StarFreeError> {
        if d.stars.len() != 1 {
            return Err(StarFreeError::NotAStar);
        }
        let center = d.stars[0].center;
        let leaves: Vec<usize> = d
            .ordering
            .perm()
            .iter()
            .copied()
            .filter(|&v| v != center)
            .collect();
        // every backward edge touches the center, so the rest is in transitive order
        debug_assert!(leaves
            .iter()
            .enumerate()
            .all(|(i, &a)| leaves[i + 1..].iter().all(|&b| h.beats(a, b))));
        let center_beats = leaves.iter().map(|&v| h.beats(center, v)).collect();
        Ok(StarShape {
            h: h.n(),
            center,
            leaves,
            center_beats,
        })
    }

    /// Shape of a prime star, via the first star ordering found.
    pub fn of_prime_star(h: &Tournament) -> Result<Self, StarFreeError> {
        if !analyze_homogeneous(h)?.is_prime {
            return Err(StarFreeError::NotPrime);
        }
        let d = find_star_ordering(h)?.ok_or(StarFreeError::NotAStar)?;
        Self::from_decomposition(h, &d)
    }

    pub fn l(&self) -> usize {
        self.leaves.len()
    }
}

/// `1 / (3h ln 2h)`.
pub fn star_epsilon<R: Real>(h: usize) -> R {
    let h = R::of(h);
    R::one() / (R::lit(3.0) * h * (R::lit(2.0) * h).ln())
}

/// `min(4^-h, 2^(-1/(1-ε)))`.
pub fn star_constant<R: Real>(h: usize) -> R {
    let eps: R = star_epsilon(h);
    let a = R::lit(4.0).powi(-(h as i32));
    let b = R::lit(2.0).powf(-(R::one() / (R::one() - eps)));
    a.min(b)
}

/// `max(4^h, 2^(1/(1-ε)))`, floored; at or below it the recursion stops.
pub fn star_base_threshold(h: usize) -> usize {
    let eps: f64 = star_epsilon(h);
    let a = 4f64.powi(h as i32);
    let b = 2f64.powf(1.0 / (1.0 - eps));
    a.max(b).min(usize::MAX as f64).floor() as usize
}

/// `⌈c(H) n^ε⌉`.
pub fn star_guarantee(h: usize, n: usize) -> usize {
    let c: f64 = star_constant(h);
    let eps: f64 = star_epsilon(h);
    (c * (n as f64).powf(eps)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarFreeConfig {
    /// Inputs of at most this many vertices go straight to the base case.
    /// `None` uses `max(4^h, 2^(1/(1-ε)))`.
    pub base_threshold: Option<usize>,
    /// Base cases up to this size are solved exactly; larger ones greedily.
    pub exact_cap: usize,
}

impl Default for StarFreeConfig {
    fn default() -> Self {
        StarFreeConfig {
            base_threshold: None,
            exact_cap: crate::transitive::DEFAULT_EXACT_CAP,
        }
    }
}

/// Transitive set of size at least `⌈c(H) n^ε⌉` in an `H`-free `t`, or the copy
/// of `H` that the search ran into.
pub fn star_free_transitive(
    t: &Tournament,
    shape: &StarShape,
    cfg: &StarFreeConfig,
) -> Result<TransitiveWitness, StarFreeError> {
    let threshold = cfg
        .base_threshold
        .unwrap_or_else(|| star_base_threshold(shape.h));
    let (order, method) = solve(t, &Bits::full(t.n()), shape, threshold, cfg.exact_cap)?;
    let bound = star_guarantee(shape.h, t.n());
    if order.len() < bound {
        return Err(StarFreeError::BoundNotMet {
            size: order.len(),
            bound,
        });
    }
    Ok(TransitiveWitness::new(order, method))
}

fn base(t: &Tournament, cand: &Bits, exact_cap: usize) -> (Vec<usize>, Method) {
    if cand.count() <= exact_cap {
        (max_transitive_within(t, cand), Method::Exact)
    } else {
        (greedy_within(t, cand), Method::Greedy)
    }
}

fn solve(
    t: &Tournament,
    cand: &Bits,
    shape: &StarShape,
    threshold: usize,
    exact_cap: usize,
) -> Result<(Vec<usize>, Method), StarFreeError> {
    let (mut best, mut method) = base(t, cand, exact_cap);
    if cand.count() <= threshold {
        return Ok((best, method));
    }
    let l = shape.l();
    loop {
        let size = best.len() / l;
        if size == 0 {
            return Ok((best, method));
        }
        let w = cand.difference(&Bits::from_indices(t.n(), best.iter().copied()));
        if w.is_empty() {
            return Ok((best, method));
        }
        let parts: Vec<Bits> = (0..l)
            .map(|i| Bits::from_indices(t.n(), best[i * size..(i + 1) * size].iter().copied()))
            .collect();
        let zeta = |v: usize, i: usize| {
            let side = if shape.center_beats[i] {
                t.out_row(v)
            } else {
                t.in_row(v)
            };
            side.intersects(&parts[i])
        };
        let mut missed = vec![Bits::new(t.n()); l];
        for v in w.iter() {
            let mut all = true;
            for (i, m) in missed.iter_mut().enumerate() {
                if !zeta(v, i) {
                    m.insert(v);
                    all = false;
                }
            }
            if all {
                return Err(StarFreeError::FoundH(plant(t, shape, v, &best, size)));
            }
        }
        let i0 = (0..l)
            .max_by(|&a, &b| missed[a].count().cmp(&missed[b].count()).then(b.cmp(&a)))
            .expect("l >= 1");
        let (inner, _) = solve(t, &missed[i0], shape, threshold, exact_cap)?;
        if inner.len() + size <= best.len() {
            return Ok((best, method));
        }
        let block = &best[i0 * size..(i0 + 1) * size];
        best = if shape.center_beats[i0] {
            // no vertex of S beats L_{i0}
            block.iter().chain(inner.iter()).copied().collect()
        } else {
            inner.iter().chain(block.iter()).copied().collect()
        };
        method = Method::Merge;
    }
}

fn plant(t: &Tournament, shape: &StarShape, w: usize, best: &[usize], size: usize) -> Embedding {
    let mut map = vec![usize::MAX; shape.h];
    map[shape.center] = w;
    for (i, &leaf) in shape.leaves.iter().enumerate() {
        map[leaf] = *best[i * size..(i + 1) * size]
            .iter()
            .find(|&&r| t.beats(w, r) == shape.center_beats[i])
            .expect("zeta was 1");
    }
    Embedding { map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderings::{build_galaxy, GalaxySpec};
    use crate::structure::{find_embedding, gen_h_free};
    use crate::tournament::{gen_random, gen_transitive, substitute};

    fn star5() -> Tournament {
        build_galaxy(&GalaxySpec::parse("C0\nS\nL0\nS\nL0\n").unwrap()).unwrap()
    }

    #[test]
    fn formulas() {
        let e: f64 = star_epsilon(5);
        assert!((e - 1.0 / (15.0 * 10f64.ln())).abs() < 1e-15);
        assert_eq!(star_base_threshold(4), 256);
        let c: f64 = star_constant(4);
        assert_eq!(c, 4f64.powi(-4));
        assert_eq!(star_guarantee(5, 300), 1);
    }

    #[test]
    fn shape_of_star() {
        let s = StarShape::of_prime_star(&star5()).unwrap();
        assert_eq!(s.l(), 4);
        let c5 = crate::tournament::gen_c5();
        assert_eq!(StarShape::of_prime_star(&c5), Err(StarFreeError::NotAStar));
        assert_eq!(
            StarShape::of_prime_star(&gen_transitive(3)),
            Err(StarFreeError::NotPrime)
        );
    }

    #[test]
    fn transitive_host() {
        let s = StarShape::of_prime_star(&star5()).unwrap();
        let t = gen_transitive(40);
        let w = star_free_transitive(&t, &s, &StarFreeConfig::default()).unwrap();
        assert_eq!(w.size(), 40);
    }

    #[test]
    fn recursion_on_free_hosts() {
        let h = star5();
        let s = StarShape::of_prime_star(&h).unwrap();
        let cfg = StarFreeConfig {
            base_threshold: Some(12),
            exact_cap: 12,
        };
        for seed in 0..10 {
            let t = gen_h_free(120, &h, 6, seed).unwrap();
            assert!(find_embedding(&t, &h).is_none());
            let w = star_free_transitive(&t, &s, &cfg).unwrap();
            assert!(w.verify(&t));
            assert!(w.size() >= greedy_within(&t, &Bits::full(t.n())).len().min(4));
        }
    }

    #[test]
    fn planted_copy_is_reported() {
        let h = star5();
        let s = StarShape::of_prime_star(&h).unwrap();
        let cfg = StarFreeConfig {
            base_threshold: Some(8),
            exact_cap: 8,
        };
        let mut found = 0;
        for seed in 0..20 {
            let parts: Vec<Tournament> = (0..5).map(|i| gen_random(8, seed * 5 + i)).collect();
            let t = substitute(&h, &parts).unwrap().0;
            match star_free_transitive(&t, &s, &cfg) {
                Err(StarFreeError::FoundH(e)) => {
                    assert!(e.verify(&t, &h));
                    found += 1;
                }
                Ok(w) => assert!(w.verify(&t)),
                Err(e) => panic!("{e}"),
            }
        }
        assert!(found > 0);
    }
}
