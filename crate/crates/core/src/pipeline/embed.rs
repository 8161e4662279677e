//! Assembling a galaxy star by star inside a smooth `m`-sequence, or, when a
//! star cannot be placed, a transitive set built from the obstruction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::bits::Bits;
use crate::orderings::{find_galaxy_ordering, GalaxyDecomposition, Role};
use crate::scalar::Real;
use crate::structure::Embedding;
use crate::tournament::Tournament;
use crate::transitive::{transitive_order, Method, TransitiveWitness};

use super::find::{FindResult, Outcome};
use super::mseq::Extractor;
use super::params::PipelineParams;
use super::sequences::{check_m_sequence, MSequence};
use super::trace::Trace;
use super::PipelineError;

pub const DEFAULT_TUPLE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutBlock {
    /// Centers, in ordering order; matched to a linear set.
    Centers(Vec<usize>),
    /// Leaves, in ordering order; matched to a transitive set.
    Leaves(Vec<usize>),
}

/// A galaxy ordering cut into alternating center and leaf blocks
/// `S, T, S, ..., T, S`. Singletons are absorbed: one whose nearest
/// non-singletons on both sides are leaves becomes a free leaf, any other one
/// becomes the center of a star without leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub h: usize,
    pub blocks: Vec<LayoutBlock>,
    /// `(center, leaves)` in ordering order of the centers.
    pub stars: Vec<(usize, Vec<usize>)>,
    pub free_leaves: Vec<usize>,
}

impl Layout {
    /// Layout of the first galaxy ordering of `h`.
    pub fn of(h: &Tournament) -> Result<Self, PipelineError> {
        let d = find_galaxy_ordering(h)?.ok_or(PipelineError::NotAGalaxy)?;
        Ok(Self::from_decomposition(&d))
    }

    pub fn from_decomposition(d: &GalaxyDecomposition) -> Self {
        let perm = d.ordering.perm();
        let roles = d.roles();
        let n = perm.len();
        let nearest = |range: &mut dyn Iterator<Item = usize>| {
            range.map(|p| roles[perm[p]]).find(|r| *r != Role::Singleton)
        };
        let is_leaf: Vec<bool> = (0..n)
            .map(|p| match roles[perm[p]] {
                Role::Leaf => true,
                Role::Center => false,
                Role::Singleton => {
                    nearest(&mut (0..p).rev()) == Some(Role::Leaf)
                        && nearest(&mut (p + 1..n)) == Some(Role::Leaf)
                }
            })
            .collect();
        let mut blocks = vec![LayoutBlock::Centers(Vec::new())];
        for p in 0..n {
            let v = perm[p];
            match (blocks.last_mut().expect("nonempty"), is_leaf[p]) {
                (LayoutBlock::Centers(c), false) => c.push(v),
                (LayoutBlock::Leaves(l), true) => l.push(v),
                (LayoutBlock::Centers(_), true) => blocks.push(LayoutBlock::Leaves(vec![v])),
                (LayoutBlock::Leaves(_), false) => blocks.push(LayoutBlock::Centers(vec![v])),
            }
        }
        if matches!(blocks.last(), Some(LayoutBlock::Leaves(_))) {
            blocks.push(LayoutBlock::Centers(Vec::new()));
        }
        let pos = d.ordering.positions();
        let mut stars: Vec<(usize, Vec<usize>)> =
            d.stars.iter().map(|s| (s.center, s.leaves.clone())).collect();
        let mut free_leaves = Vec::new();
        for &s in &d.singletons {
            if is_leaf[pos[s]] {
                free_leaves.push(s);
            } else {
                stars.push((s, Vec::new()));
            }
        }
        stars.sort_by_key(|(c, _)| pos[*c]);
        free_leaves.sort_by_key(|&v| pos[v]);
        Layout {
            h: n,
            blocks,
            stars,
            free_leaves,
        }
    }

    /// Number of leaf blocks.
    pub fn t(&self) -> usize {
        self.blocks.len() / 2
    }

    /// Center block sizes `k_1..k_{t+1}`.
    pub fn k(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                LayoutBlock::Centers(c) => Some(c.len()),
                LayoutBlock::Leaves(_) => None,
            })
            .collect()
    }

    /// Leaf block sizes `w_1..w_t`.
    pub fn w(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                LayoutBlock::Leaves(l) => Some(l.len()),
                LayoutBlock::Centers(_) => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedConfig {
    /// Largest number of center tuples enumerated before giving up.
    pub tuple_budget: usize,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            tuple_budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

fn hypotheses<R: Real>(
    t: &Tournament,
    h: &Tournament,
    mseq: &MSequence<R>,
    params: &PipelineParams<R>,
) -> Result<(), PipelineError> {
    let bad = |m: String| Err(PipelineError::HypothesisViolated(m));
    let layout = &params.layout;
    if layout.h != h.n() {
        return bad(format!("layout has {} vertices, pattern {}", layout.h, h.n()));
    }
    if mseq.sets.len() != layout.blocks.len() {
        return bad(format!(
            "m-sequence has {} sets, layout needs {}",
            mseq.sets.len(),
            layout.blocks.len()
        ));
    }
    if !mseq.smooth {
        return bad("m-sequence is not smooth".into());
    }
    check_m_sequence(t, mseq).map_err(|e| PipelineError::HypothesisViolated(e.to_string()))?;
    if mseq.lambda > params.lambda_embed {
        return bad(format!("lambda {} exceeds {}", mseq.lambda, params.lambda_embed));
    }
    let n = t.n();
    let hn = h.n();
    if BigRational::from_integer(BigInt::from(n)) * &mseq.c1
        < BigRational::from_integer(BigInt::from(2 * hn))
    {
        return bad(format!("n = {n} is below 2h/c1"));
    }
    let c2 = mseq.c2.to_f64().unwrap_or(0.0);
    let strong = (1.0 - std::f64::consts::E * hn as f64 / (c2 * n as f64)).max(0.0).powi(hn as i32);
    if strong < 0.5 {
        return bad(format!("(1 - eh/(c2 n))^h = {strong} is below 1/2"));
    }
    Ok(())
}

/// Tries to place `H` star by star in the order of its centers.
///
/// Each leaf block `T_i` is cut, along its transitive order, into `w_i`
/// subchunks of `⌊|T_i|/w_i⌋` vertices, one per leaf. The transitive center
/// tuples with the prescribed number of vertices in each linear set are
/// enumerated. For a star with center `c`, the candidates are the values at
/// `c` across the live tuples, smallest first. A candidate `v` is in the star
/// setting if every leaf's subchunk has a vertex on the correct side of `v`;
/// the first such `v` whose placement leaves every tuple set and subchunk
/// nonempty is fixed together with the smallest fitting leaves, the other
/// subchunks shrink to the vertices agreeing with the placed ones, and the
/// tuples are filtered likewise. If no candidate is in the star setting, the
/// candidates are grouped by their first leaf without a fitting vertex; the
/// largest group is one-way adjacent to that leaf's subchunk, and a transitive
/// set of the group (from `extractor`) merged with the subchunk is returned if
/// it reaches `⌈n^epsilon⌉`.
pub fn embed_galaxy_or_transitive<R: Real>(
    t: &Tournament,
    h: &Tournament,
    mseq: &MSequence<R>,
    params: &PipelineParams<R>,
    extractor: &mut Extractor<'_>,
    cfg: &EmbedConfig,
) -> Result<FindResult, PipelineError> {
    hypotheses(t, h, mseq, params)?;
    let layout = &params.layout;
    let mut trace = Trace::default();

    let mut sub: Vec<Option<Vec<usize>>> = vec![None; h.n()];
    let mut centers: Vec<(usize, usize)> = Vec::new();
    for (bi, block) in layout.blocks.iter().enumerate() {
        match block {
            LayoutBlock::Leaves(ls) => {
                let order = transitive_order(t, mseq.sets[bi].as_slice()).ok_or_else(|| {
                    PipelineError::HypothesisViolated(format!("set {bi} is not transitive"))
                })?;
                let q = order.len() / ls.len();
                if q == 0 {
                    return Err(PipelineError::Shortfall(format!("set {bi} has no room for subchunks")));
                }
                for (j, &l) in ls.iter().enumerate() {
                    sub[l] = Some(order[j * q..(j + 1) * q].to_vec());
                }
            }
            LayoutBlock::Centers(cs) => centers.extend(cs.iter().map(|&c| (c, bi))),
        }
    }
    let mut tuples = enumerate_tuples(t, h, &centers, mseq, cfg.tuple_budget)?;
    trace.record(
        "embed",
        &[
            ("n", t.n().to_string()),
            ("t", layout.t().to_string()),
            ("stars", layout.stars.len().to_string()),
            ("tuples", tuples.len().to_string()),
        ],
    );
    let slot: BTreeMap<usize, usize> = centers.iter().enumerate().map(|(i, &(c, _))| (c, i)).collect();
    let mut map = vec![usize::MAX; h.n()];

    for (c, leaves) in &layout.stars {
        let a = slot[c];
        if tuples.is_empty() {
            return Err(PipelineError::Shortfall("no center tuple left".into()));
        }
        let mut cands: Vec<usize> = tuples.iter().map(|tu| tu[a]).collect();
        cands.sort_unstable();
        cands.dedup();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut any_star = false;
        let mut chosen = None;
        for &v in &cands {
            match star_at(t, h, *c, leaves, v, &sub) {
                Err(li) => groups.entry(li).or_default().push(v),
                Ok(None) => any_star = true,
                Ok(Some(ys)) => {
                    any_star = true;
                    let placed: Vec<(usize, usize)> = std::iter::once((*c, v))
                        .chain(leaves.iter().copied().zip(ys))
                        .collect();
                    let kept: Vec<Vec<usize>> = tuples
                        .iter()
                        .filter(|tu| tu[a] == v && agrees(t, h, &placed, &centers, tu))
                        .cloned()
                        .collect();
                    let shrunk = shrink(t, h, &placed, &sub);
                    if !kept.is_empty() && shrunk.iter().flatten().all(|s| !s.is_empty()) {
                        chosen = Some((placed, kept, shrunk));
                        break;
                    }
                }
            }
        }
        match chosen {
            Some((placed, kept, shrunk)) => {
                for &(p, x) in &placed {
                    map[p] = x;
                }
                tuples = kept;
                sub = shrunk;
                trace.record(
                    "embed_star",
                    &[
                        ("center", c.to_string()),
                        ("vertex", map[*c].to_string()),
                        ("leaves", leaves.len().to_string()),
                        ("tuples", tuples.len().to_string()),
                    ],
                );
            }
            None if any_star => {
                return Err(PipelineError::Shortfall(format!(
                    "star at {c} fits but empties the remaining structure"
                )))
            }
            None => {
                let (&li, group) = groups
                    .iter()
                    .fold(None, |best: Option<(&usize, &Vec<usize>)>, (k, g)| match best {
                        Some((_, b)) if b.len() >= g.len() => best,
                        _ => Some((k, g)),
                    })
                    .expect("some candidate");
                let leaf = leaves[li];
                let chunk = sub[leaf].clone().expect("leaf has a subchunk");
                let gbits = Bits::from_indices(t.n(), group.iter().copied());
                let r = extractor(t, &gbits)?;
                if r.iter().any(|&v| !gbits.contains(v)) {
                    return Err(PipelineError::PreconditionViolated(
                        "extractor left its candidate set".into(),
                    ));
                }
                let order: Vec<usize> = if h.beats(*c, leaf) {
                    chunk.iter().chain(r.iter()).copied().collect()
                } else {
                    r.iter().chain(chunk.iter()).copied().collect()
                };
                let w = TransitiveWitness::new(order, Method::Merge);
                if !w.verify(t) {
                    return Err(PipelineError::Shortfall("merged set is not transitive".into()));
                }
                let need = R::of(t.n())
                    .powf(params.epsilon)
                    .ceil()
                    .to_usize()
                    .unwrap_or(usize::MAX);
                trace.record(
                    "embed_nonstar",
                    &[
                        ("center", c.to_string()),
                        ("leaf", leaf.to_string()),
                        ("group", group.len().to_string()),
                        ("subchunk", chunk.len().to_string()),
                        ("linear_part", r.len().to_string()),
                        ("size", w.size().to_string()),
                        ("need", need.to_string()),
                    ],
                );
                if w.size() < need {
                    return Err(PipelineError::Shortfall(format!(
                        "merged set has {} vertices, below {need}",
                        w.size()
                    )));
                }
                return Ok(FindResult {
                    outcome: Outcome::Witness(w),
                    trace,
                });
            }
        }
    }

    for &l in &layout.free_leaves {
        let y = sub[l]
            .as_ref()
            .and_then(|s| s.first().copied())
            .ok_or_else(|| PipelineError::Shortfall(format!("no vertex left for leaf {l}")))?;
        map[l] = y;
        sub = shrink(t, h, &[(l, y)], &sub);
    }
    let e = Embedding { map };
    if !e.verify(t, h) {
        return Err(PipelineError::Shortfall("assembled map is not an embedding".into()));
    }
    trace.record("embed_done", &[("image", format!("{:?}", e.map))]);
    Ok(FindResult {
        outcome: Outcome::Embedding(e),
        trace,
    })
}

/// `Err(i)`: leaf `i` has no vertex on the required side of `v`.
/// `Ok(None)`: every leaf has one, but no mutually consistent choice.
fn star_at(
    t: &Tournament,
    h: &Tournament,
    c: usize,
    leaves: &[usize],
    v: usize,
    sub: &[Option<Vec<usize>>],
) -> Result<Option<Vec<usize>>, usize> {
    let fitting: Vec<Vec<usize>> = leaves
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let f: Vec<usize> = sub[l]
                .as_ref()
                .expect("leaf has a subchunk")
                .iter()
                .copied()
                .filter(|&y| t.beats(v, y) == h.beats(c, l))
                .collect();
            if f.is_empty() {
                Err(i)
            } else {
                Ok(f)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut ys: Vec<usize> = Vec::with_capacity(leaves.len());
    for (i, f) in fitting.iter().enumerate() {
        let pick = f.iter().copied().find(|&y| {
            ys.iter()
                .enumerate()
                .all(|(j, &x)| t.beats(x, y) == h.beats(leaves[j], leaves[i]))
        });
        match pick {
            Some(y) => ys.push(y),
            None => return Ok(None),
        }
    }
    Ok(Some(ys))
}

fn agrees(
    t: &Tournament,
    h: &Tournament,
    placed: &[(usize, usize)],
    centers: &[(usize, usize)],
    tuple: &[usize],
) -> bool {
    centers.iter().zip(tuple).all(|(&(q, _), &z)| {
        placed
            .iter()
            .all(|&(p, x)| p == q || t.beats(x, z) == h.beats(p, q))
    })
}

/// Drops the subchunks of placed vertices and keeps, in every other subchunk,
/// the vertices agreeing with all placed ones.
fn shrink(
    t: &Tournament,
    h: &Tournament,
    placed: &[(usize, usize)],
    sub: &[Option<Vec<usize>>],
) -> Vec<Option<Vec<usize>>> {
    sub.iter()
        .enumerate()
        .map(|(q, s)| {
            if placed.iter().any(|&(p, _)| p == q) {
                return None;
            }
            s.as_ref().map(|s| {
                s.iter()
                    .copied()
                    .filter(|&y| placed.iter().all(|&(p, x)| t.beats(x, y) == h.beats(p, q)))
                    .collect()
            })
        })
        .collect()
}

/// Every tuple with the `i`-th center drawn from its linear set and the tuple
/// inducing what the centers induce in `h`, in lexicographic order.
fn enumerate_tuples<R: Real>(
    t: &Tournament,
    h: &Tournament,
    centers: &[(usize, usize)],
    mseq: &MSequence<R>,
    budget: usize,
) -> Result<Vec<Vec<usize>>, PipelineError> {
    fn go<R: Real>(
        t: &Tournament,
        h: &Tournament,
        centers: &[(usize, usize)],
        mseq: &MSequence<R>,
        budget: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), PipelineError> {
        let b = cur.len();
        if b == centers.len() {
            if out.len() == budget {
                return Err(PipelineError::BudgetExceeded(budget));
            }
            out.push(cur.clone());
            return Ok(());
        }
        let (q, block) = centers[b];
        for v in mseq.sets[block].iter() {
            let fits = cur
                .iter()
                .enumerate()
                .all(|(a, &x)| x != v && t.beats(x, v) == h.beats(centers[a].0, q));
            if fits {
                cur.push(v);
                go(t, h, centers, mseq, budget, cur, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(t, h, centers, mseq, budget, &mut Vec::new(), &mut out)?;
    Ok(out)
}
