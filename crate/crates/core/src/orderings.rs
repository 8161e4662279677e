//! Backward-edge graphs of vertex orderings, star and galaxy orderings,
//! galaxy recognition and construction.
//!
//! Under an ordering, the edge between `u` and `v` is *backward* when it points
//! from the later vertex to the earlier one. A *star ordering* makes every
//! component of the backward graph a star `K_{1,m}` whose center is its left
//! point (left star) or its right point (right star), or a singleton. A *galaxy
//! ordering* additionally puts no center strictly between two leaves of another
//! star.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bits::Bits;
use crate::tournament::Tournament;

/// Largest pattern size for which orderings are searched exhaustively.
pub const DEFAULT_ORDERING_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("not a permutation of 0..{0}")]
    BadPermutation(usize),
    #[error("{n} vertices exceeds the ordering-search cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("galaxy spec rejected: {0}")]
    SpecViolatesGalaxyCondition(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// `perm[i]` is the vertex at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    perm: Vec<usize>,
}

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Self, OrderingError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n || seen[v] {
                return Err(OrderingError::BadPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Ordering { perm })
    }

    pub fn identity(n: usize) -> Self {
        Ordering {
            perm: (0..n).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `positions()[v]` is the position of vertex `v`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (i, &v) in self.perm.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        Ordering {
            perm: self.perm.iter().rev().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardGraph {
    /// Unordered pairs `(u, v)` with `u < v` as vertex labels.
    pub edges: Vec<(usize, usize)>,
    adj: Vec<Bits>,
}

impl BackwardGraph {
    pub fn neighbors(&self, v: usize) -> &Bits {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                for u in self.adj[comp[i]].iter() {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

pub fn backward_graph(t: &Tournament, ord: &Ordering) -> Result<BackwardGraph, OrderingError> {
    if ord.len() != t.n() {
        return Err(OrderingError::BadPermutation(t.n()));
    }
    let n = t.n();
    let mut adj = vec![Bits::new(n); n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (early, late) = (ord.perm[i], ord.perm[j]);
            if t.beats(late, early) {
                adj[early].insert(late);
                adj[late].insert(early);
                edges.push((early.min(late), early.max(late)));
            }
        }
    }
    edges.sort_unstable();
    Ok(BackwardGraph { edges, adj })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Center precedes all of its leaves.
    Left,
    /// Center follows all of its leaves.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Star {
    pub center: usize,
    /// Leaves in ordering position order.
    pub leaves: Vec<usize>,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Center,
    Leaf,
    Singleton,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalaxyDecomposition {
    pub ordering: Ordering,
    /// Listed by center position.
    pub stars: Vec<Star>,
    pub singletons: Vec<usize>,
    /// Sizes of maximal center runs `k_1..k_{t+1}` (singletons skipped).
    pub k: Vec<usize>,
    /// Sizes of maximal leaf runs `w_1..w_t`.
    pub w: Vec<usize>,
    pub g: usize,
    pub t: usize,
    pub regular: bool,
}

impl GalaxyDecomposition {
    pub fn h(&self) -> usize {
        self.ordering.len()
    }

    /// Role of every vertex, indexed by vertex label.
    pub fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Singleton; self.h()];
        for s in &self.stars {
            roles[s.center] = Role::Center;
            for &l in &s.leaves {
                roles[l] = Role::Leaf;
            }
        }
        roles
    }

    pub fn is_star(&self) -> bool {
        self.stars.len() == 1
    }
}

/// Star decomposition of `ord` if it is a galaxy ordering of `t`.
///
/// A `K_{1,1}` component may take either endpoint as center. Every such
/// component first becomes a right star (center = later vertex); only if that
/// violates the galaxy condition are the other assignments tried, in binary
/// counting order.
pub fn classify_ordering(t: &Tournament, ord: &Ordering) -> Option<GalaxyDecomposition> {
    let bg = backward_graph(t, ord).ok()?;
    let pos = ord.positions();
    let mut fixed: Vec<Star> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new(); // (earlier, later)
    let mut singletons = Vec::new();
    for comp in bg.components() {
        match comp.len() {
            1 => singletons.push(comp[0]),
            2 => {
                let (a, b) = (comp[0], comp[1]);
                pairs.push(if pos[a] < pos[b] { (a, b) } else { (b, a) });
            }
            m => {
                let edges: usize = comp.iter().map(|&v| bg.degree(v)).sum::<usize>() / 2;
                if edges != m - 1 {
                    return None;
                }
                let center = *comp.iter().find(|&&v| bg.degree(v) == m - 1)?;
                let mut leaves: Vec<usize> = comp.iter().copied().filter(|&v| v != center).collect();
                leaves.sort_by_key(|&v| pos[v]);
                let side = if leaves.iter().all(|&l| pos[l] > pos[center]) {
                    Side::Left
                } else if leaves.iter().all(|&l| pos[l] < pos[center]) {
                    Side::Right
                } else {
                    return None;
                };
                fixed.push(Star {
                    center,
                    leaves,
                    side,
                });
            }
        }
    }
    let choices: u64 = if pairs.len() >= 20 { 1 } else { 1u64 << pairs.len() };
    for mask in 0..choices {
        let mut stars = fixed.clone();
        for (i, &(early, late)) in pairs.iter().enumerate() {
            stars.push(if mask >> i & 1 == 0 {
                Star {
                    center: late,
                    leaves: vec![early],
                    side: Side::Right,
                }
            } else {
                Star {
                    center: early,
                    leaves: vec![late],
                    side: Side::Left,
                }
            });
        }
        if galaxy_condition(&stars, &pos) {
            stars.sort_by_key(|s| pos[s.center]);
            singletons.sort_by_key(|&v| pos[v]);
            return Some(decompose(ord, stars, singletons));
        }
    }
    None
}

fn galaxy_condition(stars: &[Star], pos: &[usize]) -> bool {
    stars.iter().enumerate().all(|(i, a)| {
        stars.iter().enumerate().all(|(j, b)| {
            if i == j || b.leaves.len() < 2 {
                return true;
            }
            let lo = b.leaves.iter().map(|&l| pos[l]).min().unwrap();
            let hi = b.leaves.iter().map(|&l| pos[l]).max().unwrap();
            !(lo < pos[a.center] && pos[a.center] < hi)
        })
    })
}

fn decompose(ord: &Ordering, stars: Vec<Star>, singletons: Vec<usize>) -> GalaxyDecomposition {
    let n = ord.len();
    let mut roles = vec![Role::Singleton; n];
    for s in &stars {
        roles[s.center] = Role::Center;
        for &l in &s.leaves {
            roles[l] = Role::Leaf;
        }
    }
    let mut k = vec![0];
    let mut w: Vec<usize> = Vec::new();
    let mut in_leaves = false;
    for &v in ord.perm() {
        match roles[v] {
            Role::Singleton => {}
            Role::Center => {
                if in_leaves {
                    k.push(0);
                    in_leaves = false;
                }
                *k.last_mut().unwrap() += 1;
            }
            Role::Leaf => {
                if !in_leaves {
                    w.push(0);
                    in_leaves = true;
                }
                *w.last_mut().unwrap() += 1;
            }
        }
    }
    if in_leaves {
        k.push(0);
    }
    GalaxyDecomposition {
        ordering: ord.clone(),
        g: stars.len(),
        t: w.len(),
        regular: singletons.is_empty(),
        stars,
        singletons,
        k,
        w,
    }
}

/// First galaxy ordering of `h` in lexicographic permutation order.
pub fn find_galaxy_ordering(h: &Tournament) -> Result<Option<GalaxyDecomposition>, OrderingError> {
    search_orderings(h, DEFAULT_ORDERING_CAP, false)
}

/// First galaxy ordering whose backward graph has exactly one nontrivial
/// component (all other vertices singletons).
pub fn find_star_ordering(h: &Tournament) -> Result<Option<GalaxyDecomposition>, OrderingError> {
    search_orderings(h, DEFAULT_ORDERING_CAP, true)
}

pub fn find_galaxy_ordering_capped(
    h: &Tournament,
    cap: usize,
) -> Result<Option<GalaxyDecomposition>, OrderingError> {
    search_orderings(h, cap, false)
}

fn search_orderings(
    h: &Tournament,
    cap: usize,
    single_star: bool,
) -> Result<Option<GalaxyDecomposition>, OrderingError> {
    let n = h.n();
    if n > cap {
        return Err(OrderingError::TooLarge { n, cap });
    }
    let mut s = Search {
        h,
        single_star,
        prefix: Vec::with_capacity(n),
        used: vec![false; n],
        adj: vec![Vec::new(); n],
        pos: vec![usize::MAX; n],
    };
    Ok(s.run())
}

struct Search<'a> {
    h: &'a Tournament,
    single_star: bool,
    prefix: Vec<usize>,
    used: Vec<bool>,
    adj: Vec<Vec<usize>>,
    pos: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self) -> Option<GalaxyDecomposition> {
        let n = self.h.n();
        if self.prefix.len() == n {
            let ord = Ordering::new(self.prefix.clone()).expect("valid permutation");
            let d = classify_ordering(self.h, &ord)?;
            return (!self.single_star || d.stars.len() == 1).then_some(d);
        }
        for x in 0..n {
            if self.used[x] {
                continue;
            }
            let back: Vec<usize> = self
                .prefix
                .iter()
                .copied()
                .filter(|&u| self.h.beats(x, u))
                .collect();
            self.pos[x] = self.prefix.len();
            self.prefix.push(x);
            self.used[x] = true;
            for &u in &back {
                self.adj[u].push(x);
                self.adj[x].push(u);
            }
            if self.prefix_viable() {
                if let Some(d) = self.run() {
                    return Some(d);
                }
            }
            for &u in &back {
                self.adj[u].pop();
            }
            self.adj[x].clear();
            self.used[x] = false;
            self.prefix.pop();
            self.pos[x] = usize::MAX;
        }
        None
    }

    /// Rejects prefixes whose violations survive any extension: an edge joining
    /// two vertices of degree >= 2 (not a star forest), a center with leaves on
    /// both sides, a center strictly inside another center's leaf span, or (in
    /// single-star mode) two nontrivial components.
    fn prefix_viable(&self) -> bool {
        let deg = |v: usize| self.adj[v].len();
        for &v in &self.prefix {
            if deg(v) >= 2 && self.adj[v].iter().any(|&u| deg(u) >= 2) {
                return false;
            }
        }
        let centers: Vec<usize> = self.prefix.iter().copied().filter(|&v| deg(v) >= 2).collect();
        for &c in &centers {
            let before = self.adj[c].iter().any(|&l| self.pos[l] < self.pos[c]);
            let after = self.adj[c].iter().any(|&l| self.pos[l] > self.pos[c]);
            if before && after {
                return false;
            }
            let lo = self.adj[c].iter().map(|&l| self.pos[l]).min().unwrap();
            let hi = self.adj[c].iter().map(|&l| self.pos[l]).max().unwrap();
            if centers
                .iter()
                .any(|&d| d != c && lo < self.pos[d] && self.pos[d] < hi)
            {
                return false;
            }
        }
        if self.single_star {
            let edges: usize = self.prefix.iter().map(|&v| deg(v)).sum::<usize>() / 2;
            let touched = self.prefix.iter().filter(|&&v| deg(v) > 0).count();
            // a star forest with c nontrivial components has touched - c edges
            if edges > 0 && touched - edges > 1 {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecToken {
    Center(u32),
    Leaf(u32),
    Singleton,
}

/// A galaxy described position by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GalaxySpec {
    pub tokens: Vec<SpecToken>,
}

impl GalaxySpec {
    pub fn parse(text: &str) -> Result<Self, OrderingError> {
        let mut tokens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || OrderingError::Parse {
                line: i + 1,
                msg: format!("expected `C<id>`, `L<id>` or `S`, found {line:?}"),
            };
            let tok = match line.as_bytes()[0] {
                b'S' if line.len() == 1 => SpecToken::Singleton,
                b'C' => SpecToken::Center(line[1..].parse().map_err(|_| bad())?),
                b'L' => SpecToken::Leaf(line[1..].parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            };
            tokens.push(tok);
        }
        if tokens.is_empty() {
            return Err(OrderingError::Parse {
                line: 1,
                msg: "empty galaxy spec".into(),
            });
        }
        Ok(GalaxySpec { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Star structure by id: `(center position, leaf positions)`.
    pub fn stars(&self) -> Result<BTreeMap<u32, (usize, Vec<usize>)>, OrderingError> {
        let viol = |m: String| OrderingError::SpecViolatesGalaxyCondition(m);
        let mut centers: BTreeMap<u32, usize> = BTreeMap::new();
        let mut leaves: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (p, tok) in self.tokens.iter().enumerate() {
            match *tok {
                SpecToken::Center(id) => {
                    if centers.insert(id, p).is_some() {
                        return Err(viol(format!("star {id} has two centers")));
                    }
                }
                SpecToken::Leaf(id) => leaves.entry(id).or_default().push(p),
                SpecToken::Singleton => {}
            }
        }
        let mut out = BTreeMap::new();
        for (&id, &c) in &centers {
            let ls = leaves.remove(&id).unwrap_or_default();
            if ls.is_empty() {
                return Err(viol(format!("star {id} has no leaves")));
            }
            if !(ls.iter().all(|&l| l > c) || ls.iter().all(|&l| l < c)) {
                return Err(viol(format!("center of star {id} lies between its own leaves")));
            }
            out.insert(id, (c, ls));
        }
        if let Some((&id, _)) = leaves.iter().next() {
            return Err(viol(format!("star {id} has leaves but no center")));
        }
        for (&a, (ca, _)) in &out {
            for (&b, (_, lb)) in &out {
                if a != b && lb.first().unwrap() < ca && ca < lb.last().unwrap() {
                    return Err(viol(format!(
                        "center of star {a} lies between leaves of star {b}"
                    )));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GalaxySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for tok in &self.tokens {
            match tok {
                SpecToken::Center(id) => writeln!(f, "C{id}")?,
                SpecToken::Leaf(id) => writeln!(f, "L{id}")?,
                SpecToken::Singleton => writeln!(f, "S")?,
            }
        }
        Ok(())
    }
}

/// The tournament on positions `0..len` whose backward edges under the identity
/// ordering are exactly the center–leaf pairs of `spec`.
pub fn build_galaxy(spec: &GalaxySpec) -> Result<Tournament, OrderingError> {
    let stars = spec.stars()?;
    let n = spec.len();
    let mut back = vec![Bits::new(n); n];
    for (c, ls) in stars.values() {
        for &l in ls {
            back[*c].insert(l);
            back[l].insert(*c);
        }
    }
    Ok(Tournament::from_fn(n, |i, j| !back[i].contains(j)))
}
