//! Tournament representation, generators, induced subtournaments, substitution
//! and the `.trn` text format.

use std::fmt;

use rand_core::Rng;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("pair {{{0}, {1}}} has no orientation")]
    MissingPair(usize, usize),
    #[error("pair {{{0}, {1}}} is oriented more than once")]
    DuplicatePair(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a {n}-vertex tournament")]
    OutOfRange { vertex: usize, n: usize },
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex sets overlap")]
    Overlap,
    #[error("expected {expected} parts, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("a tournament needs at least one vertex")]
    NoVertices,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A set of vertices of some tournament, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn range(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn from_bits(bits: &Bits) -> Self {
        VertexSet(bits.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn to_bits(&self, n: usize) -> Bits {
        Bits::from_indices(n, self.iter())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// A complete oriented graph on `0..n`. Row `i` of `out` is the out-neighbourhood of `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    out: Vec<Bits>,
    inn: Vec<Bits>,
}

impl Tournament {
    /// Builds a tournament from an orientation rule queried once per pair `i < j`;
    /// `forward(i, j)` true means `i -> j`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = vec![Bits::new(n); n];
        let mut inn = vec![Bits::new(n); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if forward(i, j) {
                    out[i].insert(j);
                    inn[j].insert(i);
                } else {
                    out[j].insert(i);
                    inn[i].insert(j);
                }
            }
        }
        Tournament { n, out, inn }
    }

    /// Validating constructor: every unordered pair must appear exactly once.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Self, CoreError> {
        if n == 0 {
            return Err(CoreError::NoVertices);
        }
        let mut seen = vec![Bits::new(n); n];
        let mut fwd = vec![Bits::new(n); n];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(CoreError::OutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(CoreError::SelfLoop(a));
            }
            let (lo, hi) = (a.min(b), a.max(b));
            if seen[lo].contains(hi) {
                return Err(CoreError::DuplicatePair(lo, hi));
            }
            seen[lo].insert(hi);
            if a < b {
                fwd[lo].insert(hi);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !seen[i].contains(j) {
                    return Err(CoreError::MissingPair(i, j));
                }
            }
        }
        Ok(Tournament::from_fn(n, |i, j| fwd[i].contains(j)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// True iff the edge `i -> j` is present.
    #[inline]
    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.out[i].contains(j)
    }

    #[inline]
    pub fn out_row(&self, v: usize) -> &Bits {
        &self.out[v]
    }

    #[inline]
    pub fn in_row(&self, v: usize) -> &Bits {
        &self.inn[v]
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.out[v].count()
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.inn[v].count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.out[i].iter().map(move |j| (i, j)))
            .collect()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::range(self.n)
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<(), CoreError> {
        match s.max() {
            Some(v) if v >= self.n => Err(CoreError::OutOfRange { vertex: v, n: self.n }),
            _ => Ok(()),
        }
    }

    /// Subtournament on `s`, relabelled monotonically. The returned map sends
    /// new labels back to original vertices.
    pub fn induced(&self, s: &VertexSet) -> Result<(Tournament, Vec<usize>), CoreError> {
        if s.is_empty() {
            return Err(CoreError::EmptySet);
        }
        self.check_set(s)?;
        let map = s.as_slice().to_vec();
        let t = Tournament::from_fn(map.len(), |a, b| self.beats(map[a], map[b]));
        Ok((t, map))
    }

    /// Relabels vertices: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Tournament {
        Tournament::from_fn(perm.len(), |a, b| self.beats(perm[a], perm[b]))
    }

    /// Reverses every edge.
    pub fn reversed(&self) -> Tournament {
        Tournament::from_fn(self.n, |i, j| self.beats(j, i))
    }

    /// Number of edges from `x` into `y` (bitsets over this tournament's vertices).
    pub fn edges_between(&self, x: &Bits, y: &Bits) -> u64 {
        x.iter().map(|v| self.out[v].intersection_count(y) as u64).sum()
    }

    pub fn to_trn(&self) -> String {
        let mut s = String::with_capacity(16 + self.n * (self.n + 1));
        s.push_str("trn v1\n");
        s.push_str(&self.n.to_string());
        s.push('\n');
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.beats(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_trn(text: &str) -> Result<Tournament, CoreError> {
        let perr = |line: usize, msg: &str| CoreError::Parse {
            line,
            msg: msg.to_string(),
        };
        if !text.ends_with('\n') {
            return Err(perr(0, "file must end with a newline"));
        }
        let lines: Vec<&str> = text[..text.len() - 1].split('\n').collect();
        if lines.first() != Some(&"trn v1") {
            return Err(perr(1, "expected header `trn v1`"));
        }
        let n_line = lines.get(1).ok_or_else(|| perr(2, "missing vertex count"))?;
        if n_line.is_empty() || !n_line.bytes().all(|b| b.is_ascii_digit()) {
            return Err(perr(2, "vertex count must be a decimal integer"));
        }
        let n: usize = n_line.parse().map_err(|_| perr(2, "bad vertex count"))?;
        if n == 0 {
            return Err(perr(2, "vertex count must be positive"));
        }
        if lines.len() != n + 2 {
            return Err(perr(
                lines.len().min(n + 2) + 1,
                &format!("expected {n} matrix rows, found {}", lines.len() - 2),
            ));
        }
        let rows: Vec<&[u8]> = lines[2..].iter().map(|l| l.as_bytes()).collect();
        for (i, row) in rows.iter().enumerate() {
            let line = i + 3;
            if row.len() != n {
                return Err(perr(line, &format!("row must have exactly {n} characters")));
            }
            if let Some(bad) = row.iter().find(|&&c| c != b'0' && c != b'1') {
                return Err(perr(line, &format!("unexpected character {:?}", *bad as char)));
            }
            if row[i] != b'0' {
                return Err(perr(line, "diagonal entry must be 0"));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (rows[i][j] == b'1') == (rows[j][i] == b'1') {
                    return Err(perr(
                        i + 3,
                        &format!("entries ({i},{j}) and ({j},{i}) must sum to 1"),
                    ));
                }
            }
        }
        Ok(Tournament::from_fn(n, |i, j| rows[i][j] == b'1'))
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tournament(n={})", self.n)?;
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if self.beats(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// The transitive tournament with `i -> j` for all `i < j`.
pub fn gen_transitive(n: usize) -> Tournament {
    Tournament::from_fn(n, |_, _| true)
}

/// The five-vertex tournament with `i -> i+1` and `i -> i+2` (mod 5).
pub fn gen_c5() -> Tournament {
    Tournament::from_fn(5, |i, j| matches!((j + 5 - i) % 5, 1 | 2))
}

/// Uniformly random tournament.
///
/// The generator is SplitMix64 (increment `0x9e3779b97f4a7c15`, output mixing
/// multipliers `0xbf58476d1ce4e5b9` and `0x94d049bb133111eb`), with its state
/// initialised to `seed` verbatim. Pairs `(i, j)`, `i < j`, are visited in
/// lexicographic order and each consumes one 64-bit output; the pair is
/// oriented `i -> j` iff the output's most significant bit is 1.
pub fn gen_random(n: usize, seed: u64) -> Tournament {
    let mut rng = SplitMix64::from_seed(seed.to_le_bytes());
    Tournament::from_fn(n, |_, _| rng.next_u64() >> 63 == 1)
}

/// Replaces vertex `i` of `h` by `parts[i]`. Returns the result together with the
/// block index of every output vertex; block `i` occupies a contiguous label range.
pub fn substitute(
    h: &Tournament,
    parts: &[Tournament],
) -> Result<(Tournament, Vec<usize>), CoreError> {
    if parts.len() != h.n() {
        return Err(CoreError::ArityMismatch {
            expected: h.n(),
            got: parts.len(),
        });
    }
    let mut block = Vec::new();
    let mut local = Vec::new();
    for (b, p) in parts.iter().enumerate() {
        for v in 0..p.n() {
            block.push(b);
            local.push(v);
        }
    }
    let t = Tournament::from_fn(block.len(), |a, b| {
        if block[a] == block[b] {
            parts[block[a]].beats(local[a], local[b])
        } else {
            h.beats(block[a], block[b])
        }
    });
    Ok((t, block))
}
