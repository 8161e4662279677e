//! From a smooth `l`-sequence of length `2t+1` to a smooth `m`-sequence: the
//! even-indexed (1-based) sets are replaced by well-placed transitive chunks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::bits::Bits;
use crate::density::rational;
use crate::scalar::{ln_rational, Real};
use crate::tournament::Tournament;
use crate::transitive::transitive_order;

use super::sequences::{
    check_l_sequence, check_m_sequence, dense, prune, to_bits, to_sets, LSequence, MSequence,
};
use super::PipelineError;

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Extractor contract: given the host and a candidate set, return a transitive
/// subset of the candidates in transitive order.
pub type Extractor<'a> = dyn FnMut(&Tournament, &Bits) -> Result<Vec<usize>, PipelineError> + 'a;

/// Turns a smooth `(c, lambda0)`-`l`-sequence `(L_1..L_{2t+1})` into a smooth
/// `(1/4, c/2, 64 t^2 (t+1) lambda0, epsilon)`-`m`-sequence.
///
/// Each `L_{2i}` is carved into transitive chunks of `⌈(cn/2)^epsilon⌉` vertices
/// by `extractor` while half of it remains; chunks that are `4t`-bad against
/// another set are dropped; one chunk per slot is picked so that all picked
/// chunks are pairwise `(1 - 8(t+1) t lambda0)`-dense (first such choice in
/// index order, with backtracking); a final per-vertex pruning makes the result
/// smooth.
pub fn l_to_m_sequence<R: Real>(
    t: &Tournament,
    seq: &LSequence,
    epsilon: R,
    extractor: &mut Extractor<'_>,
) -> Result<MSequence<R>, PipelineError> {
    let bad = |m: String| Err(PipelineError::PreconditionViolated(m));
    if seq.sets.len() % 2 == 0 {
        return bad(format!("length {} is not odd", seq.sets.len()));
    }
    if !seq.smooth {
        return bad("input sequence must be smooth".into());
    }
    check_l_sequence(t, seq).map_err(|e| PipelineError::PreconditionViolated(e.to_string()))?;
    let tt = seq.sets.len() / 2;
    let lambda0 = &seq.lambda;
    let c = &seq.c;
    if c.is_zero() {
        return bad("c must be positive".into());
    }
    let eps = epsilon.to_f64().unwrap_or(f64::NAN);
    let cap = std::f64::consts::LN_2 / ln_rational(&(int(2) / c));
    if !(eps > 0.0 && eps <= cap) {
        return bad(format!("epsilon {eps} outside (0, ln 2 / ln(2/c)] = (0, {cap}]"));
    }
    let out_lambda = int(64 * tt * tt * (tt + 1)) * lambda0;
    if tt == 0 {
        let m = MSequence {
            sets: seq.sets.clone(),
            c1: rational(1, 4),
            c2: c / int(2),
            lambda: out_lambda,
            epsilon,
            smooth: true,
        };
        check_m_sequence(t, &m)?;
        return Ok(m);
    }

    let n = t.n();
    let base = c * int(n) / int(2);
    let target = R::lit(base.to_f64().unwrap_or(f64::MAX))
        .powf(epsilon)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);
    let original = to_bits(t, &seq.sets);

    let mut chunks: Vec<Vec<Bits>> = Vec::with_capacity(tt);
    for slot in 0..tt {
        let l = &original[2 * slot + 1];
        let total = l.count();
        let mut rest = l.clone();
        let mut got = Vec::new();
        while 2 * rest.count() >= total && rest.count() >= target {
            let order = extractor(t, &rest)?;
            if order.iter().any(|&v| !rest.contains(v)) || transitive_order(t, &order).is_none() {
                return bad("extractor returned a non-transitive or foreign set".into());
            }
            if order.len() < target {
                return Err(PipelineError::ExtractorTooWeak {
                    got: order.len(),
                    need: target,
                });
            }
            let chunk = Bits::from_indices(n, order[..target].iter().copied());
            rest.difference_with(&chunk);
            got.push(chunk);
        }
        if got.is_empty() {
            return Err(PipelineError::Shortfall(format!("slot {slot} yielded no chunk")));
        }
        chunks.push(got);
    }

    // the intermediate sequence: original linear sets, merged chunks in the slots
    let mut merged = original.clone();
    for (slot, got) in chunks.iter().enumerate() {
        let mut u = Bits::new(n);
        for ch in got {
            u.union_with(ch);
        }
        merged[2 * slot + 1] = u;
    }
    let w = 4 * tt;
    let bad_slack = int(2 * w) * lambda0;
    let good: Vec<Vec<Bits>> = chunks
        .iter()
        .enumerate()
        .map(|(slot, got)| {
            let pos = 2 * slot + 1;
            got.iter()
                .filter(|ch| {
                    (0..merged.len()).filter(|&j| j != pos).all(|j| {
                        if j < pos {
                            dense(t, &merged[j], ch, &bad_slack)
                        } else {
                            dense(t, ch, &merged[j], &bad_slack)
                        }
                    })
                })
                .cloned()
                .collect()
        })
        .collect();
    if let Some(slot) = good.iter().position(|g| g.is_empty()) {
        return Err(PipelineError::Shortfall(format!("slot {slot} has no good chunk")));
    }

    let lambda1 = int(8 * tt * (tt + 1)) * lambda0;
    let picked = pick_clique(t, &good, &lambda1)
        .ok_or_else(|| PipelineError::Shortfall("no compatible chunk per slot".into()))?;
    let mut f = original;
    for (slot, &idx) in picked.iter().enumerate() {
        f[2 * slot + 1] = good[slot][idx].clone();
    }
    let kept = prune(t, &f, &(int(w) * &lambda1));
    let m = MSequence {
        sets: to_sets(&kept),
        c1: rational(1, 4),
        c2: c / int(2),
        lambda: out_lambda,
        epsilon,
        smooth: true,
    };
    if let Some(i) = kept.iter().position(|s| s.is_empty()) {
        return Err(PipelineError::Shortfall(format!("pruning emptied set {i}")));
    }
    check_m_sequence(t, &m)?;
    Ok(m)
}

/// One chunk per slot, pairwise dense at slack `lambda1`; depth-first in
/// index order.
fn pick_clique(t: &Tournament, good: &[Vec<Bits>], lambda1: &BigRational) -> Option<Vec<usize>> {
    fn go(
        t: &Tournament,
        good: &[Vec<Bits>],
        lambda1: &BigRational,
        chosen: &mut Vec<usize>,
    ) -> bool {
        let slot = chosen.len();
        if slot == good.len() {
            return true;
        }
        for (idx, ch) in good[slot].iter().enumerate() {
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(s, &i)| dense(t, &good[s][i], ch, lambda1));
            if ok {
                chosen.push(idx);
                if go(t, good, lambda1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    go(t, good, lambda1, &mut chosen).then_some(chosen)
}
