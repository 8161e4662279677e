//! Smooth `l`-sequences by doubling: split into `h` chunks, get a dense pair
//! `(X, Y)`, harvest half-length sequences from each side, join the best
//! compatible pair, smooth.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::density::{at_least_fraction, Density};
use crate::structure::Embedding;
use crate::tournament::Tournament;

use super::dense_pair::{dense_pair_bits, DensePairBits};
use super::sequences::{check_l_sequence, is_smooth, prune, to_sets, LSequence};
use super::trace::Trace;
use super::PipelineError;

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn ceil_log2(u: usize) -> usize {
    if u <= 1 {
        0
    } else {
        (usize::BITS - (u - 1).leading_zeros()) as usize
    }
}

/// `(lambda^h / (4^(h+3) h^2 u^h ⌈log2 u⌉^(2h)))^⌈log2 u⌉`, exactly; `1` for `u = 1`.
pub fn lseq_constant(h: usize, u: usize, lambda: &BigRational) -> BigRational {
    let lg = ceil_log2(u);
    if lg == 0 {
        return BigRational::one();
    }
    let den = num_traits::pow(int(4), h + 3)
        * int(h * h)
        * num_traits::pow(int(u), h)
        * num_traits::pow(int(lg), 2 * h);
    num_traits::pow(num_traits::pow(lambda.clone(), h) / den, lg)
}

/// A smooth `(c, lambda)`-`l`-sequence of length `u` in the `h`-free `t`.
///
/// `c` defaults to [`lseq_constant`]; inputs with `|T| < 2h/c` are rejected as
/// `TooSmall`. The construction itself does not depend on `c`; the result is
/// checked against it before returning.
pub fn find_l_sequence(
    t: &Tournament,
    h: &Tournament,
    u: usize,
    lambda: &BigRational,
    c: Option<&BigRational>,
) -> Result<LSequence, PipelineError> {
    find_l_sequence_traced(t, h, u, lambda, c, &mut Trace::default())
}

pub fn find_l_sequence_traced(
    t: &Tournament,
    h: &Tournament,
    u: usize,
    lambda: &BigRational,
    c: Option<&BigRational>,
    trace: &mut Trace,
) -> Result<LSequence, PipelineError> {
    if u == 0 {
        return Err(PipelineError::PreconditionViolated("length must be positive".into()));
    }
    if *lambda <= BigRational::zero() || *lambda >= BigRational::one() {
        return Err(PipelineError::PreconditionViolated("lambda must lie in (0, 1)".into()));
    }
    let c = c.cloned().unwrap_or_else(|| lseq_constant(h.n(), u, lambda));
    if c <= BigRational::zero() || c > BigRational::one() {
        return Err(PipelineError::PreconditionViolated("c must lie in (0, 1]".into()));
    }
    let need = int(2 * h.n()) / &c;
    if int(t.n()) < need {
        return Err(PipelineError::TooSmall {
            n: t.n(),
            need: need.ceil().to_integer(),
        });
    }
    let u2 = u.next_power_of_two();
    // the max-recursion on lambda_b for the record: lambda_2 at the top level
    // and lambda_b = max(4 lambda_2 (b-1)^2, lambda_{b-1})
    let lg = ceil_log2(u2);
    if lg > 0 {
        let lambda2 = lambda / (int(16 * u2) * int(lg * lg));
        let mut lambda_b = BigRational::zero();
        let mut steps = Vec::new();
        for b in 1..=lg {
            let a = int(4 * (b - 1) * (b - 1)) * &lambda2;
            steps.push(format!("{}|{}", a, lambda_b));
            lambda_b = a.max(lambda_b);
        }
        trace.record(
            "lseq",
            &[
                ("n", t.n().to_string()),
                ("u", u.to_string()),
                ("lambda", lambda.to_string()),
                ("lambda2", lambda2.to_string()),
                ("lambda_b_operands", steps.join(",")),
                ("lambda_b", lambda_b.to_string()),
            ],
        );
    }
    let mut sets = build(t, h, &Bits::full(t.n()), u2, lambda, trace)?;
    sets.truncate(u);
    for (i, s) in sets.iter().enumerate() {
        if !at_least_fraction(s.count() as u64, t.n() as u64, &c) {
            return Err(PipelineError::Shortfall(format!(
                "set {i} has {} vertices, below c|T|",
                s.count()
            )));
        }
    }
    let seq = LSequence {
        sets: to_sets(&sets),
        c,
        lambda: lambda.clone(),
        smooth: true,
    };
    check_l_sequence(t, &seq)?;
    Ok(seq)
}

fn build(
    t: &Tournament,
    h: &Tournament,
    univ: &Bits,
    u: usize,
    lambda: &BigRational,
    trace: &mut Trace,
) -> Result<Vec<Bits>, PipelineError> {
    if u == 1 {
        return Ok(vec![univ.clone()]);
    }
    let m = univ.count();
    let hn = h.n();
    if m < 2 * hn {
        return Err(PipelineError::Shortfall(format!(
            "{m} vertices cannot be cut into {hn} chunks"
        )));
    }
    let q = m / hn;
    let members = univ.to_vec();
    let chunks: Vec<Bits> = (0..hn)
        .map(|i| Bits::from_indices(t.n(), members[i * q..(i + 1) * q].iter().copied()))
        .collect();
    let lg = ceil_log2(u);
    let lambda2 = lambda / (int(16 * u) * int(lg * lg));
    let (x, y) = match dense_pair_bits(t, h, chunks, &lambda2) {
        DensePairBits::Embedding(map) => return Err(PipelineError::FoundH(Embedding { map })),
        DensePairBits::Pair(x, y) => (x, y),
    };
    let inner = lambda / int(4 * (u - 1));
    let xs = harvest(t, h, &x, u / 2, &inner, trace)?;
    let ys = harvest(t, h, &y, u / 2, &inner, trace)?;
    let mut best: Option<(Density, usize, usize)> = None;
    for (i, a) in xs.iter().enumerate() {
        for (j, b) in ys.iter().enumerate() {
            let worst = a
                .iter()
                .flat_map(|p| b.iter().map(move |q| (p, q)))
                .map(|(p, q)| {
                    Density::from_counts(t.edges_between(p, q), (p.count() * q.count()) as u64)
                })
                .min()
                .expect("nonempty sequences");
            if best.as_ref().is_none_or(|(d, _, _)| worst > *d) {
                best = Some((worst, i, j));
            }
        }
    }
    let Some((worst, i, j)) = best else {
        return Err(PipelineError::Shortfall("one side yielded no sequence".into()));
    };
    if !worst.at_least_one_minus(&inner) {
        return Err(PipelineError::Shortfall("no pair of half-sequences is dense enough".into()));
    }
    let joined: Vec<Bits> = xs[i].iter().chain(ys[j].iter()).cloned().collect();
    let w = 2 * (u - 1);
    let kept = prune(t, &joined, &(&inner * int(w)));
    if kept.iter().any(|s| s.is_empty()) || !is_smooth(t, &kept, lambda) {
        return Err(PipelineError::Shortfall("smoothing emptied or failed".into()));
    }
    trace.record(
        "lseq_level",
        &[
            ("n", m.to_string()),
            ("u", u.to_string()),
            ("x", x.count().to_string()),
            ("y", y.count().to_string()),
            ("x_sequences", xs.len().to_string()),
            ("y_sequences", ys.len().to_string()),
            ("pair", format!("{i},{j}")),
            ("sizes", kept.iter().map(|s| s.count().to_string()).collect::<Vec<_>>().join(",")),
        ],
    );
    Ok(kept)
}

/// Repeatedly extracts length-`u` sequences from what is left of `set` while at
/// least half of it remains.
fn harvest(
    t: &Tournament,
    h: &Tournament,
    set: &Bits,
    u: usize,
    lambda: &BigRational,
    trace: &mut Trace,
) -> Result<Vec<Vec<Bits>>, PipelineError> {
    let total = set.count();
    let mut rest = set.clone();
    let mut out = Vec::new();
    while !rest.is_empty() && 2 * rest.count() >= total {
        match build(t, h, &rest, u, lambda, trace) {
            Ok(seq) => {
                for s in &seq {
                    rest.difference_with(s);
                }
                out.push(seq);
            }
            Err(PipelineError::Shortfall(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::rational;
    use crate::pipeline::sequences::check_l_sequence;
    use crate::tournament::{gen_transitive, Tournament};

    fn c3() -> Tournament {
        Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn constant_values() {
        assert_eq!(lseq_constant(3, 1, &rational(1, 4)), rational(1, 1));
        // u = 2: lambda^h / (4^(h+3) h^2 2^h)
        let expect = rational(1, 64) / (int(4usize.pow(6)) * int(9) * int(8));
        assert_eq!(lseq_constant(3, 2, &rational(1, 4)), expect);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn length_one() {
        let t = gen_transitive(10);
        let s = find_l_sequence(&t, &c3(), 1, &rational(1, 4), None).unwrap();
        assert_eq!(s.sets.len(), 1);
        assert_eq!(s.sets[0].len(), 10);
    }

    #[test]
    fn length_two_on_transitive() {
        let t = gen_transitive(60);
        let c = rational(1, 10);
        let s = find_l_sequence(&t, &c3(), 2, &rational(1, 4), Some(&c)).unwrap();
        assert_eq!(s.sets.len(), 2);
        assert_eq!(check_l_sequence(&t, &s), Ok(()));
        let d = crate::density::density(&t, &s.sets[0], &s.sets[1]).unwrap();
        assert_eq!(d.edges(), d.pairs());
    }

    #[test]
    fn longer_sequences_on_transitive() {
        let t = gen_transitive(400);
        for u in [3, 4] {
            let s = find_l_sequence(&t, &c3(), u, &rational(1, 4), Some(&rational(3, 200))).unwrap();
            assert_eq!(s.sets.len(), u);
            assert_eq!(check_l_sequence(&t, &s), Ok(()));
        }
    }

    #[test]
    fn too_small() {
        let t = gen_transitive(10);
        assert!(matches!(
            find_l_sequence(&t, &c3(), 2, &rational(1, 4), None),
            Err(PipelineError::TooSmall { n: 10, .. })
        ));
    }

    #[test]
    fn cyclic_host_reports_copy() {
        let t = crate::tournament::gen_random(60, 3);
        match find_l_sequence(&t, &c3(), 2, &rational(1, 2), Some(&rational(1, 10))) {
            Err(PipelineError::FoundH(e)) => assert!(e.verify(&t, &c3())),
            Ok(s) => assert_eq!(check_l_sequence(&t, &s), Ok(())),
            Err(e) => panic!("{e}"),
        }
    }
}
