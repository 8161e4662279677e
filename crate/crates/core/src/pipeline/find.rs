//! Copy of a prime galaxy or a large transitive set, and coloring by repeated
//! extraction.

use crate::bits::Bits;
use crate::scalar::Real;
use crate::structure::{analyze_homogeneous, find_embedding, Embedding};
use crate::tournament::{Tournament, VertexSet};
use crate::transitive::{greedy_within, max_transitive_within, Method, TransitiveWitness, DEFAULT_EXACT_CAP};

use super::embed::{embed_galaxy_or_transitive, EmbedConfig, Layout};
use super::lseq::find_l_sequence_traced;
use super::mseq::l_to_m_sequence;
use super::params::{from_layout, PipelineParams};
use super::trace::Trace;
use super::PipelineError;

pub const DEFAULT_COLOR_GUARD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Embedding(Embedding),
    Witness(TransitiveWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FindResult {
    pub outcome: Outcome,
    pub trace: Trace,
}

#[derive(Debug, Clone)]
pub struct FindConfig<R: Real = f64> {
    /// Tournaments with at most this many vertices are solved directly.
    /// `None` uses `e^(h^5)`, which no feasible input exceeds.
    pub threshold: Option<usize>,
    /// Direct solutions are exact up to this size and greedy above it.
    pub exact_cap: usize,
    /// Look for the pattern before answering directly.
    pub probe: bool,
    pub embed: EmbedConfig,
    /// Replaces the parameters computed from the pattern.
    pub params: Option<PipelineParams<R>>,
    /// Constant in the class-count bound of [`color_tournament`].
    pub color_guard: R,
}

impl<R: Real> Default for FindConfig<R> {
    fn default() -> Self {
        FindConfig {
            threshold: None,
            exact_cap: DEFAULT_EXACT_CAP,
            probe: true,
            embed: EmbedConfig::default(),
            params: None,
            color_guard: R::lit(DEFAULT_COLOR_GUARD),
        }
    }
}

/// `e^(h^5)`, saturating.
pub fn default_threshold(h: usize) -> usize {
    let x = ((h as f64).powi(5)).exp();
    if x >= usize::MAX as f64 {
        usize::MAX
    } else {
        x.floor() as usize
    }
}

fn prepare<R: Real>(h: &Tournament, cfg: &FindConfig<R>) -> Result<PipelineParams<R>, PipelineError> {
    if !analyze_homogeneous(h)?.is_prime {
        return Err(PipelineError::NotPrime);
    }
    let layout = Layout::of(h)?;
    Ok(match &cfg.params {
        Some(p) => p.clone(),
        None => {
            let u = 2 * layout.t() + 1;
            from_layout(layout, u)
        }
    })
}

/// A copy of the prime galaxy `h` in `t`, or a transitive set of `t`.
///
/// At or below the threshold the answer is direct: an exhaustive search for
/// `h` (when `probe` is set), then a maximum transitive set (exact up to
/// `exact_cap`, greedy above). Above it: a smooth `l`-sequence of length
/// `2t+1`, its `m`-sequence with this function as the extractor on proper
/// subsets, and the star-by-star embedding. A construction that falls short
/// at this size drops to the direct answer and says so in the trace.
pub fn find_transitive<R: Real>(
    t: &Tournament,
    h: &Tournament,
    cfg: &FindConfig<R>,
) -> Result<FindResult, PipelineError> {
    let params = prepare(h, cfg)?;
    let mut trace = Trace::default();
    let outcome = solve(t, h, &params, cfg, cfg.probe, &mut trace)?;
    let ok = match &outcome {
        Outcome::Embedding(e) => e.verify(t, h),
        Outcome::Witness(w) => w.verify(t),
    };
    if !ok {
        return Err(PipelineError::Shortfall("result failed verification".into()));
    }
    Ok(FindResult { outcome, trace })
}

fn threshold_of<R: Real>(h: &Tournament, cfg: &FindConfig<R>) -> usize {
    cfg.threshold.unwrap_or_else(|| default_threshold(h.n()))
}

fn base<R: Real>(
    t: &Tournament,
    h: &Tournament,
    cfg: &FindConfig<R>,
    probe: bool,
    trace: &mut Trace,
) -> Outcome {
    if probe {
        if let Some(e) = find_embedding(t, h) {
            trace.record("base", &[("n", t.n().to_string()), ("branch", "embedding".into())]);
            return Outcome::Embedding(e);
        }
    }
    let all = Bits::full(t.n());
    let w = if t.n() <= cfg.exact_cap {
        TransitiveWitness::new(max_transitive_within(t, &all), Method::Exact)
    } else {
        TransitiveWitness::new(greedy_within(t, &all), Method::Greedy)
    };
    trace.record(
        "base",
        &[
            ("n", t.n().to_string()),
            ("branch", "witness".into()),
            ("method", w.method.as_str().into()),
            ("size", w.size().to_string()),
        ],
    );
    Outcome::Witness(w)
}

fn solve<R: Real>(
    t: &Tournament,
    h: &Tournament,
    params: &PipelineParams<R>,
    cfg: &FindConfig<R>,
    probe: bool,
    trace: &mut Trace,
) -> Result<Outcome, PipelineError> {
    if t.n() <= threshold_of(h, cfg) {
        return Ok(base(t, h, cfg, probe, trace));
    }
    match pipeline(t, h, params, cfg, trace) {
        Ok(o) => Ok(o),
        Err(PipelineError::FoundH(e)) => {
            trace.record("found", &[("n", t.n().to_string())]);
            Ok(Outcome::Embedding(e))
        }
        Err(
            e @ (PipelineError::TooSmall { .. }
            | PipelineError::Shortfall(_)
            | PipelineError::ExtractorTooWeak { .. }
            | PipelineError::HypothesisViolated(_)
            | PipelineError::PreconditionViolated(_)
            | PipelineError::BudgetExceeded(_)),
        ) => {
            trace.record("fallback", &[("n", t.n().to_string()), ("reason", e.to_string())]);
            Ok(base(t, h, cfg, probe, trace))
        }
        Err(e) => Err(e),
    }
}

fn pipeline<R: Real>(
    t: &Tournament,
    h: &Tournament,
    params: &PipelineParams<R>,
    cfg: &FindConfig<R>,
    trace: &mut Trace,
) -> Result<Outcome, PipelineError> {
    let lseq = find_l_sequence_traced(t, h, params.u, &params.lambda, Some(&params.c_b), trace)?;
    let mut inner = Trace::default();
    let mut extractor = |host: &Tournament, cand: &Bits| -> Result<Vec<usize>, PipelineError> {
        if cand.is_empty() {
            return Ok(Vec::new());
        }
        let (sub, map) = host
            .induced(&VertexSet::from_bits(cand))
            .map_err(|e| PipelineError::PreconditionViolated(e.to_string()))?;
        match solve(&sub, h, params, cfg, false, &mut inner)? {
            Outcome::Embedding(e) => Err(PipelineError::FoundH(e.relabel(&map))),
            Outcome::Witness(w) => Ok(w.relabel(&map).order),
        }
    };
    let mseq = l_to_m_sequence(t, &lseq, params.epsilon, &mut extractor)?;
    let res = embed_galaxy_or_transitive(t, h, &mseq, params, &mut extractor, &cfg.embed)?;
    trace.record(
        "mseq",
        &[
            ("n", t.n().to_string()),
            ("sizes", mseq.sets.iter().map(|s| s.len().to_string()).collect::<Vec<_>>().join(",")),
            ("lambda", mseq.lambda.to_string()),
        ],
    );
    trace.extend(inner);
    trace.extend(res.trace);
    Ok(res.outcome)
}

/// A partition into transitive classes, with the class-count bound it is
/// measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct Coloring<R: Real = f64> {
    pub classes: Vec<TransitiveWitness>,
    pub epsilon: R,
    pub guard: R,
    /// `max(1, guard * n^(1 - epsilon) * ln n)`.
    pub bound: R,
    pub trace: Trace,
}

impl<R: Real> Coloring<R> {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn within_bound(&self) -> bool {
        R::of(self.classes.len()) <= self.bound
    }

    /// Classes are disjoint, cover `0..n`, and are each transitive.
    pub fn verify(&self, t: &Tournament) -> bool {
        let mut seen = Bits::new(t.n());
        for c in &self.classes {
            if c.order.is_empty() || !c.verify(t) {
                return false;
            }
            for &v in &c.order {
                if seen.contains(v) {
                    return false;
                }
                seen.insert(v);
            }
        }
        seen.count() == t.n()
    }
}

/// Colors the `h`-free `t` by taking a transitive set from what is left until
/// nothing is. The pattern is searched for once up front; a copy found then or
/// later is returned as `FoundH`.
pub fn color_tournament<R: Real>(
    t: &Tournament,
    h: &Tournament,
    cfg: &FindConfig<R>,
) -> Result<Coloring<R>, PipelineError> {
    let params = prepare(h, cfg)?;
    if cfg.probe {
        if let Some(e) = find_embedding(t, h) {
            return Err(PipelineError::FoundH(e));
        }
    }
    let mut trace = Trace::default();
    let mut rest: Vec<usize> = (0..t.n()).collect();
    let mut classes = Vec::new();
    while !rest.is_empty() {
        let (sub, map) = t
            .induced(&VertexSet::new(rest.iter().copied()))
            .map_err(|e| PipelineError::PreconditionViolated(e.to_string()))?;
        let w = match solve(&sub, h, &params, cfg, false, &mut trace)? {
            Outcome::Embedding(e) => return Err(PipelineError::FoundH(e.relabel(&map))),
            Outcome::Witness(w) => w.relabel(&map),
        };
        if w.order.is_empty() || !w.verify(t) {
            return Err(PipelineError::Shortfall("empty or invalid class".into()));
        }
        let taken = Bits::from_indices(t.n(), w.order.iter().copied());
        rest.retain(|&v| !taken.contains(v));
        trace.record(
            "color_round",
            &[("class", classes.len().to_string()), ("size", w.size().to_string()), ("left", rest.len().to_string())],
        );
        classes.push(w);
    }
    let n = R::of(t.n());
    let bound = (cfg.color_guard * n.powf(R::one() - params.epsilon) * n.ln()).max(R::one());
    Ok(Coloring {
        classes,
        epsilon: params.epsilon,
        guard: cfg.color_guard,
        bound,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::rational;
    use crate::orderings::{build_galaxy, GalaxySpec};
    use crate::structure::gen_h_free;
    use crate::tournament::{gen_c5, gen_random, gen_transitive, substitute};

    fn star5() -> Tournament {
        build_galaxy(&GalaxySpec::parse("C0\nS\nL0\nS\nL0\n").unwrap()).unwrap()
    }

    #[test]
    fn transitive_host_is_one_witness() {
        let t = gen_transitive(100);
        let r = find_transitive(&t, &star5(), &FindConfig::<f64>::default()).unwrap();
        match r.outcome {
            Outcome::Witness(w) => assert_eq!(w.size(), 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_galaxies_and_non_primes() {
        let t = gen_transitive(10);
        assert!(matches!(
            find_transitive(&t, &gen_c5(), &FindConfig::<f64>::default()),
            Err(PipelineError::NotAGalaxy)
        ));
        assert!(matches!(
            find_transitive(&t, &gen_transitive(3), &FindConfig::<f64>::default()),
            Err(PipelineError::NotPrime)
        ));
    }

    #[test]
    fn c5_blowup_without_star() {
        // no tournament on four vertices is prime; every prime 5-vertex star
        // is absent from this blow-up
        let h = star5();
        let parts: Vec<Tournament> = (0..5).map(|_| gen_transitive(3)).collect();
        let (t, _) = substitute(&gen_c5(), &parts).unwrap();
        assert!(find_embedding(&t, &h).is_none());
        let r = find_transitive(&t, &h, &FindConfig::<f64>::default()).unwrap();
        let p: PipelineParams<f64> = prepare(&h, &FindConfig::default()).unwrap();
        match r.outcome {
            Outcome::Witness(w) => {
                assert!(w.verify(&t));
                assert!(w.size() >= (15f64).powf(p.epsilon).ceil() as usize);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planted_copy_is_found() {
        let h = star5();
        let host = gen_random(60, 4);
        let parts: Vec<Tournament> = (0..5).map(|i| if i == 0 { host.clone() } else { gen_transitive(1) }).collect();
        let (t, _) = substitute(&h, &parts).unwrap();
        let r = find_transitive(&t, &h, &FindConfig::<f64>::default()).unwrap();
        assert!(matches!(r.outcome, Outcome::Embedding(ref e) if e.verify(&t, &h)));
    }

    #[test]
    fn pipeline_branch_runs_with_small_threshold() {
        // C3 is a prime galaxy; transitive hosts are C3-free
        let h = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let cfg0 = FindConfig::<f64>::default();
        let p = prepare(&h, &cfg0)
            .unwrap()
            .with_linearity(rational(1, 10))
            .with_lambda(rational(1, 4))
            .with_constants(rational(1, 4), rational(1, 2))
            .with_epsilon(0.1);
        let cfg = FindConfig {
            threshold: Some(30),
            params: Some(p),
            ..cfg0
        };
        let t = gen_transitive(1000);
        let r = find_transitive(&t, &h, &cfg).unwrap();
        let stages: Vec<&str> = r.trace.stages().collect();
        for s in ["lseq", "mseq", "embed", "embed_star", "embed_nonstar"] {
            assert!(stages.contains(&s), "{s} missing from {stages:?}");
        }
        match r.outcome {
            Outcome::Witness(w) => {
                assert!(w.verify(&t));
                assert_eq!(w.method, Method::Merge);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coloring_partitions() {
        let h = star5();
        let t = gen_h_free(120, &h, 6, 3).unwrap();
        let c = color_tournament(&t, &h, &FindConfig::<f64>::default()).unwrap();
        assert!(c.verify(&t));
        assert!(c.within_bound());
        assert!(c.len() < 120);
        let one = color_tournament(&gen_transitive(1), &h, &FindConfig::<f64>::default()).unwrap();
        assert_eq!(one.len(), 1);
        let tt = color_tournament(&gen_transitive(30), &h, &FindConfig::<f64>::default()).unwrap();
        assert_eq!(tt.len(), 1);
    }

    #[test]
    fn coloring_reports_copy() {
        let h = star5();
        let parts: Vec<Tournament> = (0..5).map(|i| gen_random(6, i)).collect();
        let (t, _) = substitute(&h, &parts).unwrap();
        assert!(matches!(
            color_tournament(&t, &h, &FindConfig::<f64>::default()),
            Err(PipelineError::FoundH(e)) if e.verify(&t, &h)
        ));
    }
}
