//! Lower and upper bounds on the Erdős–Hajnal coefficient: closed-form
//! evaluators, the substitution composition rule, iterated substitution, and
//! random `H`-far certificates.
//!
//! Every asymptotic formula takes its constant `c` as an argument; values with
//! `c = 1` are unnormalized.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bits::Bits;
use crate::orderings::{find_galaxy_ordering, find_star_ordering, OrderingError};
use crate::scalar::Real;
use crate::structure::{analyze_homogeneous, first_quotient_copy, Quotient, StructureError};
use crate::tournament::{gen_random, gen_transitive, substitute, CoreError, Tournament, VertexSet};
use crate::transitive::{greedy_within, max_transitive_within};

pub const DEFAULT_ITERATE_CAP: usize = 4096;
pub const DEFAULT_CERTIFY_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("pattern is not prime")]
    NotPrime,
    #[error("{n} vertices exceed the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerFamily {
    Galaxy,
    Star,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperMode {
    Prime,
    Partition,
}

/// Lower bounds for the three families:
/// galaxy `c / (h^5 ln h)`, star `1 / (3h ln 2h)`, general `c e^(-(h+1) ln(h+1))`.
pub fn lower_bound_formula<R: Real>(h: usize, family: LowerFamily, c: R) -> Result<R, BoundsError> {
    if h < 2 {
        return Err(BoundsError::Domain(format!("h = {h} is below 2")));
    }
    let x = R::of(h);
    Ok(match family {
        LowerFamily::Galaxy => c / (x.powi(5) * x.ln()),
        LowerFamily::Star => R::one() / (R::lit(3.0) * x * (R::lit(2.0) * x).ln()),
        LowerFamily::General => {
            let y = x + R::one();
            c * (-(y * y.ln())).exp()
        }
    })
}

/// `eps_f eps_d / (eps_d + k eps_f)`: a bound for `D` with one vertex replaced
/// by `F`, where `|D| = k` (limit value, without the arbitrarily small slack).
pub fn compose_lower_bound<R: Real>(eps_f: R, eps_d: R, k: usize) -> Result<R, BoundsError> {
    let unit = |e: R| e > R::zero() && e <= R::one();
    if !unit(eps_f) || !unit(eps_d) {
        return Err(BoundsError::Domain(format!("coefficients {eps_f}, {eps_d} not in (0, 1]")));
    }
    if k == 0 {
        return Err(BoundsError::Domain("k must be at least 1".into()));
    }
    Ok(eps_f * eps_d / (eps_d + R::of(k) * eps_f))
}

/// `t(k) = k ln(2k)`.
pub fn general_exponent(k: usize) -> f64 {
    let k = k as f64;
    k * (2.0 * k).ln()
}

/// `e^t(k+l-1) >= e^t(l) + k e^t(k)` for `t(k) = k ln 2k`.
pub fn general_recursion_holds(k: usize, l: usize) -> bool {
    let lhs = general_exponent(k + l - 1).exp();
    lhs >= general_exponent(l).exp() + k as f64 * general_exponent(k).exp()
}

/// Upper bounds: prime `c ln h / h`; partition `c ln ln p / ln p` with `p = p(H)`.
/// The partition value is clamped into `(0, 1]`: below `p = e^e` the formula
/// is not positive or exceeds 1, and the trivial bound 1 is returned.
pub fn upper_bound_formula<R: Real>(h: &Tournament, mode: UpperMode, c: R) -> Result<R, BoundsError> {
    let st = analyze_homogeneous(h)?;
    match mode {
        UpperMode::Prime => {
            if !st.is_prime {
                return Err(BoundsError::NotPrime);
            }
            if h.n() < 2 {
                return Err(BoundsError::Domain("a single vertex has no upper bound".into()));
            }
            let x = R::of(h.n());
            Ok(c * x.ln() / x)
        }
        UpperMode::Partition => Ok(partition_formula(st.p, c)),
    }
}

fn partition_formula<R: Real>(p: usize, c: R) -> R {
    let lp = R::of(p).ln();
    let v = c * lp.ln() / lp;
    if v.is_finite() && v > R::zero() && v <= R::one() {
        v
    } else {
        R::one()
    }
}

/// `T^B_k`: a single vertex for `k = 0`, otherwise `B` with every vertex
/// replaced by `T^B_(k-1)`.
pub fn iterate_substitution(b: &Tournament, k: usize) -> Result<Tournament, BoundsError> {
    iterate_substitution_capped(b, k, DEFAULT_ITERATE_CAP)
}

pub fn iterate_substitution_capped(b: &Tournament, k: usize, cap: usize) -> Result<Tournament, BoundsError> {
    let size = (b.n() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(BoundsError::TooLarge {
            n: size.min(usize::MAX as u128) as usize,
            cap,
        });
    }
    let mut cur = gen_transitive(1);
    for _ in 0..k {
        let parts = vec![cur; b.n()];
        cur = substitute(b, &parts)?.0;
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Deletions allowed per trial; `None` means `2|H|`.
    pub delete_budget: Option<usize>,
    /// Largest base accepted.
    pub cap: usize,
}

impl CertifyConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        CertifyConfig {
            n,
            trials,
            seed,
            delete_budget: None,
            cap: DEFAULT_CERTIFY_CAP,
        }
    }
}

/// An `H`-far base `B`; `T^B_k` is then `H`-free with transitive sets of size
/// at most `|T^B_k|^eps_upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperCertificate<R: Real = f64> {
    pub base: Tournament,
    /// Labels, in the sampled tournament, of the deleted vertices.
    pub deleted: Vec<usize>,
    pub trial: usize,
    pub seed: u64,
    pub tr: usize,
    pub eps_upper: R,
    pub verified_h_far: bool,
}

impl<R: Real> UpperCertificate<R> {
    /// No information beyond the trivial bound 1.
    pub fn is_degenerate(&self) -> bool {
        self.eps_upper >= R::one()
    }

    /// Recomputes `H`-farness and `tr` from scratch.
    pub fn recheck(&self, h: &Tournament) -> Result<bool, BoundsError> {
        let far = first_quotient_copy(&self.base, h)?.is_none();
        let tr = max_transitive_within(&self.base, &Bits::full(self.base.n())).len();
        Ok(far && tr == self.tr && self.eps_upper == eps_of(tr, self.base.n()))
    }
}

fn eps_of<R: Real>(tr: usize, n: usize) -> R {
    if n <= 1 {
        R::one()
    } else {
        R::of(tr).ln() / R::of(n).ln()
    }
}

/// Samples `gen_random(n, seed + i)` for `i < trials`. Inside each sample, as
/// long as a quotient of `h` (with at least two vertices) has a copy, the
/// vertex of that copy seen most often across all copies found so far in the
/// trial is deleted, smallest label first on ties. The first trial that ends
/// `H`-far within the deletion budget is returned, with `tr` computed exactly.
pub fn certify_upper<R: Real>(
    h: &Tournament,
    cfg: &CertifyConfig,
) -> Result<Option<UpperCertificate<R>>, BoundsError> {
    if h.n() > crate::structure::DEFAULT_STRUCTURE_CAP {
        return Err(BoundsError::TooLarge {
            n: h.n(),
            cap: crate::structure::DEFAULT_STRUCTURE_CAP,
        });
    }
    if cfg.n > cfg.cap {
        return Err(BoundsError::TooLarge { n: cfg.n, cap: cfg.cap });
    }
    if cfg.n == 0 || h.n() < 2 {
        return Err(BoundsError::Domain("need n >= 1 and |H| >= 2".into()));
    }
    let budget = cfg.delete_budget.unwrap_or(2 * h.n());
    for trial in 0..cfg.trials {
        let seed = cfg.seed.wrapping_add(trial as u64);
        let sample = gen_random(cfg.n, seed);
        let mut alive: Vec<usize> = (0..cfg.n).collect();
        let mut deleted = Vec::new();
        let mut freq: HashMap<usize, usize> = HashMap::new();
        let base = loop {
            if alive.is_empty() {
                break None;
            }
            let (cur, map) = sample.induced(&VertexSet::new(alive.iter().copied()))?;
            let Some((_, e)) = first_quotient_copy(&cur, h)? else {
                break Some(cur);
            };
            if deleted.len() == budget {
                break None;
            }
            let copy: Vec<usize> = e.map.iter().map(|&v| map[v]).collect();
            for &v in &copy {
                *freq.entry(v).or_default() += 1;
            }
            let victim = *copy
                .iter()
                .max_by(|&&a, &&b| freq[&a].cmp(&freq[&b]).then(b.cmp(&a)))
                .expect("quotients have vertices");
            alive.retain(|&v| v != victim);
            deleted.push(victim);
        };
        if let Some(base) = base {
            let tr = max_transitive_within(&base, &Bits::full(base.n())).len();
            return Ok(Some(UpperCertificate {
                eps_upper: eps_of(tr, base.n()),
                verified_h_far: first_quotient_copy(&base, h)?.is_none(),
                base,
                deleted,
                trial,
                seed,
                tr,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerSource {
    /// At most two vertices: every tournament is transitive or `H`-free trivially.
    Trivial,
    GalaxyFormula,
    StarFormula,
    GeneralFormula,
    Composition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperSource {
    PrimeFormula,
    PartitionFormula,
    Certificate,
}

impl LowerSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            LowerSource::Trivial => "trivial",
            LowerSource::GalaxyFormula => "galaxy_formula",
            LowerSource::StarFormula => "star_formula",
            LowerSource::GeneralFormula => "general_formula",
            LowerSource::Composition => "composition",
        }
    }
}

impl UpperSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            UpperSource::PrimeFormula => "prime_formula",
            UpperSource::PartitionFormula => "partition_formula",
            UpperSource::Certificate => "certificate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord<R: Real = f64> {
    pub h: usize,
    pub lower: Option<(R, LowerSource)>,
    /// Why `lower` is absent.
    pub lower_reason: Option<String>,
    pub upper: Option<(R, UpperSource)>,
    pub certificate: Option<UpperCertificate<R>>,
    /// `ln(lower) / ln h`.
    pub log_ratio_lower: Option<R>,
    /// `ln(upper) / ln h`.
    pub log_ratio_upper: Option<R>,
    pub c: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig<R: Real = f64> {
    pub c: R,
    pub certify: Option<CertifyConfig>,
}

impl<R: Real> Default for ReportConfig<R> {
    fn default() -> Self {
        ReportConfig {
            c: R::one(),
            certify: None,
        }
    }
}

/// Best lower bound for `h`: trivial for at most two vertices; for a prime
/// pattern the star formula if it is a star, the galaxy formula if it is a
/// galaxy, nothing otherwise; for a non-prime pattern the composition rule
/// over a minimum homogeneous partition (quotient first, then each part in
/// turn), or the general formula when some factor has no bound, taking the
/// larger of the two when both apply.
fn lower_of<R: Real>(h: &Tournament, c: R) -> Result<Result<(R, LowerSource), String>, BoundsError> {
    let n = h.n();
    if n <= 2 {
        return Ok(Ok((R::one(), LowerSource::Trivial)));
    }
    let st = analyze_homogeneous(h)?;
    if st.is_prime {
        if n > crate::orderings::DEFAULT_ORDERING_CAP {
            return Ok(Err(format!("{n} vertices exceed the ordering search cap")));
        }
        if find_star_ordering(h)?.is_some() {
            return Ok(Ok((lower_bound_formula(n, LowerFamily::Star, c)?, LowerSource::StarFormula)));
        }
        if find_galaxy_ordering(h)?.is_some() {
            return Ok(Ok((lower_bound_formula(n, LowerFamily::Galaxy, c)?, LowerSource::GalaxyFormula)));
        }
        return Ok(Err("not a galaxy; EH known but no formula in scope".into()));
    }
    let general = lower_bound_formula(n, LowerFamily::General, c)?;
    let partition = st
        .partitions
        .iter()
        .find(|p| p.len() == st.p)
        .expect("non-prime pattern has a minimum partition")
        .clone();
    let quotient = Quotient::from_partition(h, partition.clone());
    let mut eps = match lower_of(&quotient.q, c)? {
        Ok((e, _)) => e,
        Err(_) => return Ok(Ok((general, LowerSource::GeneralFormula))),
    };
    let mut size = quotient.q.n();
    for part in &partition {
        if part.len() < 2 {
            continue;
        }
        let (f, _) = h.induced(part)?;
        let ef = match lower_of(&f, c)? {
            Ok((e, _)) => e,
            Err(_) => return Ok(Ok((general, LowerSource::GeneralFormula))),
        };
        eps = compose_lower_bound(ef.min(R::one()), eps.min(R::one()), size)?;
        size += part.len() - 1;
    }
    Ok(Ok(if eps >= general {
        (eps, LowerSource::Composition)
    } else {
        (general, LowerSource::GeneralFormula)
    }))
}

pub fn bound_report<R: Real>(h: &Tournament, cfg: &ReportConfig<R>) -> Result<BoundRecord<R>, BoundsError> {
    let n = h.n();
    let (lower, lower_reason) = match lower_of(h, cfg.c)? {
        Ok(l) => (Some(l), None),
        Err(reason) => (None, Some(reason)),
    };
    let mut upper = if n < 2 {
        None
    } else {
        let st = analyze_homogeneous(h)?;
        Some(if st.is_prime {
            (upper_bound_formula(h, UpperMode::Prime, cfg.c)?, UpperSource::PrimeFormula)
        } else {
            (partition_formula(st.p, cfg.c), UpperSource::PartitionFormula)
        })
    };
    let certificate = match &cfg.certify {
        Some(cc) if n >= 2 => certify_upper::<R>(h, cc)?,
        _ => None,
    };
    if let Some(cert) = &certificate {
        if cert.verified_h_far && upper.is_none_or(|(u, _)| cert.eps_upper < u) {
            upper = Some((cert.eps_upper, UpperSource::Certificate));
        }
    }
    let ratio = |v: R| (n >= 2).then(|| v.ln() / R::of(n).ln());
    Ok(BoundRecord {
        h: n,
        log_ratio_lower: lower.and_then(|(v, _)| ratio(v)),
        log_ratio_upper: upper.and_then(|(v, _)| ratio(v)),
        lower,
        lower_reason,
        upper,
        certificate,
        c: cfg.c,
    })
}

impl<R: Real> BoundRecord<R> {
    fn rows(&self) -> Vec<(&'static str, String)> {
        let num = |v: R| format!("{:.12e}", v.to_f64().unwrap_or(f64::NAN));
        let mut rows = vec![("h", self.h.to_string()), ("c", num(self.c))];
        match &self.lower {
            Some((v, s)) => {
                rows.push(("eps_lower", num(*v)));
                rows.push(("eps_lower_source", s.as_str().into()));
            }
            None => rows.push((
                "eps_lower",
                format!("absent ({})", self.lower_reason.as_deref().unwrap_or("unknown")),
            )),
        }
        if let Some((v, s)) = &self.upper {
            rows.push(("eps_upper", num(*v)));
            rows.push(("eps_upper_source", s.as_str().into()));
        }
        if let Some(r) = self.log_ratio_lower {
            rows.push(("log_ratio_lower", num(r)));
        }
        if let Some(r) = self.log_ratio_upper {
            rows.push(("log_ratio_upper", num(r)));
        }
        if let Some(cert) = &self.certificate {
            rows.push(("certificate_base", cert.base.n().to_string()));
            rows.push(("certificate_tr", cert.tr.to_string()));
            rows.push(("certificate_eps", num(cert.eps_upper)));
        }
        rows
    }

    /// Two aligned columns.
    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

impl<R: Real> fmt::Display for BoundRecord<R> {
    /// One `key=value` line per field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.rows() {
            writeln!(f, "{k}={}", v.replace(' ', "_"))?;
        }
        Ok(())
    }
}

/// Size of the largest transitive set: exact up to `cap` vertices, otherwise a
/// greedy lower bound (second component `false`).
pub fn tr_estimate(t: &Tournament, cap: usize) -> (usize, bool) {
    let all = Bits::full(t.n());
    if t.n() <= cap {
        (max_transitive_within(t, &all).len(), true)
    } else {
        (greedy_within(t, &all).len(), false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderings::{build_galaxy, GalaxySpec};
    use crate::tournament::gen_c5;

    fn star5() -> Tournament {
        build_galaxy(&GalaxySpec::parse("C0\nS\nL0\nS\nL0\n").unwrap()).unwrap()
    }

    fn c3() -> Tournament {
        Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn lower_formulas() {
        let s: f64 = lower_bound_formula(5, LowerFamily::Star, 1.0).unwrap();
        assert!((s - 1.0 / (15.0 * 10f64.ln())).abs() < 1e-15);
        let g: f64 = lower_bound_formula(4, LowerFamily::General, 1.0).unwrap();
        assert!((g - 5f64.powi(-5)).abs() < 1e-18);
        let big: f64 = lower_bound_formula(1000, LowerFamily::Galaxy, 1.0).unwrap();
        let r = big.ln() / 1000f64.ln();
        assert!((-5.5..=-4.5).contains(&r));
        assert!(lower_bound_formula::<f64>(1, LowerFamily::Star, 1.0).is_err());
    }

    #[test]
    fn composition() {
        assert_eq!(compose_lower_bound(1.0f64, 1.0, 1).unwrap(), 0.5);
        let v = compose_lower_bound(0.3f64, 0.2, 3).unwrap();
        assert!(v < 0.3f64.min(0.2 / 3.0));
        assert!(compose_lower_bound(0.0f64, 0.5, 1).is_err());
        assert!(compose_lower_bound(0.5f64, 0.5, 0).is_err());
    }

    #[test]
    fn recursion_inequality() {
        for k in 2..=20 {
            for l in 2..=20 {
                assert!(general_recursion_holds(k, l), "k={k} l={l}");
            }
        }
    }

    #[test]
    fn upper_formulas() {
        let u: f64 = upper_bound_formula(&gen_c5(), UpperMode::Prime, 1.0).unwrap();
        assert!((u - 5f64.ln() / 5.0).abs() < 1e-15);
        assert!(matches!(
            upper_bound_formula::<f64>(&gen_transitive(3), UpperMode::Prime, 1.0),
            Err(BoundsError::NotPrime)
        ));
        let p: f64 = upper_bound_formula(&gen_c5(), UpperMode::Partition, 1.0).unwrap();
        assert!((p - 5f64.ln().ln() / 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn iteration_sizes() {
        assert_eq!(iterate_substitution(&c3(), 0).unwrap().n(), 1);
        assert_eq!(iterate_substitution(&c3(), 1).unwrap(), c3());
        let t = iterate_substitution(&c3(), 2).unwrap();
        assert_eq!(t.n(), 9);
        assert_eq!(max_transitive_within(&t, &Bits::full(9)).len(), 4);
        assert!(matches!(
            iterate_substitution_capped(&c3(), 9, 1000),
            Err(BoundsError::TooLarge { .. })
        ));
    }

    #[test]
    fn reports() {
        let r: BoundRecord = bound_report(&star5(), &ReportConfig::default()).unwrap();
        assert_eq!(r.lower.unwrap().1, LowerSource::StarFormula);
        assert_eq!(r.upper.unwrap().1, UpperSource::PrimeFormula);
        assert!(r.lower.unwrap().0 <= r.upper.unwrap().0);
        let c5: BoundRecord = bound_report(&gen_c5(), &ReportConfig::default()).unwrap();
        assert!(c5.lower.is_none());
        assert!(c5.lower_reason.unwrap().contains("not a galaxy"));
        let parts: Vec<Tournament> = (0..5).map(|i| gen_transitive(1 + i % 2)).collect();
        let (t, _) = substitute(&star5(), &parts).unwrap();
        let comp: BoundRecord = bound_report(&t, &ReportConfig::default()).unwrap();
        assert_eq!(comp.lower.unwrap().1, LowerSource::Composition);
        assert!(comp.to_table().contains("composition"));
        assert!(comp.to_string().lines().all(|l| l.contains('=')));
    }

    #[test]
    fn certificates() {
        // every quotient of the star has five vertices
        let cert: UpperCertificate = certify_upper(&star5(), &CertifyConfig::new(4, 1, 0)).unwrap().unwrap();
        assert!(cert.deleted.is_empty() && cert.verified_h_far);
        assert!(cert.recheck(&star5()).unwrap());
        // a C3-far base is transitive
        if let Some(c) = certify_upper::<f64>(&c3(), &CertifyConfig::new(6, 20, 1)).unwrap() {
            assert!(c.is_degenerate());
            assert_eq!(c.tr, c.base.n());
        }
        assert!(matches!(
            certify_upper::<f64>(&c3(), &CertifyConfig::new(65, 1, 0)),
            Err(BoundsError::TooLarge { .. })
        ));
    }
}
