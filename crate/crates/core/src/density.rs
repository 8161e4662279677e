//! Directed density between vertex sets, kept as exact rationals.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::tournament::{CoreError, Tournament, VertexSet};

/// `edges / (|X| |Y|)` for disjoint nonempty `X`, `Y`, never reduced to a float.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density {
    edges: u64,
    pairs: u64,
}

impl Density {
    pub fn from_counts(edges: u64, pairs: u64) -> Self {
        assert!(pairs > 0 && edges <= pairs);
        Density { edges, pairs }
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    pub fn value(&self) -> Ratio<u64> {
        Ratio::new(self.edges, self.pairs)
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.edges), BigInt::from(self.pairs))
    }

    /// `value >= 1 - slack`, decided exactly.
    pub fn at_least_one_minus(&self, slack: &BigRational) -> bool {
        // edges >= pairs * (1 - slack)  <=>  missing <= pairs * slack
        missing_within(self.pairs - self.edges, self.pairs, slack)
    }

    pub fn to_f64(&self) -> f64 {
        self.edges as f64 / self.pairs as f64
    }
}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.edges as u128 * other.pairs as u128).cmp(&(other.edges as u128 * self.pairs as u128))
    }
}

/// `missing <= total * slack` without leaving integer arithmetic.
pub fn missing_within(missing: u64, total: u64, slack: &BigRational) -> bool {
    BigInt::from(missing) * slack.denom() <= BigInt::from(total) * slack.numer()
}

/// `count >= frac * total`, exactly.
pub fn at_least_fraction(count: u64, total: u64, frac: &BigRational) -> bool {
    BigInt::from(count) * frac.denom() >= BigInt::from(total) * frac.numer()
}

pub fn density(t: &Tournament, x: &VertexSet, y: &VertexSet) -> Result<Density, CoreError> {
    if x.is_empty() || y.is_empty() {
        return Err(CoreError::EmptySet);
    }
    t.check_set(x)?;
    t.check_set(y)?;
    if !x.is_disjoint(y) {
        return Err(CoreError::Overlap);
    }
    let yb = y.to_bits(t.n());
    let edges: u64 = x.iter().map(|v| t.out_row(v).intersection_count(&yb) as u64).sum();
    Ok(Density::from_counts(edges, (x.len() * y.len()) as u64))
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_probability(r: &BigRational) -> bool {
    *r >= BigRational::zero() && *r <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{gen_random, gen_transitive};

    #[test]
    fn density_examples() {
        let t = gen_transitive(4);
        let x = VertexSet::new([0, 1]);
        let y = VertexSet::new([2, 3]);
        assert_eq!(density(&t, &x, &y).unwrap().value(), Ratio::new(1, 1));
        assert_eq!(density(&t, &y, &x).unwrap().value(), Ratio::new(0, 1));
        let c3 = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = density(&c3, &VertexSet::new([0]), &VertexSet::new([1, 2])).unwrap();
        assert_eq!(d.value(), Ratio::new(1, 2));
        assert_eq!(density(&t, &x, &x), Err(CoreError::Overlap));
        assert_eq!(density(&t, &x, &VertexSet::default()), Err(CoreError::EmptySet));
    }

    #[test]
    fn threshold_is_exact() {
        let d = Density::from_counts(3, 4);
        assert!(d.at_least_one_minus(&rational(1, 4)));
        assert!(!d.at_least_one_minus(&rational(1, 5)));
        let t = gen_random(20, 1);
        let x = VertexSet::new(0..7);
        let y = VertexSet::new(7..20);
        let a = density(&t, &x, &y).unwrap().value();
        let b = density(&t, &y, &x).unwrap().value();
        assert_eq!(a + b, Ratio::new(1, 1));
    }
}
