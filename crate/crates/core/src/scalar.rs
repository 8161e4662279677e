//! Scalar abstraction for the real-valued formula layer.
//!
//! Combinatorial quantities (densities, slacks, linearity constants) are exact
//! rationals; anything involving logarithms or exponentials is evaluated in a
//! generic floating type so that `f32` and `f64` builds share one code path.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Natural log of a positive big integer, accurate to f64 rounding even when
/// the integer itself overflows a float.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.sign() == num_bigint::Sign::Plus, "log of non-positive integer");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("positive").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("64-bit").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn logs_of_huge_values() {
        let two = BigInt::from(2);
        let big = num_traits::pow(two, 5000);
        assert!((ln_bigint(&big) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        let r = BigRational::new(BigInt::one(), big);
        assert!((ln_rational(&r) + 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_bigint(&BigInt::from(10)) - 10f64.ln()).abs() < 1e-15);
    }
}
