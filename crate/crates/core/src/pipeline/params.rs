//! Numeric parameters of the galaxy pipeline, recomputable from `(H, u)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::density::rational;
use crate::scalar::{ln_rational, Real};
use crate::tournament::Tournament;

use super::embed::Layout;
use super::lseq::lseq_constant;
use super::PipelineError;

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow2(e: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams<R: Real> {
    pub layout: Layout,
    pub h: usize,
    pub t: usize,
    pub k: Vec<usize>,
    pub w: Vec<usize>,
    pub g: usize,
    /// Length of the `l`-sequence asked for, `2t + 1` by default.
    pub u: usize,
    /// Slack the embedding step tolerates: `1/(24 h^3 2^((t+1)h^2 + h))`.
    pub lambda_embed: BigRational,
    /// Slack of the `l`-sequence: `1/(1536 t'^2 (t+1) h^3 2^((t+1)h^2 + h))`, `t' = max(t, 1)`.
    pub lambda: BigRational,
    /// Linearity constant of the `l`-sequence.
    pub c_b: BigRational,
    pub c1: BigRational,
    pub c2: BigRational,
    pub m1: BigRational,
    pub m2: BigRational,
    pub epsilon: R,
}

/// Parameters for the galaxy `h` and `l`-sequences of length `u`.
pub fn params_for<R: Real>(h: &Tournament, u: usize) -> Result<PipelineParams<R>, PipelineError> {
    let layout = Layout::of(h)?;
    Ok(from_layout(layout, u))
}

pub(crate) fn from_layout<R: Real>(layout: Layout, u: usize) -> PipelineParams<R> {
    let h = layout.h;
    let t = layout.t();
    let exp = (t + 1) * h * h + h;
    let lambda_embed = BigRational::one() / (int(24 * h * h * h) * pow2(exp));
    let tp = t.max(1);
    let lambda = BigRational::one() / (int(1536 * tp * tp * (t + 1) * h * h * h) * pow2(exp));
    let c_b = lseq_constant(h, u.max(1), &lambda);
    let mut p = PipelineParams {
        h,
        t,
        k: layout.k(),
        w: layout.w(),
        g: layout.stars.len(),
        u,
        lambda_embed,
        lambda,
        c_b: c_b.clone(),
        c1: rational(1, 4),
        c2: c_b / int(2),
        m1: BigRational::zero(),
        m2: BigRational::zero(),
        epsilon: R::zero(),
        layout,
    };
    p.refresh();
    p
}

impl<R: Real> PipelineParams<R> {
    /// `M1 = 24 * 2^(k_1^2 + ... + k_{t+1}^2 + g) / c2`, `M2 = 4 max(w_i, 1) / c1`,
    /// `epsilon = ln(1 + 1/(M2 - 1)) / ln(M1)`.
    fn refresh(&mut self) {
        let sq: usize = self.k.iter().map(|k| k * k).sum();
        self.m1 = int(24) * pow2(sq + self.g) / &self.c2;
        let w = self.w.iter().copied().max().unwrap_or(0).max(1);
        self.m2 = int(4 * w) / &self.c1;
        self.epsilon = epsilon_of(&self.m1, &self.m2);
    }

    /// Replaces `c1` and `c2` and recomputes `M1`, `M2`, `epsilon`.
    pub fn with_constants(mut self, c1: BigRational, c2: BigRational) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self.refresh();
        self
    }

    /// Replaces both slacks: `lambda_embed` as given and the `l`-sequence slack
    /// scaled so that the `m`-sequence built from it meets `lambda_embed`.
    pub fn with_lambda(mut self, lambda_embed: BigRational) -> Self {
        let tp = self.t.max(1);
        self.lambda = &lambda_embed / int(64 * tp * tp * (self.t + 1));
        self.lambda_embed = lambda_embed;
        self
    }

    /// Replaces the linearity constant of the `l`-sequence (and `c2 = c_b/2`).
    pub fn with_linearity(mut self, c_b: BigRational) -> Self {
        self.c2 = &c_b / int(2);
        self.c_b = c_b;
        self.refresh();
        self
    }

    pub fn with_epsilon(mut self, epsilon: R) -> Self {
        self.epsilon = epsilon;
        self
    }
}

fn epsilon_of<R: Real>(m1: &BigRational, m2: &BigRational) -> R {
    let one = BigRational::one();
    if *m2 <= one || *m1 <= one {
        return R::zero();
    }
    let num = ln_rational(&(m2 / (m2 - &one)));
    R::lit(num / ln_rational(m1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderings::{build_galaxy, GalaxySpec};

    fn star5() -> Tournament {
        build_galaxy(&GalaxySpec::parse("C0\nS\nL0\nS\nL0\n").unwrap()).unwrap()
    }

    #[test]
    fn star5_values() {
        let h = star5();
        let p: PipelineParams<f64> = params_for(&h, 3).unwrap();
        assert_eq!(p.t, 1);
        let expect = BigRational::one() / (int(1536 * 2 * 125) * pow2(2 * 25 + 5));
        assert_eq!(p.lambda, expect);
        let embed = BigRational::one() / (int(24 * 125) * pow2(55));
        assert_eq!(p.lambda_embed, embed);
        assert!(p.m2 <= int(16 * 5));
        assert!(p.epsilon > 0.0 && p.epsilon < 1.0 && p.epsilon.is_finite());
        assert!(p.c_b > BigRational::zero() && p.c_b < BigRational::one());
        // M1 from its definition
        let sq: usize = p.k.iter().map(|k| k * k).sum();
        assert_eq!(p.m1, int(24) * pow2(sq + p.g) / &p.c2);
    }

    #[test]
    fn epsilon_formula() {
        let h = star5();
        let p: PipelineParams<f64> =
            params_for(&h, 3).unwrap().with_constants(rational(1, 4), rational(1, 2));
        let m1 = p.m1.numer().to_string().parse::<f64>().unwrap()
            / p.m1.denom().to_string().parse::<f64>().unwrap();
        let m2 = 4.0 * p.w.iter().copied().max().unwrap() as f64 * 4.0;
        let expect = (1.0 + 1.0 / (m2 - 1.0)).ln() / m1.ln();
        assert!((p.epsilon - expect).abs() < 1e-12);
        let q: PipelineParams<f32> = params_for(&h, 3).unwrap();
        assert!(q.epsilon > 0.0);
    }

    #[test]
    fn not_a_galaxy() {
        assert!(matches!(
            params_for::<f64>(&crate::tournament::gen_c5(), 1),
            Err(PipelineError::NotAGalaxy)
        ));
    }

    #[test]
    fn lambda_override_feeds_embedding() {
        let p: PipelineParams<f64> = params_for(&star5(), 3).unwrap().with_lambda(rational(1, 100));
        // the m-sequence slack 64 t^2 (t+1) lambda equals lambda_embed
        assert_eq!(int(64 * 2) * &p.lambda, rational(1, 100));
    }
}
