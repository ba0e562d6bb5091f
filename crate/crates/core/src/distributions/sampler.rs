use std::marker::PhantomData;

use rand::distr::Uniform;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal, Normal, Poisson, Triangular, Weibull};

use crate::flexscript::{DistributionExpr, Family};
use crate::scalar::Real;

/// Deterministic generator for substream `stream` of `seed`.
///
/// Distinct streams of the same seed are disjoint ChaCha keystreams, so
/// per-object streams never alias.
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
enum Variate {
    Fixed(f64),
    Exp(Exp<f64>),
    Normal(Normal<f64>),
    Triangular(Triangular<f64>),
    Uniform(Uniform<f64>),
    LogNormal(LogNormal<f64>),
    Weibull(Weibull<f64>),
    Gamma(Gamma<f64>),
    Poisson(Poisson<f64>),
}

impl Variate {
    // Arguments were validated when the expression was parsed or built.
    fn compile(expr: &DistributionExpr) -> Variate {
        let a = &expr.args;
        let bad = || Variate::Fixed(f64::NAN);
        match expr.family {
            Family::Constant => Variate::Fixed(a[0]),
            Family::Exponential => Exp::new(1.0 / a[0]).map(Variate::Exp).unwrap_or_else(|_| bad()),
            Family::Normal => Normal::new(a[0], a[1])
                .map(Variate::Normal)
                .unwrap_or_else(|_| bad()),
            Family::Triangular if a[0] == a[2] => Variate::Fixed(a[0]),
            Family::Triangular => Triangular::new(a[0], a[2], a[1])
                .map(Variate::Triangular)
                .unwrap_or_else(|_| bad()),
            Family::Uniform if a[0] == a[1] => Variate::Fixed(a[0]),
            Family::Uniform => Uniform::new(a[0], a[1])
                .map(Variate::Uniform)
                .unwrap_or_else(|_| bad()),
            Family::Lognormal => LogNormal::new(a[0], a[1])
                .map(Variate::LogNormal)
                .unwrap_or_else(|_| bad()),
            Family::Weibull => Weibull::new(a[1], a[0])
                .map(Variate::Weibull)
                .unwrap_or_else(|_| bad()),
            Family::Gamma => Gamma::new(a[0], a[1])
                .map(Variate::Gamma)
                .unwrap_or_else(|_| bad()),
            Family::Poisson => Poisson::new(a[0].min(Poisson::<f64>::MAX_LAMBDA))
                .map(Variate::Poisson)
                .unwrap_or_else(|_| bad()),
        }
    }
}

/// A seeded stream of nonnegative variates for one distribution expression.
#[derive(Debug, Clone)]
pub struct Sampler<T> {
    expr: DistributionExpr,
    variate: Variate,
    rng: ChaCha8Rng,
    _scalar: PhantomData<T>,
}

impl<T: Real> Sampler<T> {
    pub fn new(expr: DistributionExpr, seed: u64, stream: u64) -> Self {
        let variate = Variate::compile(&expr);
        Sampler {
            expr,
            variate,
            rng: substream_rng(seed, stream),
            _scalar: PhantomData,
        }
    }

    pub fn expr(&self) -> &DistributionExpr {
        &self.expr
    }

    /// Next variate, clamped at zero. NaN only for expressions that failed
    /// validation.
    pub fn sample(&mut self) -> T {
        let rng = &mut self.rng;
        let v = match &self.variate {
            Variate::Fixed(c) => *c,
            Variate::Exp(d) => d.sample(rng),
            Variate::Normal(d) => d.sample(rng),
            Variate::Triangular(d) => d.sample(rng),
            Variate::Uniform(d) => d.sample(rng),
            Variate::LogNormal(d) => d.sample(rng),
            Variate::Weibull(d) => d.sample(rng),
            Variate::Gamma(d) => d.sample(rng),
            Variate::Poisson(d) => d.sample(rng),
        };
        T::from_f64_lossy(if v < 0.0 { 0.0 } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexscript::parse_distribution;
    use rand::RngCore;

    fn sampler(s: &str, seed: u64) -> Sampler<f64> {
        Sampler::new(parse_distribution(s).unwrap(), seed, 0)
    }

    #[test]
    fn constant_is_constant() {
        let mut s = sampler("constant(7)", 1);
        assert!((0..100).all(|_| s.sample() == 7.0));
    }

    #[test]
    fn negative_values_are_clamped() {
        let mut s = sampler("normal(0, 1)", 3);
        let xs: Vec<f64> = (0..10_000).map(|_| s.sample()).collect();
        assert!(xs.iter().all(|&x| x >= 0.0));
        assert!(xs.iter().filter(|&&x| x == 0.0).count() > 4_000);
        let mut c = sampler("constant(-2)", 0);
        assert_eq!(c.sample(), 0.0);
    }

    #[test]
    fn poisson_is_integer_valued() {
        let mut s = sampler("poisson(3.5)", 9);
        assert!((0..1000).all(|_| {
            let x = s.sample();
            x >= 0.0 && x.fract() == 0.0
        }));
    }

    #[test]
    fn degenerate_bounds() {
        assert_eq!(sampler("uniform(3, 3)", 0).sample(), 3.0);
        assert_eq!(sampler("triangular(4, 4, 4)", 0).sample(), 4.0);
        assert_eq!(sampler("normal(5, 0)", 0).sample(), 5.0);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = sampler("gamma(2, 3)", 11);
        let mut b = sampler("gamma(2, 3)", 11);
        for _ in 0..10_000 {
            assert_eq!(a.sample().to_bits(), b.sample().to_bits());
        }
    }

    #[test]
    fn substreams_do_not_alias() {
        let draw = |stream| {
            let mut r = substream_rng(42, stream);
            (0..256).map(|_| r.next_u64()).collect::<Vec<_>>()
        };
        let streams: Vec<Vec<u64>> = (0..16).map(draw).collect();
        for i in 0..streams.len() {
            for j in i + 1..streams.len() {
                let shared = streams[i].iter().filter(|x| streams[j].contains(x)).count();
                assert_eq!(shared, 0, "streams {i} and {j} overlap");
            }
        }
    }

    #[test]
    fn single_precision_stream_matches_double() {
        let expr = parse_distribution("exponential(10)").unwrap();
        let mut a = Sampler::<f32>::new(expr.clone(), 5, 2);
        let mut b = Sampler::<f64>::new(expr, 5, 2);
        for _ in 0..100 {
            assert_eq!(a.sample(), b.sample() as f32);
        }
    }
}
