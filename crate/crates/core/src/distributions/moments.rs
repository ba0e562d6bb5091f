use crate::flexscript::{DistributionExpr, Family};
use crate::scalar::Real;

fn gamma_fn<T: Real>(x: T) -> T {
    T::from_f64_lossy(libm::tgamma(x.to_f64_lossy()))
}

fn args<T: Real>(expr: &DistributionExpr) -> Vec<T> {
    expr.args.iter().map(|&a| T::from_f64_lossy(a)).collect()
}

/// Mean of the (untruncated) distribution.
pub fn analytic_mean<T: Real>(expr: &DistributionExpr) -> T {
    let a = args::<T>(expr);
    let two = T::one() + T::one();
    let three = two + T::one();
    match expr.family {
        Family::Constant | Family::Exponential | Family::Normal | Family::Poisson => a[0],
        Family::Triangular => (a[0] + a[1] + a[2]) / three,
        Family::Uniform => (a[0] + a[1]) / two,
        Family::Lognormal => (a[0] + a[1] * a[1] / two).exp(),
        Family::Weibull => a[1] * gamma_fn(T::one() + T::one() / a[0]),
        Family::Gamma => a[0] * a[1],
    }
}

/// Variance of the (untruncated) distribution.
pub fn analytic_variance<T: Real>(expr: &DistributionExpr) -> T {
    let a = args::<T>(expr);
    let two = T::one() + T::one();
    match expr.family {
        Family::Constant => T::zero(),
        Family::Exponential => a[0] * a[0],
        Family::Normal => a[1] * a[1],
        Family::Poisson => a[0],
        Family::Triangular => {
            let (lo, m, hi) = (a[0], a[1], a[2]);
            (lo * lo + m * m + hi * hi - lo * m - lo * hi - m * hi) / T::from_f64_lossy(18.0)
        }
        Family::Uniform => (a[1] - a[0]) * (a[1] - a[0]) / T::from_f64_lossy(12.0),
        Family::Lognormal => {
            let s2 = a[1] * a[1];
            (s2.exp() - T::one()) * (two * a[0] + s2).exp()
        }
        Family::Weibull => {
            let g1 = gamma_fn(T::one() + T::one() / a[0]);
            let g2 = gamma_fn(T::one() + two / a[0]);
            a[1] * a[1] * (g2 - g1 * g1)
        }
        Family::Gamma => a[0] * a[1] * a[1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexscript::parse_distribution;

    fn mean(s: &str) -> f64 {
        analytic_mean(&parse_distribution(s).unwrap())
    }

    fn var(s: &str) -> f64 {
        analytic_variance(&parse_distribution(s).unwrap())
    }

    #[test]
    fn closed_form_means() {
        assert_eq!(mean("uniform(2, 6)"), 4.0);
        assert_eq!(mean("gamma(3, 2)"), 6.0);
        assert_eq!(mean("triangular(2, 4, 9)"), 5.0);
        assert_eq!(mean("exponential(10)"), 10.0);
        assert_eq!(mean("poisson(4)"), 4.0);
        // exp(0 + 0.5^2 / 2)
        assert!((mean("lognormal(0, 0.5)") - 0.125f64.exp()).abs() < 1e-15);
        assert!((mean("lognormal(0, 0.5)") - 1.1331).abs() < 1e-4);
        // Weibull with shape 1 is an exponential with mean λ.
        assert!((mean("weibull(1, 4)") - 4.0).abs() < 1e-12);
        // shape 2: λ·√π/2
        assert!((mean("weibull(2, 1)") - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_variances() {
        assert_eq!(var("constant(7)"), 0.0);
        assert_eq!(var("exponential(10)"), 100.0);
        assert_eq!(var("normal(5, 2)"), 4.0);
        assert!((var("uniform(0, 12)") - 12.0).abs() < 1e-12);
        assert!((var("weibull(1, 3)") - 9.0).abs() < 1e-10);
        assert_eq!(var("gamma(3, 2)"), 12.0);
        // Symmetric triangular on [0, 6] with mode 3: 27/18.
        assert!((var("triangular(0, 3, 6)") - 1.5).abs() < 1e-12);
    }

    #[test]
    fn generic_over_precision() {
        let d = parse_distribution("gamma(3, 2)").unwrap();
        assert_eq!(analytic_mean::<f32>(&d), 6.0f32);
        assert_eq!(analytic_variance::<f32>(&d), 12.0f32);
    }
}
