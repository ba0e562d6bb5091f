//! Random variates, closed-form moments and a moment-based fit check for the
//! distribution families used by sources and machines.
//!
//! | family | arguments | mean | variance |
//! |---|---|---|---|
//! | `constant(c)` | value | c | 0 |
//! | `exponential(b)` | mean b | b | b² |
//! | `normal(μ, σ)` | mean, std dev | μ | σ² |
//! | `triangular(a, m, b)` | min, mode, max | (a+m+b)/3 | (a²+m²+b²−am−ab−mb)/18 |
//! | `uniform(a, b)` | min, max | (a+b)/2 | (b−a)²/12 |
//! | `lognormal(μℓ, σℓ)` | log-mean, log-sd | exp(μℓ+σℓ²/2) | (exp(σℓ²)−1)·exp(2μℓ+σℓ²) |
//! | `weibull(k, λ)` | shape, scale | λΓ(1+1/k) | λ²(Γ(1+2/k) − Γ(1+1/k)²) |
//! | `gamma(α, θ)` | shape, scale | αθ | αθ² |
//! | `poisson(ν)` | mean | ν | ν |
//!
//! Moments are those of the untruncated family. Sampled durations are clamped
//! at zero, which shifts the mean of normals with small μ/σ.

mod fit;
mod moments;
mod sampler;

pub use fit::{fit_validate, FitError, FitReport, DEFAULT_FIT_TOLERANCE, MIN_FIT_SAMPLES};
pub use moments::{analytic_mean, analytic_variance};
pub use sampler::{substream_rng, Sampler};
