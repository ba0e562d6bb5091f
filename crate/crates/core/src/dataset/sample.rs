use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{GenConfig, IndustryProfile, ShapeRanges, MAX_MACHINES};
use super::spec::{Automation, Constraints, GenSpec, LayoutCategory, LayoutType};
use super::DatasetError;
use crate::distributions::analytic_mean;
use crate::flexscript::{DistributionExpr, Family};

/// Mean interarrival time is kept at least this multiple of the slowest
/// machine's mean service time.
pub const STABILITY_MARGIN: f64 = 1.05;

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn positive2(x: f64) -> f64 {
    round2(x).max(0.01)
}

fn uniform_in(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, values: &[T], weights: &[f64]) -> T {
    let index = WeightedIndex::new(weights).expect("validated marginal weights");
    values[index.sample(rng)]
}

/// Arguments for `family` whose mean is (up to rounding to two decimals)
/// `mean`. Spread parameters are drawn from `shape`.
pub fn dist_with_mean(
    family: Family,
    mean: f64,
    shape: &ShapeRanges,
    rng: &mut ChaCha8Rng,
) -> DistributionExpr {
    let args = match family {
        Family::Constant | Family::Exponential | Family::Poisson => vec![positive2(mean)],
        Family::Normal => {
            let cv = uniform_in(rng, shape.normal_cv);
            vec![positive2(mean), round2(cv * mean)]
        }
        Family::Triangular => {
            let w = uniform_in(rng, shape.bounded_half_width);
            vec![positive2(mean * (1.0 - w)), positive2(mean), positive2(mean * (1.0 + w))]
        }
        Family::Uniform => {
            let w = uniform_in(rng, shape.bounded_half_width);
            vec![positive2(mean * (1.0 - w)), positive2(mean * (1.0 + w))]
        }
        Family::Lognormal => {
            let sigma = positive2(uniform_in(rng, shape.lognormal_sigma));
            vec![round2(mean.ln() - sigma * sigma / 2.0), sigma]
        }
        Family::Weibull => {
            let k = positive2(uniform_in(rng, shape.weibull_shape));
            vec![k, positive2(mean / libm::tgamma(1.0 + 1.0 / k))]
        }
        Family::Gamma => {
            let alpha = positive2(uniform_in(rng, shape.gamma_shape));
            vec![alpha, positive2(mean / alpha)]
        }
    };
    DistributionExpr::new(family, args).expect("derived arguments satisfy family bounds")
}

fn resolve_industry<'c>(
    config: &'c GenConfig,
    constraints: &Constraints,
    rng: &mut ChaCha8Rng,
) -> Result<&'c IndustryProfile, DatasetError> {
    if let Some(name) = &constraints.industry {
        return config.industry(name).ok_or_else(|| DatasetError::InvalidConstraint {
            layer: "Industry",
            value: name.clone(),
        });
    }
    let weights = GenConfig::weights(
        &config.marginals.industry,
        config.industries.iter().map(|p| p.name.as_str()),
    );
    let index = WeightedIndex::new(&weights).expect("validated marginal weights");
    Ok(&config.industries[index.sample(rng)])
}

fn invalid(layer: &'static str, value: impl ToString) -> DatasetError {
    DatasetError::InvalidConstraint {
        layer,
        value: value.to_string(),
    }
}

/// Draws one point of the design space. The result depends only on `seed`,
/// `constraints` and `config`.
pub fn sample_spec(
    seed: u64,
    constraints: &Constraints,
    config: &GenConfig,
) -> Result<GenSpec, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = &config.marginals;

    let layout_type = match constraints.layout_type {
        Some(v) => v,
        None => pick(
            &mut rng,
            LayoutType::ALL,
            &GenConfig::weights(&m.layout_type, LayoutType::ALL.iter().map(|v| v.as_str())),
        ),
    };
    let automation = match constraints.automation {
        Some(v) => v,
        None => pick(
            &mut rng,
            Automation::ALL,
            &GenConfig::weights(&m.automation, Automation::ALL.iter().map(|v| v.as_str())),
        ),
    };
    let industry = resolve_industry(config, constraints, &mut rng)?;
    let layout_category = match constraints.layout_category {
        Some(v) => v,
        None => pick(
            &mut rng,
            LayoutCategory::ALL,
            &GenConfig::weights(
                &m.layout_category,
                LayoutCategory::ALL.iter().map(|v| v.as_str()),
            ),
        ),
    };

    let floor = layout_category.min_machines();
    let n_machines = match (constraints.n_machines, &constraints.machine_families) {
        (Some(n), Some(f)) if f.len() != n => {
            return Err(invalid("MachineFamilies", format!("{} families for {n} machines", f.len())))
        }
        (Some(n), _) => n,
        (None, Some(f)) => f.len(),
        (None, None) => {
            let lo = config.machines.min.max(floor);
            let hi = config.machines.max.max(lo);
            rng.random_range(lo..=hi)
        }
    };
    if n_machines < floor || n_machines > MAX_MACHINES {
        return Err(invalid(
            "NMachines",
            format!("{n_machines} (a {layout_category} layout takes {floor} to {MAX_MACHINES})"),
        ));
    }

    let source_family = match constraints.source_family {
        Some(f) if Family::ARRIVAL.contains(&f) => f,
        Some(f) => return Err(invalid("SourceFamily", f)),
        None => Family::ARRIVAL[rng.random_range(0..Family::ARRIVAL.len())],
    };
    let machine_families: Vec<Family> = match &constraints.machine_families {
        Some(f) => f.clone(),
        None => (0..n_machines)
            .map(|_| Family::SERVICE[rng.random_range(0..Family::SERVICE.len())])
            .collect(),
    };

    let machine_dists: Vec<DistributionExpr> = machine_families
        .iter()
        .map(|&family| {
            let mean = uniform_in(&mut rng, industry.service_mean);
            dist_with_mean(family, mean, &config.shape, &mut rng)
        })
        .collect();
    let slowest = machine_dists
        .iter()
        .map(analytic_mean::<f64>)
        .fold(0.0, f64::max);
    // One extra hundredth absorbs rounding of the arrival arguments.
    let floor_mean = (STABILITY_MARGIN * slowest * 100.0).ceil() / 100.0 + 0.01;
    let arrival_mean = uniform_in(&mut rng, industry.arrival_mean).max(floor_mean);
    let source_dist = dist_with_mean(source_family, arrival_mean, &config.shape, &mut rng);

    let travel_speed = match automation {
        Automation::Manual => 0.0,
        a => positive2(config.travel_speed(a, industry)),
    };

    let spec = GenSpec {
        layout_type,
        automation,
        industry: industry.name.clone(),
        layout_category,
        n_machines,
        source_dist,
        machine_dists,
        travel_speed,
        seed,
    };
    spec.check()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::analytic_mean;

    fn config() -> GenConfig {
        GenConfig::default()
    }

    #[test]
    fn same_seed_same_spec() {
        let c = config();
        let a = sample_spec(5, &Constraints::default(), &c).unwrap();
        assert_eq!(a, sample_spec(5, &Constraints::default(), &c).unwrap());
        assert_ne!(a, sample_spec(6, &Constraints::default(), &c).unwrap());
    }

    #[test]
    fn fully_constrained_layers_are_kept() {
        let c = config();
        let k = Constraints {
            layout_type: Some(LayoutType::Conveyor),
            automation: Some(Automation::Agv),
            industry: Some("photomask".into()),
            layout_category: Some(LayoutCategory::UShaped),
            n_machines: Some(3),
            source_family: Some(Family::Uniform),
            machine_families: Some(vec![Family::Gamma, Family::Weibull, Family::Poisson]),
        };
        let s = sample_spec(0, &k, &c).unwrap();
        assert_eq!(s.layout_type, LayoutType::Conveyor);
        assert_eq!(s.automation, Automation::Agv);
        assert_eq!(s.industry, "photomask");
        assert_eq!(s.layout_category, LayoutCategory::UShaped);
        assert_eq!(
            s.signature(),
            vec![Family::Uniform, Family::Gamma, Family::Weibull, Family::Poisson]
        );
    }

    #[test]
    fn invalid_constraints() {
        let c = config();
        let cases = [
            Constraints {
                industry: Some("atlantis".into()),
                ..Default::default()
            },
            Constraints {
                source_family: Some(Family::Gamma),
                ..Default::default()
            },
            Constraints {
                layout_category: Some(LayoutCategory::Parallel),
                n_machines: Some(1),
                ..Default::default()
            },
            Constraints {
                n_machines: Some(7),
                ..Default::default()
            },
            Constraints {
                n_machines: Some(2),
                machine_families: Some(vec![Family::Constant]),
                ..Default::default()
            },
        ];
        for k in cases {
            assert!(
                matches!(sample_spec(1, &k, &c), Err(DatasetError::InvalidConstraint { .. })),
                "{k:?}"
            );
        }
    }

    #[test]
    fn arrivals_outpace_slowest_machine() {
        let c = config();
        for seed in 0..2000 {
            let s = sample_spec(seed, &Constraints::default(), &c).unwrap();
            let slowest = s.machine_dists.iter().map(analytic_mean::<f64>).fold(0.0, f64::max);
            let arrival: f64 = analytic_mean(&s.source_dist);
            assert!(arrival >= STABILITY_MARGIN * slowest, "seed {seed}: {s:?}");
            assert!((1..=5).contains(&s.n_machines));
        }
    }

    #[test]
    fn derived_arguments_hit_target_mean() {
        let c = config();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for family in Family::ALL {
            for &mean in &[1.0, 7.3, 42.0] {
                let d = dist_with_mean(family, mean, &c.shape, &mut rng);
                let got: f64 = analytic_mean(&d);
                assert!((got - mean).abs() / mean < 0.03, "{d} has mean {got}, wanted {mean}");
            }
        }
    }
}
