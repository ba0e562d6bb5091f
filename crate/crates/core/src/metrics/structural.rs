use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::MetricError;
use crate::flexscript::{Connection, ObjType, Script};
use crate::scalar::Scalar;

/// Weights of the connection and object scores in SVR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvrWeights<S> {
    pub cs: S,
    pub os: S,
}

impl<S: Scalar> Default for SvrWeights<S> {
    /// 0.6 / 0.4.
    fn default() -> Self {
        SvrWeights {
            cs: S::from_ratio(3, 5),
            os: S::from_ratio(2, 5),
        }
    }
}

impl<S: Scalar> SvrWeights<S> {
    pub fn new(cs: S, os: S) -> Result<Self, MetricError> {
        let (c, o) = (cs.to_f64_lossy(), os.to_f64_lossy());
        if !(c >= 0.0 && o >= 0.0 && ((c + o) - 1.0).abs() <= 1e-9) {
            return Err(MetricError::InvalidWeights { cs: c, os: o });
        }
        Ok(SvrWeights { cs, os })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralScore<S> {
    pub cs: S,
    pub os: S,
    pub svr: S,
    /// N: distinct reference connections.
    pub n_truth_connections: usize,
    /// M: reference connections reproduced.
    pub m_matched_connections: usize,
    /// K: objects declared by the reference.
    pub k_required_objects: usize,
    /// K': reference objects declared with the right name and type.
    pub k_valid_objects: usize,
}

pub(crate) fn connection_set(script: &Script) -> BTreeSet<&Connection> {
    script.connections.iter().collect()
}

/// `(CS, M, N)`.
pub fn connection_score<S: Scalar>(
    generated: &Script,
    truth: &Script,
) -> Result<(S, usize, usize), MetricError> {
    let truth_set = connection_set(truth);
    let n = truth_set.len();
    if n == 0 {
        return Err(MetricError::EmptyReference("connections"));
    }
    let generated_set = connection_set(generated);
    let m = truth_set.intersection(&generated_set).count();
    Ok((S::from_ratio(m as u64, n as u64), m, n))
}

pub(crate) fn declared_types(script: &Script) -> HashMap<&str, ObjType> {
    script
        .decls
        .iter()
        .map(|d| (d.obj_name.as_str(), d.obj_type))
        .collect()
}

/// `(OS, K', K)`.
pub fn object_score<S: Scalar>(
    generated: &Script,
    truth: &Script,
) -> Result<(S, usize, usize), MetricError> {
    let truth_types = declared_types(truth);
    let k = truth_types.len();
    if k == 0 {
        return Err(MetricError::EmptyReference("declarations"));
    }
    let generated_types = declared_types(generated);
    let k_valid = truth_types
        .iter()
        .filter(|(name, ty)| generated_types.get(*name) == Some(*ty))
        .count();
    Ok((S::from_ratio(k_valid as u64, k as u64), k_valid, k))
}

/// SVR with the default 0.6 / 0.4 weighting.
pub fn svr<S: Scalar>(cs: S, os: S) -> S {
    svr_weighted(cs, os, SvrWeights::default())
}

pub fn svr_weighted<S: Scalar>(cs: S, os: S, w: SvrWeights<S>) -> S {
    w.cs * cs + w.os * os
}

pub fn structural_score<S: Scalar>(
    generated: &Script,
    truth: &Script,
    weights: SvrWeights<S>,
) -> Result<StructuralScore<S>, MetricError> {
    let (cs, m, n) = connection_score(generated, truth)?;
    let (os, k_valid, k) = object_score(generated, truth)?;
    Ok(StructuralScore {
        cs,
        os,
        svr: svr_weighted(cs, os, weights),
        n_truth_connections: n,
        m_matched_connections: m,
        k_required_objects: k,
        k_valid_objects: k_valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexscript::parse;
    use num_rational::Rational64;

    const TRUTH: &str = r#"
        createobject("/source", "Source1", 0, 0, 0);
        createobject("/queue", "Queue1", 4, 0, 0);
        createobject("/processor", "Processor1", 8, 0, 0);
        createobject("/sink", "Sink1", 12, 0, 0);
        createobject("/operator", "Operator1", 8, -4, 0);
        contextdragconnection(Source1, Queue1, "A");
        contextdragconnection(Queue1, Processor1, "A");
        contextdragconnection(Processor1, Sink1, "A");
        contextdragconnection(Processor1, Operator1, "S");
    "#;

    fn truth() -> Script {
        parse(TRUTH)
    }

    #[test]
    fn identical_connections() {
        let t = truth();
        assert_eq!(connection_score::<f64>(&t, &t).unwrap(), (1.0, 4, 4));
    }

    #[test]
    fn three_of_four_connections() {
        let g = parse(&TRUTH.replace(r#"contextdragconnection(Processor1, Sink1, "A");"#, ""));
        assert_eq!(connection_score::<f64>(&g, &truth()).unwrap(), (0.75, 3, 4));
    }

    #[test]
    fn empty_generated_scores_zero() {
        let g = parse("");
        assert_eq!(connection_score::<f64>(&g, &truth()).unwrap(), (0.0, 0, 4));
        assert_eq!(object_score::<f64>(&g, &truth()).unwrap(), (0.0, 0, 5));
    }

    #[test]
    fn empty_reference_is_an_error() {
        let t = parse(r#"createobject("/sink","K",0,0,0);"#);
        assert_eq!(
            connection_score::<f64>(&t, &t),
            Err(MetricError::EmptyReference("connections"))
        );
        assert_eq!(
            object_score::<f64>(&t, &parse("")),
            Err(MetricError::EmptyReference("declarations"))
        );
    }

    #[test]
    fn duplicates_and_spurious_connections() {
        let g = parse(&format!(
            "{TRUTH} contextdragconnection(Source1, Queue1, \"A\"); contextdragconnection(Queue1, Sink1, \"A\");"
        ));
        assert_eq!(connection_score::<f64>(&g, &truth()).unwrap(), (1.0, 4, 4));
    }

    #[test]
    fn object_name_case_and_type() {
        let t = parse(
            r#"createobject("/source","Source1",0,0,0); createobject("/queue","Queue1",1,0,0);"#,
        );
        let g = parse(
            r#"createobject("/source","source1",0,0,0); createobject("/queue","Queue1",1,0,0);"#,
        );
        assert_eq!(object_score::<f64>(&g, &t).unwrap(), (0.5, 1, 2));
        let g = parse(
            r#"createobject("/queue","Source1",0,0,0); createobject("/queue","Queue1",1,0,0);"#,
        );
        assert_eq!(object_score::<f64>(&g, &t).unwrap(), (0.5, 1, 2));
        assert_eq!(object_score::<f64>(&t, &t).unwrap(), (1.0, 2, 2));
    }

    #[test]
    fn svr_examples() {
        assert_eq!(svr(1.0, 0.5), 0.8);
        assert_eq!(svr(1.0, 1.0), 1.0);
        assert_eq!(svr(0.0, 0.0), 0.0);
        assert_eq!(
            svr(Rational64::from_integer(1), Rational64::new(1, 2)),
            Rational64::new(4, 5)
        );
    }

    #[test]
    fn svr_grid_matches_weighted_sum() {
        for i in 0..=10 {
            for j in 0..=10 {
                let (cs, os) = (i as f64 / 10.0, j as f64 / 10.0);
                assert!((svr(cs, os) - (0.6 * cs + 0.4 * os)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn weights_validation() {
        assert!(SvrWeights::new(0.5, 0.5).is_ok());
        assert!(SvrWeights::new(0.7, 0.4).is_err());
        assert!(SvrWeights::new(-0.1, 1.1).is_err());
        let w = SvrWeights::new(1.0, 0.0).unwrap();
        assert_eq!(svr_weighted(0.25, 1.0, w), 0.25);
    }

    #[test]
    fn structural_bundle() {
        let t = truth();
        let s = structural_score::<Rational64>(&t, &t, SvrWeights::default()).unwrap();
        assert_eq!(s.svr, Rational64::from_integer(1));
        assert_eq!(s.k_required_objects, 5);
    }
}
