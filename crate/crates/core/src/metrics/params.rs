use std::collections::BTreeMap;

use serde::Serialize;

use super::MetricError;
use crate::flexscript::{ParamValue, Script};
use crate::scalar::Scalar;

/// Relative tolerance under which two numeric values count as identical.
pub const PARAM_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamScore<S> {
    pub p_total: usize,
    pub p_match: usize,
    pub pmr: S,
}

/// A reference parameter that was missing or different in the generated script.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamMismatch {
    pub obj_name: String,
    pub param_name: String,
    pub expected: String,
    pub found: Option<String>,
}

/// Last assignment per `(object, parameter)` key.
pub(crate) fn param_map(script: &Script) -> BTreeMap<(&str, &str), &ParamValue> {
    script
        .params
        .iter()
        .map(|p| ((p.obj_name.as_str(), p.param_name.as_str()), &p.value))
        .collect()
}

pub(crate) fn param_mismatches(generated: &Script, truth: &Script) -> Vec<ParamMismatch> {
    let gen = param_map(generated);
    param_map(truth)
        .into_iter()
        .filter_map(|(key, expected)| match gen.get(&key) {
            Some(found) if found.approx_eq(expected, PARAM_REL_TOL) => None,
            found => Some(ParamMismatch {
                obj_name: key.0.to_string(),
                param_name: key.1.to_string(),
                expected: expected.to_string(),
                found: found.map(|v| v.to_string()),
            }),
        })
        .collect()
}

/// Parameter match rate over the reference's parameters. Extra generated
/// parameters are ignored.
pub fn pmr<S: Scalar>(generated: &Script, truth: &Script) -> Result<ParamScore<S>, MetricError> {
    let p_total = param_map(truth).len();
    if p_total == 0 {
        return Err(MetricError::EmptyReference("parameters"));
    }
    let p_match = p_total - param_mismatches(generated, truth).len();
    Ok(ParamScore {
        p_total,
        p_match,
        pmr: S::from_ratio(p_match as u64, p_total as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexscript::parse;

    const TRUTH: &str = r#"
        setparam(Source1, "InterArrivalTime", exponential(10));
        setparam(Processor1, "ProcessTime", triangular(2, 4, 9));
        setparam(Processor1, "SetupTime", constant(1));
        setparam(Operator1, "TravelSpeed", 1.5);
    "#;

    #[test]
    fn exponential_ten_vs_fifteen_mismatch() {
        let t = parse(r#"setparam(Source1,"InterArrivalTime", exponential(10));"#);
        let g = parse(r#"setparam(Source1,"InterArrivalTime", exponential(15));"#);
        let s = pmr::<f64>(&g, &t).unwrap();
        assert_eq!((s.p_match, s.p_total, s.pmr), (0, 1, 0.0));
    }

    #[test]
    fn formatting_differences_match() {
        let t = parse(r#"setparam(Source1,"InterArrivalTime", exponential(10));"#);
        let g = parse(r#"setparam("Source1","InterArrivalTime", EXPONENTIAL(10.0));"#);
        assert_eq!(pmr::<f64>(&g, &t).unwrap().pmr, 1.0);
    }

    #[test]
    fn identity_and_partial() {
        let t = parse(TRUTH);
        assert_eq!(pmr::<f64>(&t, &t).unwrap().pmr, 1.0);
        let g = parse(&TRUTH.replace("triangular(2, 4, 9)", "triangular(2, 4, 10)"));
        let s = pmr::<f64>(&g, &t).unwrap();
        assert_eq!((s.p_match, s.p_total, s.pmr), (3, 4, 0.75));
        let m = param_mismatches(&g, &t);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].found.as_deref(), Some("triangular(2, 4, 10)"));
    }

    #[test]
    fn type_must_match() {
        let t = parse(r#"setparam(P,"ProcessTime", constant(5));"#);
        let g = parse(r#"setparam(P,"ProcessTime", 5);"#);
        assert_eq!(pmr::<f64>(&g, &t).unwrap().p_match, 0);
    }

    #[test]
    fn extra_parameters_do_not_count() {
        let t = parse(TRUTH);
        let g = parse(&format!("{TRUTH} setparam(Queue1, \"Capacity\", 10);"));
        let s = pmr::<f64>(&g, &t).unwrap();
        assert_eq!((s.p_match, s.p_total), (4, 4));
    }

    #[test]
    fn missing_and_empty() {
        let t = parse(TRUTH);
        let s = pmr::<f64>(&parse(""), &t).unwrap();
        assert_eq!(s.pmr, 0.0);
        assert_eq!(
            pmr::<f64>(&t, &parse("")),
            Err(MetricError::EmptyReference("parameters"))
        );
    }
}
