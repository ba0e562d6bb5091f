use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lexer::{self, Tok};

/// The nine distribution families available for arrival and service times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Constant,
    Exponential,
    Normal,
    Triangular,
    Uniform,
    Lognormal,
    Weibull,
    Gamma,
    Poisson,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Constant,
        Family::Exponential,
        Family::Normal,
        Family::Triangular,
        Family::Uniform,
        Family::Lognormal,
        Family::Weibull,
        Family::Gamma,
        Family::Poisson,
    ];

    /// Families a source may use for its interarrival time.
    pub const ARRIVAL: [Family; 5] = [
        Family::Constant,
        Family::Exponential,
        Family::Normal,
        Family::Triangular,
        Family::Uniform,
    ];

    /// Families a machine may use for its service time.
    pub const SERVICE: [Family; 9] = Self::ALL;

    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Exponential => "exponential",
            Family::Normal => "normal",
            Family::Triangular => "triangular",
            Family::Uniform => "uniform",
            Family::Lognormal => "lognormal",
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::Poisson => "poisson",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Family::Constant | Family::Exponential | Family::Poisson => 1,
            Family::Normal
            | Family::Uniform
            | Family::Lognormal
            | Family::Weibull
            | Family::Gamma => 2,
            Family::Triangular => 3,
        }
    }

    /// Whether a variate of this family can be negative before clamping.
    pub fn can_be_negative(self) -> bool {
        matches!(
            self,
            Family::Constant | Family::Normal | Family::Triangular | Family::Uniform
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| DistError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),
    #[error("`{token}`: {family} takes {expected} argument(s), found {found}")]
    ArityMismatch {
        token: String,
        family: Family,
        expected: usize,
        found: usize,
    },
    #[error("`{token}`: {reason}")]
    ArgumentOutOfRange { token: String, reason: String },
    #[error("malformed distribution expression `{0}`")]
    Syntax(String),
}

/// A distribution call such as `triangular(2, 4, 9)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionExpr {
    pub family: Family,
    pub args: Vec<f64>,
}

impl DistributionExpr {
    /// Builds and validates an expression.
    pub fn new(family: Family, args: Vec<f64>) -> Result<Self, DistError> {
        let expr = DistributionExpr { family, args };
        expr.validate()?;
        Ok(expr)
    }

    pub fn constant(c: f64) -> Self {
        DistributionExpr {
            family: Family::Constant,
            args: vec![c],
        }
    }

    /// Checks arity and argument ranges.
    pub fn validate(&self) -> Result<(), DistError> {
        let token = self.to_string();
        let expected = self.family.arity();
        if self.args.len() != expected {
            return Err(DistError::ArityMismatch {
                token,
                family: self.family,
                expected,
                found: self.args.len(),
            });
        }
        let out_of_range = |reason: &str| DistError::ArgumentOutOfRange {
            token: token.clone(),
            reason: reason.to_string(),
        };
        if self.args.iter().any(|a| !a.is_finite()) {
            return Err(out_of_range("arguments must be finite"));
        }
        let a = &self.args;
        match self.family {
            Family::Constant => {}
            Family::Exponential if a[0] <= 0.0 => return Err(out_of_range("mean must be > 0")),
            Family::Normal if a[1] < 0.0 => return Err(out_of_range("sigma must be >= 0")),
            Family::Triangular if !(a[0] <= a[1] && a[1] <= a[2]) => {
                return Err(out_of_range("requires min <= mode <= max"))
            }
            Family::Uniform if a[0] > a[1] => return Err(out_of_range("requires min <= max")),
            Family::Lognormal if a[1] <= 0.0 => {
                return Err(out_of_range("log-scale sigma must be > 0"))
            }
            Family::Weibull if a[0] <= 0.0 || a[1] <= 0.0 => {
                return Err(out_of_range("shape and scale must be > 0"))
            }
            Family::Gamma if a[0] <= 0.0 || a[1] <= 0.0 => {
                return Err(out_of_range("shape and scale must be > 0"))
            }
            Family::Poisson if a[0] <= 0.0 => return Err(out_of_range("mean must be > 0")),
            _ => {}
        }
        Ok(())
    }

    /// Argument-wise equality under a relative tolerance.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.family == other.family
            && self.args.len() == other.args.len()
            && self
                .args
                .iter()
                .zip(&other.args)
                .all(|(a, b)| crate::scalar::approx_eq_rel(*a, *b, rel_tol))
    }
}

impl fmt::Display for DistributionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for DistributionExpr {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_distribution(s)
    }
}

/// Parses a standalone distribution call like `exponential(10)`.
///
/// The family name is matched case-insensitively.
pub fn parse_distribution(expr: &str) -> Result<DistributionExpr, DistError> {
    let lexed = lexer::lex(expr);
    if lexed.error.is_some() {
        return Err(DistError::Syntax(expr.trim().to_string()));
    }
    let toks: Vec<Tok> = lexed.tokens.into_iter().map(|t| t.tok).collect();
    match parse_call_tokens(&toks) {
        Some((dist, used)) if used == toks.len() => dist,
        _ => Err(DistError::Syntax(expr.trim().to_string())),
    }
}

/// Parses `ident ( num, ... )` at the start of `toks`. Returns `None` when the
/// tokens do not have call shape, otherwise the validated expression and the
/// number of tokens consumed.
pub(crate) fn parse_call_tokens(toks: &[Tok]) -> Option<(Result<DistributionExpr, DistError>, usize)> {
    let name = match toks.first()? {
        Tok::Ident(name) => name,
        _ => return None,
    };
    if toks.get(1)? != &Tok::LParen {
        return None;
    }
    let mut args = Vec::new();
    let mut i = 2;
    if toks.get(i)? == &Tok::RParen {
        i += 1;
    } else {
        loop {
            match toks.get(i)? {
                Tok::Num(v) => args.push(*v),
                _ => return None,
            }
            i += 1;
            match toks.get(i)? {
                Tok::Comma => i += 1,
                Tok::RParen => {
                    i += 1;
                    break;
                }
                _ => return None,
            }
        }
    }
    let result = name
        .parse::<Family>()
        .and_then(|family| DistributionExpr::new(family, args));
    Some((result, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table_examples() {
        assert_eq!(
            parse_distribution("exponential(10)").unwrap(),
            DistributionExpr {
                family: Family::Exponential,
                args: vec![10.0]
            }
        );
        assert_eq!(
            parse_distribution("weibull(1.5, 4.0)").unwrap(),
            DistributionExpr {
                family: Family::Weibull,
                args: vec![1.5, 4.0]
            }
        );
    }

    #[test]
    fn family_is_case_insensitive() {
        let d = parse_distribution("  Normal(5, 1) ").unwrap();
        assert_eq!(d.family, Family::Normal);
        assert_eq!(d.to_string(), "normal(5, 1)");
    }

    #[test]
    fn triangular_mode_above_max_is_rejected() {
        match parse_distribution("triangular(2, 5, 3)") {
            Err(DistError::ArgumentOutOfRange { token, .. }) => {
                assert_eq!(token, "triangular(2, 5, 3)")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_variants() {
        assert!(matches!(
            parse_distribution("beta(1, 2)"),
            Err(DistError::UnknownFamily(t)) if t == "beta"
        ));
        assert!(matches!(
            parse_distribution("normal(1)"),
            Err(DistError::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            parse_distribution("exponential(0)"),
            Err(DistError::ArgumentOutOfRange { .. })
        ));
        assert!(matches!(
            parse_distribution("normal(5, -1)"),
            Err(DistError::ArgumentOutOfRange { .. })
        ));
        assert!(matches!(
            parse_distribution("exponential(10"),
            Err(DistError::Syntax(_))
        ));
        assert!(parse_distribution("normal(5, 0)").is_ok());
        assert!(parse_distribution("uniform(3, 3)").is_ok());
    }

    #[test]
    fn arity_table_covers_both_tables() {
        // 5 arrival slots + 9 service slots, 9 distinct families.
        let slots: Vec<Family> = Family::ARRIVAL
            .iter()
            .chain(Family::SERVICE.iter())
            .copied()
            .collect();
        assert_eq!(slots.len(), 14);
        let mut distinct = slots.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 9);
        let shared = Family::ARRIVAL
            .iter()
            .filter(|f| Family::SERVICE.contains(f))
            .count();
        assert_eq!(shared, 5);
        let arities: Vec<usize> = Family::ALL.iter().map(|f| f.arity()).collect();
        assert_eq!(arities, vec![1, 1, 2, 3, 2, 2, 2, 2, 1]);
    }

    #[test]
    fn display_uses_shortest_round_trip() {
        let d = DistributionExpr::new(Family::Uniform, vec![0.1, 2.0]).unwrap();
        assert_eq!(d.to_string(), "uniform(0.1, 2)");
        assert_eq!(parse_distribution(&d.to_string()).unwrap(), d);
    }
}
