//! Run configuration and the error-code contract.

use std::fmt;

use clap::ValueEnum;
use thiserror::Error;

use skewk_core::abgroup::AbGroupError;
use skewk_core::ff::{is_prime, FieldError, DEFAULT_MAX_FIELD_SIZE, HARD_FIELD_LIMIT};
use skewk_core::ktheory::KError;
use skewk_core::oracle::{OracleConfig, OracleError};
use skewk_core::skewring::SkewError;
use skewk_core::ss::SsError;

use crate::grid::GridBounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub max_field_size: u64,
    pub max_oracle_dim: u64,
    pub format: Format,
    pub grid: GridBounds,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_field_size: DEFAULT_MAX_FIELD_SIZE,
            max_oracle_dim: 256,
            format: Format::Text,
            grid: GridBounds::default(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.max_field_size == 0 || self.max_field_size > HARD_FIELD_LIMIT {
            return Err(CliError::invalid(
                "BAD_CONFIG",
                format!("max_field_size must lie in 1..={HARD_FIELD_LIMIT}"),
            ));
        }
        if self.max_oracle_dim == 0 {
            return Err(CliError::invalid("BAD_CONFIG", "max_oracle_dim must be positive"));
        }
        // Zero grid bounds are allowed and give the empty grid.
        if let Some(&p) = self.grid.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(CliError::invalid("NOT_PRIME", format!("grid prime {p} is not prime")));
        }
        Ok(())
    }

    pub fn oracle(&self) -> OracleConfig {
        OracleConfig {
            max_dim: self.max_oracle_dim,
            max_field_size: self.max_field_size,
            ..OracleConfig::default()
        }
    }
}

/// A failure with its one-line code. Validation errors exit 2, findings exit 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.code, self.message)
    }
}

impl CliError {
    pub fn invalid(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
            exit: 2,
        }
    }

    pub fn finding(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
            exit: 1,
        }
    }
}

fn field_code(e: &FieldError) -> &'static str {
    match e {
        FieldError::NonPrime(_) => "NOT_PRIME",
        FieldError::ZeroDegree => "ZERO_PARAMETER",
        FieldError::BoundExceeded { .. } => "FIELD_TOO_LARGE",
        _ => "FIELD_ERROR",
    }
}

fn group_code(e: &AbGroupError) -> &'static str {
    match e {
        AbGroupError::ZeroFactor => "INVALID_GROUP",
        AbGroupError::ShapeMismatch { .. } => "SHAPE_MISMATCH",
        AbGroupError::IncompatibleEntry { .. } => "NOT_A_HOMOMORPHISM",
        AbGroupError::NotBijective => "NOT_BIJECTIVE",
        AbGroupError::MismatchedGroup => "MISMATCHED_GROUP",
        AbGroupError::NotAUnit(_) => "NOT_A_UNIT",
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::invalid(field_code(&e), e.to_string())
    }
}

impl From<AbGroupError> for CliError {
    fn from(e: AbGroupError) -> Self {
        CliError::invalid(group_code(&e), e.to_string())
    }
}

impl From<SkewError> for CliError {
    fn from(e: SkewError) -> Self {
        let code = match &e {
            SkewError::NonPrime(_) => "NOT_PRIME",
            SkewError::ZeroParameter(_) => "ZERO_PARAMETER",
            SkewError::MaschkeViolated { .. } => "MASCHKE_VIOLATED",
            SkewError::IncompatibleAction { .. } => "INCOMPATIBLE_ACTION",
            SkewError::MismatchedGroup => "MISMATCHED_GROUP",
            SkewError::UnknownLabel(_) => "UNKNOWN_LABEL",
            SkewError::DecompositionFailure(_) => {
                return CliError::finding("DECOMPOSITION_FAILURE", e.to_string())
            }
            SkewError::TowerHypothesisViolated { .. } => "TOWER_HYPOTHESIS_VIOLATED",
            SkewError::LevelTooLarge { .. } => "LEVEL_TOO_LARGE",
            SkewError::EqualPrimes(_) => "EQUAL_PRIMES",
            SkewError::Field(f) => field_code(f),
            SkewError::Group(g) => group_code(g),
        };
        CliError::invalid(code, e.to_string())
    }
}

impl From<KError> for CliError {
    fn from(e: KError) -> Self {
        let code = match &e {
            KError::NonPrime(_) => "NOT_PRIME",
            KError::NotPrimePower(_) => "NOT_PRIME_POWER",
            KError::EqualPrimes(_) => "EQUAL_PRIMES",
            KError::TorsionOverflow { .. } => "TORSION_OVERFLOW",
        };
        CliError::invalid(code, e.to_string())
    }
}

impl From<SsError> for CliError {
    fn from(e: SsError) -> Self {
        match e {
            SsError::EmptyWindow { .. } => CliError::invalid("EMPTY_WINDOW", e.to_string()),
            SsError::K(k) => k.into(),
            SsError::Skew(s) => s.into(),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BoundExceeded { .. } => CliError::invalid("ORACLE_BOUND", e.to_string()),
            OracleError::Field(f) => f.into(),
            OracleError::Group(g) => g.into(),
            _ => CliError::finding("ORACLE_FAILURE", e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        assert!(Config::default().validate().is_ok());
        let mut c = Config::default();
        c.max_oracle_dim = 0;
        assert_eq!(c.validate().unwrap_err().code, "BAD_CONFIG");
    }

    #[test]
    fn codes_and_exit_statuses() {
        let e: CliError = SkewError::MaschkeViolated { p: 3, order: 3 }.into();
        assert_eq!((e.code, e.exit), ("MASCHKE_VIOLATED", 2));
        let e: CliError = SsError::K(KError::EqualPrimes(3)).into();
        assert_eq!(e.code, "EQUAL_PRIMES");
        let e: CliError = SkewError::DecompositionFailure("x".into()).into();
        assert_eq!(e.exit, 1);
        assert!(e.to_string().starts_with("error: DECOMPOSITION_FAILURE:"));
    }
}
