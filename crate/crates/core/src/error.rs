use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("second {second} outside profile of {duration} seconds")]
    OutOfRange { second: u64, duration: u64 },
    #[error("unknown scenario `{name}`; valid names: {}", valid.join(", "))]
    UnknownScenario { name: String, valid: Vec<String> },
    #[error("option `{key}` does not apply to scenario `{scenario}`")]
    NotApplicable { key: String, scenario: String },
    #[error("unknown option `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("slope undefined: need at least two distinct received counts")]
    DegenerateSlope,
}
