use thiserror::Error;

/// Errors raised by posit operations that have a failure mode outside the
/// in-band NaR value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositError {
    #[error("invalid posit configuration <{n},{es}>: need 3 <= n <= 64 and 0 <= es <= n-3")]
    InvalidConfig { n: u32, es: u32 },

    #[error("operands use different configurations: <{a_n},{a_es}> vs <{b_n},{b_es}>")]
    ConfigMismatch {
        a_n: u32,
        a_es: u32,
        b_n: u32,
        b_es: u32,
    },

    #[error("pattern {bits:#x} does not fit in {n} bits")]
    PatternTooWide { bits: u64, n: u32 },

    #[error("NaR has no ordering")]
    Unordered,

    #[error("<{n},{es}> exceeds the {limit} bound for this operation")]
    Capacity {
        n: u32,
        es: u32,
        limit: &'static str,
    },

    #[error("fast sigmoid needs es = 0, got es = {es}")]
    FastSigmoidNeedsEsZero { es: u32 },

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("quire guard bits exhausted")]
    QuireOverflow,

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, PositError>;
