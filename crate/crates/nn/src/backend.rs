//! Runtime choice of number format, activation and accumulation.

use std::fmt;
use std::str::FromStr;

use posit_core::{DotMode, PositConfig};
use serde::{Deserialize, Serialize};

use crate::error::{NnError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Binary64,
    Binary32,
    Posit(PositConfig),
    /// Binary32 products, posit sums.
    Hybrid(PositConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    FastSigmoid,
    ExactSigmoid,
    Relu,
}

/// Number format, activation and dot-product mode used for every scalar
/// operation of a network.
///
/// Text form: `binary64 | binary32 | posit:n,es | hybrid:n,es`, optionally
/// followed by `:fast`, `:exact` or `:relu` (default `exact`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BackendRepr", into = "BackendRepr")]
pub struct NumericBackend {
    kind: BackendKind,
    activation: Activation,
    dot_mode: DotMode,
}

/// Posit formats with a compiled scalar type.
pub const POSIT_FORMATS: &[(u32, u32)] = &[
    (8, 0),
    (8, 1),
    (8, 2),
    (10, 0),
    (10, 1),
    (10, 2),
    (12, 0),
    (12, 1),
    (12, 2),
    (14, 0),
    (14, 1),
    (14, 2),
    (16, 0),
    (16, 1),
    (16, 2),
    (32, 0),
    (32, 1),
    (32, 2),
];

/// Hybrid formats with a compiled scalar type. Posit sums are widened back
/// to binary32, so only formats whose values binary32 holds exactly qualify.
pub const HYBRID_FORMATS: &[(u32, u32)] = &[
    (8, 0),
    (8, 1),
    (8, 2),
    (10, 0),
    (10, 1),
    (10, 2),
    (12, 0),
    (12, 1),
    (12, 2),
    (14, 0),
    (14, 1),
    (14, 2),
    (16, 0),
    (16, 1),
    (16, 2),
];

/// Evaluates `$body` with `$S` bound to the scalar type of `$backend`,
/// yielding `Result<_>`.
#[macro_export]
macro_rules! with_scalar {
    ($backend:expr, $S:ident => $body:expr) => {{
        use $crate::backend::BackendKind as __Kind;
        use $crate::{Hybrid as __Hybrid, Posit as __Posit};
        match $backend.kind() {
            __Kind::Binary64 => {
                type $S = f64;
                Ok($body)
            }
            __Kind::Binary32 => {
                type $S = f32;
                Ok($body)
            }
            __Kind::Posit(c) => $crate::with_scalar!(@table __Posit, "posit", c, $S => $body,
                [(8 0) (8 1) (8 2) (10 0) (10 1) (10 2) (12 0) (12 1) (12 2)
                 (14 0) (14 1) (14 2) (16 0) (16 1) (16 2) (32 0) (32 1) (32 2)]),
            __Kind::Hybrid(c) => $crate::with_scalar!(@table __Hybrid, "hybrid", c, $S => $body,
                [(8 0) (8 1) (8 2) (10 0) (10 1) (10 2) (12 0) (12 1) (12 2)
                 (14 0) (14 1) (14 2) (16 0) (16 1) (16 2)]),
        }
    }};
    (@table $ty:ident, $kind:literal, $c:expr, $S:ident => $body:expr, [$(($n:literal $es:literal))*]) => {
        match ($c.n(), $c.es()) {
            $(($n, $es) => {
                type $S = $ty<$n, $es>;
                Ok($body)
            })*
            (n, es) => Err($crate::backend::unsupported($kind, n, es)),
        }
    };
}

#[doc(hidden)]
pub fn unsupported(kind: &'static str, n: u32, es: u32) -> NnError {
    let table = if kind == "hybrid" {
        HYBRID_FORMATS
    } else {
        POSIT_FORMATS
    };
    let supported = table
        .iter()
        .map(|(n, es)| format!("<{n},{es}>"))
        .collect::<Vec<_>>()
        .join(" ");
    NnError::UnsupportedFormat {
        kind,
        n,
        es,
        supported,
    }
}

impl NumericBackend {
    pub fn new(kind: BackendKind, activation: Activation, dot_mode: DotMode) -> Result<Self> {
        let backend = NumericBackend {
            kind,
            activation,
            dot_mode,
        };
        let reject = |reason: &str| {
            Err(NnError::Backend {
                spec: backend.to_string(),
                reason: reason.into(),
            })
        };
        match kind {
            BackendKind::Posit(c) if !POSIT_FORMATS.contains(&(c.n(), c.es())) => {
                return Err(unsupported("posit", c.n(), c.es()))
            }
            BackendKind::Hybrid(c) if !HYBRID_FORMATS.contains(&(c.n(), c.es())) => {
                return Err(unsupported("hybrid", c.n(), c.es()))
            }
            _ => {}
        }
        if activation == Activation::FastSigmoid {
            match kind {
                BackendKind::Posit(c) if c.es() == 0 => {}
                BackendKind::Posit(_) => return reject("the fast sigmoid needs es = 0"),
                _ => return reject("the fast sigmoid needs a posit backend"),
            }
        }
        Ok(backend)
    }

    pub fn binary64() -> Self {
        NumericBackend {
            kind: BackendKind::Binary64,
            activation: Activation::ExactSigmoid,
            dot_mode: DotMode::Quire,
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Accumulation mode; only pure posit backends distinguish the two.
    pub fn dot_mode(&self) -> DotMode {
        self.dot_mode
    }

    pub fn with_dot_mode(self, dot_mode: DotMode) -> Self {
        NumericBackend { dot_mode, ..self }
    }

    pub fn is_posit(&self) -> bool {
        matches!(self.kind, BackendKind::Posit(_))
    }
}

impl fmt::Display for NumericBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BackendKind::Binary64 => f.write_str("binary64")?,
            BackendKind::Binary32 => f.write_str("binary32")?,
            BackendKind::Posit(c) => write!(f, "posit:{},{}", c.n(), c.es())?,
            BackendKind::Hybrid(c) => write!(f, "hybrid:{},{}", c.n(), c.es())?,
        }
        match self.activation {
            Activation::ExactSigmoid => Ok(()),
            Activation::FastSigmoid => f.write_str(":fast"),
            Activation::Relu => f.write_str(":relu"),
        }
    }
}

impl FromStr for NumericBackend {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| NnError::Backend {
            spec: s.into(),
            reason: reason.into(),
        };
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let config = |part: Option<&str>| -> Result<PositConfig> {
            let text = part.ok_or_else(|| err("expected `n,es` after the format name"))?;
            text.parse::<PositConfig>().map_err(NnError::from)
        };
        let kind = match head {
            "binary64" => BackendKind::Binary64,
            "binary32" => BackendKind::Binary32,
            "posit" => BackendKind::Posit(config(parts.next())?),
            "hybrid" => BackendKind::Hybrid(config(parts.next())?),
            _ => {
                return Err(err(
                    "expected binary64, binary32, posit:n,es or hybrid:n,es",
                ))
            }
        };
        let activation = match parts.next() {
            None | Some("exact") => Activation::ExactSigmoid,
            Some("fast") => Activation::FastSigmoid,
            Some("relu") => Activation::Relu,
            Some(_) => return Err(err("activation suffix must be fast, exact or relu")),
        };
        if parts.next().is_some() {
            return Err(err("trailing fields"));
        }
        NumericBackend::new(kind, activation, DotMode::Quire)
    }
}

#[derive(Serialize, Deserialize)]
struct BackendRepr {
    spec: String,
    dot_mode: DotMode,
}

impl TryFrom<BackendRepr> for NumericBackend {
    type Error = NnError;

    fn try_from(r: BackendRepr) -> Result<Self> {
        Ok(r.spec.parse::<NumericBackend>()?.with_dot_mode(r.dot_mode))
    }
}

impl From<NumericBackend> for BackendRepr {
    fn from(b: NumericBackend) -> Self {
        BackendRepr {
            spec: b.to_string(),
            dot_mode: b.dot_mode,
        }
    }
}
