use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PositError, Result};

/// The `<n, es>` format descriptor.
///
/// `n` is the total width in bits and `es` the width of the unsigned exponent
/// field. Every derived constant (useed, maxpos, minpos, the NaR pattern) is a
/// function of these two numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct PositConfig {
    n: u32,
    es: u32,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    n: u32,
    es: u32,
}

impl TryFrom<RawConfig> for PositConfig {
    type Error = PositError;
    fn try_from(raw: RawConfig) -> Result<Self> {
        PositConfig::new(raw.n, raw.es)
    }
}

impl From<PositConfig> for RawConfig {
    fn from(cfg: PositConfig) -> Self {
        RawConfig {
            n: cfg.n,
            es: cfg.es,
        }
    }
}

impl PositConfig {
    pub const MAX_BITS: u32 = 64;

    pub fn new(n: u32, es: u32) -> Result<Self> {
        if Self::valid(n, es) {
            Ok(PositConfig { n, es })
        } else {
            Err(PositError::InvalidConfig { n, es })
        }
    }

    /// Compile-time constructor used by the const-generic scalar type.
    pub const fn new_const(n: u32, es: u32) -> Self {
        assert!(Self::valid(n, es), "invalid posit configuration");
        PositConfig { n, es }
    }

    const fn valid(n: u32, es: u32) -> bool {
        n >= 3 && n <= Self::MAX_BITS && es + 3 <= n
    }

    #[inline]
    pub const fn n(self) -> u32 {
        self.n
    }

    #[inline]
    pub const fn es(self) -> u32 {
        self.es
    }

    /// Mask covering all `n` bits of a pattern.
    #[inline]
    pub const fn mask(self) -> u64 {
        u64::MAX >> (64 - self.n)
    }

    /// Mask covering the `n - 1` bits below the sign bit.
    #[inline]
    pub const fn body_mask(self) -> u64 {
        u64::MAX >> (65 - self.n)
    }

    #[inline]
    pub const fn nar_pattern(self) -> u64 {
        1 << (self.n - 1)
    }

    #[inline]
    pub const fn maxpos_pattern(self) -> u64 {
        self.body_mask()
    }

    #[inline]
    pub const fn minpos_pattern(self) -> u64 {
        1
    }

    #[inline]
    pub const fn one_pattern(self) -> u64 {
        1 << (self.n - 2)
    }

    /// log2(useed) = 2^es.
    #[inline]
    pub const fn useed_log2(self) -> i128 {
        1 << self.es
    }

    /// log2(maxpos) = (n - 2) * 2^es; minpos is its reciprocal.
    #[inline]
    pub const fn max_scale(self) -> i128 {
        (self.n as i128 - 2) * self.useed_log2()
    }

    /// Number of bits in a decoded fraction register, hidden bit included.
    #[inline]
    pub const fn fraction_width(self) -> u32 {
        self.n - self.es - 2
    }
}

impl fmt::Display for PositConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.n, self.es)
    }
}

/// Parses the `n,es` syntax used on the command line.
impl FromStr for PositConfig {
    type Err = PositError;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| PositError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (n, es) = s.split_once(',').ok_or_else(|| err("expected `n,es`"))?;
        let n = n.trim().parse().map_err(|_| err("bad n"))?;
        let es = es.trim().parse().map_err(|_| err("bad es"))?;
        PositConfig::new(n, es)
    }
}
