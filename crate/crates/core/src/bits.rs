use std::cmp::Ordering;
use std::fmt;

use crate::config::PositConfig;
use crate::error::{PositError, Result};

/// An n-bit two's-complement posit pattern together with its format.
///
/// Bits above `n` are always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PositBits {
    bits: u64,
    cfg: PositConfig,
}

impl PositBits {
    pub fn new(bits: u64, cfg: PositConfig) -> Result<Self> {
        if bits & !cfg.mask() != 0 {
            return Err(PositError::PatternTooWide { bits, n: cfg.n() });
        }
        Ok(PositBits { bits, cfg })
    }

    /// Builds a pattern from the low `n` bits of `bits`.
    #[inline]
    pub const fn from_bits_truncate(bits: u64, cfg: PositConfig) -> Self {
        PositBits {
            bits: bits & cfg.mask(),
            cfg,
        }
    }

    #[inline]
    pub const fn zero(cfg: PositConfig) -> Self {
        PositBits { bits: 0, cfg }
    }

    #[inline]
    pub const fn nar(cfg: PositConfig) -> Self {
        PositBits {
            bits: cfg.nar_pattern(),
            cfg,
        }
    }

    #[inline]
    pub const fn one(cfg: PositConfig) -> Self {
        PositBits {
            bits: cfg.one_pattern(),
            cfg,
        }
    }

    #[inline]
    pub const fn maxpos(cfg: PositConfig) -> Self {
        PositBits {
            bits: cfg.maxpos_pattern(),
            cfg,
        }
    }

    #[inline]
    pub const fn minpos(cfg: PositConfig) -> Self {
        PositBits {
            bits: cfg.minpos_pattern(),
            cfg,
        }
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub const fn config(self) -> PositConfig {
        self.cfg
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub const fn is_nar(self) -> bool {
        self.bits == self.cfg.nar_pattern()
    }

    /// The MSB. Set for negative values and for NaR.
    #[inline]
    pub const fn sign_bit(self) -> bool {
        self.bits >> (self.cfg.n() - 1) & 1 == 1
    }

    /// Pattern reinterpreted as a signed n-bit integer.
    #[inline]
    pub const fn as_signed(self) -> i64 {
        let shift = 64 - self.cfg.n();
        ((self.bits << shift) as i64) >> shift
    }

    /// Two's-complement negation; zero and NaR map to themselves.
    #[inline]
    pub const fn negate(self) -> Self {
        PositBits::from_bits_truncate(self.bits.wrapping_neg(), self.cfg)
    }

    pub const fn abs(self) -> Self {
        if self.sign_bit() && !self.is_nar() {
            self.negate()
        } else {
            self
        }
    }

    /// Posit order, which is the signed-integer order of the raw patterns.
    pub fn compare(self, other: Self) -> Result<Ordering> {
        check_same_config(self, other)?;
        if self.is_nar() || other.is_nar() {
            return Err(PositError::Unordered);
        }
        Ok(self.as_signed().cmp(&other.as_signed()))
    }

    /// Parses a `0x`/`0b` literal (an unprefixed string is read as hex).
    pub fn parse(literal: &str, cfg: PositConfig) -> Result<Self> {
        let s = literal.trim().replace('_', "");
        let (digits, radix) =
            if let Some(rest) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
                (rest, 16)
            } else if let Some(rest) = s.strip_prefix("0b").or_else(|| s.strip_prefix("0B")) {
                (rest, 2)
            } else {
                (s.as_str(), 16)
            };
        let bits = u64::from_str_radix(digits, radix).map_err(|e| PositError::Parse {
            input: literal.to_string(),
            reason: e.to_string(),
        })?;
        PositBits::new(bits, cfg)
    }

    /// `0x`-prefixed hex, zero-padded to ceil(n/4) digits.
    pub fn to_hex(self) -> String {
        let width = self.cfg.n().div_ceil(4) as usize;
        format!("0x{:0width$X}", self.bits)
    }

    /// `0b`-prefixed binary, zero-padded to n digits.
    pub fn to_bin(self) -> String {
        let width = self.cfg.n() as usize;
        format!("0b{:0width$b}", self.bits)
    }
}

impl fmt::Display for PositBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

pub(crate) fn check_same_config(a: PositBits, b: PositBits) -> Result<()> {
    let (ca, cb) = (a.config(), b.config());
    if ca == cb {
        Ok(())
    } else {
        Err(PositError::ConfigMismatch {
            a_n: ca.n(),
            a_es: ca.es(),
            b_n: cb.n(),
            b_es: cb.es(),
        })
    }
}

/// Panics on mixed configurations; arithmetic entry points treat this as a
/// caller bug rather than a recoverable condition.
#[inline]
#[track_caller]
pub(crate) fn assert_same_config(a: PositBits, b: PositBits) {
    assert!(
        a.config() == b.config(),
        "posit operands use different configurations"
    );
}
