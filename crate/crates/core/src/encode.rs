//! Rounding exact values to posit patterns, and conversions.

use std::cell::Cell;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bits::PositBits;
use crate::config::PositConfig;
use crate::decode::decode;
use crate::error::{PositError, Result};
use crate::exact::{decompose_f64, scaled_u64_to_f64, ExactValue};

/// Rounds `(-1)^sign * significand * 2^scale` to the nearest posit, ties to
/// the even pattern. `sticky` flags nonzero bits below the significand's LSB.
///
/// Rounding happens on the encoded bit string (regime, exponent, fraction,
/// then everything else folded into a sticky bit), so truncated exponent
/// bits round the same way fraction bits do. Magnitudes beyond maxpos or
/// below minpos saturate; a nonzero input never produces zero or NaR.
#[inline]
pub fn round_to_posit(
    sign: bool,
    significand: u128,
    scale: i128,
    sticky: bool,
    cfg: PositConfig,
) -> PositBits {
    debug_assert!(significand != 0 || !sticky);
    if significand == 0 {
        return PositBits::zero(cfg);
    }
    let n = cfg.n();
    let es = cfg.es();
    let msb = 127 - significand.leading_zeros();
    let top_exp = scale + msb as i128;
    // Floor division by 2^es.
    let regime = top_exp >> es;
    let exponent = (top_exp & ((1i128 << es) - 1)) as u128;
    let max_regime = n as i128 - 2;

    let body = if regime >= max_regime {
        cfg.maxpos_pattern()
    } else if regime < -max_regime {
        cfg.minpos_pattern()
    } else {
        // Regime run plus terminator: k >= 0 is k+1 ones then a zero,
        // k < 0 is -k zeros then a one. Length is at most n - 1.
        let (regime_bits, regime_len) = if regime >= 0 {
            (((1u128 << (regime + 1)) - 1) << 1, regime as u32 + 2)
        } else {
            (1u128, (-regime) as u32 + 1)
        };
        let prefix = regime_bits << es | exponent;
        let prefix_len = regime_len + es;
        // Fraction bits below the hidden bit, left-aligned.
        let fraction = if msb == 0 {
            0
        } else {
            significand << (128 - msb)
        };

        // First n bits of the encoding: n - 1 body bits and the guard bit.
        let (head, rest_nonzero) = if prefix_len >= n {
            let drop = prefix_len - n;
            let head = prefix >> drop;
            let dropped = prefix & ((1u128 << drop) - 1);
            (head, dropped != 0 || fraction != 0 || sticky)
        } else {
            let need = n - prefix_len;
            let head = prefix << need | fraction >> (128 - need);
            (head, fraction << need != 0 || sticky)
        };
        let head = head as u64;
        let truncated = head >> 1;
        let guard = head & 1 == 1;
        let lsb = truncated & 1 == 1;
        truncated + (guard && (lsb || rest_nonzero)) as u64
    };

    let pattern = if sign { body.wrapping_neg() } else { body };
    PositBits::from_bits_truncate(pattern, cfg)
}

/// Rounds an exact value to `cfg`.
pub fn encode(value: &ExactValue, cfg: PositConfig) -> PositBits {
    match value {
        ExactValue::NaR => PositBits::nar(cfg),
        ExactValue::Finite {
            sign,
            scale,
            significand,
        } => {
            if significand.is_zero() {
                return PositBits::zero(cfg);
            }
            let (sig, scale, sticky) = top_bits(significand, *scale);
            round_to_posit(*sign, sig, scale, sticky, cfg)
        }
    }
}

/// Top 128 bits of `significand` with the remainder folded into a sticky flag.
fn top_bits(significand: &BigUint, scale: i128) -> (u128, i128, bool) {
    let bits = significand.bits();
    if bits <= 128 {
        return (biguint_to_u128(significand), scale, false);
    }
    let shift = bits - 128;
    let sticky = significand.trailing_zeros().unwrap_or(0) < shift;
    (
        biguint_to_u128(&(significand >> shift)),
        scale + shift as i128,
        sticky,
    )
}

fn biguint_to_u128(x: &BigUint) -> u128 {
    let mut digits = x.iter_u64_digits();
    let lo = digits.next().unwrap_or(0) as u128;
    let hi = digits.next().unwrap_or(0) as u128;
    hi << 64 | lo
}

/// Exact value of a pattern.
pub fn to_exact(p: PositBits) -> ExactValue {
    let u = decode(p);
    if u.is_nar {
        return ExactValue::NaR;
    }
    if u.is_zero {
        return ExactValue::zero();
    }
    ExactValue::from_u128(u.sign, u.fraction as u128, u.lsb_scale(p.config()))
}

/// Nearest posit to a binary64. NaN becomes NaR and infinities saturate to
/// maxpos of the same sign.
pub fn from_f64(x: f64, cfg: PositConfig) -> PositBits {
    if x.is_nan() {
        return PositBits::nar(cfg);
    }
    if x.is_infinite() {
        let max = PositBits::maxpos(cfg);
        return if x < 0.0 { max.negate() } else { max };
    }
    if x == 0.0 {
        return PositBits::zero(cfg);
    }
    let (mantissa, exp, sign) = decompose_f64(x);
    round_to_posit(sign, mantissa as u128, exp as i128, false, cfg)
}

/// Nearest binary64 to a posit. Exact for every format whose values fit the
/// binary64 range and precision (all n <= 32 with es <= 2, for instance).
pub fn to_f64(p: PositBits) -> f64 {
    let u = decode(p);
    if u.is_nar {
        return f64::NAN;
    }
    if u.is_zero {
        return 0.0;
    }
    let mag = scaled_u64_to_f64(u.fraction, false, u.lsb_scale(p.config()));
    if u.sign {
        -mag
    } else {
        mag
    }
}

/// Largest `n` accepted by [`enumerate_values`].
pub const ENUMERATE_MAX_BITS: u32 = 16;

/// Every pattern of `cfg` with its binary64 value (NaN for NaR), in pattern
/// order.
pub fn enumerate_values(cfg: PositConfig) -> Result<Vec<(PositBits, f64)>> {
    if cfg.n() > ENUMERATE_MAX_BITS {
        return Err(PositError::Capacity {
            n: cfg.n(),
            es: cfg.es(),
            limit: "n <= 16 enumeration",
        });
    }
    Ok((0..=cfg.mask())
        .map(|bits| {
            let p = PositBits::from_bits_truncate(bits, cfg);
            (p, to_f64(p))
        })
        .collect())
}

thread_local! {
    static FLOAT_CROSSINGS: Cell<u64> = const { Cell::new(0) };
}

/// Number of binary64 <-> posit conversions made through the scalar
/// [`Posit`](crate::Posit) type on this thread.
pub fn float_crossings() -> u64 {
    FLOAT_CROSSINGS.with(|c| c.get())
}

pub fn reset_float_crossings() {
    FLOAT_CROSSINGS.with(|c| c.set(0));
}

#[inline]
pub(crate) fn note_float_crossing() {
    FLOAT_CROSSINGS.with(|c| c.set(c.get() + 1));
}
