//! Field extraction from a posit pattern.
//!
//! The steps mirror a hardware decoder built around a single leading-zero
//! detector: sign and special cases first, then a conditional two's
//! complement, regime detection on the (possibly inverted) magnitude, and
//! finally exponent/fraction extraction from the bits left after the regime
//! is shifted out.

use serde::Serialize;

use crate::bits::PositBits;
use crate::config::PositConfig;

/// Decoded posit fields.
///
/// For finite nonzero values the real value is
/// `(-1)^sign * useed^regime * 2^exponent * fraction / 2^(fraction_width - 1)`
/// where `fraction` carries the hidden bit as its MSB. When `is_zero` or
/// `is_nar` is set the numeric fields are don't-care.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UnpackedPosit {
    pub sign: bool,
    pub regime: i32,
    pub exponent: u64,
    pub fraction: u64,
    pub is_zero: bool,
    pub is_nar: bool,
}

impl UnpackedPosit {
    /// Power-of-two scale of the hidden bit: `regime * 2^es + exponent`.
    #[inline]
    pub fn scale(&self, cfg: PositConfig) -> i128 {
        ((self.regime as i128) << cfg.es()) + self.exponent as i128
    }

    /// Power-of-two weight of the fraction register's LSB.
    #[inline]
    pub fn lsb_scale(&self, cfg: PositConfig) -> i128 {
        self.scale(cfg) - (cfg.fraction_width() as i128 - 1)
    }
}

#[inline]
fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Leading-zero count of a `width`-bit value; an all-zero input counts `width`.
#[inline]
fn leading_zeros_in(value: u64, width: u32) -> u32 {
    if value == 0 {
        width
    } else {
        value.leading_zeros() - (64 - width)
    }
}

/// Unpacks sign, regime, exponent and fraction.
///
/// Total over all `2^n` patterns.
#[inline]
pub fn decode(p: PositBits) -> UnpackedPosit {
    let cfg = p.config();
    let n = cfg.n();
    let es = cfg.es();
    let input = p.bits();
    let body_mask = cfg.body_mask();

    let nzero = input & body_mask != 0;
    let sign = input >> (n - 1) & 1 == 1;
    let is_zero = !(sign || nzero);
    let is_nar = sign && !nzero;

    let sign_fill = if sign { body_mask } else { 0 };
    let twos = (sign_fill ^ (input & body_mask)).wrapping_add(sign as u64) & body_mask;

    let regime_check = twos >> (n - 2) & 1 == 1;
    let inv = (if regime_check { body_mask } else { 0 }) ^ twos;
    let zc = leading_zeros_in(inv, n - 1);

    // Shift out the regime: the top two bits of `twos` are dropped by the
    // slice, the remaining zc - 1 by the shift. Width stays n - 3.
    let tail_width = n - 3;
    let tail = twos & low_mask(tail_width);
    let shifted = ((tail as u128) << (zc - 1)) as u64 & low_mask(tail_width);

    let exponent = if es == 0 {
        0
    } else {
        shifted >> (tail_width - es) & low_mask(es)
    };
    let frac_bits = tail_width - es;
    let fraction = (nzero as u64) << frac_bits | (shifted & low_mask(frac_bits));

    let regime = if regime_check {
        zc as i32 - 1
    } else {
        -(zc as i32)
    };

    UnpackedPosit {
        sign,
        regime,
        exponent,
        fraction,
        is_zero,
        is_nar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(n: u32, es: u32, bits: u64) -> UnpackedPosit {
        decode(PositBits::new(bits, PositConfig::new(n, es).unwrap()).unwrap())
    }

    #[test]
    fn four_bit_regime_runs() {
        // <5,0>: sign 0 then four regime bits.
        assert_eq!(dec(5, 0, 0b0_1110).regime, 2);
        assert_eq!(dec(5, 0, 0b0_0001).regime, -3);
    }

    #[test]
    fn one_and_one_point_five() {
        let one = dec(8, 0, 0x40);
        assert_eq!(
            (one.sign, one.regime, one.exponent, one.fraction),
            (false, 0, 0, 0b100000)
        );
        let x = dec(8, 0, 0x50);
        assert_eq!((x.sign, x.regime, x.fraction), (false, 0, 0b110000));
    }

    #[test]
    fn specials() {
        let nar = dec(8, 0, 0x80);
        assert!(nar.is_nar && !nar.is_zero);
        let z = dec(8, 0, 0x00);
        assert!(z.is_zero && !z.is_nar);
    }

    #[test]
    fn extremes() {
        let maxpos = dec(8, 0, 0x7F);
        assert_eq!((maxpos.regime, maxpos.fraction), (6, 0b100000));
        let minpos = dec(8, 0, 0x01);
        assert_eq!((minpos.regime, minpos.fraction), (-6, 0b100000));
        let neg_min = dec(8, 0, 0xFF);
        assert!(neg_min.sign);
        assert_eq!(neg_min.regime, -6);
    }

    #[test]
    fn exponent_field() {
        // <8,2>: 0 10 11 010 -> k = 0, e = 3, f = .010
        let x = dec(8, 2, 0b0101_1010);
        assert_eq!((x.regime, x.exponent, x.fraction), (0, 3, 0b1010));
        // truncated exponent: 0 111110 1 -> k = 4, e = 0b10
        let y = dec(8, 2, 0b0111_1101);
        assert_eq!((y.regime, y.exponent), (4, 2));
    }

    #[test]
    fn regime_range_over_all_patterns() {
        for (n, es) in [(3, 0), (6, 1), (8, 0), (8, 2), (10, 3)] {
            let cfg = PositConfig::new(n, es).unwrap();
            for bits in 0..=cfg.mask() {
                let u = dec(n, es, bits);
                if u.is_zero || u.is_nar {
                    continue;
                }
                assert!(u.regime >= -(n as i32 - 1) && u.regime <= n as i32 - 2);
                assert_eq!(u.fraction >> (cfg.fraction_width() - 1), 1, "hidden bit");
                assert!(u.exponent < 1 << es);
            }
        }
    }
}
