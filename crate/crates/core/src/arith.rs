//! Addition, subtraction and division. Each computes the exact result (or an
//! exact truncation plus sticky bit) in integer registers and rounds once.

use crate::bits::{assert_same_config, PositBits};
use crate::decode::decode;
use crate::encode::round_to_posit;

/// Sign, LSB scale and integer significand of a finite nonzero posit.
#[inline]
fn operand(p: PositBits) -> (bool, i128, u64) {
    let u = decode(p);
    (u.sign, u.lsb_scale(p.config()), u.fraction)
}

/// Correctly rounded `a + b`.
#[inline]
pub fn posit_add(a: PositBits, b: PositBits) -> PositBits {
    assert_same_config(a, b);
    let cfg = a.config();
    if a.is_nar() || b.is_nar() {
        return PositBits::nar(cfg);
    }
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let (sa, ea, ma) = operand(a);
    let (sb, eb, mb) = operand(b);
    let top_a = ea + (63 - ma.leading_zeros()) as i128;
    let top_b = eb + (63 - mb.leading_zeros()) as i128;
    let ((s_big, e_big, m_big), (s_small, e_small, m_small)) = if top_a >= top_b {
        ((sa, ea, ma), (sb, eb, mb))
    } else {
        ((sb, eb, mb), (sa, ea, ma))
    };

    // Larger operand's MSB goes to bit 125; the smaller one is aligned to it.
    let lead = 125 - (63 - m_big.leading_zeros());
    let big = (m_big as u128) << lead;
    let base = e_big - lead as i128;
    let offset = e_small - base;
    let (small, lost) = if offset >= 0 {
        ((m_small as u128) << offset, false)
    } else if offset > -128 {
        let s = (-offset) as u32;
        let m = m_small as u128;
        (m >> s, m & ((1u128 << s) - 1) != 0)
    } else {
        (0, true)
    };

    // One more bit of room; shifted-out bits become a 1 in the new LSB. The
    // true value then lies strictly between neighbours of an odd register
    // value, which rounds identically at every position the encoder uses.
    let big = big << 1;
    let small = small << 1 | lost as u128;
    let base = base - 1;

    if s_big == s_small {
        round_to_posit(s_big, big + small, base, false, cfg)
    } else if big >= small {
        if big == small {
            return PositBits::zero(cfg);
        }
        round_to_posit(s_big, big - small, base, false, cfg)
    } else {
        round_to_posit(s_small, small - big, base, false, cfg)
    }
}

/// `a - b`, defined as `a + (-b)`.
#[inline]
pub fn posit_sub(a: PositBits, b: PositBits) -> PositBits {
    posit_add(a, b.negate())
}

/// Correctly rounded `a / b`; division by zero gives NaR.
pub fn posit_div(a: PositBits, b: PositBits) -> PositBits {
    assert_same_config(a, b);
    let cfg = a.config();
    if a.is_nar() || b.is_nar() || b.is_zero() {
        return PositBits::nar(cfg);
    }
    if a.is_zero() {
        return PositBits::zero(cfg);
    }
    let (sa, ea, ma) = operand(a);
    let (sb, eb, mb) = operand(b);
    // Dividend MSB at 125, divisor MSB at 62: the quotient keeps >= 63 bits.
    let shift_a = 125 - (63 - ma.leading_zeros());
    let shift_b = 62 - (63 - mb.leading_zeros());
    let num = (ma as u128) << shift_a;
    let den = (mb as u128) << shift_b;
    let q = num / den;
    let rem = num % den;
    let scale = (ea - shift_a as i128) - (eb - shift_b as i128);
    round_to_posit(sa ^ sb, q, scale, rem != 0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PositConfig;

    fn p8(bits: u64) -> PositBits {
        PositBits::new(bits, PositConfig::new(8, 0).unwrap()).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(posit_add(p8(0x40), p8(0x40)), p8(0x60));
        assert_eq!(posit_add(p8(0x37), p8(0x00)), p8(0x37));
        assert_eq!(posit_add(p8(0x40), p8(0xC0)), p8(0x00));
        assert_eq!(posit_add(p8(0x80), p8(0x00)), p8(0x80));
        assert_eq!(posit_add(p8(0x7F), p8(0x7F)), p8(0x7F));
    }

    #[test]
    fn sub_examples() {
        assert_eq!(posit_sub(p8(0x60), p8(0x40)), p8(0x40));
        assert_eq!(posit_sub(p8(0x5A), p8(0x5A)), p8(0x00));
        assert_eq!(posit_sub(p8(0x5A), p8(0x00)), p8(0x5A));
    }

    #[test]
    fn div_examples() {
        assert_eq!(posit_div(p8(0x60), p8(0x40)), p8(0x60));
        assert_eq!(posit_div(p8(0x40), p8(0x60)), p8(0x20));
        assert_eq!(posit_div(p8(0x40), p8(0x00)), p8(0x80));
        assert_eq!(posit_div(p8(0x00), p8(0x40)), p8(0x00));
        assert_eq!(posit_div(p8(0x01), p8(0x7F)), p8(0x01));
    }

    #[test]
    fn add_cancellation_far_apart() {
        // maxpos - minpos must round back to maxpos, not overshoot.
        let cfg = PositConfig::new(32, 2).unwrap();
        let max = PositBits::maxpos(cfg);
        let min = PositBits::minpos(cfg);
        assert_eq!(posit_sub(max, min), max);
        assert_eq!(
            posit_add(PositBits::one(cfg), min.negate()).bits(),
            cfg.one_pattern()
        );
    }
}
