//! Staged posit multiplier.
//!
//! Both operands are decoded, scale factors (regime concatenated with
//! exponent) are added, fractions are multiplied as integers, and the result
//! is repacked by an arithmetic right shift of a wide working register whose
//! low `n - 1` bits start as zeros so no product bit is lost before the
//! LSB/guard/round/sticky bits are read.

use serde::Serialize;

use crate::bits::{assert_same_config, PositBits};
use crate::config::PositConfig;
use crate::decode::decode;

/// Every intermediate of one multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MulTrace {
    pub sign: bool,
    pub zero: bool,
    pub nar: bool,
    pub sf_a: i128,
    pub sf_b: i128,
    pub frac_a: u64,
    pub frac_b: u64,
    pub frac_mult: u128,
    pub ovf_m: bool,
    pub norm_frac: u128,
    pub sf_mult: i128,
    pub sf_sign: bool,
    pub nzero: bool,
    pub exp: u64,
    pub reg_tmp: i128,
    pub reg: i128,
    pub ovf_reg: bool,
    pub reg_f: i128,
    pub ovf_regf: bool,
    pub exp_f: u64,
    pub shift_neg: i128,
    pub shift_pos: i128,
    /// Working register width in bits.
    pub width: u32,
    pub lsb: bool,
    pub guard: bool,
    pub round_bit: bool,
    pub sticky: bool,
    pub round: bool,
    pub result: u64,
}

/// Fixed-width unsigned working register.
trait Register: Copy {
    fn from_u128(x: u128) -> Self;
    fn shl(self, s: u32) -> Self;
    fn shr(self, s: u32) -> Self;
    fn or(self, other: Self) -> Self;
    fn bit(self, i: u32) -> bool;
    /// Any bit set strictly below position `i`.
    fn any_below(self, i: u32) -> bool;
    /// `len <= 64` bits starting at `lo`.
    fn field(self, lo: u32, len: u32) -> u64;
    /// Ones in positions `[from, width)`.
    fn ones_from(from: u32, width: u32) -> Self;
}

impl Register for u128 {
    #[inline]
    fn from_u128(x: u128) -> Self {
        x
    }
    #[inline]
    fn shl(self, s: u32) -> Self {
        if s >= 128 {
            0
        } else {
            self << s
        }
    }
    #[inline]
    fn shr(self, s: u32) -> Self {
        if s >= 128 {
            0
        } else {
            self >> s
        }
    }
    #[inline]
    fn or(self, other: Self) -> Self {
        self | other
    }
    #[inline]
    fn bit(self, i: u32) -> bool {
        self >> i & 1 == 1
    }
    #[inline]
    fn any_below(self, i: u32) -> bool {
        i > 0 && self.shl(128 - i) != 0
    }
    #[inline]
    fn field(self, lo: u32, len: u32) -> u64 {
        (self >> lo) as u64 & (u64::MAX >> (64 - len))
    }
    #[inline]
    fn ones_from(from: u32, width: u32) -> Self {
        let below_width = if width >= 128 {
            u128::MAX
        } else {
            (1u128 << width) - 1
        };
        below_width & !(1u128.shl(from).wrapping_sub(1))
    }
}

/// 256-bit register for formats wider than a `u128` datapath allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct U256 {
    hi: u128,
    lo: u128,
}

impl Register for U256 {
    fn from_u128(x: u128) -> Self {
        U256 { hi: 0, lo: x }
    }
    fn shl(self, s: u32) -> Self {
        match s {
            0 => self,
            1..=127 => U256 {
                hi: self.hi << s | self.lo >> (128 - s),
                lo: self.lo << s,
            },
            128..=255 => U256 {
                hi: self.lo << (s - 128),
                lo: 0,
            },
            _ => U256 { hi: 0, lo: 0 },
        }
    }
    fn shr(self, s: u32) -> Self {
        match s {
            0 => self,
            1..=127 => U256 {
                hi: self.hi >> s,
                lo: self.lo >> s | self.hi << (128 - s),
            },
            128..=255 => U256 {
                hi: 0,
                lo: self.hi >> (s - 128),
            },
            _ => U256 { hi: 0, lo: 0 },
        }
    }
    fn or(self, other: Self) -> Self {
        U256 {
            hi: self.hi | other.hi,
            lo: self.lo | other.lo,
        }
    }
    fn bit(self, i: u32) -> bool {
        if i >= 128 {
            self.hi >> (i - 128) & 1 == 1
        } else {
            self.lo >> i & 1 == 1
        }
    }
    fn any_below(self, i: u32) -> bool {
        i > 0 && self.shl(256 - i) != U256 { hi: 0, lo: 0 }
    }
    fn field(self, lo: u32, len: u32) -> u64 {
        self.shr(lo).lo as u64 & (u64::MAX >> (64 - len))
    }
    fn ones_from(from: u32, width: u32) -> Self {
        let all = U256 {
            hi: u128::MAX,
            lo: u128::MAX,
        };
        let below_width = all.shr(256 - width);
        let below_from = all.shr(256 - from.min(256));
        let below_from = if from == 0 {
            U256 { hi: 0, lo: 0 }
        } else {
            below_from
        };
        U256 {
            hi: below_width.hi & !below_from.hi,
            lo: below_width.lo & !below_from.lo,
        }
    }
}

/// Width of the packing register: flag bits, exponent, the product fraction
/// below its hidden bit, and `n - 1` zeros for the shift to spill into.
#[inline]
fn register_width(cfg: PositConfig) -> u32 {
    2 + cfg.es() + (2 * cfg.fraction_width() - 1) + (cfg.n() - 1)
}

/// Posit product, bit-exact round-to-nearest-even with saturation.
#[inline]
pub fn posit_mult(a: PositBits, b: PositBits) -> PositBits {
    posit_mult_traced(a, b).0
}

/// Posit product plus all datapath intermediates.
#[inline]
pub fn posit_mult_traced(a: PositBits, b: PositBits) -> (PositBits, MulTrace) {
    assert_same_config(a, b);
    if register_width(a.config()) <= 128 {
        datapath::<u128>(a, b)
    } else {
        datapath::<U256>(a, b)
    }
}

#[inline]
fn datapath<R: Register>(in_a: PositBits, in_b: PositBits) -> (PositBits, MulTrace) {
    let cfg = in_a.config();
    let n = cfg.n();
    let es = cfg.es();
    let frac_width = cfg.fraction_width();

    // Decode and special cases.
    let da = decode(in_a);
    let db = decode(in_b);
    let sign = da.sign ^ db.sign;
    let zero = da.is_zero || db.is_zero;
    let nar = da.is_nar || db.is_nar;

    // Scale factors: {regime, exponent} as a signed integer.
    let sf_a = ((da.regime as i128) << es) | da.exponent as i128;
    let sf_b = ((db.regime as i128) << es) | db.exponent as i128;

    // Fraction product. Hidden bits sit at frac_width - 1, so the product's
    // MSB (bit 2*frac_width - 1) flags a value >= 2.
    let frac_mult = da.fraction as u128 * db.fraction as u128;
    let product_width = 2 * frac_width;
    let ovf_m = frac_mult >> (product_width - 1) & 1 == 1;
    // Append a zero on the side that keeps the hidden bit at product_width - 1.
    let norm_frac = if ovf_m { frac_mult } else { frac_mult << 1 };

    let sf_mult = sf_a + sf_b + ovf_m as i128;
    let sf_sign = sf_mult < 0;
    let nzero = frac_mult != 0;

    let exp = (sf_mult & ((1i128 << es) - 1)) as u64;
    let reg_tmp = sf_mult >> es;
    let reg = if sf_sign { -reg_tmp } else { reg_tmp };

    // Regime saturation: n - 1 is the first magnitude that no longer fits
    // with a terminating bit.
    let reg_limit = n as i128 - 1;
    let ovf_reg = reg > reg_limit;
    let reg_f = if ovf_reg { reg_limit } else { reg };
    let ovf_regf = reg_f == reg_limit;
    let exp_f = if ovf_reg || ovf_regf || !nzero {
        0
    } else {
        exp
    };

    // Packing. tmp1 leads with {nzero, 0} for positive regimes (the shift
    // replicates the leading 1), tmp2 with {0, nzero} for negative ones.
    let width = register_width(cfg);
    let frac_field_width = product_width - 1;
    let frac_field = norm_frac & ((1u128 << frac_field_width) - 1);
    let payload = R::from_u128(exp_f as u128)
        .shl(frac_field_width)
        .or(R::from_u128(frac_field))
        .shl(n - 1);
    let tmp1 = R::from_u128(nzero as u128).shl(width - 1).or(payload);
    let tmp2 = R::from_u128(nzero as u128).shl(width - 2).or(payload);

    let shift_neg = if ovf_regf { reg_f - 2 } else { reg_f - 1 };
    let shift_pos = if ovf_regf { reg_f - 1 } else { reg_f };
    let tmp = if sf_sign {
        tmp2.shr(shift_neg as u32)
    } else {
        let s = shift_pos as u32;
        let shifted = tmp1.shr(s);
        if nzero {
            shifted.or(R::ones_from(width - s, width))
        } else {
            shifted
        }
    };

    // Rounding bits below the n - 1 body bits.
    let lsb_pos = width - (n - 1);
    let lsb = tmp.bit(lsb_pos);
    let guard = tmp.bit(lsb_pos - 1);
    let round_bit = tmp.bit(lsb_pos - 2);
    let sticky = tmp.any_below(lsb_pos - 2);
    let round = if ovf_reg || ovf_regf {
        false
    } else {
        guard && (lsb || round_bit || sticky)
    };
    let result_tmp = tmp.field(lsb_pos, n - 1) + round as u64;

    let result = if nar {
        PositBits::nar(cfg)
    } else if zero {
        PositBits::zero(cfg)
    } else if sign {
        PositBits::from_bits_truncate(result_tmp.wrapping_neg(), cfg)
    } else {
        PositBits::from_bits_truncate(result_tmp, cfg)
    };

    let trace = MulTrace {
        sign,
        zero,
        nar,
        sf_a,
        sf_b,
        frac_a: da.fraction,
        frac_b: db.fraction,
        frac_mult,
        ovf_m,
        norm_frac,
        sf_mult,
        sf_sign,
        nzero,
        exp,
        reg_tmp,
        reg,
        ovf_reg,
        reg_f,
        ovf_regf,
        exp_f,
        shift_neg,
        shift_pos,
        width,
        lsb,
        guard,
        round_bit,
        sticky,
        round,
        result: result.bits(),
    };
    (result, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cfg: PositConfig, bits: u64) -> PositBits {
        PositBits::new(bits, cfg).unwrap()
    }

    fn mul8(es: u32, a: u64, b: u64) -> u64 {
        let cfg = PositConfig::new(8, es).unwrap();
        posit_mult(p(cfg, a), p(cfg, b)).bits()
    }

    #[test]
    fn examples_8_0() {
        assert_eq!(mul8(0, 0x50, 0x50), 0x62);
        assert_eq!(mul8(0, 0x60, 0x60), 0x70);
        assert_eq!(mul8(0, 0x41, 0x50), 0x52);
        assert_eq!(mul8(0, 0x7F, 0x7F), 0x7F);
        assert_eq!(mul8(0, 0x01, 0x01), 0x01);
        assert_eq!(mul8(0, 0x80, 0x00), 0x80);
        assert_eq!(mul8(0, 0x00, 0x37), 0x00);
        assert_eq!(mul8(1, 0x40, 0x40), 0x40);
    }

    #[test]
    fn trace_examples() {
        let cfg = PositConfig::new(8, 0).unwrap();
        let (_, t) = posit_mult_traced(p(cfg, 0x50), p(cfg, 0x50));
        assert!(t.ovf_m);
        assert_eq!(t.sf_mult, t.sf_a + t.sf_b + t.ovf_m as i128);

        let (r, t) = posit_mult_traced(p(cfg, 0x40), p(cfg, 0x40));
        assert_eq!(r.bits(), 0x40);
        assert_eq!(t.sf_mult, 0);
        assert!(!t.round);

        let (_, t) = posit_mult_traced(p(cfg, 0x7F), p(cfg, 0x7F));
        assert!(t.ovf_reg);
        assert!(!t.round);
    }

    #[test]
    fn identity_and_signs_exhaustive_8_bit() {
        for es in 0..=2 {
            let cfg = PositConfig::new(8, es).unwrap();
            let one = PositBits::one(cfg);
            for x in 0..=0xFFu64 {
                let x = p(cfg, x);
                assert_eq!(posit_mult(x, one), x);
                assert_eq!(posit_mult(one, x), x);
                assert_eq!(posit_mult(x, PositBits::nar(cfg)), PositBits::nar(cfg));
                for y in 0..=0xFFu64 {
                    let y = p(cfg, y);
                    let r = posit_mult(x, y);
                    assert_eq!(r, posit_mult(y, x));
                    if !(x.is_zero() || y.is_zero() || x.is_nar() || y.is_nar()) {
                        assert_eq!(r.sign_bit(), x.sign_bit() ^ y.sign_bit());
                        assert!(!r.is_zero() && !r.is_nar());
                    }
                }
            }
        }
    }

    #[test]
    fn wide_register_path() {
        // <64,0> needs 188 register bits.
        let cfg = PositConfig::new(64, 0).unwrap();
        assert!(register_width(cfg) > 128);
        let one = PositBits::one(cfg);
        let two = PositBits::parse("0x6000000000000000", cfg).unwrap();
        assert_eq!(posit_mult(two, two).to_hex(), "0x7000000000000000");
        assert_eq!(posit_mult(one, two), two);
        let max = PositBits::maxpos(cfg);
        assert_eq!(posit_mult(max, max), max);
        let min = PositBits::minpos(cfg);
        assert_eq!(posit_mult(min, min.negate()), min.negate());
    }

    #[test]
    fn u256_ones_from() {
        let r = U256::ones_from(250, 256);
        assert_eq!(r.hi, 0b111111u128 << 122);
        assert_eq!(r.lo, 0);
        let r = U256::ones_from(100, 188);
        assert!(r.bit(100) && r.bit(187) && !r.bit(99) && !r.bit(188));
    }
}
