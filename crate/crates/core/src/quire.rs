//! Exact fixed-point accumulator for dot products.

use crate::arith::posit_add;
use crate::bits::{assert_same_config, PositBits};
use crate::config::PositConfig;
use crate::decode::decode;
use crate::encode::round_to_posit;
use crate::error::{PositError, Result};
use crate::mul::posit_mult;

/// Default number of carry-guard bits.
pub const QUIRE_GUARD_BITS: u32 = 31;

/// Largest quire, in bits, this implementation will allocate.
pub const QUIRE_MAX_WIDTH: u64 = 1 << 16;

/// A two's-complement fixed-point register wide enough to hold any product
/// of two posits of its format exactly, plus carry-guard bits.
///
/// Layout from the LSB: `2 * 2^es * (n - 2)` fraction bits, the same number
/// of integer bits, the guard bits, then the sign bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quire {
    cfg: PositConfig,
    frac_bits: u32,
    width: u32,
    limbs: Vec<u64>,
    nar: bool,
}

impl Quire {
    pub fn new(cfg: PositConfig) -> Result<Self> {
        Self::with_guard_bits(cfg, QUIRE_GUARD_BITS)
    }

    pub fn with_guard_bits(cfg: PositConfig, guard_bits: u32) -> Result<Self> {
        let half = 2 * cfg.max_scale();
        let width = 1 + guard_bits as i128 + 2 * half;
        if width > QUIRE_MAX_WIDTH as i128 {
            return Err(PositError::Capacity {
                n: cfg.n(),
                es: cfg.es(),
                limit: "quire width",
            });
        }
        // One spare limb of sign extension so overflow is observable.
        let limbs = vec![0; (width as usize).div_ceil(64) + 1];
        Ok(Quire {
            cfg,
            frac_bits: half as u32,
            width: width as u32,
            limbs,
            nar: false,
        })
    }

    pub fn config(&self) -> PositConfig {
        self.cfg
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_nar(&self) -> bool {
        self.nar
    }

    pub fn is_zero(&self) -> bool {
        !self.nar && self.limbs.iter().all(|&l| l == 0)
    }

    pub fn clear(&mut self) {
        self.limbs.iter_mut().for_each(|l| *l = 0);
        self.nar = false;
    }

    /// Adds `a * b` exactly. On guard overflow the quire is left unchanged.
    pub fn fma(&mut self, a: PositBits, b: PositBits) -> Result<()> {
        assert_same_config(a, b);
        assert!(
            a.config() == self.cfg,
            "quire and operands use different configurations"
        );
        if self.nar {
            return Ok(());
        }
        if a.is_nar() || b.is_nar() {
            self.nar = true;
            return Ok(());
        }
        if a.is_zero() || b.is_zero() {
            return Ok(());
        }
        let da = decode(a);
        let db = decode(b);
        let product = da.fraction as u128 * db.fraction as u128;
        let scale = da.lsb_scale(self.cfg) + db.lsb_scale(self.cfg);
        // Every product is a multiple of minpos^2, so a negative offset only
        // drops zero bits.
        let offset = scale + self.frac_bits as i128;
        let (product, offset) = if offset < 0 {
            debug_assert!(product.trailing_zeros() as i128 >= -offset);
            (product >> (-offset), 0)
        } else {
            (product, offset as u32)
        };
        self.accumulate(product, offset, da.sign ^ db.sign)
    }

    fn accumulate(&mut self, magnitude: u128, offset: u32, negative: bool) -> Result<()> {
        self.add_shifted(magnitude, offset, negative);
        if !self.fits() {
            self.add_shifted(magnitude, offset, !negative);
            return Err(PositError::QuireOverflow);
        }
        Ok(())
    }

    fn add_shifted(&mut self, magnitude: u128, offset: u32, negative: bool) {
        let limb = (offset / 64) as usize;
        let bit = offset % 64;
        // A 128-bit value at an arbitrary bit offset touches up to three limbs.
        let parts = [
            (magnitude << bit) as u64,
            ((magnitude << bit) >> 64) as u64,
            if bit == 0 {
                0
            } else {
                (magnitude >> (128 - bit)) as u64
            },
        ];
        let mut carry = false;
        for i in limb..self.limbs.len() {
            let operand = parts.get(i - limb).copied().unwrap_or(0);
            let (r1, c1, r2, c2);
            if negative {
                (r1, c1) = self.limbs[i].overflowing_sub(operand);
                (r2, c2) = r1.overflowing_sub(carry as u64);
            } else {
                (r1, c1) = self.limbs[i].overflowing_add(operand);
                (r2, c2) = r1.overflowing_add(carry as u64);
            }
            self.limbs[i] = r2;
            carry = c1 || c2;
            if !carry && i >= limb + 2 {
                break;
            }
        }
    }

    /// Whether the stored value fits `width` signed bits: every bit from
    /// `width - 1` upward equals the sign.
    fn fits(&self) -> bool {
        let negative = self.limbs.last().is_some_and(|&l| l >> 63 == 1);
        let fill = if negative { u64::MAX } else { 0 };
        let from = (self.width - 1) as usize;
        let first = from / 64;
        let first_mask = u64::MAX << (from % 64);
        (self.limbs[first] ^ fill) & first_mask == 0
            && self.limbs[first + 1..].iter().all(|&l| l == fill)
    }

    /// Rounds the accumulated sum once.
    pub fn to_posit(&self) -> PositBits {
        if self.nar {
            return PositBits::nar(self.cfg);
        }
        let negative = self.limbs.last().is_some_and(|&l| l >> 63 == 1);
        let magnitude: Vec<u64> = if negative {
            negate_limbs(&self.limbs)
        } else {
            self.limbs.clone()
        };
        let Some(top) = magnitude.iter().rposition(|&l| l != 0) else {
            return PositBits::zero(self.cfg);
        };
        let msb = top as u32 * 64 + 63 - magnitude[top].leading_zeros();
        // Take up to 128 bits ending at the MSB; the rest is sticky.
        let lo_bit = msb.saturating_sub(127);
        let mut window = 0u128;
        for i in (lo_bit..=msb).rev() {
            window = window << 1 | (magnitude[(i / 64) as usize] >> (i % 64) & 1) as u128;
        }
        let sticky = (0..lo_bit).any(|i| magnitude[(i / 64) as usize] >> (i % 64) & 1 == 1);
        let scale = lo_bit as i128 - self.frac_bits as i128;
        round_to_posit(negative, window, scale, sticky, self.cfg)
    }
}

fn negate_limbs(limbs: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(limbs.len());
    let mut carry = true;
    for &l in limbs {
        let (r, c) = (!l).overflowing_add(carry as u64);
        out.push(r);
        carry = c;
    }
    out
}

/// How a dot product accumulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DotMode {
    /// Exact accumulation in a quire, one rounding at the end.
    Quire,
    /// `posit_mult` then `posit_add` in index order, rounding every step.
    Sequential,
}

/// Dot product of two posit vectors of format `cfg`.
pub fn dot(cfg: PositConfig, a: &[PositBits], b: &[PositBits], mode: DotMode) -> Result<PositBits> {
    if a.len() != b.len() {
        return Err(PositError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    match mode {
        DotMode::Quire => {
            let mut q = Quire::new(cfg)?;
            for (&x, &y) in a.iter().zip(b) {
                q.fma(x, y)?;
            }
            Ok(q.to_posit())
        }
        DotMode::Sequential => Ok(a.iter().zip(b).fold(PositBits::zero(cfg), |acc, (&x, &y)| {
            posit_add(acc, posit_mult(x, y))
        })),
    }
}
