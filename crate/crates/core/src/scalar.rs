//! A posit as an ordinary numeric value, with its format fixed at compile
//! time.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{Bounded, One, Zero};

use crate::arith::{posit_add, posit_div, posit_sub};
use crate::bits::PositBits;
use crate::config::PositConfig;
use crate::encode::{self, note_float_crossing};
use crate::mul::posit_mult;

/// `<N, ES>` posit value. Arithmetic rounds every result; NaR is absorbing
/// and unordered.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Posit<const N: u32, const ES: u32>(u64);

impl<const N: u32, const ES: u32> Posit<N, ES> {
    pub const CONFIG: PositConfig = PositConfig::new_const(N, ES);
    pub const NAR: Self = Posit(Self::CONFIG.nar_pattern());
    pub const MAXPOS: Self = Posit(Self::CONFIG.maxpos_pattern());
    pub const MINPOS: Self = Posit(Self::CONFIG.minpos_pattern());

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        Posit(bits & Self::CONFIG.mask())
    }

    #[inline]
    pub const fn to_bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn as_pattern(self) -> PositBits {
        PositBits::from_bits_truncate(self.0, Self::CONFIG)
    }

    #[inline]
    pub const fn from_pattern(p: PositBits) -> Self {
        Posit::from_bits(p.bits())
    }

    #[inline]
    pub const fn is_nar(self) -> bool {
        self.0 == Self::CONFIG.nar_pattern()
    }

    pub fn from_f64(x: f64) -> Self {
        note_float_crossing();
        Self::from_pattern(encode::from_f64(x, Self::CONFIG))
    }

    pub fn to_f64(self) -> f64 {
        note_float_crossing();
        encode::to_f64(self.as_pattern())
    }
}

impl<const N: u32, const ES: u32> fmt::Debug for Posit<N, ES> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Posit<{N},{ES}>({})", self.as_pattern().to_hex())
    }
}

impl<const N: u32, const ES: u32> fmt::Display for Posit<N, ES> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_nar() {
            f.write_str("NaR")
        } else {
            write!(f, "{}", encode::to_f64(self.as_pattern()))
        }
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $f:expr) => {
        impl<const N: u32, const ES: u32> $trait for Posit<N, ES> {
            type Output = Self;
            #[inline]
            fn $method(self, rhs: Self) -> Self {
                Self::from_pattern($f(self.as_pattern(), rhs.as_pattern()))
            }
        }

        impl<const N: u32, const ES: u32> $assign_trait for Posit<N, ES> {
            #[inline]
            fn $assign_method(&mut self, rhs: Self) {
                *self = $trait::$method(*self, rhs);
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign, posit_add);
binary_op!(Sub, sub, SubAssign, sub_assign, posit_sub);
binary_op!(Mul, mul, MulAssign, mul_assign, posit_mult);

impl<const N: u32, const ES: u32> Div for Posit<N, ES> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        Self::from_pattern(posit_div(self.as_pattern(), rhs.as_pattern()))
    }
}

impl<const N: u32, const ES: u32> Neg for Posit<N, ES> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::from_pattern(self.as_pattern().negate())
    }
}

impl<const N: u32, const ES: u32> Zero for Posit<N, ES> {
    fn zero() -> Self {
        Posit(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const N: u32, const ES: u32> One for Posit<N, ES> {
    fn one() -> Self {
        Posit(Self::CONFIG.one_pattern())
    }
}

impl<const N: u32, const ES: u32> Bounded for Posit<N, ES> {
    fn min_value() -> Self {
        -Self::MAXPOS
    }
    fn max_value() -> Self {
        Self::MAXPOS
    }
}

impl<const N: u32, const ES: u32> PartialOrd for Posit<N, ES> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.as_pattern().compare(other.as_pattern()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{P16E1, P8E0};

    #[test]
    fn arithmetic_through_operators() {
        let x = P8E0::from_f64(1.5);
        assert_eq!((x * x).to_bits(), 0x62);
        assert_eq!((P8E0::one() + P8E0::one()).to_bits(), 0x60);
        assert_eq!((P8E0::one() / (P8E0::one() + P8E0::one())).to_bits(), 0x20);
        assert_eq!((-P8E0::one()).to_bits(), 0xC0);
        assert!(P8E0::NAR.partial_cmp(&P8E0::one()).is_none());
        assert!(P8E0::MINPOS > P8E0::zero());
        assert_eq!(P16E1::one().to_bits(), 0x4000);
    }

    #[test]
    fn crossings_are_counted() {
        encode::reset_float_crossings();
        let x = P8E0::from_f64(0.25);
        let _ = x * x + x;
        assert_eq!(encode::float_crossings(), 1);
        let _ = x.to_f64();
        assert_eq!(encode::float_crossings(), 2);
    }
}
