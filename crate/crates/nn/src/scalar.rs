//! The arithmetic a network needs from its number type.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use posit_core::{encode, exact_sigmoid, fast_sigmoid, relu, DotMode, Posit, PositBits, Quire};

/// A number type a network can be evaluated and trained in.
///
/// `from_f64`/`to_f64` are the only binary64 boundary; everything else stays
/// in the type's own arithmetic.
pub trait Scalar:
    Copy
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;

    fn is_nar(self) -> bool {
        false
    }

    fn sigmoid(self) -> Self;

    /// `None` when the type has no bitwise sigmoid.
    fn fast_sigmoid(self) -> Option<Self> {
        None
    }

    fn relu(self) -> Self {
        if self > Self::zero() {
            self
        } else {
            Self::zero()
        }
    }

    /// `init + sum(a[i] * b[i])`.
    fn dot(init: Self, a: &[Self], b: &[Self], _mode: DotMode) -> Self {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).fold(init, |acc, (&x, &y)| acc + x * y)
    }

    /// Raw pattern in hex, for formats that have one worth storing.
    fn hex(self) -> Option<String> {
        None
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn sigmoid(self) -> Self {
        1.0 / (1.0 + (-self).exp())
    }
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn sigmoid(self) -> Self {
        1.0 / (1.0 + (-self).exp())
    }
}

impl<const N: u32, const ES: u32> Scalar for Posit<N, ES> {
    fn from_f64(x: f64) -> Self {
        Posit::from_f64(x)
    }

    fn to_f64(self) -> f64 {
        Posit::to_f64(self)
    }

    fn is_nar(self) -> bool {
        Posit::is_nar(self)
    }

    fn sigmoid(self) -> Self {
        Posit::from_pattern(exact_sigmoid(self.as_pattern()))
    }

    fn fast_sigmoid(self) -> Option<Self> {
        fast_sigmoid(self.as_pattern())
            .ok()
            .map(Posit::from_pattern)
    }

    fn relu(self) -> Self {
        Posit::from_pattern(relu(self.as_pattern()))
    }

    fn dot(init: Self, a: &[Self], b: &[Self], mode: DotMode) -> Self {
        debug_assert_eq!(a.len(), b.len());
        match mode {
            DotMode::Sequential => a.iter().zip(b).fold(init, |acc, (&x, &y)| acc + x * y),
            DotMode::Quire => {
                let mut q = Quire::new(Self::CONFIG).expect("quire fits every compiled format");
                // Guard-bit overflow surfaces as NaR.
                let mut overflow = q.fma(init.as_pattern(), Self::one().as_pattern()).is_err();
                for (&x, &y) in a.iter().zip(b) {
                    overflow |= q.fma(x.as_pattern(), y.as_pattern()).is_err();
                }
                if overflow {
                    Self::NAR
                } else {
                    Posit::from_pattern(q.to_posit())
                }
            }
        }
    }

    fn hex(self) -> Option<String> {
        Some(self.as_pattern().to_hex())
    }
}

/// Binary32 storage and products with posit `<N, ES>` sums.
///
/// Every sum is formed by rounding both operands to the posit format, adding
/// there, and widening the (exactly representable) result back to binary32.
/// Products, quotients and the sigmoid stay in binary32.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Hybrid<const N: u32, const ES: u32>(pub f32);

impl<const N: u32, const ES: u32> Hybrid<N, ES> {
    fn to_posit(self) -> PositBits {
        encode::from_f64(self.0 as f64, Posit::<N, ES>::CONFIG)
    }

    fn from_posit(p: PositBits) -> Self {
        Hybrid(encode::to_f64(p) as f32)
    }
}

impl<const N: u32, const ES: u32> Add for Hybrid<N, ES> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::from_posit(posit_core::posit_add(self.to_posit(), rhs.to_posit()))
    }
}

impl<const N: u32, const ES: u32> Sub for Hybrid<N, ES> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::from_posit(posit_core::posit_sub(self.to_posit(), rhs.to_posit()))
    }
}

impl<const N: u32, const ES: u32> Mul for Hybrid<N, ES> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Hybrid(self.0 * rhs.0)
    }
}

impl<const N: u32, const ES: u32> Div for Hybrid<N, ES> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        Hybrid(self.0 / rhs.0)
    }
}

impl<const N: u32, const ES: u32> Neg for Hybrid<N, ES> {
    type Output = Self;

    fn neg(self) -> Self {
        Hybrid(-self.0)
    }
}

impl<const N: u32, const ES: u32> Zero for Hybrid<N, ES> {
    fn zero() -> Self {
        Hybrid(0.0)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl<const N: u32, const ES: u32> One for Hybrid<N, ES> {
    fn one() -> Self {
        Hybrid(1.0)
    }
}

impl<const N: u32, const ES: u32> Scalar for Hybrid<N, ES> {
    fn from_f64(x: f64) -> Self {
        Hybrid(x as f32)
    }

    fn to_f64(self) -> f64 {
        self.0 as f64
    }

    fn is_nar(self) -> bool {
        self.0.is_nan()
    }

    fn sigmoid(self) -> Self {
        Hybrid(self.0.sigmoid())
    }
}
