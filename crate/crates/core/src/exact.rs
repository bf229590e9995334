use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// An exact dyadic value `(-1)^sign * significand * 2^scale`, or NaR.
///
/// Kept canonical: the significand is odd, or zero with `sign = false` and
/// `scale = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactValue {
    NaR,
    Finite {
        sign: bool,
        scale: i128,
        significand: BigUint,
    },
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue::Finite {
            sign: false,
            scale: 0,
            significand: BigUint::zero(),
        }
    }

    pub fn new(sign: bool, significand: BigUint, scale: i128) -> Self {
        if significand.is_zero() {
            return Self::zero();
        }
        let tz = significand.trailing_zeros().unwrap_or(0);
        ExactValue::Finite {
            sign,
            scale: scale + tz as i128,
            significand: significand >> tz,
        }
    }

    pub fn from_u128(sign: bool, significand: u128, scale: i128) -> Self {
        Self::new(sign, BigUint::from(significand), scale)
    }

    pub fn is_nar(&self) -> bool {
        matches!(self, ExactValue::NaR)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactValue::Finite { significand, .. } if significand.is_zero())
    }

    /// Exact value of a binary64; NaN maps to NaR. Infinities have no exact
    /// value and yield `None`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() {
            return Some(ExactValue::NaR);
        }
        if x.is_infinite() {
            return None;
        }
        let (mantissa, exp, sign) = decompose_f64(x);
        Some(Self::from_u128(sign, mantissa as u128, exp as i128))
    }

    /// Nearest binary64 (ties to even, overflow to infinity).
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactValue::NaR => f64::NAN,
            ExactValue::Finite {
                sign,
                scale,
                significand,
            } => {
                if significand.is_zero() {
                    return 0.0;
                }
                let bits = significand.bits();
                let (top, sticky, scale) = if bits > 64 {
                    let shift = bits - 64;
                    let sticky = significand.trailing_zeros().unwrap_or(0) < shift;
                    let top = (significand >> shift).iter_u64_digits().next().unwrap_or(0);
                    (top, sticky, *scale + shift as i128)
                } else {
                    (
                        significand.iter_u64_digits().next().unwrap_or(0),
                        false,
                        *scale,
                    )
                };
                let mag = scaled_u64_to_f64(top, sticky, scale);
                if *sign {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    fn cmp_magnitude(a: (&BigUint, i128), b: (&BigUint, i128)) -> Ordering {
        let (ma, sa) = a;
        let (mb, sb) = b;
        let top_a = sa + ma.bits() as i128;
        let top_b = sb + mb.bits() as i128;
        if top_a != top_b {
            return top_a.cmp(&top_b);
        }
        // Same leading position: align the lower-scaled side.
        if sa <= sb {
            ma.cmp(&(mb << (sb - sa) as usize))
        } else {
            (ma << (sa - sb) as usize).cmp(mb)
        }
    }
}

impl PartialOrd for ExactValue {
    /// Real-number order; NaR is unordered.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExactValue::*;
        match (self, other) {
            (NaR, _) | (_, NaR) => None,
            (
                Finite {
                    sign: sa,
                    scale: ea,
                    significand: ma,
                },
                Finite {
                    sign: sb,
                    scale: eb,
                    significand: mb,
                },
            ) => {
                let za = ma.is_zero();
                let zb = mb.is_zero();
                let ord = match (za, zb) {
                    (true, true) => Ordering::Equal,
                    (true, false) => {
                        if *sb {
                            Ordering::Greater
                        } else {
                            Ordering::Less
                        }
                    }
                    (false, true) => {
                        if *sa {
                            Ordering::Less
                        } else {
                            Ordering::Greater
                        }
                    }
                    (false, false) => match (sa, sb) {
                        (false, true) => Ordering::Greater,
                        (true, false) => Ordering::Less,
                        (false, false) => Self::cmp_magnitude((ma, *ea), (mb, *eb)),
                        (true, true) => Self::cmp_magnitude((mb, *eb), (ma, *ea)),
                    },
                };
                Some(ord)
            }
        }
    }
}

impl Neg for ExactValue {
    type Output = ExactValue;
    fn neg(self) -> ExactValue {
        match self {
            ExactValue::Finite {
                sign,
                scale,
                significand,
            } if !significand.is_zero() => ExactValue::Finite {
                sign: !sign,
                scale,
                significand,
            },
            other => other,
        }
    }
}

impl Mul for &ExactValue {
    type Output = ExactValue;
    fn mul(self, rhs: &ExactValue) -> ExactValue {
        match (self, rhs) {
            (
                ExactValue::Finite {
                    sign: sa,
                    scale: ea,
                    significand: ma,
                },
                ExactValue::Finite {
                    sign: sb,
                    scale: eb,
                    significand: mb,
                },
            ) => ExactValue::new(sa ^ sb, ma * mb, ea + eb),
            _ => ExactValue::NaR,
        }
    }
}

impl Add for &ExactValue {
    type Output = ExactValue;
    fn add(self, rhs: &ExactValue) -> ExactValue {
        match (self, rhs) {
            (
                ExactValue::Finite {
                    sign: sa,
                    scale: ea,
                    significand: ma,
                },
                ExactValue::Finite {
                    sign: sb,
                    scale: eb,
                    significand: mb,
                },
            ) => {
                if ma.is_zero() {
                    return rhs.clone();
                }
                if mb.is_zero() {
                    return self.clone();
                }
                let base = (*ea).min(*eb);
                let a = ma << (ea - base) as usize;
                let b = mb << (eb - base) as usize;
                if sa == sb {
                    ExactValue::new(*sa, a + b, base)
                } else if a >= b {
                    ExactValue::new(*sa, a - b, base)
                } else {
                    ExactValue::new(*sb, b - a, base)
                }
            }
            _ => ExactValue::NaR,
        }
    }
}

impl Sub for &ExactValue {
    type Output = ExactValue;
    fn sub(self, rhs: &ExactValue) -> ExactValue {
        self + &(-rhs.clone())
    }
}

impl From<i64> for ExactValue {
    fn from(x: i64) -> Self {
        ExactValue::from_u128(x < 0, x.unsigned_abs() as u128, 0)
    }
}

impl ExactValue {
    pub fn one() -> Self {
        ExactValue::Finite {
            sign: false,
            scale: 0,
            significand: BigUint::one(),
        }
    }
}

/// Splits a finite nonzero binary64 into (integer mantissa, exponent, sign).
pub(crate) fn decompose_f64(x: f64) -> (u64, i32, bool) {
    let bits = x.to_bits();
    let sign = bits >> 63 == 1;
    let exp_field = ((bits >> 52) & 0x7FF) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 {
        (frac, -1074, sign)
    } else {
        (frac | 1 << 52, exp_field - 1075, sign)
    }
}

/// `top * 2^scale`, with `sticky` marking nonzero bits below `top`, rounded
/// once to the nearest binary64.
pub(crate) fn scaled_u64_to_f64(top: u64, sticky: bool, scale: i128) -> f64 {
    if top == 0 {
        return 0.0;
    }
    let msb = 63 - top.leading_zeros() as i128;
    let exp = scale + msb;
    if exp > 1023 {
        return f64::INFINITY;
    }
    // Number of significand bits binary64 keeps at this magnitude.
    let keep = if exp >= -1022 { 53 } else { 53 - (-1022 - exp) };
    if keep <= 0 {
        // Below half the smallest subnormal, or exactly at it.
        let half = keep == 0 && (top.count_ones() > 1 || sticky);
        return if half { f64::from_bits(1) } else { 0.0 };
    }
    let drop = msb + 1 - keep;
    let (mant, scale) = if drop > 0 {
        let drop = drop as u32;
        let kept = top >> drop;
        let rest = top & ((1u64 << drop) - 1);
        let half = 1u64 << (drop - 1);
        let up = rest > half || (rest == half && (sticky || kept & 1 == 1));
        (kept + up as u64, scale + drop as i128)
    } else {
        (top, scale)
    };
    // mant < 2^54 and the scaling is exact in range.
    let mut value = mant as f64;
    let mut s = scale;
    while s > 0 {
        let step = s.min(1000);
        value *= 2f64.powi(step as i32);
        s -= step;
    }
    while s < 0 {
        let step = (-s).min(1000);
        value *= 2f64.powi(-(step as i32));
        s += step;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let v = ExactValue::from_u128(false, 12, 0);
        assert_eq!(v, ExactValue::from_u128(false, 3, 2));
        assert_eq!(ExactValue::from_u128(true, 0, 5), ExactValue::zero());
    }

    #[test]
    fn arithmetic() {
        let a = ExactValue::from_f64(1.5).unwrap();
        let b = ExactValue::from_f64(-2.25).unwrap();
        assert_eq!((&a * &a).to_f64(), 2.25);
        assert!((&(&a * &a) + &b).is_zero());
        assert_eq!((&a - &b).to_f64(), 3.75);
        assert!(a > b);
        assert!(ExactValue::NaR.partial_cmp(&a).is_none());
    }

    #[test]
    fn f64_round_trip() {
        for x in [
            0.0,
            1.0,
            -0.5,
            3.0e-310,
            1.7e308,
            0.1,
            -123456.789,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(ExactValue::from_f64(x).unwrap().to_f64(), x);
        }
        assert!(ExactValue::from_f64(f64::INFINITY).is_none());
        assert!(ExactValue::from_f64(f64::NAN).unwrap().is_nar());
    }

    #[test]
    fn to_f64_rounds_once() {
        // 2^60 + 2^7 + 1 is just above a tie between two binary64 neighbours.
        let v = ExactValue::from_u128(false, (1u128 << 60) + (1 << 7) + 1, 0);
        assert_eq!(v.to_f64(), ((1u64 << 60) + (1 << 8)) as f64);
        let tie = ExactValue::from_u128(false, (1u128 << 60) + (1 << 7), 0);
        assert_eq!(tie.to_f64(), (1u64 << 60) as f64);
        let huge = ExactValue::from_u128(false, 1, 5000);
        assert_eq!(huge.to_f64(), f64::INFINITY);
        let tiny = ExactValue::from_u128(false, 1, -5000);
        assert_eq!(tiny.to_f64(), 0.0);
    }
}
