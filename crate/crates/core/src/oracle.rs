//! Independent golden model.
//!
//! Values come straight from the bit-string reading of the format (scan the
//! regime run, read up to `es` exponent bits, treat the rest as fraction)
//! into arbitrary-precision integers. Results are rounded by locating the
//! two neighbouring posits around the exact result and comparing against
//! the value halfway between them in pattern space, which is the `n + 1`
//! bit posit `2p + 1`. Only [`PositConfig`] and [`PositBits`] are shared
//! with the arithmetic modules.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::PositBits;
use crate::config::PositConfig;
use crate::error::{PositError, Result};

/// A signed dyadic rational `(-1)^negative * mag * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dyadic {
    negative: bool,
    mag: BigUint,
    exp: i128,
}

impl Dyadic {
    fn zero() -> Self {
        Dyadic {
            negative: false,
            mag: BigUint::zero(),
            exp: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            negative: self.negative ^ other.negative,
            mag: &self.mag * &other.mag,
            exp: self.exp + other.exp,
        }
    }

    fn add(&self, other: &Dyadic) -> Dyadic {
        let base = self.exp.min(other.exp);
        let a = &self.mag << (self.exp - base) as usize;
        let b = &other.mag << (other.exp - base) as usize;
        if self.negative == other.negative {
            Dyadic {
                negative: self.negative,
                mag: a + b,
                exp: base,
            }
        } else if a >= b {
            Dyadic {
                negative: self.negative,
                mag: a - b,
                exp: base,
            }
        } else {
            Dyadic {
                negative: other.negative,
                mag: b - a,
                exp: base,
            }
        }
    }

    fn abs(&self) -> Dyadic {
        Dyadic {
            negative: false,
            ..self.clone()
        }
    }

    fn to_rational(&self) -> BigRational {
        let sign = if self.negative {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let m = BigInt::from_biguint(sign, self.mag.clone());
        if self.exp >= 0 {
            BigRational::from_integer(m << self.exp as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-self.exp) as usize)
        }
    }
}

/// Magnitude-only comparison target for the rounder.
trait Magnitude {
    /// Ordering of `self` relative to the nonnegative dyadic `d`.
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering;
}

impl Magnitude for Dyadic {
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        let top_a = self.exp + self.mag.bits() as i128;
        let top_b = d.exp + d.mag.bits() as i128;
        if top_a != top_b {
            return top_a.cmp(&top_b);
        }
        if self.exp <= d.exp {
            self.mag.cmp(&(&d.mag << (d.exp - self.exp) as usize))
        } else {
            (&self.mag << (self.exp - d.exp) as usize).cmp(&d.mag)
        }
    }
}

impl Magnitude for BigRational {
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        let num = self.numer().magnitude();
        let den = self.denom().magnitude();
        if d.exp >= 0 {
            num.cmp(&((&d.mag << d.exp as usize) * den))
        } else {
            (num << (-d.exp) as usize).cmp(&(&d.mag * den))
        }
    }
}

/// Value of an `n`-bit pattern (`n` up to 65) read directly off its bits.
/// `None` for NaR.
fn pattern_value(pattern: u128, n: u32, es: u32) -> Option<Dyadic> {
    let sign_bit = 1u128 << (n - 1);
    let mask = (sign_bit << 1).wrapping_sub(1);
    if pattern == 0 {
        return Some(Dyadic::zero());
    }
    if pattern == sign_bit {
        return None;
    }
    let negative = pattern & sign_bit != 0;
    let mag = if negative {
        pattern.wrapping_neg() & mask
    } else {
        pattern
    };
    let bit = |i: i64| (mag >> i & 1) as u8;

    let mut i = n as i64 - 2;
    let first = bit(i);
    let mut run: i64 = 0;
    while i >= 0 && bit(i) == first {
        run += 1;
        i -= 1;
    }
    i -= 1; // terminating bit, if any
    let regime = if first == 1 { run - 1 } else { -run };

    let mut exponent: i128 = 0;
    for _ in 0..es {
        exponent <<= 1;
        if i >= 0 {
            exponent |= bit(i) as i128;
            i -= 1;
        }
    }
    let frac_len = (i + 1).max(0) as u32;
    let fraction = mag & ((1u128 << frac_len) - 1);
    let significand = BigUint::from(1u128 << frac_len | fraction);
    let exp = (regime as i128) * (1i128 << es) + exponent - frac_len as i128;
    Some(Dyadic {
        negative,
        mag: significand,
        exp,
    })
}

fn value(p: PositBits) -> Option<Dyadic> {
    let cfg = p.config();
    pattern_value(p.bits() as u128, cfg.n(), cfg.es())
}

/// Exact value of a pattern as a rational; `None` for NaR.
pub fn oracle_value(p: PositBits) -> Option<BigRational> {
    value(p).map(|d| d.to_rational())
}

/// Nearest positive pattern to a positive magnitude.
fn round_magnitude<T: Magnitude>(target: &T, cfg: PositConfig) -> u64 {
    let n = cfg.n();
    let es = cfg.es();
    let val = |p: u64| pattern_value(p as u128, n, es).expect("positive pattern");
    let maxpos = cfg.maxpos_pattern();
    if target.cmp_dyadic(&val(maxpos)) != Ordering::Less {
        return maxpos;
    }
    if target.cmp_dyadic(&val(1)) != Ordering::Greater {
        return 1;
    }
    // Invariant: val(lo) <= target < val(hi).
    let (mut lo, mut hi) = (1u64, maxpos);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if target.cmp_dyadic(&val(mid)) == Ordering::Less {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if target.cmp_dyadic(&val(lo)) == Ordering::Equal {
        return lo;
    }
    let halfway = pattern_value(2 * lo as u128 + 1, n + 1, es).expect("positive pattern");
    match target.cmp_dyadic(&halfway) {
        Ordering::Less => lo,
        Ordering::Greater => hi,
        Ordering::Equal => {
            if lo % 2 == 0 {
                lo
            } else {
                hi
            }
        }
    }
}

fn round_signed<T: Magnitude>(negative: bool, magnitude: &T, cfg: PositConfig) -> PositBits {
    let p = PositBits::from_bits_truncate(round_magnitude(magnitude, cfg), cfg);
    if negative {
        p.negate()
    } else {
        p
    }
}

fn round_dyadic(d: &Dyadic, cfg: PositConfig) -> PositBits {
    if d.is_zero() {
        return PositBits::zero(cfg);
    }
    round_signed(d.negative, &d.abs(), cfg)
}

/// Reference rounding of an arbitrary rational.
pub fn oracle_round(q: &BigRational, cfg: PositConfig) -> PositBits {
    if q.is_zero() {
        return PositBits::zero(cfg);
    }
    let negative = q.numer().sign() == Sign::Minus;
    round_signed(negative, &q.abs(), cfg)
}

/// Reference product.
pub fn oracle_mult(a: PositBits, b: PositBits) -> PositBits {
    let cfg = a.config();
    match (value(a), value(b)) {
        (Some(x), Some(y)) => round_dyadic(&x.mul(&y), cfg),
        _ => PositBits::nar(cfg),
    }
}

/// Reference sum.
pub fn oracle_add(a: PositBits, b: PositBits) -> PositBits {
    let cfg = a.config();
    match (value(a), value(b)) {
        (Some(x), Some(y)) => round_dyadic(&x.add(&y), cfg),
        _ => PositBits::nar(cfg),
    }
}

/// Reference difference.
pub fn oracle_sub(a: PositBits, b: PositBits) -> PositBits {
    let cfg = a.config();
    match (value(a), value(b)) {
        (Some(x), Some(mut y)) => {
            y.negative = !y.negative;
            round_dyadic(&x.add(&y), cfg)
        }
        _ => PositBits::nar(cfg),
    }
}

/// Reference quotient; division by zero is NaR.
pub fn oracle_div(a: PositBits, b: PositBits) -> PositBits {
    let cfg = a.config();
    match (value(a), value(b)) {
        (Some(x), Some(y)) if !y.is_zero() => {
            oracle_round(&(x.to_rational() / y.to_rational()), cfg)
        }
        _ => PositBits::nar(cfg),
    }
}

/// Operation under verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyOp {
    Mul,
    Add,
    Sub,
    Div,
}

impl VerifyOp {
    pub fn name(self) -> &'static str {
        match self {
            VerifyOp::Mul => "mul",
            VerifyOp::Add => "add",
            VerifyOp::Sub => "sub",
            VerifyOp::Div => "div",
        }
    }

    fn implementation(self) -> fn(PositBits, PositBits) -> PositBits {
        match self {
            VerifyOp::Mul => crate::mul::posit_mult,
            VerifyOp::Add => crate::arith::posit_add,
            VerifyOp::Sub => crate::arith::posit_sub,
            VerifyOp::Div => crate::arith::posit_div,
        }
    }

    fn reference(self) -> fn(PositBits, PositBits) -> PositBits {
        match self {
            VerifyOp::Mul => oracle_mult,
            VerifyOp::Add => oracle_add,
            VerifyOp::Sub => oracle_sub,
            VerifyOp::Div => oracle_div,
        }
    }
}

impl std::str::FromStr for VerifyOp {
    type Err = PositError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mul" => Ok(VerifyOp::Mul),
            "add" => Ok(VerifyOp::Add),
            "sub" => Ok(VerifyOp::Sub),
            "div" => Ok(VerifyOp::Div),
            _ => Err(PositError::Parse {
                input: s.to_string(),
                reason: "expected mul, add, sub or div".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub a: u64,
    pub b: u64,
    pub got: u64,
    pub expected: u64,
}

/// Mismatches kept in a report; the count is always complete.
pub const MISMATCH_CAP: usize = 100;

/// Largest `n` for exhaustive verification (4^n pairs).
pub const EXHAUSTIVE_MAX_BITS: u32 = 10;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config: PositConfig,
    pub op: VerifyOp,
    pub pairs_tested: u64,
    pub mismatch_count: u64,
    pub mismatches: Vec<Mismatch>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }

    fn new(config: PositConfig, op: VerifyOp) -> Self {
        VerifyReport {
            config,
            op,
            pairs_tested: 0,
            mismatch_count: 0,
            mismatches: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn check(&mut self, a: PositBits, b: PositBits) {
        let got = (self.op.implementation())(a, b);
        let expected = (self.op.reference())(a, b);
        self.pairs_tested += 1;
        if got != expected {
            self.mismatch_count += 1;
            if self.mismatches.len() < MISMATCH_CAP {
                self.mismatches.push(Mismatch {
                    a: a.bits(),
                    b: b.bits(),
                    got: got.bits(),
                    expected: expected.bits(),
                });
            }
        }
    }

    /// Combines reports from workers that split the same sweep.
    pub fn merge(mut self, other: VerifyReport) -> VerifyReport {
        assert_eq!((self.config, self.op), (other.config, other.op));
        self.pairs_tested += other.pairs_tested;
        self.mismatch_count += other.mismatch_count;
        let room = MISMATCH_CAP - self.mismatches.len().min(MISMATCH_CAP);
        self.mismatches
            .extend(other.mismatches.into_iter().take(room));
        self.elapsed = self.elapsed.max(other.elapsed);
        self
    }
}

/// Checks every ordered operand pair.
pub fn verify_exhaustive(cfg: PositConfig, op: VerifyOp) -> Result<VerifyReport> {
    if cfg.n() > EXHAUSTIVE_MAX_BITS {
        return Err(PositError::Capacity {
            n: cfg.n(),
            es: cfg.es(),
            limit: "n <= 10 exhaustive verification",
        });
    }
    let start = Instant::now();
    let mut report = VerifyReport::new(cfg, op);
    for a in 0..=cfg.mask() {
        for b in 0..=cfg.mask() {
            report.check(
                PositBits::from_bits_truncate(a, cfg),
                PositBits::from_bits_truncate(b, cfg),
            );
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Zero, NaR, +-1, +-maxpos, +-minpos and the successor of one.
pub fn edge_patterns(cfg: PositConfig) -> Vec<PositBits> {
    let one = PositBits::one(cfg);
    let max = PositBits::maxpos(cfg);
    let min = PositBits::minpos(cfg);
    vec![
        PositBits::zero(cfg),
        PositBits::nar(cfg),
        one,
        one.negate(),
        max,
        max.negate(),
        min,
        min.negate(),
        PositBits::from_bits_truncate(one.bits() + 1, cfg),
    ]
}

/// Random operands drawn per edge pattern, in each operand position.
pub const EDGE_RANDOM_PARTNERS: usize = 32;

/// Seeded sampling: the full edge-pattern cross, each edge against random
/// partners on both sides, then `count` uniformly random pairs.
pub fn verify_sampled(cfg: PositConfig, op: VerifyOp, count: u64, seed: u64) -> VerifyReport {
    let start = Instant::now();
    let mut report = VerifyReport::new(cfg, op);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = move || PositBits::from_bits_truncate(rng.gen::<u64>(), cfg);
    let edges = edge_patterns(cfg);
    for &a in &edges {
        for &b in &edges {
            report.check(a, b);
        }
    }
    for &e in &edges {
        for _ in 0..EDGE_RANDOM_PARTNERS {
            let r = random();
            report.check(e, r);
            report.check(r, e);
        }
    }
    for _ in 0..count {
        let (a, b) = (random(), random());
        report.check(a, b);
    }
    report.elapsed = start.elapsed();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: u32, es: u32) -> PositConfig {
        PositConfig::new(n, es).unwrap()
    }

    fn p(cfg: PositConfig, bits: u64) -> PositBits {
        PositBits::new(bits, cfg).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn values_from_bits() {
        let cfg = c(8, 0);
        assert_eq!(oracle_value(p(cfg, 0x40)), Some(rat(1, 1)));
        assert_eq!(oracle_value(p(cfg, 0x50)), Some(rat(3, 2)));
        assert_eq!(oracle_value(p(cfg, 0x7F)), Some(rat(64, 1)));
        assert_eq!(oracle_value(p(cfg, 0x01)), Some(rat(1, 64)));
        assert_eq!(oracle_value(p(cfg, 0xC0)), Some(rat(-1, 1)));
        assert_eq!(oracle_value(p(cfg, 0x80)), None);
        // <8,2> with a truncated exponent: 0 111110 1 = 16^4 * 2^2.
        assert_eq!(oracle_value(p(c(8, 2), 0x7D)), Some(rat(1 << 18, 1)));
    }

    #[test]
    fn mult_examples() {
        let cfg = c(8, 0);
        assert_eq!(oracle_mult(p(cfg, 0x50), p(cfg, 0x50)).bits(), 0x62);
        assert_eq!(oracle_mult(p(cfg, 0x80), p(cfg, 0x00)).bits(), 0x80);
        assert_eq!(oracle_mult(p(cfg, 0x01), p(cfg, 0x01)).bits(), 0x01);
        assert_eq!(oracle_mult(p(cfg, 0x41), p(cfg, 0x50)).bits(), 0x52);
    }

    #[test]
    fn add_examples() {
        let cfg = c(8, 0);
        assert_eq!(oracle_add(p(cfg, 0x40), p(cfg, 0x40)).bits(), 0x60);
        assert_eq!(oracle_add(p(cfg, 0x37), p(cfg, 0x00)).bits(), 0x37);
        assert_eq!(oracle_add(p(cfg, 0x40), p(cfg, 0xC0)).bits(), 0x00);
        assert_eq!(oracle_sub(p(cfg, 0x60), p(cfg, 0x40)).bits(), 0x40);
        assert_eq!(oracle_div(p(cfg, 0x40), p(cfg, 0x60)).bits(), 0x20);
    }

    #[test]
    fn pattern_space_midpoint() {
        // <8,2>: between 2^20 (0x7E) and 2^24 (0x7F) the pattern-space
        // midpoint is 2^22, so 2^23 rounds up even though it is closer to 2^20.
        let cfg = c(8, 2);
        assert_eq!(oracle_round(&rat(1 << 23, 1), cfg).bits(), 0x7F);
        assert_eq!(oracle_round(&rat(1 << 22, 1), cfg).bits(), 0x7E);
    }

    #[test]
    fn self_consistency() {
        for es in 0..=2 {
            let cfg = c(8, es);
            let one = PositBits::one(cfg);
            let mut prev: Option<PositBits> = None;
            for bits in 0..=0xFF {
                let x = p(cfg, bits);
                assert_eq!(oracle_mult(x, one), x);
                assert_eq!(
                    oracle_value(x).map(|v| oracle_round(&v, cfg)),
                    if x.is_nar() { None } else { Some(x) }
                );
            }
            // Rounding is monotone on a fine grid of rationals.
            for i in -4000..4000 {
                let r = oracle_round(&rat(i, 37), cfg);
                if let Some(q) = prev {
                    assert!(q.as_signed() <= r.as_signed());
                }
                if i != 0 {
                    assert!(!r.is_zero() && !r.is_nar());
                }
                prev = Some(r);
            }
        }
    }

    #[test]
    fn sampled_counts_and_caps() {
        let cfg = c(16, 1);
        let report = verify_sampled(cfg, VerifyOp::Mul, 1000, 42);
        assert_eq!(
            report.pairs_tested,
            81 + 9 * 2 * EDGE_RANDOM_PARTNERS as u64 + 1000
        );
        assert!(report.passed(), "{:?}", report.mismatches);
        assert!(verify_exhaustive(c(12, 1), VerifyOp::Mul).is_err());
    }
}
