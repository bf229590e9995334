use crate::bits::PositBits;
use crate::encode::{from_f64, to_f64};
use crate::error::{PositError, Result};

/// Sigmoid approximation for `es = 0` formats: flip the sign bit, then
/// shift right two places with zero fill.
///
/// NaR (`10...0`) flips to zero and comes out as the zero pattern.
pub fn fast_sigmoid(p: PositBits) -> Result<PositBits> {
    let cfg = p.config();
    if cfg.es() != 0 {
        return Err(PositError::FastSigmoidNeedsEsZero { es: cfg.es() });
    }
    let flipped = p.bits() ^ cfg.nar_pattern();
    Ok(PositBits::from_bits_truncate(flipped >> 2, cfg))
}

/// `1 / (1 + e^-x)` evaluated in binary64 and rounded to the posit format.
pub fn exact_sigmoid(p: PositBits) -> PositBits {
    if p.is_nar() {
        return p;
    }
    let x = to_f64(p);
    from_f64(1.0 / (1.0 + (-x).exp()), p.config())
}

/// `max(x, 0)`; NaR passes through.
pub fn relu(p: PositBits) -> PositBits {
    if p.sign_bit() && !p.is_nar() {
        PositBits::zero(p.config())
    } else {
        p
    }
}
