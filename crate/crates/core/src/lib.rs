//! Posit arithmetic for arbitrary `<n, es>` formats (3 <= n <= 64,
//! 0 <= es <= n - 3), including the `es = 0` case.
//!
//! Patterns are plain `n`-bit integers ([`PositBits`]); [`decode`] unpacks
//! them, [`posit_mult`] multiplies through a staged hardware-style datapath,
//! and [`encode`] rounds exact values back to the nearest pattern. The
//! [`oracle`] module is an independent exact-rational model used to verify
//! all of it.

pub mod activation;
pub mod arith;
pub mod bits;
pub mod config;
pub mod decode;
pub mod encode;
pub mod error;
pub mod exact;
pub mod mul;
pub mod oracle;
pub mod quire;
pub mod scalar;

pub use activation::{exact_sigmoid, fast_sigmoid, relu};
pub use arith::{posit_add, posit_div, posit_sub};
pub use bits::PositBits;
pub use config::PositConfig;
pub use decode::{decode, UnpackedPosit};
pub use encode::{
    encode, enumerate_values, float_crossings, from_f64, reset_float_crossings, round_to_posit,
    to_exact, to_f64,
};
pub use error::{PositError, Result};
pub use exact::ExactValue;
pub use mul::{posit_mult, posit_mult_traced, MulTrace};
pub use quire::{dot, DotMode, Quire};
pub use scalar::Posit;

pub type P8E0 = Posit<8, 0>;
pub type P8E1 = Posit<8, 1>;
pub type P8E2 = Posit<8, 2>;
pub type P10E0 = Posit<10, 0>;
pub type P12E0 = Posit<12, 0>;
pub type P14E0 = Posit<14, 0>;
pub type P16E0 = Posit<16, 0>;
pub type P16E1 = Posit<16, 1>;
pub type P16E2 = Posit<16, 2>;
pub type P32E2 = Posit<32, 2>;
pub type P64E3 = Posit<64, 3>;
