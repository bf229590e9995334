//! A small multilayer perceptron whose every scalar operation runs in a
//! selectable number format: binary64, binary32, a posit `<n, es>`, or a
//! hybrid of binary32 products with posit sums.
//!
//! Networks are generic over [`Scalar`]; [`NumericBackend`] picks the
//! concrete type at run time through [`with_scalar!`].

pub mod backend;
pub mod dataset;
pub mod error;
pub mod model;
pub mod scalar;
pub mod train;

pub use backend::{Activation, BackendKind, NumericBackend};
pub use dataset::{make_rings_dataset, Dataset, RingsParams};
pub use error::{NnError, Result};
pub use model::{cast_model, init_model, Layer, Mlp, MlpModel, DEFAULT_LAYERS};
pub use posit_core::{DotMode, Posit};
pub use scalar::{Hybrid, Scalar};
pub use train::{
    backprop, evaluate, forward, gradient_check, predict, train, train_mlp, Batch, EvalReport, Ops,
    TrainRecord, DEFAULT_EPOCHS, DEFAULT_LR,
};
