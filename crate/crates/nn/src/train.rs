//! Forward pass, backpropagation, full-batch gradient descent, evaluation.

use std::path::Path;

use posit_core::DotMode;
use serde::Serialize;

use crate::backend::{Activation, NumericBackend};
use crate::dataset::Dataset;
use crate::error::{NnError, Result};
use crate::model::{Layer, Mlp, MlpModel};
use crate::scalar::Scalar;
use crate::with_scalar;

pub const DEFAULT_EPOCHS: usize = 2500;

/// Default step size for the mean-squared-error gradient.
pub const DEFAULT_LR: f64 = 4.0;

/// How activations and accumulations are evaluated in a given scalar type.
#[derive(Clone, Copy, Debug)]
pub struct Ops {
    pub activation: Activation,
    pub dot_mode: DotMode,
}

impl From<&NumericBackend> for Ops {
    fn from(b: &NumericBackend) -> Self {
        Ops {
            activation: b.activation(),
            dot_mode: b.dot_mode(),
        }
    }
}

impl Ops {
    fn activate<S: Scalar>(self, z: S) -> S {
        match self.activation {
            Activation::ExactSigmoid => z.sigmoid(),
            Activation::FastSigmoid => z
                .fast_sigmoid()
                .expect("backend validated for the fast sigmoid"),
            Activation::Relu => z.relu(),
        }
    }

    /// Derivative expressed through the activation's output `a`.
    fn derivative<S: Scalar>(self, a: S) -> S {
        match self.activation {
            Activation::ExactSigmoid | Activation::FastSigmoid => a * (S::one() - a),
            Activation::Relu => {
                if a > S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
        }
    }
}

/// Training inputs already converted to `S`.
#[derive(Clone, Debug)]
pub struct Batch<S> {
    inputs: Vec<Vec<S>>,
    targets: Vec<S>,
    labels: Vec<f64>,
    /// `2 / N`, the derivative factor of the mean squared error.
    grad_scale: S,
}

impl<S: Scalar> Batch<S> {
    pub fn new(ds: &Dataset) -> Self {
        let n = S::from_f64(ds.len() as f64);
        Batch {
            inputs: ds
                .features()
                .iter()
                .map(|row| row.iter().map(|&x| S::from_f64(x)).collect())
                .collect(),
            targets: ds
                .labels()
                .iter()
                .map(|&l| if l { S::one() } else { S::zero() })
                .collect(),
            labels: ds
                .labels()
                .iter()
                .map(|&l| f64::from(u8::from(l)))
                .collect(),
            grad_scale: (S::one() + S::one()) / n,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<S>] {
        &self.inputs
    }
}

/// Activations of every layer, the input first.
pub fn forward_trace<S: Scalar>(mlp: &Mlp<S>, x: &[S], ops: Ops) -> Vec<Vec<S>> {
    let mut trace = Vec::with_capacity(mlp.layers().len() + 1);
    trace.push(x.to_vec());
    for layer in mlp.layers() {
        let prev = trace.last().expect("input pushed first");
        let next = layer
            .weights
            .iter()
            .zip(&layer.biases)
            .map(|(row, &b)| ops.activate(S::dot(b, row, prev, ops.dot_mode)))
            .collect();
        trace.push(next);
    }
    trace
}

/// Output-layer activations for one input row.
pub fn forward<S: Scalar>(mlp: &Mlp<S>, x: &[S], ops: Ops) -> Vec<S> {
    forward_trace(mlp, x, ops)
        .pop()
        .expect("at least the input")
}

/// Network outputs and the mean-squared-error gradient of every parameter.
pub struct Backprop<S> {
    pub outputs: Vec<Vec<S>>,
    pub gradients: Vec<Layer<S>>,
}

fn transpose<S: Copy>(rows: &[Vec<S>]) -> Vec<Vec<S>> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|i| rows.iter().map(|r| r[i]).collect())
        .collect()
}

/// One full-batch pass. Gradient sums over samples are dot products, so
/// quire accumulation covers them too.
pub fn backprop<S: Scalar>(mlp: &Mlp<S>, batch: &Batch<S>, ops: Ops) -> Backprop<S> {
    let layers = mlp.layers();
    let traces: Vec<Vec<Vec<S>>> = batch
        .inputs
        .iter()
        .map(|x| forward_trace(mlp, x, ops))
        .collect();

    // deltas[s][k]: error signal at the output of layer k for sample s.
    let mut deltas: Vec<Vec<Vec<S>>> = Vec::with_capacity(traces.len());
    let transposed: Vec<Vec<Vec<S>>> = layers.iter().map(|l| transpose(&l.weights)).collect();
    for (trace, &target) in traces.iter().zip(&batch.targets) {
        let mut per_layer = vec![Vec::new(); layers.len()];
        let top = layers.len() - 1;
        per_layer[top] = trace[top + 1]
            .iter()
            .map(|&y| (y - target) * ops.derivative(y))
            .collect();
        for k in (0..top).rev() {
            per_layer[k] = transposed[k + 1]
                .iter()
                .zip(&trace[k + 1])
                .map(|(column, &a)| {
                    ops.derivative(a) * S::dot(S::zero(), column, &per_layer[k + 1], ops.dot_mode)
                })
                .collect();
        }
        deltas.push(per_layer);
    }

    let ones = vec![S::one(); traces.len()];
    let mut gradients = mlp.zeros_like();
    for (k, grad) in gradients.iter_mut().enumerate() {
        let delta_cols = transpose(&deltas.iter().map(|d| d[k].clone()).collect::<Vec<_>>());
        let act_cols = transpose(&traces.iter().map(|t| t[k].clone()).collect::<Vec<_>>());
        for (j, delta) in delta_cols.iter().enumerate() {
            for (i, act) in act_cols.iter().enumerate() {
                grad.weights[j][i] = batch.grad_scale * S::dot(S::zero(), delta, act, ops.dot_mode);
            }
            grad.biases[j] = batch.grad_scale * S::dot(S::zero(), delta, &ones, ops.dot_mode);
        }
    }

    let outputs = traces
        .into_iter()
        .map(|mut t| t.pop().expect("output layer"))
        .collect();
    Backprop { outputs, gradients }
}

/// Mean squared error of single-output predictions, read out in binary64.
/// NaR predictions make it NaN.
pub fn readout_mse<S: Scalar>(outputs: &[Vec<S>], labels: &[f64]) -> f64 {
    let total: f64 = outputs
        .iter()
        .zip(labels)
        .map(|(o, &y)| (o[0].to_f64() - y).powi(2))
        .sum();
    total / labels.len() as f64
}

/// `w -= lr * g` for every parameter.
pub fn apply_gradients<S: Scalar>(mlp: &mut Mlp<S>, gradients: &[Layer<S>], lr: S) {
    for (layer, grad) in mlp.layers_mut().iter_mut().zip(gradients) {
        for (row, grow) in layer.weights.iter_mut().zip(&grad.weights) {
            for (w, &g) in row.iter_mut().zip(grow) {
                *w = *w - lr * g;
            }
        }
        for (b, &g) in layer.biases.iter_mut().zip(&grad.biases) {
            *b = *b - lr * g;
        }
    }
}

/// Full-batch gradient descent; returns the trained network and the loss
/// before every update plus the final one (`epochs + 1` values).
pub fn train_mlp<S: Scalar>(
    mut mlp: Mlp<S>,
    batch: &Batch<S>,
    ops: Ops,
    epochs: usize,
    lr: f64,
) -> (Mlp<S>, Vec<f64>) {
    let lr = S::from_f64(lr);
    let mut losses = Vec::with_capacity(epochs + 1);
    for epoch in 0..=epochs {
        if epoch == epochs {
            let outputs: Vec<_> = batch.inputs.iter().map(|x| forward(&mlp, x, ops)).collect();
            losses.push(readout_mse(&outputs, &batch.labels));
            break;
        }
        let pass = backprop(&mlp, batch, ops);
        losses.push(readout_mse(&pass.outputs, &batch.labels));
        apply_gradients(&mut mlp, &pass.gradients, lr);
    }
    (mlp, losses)
}

/// Per-epoch loss of one training run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainRecord {
    pub backend: NumericBackend,
    pub epochs: usize,
    pub lr: f64,
    pub losses: Vec<f64>,
}

impl TrainRecord {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("epoch 0 is always recorded")
    }

    /// Epochs whose loss could not be read out because a prediction was NaR.
    pub fn nar_epochs(&self) -> usize {
        self.losses.iter().filter(|l| l.is_nan()).count()
    }

    /// `epoch,loss` rows with a header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epoch,loss\n");
        for (epoch, loss) in self.losses.iter().enumerate() {
            out.push_str(&format!("{epoch},{loss:?}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| NnError::Io {
            path: path.into(),
            source,
        })
    }
}

fn check_compatible(model: &MlpModel, ds: &Dataset) -> Result<()> {
    model.validate()?;
    let (inputs, outputs) = (
        model.layer_sizes[0],
        *model.layer_sizes.last().expect("validated"),
    );
    if inputs != ds.dim() {
        return Err(NnError::Model(format!(
            "model takes {inputs} inputs, dataset has {}",
            ds.dim()
        )));
    }
    if outputs != 1 {
        return Err(NnError::Model(format!(
            "binary classification needs one output, model has {outputs}"
        )));
    }
    Ok(())
}

/// Trains `model` (rounded to `backend` first) on `ds`.
pub fn train(
    model: &MlpModel,
    ds: &Dataset,
    backend: NumericBackend,
    epochs: usize,
    lr: f64,
) -> Result<(MlpModel, TrainRecord)> {
    check_compatible(model, ds)?;
    if !(lr.is_finite() && lr > 0.0) {
        return Err(NnError::Model(format!(
            "learning rate {lr} must be positive"
        )));
    }
    let ops = Ops::from(&backend);
    let (trained, losses) = with_scalar!(backend, S => {
        let (mlp, losses) = train_mlp(model.to_mlp::<S>(), &Batch::<S>::new(ds), ops, epochs, lr);
        (MlpModel::from_mlp(&mlp, backend), losses)
    })?;
    Ok((
        trained,
        TrainRecord {
            backend,
            epochs,
            lr,
            losses,
        },
    ))
}

/// Network outputs for every row of `ds`, widened to binary64.
pub fn predict(model: &MlpModel, ds: &Dataset, backend: NumericBackend) -> Result<Vec<f64>> {
    check_compatible(model, ds)?;
    let ops = Ops::from(&backend);
    with_scalar!(backend, S => {
        let mlp = model.to_mlp::<S>();
        Batch::<S>::new(ds).inputs().iter().map(|x| forward(&mlp, x, ops)[0].to_f64()).collect::<Vec<_>>()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub backend: NumericBackend,
    pub samples: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Outputs that were NaR (counted as wrong).
    pub nar_outputs: usize,
}

/// Accuracy of thresholding the output at 0.5.
pub fn evaluate(model: &MlpModel, ds: &Dataset, backend: NumericBackend) -> Result<EvalReport> {
    let outputs = predict(model, ds, backend)?;
    let correct = outputs
        .iter()
        .zip(ds.labels())
        .filter(|(&y, &label)| !y.is_nan() && (y >= 0.5) == label)
        .count();
    Ok(EvalReport {
        backend,
        samples: ds.len(),
        correct,
        accuracy: correct as f64 / ds.len() as f64,
        nar_outputs: outputs.iter().filter(|y| y.is_nan()).count(),
    })
}

/// Largest relative difference between backpropagated binary64 gradients
/// and central differences with step `h`, over every parameter.
///
/// Relative error is `|g - d| / max(|g|, |d|, floor)`; the floor keeps
/// parameters with vanishing gradients from dividing rounding noise by zero.
pub fn gradient_check(mlp: &Mlp<f64>, ds: &Dataset, ops: Ops, h: f64, floor: f64) -> f64 {
    let batch = Batch::<f64>::new(ds);
    let loss = |m: &Mlp<f64>| {
        let outputs: Vec<_> = batch.inputs.iter().map(|x| forward(m, x, ops)).collect();
        readout_mse(&outputs, &batch.labels)
    };
    let analytic = backprop(mlp, &batch, ops).gradients;
    let mut worst = 0.0f64;
    let mut probe = mlp.clone();
    let mut compare = |probe: &mut Mlp<f64>, get: &dyn Fn(&mut Mlp<f64>) -> &mut f64, g: f64| {
        let original = *get(probe);
        *get(probe) = original + h;
        let up = loss(probe);
        *get(probe) = original - h;
        let down = loss(probe);
        *get(probe) = original;
        let numeric = (up - down) / (2.0 * h);
        worst = worst.max((g - numeric).abs() / g.abs().max(numeric.abs()).max(floor));
    };
    for (k, grad) in analytic.iter().enumerate() {
        for (j, row) in grad.weights.iter().enumerate() {
            for (i, &g) in row.iter().enumerate() {
                compare(&mut probe, &|m| &mut m.layers_mut()[k].weights[j][i], g);
            }
        }
        for (j, &g) in grad.biases.iter().enumerate() {
            compare(&mut probe, &|m| &mut m.layers_mut()[k].biases[j], g);
        }
    }
    worst
}
