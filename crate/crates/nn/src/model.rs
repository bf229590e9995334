//! Multilayer perceptron parameters, generic and serialised forms.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backend::NumericBackend;
use crate::error::{NnError, Result};
use crate::scalar::Scalar;
use crate::with_scalar;

/// Architecture of the reference classifier.
pub const DEFAULT_LAYERS: [usize; 4] = [2, 4, 8, 1];

/// A fully connected layer. `weights[j][i]` connects input `i` to output `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<S> {
    pub weights: Vec<Vec<S>>,
    pub biases: Vec<S>,
}

impl<S: Scalar> Layer<S> {
    pub fn inputs(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn outputs(&self) -> usize {
        self.biases.len()
    }

    fn map<T>(&self, f: impl Fn(S) -> T) -> Layer<T> {
        Layer {
            weights: self
                .weights
                .iter()
                .map(|row| row.iter().map(|&w| f(w)).collect())
                .collect(),
            biases: self.biases.iter().map(|&b| f(b)).collect(),
        }
    }

    fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            weights: vec![vec![S::zero(); inputs]; outputs],
            biases: vec![S::zero(); outputs],
        }
    }
}

/// Parameters of a network in scalar type `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<S> {
    layer_sizes: Vec<usize>,
    seed: u64,
    layers: Vec<Layer<S>>,
}

impl<S: Scalar> Mlp<S> {
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn layers(&self) -> &[Layer<S>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<S>] {
        &mut self.layers
    }

    /// `(fan_in, fan_out)` of every layer.
    pub fn weight_shapes(&self) -> Vec<(usize, usize)> {
        self.layer_sizes.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Every parameter rounded to `T`.
    pub fn cast<T: Scalar>(&self) -> Mlp<T> {
        Mlp {
            layer_sizes: self.layer_sizes.clone(),
            seed: self.seed,
            layers: self
                .layers
                .iter()
                .map(|l| l.map(|x| T::from_f64(x.to_f64())))
                .collect(),
        }
    }

    pub(crate) fn zeros_like(&self) -> Vec<Layer<S>> {
        self.layers
            .iter()
            .map(|l| Layer::zeros(l.inputs(), l.outputs()))
            .collect()
    }

    pub fn parameters(&self) -> impl Iterator<Item = &S> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().flatten().chain(&l.biases))
    }
}

fn check_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(NnError::Model(format!(
            "layer sizes {layer_sizes:?} need at least two non-zero entries"
        )));
    }
    Ok(())
}

/// Xavier-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
pub fn init_model(layer_sizes: &[usize], seed: u64) -> Result<Mlp<f64>> {
    check_sizes(layer_sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = layer_sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            Layer {
                weights: (0..fan_out)
                    .map(|_| (0..fan_in).map(|_| rng.gen_range(-bound..=bound)).collect())
                    .collect(),
                biases: vec![0.0; fan_out],
            }
        })
        .collect();
    Ok(Mlp {
        layer_sizes: layer_sizes.to_vec(),
        seed,
        layers,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights_hex: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biases_hex: Option<Vec<String>>,
}

/// A network as stored on disk: binary64 values of every parameter, plus
/// raw patterns when the backend is a posit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layer_sizes: Vec<usize>,
    pub seed: u64,
    pub backend: NumericBackend,
    pub layers: Vec<LayerRecord>,
}

impl MlpModel {
    pub fn from_mlp<S: Scalar>(mlp: &Mlp<S>, backend: NumericBackend) -> Self {
        let layers = mlp
            .layers
            .iter()
            .map(|l| {
                let hex: Option<Vec<String>> = l.biases.iter().map(|b| b.hex()).collect();
                LayerRecord {
                    weights: l
                        .weights
                        .iter()
                        .map(|r| r.iter().map(|w| w.to_f64()).collect())
                        .collect(),
                    biases: l.biases.iter().map(|b| b.to_f64()).collect(),
                    weights_hex: hex.as_ref().map(|_| {
                        l.weights
                            .iter()
                            .map(|r| r.iter().filter_map(|w| w.hex()).collect())
                            .collect()
                    }),
                    biases_hex: hex,
                }
            })
            .collect();
        MlpModel {
            layer_sizes: mlp.layer_sizes.clone(),
            seed: mlp.seed,
            backend,
            layers,
        }
    }

    /// Parameters rounded to `S`.
    pub fn to_mlp<S: Scalar>(&self) -> Mlp<S> {
        Mlp {
            layer_sizes: self.layer_sizes.clone(),
            seed: self.seed,
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weights: l
                        .weights
                        .iter()
                        .map(|r| r.iter().map(|&w| S::from_f64(w)).collect())
                        .collect(),
                    biases: l.biases.iter().map(|&b| S::from_f64(b)).collect(),
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_sizes(&self.layer_sizes)?;
        if self.layers.len() + 1 != self.layer_sizes.len() {
            return Err(NnError::Model(format!(
                "{} layers for {} layer sizes",
                self.layers.len(),
                self.layer_sizes.len()
            )));
        }
        for (k, (l, w)) in self
            .layers
            .iter()
            .zip(self.layer_sizes.windows(2))
            .enumerate()
        {
            let (fan_in, fan_out) = (w[0], w[1]);
            if l.biases.len() != fan_out
                || l.weights.len() != fan_out
                || l.weights.iter().any(|r| r.len() != fan_in)
            {
                return Err(NnError::Model(format!(
                    "layer {k} is not {fan_out}x{fan_in}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("models always serialise")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n").map_err(|source| NnError::Io {
            path: path.into(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| NnError::Io {
            path: path.into(),
            source,
        })?;
        let model: MlpModel = serde_json::from_str(&text).map_err(|source| NnError::Json {
            path: path.into(),
            source,
        })?;
        model.validate()?;
        Ok(model)
    }
}

/// Rounds every parameter to `backend`. Casting to binary64 is the identity.
pub fn cast_model(model: &MlpModel, backend: NumericBackend) -> Result<MlpModel> {
    model.validate()?;
    with_scalar!(backend, S => MlpModel::from_mlp(&model.to_mlp::<S>(), backend))
}

#[cfg(test)]
mod tests {
    use super::*;
    use posit_core::P8E0;

    #[test]
    fn xavier_shapes_and_bounds() {
        let m = init_model(&DEFAULT_LAYERS, 1).unwrap();
        assert_eq!(m.weight_shapes(), vec![(2, 4), (4, 8), (8, 1)]);
        for (l, (fan_in, fan_out)) in m.layers().iter().zip(m.weight_shapes()) {
            assert_eq!((l.inputs(), l.outputs()), (fan_in, fan_out));
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            assert!(l.weights.iter().flatten().all(|w| w.abs() <= bound));
            assert!(l.biases.iter().all(|&b| b == 0.0));
        }
        assert_eq!(m, init_model(&DEFAULT_LAYERS, 1).unwrap());
        assert_ne!(m, init_model(&DEFAULT_LAYERS, 2).unwrap());
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(init_model(&[2], 1).is_err());
        assert!(init_model(&[2, 0, 1], 1).is_err());
    }

    #[test]
    fn cast_to_binary64_is_identity() {
        let m = MlpModel::from_mlp(
            &init_model(&DEFAULT_LAYERS, 3).unwrap(),
            NumericBackend::binary64(),
        );
        assert_eq!(cast_model(&m, NumericBackend::binary64()).unwrap(), m);
    }

    #[test]
    fn cast_to_posit_rounds_and_records_patterns() {
        let mut mlp = init_model(&DEFAULT_LAYERS, 3).unwrap();
        mlp.layers_mut()[0].weights[0][0] = 0.5;
        let m = MlpModel::from_mlp(&mlp, NumericBackend::binary64());
        let backend: NumericBackend = "posit:8,0".parse().unwrap();
        let cast = cast_model(&m, backend).unwrap();
        assert_eq!(cast.layers[0].weights_hex.as_ref().unwrap()[0][0], "0x20");
        for (orig, l) in m.layers.iter().zip(&cast.layers) {
            for (w, c) in orig
                .weights
                .iter()
                .flatten()
                .zip(l.weights.iter().flatten())
            {
                assert_eq!(*c, P8E0::from_f64(*w).to_f64());
            }
        }
        assert!(m.layers[0].weights_hex.is_none());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let backend: NumericBackend = "posit:16,1".parse().unwrap();
        let m = cast_model(
            &MlpModel::from_mlp(
                &init_model(&DEFAULT_LAYERS, 4).unwrap(),
                NumericBackend::binary64(),
            ),
            backend,
        )
        .unwrap();
        let back: MlpModel = serde_json::from_str(&m.to_json_string()).unwrap();
        assert_eq!(back, m);
        let mut broken = m.clone();
        broken.layers[1].weights.pop();
        assert!(broken.validate().is_err());
    }
}
