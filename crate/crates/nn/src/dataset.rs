//! Labelled binary-classification data.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{NnError, Result};

pub const INNER_RADIUS: f64 = 0.3;
pub const OUTER_RADIUS: f64 = 0.8;

/// Parameters that regenerate a rings dataset exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingsParams {
    pub samples: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for RingsParams {
    fn default() -> Self {
        RingsParams {
            samples: 500,
            noise: 0.05,
            seed: 7,
        }
    }
}

/// Feature rows in `[-1, 1]` with boolean labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<bool>,
    params: Option<RingsParams>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self> {
        let bad = |m: String| Err(NnError::Dataset(m));
        if features.is_empty() {
            return bad("no samples".into());
        }
        if features.len() != labels.len() {
            return bad(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            ));
        }
        let dim = features[0].len();
        if dim == 0 {
            return bad("rows have no features".into());
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != dim {
                return bad(format!(
                    "row {i} has {} features, expected {dim}",
                    row.len()
                ));
            }
            if let Some(x) = row.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
                return bad(format!("row {i} has feature {x} outside [-1, 1]"));
            }
        }
        Ok(Dataset {
            features,
            labels,
            params: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// Generator parameters, when the data came from [`make_rings_dataset`].
    pub fn params(&self) -> Option<RingsParams> {
        self.params
    }

    /// Writes `x1,...,xk,label` with a header row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let wrap = |source| NnError::Csv {
            path: path.into(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(wrap)?;
        self.write_rows(&mut w).map_err(wrap)?;
        w.flush().map_err(|source| NnError::Io {
            path: path.into(),
            source,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        self.write_rows(&mut w).expect("writing to memory");
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv is utf-8")
    }

    fn write_rows<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        let mut header: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for (row, &label) in self.features.iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            record.push(u8::from(label).to_string());
            w.write_record(&record)?;
        }
        Ok(())
    }

    /// Reads a headed CSV whose last column is a 0/1 label.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let wrap = |source| NnError::Csv {
            path: path.into(),
            source,
        };
        let mut r = csv::Reader::from_path(path).map_err(wrap)?;
        let (mut features, mut labels) = (Vec::new(), Vec::new());
        for (i, record) in r.records().enumerate() {
            let record = record.map_err(wrap)?;
            let line = i + 2;
            let (label, row) = record
                .iter()
                .collect::<Vec<_>>()
                .split_last()
                .map(|(l, r)| (l.to_string(), r.to_vec()))
                .ok_or_else(|| NnError::Dataset(format!("line {line}: empty record")))?;
            labels.push(match label.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(NnError::Dataset(format!(
                        "line {line}: label `{other}` is not 0 or 1"
                    )))
                }
            });
            let parsed = row
                .iter()
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| NnError::Dataset(format!("line {line}: {e}")))?;
            features.push(parsed);
        }
        Dataset::new(features, labels)
    }
}

/// Two concentric annuli: even-indexed samples lie near radius 0.3 (label
/// 1), odd-indexed ones near radius 0.8 (label 0), with Gaussian radial
/// noise of standard deviation `noise` and uniform angle. If any coordinate
/// leaves `[-1, 1]` the whole set is scaled down by the largest magnitude.
pub fn make_rings_dataset(samples: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if samples < 2 || !samples.is_multiple_of(2) {
        return Err(NnError::Dataset(format!(
            "sample count {samples} must be even and at least 2"
        )));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(NnError::Dataset(format!(
            "noise {noise} must be finite and non-negative"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for i in 0..samples {
        let inner = i % 2 == 0;
        let base = if inner { INNER_RADIUS } else { OUTER_RADIUS };
        let angle = rng.gen_range(0.0..2.0 * PI);
        let z: f64 = rng.sample(StandardNormal);
        let r = base + noise * z;
        features.push(vec![r * angle.cos(), r * angle.sin()]);
        labels.push(inner);
    }
    let peak = features
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if peak > 1.0 {
        for x in features.iter_mut().flatten() {
            *x /= peak;
        }
    }
    let mut ds = Dataset::new(features, labels)?;
    ds.params = Some(RingsParams {
        samples,
        noise,
        seed,
    });
    Ok(ds)
}
