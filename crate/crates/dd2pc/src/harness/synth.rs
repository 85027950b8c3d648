use crate::error::{Error, Result};
use crate::logreg::{sigmoid, Dataset};
use crate::numerics::{Matrix, SeededRng, Vector};

/// Shape of a generated dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub rows: usize,
    pub features: usize,
    /// Labels are thresholded logits when true, Bernoulli draws otherwise.
    pub separable: bool,
    /// Logit scale; larger is cleaner.
    pub sharpness: f64,
}

impl SynthSpec {
    /// 900 rows of 7 features, the size of the Raisin data (720 train, 180 test).
    pub const RAISIN: SynthSpec = SynthSpec {
        rows: 900,
        features: 7,
        separable: false,
        sharpness: 3.0,
    };

    /// 1000 rows of 20 features, the size of German Credit (800 train, 200 test).
    pub const GERMAN: SynthSpec = SynthSpec {
        rows: 1000,
        features: 20,
        separable: false,
        sharpness: 2.0,
    };
}

/// Features uniform in [0, 1] with labels from a random linear model centred
/// on the cube's midpoint, so both classes show up.
pub fn synthetic_dataset(spec: SynthSpec, seed: u64) -> Result<Dataset> {
    if spec.rows < 2 || spec.features == 0 {
        return Err(Error::invalid("synthetic data needs at least 2 rows and 1 feature"));
    }
    let mut rng = SeededRng::new(seed).fork("synthetic");
    let w: Vec<f64> = (0..spec.features).map(|_| rng.uniform(-4.0, 4.0)).collect();
    let bias = -0.5 * w.iter().sum::<f64>();
    let x = Matrix::from_fn(spec.rows, spec.features, |_, _| rng.uniform(0.0, 1.0));
    let y: Vec<f64> = (0..spec.rows)
        .map(|i| {
            let z = bias + x.row(i).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            let hit = if spec.separable {
                z > 0.0
            } else {
                rng.uniform(0.0, 1.0) < sigmoid(spec.sharpness * z)
            };
            hit as u8 as f64
        })
        .collect();
    let names = (0..spec.features).map(|j| format!("f{j}")).collect();
    Dataset::new(names, x, Vector::new(y)?)
}
