//! Dense layers with hand-written backward passes.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    LeakyRelu { slope: f64 },
    Identity,
}

impl Default for Activation {
    fn default() -> Self {
        Activation::LeakyRelu { slope: 0.1 }
    }
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::LeakyRelu { slope } if z < 0.0 => slope * z,
            _ => z,
        }
    }

    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::LeakyRelu { slope } if z < 0.0 => slope,
            _ => 1.0,
        }
    }
}

/// Uniform in ±1/sqrt(fan_in).
pub fn init_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, fan_in: usize) -> Array2<f64> {
    let a = 1.0 / (fan_in.max(1) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-a..a))
}

/// `y = dropout(act(x Wᵀ + c))`, one row per input vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

pub struct MlpCache {
    x: Array2<f64>,
    z: Array2<f64>,
    mask: Option<Array2<f64>>,
}

impl Mlp {
    pub fn new<R: Rng>(rng: &mut R, input: usize, output: usize) -> Self {
        Mlp {
            weight: init_matrix(rng, output, input, input),
            bias: Array1::zeros(output),
        }
    }

    pub fn zeros(input: usize, output: usize) -> Self {
        Mlp {
            weight: Array2::zeros((output, input)),
            bias: Array1::zeros(output),
        }
    }

    pub fn output_dim(&self) -> usize {
        self.weight.nrows()
    }

    /// With `dropout = Some((p, rng))` units are zeroed with probability `p`
    /// and survivors scaled by `1 / (1 - p)`.
    pub fn forward<R: Rng>(
        &self,
        x: &Array2<f64>,
        act: Activation,
        dropout: Option<(f64, &mut R)>,
    ) -> (Array2<f64>, MlpCache) {
        let z = x.dot(&self.weight.t()) + &self.bias;
        let mut y = z.mapv(|v| act.apply(v));
        let mask = match dropout {
            Some((p, rng)) if p > 0.0 => {
                let keep = 1.0 / (1.0 - p);
                let m = Array2::from_shape_fn(y.raw_dim(), |_| if rng.gen::<f64>() < p { 0.0 } else { keep });
                y *= &m;
                Some(m)
            }
            _ => None,
        };
        (
            y,
            MlpCache {
                x: x.clone(),
                z,
                mask,
            },
        )
    }

    /// Accumulates parameter gradients into `grad`.
    pub fn backward(&self, cache: &MlpCache, act: Activation, dy: &Array2<f64>, grad: &mut Mlp) {
        let mut dz = dy.clone();
        if let Some(m) = &cache.mask {
            dz *= m;
        }
        dz.zip_mut_with(&cache.z, |d, z| *d *= act.derivative(*z));
        grad.weight += &dz.t().dot(&cache.x);
        grad.bias += &dz.sum_axis(Axis(0));
    }
}

pub fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}
