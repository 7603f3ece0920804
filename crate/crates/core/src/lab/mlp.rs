//! Fully connected network with leaky-ReLU hidden layers, a linear output
//! layer and hand-written backpropagation. Rows of every matrix are samples.

use ndarray::{Array1, Array2, Axis, Zip};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// Layer `i` maps `sizes[i]` inputs to `sizes[i + 1]` outputs; shape `(in, out)`.
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

fn leaky(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

fn leaky_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

impl Mlp {
    /// He-normal weights for the leaky rectifier, zero biases.
    pub fn new<R: Rng>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Config(format!("bad layer sizes {sizes:?}")));
        }
        let gain = (2.0 / (1.0 + LEAKY_SLOPE * LEAKY_SLOPE)).sqrt();
        let weights = sizes
            .windows(2)
            .map(|w| {
                let std = gain / (w[0] as f64).sqrt();
                Array2::from_shape_simple_fn((w[0], w[1]), || {
                    std * rng.sample::<f64, _>(StandardNormal)
                })
            })
            .collect();
        let biases = sizes[1..].iter().map(|&n| Array1::zeros(n)).collect();
        Ok(Self { weights, biases })
    }

    pub fn from_parts(weights: Vec<Array2<f64>>, biases: Vec<Array1<f64>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::Config("need one bias per weight matrix".into()));
        }
        for (i, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.ncols() != b.len() {
                return Err(Error::Shape {
                    expected: w.ncols(),
                    found: b.len(),
                });
            }
            if let Some(next) = weights.get(i + 1) {
                if next.nrows() != w.ncols() {
                    return Err(Error::Shape {
                        expected: w.ncols(),
                        found: next.nrows(),
                    });
                }
            }
        }
        Ok(Self { weights, biases })
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.last().expect("non-empty").ncols()
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Output only, without keeping activations.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(x)?;
        let last = self.layers() - 1;
        let mut h = x.to_owned();
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            h = h.dot(w) + b;
            if i < last {
                h.mapv_inplace(leaky);
            }
        }
        Ok(h)
    }

    pub fn forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, Cache)> {
        self.check_input(x)?;
        let last = self.layers() - 1;
        let mut inputs = Vec::with_capacity(self.layers());
        let mut pre = Vec::with_capacity(self.layers());
        let mut h = x.to_owned();
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = h.dot(w) + b;
            inputs.push(h);
            h = if i < last { z.mapv(leaky) } else { z.clone() };
            pre.push(z);
        }
        Ok((h, Cache { inputs, pre }))
    }

    /// Gradients of `Σ output ⊙ output_grad` with respect to the parameters
    /// and to the input.
    pub fn backward(
        &self,
        cache: &Cache,
        output_grad: &Array2<f64>,
    ) -> Result<(Gradients, Array2<f64>)> {
        let out = cache.pre.last().ok_or(Error::EmptyBatch)?;
        if output_grad.dim() != out.dim() {
            return Err(Error::Shape {
                expected: out.len(),
                found: output_grad.len(),
            });
        }
        let n = self.layers();
        let mut gw = Vec::with_capacity(n);
        let mut gb = Vec::with_capacity(n);
        let mut delta = output_grad.to_owned();
        for i in (0..n).rev() {
            if i < n - 1 {
                Zip::from(&mut delta)
                    .and(&cache.pre[i])
                    .for_each(|d, &z| *d *= leaky_grad(z));
            }
            gw.push(cache.inputs[i].t().dot(&delta));
            gb.push(delta.sum_axis(Axis(0)));
            delta = delta.dot(&self.weights[i].t());
        }
        gw.reverse();
        gb.reverse();
        Ok((
            Gradients {
                weights: gw,
                biases: gb,
            },
            delta,
        ))
    }

    pub fn sgd_step(&mut self, grads: &Gradients, lr: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grads.weights) {
            w.scaled_add(-lr, g);
        }
        for (b, g) in self.biases.iter_mut().zip(&grads.biases) {
            b.scaled_add(-lr, g);
        }
    }

    /// Mutable access to parameter `index` in a flat enumeration: every
    /// weight matrix in row-major order followed by its bias.
    pub fn param_mut(&mut self, mut index: usize) -> Option<&mut f64> {
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            if index < w.len() {
                let cols = w.ncols();
                return w.get_mut((index / cols, index % cols));
            }
            index -= w.len();
            if index < b.len() {
                return b.get_mut(index);
            }
            index -= b.len();
        }
        None
    }

    fn check_input(&self, x: &Array2<f64>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Shape {
                expected: self.input_dim(),
                found: x.ncols(),
            });
        }
        Ok(())
    }
}

impl Gradients {
    /// Same flat enumeration as [`Mlp::param_mut`].
    pub fn get(&self, mut index: usize) -> Option<f64> {
        for (w, b) in self.weights.iter().zip(&self.biases) {
            if index < w.len() {
                return w.iter().nth(index).copied();
            }
            index -= w.len();
            if index < b.len() {
                return Some(b[index]);
            }
            index -= b.len();
        }
        None
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| *v == 0.0))
            && self.biases.iter().all(|b| b.iter().all(|v| *v == 0.0))
    }
}
