//! Feed-forward networks that learn a binary image as a coordinate→color map.
//!
//! The training set of an H×W image is its full pixel grid: input is the
//! normalized (x, y) center of a pixel, target is ±1 for its color. A
//! network *fully recognizes* an image when the sign of its output
//! matches the target at every pixel.

mod irprop;
mod train;

pub use irprop::{IrpropConstants, IrpropPlus};
pub use train::{
    train_to_recognition, ConvergenceMetric, TrainingOutcome, TrainingParams, TrainingStatus,
};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// Output amplitude of the activation: outputs lie in (-1.7159, 1.7159).
pub const ACTIVATION_AMPLITUDE: f64 = 1.7159;
/// Input gain of the activation.
pub const ACTIVATION_GAIN: f64 = 2.0 / 3.0;

/// The scaled hyperbolic tangent applied by every non-input neuron.
pub fn activation(x: f64) -> f64 {
    ACTIVATION_AMPLITUDE * (ACTIVATION_GAIN * x).tanh()
}

/// Derivative of [`activation`] expressed through its output value.
fn activation_derivative_from_output(y: f64) -> f64 {
    ACTIVATION_GAIN * (ACTIVATION_AMPLITUDE * ACTIVATION_AMPLITUDE - y * y) / ACTIVATION_AMPLITUDE
}

/// Normalized input coordinates of a pixel center: both components span
/// [-1, 1] across the image, with single-row or single-column images
/// mapped to 0 on the degenerate axis.
pub fn pixel_coord(height: usize, width: usize, row: usize, col: usize) -> (f64, f64) {
    let x = if width > 1 {
        2.0 * col as f64 / (width - 1) as f64 - 1.0
    } else {
        0.0
    };
    let y = if height > 1 {
        2.0 * row as f64 / (height - 1) as f64 - 1.0
    } else {
        0.0
    };
    (x, y)
}

/// Neuron counts per layer: two inputs (x, y), hidden layers, one output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayerSizes(Vec<usize>);

impl LayerSizes {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidArgument(
                "a network needs at least input and output layers".into(),
            ));
        }
        if sizes[0] != 2 {
            return Err(Error::InvalidArgument(format!(
                "input layer must have 2 neurons, got {}",
                sizes[0]
            )));
        }
        if *sizes.last().unwrap() != 1 {
            return Err(Error::InvalidArgument(format!(
                "output layer must have 1 neuron, got {}",
                sizes.last().unwrap()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidArgument("layers must be non-empty".into()));
        }
        Ok(LayerSizes(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    /// Number of free parameters: one weight per connection between
    /// consecutive layers plus one bias per non-input neuron.
    pub fn weight_count(&self) -> usize {
        let weights: usize = self.0.windows(2).map(|p| p[0] * p[1]).sum();
        let biases: usize = self.0[1..].iter().sum();
        weights + biases
    }
}

impl FromStr for LayerSizes {
    type Err = Error;

    /// Parses the dash notation, e.g. `2-4-3-1`.
    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split('-')
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidArgument(format!("bad layer size {part:?} in {s:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LayerSizes::new(sizes)
    }
}

impl fmt::Display for LayerSizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join("-"))
    }
}

/// Weights and biases of one fully-connected layer.
#[derive(Debug, Clone, PartialEq)]
struct Layer {
    fan_in: usize,
    fan_out: usize,
    /// `weights[from * fan_out + to]`
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    fn zeros(fan_in: usize, fan_out: usize) -> Layer {
        Layer {
            fan_in,
            fan_out,
            weights: vec![0.0; fan_in * fan_out],
            biases: vec![0.0; fan_out],
        }
    }
}

/// A feed-forward network with fixed layer sizes. The activation is
/// applied at every non-input layer, including the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    sizes: LayerSizes,
    layers: Vec<Layer>,
}

/// Mean square error and recognized fraction of a network on an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub mse: f64,
    pub fraction_recognized: f64,
}

impl Network {
    /// A network with all weights and biases zero.
    pub fn zeros(sizes: LayerSizes) -> Network {
        let layers = sizes
            .sizes()
            .windows(2)
            .map(|p| Layer::zeros(p[0], p[1]))
            .collect();
        Network { sizes, layers }
    }

    /// Fresh weights and biases drawn independently from U[-0.5, 0.5].
    ///
    /// Draw order is fixed (layer by layer, weights then biases), so a
    /// seeded generator reproduces the same network.
    pub fn random(sizes: LayerSizes, rng: &mut impl Rng) -> Network {
        let mut net = Network::zeros(sizes);
        for layer in &mut net.layers {
            for w in &mut layer.weights {
                *w = rng.random::<f64>() - 0.5;
            }
            for b in &mut layer.biases {
                *b = rng.random::<f64>() - 0.5;
            }
        }
        net
    }

    pub fn layer_sizes(&self) -> &LayerSizes {
        &self.sizes
    }

    pub fn param_count(&self) -> usize {
        self.sizes.weight_count()
    }

    /// All parameters flattened: per layer, weights in `[from][to]` order,
    /// then biases. This is the order [`gradient`] and [`IrpropPlus`] use.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }

    /// Writes back a parameter vector produced by [`Network::params`].
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut at = 0;
        for layer in &mut self.layers {
            let nw = layer.weights.len();
            layer.weights.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = layer.biases.len();
            layer.biases.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    /// Network output for one normalized coordinate.
    pub fn forward(&self, x: f64, y: f64) -> f64 {
        let mut ws = Workspace::new(&self.sizes);
        self.forward_ws(x, y, &mut ws)
    }

    fn forward_ws(&self, x: f64, y: f64, ws: &mut Workspace) -> f64 {
        ws.acts[0][0] = x;
        ws.acts[0][1] = y;
        for (l, layer) in self.layers.iter().enumerate() {
            let (prev, rest) = ws.acts.split_at_mut(l + 1);
            let input = &prev[l];
            let out = &mut rest[0];
            for (to, slot) in out.iter_mut().enumerate() {
                let mut z = layer.biases[to];
                for (from, &a) in input.iter().enumerate() {
                    z += a * layer.weights[from * layer.fan_out + to];
                }
                *slot = activation(z);
            }
        }
        ws.acts.last().unwrap()[0]
    }

    /// Full-batch error of the network on an image: `mse` is the mean of
    /// (output − target)² over all pixels with targets ±1, and a pixel
    /// counts as recognized only when the output sign matches its target
    /// (an output of exactly 0 matches neither).
    pub fn evaluate(&self, img: &BinaryImage) -> Evaluation {
        let mut ws = Workspace::new(&self.sizes);
        self.evaluate_ws(img, &mut ws)
    }

    fn evaluate_ws(&self, img: &BinaryImage, ws: &mut Workspace) -> Evaluation {
        let mut sq_sum = 0.0;
        let mut recognized = 0usize;
        let total = img.height() * img.width();
        for row in 0..img.height() {
            for col in 0..img.width() {
                let (x, y) = pixel_coord(img.height(), img.width(), row, col);
                let target = if img.pixel(row, col) == 1 { 1.0 } else { -1.0 };
                let out = self.forward_ws(x, y, ws);
                let diff = out - target;
                sq_sum += diff * diff;
                if (out > 0.0) == (target > 0.0) && out != 0.0 {
                    recognized += 1;
                }
            }
        }
        Evaluation {
            mse: sq_sum / total as f64,
            fraction_recognized: recognized as f64 / total as f64,
        }
    }

    /// Evaluation and exact mse gradient in one full-batch pass.
    ///
    /// The gradient is written into `grad` (flattened in [`Network::params`]
    /// order), overwriting its contents.
    fn evaluate_and_gradient_ws(
        &self,
        img: &BinaryImage,
        ws: &mut Workspace,
        grad: &mut [f64],
    ) -> Evaluation {
        debug_assert_eq!(grad.len(), self.param_count());
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut sq_sum = 0.0;
        let mut recognized = 0usize;
        let total = (img.height() * img.width()) as f64;
        for row in 0..img.height() {
            for col in 0..img.width() {
                let (x, y) = pixel_coord(img.height(), img.width(), row, col);
                let target = if img.pixel(row, col) == 1 { 1.0 } else { -1.0 };
                let out = self.forward_ws(x, y, ws);
                let diff = out - target;
                sq_sum += diff * diff;
                if (out > 0.0) == (target > 0.0) && out != 0.0 {
                    recognized += 1;
                }
                self.backward_ws(2.0 * diff / total, ws, grad);
            }
        }
        Evaluation {
            mse: sq_sum / total,
            fraction_recognized: recognized as f64 / total,
        }
    }

    /// Accumulates one pixel's gradient contribution, given d(mse)/d(output).
    /// Uses the activations left in `ws` by the preceding forward pass.
    fn backward_ws(&self, d_output: f64, ws: &mut Workspace, grad: &mut [f64]) {
        let last = self.layers.len() - 1;
        ws.deltas[last][0] = d_output * activation_derivative_from_output(ws.acts[last + 1][0]);
        for l in (0..last).rev() {
            let next = &self.layers[l + 1];
            for i in 0..next.fan_in {
                let mut sum = 0.0;
                for to in 0..next.fan_out {
                    // Split borrow: deltas[l+1] is read, deltas[l] written below.
                    sum += next.weights[i * next.fan_out + to] * ws.deltas[l + 1][to];
                }
                ws.deltas[l][i] = sum * activation_derivative_from_output(ws.acts[l + 1][i]);
            }
        }
        let mut at = 0;
        for (l, layer) in self.layers.iter().enumerate() {
            let input = &ws.acts[l];
            let delta = &ws.deltas[l];
            for from in 0..layer.fan_in {
                for to in 0..layer.fan_out {
                    grad[at + from * layer.fan_out + to] += input[from] * delta[to];
                }
            }
            at += layer.weights.len();
            for to in 0..layer.fan_out {
                grad[at + to] += delta[to];
            }
            at += layer.fan_out;
        }
    }
}

/// Reusable per-layer activation and delta buffers for one network shape.
struct Workspace {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(sizes: &LayerSizes) -> Workspace {
        Workspace {
            acts: sizes.sizes().iter().map(|&n| vec![0.0; n]).collect(),
            deltas: sizes.sizes()[1..].iter().map(|&n| vec![0.0; n]).collect(),
        }
    }
}

/// Exact gradient of the full-batch mse of [`Network::evaluate`] with
/// respect to every weight and bias, in [`Network::params`] order.
pub fn gradient(net: &Network, img: &BinaryImage) -> Vec<f64> {
    let mut ws = Workspace::new(&net.sizes);
    let mut grad = vec![0.0; net.param_count()];
    net.evaluate_and_gradient_ws(img, &mut ws, &mut grad);
    grad
}

// --- weight CSV ------------------------------------------------------------
//
// Flat format, one parameter per row: `layer,from,to,value`. Layers are
// numbered from 1 (first non-input layer); bias rows use from = -1.
// Values use Rust's shortest round-trip float formatting, so writing and
// re-reading reproduces the parameters bit for bit.

impl Network {
    pub fn to_weight_csv(&self) -> String {
        let mut out = String::from("layer,from,to,value\n");
        for (l, layer) in self.layers.iter().enumerate() {
            for from in 0..layer.fan_in {
                for to in 0..layer.fan_out {
                    let v = layer.weights[from * layer.fan_out + to];
                    out.push_str(&format!("{},{},{},{}\n", l + 1, from, to, v));
                }
            }
            for (to, &v) in layer.biases.iter().enumerate() {
                out.push_str(&format!("{},-1,{},{}\n", l + 1, to, v));
            }
        }
        out
    }

    pub fn from_weight_csv(text: &str) -> Result<Network> {
        let mut rows: Vec<(usize, i64, usize, f64)> = Vec::new();
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("layer,from,to,value") => {}
            other => return Err(Error::Parse(format!("bad weight csv header: {other:?}"))),
        }
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!("bad weight row: {line:?}")));
            }
            let layer: usize = fields[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad layer in {line:?}")))?;
            let from: i64 = fields[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad from in {line:?}")))?;
            let to: usize = fields[2]
                .parse()
                .map_err(|_| Error::Parse(format!("bad to in {line:?}")))?;
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| Error::Parse(format!("bad value in {line:?}")))?;
            if layer == 0 || from < -1 {
                return Err(Error::Parse(format!("bad indices in {line:?}")));
            }
            rows.push((layer, from, to, value));
        }
        let layer_count = rows
            .iter()
            .map(|r| r.0)
            .max()
            .ok_or_else(|| Error::Parse("weight csv has no rows".into()))?;

        // Infer layer shapes from the index ranges present.
        let mut shapes = Vec::with_capacity(layer_count);
        for l in 1..=layer_count {
            let fan_out = rows
                .iter()
                .filter(|r| r.0 == l)
                .map(|r| r.2 + 1)
                .max()
                .ok_or_else(|| Error::Parse(format!("layer {l} missing from weight csv")))?;
            let fan_in = rows
                .iter()
                .filter(|r| r.0 == l && r.1 >= 0)
                .map(|r| r.1 as usize + 1)
                .max()
                .ok_or_else(|| Error::Parse(format!("layer {l} has no weight rows")))?;
            shapes.push((fan_in, fan_out));
        }
        let mut sizes = vec![shapes[0].0];
        for (l, &(fan_in, fan_out)) in shapes.iter().enumerate() {
            if fan_in != *sizes.last().unwrap() {
                return Err(Error::Parse(format!(
                    "layer {} fan-in {} does not match previous layer size {}",
                    l + 1,
                    fan_in,
                    sizes.last().unwrap()
                )));
            }
            sizes.push(fan_out);
        }
        let sizes = LayerSizes::new(sizes)?;
        let mut net = Network::zeros(sizes);
        let mut filled = vec![0usize; layer_count];
        for (layer, from, to, value) in rows {
            let lay = &mut net.layers[layer - 1];
            if to >= lay.fan_out {
                return Err(Error::Parse(format!("to index {to} out of range")));
            }
            if from == -1 {
                lay.biases[to] = value;
            } else {
                lay.weights[from as usize * lay.fan_out + to] = value;
            }
            filled[layer - 1] += 1;
        }
        for (l, lay) in net.layers.iter().enumerate() {
            let expected = lay.weights.len() + lay.biases.len();
            if filled[l] != expected {
                return Err(Error::Parse(format!(
                    "layer {} has {} entries, expected {}",
                    l + 1,
                    filled[l],
                    expected
                )));
            }
        }
        Ok(net)
    }

    pub fn write_weight_csv_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_weight_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_weight_csv_file(path: &Path) -> Result<Network> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Network::from_weight_csv(&text)
    }
}
