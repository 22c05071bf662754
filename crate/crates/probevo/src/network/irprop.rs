//! Resilient propagation with error-conditional weight backtracking.
//!
//! Each parameter carries its own step size, adapted from the sign of
//! its gradient alone. When the gradient sign repeats, the step grows;
//! when it flips, the step shrinks and the previous update is undone,
//! but only if the error just got worse.

use crate::error::{Error, Result};

/// Step-adaptation constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrpropConstants {
    /// Growth factor on a repeated gradient sign.
    pub eta_plus: f64,
    /// Shrink factor on a gradient sign flip.
    pub eta_minus: f64,
    /// Initial step size for every parameter.
    pub delta_zero: f64,
    pub delta_min: f64,
    pub delta_max: f64,
}

impl Default for IrpropConstants {
    fn default() -> Self {
        IrpropConstants {
            eta_plus: 1.2,
            eta_minus: 0.5,
            delta_zero: 0.1,
            delta_min: 1e-6,
            delta_max: 50.0,
        }
    }
}

/// Per-parameter optimizer state for a flat parameter vector.
#[derive(Debug, Clone)]
pub struct IrpropPlus {
    constants: IrpropConstants,
    delta: Vec<f64>,
    prev_grad: Vec<f64>,
    prev_step: Vec<f64>,
    prev_error: f64,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl IrpropPlus {
    pub fn new(param_count: usize, constants: IrpropConstants) -> IrpropPlus {
        IrpropPlus {
            constants,
            delta: vec![constants.delta_zero; param_count],
            prev_grad: vec![0.0; param_count],
            prev_step: vec![0.0; param_count],
            prev_error: f64::INFINITY,
        }
    }

    pub fn constants(&self) -> &IrpropConstants {
        &self.constants
    }

    /// Current per-parameter step sizes; always within [delta_min, delta_max].
    pub fn step_sizes(&self) -> &[f64] {
        &self.delta
    }

    /// Applies one update to `params` given the full-batch gradient and
    /// the error measured at the current parameters.
    ///
    /// Per parameter: a repeated gradient sign grows the step and moves
    /// against the gradient; a sign flip shrinks the step, undoes the
    /// previous move when `current_error` exceeds the previous call's
    /// error, and clears the stored sign so the next call restarts; a
    /// zero gradient (or cleared sign) moves by the unchanged step, which
    /// for a zero gradient is no move at all.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], current_error: f64) -> Result<()> {
        if params.len() != self.delta.len() || grad.len() != self.delta.len() {
            return Err(Error::InvalidArgument(format!(
                "irprop state has {} parameters, got params {} / grad {}",
                self.delta.len(),
                params.len(),
                grad.len()
            )));
        }
        let c = self.constants;
        for i in 0..params.len() {
            let g = grad[i];
            let product = self.prev_grad[i] * g;
            if product > 0.0 {
                self.delta[i] = (self.delta[i] * c.eta_plus).min(c.delta_max);
                let step = -sign(g) * self.delta[i];
                params[i] += step;
                self.prev_step[i] = step;
                self.prev_grad[i] = g;
            } else if product < 0.0 {
                self.delta[i] = (self.delta[i] * c.eta_minus).max(c.delta_min);
                if current_error > self.prev_error {
                    params[i] -= self.prev_step[i];
                }
                self.prev_step[i] = 0.0;
                self.prev_grad[i] = 0.0;
            } else {
                let step = -sign(g) * self.delta[i];
                params[i] += step;
                self.prev_step[i] = step;
                self.prev_grad[i] = g;
            }
        }
        self.prev_error = current_error;
        Ok(())
    }
}
