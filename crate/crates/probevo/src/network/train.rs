//! Full-batch training until full recognition or stall.
//!
//! Full recognition (every pixel's output sign matches its target) is
//! a hard success criterion, so the usual small-error stopping rule
//! does not apply. Instead a convergence value is monitored and the
//! run is declared stalled when it fails to drop by a relative
//! fraction `epsilon` within a window of `n_c` epochs.

use super::{IrpropConstants, IrpropPlus, Network, Workspace};
use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// What the stall detector monitors between epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvergenceMetric {
    /// mse × fraction recognized. When nothing is recognized yet the
    /// product is identically zero and carries no information, so the
    /// detector falls back to the mse alone for those epochs.
    #[default]
    MseTimesRecognized,
    /// mse × fraction misrecognized, which shrinks monotonically as
    /// training improves on both axes.
    MseTimesMisrecognized,
}

impl ConvergenceMetric {
    fn monitored(self, mse: f64, fraction_recognized: f64) -> f64 {
        match self {
            ConvergenceMetric::MseTimesRecognized => {
                if fraction_recognized > 0.0 {
                    mse * fraction_recognized
                } else {
                    mse
                }
            }
            ConvergenceMetric::MseTimesMisrecognized => mse * (1.0 - fraction_recognized),
        }
    }
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingParams {
    /// Stall window: epochs without a significant decrease before giving up.
    pub n_c: usize,
    /// Relative decrease that counts as significant.
    pub epsilon: f64,
    /// Absolute safety cap on epochs.
    pub max_epochs: usize,
    pub metric: ConvergenceMetric,
    pub irprop: IrpropConstants,
}

impl Default for TrainingParams {
    fn default() -> Self {
        TrainingParams {
            n_c: 1000,
            epsilon: 0.01,
            max_epochs: 20_000,
            metric: ConvergenceMetric::default(),
            irprop: IrpropConstants::default(),
        }
    }
}

impl TrainingParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_c < 1 {
            return Err(Error::InvalidArgument("n_c must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.max_epochs < 1 {
            return Err(Error::InvalidArgument(
                "max_epochs must be at least 1".into(),
            ));
        }
        let c = &self.irprop;
        if !(c.eta_minus < 1.0 && 1.0 < c.eta_plus) {
            return Err(Error::InvalidArgument(format!(
                "step factors must satisfy eta_minus < 1 < eta_plus, got {} / {}",
                c.eta_minus, c.eta_plus
            )));
        }
        if !(c.delta_min > 0.0 && c.delta_min <= c.delta_zero && c.delta_zero <= c.delta_max) {
            return Err(Error::InvalidArgument(format!(
                "step sizes must satisfy 0 < delta_min <= delta_zero <= delta_max, \
                 got {} / {} / {}",
                c.delta_min, c.delta_zero, c.delta_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingStatus {
    /// Every pixel's output sign matched its target.
    FullyRecognized,
    /// The convergence value stopped improving, the epoch cap was hit,
    /// or the error became non-finite.
    Stalled,
}

/// Result of a training attempt. `network` holds the final weights.
#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub status: TrainingStatus,
    pub network: Network,
    /// Number of update steps applied (0 when the initial weights
    /// already recognize the image).
    pub epochs_run: usize,
    pub mse: f64,
    pub fraction_recognized: f64,
    /// Set when training aborted on a non-finite error value.
    pub non_finite: bool,
}

impl TrainingOutcome {
    pub fn fully_recognized(&self) -> bool {
        self.status == TrainingStatus::FullyRecognized
    }
}

/// Trains `net` on the image's full pixel grid until full recognition,
/// stall, or the epoch cap.
///
/// Each epoch evaluates the whole batch, checks the success and stall
/// criteria, then applies one iRProp+ update from the exact full-batch
/// gradient. Deterministic: identical inputs give identical outcomes.
pub fn train_to_recognition(
    net: Network,
    img: &BinaryImage,
    params: &TrainingParams,
) -> Result<TrainingOutcome> {
    params.validate()?;
    let mut net = net;
    let mut ws = Workspace::new(net.layer_sizes());
    let mut grad = vec![0.0; net.param_count()];
    let mut flat = net.params();
    let mut opt = IrpropPlus::new(flat.len(), params.irprop);

    let mut best_monitored = f64::INFINITY;
    let mut epochs_since_improvement = 0usize;
    let mut epochs = 0usize;

    loop {
        let ev = net.evaluate_and_gradient_ws(img, &mut ws, &mut grad);
        if !ev.mse.is_finite() {
            return Ok(TrainingOutcome {
                status: TrainingStatus::Stalled,
                network: net,
                epochs_run: epochs,
                mse: ev.mse,
                fraction_recognized: ev.fraction_recognized,
                non_finite: true,
            });
        }
        if ev.fraction_recognized == 1.0 {
            return Ok(TrainingOutcome {
                status: TrainingStatus::FullyRecognized,
                network: net,
                epochs_run: epochs,
                mse: ev.mse,
                fraction_recognized: 1.0,
                non_finite: false,
            });
        }
        let monitored = params.metric.monitored(ev.mse, ev.fraction_recognized);
        if monitored <= (1.0 - params.epsilon) * best_monitored {
            best_monitored = monitored;
            epochs_since_improvement = 0;
        } else {
            epochs_since_improvement += 1;
        }
        if epochs_since_improvement >= params.n_c || epochs >= params.max_epochs {
            return Ok(TrainingOutcome {
                status: TrainingStatus::Stalled,
                network: net,
                epochs_run: epochs,
                mse: ev.mse,
                fraction_recognized: ev.fraction_recognized,
                non_finite: false,
            });
        }
        opt.step(&mut flat, &grad, ev.mse)?;
        net.set_params(&flat)?;
        epochs += 1;
    }
}
