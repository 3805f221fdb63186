use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every check in the crate.
///
/// Values are passed explicitly; there is no process-wide mutable setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative eigenvalue tolerance for positivity, scaled by `max(1, ‖M‖_tr)`.
    pub psd: f64,
    /// Absolute Frobenius tolerance for the Markov, oCP and non-signalling residuals.
    pub verdict: f64,
    /// Residuals at or above this value are reported as clear violations.
    pub violation: f64,
    /// Maximum superoperator condition number accepted by channel inversion.
    pub max_condition: f64,
    /// Unitarity tolerance on ‖U†U − 1‖_F.
    pub unitary: f64,
    /// Trace-preservation tolerance for instruments and states.
    pub trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: 1e-9,
            verdict: 1e-8,
            violation: 1e-2,
            max_condition: 1e8,
            unitary: 1e-10,
            trace: 1e-9,
        }
    }
}

impl Tolerances {
    /// Default tolerances with the verdict threshold replaced.
    pub fn with_verdict(verdict: f64) -> Self {
        Self {
            verdict,
            ..Self::default()
        }
    }
}
