//! Parameter sweeps over the partial-swap family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::divisibility::{classify, ClassificationReport, TimeGrid};
use crate::error::{Error, Result};
use crate::scenarios::make_partial_swap;

/// Columns a sweep can record, in CSV order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    IcpMinEig,
    OcpResidual,
    NonsigResidual,
    MarkovResidual,
    Label,
}

impl SweepQuantity {
    pub const ALL: [SweepQuantity; 5] = [
        SweepQuantity::IcpMinEig,
        SweepQuantity::OcpResidual,
        SweepQuantity::NonsigResidual,
        SweepQuantity::MarkovResidual,
        SweepQuantity::Label,
    ];

    pub fn column(self) -> &'static str {
        match self {
            SweepQuantity::IcpMinEig => "icp_min_eig",
            SweepQuantity::OcpResidual => "ocp_residual",
            SweepQuantity::NonsigResidual => "nonsig_residual",
            SweepQuantity::MarkovResidual => "markov_residual",
            SweepQuantity::Label => "label",
        }
    }

    fn value(self, report: &ClassificationReport) -> String {
        match self {
            SweepQuantity::IcpMinEig => fmt_num(report.icp.min_eigenvalue.unwrap_or(f64::NAN)),
            SweepQuantity::OcpResidual => fmt_num(report.ocp.residual),
            SweepQuantity::NonsigResidual => fmt_num(report.nonsignalling.residual),
            SweepQuantity::MarkovResidual => fmt_num(report.markov.residual),
            SweepQuantity::Label => report.label_text(),
        }
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

/// Parameters the partial-swap sweep understands.
pub const SWEEP_PARAMS: [&str; 1] = ["omega_t"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub quantities: Vec<SweepQuantity>,
    pub grid_points: usize,
}

impl SweepSpec {
    pub fn new(parameter: &str, lo: f64, hi: f64, step: f64, grid_points: usize) -> Result<Self> {
        if !SWEEP_PARAMS.contains(&parameter) {
            return Err(Error::schema("param", format!("unknown parameter `{parameter}`; expected one of {SWEEP_PARAMS:?}")));
        }
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::schema("range", format!("need lo < hi, got {lo}:{hi}")));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::schema("range", format!("step must be positive, got {step}")));
        }
        Ok(Self {
            parameter: parameter.to_string(),
            lo,
            hi,
            step,
            quantities: SweepQuantity::ALL.to_vec(),
            grid_points,
        })
    }

    /// Parses `lo:hi:step`.
    pub fn parse_range(range: &str) -> Result<(f64, f64, f64)> {
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::schema("range", format!("expected lo:hi:step, got `{range}`")));
        }
        let mut out = [0.0; 3];
        for (slot, p) in out.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::schema("range", format!("`{p}` is not a number")))?;
        }
        Ok((out[0], out[1], out[2]))
    }

    /// `lo + k·step` for every `k` with the value not exceeding `hi`.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub report: ClassificationReport,
}

/// Runs the sweep; points are evaluated in parallel and returned in parameter order.
///
/// For `omega_t` the partial-swap scenario uses `t = 1`, `s = 1/2` and
/// `ω = omega_t`, classified on a uniform grid over `[0, 1]`.
pub fn run_sweep(spec: &SweepSpec, tol: &Tolerances) -> Result<Vec<SweepRow>> {
    let grid = TimeGrid::uniform(1.0, spec.grid_points)?;
    spec.values()
        .par_iter()
        .map(|&v| {
            let scn = make_partial_swap(v, 0.5, 1.0)?;
            Ok(SweepRow {
                param: v,
                report: classify(&scn, &grid, tol)?,
            })
        })
        .collect()
}

/// CSV with a header row; `param` is always the first column.
pub fn to_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = String::from("param");
    for q in &spec.quantities {
        out.push(',');
        out.push_str(q.column());
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{}", row.param));
        for q in &spec.quantities {
            out.push(',');
            out.push_str(&q.value(&row.report));
        }
        out.push('\n');
    }
    out
}
