//! Divisibility by inversion on a time grid and the four-way classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{compose_choi, dilate, invert, Channel};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::process_tensor::{
    build_process_tensor, check_conditional_nonsignalling, check_markov, check_ocp, chi_decompose,
    Check,
};
use crate::scenarios::{Scenario, FIXED_TIMES};

/// Default number of grid points for parametric scenarios.
pub const DEFAULT_GRID_POINTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// At least three strictly increasing points, the first one 0.
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points, got {}", times.len())));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid("first point must be 0".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("times must be finite".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("times must be strictly increasing".into()));
        }
        Ok(Self { times })
    }

    /// `n` evenly spaced points on `[0, end]`.
    pub fn uniform(end: f64, n: usize) -> Result<Self> {
        if n < 3 || !end.is_finite() || end <= 0.0 {
            return Err(Error::InvalidGrid(format!("cannot build {n} points on [0, {end}]")));
        }
        let last = (n - 1) as f64;
        Self::new((0..n).map(|i| end * i as f64 / last).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Cp,
    NotCp,
    /// `Λ_{s:0}` could not be inverted.
    Inapplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub earlier: usize,
    pub later: usize,
    pub status: PairStatus,
    pub min_eigenvalue: Option<f64>,
    pub condition_number: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcpVerdict {
    /// Every pair is applicable and CP.
    Yes,
    /// Every applicable pair is CP, but some `Λ_{s:0}` with `s > 0` are singular.
    Partial,
    /// Some applicable pair is not CP.
    No,
    /// No `Λ_{s:0}` with `s > 0` could be inverted.
    Inapplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcpReport {
    pub pairs: Vec<PairVerdict>,
    pub global: IcpVerdict,
    /// Smallest Choi eigenvalue over applicable pairs.
    pub min_eigenvalue: Option<f64>,
}

/// Tests `Φ_{t:s} = Λ_{t:0} ∘ Λ_{s:0}⁻¹` for complete positivity on every pair `s < t`.
///
/// `family[0]` must be the identity channel.
pub fn icp_check(family: &[Channel], tol: &Tolerances) -> Result<IcpReport> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidGrid("empty channel family".into()))?;
    let id = Channel::identity(first.in_dim());
    if first.out_dim() != first.in_dim() || first.choi().distance(id.choi())? > 1e-8 {
        return Err(Error::InvalidGrid("the first channel of the family must be the identity".into()));
    }
    let pairs_idx: Vec<(usize, usize)> = (0..family.len())
        .flat_map(|i| ((i + 1)..family.len()).map(move |j| (i, j)))
        .collect();
    let inverses: Vec<std::result::Result<(Channel, f64), f64>> = family
        .par_iter()
        .map(|ch| match invert(ch, tol) {
            Ok(inv) => {
                let sv = ch.superoperator().singular_values();
                let max = sv.iter().copied().fold(0.0, f64::max);
                let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
                Ok((inv, max / min))
            }
            Err(Error::NotInvertible(cond)) => Err(cond),
            Err(_) => Err(f64::INFINITY),
        })
        .collect();
    let pairs = pairs_idx
        .par_iter()
        .map(|&(i, j)| -> Result<PairVerdict> {
            Ok(match &inverses[i] {
                Ok((inv, cond)) => {
                    let phi = compose_choi(&family[j], inv)?;
                    let cp = phi.is_cp(tol.psd);
                    PairVerdict {
                        earlier: i,
                        later: j,
                        status: if cp.is_psd { PairStatus::Cp } else { PairStatus::NotCp },
                        min_eigenvalue: Some(cp.min_eigenvalue),
                        condition_number: Some(*cond),
                    }
                }
                Err(cond) => PairVerdict {
                    earlier: i,
                    later: j,
                    status: PairStatus::Inapplicable,
                    min_eigenvalue: None,
                    condition_number: Some(*cond),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let min_eigenvalue = pairs
        .iter()
        .filter_map(|p| p.min_eigenvalue)
        .reduce(f64::min);
    let nontrivial: Vec<&PairVerdict> = pairs.iter().filter(|p| p.earlier > 0).collect();
    let global = if pairs.iter().any(|p| p.status == PairStatus::NotCp) {
        IcpVerdict::No
    } else if nontrivial.is_empty() || nontrivial.iter().all(|p| p.status == PairStatus::Cp) {
        IcpVerdict::Yes
    } else if nontrivial.iter().any(|p| p.status == PairStatus::Cp) {
        IcpVerdict::Partial
    } else {
        IcpVerdict::Inapplicable
    };
    Ok(IcpReport {
        pairs,
        global,
        min_eigenvalue,
    })
}

/// Process classes, innermost first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Markovian,
    OcpNonmarkovian,
    IcpNotOcp,
    CondNonsignallingOnly,
    General,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Markovian => "markovian",
            Label::OcpNonmarkovian => "ocp_nonmarkovian",
            Label::IcpNotOcp => "icp_not_ocp",
            Label::CondNonsignallingOnly => "cond_nonsignalling_only",
            Label::General => "general",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

/// Residual tests on the process tensor of one triple `(0, s, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub s: f64,
    pub t: f64,
    pub markov: Check,
    pub ocp: Check,
    pub nonsignalling: Check,
    /// ‖tr_{s±}(φ⁺ χ)‖_F.
    pub chi_contraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub scenario: String,
    pub scenario_hash: String,
    pub times: Vec<f64>,
    pub icp: IcpReport,
    pub triples: Vec<TripleReport>,
    /// Worst case over triples.
    pub markov: Check,
    pub ocp: Check,
    pub nonsignalling: Check,
    pub label: Label,
    /// Set when the iCP verdict rests on a family with singular members.
    pub partial: bool,
    /// Containment violations among the individual verdicts; empty for consistent input.
    pub hierarchy_violations: Vec<String>,
    pub tolerances: Tolerances,
}

impl ClassificationReport {
    pub fn label_text(&self) -> String {
        if self.partial {
            format!("{} (partial)", self.label)
        } else {
            self.label.to_string()
        }
    }
}

fn worst(checks: impl Iterator<Item = Check>) -> Check {
    checks
        .reduce(|a, b| Check {
            verdict: a.verdict.min(b.verdict),
            residual: a.residual.max(b.residual),
        })
        .expect("at least one triple")
}

/// Evaluates all four tests and picks the innermost class whose conditions hold.
///
/// For parametric scenarios the family `Λ_{g:0}` ranges over `grid` and a
/// process tensor is built for every consecutive triple `(0, g_i, g_{i+1})`.
/// Fixed-unitary scenarios use their nominal times `0, 1, 2` and ignore `grid`.
pub fn classify(scn: &Scenario, grid: &TimeGrid, tol: &Tolerances) -> Result<ClassificationReport> {
    let times: Vec<f64> = if scn.is_parametric() {
        grid.times().to_vec()
    } else {
        FIXED_TIMES.to_vec()
    };
    let family = times
        .par_iter()
        .map(|&x| dilate(&scn.propagator_from_origin(x)?, scn.eta(), tol))
        .collect::<Result<Vec<_>>>()?;
    let icp = icp_check(&family, tol)?;

    let triples = (1..times.len() - 1)
        .into_par_iter()
        .map(|i| -> Result<TripleReport> {
            let (s, t) = (times[i], times[i + 1]);
            let pt = build_process_tensor(&scn.at_times(s, t)?, tol)?;
            Ok(TripleReport {
                s,
                t,
                markov: check_markov(&pt, tol)?,
                ocp: check_ocp(&pt, tol)?,
                nonsignalling: check_conditional_nonsignalling(&pt, tol)?,
                chi_contraction: chi_decompose(&pt)?.contraction_norm()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let markov = worst(triples.iter().map(|t| t.markov));
    let ocp = worst(triples.iter().map(|t| t.ocp));
    let nonsignalling = worst(triples.iter().map(|t| t.nonsignalling));

    let (m, o, n) = (markov.verdict.is_yes(), ocp.verdict.is_yes(), nonsignalling.verdict.is_yes());
    let icp_ok = icp.global != IcpVerdict::No;
    let icp_holds = matches!(icp.global, IcpVerdict::Yes | IcpVerdict::Partial);
    let label = if m && o && n && icp_ok {
        Label::Markovian
    } else if o && n && icp_ok {
        Label::OcpNonmarkovian
    } else if icp_holds {
        Label::IcpNotOcp
    } else if n {
        Label::CondNonsignallingOnly
    } else {
        Label::General
    };
    let partial = label == Label::IcpNotOcp && icp.global == IcpVerdict::Partial;

    let mut hierarchy_violations = Vec::new();
    if m && !o {
        hierarchy_violations.push("Markov but not oCP-divisible".to_string());
    }
    if o && !n {
        hierarchy_violations.push("oCP-divisible but conditionally signalling".to_string());
    }
    if o && icp.global == IcpVerdict::No {
        hierarchy_violations.push("oCP-divisible but not iCP-divisible".to_string());
    }

    Ok(ClassificationReport {
        scenario: scn.name().to_string(),
        scenario_hash: scn.hash()?,
        times,
        icp,
        triples,
        markov,
        ocp,
        nonsignalling,
        label,
        partial,
        hierarchy_violations,
        tolerances: *tol,
    })
}

/// Grid used by [`classify`] when only a point count is given: `n` points on `[0, t]`.
pub fn default_grid(scn: &Scenario, points: usize) -> Result<TimeGrid> {
    if scn.is_parametric() {
        let (_, t) = scn.times();
        TimeGrid::uniform(t, points)
    } else {
        TimeGrid::new(FIXED_TIMES.to_vec())
    }
}
