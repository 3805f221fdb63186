//! Step-by-step density-matrix simulation, used to cross-check the Born rule.
//!
//! Works on plain matrices in the `(sys, env…)` basis of a scenario and never
//! touches Choi operators or process tensors.

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::config::Tolerances;
use crate::error::Result;
use crate::process_tensor::{born_rule, build_process_tensor};
use crate::qmat::CMatrix;
use crate::random::{random_instrument_kraus, random_povm, random_scenarios, rng_from_seed, wishart_state};
use crate::scenarios::Scenario;

/// Raw matrices of a dilation: `eta` on the environment, unitaries on `sys ⊗ env`.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub sys_dim: usize,
    pub eta: CMatrix,
    pub u_sr: CMatrix,
    pub u_ts: CMatrix,
}

impl Dilation {
    pub fn from_scenario(scn: &Scenario) -> Result<Self> {
        Ok(Self {
            sys_dim: scn.sys_dim(),
            eta: scn.eta().data().clone(),
            u_sr: scn.u_sr()?.into_data(),
            u_ts: scn.u_ts()?.into_data(),
        })
    }

    fn env_dim(&self) -> usize {
        self.eta.nrows()
    }

    /// `tr[(E ⊗ 1) U_ts (Σ_k K_k U_sr (ρ ⊗ η) U_sr† K_k†) U_ts†]` with `K_k ⊗ 1` acting on the system.
    pub fn probability(&self, rho_r: &CMatrix, kraus_s: &[CMatrix], effect_t: &CMatrix) -> f64 {
        let id_env = CMatrix::identity(self.env_dim(), self.env_dim());
        let mut state = rho_r.kronecker(&self.eta);
        state = &self.u_sr * state * self.u_sr.adjoint();
        let mut after = CMatrix::zeros(state.nrows(), state.ncols());
        for k in kraus_s {
            let big = k.kronecker(&id_env);
            after += &big * &state * big.adjoint();
        }
        let state = &self.u_ts * after * self.u_ts.adjoint();
        (effect_t.kronecker(&id_env) * state).trace().re
    }
}

/// Outcome of [`oracle_equivalence`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSummary {
    pub scenarios: usize,
    pub triples: usize,
    pub probabilities: usize,
    /// max |born_rule − oracle|.
    pub max_deviation: f64,
    /// max |Σ_outcomes P − 1| per instrument triple.
    pub max_completeness_error: f64,
}

/// Random qubit scenarios with a qubit environment, each probed with random
/// instrument triples (a state at `r`, an instrument at `s`, a POVM at `t`).
pub fn oracle_equivalence(
    seed: u64,
    scenarios: usize,
    triples_per_scenario: usize,
    tol: &Tolerances,
) -> Result<EquivalenceSummary> {
    let scns = random_scenarios(seed, scenarios, 2, 2)?;
    compare_with_oracle(&scns, seed, triples_per_scenario, tol)
}

/// Compares [`born_rule`] with [`Dilation::probability`] on the given scenarios.
/// Instruments are drawn from a stream seeded independently of the scenarios.
pub fn compare_with_oracle(
    scenarios: &[Scenario],
    seed: u64,
    triples_per_scenario: usize,
    tol: &Tolerances,
) -> Result<EquivalenceSummary> {
    let mut rng = rng_from_seed(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut summary = EquivalenceSummary {
        scenarios: scenarios.len(),
        triples: 0,
        probabilities: 0,
        max_deviation: 0.0,
        max_completeness_error: 0.0,
    };
    for scn in scenarios {
        let d = scn.sys_dim();
        let pt = build_process_tensor(scn, tol)?;
        let dil = Dilation::from_scenario(scn)?;
        for _ in 0..triples_per_scenario {
            let rho = wishart_state(&mut rng, d);
            let kraus = random_instrument_kraus(&mut rng, d, 2 + summary.triples % 2);
            let povm = random_povm(&mut rng, d, 3 - summary.triples % 2);
            let mut total = 0.0;
            for k in &kraus {
                let element = Channel::from_kraus(std::slice::from_ref(k))?;
                for e in &povm {
                    let p = born_rule(&pt, e, &element, &rho, tol)?;
                    let q = dil.probability(&rho, std::slice::from_ref(k), e);
                    summary.max_deviation = summary.max_deviation.max((p - q).abs());
                    summary.probabilities += 1;
                    total += p;
                }
            }
            summary.max_completeness_error = summary.max_completeness_error.max((total - 1.0).abs());
            summary.triples += 1;
        }
    }
    Ok(summary)
}
