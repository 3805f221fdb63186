//! Probability tables for the non-signalling experiment.
//!
//! States `ρ_r^(k)` are fed in at `r`. At `s` the experimenter either does
//! nothing (`x = 0`) or measures `μ_s^(m)` and prepares `ρ_s^(ℓ)` (`x = 1`).
//! A POVM `μ_t^(n)` is measured at `t`.

use serde::{Deserialize, Serialize};

use crate::channels::{validate_povm, Channel};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::process_tensor::{born_rule, build_process_tensor, ProcessTensor};
use crate::qmat::{ket_bra, names, CMatrix, Leg, LeggedOperator, C64};
use crate::scenarios::Scenario;

/// `d²` pure states spanning the operator space: `|i⟩`, `(|i⟩+|j⟩)/√2`, `(|i⟩+i|j⟩)/√2`.
pub fn tomographic_states(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[i] = C64::new(1.0, 0.0);
        out.push(ket_bra(&v));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[i] = C64::new(h, 0.0);
                v[j] = phase * h;
                out.push(ket_bra(&v));
            }
        }
    }
    out
}

/// Informationally complete POVM `G^{-1/2} ψ_k G^{-1/2}` built from [`tomographic_states`].
pub fn tomographic_povm(d: usize) -> Vec<CMatrix> {
    let states = tomographic_states(d);
    let g: CMatrix = states.iter().sum();
    let eig = g.symmetric_eigen();
    let inv_sqrt = CMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(1.0 / e.sqrt(), 0.0)));
    let w = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    states.iter().map(|p| &w * p * &w).collect()
}

#[derive(Clone, Debug)]
pub struct SignallingInputs {
    pub states_r: Vec<CMatrix>,
    pub povm_s: Vec<CMatrix>,
    pub preps_s: Vec<CMatrix>,
    pub povm_t: Vec<CMatrix>,
}

impl SignallingInputs {
    /// Tomographically complete choices at every time.
    pub fn tomographic(d: usize) -> Self {
        Self {
            states_r: tomographic_states(d),
            povm_s: tomographic_povm(d),
            preps_s: tomographic_states(d),
            povm_t: tomographic_povm(d),
        }
    }

    fn validate(&self, d: usize, tol: &Tolerances) -> Result<()> {
        for (label, set) in [("states_r", &self.states_r), ("preps_s", &self.preps_s)] {
            if set.is_empty() {
                return Err(Error::InvalidState(format!("{label} is empty")));
            }
            for (i, rho) in set.iter().enumerate() {
                if rho.shape() != (d, d) {
                    return Err(Error::DimensionMismatch(format!("{label}[{i}] is not {d}x{d}")));
                }
                LeggedOperator::on("x", rho.clone())?
                    .validate_state(tol.psd)
                    .map_err(|e| Error::InvalidState(format!("{label}[{i}]: {e}")))?;
            }
        }
        for (label, set) in [("povm_s", &self.povm_s), ("povm_t", &self.povm_t)] {
            if set.iter().any(|e| e.shape() != (d, d)) {
                return Err(Error::DimensionMismatch(format!("{label} elements must be {d}x{d}")));
            }
            validate_povm(set, tol)
                .map_err(|e| Error::IncompleteInstrument(format!("{label}: {e}")))?;
        }
        Ok(())
    }
}

/// `P(nm|ℓk, x=1)` and the undisturbed `P(n|k, x=0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignallingTable {
    /// Indexed `[k][ℓ][m][n]`.
    pub joint: Vec<Vec<Vec<Vec<f64>>>>,
    /// Indexed `[k][n]`.
    pub undisturbed: Vec<Vec<f64>>,
}

impl SignallingTable {
    pub fn from_process_tensor(pt: &ProcessTensor, inputs: &SignallingInputs, tol: &Tolerances) -> Result<Self> {
        let d = pt.sys_dim();
        inputs.validate(d, tol)?;
        let identity = Channel::identity(d);
        let undisturbed = inputs
            .states_r
            .iter()
            .map(|rho| {
                inputs
                    .povm_t
                    .iter()
                    .map(|mu| born_rule(pt, mu, &identity, rho, tol))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        // measure-and-prepare element: Choi ρ_ℓ ⊗ μ_mᵀ on (out, in)
        let mut elements = Vec::with_capacity(inputs.preps_s.len());
        for prep in &inputs.preps_s {
            let mut row = Vec::with_capacity(inputs.povm_s.len());
            for mu in &inputs.povm_s {
                let choi = LeggedOperator::new(
                    vec![Leg::new(names::OUT, d), Leg::new(names::IN, d)],
                    prep.kronecker(&mu.transpose()),
                )?;
                row.push(Channel::from_choi(&choi, names::OUT, names::IN)?);
            }
            elements.push(row);
        }
        let joint = inputs
            .states_r
            .iter()
            .map(|rho| {
                elements
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|el| {
                                inputs
                                    .povm_t
                                    .iter()
                                    .map(|mu| born_rule(pt, mu, el, rho, tol))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { joint, undisturbed })
    }

    /// `P(n|ℓk, x=1) = Σ_m P(nm|ℓk, x=1)`, indexed `[k][ℓ][n]`.
    pub fn marginal(&self) -> Vec<Vec<Vec<f64>>> {
        self.joint
            .iter()
            .map(|by_l| {
                by_l.iter()
                    .map(|by_m| {
                        let n_out = by_m.first().map_or(0, Vec::len);
                        (0..n_out).map(|n| by_m.iter().map(|p| p[n]).sum()).collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// `max_{n,ℓ,k,k'} |P(n|ℓk) − P(n|ℓk')|`.
    pub fn max_signalling(&self) -> f64 {
        let marg = self.marginal();
        let mut worst = 0.0f64;
        let Some(first) = marg.first() else { return 0.0 };
        for (l, outcomes) in first.iter().enumerate() {
            for n in 0..outcomes.len() {
                let vals = marg.iter().map(|by_l| by_l[l][n]);
                let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                worst = worst.max(hi - lo);
            }
        }
        worst
    }

    /// Largest deviation of `Σ_{n,m} P(nm|ℓk)` (and `Σ_n P(n|k, x=0)`) from 1.
    pub fn completeness_residual(&self) -> f64 {
        let a = self
            .joint
            .iter()
            .flatten()
            .map(|by_m| (by_m.iter().flatten().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        let b = self
            .undisturbed
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        a.max(b)
    }
}

pub fn signalling_probability_table(
    scn: &Scenario,
    inputs: &SignallingInputs,
    tol: &Tolerances,
) -> Result<SignallingTable> {
    let pt = build_process_tensor(scn, tol)?;
    SignallingTable::from_process_tensor(&pt, inputs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tomographic_sets_are_complete() {
        for d in [2, 3] {
            let states = tomographic_states(d);
            assert_eq!(states.len(), d * d);
            // linear independence: Gram matrix of vectorised states has full rank
            let n = states.len();
            let gram = CMatrix::from_fn(n, n, |i, j| (states[i].adjoint() * &states[j]).trace());
            let rank = gram.singular_values().iter().filter(|s| **s > 1e-10).count();
            assert_eq!(rank, n);
            let povm = tomographic_povm(d);
            assert!(validate_povm(&povm, &Tolerances::default()).is_ok());
        }
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let scn = crate::scenarios::make_app_b().unwrap();
        let mut inputs = SignallingInputs::tomographic(2);
        inputs.povm_t.pop();
        let err = signalling_probability_table(&scn, &inputs, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::IncompleteInstrument(_)));
    }
}
