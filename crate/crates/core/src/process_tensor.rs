//! Three-time process tensors on legs `(r, s-, s+, t)`.
//!
//! `r` and `s+` are input legs, `s-` and `t` output legs. The tensor is the
//! Choi operator of the comb obtained by feeding halves of unnormalised `φ⁺`
//! pairs into the system at `r` and `s+`, so its trace is `d²` and
//! `tr_t T = 1_{s+} ⊗ L_{s:r}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::{compose_choi, Channel};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::json::{field, MatrixJson};
use crate::qmat::{maximally_entangled, names, CMatrix, Leg, LeggedOperator, C64};
use crate::scenarios::Scenario;

/// Canonical on-disk and in-memory leg order.
pub const CANONICAL_LEGS: [&str; 4] = [names::R, names::S_MINUS, names::S_PLUS, names::T];

/// Three-valued outcome of a residual test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    No,
    Indeterminate,
    Yes,
}

impl Verdict {
    /// `Yes` at or below `tol.verdict`, `No` at or above the violation threshold.
    pub fn grade(residual: f64, tol: &Tolerances) -> Self {
        if residual <= tol.verdict {
            Verdict::Yes
        } else if residual >= tol.violation.max(tol.verdict) {
            Verdict::No
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub verdict: Verdict,
    pub residual: f64,
}

impl Check {
    fn graded(residual: f64, tol: &Tolerances) -> Self {
        Self {
            verdict: Verdict::grade(residual, tol),
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessTensor {
    op: LeggedOperator,
    sys_dim: usize,
}

impl ProcessTensor {
    /// Validates positivity, causality and the `d²` normalisation.
    pub fn from_operator(op: &LeggedOperator, tol: &Tolerances) -> Result<Self> {
        let op = op
            .permute_legs(&CANONICAL_LEGS)
            .map_err(|e| Error::InvalidProcessTensor(e.to_string()))?;
        let d = op.legs()[0].dim;
        if op.legs().iter().any(|l| l.dim != d) {
            return Err(Error::InvalidProcessTensor("all legs must share one dimension".into()));
        }
        let psd = op
            .is_psd(tol.psd)
            .map_err(|e| Error::InvalidProcessTensor(e.to_string()))?;
        if !psd.is_psd {
            return Err(Error::InvalidProcessTensor(format!(
                "not positive (λ_min = {:e})",
                psd.min_eigenvalue
            )));
        }
        let scale = (d * d) as f64;
        let tr = op.trace();
        if (tr - C64::new(scale, 0.0)).norm() > tol.verdict * scale {
            return Err(Error::InvalidProcessTensor(format!("trace is {tr}, expected {scale}")));
        }
        let pt = Self {
            op: op.hermitian_part(),
            sys_dim: d,
        };
        let causal = pt.causality_residual();
        if causal > tol.verdict * scale {
            return Err(Error::InvalidProcessTensor(format!(
                "signals to the past (causality residual {causal:e})"
            )));
        }
        Ok(pt)
    }

    pub fn op(&self) -> &LeggedOperator {
        &self.op
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    fn d(&self) -> f64 {
        self.sys_dim as f64
    }

    /// ‖tr_t T − 1_{s+} ⊗ tr_{s+ t}(T)/d‖_F.
    pub fn causality_residual(&self) -> f64 {
        let lhs = self.op.partial_trace(&[names::T]).expect("canonical legs");
        let marginal = self
            .op
            .partial_trace(&[names::S_PLUS, names::T])
            .expect("canonical legs")
            .scale_real(1.0 / self.d());
        let id = LeggedOperator::identity(vec![Leg::new(names::S_PLUS, self.sys_dim)]).unwrap();
        let rhs = marginal.kron(&id).unwrap();
        lhs.distance(&rhs).unwrap()
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "sys_dim": self.sys_dim,
            "legs": self.op.legs(),
            "data": MatrixJson::from_matrix(self.op.data()),
        })
    }

    /// Reads a tensor stored with the mandatory leg order `(r, s-, s+, t)`.
    pub fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        let legs: Vec<Leg> = field(v, "legs")?;
        let names: Vec<&str> = legs.iter().map(|l| l.name.as_str()).collect();
        if names != CANONICAL_LEGS {
            return Err(Error::schema("legs", format!("expected order {CANONICAL_LEGS:?}, got {names:?}")));
        }
        let data: MatrixJson = field(v, "data")?;
        let op = LeggedOperator::new(legs, data.to_matrix("data")?)
            .map_err(|e| Error::schema("data", e.to_string()))?;
        let pt = Self::from_operator(&op, tol)?;
        if let Some(d) = v.get("sys_dim") {
            if d.as_u64() != Some(pt.sys_dim as u64) {
                return Err(Error::schema("sys_dim", "does not match leg dimensions"));
            }
        }
        Ok(pt)
    }
}

/// Builds the process tensor of a system–environment dilation.
///
/// `u_sr` and `u_ts` act on `sys` plus any subset of the legs of `eta`.
pub fn build_from_dilation(
    eta: &LeggedOperator,
    u_sr: &LeggedOperator,
    u_ts: &LeggedOperator,
    tol: &Tolerances,
) -> Result<ProcessTensor> {
    let d = u_sr.leg_dim(names::SYS)?;
    if u_ts.leg_dim(names::SYS)? != d {
        return Err(Error::InvalidScenario("unitaries disagree on the system dimension".into()));
    }
    for u in [u_sr, u_ts] {
        let residual = u.unitary_residual();
        if residual > tol.unitary {
            return Err(Error::NotUnitary(residual));
        }
    }
    eta.validate_state(tol.psd)?;
    let reserved = [names::SYS, names::R, names::S_MINUS, names::S_PLUS, names::T];
    if let Some(bad) = eta.legs().iter().find(|l| reserved.contains(&l.name.as_str())) {
        return Err(Error::InvalidScenario(format!(
            "environment leg name `{}` is reserved",
            bad.name
        )));
    }
    let sys = Leg::new(names::SYS, d);
    let first = maximally_entangled(&sys, &Leg::new(names::R, d))?;
    let state = first.kron(eta)?.conjugate_by(u_sr)?.relabel(names::SYS, names::S_MINUS)?;
    let second = maximally_entangled(&sys, &Leg::new(names::S_PLUS, d))?;
    let state = state.kron(&second)?.conjugate_by(u_ts)?.relabel(names::SYS, names::T)?;
    let op = state.reduce_to(&CANONICAL_LEGS)?;
    ProcessTensor::from_operator(&op, tol)
}

pub fn build_process_tensor(scn: &Scenario, tol: &Tolerances) -> Result<ProcessTensor> {
    build_from_dilation(scn.eta(), &scn.u_sr()?, &scn.u_ts()?, tol)
}

/// Generalised Born rule `tr[(ρ_rᵀ ⊗ M_sᵀ ⊗ M_t) T]`.
///
/// `m_s` is the Choi operator of the CP map applied at `s`, read with its
/// output on `s+` and input on `s-`. Input-side operators enter transposed
/// because `T` is a Choi operator.
pub fn born_rule(
    pt: &ProcessTensor,
    m_t: &CMatrix,
    m_s: &Channel,
    m_r: &CMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let d = pt.sys_dim;
    if m_t.shape() != (d, d) || m_r.shape() != (d, d) || m_s.in_dim() != d || m_s.out_dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "instrument elements must act on dimension {d}"
        )));
    }
    for (label, m) in [("measurement at t", m_t), ("state at r", m_r)] {
        let r = LeggedOperator::on("x", m.clone())?.is_psd(tol.psd)?;
        if !r.is_psd {
            return Err(Error::InvalidState(format!(
                "{label} is not positive (λ_min = {:e})",
                r.min_eigenvalue
            )));
        }
    }
    let cp = m_s.is_cp(tol.psd);
    if !cp.is_psd {
        return Err(Error::NotPositive(cp.min_eigenvalue));
    }
    let rho = LeggedOperator::on(names::R, m_r.transpose())?;
    let mid = m_s
        .choi()
        .transpose()
        .relabel_all(&[(names::OUT, names::S_PLUS), (names::IN, names::S_MINUS)])?;
    let eff = LeggedOperator::on(names::T, m_t.clone())?;
    let w = rho.kron(&mid)?.kron(&eff)?.aligned_to(&pt.op)?;
    // tr(W T) = Σ_ij W_ij T_ji
    let t = pt.op.data();
    let wd = w.data();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..wd.nrows() {
        for j in 0..wd.ncols() {
            acc += wd[(i, j)] * t[(j, i)];
        }
    }
    Ok(acc.re)
}

/// `L_{t:r} = tr_{s±}(φ⁺ T)`: the process with nothing done at `s`.
pub fn extract_l_tr(pt: &ProcessTensor) -> Result<Channel> {
    let d = pt.sys_dim;
    let phi = maximally_entangled(&Leg::new(names::S_PLUS, d), &Leg::new(names::S_MINUS, d))?;
    let contracted = phi
        .embed(pt.op.legs())?
        .matmul(&pt.op)?
        .partial_trace(&[names::S_MINUS, names::S_PLUS])?;
    Channel::from_choi(&contracted, names::T, names::R)
}

/// `L_{s:r} = tr_{s+ t}(T)/d`.
pub fn extract_l_sr(pt: &ProcessTensor) -> Result<Channel> {
    let m = pt.op.reduce_to(&[names::S_MINUS, names::R])?.scale_real(1.0 / pt.d());
    Channel::from_choi(&m, names::S_MINUS, names::R)
}

/// `L_{t:s} = tr_{r s-}(T)/d`.
pub fn extract_l_ts(pt: &ProcessTensor) -> Result<Channel> {
    let m = pt.op.reduce_to(&[names::T, names::S_PLUS])?.scale_real(1.0 / pt.d());
    Channel::from_choi(&m, names::T, names::S_PLUS)
}

/// Conditional non-signalling from `r` to `t` with the system discarded at `s-`:
/// residual ‖tr_{s-}T − 1_r ⊗ tr_{r s-}(T)/d‖_F.
pub fn check_conditional_nonsignalling(pt: &ProcessTensor, tol: &Tolerances) -> Result<Check> {
    let lhs = pt.op.partial_trace(&[names::S_MINUS])?;
    let marginal = pt
        .op
        .partial_trace(&[names::R, names::S_MINUS])?
        .scale_real(1.0 / pt.d());
    let id = LeggedOperator::identity(vec![Leg::new(names::R, pt.sys_dim)])?;
    let residual = lhs.distance(&id.kron(&marginal)?)?;
    Ok(Check::graded(residual, tol))
}

/// Frobenius distance between `L_{t:r}` and `L_{t:s} ⋆ L_{s:r}`.
pub fn ocp_residual(pt: &ProcessTensor) -> Result<f64> {
    let direct = extract_l_tr(pt)?;
    let composed = compose_choi(&extract_l_ts(pt)?, &extract_l_sr(pt)?)?;
    direct.choi().distance(composed.choi())
}

/// Operational CP divisibility. Requires both the composition residual and
/// the conditional non-signalling test to pass.
pub fn check_ocp(pt: &ProcessTensor, tol: &Tolerances) -> Result<Check> {
    let residual = ocp_residual(pt)?;
    let own = Verdict::grade(residual, tol);
    let nonsig = check_conditional_nonsignalling(pt, tol)?;
    Ok(Check {
        verdict: own.min(nonsig.verdict),
        residual,
    })
}

/// `L_{t:s} ⊗ L_{s:r}` laid out on the canonical legs.
pub fn markov_part(pt: &ProcessTensor) -> Result<LeggedOperator> {
    let ts = extract_l_ts(pt)?
        .choi()
        .relabel_all(&[(names::OUT, names::T), (names::IN, names::S_PLUS)])?;
    let sr = extract_l_sr(pt)?
        .choi()
        .relabel_all(&[(names::OUT, names::S_MINUS), (names::IN, names::R)])?;
    ts.kron(&sr)?.permute_legs(&CANONICAL_LEGS)
}

/// Residual ‖T − L_{t:s} ⊗ L_{s:r}‖_F.
pub fn check_markov(pt: &ProcessTensor, tol: &Tolerances) -> Result<Check> {
    let residual = pt.op.distance(&markov_part(pt)?)?;
    Ok(Check::graded(residual, tol))
}

/// `T = L_{t:s} ⊗ L_{s:r} + χ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiDecomposition {
    pub markov_part: LeggedOperator,
    pub chi: LeggedOperator,
}

impl ChiDecomposition {
    /// ‖tr_{s±}(φ⁺ χ)‖_F; vanishes exactly for oCP-divisible processes.
    pub fn contraction_norm(&self) -> Result<f64> {
        let d = self.chi.legs()[0].dim;
        let phi = maximally_entangled(&Leg::new(names::S_PLUS, d), &Leg::new(names::S_MINUS, d))?;
        let c = phi
            .embed(self.chi.legs())?
            .matmul(&self.chi)?
            .partial_trace(&[names::S_MINUS, names::S_PLUS])?;
        Ok(c.frobenius_norm())
    }

    /// Larger of ‖tr_{s- r} χ‖_F and ‖tr_{t s+} χ‖_F.
    pub fn marginal_residual(&self) -> Result<f64> {
        let a = self.chi.partial_trace(&[names::S_MINUS, names::R])?.frobenius_norm();
        let b = self.chi.partial_trace(&[names::T, names::S_PLUS])?.frobenius_norm();
        Ok(a.max(b))
    }
}

pub fn chi_decompose(pt: &ProcessTensor) -> Result<ChiDecomposition> {
    let markov_part = markov_part(pt)?;
    let chi = pt.op.sub(&markov_part)?;
    Ok(ChiDecomposition { markov_part, chi })
}
