//! Quantum channels stored as Choi operators on `(out, in)`.
//!
//! The Choi operator of a map `Γ` is `J = Σ_ij Γ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, i.e. the
//! map applied to the first half of an unnormalised `φ⁺`. A channel acts as
//! `Γ(ρ) = tr_in[J (1 ⊗ ρᵀ)]`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::json::{field, MatrixJson};
use crate::qmat::{maximally_entangled, names, CMatrix, Leg, LeggedOperator, PsdReport, C64};

/// Cached positivity and trace-preservation diagnostics of a Choi operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDiagnostics {
    pub min_eigenvalue: f64,
    pub trace_norm: f64,
    /// ‖tr_out(J) − 1‖_F.
    pub tp_residual: f64,
}

/// Trace-preservation verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TpReport {
    pub is_tp: bool,
    pub residual: f64,
}

/// A linear map given by its Choi operator on legs `(out, in)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    choi: LeggedOperator,
    diagnostics: ChannelDiagnostics,
}

impl Channel {
    /// Wraps a Choi operator whose output and input legs are named `out` and `input`.
    ///
    /// The operator is replaced by its Hermitian part; operators farther than
    /// `1e-6·max(1, ‖J‖_F)` from Hermitian are rejected.
    pub fn from_choi(choi: &LeggedOperator, out: &str, input: &str) -> Result<Self> {
        if choi.legs().len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "a Choi operator needs exactly two legs, got {}",
                choi.legs().len()
            )));
        }
        let ordered = choi
            .permute_legs(&[out, input])?
            .relabel_all(&[(out, "__out"), (input, "__in")])?
            .relabel_all(&[("__out", names::OUT), ("__in", names::IN)])?;
        let herm = ordered.hermitian_residual();
        if herm > 1e-6 * ordered.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Self::from_hermitian(ordered.hermitian_part()))
    }

    fn from_hermitian(choi: LeggedOperator) -> Self {
        let ev = choi.eigenvalues();
        let d_in = choi.legs()[1].dim;
        let reduced = choi
            .partial_trace(&[names::OUT])
            .expect("choi carries an out leg");
        let tp_residual = (reduced.data() - CMatrix::identity(d_in, d_in))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        Self {
            diagnostics: ChannelDiagnostics {
                min_eigenvalue: ev.first().copied().unwrap_or(0.0),
                trace_norm: ev.iter().map(|e| e.abs()).sum(),
                tp_residual,
            },
            choi,
        }
    }

    fn from_choi_matrix(data: CMatrix, d_out: usize, d_in: usize) -> Result<Self> {
        let op = LeggedOperator::new(vec![Leg::new(names::OUT, d_out), Leg::new(names::IN, d_in)], data)?;
        Self::from_choi(&op, names::OUT, names::IN)
    }

    pub fn identity(d: usize) -> Self {
        let phi = maximally_entangled(&Leg::new(names::OUT, d), &Leg::new(names::IN, d))
            .expect("equal dimensions");
        Self::from_hermitian(phi)
    }

    /// `ρ ↦ tr(ρ)·σ` on a `d_in`-dimensional input; Choi `σ ⊗ 1`.
    pub fn replace(state: &CMatrix, d_in: usize) -> Result<Self> {
        Self::from_choi_matrix(state.kronecker(&CMatrix::identity(d_in, d_in)), state.nrows(), d_in)
    }

    /// `ρ ↦ Σ_k K_k ρ K_k†`.
    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no Kraus operators".into()))?;
        let (d_out, d_in) = first.shape();
        let mut data = CMatrix::zeros(d_out * d_in, d_out * d_in);
        for k in kraus {
            if k.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
            }
            // vec of K ⊗ 1 acting on Σ|i⟩|i⟩
            let mut v = nalgebra::DVector::<C64>::zeros(d_out * d_in);
            for a in 0..d_out {
                for i in 0..d_in {
                    v[a * d_in + i] = k[(a, i)];
                }
            }
            data += &v * v.adjoint();
        }
        Self::from_choi_matrix(data, d_out, d_in)
    }

    /// Builds a channel from its row-major natural representation
    /// `vec(Γ(ρ)) = S·vec(ρ)`.
    pub fn from_superoperator(s: &CMatrix, d_out: usize, d_in: usize) -> Result<Self> {
        if s.shape() != (d_out * d_out, d_in * d_in) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator is {:?}, expected {}x{}",
                s.shape(),
                d_out * d_out,
                d_in * d_in
            )));
        }
        let n = d_out * d_in;
        let data = CMatrix::from_fn(n, n, |r, c| {
            let (a, p) = (r / d_in, r % d_in);
            let (b, q) = (c / d_in, c % d_in);
            s[(a * d_out + b, p * d_in + q)]
        });
        Self::from_choi_matrix(data, d_out, d_in)
    }

    pub fn choi(&self) -> &LeggedOperator {
        &self.choi
    }

    pub fn out_dim(&self) -> usize {
        self.choi.legs()[0].dim
    }

    pub fn in_dim(&self) -> usize {
        self.choi.legs()[1].dim
    }

    pub fn diagnostics(&self) -> &ChannelDiagnostics {
        &self.diagnostics
    }

    /// The natural representation with row-major vectorisation.
    pub fn superoperator(&self) -> CMatrix {
        let (d_out, d_in) = (self.out_dim(), self.in_dim());
        let j = self.choi.data();
        CMatrix::from_fn(d_out * d_out, d_in * d_in, |r, c| {
            let (a, b) = (r / d_out, r % d_out);
            let (p, q) = (c / d_in, c % d_in);
            j[(a * d_in + p, b * d_in + q)]
        })
    }

    pub fn is_cp(&self, tol: f64) -> PsdReport {
        PsdReport {
            is_psd: self.diagnostics.min_eigenvalue >= -tol * self.diagnostics.trace_norm.max(1.0),
            min_eigenvalue: self.diagnostics.min_eigenvalue,
        }
    }

    pub fn is_tp(&self, tol: f64) -> TpReport {
        TpReport {
            is_tp: self.diagnostics.tp_residual <= tol,
            residual: self.diagnostics.tp_residual,
        }
    }

    pub fn is_cptp(&self, tol: &Tolerances) -> bool {
        self.is_cp(tol.psd).is_psd && self.is_tp(tol.trace).is_tp
    }

    /// `Γ(ρ)` for a plain matrix.
    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        let (d_out, d_in) = (self.out_dim(), self.in_dim());
        if rho.shape() != (d_in, d_in) {
            return Err(Error::DimensionMismatch(format!(
                "input is {:?}, channel expects {d_in}x{d_in}",
                rho.shape()
            )));
        }
        let j = self.choi.data();
        Ok(CMatrix::from_fn(d_out, d_out, |a, b| {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..d_in {
                for q in 0..d_in {
                    acc += j[(a * d_in + p, b * d_in + q)] * rho[(p, q)];
                }
            }
            acc
        }))
    }

    pub fn to_json(&self, tol: &Tolerances) -> Value {
        serde_json::json!({
            "legs": self.choi.legs(),
            "choi": MatrixJson::from_matrix(self.choi.data()),
            "flags": {
                "cp": self.is_cp(tol.psd).is_psd,
                "tp": self.is_tp(tol.trace).is_tp,
            },
        })
    }

    /// Reads `{legs, choi, flags}`. The first leg is the output, the second the input.
    /// Stored flags are recomputed, not trusted.
    pub fn from_json(v: &Value) -> Result<Self> {
        let legs: Vec<Leg> = field(v, "legs")?;
        let matrix: MatrixJson = field(v, "choi")?;
        if legs.len() != 2 {
            return Err(Error::schema("legs", "a channel has exactly two legs (out, in)"));
        }
        let op = LeggedOperator::new(legs.clone(), matrix.to_matrix("choi")?)
            .map_err(|e| Error::schema("choi", e.to_string()))?;
        Self::from_choi(&op, &legs[0].name, &legs[1].name)
    }
}

/// Link product over every leg the two operators share:
/// `tr_shared[(Aᵀ_shared ⊗ 1)(1 ⊗ B)]`.
pub fn link_product(a: &LeggedOperator, b: &LeggedOperator) -> Result<LeggedOperator> {
    let shared: Vec<&str> = a
        .leg_names()
        .into_iter()
        .filter(|n| b.has_leg(n))
        .collect();
    for name in &shared {
        if a.leg_dim(name)? != b.leg_dim(name)? {
            return Err(Error::DimensionMismatch(format!(
                "shared leg `{name}` has different dimensions"
            )));
        }
    }
    let mut all: Vec<Leg> = a.legs().to_vec();
    all.extend(b.legs().iter().filter(|l| !a.has_leg(&l.name)).cloned());
    let at = a.partial_transpose(&shared)?.embed(&all)?;
    let bb = b.embed(&all)?;
    at.matmul(&bb)?.partial_trace(&shared)
}

/// Reduced dynamics `ρ ↦ tr_env[U(ρ ⊗ η)U†]`.
///
/// `u` must carry a `sys` leg; its remaining legs must be legs of `eta`.
pub fn dilate(u: &LeggedOperator, eta: &LeggedOperator, tol: &Tolerances) -> Result<Channel> {
    let d = u.leg_dim(names::SYS)?;
    let residual = u.unitary_residual();
    if residual > tol.unitary {
        return Err(Error::NotUnitary(residual));
    }
    eta.validate_state(tol.psd)?;
    if eta.has_leg(names::SYS) || eta.has_leg(names::IN) {
        return Err(Error::InvalidState("environment legs may not be named sys or in".into()));
    }
    for leg in u.legs().iter().filter(|l| l.name != names::SYS) {
        if eta.leg_dim(&leg.name)? != leg.dim {
            return Err(Error::DimensionMismatch(format!(
                "unitary leg `{}` does not match the environment",
                leg.name
            )));
        }
    }
    let phi = maximally_entangled(&Leg::new(names::SYS, d), &Leg::new(names::IN, d))?;
    let evolved = phi.kron(eta)?.conjugate_by(u)?;
    let choi = evolved.reduce_to(&[names::SYS, names::IN])?;
    Channel::from_choi(&choi, names::SYS, names::IN)
}

/// Applies a channel to a single-leg operator; the output keeps the input's leg name.
pub fn apply(ch: &Channel, rho: &LeggedOperator) -> Result<LeggedOperator> {
    if rho.legs().len() != 1 {
        return Err(Error::DimensionMismatch("input must have exactly one leg".into()));
    }
    let out = ch.apply_matrix(rho.data())?;
    LeggedOperator::on(&rho.legs()[0].name, out)
}

/// Choi operator of `later ∘ earlier`.
pub fn compose_choi(later: &Channel, earlier: &Channel) -> Result<Channel> {
    if later.in_dim() != earlier.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose: later expects {}, earlier produces {}",
            later.in_dim(),
            earlier.out_dim()
        )));
    }
    let a = later.choi().relabel(names::IN, "mid")?;
    let b = earlier.choi().relabel(names::OUT, "mid")?;
    let c = link_product(&a, &b)?;
    Channel::from_choi(&c, names::OUT, names::IN)
}

/// Exact inverse of the superoperator, as a generally non-CP linear map.
///
/// Fails with [`Error::NotInvertible`] when the condition number exceeds
/// `tol.max_condition`.
pub fn invert(ch: &Channel, tol: &Tolerances) -> Result<Channel> {
    if ch.in_dim() != ch.out_dim() {
        return Err(Error::NotInvertible(f64::INFINITY));
    }
    let s = ch.superoperator();
    let sv = s.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if condition.is_nan() || condition > tol.max_condition {
        return Err(Error::NotInvertible(condition));
    }
    let inv = s.try_inverse().ok_or(Error::NotInvertible(condition))?;
    Channel::from_superoperator(&inv, ch.in_dim(), ch.out_dim())
}

pub fn is_cp(ch: &Channel, tol: f64) -> PsdReport {
    ch.is_cp(tol)
}

pub fn is_tp(ch: &Channel, tol: f64) -> TpReport {
    ch.is_tp(tol)
}

/// A collection of CP maps whose sum is trace preserving.
#[derive(Clone, Debug)]
pub struct Instrument {
    elements: Vec<Channel>,
}

impl Instrument {
    pub fn new(elements: Vec<Channel>, tol: &Tolerances) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::IncompleteInstrument("no elements".into()))?;
        let (d_out, d_in) = (first.out_dim(), first.in_dim());
        let mut sum = CMatrix::zeros(d_out * d_in, d_out * d_in);
        for (k, el) in elements.iter().enumerate() {
            if (el.out_dim(), el.in_dim()) != (d_out, d_in) {
                return Err(Error::IncompleteInstrument(format!("element {k} differs in shape")));
            }
            let cp = el.is_cp(tol.psd);
            if !cp.is_psd {
                return Err(Error::IncompleteInstrument(format!(
                    "element {k} is not CP (λ_min = {:e})",
                    cp.min_eigenvalue
                )));
            }
            sum += el.choi().data();
        }
        let total = Channel::from_choi_matrix(sum, d_out, d_in)?;
        let tp = total.is_tp(tol.trace);
        if !tp.is_tp {
            return Err(Error::IncompleteInstrument(format!(
                "elements sum to a map with TP residual {:e}",
                tp.residual
            )));
        }
        Ok(Self { elements })
    }

    /// One element per Kraus set.
    pub fn from_kraus_sets(sets: &[Vec<CMatrix>], tol: &Tolerances) -> Result<Self> {
        let elements = sets
            .iter()
            .map(|k| Channel::from_kraus(k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements, tol)
    }

    pub fn elements(&self) -> &[Channel] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Checks that a set of POVM elements is PSD and sums to the identity.
pub fn validate_povm(elements: &[CMatrix], tol: &Tolerances) -> Result<()> {
    let d = elements
        .first()
        .ok_or_else(|| Error::IncompleteInstrument("empty POVM".into()))?
        .nrows();
    let mut sum = CMatrix::zeros(d, d);
    for (k, e) in elements.iter().enumerate() {
        let op = LeggedOperator::on("x", e.clone())
            .map_err(|err| Error::IncompleteInstrument(format!("POVM element {k}: {err}")))?;
        let r = op
            .is_psd(tol.psd)
            .map_err(|err| Error::IncompleteInstrument(format!("POVM element {k}: {err}")))?;
        if !r.is_psd {
            return Err(Error::IncompleteInstrument(format!("POVM element {k} is not PSD")));
        }
        sum += e;
    }
    let residual = (sum - CMatrix::identity(d, d)).norm();
    if residual > tol.trace {
        return Err(Error::IncompleteInstrument(format!(
            "POVM elements sum to identity only within {residual:e}"
        )));
    }
    Ok(())
}
