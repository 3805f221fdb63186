//! Dense complex operators on named tensor legs.
//!
//! Every operator carries an ordered list of [`Leg`]s. Composite basis states
//! are ordered with the leftmost leg most significant, which is the usual
//! Kronecker convention. Contractions and traces resolve legs by name only.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

/// Canonical leg names.
pub mod names {
    pub const R: &str = "r";
    pub const S_MINUS: &str = "s-";
    pub const S_PLUS: &str = "s+";
    pub const T: &str = "t";
    pub const SYS: &str = "sys";
    pub const ENV: &str = "env";
    pub const ENV_R: &str = "env_r";
    pub const ENV_S: &str = "env_s";
    pub const OUT: &str = "out";
    pub const IN: &str = "in";
}

/// A named tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub name: String,
    pub dim: usize,
}

impl Leg {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            dim,
        }
    }
}

/// Outcome of a positivity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// A square complex matrix acting on the tensor product of its legs.
#[derive(Clone, Debug, PartialEq)]
pub struct LeggedOperator {
    legs: Vec<Leg>,
    data: CMatrix,
}

fn product(dims: impl IntoIterator<Item = usize>) -> usize {
    dims.into_iter().product()
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets into the full basis for every multi-index over `positions`,
/// enumerated with the first listed position most significant.
fn offsets(dims: &[usize], strides: &[usize], positions: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for i in 0..dims[p] {
                next.push(base + i * strides[p]);
            }
        }
        out = next;
    }
    out
}

fn validate_legs(legs: &[Leg]) -> Result<()> {
    for (i, leg) in legs.iter().enumerate() {
        if leg.dim == 0 {
            return Err(Error::ZeroDimension(leg.name.clone()));
        }
        if legs[..i].iter().any(|l| l.name == leg.name) {
            return Err(Error::DuplicateLeg(leg.name.clone()));
        }
    }
    Ok(())
}

impl LeggedOperator {
    pub fn new(legs: Vec<Leg>, data: CMatrix) -> Result<Self> {
        validate_legs(&legs)?;
        let dim = product(legs.iter().map(|l| l.dim));
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but legs require {dim}x{dim}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { legs, data })
    }

    /// Single-leg operator.
    pub fn on(name: &str, data: CMatrix) -> Result<Self> {
        let d = data.nrows();
        Self::new(vec![Leg::new(name, d)], data)
    }

    pub fn identity(legs: Vec<Leg>) -> Result<Self> {
        let dim = product(legs.iter().map(|l| l.dim));
        Self::new(legs, CMatrix::identity(dim, dim))
    }

    pub fn zeros(legs: Vec<Leg>) -> Result<Self> {
        let dim = product(legs.iter().map(|l| l.dim));
        Self::new(legs, CMatrix::zeros(dim, dim))
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn leg_names(&self) -> Vec<&str> {
        self.legs.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn leg(&self, name: &str) -> Result<&Leg> {
        self.legs
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| Error::UnknownLeg(name.to_string()))
    }

    pub fn leg_dim(&self, name: &str) -> Result<usize> {
        self.leg(name).map(|l| l.dim)
    }

    pub fn has_leg(&self, name: &str) -> bool {
        self.legs.iter().any(|l| l.name == name)
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.legs
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::UnknownLeg(name.to_string()))
    }

    fn dims(&self) -> Vec<usize> {
        self.legs.iter().map(|l| l.dim).collect()
    }

    /// Kronecker product; legs are `self.legs ++ other.legs`.
    pub fn kron(&self, other: &LeggedOperator) -> Result<LeggedOperator> {
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().cloned());
        validate_legs(&legs)?;
        Ok(Self {
            legs,
            data: self.data.kronecker(&other.data),
        })
    }

    /// Traces out the named legs.
    pub fn partial_trace(&self, over: &[&str]) -> Result<LeggedOperator> {
        let mut traced = Vec::with_capacity(over.len());
        for name in over {
            let p = self.position(name)?;
            if traced.contains(&p) {
                return Err(Error::DuplicateLeg(name.to_string()));
            }
            traced.push(p);
        }
        let kept: Vec<usize> = (0..self.legs.len()).filter(|p| !traced.contains(p)).collect();
        let dims = self.dims();
        let st = strides(&dims);
        let kept_off = offsets(&dims, &st, &kept);
        let traced_off = offsets(&dims, &st, &traced);
        let n = kept_off.len();
        let out = CMatrix::from_fn(n, n, |a, b| {
            traced_off
                .iter()
                .map(|&t| self.data[(kept_off[a] + t, kept_off[b] + t)])
                .sum()
        });
        Ok(Self {
            legs: kept.iter().map(|&p| self.legs[p].clone()).collect(),
            data: out,
        })
    }

    /// Traces out every leg except the named ones, which are kept in the given order.
    pub fn reduce_to(&self, keep: &[&str]) -> Result<LeggedOperator> {
        for name in keep {
            self.position(name)?;
        }
        let over: Vec<&str> = self
            .legs
            .iter()
            .map(|l| l.name.as_str())
            .filter(|n| !keep.contains(n))
            .collect();
        self.partial_trace(&over)?.permute_legs(keep)
    }

    /// Reorders the tensor factors.
    pub fn permute_legs(&self, order: &[&str]) -> Result<LeggedOperator> {
        let not_perm = || Error::NotAPermutation(order.iter().map(|s| s.to_string()).collect());
        if order.len() != self.legs.len() {
            return Err(not_perm());
        }
        let mut positions = Vec::with_capacity(order.len());
        for name in order {
            let p = self.position(name).map_err(|_| not_perm())?;
            if positions.contains(&p) {
                return Err(not_perm());
            }
            positions.push(p);
        }
        if positions.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let dims = self.dims();
        let st = strides(&dims);
        let old_of_new = offsets(&dims, &st, &positions);
        let n = self.dim();
        let data = CMatrix::from_fn(n, n, |i, j| self.data[(old_of_new[i], old_of_new[j])]);
        Ok(Self {
            legs: positions.iter().map(|&p| self.legs[p].clone()).collect(),
            data,
        })
    }

    /// Permutes `self` into the leg order of `other`. Leg sets must coincide.
    pub fn aligned_to(&self, other: &LeggedOperator) -> Result<LeggedOperator> {
        for leg in &other.legs {
            if self.leg(&leg.name)?.dim != leg.dim {
                return Err(Error::DimensionMismatch(format!(
                    "leg `{}` has different dimensions",
                    leg.name
                )));
            }
        }
        self.permute_legs(&other.leg_names())
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<LeggedOperator> {
        let p = self.position(from)?;
        if from != to && self.has_leg(to) {
            return Err(Error::DuplicateLeg(to.to_string()));
        }
        let mut out = self.clone();
        out.legs[p].name = to.to_string();
        Ok(out)
    }

    pub fn relabel_all(&self, map: &[(&str, &str)]) -> Result<LeggedOperator> {
        let mut legs = self.legs.clone();
        for (from, to) in map {
            let p = self.position(from)?;
            legs[p].name = to.to_string();
        }
        validate_legs(&legs)?;
        Ok(Self {
            legs,
            data: self.data.clone(),
        })
    }

    /// Tensors with identities on the missing legs of `target` and permutes into its order.
    pub fn embed(&self, target: &[Leg]) -> Result<LeggedOperator> {
        for leg in &self.legs {
            match target.iter().find(|t| t.name == leg.name) {
                Some(t) if t.dim == leg.dim => {}
                Some(_) => {
                    return Err(Error::DimensionMismatch(format!(
                        "leg `{}` has different dimensions",
                        leg.name
                    )))
                }
                None => return Err(Error::UnknownLeg(leg.name.clone())),
            }
        }
        let missing: Vec<Leg> = target
            .iter()
            .filter(|t| !self.has_leg(&t.name))
            .cloned()
            .collect();
        let full = if missing.is_empty() {
            self.clone()
        } else {
            self.kron(&Self::identity(missing)?)?
        };
        let order: Vec<&str> = target.iter().map(|l| l.name.as_str()).collect();
        full.permute_legs(&order)
    }

    /// Matrix product `self · other`; `other` is aligned to `self`'s leg order.
    pub fn matmul(&self, other: &LeggedOperator) -> Result<LeggedOperator> {
        let rhs = other.aligned_to(self)?;
        Ok(Self {
            legs: self.legs.clone(),
            data: &self.data * &rhs.data,
        })
    }

    /// `U X U†` with `u` acting on a subset of `self`'s legs.
    pub fn conjugate_by(&self, u: &LeggedOperator) -> Result<LeggedOperator> {
        let full = u.embed(&self.legs)?;
        Ok(Self {
            legs: self.legs.clone(),
            data: &full.data * &self.data * full.data.adjoint(),
        })
    }

    pub fn add(&self, other: &LeggedOperator) -> Result<LeggedOperator> {
        let rhs = other.aligned_to(self)?;
        Ok(Self {
            legs: self.legs.clone(),
            data: &self.data + &rhs.data,
        })
    }

    pub fn sub(&self, other: &LeggedOperator) -> Result<LeggedOperator> {
        let rhs = other.aligned_to(self)?;
        Ok(Self {
            legs: self.legs.clone(),
            data: &self.data - &rhs.data,
        })
    }

    pub fn scale(&self, factor: C64) -> LeggedOperator {
        Self {
            legs: self.legs.clone(),
            data: &self.data * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> LeggedOperator {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> LeggedOperator {
        Self {
            legs: self.legs.clone(),
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> LeggedOperator {
        Self {
            legs: self.legs.clone(),
            data: self.data.transpose(),
        }
    }

    /// Transpose on the named legs only.
    pub fn partial_transpose(&self, on: &[&str]) -> Result<LeggedOperator> {
        let mut flagged = Vec::with_capacity(on.len());
        for name in on {
            flagged.push(self.position(name)?);
        }
        let dims = self.dims();
        let st = strides(&dims);
        let n = self.dim();
        let mut data = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (mut ii, mut jj) = (i, j);
                for &p in &flagged {
                    let di = (i / st[p]) % dims[p];
                    let dj = (j / st[p]) % dims[p];
                    ii = ii - di * st[p] + dj * st[p];
                    jj = jj - dj * st[p] + di * st[p];
                }
                data[(ii, jj)] = self.data[(i, j)];
            }
        }
        Ok(Self {
            legs: self.legs.clone(),
            data,
        })
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance after aligning leg order.
    pub fn distance(&self, other: &LeggedOperator) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    pub fn hermitian_residual(&self) -> f64 {
        (&self.data - self.data.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> LeggedOperator {
        Self {
            legs: self.legs.clone(),
            data: (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        let mut ev: Vec<f64> = h.data.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn trace_norm(&self) -> f64 {
        self.data.clone().singular_values().iter().sum()
    }

    /// ‖U†U − 1‖_F.
    pub fn unitary_residual(&self) -> f64 {
        let n = self.dim();
        (self.data.adjoint() * &self.data - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Positivity test on the Hermitian part.
    ///
    /// Rejects operators farther than `1e3·tol` from Hermitian. Accepts iff
    /// `λ_min ≥ −tol·max(1, ‖M‖_tr)`.
    pub fn is_psd(&self, tol: f64) -> Result<PsdReport> {
        let herm = self.hermitian_residual();
        if herm > 1e3 * tol {
            return Err(Error::NotHermitian(herm));
        }
        let ev = self.eigenvalues();
        let min = ev.first().copied().unwrap_or(0.0);
        let trace_norm: f64 = ev.iter().map(|e| e.abs()).sum();
        Ok(PsdReport {
            is_psd: min >= -tol * trace_norm.max(1.0),
            min_eigenvalue: min,
        })
    }

    /// Checks that `self` is a density operator: PSD and unit trace.
    pub fn validate_state(&self, tol: f64) -> Result<()> {
        let report = self
            .is_psd(tol)
            .map_err(|e| Error::InvalidState(e.to_string()))?;
        if !report.is_psd {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                report.min_eigenvalue
            )));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.max(1e-9) {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(())
    }
}

pub fn kron(a: &LeggedOperator, b: &LeggedOperator) -> Result<LeggedOperator> {
    a.kron(b)
}

pub fn partial_trace(op: &LeggedOperator, over: &[&str]) -> Result<LeggedOperator> {
    op.partial_trace(over)
}

pub fn permute_legs(op: &LeggedOperator, order: &[&str]) -> Result<LeggedOperator> {
    op.permute_legs(order)
}

pub fn is_psd(op: &LeggedOperator, tol: f64) -> Result<PsdReport> {
    op.is_psd(tol)
}

/// Unnormalised `φ⁺ = Σ_ij |ii⟩⟨jj|` on `(a, b)`.
pub fn maximally_entangled(a: &Leg, b: &Leg) -> Result<LeggedOperator> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "φ⁺ needs equal dimensions, got {} and {}",
            a.dim, b.dim
        )));
    }
    let d = a.dim;
    let mut data = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            data[(i * d + i, j * d + j)] = C64::new(1.0, 0.0);
        }
    }
    LeggedOperator::new(vec![a.clone(), b.clone()], data)
}

/// The swap `S|ij⟩ = |ji⟩` on two legs of equal dimension.
pub fn swap(a: &Leg, b: &Leg) -> Result<LeggedOperator> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "swap needs equal dimensions, got {} and {}",
            a.dim, b.dim
        )));
    }
    let d = a.dim;
    let mut data = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            data[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    LeggedOperator::new(vec![a.clone(), b.clone()], data)
}

pub mod pauli {
    use super::{CMatrix, C64};

    fn m(entries: [C64; 4]) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &entries)
    }

    const O: C64 = C64::new(0.0, 0.0);
    const I: C64 = C64::new(1.0, 0.0);
    const J: C64 = C64::new(0.0, 1.0);

    pub fn id() -> CMatrix {
        CMatrix::identity(2, 2)
    }
    pub fn x() -> CMatrix {
        m([O, I, I, O])
    }
    pub fn y() -> CMatrix {
        m([O, -J, J, O])
    }
    pub fn z() -> CMatrix {
        m([I, O, O, -I])
    }

    /// `(1 + aX + bY + cZ)/2`.
    pub fn bloch_state(a: f64, b: f64, c: f64) -> CMatrix {
        (id() + x() * C64::new(a, 0.0) + y() * C64::new(b, 0.0) + z() * C64::new(c, 0.0))
            * C64::new(0.5, 0.0)
    }

    /// Bloch vector `(tr ρX, tr ρY, tr ρZ)` of a qubit operator.
    pub fn bloch_vector(rho: &CMatrix) -> [f64; 3] {
        [
            (rho * x()).trace().re,
            (rho * y()).trace().re,
            (rho * z()).trace().re,
        ]
    }
}

/// `|i⟩⟨i|` on a `d`-level system.
pub fn projector(d: usize, i: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, i)] = C64::new(1.0, 0.0);
    m
}

/// `|ψ⟩⟨ψ|` for a column vector.
pub fn ket_bra(psi: &[C64]) -> CMatrix {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}
