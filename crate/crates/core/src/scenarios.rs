//! System–environment dilations: the built-in examples and the scenario file format.
//!
//! A scenario file is a flat JSON object
//! `{"sys_dim", "env_legs", "eta", "u_sr", "u_ts"}` where `eta` is a matrix on
//! the environment legs (in `env_legs` order) and the unitaries are matrices
//! on `sys ⊗ env_legs`.

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::json::{field, MatrixJson};
use crate::qmat::{names, pauli, swap, CMatrix, Leg, LeggedOperator, C64};

/// How the two unitaries are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Dynamics {
    /// Explicit unitaries between the nominal times `0 < 1 < 2`.
    Fixed {
        u_sr: LeggedOperator,
        u_ts: LeggedOperator,
    },
    /// `exp(−iωS·u) = cos(ωu) 1 − i sin(ωu) S` for a duration `u`.
    PartialSwap { omega: f64, s: f64, t: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    name: String,
    sys_dim: usize,
    env_legs: Vec<Leg>,
    eta: LeggedOperator,
    dynamics: Dynamics,
}

/// Nominal times assigned to fixed-unitary scenarios.
pub const FIXED_TIMES: [f64; 3] = [0.0, 1.0, 2.0];

impl Scenario {
    /// Validates that `eta` is a state on `env_legs` and that the unitaries act
    /// on `sys` plus environment legs. Unitaries are stored on the full
    /// `(sys, env_legs…)` space.
    pub fn fixed(
        name: impl Into<String>,
        eta: LeggedOperator,
        u_sr: &LeggedOperator,
        u_ts: &LeggedOperator,
        tol: &Tolerances,
    ) -> Result<Self> {
        let sys_dim = u_sr.leg_dim(names::SYS)?;
        let env_legs = eta.legs().to_vec();
        let mut full = vec![Leg::new(names::SYS, sys_dim)];
        full.extend(env_legs.iter().cloned());
        let u_sr = u_sr.embed(&full)?;
        let u_ts = u_ts.embed(&full)?;
        let scn = Self {
            name: name.into(),
            sys_dim,
            env_legs,
            eta,
            dynamics: Dynamics::Fixed { u_sr, u_ts },
        };
        scn.validate(tol)?;
        Ok(scn)
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.sys_dim == 0 {
            return Err(Error::InvalidScenario("system dimension must be positive".into()));
        }
        self.eta
            .validate_state(tol.psd)
            .map_err(|e| Error::InvalidScenario(format!("eta: {e}")))?;
        for (label, u) in [("u_sr", self.u_sr()?), ("u_ts", self.u_ts()?)] {
            let r = u.unitary_residual();
            if r > tol.unitary {
                return Err(Error::InvalidScenario(format!("{label} is not unitary (residual {r:e})")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn env_legs(&self) -> &[Leg] {
        &self.env_legs
    }

    pub fn eta(&self) -> &LeggedOperator {
        &self.eta
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn is_parametric(&self) -> bool {
        !matches!(self.dynamics, Dynamics::Fixed { .. })
    }

    /// Intermediate and final time of this instance.
    pub fn times(&self) -> (f64, f64) {
        match self.dynamics {
            Dynamics::Fixed { .. } => (FIXED_TIMES[1], FIXED_TIMES[2]),
            Dynamics::PartialSwap { s, t, .. } => (s, t),
        }
    }

    pub fn u_sr(&self) -> Result<LeggedOperator> {
        match &self.dynamics {
            Dynamics::Fixed { u_sr, .. } => Ok(u_sr.clone()),
            Dynamics::PartialSwap { omega, s, .. } => partial_swap_unitary(omega * s),
        }
    }

    pub fn u_ts(&self) -> Result<LeggedOperator> {
        match &self.dynamics {
            Dynamics::Fixed { u_ts, .. } => Ok(u_ts.clone()),
            Dynamics::PartialSwap { omega, s, t } => partial_swap_unitary(omega * (t - s)),
        }
    }

    /// Total unitary from time 0 to `time`.
    pub fn propagator_from_origin(&self, time: f64) -> Result<LeggedOperator> {
        match &self.dynamics {
            Dynamics::PartialSwap { omega, .. } => {
                if time < 0.0 {
                    return Err(Error::InvalidScenario("negative time".into()));
                }
                partial_swap_unitary(omega * time)
            }
            Dynamics::Fixed { u_sr, u_ts } => {
                if time == FIXED_TIMES[0] {
                    LeggedOperator::identity(u_sr.legs().to_vec())
                } else if time == FIXED_TIMES[1] {
                    Ok(u_sr.clone())
                } else if time == FIXED_TIMES[2] {
                    u_ts.matmul(u_sr)
                } else {
                    Err(Error::InvalidScenario(format!(
                        "fixed-unitary scenario has no time {time}; only {FIXED_TIMES:?}"
                    )))
                }
            }
        }
    }

    /// The same dilation with intermediate time `s` and final time `t`.
    pub fn at_times(&self, s: f64, t: f64) -> Result<Scenario> {
        match self.dynamics {
            Dynamics::PartialSwap { omega, .. } => make_partial_swap(omega, s, t),
            Dynamics::Fixed { .. } => {
                if (s, t) == self.times() {
                    Ok(self.clone())
                } else {
                    Err(Error::InvalidScenario(
                        "fixed-unitary scenarios cannot be re-timed".into(),
                    ))
                }
            }
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        Ok(serde_json::json!({
            "name": self.name,
            "sys_dim": self.sys_dim,
            "env_legs": self.env_legs,
            "eta": MatrixJson::from_matrix(self.eta.data()),
            "u_sr": MatrixJson::from_matrix(self.u_sr()?.data()),
            "u_ts": MatrixJson::from_matrix(self.u_ts()?.data()),
        }))
    }

    pub fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        if !v.is_object() {
            return Err(Error::schema("<root>", "scenario must be a JSON object"));
        }
        let sys_dim: usize = field(v, "sys_dim")?;
        if sys_dim == 0 {
            return Err(Error::schema("sys_dim", "must be positive"));
        }
        let env_legs: Vec<Leg> = field(v, "env_legs")?;
        if env_legs.is_empty() {
            return Err(Error::schema("env_legs", "at least one environment leg is required"));
        }
        let reserved = [names::SYS, names::R, names::S_MINUS, names::S_PLUS, names::T, names::IN, names::OUT];
        for (i, leg) in env_legs.iter().enumerate() {
            if reserved.contains(&leg.name.as_str()) {
                return Err(Error::schema(format!("env_legs[{i}].name"), format!("`{}` is reserved", leg.name)));
            }
        }
        let eta_m: MatrixJson = field(v, "eta")?;
        let eta = LeggedOperator::new(env_legs.clone(), eta_m.to_matrix("eta")?)
            .map_err(|e| Error::schema("eta", e.to_string()))?;
        eta.validate_state(tol.psd)
            .map_err(|e| Error::schema("eta", e.to_string()))?;
        let mut full = vec![Leg::new(names::SYS, sys_dim)];
        full.extend(env_legs.iter().cloned());
        let mut unitaries = Vec::with_capacity(2);
        for key in ["u_sr", "u_ts"] {
            let m: MatrixJson = field(v, key)?;
            let u = LeggedOperator::new(full.clone(), m.to_matrix(key)?)
                .map_err(|e| Error::schema(key, e.to_string()))?;
            let r = u.unitary_residual();
            if r > tol.unitary {
                return Err(Error::schema(key, format!("not unitary (‖U†U − 1‖_F = {r:e})")));
            }
            unitaries.push(u);
        }
        let name = v
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or("custom")
            .to_string();
        Self::fixed(name, eta, &unitaries[0], &unitaries[1], tol)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> Result<String> {
        let text = serde_json::to_string(&self.to_json()?)?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `cos(θ) 1 − i sin(θ) S` on `(sys, env)` for two qubits.
pub fn partial_swap_unitary(angle: f64) -> Result<LeggedOperator> {
    let s = swap(&Leg::new(names::SYS, 2), &Leg::new(names::ENV, 2))?;
    let data = CMatrix::identity(4, 4) * c(angle.cos()) - s.data() * C64::new(0.0, angle.sin());
    LeggedOperator::new(s.legs().to_vec(), data)
}

/// Qubit partial-swap collision with a maximally mixed single-qubit environment.
/// `u_sr` lasts `s`, `u_ts` lasts `t − s`.
pub fn make_partial_swap(omega: f64, s: f64, t: f64) -> Result<Scenario> {
    if !(omega.is_finite() && s.is_finite() && t.is_finite()) {
        return Err(Error::InvalidScenario("parameters must be finite".into()));
    }
    if s < 0.0 || t < s {
        return Err(Error::InvalidScenario(format!(
            "durations must be non-negative (s = {s}, t = {t})"
        )));
    }
    let eta = LeggedOperator::on(names::ENV, CMatrix::identity(2, 2) * c(0.5))?;
    Ok(Scenario {
        name: "partial-swap".into(),
        sys_dim: 2,
        env_legs: eta.legs().to_vec(),
        eta,
        dynamics: Dynamics::PartialSwap { omega, s, t },
    })
}

/// Correlated two-qubit environment `(1 + X⊗Z)/4`, a swap with `env_r`, then
/// `(1 + iY⊗1 + iX⊗Z)/√3` on `(sys, env_s)`.
pub fn make_app_b() -> Result<Scenario> {
    let tol = Tolerances::default();
    let env = vec![Leg::new(names::ENV_R, 2), Leg::new(names::ENV_S, 2)];
    let eta = LeggedOperator::new(
        env,
        (CMatrix::identity(4, 4) + pauli::x().kronecker(&pauli::z())) * c(0.25),
    )?;
    let u_sr = swap(&Leg::new(names::SYS, 2), &Leg::new(names::ENV_R, 2))?;
    let i = C64::new(0.0, 1.0);
    let gen = CMatrix::identity(4, 4)
        + pauli::y().kronecker(&pauli::id()) * i
        + pauli::x().kronecker(&pauli::z()) * i;
    let u_ts = LeggedOperator::new(
        vec![Leg::new(names::SYS, 2), Leg::new(names::ENV_S, 2)],
        gen * c(1.0 / 3f64.sqrt()),
    )?;
    Scenario::fixed("appB", eta, &u_sr, &u_ts, &tol)
}

/// Collision model: the system is swapped with `env_r` and then with `env_s`.
pub fn make_fig2a(eta_corr: &LeggedOperator) -> Result<Scenario> {
    let tol = Tolerances::default();
    let names_ok = eta_corr.leg_names() == [names::ENV_R, names::ENV_S]
        || eta_corr.leg_names() == [names::ENV_S, names::ENV_R];
    if !names_ok {
        return Err(Error::InvalidScenario(format!(
            "environment state must live on ({}, {})",
            names::ENV_R,
            names::ENV_S
        )));
    }
    let eta = eta_corr.permute_legs(&[names::ENV_R, names::ENV_S])?;
    eta.validate_state(tol.psd)?;
    let d = eta.legs()[0].dim;
    if eta.legs()[1].dim != d {
        return Err(Error::InvalidScenario("environment halves must match in dimension".into()));
    }
    let sys = Leg::new(names::SYS, d);
    let u_sr = swap(&sys, &eta.legs()[0])?;
    let u_ts = swap(&sys, &eta.legs()[1])?;
    Scenario::fixed("fig2a", eta, &u_sr, &u_ts, &tol)
}

/// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2` on `(env_r, env_s)`.
pub fn bell_state() -> LeggedOperator {
    let mut m = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = c(0.5);
    }
    LeggedOperator::new(vec![Leg::new(names::ENV_R, 2), Leg::new(names::ENV_S, 2)], m).unwrap()
}

/// A fixed uncorrelated two-qubit environment state.
pub fn product_state() -> LeggedOperator {
    let a = LeggedOperator::on(names::ENV_R, pauli::bloch_state(0.3, 0.0, 0.5)).unwrap();
    let b = LeggedOperator::on(names::ENV_S, pauli::bloch_state(0.0, 0.4, -0.2)).unwrap();
    a.kron(&b).unwrap()
}

/// Names accepted by [`builtin`].
pub const BUILTINS: [&str; 5] = ["partial-swap", "appC", "appB", "fig2a-bell", "fig2a-product"];

/// Resolves `builtin:<name>?omega=..&s=..&t=..` (the `builtin:` prefix is optional).
///
/// `partial-swap` and `appC` take `omega` (default 1), `s` (0.5) and `t` (1.0).
pub fn builtin(spec: &str) -> Result<Scenario> {
    let spec = spec.strip_prefix("builtin:").unwrap_or(spec);
    let (name, query) = match spec.split_once('?') {
        Some((n, q)) => (n, Some(q)),
        None => (spec, None),
    };
    let mut params: Vec<(String, f64)> = Vec::new();
    if let Some(q) = query {
        for pair in q.split('&').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::schema(pair, "expected key=value"))?;
            let x: f64 = v
                .parse()
                .map_err(|_| Error::schema(k, format!("`{v}` is not a number")))?;
            params.push((k.to_string(), x));
        }
    }
    let get = |key: &str, default: f64| {
        params
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .unwrap_or(default)
    };
    let allow = |keys: &[&str]| -> Result<()> {
        match params.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
            Some((k, _)) => Err(Error::schema(k.as_str(), format!("unknown parameter for builtin `{name}`"))),
            None => Ok(()),
        }
    };
    match name {
        "partial-swap" | "appC" => {
            allow(&["omega", "s", "t"])?;
            make_partial_swap(get("omega", 1.0), get("s", 0.5), get("t", 1.0))
        }
        "appB" => {
            allow(&[])?;
            make_app_b()
        }
        "fig2a-bell" | "fig2a" => {
            allow(&[])?;
            let mut s = make_fig2a(&bell_state())?;
            s.name = "fig2a-bell".into();
            Ok(s)
        }
        "fig2a-product" => {
            allow(&[])?;
            let mut s = make_fig2a(&product_state())?;
            s.name = "fig2a-product".into();
            Ok(s)
        }
        other => Err(Error::schema(
            "builtin",
            format!("unknown builtin `{other}`; expected one of {BUILTINS:?}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_swap_edge_angles() {
        let zero = make_partial_swap(1.0, 0.3, 0.3).unwrap();
        let id = CMatrix::identity(4, 4);
        assert!((zero.u_ts().unwrap().data() - &id).norm() < 1e-15);

        let half_pi = partial_swap_unitary(std::f64::consts::FRAC_PI_2).unwrap();
        let s = swap(&Leg::new(names::SYS, 2), &Leg::new(names::ENV, 2)).unwrap();
        let expected = s.data() * C64::new(0.0, -1.0);
        assert!((half_pi.data() - expected).norm() < 1e-15);

        let quarter = partial_swap_unitary(std::f64::consts::FRAC_PI_4).unwrap();
        let expected = (id - s.data() * C64::new(0.0, 1.0)) * c(0.5f64.sqrt());
        assert!((quarter.data() - expected).norm() < 1e-15);
        assert!(quarter.unitary_residual() < 1e-12);
    }

    #[test]
    fn partial_swap_rejects_negative_durations() {
        assert!(make_partial_swap(1.0, -0.1, 1.0).is_err());
        assert!(make_partial_swap(1.0, 0.5, 0.4).is_err());
    }

    #[test]
    fn app_b_environment_spectrum() {
        let scn = make_app_b().unwrap();
        let ev = scn.eta().eigenvalues();
        for (e, x) in ev.iter().zip([0.0, 0.0, 0.5, 0.5]) {
            assert!((e - x).abs() < 1e-14, "{ev:?}");
        }
        assert!(scn.u_ts().unwrap().unitary_residual() < 1e-12);
        assert_eq!(scn.u_ts().unwrap().leg_names(), vec![names::SYS, names::ENV_R, names::ENV_S]);
    }

    #[test]
    fn builtins_are_unitary() {
        for name in BUILTINS {
            let scn = builtin(name).unwrap();
            assert!(scn.u_sr().unwrap().unitary_residual() <= 1e-12, "{name}");
            assert!(scn.u_ts().unwrap().unitary_residual() <= 1e-12, "{name}");
        }
    }

    #[test]
    fn builtin_query_parsing() {
        let scn = builtin("builtin:partial-swap?omega=2&s=0.1&t=0.3").unwrap();
        assert_eq!(scn.dynamics(), &Dynamics::PartialSwap { omega: 2.0, s: 0.1, t: 0.3 });
        assert!(builtin("builtin:partial-swap?w=1").is_err());
        assert!(builtin("builtin:partial-swap?omega=x").is_err());
        assert!(builtin("builtin:nope").is_err());
        assert!(builtin("appB?omega=1").is_err());
    }

    #[test]
    fn fig2a_rejects_wrong_legs() {
        let op = LeggedOperator::identity(vec![Leg::new("a", 2), Leg::new("b", 2)]).unwrap();
        assert!(make_fig2a(&op.scale_real(0.25)).is_err());
        let unnormalised = bell_state().scale_real(2.0);
        assert!(make_fig2a(&unnormalised).is_err());
    }

    #[test]
    fn json_round_trip_and_hash() {
        let tol = Tolerances::default();
        let scn = make_app_b().unwrap();
        let v = scn.to_json().unwrap();
        let back = Scenario::from_json(&v, &tol).unwrap();
        assert_eq!(back, scn);
        assert_eq!(back.hash().unwrap(), scn.hash().unwrap());
        assert_ne!(builtin("fig2a-bell").unwrap().hash().unwrap(), scn.hash().unwrap());
    }

    #[test]
    fn json_errors_name_the_field() {
        let tol = Tolerances::default();
        let mut v = make_app_b().unwrap().to_json().unwrap();
        v.as_object_mut().unwrap().remove("u_ts");
        match Scenario::from_json(&v, &tol) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "u_ts"),
            other => panic!("{other:?}"),
        }
        let mut v = make_app_b().unwrap().to_json().unwrap();
        v["u_sr"][0][0] = serde_json::json!([2.0, 0.0]);
        match Scenario::from_json(&v, &tol) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "u_sr"),
            other => panic!("{other:?}"),
        }
        let mut v = make_app_b().unwrap().to_json().unwrap();
        v["eta"][0][0] = serde_json::json!([5.0, 0.0]);
        match Scenario::from_json(&v, &tol) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "eta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fixed_propagators() {
        let scn = make_app_b().unwrap();
        assert!(scn.propagator_from_origin(1.5).is_err());
        let total = scn.propagator_from_origin(2.0).unwrap();
        let expected = scn.u_ts().unwrap().matmul(&scn.u_sr().unwrap()).unwrap();
        assert_eq!(total, expected);
        assert!(scn.at_times(0.5, 1.0).is_err());
    }
}
