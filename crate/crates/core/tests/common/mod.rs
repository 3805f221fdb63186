#![allow(dead_code)]

use proctensor::qmat::{names, pauli};
use proctensor::random::{haar_unitary, rng_from_seed, wishart_state};
use proctensor::scenarios::{bell_state, product_state};
use proctensor::{
    builtin, extract_l_sr, extract_l_ts, make_fig2a, maximally_entangled, CMatrix, Leg, LeggedOperator,
    ProcessTensor, Result, Scenario, Tolerances,
};

/// Bloch vectors ±x, ±y, ±z.
pub const AXES: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

pub fn axis_state(v: [f64; 3]) -> CMatrix {
    pauli::bloch_state(v[0], v[1], v[2])
}

/// `(tr(σ_x ρ), tr(σ_y ρ), tr(σ_z ρ)) / 2`, so that `ρ = 1/2 + Σ_k c_k σ_k`.
pub fn pauli_coefficients(rho: &CMatrix) -> [f64; 3] {
    let b = pauli::bloch_vector(rho);
    [b[0] / 2.0, b[1] / 2.0, b[2] / 2.0]
}

/// `tr_{s±}[(1_{r s-} ⊗ L_{t:s+})(1_{r t} ⊗ φ⁺_{s+ s-})(1_{s+ t} ⊗ L_{s-:r})]`, written out
/// by embedding every factor on the four legs and multiplying.
pub fn concatenation_sandwich(pt: &ProcessTensor) -> Result<LeggedOperator> {
    let d = pt.sys_dim();
    let legs = pt.op().legs().to_vec();
    let l_ts = extract_l_ts(pt)?
        .choi()
        .relabel_all(&[(names::OUT, names::T), (names::IN, names::S_PLUS)])?;
    let l_sr = extract_l_sr(pt)?
        .choi()
        .relabel_all(&[(names::OUT, names::S_MINUS), (names::IN, names::R)])?;
    let phi = maximally_entangled(&Leg::new(names::S_PLUS, d), &Leg::new(names::S_MINUS, d))?;
    let product = l_ts.embed(&legs)?.matmul(&phi.embed(&legs)?)?.matmul(&l_sr.embed(&legs)?)?;
    product.partial_trace(&[names::S_MINUS, names::S_PLUS])?.permute_legs(&[names::T, names::R])
}

/// The same right-hand side expressed through the process tensor itself:
/// `tr_{s±}[tr_{r s-}(T) φ⁺ tr_{s+ t}(T)] / d²`.
pub fn concatenation_from_tensor(pt: &ProcessTensor) -> Result<LeggedOperator> {
    let d = pt.sys_dim();
    let legs = pt.op().legs().to_vec();
    let a = pt.op().partial_trace(&[names::R, names::S_MINUS])?;
    let b = pt.op().partial_trace(&[names::S_PLUS, names::T])?;
    let phi = maximally_entangled(&Leg::new(names::S_PLUS, d), &Leg::new(names::S_MINUS, d))?;
    let product = a.embed(&legs)?.matmul(&phi.embed(&legs)?)?.matmul(&b.embed(&legs)?)?;
    Ok(product
        .partial_trace(&[names::S_MINUS, names::S_PLUS])?
        .permute_legs(&[names::T, names::R])?
        .scale_real(1.0 / (d * d) as f64))
}

/// Contracts `T` with `ρ_rᵀ` at `r` and `ρ_sᵀ` at `s+`, leaving an operator on `(s-, t)`.
pub fn output_marginal(pt: &ProcessTensor, rho_r: &CMatrix, rho_s: &CMatrix) -> Result<LeggedOperator> {
    let w = LeggedOperator::on(names::R, rho_r.transpose())?
        .kron(&LeggedOperator::on(names::S_PLUS, rho_s.transpose())?)?;
    w.embed(pt.op().legs())?
        .matmul(pt.op())?
        .partial_trace(&[names::R, names::S_PLUS])?
        .permute_legs(&[names::S_MINUS, names::T])
}

pub fn random_scenarios(seed: u64, n: usize) -> Vec<Scenario> {
    proctensor::random::random_scenarios(seed, n, 2, 2).unwrap()
}

pub fn named_builtins() -> Vec<Scenario> {
    ["builtin:appC", "builtin:appB", "builtin:fig2a-bell", "builtin:fig2a-product"]
        .iter()
        .map(|s| builtin(s).unwrap())
        .collect()
}

pub fn fig2a_bell() -> Scenario {
    make_fig2a(&bell_state()).unwrap()
}

pub fn fig2a_product() -> Scenario {
    make_fig2a(&product_state()).unwrap()
}

pub fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Collision model with an uncorrelated two-part environment; Markovian by construction.
pub fn product_collision(seed: u64) -> Scenario {
    let mut rng = rng_from_seed(seed);
    let er = Leg::new(names::ENV_R, 2);
    let es = Leg::new(names::ENV_S, 2);
    let eta = LeggedOperator::new(vec![er.clone()], wishart_state(&mut rng, 2))
        .unwrap()
        .kron(&LeggedOperator::new(vec![es.clone()], wishart_state(&mut rng, 2)).unwrap())
        .unwrap();
    let sys = Leg::new(names::SYS, 2);
    let u_sr = LeggedOperator::new(vec![sys.clone(), er], haar_unitary(&mut rng, 4)).unwrap();
    let u_ts = LeggedOperator::new(vec![sys, es], haar_unitary(&mut rng, 4)).unwrap();
    Scenario::fixed("collision", eta, &u_sr, &u_ts, &Tolerances::default()).unwrap()
}

