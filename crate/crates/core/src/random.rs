//! Seeded random unitaries, states, instruments and scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::error::Result;
use crate::qmat::{names, CMatrix, Leg, LeggedOperator, C64};
use crate::scenarios::Scenario;

/// Environment variable overriding the default seed.
pub const SEED_VAR: &str = "PROCTENSOR_SEED";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from `PROCTENSOR_SEED`, or 0 when unset or unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal removed.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Normalised Wishart state `G G† / tr(G G†)` of full rank.
pub fn wishart_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let w = &g * g.adjoint();
    let tr = w.trace();
    w / tr
}

/// Kraus operators `K_x` (one per outcome) of a random instrument, cut from a Haar isometry.
pub fn random_instrument_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize, outcomes: usize) -> Vec<CMatrix> {
    let u = haar_unitary(rng, d * outcomes);
    (0..outcomes)
        .map(|x| u.view((x * d, 0), (d, d)).into_owned())
        .collect()
}

/// Random POVM `E_x = K_x† K_x`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, d: usize, outcomes: usize) -> Vec<CMatrix> {
    random_instrument_kraus(rng, d, outcomes)
        .into_iter()
        .map(|k| k.adjoint() * k)
        .collect()
}

/// Haar unitaries on `sys ⊗ env` and a Wishart environment state.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R, sys_dim: usize, env_dim: usize) -> Result<Scenario> {
    let env = Leg::new(names::ENV, env_dim);
    let legs = vec![Leg::new(names::SYS, sys_dim), env.clone()];
    let n = sys_dim * env_dim;
    let eta = LeggedOperator::new(vec![env], wishart_state(rng, env_dim))?;
    let u_sr = LeggedOperator::new(legs.clone(), haar_unitary(rng, n))?;
    let u_ts = LeggedOperator::new(legs, haar_unitary(rng, n))?;
    Scenario::fixed("random", eta, &u_sr, &u_ts, &Tolerances::default())
}

/// `n` scenarios from one seeded stream.
pub fn random_scenarios(seed: u64, n: usize, sys_dim: usize, env_dim: usize) -> Result<Vec<Scenario>> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| random_scenario(&mut rng, sys_dim, env_dim)).collect()
}
