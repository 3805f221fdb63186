//! Classification of three-time quantum processes into
//! Markovian ⊂ oCP-divisible ⊂ iCP-divisible ⊂ general.
//!
//! Processes are given as system–environment dilations ([`Scenario`]). From a
//! dilation the crate builds the process tensor on legs `(r, s-, s+, t)`,
//! extracts the operationally reconstructed channels, and evaluates
//!
//! - divisibility by inversion on a time grid ([`icp_check`]),
//! - conditional non-signalling from `r` to `t` ([`check_conditional_nonsignalling`]),
//! - operational divisibility `L_{t:r} = L_{t:s} ⋆ L_{s:r}` ([`check_ocp`]),
//! - the Markov product form `T = L_{t:s} ⊗ L_{s:r}` ([`check_markov`]).
//!
//! # Conventions
//!
//! `φ⁺ = Σ_ij |ii⟩⟨jj|` is unnormalised. A channel's Choi operator lives on
//! `(out, in)` and equals `(Γ ⊗ id)[φ⁺]`. Composite bases put the leftmost leg
//! most significant.
//!
//! ```
//! use proctensor::{builtin, classify, default_grid, Label, Tolerances};
//!
//! let scn = builtin("builtin:fig2a-bell").unwrap();
//! let grid = default_grid(&scn, 20).unwrap();
//! let report = classify(&scn, &grid, &Tolerances::default()).unwrap();
//! assert_eq!(report.label, Label::OcpNonmarkovian);
//! ```

pub mod channels;
pub mod config;
pub mod divisibility;
pub mod error;
pub mod json;
pub mod oracle;
pub mod process_tensor;
pub mod qmat;
pub mod random;
pub mod scenarios;
pub mod signalling;
pub mod sweep;

pub use channels::{apply, compose_choi, dilate, invert, is_cp, is_tp, link_product, Channel, Instrument};
pub use config::Tolerances;
pub use divisibility::{
    classify, default_grid, icp_check, ClassificationReport, IcpReport, IcpVerdict, Label, TimeGrid,
    DEFAULT_GRID_POINTS,
};
pub use error::{Error, Result};
pub use process_tensor::{
    born_rule, build_from_dilation, build_process_tensor, check_conditional_nonsignalling, check_markov,
    check_ocp, chi_decompose, extract_l_sr, extract_l_tr, extract_l_ts, Check, ChiDecomposition,
    ProcessTensor, Verdict,
};
pub use qmat::{kron, maximally_entangled, partial_trace, permute_legs, CMatrix, Leg, LeggedOperator, C64};
pub use scenarios::{builtin, make_app_b, make_fig2a, make_partial_swap, Dynamics, Scenario};
pub use signalling::{signalling_probability_table, SignallingInputs, SignallingTable};
pub use sweep::{run_sweep, SweepSpec};
