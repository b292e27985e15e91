//! Z4 quadratic forms, diagonal phase polynomials and the distillation
//! protocol simulator.

mod forms;
mod phase;
mod protocol;

pub use forms::{decompose_form, eval_decomposition, eval_form, s_phase_from_set, QuadraticFormZ4};
pub use phase::{correction_sg, mod8_identity_check, t_phase_from_set, PhasePolynomial8};
pub use protocol::{protocol_phases, simulate_protocol, Convention, ProtocolConfig, ProtocolTrace, ShotSummary, Variant, run_shots};
