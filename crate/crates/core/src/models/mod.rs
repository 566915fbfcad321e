//! Built-in systems. Each supplies closed-form derivative-tensor contractions
//! and gets its word oracles from [`crate::elementary`].

mod fpu;
mod quadratic;
mod quartic;

pub use fpu::{fpu_initial_state, FpuChain, ModeSpec};
pub use quadratic::QuadraticModel;
pub use quartic::QuarticOscillator;
