//! Corrected kick–move–kick integrators of orders 2, 4, 6 and 8 for separable
//! Hamiltonians `H = ½ pᵀ M p + V(q)`.
//!
//! The core is generic over the floating type ([`Real`]); coefficient tables
//! are exact rationals converted once. Aliases for `f64` are provided below.

pub mod config;
pub mod derivop;
pub mod diagnostics;
pub mod elementary;
pub mod error;
pub mod io;
pub mod mass;
pub mod model;
pub mod models;
pub mod phase;
pub mod real;
pub mod schemes;
pub mod word;

pub use config::{Order, SchemeConfig};
pub use diagnostics::RunRecord;
pub use error::{Error, Result};
pub use mass::MassStructure;
pub use model::{DerivativeTensors, Gradients, HamiltonianModel, Potential};
pub use models::{fpu_initial_state, FpuChain, ModeSpec, QuadraticModel, QuarticOscillator};
pub use phase::PhaseState;
pub use real::{Real, Scalar};
#[cfg(feature = "double-double")]
pub use real::DoubleDouble;
pub use schemes::{integrate, step, PushReport};
pub use word::{required_words, Letter, Word};

pub type State = PhaseState<f64>;
pub type Config = SchemeConfig<f64>;
pub type Record = RunRecord<f64>;
pub type Mass = MassStructure<f64>;
pub type Quadratic = QuadraticModel<f64>;
pub type Quartic = QuarticOscillator<f64>;
pub type Fpu = FpuChain<f64>;
