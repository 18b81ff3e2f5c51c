//! Value-level simulation of function-dependent phase transforms performed
//! with an ancilla register that is never initialized.
//!
//! Registers are modeled as named integer-valued segments with dense
//! operators; see [`state::RegisterLayout`]. The central construction is
//! [`gadget::phase_transform`], which multiplies each control amplitude
//! `|x>` by `exp(2 pi i k f(x) / M)` using two oracle calls and hands the
//! ancilla back in exactly the state it arrived in, pure, mixed, or
//! entangled with a reference system.
//!
//! ```
//! use phasekit::{gadget, oracle, random, state::RegisterLayout, ANCILLA};
//!
//! let control = random::random_state_on(&RegisterLayout::single("control", 4).unwrap(), 1);
//! let ancilla = random::random_state(8, 2).unwrap();
//! let f = oracle::random_table(4, 8, 3).unwrap();
//! let plan = gadget::GadgetPlan::new(gadget::GadgetVariant::CommA, 3, 8).unwrap();
//!
//! let joint = control.tensor(&ancilla).unwrap();
//! let out = gadget::phase_transform(&joint, "control", ANCILLA, &f, &plan).unwrap();
//! assert_eq!(out.oracle_calls, 2);
//! assert!(gadget::restoration_fidelity(&out.state, &ancilla).unwrap() > 1.0 - 1e-12);
//! ```

pub mod apps;
pub mod error;
pub mod gadget;
pub mod oracle;
pub mod random;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};

/// Default segment label for the control register.
pub const CONTROL: &str = "control";
/// Default segment label for the ancilla (function) register.
pub const ANCILLA: &str = "ancilla";
/// Segment label for the purifying reference system.
pub const REFERENCE: &str = "reference";

/// Numeric tolerances.
pub mod tol {
    /// Exact-algebra checks.
    pub const EXACT: f64 = 1e-12;
    /// Matrix identities, unitarity, Hermiticity.
    pub const MATRIX: f64 = 1e-10;
    /// Quantities obtained through an eigendecomposition.
    pub const EIGEN: f64 = 1e-9;
    /// Eigenvalues at or below this are treated as zero when taking a rank.
    pub const RANK: f64 = 1e-12;
}
