//! Joint evaluation of CHSH nonlocality and n-cycle KCBS contextuality on a
//! qubit ⊗ qutrit system.
//!
//! * [`linalg`]: small dense complex matrices, tensor products, expectations.
//! * [`observables`]: KCBS vectors/observables, Alice's rotations, closed forms.
//! * [`analytic`]: closed-form CHSH/KCBS values, thresholds, state families.
//! * [`circuits`]: qutrit gates, statevector simulation, the Fourier test.
//! * [`experiments`]: landscapes, coexistence points, scaling studies.
//! * [`cli`]: command-line surface and file output.
//! * [`validate`]: the self-check suite run by `chsh-kcbs validate`.

pub mod analytic;
pub mod circuits;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod observables;
pub mod validate;

pub use error::{Error, Result};
