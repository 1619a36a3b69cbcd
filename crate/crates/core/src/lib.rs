//! Q-information (quantum O-information) of multipartite qubit systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`states`]: pure-state constructors, samplers, the binary-coefficient
//!   enumeration and the reference-state registry.
//! - [`entropy`]: density matrices, partial traces, purity and von Neumann
//!   entropy in bits.
//! - [`qinformation`]: classical O-information on joint distributions,
//!   Q-information on density matrices and on pure states with one qubit
//!   traced out, plus the four-qubit entropy bounds.
//! - [`dynamics`]: Pauli-string Hamiltonians of interaction order 1 to 4 and
//!   exact spectral time evolution.
//! - [`experiments`]: deterministic, seeded batch runs with CSV/JSON output.
//!
//! Basis states are indexed big-endian: qubit 0 is the most significant bit
//! of the basis index. All entropies and information measures are in bits.
//!
//! ```
//! use qoinfo::{qinformation::q_information_reduced, states::make_ghz};
//!
//! let ghz = make_ghz(4).unwrap();
//! let omega = q_information_reduced(&ghz, 0).unwrap().omega;
//! assert!((omega - 1.0).abs() < 1e-9);
//! ```

pub mod dynamics;
pub mod entropy;
mod error;
pub mod experiments;
pub mod qinformation;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
