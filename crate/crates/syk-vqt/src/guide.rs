//! The guide chapters from `book/`, embedded so their code blocks run as
//! doc-tests and cannot drift from the library.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/syk-model.md")]
pub mod syk_model {}

#[doc = include_str!("../../../book/src/pauli-algebra.md")]
pub mod pauli_algebra {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/ansatz.md")]
pub mod ansatz {}

#[doc = include_str!("../../../book/src/optimization.md")]
pub mod optimization {}

#[doc = include_str!("../../../book/src/tfd.md")]
pub mod tfd {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
