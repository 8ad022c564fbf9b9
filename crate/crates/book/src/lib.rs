//! Compiles the guide's Rust listings as doc-tests, one module per chapter,
//! so `cargo test` keeps the book honest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/surfaces.md")]
pub mod surfaces {}
#[doc = include_str!("../../../book/src/galerkin.md")]
pub mod galerkin {}
#[doc = include_str!("../../../book/src/capacitance.md")]
pub mod capacitance {}
#[doc = include_str!("../../../book/src/principle.md")]
pub mod principle {}
#[doc = include_str!("../../../book/src/convergence.md")]
pub mod convergence {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
