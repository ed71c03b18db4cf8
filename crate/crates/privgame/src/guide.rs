//! The book chapters, compiled as doc-tests.
//!
//! mdbook renders `book/` but cannot run its code blocks against this
//! crate, so each chapter is also included here as module documentation;
//! `cargo test --doc` then executes every snippet, keeping the book and
//! the library in sync.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/probability.md")]
pub mod probability {}

#[doc = include_str!("../../../book/src/binary-mechanisms.md")]
pub mod binary_mechanisms {}

#[doc = include_str!("../../../book/src/gaussian-mechanisms.md")]
pub mod gaussian_mechanisms {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/datasets-and-cli.md")]
pub mod datasets_and_cli {}
