//! The guide's chapters, compiled so that `cargo test` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/multiplicative.md")]
pub mod multiplicative {}
#[doc = include_str!("../../../book/src/piltz.md")]
pub mod piltz {}
#[doc = include_str!("../../../book/src/satake.md")]
pub mod satake {}
#[doc = include_str!("../../../book/src/errfun.md")]
pub mod errfun {}
#[doc = include_str!("../../../book/src/meanvalue.md")]
pub mod meanvalue {}
#[doc = include_str!("../../../book/src/signs.md")]
pub mod signs {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
