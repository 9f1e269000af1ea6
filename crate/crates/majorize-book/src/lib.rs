//! The `majorize` guide, compiled so that its snippets run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}

#[doc = include_str!("../../../book/src/surrogates.md")]
pub mod surrogates {}

#[doc = include_str!("../../../book/src/subproblem.md")]
pub mod subproblem {}

#[doc = include_str!("../../../book/src/ghma.md")]
pub mod ghma {}

#[doc = include_str!("../../../book/src/barrier.md")]
pub mod barrier {}

#[doc = include_str!("../../../book/src/second_order.md")]
pub mod second_order {}

#[doc = include_str!("../../../book/src/test_problems.md")]
pub mod test_problems {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
