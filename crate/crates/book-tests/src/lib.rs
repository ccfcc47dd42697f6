// The book's Rust listings run as doctests: each chapter is pulled in as the
// docs of an empty module, so a failing listing names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/squares.md")]
pub mod squares {}
#[doc = include_str!("../../../book/src/symmetry.md")]
pub mod symmetry {}
#[doc = include_str!("../../../book/src/admissible.md")]
pub mod admissible {}
#[doc = include_str!("../../../book/src/cover.md")]
pub mod cover {}
#[doc = include_str!("../../../book/src/seeds.md")]
pub mod seeds {}
#[doc = include_str!("../../../book/src/onefact.md")]
pub mod onefact {}
#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
