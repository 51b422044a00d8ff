//! The guide in `book/` compiled as doc-tests, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/text.md")]
pub mod text {}
#[doc = include_str!("../../../book/src/abstractiveness.md")]
pub mod abstractiveness {}
#[doc = include_str!("../../../book/src/overlap.md")]
pub mod overlap {}
#[doc = include_str!("../../../book/src/feqa.md")]
pub mod feqa {}
#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
