//! Faithfulness and abstractiveness metrics for generated summaries.
//!
//! - [`text`]: sentence splitting, tokenization, n-grams.
//! - [`abstractiveness`]: how a summary sentence copies from its document.
//! - [`overlap`]: ROUGE-1/2/L and BLEU-4.
//! - [`feqa`]: question-answering based faithfulness.
//! - [`stats`]: Pearson and Spearman correlation with p-values.
//! - [`corpus`] and [`run`]: JSONL ingestion and the command-line reports.

pub mod abstractiveness;
pub mod corpus;
pub mod feqa;
pub mod overlap;
pub mod run;
pub mod stats;
pub mod text;

pub use corpus::{load_corpus, Record};
