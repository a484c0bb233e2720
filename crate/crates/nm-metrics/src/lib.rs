//! Segmentation agreement metrics: variation of information with its
//! split/merge decomposition, and adapted Rand error. Both are computed
//! exactly from a sparse contingency table; entropy terms are summed in a
//! canonical order so relabelings and argument swaps reproduce identical
//! bits.

mod arand;
mod error;
mod table;
mod vi;

pub use arand::adapted_rand_error;
pub use error::MetricsError;
pub use table::{contingency, ContingencyTable};
pub use vi::variation_of_information;
