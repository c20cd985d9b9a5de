//! Acceptance suites for `ppgroup`: seeded corpora, independent oracles
//! and one property suite per criterion.

pub mod corpus;
pub mod oracle;
pub mod suite;

pub use suite::{run_all, CriterionResult};
