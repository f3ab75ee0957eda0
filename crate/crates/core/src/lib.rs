//! Learning hidden coalition structures from multiple-bit deviation
//! observations.
//!
//! A hidden partition of agents `1..=n` is probed by posing games with a
//! specified strategy profile; each round reveals which agents deviate when
//! every coalition best-responds jointly. The [`learners`] recover the
//! partition within the round budgets of [`bounds`].

pub mod bounds;
pub mod error;
pub mod games;
pub mod harness;
pub mod learners;
pub mod oracle;
pub mod partition;

pub use bounds::Family;
pub use error::{Error, Result};
pub use partition::{AgentId, CoalitionStructure};
