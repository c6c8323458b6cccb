//! Joint power and natural-gas capacity expansion planning.

mod csvio;
pub mod error;
pub mod audit;
pub mod build;
pub mod names;
pub mod report;
pub mod scenario;
pub mod synthetic;
pub mod timegrid;
pub mod topology;

pub use error::{AuditError, BuildError, ScenarioError, TimeGridError, TopologyError};
pub use scenario::{Case, DemandSet, EmissionsScope, Scenario};
pub use timegrid::TimeGrid;
pub use topology::EnergySystem;
