//! Simulator for distributed cache clusters whose caches have unequal storage.
//!
//! A central server sits behind a root node that fronts `m` caches. Files
//! are placed on the caches ahead of time; each time slot a batch of
//! requests arrives, each cache serves at most one of them, and every file
//! that still has an unserved request is sent by the server once. The number
//! of such files is the transmission rate.
//!
//! Two policies are provided:
//!
//! * [`ppmm`]: replicas proportional to popularity, delivery by maximum
//!   bipartite matching.
//! * [`ksmlp`]: files chosen by a fractional knapsack, delivery by matching
//!   the least popular files first.
//!
//! [`bounds`] computes a lower bound on the best achievable rate, and
//! [`harness`] runs reproducible Monte-Carlo sweeps over them.
//!
//! ```
//! use cachesim::{harness::{Policy, Scenario}, StorageProfile, SystemConfig};
//!
//! let config = SystemConfig::new(20, 20, 60, 0.9, 0.3)?;
//! let profile = StorageProfile::rich_poor_for_memory(20, 5, 60)?;
//! let scenario = Scenario::prepare(&config, &profile, Policy::Ppmm, 0.5)?;
//! let report = scenario.run_trial(7);
//! assert!(report.rate <= report.unserved.len());
//! # Ok::<(), cachesim::Error>(())
//! ```

pub mod bounds;
pub mod cli;
pub mod error;
pub mod harness;
pub mod knapsack;
pub mod ksmlp;
pub mod matching;
pub mod popularity;
pub mod ppmm;
pub mod report;
pub mod rng;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use popularity::{PopularityModel, RequestBatch};
pub use system::{DeliveryReport, PlacementMap, StorageProfile, SystemConfig};
