//! Robust time-dependent route search through time-varying flow fields.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the numerical
//! core: the current models ([`flowfield`]), the operating-domain corner sets
//! ([`uncertainty`]), edge traversal and interval propagation ([`transit`]),
//! the lattice graphs ([`graph`]) and the label-setting engine that realizes
//! TVE, A*TVE, ZTVE, ZA*TVE and their robust variants ([`search`]).
//!
//! File formats, scenario configuration, thread pools and the command line
//! live in the `flowpath` companion crate. Parallel evaluation is injected
//! through the [`exec::Executor`] trait so the core stays free of `std`.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod counters;
pub mod error;
pub mod exec;
pub mod flowfield;
pub mod geom;
pub mod graph;
pub mod search;
pub mod transit;
pub mod uncertainty;

pub use counters::{CallCounters, Counts};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use flowfield::{FlowProvider, FlowSample, GriddedField, Jacobian, JetParams};
pub use geom::{Point, Region};
pub use graph::{Graph, GridGraph, GridSpec, Neighborhood, PointGraph};
pub use search::{Algorithm, SearchConfig, SearchResult, VertexLabel};
pub use transit::{CostInterval, TransitConfig};
pub use uncertainty::{ParameterSet, UncertaintyDomain};
