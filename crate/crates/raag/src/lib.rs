//! Exact computation in coherent right-angled Artin groups, their
//! centraliser extensions, truncated ℤ[t]-exponential chains and graph towers.

pub mod amalgam;
pub mod centralizers;
pub mod discrimination;
pub mod error;
pub mod graph;
pub mod group;
pub mod towers;
pub mod words;
pub mod zt_ice;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
pub use group::{Elem, Group, Sub};
pub use words::Word;
