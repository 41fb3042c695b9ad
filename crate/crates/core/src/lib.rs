//! Grounded families of grid regions and chromatic bounds for their
//! intersection graphs.

pub mod bounds;
pub mod decomposition;
pub mod dist2;
pub mod family;
pub mod generate;
pub mod graph;
pub mod grid;
pub mod io;
pub mod svg;
