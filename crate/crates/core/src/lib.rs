//! Geometry kernel for closed flat surfaces with conical singularities.

pub mod beam;
pub mod bounds;
pub mod connections;
pub mod cylinder;
pub mod decompose;
pub mod distortion;
pub mod error;
pub mod extremal;
pub mod generate;
pub mod overlay;
pub mod preserve;
pub mod report;
pub mod simplify;
pub mod structure;
pub mod geodesic;
pub mod geom;
pub mod kite;
pub mod optimize;
pub mod surface;
pub mod svg;
pub mod trace;
pub mod unfold;

pub use error::{Error, Result};
pub use surface::{parse_surface, ConeSurface, CornerRef, EdgeRef, EPS};
