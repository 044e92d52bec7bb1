//! Point-vortex dynamics and rotating Gross-Pitaevskii states on surfaces
//! of revolution, built on a conformal plane chart of the surface.

pub mod dynamics;
pub mod error;
pub mod field;
pub mod gpmin;
pub mod numerics;
pub mod renorm;
pub mod rings;
pub mod surface;
pub mod vec2;
pub mod vortexfind;

pub use error::{Error, Result};
pub use vec2::Vec2;
