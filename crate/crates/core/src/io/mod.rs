//! File formats and rendering.

pub mod contour;
pub mod obj;
pub mod output;
pub mod problem;
pub mod svg;
