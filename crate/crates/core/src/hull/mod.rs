//! Convex hulls and volumes in dimensions 1 to 6.

mod planar;
mod quickhull;
mod volume;

pub use planar::{hull_area, monotone_chain, polygon_area};
pub use quickhull::{affine_basis, extent, quickhull, RawHull, MAX_DIM, REL_EPS};
pub use volume::{
    body_volume, convex_hull, hull_volume, hull_vertices, volume_exact, volume_mc, HullFacet,
    HullResult, VolumeMethod, VolumeResult, EXACT_VERTEX_LIMIT,
};
