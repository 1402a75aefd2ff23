//! Catalog of spacetimes, null hypersurfaces and riggings.

mod eikonal;
mod riggings;
mod spacetime;
mod surfaces;
mod warp;

pub use eikonal::{eikonal_solve, BlowUpInfo, EikonalProfile};
pub use riggings::{make_rigging, RIGGING_NAMES};
pub use spacetime::{flat_chart, make_spacetime, round_sphere, FiberSpec, Spacetime, SpacetimeSpec};
pub use surfaces::{make_hypersurface, HypersurfaceSpec, Profile};
pub use warp::{integrate, Warp, WarpSpec};
