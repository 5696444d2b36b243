//! Deterministic stochastic ray tracing of voxel clouds under user-placed
//! lights and a pinhole camera.

mod camera;
mod image;
mod render;
pub mod sampling;
mod scene;
mod tracer;

/// Linear RGB radiance; `x`, `y`, `z` hold red, green and blue.
pub type Rgb = glam::DVec3;

pub use camera::Camera;
pub use image::{quantize, tone_map, Image8, DEFAULT_DISPLAY_GAMMA};
pub use render::{default_workers, render, render_with_workers, Framebuffer};
pub use sampling::sample_scatter;
pub use scene::{Light, RenderParams, Scene};
pub use tracer::{direct_light, trace, Band, Tracer, LUMINANCE, SPLIT_DEPTH};
