//! Volumetric voxel clouds described by seven illumination-independent
//! material attributes, plus the optics, traversal and ray tracer needed to
//! render them under any lights and camera.

pub mod error;
pub mod model;
pub mod optics;
pub mod traversal;

pub use error::{CloudError, ModelError, OpticsError, SceneError, SceneGenError};
pub use model::{
    material_preset, GridDims, MaterialPreset, VoxelAttributes, VoxelCoord, VoxelGrid,
    MATERIAL_PRESETS,
};
pub mod formats;
pub mod scenegen;
pub mod shading;
