use thiserror::Error;

use crate::model::{GridDims, VoxelCoord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("attribute {field} = {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("voxel {0} is outside the grid")]
    OutOfBounds(VoxelCoord),
    #[error("unknown material {0:?}")]
    UnknownMaterial(String),
    #[error("grid dimensions must be positive, got {}x{}x{}", .0.x, .0.y, .0.z)]
    InvalidDims(GridDims),
    #[error("voxel size must be positive and finite, got {0}")]
    InvalidVoxelSize(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("{quantity} = {value} is outside its domain {domain}")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("normal has length {0}, expected a unit vector")]
    DegenerateNormal(f64),
    #[error("invalid mapping config: {0}")]
    InvalidConfig(&'static str),
}

/// Cloud-file parse failures. Record numbers are zero-based vertex indices;
/// line numbers are one-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloudError {
    #[error("malformed header at line {line}: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("record {record}: attribute {field} = {value} is outside [0, 1]")]
    OutOfRangeAttribute {
        record: usize,
        field: &'static str,
        value: f64,
    },
    #[error("record {record}: {reason}")]
    MalformedRecord { record: usize, reason: String },
    #[error("duplicate voxel {0}")]
    DuplicateVoxel(VoxelCoord),
    #[error("voxel {0} is outside the declared grid")]
    OutOfBoundsVoxel(VoxelCoord),
    #[error("truncated body: expected {expected} records, got {got}")]
    TruncatedBody { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("scene schema error at {path}: {reason}")]
pub struct SceneError {
    pub path: String,
    pub reason: String,
}

impl SceneError {
    pub fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneGenError {
    #[error("unknown scene {name:?}; valid scenes: {valid}")]
    UnknownScene { name: String, valid: String },
}
