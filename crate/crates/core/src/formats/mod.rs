//! On-disk formats: the voxel cloud (PLY dialect) and the scene configuration
//! (JSON).

pub mod cloud;
pub mod scene;

pub use cloud::{
    parse_cloud, read_cloud_with_header, serialize_cloud, validate_cloud, CloudHeader, Encoding,
    Quantization,
};
pub use scene::{parse_scene, serialize_scene, SceneConfig};
