use glam::DVec3;

use super::camera::Camera;
use super::Rgb;
use crate::model::VoxelGrid;
use crate::optics::MappingConfig;

/// Light sources live in the render setup, never in the cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Light {
    /// Omnidirectional source at a position. No distance falloff: a surface
    /// facing the light receives `rgb · cos(theta)`.
    Point { position: DVec3, rgb: Rgb },
    /// Parallel light travelling along `direction` (unit).
    Directional { direction: DVec3, rgb: Rgb },
    /// Unshadowed light reaching every surface equally.
    Ambient { rgb: Rgb },
}

impl Light {
    pub fn rgb(&self) -> Rgb {
        match *self {
            Light::Point { rgb, .. } | Light::Directional { rgb, .. } | Light::Ambient { rgb } => {
                rgb
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let rgb = self.rgb();
        if !(rgb.is_finite() && rgb.min_element() >= 0.0) {
            return Err("light intensity must be finite and non-negative".into());
        }
        match *self {
            Light::Point { position, .. } if !position.is_finite() => {
                Err("light position must be finite".into())
            }
            Light::Directional { direction, .. } if (direction.length() - 1.0).abs() > 1e-6 => {
                Err(format!(
                    "directional light direction has length {}, expected 1",
                    direction.length()
                ))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderParams {
    pub samples_per_pixel: u32,
    /// Interactions a path may have; rays spawned beyond it carry nothing.
    pub max_depth: u32,
    pub rng_seed: u64,
    /// Trace one monochromatic path per color channel so each channel bends
    /// with its own permittivity.
    pub spectral_split: bool,
    /// Shade with occupancy-gradient normals instead of voxel face normals.
    pub smooth_normals: bool,
}

impl RenderParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.samples_per_pixel == 0 {
            return Err("samples per pixel must be at least 1".into());
        }
        if self.max_depth == 0 {
            return Err("max depth must be at least 1".into());
        }
        Ok(())
    }
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            samples_per_pixel: 16,
            max_depth: 8,
            rng_seed: 0,
            spectral_split: false,
            smooth_normals: false,
        }
    }
}

/// Everything needed to render: the cloud plus the viewer-side setup.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub grid: VoxelGrid,
    pub lights: Vec<Light>,
    pub camera: Camera,
    pub background: Rgb,
    pub params: RenderParams,
    pub mapping: MappingConfig,
}

impl Scene {
    pub fn validate(&self) -> Result<(), String> {
        self.camera.validate()?;
        self.params.validate()?;
        for light in &self.lights {
            light.validate()?;
        }
        if !(self.background.is_finite() && self.background.min_element() >= 0.0) {
            return Err("background must be finite and non-negative".into());
        }
        MappingConfig::new(self.mapping.eps_max, self.mapping.gamma_map)
            .map_err(|e| e.to_string())?;
        Ok(())
    }
}
