//! Scene configuration files: camera, lights, background, render parameters
//! and permittivity mapping, plus the path of the cloud they apply to.
//!
//! ```json
//! {
//!   "camera": { "position": [32, 40, 100], "look_at": [32, 14, 20] },
//!   "lights": [ { "kind": "point", "position": [10, 56, 60], "rgb": [1, 1, 1] } ],
//!   "cloud": "mirror_box.ply"
//! }
//! ```
//!
//! Vectors are kept as written; directions and `up` are normalized when the
//! configuration is turned into a [`Scene`].

use glam::DVec3;
use serde::{Deserialize, Serialize};

use crate::error::SceneError;
use crate::model::VoxelGrid;
use crate::optics::MappingConfig;
use crate::shading::{Camera, Light, RenderParams, Rgb, Scene};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub camera: CameraConfig,
    #[serde(default)]
    pub lights: Vec<LightConfig>,
    #[serde(default)]
    pub background: [f64; 3],
    #[serde(default)]
    pub render: RenderConfig,
    #[serde(default)]
    pub optics: OpticsConfig,
    pub cloud: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub position: [f64; 3],
    pub look_at: [f64; 3],
    #[serde(default = "default_up")]
    pub up: [f64; 3],
    #[serde(default = "default_vfov")]
    pub vfov_deg: f64,
    #[serde(default = "default_size")]
    pub width: u32,
    #[serde(default = "default_size")]
    pub height: u32,
}

fn default_up() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

fn default_vfov() -> f64 {
    40.0
}

fn default_size() -> u32 {
    64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LightKind {
    Point,
    Directional,
    Ambient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightConfig {
    pub kind: LightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 3]>,
    /// Travel direction of a directional light.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    pub rgb: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderConfig {
    pub spp: u32,
    pub max_depth: u32,
    pub seed: u64,
    pub spectral_split: bool,
    pub smooth_normals: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        let p = RenderParams::default();
        Self {
            spp: p.samples_per_pixel,
            max_depth: p.max_depth,
            seed: p.rng_seed,
            spectral_split: p.spectral_split,
            smooth_normals: p.smooth_normals,
        }
    }
}

impl From<RenderConfig> for RenderParams {
    fn from(r: RenderConfig) -> Self {
        RenderParams {
            samples_per_pixel: r.spp,
            max_depth: r.max_depth,
            rng_seed: r.seed,
            spectral_split: r.spectral_split,
            smooth_normals: r.smooth_normals,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticsConfig {
    pub eps_max: f64,
    pub gamma_map: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        let m = MappingConfig::default();
        Self {
            eps_max: m.eps_max,
            gamma_map: m.gamma_map,
        }
    }
}

fn vec3(v: [f64; 3]) -> DVec3 {
    DVec3::from_array(v)
}

fn unit(v: [f64; 3], path: &str) -> Result<DVec3, SceneError> {
    let v = vec3(v);
    let len = v.length();
    if !(len.is_finite() && len > 0.0) {
        return Err(SceneError::new(path, "must be a finite non-zero vector"));
    }
    Ok(v / len)
}

impl LightConfig {
    fn to_light(&self, path: &str) -> Result<Light, SceneError> {
        let rgb = vec3(self.rgb);
        let light = match (self.kind, self.position, self.direction) {
            (LightKind::Point, Some(p), None) => Light::Point {
                position: vec3(p),
                rgb,
            },
            (LightKind::Directional, None, Some(d)) => Light::Directional {
                direction: unit(d, &format!("{path}.direction"))?,
                rgb,
            },
            (LightKind::Ambient, None, None) => Light::Ambient { rgb },
            (LightKind::Point, _, _) => {
                return Err(SceneError::new(
                    path,
                    "point light takes a position and no direction",
                ))
            }
            (LightKind::Directional, _, _) => {
                return Err(SceneError::new(
                    path,
                    "directional light takes a direction and no position",
                ))
            }
            (LightKind::Ambient, _, _) => {
                return Err(SceneError::new(
                    path,
                    "ambient light takes neither position nor direction",
                ))
            }
        };
        light.validate().map_err(|e| SceneError::new(path, e))?;
        Ok(light)
    }
}

impl SceneConfig {
    pub fn camera(&self) -> Result<Camera, SceneError> {
        let c = &self.camera;
        let camera = Camera {
            position: vec3(c.position),
            look_at: vec3(c.look_at),
            up: unit(c.up, "camera.up")?,
            vertical_fov: c.vfov_deg,
            width: c.width,
            height: c.height,
        };
        camera
            .validate()
            .map_err(|e| SceneError::new("camera", e))?;
        Ok(camera)
    }

    pub fn lights(&self) -> Result<Vec<Light>, SceneError> {
        self.lights
            .iter()
            .enumerate()
            .map(|(i, l)| l.to_light(&format!("lights[{i}]")))
            .collect()
    }

    pub fn mapping(&self) -> Result<MappingConfig, SceneError> {
        MappingConfig::new(self.optics.eps_max, self.optics.gamma_map)
            .map_err(|e| SceneError::new("optics", e.to_string()))
    }

    pub fn params(&self) -> Result<RenderParams, SceneError> {
        let params = RenderParams::from(self.render);
        params
            .validate()
            .map_err(|e| SceneError::new("render", e))?;
        Ok(params)
    }

    /// Checks every field against the scene invariants.
    pub fn validate(&self) -> Result<(), SceneError> {
        self.camera()?;
        self.lights()?;
        self.mapping()?;
        self.params()?;
        let bg = vec3(self.background);
        if !(bg.is_finite() && bg.min_element() >= 0.0) {
            return Err(SceneError::new(
                "background",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }

    /// Pairs the configuration with its cloud.
    pub fn to_scene(&self, grid: VoxelGrid) -> Result<Scene, SceneError> {
        self.validate()?;
        Ok(Scene {
            grid,
            lights: self.lights()?,
            camera: self.camera()?,
            background: Rgb::from_array(self.background),
            params: self.params()?,
            mapping: self.mapping()?,
        })
    }
}

/// Parses and validates a scene file. Unknown keys are rejected and omitted
/// optional fields take their defaults.
pub fn parse_scene(bytes: &[u8]) -> Result<SceneConfig, SceneError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let cfg: SceneConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SceneError::new(path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical form: every field written, two-space indentation, trailing
/// newline.
pub fn serialize_scene(cfg: &SceneConfig) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(cfg).expect("scene config serializes");
    out.push(b'\n');
    out
}
