//! Synthetic clouds: filled primitives rasterized into a grid, and the named
//! demo scenes built from them.

use glam::DVec3;

use crate::error::SceneGenError;
use crate::formats::scene::{
    CameraConfig, LightConfig, LightKind, OpticsConfig, RenderConfig, SceneConfig,
};
use crate::model::{
    material_preset, GridDims, VoxelAttributes, VoxelCoord, VoxelGrid, MATERIAL_PRESETS,
};

/// Solid shapes in voxel units (a voxel `c` has its center at `c + 0.5`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Sphere {
        center: DVec3,
        radius: f64,
    },
    /// Closed box `[min, max]`.
    Box {
        min: DVec3,
        max: DVec3,
    },
    /// Everything between two planes perpendicular to `axis`.
    Slab {
        axis: usize,
        min: f64,
        max: f64,
    },
    /// Box of thinned-out material: transmissivity and attenuation are scaled
    /// by `density`.
    FogRegion {
        min: DVec3,
        max: DVec3,
        density: f64,
    },
    /// Floor of `thickness` voxels from `y = 0` tiled with `tile × tile`
    /// squares alternating between the primitive's material (even tiles) and
    /// `other`.
    CheckerFloor {
        thickness: u32,
        tile: u32,
        other: VoxelAttributes,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub shape: Shape,
    pub material: VoxelAttributes,
}

impl Primitive {
    pub fn new(shape: Shape, material: VoxelAttributes) -> Self {
        Self { shape, material }
    }

    /// Material of the voxel at `c`, or `None` when its center is outside the
    /// solid.
    pub fn material_at(&self, c: VoxelCoord) -> Option<VoxelAttributes> {
        let p = DVec3::new(c.x as f64, c.y as f64, c.z as f64) + 0.5;
        let in_box = |min: DVec3, max: DVec3| p.cmpge(min).all() && p.cmple(max).all();
        match self.shape {
            Shape::Sphere { center, radius } => {
                (p.distance(center) <= radius).then_some(self.material)
            }
            Shape::Box { min, max } => in_box(min, max).then_some(self.material),
            Shape::Slab { axis, min, max } => {
                (min <= p[axis] && p[axis] <= max).then_some(self.material)
            }
            Shape::FogRegion { min, max, density } => {
                in_box(min, max).then(|| thin(self.material, density))
            }
            Shape::CheckerFloor {
                thickness,
                tile,
                other,
            } => {
                if c.y < 0 || c.y >= thickness as i64 {
                    return None;
                }
                let tile = tile.max(1) as i64;
                let parity = (c.x.div_euclid(tile) + c.z.div_euclid(tile)).rem_euclid(2);
                Some(if parity == 0 { self.material } else { other })
            }
        }
    }
}

fn thin(m: VoxelAttributes, density: f64) -> VoxelAttributes {
    let k = density.clamp(0.0, 1.0) as f32;
    VoxelAttributes {
        r_t: m.r_t * k,
        g_t: m.g_t * k,
        b_t: m.b_t * k,
        r_a: m.r_a * k,
        g_a: m.g_a * k,
        b_a: m.b_a * k,
        d: m.d,
    }
}

/// Writes the primitive's material into every grid voxel whose center lies
/// inside it. Later calls overwrite earlier ones.
pub fn rasterize(primitive: &Primitive, grid: &mut VoxelGrid) {
    let dims = grid.dims();
    for z in 0..dims.z as i64 {
        for y in 0..dims.y as i64 {
            for x in 0..dims.x as i64 {
                let c = VoxelCoord::new(x, y, z);
                if let Some(m) = primitive.material_at(c) {
                    grid.set(c, m).expect("in bounds");
                }
            }
        }
    }
}

pub const DEMO_SCENES: [&str; 5] = [
    "materials_gallery",
    "mirror_box",
    "glass_sphere",
    "fog_room",
    "day_night_building",
];

/// A generated cloud and the lighting setups that go with it.
#[derive(Clone, Debug, PartialEq)]
pub struct Demo {
    pub grid: VoxelGrid,
    /// `(suffix, config)`; the suffix is empty for single-config scenes and
    /// `day` / `night` for the building.
    pub configs: Vec<(&'static str, SceneConfig)>,
}

fn preset(name: &str) -> VoxelAttributes {
    material_preset(name).expect("built-in preset")
}

fn v(x: f64, y: f64, z: f64) -> DVec3 {
    DVec3::new(x, y, z)
}

fn build(dims: GridDims, primitives: &[Primitive]) -> VoxelGrid {
    let mut grid = VoxelGrid::new(dims, 1.0).expect("valid dims");
    for p in primitives {
        rasterize(p, &mut grid);
    }
    grid
}

fn camera(position: [f64; 3], look_at: [f64; 3], vfov_deg: f64) -> CameraConfig {
    CameraConfig {
        position,
        look_at,
        up: [0.0, 1.0, 0.0],
        vfov_deg,
        width: 64,
        height: 64,
    }
}

fn point(position: [f64; 3], rgb: [f64; 3]) -> LightConfig {
    LightConfig {
        kind: LightKind::Point,
        position: Some(position),
        direction: None,
        rgb,
    }
}

fn directional(direction: [f64; 3], rgb: [f64; 3]) -> LightConfig {
    LightConfig {
        kind: LightKind::Directional,
        position: None,
        direction: Some(direction),
        rgb,
    }
}

fn ambient(rgb: [f64; 3]) -> LightConfig {
    LightConfig {
        kind: LightKind::Ambient,
        position: None,
        direction: None,
        rgb,
    }
}

fn config(
    name: &str,
    camera: CameraConfig,
    lights: Vec<LightConfig>,
    background: [f64; 3],
) -> SceneConfig {
    SceneConfig {
        camera,
        lights,
        background,
        render: RenderConfig::default(),
        optics: OpticsConfig::default(),
        cloud: format!("{name}.ply"),
    }
}

/// Layout of the gallery: slab `i` of the preset table. Row 0 (upper) holds
/// presets 0 to 6, row 1 (lower) presets 7 to 13.
pub fn gallery_slab(i: usize) -> (DVec3, DVec3) {
    let (row, col) = (i / 7, i % 7);
    let x0 = 4.0 + 8.0 * col as f64;
    let y0 = if row == 0 { 20.0 } else { 4.0 };
    (v(x0, y0, 12.0), v(x0 + 6.0, y0 + 12.0, 15.0))
}

fn materials_gallery() -> Demo {
    let mut prims = vec![Primitive::new(
        Shape::CheckerFloor {
            thickness: 2,
            tile: 4,
            other: preset("dark_shirt"),
        },
        preset("white_shirt"),
    )];
    for (i, m) in MATERIAL_PRESETS.iter().enumerate() {
        let (min, max) = gallery_slab(i);
        prims.push(Primitive::new(Shape::Box { min, max }, m.attrs));
    }
    let grid = build(GridDims::new(64, 40, 64), &prims);
    let cfg = config(
        "materials_gallery",
        camera([32.0, 60.0, 84.0], [32.0, 16.0, 14.0], 40.0),
        vec![
            point([32.0, 48.0, 70.0], [1.0, 1.0, 1.0]),
            ambient([0.05, 0.05, 0.05]),
        ],
        [0.02, 0.02, 0.02],
    );
    Demo {
        grid,
        configs: vec![("", cfg)],
    }
}

fn mirror_box() -> Demo {
    let prims = [
        Primitive::new(
            Shape::CheckerFloor {
                thickness: 2,
                tile: 8,
                other: preset("blue_shirt"),
            },
            preset("white_shirt"),
        ),
        Primitive::new(
            Shape::Box {
                min: v(0.0, 2.0, 4.0),
                max: v(64.0, 48.0, 6.0),
            },
            preset("mirror"),
        ),
        Primitive::new(
            Shape::Sphere {
                center: v(32.0, 14.0, 30.0),
                radius: 10.0,
            },
            preset("glass"),
        ),
    ];
    let grid = build(GridDims::cube(64), &prims);
    let cfg = config(
        "mirror_box",
        camera([32.0, 40.0, 100.0], [32.0, 14.0, 20.0], 45.0),
        vec![
            point([10.0, 56.0, 60.0], [1.0, 1.0, 1.0]),
            ambient([0.05, 0.05, 0.05]),
        ],
        [0.1, 0.1, 0.12],
    );
    Demo {
        grid,
        configs: vec![("", cfg)],
    }
}

fn glass_sphere() -> Demo {
    let prims = [
        Primitive::new(
            Shape::CheckerFloor {
                thickness: 2,
                tile: 4,
                other: preset("red_shirt"),
            },
            preset("white_shirt"),
        ),
        Primitive::new(
            Shape::Box {
                min: v(0.0, 2.0, 2.0),
                max: v(48.0, 40.0, 4.0),
            },
            preset("blue_shirt"),
        ),
        Primitive::new(
            Shape::Sphere {
                center: v(24.0, 12.0, 24.0),
                radius: 9.0,
            },
            preset("glass"),
        ),
    ];
    let grid = build(GridDims::cube(48), &prims);
    let cfg = config(
        "glass_sphere",
        camera([24.0, 30.0, 80.0], [24.0, 12.0, 20.0], 40.0),
        vec![
            point([40.0, 44.0, 50.0], [1.0, 1.0, 1.0]),
            ambient([0.05, 0.05, 0.05]),
        ],
        [0.05, 0.05, 0.05],
    );
    Demo {
        grid,
        configs: vec![("", cfg)],
    }
}

fn fog_room() -> Demo {
    let prims = [
        Primitive::new(
            Shape::Slab {
                axis: 1,
                min: 0.0,
                max: 2.0,
            },
            preset("white_shirt"),
        ),
        Primitive::new(
            Shape::Box {
                min: v(0.0, 0.0, 0.0),
                max: v(48.0, 48.0, 2.0),
            },
            preset("color_shirt"),
        ),
        Primitive::new(
            Shape::Box {
                min: v(0.0, 0.0, 0.0),
                max: v(2.0, 48.0, 48.0),
            },
            preset("red_shirt"),
        ),
        Primitive::new(
            Shape::Box {
                min: v(46.0, 0.0, 0.0),
                max: v(48.0, 48.0, 48.0),
            },
            preset("green_shirt"),
        ),
        Primitive::new(
            Shape::FogRegion {
                min: v(2.0, 2.0, 2.0),
                max: v(46.0, 46.0, 40.0),
                density: 0.02,
            },
            preset("smoke_mist"),
        ),
    ];
    let grid = build(GridDims::cube(48), &prims);
    let cfg = config(
        "fog_room",
        camera([24.0, 24.0, 90.0], [24.0, 20.0, 20.0], 40.0),
        vec![point([24.0, 40.0, 30.0], [1.0, 1.0, 1.0])],
        [0.0, 0.0, 0.0],
    );
    Demo {
        grid,
        configs: vec![("", cfg)],
    }
}

fn day_night_building() -> Demo {
    let wall = preset("color_shirt");
    let glass = preset("glass");
    let air = VoxelAttributes::AIR;
    let prims = [
        Primitive::new(
            Shape::CheckerFloor {
                thickness: 2,
                tile: 8,
                other: preset("dark_shirt"),
            },
            preset("white_shirt"),
        ),
        // shell, then hollowed out
        Primitive::new(
            Shape::Box {
                min: v(16.0, 2.0, 20.0),
                max: v(48.0, 30.0, 44.0),
            },
            wall,
        ),
        Primitive::new(
            Shape::Box {
                min: v(18.0, 2.0, 22.0),
                max: v(46.0, 28.0, 42.0),
            },
            air,
        ),
        Primitive::new(
            Shape::Box {
                min: v(14.0, 30.0, 18.0),
                max: v(50.0, 32.0, 46.0),
            },
            preset("brass"),
        ),
        // windows and door in the front wall
        Primitive::new(
            Shape::Box {
                min: v(20.0, 14.0, 42.0),
                max: v(28.0, 22.0, 44.0),
            },
            glass,
        ),
        Primitive::new(
            Shape::Box {
                min: v(36.0, 14.0, 42.0),
                max: v(44.0, 22.0, 44.0),
            },
            glass,
        ),
        Primitive::new(
            Shape::Box {
                min: v(29.0, 2.0, 42.0),
                max: v(35.0, 12.0, 44.0),
            },
            air,
        ),
    ];
    let grid = build(GridDims::new(64, 48, 64), &prims);
    let cam = camera([32.0, 40.0, 110.0], [32.0, 14.0, 32.0], 40.0);
    let day = config(
        "day_night_building",
        cam.clone(),
        vec![
            directional([0.4, -1.0, -0.3], [1.0, 0.95, 0.85]),
            ambient([0.15, 0.17, 0.2]),
        ],
        [0.5, 0.7, 1.0],
    );
    let night = config(
        "day_night_building",
        cam,
        vec![
            point([32.0, 16.0, 32.0], [1.5, 1.2, 0.75]),
            ambient([0.01, 0.01, 0.02]),
        ],
        [0.01, 0.01, 0.03],
    );
    Demo {
        grid,
        configs: vec![("day", day), ("night", night)],
    }
}

/// Builds a named demo scene. Generation is deterministic.
pub fn demo_scene(name: &str) -> Result<Demo, SceneGenError> {
    match name {
        "materials_gallery" => Ok(materials_gallery()),
        "mirror_box" => Ok(mirror_box()),
        "glass_sphere" => Ok(glass_sphere()),
        "fog_room" => Ok(fog_room()),
        "day_night_building" => Ok(day_night_building()),
        _ => Err(SceneGenError::UnknownScene {
            name: name.to_string(),
            valid: DEMO_SCENES.join(", "),
        }),
    }
}
