//! Path tracing through the voxel grid.
//!
//! A path is marched from interface to interface. Inside a voxel the
//! throughput of each channel decays with that voxel's attenuation; at every
//! face where the attributes change the transmissivities of both sides give
//! per-channel permittivities, hence Snell angles and an unpolarized Fresnel
//! reflectance `R`. The first `SPLIT_DEPTH` interactions follow both the
//! reflected and the refracted branch; deeper ones pick a single branch by
//! Russian roulette. Diffuseness perturbs both branches and sets the share of
//! Lambertian response to the lights.

use glam::DVec3;
use rand::Rng;

use super::sampling::{cosine_hemisphere, sample_scatter};
use super::scene::{Light, Scene};
use super::Rgb;
use crate::model::{VoxelAttributes, VoxelCoord};
use crate::optics::{
    channel_optics, interface_reflectance, refract_dir, scatter_lobe,
    transmissivity_to_permittivity,
};
use crate::traversal::{cell_of, march, InterfaceEvent, Ray, WalkStart};

/// Interactions below this depth split deterministically into both branches.
pub const SPLIT_DEPTH: u32 = 3;

const MAX_SHADOW_CROSSINGS: usize = 4096;

/// Rec. 709 luminance weights.
pub const LUMINANCE: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Channels a path carries, with the weights used to pick one refraction
/// geometry and one branch probability for all of them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    weights: [f64; 3],
}

impl Band {
    /// All three channels along one geometric path.
    pub const RGB: Band = Band { weights: LUMINANCE };

    /// A single monochromatic channel.
    pub fn channel(c: usize) -> Band {
        let mut weights = [0.0; 3];
        weights[c] = 1.0;
        Band { weights }
    }

    fn is_active(&self, c: usize) -> bool {
        self.weights[c] > 0.0
    }

    fn mean(&self, values: [f64; 3]) -> f64 {
        (0..3)
            .filter(|&c| self.is_active(c))
            .map(|c| self.weights[c] * values[c])
            .sum()
    }

    fn max(&self, values: Rgb) -> f64 {
        (0..3)
            .filter(|&c| self.is_active(c))
            .map(|c| values[c])
            .fold(0.0, f64::max)
    }

    fn mask(&self) -> Rgb {
        Rgb::from_array(std::array::from_fn(|c| {
            if self.is_active(c) {
                1.0
            } else {
                0.0
            }
        }))
    }
}

fn transmissivity(attrs: &VoxelAttributes) -> [f64; 3] {
    attrs.transmissivity().map(f64::from)
}

fn axis_of(n: DVec3) -> usize {
    let a = n.abs();
    if a.x >= a.y && a.x >= a.z {
        0
    } else if a.y >= a.z {
        1
    } else {
        2
    }
}

pub struct Tracer<'a> {
    scene: &'a Scene,
    band: Band,
}

impl<'a> Tracer<'a> {
    pub fn new(scene: &'a Scene, band: Band) -> Self {
        Self { scene, band }
    }

    /// Radiance arriving along `-ray.dir` at the ray origin. Channels outside
    /// the band are zero.
    pub fn radiance<R: Rng + ?Sized>(
        &self,
        ray: &Ray,
        start: WalkStart,
        depth: u32,
        rng: &mut R,
    ) -> Rgb {
        if depth >= self.scene.params.max_depth {
            return Rgb::ZERO;
        }
        let grid = &self.scene.grid;
        let m = march(ray, grid, start);
        let transmittance = self.medium_transmittance(&m.medium, m.medium_length());
        let Some(hit) = m.interface else {
            return transmittance * self.scene.background * self.band.mask();
        };
        if self.band.max(transmittance) == 0.0 {
            return Rgb::ZERO;
        }
        transmittance * self.shade(ray, &hit, depth, rng)
    }

    fn medium_transmittance(&self, attrs: &VoxelAttributes, length: f64) -> Rgb {
        if length == 0.0 {
            return Rgb::ONE;
        }
        let steps = length / self.scene.grid.voxel_size();
        Rgb::from_array(
            attrs
                .attenuation()
                .map(|p_a| (1.0 - p_a as f64).powf(steps)),
        )
    }

    fn permittivity(&self, p_t: f64) -> f64 {
        transmissivity_to_permittivity(p_t, &self.scene.mapping).expect("attribute in [0, 1]")
    }

    /// Power reflectance of one channel entering a voxel with transmissivity
    /// `to_t` from one with `from_t`. Full transmissivity is a perfect mirror.
    fn channel_reflectance(&self, theta1: f64, from_t: f64, to_t: f64) -> f64 {
        if to_t == 1.0 {
            return 1.0;
        }
        if from_t == to_t {
            return 0.0;
        }
        let cfg = &self.scene.mapping;
        let from = channel_optics(from_t, cfg).expect("attribute in [0, 1]");
        let to = channel_optics(to_t, cfg).expect("attribute in [0, 1]");
        interface_reflectance(theta1, &from, &to)
    }

    fn reflectance(&self, theta1: f64, from: &VoxelAttributes, to: &VoxelAttributes) -> Rgb {
        let (from_t, to_t) = (transmissivity(from), transmissivity(to));
        Rgb::from_array(std::array::from_fn(|c| {
            if self.band.is_active(c) {
                self.channel_reflectance(theta1, from_t[c], to_t[c])
            } else {
                0.0
            }
        }))
    }

    /// Per-channel reflectance and the single refracted direction of the band
    /// (`None` under total internal reflection, which reflects everything).
    fn interface_response(
        &self,
        n_i: DVec3,
        n: DVec3,
        from: &VoxelAttributes,
        to: &VoxelAttributes,
    ) -> (Rgb, Option<DVec3>) {
        let cos1 = n_i.dot(n).clamp(0.0, 1.0);
        let reflectance = self.reflectance(cos1.acos(), from, to);
        let eps1 = self
            .band
            .mean(transmissivity(from).map(|p| self.permittivity(p)));
        let eps2 = self
            .band
            .mean(transmissivity(to).map(|p| self.permittivity(p)));
        match refract_dir(n_i, n, (eps1 / eps2).sqrt()).expect("unit normal") {
            Some(dir) => (reflectance, Some(dir.normalize())),
            None => (Rgb::ONE, None),
        }
    }

    fn shade<R: Rng + ?Sized>(
        &self,
        ray: &Ray,
        hit: &InterfaceEvent,
        depth: u32,
        rng: &mut R,
    ) -> Rgb {
        let params = &self.scene.params;
        let face_n = hit.normal;
        let n = if params.smooth_normals {
            self.smooth_normal(hit)
        } else {
            face_n
        };
        let point = self.snap_to_face(hit.position, face_n);
        let n_i = -ray.dir;
        let can_spawn = depth + 1 < params.max_depth;

        if hit.to_attrs.is_opaque_diffuse() {
            let albedo = Rgb::from_array(transmissivity(&hit.to_attrs)) * hit.to_attrs.d as f64;
            let mut l = self.direct_light_from(point, n, &hit.to_attrs, hit.from_cell);
            if can_spawn {
                let dir = cosine_hemisphere(n, rng);
                l += albedo * self.spawn(hit, point, dir, false, depth + 1, rng);
            }
            return l;
        }

        let surface = if hit.to_attrs.is_air() {
            &hit.from_attrs
        } else {
            &hit.to_attrs
        };
        let mut l = self.direct_light_from(point, n, surface, hit.from_cell);
        if !can_spawn {
            return l;
        }
        let (reflectance, transmit_dir) =
            self.interface_response(n_i, n, &hit.from_attrs, &hit.to_attrs);
        let transmittance = Rgb::ONE - reflectance;
        let lobe = scatter_lobe(surface.d as f64).expect("attribute in [0, 1]");
        let reflect_live = self.band.max(reflectance) > 0.0;
        let transmit_live = transmit_dir.is_some() && self.band.max(transmittance) > 0.0;

        let reflected = |rng: &mut R| {
            let base = 2.0 * n_i.dot(n) * n - n_i;
            let dir = sample_scatter(ray.dir, n, base, &lobe, rng);
            self.spawn(hit, point, dir, false, depth + 1, rng)
        };
        let refracted = |rng: &mut R| {
            let base = transmit_dir.expect("live transmission");
            let dir = sample_scatter(ray.dir, n, base, &lobe, rng);
            self.spawn(hit, point, dir, true, depth + 1, rng)
        };

        if depth < SPLIT_DEPTH {
            if reflect_live {
                l += reflectance * reflected(rng);
            }
            if transmit_live {
                l += transmittance * refracted(rng);
            }
        } else if reflect_live || transmit_live {
            let p = match (reflect_live, transmit_live) {
                (true, false) => 1.0,
                (false, true) => 0.0,
                _ => self.band.mean(reflectance.to_array()).clamp(0.0, 1.0),
            };
            if rng.random::<f64>() < p {
                l += reflectance / p * reflected(rng);
            } else {
                l += transmittance / (1.0 - p) * refracted(rng);
            }
        }
        l
    }

    /// Continues a path from a face point. `far` selects the side beyond the
    /// face; directions on the wrong side of the face are mirrored across it.
    fn spawn<R: Rng + ?Sized>(
        &self,
        hit: &InterfaceEvent,
        origin: DVec3,
        dir: DVec3,
        far: bool,
        depth: u32,
        rng: &mut R,
    ) -> Rgb {
        let axis = axis_of(hit.normal);
        let mut dir = dir;
        let side = dir.dot(hit.normal);
        if (far && side >= 0.0) || (!far && side <= 0.0) {
            dir[axis] = -dir[axis];
            if dir[axis] == 0.0 {
                return Rgb::ZERO;
            }
        }
        match if far { hit.to_cell } else { hit.from_cell } {
            None => {
                if depth >= self.scene.params.max_depth {
                    Rgb::ZERO
                } else {
                    self.scene.background * self.band.mask()
                }
            }
            Some(cell) => self.radiance(&Ray::new(origin, dir), WalkStart::Cell(cell), depth, rng),
        }
    }

    fn snap_to_face(&self, p: DVec3, face_n: DVec3) -> DVec3 {
        let s = self.scene.grid.voxel_size();
        let axis = axis_of(face_n);
        let mut p = p;
        p[axis] = (p[axis] / s).round() * s;
        p
    }

    /// Light reaching a surface point directly, reflected by the Lambertian
    /// share of the surface: `sum(I · cos · P_t · D · shadow)`.
    pub fn direct_light_from(
        &self,
        point: DVec3,
        normal: DVec3,
        attrs: &VoxelAttributes,
        start: Option<VoxelCoord>,
    ) -> Rgb {
        let d = attrs.d as f64;
        if d == 0.0 {
            return Rgb::ZERO;
        }
        let albedo = Rgb::from_array(transmissivity(attrs)) * d * self.band.mask();
        if self.band.max(albedo) == 0.0 {
            return Rgb::ZERO;
        }
        let mut total = Rgb::ZERO;
        for light in &self.scene.lights {
            let (wi, distance) = match *light {
                Light::Ambient { rgb } => {
                    total += rgb * albedo;
                    continue;
                }
                Light::Point { position, .. } => {
                    let to = position - point;
                    let dist = to.length();
                    if dist == 0.0 {
                        continue;
                    }
                    (to / dist, dist)
                }
                Light::Directional { direction, .. } => (-direction, f64::INFINITY),
            };
            let cos = normal.dot(wi);
            if cos <= 0.0 {
                continue;
            }
            let shadow = self.shadow_transmittance(point, wi, distance, start);
            total += light.rgb() * cos * albedo * shadow;
        }
        total
    }

    /// Fraction of light surviving from `origin` along `wi` for `distance`:
    /// voxel attenuation along the way times `1 - R` at each face crossed.
    pub fn shadow_transmittance(
        &self,
        origin: DVec3,
        wi: DVec3,
        distance: f64,
        start: Option<VoxelCoord>,
    ) -> Rgb {
        let grid = &self.scene.grid;
        let mut throughput = Rgb::ONE;
        let mut origin = origin;
        let mut remaining = distance;
        let mut start = match start {
            Some(c) => WalkStart::Cell(c),
            None => WalkStart::Auto,
        };
        for _ in 0..MAX_SHADOW_CROSSINGS {
            if remaining <= 0.0 {
                break;
            }
            let ray = Ray::with_range(origin, wi, 0.0, remaining);
            let m = march(&ray, grid, start);
            throughput *= self.medium_transmittance(&m.medium, m.medium_length());
            let Some(hit) = m.interface else {
                break;
            };
            let theta1 = (-wi).dot(hit.normal).clamp(0.0, 1.0).acos();
            throughput *= Rgb::ONE - self.reflectance(theta1, &hit.from_attrs, &hit.to_attrs);
            if self.band.max(throughput) == 0.0 {
                return Rgb::ZERO;
            }
            let Some(next) = hit.to_cell else {
                break;
            };
            origin = self.snap_to_face(hit.position, hit.normal);
            remaining -= hit.t;
            start = WalkStart::Cell(next);
        }
        throughput * self.band.mask()
    }

    fn occupancy(&self, c: VoxelCoord) -> f64 {
        if !self.scene.grid.in_bounds(c) {
            return 0.0;
        }
        let t = transmissivity(&self.scene.grid.attrs_or_air(c));
        (t[0] + t[1] + t[2]) / 3.0
    }

    fn occupancy_gradient(&self, c: VoxelCoord) -> DVec3 {
        let mut g = DVec3::ZERO;
        for axis in 0..3 {
            let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
            for du in -1..=1 {
                for dv in -1..=1 {
                    let base = c.with_axis(u, c.axis(u) + du).with_axis(v, c.axis(v) + dv);
                    let plus = self.occupancy(base.with_axis(axis, c.axis(axis) + 1));
                    let minus = self.occupancy(base.with_axis(axis, c.axis(axis) - 1));
                    g[axis] += plus - minus;
                }
            }
        }
        g
    }

    /// Normal from the central-difference gradient of mean transmissivity
    /// around the two cells sharing the face, on the face normal's side.
    /// Falls back to the face normal when the gradient is flat or grazing.
    fn smooth_normal(&self, hit: &InterfaceEvent) -> DVec3 {
        let g: DVec3 = [hit.from_cell, hit.to_cell]
            .into_iter()
            .flatten()
            .map(|c| self.occupancy_gradient(c))
            .sum();
        if g.length() < 1e-9 {
            return hit.normal;
        }
        let mut n = -g.normalize();
        if n.dot(hit.normal) < 0.0 {
            n = -n;
        }
        if n.dot(hit.normal) < 0.2 {
            return hit.normal;
        }
        n
    }
}

/// Radiance along one ray starting outside or inside the grid at depth
/// `depth`. With `spectral_split` each channel follows its own path, drawing
/// from the same stream in channel order.
pub fn trace<R: Rng + ?Sized>(scene: &Scene, ray: &Ray, depth: u32, rng: &mut R) -> Rgb {
    if scene.params.spectral_split {
        (0..3)
            .map(|c| {
                Tracer::new(scene, Band::channel(c)).radiance(ray, WalkStart::Auto, depth, rng)
            })
            .sum()
    } else {
        Tracer::new(scene, Band::RGB).radiance(ray, WalkStart::Auto, depth, rng)
    }
}

/// Direct light at a surface point with the given normal and attributes.
/// Shadow rays start from the cell just off the surface along `normal`.
pub fn direct_light(scene: &Scene, point: DVec3, normal: DVec3, attrs: &VoxelAttributes) -> Rgb {
    let s = scene.grid.voxel_size();
    let probe = cell_of(point + normal * (1e-6 * s), s);
    let start = scene.grid.in_bounds(probe).then_some(probe);
    Tracer::new(scene, Band::RGB).direct_light_from(point, normal, attrs, start)
}
