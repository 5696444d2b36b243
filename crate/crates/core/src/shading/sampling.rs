//! Direction sampling and per-sample random streams.

use std::f64::consts::TAU;

use glam::DVec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::optics::ScatterLobe;

/// Random stream owned by one `(seed, pixel, sample, lane)` tuple. The tuple
/// is the ChaCha key, so streams never depend on scheduling order.
pub fn sample_stream(seed: u64, pixel_index: u64, sample_index: u64, lane: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key
        .chunks_exact_mut(8)
        .zip([seed, pixel_index, sample_index, lane])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Unit vector from spherical coordinates around `axis`.
fn around(axis: DVec3, cos_theta: f64, phi: f64) -> DVec3 {
    let (t1, t2) = axis.any_orthonormal_pair();
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    (t1 * (sin_theta * phi.cos()) + t2 * (sin_theta * phi.sin()) + axis * cos_theta).normalize()
}

/// Cosine-weighted direction in the hemisphere around `normal`.
pub fn cosine_hemisphere<R: Rng + ?Sized>(normal: DVec3, rng: &mut R) -> DVec3 {
    let u: f64 = rng.random();
    let phi = TAU * rng.random::<f64>();
    around(normal, (1.0 - u).sqrt(), phi)
}

/// Direction from a normalized Phong lobe `cos^n(alpha)` around `axis`.
pub fn phong_lobe<R: Rng + ?Sized>(axis: DVec3, exponent: f64, rng: &mut R) -> DVec3 {
    let u: f64 = rng.random();
    let phi = TAU * rng.random::<f64>();
    around(axis, (1.0 - u).powf((exponent + 1.0).recip()), phi)
}

const MAX_REJECTIONS: usize = 64;

/// Perturbs the specular direction `base_dir` according to the diffuseness
/// lobe. With probability `lambert_weight` the result is cosine-distributed
/// about the surface normal on the side of `base_dir`; otherwise it is drawn
/// from the Phong lobe about `base_dir`, redrawn if it crosses the surface.
/// A delta lobe returns `base_dir` unchanged.
pub fn sample_scatter<R: Rng + ?Sized>(
    incident_dir: DVec3,
    normal: DVec3,
    base_dir: DVec3,
    lobe: &ScatterLobe,
    rng: &mut R,
) -> DVec3 {
    if lobe.is_delta() {
        return base_dir;
    }
    let side = base_dir.dot(normal);
    let hemisphere = if side > 0.0 || (side == 0.0 && incident_dir.dot(normal) < 0.0) {
        normal
    } else {
        -normal
    };
    if rng.random::<f64>() < lobe.lambert_weight {
        return cosine_hemisphere(hemisphere, rng);
    }
    for _ in 0..MAX_REJECTIONS {
        let dir = phong_lobe(base_dir, lobe.phong_exponent, rng);
        if dir.dot(hemisphere) > 0.0 {
            return dir;
        }
    }
    base_dir
}
