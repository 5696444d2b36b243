use rand::Rng;

use super::camera::CameraBasis;
use super::sampling::sample_stream;
use super::scene::Scene;
use super::tracer::{Band, Tracer};
use super::Rgb;
use crate::traversal::WalkStart;

/// Linear HDR radiance image, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Framebuffer {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<Rgb>,
}

impl Framebuffer {
    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        self.pixels[(y * self.width + x) as usize]
    }

    /// Mean radiance over the half-open pixel rectangle `[x0, x1) × [y0, y1)`.
    pub fn mean(&self, x0: u32, y0: u32, x1: u32, y1: u32) -> Rgb {
        let mut sum = Rgb::ZERO;
        for y in y0..y1 {
            for x in x0..x1 {
                sum += self.pixel(x, y);
            }
        }
        sum / ((x1 - x0) * (y1 - y0)) as f64
    }

    pub fn is_valid(&self) -> bool {
        self.pixels.len() == (self.width * self.height) as usize
            && self
                .pixels
                .iter()
                .all(|p| p.is_finite() && p.min_element() >= 0.0)
    }
}

struct PixelRenderer<'a> {
    scene: &'a Scene,
    basis: CameraBasis,
    rgb: Tracer<'a>,
    channels: [Tracer<'a>; 3],
}

impl<'a> PixelRenderer<'a> {
    fn new(scene: &'a Scene) -> Self {
        Self {
            scene,
            basis: scene.camera.basis(),
            rgb: Tracer::new(scene, Band::RGB),
            channels: std::array::from_fn(|c| Tracer::new(scene, Band::channel(c))),
        }
    }

    /// Sample `s` of a pixel draws its sub-pixel jitter and (for RGB paths)
    /// its path decisions from stream `(seed, pixel, s, 0)`; split channel
    /// `c` traces from stream `(seed, pixel, s, c + 1)`.
    fn pixel(&self, x: u32, y: u32) -> Rgb {
        let params = &self.scene.params;
        let pixel_index = y as u64 * self.scene.camera.width as u64 + x as u64;
        let mut sum = Rgb::ZERO;
        for s in 0..params.samples_per_pixel as u64 {
            let mut rng = sample_stream(params.rng_seed, pixel_index, s, 0);
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            let ray = self.basis.ray(x, y, u, v);
            if params.spectral_split {
                for (c, tracer) in self.channels.iter().enumerate() {
                    let mut lane = sample_stream(params.rng_seed, pixel_index, s, c as u64 + 1);
                    sum[c] += tracer.radiance(&ray, WalkStart::Auto, 0, &mut lane)[c];
                }
            } else {
                sum += self.rgb.radiance(&ray, WalkStart::Auto, 0, &mut rng);
            }
        }
        sum / params.samples_per_pixel as f64
    }

    fn row(&self, y: u32, out: &mut [Rgb]) {
        for (x, px) in out.iter_mut().enumerate() {
            *px = self.pixel(x as u32, y);
        }
    }
}

/// Worker count used by [`render`].
pub fn default_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Renders with the default number of workers.
pub fn render(scene: &Scene) -> Framebuffer {
    render_with_workers(scene, default_workers())
}

/// Renders with `workers` threads (one means sequential). Every sample owns
/// its random stream, so the output does not depend on `workers`.
pub fn render_with_workers(scene: &Scene, workers: usize) -> Framebuffer {
    let (width, height) = (scene.camera.width, scene.camera.height);
    let mut pixels = vec![Rgb::ZERO; width as usize * height as usize];
    let renderer = PixelRenderer::new(scene);
    fill_rows(&renderer, &mut pixels, width as usize, workers);
    let fb = Framebuffer {
        width,
        height,
        pixels,
    };
    debug_assert!(fb.is_valid());
    fb
}

fn fill_rows_sequential(renderer: &PixelRenderer<'_>, pixels: &mut [Rgb], width: usize) {
    for (y, row) in pixels.chunks_mut(width).enumerate() {
        renderer.row(y as u32, row);
    }
}

#[cfg(feature = "parallel")]
fn fill_rows(renderer: &PixelRenderer<'_>, pixels: &mut [Rgb], width: usize, workers: usize) {
    use rayon::prelude::*;
    if workers <= 1 {
        return fill_rows_sequential(renderer, pixels, width);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        pixels
            .par_chunks_mut(width)
            .enumerate()
            .for_each(|(y, row)| renderer.row(y as u32, row));
    });
}

#[cfg(not(feature = "parallel"))]
fn fill_rows(renderer: &PixelRenderer<'_>, pixels: &mut [Rgb], width: usize, _workers: usize) {
    fill_rows_sequential(renderer, pixels, width);
}
