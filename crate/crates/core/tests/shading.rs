use std::time::Instant;

use glam::DVec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use voxelight::optics::MappingConfig;
use voxelight::scenegen::{demo_scene, rasterize, Primitive, Shape};
use voxelight::shading::{
    direct_light, render, render_with_workers, trace, Camera, Light, RenderParams, Rgb, Scene,
    LUMINANCE,
};
use voxelight::traversal::Ray;
use voxelight::{material_preset, GridDims, VoxelAttributes, VoxelCoord, VoxelGrid};

fn preset(name: &str) -> VoxelAttributes {
    material_preset(name).unwrap()
}

fn camera(position: DVec3, look_at: DVec3, fov: f64, size: u32) -> Camera {
    Camera {
        position,
        look_at,
        up: DVec3::Y,
        vertical_fov: fov,
        width: size,
        height: size,
    }
}

fn scene(grid: VoxelGrid, lights: Vec<Light>, background: Rgb, camera: Camera) -> Scene {
    Scene {
        grid,
        lights,
        camera,
        background,
        params: RenderParams::default(),
        mapping: MappingConfig::default(),
    }
}

fn white_point(position: DVec3) -> Light {
    Light::Point {
        position,
        rgb: Rgb::ONE,
    }
}

fn random_dir(rng: &mut ChaCha8Rng) -> DVec3 {
    loop {
        let v = DVec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.length() > 0.1 && v.length() <= 1.0 {
            return v.normalize();
        }
    }
}

fn luminance(c: Rgb) -> f64 {
    LUMINANCE[0] * c.x + LUMINANCE[1] * c.y + LUMINANCE[2] * c.z
}

#[test]
fn air_grid_shows_background() {
    let grid = VoxelGrid::new(GridDims::cube(16), 1.0).unwrap();
    let cam = camera(DVec3::new(8.0, 8.0, 40.0), DVec3::splat(8.0), 40.0, 8);
    let s = scene(grid, vec![white_point(DVec3::splat(4.0))], Rgb::ONE, cam);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let origin = DVec3::new(
            rng.random_range(-8.0..24.0),
            rng.random_range(-8.0..24.0),
            rng.random_range(-8.0..24.0),
        );
        let dir = random_dir(&mut rng);
        assert_eq!(trace(&s, &Ray::new(origin, dir), 0, &mut rng), Rgb::ONE);
    }

    let mut grey = s.clone();
    grey.background = Rgb::splat(0.5);
    let fb = render(&grey);
    assert!(fb.pixels.iter().all(|&p| p == Rgb::splat(0.5)));
}

#[test]
fn mirror_reflects_everything() {
    let mut grid = VoxelGrid::new(GridDims::cube(16), 1.0).unwrap();
    rasterize(
        &Primitive::new(
            Shape::Slab {
                axis: 1,
                min: 0.0,
                max: 4.0,
            },
            preset("mirror"),
        ),
        &mut grid,
    );
    let background = Rgb::new(0.3, 0.6, 0.9);
    let cam = camera(DVec3::new(8.0, 12.0, 30.0), DVec3::splat(8.0), 40.0, 8);
    let s = scene(
        grid,
        vec![white_point(DVec3::new(8.0, 14.0, 8.0))],
        background,
        cam,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100 {
        // 30 degree incidence on the top face of the mirror
        let phi = i as f64 * 0.0628;
        let dir = DVec3::new(0.5 * phi.cos(), -(3f64.sqrt() / 2.0), 0.5 * phi.sin());
        let origin = DVec3::new(8.0, 4.0, 8.0) - 6.0 * dir;
        let l = trace(&s, &Ray::new(origin, dir), 0, &mut rng);
        for c in 0..3 {
            assert!(l[c] >= 0.999 * background[c], "{l}");
        }
    }
}

#[test]
fn direct_light_on_red_shirt() {
    let red = preset("red_shirt");
    let grid = VoxelGrid::new(GridDims::cube(8), 1.0).unwrap();
    let cam = camera(DVec3::new(4.0, 4.0, 20.0), DVec3::splat(4.0), 40.0, 4);
    let s = scene(
        grid,
        vec![white_point(DVec3::new(4.0, 8.0, 7.0))],
        Rgb::ZERO,
        cam,
    );
    let point = DVec3::new(4.0, 4.0, 4.0);
    let normal = DVec3::Y;
    let l = direct_light(&s, point, normal, &red);
    let cos = (DVec3::new(0.0, 4.0, 3.0) / 5.0).dot(normal);
    assert!((l.x - 0.8f32 as f64 * cos).abs() < 1e-12, "{l}");
    assert_eq!((l.y, l.z), (0.0, 0.0));
}

#[test]
fn mirror_slab_blocks_light() {
    let mut grid = VoxelGrid::new(GridDims::cube(8), 1.0).unwrap();
    for x in 0..8 {
        for z in 0..8 {
            grid.set(VoxelCoord::new(x, 6, z), preset("mirror"))
                .unwrap();
        }
    }
    let cam = camera(DVec3::new(4.0, 4.0, 20.0), DVec3::splat(4.0), 40.0, 4);
    let s = scene(
        grid,
        vec![white_point(DVec3::new(4.0, 12.0, 4.0))],
        Rgb::ZERO,
        cam,
    );
    let l = direct_light(
        &s,
        DVec3::new(4.0, 1.0, 4.0),
        DVec3::Y,
        &preset("white_shirt"),
    );
    assert_eq!(l, Rgb::ZERO);
}

#[test]
fn ambient_ignores_normal() {
    let grid = VoxelGrid::new(GridDims::cube(8), 1.0).unwrap();
    let cam = camera(DVec3::new(4.0, 4.0, 20.0), DVec3::splat(4.0), 40.0, 4);
    let ambient = Light::Ambient {
        rgb: Rgb::new(0.2, 0.3, 0.4),
    };
    let s = scene(grid, vec![ambient], Rgb::ZERO, cam);
    let attrs = preset("color_shirt");
    let point = DVec3::splat(4.0);
    let reference = direct_light(&s, point, DVec3::Y, &attrs);
    assert!(reference.x > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = random_dir(&mut rng);
        assert_eq!(direct_light(&s, point, n, &attrs), reference);
    }
}

#[test]
fn same_seed_same_framebuffer() {
    let demo = demo_scene("glass_sphere").unwrap();
    let mut cfg = demo.configs[0].1.clone();
    cfg.camera.width = 24;
    cfg.camera.height = 24;
    let s = cfg.to_scene(demo.grid).unwrap();
    let a = render(&s);
    assert_eq!(a, render(&s));
    let mut reseeded = s.clone();
    reseeded.params.rng_seed = 99;
    assert_ne!(a, render(&reseeded));
}

#[test]
fn radiance_stays_below_light_budget() {
    // open scene: a lit floor, a glass ball and a frosted block under a sky
    let mut grid = VoxelGrid::new(GridDims::cube(32), 1.0).unwrap();
    for p in [
        Primitive::new(
            Shape::CheckerFloor {
                thickness: 2,
                tile: 4,
                other: preset("dark_shirt"),
            },
            preset("white_shirt"),
        ),
        Primitive::new(
            Shape::Sphere {
                center: DVec3::new(12.0, 10.0, 16.0),
                radius: 6.0,
            },
            preset("glass"),
        ),
        Primitive::new(
            Shape::Box {
                min: DVec3::new(20.0, 2.0, 12.0),
                max: DVec3::new(28.0, 10.0, 20.0),
            },
            preset("frosted_glass"),
        ),
    ] {
        rasterize(&p, &mut grid);
    }
    let lights = vec![
        white_point(DVec3::new(16.0, 40.0, 30.0)),
        Light::Ambient {
            rgb: Rgb::splat(0.1),
        },
    ];
    let background = Rgb::splat(0.2);
    let budget = Rgb::splat(1.0 + 0.1 + 0.2);
    let cam = camera(
        DVec3::new(16.0, 24.0, 60.0),
        DVec3::new(16.0, 8.0, 16.0),
        40.0,
        32,
    );
    let fb = render(&scene(grid, lights, background, cam));
    assert!(fb.is_valid());
    for p in &fb.pixels {
        assert!(p.cmple(budget).all(), "{p}");
    }
}

#[test]
fn red_changes_leave_green_and_blue_alone() {
    let demo = demo_scene("glass_sphere").unwrap();
    let mut cfg = demo.configs[0].1.clone();
    cfg.camera.width = 32;
    cfg.camera.height = 32;
    cfg.render.spectral_split = true;
    let base = cfg.to_scene(demo.grid.clone()).unwrap();

    let mut tinted = demo.grid.clone();
    let glass = preset("glass");
    let red_glass = VoxelAttributes {
        r_t: 0.6,
        r_a: 0.5,
        ..glass
    };
    let cells: Vec<_> = tinted
        .iter()
        .filter(|(_, a)| *a == glass)
        .map(|(c, _)| c)
        .collect();
    assert!(!cells.is_empty());
    for c in cells {
        tinted.set(c, red_glass).unwrap();
    }
    let a = render(&base);
    let b = render(&cfg.to_scene(tinted).unwrap());
    let mut red_differs = false;
    for (p, q) in a.pixels.iter().zip(&b.pixels) {
        assert_eq!(
            (p.y.to_bits(), p.z.to_bits()),
            (q.y.to_bits(), q.z.to_bits())
        );
        red_differs |= p.x != q.x;
    }
    assert!(red_differs);
}

#[test]
fn swapping_light_and_camera_keeps_luminance() {
    let mut grid = VoxelGrid::new(GridDims::new(32, 8, 32), 1.0).unwrap();
    rasterize(
        &Primitive::new(
            Shape::Slab {
                axis: 1,
                min: 0.0,
                max: 2.0,
            },
            preset("white_shirt"),
        ),
        &mut grid,
    );
    let target = DVec3::new(16.0, 2.0, 16.0);
    // same elevation (40 degrees), different azimuth and distance
    let at = |azimuth: f64, dist: f64| {
        let (e, a) = (40f64.to_radians(), azimuth.to_radians());
        target + dist * DVec3::new(e.cos() * a.cos(), e.sin(), e.cos() * a.sin())
    };
    let (a, b) = (at(20.0, 30.0), at(130.0, 45.0));
    let measure = |eye: DVec3, light: DVec3| {
        let mut s = scene(
            grid.clone(),
            vec![white_point(light)],
            Rgb::ZERO,
            camera(eye, target, 1.0, 4),
        );
        s.params.samples_per_pixel = 256;
        luminance(render_with_workers(&s, 1).mean(1, 1, 3, 3))
    };
    let (forward, swapped) = (measure(a, b), measure(b, a));
    assert!(forward > 0.0);
    assert!(
        (forward - swapped).abs() / forward < 0.05,
        "{forward} vs {swapped}"
    );
}

#[test]
fn large_grid_baseline() {
    let n = 128;
    let mut grid = VoxelGrid::new(GridDims::cube(n), 1.0).unwrap();
    let f = n as f64;
    for p in [
        Primitive::new(
            Shape::CheckerFloor {
                thickness: 4,
                tile: 16,
                other: preset("blue_shirt"),
            },
            preset("white_shirt"),
        ),
        Primitive::new(
            Shape::Box {
                min: DVec3::new(0.0, 4.0, 8.0),
                max: DVec3::new(f, 0.75 * f, 12.0),
            },
            preset("mirror"),
        ),
        Primitive::new(
            Shape::Sphere {
                center: DVec3::new(f / 2.0, 28.0, f / 2.0),
                radius: 20.0,
            },
            preset("glass"),
        ),
    ] {
        rasterize(&p, &mut grid);
    }
    let cam = camera(
        DVec3::new(f / 2.0, 0.6 * f, 1.6 * f),
        DVec3::new(f / 2.0, 28.0, 0.4 * f),
        45.0,
        64,
    );
    let lights = vec![
        white_point(DVec3::new(0.2 * f, 0.9 * f, f)),
        Light::Ambient {
            rgb: Rgb::splat(0.05),
        },
    ];
    let s = scene(grid, lights, Rgb::splat(0.1), cam);
    let start = Instant::now();
    let fb = render_with_workers(&s, 1);
    println!(
        "128^3 grid, 64x64, 16 spp, 1 worker: {:.2}s",
        start.elapsed().as_secs_f64()
    );
    assert!(fb.is_valid());
}
