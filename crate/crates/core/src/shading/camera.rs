use glam::DVec3;

use crate::traversal::Ray;

/// Pinhole camera. Pixel rows run top to bottom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    pub position: DVec3,
    pub look_at: DVec3,
    pub up: DVec3,
    /// Vertical field of view in degrees, in `(0, 180)`.
    pub vertical_fov: f64,
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct CameraBasis {
    position: DVec3,
    forward: DVec3,
    right: DVec3,
    up: DVec3,
    half_height: f64,
    half_width: f64,
    width: f64,
    height: f64,
}

impl Camera {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.vertical_fov > 0.0 && self.vertical_fov < 180.0) {
            return Err(format!(
                "vertical fov {} not in (0, 180)",
                self.vertical_fov
            ));
        }
        if self.width == 0 || self.height == 0 {
            return Err("image dimensions must be positive".into());
        }
        if ![self.position, self.look_at, self.up]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err("camera vectors must be finite".into());
        }
        if (self.up.length() - 1.0).abs() > 1e-6 {
            return Err(format!(
                "up vector has length {}, expected 1",
                self.up.length()
            ));
        }
        let forward = self.look_at - self.position;
        if forward.length() == 0.0 {
            return Err("look_at coincides with position".into());
        }
        if forward.normalize().cross(self.up).length() < 1e-9 {
            return Err("up is parallel to the viewing direction".into());
        }
        Ok(())
    }

    pub(crate) fn basis(&self) -> CameraBasis {
        let forward = (self.look_at - self.position).normalize();
        let right = forward.cross(self.up).normalize();
        let up = right.cross(forward);
        let half_height = (self.vertical_fov.to_radians() * 0.5).tan();
        CameraBasis {
            position: self.position,
            forward,
            right,
            up,
            half_height,
            half_width: half_height * self.width as f64 / self.height as f64,
            width: self.width as f64,
            height: self.height as f64,
        }
    }

    /// Primary ray through image position `(px + u, py + v)`, with `u, v` the
    /// sub-pixel offsets in `[0, 1)`.
    pub fn ray(&self, px: u32, py: u32, u: f64, v: f64) -> Ray {
        self.basis().ray(px, py, u, v)
    }

    /// Continuous image position `(x, y)` of a world point, or `None` when it
    /// lies behind the camera.
    pub fn project(&self, point: DVec3) -> Option<(f64, f64)> {
        let b = self.basis();
        let rel = point - b.position;
        let depth = rel.dot(b.forward);
        if depth <= 0.0 {
            return None;
        }
        let sx = rel.dot(b.right) / (depth * b.half_width);
        let sy = rel.dot(b.up) / (depth * b.half_height);
        Some(((sx + 1.0) * 0.5 * b.width, (1.0 - sy) * 0.5 * b.height))
    }
}

impl CameraBasis {
    pub(crate) fn ray(&self, px: u32, py: u32, u: f64, v: f64) -> Ray {
        let sx = ((px as f64 + u) / self.width) * 2.0 - 1.0;
        let sy = 1.0 - ((py as f64 + v) / self.height) * 2.0;
        let dir =
            (self.forward + sx * self.half_width * self.right + sy * self.half_height * self.up)
                .normalize();
        Ray::new(self.position, dir)
    }
}
