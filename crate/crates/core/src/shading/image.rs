//! Display encoding: tone mapping to 8-bit sRGB-like values and binary PPM.

use super::render::Framebuffer;

pub const DEFAULT_DISPLAY_GAMMA: f64 = 2.2;

/// Interleaved 8-bit RGB image, rows top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image8 {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

/// Clamp to `[0, 1]`, apply `1 / display_gamma`, round half up to `0..=255`.
pub fn quantize(value: f64, display_gamma: f64) -> u8 {
    assert!(
        value.is_finite() && value >= 0.0,
        "invalid radiance {value}"
    );
    let v = value.clamp(0.0, 1.0).powf(display_gamma.recip());
    (255.0 * v + 0.5).floor() as u8
}

pub fn tone_map(fb: &Framebuffer, display_gamma: f64) -> Image8 {
    let data = fb
        .pixels
        .iter()
        .flat_map(|p| p.to_array())
        .map(|v| quantize(v, display_gamma))
        .collect();
    Image8 {
        width: fb.width,
        height: fb.height,
        data,
    }
}

impl Image8 {
    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y * self.width + x) as usize;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Binary `P6` encoding with maxval 255.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    /// Reads back a binary PPM written by [`Image8::to_ppm`] or any `P6` file
    /// with maxval 255 and no comments.
    pub fn from_ppm(bytes: &[u8]) -> Option<Image8> {
        let mut fields = Vec::with_capacity(4);
        let mut pos = 0;
        while fields.len() < 4 {
            while bytes.get(pos)?.is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while !bytes.get(pos)?.is_ascii_whitespace() {
                pos += 1;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
        }
        pos += 1;
        if fields[0] != "P6" || fields[3] != "255" {
            return None;
        }
        let width: u32 = fields[1].parse().ok()?;
        let height: u32 = fields[2].parse().ok()?;
        let data = bytes.get(pos..)?.to_vec();
        (data.len() == 3 * (width * height) as usize).then_some(Image8 {
            width,
            height,
            data,
        })
    }
}
