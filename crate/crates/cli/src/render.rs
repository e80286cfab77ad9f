//! Binary PPM point clouds.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("bounds have zero area")]
    EmptyBounds,
    #[error("image size {0}x{1} is empty")]
    EmptyImage(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Bounds {
    pub fn square(r: f64) -> Self {
        Self { x: [-r, r], y: [-r, r] }
    }
}

/// White image with the points in black. Row 0 is the top (largest `Y`);
/// points outside the bounds are dropped.
pub fn render_ppm(points: &[(f64, f64)], b: &Bounds, width: usize, height: usize) -> Result<Vec<u8>, RenderError> {
    if width == 0 || height == 0 {
        return Err(RenderError::EmptyImage(width, height));
    }
    let (dx, dy) = (b.x[1] - b.x[0], b.y[1] - b.y[0]);
    if !points.is_empty() && !(dx > 0.0 && dy > 0.0) {
        return Err(RenderError::EmptyBounds);
    }
    let header = format!("P6\n{width} {height}\n255\n");
    let mut out = header.into_bytes();
    let start = out.len();
    out.resize(start + 3 * width * height, 255);
    for &(x, y) in points {
        let u = (x - b.x[0]) / dx;
        let v = (b.y[1] - y) / dy;
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            continue;
        }
        let col = ((u * width as f64) as usize).min(width - 1);
        let row = ((v * height as f64) as usize).min(height - 1);
        let k = start + 3 * (row * width + col);
        out[k..k + 3].fill(0);
    }
    Ok(out)
}
