//! Synthetic test images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::Image;

fn build(w: usize, h: usize, max: u32, f: impl Fn(usize, usize) -> u32) -> Image {
    let px = (0..w * h).map(|k| f(k % w, k / w)).collect();
    Image::from_integer(w, h, max, px).expect("synthetic image is valid")
}

pub fn constant(w: usize, h: usize, level: u32) -> Image {
    build(w, h, level.max(1), |_, _| level)
}

/// Squares of side `cell` alternating between 0 and `level`.
pub fn checkerboard(w: usize, h: usize, cell: usize, level: u32) -> Image {
    let cell = cell.max(1);
    build(w, h, level.max(1), |i, j| if (i / cell + j / cell).is_multiple_of(2) { level } else { 0 })
}

/// Uniform grey levels in `0..=255`.
pub fn random_grey(w: usize, h: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let px = (0..w * h).map(|_| rng.gen_range(0..=255)).collect();
    Image::from_integer(w, h, 255, px).expect("valid")
}

/// Pixels in `{0, 255}`, each set with probability `density`.
pub fn random_binary(w: usize, h: usize, density: f64, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let px = (0..w * h).map(|_| if rng.gen_bool(density) { 255 } else { 0 }).collect();
    Image::from_integer(w, h, 255, px).expect("valid")
}

/// Gaussian blob `(centre x, centre y, sigma, amplitude)` on `[−1, 1]²`.
pub type Blob = (f64, f64, f64, f64);

/// Three blobs that round to zero at the frame.
pub const INTERIOR_BLOBS: [Blob; 3] = [(-0.3, -0.25, 0.16, 1.0), (0.35, 0.05, 0.13, 0.8), (-0.05, 0.35, 0.18, 0.6)];

/// Three wider blobs, about 11% of peak at the frame.
pub const WIDE_BLOBS: [Blob; 3] = [(-0.35, -0.3, 0.25, 1.0), (0.4, 0.1, 0.18, 0.8), (-0.05, 0.45, 0.3, 0.6)];

/// Sum of [`INTERIOR_BLOBS`], scaled into `0..=255`.
pub fn gaussian_blobs(n: usize) -> Image {
    gaussian_blobs_from(n, &INTERIOR_BLOBS)
}

pub fn gaussian_blobs_from(n: usize, blobs: &[Blob]) -> Image {
    let field = |i: usize, j: usize| {
        let x = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
        let y = 2.0 * j as f64 / (n - 1) as f64 - 1.0;
        blobs
            .iter()
            .map(|&(cx, cy, s, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
            .sum::<f64>()
    };
    let peak = (0..n * n).map(|k| field(k % n, k / n)).fold(0.0, f64::max);
    build(n, n, 255, |i, j| (255.0 * field(i, j) / peak).round() as u32)
}

/// A block letter "E" tilted slightly, in `{0, 255}`.
pub fn glyph(n: usize) -> Image {
    let inside = |x: f64, y: f64| {
        let stem = (-0.55..=-0.25).contains(&x) && (-0.7..=0.7).contains(&y);
        let bar = |yc: f64, len: f64| (-0.55..=len).contains(&x) && (y - yc).abs() <= 0.12;
        stem || bar(-0.58, 0.55) || bar(0.0, 0.35) || bar(0.58, 0.55)
    };
    let (s, c) = 0.12f64.sin_cos();
    build(n, n, 255, |i, j| {
        let x = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
        let y = 2.0 * j as f64 / (n - 1) as f64 - 1.0;
        if inside(c * x + s * y, -s * x + c * y) { 255 } else { 0 }
    })
}
