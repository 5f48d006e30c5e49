//! Seeded sampling helpers shared by witness generation, verification sweeps
//! and experiment generators. Everything runs on ChaCha8 so streams are
//! identical across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::vector::Vector;

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for sub-task `index` of a seeded run.
pub fn substream(seed: u64, index: u64) -> LabRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn gaussian(rng: &mut LabRng, dim: usize) -> Vector {
    Vector::from_fn(dim, |_| rng.sample::<f64, _>(StandardNormal))
}

pub fn unit_sphere(rng: &mut LabRng, dim: usize) -> Vector {
    loop {
        if let Some(u) = gaussian(rng, dim).normalized() {
            return u;
        }
    }
}

/// Uniform sample from the closed ball of `radius` around `center`.
pub fn in_ball(rng: &mut LabRng, center: &Vector, radius: f64) -> Vector {
    let d = center.dim();
    let u = unit_sphere(rng, d);
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    center.axpy(r, &u)
}

/// Uniform sample from the cube `[-half_width, half_width]^dim`.
pub fn in_cube(rng: &mut LabRng, dim: usize, half_width: f64) -> Vector {
    Vector::from_fn(dim, |_| rng.random_range(-half_width..=half_width))
}
