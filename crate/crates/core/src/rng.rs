//! Seeded generators. Sample `i` of a run seeded with `s` always draws from
//! stream `i` of a ChaCha generator keyed by `s`, so results do not depend on
//! how samples are spread over worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{SpElement, Vec3};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(normal(rng), normal(rng), normal(rng))
}

/// Uniform point on the unit sphere.
pub fn unit_vec3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = normal_vec3(rng);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Uniform unit vector orthogonal to the unit vector `a`.
pub fn unit_orthogonal_to<R: Rng + ?Sized>(rng: &mut R, a: &Vec3) -> Vec3 {
    loop {
        let v = normal_vec3(rng);
        let p = v - a * a.dot(&v);
        let n = p.norm();
        if n > 1e-6 {
            return p / n;
        }
    }
}

/// Gaussian element of `m`.
pub fn normal_m<R: Rng + ?Sized>(rng: &mut R) -> SpElement {
    SpElement::m(normal_vec3(rng), normal_vec3(rng), normal_vec3(rng))
}

/// Gaussian element of sp(2).
pub fn normal_element<R: Rng + ?Sized>(rng: &mut R) -> SpElement {
    let mut x = normal_m(rng);
    x.lambda = normal(rng);
    x
}
