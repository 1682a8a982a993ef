//! Seeded deterministic low-discrepancy sampling of a closed ball, used for
//! certificate spot checks and constant estimation. Points are addressable
//! by index, so a longer run extends a shorter one (nested prefixes) and
//! sample loops parallelize without coordination.

use nalgebra::DVector;
use statrs::function::erf::erf_inv;

use crate::error::{Error, Result};

/// Points with norm at or below this are nudged outward so ratios of the
/// form V(f(x))/V(x) stay well defined.
pub const ORIGIN_EXCLUSION: f64 = 1e-12;

/// Index-addressable low-discrepancy sampler of the closed ball of a given
/// radius, excluding a tiny ball at the origin.
#[derive(Debug, Clone)]
pub struct BallSampler {
    dim: usize,
    radius: f64,
    alphas: Vec<f64>,
    offsets: Vec<f64>,
}

fn fract(x: f64) -> f64 {
    x - x.floor()
}

/// SplitMix64, used only to scramble (seed, axis) into a phase offset.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl BallSampler {
    pub fn new(dim: usize, radius: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("sampler dimension must be positive".into()));
        }
        if !radius.is_finite() || radius <= 2.0 * ORIGIN_EXCLUSION {
            return Err(Error::Config(format!(
                "sampling radius must exceed {:.0e}, got {radius}",
                2.0 * ORIGIN_EXCLUSION
            )));
        }
        let coords = match dim {
            1 => 1,
            2 => 2,
            n => n + 1,
        };
        // Kronecker sequence directions from the generalized golden ratio:
        // phi_d is the unique positive root of x^(d+1) = x + 1.
        let mut phi = 1.5f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (coords as f64 + 1.0));
        }
        let mut alphas = Vec::with_capacity(coords);
        let mut inv = 1.0;
        for _ in 0..coords {
            inv /= phi;
            alphas.push(fract(inv));
        }
        let offsets = (0..coords)
            .map(|j| {
                let bits = splitmix64(seed ^ splitmix64(j as u64 + 1));
                bits as f64 / 2f64.powi(64)
            })
            .collect();
        Ok(Self {
            dim,
            radius,
            alphas,
            offsets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn unit_coord(&self, i: usize, axis: usize) -> f64 {
        fract(self.offsets[axis] + (i as f64 + 1.0) * self.alphas[axis])
    }

    /// The i-th sample point; O(dim) and independent of all other indices.
    pub fn get(&self, i: usize) -> DVector<f64> {
        let min_norm = 2.0 * ORIGIN_EXCLUSION;
        match self.dim {
            1 => {
                let s = 2.0 * self.unit_coord(i, 0) - 1.0;
                let mut x = self.radius * s;
                if x.abs() < min_norm {
                    x = if x < 0.0 { -min_norm } else { min_norm };
                }
                DVector::from_vec(vec![x])
            }
            2 => {
                let theta = std::f64::consts::TAU * self.unit_coord(i, 0);
                let r = (self.radius * self.unit_coord(i, 1).sqrt()).max(min_norm);
                DVector::from_vec(vec![r * theta.cos(), r * theta.sin()])
            }
            n => {
                let mut z = DVector::zeros(n);
                for j in 0..n {
                    let u = self.unit_coord(i, j).clamp(1e-15, 1.0 - 1e-15);
                    z[j] = std::f64::consts::SQRT_2 * erf_inv(2.0 * u - 1.0);
                }
                let norm = z.norm();
                if norm < 1e-300 {
                    z[0] = 1.0;
                } else {
                    z /= norm;
                }
                let r = (self.radius * self.unit_coord(i, n).powf(1.0 / n as f64)).max(min_norm);
                z * r
            }
        }
    }
}
