//! The three norms used for gradient scores and additive noise, and an exact
//! sampler for K-norm noise with density proportional to `exp(-rate * ‖b‖)`.
//!
//! The sampler draws a radius from `Gamma(shape = d, rate)` and a direction
//! from the cone measure of the unit sphere of the chosen norm. For the
//! ℓ1, ℓ2 and ℓ∞ unit spheres the cone measure has a simple description:
//!
//! - ℓ1: normalized vector of i.i.d. exponentials with random signs,
//! - ℓ2: normalized standard Gaussian vector,
//! - ℓ∞: one of the `2d` faces chosen uniformly, remaining coordinates
//!   uniform on `[-1, 1]`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Selector for the ℓ1, ℓ2 or ℓ∞ norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

    /// Evaluates the norm without argument checks. Empty input yields 0.
    #[inline]
    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `sup { ‖x‖ : ‖x‖∞ ≤ 1 }` in dimension `dim`.
    pub fn max_over_unit_box(self, dim: usize) -> f64 {
        match self {
            NormKind::L1 => dim as f64,
            NormKind::L2 => (dim as f64).sqrt(),
            NormKind::LInf => 1.0,
        }
    }

    /// `sup { ‖u‖ : ‖u‖₂ ≤ 1 }` in dimension `dim`.
    pub fn max_over_unit_euclidean_ball(self, dim: usize) -> f64 {
        match self {
            NormKind::L1 => (dim as f64).sqrt(),
            NormKind::L2 | NormKind::LInf => 1.0,
        }
    }

    /// `sup { ‖x‖₂ : ‖x‖ ≤ 1 }` in dimension `dim`.
    pub fn euclidean_radius_of_unit_ball(self, dim: usize) -> f64 {
        match self {
            NormKind::L1 | NormKind::L2 => 1.0,
            NormKind::LInf => (dim as f64).sqrt(),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" | "l-inf" | "inf" => Ok(NormKind::LInf),
            other => Err(invalid(format!("unknown norm '{other}' (expected l1, l2 or linf)"))),
        }
    }
}

/// Evaluates `‖v‖` under `kind`.
pub fn norm(v: &[f64], kind: NormKind) -> Result<f64> {
    if v.is_empty() {
        return Err(invalid("norm of an empty vector"));
    }
    Ok(kind.eval(v))
}

/// Parameters of the K-norm noise distribution `exp(-rate * ‖b‖)` on ℝ^dim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KNormNoiseParams {
    dim: usize,
    kind: NormKind,
    rate: f64,
}

impl KNormNoiseParams {
    pub fn new(dim: usize, kind: NormKind, rate: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("K-norm noise dimension must be at least 1"));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid(format!("K-norm noise rate must be positive and finite, got {rate}")));
        }
        Ok(Self { dim, kind, rate })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Draws one K-norm noise vector.
pub fn sample_knorm_noise<R: Rng + ?Sized>(params: &KNormNoiseParams, rng: &mut R) -> Vec<f64> {
    let radius = sample_gamma_integer_shape(params.dim, params.rate, rng);
    let mut b = sample_cone_direction(params.dim, params.kind, rng);
    for x in &mut b {
        *x *= radius;
    }
    b
}

/// `Gamma(shape, rate)` for integer shape, as a sum of `shape` unit exponentials.
pub fn sample_gamma_integer_shape<R: Rng + ?Sized>(shape: usize, rate: f64, rng: &mut R) -> f64 {
    let sum: f64 = (0..shape).map(|_| standard_exponential(rng)).sum();
    sum / rate
}

#[inline]
fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1], so the logarithm is finite.
    -(1.0 - rng.random::<f64>()).ln()
}

#[inline]
fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// A point on the unit sphere of `kind`, distributed by the cone measure.
pub fn sample_cone_direction<R: Rng + ?Sized>(dim: usize, kind: NormKind, rng: &mut R) -> Vec<f64> {
    match kind {
        NormKind::L1 => {
            let mut u: Vec<f64> = (0..dim).map(|_| standard_exponential(rng)).collect();
            let total: f64 = u.iter().sum();
            for x in &mut u {
                *x = random_sign(rng) * *x / total;
            }
            u
        }
        NormKind::L2 => loop {
            let mut u: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let len = NormKind::L2.eval(&u);
            if len > 0.0 {
                for x in &mut u {
                    *x /= len;
                }
                break u;
            }
        },
        NormKind::LInf => {
            let face = rng.random_range(0..dim);
            let sign = random_sign(rng);
            (0..dim).map(|j| if j == face { sign } else { rng.random_range(-1.0..=1.0) }).collect()
        }
    }
}
