//! Deterministic point sets on projective space: covering nets for
//! certificates and nested low-discrepancy candidates for cap search.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::geometry::canonicalize_in_place;

/// A finite net of `RP^{d-1}` with a proven covering radius.
///
/// * `d = 2`: `m` angles `(j + ½)·π/m`, covering radius `π/(2m)`.
/// * `d ≥ 3`: cell centers of an `m^{d-1}` grid on each of the `d` positive
///   faces of the cube `[-1, 1]^d`, pushed to the sphere. Central projection
///   from a face plane (at distance 1 from the origin) to the sphere does not
///   increase lengths, so the covering radius is at most the half diagonal
///   of a cell, `√(d−1)/m`. Negative faces are antipodes and are skipped.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ProjectiveNet {
    Circle { m: usize },
    Cube { dim: usize, m: usize, per_face: usize },
}

impl ProjectiveNet {
    /// The smallest net of its family with covering radius `≤ density`.
    pub(crate) fn with_density(dim: usize, density: f64) -> Result<Self> {
        if !(density.is_finite() && density > 0.0) {
            return Err(Error::BadTolerance(format!(
                "net density must be positive, got {density}"
            )));
        }
        if dim == 2 {
            let m = (PI / (2.0 * density)).ceil().max(1.0);
            if m > usize::MAX as f64 / 2.0 {
                return Err(Error::BadTolerance("net too large".into()));
            }
            return Ok(ProjectiveNet::Circle { m: m as usize });
        }
        let m = ((dim as f64 - 1.0).sqrt() / density).ceil().max(1.0) as usize;
        let per_face = (1..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(m))
            .filter(|p| p.checked_mul(dim).is_some())
            .ok_or_else(|| {
                Error::BadTolerance(format!(
                    "a net of density {density} in dimension {dim} is too large to enumerate"
                ))
            })?;
        Ok(ProjectiveNet::Cube { dim, m, per_face })
    }

    pub(crate) fn len(&self) -> usize {
        match *self {
            ProjectiveNet::Circle { m } => m,
            ProjectiveNet::Cube { dim, per_face, .. } => dim * per_face,
        }
    }

    pub(crate) fn covering_radius(&self) -> f64 {
        match *self {
            ProjectiveNet::Circle { m } => PI / (2.0 * m as f64),
            ProjectiveNet::Cube { dim, m, .. } => (dim as f64 - 1.0).sqrt() / m as f64,
        }
    }

    /// Canonical unit representative of net point `i`.
    pub(crate) fn point(&self, i: usize) -> Vec<f64> {
        match *self {
            ProjectiveNet::Circle { m } => {
                let t = (i as f64 + 0.5) * PI / m as f64;
                let mut v = vec![t.cos(), t.sin()];
                canonicalize_in_place(&mut v);
                v
            }
            ProjectiveNet::Cube { dim, m, per_face } => {
                let face = i / per_face;
                let mut rest = i % per_face;
                let mut v = vec![0.0; dim];
                for (a, c) in v.iter_mut().enumerate() {
                    if a == face {
                        *c = 1.0;
                    } else {
                        let g = rest % m;
                        rest /= m;
                        *c = -1.0 + (2 * g + 1) as f64 / m as f64;
                    }
                }
                let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                v.iter_mut().for_each(|c| *c /= n);
                canonicalize_in_place(&mut v);
                v
            }
        }
    }
}

/// Generalized golden ratio: the positive root of `x^{s+1} = x + 1`.
fn harmonious(s: usize) -> f64 {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (s as f64 + 1.0));
    }
    g
}

/// A nested low-discrepancy sequence of projective directions.
///
/// Point `i` depends only on `i`, the dimension and the seed, so the first
/// `k` points are a prefix of the first `k' > k`. The underlying sequence is
/// the additive recurrence `frac(shift + (i + 1)·α)` with `α_j = g^{-j}`,
/// `g` the generalized golden ratio, and `shift` drawn from ChaCha8.
///
/// * `d = 2`: the single coordinate is an angle fraction of `π`.
/// * `d = 3`: two coordinates go through the equal-area map onto the upper
///   hemisphere (`z = u`, longitude `2πv`).
/// * `d ≥ 4`: `d` coordinates go through the normal quantile function and the
///   resulting Gaussian vector is normalized.
pub(crate) struct CandidateSequence {
    dim: usize,
    alpha: Vec<f64>,
    shift: Vec<f64>,
    normal: Normal,
}

impl CandidateSequence {
    pub(crate) fn new(dim: usize, seed: u64) -> Self {
        let s = match dim {
            2 => 1,
            3 => 2,
            d => d,
        };
        let g = harmonious(s);
        let alpha = (1..=s).map(|j| g.powi(-(j as i32))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..s).map(|_| rng.random::<f64>()).collect();
        CandidateSequence {
            dim,
            alpha,
            shift,
            normal: Normal::standard(),
        }
    }

    pub(crate) fn point(&self, i: usize) -> Vec<f64> {
        let step = (i + 1) as f64;
        let u: Vec<f64> = self
            .alpha
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| (s + step * a).fract())
            .collect();
        let mut v = match self.dim {
            2 => {
                let t = PI * u[0];
                vec![t.cos(), t.sin()]
            }
            3 => {
                let z = u[0];
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = 2.0 * PI * u[1];
                vec![r * phi.cos(), r * phi.sin(), z]
            }
            _ => {
                let mut g: Vec<f64> = u
                    .iter()
                    .map(|&p| self.normal.inverse_cdf(p.clamp(1e-12, 1.0 - 1e-12)))
                    .collect();
                let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
                g.iter_mut().for_each(|c| *c /= n);
                g
            }
        };
        canonicalize_in_place(&mut v);
        v
    }
}
