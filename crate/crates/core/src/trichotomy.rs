//! Classifying a cloud by how its direction set sits in projective space.
//!
//! A set in `ℝ^d` falls into exactly one of three cases: its direction set
//! misses an open set (a Lipschitz graph), it is dense but misses a point (a
//! non-Lipschitz graph), or it is everything (not a graph in any direction).
//! A finite cloud always misses something, so the cases are read at a pair
//! of resolutions. A cap of radius at least `eps_hole` gives class i. An
//! `eps_cover` net that the classes reach gives class iii. Anything between
//! is class ii, which finer sampling may move either way.
//!
//! In class i the cap center `c` is rotated to the pole `e_d`. No pair of
//! points is then aligned with `e_d`, so projecting onto the first `d − 1`
//! coordinates is injective and the cloud is the graph of a function of
//! those coordinates. A secant of slope `L` makes angle `atan(1/L)` with the
//! pole, so a cap of radius `r` bounds every slope by `tan(π/2 − r)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cap::{
    coverage_fraction, default_net_density, eps_cover_test, largest_empty_cap, CapReport,
    CapSearch, CoverageCertificate,
};
use crate::cloud::PointCloud;
use crate::direction_set::{unoriented_directions, DEFAULT_DEDUP_TOL};
use crate::error::{Error, Result};
use crate::geometry::{
    apply_rotation, line_angle, pair_direction_into, rotation_to_pole, ProjectiveDirection, Rotation,
    COINCIDENCE_THRESHOLD,
};

pub const DEFAULT_EPS_HOLE: f64 = PI / 16.0;
pub const DEFAULT_EPS_COVER: f64 = PI / 256.0;
pub const DEFAULT_TOL: f64 = DEFAULT_DEDUP_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// A cap of radius at least `eps_hole` is empty: a Lipschitz graph.
    #[serde(rename = "class_i")]
    ClassI,
    /// Neither a big hole nor a cover at the chosen resolutions.
    #[serde(rename = "class_ii")]
    ClassII,
    /// The classes come within `eps_cover` of every direction.
    #[serde(rename = "class_iii")]
    ClassIII,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ClassI => "class_i",
            Verdict::ClassII => "class_ii",
            Verdict::ClassIII => "class_iii",
        }
    }
}

/// The cloud as the graph of a function over a hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphWitness {
    /// The direction that was rotated to `e_d`.
    pub pole: ProjectiveDirection,
    pub rotation: Rotation,
    /// First `d − 1` coordinates of each rotated point.
    pub base_points: Vec<Vec<f64>>,
    /// Last coordinate of each rotated point.
    pub values: Vec<f64>,
    pub lipschitz_constant: f64,
    /// Pair attaining `lipschitz_constant`, if there are two base points.
    pub steepest_pair: Option<[usize; 2]>,
    /// Smallest angle between the pole and any pair direction.
    pub clearance: f64,
    /// `tan(π/2 − ε)`, the slope bound a cap of radius `ε` guarantees. From
    /// [`extract_graph`] `ε` is the clearance; from [`classify`] it is
    /// `eps_hole`.
    pub bound: f64,
}

impl GraphWitness {
    /// Maps `(base, value)` back through the inverse rotation.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let back = self.rotation.transpose();
        self.base_points
            .iter()
            .zip(&self.values)
            .map(|(b, &v)| {
                let mut p = b.clone();
                p.push(v);
                back.apply(&p)
            })
            .collect()
    }
}

/// What class ii looked like, so a deeper sample can be compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementNote {
    pub cap_radius: f64,
    pub coverage_fraction: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    LipschitzGraph { witness: GraphWitness },
    Dense { note: RefinementNote },
    AllDirections { certificate: CoverageCertificate },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub eps_hole: f64,
    pub eps_cover: f64,
    pub tol: f64,
    pub dim: usize,
    pub n_points: usize,
    pub n_classes: usize,
    /// The largest empty cap found.
    pub cap: CapReport,
    pub evidence: Evidence,
}

fn check_angle(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0 && v <= FRAC_PI_2) {
        return Err(Error::BadTolerance(format!("{name} must lie in (0, π/2], got {v}")));
    }
    Ok(())
}

fn require_two(cloud: &PointCloud) -> Result<()> {
    if cloud.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: cloud.len(),
        });
    }
    Ok(())
}

/// Classifies the cloud at resolutions `eps_hole ≥ eps_cover`, merging
/// directions within `tol`.
pub fn classify(cloud: &PointCloud, eps_hole: f64, eps_cover: f64, tol: f64) -> Result<Classification> {
    require_two(cloud)?;
    check_angle("eps_hole", eps_hole)?;
    check_angle("eps_cover", eps_cover)?;
    if eps_cover > eps_hole {
        return Err(Error::BadTolerance(format!(
            "eps_cover ({eps_cover}) must not exceed eps_hole ({eps_hole})"
        )));
    }
    if !(tol >= 0.0 && tol < eps_cover) {
        return Err(Error::BadTolerance(format!("tol must lie in [0, eps_cover), got {tol}")));
    }
    let dirs = unoriented_directions(cloud, tol, None, 0)?;
    if dirs.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: 1,
        });
    }
    let cap = largest_empty_cap(&dirs, CapSearch::Auto)?;

    let (verdict, evidence) = if cap.radius >= eps_hole {
        let mut witness = match extract_graph(cloud, &cap.center, tol) {
            Ok(w) => w,
            Err(Error::NotAGraph(i, j)) => {
                return Err(Error::Internal(format!(
                    "empty cap of radius {} but points {i} and {j} are aligned with its center",
                    cap.radius
                )))
            }
            Err(e) => return Err(e),
        };
        witness.bound = (FRAC_PI_2 - eps_hole).tan();
        (Verdict::ClassI, Evidence::LipschitzGraph { witness })
    } else {
        let certificate = eps_cover_test(&dirs, eps_cover, default_net_density(eps_cover))?;
        if certificate.covered {
            (Verdict::ClassIII, Evidence::AllDirections { certificate })
        } else {
            let fraction = coverage_fraction(&dirs, eps_cover)?;
            let note = RefinementNote {
                cap_radius: cap.radius,
                coverage_fraction: fraction,
                message: format!(
                    "largest empty cap {:.6} is below eps_hole and {:.2}% of directions are within \
                     eps_cover; sample more finely to separate a dense set from a full one",
                    cap.radius,
                    100.0 * fraction
                ),
            };
            (Verdict::ClassII, Evidence::Dense { note })
        }
    };
    Ok(Classification {
        verdict,
        eps_hole,
        eps_cover,
        tol,
        dim: cloud.dim(),
        n_points: cloud.len(),
        n_classes: dirs.len(),
        cap,
        evidence,
    })
}

/// Outcome of [`vertical_line_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GraphVerdict {
    /// No pair direction is within `tol`; `clearance` is the smallest angle.
    Graph { clearance: f64 },
    /// The pair whose direction is closest to the tested one.
    NotGraph { witness: [usize; 2], angle: f64 },
}

/// Smallest angle between `dir` and any pair direction, with its pair.
/// Ties go to the lexicographically first pair.
fn closest_pair(cloud: &PointCloud, dir: &[f64]) -> Option<(f64, usize, usize)> {
    let n = cloud.len();
    let d = cloud.dim();
    (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let mut u = vec![0.0; d];
            let mut best: Option<(f64, usize, usize)> = None;
            for j in i + 1..n {
                if !pair_direction_into(cloud.point(i), cloud.point(j), &mut u) {
                    continue;
                }
                let a = line_angle(&u, dir);
                if best.is_none_or(|(b, _, _)| a < b) {
                    best = Some((a, i, j));
                }
            }
            best
        })
        .reduce_with(|x, y| if y.0 < x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) { y } else { x })
}

/// Whether the cloud is a graph over the hyperplane orthogonal to `dir`:
/// no pair of points may be aligned with `dir` to within `tol`.
pub fn vertical_line_test(cloud: &PointCloud, dir: &ProjectiveDirection, tol: f64) -> Result<GraphVerdict> {
    require_two(cloud)?;
    if dir.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            found: dir.dim(),
        });
    }
    Ok(match closest_pair(cloud, dir.coords()) {
        Some((angle, i, j)) if angle <= tol => GraphVerdict::NotGraph { witness: [i, j], angle },
        Some((clearance, _, _)) => GraphVerdict::Graph { clearance },
        // Every pair coincides.
        None => GraphVerdict::Graph { clearance: FRAC_PI_2 },
    })
}

/// Rotates `pole` to `e_d` and reads the cloud as a function of the first
/// `d − 1` coordinates.
pub fn extract_graph(cloud: &PointCloud, pole: &ProjectiveDirection, tol: f64) -> Result<GraphWitness> {
    let clearance = match vertical_line_test(cloud, pole, tol)? {
        GraphVerdict::NotGraph { witness: [i, j], .. } => return Err(Error::NotAGraph(i, j)),
        GraphVerdict::Graph { clearance } => clearance,
    };
    let rotation = rotation_to_pole(pole.rep());
    let rotated = apply_rotation(&rotation, cloud)?;
    let d = cloud.dim();
    let base_points: Vec<Vec<f64>> = rotated.points().map(|p| p[..d - 1].to_vec()).collect();
    let values: Vec<f64> = rotated.points().map(|p| p[d - 1]).collect();
    let (lipschitz_constant, steepest_pair) = steepest(&base_points, &values, Some(cloud))?;
    Ok(GraphWitness {
        pole: pole.clone(),
        rotation,
        base_points,
        values,
        lipschitz_constant,
        steepest_pair,
        clearance,
        bound: (FRAC_PI_2 - clearance).tan(),
    })
}

/// Largest secant slope `|f(a) − f(b)| / |a − b|` over all pairs.
pub fn lipschitz_constant(base: &[Vec<f64>], values: &[f64]) -> Result<f64> {
    if base.len() != values.len() {
        return Err(Error::LengthMismatch(base.len(), values.len()));
    }
    if base.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: base.len(),
        });
    }
    Ok(steepest(base, values, None)?.0)
}

fn base_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Exhaustive steepest pair. Pairs that coincide in the original cloud, if
/// one is given, are skipped; any other coincident base points are an error.
fn steepest(
    base: &[Vec<f64>],
    values: &[f64],
    cloud: Option<&PointCloud>,
) -> Result<(f64, Option<[usize; 2]>)> {
    if let Some(b) = base.iter().find(|b| b.len() != base[0].len()) {
        return Err(Error::DimensionMismatch {
            expected: base[0].len(),
            found: b.len(),
        });
    }
    let n = base.len();
    let rows: Vec<Result<Option<(f64, usize, usize)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(f64, usize, usize)> = None;
            for j in i + 1..n {
                let h = base_distance(&base[i], &base[j]);
                if h <= COINCIDENCE_THRESHOLD {
                    let same_point = cloud.is_some_and(|c| {
                        base_distance(c.point(i), c.point(j)) <= COINCIDENCE_THRESHOLD
                    });
                    if same_point {
                        continue;
                    }
                    return Err(Error::CoincidentBasePoints(i, j));
                }
                let slope = (values[j] - values[i]).abs() / h;
                if best.is_none_or(|(s, _, _)| slope > s) {
                    best = Some((slope, i, j));
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for row in rows {
        if let Some(cand) = row? {
            if best.is_none_or(|(s, _, _)| cand.0 > s) {
                best = Some(cand);
            }
        }
    }
    Ok(match best {
        Some((s, i, j)) => (s, Some([i, j])),
        None => (0.0, None),
    })
}
