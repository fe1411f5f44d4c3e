//! Empty caps and ε-coverage of projective space.
//!
//! A cap of radius `r` around a line `c` is every line within angle `r` of
//! `c`. An empty cap is one that contains no class of the direction set, so a
//! large empty cap is the finite-sample face of "not dense", and an ε-cover
//! is the finite-sample face of "every direction".
//!
//! Projective space is handled by doubling each class onto the sphere as
//! `±rep`, so that standard spherical constructions apply unchanged.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direction_set::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::{
    canonicalize_in_place, lex_cmp, line_angle, rotation_to_pole, rp1_angle, ProjectiveDirection,
    UnitDirection,
};
use crate::hull::Hull;
use crate::index::DirectionIndex;
use crate::nets::{CandidateSequence, ProjectiveNet};

/// Candidate count used by [`CapSearch::Auto`] in dimension four and up.
pub const DEFAULT_CAP_SAMPLES: usize = 20_000;

/// Largest net used by [`coverage_fraction`].
pub const COVERAGE_NET_LIMIT: usize = 1 << 22;

/// Gaps within this of the largest one count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapMethod {
    ExactGap2d,
    Voronoi3d,
    Sampled { k: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapQuality {
    Exact,
    LowerBound,
}

/// A cap that no class of the input enters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapReport {
    pub center: ProjectiveDirection,
    pub radius: f64,
    pub method: CapMethod,
    pub quality: CapQuality,
}

impl CapReport {
    /// Smallest projective distance from the center to any input class,
    /// by brute force.
    pub fn clearance(&self, dirs: &DirectionSet) -> f64 {
        min_distance(self.center.coords(), dirs)
    }
}

/// How [`largest_empty_cap`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapSearch {
    /// Exact gap scan for `d = 2`, Voronoi vertices for `d = 3`, sampling
    /// with [`DEFAULT_CAP_SAMPLES`] candidates above.
    #[default]
    Auto,
    Sampled { k: usize, seed: u64 },
}

fn min_distance(center: &[f64], dirs: &DirectionSet) -> f64 {
    dirs.reps()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|r| line_angle(r, center))
        .reduce(|| FRAC_PI_2, f64::min)
}

fn require_nonempty(dirs: &DirectionSet) -> Result<()> {
    if dirs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Largest empty arc of `RP^1`, exactly.
///
/// Classes are placed at their angles in `[0, π)`, the circular gaps are
/// scanned, and the widest gap gives the cap: center at its midpoint, radius
/// half its width. Among equal gaps the one with the smallest center angle
/// wins.
pub fn largest_empty_arc(dirs: &DirectionSet) -> Result<CapReport> {
    require_nonempty(dirs)?;
    if dirs.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: dirs.dim(),
        });
    }
    let mut angles: Vec<f64> = dirs.reps().map(rp1_angle).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n {
        let start = angles[i];
        let end = if i + 1 < n { angles[i + 1] } else { angles[0] + PI };
        // A single class leaves a gap of π; rounding in `angles[0] + PI`
        // must not push it past that.
        let gap = (end - start).min(PI);
        let center = (start + gap / 2.0).rem_euclid(PI);
        best = match best {
            None => Some((gap, center)),
            Some((g, _)) if gap > g + TIE_TOL => Some((gap, center)),
            Some((g, c)) if (gap - g).abs() <= TIE_TOL && center < c => Some((gap, center)),
            keep => keep,
        };
    }
    let (gap, center) = best.expect("nonempty");
    Ok(CapReport {
        center: ProjectiveDirection::from_angle(center).snapped(),
        radius: gap / 2.0,
        method: CapMethod::ExactGap2d,
        quality: CapQuality::Exact,
    })
}

/// Largest empty cap in `RP^{d-1}`.
///
/// In dimension three the classes are doubled to `±rep` and the convex hull
/// of the doubled set is built. Every hull face is a Delaunay triangle, its
/// outward normal a Voronoi vertex, and the largest empty cap is centered at
/// the Voronoi vertex farthest from its generators. The reported radius is
/// the brute-force clearance of the chosen center.
pub fn largest_empty_cap(dirs: &DirectionSet, search: CapSearch) -> Result<CapReport> {
    require_nonempty(dirs)?;
    let report = match (search, dirs.dim()) {
        (CapSearch::Auto, 2) => largest_empty_arc(dirs)?,
        (CapSearch::Auto, 3) => voronoi_cap(dirs)?,
        (CapSearch::Auto, _) => sampled_cap(dirs, DEFAULT_CAP_SAMPLES, 0),
        (CapSearch::Sampled { k, seed }, _) => sampled_cap(dirs, k.max(1), seed),
    };
    if report.clearance(dirs) < report.radius - 1e-9 {
        return Err(Error::Internal(format!(
            "reported cap of radius {} contains an input direction",
            report.radius
        )));
    }
    Ok(report)
}

fn perpendicular(v: &[f64]) -> Vec<f64> {
    let k = (0..v.len())
        .min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(a.cmp(&b)))
        .unwrap();
    // Gram–Schmidt of e_k against v.
    let mut p: Vec<f64> = v.iter().map(|c| -v[k] * c).collect();
    p[k] += 1.0;
    let n = p.iter().map(|c| c * c).sum::<f64>().sqrt();
    p.iter_mut().for_each(|c| *c /= n);
    p
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn voronoi_cap(dirs: &DirectionSet) -> Result<CapReport> {
    let mut pts = Vec::with_capacity(dirs.len() * 2);
    for r in dirs.reps() {
        pts.push([r[0], r[1], r[2]]);
        pts.push([-r[0], -r[1], -r[2]]);
    }
    let center = match Hull::build(pts) {
        Some(hull) => {
            let mut best: Option<(f64, Vec<f64>)> = None;
            for face in hull.faces() {
                let radius = face
                    .v
                    .iter()
                    .map(|&i| line_angle(&face.normal, &hull.point(i)))
                    .fold(FRAC_PI_2, f64::min);
                let mut c = face.normal.to_vec();
                canonicalize_in_place(&mut c);
                best = match best {
                    None => Some((radius, c)),
                    Some((r, _)) if radius > r + TIE_TOL => Some((radius, c)),
                    Some((r, bc)) if (radius - r).abs() <= TIE_TOL && lex_cmp(&c, &bc).is_lt() => {
                        Some((r.max(radius), c))
                    }
                    keep => keep,
                };
            }
            best.expect("a hull has faces").1
        }
        None => {
            // All classes lie on one plane through the origin (or one line):
            // the plane's normal is at distance π/2 from all of them.
            let a = dirs.rep(0);
            let (b, area) = dirs
                .reps()
                .map(|r| {
                    let c = cross3(a, r);
                    (c, (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt())
                })
                .fold(([0.0; 3], 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if area < 1e-9 {
                perpendicular(a)
            } else {
                b.iter().map(|c| c / area).collect()
            }
        }
    };
    let center = crate::geometry::projective_canonical(&UnitDirection::from_raw(center)).snapped();
    let radius = min_distance(center.coords(), dirs);
    Ok(CapReport {
        center,
        radius,
        method: CapMethod::Voronoi3d,
        quality: CapQuality::Exact,
    })
}

/// Best of the first `k` candidates of the nested sequence, before local
/// refinement. Returns `(radius, center)`.
pub(crate) fn best_candidate(
    dirs: &DirectionSet,
    index: &DirectionIndex,
    k: usize,
    seed: u64,
) -> (f64, Vec<f64>) {
    let seq = CandidateSequence::new(dirs.dim(), seed);
    let scored: Vec<(f64, usize)> = (0..k)
        .into_par_iter()
        .map(|i| (index.nearest(&seq.point(i)), i))
        .collect();
    let (mut radius, mut at) = scored[0];
    for &(r, i) in &scored[1..] {
        if r > radius {
            radius = r;
            at = i;
        }
    }
    (radius, seq.point(at))
}

/// Evaluates `k` candidate centers, then hill-climbs from the best one along
/// tangent directions with a halving step. Every radius is a true clearance,
/// so the result is a lower bound on the largest empty cap.
fn sampled_cap(dirs: &DirectionSet, k: usize, seed: u64) -> CapReport {
    let d = dirs.dim();
    let index = DirectionIndex::new(dirs);
    let (mut radius, mut center) = best_candidate(dirs, &index, k, seed);

    let spacing = if d == 2 {
        PI / k as f64
    } else {
        FRAC_PI_2 * (k as f64).powf(-1.0 / (d as f64 - 1.0))
    };
    let mut step = spacing;
    let mut iterations = 0;
    while step > 1e-12 && iterations < 400 {
        iterations += 1;
        let frame = rotation_to_pole(&UnitDirection::from_raw(center.clone()));
        let (sin, cos) = step.sin_cos();
        let mut improved: Option<(f64, Vec<f64>)> = None;
        for j in 0..d - 1 {
            let tangent = frame.row(j);
            for sign in [1.0, -1.0] {
                let mut trial: Vec<f64> = center
                    .iter()
                    .zip(tangent)
                    .map(|(c, t)| c * cos + sign * t * sin)
                    .collect();
                let n = trial.iter().map(|c| c * c).sum::<f64>().sqrt();
                trial.iter_mut().for_each(|c| *c /= n);
                let r = index.nearest(&trial);
                if r > improved.as_ref().map_or(radius, |x| x.0) {
                    improved = Some((r, trial));
                }
            }
        }
        match improved {
            Some((r, c)) => {
                radius = r;
                center = c;
            }
            None => step /= 2.0,
        }
    }
    canonicalize_in_place(&mut center);
    let center = ProjectiveDirection::from_canonical_raw(center);
    CapReport {
        radius: min_distance(center.coords(), dirs),
        center,
        method: CapMethod::Sampled { k, seed },
        quality: CapQuality::LowerBound,
    }
}

/// Outcome of [`eps_cover_test`].
///
/// `covered` means every point of `RP^{d-1}` is within
/// `eps + covering_radius` of an input class. Otherwise `witness` is a net
/// point with no class within `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCertificate {
    pub eps: f64,
    pub net_density: f64,
    pub covering_radius: f64,
    pub covered: bool,
    pub witness: Option<ProjectiveDirection>,
    pub net_size: usize,
}

/// Default net density for a cover test at `eps`.
pub fn default_net_density(eps: f64) -> f64 {
    eps / 4.0
}

/// Checks whether the classes come within `eps` of every point of a net of
/// covering radius `net_density`.
///
/// The first uncovered net point, in net order, is the witness.
pub fn eps_cover_test(dirs: &DirectionSet, eps: f64, net_density: f64) -> Result<CoverageCertificate> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::BadTolerance(format!("eps must be positive, got {eps}")));
    }
    if !(net_density > 0.0 && net_density <= eps / 2.0) {
        return Err(Error::BadTolerance(format!(
            "net density {net_density} must lie in (0, eps/2 = {}]",
            eps / 2.0
        )));
    }
    let net = ProjectiveNet::with_density(dirs.dim(), net_density)?;
    let index = DirectionIndex::new(dirs);
    let uncovered = if dirs.is_empty() {
        Some(0)
    } else {
        (0..net.len())
            .into_par_iter()
            .find_first(|&i| index.nearest(&net.point(i)) > eps)
    };
    Ok(CoverageCertificate {
        eps,
        net_density,
        covering_radius: net.covering_radius(),
        covered: uncovered.is_none(),
        witness: uncovered.map(|i| ProjectiveDirection::from_canonical_raw(net.point(i))),
        net_size: net.len(),
    })
}

/// Fraction of net points within `eps` of some class.
///
/// The net has density `eps/4`, coarsened if needed so that it has at most
/// [`COVERAGE_NET_LIMIT`] points.
pub fn coverage_fraction(dirs: &DirectionSet, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::BadTolerance(format!("eps must be positive, got {eps}")));
    }
    if dirs.is_empty() {
        return Ok(0.0);
    }
    let mut density = default_net_density(eps);
    let net = loop {
        match ProjectiveNet::with_density(dirs.dim(), density) {
            Ok(net) if net.len() <= COVERAGE_NET_LIMIT => break net,
            _ => density *= 1.25,
        }
    };
    let index = DirectionIndex::new(dirs);
    let hits: usize = (0..net.len())
        .into_par_iter()
        .filter(|&i| index.nearest(&net.point(i)) <= eps)
        .count();
    Ok(hits as f64 / net.len() as f64)
}
