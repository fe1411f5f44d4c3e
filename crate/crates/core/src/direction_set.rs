//! Oriented and unoriented direction sets of a point cloud.
//!
//! For a finite cloud `E` the oriented set holds `(y − x)/|y − x|` for every
//! ordered pair of distinct points, and the unoriented set is its image in
//! projective space. A finite cloud only samples whatever set it stands for,
//! so "the direction set" here is always the set of the sample.
//!
//! Pairs closer than [`crate::geometry::COINCIDENCE_THRESHOLD`] are skipped and counted.
//! Projective classes within `tol` of each other are merged:
//!
//! * in the plane, classes are sorted around `RP^1` and merged by single
//!   linkage along that circular order;
//! * for `d > 2`, canonical representatives are swept in lexicographic order
//!   and each one is kept unless it lies within `tol` of an earlier kept one.
//!
//! Both procedures are deterministic and independent of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geometry::{
    canonicalize_in_place, lex_cmp, line_angle, pair_direction_into, ProjectiveDirection,
    UnitDirection, SIGN_THRESHOLD,
};

/// Default merge tolerance for projective classes, in radians.
pub const DEFAULT_DEDUP_TOL: f64 = 1e-9;

pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index of the first pair in row `i` of the row-major `i < j` ordering.
fn row_start(i: usize, n: usize) -> usize {
    i * (2 * n - i - 1) / 2
}

/// Inverse of the row-major ranking of pairs `i < j`.
pub(crate) fn unrank_pair(k: usize, n: usize) -> (usize, usize) {
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if row_start(mid, n) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = lo;
    (i, i + 1 + (k - row_start(i, n)))
}

/// Which unordered pairs of a cloud to look at.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum PairSelection {
    All,
    /// Sorted pair ranks.
    Sampled(Vec<usize>),
}

impl PairSelection {
    /// Exhaustive unless a budget smaller than the number of pairs is given.
    pub(crate) fn new(n: usize, budget: Option<usize>, seed: u64) -> Self {
        let total = pair_count(n);
        match budget {
            Some(b) if b < total => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked = rand::seq::index::sample(&mut rng, total, b).into_vec();
                picked.sort_unstable();
                PairSelection::Sampled(picked)
            }
            _ => PairSelection::All,
        }
    }
}

/// Unit directions `i → j` for the selected pairs, in selection order.
struct PairScan {
    dirs: Vec<f64>,
    examined: usize,
    skipped: usize,
}

fn scan_pairs(cloud: &PointCloud, selection: &PairSelection) -> PairScan {
    let d = cloud.dim();
    let n = cloud.len();
    let chunks: Vec<(Vec<f64>, usize)> = match selection {
        PairSelection::All => (0..n)
            .into_par_iter()
            .map(|i| {
                let mut buf = Vec::with_capacity((n - i - 1) * d);
                let mut tmp = vec![0.0; d];
                let mut skipped = 0;
                let p = cloud.point(i);
                for j in i + 1..n {
                    if pair_direction_into(p, cloud.point(j), &mut tmp) {
                        buf.extend_from_slice(&tmp);
                    } else {
                        skipped += 1;
                    }
                }
                (buf, skipped)
            })
            .collect(),
        PairSelection::Sampled(ranks) => ranks
            .par_chunks(4096)
            .map(|chunk| {
                let mut buf = Vec::with_capacity(chunk.len() * d);
                let mut tmp = vec![0.0; d];
                let mut skipped = 0;
                for &k in chunk {
                    let (i, j) = unrank_pair(k, n);
                    if pair_direction_into(cloud.point(i), cloud.point(j), &mut tmp) {
                        buf.extend_from_slice(&tmp);
                    } else {
                        skipped += 1;
                    }
                }
                (buf, skipped)
            })
            .collect(),
    };
    let examined = match selection {
        PairSelection::All => pair_count(n),
        PairSelection::Sampled(r) => r.len(),
    };
    let total: usize = chunks.iter().map(|(b, _)| b.len()).sum();
    let mut dirs = Vec::with_capacity(total);
    let mut skipped = 0;
    for (b, s) in chunks {
        dirs.extend_from_slice(&b);
        skipped += s;
    }
    PairScan {
        dirs,
        examined,
        skipped,
    }
}

fn require_points(cloud: &PointCloud) -> Result<()> {
    if cloud.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: cloud.len(),
        });
    }
    Ok(())
}

/// Both orientations of every examined pair, stored flat as `u, −u, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedDirections {
    dim: usize,
    coords: Vec<f64>,
    pub pairs_examined: usize,
    pub skipped_coincident: usize,
}

impl OrientedDirections {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::Chunks<'_, f64> {
        self.coords.chunks(self.dim)
    }

    pub fn to_vec(&self) -> Vec<UnitDirection> {
        self.iter()
            .map(|c| UnitDirection::from_raw(c.to_vec()))
            .collect()
    }
}

/// Enumerates `D̃(E)`.
///
/// With no budget (or a budget of at least the number of pairs) every pair is
/// used. Otherwise `pair_budget` unordered pairs are drawn without
/// replacement by a ChaCha8 generator seeded with `seed`; the output is in
/// increasing pair rank either way.
pub fn oriented_directions(
    cloud: &PointCloud,
    pair_budget: Option<usize>,
    seed: u64,
) -> Result<OrientedDirections> {
    require_points(cloud)?;
    let d = cloud.dim();
    let selection = PairSelection::new(cloud.len(), pair_budget, seed);
    let scan = scan_pairs(cloud, &selection);
    let mut coords = Vec::with_capacity(scan.dirs.len() * 2);
    for u in scan.dirs.chunks(d) {
        coords.extend_from_slice(u);
        coords.extend(u.iter().map(|c| -c));
    }
    Ok(OrientedDirections {
        dim: d,
        coords,
        pairs_examined: scan.examined,
        skipped_coincident: scan.skipped,
    })
}

/// A sorted, deduplicated set of projective classes plus its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DirectionSetRecord", into = "DirectionSetRecord")]
pub struct DirectionSet {
    dim: usize,
    reps: Vec<f64>,
    oriented: Option<Vec<f64>>,
    pub n_points: usize,
    pub pairs_examined: usize,
    pub skipped_coincident: usize,
    pub tol: f64,
}

impl DirectionSet {
    /// Canonicalizes, sorts and merges arbitrary directions at `tol`.
    pub fn from_directions<'a, I>(dim: usize, dirs: I, tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        check_tol(tol)?;
        let mut flat = Vec::new();
        for v in dirs {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            flat.extend_from_slice(v);
        }
        for v in flat.chunks_mut(dim) {
            canonicalize_in_place(v);
        }
        let count = flat.len() / dim;
        Ok(DirectionSet {
            dim,
            reps: merge_classes(dim, flat, tol),
            oriented: None,
            n_points: 0,
            pairs_examined: count,
            skipped_coincident: 0,
            tol,
        })
    }

    pub fn from_projective(dim: usize, dirs: &[ProjectiveDirection], tol: f64) -> Result<Self> {
        Self::from_directions(dim, dirs.iter().map(|p| p.coords()), tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.reps.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Canonical representative of class `i`.
    pub fn rep(&self, i: usize) -> &[f64] {
        &self.reps[i * self.dim..(i + 1) * self.dim]
    }

    pub fn reps(&self) -> std::slice::Chunks<'_, f64> {
        self.reps.chunks(self.dim)
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.reps
    }

    pub fn projective(&self) -> Vec<ProjectiveDirection> {
        self.reps()
            .map(|r| ProjectiveDirection::from_canonical_raw(r.to_vec()))
            .collect()
    }

    pub fn oriented(&self) -> Option<std::slice::Chunks<'_, f64>> {
        self.oriented.as_ref().map(|o| o.chunks(self.dim))
    }
}

/// Serialized form of a [`DirectionSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSetRecord {
    pub dim: usize,
    pub n_points: usize,
    pub pairs_examined: usize,
    pub skipped_coincident: usize,
    pub tol: f64,
    pub projective: Vec<Vec<f64>>,
    pub oriented_included: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oriented: Option<Vec<Vec<f64>>>,
}

impl From<DirectionSet> for DirectionSetRecord {
    fn from(s: DirectionSet) -> Self {
        let chunk = |v: &[f64]| v.chunks(s.dim).map(<[f64]>::to_vec).collect::<Vec<_>>();
        DirectionSetRecord {
            dim: s.dim,
            n_points: s.n_points,
            pairs_examined: s.pairs_examined,
            skipped_coincident: s.skipped_coincident,
            tol: s.tol,
            projective: chunk(&s.reps),
            oriented_included: s.oriented.is_some(),
            oriented: s.oriented.as_deref().map(chunk),
        }
    }
}

impl TryFrom<DirectionSetRecord> for DirectionSet {
    type Error = Error;

    fn try_from(r: DirectionSetRecord) -> Result<Self> {
        for v in &r.projective {
            UnitDirection::new(v.clone())?;
        }
        let mut set = DirectionSet::from_directions(
            r.dim,
            r.projective.iter().map(Vec::as_slice),
            r.tol,
        )?;
        set.n_points = r.n_points;
        set.pairs_examined = r.pairs_examined;
        set.skipped_coincident = r.skipped_coincident;
        if let Some(o) = r.oriented {
            let mut flat = Vec::with_capacity(o.len() * r.dim);
            for v in o {
                flat.extend(UnitDirection::new(v)?.into_inner());
            }
            set.oriented = Some(flat);
        }
        Ok(set)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::BadTolerance(format!("tol must be finite and ≥ 0, got {tol}")));
    }
    Ok(())
}

/// Monotone stand-in for the `RP^1` angle of a canonical planar
/// representative: increases with the angle over `(−π/2, π/2]`, and keeps
/// precision near the vertical where the raw `y` coordinate saturates.
fn planar_order_key(v: &[f64]) -> f64 {
    let (x, y) = (v[0], v[1]);
    let t = y / (x.abs() + y.abs());
    if x >= 0.0 {
        t
    } else {
        2.0 - t
    }
}

/// Merges canonical representatives (flat) into sorted, separated classes.
fn merge_classes(dim: usize, flat: Vec<f64>, tol: f64) -> Vec<f64> {
    let count = flat.len() / dim;
    if count == 0 {
        return flat;
    }
    let rep = |i: usize| &flat[i * dim..(i + 1) * dim];
    let mut kept: Vec<usize> = if dim == 2 {
        let mut keyed: Vec<(f64, u32)> = (0..count)
            .into_par_iter()
            .map(|i| (planar_order_key(rep(i)), i as u32))
            .collect();
        keyed.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut starts = vec![keyed[0].1 as usize];
        for w in keyed.windows(2) {
            if line_angle(rep(w[0].1 as usize), rep(w[1].1 as usize)) > tol {
                starts.push(w[1].1 as usize);
            }
        }
        // RP^1 is a circle: the last run may continue into the first.
        let first = keyed[0].1 as usize;
        let last = keyed[count - 1].1 as usize;
        if starts.len() > 1 && line_angle(rep(last), rep(first)) <= tol {
            starts.pop();
        }
        starts
    } else {
        let mut order: Vec<u32> = (0..count as u32).collect();
        order.par_sort_unstable_by(|&a, &b| {
            lex_cmp(rep(a as usize), rep(b as usize)).then(a.cmp(&b))
        });
        // |Δx₀| is bounded by the chord, which is bounded by the angle.
        let window = tol + 1e-15;
        let near_zero = window + SIGN_THRESHOLD;
        let mut kept: Vec<usize> = Vec::new();
        let mut kept_x0: Vec<f64> = Vec::new();
        for &i in &order {
            let i = i as usize;
            let r = rep(i);
            let x0 = r[0];
            let lo = kept_x0.partition_point(|&v| v < x0 - window);
            let mut found = kept[lo..].iter().any(|&k| line_angle(rep(k), r) <= tol);
            if !found && x0 <= near_zero {
                // Antipodal neighbours straddle the sign rule at x₀ ≈ 0.
                let hi = kept_x0.partition_point(|&v| v <= near_zero).min(lo);
                found = kept[..hi].iter().any(|&k| line_angle(rep(k), r) <= tol);
            }
            if !found {
                kept.push(i);
                kept_x0.push(x0);
            }
        }
        kept
    };
    kept.sort_by(|&a, &b| lex_cmp(rep(a), rep(b)).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(kept.len() * dim);
    for k in kept {
        out.extend_from_slice(rep(k));
    }
    out
}

/// Computes `D(E)` for the cloud.
pub fn unoriented_directions(
    cloud: &PointCloud,
    tol: f64,
    pair_budget: Option<usize>,
    seed: u64,
) -> Result<DirectionSet> {
    require_points(cloud)?;
    check_tol(tol)?;
    let d = cloud.dim();
    let selection = PairSelection::new(cloud.len(), pair_budget, seed);
    let PairScan {
        mut dirs,
        examined,
        skipped,
    } = scan_pairs(cloud, &selection);
    dirs.par_chunks_mut(d).for_each(canonicalize_in_place);
    Ok(DirectionSet {
        dim: d,
        reps: merge_classes(d, dirs, tol),
        oriented: None,
        n_points: cloud.len(),
        pairs_examined: examined,
        skipped_coincident: skipped,
        tol,
    })
}

/// Like [`unoriented_directions`], also keeping both orientations of every
/// pair for output.
pub fn direction_set_with_oriented(
    cloud: &PointCloud,
    tol: f64,
    pair_budget: Option<usize>,
    seed: u64,
) -> Result<DirectionSet> {
    let oriented = oriented_directions(cloud, pair_budget, seed)?;
    let mut set = unoriented_directions(cloud, tol, pair_budget, seed)?;
    set.oriented = Some(oriented.coords);
    Ok(set)
}

/// Outcome of [`collinearity_test`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Collinearity {
    /// All points lie on `point + t·direction`.
    Collinear {
        point: Vec<f64>,
        direction: ProjectiveDirection,
    },
    /// Three points that do not lie on a common line at the tolerance.
    NotCollinear { witness: [usize; 3] },
}

/// Decides whether every pair direction lies within `tol` of a single class.
///
/// The reference line joins point 0 to the point farthest from it. When every
/// point coincides with point 0 the cloud is reported collinear along `e_1`.
pub fn collinearity_test(cloud: &PointCloud, tol: f64) -> Result<Collinearity> {
    require_points(cloud)?;
    check_tol(tol)?;
    let d = cloud.dim();
    let n = cloud.len();
    let origin = cloud.point(0);
    let dist2 = |p: &[f64]| -> f64 { p.iter().zip(origin).map(|(a, b)| (a - b) * (a - b)).sum() };
    let far = (1..n)
        .max_by(|&a, &b| dist2(cloud.point(a)).total_cmp(&dist2(cloud.point(b))).then(b.cmp(&a)))
        .unwrap();
    let mut reference = vec![0.0; d];
    if !pair_direction_into(origin, cloud.point(far), &mut reference) {
        return Ok(Collinearity::Collinear {
            point: origin.to_vec(),
            direction: ProjectiveDirection::from_canonical_raw(UnitDirection::axis(d, 0).into_inner()),
        });
    }
    canonicalize_in_place(&mut reference);

    let deviates = |i: usize, j: usize| -> bool {
        let mut tmp = vec![0.0; d];
        pair_direction_into(cloud.point(i), cloud.point(j), &mut tmp)
            && line_angle(&tmp, &reference) > tol
    };
    let offending = (0..n).into_par_iter().find_map_first(|i| {
        (i + 1..n).find(|&j| deviates(i, j)).map(|j| (i, j))
    });
    match offending {
        None => Ok(Collinearity::Collinear {
            point: origin.to_vec(),
            direction: ProjectiveDirection::from_canonical_raw(reference),
        }),
        Some((i, j)) => {
            let off_line = |k: usize| k != 0 && k != far && (deviates(0, k) || deviates(far, k));
            let third = [i, j].into_iter().find(|&k| off_line(k));
            let mut witness = match third {
                Some(k) => [0, far, k],
                None if i != 0 => [0, i, j],
                None => [far, i, j],
            };
            witness.sort_unstable();
            Ok(Collinearity::NotCollinear { witness })
        }
    }
}

/// Number of projective classes of the cloud at tolerance `tol`.
pub fn count_distinct_directions(cloud: &PointCloud, tol: f64) -> Result<usize> {
    Ok(unoriented_directions(cloud, tol, None, 0)?.len())
}
