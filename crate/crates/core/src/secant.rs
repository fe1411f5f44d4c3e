//! Secant slopes of sampled scalar functions on an interval.
//!
//! For a graph over the x axis, the slope chart identifies `RP^1` minus the
//! vertical with `ℝ`: the line through two graph points has slope
//! `(f(y) − f(x))/(y − x)`. These tools measure how much of `[−M, M]` the
//! secant slopes of a sample reach, and how that changes as a dyadic grid is
//! refined.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::weierstrass_dyadic;

/// All pairwise secant slopes of a sample, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSet {
    pub slopes: Vec<f64>,
    pub n_samples: usize,
    pub domain: (f64, f64),
}

impl SlopeSet {
    /// Drops slopes within `tol` of the previous kept one.
    pub fn dedup(&self, tol: f64) -> SlopeSet {
        let mut slopes: Vec<f64> = Vec::with_capacity(self.slopes.len());
        for &s in &self.slopes {
            if slopes.last().is_none_or(|&l| s - l > tol) {
                slopes.push(s);
            }
        }
        SlopeSet {
            slopes,
            n_samples: self.n_samples,
            domain: self.domain,
        }
    }

    pub fn max_abs(&self) -> f64 {
        match (self.slopes.first(), self.slopes.last()) {
            (Some(a), Some(b)) => a.abs().max(b.abs()),
            _ => 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }
}

fn check_domain(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: xs.len(),
        });
    }
    if let Some(i) = xs.iter().chain(ys).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i % xs.len()));
    }
    if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::UnsortedDomain(i + 1));
    }
    Ok(())
}

pub fn secant_slopes(xs: &[f64], ys: &[f64]) -> Result<SlopeSet> {
    check_domain(xs, ys)?;
    let n = xs.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| (ys[j] - ys[i]) / (xs[j] - xs[i]))
                .collect()
        })
        .collect();
    let mut slopes: Vec<f64> = rows.concat();
    slopes.par_sort_unstable_by(f64::total_cmp);
    Ok(SlopeSet {
        slopes,
        n_samples: n,
        domain: (xs[0], xs[n - 1]),
    })
}

/// Result of [`slope_fill_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum FillOutcome {
    Filled,
    /// `witness` is the midpoint of the widest uncovered stretch of
    /// `[−M, M]`, which has the given `width`.
    Gap { witness: f64, width: f64 },
}

fn check_fill_args(m: f64, eps: Option<f64>) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::BadTolerance(format!("M must be positive, got {m}")));
    }
    if let Some(eps) = eps {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::BadTolerance(format!("eps must be positive, got {eps}")));
        }
    }
    Ok(())
}

/// Whether every point of `[−M, M]` lies within `eps` of some slope.
///
/// Sweeps the sorted slopes, covering `[s − eps, s + eps]` for each, and
/// reports the widest uncovered open stretch. Among equally wide stretches
/// the leftmost wins.
pub fn slope_fill_test(s: &SlopeSet, m: f64, eps: f64) -> Result<FillOutcome> {
    check_fill_args(m, Some(eps))?;
    let mut reach = -m;
    let mut widest: Option<(f64, f64)> = None;
    let mut note = |lo: f64, hi: f64| {
        if hi > lo && widest.is_none_or(|(a, b)| hi - lo > b - a) {
            widest = Some((lo, hi));
        }
    };
    for &slope in &s.slopes {
        let lo = slope - eps;
        if lo > m {
            break;
        }
        note(reach, lo);
        reach = reach.max(slope + eps);
    }
    note(reach, m);
    Ok(match widest {
        None => FillOutcome::Filled,
        Some((lo, hi)) => FillOutcome::Gap {
            witness: (lo + hi) / 2.0,
            width: hi - lo,
        },
    })
}

/// Smallest `eps` for which [`slope_fill_test`] reports `Filled`: the
/// largest distance from a point of `[−M, M]` to the slope set.
///
/// That distance peaks at `±M` or at a midpoint between consecutive slopes
/// lying inside the interval.
pub fn fill_eps(s: &SlopeSet, m: f64) -> Result<f64> {
    check_fill_args(m, None)?;
    if s.slopes.is_empty() {
        return Ok(f64::INFINITY);
    }
    let dist = |t: f64| {
        let p = s.slopes.partition_point(|&v| v < t);
        let mut d = f64::INFINITY;
        if p < s.slopes.len() {
            d = d.min(s.slopes[p] - t);
        }
        if p > 0 {
            d = d.min(t - s.slopes[p - 1]);
        }
        d
    };
    let mut worst = dist(-m).max(dist(m));
    for w in s.slopes.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if (-m..=m).contains(&mid) {
            worst = worst.max(0.5 * (w[1] - w[0]));
        }
    }
    Ok(worst)
}

/// Convex hull of a slope set and its widest internal gap.
///
/// For a continuous function on an interval the slopes fill an interval in
/// the limit, so on refined samples the internal gap should shrink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeHull {
    pub min: f64,
    pub max: f64,
    pub largest_gap: f64,
}

pub fn slope_connected_hull(s: &SlopeSet) -> Result<SlopeHull> {
    let (Some(&min), Some(&max)) = (s.slopes.first(), s.slopes.last()) else {
        return Err(Error::EmptyInput);
    };
    let largest_gap = s
        .slopes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    Ok(SlopeHull {
        min,
        max,
        largest_gap,
    })
}

/// Scalar functions that can be sampled on dyadic grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `slope·x + intercept` on `[lo, hi]`.
    Linear {
        slope: f64,
        intercept: f64,
        lo: f64,
        hi: f64,
    },
    /// `|x|` on `[lo, hi]`.
    AbsoluteValue { lo: f64, hi: f64 },
    /// `Σ aⁿ cos(bⁿ π x)` on `[0, 1]`.
    Weierstrass { a: f64, b: u64 },
    /// The Cantor–Lebesgue function on `[0, 1]`.
    Cantor,
}

impl FunctionSpec {
    /// Builds a function from a kind name and named parameters.
    pub fn from_params(kind: &str, get: impl Fn(&str) -> Option<f64>) -> Result<Self> {
        let spec = match kind {
            "line" | "linear" => FunctionSpec::Linear {
                slope: get("slope").unwrap_or(1.0),
                intercept: get("intercept").unwrap_or(0.0),
                lo: get("lo").unwrap_or(0.0),
                hi: get("hi").unwrap_or(1.0),
            },
            "absolute_value" => FunctionSpec::AbsoluteValue {
                lo: get("lo").unwrap_or(-1.0),
                hi: get("hi").unwrap_or(1.0),
            },
            "weierstrass" => {
                let b = get("b").unwrap_or(3.0);
                if b.fract() != 0.0 || b < 0.0 {
                    return Err(Error::bad_spec("b", "must be a positive odd integer"));
                }
                FunctionSpec::Weierstrass {
                    a: get("a").unwrap_or(0.5),
                    b: b as u64,
                }
            }
            "cantor" | "cantor_graph" => FunctionSpec::Cantor,
            other => return Err(Error::UnknownGenerator(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FunctionSpec::Linear { slope, intercept, lo, hi } => {
                if !(slope.is_finite() && intercept.is_finite()) {
                    return Err(Error::bad_spec("slope", "must be finite"));
                }
                check_interval(lo, hi)
            }
            FunctionSpec::AbsoluteValue { lo, hi } => check_interval(lo, hi),
            FunctionSpec::Weierstrass { a, b } => crate::generators::check_weierstrass(a, b),
            FunctionSpec::Cantor => Ok(()),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match *self {
            FunctionSpec::Linear { lo, hi, .. } | FunctionSpec::AbsoluteValue { lo, hi } => (lo, hi),
            FunctionSpec::Weierstrass { .. } | FunctionSpec::Cantor => (0.0, 1.0),
        }
    }

    /// Samples on the grid of `2^depth + 1` points. Grid point `i` is
    /// `lo + (hi − lo)·(i/2^depth)`; since `i/2^depth` is exact, the grid of
    /// depth `k` is a subset of the grid of depth `k + 1` bit for bit.
    pub fn sample_dyadic(&self, depth: u32) -> Result<(Vec<f64>, Vec<f64>)> {
        if depth > 30 {
            return Err(Error::bad_spec("depth", "must be at most 30"));
        }
        let cells = 1u64 << depth;
        let (lo, hi) = self.domain();
        let xs: Vec<f64> = (0..=cells)
            .map(|i| lo + (hi - lo) * (i as f64 / cells as f64))
            .collect();
        let ys: Vec<f64> = match *self {
            FunctionSpec::Linear { slope, intercept, .. } => {
                xs.iter().map(|x| slope * x + intercept).collect()
            }
            FunctionSpec::AbsoluteValue { .. } => xs.iter().map(|x| x.abs()).collect(),
            FunctionSpec::Weierstrass { a, b } => (0..=cells)
                .into_par_iter()
                .map(|i| weierstrass_dyadic(a, b, i, depth))
                .collect(),
            FunctionSpec::Cantor => (0..=cells)
                .map(|i| crate::generators::cantor_dyadic(i, depth))
                .collect(),
        };
        Ok((xs, ys))
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::bad_spec("lo/hi", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// One depth of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub depth: u32,
    pub n: usize,
    pub max_abs_slope: f64,
    pub fill_eps: f64,
    pub m: f64,
}

/// Secant statistics of `f` on nested dyadic grids.
///
/// Because the grids are nested, the slope sets are nested, so
/// `max_abs_slope` never decreases and `fill_eps` never increases with depth.
pub fn refinement_study(f: &FunctionSpec, depths: &[u32], m: f64) -> Result<Vec<RefinementRow>> {
    f.validate()?;
    check_fill_args(m, None)?;
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    depths
        .into_iter()
        .map(|depth| {
            let (xs, ys) = f.sample_dyadic(depth)?;
            let slopes = secant_slopes(&xs, &ys)?;
            Ok(RefinementRow {
                depth,
                n: xs.len(),
                max_abs_slope: slopes.max_abs(),
                fill_eps: fill_eps(&slopes, m)?,
                m,
            })
        })
        .collect()
}
