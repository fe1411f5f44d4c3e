//! Directions, the projective quotient and rotations.
//!
//! Everything here works on plain `f64` coordinates. A [`UnitDirection`] is a
//! point of the sphere, a [`ProjectiveDirection`] is an antipodal class with a
//! canonical representative, and a [`Rotation`] is a proper orthogonal matrix.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Two points closer than this are treated as the same point.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-12;

/// Coordinates at or below this magnitude are ignored by the canonical sign rule.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// Allowed deviation of a unit vector's norm from one.
pub const UNIT_TOLERANCE: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Flips `v` in place so that it satisfies the canonical sign rule.
pub(crate) fn canonicalize_in_place(v: &mut [f64]) {
    if let Some(&lead) = v.iter().find(|c| c.abs() > SIGN_THRESHOLD) {
        if lead < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

/// Angle between the lines spanned by two unit vectors, in `[0, π/2]`.
///
/// Mathematically this is `arccos(|a·b|)`, evaluated as
/// `2·atan2(|a − s b|, |a + s b|)` with `s = sign(a·b)`, which keeps full
/// relative precision for nearly parallel lines.
pub(crate) fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    let s = if dot(a, b) < 0.0 { -1.0 } else { 1.0 };
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - s * y;
        let p = x + s * y;
        diff += d * d;
        sum += p * p;
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Lexicographic order on coordinates using `total_cmp`.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// A point of the unit sphere `S^{d-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitDirection(Vec<f64>);

impl UnitDirection {
    /// Wraps coordinates that already have unit norm.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::BadDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(0));
        }
        let n = norm(&coords);
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit(n));
        }
        Ok(UnitDirection(coords))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalize(mut coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::BadDimension(coords.len()));
        }
        let n = norm(&coords);
        if !n.is_finite() || n <= COINCIDENCE_THRESHOLD {
            return Err(Error::NotUnit(n));
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Ok(UnitDirection(coords))
    }

    /// The standard basis vector `e_axis` (zero based).
    pub fn axis(dim: usize, axis: usize) -> Self {
        assert!(dim >= 2 && axis < dim);
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        UnitDirection(v)
    }

    /// The last basis vector, the "vertical" axis.
    pub fn pole(dim: usize) -> Self {
        Self::axis(dim, dim - 1)
    }

    /// Direction at angle `theta` from the positive x axis in the plane.
    pub fn from_angle(theta: f64) -> Self {
        UnitDirection(vec![theta.cos(), theta.sin()])
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        UnitDirection(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Neg for &UnitDirection {
    type Output = UnitDirection;

    fn neg(self) -> UnitDirection {
        UnitDirection(self.0.iter().map(|c| -c).collect())
    }
}

impl Neg for UnitDirection {
    type Output = UnitDirection;

    fn neg(self) -> UnitDirection {
        -&self
    }
}

impl TryFrom<Vec<f64>> for UnitDirection {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitDirection::new(v)
    }
}

impl From<UnitDirection> for Vec<f64> {
    fn from(u: UnitDirection) -> Self {
        u.0
    }
}

/// An element of `RP^{d-1}`: the line through the origin spanned by `±rep`.
///
/// The representative always satisfies the sign rule: its first coordinate
/// of magnitude above [`SIGN_THRESHOLD`] is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProjectiveDirection(UnitDirection);

impl ProjectiveDirection {
    pub fn rep(&self) -> &UnitDirection {
        &self.0
    }

    pub fn coords(&self) -> &[f64] {
        self.0.coords()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// The class of the line at angle `theta` in the plane.
    pub fn from_angle(theta: f64) -> Self {
        projective_canonical(&UnitDirection::from_angle(theta))
    }

    /// Position on `RP^1 = [0, π)/(0 ∼ π)`. Only meaningful for `d = 2`.
    pub fn angle(&self) -> f64 {
        rp1_angle(self.coords())
    }

    /// Rounds coordinates of magnitude at most [`SIGN_THRESHOLD`] to zero and
    /// renormalizes, so that centers lying on a coordinate hyperplane up to
    /// rounding land on it exactly.
    pub fn snapped(&self) -> Self {
        let mut v = self.coords().to_vec();
        let mut changed = false;
        for c in v.iter_mut() {
            if *c != 0.0 && c.abs() <= SIGN_THRESHOLD {
                *c = 0.0;
                changed = true;
            }
        }
        if !changed {
            return self.clone();
        }
        let n = norm(&v);
        v.iter_mut().for_each(|c| *c /= n);
        canonicalize_in_place(&mut v);
        ProjectiveDirection(UnitDirection(v))
    }

    pub(crate) fn from_canonical_raw(coords: Vec<f64>) -> Self {
        ProjectiveDirection(UnitDirection(coords))
    }
}

impl TryFrom<Vec<f64>> for ProjectiveDirection {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Ok(projective_canonical(&UnitDirection::new(v)?))
    }
}

impl From<ProjectiveDirection> for Vec<f64> {
    fn from(p: ProjectiveDirection) -> Self {
        p.0 .0
    }
}

/// Angle in `[0, π)` of a planar line given by any spanning vector.
pub(crate) fn rp1_angle(v: &[f64]) -> f64 {
    let t = v[1].atan2(v[0]);
    let t = if t < 0.0 { t + PI } else { t };
    if t >= PI {
        t - PI
    } else {
        t
    }
}

/// Distance on `RP^1` between two angles.
pub fn rp1_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(PI);
    d.min(PI - d)
}

/// Unit vector of the ray from `x` to `y`.
pub fn pair_direction(x: &[f64], y: &[f64]) -> Result<UnitDirection> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a).collect();
    let len = norm(&diff);
    if len <= COINCIDENCE_THRESHOLD {
        return Err(Error::CoincidentPoints(0, 1, len));
    }
    Ok(UnitDirection(diff.into_iter().map(|c| c / len).collect()))
}

/// Writes the unit direction from `x` to `y` into `out`, returning `false`
/// when the points coincide.
#[inline]
pub(crate) fn pair_direction_into(x: &[f64], y: &[f64], out: &mut [f64]) -> bool {
    let mut sq = 0.0;
    for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
        *o = b - a;
        sq += *o * *o;
    }
    let len = sq.sqrt();
    if len <= COINCIDENCE_THRESHOLD {
        return false;
    }
    out.iter_mut().for_each(|c| *c /= len);
    true
}

pub fn projective_canonical(u: &UnitDirection) -> ProjectiveDirection {
    let mut v = u.coords().to_vec();
    canonicalize_in_place(&mut v);
    ProjectiveDirection(UnitDirection(v))
}

/// Angle between two lines, in `[0, π/2]`.
pub fn projective_distance(p: &ProjectiveDirection, q: &ProjectiveDirection) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(line_angle(p.coords(), q.coords()))
}

/// A proper rotation of `ℝ^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Rotation {
    dim: usize,
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Rotation { dim, m }
    }

    /// Rotation of the plane by `theta` radians, counterclockwise.
    pub fn planar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation {
            dim: 2,
            m: vec![c, -s, s, c],
        }
    }

    /// Checks orthogonality and orientation before accepting a matrix.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        let mut m = Vec::with_capacity(dim * dim);
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            m.extend_from_slice(r);
        }
        let rot = Rotation { dim, m };
        if rot.orthogonality_defect() > 1e-10 || (rot.determinant() - 1.0).abs() > 1e-10 {
            return Err(Error::Internal("matrix is not a proper rotation".into()));
        }
        Ok(rot)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.m[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.m.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[j * d + i] = self.m[i * d + j];
            }
        }
        Rotation { dim: d, m }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Rotation) -> Self {
        let d = self.dim;
        assert_eq!(d, other.dim);
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                for j in 0..d {
                    m[i * d + j] += a * other.m[k * d + j];
                }
            }
        }
        Rotation { dim: d, m }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(v, &mut out);
        out
    }

    pub(crate) fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), v);
        }
    }

    /// `max |RᵀR − I|` over entries.
    pub fn orthogonality_defect(&self) -> f64 {
        let prod = self.transpose().compose(self);
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod.m[i * d + j] - target).abs());
            }
        }
        worst
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let d = self.dim;
        let mut a = self.m.clone();
        let mut det = 1.0;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| a[x * d + col].abs().total_cmp(&a[y * d + col].abs()))
                .unwrap();
            if a[pivot * d + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot * d + j);
                }
                det = -det;
            }
            let p = a[col * d + col];
            det *= p;
            for r in col + 1..d {
                let f = a[r * d + col] / p;
                for j in col..d {
                    a[r * d + j] -= f * a[col * d + j];
                }
            }
        }
        det
    }
}

impl TryFrom<Vec<Vec<f64>>> for Rotation {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Rotation::from_rows(rows)
    }
}

impl From<Rotation> for Vec<Vec<f64>> {
    fn from(r: Rotation) -> Self {
        r.rows()
    }
}

/// Householder reflection `I − 2vvᵀ/(vᵀv)`.
fn householder(v: &[f64]) -> Vec<f64> {
    let d = v.len();
    let vv = dot(v, v);
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[i * d + j] = delta - 2.0 * v[i] * v[j] / vv;
        }
    }
    m
}

/// A rotation taking `u` to the pole `e_d`.
///
/// Built as a Householder reflection onto `±e_d` followed by a coordinate
/// reflection that fixes `e_d`, so the result is a product of two
/// reflections. The reflection vector is `u + e_d` when `u_d ≥ 0` and
/// `u − e_d` otherwise, which keeps it away from zero. For `u = −e_d` this
/// yields the diagonal rotation flipping the last two coordinates.
pub fn rotation_to_pole(u: &UnitDirection) -> Rotation {
    let d = u.dim();
    let last = d - 1;
    let mut v = u.coords().to_vec();
    let flip_row = if v[last] >= 0.0 {
        v[last] += 1.0;
        last
    } else {
        v[last] -= 1.0;
        last - 1
    };
    let mut m = householder(&v);
    for j in 0..d {
        m[flip_row * d + j] = -m[flip_row * d + j];
    }
    Rotation { dim: d, m }
}

/// Applies `rotation` to every point of the cloud.
pub fn apply_rotation(rotation: &Rotation, cloud: &PointCloud) -> Result<PointCloud> {
    if rotation.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            found: rotation.dim(),
        });
    }
    let d = cloud.dim();
    let mut coords = vec![0.0; cloud.len() * d];
    for (p, out) in cloud.points().zip(coords.chunks_mut(d)) {
        rotation.apply_into(p, out);
    }
    Ok(PointCloud::from_trusted(d, coords, cloud.label().to_string()))
}
