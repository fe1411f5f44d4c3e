//! Nearest-class queries against a [`DirectionSet`].

use std::f64::consts::PI;

use crate::direction_set::DirectionSet;
use crate::geometry::{line_angle, rp1_angle, rp1_distance};

/// Answers "how far is the nearest class" in the projective metric.
pub(crate) enum DirectionIndex {
    /// Sorted `RP^1` angles in `[0, π)`.
    Circle(Vec<f64>),
    /// Every representative and its antipode, so chord distance to the
    /// nearest stored point gives the projective distance.
    Tree(KdTree),
}

impl DirectionIndex {
    pub(crate) fn new(set: &DirectionSet) -> Self {
        if set.dim() == 2 {
            let mut angles: Vec<f64> = set.reps().map(rp1_angle).collect();
            angles.sort_by(f64::total_cmp);
            DirectionIndex::Circle(angles)
        } else {
            let d = set.dim();
            let mut pts = Vec::with_capacity(set.flat().len() * 2);
            for r in set.reps() {
                pts.extend_from_slice(r);
                pts.extend(r.iter().map(|c| -c));
            }
            DirectionIndex::Tree(KdTree::build(d, pts))
        }
    }

    /// Projective distance from unit vector `q` to the nearest class, or
    /// `π/2` (the diameter) for an empty set.
    pub(crate) fn nearest(&self, q: &[f64]) -> f64 {
        match self {
            DirectionIndex::Circle(angles) => {
                if angles.is_empty() {
                    return PI / 2.0;
                }
                let t = rp1_angle(q);
                let pos = angles.partition_point(|&a| a < t);
                let after = angles[pos % angles.len()];
                let before = angles[(pos + angles.len() - 1) % angles.len()];
                rp1_distance(t, after).min(rp1_distance(t, before))
            }
            DirectionIndex::Tree(tree) => match tree.nearest(q) {
                Some(i) => line_angle(tree.point(i), q),
                None => PI / 2.0,
            },
        }
    }
}

/// Static kd-tree over points of any dimension, stored as an implicit
/// balanced tree: the node of a range is its midpoint.
pub(crate) struct KdTree {
    dim: usize,
    pts: Vec<f64>,
    order: Vec<u32>,
    axis: Vec<u8>,
}

impl KdTree {
    pub(crate) fn build(dim: usize, pts: Vec<f64>) -> Self {
        let n = pts.len() / dim;
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut axis = vec![0u8; n];
        build_range(dim, &pts, &mut order, &mut axis);
        KdTree {
            dim,
            pts,
            order,
            axis,
        }
    }

    pub(crate) fn point(&self, i: usize) -> &[f64] {
        &self.pts[i * self.dim..(i + 1) * self.dim]
    }

    fn dist2(&self, i: usize, q: &[f64]) -> f64 {
        self.point(i)
            .iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Index of the closest stored point; ties go to the lowest index.
    pub(crate) fn nearest(&self, q: &[f64]) -> Option<usize> {
        if self.order.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.search(0, self.order.len(), q, &mut best);
        Some(best.1)
    }

    fn search(&self, lo: usize, hi: usize, q: &[f64], best: &mut (f64, usize)) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let idx = self.order[mid] as usize;
        let d2 = self.dist2(idx, q);
        if d2 < best.0 || (d2 == best.0 && idx < best.1) {
            *best = (d2, idx);
        }
        let ax = self.axis[mid] as usize;
        let delta = q[ax] - self.point(idx)[ax];
        let (near, far) = if delta < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, q, best);
        if delta * delta <= best.0 {
            self.search(far.0, far.1, q, best);
        }
    }
}

fn build_range(dim: usize, pts: &[f64], order: &mut [u32], axis: &mut [u8]) {
    if order.len() <= 1 {
        return;
    }
    let coord = |i: u32, a: usize| pts[i as usize * dim + a];
    // Split on the axis of largest spread.
    let ax = (0..dim)
        .max_by(|&a, &b| {
            let spread = |a: usize| {
                let (lo, hi) = order.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    (lo.min(coord(i, a)), hi.max(coord(i, a)))
                });
                hi - lo
            };
            spread(a).total_cmp(&spread(b)).then(b.cmp(&a))
        })
        .unwrap();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        coord(a, ax).total_cmp(&coord(b, ax)).then(a.cmp(&b))
    });
    axis[mid] = ax as u8;
    let (left, rest) = order.split_at_mut(mid);
    let (left_axis, rest_axis) = axis.split_at_mut(mid);
    build_range(dim, pts, left, left_axis);
    build_range(dim, pts, &mut rest[1..], &mut rest_axis[1..]);
}
