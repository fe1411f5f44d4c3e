//! Quickhull in three dimensions, for points on the unit sphere.
//!
//! The faces of the hull of points on the sphere are the Delaunay triangles
//! of those points; the outward normal of a face is a vertex of the
//! spherical Voronoi diagram and the face plane cuts off an empty cap.

use std::collections::{HashMap, HashSet};

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn len3(a: V3) -> f64 {
    dot3(a, a).sqrt()
}

/// Points closer than this to a face plane count as on it.
const PLANE_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct Face {
    pub(crate) v: [usize; 3],
    pub(crate) normal: V3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

pub(crate) struct Hull {
    pts: Vec<V3>,
    faces: Vec<Face>,
    edges: HashMap<(usize, usize), usize>,
}

impl Hull {
    /// Builds the hull, or returns `None` when the points span less than
    /// three dimensions.
    pub(crate) fn build(pts: Vec<V3>) -> Option<Hull> {
        let simplex = initial_simplex(&pts)?;
        let mut hull = Hull {
            pts,
            faces: Vec::new(),
            edges: HashMap::new(),
        };
        let [a, b, c, d] = simplex;
        let centroid = {
            let s = [a, b, c, d]
                .iter()
                .fold([0.0; 3], |acc, &i| [acc[0] + hull.pts[i][0], acc[1] + hull.pts[i][1], acc[2] + hull.pts[i][2]]);
            [s[0] / 4.0, s[1] / 4.0, s[2] / 4.0]
        };
        for tri in [[a, b, c], [a, d, b], [b, d, c], [c, d, a]] {
            let f = hull.make_face(tri);
            let f = if dot3(f.normal, centroid) - f.offset > 0.0 {
                hull.make_face([tri[0], tri[2], tri[1]])
            } else {
                f
            };
            hull.push_face(f);
        }
        let initial: Vec<usize> = (0..hull.pts.len()).filter(|i| !simplex.contains(i)).collect();
        let faces: Vec<usize> = (0..4).collect();
        hull.assign(&initial, &faces);
        hull.expand();
        Some(hull)
    }

    fn make_face(&self, v: [usize; 3]) -> Face {
        let (p, q, r) = (self.pts[v[0]], self.pts[v[1]], self.pts[v[2]]);
        let n = cross(sub(q, p), sub(r, p));
        let l = len3(n);
        let normal = [n[0] / l, n[1] / l, n[2] / l];
        let offset = (dot3(normal, p) + dot3(normal, q) + dot3(normal, r)) / 3.0;
        Face {
            v,
            normal,
            offset,
            outside: Vec::new(),
            alive: true,
        }
    }

    fn push_face(&mut self, f: Face) -> usize {
        let id = self.faces.len();
        let [a, b, c] = f.v;
        for e in [(a, b), (b, c), (c, a)] {
            self.edges.insert(e, id);
        }
        self.faces.push(f);
        id
    }

    fn height(&self, f: usize, p: usize) -> f64 {
        let face = &self.faces[f];
        dot3(face.normal, self.pts[p]) - face.offset
    }

    /// Gives each point to the first listed face it lies above; the rest are
    /// inside the hull and dropped.
    fn assign(&mut self, points: &[usize], faces: &[usize]) {
        for &p in points {
            if let Some(&f) = faces.iter().find(|&&f| self.height(f, p) > PLANE_EPS) {
                self.faces[f].outside.push(p);
            }
        }
    }

    fn expand(&mut self) {
        let mut cursor = 0;
        while cursor < self.faces.len() {
            if !self.faces[cursor].alive || self.faces[cursor].outside.is_empty() {
                cursor += 1;
                continue;
            }
            let eye = *self.faces[cursor]
                .outside
                .iter()
                .max_by(|&&a, &&b| {
                    self.height(cursor, a)
                        .total_cmp(&self.height(cursor, b))
                        .then(b.cmp(&a))
                })
                .unwrap();

            // Faces visible from the eye form a connected patch.
            let mut visible = vec![cursor];
            let mut is_visible = HashSet::from([cursor]);
            let mut rejected = HashSet::new();
            let mut horizon = Vec::new();
            let mut k = 0;
            while k < visible.len() {
                let f = visible[k];
                k += 1;
                let [a, b, c] = self.faces[f].v;
                for (x, y) in [(a, b), (b, c), (c, a)] {
                    let nb = self.edges[&(y, x)];
                    if is_visible.contains(&nb) {
                        continue;
                    }
                    if !rejected.contains(&nb) && self.height(nb, eye) > PLANE_EPS {
                        is_visible.insert(nb);
                        visible.push(nb);
                    } else {
                        rejected.insert(nb);
                        horizon.push((x, y));
                    }
                }
            }

            let mut orphans = Vec::new();
            for &f in &visible {
                let face = &mut self.faces[f];
                face.alive = false;
                orphans.extend(face.outside.drain(..).filter(|&p| p != eye));
                let [a, b, c] = face.v;
                for e in [(a, b), (b, c), (c, a)] {
                    if self.edges.get(&e) == Some(&f) {
                        self.edges.remove(&e);
                    }
                }
            }
            let mut created = Vec::with_capacity(horizon.len());
            for (x, y) in horizon {
                let f = self.make_face([x, y, eye]);
                created.push(self.push_face(f));
            }
            orphans.sort_unstable();
            self.assign(&orphans, &created);
        }
    }

    pub(crate) fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.alive)
    }

    pub(crate) fn point(&self, i: usize) -> V3 {
        self.pts[i]
    }
}

fn initial_simplex(pts: &[V3]) -> Option<[usize; 4]> {
    if pts.len() < 4 {
        return None;
    }
    let a = 0;
    let b = (1..pts.len()).max_by(|&i, &j| {
        len3(sub(pts[i], pts[a]))
            .total_cmp(&len3(sub(pts[j], pts[a])))
            .then(j.cmp(&i))
    })?;
    let ab = sub(pts[b], pts[a]);
    if len3(ab) < 1e-9 {
        return None;
    }
    let line_dist = |i: usize| len3(cross(ab, sub(pts[i], pts[a]))) / len3(ab);
    let c = (0..pts.len()).max_by(|&i, &j| line_dist(i).total_cmp(&line_dist(j)).then(j.cmp(&i)))?;
    if line_dist(c) < 1e-9 {
        return None;
    }
    let n = cross(ab, sub(pts[c], pts[a]));
    let ln = len3(n);
    let plane_dist = |i: usize| (dot3(n, sub(pts[i], pts[a])) / ln).abs();
    let d = (0..pts.len()).max_by(|&i, &j| plane_dist(i).total_cmp(&plane_dist(j)).then(j.cmp(&i)))?;
    if plane_dist(d) < 1e-9 {
        return None;
    }
    Some([a, b, c, d])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sphere_points(n: usize, seed: u64) -> Vec<V3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let z: f64 = rng.random::<f64>() * 2.0 - 1.0;
                let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                let r = (1.0 - z * z).sqrt();
                [r * t.cos(), r * t.sin(), z]
            })
            .collect()
    }

    #[test]
    fn every_point_is_below_every_face() {
        for seed in 0..5 {
            let pts = sphere_points(300, seed);
            let hull = Hull::build(pts.clone()).unwrap();
            let faces: Vec<&Face> = hull.faces().collect();
            // Euler: a triangulated sphere with V vertices has 2V − 4 faces.
            assert_eq!(faces.len(), 2 * pts.len() - 4);
            for f in faces {
                for p in &pts {
                    assert!(dot3(f.normal, *p) - f.offset <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn octahedron() {
        let mut pts = Vec::new();
        for a in 0..3 {
            for s in [1.0, -1.0] {
                let mut p = [0.0; 3];
                p[a] = s;
                pts.push(p);
            }
        }
        let hull = Hull::build(pts).unwrap();
        let faces: Vec<&Face> = hull.faces().collect();
        assert_eq!(faces.len(), 8);
        for f in faces {
            assert!((f.offset - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_input_has_no_hull() {
        let pts = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        assert!(Hull::build(pts).is_none());
    }
}
