//! Deterministic fixture clouds.
//!
//! Every generator that draws random numbers uses ChaCha8 (the `rand_chacha`
//! stream cipher generator with 8 rounds) seeded through
//! `SeedableRng::seed_from_u64`, so the parameters and seed pin the cloud
//! down to the last bit on every platform.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Shapes the generators know how to sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// A random walk graph over `[0, ~1]` whose increments satisfy
    /// `|Δy| < c·Δx`, so every secant slope is below `c` in magnitude.
    LipschitzRandom { c: f64, n: usize },
    /// `Σ aⁿ cos(bⁿ π x)` on the dyadic grid of `[0, 1]` with `2^depth + 1`
    /// points.
    Weierstrass { a: f64, b: u64, depth: u32 },
    /// `|x|` on `n` equally spaced points of `[−1, 1]`.
    AbsoluteValue { n: usize },
    /// `n` points on a random line in `ℝ^dim`.
    Line { n: usize, dim: usize },
    /// `n` equally spaced points on the unit circle.
    Circle { n: usize },
    /// `k` points on a random line in the plane plus one point off it.
    CollinearPlusPoint { k: usize },
    /// `n` uniform points in the unit ball of `ℝ^dim`.
    RandomBall { n: usize, dim: usize },
    /// The Cantor staircase on the dyadic grid of `[0, 1]`.
    CantorGraph { depth: u32 },
    /// `z = w1·x + w2·y` on a `grid × grid` lattice of `[0, 1]²`.
    PlaneSlice { grid: usize, w1: f64, w2: f64 },
}

/// A generator plus the seed for its random choices. Deterministic kinds
/// ignore the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: Generator,
    pub seed: u64,
}

pub const GENERATOR_KINDS: &[&str] = &[
    "lipschitz_random",
    "weierstrass",
    "absolute_value",
    "line",
    "circle",
    "collinear_plus_point",
    "random_ball",
    "cantor_graph",
    "plane_slice",
];

/// Largest dyadic depth accepted by the grid generators.
pub const MAX_DEPTH: u32 = 20;

/// Pulls named numeric parameters out of a map, tracking which were used.
struct Params<'a> {
    map: &'a BTreeMap<String, f64>,
    used: Vec<&'static str>,
}

impl Params<'_> {
    fn real(&mut self, name: &'static str, default: f64) -> Result<f64> {
        self.used.push(name);
        let v = self.map.get(name).copied().unwrap_or(default);
        if !v.is_finite() {
            return Err(Error::bad_spec(name, "must be finite"));
        }
        Ok(v)
    }

    fn int(&mut self, name: &'static str, default: u64) -> Result<u64> {
        self.used.push(name);
        match self.map.get(name) {
            None => Ok(default),
            Some(&v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as u64),
            Some(&v) => Err(Error::bad_spec(name, format!("must be a non-negative integer, got {v}"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(Error::bad_spec(k, "unknown parameter for this generator")),
            None => Ok(()),
        }
    }
}

impl GeneratorSpec {
    pub fn new(kind: Generator, seed: u64) -> Result<Self> {
        let spec = GeneratorSpec { kind, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a generator from a kind name and named parameters. Missing
    /// parameters take their defaults and unknown ones are rejected.
    pub fn from_params(kind: &str, params: &BTreeMap<String, f64>, seed: u64) -> Result<Self> {
        let mut p = Params { map: params, used: Vec::new() };
        let kind = match kind {
            "lipschitz_random" => Generator::LipschitzRandom {
                c: p.real("c", 1.0)?,
                n: p.int("n", 100)? as usize,
            },
            "weierstrass" => Generator::Weierstrass {
                a: p.real("a", 0.5)?,
                b: p.int("b", 3)?,
                depth: p.int("depth", 8)? as u32,
            },
            "absolute_value" => Generator::AbsoluteValue { n: p.int("n", 201)? as usize },
            "line" => Generator::Line {
                n: p.int("n", 10)? as usize,
                dim: p.int("dim", 2)? as usize,
            },
            "circle" => Generator::Circle { n: p.int("n", 8)? as usize },
            "collinear_plus_point" => Generator::CollinearPlusPoint { k: p.int("k", 10)? as usize },
            "random_ball" => Generator::RandomBall {
                n: p.int("n", 100)? as usize,
                dim: p.int("dim", 3)? as usize,
            },
            "cantor_graph" => Generator::CantorGraph { depth: p.int("depth", 8)? as u32 },
            "plane_slice" => Generator::PlaneSlice {
                grid: p.int("grid", 10)? as usize,
                w1: p.real("w1", 0.5)?,
                w2: p.real("w2", 0.5)?,
            },
            other => return Err(Error::UnknownGenerator(other.to_string())),
        };
        p.finish()?;
        GeneratorSpec::new(kind, seed)
    }

    pub fn validate(&self) -> Result<()> {
        fn at_least(field: &str, v: usize, min: usize) -> Result<()> {
            if v < min {
                return Err(Error::bad_spec(field, format!("must be at least {min}, got {v}")));
            }
            Ok(())
        }
        fn depth(d: u32) -> Result<()> {
            if d > MAX_DEPTH {
                return Err(Error::bad_spec("depth", format!("must be at most {MAX_DEPTH}, got {d}")));
            }
            Ok(())
        }
        match self.kind {
            Generator::LipschitzRandom { c, n } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::bad_spec("c", format!("must be positive, got {c}")));
                }
                at_least("n", n, 2)
            }
            Generator::Weierstrass { a, b, depth: d } => {
                check_weierstrass(a, b)?;
                depth(d)
            }
            Generator::AbsoluteValue { n } | Generator::Circle { n } => at_least("n", n, 2),
            Generator::Line { n, dim } | Generator::RandomBall { n, dim } => {
                at_least("n", n, 2)?;
                at_least("dim", dim, 2)
            }
            Generator::CollinearPlusPoint { k } => at_least("k", k, 2),
            Generator::CantorGraph { depth: d } => depth(d),
            Generator::PlaneSlice { grid, w1, w2 } => {
                if !(w1.is_finite() && w2.is_finite()) {
                    return Err(Error::bad_spec("w", "weights must be finite"));
                }
                at_least("grid", grid, 2)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Generator::LipschitzRandom { .. } => "lipschitz_random",
            Generator::Weierstrass { .. } => "weierstrass",
            Generator::AbsoluteValue { .. } => "absolute_value",
            Generator::Line { .. } => "line",
            Generator::Circle { .. } => "circle",
            Generator::CollinearPlusPoint { .. } => "collinear_plus_point",
            Generator::RandomBall { .. } => "random_ball",
            Generator::CantorGraph { .. } => "cantor_graph",
            Generator::PlaneSlice { .. } => "plane_slice",
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.kind_name();
        match self.kind {
            Generator::LipschitzRandom { c, n } => write!(f, "{name}(c={c}, n={n}, seed={})", self.seed),
            Generator::Weierstrass { a, b, depth } => write!(f, "{name}(a={a}, b={b}, depth={depth})"),
            Generator::AbsoluteValue { n } | Generator::Circle { n } => write!(f, "{name}(n={n})"),
            Generator::Line { n, dim } | Generator::RandomBall { n, dim } => {
                write!(f, "{name}(n={n}, dim={dim}, seed={})", self.seed)
            }
            Generator::CollinearPlusPoint { k } => write!(f, "{name}(k={k}, seed={})", self.seed),
            Generator::CantorGraph { depth } => write!(f, "{name}(depth={depth})"),
            Generator::PlaneSlice { grid, w1, w2 } => write!(f, "{name}(grid={grid}, w1={w1}, w2={w2})"),
        }
    }
}

/// `0 < a < 1`, `b` an odd integer at least 3, and `a·b > 1`.
///
/// The last condition makes the derivative series diverge, which is what
/// the refinement experiments need. It is weaker than the classical
/// condition for nowhere differentiability.
pub(crate) fn check_weierstrass(a: f64, b: u64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::bad_spec("a", format!("must lie in (0, 1), got {a}")));
    }
    if b < 3 || b % 2 == 0 {
        return Err(Error::bad_spec("b", format!("must be an odd integer >= 3, got {b}")));
    }
    if a * b as f64 <= 1.0 {
        return Err(Error::bad_spec("a", format!("need a*b > 1, got {}", a * b as f64)));
    }
    Ok(())
}

/// Index of the last term kept: the tail `Σ_{n>N} aⁿ = a^{N+1}/(1−a)` is
/// below `1e-12`.
pub fn weierstrass_terms(a: f64) -> u32 {
    ((1e-12 * (1.0 - a)).ln() / a.ln()).ceil() as u32
}

/// The truncated Weierstrass sum at `x = i/2^depth`.
///
/// `cos(bⁿπx)` only depends on `bⁿ·i mod 2^{depth+1}`, which is computed in
/// integers, so large frequencies lose no precision to argument reduction.
pub(crate) fn weierstrass_dyadic(a: f64, b: u64, i: u64, depth: u32) -> f64 {
    let period = 1u64 << (depth + 1);
    let mask = period - 1;
    let half = period / 2;
    let mut bn = 1u64;
    let mut an = 1.0;
    let mut sum = 0.0;
    for _ in 0..=weierstrass_terms(a) {
        let mut phase = (bn * (i & mask)) & mask;
        // cos(π(2 − t)) = cos(πt): fold into [0, 1] for accuracy.
        if phase > half {
            phase = period - phase;
        }
        sum += an * (PI * (phase as f64 / half as f64)).cos();
        an *= a;
        bn = bn.wrapping_mul(b) & mask;
    }
    sum
}

/// The Cantor function at `x = i/2^depth`, from the ternary digits of `x`
/// generated in exact integer arithmetic.
pub(crate) fn cantor_dyadic(i: u64, depth: u32) -> f64 {
    let den = 1u64 << depth;
    if i >= den {
        return 1.0;
    }
    let mut num = i;
    let mut scale = 0.5;
    let mut value = 0.0;
    for _ in 0..64 {
        let t = num * 3;
        let digit = t / den;
        num = t % den;
        match digit {
            1 => return value + scale,
            2 => value += scale,
            _ => {}
        }
        scale *= 0.5;
        if num == 0 {
            break;
        }
    }
    value
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn dyadic_graph(depth: u32, f: impl Fn(u64) -> f64) -> Vec<f64> {
    let cells = 1u64 << depth;
    (0..=cells)
        .flat_map(|i| [i as f64 / cells as f64, f(i)])
        .collect()
}

/// Samples the cloud described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (dim, coords): (usize, Vec<f64>) = match spec.kind {
        Generator::LipschitzRandom { c, n } => {
            // Shrinking the bound by a relative 1e-9 keeps every pairwise
            // slope below c after rounding in the running sums.
            let c = c * (1.0 - 1e-9);
            let (mut x, mut y) = (0.0, 0.0);
            let mut coords = Vec::with_capacity(2 * n);
            for _ in 0..n {
                coords.extend([x, y]);
                let dx = (0.5 + rng.random::<f64>()) / n as f64;
                let s = 2.0 * rng.random::<f64>() - 1.0;
                x += dx;
                y += c * dx * s;
            }
            (2, coords)
        }
        Generator::Weierstrass { a, b, depth } => (2, dyadic_graph(depth, |i| weierstrass_dyadic(a, b, i, depth))),
        Generator::AbsoluteValue { n } => {
            let coords = (0..n)
                .flat_map(|i| {
                    let x = -1.0 + 2.0 * (i as f64 / (n - 1) as f64);
                    [x, x.abs()]
                })
                .collect();
            (2, coords)
        }
        Generator::Line { n, dim } => {
            let v = random_unit(&mut rng, dim);
            let p: Vec<f64> = (0..dim).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let coords = (0..n)
                .flat_map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    p.iter().zip(&v).map(move |(p, v)| p + t * v).collect::<Vec<_>>()
                })
                .collect();
            (dim, coords)
        }
        Generator::Circle { n } => {
            let coords = (0..n)
                .flat_map(|k| {
                    let t = TAU * k as f64 / n as f64;
                    [t.cos(), t.sin()]
                })
                .collect();
            (2, coords)
        }
        Generator::CollinearPlusPoint { k } => {
            let v = random_unit(&mut rng, 2);
            let p = [2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0];
            let mut coords = Vec::with_capacity(2 * (k + 1));
            for i in 0..k {
                let t = i as f64 / (k - 1) as f64;
                coords.extend([p[0] + t * v[0], p[1] + t * v[1]]);
            }
            // Unit distance off the line, above its midpoint.
            coords.extend([p[0] + 0.5 * v[0] - v[1], p[1] + 0.5 * v[1] + v[0]]);
            (2, coords)
        }
        Generator::RandomBall { n, dim } => {
            let mut coords = Vec::with_capacity(n * dim);
            for _ in 0..n {
                let u = random_unit(&mut rng, dim);
                let r = rng.random::<f64>().powf(1.0 / dim as f64);
                coords.extend(u.into_iter().map(|c| c * r));
            }
            (dim, coords)
        }
        Generator::CantorGraph { depth } => (2, dyadic_graph(depth, |i| cantor_dyadic(i, depth))),
        Generator::PlaneSlice { grid, w1, w2 } => {
            let step = |i: usize| i as f64 / (grid - 1) as f64;
            let mut coords = Vec::with_capacity(3 * grid * grid);
            for i in 0..grid {
                for j in 0..grid {
                    let (x, y) = (step(i), step(j));
                    coords.extend([x, y, w1 * x + w2 * y]);
                }
            }
            (3, coords)
        }
    };
    Ok(PointCloud::from_flat(dim, coords, false)?.with_label(spec.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction_set::{count_distinct_directions, unoriented_directions, DEFAULT_DEDUP_TOL};

    fn spec(kind: Generator, seed: u64) -> GeneratorSpec {
        GeneratorSpec::new(kind, seed).unwrap()
    }

    #[test]
    fn circle_eight_has_eight_classes() {
        let cloud = generate(&spec(Generator::Circle { n: 8 }, 0)).unwrap();
        assert_eq!(count_distinct_directions(&cloud, DEFAULT_DEDUP_TOL).unwrap(), 8);
    }

    #[test]
    fn lipschitz_walk_respects_bound() {
        for c in [0.5, 2.0, 5.0] {
            let cloud = generate(&spec(Generator::LipschitzRandom { c, n: 100 }, 7)).unwrap();
            for i in 0..cloud.len() {
                for j in i + 1..cloud.len() {
                    let (p, q) = (cloud.point(i), cloud.point(j));
                    assert!(((q[1] - p[1]) / (q[0] - p[0])).abs() <= c);
                }
            }
        }
    }

    #[test]
    fn collinear_plus_point_counts() {
        for k in [2, 5, 10] {
            let cloud = generate(&spec(Generator::CollinearPlusPoint { k }, 3)).unwrap();
            assert!(count_distinct_directions(&cloud, DEFAULT_DEDUP_TOL).unwrap() > k);
        }
    }

    #[test]
    fn lines_have_one_class() {
        for dim in [2, 3, 5] {
            let cloud = generate(&spec(Generator::Line { n: 40, dim }, 11)).unwrap();
            assert_eq!(unoriented_directions(&cloud, DEFAULT_DEDUP_TOL, None, 0).unwrap().len(), 1);
        }
    }

    #[test]
    fn reproducible() {
        let s = spec(Generator::RandomBall { n: 50, dim: 4 }, 99);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        for p in generate(&s).unwrap().points() {
            assert!(p.iter().map(|c| c * c).sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn weierstrass_terms_rule() {
        assert_eq!(weierstrass_terms(0.5), 41);
        assert!(0.5f64.powi(42) / 0.5 < 1e-12);
    }

    #[test]
    fn weierstrass_matches_direct_sum_at_coarse_points() {
        // At x = 1/4 the direct sum is accurate enough to compare.
        let direct: f64 = (0..=41).map(|n| 0.5f64.powi(n) * (3f64.powi(n) * PI * 0.25).cos()).sum();
        assert!((weierstrass_dyadic(0.5, 3, 1, 2) - direct).abs() < 1e-9);
        // x = 0 sums the geometric series.
        assert!((weierstrass_dyadic(0.5, 3, 0, 5) - 2.0).abs() < 1e-11);
        // x = 1: cos(3ⁿπ) = −1 for all n.
        assert!((weierstrass_dyadic(0.5, 3, 32, 5) + 2.0).abs() < 1e-11);
    }

    #[test]
    fn nested_grids_agree() {
        for i in 0..=16u64 {
            assert_eq!(weierstrass_dyadic(0.5, 3, i, 4), weierstrass_dyadic(0.5, 3, 2 * i, 5));
            assert_eq!(cantor_dyadic(i, 4), cantor_dyadic(2 * i, 5));
        }
    }

    #[test]
    fn cantor_values() {
        assert_eq!(cantor_dyadic(0, 3), 0.0);
        assert_eq!(cantor_dyadic(8, 3), 1.0);
        assert_eq!(cantor_dyadic(4, 3), 0.5);
        // 1/4 = 0.0202...₃ maps to 0.0101...₂ = 1/3.
        assert!((cantor_dyadic(1, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let p = |pairs: &[(&str, f64)]| -> BTreeMap<String, f64> {
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
        };
        assert!(GeneratorSpec::from_params("weierstrass", &p(&[("b", 4.0)]), 0).is_err());
        assert!(GeneratorSpec::from_params("weierstrass", &p(&[("a", 0.3)]), 0).is_err());
        assert!(GeneratorSpec::from_params("circle", &p(&[("n", 2.5)]), 0).is_err());
        assert!(GeneratorSpec::from_params("circle", &p(&[("radius", 2.0)]), 0).is_err());
        assert_eq!(
            GeneratorSpec::from_params("spiral", &p(&[]), 0),
            Err(Error::UnknownGenerator("spiral".into()))
        );
        let s = GeneratorSpec::from_params("circle", &p(&[("n", 12.0)]), 0).unwrap();
        assert_eq!(s.kind, Generator::Circle { n: 12 });
    }
}
