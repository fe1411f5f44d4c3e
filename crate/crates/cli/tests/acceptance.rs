//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are printed even when
//! everything passes. Exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dirset::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(kind: Generator, seed: u64) -> GeneratorSpec {
    GeneratorSpec::new(kind, seed).unwrap()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointCloud {
    let coords: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    PointCloud::from_flat(dim, coords, false).unwrap()
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Angle between lines via `atan2(|a ∧ b|, |a · b|)`, independent of the
/// library's formula.
fn line_gap(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let mut w = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            w += (a[i] * b[j] - a[j] * b[i]).powi(2);
        }
    }
    w.sqrt().atan2(d.abs())
}

fn brute_class_count(cloud: &PointCloud, tol: f64) -> usize {
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for i in 0..cloud.len() {
        for j in i + 1..cloud.len() {
            let d: Vec<f64> = cloud.point(j).iter().zip(cloud.point(i)).map(|(a, b)| a - b).collect();
            let len = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            let u: Vec<f64> = d.iter().map(|c| c / len).collect();
            if !reps.iter().any(|r| line_gap(r, &u) <= tol) {
                reps.push(u);
            }
        }
    }
    reps.len()
}

fn same_classes(a: &[ProjectiveDirection], b: &[ProjectiveDirection], tol: f64) -> bool {
    let near = |x: &ProjectiveDirection, ys: &[ProjectiveDirection]| {
        ys.iter().any(|y| projective_distance(x, y).unwrap() <= tol)
    };
    a.len() == b.len() && a.iter().all(|x| near(x, b)) && b.iter().all(|y| near(y, a))
}

fn antipodal_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut total = 0;
    for i in 0..50 {
        let dim = [2, 3, 5][i % 3];
        let n = 2 + rng.random_range(0..199);
        let cloud = random_cloud(&mut rng, n, dim);
        let o = oriented_directions(&cloud, None, 0).map_err(|e| e.to_string())?;
        let mut fwd: Vec<&[f64]> = o.iter().collect();
        let negated: Vec<Vec<f64>> = o.iter().map(|u| u.iter().map(|c| -c).collect()).collect();
        let mut neg: Vec<&[f64]> = negated.iter().map(Vec::as_slice).collect();
        fwd.sort_by(|a, b| lex(a, b));
        neg.sort_by(|a, b| lex(a, b));
        check(fwd == neg, || format!("cloud {i} (d={dim}, n={n}) is not antipodally symmetric"))?;
        total += o.len();
    }
    Ok(format!("50 clouds, {total} oriented directions"))
}

fn lipschitz_forward() -> Outcome {
    let mut worst_margin = f64::INFINITY;
    for i in 0..100u64 {
        let c = [0.5, 1.0, 2.0, 5.0][(i % 4) as usize];
        let cloud = generate(&spec(Generator::LipschitzRandom { c, n: 100 }, i)).unwrap();
        let r = classify(&cloud, DEFAULT_EPS_HOLE, DEFAULT_EPS_COVER, DEFAULT_TOL).map_err(|e| e.to_string())?;
        check(r.verdict == Verdict::ClassI, || format!("seed {i}, C={c}: {:?}", r.verdict))?;
        let floor = FRAC_PI_2 - c.atan() - 1e-6;
        check(r.cap.radius >= floor, || format!("seed {i}, C={c}: cap {} < {floor}", r.cap.radius))?;
        let Evidence::LipschitzGraph { witness } = &r.evidence else {
            return Err(format!("seed {i}: class_i without a witness"));
        };
        check(witness.lipschitz_constant <= c, || {
            format!("seed {i}: constant {} exceeds C={c}", witness.lipschitz_constant)
        })?;
        worst_margin = worst_margin.min(c - witness.lipschitz_constant);
    }
    Ok(format!("100 clouds class_i; smallest C − L = {worst_margin:.3e}"))
}

fn corpus() -> Vec<GeneratorSpec> {
    let mut out = Vec::new();
    for seed in 0..12u64 {
        let c = [0.5, 1.0, 2.0, 5.0, 0.1, 3.0][seed as usize % 6];
        out.push(spec(Generator::LipschitzRandom { c, n: 60 + 10 * seed as usize }, seed));
        out.push(spec(Generator::Line { n: 5 + seed as usize, dim: 2 + seed as usize % 4 }, seed));
        out.push(spec(Generator::CollinearPlusPoint { k: 2 + seed as usize }, seed));
        out.push(spec(Generator::RandomBall { n: 6 + seed as usize, dim: 2 + seed as usize % 3 }, seed));
    }
    for n in [8, 16, 64, 101] {
        out.push(spec(Generator::Circle { n }, 0));
    }
    for n in [3, 21, 201] {
        out.push(spec(Generator::AbsoluteValue { n }, 0));
    }
    for depth in [4, 6, 8, 10] {
        out.push(spec(Generator::Weierstrass { a: 0.5, b: 3, depth }, 0));
        out.push(spec(Generator::CantorGraph { depth }, 0));
    }
    for (grid, w1, w2) in [(5, 0.5, 0.5), (8, 2.0, -1.0), (6, 0.0, 0.0)] {
        out.push(spec(Generator::PlaneSlice { grid, w1, w2 }, 0));
    }
    out
}

fn cap_bound_everywhere() -> Outcome {
    let mut class_i = 0;
    let all = corpus();
    for s in &all {
        let cloud = generate(s).unwrap();
        let r = classify(&cloud, DEFAULT_EPS_HOLE, DEFAULT_EPS_COVER, DEFAULT_TOL).map_err(|e| format!("{s}: {e}"))?;
        if let Evidence::LipschitzGraph { witness } = &r.evidence {
            class_i += 1;
            let bound = (FRAC_PI_2 - r.cap.radius).tan() + 1e-6;
            check(witness.lipschitz_constant <= bound, || {
                format!("{s}: constant {} above tan(π/2 − {}) = {bound}", witness.lipschitz_constant, r.cap.radius)
            })?;
        }
    }
    Ok(format!("{class_i} class_i witnesses among {} corpus clouds", all.len()))
}

fn weierstrass_refinement() -> Outcome {
    let f = FunctionSpec::Weierstrass { a: 0.5, b: 3 };
    let rows = refinement_study(&f, &(4..=12).collect::<Vec<_>>(), 10.0).map_err(|e| e.to_string())?;
    for w in rows.windows(2) {
        check(w[1].max_abs_slope > w[0].max_abs_slope, || {
            format!("max |slope| not increasing at depth {}", w[1].depth)
        })?;
        check(w[1].fill_eps <= w[0].fill_eps, || format!("fill_eps grew at depth {}", w[1].depth))?;
    }
    let last = rows.last().unwrap();
    check(last.fill_eps <= 0.1, || format!("fill_eps {} at depth 12", last.fill_eps))?;
    // No secant is vertical: the grid is strictly increasing and no pair
    // direction equals the vertical class.
    let cloud = generate(&spec(Generator::Weierstrass { a: 0.5, b: 3, depth: 12 }, 0)).unwrap();
    check(cloud.points().zip(cloud.points().skip(1)).all(|(p, q)| q[0] > p[0]), || "grid not increasing".into())?;
    let vertical = projective_canonical(&UnitDirection::pole(2));
    match vertical_line_test(&cloud, &vertical, 0.0).map_err(|e| e.to_string())? {
        GraphVerdict::Graph { clearance } => Ok(format!(
            "max |slope| {:.3} → {:.3}, fill_eps(10) at depth 12 = {:.3e}, vertical clearance {clearance:.3e}",
            rows[0].max_abs_slope, last.max_abs_slope, last.fill_eps
        )),
        GraphVerdict::NotGraph { witness, .. } => Err(format!("pair {witness:?} is vertical")),
    }
}

fn collinear_counts() -> Outcome {
    for n in 2..=100usize {
        let cloud = generate(&spec(Generator::Line { n, dim: 2 + n % 4 }, n as u64)).unwrap();
        let count = count_distinct_directions(&cloud, DEFAULT_DEDUP_TOL).map_err(|e| e.to_string())?;
        check(count == 1, || format!("collinear n={n}: {count} classes"))?;
    }
    for k in 2..=50usize {
        let cloud = generate(&spec(Generator::CollinearPlusPoint { k }, k as u64)).unwrap();
        let count = count_distinct_directions(&cloud, DEFAULT_DEDUP_TOL).map_err(|e| e.to_string())?;
        let brute = brute_class_count(&cloud, DEFAULT_DEDUP_TOL);
        check(count == brute, || format!("k={k}: library {count}, brute force {brute}"))?;
        check(count > k, || format!("k={k}: only {count} classes"))?;
    }
    Ok("99 collinear clouds with 1 class; k = 2..50 all ≥ k+1 and equal to brute force".into())
}

fn brute_arc(angles: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for &a in angles {
        let next = angles
            .iter()
            .map(|&b| if b > a { b - a } else { b + PI - a })
            .fold(PI, f64::min);
        best = best.max(next);
    }
    best / 2.0
}

fn cap_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for i in 0..1000 {
        let n = 1 + rng.random_range(0..60);
        let dirs: Vec<ProjectiveDirection> =
            (0..n).map(|_| ProjectiveDirection::from_angle(rng.random::<f64>() * PI)).collect();
        let set = DirectionSet::from_projective(2, &dirs, 0.0).unwrap();
        let angles: Vec<f64> = set.projective().iter().map(|p| p.angle()).collect();
        let cap = largest_empty_arc(&set).map_err(|e| e.to_string())?;
        let brute = brute_arc(&angles);
        check(cap.radius == brute, || format!("input {i}: arc {} vs brute {brute}", cap.radius))?;
    }
    let mut worst: f64 = f64::INFINITY;
    for i in 0..200u64 {
        let n = 3 + rng.random_range(0..40);
        let dirs: Vec<ProjectiveDirection> = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                projective_canonical(&UnitDirection::normalize(v).unwrap())
            })
            .collect();
        let set = DirectionSet::from_projective(3, &dirs, 0.0).unwrap();
        let exact = largest_empty_cap(&set, CapSearch::Auto).map_err(|e| e.to_string())?;
        let sampled = largest_empty_cap(&set, CapSearch::Sampled { k: 100_000, seed: i }).map_err(|e| e.to_string())?;
        check(exact.radius >= sampled.radius - 1e-6, || {
            format!("input {i}: voronoi {} < sampled {}", exact.radius, sampled.radius)
        })?;
        worst = worst.min(exact.radius - sampled.radius);
    }
    let axes: Vec<ProjectiveDirection> =
        (0..3).map(|a| projective_canonical(&UnitDirection::axis(3, a))).collect();
    let set = DirectionSet::from_projective(3, &axes, 0.0).unwrap();
    let cap = largest_empty_cap(&set, CapSearch::Auto).map_err(|e| e.to_string())?;
    let target = (1.0f64 / 3.0).sqrt().acos();
    check((cap.radius - target).abs() <= 1e-6, || format!("axes cap {} vs {target}", cap.radius))?;
    Ok(format!(
        "1000 arcs exact; 200 voronoi ≥ sampled (min margin {worst:.2e}); axes cap off by {:.1e}",
        (cap.radius - target).abs()
    ))
}

fn random_rotation(rng: &mut ChaCha8Rng, dim: usize) -> Rotation {
    let mut r = Rotation::identity(dim);
    for _ in 0..3 {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        r = r.compose(&rotation_to_pole(&UnitDirection::normalize(v).unwrap()));
    }
    r
}

fn equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let tol = 1e-9;
    let dirs = |c: &PointCloud| unoriented_directions(c, DEFAULT_DEDUP_TOL, None, 0).unwrap().projective();
    for i in 0..100 {
        let dim = [2, 3, 5][i % 3];
        let n = 2 + rng.random_range(0..40);
        let cloud = random_cloud(&mut rng, n, dim);
        let base = dirs(&cloud);
        let t: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 200.0 - 100.0).collect();
        let s = if rng.random::<bool>() { 1.0 } else { -1.0 } * (0.01 + rng.random::<f64>() * 100.0);
        check(same_classes(&base, &dirs(&cloud.translated(&t).unwrap()), tol), || format!("cloud {i}: translation"))?;
        check(same_classes(&base, &dirs(&cloud.scaled(s)), tol), || format!("cloud {i}: scaling by {s}"))?;
        let r = random_rotation(&mut rng, dim);
        let image: Vec<ProjectiveDirection> = base
            .iter()
            .map(|p| projective_canonical(&UnitDirection::normalize(r.apply(p.coords())).unwrap()))
            .collect();
        check(same_classes(&image, &dirs(&apply_rotation(&r, &cloud).unwrap()), tol), || {
            format!("cloud {i}: rotation")
        })?;
    }
    Ok("100 clouds: translation, scaling and rotation within 1e-9".into())
}

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> std::result::Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dirset"))
        .current_dir(dir)
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("`dirset {}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })
}

fn cli_corpus(dir: &Path, threads: usize) -> std::result::Result<(), String> {
    let gens: &[&[&str]] = &[
        &["gen", "circle", "--n", "8", "--out", "circle8.csv"],
        &["gen", "circle", "--n", "64", "--out", "circle64.csv"],
        &["gen", "absolute_value", "--n", "201", "--out", "absval.csv"],
        &["gen", "lipschitz_random", "--c", "2", "--n", "100", "--seed", "7", "--out", "lip.csv"],
        &["gen", "weierstrass", "--depth", "9", "--out", "weier.csv"],
        &["gen", "cantor_graph", "--depth", "8", "--out", "cantor.csv"],
        &["gen", "line", "--n", "30", "--dim", "4", "--seed", "3", "--out", "line.csv"],
        &["gen", "collinear_plus_point", "--k", "12", "--seed", "5", "--out", "cpp.csv"],
        &["gen", "random_ball", "--n", "40", "--dim", "3", "--seed", "11", "--out", "ball3.csv"],
        &["gen", "random_ball", "--n", "25", "--dim", "5", "--seed", "12", "--out", "ball5.csv"],
        &["gen", "plane_slice", "--grid", "8", "--out", "plane.csv"],
    ];
    for g in gens {
        run_cli(dir, threads, g)?;
    }
    let clouds = ["circle8", "circle64", "absval", "lip", "weier", "cantor", "line", "cpp", "ball3", "ball5", "plane"];
    for c in clouds {
        let csv = format!("{c}.csv");
        let dirs = format!("{c}.dirs.json");
        run_cli(dir, threads, &["dirs", &csv, "--out", &dirs])?;
        run_cli(dir, threads, &["caps", &dirs, "--out", &format!("{c}.cap.json")])?;
        run_cli(dir, threads, &["cover", &dirs, "--eps", "0.3927", "--out", &format!("{c}.cover.json")])?;
        run_cli(dir, threads, &["classify", &csv, "--out", &format!("{c}.class.json")])?;
    }
    run_cli(dir, threads, &["dirs", "ball3.csv", "--oriented", "--pair-budget", "300", "--seed", "4", "--out", "ball3.sampled.json"])?;
    run_cli(dir, threads, &["caps", "ball3.dirs.json", "--method", "sampled", "--k", "5000", "--seed", "2", "--out", "ball3.scap.json"])?;
    run_cli(dir, threads, &["slopes", "weier.csv", "--M", "10", "--eps", "0.5", "--out", "weier.slopes.csv"])?;
    run_cli(dir, threads, &["refine", "weierstrass", "--depths", "4..10", "--out", "weier.refine.csv"])?;
    // Large enough that the witness goes to a sidecar CSV.
    run_cli(dir, threads, &["gen", "lipschitz_random", "--n", "10000", "--seed", "1", "--out", "big.csv"])?;
    run_cli(dir, threads, &["classify", "big.csv", "--out", "big.class.json"])?;
    run_cli(dir, threads, &["plot", "circle8.dirs.json", "--out", "circle8.svg"])?;
    run_cli(dir, threads, &["plot", "ball3.cap.json", "--out", "ball3.svg"])?;
    run_cli(dir, threads, &["plot", "weier.slopes.csv", "--out", "weier.svg"])?;
    Ok(())
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (root.path().join("t1"), root.path().join("t8"));
    for (dir, threads) in [(&a, 1), (&b, 8)] {
        std::fs::create_dir(dir).map_err(|e| e.to_string())?;
        cli_corpus(dir, threads)?;
    }
    let mut names: Vec<String> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let mut json = 0;
    for name in &names {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| format!("{name}: {e}"))?;
        check(x == y, || format!("{name} differs between --threads 1 and --threads 8"))?;
        json += usize::from(name.ends_with(".json"));
    }
    check(names.iter().any(|n| n.ends_with(".witness.csv")), || "no witness sidecar written".into())?;
    Ok(format!("{} output files identical ({json} JSON)", names.len()))
}

fn main() {
    let criteria: [(&str, Option<u64>, fn() -> Outcome); 8] = [
        ("antipodal invariance of oriented directions", Some(5), antipodal_invariance),
        ("Lipschitz clouds classify as class_i with the cap floor and C bound", Some(30), lipschitz_forward),
        ("class_i constants obey tan(π/2 − radius) across the corpus", None, cap_bound_everywhere),
        ("Weierstrass refinement: slopes grow, fill_eps ≤ 0.1, vertical missed", Some(60), weierstrass_refinement),
        ("collinear and collinear-plus-point class counts", Some(5), collinear_counts),
        ("cap oracles: arcs, Voronoi vs sampled, axes", Some(120), cap_oracles),
        ("translation, scaling and rotation equivariance", Some(30), equivariance),
        ("CLI output identical for --threads 1 and 8", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > Duration::from_secs(l) => {
                Err(format!("took {:.1}s, limit {l}s", elapsed.as_secs_f64()))
            }
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} criterion {}: {name} [{:.2}s] {detail}", i + 1, elapsed.as_secs_f64());
        failed += usize::from(outcome.is_err());
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
