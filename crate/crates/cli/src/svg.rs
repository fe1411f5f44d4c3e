//! Static SVG figures of command outputs.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use dirset::{largest_empty_arc, CapReport, DirectionSet, DirectionSetRecord};
use serde_json::Value;

use crate::output::{read_json, Failure};

const SIZE: f64 = 480.0;
const C: f64 = SIZE / 2.0;
const R: f64 = 180.0;
/// Beyond this many classes the ring shows occupied angle bins instead.
const RING_LIMIT: usize = 5000;
const RING_BINS: usize = 3600;
/// Beyond this many classes the sphere shows an evenly strided subset.
const SPHERE_LIMIT: usize = 20_000;

pub fn plot_file(path: &Path) -> Result<String, Failure> {
    if path.extension().is_some_and(|e| e == "csv") {
        return slopes_histogram(path);
    }
    let doc = read_json(path)?;
    match doc["command"].as_str() {
        Some("dirs") => {
            let dirs = dirs_from(&doc, path)?;
            let cap = match dirs.dim() {
                2 => Some(largest_empty_arc(&dirs)?),
                _ => None,
            };
            directions_figure(&dirs, cap.as_ref())
        }
        Some("caps") => {
            let cap: CapReport = serde_json::from_value(doc["result"].clone())
                .map_err(|e| Failure::invalid(format!("{}: not a cap report: {e}", path.display())))?;
            // The direction set is drawn too when the input it came from is
            // still where the config says.
            let dirs = doc["config_echo"]["input"]
                .as_str()
                .map(PathBuf::from)
                .and_then(|p| read_json(&p).ok().and_then(|d| dirs_from(&d, &p).ok()));
            match dirs {
                Some(d) if d.dim() == cap.center.dim() => directions_figure(&d, Some(&cap)),
                _ => {
                    let empty = DirectionSet::from_projective(cap.center.dim(), &[], 0.0)?;
                    directions_figure(&empty, Some(&cap))
                }
            }
        }
        _ => Err(Failure::invalid(format!(
            "{}: expected output of `dirs` or `caps`, or a slopes CSV",
            path.display()
        ))),
    }
}

fn dirs_from(doc: &Value, path: &Path) -> Result<DirectionSet, Failure> {
    let record: DirectionSetRecord = serde_json::from_value(doc["result"].clone())
        .map_err(|e| Failure::invalid(format!("{}: not a direction set: {e}", path.display())))?;
    Ok(DirectionSet::try_from(record)?)
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{h}" viewBox="0 0 {SIZE} {h}" font-family="sans-serif" font-size="12">"#,
        h = SIZE + 40.0
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{C}" y="20" text-anchor="middle" font-size="14">{title}</text>"#);
    s
}

fn footer(s: &mut String, caption: &str) {
    let _ = writeln!(s, r#"<text x="{C}" y="{}" text-anchor="middle">{caption}</text>"#, SIZE + 25.0);
    s.push_str("</svg>\n");
}

fn directions_figure(dirs: &DirectionSet, cap: Option<&CapReport>) -> Result<String, Failure> {
    match dirs.dim() {
        2 => Ok(ring(dirs, cap)),
        3 => Ok(sphere(dirs, cap)),
        d => Err(Failure::invalid(format!("plots cover dimensions 2 and 3, not {d}"))),
    }
}

/// `RP^1` drawn as a circle with angles doubled, so antipodal identification
/// is already made and the circle closes up.
fn ring(dirs: &DirectionSet, cap: Option<&CapReport>) -> String {
    let at = |theta: f64, r: f64| (C + r * (2.0 * theta).cos(), C + 20.0 - r * (2.0 * theta).sin());
    let mut s = header("Directions in RP¹ (angle doubled)");
    let (cx, cy) = (C, C + 20.0);
    let _ = writeln!(s, r##"<circle cx="{cx}" cy="{cy}" r="{R}" fill="none" stroke="#999"/>"##);

    if let Some(cap) = cap {
        let (c, r) = (cap.center.angle(), cap.radius);
        if r >= PI / 2.0 - 1e-12 {
            let _ = writeln!(s, r##"<circle cx="{cx}" cy="{cy}" r="{R}" fill="none" stroke="#e4572e" stroke-width="6" opacity="0.6"/>"##);
        } else {
            let (x1, y1) = at(c - r, R);
            let (x2, y2) = at(c + r, R);
            let large = u8::from(4.0 * r > PI);
            let _ = writeln!(
                s,
                r##"<path d="M {x1:.2} {y1:.2} A {R} {R} 0 {large} 0 {x2:.2} {y2:.2}" fill="none" stroke="#e4572e" stroke-width="6" opacity="0.6"/>"##
            );
        }
        let (x, y) = at(c, R + 18.0);
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#e4572e"/>"##);
    }

    let angles: Vec<f64> = dirs.projective().iter().map(|p| p.angle()).collect();
    let binned = angles.len() > RING_LIMIT;
    let marks: Vec<f64> = if binned {
        let mut hit = vec![false; RING_BINS];
        for a in &angles {
            hit[((a / PI * RING_BINS as f64) as usize).min(RING_BINS - 1)] = true;
        }
        (0..RING_BINS)
            .filter(|&b| hit[b])
            .map(|b| (b as f64 + 0.5) * PI / RING_BINS as f64)
            .collect()
    } else {
        angles.clone()
    };
    for a in &marks {
        let (x1, y1) = at(*a, R - 8.0);
        let (x2, y2) = at(*a, R + 8.0);
        let _ = writeln!(s, r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#2e4057" stroke-width="1"/>"##);
    }
    let mut caption = format!("{} classes", angles.len());
    if binned {
        let _ = write!(caption, " (shown in {RING_BINS} bins)");
    }
    if let Some(cap) = cap {
        let _ = write!(caption, "; largest gap {:.6} rad", 2.0 * cap.radius);
    }
    footer(&mut s, &caption);
    s
}

/// Upper hemisphere seen from above; each class is drawn at its
/// representative with `z ≥ 0`.
fn sphere(dirs: &DirectionSet, cap: Option<&CapReport>) -> String {
    let up = |v: [f64; 3]| if v[2] < 0.0 { [-v[0], -v[1], -v[2]] } else { v };
    let at = |v: [f64; 3]| (C + R * v[0], C + 20.0 - R * v[1]);
    let mut s = header("Directions in RP² (upper hemisphere, orthographic)");
    let _ = writeln!(s, r##"<circle cx="{C}" cy="{}" r="{R}" fill="none" stroke="#999"/>"##, C + 20.0);

    let n = dirs.len();
    let stride = n.div_ceil(SPHERE_LIMIT).max(1);
    for r in dirs.reps().step_by(stride) {
        let (x, y) = at(up([r[0], r[1], r[2]]));
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="#2e4057"/>"##);
    }
    if let Some(cap) = cap {
        let c = cap.center.coords();
        let c = [c[0], c[1], c[2]];
        // Orthonormal frame around the center.
        let helper = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = normalize(cross(c, helper));
        let e2 = cross(c, e1);
        let (cr, sr) = (cap.radius.cos(), cap.radius.sin());
        for k in 0..360 {
            let t = TAU * k as f64 / 360.0;
            let p = [0, 1, 2].map(|i| cr * c[i] + sr * (t.cos() * e1[i] + t.sin() * e2[i]));
            let (x, y) = at(up(p));
            let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1" fill="#e4572e"/>"##);
        }
        let (x, y) = at(up(c));
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#e4572e"/>"##);
    }
    let mut caption = format!("{n} classes");
    if stride > 1 {
        let _ = write!(caption, " (every {stride}th shown)");
    }
    if let Some(cap) = cap {
        let _ = write!(caption, "; empty cap radius {:.6} rad", cap.radius);
    }
    footer(&mut s, &caption);
    s
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

fn slopes_histogram(path: &Path) -> Result<String, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let mut slopes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "slope" {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Failure::invalid(format!("{}: line {}: not a slope", path.display(), i + 1)))?;
        slopes.push(v);
    }
    if slopes.is_empty() {
        return Err(Failure::invalid(format!("{}: no slopes", path.display())));
    }
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { hi - lo } else { 1.0 };
    let bins = 60;
    let mut counts = vec![0usize; bins];
    for v in &slopes {
        counts[(((v - lo) / width * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let peak = *counts.iter().max().unwrap() as f64;

    let mut s = header("Secant slopes");
    let (left, bottom, w, h) = (40.0, SIZE - 20.0, SIZE - 60.0, SIZE - 80.0);
    let bar = w / bins as f64;
    for (i, &c) in counts.iter().enumerate() {
        let bh = h * c as f64 / peak;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{bh:.2}" fill="#2e4057"/>"##,
            left + i as f64 * bar,
            bottom - bh,
            bar * 0.9
        );
    }
    let _ = writeln!(s, r##"<line x1="{left}" y1="{bottom}" x2="{}" y2="{bottom}" stroke="#333"/>"##, left + w);
    let _ = writeln!(s, r#"<text x="{left}" y="{}" text-anchor="start">{lo:.4}</text>"#, bottom + 15.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{hi:.4}</text>"#, left + w, bottom + 15.0);
    footer(&mut s, &format!("{} slopes, tallest bin {}", slopes.len(), peak));
    Ok(s)
}
