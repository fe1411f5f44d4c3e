mod output;
mod params;
mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dirset::{
    classify, direction_set_with_oriented, eps_cover_test, fill_eps, generate, largest_empty_cap,
    refinement_study, secant_slopes, slope_connected_hull, slope_fill_test, unoriented_directions,
    CapSearch, DirectionSet, DirectionSetRecord, Evidence, FillOutcome, FunctionSpec,
    GeneratorSpec, PointCloud, DEFAULT_CAP_SAMPLES, DEFAULT_DEDUP_TOL, DEFAULT_EPS_COVER,
    DEFAULT_EPS_HOLE, DEFAULT_TOL,
};
use serde_json::{json, Value};

use crate::output::{csv_banner, read_json, write_json, write_text, Failure};
use crate::params::{parse_depths, split_params};

/// Direction sets, empty caps and Lipschitz-graph classification of point
/// clouds.
#[derive(Parser)]
#[command(name = "dirset", version)]
struct Cli {
    /// Worker threads, 0 for one per core. Never changes any output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated cloud as CSV: `gen <kind> [--<param> <v>]... [--seed S] [--out F]`.
    Gen {
        kind: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "PARAMS")]
        rest: Vec<String>,
    },
    /// Compute the projective direction set of a CSV cloud.
    Dirs {
        input: PathBuf,
        /// Also record both orientations of every pair.
        #[arg(long)]
        oriented: bool,
        #[arg(long, default_value_t = DEFAULT_DEDUP_TOL)]
        tol: f64,
        /// Examine this many random pairs instead of all of them.
        #[arg(long)]
        pair_budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the largest empty cap of a direction set.
    Caps {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Candidate count for sampled search.
        #[arg(long, default_value_t = DEFAULT_CAP_SAMPLES)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test whether a direction set comes within eps of every direction.
    Cover {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Covering radius of the test net; defaults to eps/4.
        #[arg(long)]
        net_density: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a CSV cloud as class_i, class_ii or class_iii.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS_HOLE)]
        eps_hole: f64,
        #[arg(long, default_value_t = DEFAULT_EPS_COVER)]
        eps_cover: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Secant slopes of a planar cloud read as a function of x.
    Slopes {
        input: PathBuf,
        /// Half-width of the slope window checked for filling.
        #[arg(long = "M", alias = "m", default_value_t = 10.0)]
        m: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Secant statistics of a function over nested dyadic grids:
    /// `refine <kind> [--<param> <v>]... [--depths 4..12] [--M 10] [--out F]`.
    Refine {
        kind: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "PARAMS")]
        rest: Vec<String>,
    },
    /// Draw a direction set, cap or slope table as SVG.
    Plot {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Sampled,
}

fn read_cloud(path: &Path) -> Result<PointCloud, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    Ok(PointCloud::from_csv_reader(file, false)?)
}

fn read_dirs(path: &Path) -> Result<DirectionSet, Failure> {
    let doc = read_json(path)?;
    let record: DirectionSetRecord = serde_json::from_value(doc["result"].clone())
        .map_err(|e| Failure::invalid(format!("{}: not a direction set: {e}", path.display())))?;
    Ok(DirectionSet::try_from(record)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { kind, rest } => {
            let mut p = split_params(&rest)?;
            let seed = p.take_u64("seed")?.unwrap_or(0);
            let out = p.take_path("out");
            let spec = GeneratorSpec::from_params(&kind, &p.numeric()?, seed)?;
            let cloud = generate(&spec)?;
            let mut text = csv_banner("gen", &json!(spec));
            let mut body = Vec::new();
            cloud.to_csv_writer(&mut body).map_err(Failure::io)?;
            text.push_str(&String::from_utf8(body).expect("ascii"));
            write_text(out.as_deref(), &text)?;
            eprintln!("gen: {} points in dimension {} from {spec}", cloud.len(), cloud.dim());
        }
        Command::Dirs { input, oriented, tol, pair_budget, seed, out } => {
            let cloud = read_cloud(&input)?;
            let set = if oriented {
                direction_set_with_oriented(&cloud, tol, pair_budget, seed)?
            } else {
                unoriented_directions(&cloud, tol, pair_budget, seed)?
            };
            let config = json!({
                "input": input, "oriented": oriented, "tol": tol,
                "pair_budget": pair_budget, "seed": seed,
            });
            eprintln!(
                "dirs: {} projective classes from {} pairs ({} coincident skipped)",
                set.len(),
                set.pairs_examined,
                set.skipped_coincident
            );
            write_json(out.as_deref(), "dirs", config, &DirectionSetRecord::from(set))?;
        }
        Command::Caps { input, method, k, seed, out } => {
            let dirs = read_dirs(&input)?;
            let search = match method {
                Method::Auto => CapSearch::Auto,
                Method::Sampled => CapSearch::Sampled { k, seed },
            };
            let cap = largest_empty_cap(&dirs, search)?;
            let config = json!({
                "input": input,
                "method": match method { Method::Auto => "auto", Method::Sampled => "sampled" },
                "k": k, "seed": seed,
            });
            eprintln!("caps: radius {} ({:?}) around {:?}", cap.radius, cap.quality, cap.center.coords());
            write_json(out.as_deref(), "caps", config, &cap)?;
        }
        Command::Cover { input, eps, net_density, out } => {
            let dirs = read_dirs(&input)?;
            let density = net_density.unwrap_or(eps / 4.0);
            let cert = eps_cover_test(&dirs, eps, density)?;
            let config = json!({ "input": input, "eps": eps, "net_density": density });
            eprintln!(
                "cover: {} at eps {eps} with a {}-point net",
                if cert.covered { "covered" } else { "not covered" },
                cert.net_size
            );
            write_json(out.as_deref(), "cover", config, &cert)?;
        }
        Command::Classify { input, eps_hole, eps_cover, tol, out } => {
            let cloud = read_cloud(&input)?;
            let result = classify(&cloud, eps_hole, eps_cover, tol)?;
            let config = json!({
                "input": input, "eps_hole": eps_hole, "eps_cover": eps_cover, "tol": tol,
            });
            let summary = match &result.evidence {
                Evidence::LipschitzGraph { witness } => {
                    format!("lipschitz constant {} (bound {})", witness.lipschitz_constant, witness.bound)
                }
                Evidence::Dense { note } => note.message.clone(),
                Evidence::AllDirections { certificate } => {
                    format!("covered at eps {} by {} net points", certificate.eps, certificate.net_size)
                }
            };
            eprintln!("classify: {} (cap radius {}); {summary}", result.verdict.as_str(), result.cap.radius);
            let mut value = serde_json::to_value(&result).map_err(Failure::internal)?;
            if let (Evidence::LipschitzGraph { witness }, Some(out)) = (&result.evidence, &out) {
                if result.n_points >= output::SIDECAR_THRESHOLD {
                    let sidecar = output::write_witness_sidecar(out, witness)?;
                    let w = &mut value["evidence"]["witness"];
                    let obj = w.as_object_mut().expect("witness is an object");
                    obj.remove("base_points");
                    obj.remove("values");
                    obj.insert("witness_file".into(), Value::String(sidecar));
                }
            }
            write_json(out.as_deref(), "classify", config, &value)?;
        }
        Command::Slopes { input, m, eps, out } => {
            let cloud = read_cloud(&input)?;
            if cloud.dim() != 2 {
                return Err(Failure::invalid(format!(
                    "slopes needs a planar cloud, got dimension {}",
                    cloud.dim()
                )));
            }
            let mut pts: Vec<&[f64]> = cloud.points().collect();
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
            let slopes = secant_slopes(&xs, &ys)?;
            let hull = slope_connected_hull(&slopes)?;
            let fill = fill_eps(&slopes, m)?;
            let outcome = eps.map(|e| slope_fill_test(&slopes, m, e)).transpose()?;
            let summary = json!({
                "n_samples": slopes.n_samples, "n_slopes": slopes.len(),
                "min": hull.min, "max": hull.max, "largest_gap": hull.largest_gap,
                "fill_eps": fill, "fill_test": outcome,
            });
            let config = json!({ "input": input, "M": m, "eps": eps });
            let mut text = csv_banner("slopes", &config);
            text.push_str(&format!("# summary: {summary}\nslope\n"));
            for s in &slopes.slopes {
                text.push_str(&format!("{s:?}\n"));
            }
            write_text(out.as_deref(), &text)?;
            let fill_note = match outcome {
                Some(FillOutcome::Filled) => ", filled".to_string(),
                Some(FillOutcome::Gap { witness, width }) => format!(", gap of width {width} at {witness}"),
                None => String::new(),
            };
            eprintln!(
                "slopes: {} slopes in [{}, {}], fill_eps({m}) = {fill}{fill_note}",
                slopes.len(),
                hull.min,
                hull.max
            );
        }
        Command::Refine { kind, rest } => {
            let mut p = split_params(&rest)?;
            let out = p.take_path("out");
            let depths = match p.take_raw("depths") {
                Some(s) => parse_depths(&s)?,
                None => (4..=12).collect(),
            };
            let m = p.take_f64("M")?.or(p.take_f64("m")?).unwrap_or(10.0);
            let numeric: BTreeMap<String, f64> = p.numeric()?;
            if let Some(k) = numeric.keys().find(|k| !["slope", "intercept", "lo", "hi", "a", "b"].contains(&k.as_str())) {
                return Err(Failure::invalid(format!("unknown parameter --{k} for refine")));
            }
            let f = FunctionSpec::from_params(&kind, |k| numeric.get(k).copied())?;
            let rows = refinement_study(&f, &depths, m)?;
            let config = json!({ "function": f, "depths": depths, "M": m });
            let mut text = csv_banner("refine", &config);
            text.push_str("depth,n,max_abs_slope,fill_eps\n");
            for r in &rows {
                text.push_str(&format!("{},{},{:?},{:?}\n", r.depth, r.n, r.max_abs_slope, r.fill_eps));
                eprintln!(
                    "refine: depth {:>2}  n {:>6}  max|slope| {:>12.6}  fill_eps {:.6e}",
                    r.depth, r.n, r.max_abs_slope, r.fill_eps
                );
            }
            write_text(out.as_deref(), &text)?;
        }
        Command::Plot { input, out } => {
            let doc = svg::plot_file(&input)?;
            write_text(out.as_deref(), &doc)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: could not start {} worker threads: {e}", cli.threads);
        return ExitCode::from(3);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
