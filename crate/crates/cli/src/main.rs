use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use realtree::build::binary::BinaryLengths;
use realtree::build::{
    contour_of_tree, metric_from_order, tree_from_excursion, truncated_binary_tree, Excursion,
    HeightedOrder,
};
use realtree::gh::{gh_distance, rooted_gh_distance, GhError, DEFAULT_MAX_POINTS};
use realtree::measure::{dimension_probe, LengthMeasureReport};
use realtree::random::{
    crt_stats, sample_brownian_excursion, sample_crt, sample_crt_batch, sample_dyck_excursion,
    LeafSampler, Seed,
};
use realtree::realize::{realize_tree, verify_realization};
use realtree::triangles::{
    global_constants, triangle_slimness, triangle_thinness, GeodesicTriangle, Graph, TriangleError,
};
use realtree::{FiniteMetric, QueryError, Rational, Scalar, TreePoint, WeightedTree};

/// Finite metric spaces, real trees and their constructions.
#[derive(Parser)]
#[command(name = "realtree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Exact rational arithmetic instead of 64-bit floats.
    #[arg(long, global = true)]
    rational: bool,
    /// Comparison tolerance (default 1e-9, or 0 with --rational).
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<String>,
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Hyperbolicity report of a metric: δ, a witness quadruple and whether
    /// the metric embeds in a tree.
    Check {
        metric: PathBuf,
        /// Also report the four-point constant based at this point.
        #[arg(long)]
        base: Option<String>,
    },
    /// Build trees or metrics from other encodings.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Geometric queries on a tree.
    #[command(subcommand)]
    Query(QueryCommand),
    /// Length measure of a tree, or the boundary box-counting probe.
    Measure(MeasureArgs),
    /// Realize a tree metric as a weighted tree.
    Realize { metric: PathBuf },
    /// Random excursions, trees and leaf samples.
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Gromov-Hausdorff distance between two small metrics.
    Gh {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
        /// Only correspondences relating the two roots.
        #[arg(long)]
        rooted: bool,
        /// Include an optimal correspondence.
        #[arg(long)]
        witness: bool,
    },
    /// Thinness and slimness of geodesic triangles in a graph.
    #[command(subcommand)]
    Triangle(TriangleCommand),
}

#[derive(Subcommand)]
enum BuildCommand {
    /// Tree coded by an excursion in text form.
    Excursion { file: PathBuf },
    /// Contour excursion of a rooted tree, in text form.
    Contour {
        tree: PathBuf,
        /// Start vertex; defaults to the tree's root.
        #[arg(long)]
        root: Option<String>,
    },
    /// Metric of a heighted order.
    Order { file: PathBuf },
    /// Binary tree cut at depth `--n`.
    Binary {
        #[arg(long)]
        n: usize,
        /// Lengths `2^(-γn)` (floating mode only).
        #[arg(long, conflicts_with = "ratio")]
        gamma: Option<f64>,
        /// Lengths `ratio^n` (default 1/2).
        #[arg(long)]
        ratio: Option<String>,
    },
}

#[derive(Subcommand)]
enum QueryCommand {
    /// Greatest lower bound in the root order.
    Meet {
        tree: PathBuf,
        p: String,
        q: String,
    },
    /// Common point of the three segments.
    Median {
        tree: PathBuf,
        x: String,
        y: String,
        z: String,
    },
    Distance {
        tree: PathBuf,
        p: String,
        q: String,
    },
    /// The segment as an ordered list of points with cumulative lengths.
    Segment {
        tree: PathBuf,
        p: String,
        q: String,
    },
    /// Number of components of the tree with the point removed.
    Degree {
        tree: PathBuf,
        p: String,
    },
    /// Subtree spanned by the points.
    Span {
        tree: PathBuf,
        #[arg(required = true)]
        points: Vec<String>,
    },
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(required_unless_present = "probe")]
    tree: Option<PathBuf>,
    /// Measure of a segment, given as `P,Q`.
    #[arg(long, value_name = "P,Q")]
    segment: Vec<String>,
    /// Length of the subtree spanned by comma-separated points.
    #[arg(long, value_name = "P,Q,...")]
    span: Vec<String>,
    /// Box counting on the binary-tree boundary instead of a tree.
    #[arg(long, conflicts_with = "tree")]
    probe: bool,
    #[arg(long, default_value_t = 2.0, requires = "probe")]
    gamma: f64,
    /// Probe depth.
    #[arg(long, default_value_t = 20, requires = "probe")]
    n: usize,
    /// Also write the probe's (k, count, scale) table as CSV.
    #[arg(long, value_name = "PATH", requires = "probe")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SampleCommand {
    /// Uniform Dyck excursion with `2n` steps, in text form.
    Dyck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rescale to total time 1 and heights by 1/√(2n).
        #[arg(long)]
        scaled: bool,
    },
    /// Tree of the rescaled Dyck excursion.
    Crt {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit summary statistics instead of the tree.
        #[arg(long, conflicts_with = "count")]
        stats: bool,
        /// Emit this many trees from derived seeds.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Points drawn from the leaf measure of an excursion's tree.
    Leaf {
        excursion: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum TriangleCommand {
    Thin(TriangleArgs),
    Slim(TriangleArgs),
    /// Largest thinness and slimness over all triangles of the subdivided
    /// graph, with its four-point constant.
    Constants {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        subdiv: usize,
    },
}

#[derive(Args)]
struct TriangleArgs {
    graph: PathBuf,
    #[arg(long, value_delimiter = ',', required = true, value_name = "X,Y,Z")]
    corners: Vec<String>,
    /// Side from X to Y as comma-separated vertices; defaults to a shortest path.
    #[arg(long, value_name = "PATH")]
    xy: Option<String>,
    #[arg(long, value_name = "PATH")]
    xz: Option<String>,
    #[arg(long, value_name = "PATH")]
    yz: Option<String>,
    #[arg(long, default_value_t = 1)]
    subdiv: usize,
}

/// Exit status 2: the input could not be read or validated.
/// Exit status 1: valid input, but the operation is not possible.
enum Failure {
    Malformed(anyhow::Error),
    Domain(anyhow::Error),
}

type Outcome<T> = Result<T, Failure>;

trait Classify<T> {
    fn malformed(self) -> Outcome<T>;
    fn domain(self) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn malformed(self) -> Outcome<T> {
        self.map_err(|e| Failure::Malformed(e.into()))
    }

    fn domain(self) -> Outcome<T> {
        self.map_err(|e| Failure::Domain(e.into()))
    }
}

fn query_failure(e: QueryError) -> Failure {
    match e {
        QueryError::InvalidPoint(_) | QueryError::Tree(_) => Failure::Malformed(e.into()),
        QueryError::NoRoot | QueryError::EmptySet | QueryError::Coincident => {
            Failure::Domain(e.into())
        }
    }
}

fn triangle_failure(e: TriangleError) -> Failure {
    match e {
        TriangleError::NotAShortestPath { .. } | TriangleError::TooLarge { .. } => {
            Failure::Domain(e.into())
        }
        _ => Failure::Malformed(e.into()),
    }
}

fn read_text(path: &Path) -> Outcome<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")
            .malformed()?;
        return Ok(s);
    }
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .malformed()
}

fn read_json(path: &Path) -> Outcome<Value> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {} as JSON", path.display()))
        .malformed()
}

fn read_metric<S: Scalar>(path: &Path) -> Outcome<FiniteMetric<S>> {
    FiniteMetric::from_json(&read_json(path)?)
        .with_context(|| format!("invalid metric in {}", path.display()))
        .malformed()
}

fn read_tree<S: Scalar>(path: &Path) -> Outcome<WeightedTree<S>> {
    WeightedTree::from_json(&read_json(path)?)
        .with_context(|| format!("invalid tree in {}", path.display()))
        .malformed()
}

fn read_excursion<S: Scalar>(path: &Path) -> Outcome<Excursion<S>> {
    Excursion::from_text(&read_text(path)?)
        .with_context(|| format!("invalid excursion in {}", path.display()))
        .malformed()
}

fn read_graph<S: Scalar>(path: &Path) -> Outcome<Graph<S>> {
    let v = read_json(path)?;
    Graph::from_json(&v).map_err(triangle_failure)
}

fn point<S: Scalar>(tree: &WeightedTree<S>, s: &str) -> Outcome<TreePoint<S>> {
    tree.parse_point(s).map_err(query_failure)
}

fn points<S: Scalar>(tree: &WeightedTree<S>, list: &str) -> Outcome<Vec<TreePoint<S>>> {
    list.split(',').map(|s| point(tree, s.trim())).collect()
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn parse_scalar<S: Scalar>(flag: &str, s: &str) -> Outcome<S> {
    S::parse_str(s)
        .filter(|x| *x >= S::zero())
        .ok_or_else(|| Failure::Malformed(anyhow!("invalid value {s:?} for {flag}")))
}

struct Output {
    main: String,
    /// Extra files requested by flags.
    side_files: Vec<(PathBuf, String)>,
}

impl From<String> for Output {
    fn from(main: String) -> Self {
        Output {
            main,
            side_files: Vec::new(),
        }
    }
}

fn run<S: Scalar>(cli: &Cli) -> Outcome<Output> {
    let tol: S = match &cli.tol {
        Some(t) => parse_scalar("--tol", t)?,
        None => S::tolerance(),
    };
    let out = match &cli.command {
        Command::Check { metric, base } => {
            let m = read_metric::<S>(metric)?;
            let report = m.hyperbolicity();
            let delta = report.delta.value();
            let mut v = json!({
                "points": m.len(),
                "delta": delta.to_json(),
                "tol": tol.to_json(),
                "is_tree": delta <= tol,
                "witness": report.witness.map(|w| w.map(|i| m.label(i).to_string())),
            });
            if let Some(o) = base {
                let based = m.based_delta(o).context("unknown base point").malformed()?;
                v["based_delta"] = json!({ "base": o, "value": based.value().to_json() });
            }
            json_text(&v)
        }
        Command::Build(b) => build::<S>(b)?,
        Command::Query(q) => query::<S>(q)?,
        Command::Measure(args) => return measure::<S>(args),
        Command::Realize { metric } => {
            let m = read_metric::<S>(metric)?;
            let real = realize_tree(&m, tol).domain()?;
            let check = verify_realization(&real.tree, &real.embedding, &m, tol).domain()?;
            let mut v = real.to_json();
            v["verification"] = check.to_json();
            json_text(&v)
        }
        Command::Sample(s) => sample::<S>(s)?,
        Command::Gh {
            first,
            second,
            max_points,
            rooted,
            witness,
        } => {
            let a = read_metric::<S>(first)?;
            let b = read_metric::<S>(second)?;
            let res = if *rooted {
                rooted_gh_distance(&a, &b, *max_points)
            } else {
                gh_distance(&a, &b, *max_points)
            };
            let res = res.map_err(|e| match e {
                GhError::NoRoot => Failure::Malformed(e.into()),
                GhError::TooLarge { .. } => Failure::Domain(e.into()),
            })?;
            json_text(&res.to_json(&a, &b, *witness))
        }
        Command::Triangle(t) => triangle::<S>(t)?,
    };
    Ok(out.into())
}

fn build<S: Scalar>(cmd: &BuildCommand) -> Outcome<String> {
    Ok(match cmd {
        BuildCommand::Excursion { file } => {
            let g = read_excursion::<S>(file)?;
            json_text(&tree_from_excursion(&g).tree.to_json())
        }
        BuildCommand::Contour { tree, root } => {
            let t = read_tree::<S>(tree)?;
            let r = match root {
                Some(id) => t
                    .vertex(id)
                    .ok_or_else(|| Failure::Malformed(anyhow!("unknown vertex {id:?}")))?,
                None => t.root().unwrap_or(0),
            };
            contour_of_tree(&t, r).domain()?.excursion.to_text()
        }
        BuildCommand::Order { file } => {
            let p = HeightedOrder::<S>::from_json(&read_json(file)?)
                .context("invalid order")
                .malformed()?;
            json_text(&metric_from_order(&p).domain()?.to_json())
        }
        BuildCommand::Binary { n, gamma, ratio } => {
            let tree = match gamma {
                Some(g) if S::EXACT => {
                    return Err(Failure::Malformed(anyhow!(
                        "--gamma needs floating mode; use --ratio with --rational"
                    )))
                }
                Some(g) => {
                    let lengths = BinaryLengths::power(*g);
                    truncated_binary_tree(&lengths, *n).domain()?.to_json()
                }
                None => {
                    let r: S = match ratio {
                        Some(r) => parse_scalar("--ratio", r)?,
                        None => S::from_frac(1, 2),
                    };
                    let lengths = BinaryLengths::Geometric { first: r, ratio: r };
                    truncated_binary_tree(&lengths, *n).domain()?.to_json()
                }
            };
            json_text(&tree)
        }
    })
}

fn query<S: Scalar>(cmd: &QueryCommand) -> Outcome<String> {
    let v = match cmd {
        QueryCommand::Meet { tree, p, q } => {
            let t = read_tree::<S>(tree)?;
            let m = t
                .meet(&point(&t, p)?, &point(&t, q)?)
                .map_err(query_failure)?;
            json!({ "meet": t.render_point(&m) })
        }
        QueryCommand::Median { tree, x, y, z } => {
            let t = read_tree::<S>(tree)?;
            let m = t
                .median(&point(&t, x)?, &point(&t, y)?, &point(&t, z)?)
                .map_err(query_failure)?;
            json!({ "median": t.render_point(&m) })
        }
        QueryCommand::Distance { tree, p, q } => {
            let t = read_tree::<S>(tree)?;
            let d = t
                .distance(&point(&t, p)?, &point(&t, q)?)
                .map_err(query_failure)?;
            json!({ "distance": d.to_json() })
        }
        QueryCommand::Segment { tree, p, q } => {
            let t = read_tree::<S>(tree)?;
            let seg = t
                .segment(&point(&t, p)?, &point(&t, q)?)
                .map_err(query_failure)?;
            t.segment_to_json(&seg)
        }
        QueryCommand::Degree { tree, p } => {
            let t = read_tree::<S>(tree)?;
            json!({ "degree": t.degree(&point(&t, p)?).map_err(query_failure)? })
        }
        QueryCommand::Span { tree, points: pts } => {
            let t = read_tree::<S>(tree)?;
            let ps = pts
                .iter()
                .map(|s| point(&t, s))
                .collect::<Outcome<Vec<_>>>()?;
            let span = t.spanned_subtree(&ps).map_err(query_failure)?;
            let length = span.edges().iter().fold(S::zero(), |a, e| a + e.len);
            json!({ "tree": span.to_json(), "length": length.to_json() })
        }
    };
    Ok(json_text(&v))
}

fn measure<S: Scalar>(args: &MeasureArgs) -> Outcome<Output> {
    if args.probe {
        if args.gamma.is_nan() || args.gamma <= 0.0 || args.n == 0 {
            return Err(Failure::Malformed(anyhow!(
                "--probe needs --gamma > 0 and --n >= 1"
            )));
        }
        let probe = dimension_probe(args.gamma, args.n);
        let side_files = args
            .csv
            .iter()
            .map(|p| (p.clone(), probe.to_csv()))
            .collect();
        return Ok(Output {
            main: json_text(&probe.to_json()),
            side_files,
        });
    }
    let path = args
        .tree
        .as_ref()
        .expect("clap requires a tree without --probe");
    let t = read_tree::<S>(path)?;
    let mut report = LengthMeasureReport::new(&t);
    for s in &args.segment {
        let ps = points(&t, s)?;
        let [p, q] = ps.as_slice() else {
            return Err(Failure::Malformed(anyhow!(
                "--segment needs exactly two points, got {s:?}"
            )));
        };
        report.add_segment(&t, p, q).map_err(query_failure)?;
    }
    for s in &args.span {
        report
            .add_span(&t, &points(&t, s)?)
            .map_err(query_failure)?;
    }
    Ok(json_text(&report.to_json()).into())
}

fn sample<S: Scalar>(cmd: &SampleCommand) -> Outcome<String> {
    let positive = |n: usize| {
        if n == 0 {
            Err(Failure::Malformed(anyhow!("--n must be at least 1")))
        } else {
            Ok(n)
        }
    };
    Ok(match cmd {
        SampleCommand::Dyck { n, seed, scaled } => {
            let n = positive(*n)?;
            if *scaled {
                sample_brownian_excursion(n, Seed(*seed)).to_text()
            } else {
                sample_dyck_excursion(n, Seed(*seed)).to_text()
            }
        }
        SampleCommand::Crt {
            n,
            seed,
            stats,
            count,
        } => {
            let n = positive(*n)?;
            let v = match (stats, count) {
                (true, _) => crt_stats(n, Seed(*seed)).to_json(),
                (false, Some(k)) => Value::Array(
                    sample_crt_batch(n, Seed(*seed), *k)
                        .iter()
                        .map(|t| t.to_json())
                        .collect(),
                ),
                (false, None) => sample_crt(n, Seed(*seed)).to_json(),
            };
            json_text(&v)
        }
        SampleCommand::Leaf {
            excursion,
            seed,
            count,
        } => {
            let g = read_excursion::<S>(excursion)?;
            let sampler = LeafSampler::new(&g);
            let mut rng = Seed(*seed).rng();
            let pts: Vec<String> = (0..*count)
                .map(|_| sampler.tree().render_point(&sampler.sample(&mut rng)))
                .collect();
            json_text(&json!({ "tree": sampler.tree().to_json(), "points": pts }))
        }
    })
}

fn triangle<S: Scalar>(cmd: &TriangleCommand) -> Outcome<String> {
    let (args, thin) = match cmd {
        TriangleCommand::Thin(a) => (a, true),
        TriangleCommand::Slim(a) => (a, false),
        TriangleCommand::Constants { graph, subdiv } => {
            let g = read_graph::<S>(graph)?;
            let c = global_constants(&g, *subdiv).map_err(triangle_failure)?;
            return Ok(json_text(&c.to_json()));
        }
    };
    if args.corners.len() != 3 {
        return Err(Failure::Malformed(anyhow!(
            "--corners needs exactly three vertices"
        )));
    }
    let g = read_graph::<S>(&args.graph)?;
    let c: Vec<usize> = args
        .corners
        .iter()
        .map(|id| g.vertex(id))
        .collect::<Result<_, _>>()
        .map_err(triangle_failure)?;
    let side = |given: &Option<String>, a: usize, b: usize| -> Outcome<Vec<usize>> {
        match given {
            Some(list) => list
                .split(',')
                .map(|id| g.vertex(id.trim()))
                .collect::<Result<_, _>>()
                .map_err(triangle_failure),
            None => Ok(g
                .all_shortest_paths(a, b)
                .map_err(triangle_failure)?
                .swap_remove(0)),
        }
    };
    let xy = side(&args.xy, c[0], c[1])?;
    let xz = side(&args.xz, c[0], c[2])?;
    let yz = side(&args.yz, c[1], c[2])?;
    let tri =
        GeodesicTriangle::new(&g, [c[0], c[1], c[2]], &xy, &xz, &yz).map_err(triangle_failure)?;
    let (key, value) = if thin {
        ("thin", triangle_thinness(&g, &tri, args.subdiv))
    } else {
        ("slim", triangle_slimness(&g, &tri, args.subdiv))
    };
    let name = |p: &[usize]| p.iter().map(|&v| g.id(v).to_string()).collect::<Vec<_>>();
    Ok(json_text(&json!({
        key: value.map_err(triangle_failure)?.to_json(),
        "subdiv": args.subdiv,
        "sides": { "xy": name(&xy), "xz": name(&xz), "yz": name(&yz) },
    })))
}

fn configure_threads() -> Outcome<()> {
    let Ok(v) = std::env::var("REALTREE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Malformed(anyhow!(
            "REALTREE_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")
        .malformed()
}

fn write_output(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .domain(),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing output")
            .domain(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| {
            if cli.rational {
                run::<Rational>(&cli)
            } else {
                run::<f64>(&cli)
            }
        })
        .and_then(|out| {
            for (path, text) in &out.side_files {
                write_output(Some(path), text)?;
            }
            write_output(cli.out.as_deref(), &out.main)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
