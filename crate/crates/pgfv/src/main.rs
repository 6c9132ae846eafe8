//! Command-line front end: mesh generation and inspection, solving, convergence
//! studies, stencil diagnostics, CSV/SVG emission.

use clap::{Args, Parser, Subcommand};
use pgfv::linalg::min_norm_with_nullspace;
use pgfv::mesh::{build_structured_mesh, read_mesh, write_mesh, Mesh};
use pgfv::mixed_fem::{cell_source_integrals, conservation_residual, DistanceRule};
use pgfv::pg_stencil::{
    build_constraints, closure_flux, dump_stencils_csv, solve_weights, EdgeClosure, Strategy,
};
use pgfv::verify::{
    affine_exactness_suite, convergence_study, manufactured, solve_scheme, Scheme,
};
use pgfv::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "pgfv", about = "Mixed finite elements and Petrov-Galerkin finite volumes for the 2D Poisson problem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MeshSource {
    /// Structured subdivision count (unit square, 2n² triangles).
    #[arg(long, conflicts_with = "mesh")]
    n: Option<usize>,
    /// Interior-vertex perturbation amplitude in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    /// RNG seed; PGFV_SEED overrides the default, this flag overrides both.
    #[arg(long)]
    seed: Option<u64>,
    /// Read the mesh from a PGFV-MESH file instead of generating one.
    #[arg(long)]
    mesh: Option<PathBuf>,
}

impl MeshSource {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            std::env::var("PGFV_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
        })
    }

    fn load(&self) -> Result<Mesh> {
        match (&self.mesh, self.n) {
            (Some(path), None) => read_mesh(BufReader::new(File::open(path)?)),
            (None, Some(n)) => build_structured_mesh(n, self.perturb, self.seed()),
            (None, None) => Err(Error::Usage("provide either --n or --mesh".into())),
            (Some(_), Some(_)) => unreachable!("clap enforces exclusivity"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a structured mesh and write it to a file.
    Mesh {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Output mesh file.
        #[arg(long, default_value = "mesh.txt")]
        out: PathBuf,
    },
    /// Print quality statistics of a mesh file.
    Info { file: PathBuf },
    /// Solve one manufactured case with one scheme.
    Solve {
        #[command(flatten)]
        source: MeshSource,
        #[arg(long, default_value = "mixed")]
        scheme: String,
        #[arg(long, default_value = "sinsin")]
        case: String,
        /// Force f ≡ 0 (the solution is then identically zero).
        #[arg(long)]
        f_zero: bool,
        #[arg(long, default_value = "minnorm")]
        strategy: String,
        #[arg(long, default_value = "centroid")]
        rule: String,
        /// Per-cell CSV output (cell id, centroid, u).
        #[arg(long)]
        out_cells: Option<PathBuf>,
        /// Per-edge CSV output (edge id, flux).
        #[arg(long)]
        out_edges: Option<PathBuf>,
        /// SVG heatmap of the cell means.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a refinement study and report error norms and rates.
    Converge {
        #[arg(long, default_value = "mixed")]
        scheme: String,
        #[arg(long, default_value = "sinsin")]
        case: String,
        /// Comma-separated strictly increasing refinement levels, e.g. 4,8,16.
        #[arg(long)]
        levels: String,
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "minnorm")]
        strategy: String,
        #[arg(long, default_value = "centroid")]
        rule: String,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
        /// SVG log-log plot of the error curves.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Per-edge stencil diagnostics: constraint residuals, null-space
    /// dimension, affine-exactness deviation.
    StencilCheck {
        #[command(flatten)]
        source: MeshSource,
        #[arg(long, default_value = "minnorm")]
        strategy: String,
        /// Diagnostics CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_strategy(s: &str) -> Result<Strategy> {
    match s {
        "minnorm" => Ok(Strategy::MinNorm),
        "anchor" => Ok(Strategy::AnchorTwoPoint),
        other => Err(Error::Usage(format!("unknown strategy `{other}` (minnorm|anchor)"))),
    }
}

fn parse_rule(s: &str) -> Result<DistanceRule> {
    match s {
        "centroid" => Ok(DistanceRule::CentroidNormal),
        "circumcenter" => Ok(DistanceRule::Circumcenter),
        other => Err(Error::Usage(format!("unknown rule `{other}` (centroid|circumcenter)"))),
    }
}

fn parse_levels(s: &str) -> Result<Vec<usize>> {
    let levels: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("invalid level `{t}`")))
        })
        .collect::<Result<_>>()?;
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("levels must be strictly increasing".into()));
    }
    Ok(levels)
}

fn print_mesh_summary(mesh: &Mesh) {
    let min_area = mesh.triangles.iter().map(|t| t.area).fold(f64::MAX, f64::min);
    println!(
        "vertices {} edges {} triangles {}",
        mesh.n_vertices(),
        mesh.n_edges(),
        mesh.n_triangles()
    );
    println!("theta {:.7}", mesh.shape_regularity());
    println!("min-area {:.6e}", min_area);
    if let Some(meta) = &mesh.metadata {
        println!("seed {} perturbation {} n {}", meta.seed, meta.perturbation, meta.n);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Mesh { n, perturb, seed, out } => {
            let seed = seed.unwrap_or_else(|| {
                std::env::var("PGFV_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
            });
            let mesh = build_structured_mesh(n, perturb, seed)?;
            let mut sink = BufWriter::new(File::create(&out)?);
            write_mesh(&mesh, &mut sink)?;
            sink.flush()?;
            println!("wrote {}", out.display());
            print_mesh_summary(&mesh);
        }
        Command::Info { file } => {
            let mesh = read_mesh(BufReader::new(File::open(&file)?))?;
            print_mesh_summary(&mesh);
        }
        Command::Solve {
            source,
            scheme,
            case,
            f_zero,
            strategy,
            rule,
            out_cells,
            out_edges,
            svg,
        } => {
            let mesh = source.load()?;
            let scheme: Scheme = scheme.parse()?;
            let case = manufactured(&case)?;
            let strategy = parse_strategy(&strategy)?;
            let rule = parse_rule(&rule)?;
            let f = case.f;
            let source_fn: Box<dyn Fn(f64, f64) -> f64> =
                if f_zero { Box::new(|_, _| 0.0) } else { Box::new(move |x, y| f(x, y)) };

            let (solution, coverage) = solve_scheme(&mesh, scheme, &source_fn, strategy, rule)?;
            if let Some(cov) = coverage {
                println!("pg-coverage {:.4}", cov);
                if cov == 0.0 {
                    println!("notice: no complete vicinities; all edges use the two-point fallback");
                }
            }
            let f_cells = cell_source_integrals(&mesh, &source_fn);
            println!("conservation-residual {:.3e}", conservation_residual(&mesh, &solution, &f_cells));
            println!("seed {}", source.seed());

            if let Some(path) = out_cells {
                let mut w = BufWriter::new(File::create(&path)?);
                writeln!(w, "# pgfv-cells-csv 1")?;
                writeln!(w, "cell,cx,cy,u")?;
                for t in &mesh.triangles {
                    writeln!(w, "{},{:.16e},{:.16e},{:.16e}", t.id, t.centroid.x, t.centroid.y, solution.u[t.id])?;
                }
            }
            if let Some(path) = out_edges {
                let mut w = BufWriter::new(File::create(&path)?);
                writeln!(w, "# pgfv-edges-csv 1")?;
                writeln!(w, "edge,flux")?;
                for e in &mesh.edges {
                    writeln!(w, "{},{:.16e}", e.id, solution.p[e.id])?;
                }
            }
            if let Some(path) = svg {
                std::fs::write(&path, pgfv::svg::heatmap(&mesh, &solution.u, "u"))?;
            }
        }
        Command::Converge {
            scheme,
            case,
            levels,
            perturb,
            seed,
            strategy,
            rule,
            out_csv,
            out_json,
            svg,
        } => {
            let scheme: Scheme = scheme.parse()?;
            let case = manufactured(&case)?;
            let levels = parse_levels(&levels)?;
            if levels.len() < 2 {
                return Err(Error::Usage("need at least 2 levels".into()));
            }
            let strategy = parse_strategy(&strategy)?;
            let rule = parse_rule(&rule)?;
            let seed = seed.unwrap_or_else(|| {
                std::env::var("PGFV_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
            });
            let report = convergence_study(scheme, &case, &levels, perturb, seed, strategy, rule);
            print!("{}", report.to_csv());
            if let Some(path) = out_csv {
                std::fs::write(&path, report.to_csv())?;
            }
            if let Some(path) = out_json {
                std::fs::write(&path, report.to_json())?;
            }
            if let Some(path) = svg {
                let mut series = Vec::new();
                for (label, pick) in [
                    ("e_u", 0usize),
                    ("e_p", 1),
                    ("e_div", 2),
                ] {
                    let pts: Vec<(f64, f64)> = report
                        .levels
                        .iter()
                        .filter_map(|l| {
                            let e = [l.e_u, l.e_p, l.e_div][pick]?;
                            Some((l.h, e))
                        })
                        .collect();
                    series.push((label.to_string(), pts));
                }
                std::fs::write(&path, pgfv::svg::loglog_plot(&series, "convergence"))?;
            }
            let failed = report.levels.iter().any(|l| l.error.is_some());
            if failed {
                return Err(Error::Usage("one or more levels failed; see report".into()));
            }
        }
        Command::StencilCheck { source, strategy, out } => {
            let mesh = source.load()?;
            let strategy = parse_strategy(&strategy)?;
            let mut rows = String::from("# pgfv-stencil-diagnostics-csv 1\n");
            rows.push_str("edge,residual,weight_norm,nullspace_dim,affine_max_dev\n");
            let mut failures = Vec::new();
            let mut max_residual = 0.0f64;
            let mut max_dev_all = 0.0f64;
            let mut count = 0usize;
            let mut rng = ChaCha8Rng::seed_from_u64(source.seed());

            for e in mesh.interior_edges() {
                let Some(vic) = mesh.edge_vicinity(e.id)? else { continue };
                let system = match build_constraints(&mesh, &vic) {
                    Ok(s) => s,
                    Err(err) => {
                        failures.push(format!("edge {}: {err}", e.id));
                        continue;
                    }
                };
                let weights = match solve_weights(&mesh, &system, strategy) {
                    Ok(w) => w,
                    Err(err) => {
                        failures.push(format!("edge {}: {err}", e.id));
                        continue;
                    }
                };
                let nullspace = min_norm_with_nullspace(&system.a, &system.b)
                    .map(|s| s.null_basis.len())
                    .unwrap_or(0);
                // Per-edge affine deviation over a small random sample.
                let closure = EdgeClosure::Pg { weights: weights.clone(), vicinity: vic };
                let mut dev = 0.0f64;
                for _ in 0..20 {
                    let g = pgfv::mesh::Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                    let a0: f64 = rng.gen_range(-1.0..1.0);
                    let u: Vec<f64> =
                        mesh.triangles.iter().map(|t| a0 + g.dot(t.centroid)).collect();
                    let flux = closure_flux(&mesh, e.id, &closure, &u);
                    let exact = e.length * g.dot(e.unit_normal);
                    dev = dev.max((flux - exact).abs() / ((1.0 + g.norm()) * e.length));
                }
                let wnorm = pgfv::linalg::norm2(&weights.as_array());
                rows.push_str(&format!(
                    "{},{:.3e},{:.6e},{},{:.3e}\n",
                    e.id, weights.residual, wnorm, nullspace, dev
                ));
                max_residual = max_residual.max(weights.residual);
                max_dev_all = max_dev_all.max(dev);
                count += 1;
            }

            // Global suite deviation for the summary.
            let suite_dev = affine_exactness_suite(&mesh, strategy, 50)?;
            print!("{rows}");
            if count == 0 {
                println!("summary: zero stencil coverage (no complete vicinities)");
            } else {
                println!(
                    "summary: stencils {count} max-residual {max_residual:.3e} max-affine-dev {:.3e}",
                    max_dev_all.max(suite_dev)
                );
            }
            if let Some(path) = out {
                std::fs::write(&path, rows)?;
            }
            for f in &failures {
                eprintln!("error: {f}");
            }
            if !failures.is_empty() {
                return Err(Error::Usage(format!("{} stencil failures", failures.len())));
            }
            let _ = dump_stencils_csv; // full weight dump available via library
        }
    }
    Ok(())
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
