use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hgl_core::cliques::census;
use hgl_core::constructive::{
    clique_column_graph, equal_det_walk, random_isotropic, random_isotropic_pair, transport_cliques,
    transport_isotropic, transport_pair_nonorthogonal, transport_pair_orthogonal,
};
use hgl_core::graphs::{
    build_h, build_h2, build_hgl, congruence_orbits, det_class_subgraph, spectrum, BuildBudget, GraphHandle,
};
use hgl_core::hermat::{
    congruence_diagonalize, det_rank_one_update, enumerate_hermitian, inverse_rank_one_update,
    update_invertible, HermMatrix, Matrix,
};
use hgl_core::homsearch::{
    chromatic_number, find_homomorphism, is_core, is_core_with_orbits, HomSearchProblem, DEFAULT_NODE_BUDGET,
};
use hgl_core::varpolar::{polar_point_graph, variety_cardinality, variety_points, FORM};
use hgl_core::verify::{
    base_out_dir, fresh_run_dir, verify_all, VerifyConfig, DEFAULT_SEED, EXIT_FAILURE, EXIT_USAGE,
    OUT_DIR_ENV,
};
use hgl_core::{Fe, Field};

#[derive(Parser)]
#[command(name = "hgl")]
#[command(about = "Exact computations on the graph of invertible hermitian matrices over GF(q^2)")]
#[command(version)]
struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Conjugation, trace and norm tables of GF(q^2)
    FieldTables {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hermitian matrix enumeration and rank-one update checks
    Herm {
        #[command(subcommand)]
        command: HermCommand,
    },
    /// Clique census of one vertex as JSON
    Cliques {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        /// Hex encoding of the vertex; the identity when omitted
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form and enumerated sizes of a hermitian variety
    Variety {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rank: usize,
        /// Also enumerate the points of diag(1, .., 1, 0, .., 0)
        #[arg(long)]
        enumerate: bool,
    },
    /// Point graph of the polar space of the identity form; writes FILE and FILE.complement
    PolarGraph {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build graphs, spectra and determinant classes
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Explicit constructions with checked certificates
    Construct {
        #[command(subcommand)]
        command: ConstructCommand,
    },
    /// Homomorphism, core and chromatic-number searches on edge-list files
    Hom {
        #[command(subcommand)]
        command: HomCommand,
    },
    /// Run the whole property suite and write a manifest
    VerifyAll {
        /// Comma-separated field parameters
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
        /// Comma-separated matrix sizes
        #[arg(long, value_delimiter = ',', default_value = "2")]
        n: Vec<usize>,
        #[arg(long, default_value_t = BuildBudget::default().max_vertices)]
        budget_vertices: u128,
        /// Checks not started within this many seconds are skipped
        #[arg(long)]
        budget_seconds: Option<u64>,
        /// Node budget of each backtracking search
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget_nodes: u64,
        /// Random instances per sampled check
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Base directory for run directories
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
        /// Write into this directory as is instead of a fresh run directory
        #[arg(long, conflicts_with = "out_dir")]
        run_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HermCommand {
    /// Stream canonical hex encodings, one per line
    Enumerate {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        invertible_only: bool,
    },
    /// Compare rank-one determinant, invertibility and inverse formulas with direct computation
    CheckRankOne {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hgl,
    H,
    H2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Write a graph as an edge list
    Build {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Family::Hgl)]
        family: Family,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = BuildBudget::default().max_vertices)]
        budget_vertices: u128,
    },
    /// Spectrum report of an edge-list file
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sizes and connectivity of the determinant classes
    Detclass {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransportKind {
    Isotropic,
    Orthogonal,
    Nonorthogonal,
    Cliques,
    OrthogonalCliques,
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// Walk between two random matrices of equal determinant
    Walk {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unitary transporter for random isotropic data
    Transport {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = TransportKind::Isotropic)]
        kind: TransportKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// q-1 disjoint q-cliques joined column-wise, with the cyclic colouring
    CliqueColumns {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HomCommand {
    /// Search for a homomorphism SOURCE -> TARGET
    Find {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Decide whether SOURCE is a core
    Core {
        #[arg(long)]
        source: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Chromatic number with bounds
    Chroma {
        #[arg(long)]
        source: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn read_graph(path: &Path) -> anyhow::Result<GraphHandle> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(GraphHandle::read_edge_list(BufReader::new(file))?)
}

fn budget(vertices: u128) -> BuildBudget {
    BuildBudget { max_vertices: vertices, ..BuildBudget::default() }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let seed = cli.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match cli.command {
        Commands::FieldTables { q, format, out } => field_tables(q, format, out.as_deref())?,
        Commands::Herm { command } => match command {
            HermCommand::Enumerate { q, n, invertible_only } => {
                let f = Field::new(q)?;
                let mut w = BufWriter::new(io::stdout().lock());
                for a in enumerate_hermitian(&f, n).filter(|a| !invertible_only || a.is_invertible()) {
                    writeln!(w, "{}", a.encode_hex())?;
                }
                w.flush()?;
            }
            HermCommand::CheckRankOne { q, n, samples } => {
                let report = check_rank_one(&Field::new(q)?, n, samples, &mut rng)?;
                let pass = report["pass"].as_bool() == Some(true);
                emit_json(None, &report)?;
                return Ok(if pass { 0 } else { EXIT_FAILURE });
            }
        },
        Commands::Cliques { q, n, vertex, out } => {
            let f = Field::new(q)?;
            let a = match vertex {
                Some(s) => HermMatrix::decode_hex(&f, n, &s)?,
                None => HermMatrix::identity(&f, n),
            };
            emit_json(out.as_deref(), &serde_json::to_value(census(&a)?)?)?;
        }
        Commands::Variety { q, n, rank, enumerate } => {
            let f = Field::new(q)?;
            let formula = variety_cardinality(n, rank, q)?;
            let mut report =
                json!({ "q": q, "n": n, "rank": rank, "form": FORM, "formula": formula.to_string() });
            if enumerate {
                let mut d = vec![Fe::ONE; rank];
                d.resize(n, Fe::ZERO);
                let count = variety_points(&HermMatrix::diagonal(&f, &d)?).len();
                report["enumerated"] = json!(count);
                report["agree"] = json!(count as u128 == formula);
            }
            emit_json(None, &report)?;
        }
        Commands::PolarGraph { q, n, out } => {
            let f = Field::new(q)?;
            let pg = polar_point_graph(&HermMatrix::identity(&f, n))?;
            fs::write(&out, pg.graph.to_edge_list_string())?;
            let mut comp = out.clone().into_os_string();
            comp.push(".complement");
            fs::write(&comp, pg.complement().to_edge_list_string())?;
            eprintln!("{} points, {} edges", pg.graph.order(), pg.graph.size());
        }
        Commands::Graph { command } => graph(command)?,
        Commands::Construct { command } => construct(command, &mut rng)?,
        Commands::Hom { command } => hom(command)?,
        Commands::VerifyAll {
            q,
            n,
            budget_vertices,
            budget_seconds,
            budget_nodes,
            samples,
            out_dir,
            run_dir,
        } => {
            let config = VerifyConfig {
                qs: q,
                ns: n,
                seed,
                budget: budget(budget_vertices),
                node_budget: budget_nodes,
                samples,
                time_budget: budget_seconds.map(Duration::from_secs),
            };
            if let Err(e) = config.validate() {
                eprintln!("usage error: {e}");
                return Ok(EXIT_USAGE);
            }
            let dir = match run_dir {
                Some(d) => d,
                None => fresh_run_dir(&base_out_dir(out_dir.as_deref()), seed)?,
            };
            let mut command = Vec::new();
            let mut args = std::env::args().skip(1);
            while let Some(a) = args.next() {
                match a.as_str() {
                    "--run-dir" | "--out-dir" => {
                        args.next();
                    }
                    _ if a.starts_with("--run-dir=") || a.starts_with("--out-dir=") => {}
                    _ => command.push(a),
                }
            }
            let start = Instant::now();
            let manifest = verify_all(&config, &command, &dir)?;
            for c in &manifest.checks {
                println!(
                    "{:<8} q={} n={} {:<24} {}",
                    format!("{:?}", c.status).to_uppercase(),
                    c.q,
                    c.n,
                    c.name,
                    c.detail
                );
            }
            eprintln!("run directory {}, {:.1}s", dir.display(), start.elapsed().as_secs_f64());
            return Ok(manifest.exit_code());
        }
    }
    Ok(0)
}

fn field_tables(q: u32, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let f = Field::new(q)?;
    let rows: Vec<(u32, String, u32, u32, u32)> = f
        .elements()
        .map(|x| (x.index(), f.poly_string(x), f.conj(x).index(), f.trace(x).index(), f.norm(x).index()))
        .collect();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["index", "polynomial", "conj", "trace", "norm"])?;
            for (i, p, c, t, nm) in &rows {
                w.write_record([i.to_string(), p.clone(), c.to_string(), t.to_string(), nm.to_string()])?;
            }
            emit(out, &String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => {
            let body: Vec<Value> = rows
                .iter()
                .map(|(i, p, c, t, nm)| json!({"index": i, "polynomial": p, "conj": c, "trace": t, "norm": nm}))
                .collect();
            emit_json(out, &json!({ "q": q, "modulus": f.spec().modulus_string(), "elements": body }))
        }
    }
}

fn random_nonzero_vec(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<Fe> {
    loop {
        let x: Vec<Fe> = (0..n).map(|_| f.random(rng)).collect();
        if x.iter().any(|v| !v.is_zero()) {
            return x;
        }
    }
}

fn check_rank_one(f: &Field, n: usize, samples: usize, rng: &mut ChaCha8Rng) -> anyhow::Result<Value> {
    let (mut det_bad, mut inv_bad, mut inverse_bad, mut invertible) = (0, 0, 0, 0);
    for _ in 0..samples {
        let a = HermMatrix::random_invertible(f, n, rng);
        let x = random_nonzero_vec(f, n, rng);
        let l = f.random_fixed(rng);
        let direct = a.update(&x, l)?;
        det_bad += (det_rank_one_update(&a, &x, l)? != direct.det()?) as usize;
        inv_bad += (update_invertible(&a, &x, l)? != direct.is_invertible()) as usize;
        if direct.is_invertible() {
            invertible += 1;
            inverse_bad += (inverse_rank_one_update(&a, &x, l)? != direct.inverse()?) as usize;
        }
    }
    Ok(json!({
        "q": f.q(),
        "n": n,
        "samples": samples,
        "invertible_updates": invertible,
        "determinant_mismatches": det_bad,
        "invertibility_mismatches": inv_bad,
        "inverse_mismatches": inverse_bad,
        "pass": det_bad + inv_bad + inverse_bad == 0,
    }))
}

fn graph(command: GraphCommand) -> anyhow::Result<()> {
    match command {
        GraphCommand::Build { q, n, family, out, budget_vertices } => {
            let f = Field::new(q)?;
            let b = budget(budget_vertices);
            let g = match family {
                Family::Hgl => build_hgl(&f, n, &b)?,
                Family::H => build_h(&f, n, &b)?,
                Family::H2 => build_h2(&f, &b)?,
            };
            emit(out.as_deref(), &g.to_edge_list_string())?;
        }
        GraphCommand::Spectrum { input, out } => {
            let g = read_graph(&input)?;
            emit_json(out.as_deref(), &serde_json::to_value(spectrum(&g))?)?;
        }
        GraphCommand::Detclass { q, n, out } => {
            let f = Field::new(q)?;
            let g = build_hgl(&f, n, &BuildBudget::default())?;
            let mut classes = Vec::new();
            for &l in f.fixed_nonzero() {
                let c = det_class_subgraph(&g, &f, l)?;
                classes.push(json!({
                    "det": l.index(),
                    "vertices": c.vertices.len(),
                    "components": c.components,
                    "connected": c.is_connected(),
                }));
            }
            emit_json(out.as_deref(), &json!({ "q": q, "n": n, "order": g.order(), "classes": classes }))?;
        }
    }
    Ok(())
}

fn construct(command: ConstructCommand, rng: &mut ChaCha8Rng) -> anyhow::Result<()> {
    match command {
        ConstructCommand::Walk { q, n, out } => {
            let f = Field::new(q)?;
            let a1 = HermMatrix::random_invertible(&f, n, rng);
            let a2 = loop {
                let b = HermMatrix::random_invertible(&f, n, rng);
                if b.det()? == a1.det()? {
                    break b;
                }
            };
            let w = equal_det_walk(&a1, &a2)?;
            emit_json(out.as_deref(), &w.to_json(&f))?;
        }
        ConstructCommand::Transport { q, n, kind, out } => {
            let f = Field::new(q)?;
            let cert = match kind {
                TransportKind::Isotropic => {
                    if n < 2 {
                        bail!("isotropic vectors need n >= 2");
                    }
                    let x = random_isotropic(&f, n, rng);
                    let y = random_isotropic(&f, n, rng);
                    transport_isotropic(&f, &x, &y)?
                }
                TransportKind::Orthogonal | TransportKind::Nonorthogonal => {
                    let orth = matches!(kind, TransportKind::Orthogonal);
                    let (x1, y1) = random_isotropic_pair(&f, n, orth, rng)?;
                    let (x2, y2) = random_isotropic_pair(&f, n, orth, rng)?;
                    if orth {
                        transport_pair_orthogonal(&f, &x1, &y1, &x2, &y2)?
                    } else {
                        transport_pair_nonorthogonal(&f, &x1, &y1, &x2, &y2)?
                    }
                }
                TransportKind::Cliques | TransportKind::OrthogonalCliques => {
                    let orth = matches!(kind, TransportKind::OrthogonalCliques);
                    let mut side = || -> anyhow::Result<(HermMatrix, Vec<Fe>, Vec<Fe>)> {
                        let a = HermMatrix::random_invertible(&f, n, rng);
                        let p: Matrix = congruence_diagonalize(&a).p;
                        let (z, w) = random_isotropic_pair(&f, n, orth, rng)?;
                        Ok((a, p.mul_vec(&z)?, p.mul_vec(&w)?))
                    };
                    let (a1, x1, y1) = side()?;
                    let (a2, x2, y2) = side()?;
                    transport_cliques(&a1, &x1, &y1, &a2, &x2, &y2)?
                }
            };
            emit_json(out.as_deref(), &cert.to_json(&f))?;
        }
        ConstructCommand::CliqueColumns { q, budget, out } => {
            let c = clique_column_graph(q)?;
            let chi = chromatic_number(&c.graph, budget)?;
            emit_json(
                out.as_deref(),
                &json!({
                    "q": q,
                    "order": c.graph.order(),
                    "edges": c.graph.edges().collect::<Vec<_>>(),
                    "coloring": c.coloring,
                    "proper": c.proper,
                    "arrangement": "vertex j of every clique joined to vertex j of every other clique",
                    "chromatic": chi,
                }),
            )?;
        }
    }
    Ok(())
}

fn hom(command: HomCommand) -> anyhow::Result<()> {
    match command {
        HomCommand::Find { source, target, budget } => {
            let p = HomSearchProblem::homomorphism(read_graph(&source)?, read_graph(&target)?)
                .with_budget(budget)?;
            emit_json(None, &serde_json::to_value(find_homomorphism(&p))?)?;
        }
        HomCommand::Core { source, budget } => {
            let g = read_graph(&source)?;
            // graphs written by `graph build` carry matrix labels, so congruence orbits apply
            let orbits =
                g.meta().q.and_then(|q| Field::new(q).ok()).and_then(|f| congruence_orbits(&g, &f).ok());
            let report = match orbits {
                Some(o) => is_core_with_orbits(&g, &o, budget)?,
                None => is_core(&g, budget)?,
            };
            emit_json(None, &serde_json::to_value(report)?)?;
        }
        HomCommand::Chroma { source, budget } => {
            let g = read_graph(&source)?;
            emit_json(None, &serde_json::to_value(chromatic_number(&g, budget)?)?)?;
        }
    }
    Ok(())
}
