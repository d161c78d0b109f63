//! `planemu`: generate, convert, cluster, emulate, verify and report.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 internal
//! invariant breach.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use planar_emulator::arrangement::StringScene;
use planar_emulator::clustering::{cluster, ClusterError, ClusterOptions, Clustering, CONSTANTS};
use planar_emulator::docs::{trace_from_json, trace_to_json, ClusteringDoc, DocError, EmulatorDoc, Instance};
use planar_emulator::emulator::{build_emulator, Emulator, EmulatorError};
use planar_emulator::generate::{gen_clique_scene, gen_grid_instance, gen_segment_scene, GenerateError};
use planar_emulator::pipeline::scene_to_instance;
use planar_emulator::regions::ContactGraph;
use planar_emulator::verify::{check_distortion, verify_all, Mode, VerifyError, VerifyOptions};

#[derive(Parser)]
#[command(name = "planemu", version, about = "Planar emulators for region contact graphs and string graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance (grid) or a string scene (segments, clique).
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Convert a string scene into a region instance.
    Convert {
        scene: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Cluster an instance.
    Cluster {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the assignment trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Build the emulator from an instance and its clustering.
    Emulate {
        instance: PathBuf,
        clustering: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check every bound; exits 1 when any check fails.
    Verify {
        instance: PathBuf,
        clustering: PathBuf,
        emulator: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Trace file; defaults to the one named by the clustering document.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Derived)]
        mode: ModeArg,
        #[arg(long, default_value_t = 5000)]
        max_pairs: usize,
        /// Seed for sampling region pairs beyond `--max-pairs`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distortion histogram as CSV.
    Report {
        instance: PathBuf,
        clustering: PathBuf,
        emulator: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 5000)]
        max_pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Grid graph with regions grown from random roots.
    Grid {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        regions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Random segments in general position.
    Segments {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1000)]
        bbox: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Pairwise crossing segments.
    Clique {
        #[arg(long)]
        count: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Derived,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Derived => Mode::Derived,
        }
    }
}

enum Failure {
    Verification(usize),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ClusterError> for Failure {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::EmptyRegionSet | ClusterError::SupportMismatch => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<EmulatorError> for Failure {
    fn from(e: EmulatorError) -> Self {
        match e {
            EmulatorError::Malformed(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize")
}

fn load_instance(path: &Path) -> Result<Instance> {
    Ok(Instance::from_json(&read(path)?)?)
}

fn load_clustering(path: &Path, inst: &Instance) -> Result<(Clustering, ClusteringDoc)> {
    let doc: ClusteringDoc = serde_json::from_str(&read(path)?).map_err(DocError::from)?;
    Ok((doc.to_clustering(&inst.graph)?, doc))
}

fn load_emulator(path: &Path) -> Result<Emulator> {
    let doc: EmulatorDoc = serde_json::from_str(&read(path)?).map_err(DocError::from)?;
    Ok(doc.to_emulator()?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { family } => match family {
            Family::Grid { width, height, regions, seed, out } => {
                let inst = gen_grid_instance(width, height, regions, seed)?;
                write(&out, &inst.to_json())
            }
            Family::Segments { count, bbox, seed, out } => write(&out, &to_json(&gen_segment_scene(count, bbox, seed)?)),
            Family::Clique { count, out } => write(&out, &to_json(&gen_clique_scene(count)?)),
        },
        Command::Convert { scene, out } => {
            let scene: StringScene = serde_json::from_str(&read(&scene)?).map_err(DocError::from)?;
            let (inst, meta) = scene_to_instance(&scene).map_err(|e| Failure::Input(e.to_string()))?;
            info!("arrangement: {} crossings, {} touching pairs, scale {:?}", meta.crossings, meta.touches.len(), meta.scale);
            write(&out, &inst.to_json())
        }
        Command::Cluster { instance, out, trace } => {
            let inst = load_instance(&instance)?;
            let t = Instant::now();
            let c = cluster(&inst.graph, &inst.regions, ClusterOptions { trace: trace.is_some() })?;
            info!("{} clusters in {:?}", c.len(), t.elapsed());
            if let (Some(p), Some(tr)) = (&trace, &c.trace) {
                write(&Some(p.clone()), &trace_to_json(tr))?;
            }
            let name = trace.map(|p| p.display().to_string());
            write(&out, &to_json(&ClusteringDoc::from_clustering(&inst.graph, &c, name)))
        }
        Command::Emulate { instance, clustering, out } => {
            let inst = load_instance(&instance)?;
            let (c, _) = load_clustering(&clustering, &inst)?;
            let e = build_emulator(&inst.graph, &inst.regions, &c)?;
            write(&out, &to_json(&EmulatorDoc::from_emulator(&e)))
        }
        Command::Verify { instance, clustering, emulator, out, trace, mode, max_pairs, seed } => {
            let inst = load_instance(&instance)?;
            let (mut c, doc) = load_clustering(&clustering, &inst)?;
            let e = load_emulator(&emulator)?;
            let trace_path = trace.or_else(|| {
                doc.trace_file.map(|f| {
                    let p = PathBuf::from(&f);
                    if p.is_absolute() || p.exists() {
                        p
                    } else {
                        clustering.parent().unwrap_or(Path::new(".")).join(p)
                    }
                })
            });
            if let Some(p) = trace_path {
                c.trace = Some(trace_from_json(&read(&p)?)?);
            }
            let t = Instant::now();
            let opts = VerifyOptions { mode: mode.into(), max_pairs, seed };
            let report = verify_all(&inst.graph, &inst.regions, &c, &e, &opts)?;
            info!("verified {} pairs in {:?}", report.pairs_checked, t.elapsed());
            write(&out, &to_json(&report))?;
            if report.passed() {
                Ok(())
            } else {
                for v in report.violations.iter().take(10) {
                    eprintln!("violation [{}]: {}", v.kind, v.detail);
                }
                Err(Failure::Verification(report.violations.len()))
            }
        }
        Command::Report { instance, clustering, emulator, out, max_pairs, seed } => {
            let inst = load_instance(&instance)?;
            let _ = load_clustering(&clustering, &inst)?;
            let e = load_emulator(&emulator)?;
            let cg = ContactGraph::new(&inst.graph, &inst.regions);
            let opts = VerifyOptions { mode: Mode::Derived, max_pairs, seed };
            let d = check_distortion(&cg, &e, CONSTANTS.c, None, &opts);
            let mut w = csv::Writer::from_writer(Vec::new());
            let header = ["contact_distance", "emulator_distance", "stretch", "pairs"];
            w.write_record(header).map_err(|e| Failure::Internal(e.to_string()))?;
            for (&(g, h), &count) in &d.histogram {
                let stretch = if g == 0 { String::new() } else { format!("{:.6}", h as f64 / g as f64) };
                w.write_record([g.to_string(), h.to_string(), stretch, count.to_string()]).map_err(|e| Failure::Internal(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
            let text = String::from_utf8(bytes).expect("csv is utf-8");
            write(&out, text.trim_end())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verification(n) => eprintln!("verification failed: {n} violations"),
                Failure::Input(m) => eprintln!("input error: {m}"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
