use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mdlan::baselines::RpcaConfig;
use mdlan::bench::{
    cell_seed, f_measure, gen_shadowed_faces, gen_synthetic_video, run_grid, run_trial_with,
    write_grid, write_trials, Method, MethodConfigs, SyntheticSpec,
};
use mdlan::codelength::{CodelengthKind, CodelengthModel, ThetaMode};
use mdlan::imaging::{
    add_salt_pepper, decompose_stack, foreground_mask, load_mask_stack, load_stack,
    save_components_named, save_mask_stack, save_stack, ImageStack,
};
use mdlan::io::{load_matrix, save_mdm1};
use mdlan::solver::write_trace;
use mdlan::solver::Mu1Rule;
use mdlan::{BinaryMask, DecompositionResult, SolverConfig};

#[derive(Parser, Debug)]
#[command(name = "mdlan", version, about = "Low-rank plus sparse decomposition with MDL atom selection")]
struct Cli {
    /// Worker threads for trials, grid cells and channels. Defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// Decompose one matrix (MDM1 or CSV).
    Decompose(DecomposeArgs),
    /// Repeated trials on synthetic low-rank plus sparse data.
    Synth(SynthArgs),
    /// Success-ratio grid over (n, p).
    PhaseGrid(GridArgs),
    /// NRMSE, rank and sparsity estimates against the corruption ratio.
    SweepP(SweepArgs),
    /// Background modeling on a directory of frames.
    Background(BackgroundArgs),
    /// Shadow and specularity removal on a face stack.
    Faces(FacesArgs),
    /// Write a synthetic video with per-pixel foreground truth.
    VideoGen(VideoGenArgs),
    /// Write a synthetic shadowed face stack.
    FacesGen(FacesGenArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose(_) => "decompose",
            Command::Synth(_) => "synth",
            Command::PhaseGrid(_) => "phase-grid",
            Command::SweepP(_) => "sweep-p",
            Command::Background(_) => "background",
            Command::Faces(_) => "faces",
            Command::VideoGen(_) => "video-gen",
            Command::FacesGen(_) => "faces-gen",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Synth(a) => Some(a.seed),
            Command::PhaseGrid(a) => Some(a.seed),
            Command::SweepP(a) => Some(a.seed),
            Command::Faces(a) => Some(a.seed),
            Command::VideoGen(a) => Some(a.seed),
            Command::FacesGen(a) => Some(a.seed),
            Command::Decompose(_) | Command::Background(_) => None,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelArg {
    Lg,
    Laplace,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum ThetaArg {
    Support,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Mdlan,
    Rpca,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mdlan => Method::Mdlan,
            MethodArg::Rpca => Method::Rpca,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mu1RuleArg {
    FirstAtom,
    Spectral,
}

/// Solver flags, named after the configuration fields.
#[derive(Args, Debug, Clone, Serialize)]
struct SolverFlags {
    /// Initial penalty in working units; overrides --mu1-rule.
    #[arg(long)]
    mu1: Option<f64>,
    /// MDLAN initial penalty: a multiple of 1 / ||Y||_2, or a multiple of the
    /// penalty at which the leading atom of Y pays for itself.
    #[arg(long, value_enum, default_value_t = Mu1RuleArg::Spectral)]
    mu1_rule: Mu1RuleArg,
    /// Multiplier for --mu1-rule; defaults to 1.25 (spectral) or 3 (first-atom).
    #[arg(long)]
    mu1_factor: Option<f64>,
    #[arg(long, default_value_t = 1.5)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    theta1: f64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Candidate atoms per iteration; defaults to min(m, n).
    #[arg(long)]
    r_hat_cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModelArg::Lg)]
    model: ModelArg,
    #[arg(long, default_value_t = 0.5)]
    sigma_floor: f64,
    #[arg(long, value_enum, default_value_t = ThetaArg::Support)]
    theta_mode: ThetaArg,
    /// Median |Y| the solver rescales to before coding.
    #[arg(long, default_value_t = mdlan::solver::WORKING_SCALE, conflicts_with = "native_scale")]
    working_scale: f64,
    /// Code Y in its own units, without rescaling.
    #[arg(long)]
    native_scale: bool,
    /// Keep theta when the sparse update is empty.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    hold_theta: bool,
    /// RPCA sparsity weight; defaults to 1 / sqrt(max(m, n)).
    #[arg(long)]
    gamma: Option<f64>,
}

impl SolverFlags {
    fn configs(&self) -> MethodConfigs {
        MethodConfigs {
            mdlan: SolverConfig {
                mu1: self.mu1,
                mu1_rule: match self.mu1_rule {
                    Mu1RuleArg::FirstAtom => Mu1Rule::FirstAtom(self.mu1_factor.unwrap_or(3.0)),
                    Mu1RuleArg::Spectral => Mu1Rule::Spectral(self.mu1_factor.unwrap_or(1.25)),
                },
                rho: self.rho,
                theta1: self.theta1,
                tol: self.tol,
                max_iter: self.max_iter,
                r_hat_cap: self.r_hat_cap,
                model: CodelengthModel {
                    kind: match self.model {
                        ModelArg::Lg => CodelengthKind::Lg,
                        ModelArg::Laplace => CodelengthKind::Laplace,
                    },
                    sigma_floor: self.sigma_floor,
                },
                image_shape: None,
                theta_mode: match self.theta_mode {
                    ThetaArg::Support => ThetaMode::Support,
                    ThetaArg::All => ThetaMode::All,
                },
                working_scale: (!self.native_scale).then_some(self.working_scale),
                hold_theta: self.hold_theta,
            },
            rpca: RpcaConfig {
                gamma: self.gamma,
                tol: self.tol,
                max_iter: self.max_iter,
                mu1: self.mu1,
                rho: self.rho,
            },
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Mdlan)]
    method: MethodArg,
    /// Frame geometry `HxW` when columns are vectorized images.
    #[arg(long, value_parser = parse_shape)]
    image_shape: Option<(usize, usize)>,
    /// Per-iteration diagnostics CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug, Serialize)]
struct SynthArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mdlan")]
    method: Vec<MethodArg>,
    /// Append a wall_seconds column (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug, Serialize)]
struct GridArgs {
    #[arg(long, default_value_t = 900)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.11,0.21,0.31,0.41")]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mdlan,rpca")]
    methods: Vec<MethodArg>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long, default_value_t = 108)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    rank: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.3,0.4,0.5")]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mdlan,rpca")]
    methods: Vec<MethodArg>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug, Serialize)]
struct BackgroundArgs {
    #[arg(long)]
    frames: PathBuf,
    /// Foreground masks, one frame per input frame; nonzero is foreground.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// File-name glob inside the frame directories.
    #[arg(long, default_value = "*.p[gp]m")]
    pattern: String,
    /// A pixel is foreground when |E| exceeds this.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug, Serialize)]
struct FacesArgs {
    #[arg(long)]
    frames: PathBuf,
    #[arg(long, default_value = "*.p[gp]m")]
    pattern: String,
    /// Fraction of pixels replaced by 0 or 255 before decomposition.
    #[arg(long)]
    salt_pepper: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug, Serialize)]
struct VideoGenArgs {
    #[arg(long, default_value_t = 48)]
    h: usize,
    #[arg(long, default_value_t = 64)]
    w: usize,
    #[arg(long, default_value_t = 40)]
    frames: usize,
    #[arg(long, default_value_t = 8)]
    square: usize,
    /// Amplitude of the sinusoidal illumination gain.
    #[arg(long, default_value_t = 0.0)]
    drift: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct FacesGenArgs {
    #[arg(long, default_value_t = 32)]
    h: usize,
    #[arg(long, default_value_t = 28)]
    w: usize,
    #[arg(long, default_value_t = 20)]
    frames: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    if h == 0 || w == 0 {
        return Err(format!("shape must be positive, got {s:?}"));
    }
    Ok((h, w))
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<mdlan::Error> for Failure {
    fn from(e: mdlan::Error) -> Self {
        match e {
            mdlan::Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Whether every solve converged.
type Outcome = Result<bool, Failure>;

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    flags: BTreeMap<String, serde_json::Value>,
    seed: Option<u64>,
    started_at: String,
    wall_seconds: f64,
    version: &'a str,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)?;
    Ok(())
}

fn create_parent(path: &Path) -> Result<PathBuf, Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    create_parent(path)?;
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn methods(list: &[MethodArg]) -> Result<Vec<Method>, Failure> {
    if list.is_empty() {
        return Err(Failure::Usage("at least one method is required".into()));
    }
    Ok(list.iter().map(|&m| m.into()).collect())
}

#[derive(Serialize)]
struct DecomposeSummary {
    method: String,
    rows: usize,
    cols: usize,
    rank_est: usize,
    nnz_est: usize,
    iters: usize,
    status: &'static str,
    final_feasibility: f64,
}

fn summarize(method: &str, r: &DecompositionResult) -> DecomposeSummary {
    DecomposeSummary {
        method: method.to_string(),
        rows: r.x.rows(),
        cols: r.x.cols(),
        rank_est: r.rank_est,
        nnz_est: r.nnz_est,
        iters: r.iters,
        status: r.status.as_str(),
        final_feasibility: r.final_feasibility(),
    }
}

fn cmd_decompose(a: &DecomposeArgs) -> Outcome {
    let y = load_matrix(&a.input)?;
    let mut configs = a.solver.configs();
    configs.mdlan.image_shape = a.image_shape;
    let method: Method = a.method.into();
    let r = configs.run(method, &y)?;
    std::fs::create_dir_all(&a.out)?;
    save_mdm1(&r.x, &a.out.join("X.mdm1"))?;
    save_mdm1(&r.e, &a.out.join("E.mdm1"))?;
    if let Some(path) = &a.trace {
        write_trace(&r.history, create_file(path)?)?;
    }
    write_json(&a.out.join("summary.json"), &summarize(method.as_str(), &r))?;
    Ok(r.converged())
}

fn cmd_synth(a: &SynthArgs) -> Outcome {
    let configs = a.solver.configs();
    let methods = methods(&a.method)?;
    let mut jobs = Vec::new();
    for &method in &methods {
        for t in 0..a.trials {
            let spec = SyntheticSpec {
                m: a.m,
                n: a.n,
                r: a.rank,
                p: a.p,
                seed: cell_seed(a.seed, a.n, a.p, t),
            };
            spec.validate()?;
            jobs.push((method, spec));
        }
    }
    use rayon::prelude::*;
    let records = jobs
        .par_iter()
        .map(|(method, spec)| run_trial_with(spec, *method, &configs))
        .collect::<mdlan::Result<Vec<_>>>()?;
    write_trials(&records, create_file(&a.out)?, a.timing)?;
    Ok(records.iter().all(|r| r.converged))
}

fn cmd_grid(
    m: usize,
    rank: usize,
    n_list: &[usize],
    p_list: &[f64],
    trials: usize,
    seed: u64,
    list: &[MethodArg],
    solver: &SolverFlags,
    out: &Path,
) -> Outcome {
    let (cells, records) =
        run_grid(m, rank, n_list, p_list, trials, &methods(list)?, seed, &solver.configs())?;
    write_grid(&cells, create_file(out)?)?;
    Ok(records.iter().all(|r| r.converged))
}

fn decompose_images(stack: &ImageStack, solver: &SolverFlags, out: &Path) -> Result<Vec<DecompositionResult>, Failure> {
    let results = decompose_stack(stack, &solver.configs().mdlan)?;
    let many = results.len() > 1;
    for (c, r) in results.iter().enumerate() {
        let suffix = if many { format!("_c{c}") } else { String::new() };
        save_components_named(r, (stack.h, stack.w), out, &suffix)?;
    }
    Ok(results)
}

#[derive(Serialize)]
struct ImageSummary {
    h: usize,
    w: usize,
    frames: usize,
    channels: Vec<DecomposeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_measure: Option<f64>,
}

fn cmd_background(a: &BackgroundArgs) -> Outcome {
    let stack = load_stack(&a.frames, &a.pattern)?;
    std::fs::create_dir_all(&a.out)?;
    let results = decompose_images(&stack, &a.solver, &a.out)?;
    let mut mask = BinaryMask::falses(stack.h * stack.w, stack.frames());
    for r in &results {
        let m = foreground_mask(&r.e, a.kappa)?;
        for (dst, src) in mask.data_mut().iter_mut().zip(m.data()) {
            *dst |= *src;
        }
    }
    save_mask_stack(&mask, (stack.h, stack.w), &a.out, "mask")?;
    let f_measure = match &a.truth {
        Some(dir) => {
            let truth = load_mask_stack(dir, &a.pattern)?;
            Some(f_measure(&mask, &truth)?)
        }
        None => None,
    };
    let summary = ImageSummary {
        h: stack.h,
        w: stack.w,
        frames: stack.frames(),
        channels: results.iter().map(|r| summarize("mdlan", r)).collect(),
        f_measure,
    };
    write_json(&a.out.join("summary.json"), &summary)?;
    if let Some(f) = f_measure {
        println!("f_measure {f}");
    }
    Ok(results.iter().all(DecompositionResult::converged))
}

fn cmd_faces(a: &FacesArgs) -> Outcome {
    let mut stack = load_stack(&a.frames, &a.pattern)?;
    std::fs::create_dir_all(&a.out)?;
    if let Some(d) = a.salt_pepper {
        for (c, ch) in stack.channels.iter_mut().enumerate() {
            *ch = add_salt_pepper(ch, d, mdlan::rng::derive_seed(a.seed, &[c as u64]))?;
        }
        save_stack(&stack, &a.out, "observed")?;
    }
    let results = decompose_images(&stack, &a.solver, &a.out)?;
    let summary = ImageSummary {
        h: stack.h,
        w: stack.w,
        frames: stack.frames(),
        channels: results.iter().map(|r| summarize("mdlan", r)).collect(),
        f_measure: None,
    };
    write_json(&a.out.join("summary.json"), &summary)?;
    Ok(results.iter().all(DecompositionResult::converged))
}

fn cmd_video_gen(a: &VideoGenArgs) -> Outcome {
    let v = gen_synthetic_video(a.h, a.w, a.frames, a.square, a.drift, a.seed)?;
    save_stack(&ImageStack::gray(a.h, a.w, v.frames)?, &a.out.join("frames"), "frame")?;
    save_stack(&ImageStack::gray(a.h, a.w, v.background)?, &a.out.join("background"), "background")?;
    save_mask_stack(&v.truth, (a.h, a.w), &a.out.join("truth"), "truth")?;
    Ok(true)
}

fn cmd_faces_gen(a: &FacesGenArgs) -> Outcome {
    let f = gen_shadowed_faces(a.h, a.w, a.frames, a.seed)?;
    save_stack(&ImageStack::gray(a.h, a.w, f.observed)?, &a.out.join("frames"), "face")?;
    save_stack(&ImageStack::gray(a.h, a.w, f.clean)?, &a.out.join("clean"), "clean")?;
    save_mask_stack(&f.shadow, (a.h, a.w), &a.out.join("shadow"), "shadow")?;
    Ok(true)
}

/// Directory that receives `run.json`.
fn manifest_dir(cmd: &Command) -> &Path {
    match cmd {
        Command::Decompose(a) => &a.out,
        Command::Background(a) => &a.out,
        Command::Faces(a) => &a.out,
        Command::VideoGen(a) => &a.out,
        Command::FacesGen(a) => &a.out,
        Command::Synth(a) => a.out.parent().unwrap_or(Path::new(".")),
        Command::PhaseGrid(a) => a.out.parent().unwrap_or(Path::new(".")),
        Command::SweepP(a) => a.out.parent().unwrap_or(Path::new(".")),
    }
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Decompose(a) => cmd_decompose(a),
        Command::Synth(a) => cmd_synth(a),
        Command::PhaseGrid(a) => cmd_grid(
            a.m, a.rank, &a.n_list, &a.p_list, a.trials, a.seed, &a.methods, &a.solver, &a.out,
        ),
        Command::SweepP(a) => cmd_grid(
            a.m, a.rank, &[a.n], &a.p_list, a.trials, a.seed, &a.methods, &a.solver, &a.out,
        ),
        Command::Background(a) => cmd_background(a),
        Command::Faces(a) => cmd_faces(a),
        Command::VideoGen(a) => cmd_video_gen(a),
        Command::FacesGen(a) => cmd_faces_gen(a),
    }
}

fn run(cli: Cli) -> Outcome {
    let started_at = chrono::Utc::now().to_rfc3339();
    let start = Instant::now();
    let pool = match cli.jobs {
        Some(0) => return Err(Failure::Usage("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n),
        None => rayon::ThreadPoolBuilder::new(),
    }
    .build()
    .map_err(|e| Failure::Input(e.to_string()))?;
    let converged = pool.install(|| dispatch(&cli.command))?;

    let mut flags: BTreeMap<String, serde_json::Value> =
        match serde_json::to_value(&cli.command)? {
            serde_json::Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
    flags.insert("jobs".into(), serde_json::json!(cli.jobs));
    let dir = manifest_dir(&cli.command);
    std::fs::create_dir_all(dir)?;
    let manifest = Manifest {
        subcommand: cli.command.name(),
        flags,
        seed: cli.command.seed(),
        started_at,
        wall_seconds: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&dir.join("run.json"), &manifest)?;
    Ok(converged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: solver stopped at the iteration cap without converging");
            ExitCode::from(3)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
