//! `unn`: generate uncertain planar instances, answer nonzero-probability
//! nearest-neighbor queries, quantify candidate probabilities with the
//! engine of your choice, dump diagram features, and benchmark.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use uncertain_nn::geom::Point2;
use uncertain_nn::instances::{
    default_equal_radius_omega, gen_lb_cubic, gen_lb_cubic_equal_radius, gen_lb_quadratic,
    gen_pvd_quartic, gen_random, instance_stats, InstanceError, RandomParams, WeightScheme,
};
use uncertain_nn::io::{
    read_instance, to_json, FeaturesFile, InstanceFile, IoError, NnFile, ResultFile,
};
use uncertain_nn::model::{UncertainSet, Variant};
use uncertain_nn::nonzero::{enumerate_diagram_features, nn_nonzero, NonzeroError};
use uncertain_nn::quantify::exact::exact_discrete;
use uncertain_nn::quantify::mc::{default_query_budget, mc_build_with_guarantee, mc_query};
use uncertain_nn::quantify::quadrature::continuous_quadrature;
use uncertain_nn::quantify::spiral::SpiralEngine;
use uncertain_nn::quantify::{QuantifyError, QuantificationVector};

#[derive(Parser)]
#[command(name = "unn", version, about = "planar uncertain nearest-neighbor engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Quantify nonzero-candidate probabilities at a query point.
    Query(QueryArgs),
    /// List the points with nonzero nearest-neighbor probability.
    Nn(NnArgs),
    /// Enumerate candidate diagram vertices of a disk instance.
    Features(FeaturesArgs),
    /// Time quantification engines over a random query batch.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Args)]
struct GenCommon {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Embed a stats block in the instance file.
    #[arg(long)]
    stats: bool,
}

#[derive(Subcommand)]
enum Family {
    /// 4m disks: two distant flanks of huge disks plus a vertical ladder.
    LbCubic(LbCubicArgs),
    /// 3m unit disks: two flanks plus a quarter-circle arc.
    LbCubicEqual(LbCubicEqualArgs),
    /// 2m collinear unit disks.
    LbQuadratic(LbQuadraticArgs),
    /// n two-location points: jittered near ring plus one shared far spot.
    Pvd(PvdArgs),
    /// Seeded random instance of either variant.
    Random(RandomArgs),
}

#[derive(Args)]
struct LbCubicArgs {
    /// Disks per block; the instance has 4m points.
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Args)]
struct LbCubicEqualArgs {
    /// Disks per block; the instance has 3m points.
    #[arg(long)]
    m: usize,
    /// Flank spacing; a small default keeps the flanks nearly coherent.
    #[arg(long)]
    omega: Option<f64>,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Args)]
struct LbQuadraticArgs {
    /// Half the disk count; the instance has 2m points.
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Args)]
struct PvdArgs {
    /// Number of uncertain points.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    variant: VariantArg,
    /// Number of uncertain points.
    #[arg(long)]
    n: usize,
    /// Locations per point (discrete variant).
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    seed: u64,
    /// Centers and locations are drawn from [-box-half, box-half]^2.
    #[arg(long, default_value_t = 10.0)]
    box_half: f64,
    /// Smallest disk radius (disk variant).
    #[arg(long, default_value_t = 0.5)]
    r_min: f64,
    /// Largest disk radius (disk variant).
    #[arg(long, default_value_t = 2.0)]
    r_max: f64,
    /// Location weight scheme (discrete variant).
    #[arg(long, value_enum, default_value = "uniform")]
    weights: WeightsArg,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Disk,
    Discrete,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Uniform,
    Dirichlet,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Quadrature,
    Mc,
    Spiral,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Query point coordinates.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
    q: Vec<f64>,
    #[arg(long)]
    method: MethodArg,
    /// Additive error bound (mc, spiral).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Failure probability over the whole query workload (mc).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Workload size the mc guarantee must cover; defaults to the
    /// instantiation count bound of the instance.
    #[arg(long)]
    q_count: Option<u64>,
    /// Integration tolerance (quadrature).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NnArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Query point coordinates.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
    q: Vec<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Seed for the query batch and the mc index.
    #[arg(long)]
    seed: u64,
    /// Queries per configuration.
    #[arg(long, default_value_t = 20)]
    queries: usize,
    /// Engines to time.
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    methods: Vec<MethodArg>,
    /// Error bound; repeat to sweep mc/spiral configurations.
    #[arg(long = "epsilon")]
    epsilons: Vec<f64>,
    /// Failure probability (mc).
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Workload size for the mc guarantee.
    #[arg(long)]
    q_count: Option<u64>,
    /// Integration tolerance (quadrature).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Generation(String),
    Variant(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Generation(_) => 3,
            CliError::Variant(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Generation(m)
            | CliError::Variant(m)
            | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::BadParameter(_) => CliError::Usage(e.to_string()),
            InstanceError::GenerationFailure(_) => CliError::Generation(e.to_string()),
        }
    }
}

impl From<QuantifyError> for CliError {
    fn from(e: QuantifyError) -> Self {
        match e {
            QuantifyError::VariantMismatch(_) => CliError::Variant(e.to_string()),
            QuantifyError::BadParameter(_) => CliError::Usage(e.to_string()),
            QuantifyError::QuadratureNonconvergence => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<NonzeroError> for CliError {
    fn from(e: NonzeroError) -> Self {
        match e {
            NonzeroError::VariantMismatch(_) => CliError::Variant(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Gen(a) => run_gen(a),
        Cmd::Query(a) => run_query(a),
        Cmd::Nn(a) => run_nn(a),
        Cmd::Features(a) => run_features(a),
        Cmd::Bench(a) => run_bench(a),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<UncertainSet, CliError> {
    let (set, _) = read_instance(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(set)
}

fn query_point(q: &[f64]) -> Result<Point2, CliError> {
    if !(q[0].is_finite() && q[1].is_finite()) {
        return Err(CliError::Usage(format!(
            "query coordinates must be finite, got ({}, {})",
            q[0], q[1]
        )));
    }
    Ok(Point2::new(q[0], q[1]))
}

fn run_gen(a: GenArgs) -> Result<(), CliError> {
    let (set, common) = match a.family {
        Family::LbCubic(f) => (gen_lb_cubic(f.m)?, f.common),
        Family::LbCubicEqual(f) => {
            let omega = f.omega.unwrap_or_else(|| default_equal_radius_omega(f.m));
            (gen_lb_cubic_equal_radius(f.m, omega)?, f.common)
        }
        Family::LbQuadratic(f) => (gen_lb_quadratic(f.m)?, f.common),
        Family::Pvd(f) => (gen_pvd_quartic(f.n, f.seed)?, f.common),
        Family::Random(f) => {
            let params = RandomParams {
                variant: match f.variant {
                    VariantArg::Disk => Variant::Disk,
                    VariantArg::Discrete => Variant::Discrete,
                },
                n: f.n,
                k: f.k,
                seed: f.seed,
                box_half: f.box_half,
                r_min: f.r_min,
                r_max: f.r_max,
                weights: match f.weights {
                    WeightsArg::Uniform => WeightScheme::Uniform,
                    WeightsArg::Dirichlet => WeightScheme::Dirichlet,
                },
            };
            (gen_random(&params)?, f.common)
        }
    };
    let stats = common.stats.then(|| instance_stats(&set));
    let file = InstanceFile::from_set(&set, stats);
    emit(&common.out, &to_json(&file)?)
}

fn run_query(a: QueryArgs) -> Result<(), CliError> {
    let set = load(&a.instance)?;
    let q = query_point(&a.q)?;
    let start = Instant::now();
    let mut file = match a.method {
        MethodArg::Exact => ResultFile::new(q, &exact_discrete(q, &set)?),
        MethodArg::Quadrature => {
            let v = continuous_quadrature(q, &set, a.tol)?;
            let mut f = ResultFile::new(q, &v);
            f.tolerance = Some(a.tol);
            f
        }
        MethodArg::Mc => {
            let (Some(epsilon), Some(delta), Some(seed)) = (a.epsilon, a.delta, a.seed) else {
                return Err(CliError::Usage(
                    "--method mc requires --epsilon, --delta, and --seed".into(),
                ));
            };
            let q_count = a
                .q_count
                .unwrap_or_else(|| default_query_budget(set.total_locations()));
            let index = mc_build_with_guarantee(&set, epsilon, delta, q_count, seed)?;
            let v = mc_query(q, &index);
            let mut f = ResultFile::new(q, &v);
            f.epsilon = Some(epsilon);
            f.delta = Some(delta);
            f.seed = Some(seed);
            f.rounds = Some(index.rounds());
            f
        }
        MethodArg::Spiral => {
            let Some(epsilon) = a.epsilon else {
                return Err(CliError::Usage("--method spiral requires --epsilon".into()));
            };
            let engine = SpiralEngine::new(&set)?;
            let params = engine.params(epsilon)?;
            let v = engine.query(q, epsilon)?;
            let mut f = ResultFile::new(q, &v);
            f.epsilon = Some(epsilon);
            f.prefix = Some(params.m);
            f
        }
    };
    file.timing_us = Some(start.elapsed().as_secs_f64() * 1e6);
    emit(&a.out, &to_json(&file)?)
}

fn run_nn(a: NnArgs) -> Result<(), CliError> {
    let set = load(&a.instance)?;
    let q = query_point(&a.q)?;
    let result = nn_nonzero(q, &set);
    let file = NnFile {
        version: uncertain_nn::io::FORMAT_VERSION,
        query: [q.x, q.y],
        indices: result.indices,
    };
    emit(&a.out, &to_json(&file)?)
}

fn run_features(a: FeaturesArgs) -> Result<(), CliError> {
    let set = load(&a.instance)?;
    let vertices = enumerate_diagram_features(&set)?;
    let file = FeaturesFile::from_vertices(&vertices);
    emit(&a.out, &to_json(&file)?)
}

/// Mean and 95th percentile of a nonempty sample, in the sample's unit.
fn mean_p95(mut times: Vec<f64>) -> (f64, f64) {
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    times.sort_by(f64::total_cmp);
    let idx = ((0.95 * times.len() as f64).ceil() as usize).clamp(1, times.len()) - 1;
    (mean, times[idx])
}

fn run_bench(a: BenchArgs) -> Result<(), CliError> {
    if a.queries == 0 {
        return Err(CliError::Usage("--queries must be at least 1".into()));
    }
    let set = load(&a.instance)?;
    let n = set.len();
    let k = set.max_locations_per_point();
    let (lo, hi) = set.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let batch: Vec<Point2> = (0..a.queries)
        .map(|_| Point2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y)))
        .collect();
    let epsilons = if a.epsilons.is_empty() { vec![0.1] } else { a.epsilons.clone() };

    // (method, work parameter, per-query closure)
    type QueryFn<'s> = Box<dyn Fn(Point2) -> Result<QuantificationVector, QuantifyError> + 's>;
    let set_ref: &UncertainSet = &set;
    let tol = a.tol;
    let mut configs: Vec<(&'static str, usize, QueryFn)> = Vec::new();
    for method in &a.methods {
        match method {
            MethodArg::Exact => {
                // reject a mismatched variant before timing starts
                exact_discrete(batch[0], set_ref)?;
                configs.push((
                    "exact",
                    set.total_locations(),
                    Box::new(move |q| exact_discrete(q, set_ref)),
                ));
            }
            MethodArg::Quadrature => {
                continuous_quadrature(batch[0], set_ref, tol)?;
                configs.push((
                    "quadrature",
                    0,
                    Box::new(move |q| continuous_quadrature(q, set_ref, tol)),
                ));
            }
            MethodArg::Mc => {
                let q_count = a
                    .q_count
                    .unwrap_or_else(|| default_query_budget(set.total_locations()));
                for &epsilon in &epsilons {
                    let index =
                        mc_build_with_guarantee(set_ref, epsilon, a.delta, q_count, a.seed)?;
                    let s = index.rounds();
                    configs.push(("mc", s, Box::new(move |q| Ok(mc_query(q, &index)))));
                }
            }
            MethodArg::Spiral => {
                for &epsilon in &epsilons {
                    let engine = SpiralEngine::new(set_ref)?;
                    let m = engine.params(epsilon)?.m;
                    configs.push(("spiral", m, Box::new(move |q| engine.query(q, epsilon))));
                }
            }
        }
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["method", "n", "k", "param", "mean", "p95"])
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    for (name, param, call) in &configs {
        let mut times = Vec::with_capacity(batch.len());
        for &q in &batch {
            let start = Instant::now();
            call(q)?;
            times.push(start.elapsed().as_secs_f64() * 1e6);
        }
        let (mean, p95) = mean_p95(times);
        csv.write_record([
            name.to_string(),
            n.to_string(),
            k.to_string(),
            param.to_string(),
            format!("{mean:.3}"),
            format!("{p95:.3}"),
        ])
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let bytes = csv.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    emit(&a.out, &String::from_utf8(bytes).expect("csv writes utf-8"))
}
