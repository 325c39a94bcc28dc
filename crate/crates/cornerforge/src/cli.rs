//! The `cornerforge` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cornerforge_core::baselines::{detect_random, DEFAULT_BLUR_SIGMA, HARRIS_K};
use cornerforge_core::detectors::{Detector, FastRef, RandomDetector, ResponseDetector, ResponseKind, TreeDetector};
use cornerforge_core::faster::{
    detect_sixteenfold_scored, distill, multi_run, AnnealParams, CostWeights, FasterDetector,
    FasterOffsets, FasterTree, Sixteenfold,
};
use cornerforge_core::learn::{
    augment_exhaustive, build_tree_owned, build_tree_shared, emit_source, extract_training_data, EmitTarget,
    TrainingSet,
};
use cornerforge_core::repeat::{
    area_under_curve, default_counts, defined_curve, repeatability_samples, PairPolicy, CURVE_MAX,
};
use cornerforge_core::ring::RING_MARGIN;
use cornerforge_core::runtime::{top_n_by_score, top_n_exact};
use cornerforge_core::{GrayImage, Keypoint, TernaryTree};

use crate::dataset::{load_dataset, make_dataset, parse_policy, policy_name, write_dataset, DatasetParams};
use crate::keypoints::format_keypoints;
use crate::pgm::load_pgm;
use crate::treefile::{parse_tree, write_tree_file, OffsetSet, TreeFile};
use crate::{assets, bench, read_text, svg, write_file, Error, Provenance};

#[derive(Debug, Parser)]
#[command(name = "cornerforge", version, about = "Segment-test corner detection, tree learning and FAST-ER")]
pub struct Cli {
    /// Worker threads; 1 gives the canonical output.
    #[arg(long, global = true, env = "CORNERFORGE_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect corners in one PGM image.
    Detect(DetectArgs),
    /// Learn a FAST-n decision tree from images and/or all ring configurations.
    LearnTree(LearnTreeArgs),
    /// Repeatability curves and their areas on a dataset directory.
    EvalRepeat(EvalArgs),
    /// Pixel rate of detectors, including non-maximal suppression.
    Bench(BenchArgs),
    /// Generate a synthetic warped-view dataset.
    MakeDataset(MakeDatasetArgs),
    /// Optimize a FAST-ER tree by simulated annealing.
    Anneal(AnnealArgs),
    /// Compile a FAST-ER tree and its symmetries into one tree.
    Distill(DistillArgs),
    /// Emit a tree as C or Rust source.
    Emit(EmitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    FastRef,
    FastTree,
    Faster,
    Harris,
    ShiTomasi,
    Random,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    pub image: PathBuf,
    #[arg(long, value_enum, default_value = "fast-tree")]
    pub algo: Algo,
    /// Contiguous arc length for fast-ref and fast-tree.
    #[arg(long, default_value_t = 9)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub t: u8,
    /// Tree file for fast-tree (16 offsets) or faster (48 offsets).
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Run a 48-offset tree once per pixel instead of sixteen-fold.
    #[arg(long)]
    pub distilled: bool,
    /// Keep only the strongest features.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = HARRIS_K)]
    pub k: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LearnTreeArgs {
    pub images: Vec<PathBuf>,
    #[arg(long, default_value_t = 9)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub t: u8,
    /// Add every ring configuration so the tree is exact.
    #[arg(long)]
    pub exhaustive: bool,
    /// Weight of each added configuration.
    #[arg(long, default_value_t = 1)]
    pub low_weight: u32,
    /// Multiplier on observed image counts.
    #[arg(long, default_value_t = 256)]
    pub image_weight: u32,
    /// Constrain all root children to test the same offset.
    #[arg(long)]
    pub shared_second: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub dataset: PathBuf,
    /// Comma-separated detectors: fast-ref[:n], fast-tree[:n], faster, harris, shi-tomasi, random.
    #[arg(long, default_value = "fast-tree:9,fast-tree:12,harris,shi-tomasi,random")]
    pub algo: String,
    /// Comma-separated feature counts; default 0, 25, ..., 2000.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    #[arg(long, default_value_t = 5.0)]
    pub epsilon: f64,
    /// Detection threshold for segment-test detectors.
    #[arg(long, default_value_t = 1)]
    pub t: u8,
    /// FAST-ER tree used by the `faster` detector.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Run the `faster` tree once per pixel instead of sixteen-fold.
    #[arg(long)]
    pub distilled: bool,
    #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = HARRIS_K)]
    pub k: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write plot.svg.
    #[arg(long)]
    pub plot: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub images: Vec<PathBuf>,
    #[arg(long, default_value = "fast-tree:9,fast-tree:12,fast-ref:9,harris,shi-tomasi")]
    pub algos: String,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 2)]
    pub warmup: usize,
    #[arg(long, default_value_t = 20)]
    pub t: u8,
    /// FAST-ER tree used by the `faster` detector.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Run the `faster` tree once per pixel instead of sixteen-fold.
    #[arg(long)]
    pub distilled: bool,
    #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = HARRIS_K)]
    pub k: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MakeDatasetArgs {
    /// Base image; a synthetic scene of --width x --height when absent.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub frames: usize,
    /// Largest inward corner displacement, as a fraction of the image size.
    #[arg(long, default_value_t = 0.15)]
    pub warp: f64,
    /// Standard deviation of added Gaussian noise.
    #[arg(long, default_value_t = 2.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 768)]
    pub width: usize,
    #[arg(long, default_value_t = 576)]
    pub height: usize,
    /// all-ordered or adjacent.
    #[arg(long, default_value = "all-ordered")]
    pub pairs: String,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnnealArgs {
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub imax: u32,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, default_value_t = 1.0)]
    pub wr: f64,
    #[arg(long, default_value_t = 3500.0)]
    pub wn: f64,
    #[arg(long, default_value_t = 10000.0)]
    pub ws: f64,
    #[arg(long, default_value_t = 30.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 35)]
    pub t: u8,
    /// Run k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub epsilon: f64,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write trace_<seed>.csv for every run.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    #[arg(long)]
    pub tree: PathBuf,
    pub images: Vec<PathBuf>,
    #[arg(long, default_value_t = 35)]
    pub t: u8,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lang {
    C,
    Rust,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// Tree file; the embedded FAST-9 tree when absent.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "c")]
    pub lang: Lang,
    #[arg(long, default_value = "is_corner")]
    pub name: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Error::Usage(e.to_string()))?;
    let jobs = pool.current_num_threads();
    pool.install(|| match cli.command {
        Command::Detect(a) => cmd_detect(a),
        Command::LearnTree(a) => cmd_learn_tree(a),
        Command::EvalRepeat(a) => cmd_eval_repeat(a),
        Command::Bench(a) => cmd_bench(a, jobs),
        Command::MakeDataset(a) => cmd_make_dataset(a),
        Command::Anneal(a) => cmd_anneal(a),
        Command::Distill(a) => cmd_distill(a),
        Command::Emit(a) => cmd_emit(a),
    })
}

fn value_name<V: ValueEnum>(v: V) -> String {
    v.to_possible_value().map_or(String::new(), |p| p.get_name().to_string())
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(p) => write_file(p, text),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::io(Path::new("<stdout>"), e)),
                _ => Ok(()),
            }
        }
    }
}

fn check_n(n: usize) -> Result<(), Error> {
    if !(1..=16).contains(&n) {
        return Err(Error::Usage(format!("--n must lie in 1..=16, got {n}")));
    }
    Ok(())
}

fn check_t(t: u8) -> Result<(), Error> {
    if t == 0 {
        return Err(Error::Usage("--t must be at least 1".into()));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<(), Error> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Usage(format!("--sigma must be positive, got {sigma}")));
    }
    Ok(())
}

fn load_tree_file(path: &Path) -> Result<TreeFile, Error> {
    parse_tree(&read_text(path)?).map_err(|e| Error::data(format!("{}: {e}", path.display())))
}

/// A 16-offset tree for `n`: the file when given, else the embedded tree.
fn ring_tree(path: Option<&Path>, n: usize) -> Result<TernaryTree, Error> {
    match path {
        Some(p) => {
            let f = load_tree_file(p)?;
            if f.offsets != OffsetSet::Ring {
                return Err(Error::data(format!("{}: expected a 16-offset tree", p.display())));
            }
            Ok(f.tree)
        }
        None if assets::has_embedded_tree(n) => Ok(assets::fast_tree(n).clone()),
        None => Err(Error::Usage(format!(
            "no embedded tree for n = {n}; pass --tree (see learn-tree)"
        ))),
    }
}

/// A 48-offset tree: FAST-ER trees run sixteen-fold, distilled trees run once.
enum Faster48 {
    Sixteen(FasterTree, FasterOffsets),
    Single(TernaryTree, FasterOffsets),
}

fn faster_tree(path: Option<&Path>, distilled: bool) -> Result<Faster48, Error> {
    let p = path.ok_or_else(|| Error::Usage("faster needs --tree with a 48-offset tree".into()))?;
    let f = load_tree_file(p)?;
    let OffsetSet::Faster(offsets) = f.offsets else {
        return Err(Error::data(format!("{}: expected a 48-offset tree", p.display())));
    };
    if distilled {
        return Ok(Faster48::Single(f.tree, offsets));
    }
    let tree = FasterTree::new(f.tree).map_err(|e| {
        Error::data(format!("{}: {e}; pass --distilled for a distilled tree", p.display()))
    })?;
    Ok(Faster48::Sixteen(tree, offsets))
}

fn faster_detector(f: Faster48, t: u8) -> Box<dyn Detector> {
    match f {
        Faster48::Sixteen(tree, offsets) => Box::new(FasterDetector { tree, offsets, t }),
        Faster48::Single(tree, offsets) => Box::new(TreeDetector {
            tree,
            offsets: offsets.as_slice().to_vec(),
            t,
        }),
    }
}

fn response(kind: Algo, sigma: f64, k: f64) -> ResponseDetector {
    ResponseDetector {
        kind: if kind == Algo::Harris {
            ResponseKind::Harris { k }
        } else {
            ResponseKind::ShiTomasi
        },
        sigma,
        margin: RING_MARGIN,
    }
}

fn cmd_detect(a: DetectArgs) -> Result<(), Error> {
    check_t(a.t)?;
    let mut prov = Provenance::new("detect")
        .with("image", a.image.display())
        .with("algo", value_name(a.algo))
        .with("t", a.t);
    let img = load_pgm(&a.image)?;
    let top = |kps: Vec<Keypoint>| match a.top {
        Some(n) => top_n_by_score(&kps, n),
        None => kps,
    };
    let text = match a.algo {
        Algo::FastRef | Algo::FastTree => {
            check_n(a.n)?;
            prov.push("n", a.n);
            let kps = if a.algo == Algo::FastRef {
                FastRef { n: a.n, t: a.t }.keypoints(&img)
            } else {
                let tree = ring_tree(a.tree.as_deref(), a.n)?;
                prov.push("tree", a.tree.as_ref().map_or("embedded".into(), |p| p.display().to_string()));
                TreeDetector {
                    tree,
                    offsets: cornerforge_core::ring_offsets().as_slice().to_vec(),
                    t: a.t,
                }
                .keypoints(&img)
            };
            prov.push("top", a.top.map_or("all".into(), |n| n.to_string()));
            format_keypoints(&prov, &top(kps))
        }
        Algo::Faster => {
            prov.push("tree", a.tree.as_ref().map_or(String::new(), |p| p.display().to_string()));
            prov.push("distilled", a.distilled);
            prov.push("top", a.top.map_or("all".into(), |n| n.to_string()));
            let kps = match faster_tree(a.tree.as_deref(), a.distilled)? {
                Faster48::Sixteen(tree, offsets) => {
                    detect_sixteenfold_scored(&Sixteenfold::new(&tree, &offsets, img.width()), &img, a.t)
                }
                Faster48::Single(tree, offsets) => TreeDetector {
                    tree,
                    offsets: offsets.as_slice().to_vec(),
                    t: a.t,
                }
                .keypoints(&img),
            };
            format_keypoints(&prov, &top(kps))
        }
        Algo::Harris | Algo::ShiTomasi => {
            check_sigma(a.sigma)?;
            prov.push("sigma", a.sigma);
            if a.algo == Algo::Harris {
                prov.push("k", a.k);
            }
            prov.push("top", a.top.map_or("all".into(), |n| n.to_string()));
            let kps = response(a.algo, a.sigma, a.k).keypoints(&img);
            let kps = match a.top {
                Some(n) => top_n_exact(&kps, n),
                None => kps,
            };
            format_keypoints(&prov, &kps)
        }
        Algo::Random => {
            let n = a.top.ok_or_else(|| Error::Usage("random needs --top".into()))?;
            prov.push("top", n);
            prov.push("seed", a.seed);
            let mut kps = detect_random(&img, n, a.seed, RING_MARGIN);
            kps.sort_by_key(|k| k.point());
            format_keypoints(&prov, &kps)
        }
    };
    emit(a.output.as_deref(), &text)
}

fn load_images(paths: &[PathBuf]) -> Result<Vec<GrayImage>, Error> {
    paths.iter().map(|p| load_pgm(p)).collect()
}

fn cmd_learn_tree(a: LearnTreeArgs) -> Result<(), Error> {
    check_n(a.n)?;
    check_t(a.t)?;
    if a.images.is_empty() && !a.exhaustive {
        return Err(Error::Usage("learn-tree needs at least one image or --exhaustive".into()));
    }
    if a.low_weight == 0 || a.image_weight == 0 {
        return Err(Error::Usage("--low-weight and --image-weight must be at least 1".into()));
    }
    let images = load_images(&a.images)?;
    let learn_err = |e: cornerforge_core::learn::LearnError| Error::data(e.to_string());
    let mut ts = if images.is_empty() {
        TrainingSet::default()
    } else {
        extract_training_data(&images, a.n, a.t).scale_weights(a.image_weight)
    };
    if a.exhaustive {
        ts = augment_exhaustive(&ts, a.n, a.low_weight).map_err(learn_err)?;
    }
    let tree = if a.shared_second {
        build_tree_shared(&ts).map_err(learn_err)?
    } else {
        build_tree_owned(ts).map_err(learn_err)?
    };
    let prov = Provenance::new("learn-tree")
        .with("images", a.images.len())
        .with("n", a.n)
        .with("t", a.t)
        .with("exhaustive", a.exhaustive)
        .with("low_weight", a.low_weight)
        .with("image_weight", a.image_weight)
        .with("shared_second", a.shared_second)
        .with("decisions", tree.decision_count());
    let text = write_tree_file(&prov, &TreeFile { offsets: OffsetSet::Ring, tree });
    emit(a.output.as_deref(), &text)
}

/// One parsed entry of a detector list such as `fast-tree:12`.
struct DetectorSpec {
    label: String,
    algo: Algo,
    n: usize,
}

fn parse_specs(list: &str) -> Result<Vec<DetectorSpec>, Error> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, n) = match item.split_once(':') {
            Some((name, n)) => (
                name,
                Some(n.parse::<usize>().map_err(|_| Error::Usage(format!("bad arc length in {item:?}")))?),
            ),
            None => (item, None),
        };
        let algo = Algo::from_str(name, true).map_err(|_| Error::Usage(format!("unknown detector {name:?}")))?;
        if n.is_some() && !matches!(algo, Algo::FastRef | Algo::FastTree) {
            return Err(Error::Usage(format!("{name} takes no arc length")));
        }
        let n = n.unwrap_or(9);
        check_n(n)?;
        out.push(DetectorSpec {
            label: item.replace(':', "-"),
            algo,
            n,
        });
    }
    if out.is_empty() {
        return Err(Error::Usage("no detectors given".into()));
    }
    Ok(out)
}

struct DetectorSettings<'a> {
    t: u8,
    tree: Option<&'a Path>,
    distilled: bool,
    sigma: f64,
    k: f64,
    seed: u64,
}

fn build_detector(spec: &DetectorSpec, s: &DetectorSettings) -> Result<Box<dyn Detector>, Error> {
    Ok(match spec.algo {
        Algo::FastRef => Box::new(FastRef { n: spec.n, t: s.t }),
        Algo::FastTree => Box::new(TreeDetector {
            tree: ring_tree(None, spec.n)?,
            offsets: cornerforge_core::ring_offsets().as_slice().to_vec(),
            t: s.t,
        }),
        Algo::Faster => faster_detector(faster_tree(s.tree, s.distilled)?, s.t),
        Algo::Harris | Algo::ShiTomasi => {
            check_sigma(s.sigma)?;
            Box::new(response(spec.algo, s.sigma, s.k))
        }
        Algo::Random => Box::new(RandomDetector {
            seed: s.seed,
            margin: RING_MARGIN,
        }),
    })
}

fn cmd_eval_repeat(a: EvalArgs) -> Result<(), Error> {
    check_t(a.t)?;
    if !(a.epsilon > 0.0 && a.epsilon.is_finite()) {
        return Err(Error::Usage("--epsilon must be positive".into()));
    }
    let specs = parse_specs(&a.algo)?;
    let counts = a.counts.clone().unwrap_or_else(default_counts);
    let settings = DetectorSettings {
        t: a.t,
        tree: a.tree.as_deref(),
        distilled: a.distilled,
        sigma: a.sigma,
        k: a.k,
        seed: a.seed,
    };
    let detectors: Vec<Box<dyn Detector>> = specs.iter().map(|s| build_detector(s, &settings)).collect::<Result<_, _>>()?;
    let bench = load_dataset(&a.dataset)?;
    let prov = Provenance::new("eval-repeat")
        .with("dataset", a.dataset.display())
        .with("algo", &a.algo)
        .with("epsilon", a.epsilon)
        .with("t", a.t)
        .with("sigma", a.sigma)
        .with("k", a.k)
        .with("seed", a.seed)
        .with("tree", a.tree.as_ref().map_or(String::new(), |p| p.display().to_string()))
        .with("distilled", a.distilled)
        .with("frames", bench.frames().len())
        .with("pairs", bench.pairs().len());
    let mut auc = format!("{}detector,A\n", prov.header());
    let mut series = Vec::new();
    for (spec, det) in specs.iter().zip(&detectors) {
        let samples = repeatability_samples(&bench, det.as_ref(), &counts, a.epsilon)
            .map_err(|e| Error::data(e.to_string()))?;
        let curve: Vec<(usize, f64)> = samples.iter().map(|(n, s)| (*n, s.ratio())).collect();
        let mut csv = prov.clone().with("detector", &spec.label).header();
        csv.push_str("count,repeatability\n");
        for (c, r) in &curve {
            csv.push_str(&format!("{c},{r}\n"));
        }
        write_file(&a.output.join(format!("curve_{}.csv", spec.label)), csv)?;
        match area_under_curve(&defined_curve(&samples)) {
            Ok(v) => auc.push_str(&format!("{},{v}\n", spec.label)),
            Err(_) => {
                eprintln!("note: counts do not span 0..={CURVE_MAX}; no area for {}", spec.label);
                auc.push_str(&format!("{},NA\n", spec.label));
            }
        }
        series.push((spec.label.clone(), curve));
    }
    write_file(&a.output.join("auc.csv"), auc)?;
    if a.plot {
        let x_max = counts.iter().copied().max().unwrap_or(CURVE_MAX).max(1);
        write_file(&a.output.join("plot.svg"), svg::curve_plot(&series, x_max))?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs, jobs: usize) -> Result<(), Error> {
    check_t(a.t)?;
    let specs = parse_specs(&a.algos)?;
    let settings = DetectorSettings {
        t: a.t,
        tree: a.tree.as_deref(),
        distilled: a.distilled,
        sigma: a.sigma,
        k: a.k,
        seed: 0,
    };
    let detectors: Vec<Box<dyn Detector>> = specs.iter().map(|s| build_detector(s, &settings)).collect::<Result<_, _>>()?;
    let images = load_images(&a.images)?;
    let prov = Provenance::new("bench")
        .with("images", images.len())
        .with("algos", &a.algos)
        .with("reps", a.reps)
        .with("warmup", a.warmup)
        .with("t", a.t)
        .with("tree", a.tree.as_ref().map_or(String::new(), |p| p.display().to_string()))
        .with("distilled", a.distilled)
        .with("sigma", a.sigma)
        .with("k", a.k)
        .with("jobs", jobs);
    let mut csv = format!("{}algo,mpix_per_s\n", prov.header());
    for (spec, det) in specs.iter().zip(&detectors) {
        if let Some(tp) = bench::measure(&images, a.reps, a.warmup, |img| det.rank(img, 0).len()) {
            csv.push_str(&format!("{},{:.3}\n", spec.label, tp.median));
        }
    }
    emit(a.output.as_deref(), &csv)
}

fn cmd_make_dataset(a: MakeDatasetArgs) -> Result<(), Error> {
    let policy: PairPolicy =
        parse_policy(&a.pairs).ok_or_else(|| Error::Usage(format!("unknown pair policy {:?}", a.pairs)))?;
    let base = match &a.base {
        Some(p) => load_pgm(p)?,
        None => {
            if a.width < 16 || a.height < 16 {
                return Err(Error::Usage("--width and --height must be at least 16".into()));
            }
            cornerforge_core::image::synthetic_scene(a.width, a.height, a.seed)
        }
    };
    let params = DatasetParams {
        frames: a.frames,
        warp: a.warp,
        noise: a.noise,
        seed: a.seed,
        policy,
    };
    let ds = make_dataset(&base, &params)?;
    let prov = Provenance::new("make-dataset")
        .with("base", a.base.as_ref().map_or("synthetic".into(), |p| p.display().to_string()))
        .with("frames", a.frames)
        .with("warp", a.warp)
        .with("noise", a.noise)
        .with("seed", a.seed)
        .with("width", base.width())
        .with("height", base.height())
        .with("pairs", policy_name(policy));
    write_dataset(&a.output, &ds, &prov)
}

fn cmd_anneal(a: AnnealArgs) -> Result<(), Error> {
    let params = AnnealParams {
        weights: CostWeights {
            w_r: a.wr,
            w_n: a.wn,
            w_s: a.ws,
        },
        alpha: a.alpha,
        beta: a.beta,
        t: a.t,
        i_max: a.imax,
        epsilon: a.epsilon,
    };
    params.validate().map_err(|e| Error::Usage(e.to_string()))?;
    if a.runs == 0 {
        return Err(Error::Usage("--runs must be at least 1".into()));
    }
    let bench = load_dataset(&a.dataset)?;
    let offsets = FasterOffsets::default();
    let seeds: Vec<u64> = (0..a.runs as u64).map(|k| a.seed.wrapping_add(k)).collect();
    let result = multi_run(&bench, &offsets, &params, &seeds).map_err(|e| Error::data(e.to_string()))?;
    let prov = Provenance::new("anneal")
        .with("dataset", a.dataset.display())
        .with("imax", a.imax)
        .with("runs", a.runs)
        .with("wr", a.wr)
        .with("wn", a.wn)
        .with("ws", a.ws)
        .with("alpha", a.alpha)
        .with("beta", a.beta)
        .with("t", a.t)
        .with("seed", a.seed)
        .with("epsilon", a.epsilon);
    if let Some(dir) = &a.trace_dir {
        for run in &result.runs {
            let mut csv = prov.clone().with("run_seed", run.seed).header();
            csv.push_str("iteration,cost,best_cost,temperature\n");
            for r in &run.trace {
                csv.push_str(&format!("{},{},{},{}\n", r.iteration, r.cost, r.best_cost, r.temperature));
            }
            write_file(&dir.join(format!("trace_{}.csv", run.seed)), csv)?;
        }
    }
    let best = result.best_run();
    let prov = prov
        .with("best_seed", best.seed)
        .with("best_cost", best.best_cost)
        .with("initial_cost", best.initial_cost);
    let file = TreeFile {
        offsets: OffsetSet::Faster(offsets),
        tree: best.best.tree().clone(),
    };
    write_file(&a.output, write_tree_file(&prov, &file))
}

fn cmd_distill(a: DistillArgs) -> Result<(), Error> {
    check_t(a.t)?;
    if a.images.is_empty() {
        return Err(Error::Usage("distill needs at least one image".into()));
    }
    let Faster48::Sixteen(tree, offsets) = faster_tree(Some(&a.tree), false)? else {
        unreachable!("sixteen-fold unless distilled")
    };
    let images = load_images(&a.images)?;
    let single = distill(&tree, &offsets, &images, a.t).map_err(|e| Error::data(e.to_string()))?;
    let prov = Provenance::new("distill")
        .with("tree", a.tree.display())
        .with("images", images.len())
        .with("t", a.t)
        .with("decisions", single.decision_count());
    let text = write_tree_file(&prov, &TreeFile { offsets: OffsetSet::Faster(offsets), tree: single });
    emit(a.output.as_deref(), &text)
}

fn cmd_emit(a: EmitArgs) -> Result<(), Error> {
    let file = match &a.tree {
        Some(p) => load_tree_file(p)?,
        None => TreeFile {
            offsets: OffsetSet::Ring,
            tree: assets::fast_tree(9).clone(),
        },
    };
    let valid = !a.name.is_empty()
        && a.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !a.name.starts_with(|c: char| c.is_ascii_digit());
    if !valid {
        return Err(Error::Usage(format!("{:?} is not a valid identifier", a.name)));
    }
    let target = match a.lang {
        Lang::C => EmitTarget::C,
        Lang::Rust => EmitTarget::Rust,
    };
    let src = emit_source(&file.tree, &file.offsets.offsets(), target, &a.name);
    let prov = Provenance::new("emit")
        .with("tree", a.tree.as_ref().map_or("embedded-fast9".into(), |p| p.display().to_string()))
        .with("lang", value_name(a.lang))
        .with("name", &a.name)
        .header();
    let header: String = prov.lines().map(|l| format!("//{}\n", &l[1..])).collect();
    emit(a.output.as_deref(), &(header + &src))
}
