//! `bless` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::benchmark::{build_report, load_manifest, run_benchmark, Database, DatasetManifest};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::estimators::{visualize_map, Assessor, Estimator, ImageFeatures, QualityResult};
use crate::features::FeatureKind;
use crate::image::{
    apply_gamma, load_image, to_opponent, write_map, ColorSpace, MapScaling, PlanarImage,
};
use crate::multiscale::{
    default_depth, default_scales, grouplet_forward, wavelet_forward, Orientation,
};
use crate::plane::Plane;

#[derive(Debug, Parser)]
#[command(
    name = "bless",
    version,
    about = "Full-reference image quality with spatiochromatic grouping maps"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Score at full resolution instead of the reference-code decimation.
    #[arg(long, global = true)]
    pub no_downsample: bool,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Write feature, weight and display maps for every estimator.
    #[arg(long, global = true, value_name = "DIR")]
    pub emit_maps: Option<PathBuf>,

    /// Turn unreadable manifest rows into warnings.
    #[arg(long, global = true)]
    pub skip_missing: bool,

    /// Write the reference image's grouping map as 16-bit PGM.
    #[arg(long, global = true, value_name = "PATH")]
    pub dump_tau: Option<PathBuf>,

    /// Write a feature map (gm, pc, sr, tau, i, q) of the reference image.
    #[arg(long, global = true, num_args = 2, value_names = ["KIND", "PATH"])]
    pub dump_feature: Option<Vec<String>>,

    /// Write one decomposition plane of the reference image. SPEC is
    /// CHANNEL:SCALE:ORIENTATION[:LEVEL], e.g. `3:2:h` for the intensity
    /// wavelet plane or `1:1:d:2` for its second grouplet detail.
    #[arg(long, global = true, num_args = 2, value_names = ["SPEC", "PATH"])]
    pub dump_plane: Option<Vec<String>>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a distorted image against its reference.
    Score {
        reference: PathBuf,
        distorted: PathBuf,
        /// Estimators to run (repeatable); default: the six standard ones.
        #[arg(short, long = "estimator", value_name = "NAME")]
        estimators: Vec<String>,
    },
    /// Write feature maps of an image, and quality maps when a distorted
    /// image is given.
    Maps {
        image: PathBuf,
        distorted: Option<PathBuf>,
        /// Output directory (defaults to --emit-maps, then `.`).
        #[arg(short, long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(short, long = "estimator", value_name = "NAME")]
        estimators: Vec<String>,
    },
    /// Correlate estimator scores with opinion scores.
    Bench {
        /// Manifests as `[DATABASE=]PATH`; DATABASE is LIVE, MULTI, TID13 or
        /// CUSTOM (the default).
        #[arg(required = true, value_name = "MANIFEST")]
        manifests: Vec<String>,
        /// Estimator pairs to compare as `BASELINE:ASSISTED` (repeatable);
        /// default: the three standard pairs.
        #[arg(short, long = "pair", value_name = "PAIR")]
        pairs: Vec<String>,
        /// Report prefix; writes PREFIX.json, PREFIX.csv and PREFIX.scores.csv.
        #[arg(short, long, value_name = "PREFIX", default_value = "bless_report")]
        out: PathBuf,
    },
    /// Check a manifest against the category counts of the full database.
    VerifyManifest {
        #[arg(value_name = "MANIFEST")]
        manifests: Vec<String>,
    },
}

fn parse_estimators(names: &[String]) -> Result<Vec<Estimator>> {
    if names.is_empty() {
        return Ok(Estimator::STANDARD.to_vec());
    }
    let mut out = Vec::new();
    for n in names {
        for part in n.split(',').filter(|s| !s.is_empty()) {
            let e: Estimator = part.parse()?;
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

fn parse_manifest_arg(arg: &str) -> Result<(Database, PathBuf)> {
    match arg.split_once('=') {
        Some((db, path)) if db.parse::<Database>().is_ok() => {
            Ok((db.parse()?, PathBuf::from(path)))
        }
        _ => Ok((Database::Custom, PathBuf::from(arg))),
    }
}

fn parse_pairs(pairs: &[String]) -> Result<Vec<(Estimator, Estimator)>> {
    if pairs.is_empty() {
        return Ok(Estimator::STANDARD
            .iter()
            .filter_map(|&e| Some((e, e.assisted()?)))
            .collect());
    }
    pairs
        .iter()
        .map(|p| {
            let (b, a) = p.split_once(':').ok_or_else(|| {
                Error::InvalidParameter(format!("pair `{p}` is not BASELINE:ASSISTED"))
            })?;
            Ok((b.parse()?, a.parse()?))
        })
        .collect()
}

fn load_config(global: &GlobalArgs) -> Result<Config> {
    let mut cfg = match &global.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if global.no_downsample {
        cfg.downsample = false;
    }
    Ok(cfg)
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn emit(path: &Path, plane: &Plane, scaling: MapScaling) -> Result<()> {
    create_parent(path)?;
    write_map(path, plane, scaling)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn emit_quality_maps(dir: &Path, results: &[QualityResult]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for r in results {
        let name = r.estimator.name();
        emit(
            &dir.join(format!("{name}_F.pgm")),
            &r.feature_map,
            MapScaling::Unit,
        )?;
        emit(
            &dir.join(format!("{name}_W.pgm")),
            &r.weight_map,
            MapScaling::Max,
        )?;
        match visualize_map(&r.feature_map) {
            Ok(v) => emit(
                &dir.join(format!("{name}_display.png")),
                &v,
                MapScaling::Unit,
            )?,
            Err(e) => log::warn!("{name}: no display map ({e})"),
        }
    }
    Ok(())
}

fn feature_plane(features: &ImageFeatures, kind: FeatureKind) -> Option<Plane> {
    match kind {
        FeatureKind::Gm => features
            .gm_fsim
            .as_ref()
            .or(features.gm_srsim.as_ref())
            .map(|f| f.grid().clone()),
        FeatureKind::Pc => features.pc.as_ref().map(|f| f.grid().clone()),
        FeatureKind::Sr => features.sr.as_ref().map(|f| f.grid().clone()),
        FeatureKind::Tau => features.tau.as_ref().map(|t| t.tau().clone()),
        FeatureKind::IChroma => features.i_chroma.clone(),
        FeatureKind::QChroma => features.q_chroma.clone(),
    }
}

fn feature_scaling(kind: FeatureKind) -> MapScaling {
    match kind {
        FeatureKind::Pc | FeatureKind::Sr => MapScaling::Unit,
        FeatureKind::Gm | FeatureKind::Tau => MapScaling::Max,
        FeatureKind::IChroma | FeatureKind::QChroma => MapScaling::MinMax,
    }
}

/// Decomposition plane selected by `CHANNEL:SCALE:ORIENTATION[:LEVEL]`.
fn decomposition_plane(img: &PlanarImage, spec: &str, cfg: &Config) -> Result<Plane> {
    let bad = || Error::InvalidParameter(format!("plane spec `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let channel: usize = parts[0].parse().map_err(|_| bad())?;
    let scale: usize = parts[1].parse().map_err(|_| bad())?;
    let orientation = Orientation::parse(parts[2]).ok_or_else(bad)?;
    if !(1..=3).contains(&channel) {
        return Err(bad());
    }
    let linear = match img.space() {
        ColorSpace::RgbSrgb => apply_gamma(img, cfg.tau.gamma)?,
        _ => img.clone(),
    };
    let opponent = to_opponent(&linear)?;
    let (w, h) = opponent.dims();
    let scales = cfg.tau.scales.unwrap_or_else(|| default_scales(w, h));
    if scale == 0 || scale > scales {
        return Err(bad());
    }
    let pyr = wavelet_forward(opponent.plane(channel - 1), scales)?;
    let detail = pyr.detail(scale, orientation);
    match parts.get(3) {
        None => Ok(detail.clone()),
        Some(level) => {
            let level: usize = level.parse().map_err(|_| bad())?;
            let depth = cfg.tau.grouplet_depth.unwrap_or_else(|| default_depth(w));
            if level == 0 || level > depth {
                return Err(bad());
            }
            Ok(grouplet_forward(detail, depth)?.level(level).detail.clone())
        }
    }
}

fn debug_dumps(global: &GlobalArgs, assessor: &Assessor, reference: &PlanarImage) -> Result<()> {
    let mut kinds = Vec::new();
    if global.dump_tau.is_some() {
        kinds.push(FeatureKind::Tau);
    }
    let feature = match &global.dump_feature {
        Some(v) => {
            let kind = FeatureKind::parse(&v[0])
                .ok_or_else(|| Error::InvalidParameter(format!("unknown feature `{}`", v[0])))?;
            kinds.push(kind);
            Some((kind, PathBuf::from(&v[1])))
        }
        None => None,
    };
    if !kinds.is_empty() {
        let pre = assessor.preprocess(reference)?;
        let estimators: Vec<Estimator> = kinds
            .iter()
            .map(|k| match k {
                FeatureKind::Tau => Estimator::Bless,
                FeatureKind::Sr => Estimator::Srsim,
                FeatureKind::IChroma | FeatureKind::QChroma => Estimator::Fsimc,
                _ => Estimator::Fsim,
            })
            .collect();
        let features = assessor.features(&pre, &estimators)?;
        if let Some(path) = &global.dump_tau {
            let tau = feature_plane(&features, FeatureKind::Tau).expect("tau requested");
            emit(path, &tau, MapScaling::Max)?;
        }
        if let Some((kind, path)) = feature {
            let plane = feature_plane(&features, kind).expect("feature requested");
            emit(&path, &plane, feature_scaling(kind))?;
        }
    }
    if let Some(v) = &global.dump_plane {
        let plane = decomposition_plane(reference, &v[0], assessor.config())?;
        emit(Path::new(&v[1]), &plane, MapScaling::MinMax)?;
    }
    Ok(())
}

fn cmd_score(
    global: &GlobalArgs,
    assessor: &Assessor,
    reference: &Path,
    distorted: &Path,
    names: &[String],
    out: &mut dyn Write,
) -> Result<()> {
    let estimators = parse_estimators(names)?;
    let (r, d) = (load_image(reference)?, load_image(distorted)?);
    let results = assessor.assess(&r, &d, &estimators)?;
    for res in &results {
        writeln!(out, "{}\t{:.6}", res.estimator, res.score)?;
    }
    if let Some(dir) = &global.emit_maps {
        emit_quality_maps(dir, &results)?;
    }
    debug_dumps(global, assessor, &r)
}

fn cmd_maps(
    global: &GlobalArgs,
    assessor: &Assessor,
    image: &Path,
    distorted: Option<&Path>,
    out_dir: Option<&Path>,
    names: &[String],
    out: &mut dyn Write,
) -> Result<()> {
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| global.emit_maps.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let img = load_image(image)?;
    let pre = assessor.preprocess(&img)?;
    let features = assessor.features(&pre, &Estimator::ALL)?;
    for kind in [
        FeatureKind::Gm,
        FeatureKind::Pc,
        FeatureKind::Sr,
        FeatureKind::Tau,
        FeatureKind::IChroma,
        FeatureKind::QChroma,
    ] {
        if let Some(p) = feature_plane(&features, kind) {
            let path = dir.join(format!("{}.pgm", kind.name()));
            emit(&path, &p, feature_scaling(kind))?;
            writeln!(out, "{}", path.display())?;
        }
    }
    if let Some(d) = distorted {
        let estimators = parse_estimators(names)?;
        let results = assessor.assess(&img, &load_image(d)?, &estimators)?;
        emit_quality_maps(&dir, &results)?;
        for res in &results {
            writeln!(out, "{}\t{:.6}", res.estimator, res.score)?;
        }
    }
    debug_dumps(global, assessor, &img)
}

fn load_manifests(args: &[String]) -> Result<Vec<DatasetManifest>> {
    args.iter()
        .map(|a| {
            let (db, path) = parse_manifest_arg(a)?;
            load_manifest(&path, db)
        })
        .collect()
}

fn cmd_bench(
    global: &GlobalArgs,
    assessor: &Assessor,
    manifests: &[String],
    pairs: &[String],
    prefix: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let pairs = parse_pairs(pairs)?;
    let manifests = load_manifests(manifests)?;
    let mut estimators: Vec<Estimator> = pairs.iter().flat_map(|&(b, a)| [b, a]).collect();
    estimators.sort();
    estimators.dedup();

    let run = run_benchmark(&manifests, assessor, &estimators, global.skip_missing)?;
    for f in &run.skipped {
        log::warn!(
            "skipped {} line {} ({}): {}",
            f.database,
            f.line,
            f.path.display(),
            f.error
        );
    }
    let report = build_report(&run.records, &pairs, assessor.config().significance_z)?;

    let with_ext = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    create_parent(&with_ext(".json"))?;
    std::fs::write(with_ext(".json"), report.to_json()? + "\n")?;
    report.write_csv(std::fs::File::create(with_ext(".csv"))?)?;

    let mut scores = csv::Writer::from_path(with_ext(".scores.csv"))
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    let mut header = vec![
        "pair_id".to_string(),
        "database".into(),
        "categories".into(),
        "mos".into(),
    ];
    header.extend(estimators.iter().map(|e| e.to_string()));
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    scores.write_record(&header).map_err(csv_err)?;
    for r in &run.records {
        let mut row = vec![
            r.pair_id.clone(),
            r.database.to_string(),
            r.categories
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join("+"),
            r.mos.to_string(),
        ];
        row.extend(estimators.iter().map(|e| r.scores[e].to_string()));
        scores.write_record(&row).map_err(csv_err)?;
    }
    scores.flush()?;

    write!(out, "{}", report.summary_table())?;
    writeln!(
        out,
        "records: {}, skipped: {}",
        run.records.len(),
        run.skipped.len()
    )?;
    Ok(())
}

fn cmd_verify(manifests: &[String], out: &mut dyn Write) -> Result<bool> {
    let mut all_ok = true;
    for m in load_manifests(manifests)? {
        match m.verify() {
            None => {
                writeln!(
                    out,
                    "{}: {} rows, no reference counts",
                    m.database,
                    m.rows.len()
                )?;
                for (c, n) in m.category_counts() {
                    writeln!(out, "  {c:<14} {n}")?;
                }
            }
            Some(check) => {
                let ok = check.ok();
                all_ok &= ok;
                writeln!(
                    out,
                    "{}: {} ({} of {} images)",
                    m.database,
                    if ok { "ok" } else { "MISMATCH" },
                    check.actual_total,
                    check.expected_total
                )?;
                for (c, want, got) in &check.categories {
                    if *want > 0 || *got > 0 {
                        let mark = if want == got { "" } else { "  <-" };
                        writeln!(out, "  {:<14} {got:>5} / {want:<5}{mark}", c.name())?;
                    }
                }
            }
        }
    }
    Ok(all_ok)
}

fn init_logging(global: &GlobalArgs) {
    let level = if global.quiet {
        log::LevelFilter::Error
    } else {
        match global.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_target(false)
        .try_init();
}

/// Run a parsed command line, writing results to `out`. Returns the exit
/// status: 0 on success, 1 when `verify-manifest` finds a mismatch.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    init_logging(&cli.global);
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be positive".into()));
        }
        // Fails only if a pool already exists (repeated in-process calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let g = &cli.global;
    match &cli.command {
        Command::VerifyManifest { manifests } => {
            return Ok(if cmd_verify(manifests, out)? { 0 } else { 1 });
        }
        Command::Score {
            reference,
            distorted,
            estimators,
        } => {
            let assessor = Assessor::new(load_config(g)?)?;
            cmd_score(g, &assessor, reference, distorted, estimators, out)?;
        }
        Command::Maps {
            image,
            distorted,
            out: dir,
            estimators,
        } => {
            let assessor = Assessor::new(load_config(g)?)?;
            cmd_maps(
                g,
                &assessor,
                image,
                distorted.as_deref(),
                dir.as_deref(),
                estimators,
                out,
            )?;
        }
        Command::Bench {
            manifests,
            pairs,
            out: prefix,
        } => {
            let assessor = Assessor::new(load_config(g)?)?;
            cmd_bench(g, &assessor, manifests, pairs, prefix, out)?;
        }
    }
    Ok(0)
}

/// Entry point used by the binary: parses `std::env::args`, prints errors
/// to stderr and maps them to exit status 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            2
        }
    }
}
