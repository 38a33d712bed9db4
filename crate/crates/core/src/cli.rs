//! Command-line front end. Parse failures exit with status 2 (clap's
//! default); pipeline failures are returned as [`Error`] for the binary to
//! report with status 1.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datagen::{generate, SyntheticKind, SyntheticSpec};
use crate::distribution::PmfMode;
use crate::error::{io_err, Error, Result};
use crate::io::{load_series, parse_frame_ref, save_series};
use crate::jacobi::DEFAULT_TAU;
use crate::mesh::TetMesh;
use crate::metrics::DistanceConfig;
use crate::model::FrameSeries;
use crate::pipeline::{analyze_frame, compute_distance_series, Metric, PipelineConfig};
use crate::quantize::{build_quantization, Binning};
use crate::report::{distances_csv, histogram_csv, jacobi_csv, write_text};
use crate::svg::emit_svg_plot;

/// Bins per field when neither slab widths nor bin counts are given.
pub const DEFAULT_BIN_COUNT: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "fibertrack", version, about = "Fiber-component histograms and event detection for multifield series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic series in the MFG format.
    Gen(GenArgs),
    /// Per-bin component counts and measures of one frame.
    Histogram(HistogramArgs),
    /// Singular mesh elements and singular bins of one frame.
    Jacobi(JacobiArgs),
    /// Distances between consecutive frames of a series.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    TranslatedParaboloid,
    SeparatingBlobs,
}

/// Exactly `N` comma-separated values.
fn parse_fixed<T, const N: usize>(s: &str) -> std::result::Result<[T; N], String>
where
    T: std::str::FromStr + Copy + Default,
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated values, got {}", parts.len()));
    }
    let mut out = [T::default(); N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Grid vertices per axis (default 20,20,20 for the paraboloid, 16,16,16 for blobs).
    #[arg(long, value_parser = parse_fixed::<usize, 3>)]
    pub dims: Option<[usize; 3]>,
    /// Paraboloid translation per site.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 21)]
    pub n_sites: usize,
    /// Blob Gaussian width.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Blob centers at the first site: x1,y1,z1,x2,y2,z2.
    #[arg(long, value_parser = parse_fixed::<f64, 6>, allow_hyphen_values = true)]
    pub centers_start: Option<[f64; 6]>,
    /// Blob centers at the last site: x1,y1,z1,x2,y2,z2.
    #[arg(long, value_parser = parse_fixed::<f64, 6>, allow_hyphen_values = true)]
    pub centers_end: Option<[f64; 6]>,
    /// Blob domain bounds lo,hi on every axis.
    #[arg(long, value_parser = parse_fixed::<f64, 2>, allow_hyphen_values = true)]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Args)]
pub struct BinningArgs {
    /// Uniform slab width per field.
    #[arg(long, value_delimiter = ',', conflicts_with = "bin_counts")]
    pub slab_widths: Option<Vec<f64>>,
    /// Number of bins per field.
    #[arg(long, value_delimiter = ',')]
    pub bin_counts: Option<Vec<usize>>,
    /// Field subset, in order (default: all manifest fields).
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<String>>,
}

impl BinningArgs {
    fn binning(&self, arity: usize) -> Binning {
        match (&self.slab_widths, &self.bin_counts) {
            (Some(w), _) => Binning::SlabWidths(w.clone()),
            (None, Some(c)) => Binning::BinCounts(c.clone()),
            (None, None) => Binning::BinCounts(vec![DEFAULT_BIN_COUNT; arity]),
        }
    }

    fn select(&self, series: FrameSeries) -> Result<FrameSeries> {
        match &self.fields {
            Some(f) => series.select_fields(f),
            None => Ok(series),
        }
    }
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    /// Frame reference `<manifest>#<site>`.
    #[arg(long)]
    pub frame: String,
    #[command(flatten)]
    pub binning: BinningArgs,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct JacobiArgs {
    /// Frame reference `<manifest>#<site>`.
    #[arg(long)]
    pub frame: String,
    #[command(flatten)]
    pub binning: BinningArgs,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_order(s: &str) -> std::result::Result<f64, String> {
    let v = match s {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("order must be ≥ 1 or inf, got {s}"))
    }
}

/// Parsed `--metrics` value.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricList(pub Vec<Metric>);

fn parse_metrics(s: &str) -> std::result::Result<MetricList, String> {
    Metric::parse_list(s).map(MetricList).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<PmfMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Series manifest.
    #[arg(long)]
    pub series: PathBuf,
    #[command(flatten)]
    pub binning: BinningArgs,
    /// Order of the pointwise distance used by dqS (`inf` allowed).
    #[arg(long, default_value = "1", value_parser = parse_order)]
    pub q: f64,
    /// Weight of singular bins in dqS.
    #[arg(long, default_value_t = 13.0)]
    pub omega: f64,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// KL smoothing constant.
    #[arg(long = "kl-eps", default_value_t = 1e-9)]
    pub kl_eps: f64,
    /// Bandwidth of the Gaussian quadratic-form similarity.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_a: f64,
    /// Order of the reported Minkowski distance.
    #[arg(long, default_value = "3", value_parser = parse_order)]
    pub minkowski_r: f64,
    /// `all` or a comma list such as `d1,dqS,rms`.
    #[arg(long, default_value = "all", value_parser = parse_metrics)]
    pub metrics: MetricList,
    /// Histogram normalization: `count` or `measure`.
    #[arg(long, default_value = "count", value_parser = parse_mode)]
    pub mode: PmfMode,
    #[arg(long)]
    pub out: PathBuf,
    /// Optional line chart of the enabled metrics.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Histogram(a) => run_histogram(a),
        Command::Jacobi(a) => run_jacobi(a),
        Command::Compare(a) => run_compare(a),
    }
}

fn pair(v: &[f64], i: usize) -> [f64; 3] {
    [v[3 * i], v[3 * i + 1], v[3 * i + 2]]
}

fn gen_spec(a: &GenArgs) -> SyntheticSpec {
    let mut spec = match a.kind {
        GenKind::TranslatedParaboloid => SyntheticSpec::translated_paraboloid(),
        GenKind::SeparatingBlobs => SyntheticSpec::separating_blobs(),
    };
    if let Some(d) = a.dims {
        spec.dims = d;
    }
    spec.step = a.step;
    spec.n_sites = a.n_sites;
    if let SyntheticKind::SeparatingBlobs(b) = &mut spec.kind {
        if let Some(s) = a.sigma {
            b.sigma = s;
        }
        if let Some(c) = &a.centers_start {
            b.centers_start = [pair(c, 0), pair(c, 1)];
        }
        if let Some(c) = &a.centers_end {
            b.centers_end = [pair(c, 0), pair(c, 1)];
        }
        if let Some(d) = &a.domain {
            b.domain = (d[0], d[1]);
        }
    }
    spec
}

fn run_gen(a: GenArgs) -> Result<()> {
    let spec = gen_spec(&a);
    let generated = generate(&spec)?;
    let manifest = save_series(&generated.series, &a.out)?;
    let meta = serde_json::json!({
        "kind": match a.kind {
            GenKind::TranslatedParaboloid => "translated-paraboloid",
            GenKind::SeparatingBlobs => "separating-blobs",
        },
        "dims": spec.dims,
        "n_sites": spec.n_sites,
        "split_site": generated.split_site,
    });
    let meta_path = a.out.join("metadata.json");
    let text = serde_json::to_string_pretty(&meta).expect("json value serializes");
    std::fs::write(&meta_path, text + "\n").map_err(io_err(&meta_path))?;
    log::info!("wrote {}", manifest.display());
    if let Some(k) = generated.split_site {
        println!("split_site {k}");
    }
    Ok(())
}

/// Series-wide quantization plus the requested frame.
fn frame_and_quant(
    frame_ref: &str,
    b: &BinningArgs,
) -> Result<(crate::model::MultifieldFrame, crate::quantize::RangeQuantization)> {
    let (manifest, site) = parse_frame_ref(frame_ref)?;
    let series = b.select(load_series(&manifest)?)?;
    let quant = build_quantization(&series, &b.binning(series.arity()))?;
    let frame = series
        .frames()
        .iter()
        .find(|f| f.time_index() == site)
        .cloned()
        .ok_or_else(|| Error::InvalidFrame(format!("site {site} not in {}", manifest.display())))?;
    Ok((frame, quant))
}

fn run_histogram(a: HistogramArgs) -> Result<()> {
    let (frame, quant) = frame_and_quant(&a.frame, &a.binning)?;
    let mesh = TetMesh::new(frame.grid());
    let hist = analyze_frame(&frame, &quant, &mesh, a.tau, PmfMode::Count)?.histogram;
    write_text(&a.out, &histogram_csv(&hist))
}

fn run_jacobi(a: JacobiArgs) -> Result<()> {
    let (frame, quant) = frame_and_quant(&a.frame, &a.binning)?;
    let mesh = TetMesh::new(frame.grid());
    let jset = crate::jacobi::mark_singular_elements_on(&frame, &mesh, a.tau)?;
    let bins = crate::jacobi::project_singular_bins_on(&jset, &frame, &mesh, &quant)?;
    write_text(&a.out, &jacobi_csv(&jset, &bins, &quant))
}

fn run_compare(a: CompareArgs) -> Result<()> {
    let series = a.binning.select(load_series(&a.series)?)?;
    let config = PipelineConfig {
        binning: a.binning.binning(series.arity()),
        distance: DistanceConfig {
            q: a.q,
            omega: a.omega,
            kl_epsilon: a.kl_eps,
            sigma_a: a.sigma_a,
            minkowski_r: a.minkowski_r,
        },
        tau: a.tau,
        mode: a.mode,
        metrics: a.metrics.0.clone(),
    };
    let d = compute_distance_series(&series, &config)?;
    write_text(&a.out, &distances_csv(&d))?;
    if let Some(svg) = &a.svg {
        emit_svg_plot(&d, &d.metrics, svg)?;
    }
    Ok(())
}
