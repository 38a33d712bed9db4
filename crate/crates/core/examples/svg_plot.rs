//! Renders the paraboloid distance curves to `plot.svg` (or the path given).
//!
//! `cargo run --release --example svg_plot [out.svg]`

use std::path::PathBuf;

use fibertrack::datagen::{gen_translated_paraboloid, SyntheticSpec};
use fibertrack::svg::emit_svg_plot;
use fibertrack::{compute_distance_series, Binning, Metric, PipelineConfig};

fn main() -> fibertrack::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("plot.svg"), PathBuf::from);
    let series = gen_translated_paraboloid(&SyntheticSpec::translated_paraboloid())?;
    let mut config = PipelineConfig::new(Binning::SlabWidths(vec![0.5, 0.5]));
    config.metrics = vec![Metric::D1, Metric::DqS, Metric::Kl, Metric::Rms];
    let d = compute_distance_series(&series, &config)?;
    emit_svg_plot(&d, &config.metrics, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
