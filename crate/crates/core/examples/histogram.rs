//! Fiber-component histogram of one frame: per-bin component counts,
//! measures, and singular flags, written as CSV to stdout.
//!
//! `cargo run --release --example histogram [site] [slab_width]`

use fibertrack::datagen::{gen_translated_paraboloid, SyntheticSpec};
use fibertrack::mesh::TetMesh;
use fibertrack::pipeline::analyze_frame;
use fibertrack::quantize::build_quantization;
use fibertrack::report::histogram_csv;
use fibertrack::Binning;

fn main() -> fibertrack::Result<()> {
    let mut args = std::env::args().skip(1);
    let site: usize = args.next().map_or(10, |s| s.parse().expect("site index"));
    let width: f64 = args.next().map_or(1.0, |s| s.parse().expect("slab width"));

    let series = gen_translated_paraboloid(&SyntheticSpec::translated_paraboloid())?;
    let quant = build_quantization(&series, &Binning::SlabWidths(vec![width, width]))?;
    let frame = &series.frames()[site];
    let mesh = TetMesh::new(frame.grid());
    let analysis = analyze_frame(frame, &quant, &mesh, 1e-6, Default::default())?;
    let hist = &analysis.histogram;

    eprintln!(
        "site {site}: {} occupied bins of {}, {} components, measure {:.6} (domain {:.6})",
        hist.occupied_flat().len(),
        quant.total_bins(),
        hist.total_count(),
        hist.total_measure(),
        frame.grid().volume()
    );
    print!("{}", histogram_csv(hist));
    Ok(())
}
