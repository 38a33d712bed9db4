//! Scission analog: two Gaussian blobs drift apart. Compares the bivariate
//! run `(blobs, z)` with the height-only run and the generator's split site.
//!
//! `cargo run --release --example separating_blobs [width_blob width_z]`

use fibertrack::datagen::{gen_separating_blobs, SyntheticSpec};
use fibertrack::{compute_distance_series, Binning, Metric, PipelineConfig};

fn main() -> fibertrack::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("slab width")).collect();
    let (wb, wz) = match args.as_slice() {
        [b, z] => (*b, *z),
        _ => (0.5, 1.5),
    };
    let generated = gen_separating_blobs(&SyntheticSpec::separating_blobs())?;
    let split = generated.split_site.expect("default blobs split");
    println!("ground-truth split site: {split}");

    let both = PipelineConfig::new(Binning::SlabWidths(vec![wb, wz]));
    let d2 = compute_distance_series(&generated.series, &both)?;
    let height = generated.series.select_fields(&["z"])?;
    let d1 = compute_distance_series(&height, &PipelineConfig::new(Binning::SlabWidths(vec![wz])))?;

    println!("pair   dqS(r=2)      d1(r=2)      dqS(r=1)");
    let (a, b, c) = (
        d2.values(Metric::DqS).unwrap(),
        d2.values(Metric::D1).unwrap(),
        d1.values(Metric::DqS).unwrap(),
    );
    for p in 0..d2.len() {
        println!("{:>2}-{:<3} {:>12.5e} {:>12.5e} {:>12.5e}", p, p + 1, a[p], b[p], c[p]);
    }
    println!(
        "argmax dqS: r=2 pair {}, r=1 pair {}",
        d2.argmax(Metric::DqS).unwrap(),
        d1.argmax(Metric::DqS).unwrap()
    );
    Ok(())
}
