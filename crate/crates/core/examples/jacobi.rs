//! Singular mesh elements of bivariate fields.
//!
//! For `(z, x² + y² − z)` the gradients are parallel only on the z-axis, so
//! interior singular tets appear where a frame's tet columns straddle it.
//! For `(z, 2z + 1)` every tet is singular.
//!
//! `cargo run --release --example jacobi`

use fibertrack::datagen::{gen_translated_paraboloid, SyntheticSpec};
use fibertrack::jacobi::{mark_singular_elements_on, project_singular_bins_on, DEFAULT_TAU};
use fibertrack::mesh::TetMesh;
use fibertrack::quantize::build_quantization;
use fibertrack::{Binning, MultifieldFrame, ScalarField};

fn main() -> fibertrack::Result<()> {
    let series = gen_translated_paraboloid(&SyntheticSpec::translated_paraboloid())?;
    let quant = build_quantization(&series, &Binning::SlabWidths(vec![0.5, 0.5]))?;
    let mesh = TetMesh::new(series.frames()[0].grid());
    println!(
        "{} tets, {} boundary triangles",
        mesh.tet_count(),
        mesh.boundary_triangles().len()
    );
    println!("site  tets  triangles  singular_bins");
    for (t, frame) in series.frames().iter().enumerate() {
        let j = mark_singular_elements_on(frame, &mesh, DEFAULT_TAU)?;
        let bins = project_singular_bins_on(&j, frame, &mesh, &quant)?;
        println!("{t:>4} {:>5} {:>10} {:>14}", j.tets.len(), j.triangles.len(), bins.len());
    }

    let f = &series.frames()[10];
    let doubled = ScalarField::new(
        "2z+1",
        f.field(0).values().iter().map(|z| 2.0 * z + 1.0).collect(),
    )?;
    let degenerate = MultifieldFrame::new(f.grid().clone(), vec![f.field(0).clone(), doubled], 10)?;
    let j = mark_singular_elements_on(&degenerate, &mesh, DEFAULT_TAU)?;
    println!(
        "(z, 2z+1): {} of {} tets singular",
        j.tets.len(),
        mesh.tet_count()
    );
    Ok(())
}
