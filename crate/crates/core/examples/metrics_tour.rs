//! Every distribution distance on small hand-made pmfs, plus the axiom
//! harness on random triples.
//!
//! `cargo run --example metrics_tour`

use fibertrack::distribution::{align_distributions, FiberDistribution, PmfMode};
use fibertrack::metrics::{
    check_metric_axioms, dq, dq_singular_union, hist_intersection, kl_divergence, minkowski,
    quadratic_form, SimilarityMatrix,
};
use fibertrack::RangeQuantization;

fn dist(edges: &[f64], weights: &[f64], singular: &[bool]) -> fibertrack::Result<FiberDistribution> {
    let q = RangeQuantization::new(vec![edges.to_vec()])?;
    FiberDistribution::from_weights(q, weights.to_vec(), singular.to_vec(), PmfMode::Count)
}

fn main() -> fibertrack::Result<()> {
    let a = dist(&[0.0, 1.0, 2.0], &[1.0, 1.0], &[false, false])?;
    let b = dist(&[0.0, 1.0, 2.0], &[1.0, 3.0], &[false, true])?;
    println!("p1 = {:?}, p2 = {:?}", a.pmf(), b.pmf());
    println!("d1    = {}", dq(&a, &b, 1.0)?);
    println!("d2    = {}", dq(&a, &b, 2.0)?);
    println!("dinf  = {}", dq(&a, &b, f64::INFINITY)?);
    println!("dqS   = {} (q=1, ω=13, bin 1 singular)", dq_singular_union(&a, &b, 1.0, 13.0)?);
    println!("mink3 = {}", minkowski(&a, &b, 3.0)?);
    println!("inter = {}", hist_intersection(&a, &b)?);
    println!("KL    = {} / reversed {}", kl_divergence(&a, &b, 1e-9)?, kl_divergence(&b, &a, 1e-9)?);
    println!("quad  = {} (Gaussian σ_A = 1)", quadratic_form(&a, &b, &SimilarityMatrix::gaussian(1.0)?)?);

    // spectra [0,3) and [2,5) merge onto [0,5) with zero padding
    let c = dist(&[0.0, 1.0, 2.0, 3.0], &[1.0, 1.0, 2.0], &[false; 3])?;
    let d = dist(&[2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 1.0], &[false; 3])?;
    let (c2, d2) = align_distributions(&c, &d)?;
    println!("aligned: {:?} vs {:?}, d1 = {}", c2.pmf(), d2.pmf(), dq(&c2, &d2, 1.0)?);

    // deterministic pseudo-random triples for the axiom harness
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let edges: Vec<f64> = (0..=6).map(f64::from).collect();
    let triples: Vec<[FiberDistribution; 3]> = (0..200)
        .map(|_| {
            let mut one = || {
                let w: Vec<f64> = (0..6).map(|_| next()).collect();
                let s: Vec<bool> = (0..6).map(|_| next() < 0.3).collect();
                dist(&edges, &w, &s).expect("positive weights")
            };
            [one(), one(), one()]
        })
        .collect();
    for q in [1.0, 2.0, f64::INFINITY] {
        let r = check_metric_axioms(&triples, q, 13.0)?;
        println!(
            "axioms q={q}: {} violations over {} triples, worst triangle margin {:.3e}",
            r.violations.len(),
            r.triples,
            r.worst_triangle_margin
        );
    }
    Ok(())
}
