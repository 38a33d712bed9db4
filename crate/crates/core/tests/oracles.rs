//! Checks of the geometric kernels against independent computations:
//! Monte-Carlo volumes, vertex enumeration, and closed-form sums.

use fibertrack::clip::{clip_tet_by_bin, facet_feasible};
use fibertrack::datagen::{gen_translated_paraboloid, SyntheticSpec};
use fibertrack::mesh::{TetMesh, Tetrahedron};
use fibertrack::metrics::rms_multifield;
use fibertrack::{BinIndex, GridDomain, MultifieldFrame, RangeQuantization, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_tet(rng: &mut ChaCha8Rng, arity: usize) -> Tetrahedron {
    loop {
        let positions: [[f64; 3]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let values = (0..arity)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
            .collect();
        let t = Tetrahedron {
            vertex_ids: [0, 1, 2, 3],
            positions,
            values,
        };
        if t.volume() > 0.02 {
            return t;
        }
    }
}

/// Uniform barycentric weights from sorted uniforms.
fn random_bary(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let mut u = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
    u.sort_by(f64::total_cmp);
    [u[0], u[1] - u[0], u[2] - u[1], 1.0 - u[2]]
}

#[test]
fn clipped_volume_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let quant = RangeQuantization::new(vec![
        vec![-1.0, -0.4, 0.1, 0.5, 1.0],
        vec![-1.0, -0.2, 0.3, 1.0],
    ])
    .unwrap();
    const N: usize = 1_000_000;
    for case in 0..4 {
        let tet = random_tet(&mut rng, 2);
        let bin = BinIndex(vec![1 + case % 2, 1]);
        let exact = clip_tet_by_bin(&tet, 0, &bin, &quant).map_or(0.0, |f| f.volume);
        let boxes = quant.bin_box(&bin);
        let hits = (0..N)
            .filter(|_| {
                let l = random_bary(&mut rng);
                boxes.iter().enumerate().all(|(k, &(lo, hi))| {
                    let v: f64 = (0..4).map(|i| l[i] * tet.values[k][i]).sum();
                    lo <= v && v < hi
                })
            })
            .count();
        let p = hits as f64 / N as f64;
        let vol = tet.volume();
        let sigma = vol * (p * (1.0 - p) / N as f64).sqrt();
        assert!(
            (exact - p * vol).abs() <= 3.0 * sigma + 1e-12,
            "case {case}: exact {exact} vs estimate {} ± {sigma}",
            p * vol
        );
    }
}

#[test]
fn tet_volumes_tile_the_domain() {
    let g = GridDomain::new([5, 4, 6], [0.3, -1.0, 2.0], [0.25, 0.5, 0.125]).unwrap();
    let f = ScalarField::from_fn("x", &g, |p| p[0]).unwrap();
    let frame = MultifieldFrame::new(g.clone(), vec![f], 0).unwrap();
    let mesh = TetMesh::new(&g);
    assert_eq!(mesh.tet_count(), 6 * g.cell_count());
    let total: f64 = (0..mesh.tet_count())
        .map(|t| {
            let v = mesh.tetrahedron(&frame, t).volume();
            assert!(v > 0.0);
            v
        })
        .sum();
    assert!((total - g.volume()).abs() <= 1e-12 * g.volume());
}

#[test]
fn bins_partition_a_tet() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let quant = RangeQuantization::new(vec![
        (0..=8).map(|i| -1.0 + 0.25 * i as f64).collect(),
        (0..=5).map(|i| -1.0 + 0.4 * i as f64).collect(),
    ])
    .unwrap();
    for _ in 0..200 {
        let tet = random_tet(&mut rng, 2);
        let sum: f64 = (0..quant.total_bins())
            .filter_map(|b| clip_tet_by_bin(&tet, 0, &quant.unflatten(b), &quant))
            .map(|f| f.volume)
            .sum();
        assert!((sum - tet.volume()).abs() <= 1e-12 * tet.volume());
    }
}

/// Feasibility of the bin constraints on a triangle by enumerating all
/// pairwise intersections of constraint lines in the `(λ1, λ2)` plane.
/// Returns the best worst-slack over candidate points, where each point is
/// judged only by the constraints that do not define it.
fn best_slack(values: &[[f64; 3]], boxes: &[(f64, f64)]) -> f64 {
    // each line: c0 + c1·λ1 + c2·λ2 ≥ 0
    let mut lines: Vec<[f64; 3]> = vec![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, -1.0, -1.0]];
    for (f, &(lo, hi)) in values.iter().zip(boxes) {
        let g = [f[0], f[1] - f[0], f[2] - f[0]];
        lines.push([g[0] - lo, g[1], g[2]]);
        lines.push([hi - g[0], -g[1], -g[2]]);
    }
    let slack = |p: [f64; 2], skip: [usize; 2]| {
        lines
            .iter()
            .enumerate()
            .filter(|(k, _)| !skip.contains(k))
            .map(|(_, l)| l[0] + l[1] * p[0] + l[2] * p[1])
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b) = (lines[i], lines[j]);
            let det = a[1] * b[2] - a[2] * b[1];
            if det.abs() < 1e-14 {
                continue;
            }
            let p = [(-a[0] * b[2] + a[2] * b[0]) / det, (-a[1] * b[0] + a[0] * b[1]) / det];
            best = best.max(slack(p, [i, j]));
        }
    }
    best
}

#[test]
fn facet_feasibility_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let quant = RangeQuantization::new(vec![
        (0..=6).map(|i| -1.0 + i as f64 / 3.0).collect(),
        (0..=4).map(|i| -1.0 + 0.5 * i as f64).collect(),
    ])
    .unwrap();
    let (mut checked, mut feasible) = (0, 0);
    for _ in 0..5000 {
        let values: Vec<[f64; 3]> = (0..2)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
            .collect();
        let bin = quant.unflatten(rng.gen_range(0..quant.total_bins()));
        let s = best_slack(&values, &quant.bin_box(&bin));
        if s.abs() < 1e-9 {
            continue;
        }
        checked += 1;
        feasible += usize::from(s > 0.0);
        assert_eq!(facet_feasible(&values, &bin, &quant), s > 0.0, "{values:?} {bin:?}");
    }
    assert!(checked > 4500 && feasible > 1000 && checked - feasible > 1000);
}

#[test]
fn rms_matches_closed_form_on_paraboloid() {
    let spec = SyntheticSpec::translated_paraboloid();
    let series = gen_translated_paraboloid(&spec).unwrap();
    let (a, b) = (&series.frames()[10], &series.frames()[11]);
    let d = spec.step;
    let g = a.grid();
    let [nx, ny, _] = g.dims();
    // z shifts by d; x² + y² − z shifts by 2d(x + y) + 2d² − d
    let mut acc = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let x = g.origin()[0] + i as f64 * g.spacing()[0];
            let y = g.origin()[1] + j as f64 * g.spacing()[1];
            let dp = 2.0 * d * (x + y) + 2.0 * d * d - d;
            acc += d * d + dp * dp;
        }
    }
    let expected = (acc / (nx * ny) as f64).sqrt();
    let got = rms_multifield(a, b).unwrap();
    assert!((got - expected).abs() <= 1e-10 * expected, "{got} vs {expected}");
}
