//! Singular (Jacobi) mesh elements and their projection onto histogram bins.
//!
//! Every field is linear on a tetrahedron, so its gradient is constant there.
//! A tet is singular when its `r × 3` Jacobian drops rank up to a relative
//! tolerance τ. Boundary triangles get the same test on the fields restricted
//! to the triangle's plane, where the rank bound is `min(2, r)`.

use std::collections::{BTreeSet, HashSet};

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extract::{ComponentLabeling, FiberComponentHistogram};
use crate::mesh::{cross, dot, norm, sub, TetMesh};
use crate::model::MultifieldFrame;
use crate::quantize::{BinIndex, RangeQuantization};

pub const DEFAULT_TAU: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiElementSet {
    /// Sorted ids of singular tetrahedra.
    pub tets: Vec<usize>,
    /// Sorted indices into [`TetMesh::boundary_triangles`].
    pub triangles: Vec<usize>,
    pub tau: f64,
}

impl JacobiElementSet {
    pub fn is_empty(&self) -> bool {
        self.tets.is_empty() && self.triangles.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularBinSet {
    shape: Vec<usize>,
    bins: BTreeSet<usize>,
}

impl SingularBinSet {
    pub fn empty(quant: &RangeQuantization) -> Self {
        Self {
            shape: quant.shape(),
            bins: BTreeSet::new(),
        }
    }

    pub fn from_bins(quant: &RangeQuantization, bins: impl IntoIterator<Item = BinIndex>) -> Result<Self> {
        let mut set = Self::empty(quant);
        for b in bins {
            if !quant.is_valid(&b) {
                return Err(Error::InvalidParameter(format!("bin {:?} outside the spectrum", b.0)));
            }
            set.bins.insert(quant.flat_index(&b));
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn contains_flat(&self, flat: usize) -> bool {
        self.bins.contains(&flat)
    }

    pub fn flat_bins(&self) -> &BTreeSet<usize> {
        &self.bins
    }

    pub fn bins<'a>(&'a self, quant: &'a RangeQuantization) -> impl Iterator<Item = BinIndex> + 'a {
        self.bins.iter().map(move |&f| quant.unflatten(f))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
}

/// Constant gradient of a linear function on a tetrahedron.
pub(crate) fn tet_gradient(pos: &[[f64; 3]; 4], vals: &[f64; 4]) -> [f64; 3] {
    let e1 = sub(pos[1], pos[0]);
    let e2 = sub(pos[2], pos[0]);
    let e3 = sub(pos[3], pos[0]);
    let (d1, d2, d3) = (vals[1] - vals[0], vals[2] - vals[0], vals[3] - vals[0]);
    let c23 = cross(e2, e3);
    let c31 = cross(e3, e1);
    let c12 = cross(e1, e2);
    let det = dot(e1, c23);
    [0, 1, 2].map(|a| (d1 * c23[a] + d2 * c31[a] + d3 * c12[a]) / det)
}

/// In-plane gradient of a linear function on a triangle, as a 3-vector.
pub(crate) fn triangle_gradient(pos: &[[f64; 3]; 3], vals: &[f64; 3]) -> [f64; 3] {
    let e1 = sub(pos[1], pos[0]);
    let e2 = sub(pos[2], pos[0]);
    let (d1, d2) = (vals[1] - vals[0], vals[2] - vals[0]);
    let (a, b, c) = (dot(e1, e1), dot(e1, e2), dot(e2, e2));
    let det = a * c - b * b;
    let alpha = (d1 * c - d2 * b) / det;
    let beta = (d2 * a - d1 * b) / det;
    [0, 1, 2].map(|k| alpha * e1[k] + beta * e2[k])
}

/// Rank-deficiency test on a set of gradients in a `dim`-dimensional element.
///
/// `spreads[k] / diameter` is the scale against which gradient `k` is
/// declared vanishing.
pub(crate) fn is_rank_deficient(
    grads: &[[f64; 3]],
    spreads: &[f64],
    diameter: f64,
    dim: usize,
    tau: f64,
) -> bool {
    for (g, &s) in grads.iter().zip(spreads) {
        if norm(g.to_owned()) * diameter <= tau * s {
            return true;
        }
    }
    match grads.len() {
        1 => false,
        2 => {
            let (g1, g2) = (grads[0], grads[1]);
            norm(cross(g1, g2)) <= tau * norm(g1) * norm(g2)
        }
        r => {
            let rank_bound = dim.min(r);
            let unit: Vec<[f64; 3]> = grads
                .iter()
                .map(|g| {
                    let n = norm(*g);
                    g.map(|c| c / n)
                })
                .collect();
            let gram = Matrix3::from_fn(|i, j| dot(unit[i], unit[j]));
            let mut ev: Vec<f64> = SymmetricEigen::new(gram)
                .eigenvalues
                .iter()
                .map(|l| l.max(0.0).sqrt())
                .collect();
            ev.sort_by(|a, b| b.total_cmp(a));
            ev[rank_bound - 1] <= tau * ev[0]
        }
    }
}

fn field_spreads(frame: &MultifieldFrame) -> Vec<f64> {
    frame.range_box().iter().map(|(lo, hi)| hi - lo).collect()
}

fn diameter<const N: usize>(pos: &[[f64; 3]; N]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..N {
        for j in i + 1..N {
            d = d.max(norm(sub(pos[i], pos[j])));
        }
    }
    d
}

/// Singular tets and boundary triangles of `frame` at tolerance `tau`.
pub fn mark_singular_elements(frame: &MultifieldFrame, tau: f64) -> Result<JacobiElementSet> {
    let mesh = TetMesh::new(frame.grid());
    mark_singular_elements_on(frame, &mesh, tau)
}

pub fn mark_singular_elements_on(
    frame: &MultifieldFrame,
    mesh: &TetMesh,
    tau: f64,
) -> Result<JacobiElementSet> {
    let r = frame.arity();
    if r > 3 {
        return Err(Error::UnsupportedArity(r));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be > 0, got {tau}")));
    }
    let grid = frame.grid();
    let spreads = field_spreads(frame);

    let tets: Vec<usize> = (0..mesh.tet_count())
        .into_par_iter()
        .filter(|&t| {
            let pos = mesh.positions(grid, t);
            let grads: Vec<[f64; 3]> = (0..r)
                .map(|k| tet_gradient(&pos, &mesh.field_values(frame, k, t)))
                .collect();
            is_rank_deficient(&grads, &spreads, diameter(&pos), 3, tau)
        })
        .collect();

    let triangles: Vec<usize> = mesh
        .boundary_triangles()
        .par_iter()
        .enumerate()
        .filter(|(_, tri)| {
            let pos = tri.vertex_ids.map(|v| grid.vertex_position(v));
            let grads: Vec<[f64; 3]> = (0..r)
                .map(|k| {
                    let vals = frame.field(k).values();
                    triangle_gradient(&pos, &tri.vertex_ids.map(|v| vals[v]))
                })
                .collect();
            is_rank_deficient(&grads, &spreads, diameter(&pos), 2, tau)
        })
        .map(|(i, _)| i)
        .collect();

    Ok(JacobiElementSet {
        tets,
        triangles,
        tau,
    })
}

fn insert_range_product(
    quant: &RangeQuantization,
    ranges: &[(f64, f64)],
    out: &mut BTreeSet<usize>,
) {
    let spans: Vec<_> = ranges
        .iter()
        .enumerate()
        .map(|(k, &(lo, hi))| quant.bins_touching(k, lo, hi))
        .collect();
    if spans.iter().any(|s| s.is_empty()) {
        return;
    }
    let mut idx: Vec<usize> = spans.iter().map(|s| s.start).collect();
    loop {
        out.insert(quant.flat_index(&BinIndex(idx.clone())));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < spans[k].end {
                break;
            }
            idx[k] = spans[k].start;
            k += 1;
        }
    }
}

fn value_ranges(frame: &MultifieldFrame, ids: &[usize]) -> Vec<(f64, f64)> {
    frame
        .fields()
        .iter()
        .map(|f| {
            let v = f.values();
            ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(v[i]), hi.max(v[i]))
            })
        })
        .collect()
}

/// Bins whose box meets the value range of some singular element.
pub fn project_singular_bins(
    jset: &JacobiElementSet,
    frame: &MultifieldFrame,
    quant: &RangeQuantization,
) -> Result<SingularBinSet> {
    let mesh = TetMesh::new(frame.grid());
    project_singular_bins_on(jset, frame, &mesh, quant)
}

pub fn project_singular_bins_on(
    jset: &JacobiElementSet,
    frame: &MultifieldFrame,
    mesh: &TetMesh,
    quant: &RangeQuantization,
) -> Result<SingularBinSet> {
    if quant.arity() != frame.arity() {
        return Err(Error::InvalidQuantization(format!(
            "quantization has {} fields, frame has {}",
            quant.arity(),
            frame.arity()
        )));
    }
    let mut set = SingularBinSet::empty(quant);
    for &t in &jset.tets {
        insert_range_product(quant, &value_ranges(frame, &mesh.tet(t)), &mut set.bins);
    }
    let tris = mesh.boundary_triangles();
    for &i in &jset.triangles {
        insert_range_product(quant, &value_ranges(frame, &tris[i].vertex_ids), &mut set.bins);
    }
    Ok(set)
}

/// Writes singular flags into a histogram built on the same quantization.
pub fn apply_singular_bins(hist: &mut FiberComponentHistogram, set: &SingularBinSet) -> Result<()> {
    if hist.quantization().shape() != set.shape {
        return Err(Error::InvalidQuantization(format!(
            "singular set shape {:?} differs from histogram shape {:?}",
            set.shape,
            hist.quantization().shape()
        )));
    }
    for (flat, stats) in hist.bins_mut().iter_mut() {
        stats.singular = set.bins.contains(flat);
    }
    Ok(())
}

/// Counts, per bin, the components that contain a fragment of a singular
/// tet or of a tet owning a singular boundary triangle whose range reaches
/// that bin.
pub fn annotate_singular_components(
    labeling: &mut ComponentLabeling,
    jset: &JacobiElementSet,
    frame: &MultifieldFrame,
    mesh: &TetMesh,
) {
    let quant = labeling.histogram.quantization().clone();
    let singular_tets: HashSet<usize> = jset.tets.iter().copied().collect();
    let tris = mesh.boundary_triangles();
    let mut tri_bins: HashSet<(usize, usize)> = HashSet::new();
    for &i in &jset.triangles {
        let mut bins = BTreeSet::new();
        insert_range_product(&quant, &value_ranges(frame, &tris[i].vertex_ids), &mut bins);
        tri_bins.extend(bins.into_iter().map(|b| (tris[i].tet as usize, b)));
    }
    let mut singular_roots: HashSet<u32> = HashSet::new();
    for f in &labeling.fragments {
        let t = f.tet as usize;
        if singular_tets.contains(&t) || tri_bins.contains(&(t, f.bin)) {
            singular_roots.insert(f.component);
        }
    }
    let mut per_bin: std::collections::BTreeMap<usize, HashSet<u32>> = Default::default();
    for f in &labeling.fragments {
        if singular_roots.contains(&f.component) {
            per_bin.entry(f.bin).or_default().insert(f.component);
        }
    }
    for (flat, stats) in labeling.histogram.bins_mut().iter_mut() {
        stats.singular_components = per_bin.get(flat).map_or(0, |s| s.len() as u64);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GridDomain, ScalarField};

    fn frame(fs: &[(&str, fn([f64; 3]) -> f64)]) -> MultifieldFrame {
        let g = GridDomain::spanning([6, 5, 4], [-1.0; 3], [1.0, 2.0, 0.5]).unwrap();
        let fields = fs
            .iter()
            .map(|(n, f)| ScalarField::from_fn(*n, &g, f).unwrap())
            .collect();
        MultifieldFrame::new(g, fields, 0).unwrap()
    }

    #[test]
    fn tet_gradient_recovers_linear_function() {
        let pos = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 1.0, 0.0], [0.2, 0.1, 2.0]];
        let f = |p: [f64; 3]| 2.0 * p[0] - 3.0 * p[1] + 0.5 * p[2] + 1.0;
        let g = tet_gradient(&pos, &pos.map(f));
        for (a, b) in g.iter().zip([2.0, -3.0, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_gradient_is_projection() {
        let pos = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
        let f = |p: [f64; 3]| 2.0 * p[0] - p[1] + 7.0 * p[2];
        let g = triangle_gradient(&pos, &pos.map(f));
        for (a, b) in g.iter().zip([2.0, -1.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_gradients_no_interior_singularity() {
        let f = frame(&[("z", |p| p[2]), ("x", |p| p[0])]);
        let j = mark_singular_elements(&f, DEFAULT_TAU).unwrap();
        assert!(j.tets.is_empty());
    }

    #[test]
    fn parallel_gradients_everywhere() {
        let f = frame(&[("z", |p| p[2]), ("w", |p| 2.0 * p[2] + 1.0)]);
        let mesh = TetMesh::new(f.grid());
        let j = mark_singular_elements(&f, DEFAULT_TAU).unwrap();
        assert_eq!(j.tets.len(), mesh.tet_count());
        assert_eq!(j.triangles.len(), mesh.boundary_triangles().len());
    }

    #[test]
    fn arity_above_three_rejected() {
        let f = frame(&[
            ("a", |p| p[0]),
            ("b", |p| p[1]),
            ("c", |p| p[2]),
            ("d", |p| p[0] + p[1]),
        ]);
        assert!(matches!(
            mark_singular_elements(&f, DEFAULT_TAU),
            Err(Error::UnsupportedArity(4))
        ));
    }

    #[test]
    fn three_fields_rank_test() {
        let f = frame(&[("x", |p| p[0]), ("y", |p| p[1]), ("z", |p| p[2])]);
        assert!(mark_singular_elements(&f, DEFAULT_TAU).unwrap().tets.is_empty());
        let g = frame(&[("x", |p| p[0]), ("y", |p| p[1]), ("s", |p| p[0] - 2.0 * p[1])]);
        let mesh = TetMesh::new(g.grid());
        assert_eq!(
            mark_singular_elements(&g, DEFAULT_TAU).unwrap().tets.len(),
            mesh.tet_count()
        );
    }

    #[test]
    fn empty_set_projects_to_nothing() {
        let f = frame(&[("z", |p| p[2]), ("x", |p| p[0])]);
        let q = RangeQuantization::for_frame(&f, &crate::quantize::Binning::BinCounts(vec![3, 3]))
            .unwrap();
        let j = JacobiElementSet {
            tets: vec![],
            triangles: vec![],
            tau: DEFAULT_TAU,
        };
        assert!(project_singular_bins(&j, &f, &q).unwrap().is_empty());
    }
}
