//! Quantized fiber-component extraction.
//!
//! Nodes are the non-empty [fragments](crate::clip) of each (tet, bin) pair.
//! Two nodes of the same bin in face-adjacent tets are merged when the bin's
//! closed box meets their shared facet. The connected components of that
//! graph are the quantized fiber-components (joint contour slabs).

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::clip::{clip_tet_box, subtets_volume, triangle_meets_box, ClipScratch};
use crate::error::Result;
use crate::mesh::{TetMesh, FACE_VERTICES};
use crate::model::MultifieldFrame;
use crate::quantize::{BinIndex, RangeQuantization};

/// Per-bin statistics of an occupied bin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BinStats {
    /// Number of quantized fiber-components.
    pub count: u64,
    /// Total volume of the bin's fragments.
    pub measure: f64,
    pub singular: bool,
    /// Components touching a singular mesh element (0 until annotated).
    pub singular_components: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberComponentHistogram {
    quantization: RangeQuantization,
    bins: BTreeMap<usize, BinStats>,
    total_count: u64,
    total_measure: f64,
}

impl FiberComponentHistogram {
    /// Builds a histogram from per-bin stats keyed by flat bin index.
    pub fn from_bins(quantization: RangeQuantization, bins: BTreeMap<usize, BinStats>) -> Self {
        let total_count = bins.values().map(|b| b.count).sum();
        let total_measure = bins.values().map(|b| b.measure).sum();
        Self {
            quantization,
            bins,
            total_count,
            total_measure,
        }
    }

    pub fn quantization(&self) -> &RangeQuantization {
        &self.quantization
    }

    /// Occupied bins in flat-index order.
    pub fn occupied(&self) -> impl Iterator<Item = (BinIndex, &BinStats)> + '_ {
        self.bins
            .iter()
            .map(|(&f, s)| (self.quantization.unflatten(f), s))
    }

    pub fn occupied_flat(&self) -> &BTreeMap<usize, BinStats> {
        &self.bins
    }

    pub fn stats(&self, bin: &BinIndex) -> Option<&BinStats> {
        self.bins.get(&self.quantization.flat_index(bin))
    }

    pub fn count(&self, bin: &BinIndex) -> u64 {
        self.stats(bin).map_or(0, |s| s.count)
    }

    pub fn measure(&self, bin: &BinIndex) -> f64 {
        self.stats(bin).map_or(0.0, |s| s.measure)
    }

    pub fn is_singular(&self, bin: &BinIndex) -> bool {
        self.stats(bin).is_some_and(|s| s.singular)
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub(crate) fn bins_mut(&mut self) -> &mut BTreeMap<usize, BinStats> {
        &mut self.bins
    }
}

/// One fragment node and the component it was assigned to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragmentRecord {
    pub tet: u32,
    pub bin: usize,
    pub volume: f64,
    /// Representative node of the fragment's component.
    pub component: u32,
}

/// Full extraction output: the histogram plus every fragment's component.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    pub histogram: FiberComponentHistogram,
    /// Sorted by `(tet, bin)`.
    pub fragments: Vec<FragmentRecord>,
}

/// Counts quantized fiber-components and their measures per bin.
pub fn extract_fiber_components(
    frame: &MultifieldFrame,
    quant: &RangeQuantization,
) -> Result<FiberComponentHistogram> {
    let mesh = TetMesh::new(frame.grid());
    Ok(extract_components(frame, quant, &mesh)?.histogram)
}

/// Like [`extract_fiber_components`], reusing a prebuilt mesh and keeping the
/// per-fragment labeling.
pub fn extract_components(
    frame: &MultifieldFrame,
    quant: &RangeQuantization,
    mesh: &TetMesh,
) -> Result<ComponentLabeling> {
    quant.check_covers(frame)?;
    assert_eq!(mesh.dims(), frame.grid().dims(), "mesh built for other dims");
    let r = frame.arity();
    let grid = frame.grid();
    let n_tets = mesh.tet_count();

    // nodes: for each tet, its non-empty fragments ordered by flat bin
    let per_tet: Vec<Vec<(usize, f64)>> = (0..n_tets)
        .into_par_iter()
        .map_init(
            || (ClipScratch::default(), Vec::new(), Vec::new(), Vec::new()),
            |(scratch, values, intervals, shared), t| {
                values.clear();
                values.extend((0..r).map(|k| mesh.field_values(frame, k, t)));
                let ranges: Vec<std::ops::Range<usize>> = values
                    .iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        quant.bins_touching(k, lo, hi)
                    })
                    .collect();
                let mut out = Vec::new();
                if ranges.iter().any(|rg| rg.is_empty()) {
                    return out;
                }
                let pos = mesh.positions(grid, t);
                let mut idx: Vec<usize> = ranges.iter().map(|rg| rg.start).collect();
                loop {
                    intervals.clear();
                    shared.clear();
                    for (k, &j) in idx.iter().enumerate() {
                        intervals.push(quant.interval(k, j));
                        shared.push(quant.lower_edge_shared(k, j));
                    }
                    if clip_tet_box(values, intervals, shared, scratch).is_some() {
                        let flat = idx
                            .iter()
                            .zip(quant.strides())
                            .map(|(&j, &s)| j * s)
                            .sum();
                        out.push((flat, subtets_volume(scratch.current(), &pos)));
                    }
                    // odometer, field 0 fastest
                    let mut k = 0;
                    loop {
                        if k == r {
                            out.sort_unstable_by_key(|e| e.0);
                            return out;
                        }
                        idx[k] += 1;
                        if idx[k] < ranges[k].end {
                            break;
                        }
                        idx[k] = ranges[k].start;
                        k += 1;
                    }
                }
            },
        )
        .collect();

    let mut offsets = Vec::with_capacity(n_tets + 1);
    offsets.push(0usize);
    for v in &per_tet {
        offsets.push(offsets.last().unwrap() + v.len());
    }
    let nodes: Vec<(usize, f64)> = per_tet.into_iter().flatten().collect();
    let node_bins: Vec<usize> = nodes.iter().map(|n| n.0).collect();

    // candidate merges across shared facets
    let merges: Vec<(u32, u32)> = (0..n_tets)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(fvals, intervals), t| {
                let mut out = Vec::new();
                let mine = &node_bins[offsets[t]..offsets[t + 1]];
                if mine.is_empty() {
                    return out;
                }
                let ids = mesh.tet(t);
                for (f, nb) in mesh.neighbors(t).iter().enumerate() {
                    let Some(nb) = *nb else { continue };
                    let nb = nb as usize;
                    if nb < t {
                        continue;
                    }
                    let theirs = &node_bins[offsets[nb]..offsets[nb + 1]];
                    if theirs.is_empty() {
                        continue;
                    }
                    let fv = FACE_VERTICES[f];
                    fvals.clear();
                    for k in 0..r {
                        let vals = frame.field(k).values();
                        fvals.push([vals[ids[fv[0]]], vals[ids[fv[1]]], vals[ids[fv[2]]]]);
                    }
                    for (a, &bin) in mine.iter().enumerate() {
                        let Ok(b) = theirs.binary_search(&bin) else { continue };
                        intervals.clear();
                        let bi = quant.unflatten(bin);
                        intervals.extend(bi.0.iter().enumerate().map(|(k, &j)| quant.interval(k, j)));
                        if triangle_meets_box(fvals, intervals) {
                            out.push(((offsets[t] + a) as u32, (offsets[nb] + b) as u32));
                        }
                    }
                }
                out
            },
        )
        .flatten()
        .collect();

    let mut uf: UnionFind<u32> = UnionFind::new(nodes.len());
    for (a, b) in merges {
        uf.union(a, b);
    }

    let mut bins: BTreeMap<usize, BinStats> = BTreeMap::new();
    let mut root_seen = vec![false; nodes.len()];
    let mut fragments = Vec::with_capacity(nodes.len());
    for t in 0..n_tets {
        for node in offsets[t]..offsets[t + 1] {
            let (bin, volume) = nodes[node];
            let root = uf.find(node as u32);
            let stats = bins.entry(bin).or_default();
            stats.measure += volume;
            if !root_seen[root as usize] {
                root_seen[root as usize] = true;
                stats.count += 1;
            }
            fragments.push(FragmentRecord {
                tet: t as u32,
                bin,
                volume,
                component: root,
            });
        }
    }

    Ok(ComponentLabeling {
        histogram: FiberComponentHistogram::from_bins(quant.clone(), bins),
        fragments,
    })
}
