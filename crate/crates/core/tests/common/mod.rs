//! Independent oracles shared by the integration tests. Nothing here calls
//! into the extraction code; fields are re-interpolated from raw vertex
//! values and bins are re-derived from raw edge lists.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use fibertrack::MultifieldFrame;

/// Samples of every field on a lattice refined `refine` times per cell.
pub struct Sampling {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    /// `values[k][idx]`, x-fastest.
    pub values: Vec<Vec<f64>>,
}

impl Sampling {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }
}

/// Piecewise-linear interpolant on the Kuhn split whose main diagonal runs
/// from the cell's low corner to its high corner: sort the local coordinates
/// in decreasing order and walk the corresponding edge path.
pub fn pl_value(frame: &MultifieldFrame, k: usize, cell: [usize; 3], local: [f64; 3]) -> f64 {
    let g = frame.grid();
    let vals = frame.field(k).values();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| local[b].total_cmp(&local[a]));
    let mut c = cell;
    let mut prev = 1.0;
    let mut acc = 0.0;
    for &axis in &order {
        let u = local[axis];
        acc += (prev - u) * vals[g.index(c[0], c[1], c[2])];
        c[axis] += 1;
        prev = u;
    }
    acc + prev * vals[g.index(c[0], c[1], c[2])]
}

pub fn refine(frame: &MultifieldFrame, refine: usize) -> Sampling {
    let g = frame.grid();
    let d = g.dims();
    let dims = d.map(|n| (n - 1) * refine + 1);
    let spacing = g.spacing().map(|h| h / refine as f64);
    let n: usize = dims.iter().product();
    let mut values = vec![vec![0.0; n]; frame.arity()];
    for kk in 0..dims[2] {
        for jj in 0..dims[1] {
            for ii in 0..dims[0] {
                let idx = ii + dims[0] * (jj + dims[1] * kk);
                let mut cell = [0usize; 3];
                let mut local = [0.0; 3];
                for (a, s) in [ii, jj, kk].into_iter().enumerate() {
                    let c = (s / refine).min(d[a] - 2);
                    cell[a] = c;
                    local[a] = (s - c * refine) as f64 / refine as f64;
                }
                for (k, v) in values.iter_mut().enumerate() {
                    v[idx] = pl_value(frame, k, cell, local);
                }
            }
        }
    }
    Sampling {
        dims,
        spacing,
        values,
    }
}

/// Half-open bin of `v` over `edges`, last bin closed.
pub fn bin_of(edges: &[f64], v: f64) -> Option<usize> {
    let m = edges.len() - 1;
    if v < edges[0] || v > edges[m] {
        return None;
    }
    (0..m).find(|&j| v < edges[j + 1]).or(Some(m - 1))
}

/// Flat bin label of every sample (field 0 fastest).
pub fn labels(s: &Sampling, edges: &[Vec<f64>]) -> Vec<usize> {
    (0..s.len())
        .map(|i| {
            let mut flat = 0;
            let mut stride = 1;
            for (k, e) in edges.iter().enumerate() {
                flat += stride * bin_of(e, s.values[k][i]).expect("sample inside quantization");
                stride *= e.len() - 1;
            }
            flat
        })
        .collect()
}

fn neighbors6(dims: [usize; 3], idx: usize) -> impl Iterator<Item = usize> {
    let i = idx % dims[0];
    let j = (idx / dims[0]) % dims[1];
    let k = idx / (dims[0] * dims[1]);
    let sx = 1;
    let sy = dims[0];
    let sz = dims[0] * dims[1];
    [
        (i > 0).then(|| idx - sx),
        (i + 1 < dims[0]).then(|| idx + sx),
        (j > 0).then(|| idx - sy),
        (j + 1 < dims[1]).then(|| idx + sy),
        (k > 0).then(|| idx - sz),
        (k + 1 < dims[2]).then(|| idx + sz),
    ]
    .into_iter()
    .flatten()
}

/// Component id of each sample among those with `keep[i]`, 6-connected,
/// joining only samples with equal labels.
pub fn components(dims: [usize; 3], label: &[usize], keep: &[bool]) -> Vec<Option<u32>> {
    let mut comp = vec![None; label.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for s in 0..label.len() {
        if !keep[s] || comp[s].is_some() {
            continue;
        }
        comp[s] = Some(next);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in neighbors6(dims, v) {
                if keep[w] && comp[w].is_none() && label[w] == label[v] {
                    comp[w] = Some(next);
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Component count per flat bin from a flood fill of the samples.
pub fn flood_counts(s: &Sampling, edges: &[Vec<f64>]) -> BTreeMap<usize, u64> {
    let label = labels(s, edges);
    let comp = components(s.dims, &label, &vec![true; label.len()]);
    let mut seen = std::collections::HashSet::new();
    let mut out = BTreeMap::new();
    for (i, c) in comp.iter().enumerate() {
        if seen.insert(c.unwrap()) {
            *out.entry(label[i]).or_insert(0) += 1;
        }
    }
    out
}

/// Bins whose every component, sampled at spacing `h`, survives erosion by
/// one sample (the sample and its in-domain 6-neighbors share the bin) as a
/// single non-empty connected piece: a component that does is thicker than
/// `h` throughout, including at necks.
pub fn thick_bins(s: &Sampling, edges: &[Vec<f64>]) -> std::collections::BTreeSet<usize> {
    let label = labels(s, edges);
    let n = label.len();
    let comp = components(s.dims, &label, &vec![true; n]);
    let core: Vec<bool> = (0..n)
        .map(|i| neighbors6(s.dims, i).all(|w| label[w] == label[i]))
        .collect();
    let core_comp = components(s.dims, &label, &core);
    // per full component: set of core pieces inside it
    let mut pieces: BTreeMap<u32, std::collections::BTreeSet<u32>> = BTreeMap::new();
    for i in 0..n {
        let entry = pieces.entry(comp[i].unwrap()).or_default();
        if let Some(c) = core_comp[i] {
            entry.insert(c);
        }
    }
    let mut bin_ok: BTreeMap<usize, bool> = BTreeMap::new();
    let mut comp_bin: BTreeMap<u32, usize> = BTreeMap::new();
    for i in 0..n {
        comp_bin.insert(comp[i].unwrap(), label[i]);
    }
    for (c, p) in &pieces {
        let ok = bin_ok.entry(comp_bin[c]).or_insert(true);
        *ok &= p.len() == 1;
    }
    bin_ok.into_iter().filter(|(_, ok)| *ok).map(|(b, _)| b).collect()
}
