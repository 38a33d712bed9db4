//! Exact clipping of tetrahedra and triangles against range-space bins.
//!
//! Every field is linear on a simplex, so each bin constraint
//! `lo_k ≤ f_k ≤ hi_k` is a pair of half-spaces. Clipping works in
//! barycentric coordinates: a constraint is the linear form `a·λ ≥ 0` with
//! `a_i = f_k(v_i) − lo_k` (or `hi_k − f_k(v_i)`). A clipped tetrahedron is
//! carried as a list of (possibly degenerate) sub-tetrahedra, so flat or
//! point-like fragments survive with zero volume.

use crate::mesh::{signed_volume, Tetrahedron};
use crate::quantize::{BinIndex, RangeQuantization};

/// Tolerance on plane-side tests, relative to the magnitude of the bound.
pub const EPS_GEOM: f64 = 1e-12;

pub(crate) type Bary4 = [f64; 4];
pub(crate) type SubTet = [Bary4; 4];

/// A non-empty piece of one tetrahedron whose field values lie in one bin.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentCell {
    pub tet: usize,
    pub bin: BinIndex,
    /// Simplicial decomposition of the fragment polytope, in world coordinates.
    pub pieces: Vec<[[f64; 3]; 4]>,
    pub volume: f64,
}

impl FragmentCell {
    /// Distinct vertices of the decomposition (the polytope's vertices plus
    /// any interior split points introduced by the decomposition).
    pub fn points(&self) -> Vec<[f64; 3]> {
        let mut out: Vec<[f64; 3]> = Vec::new();
        for p in self.pieces.iter().flatten() {
            if !out.iter().any(|q| q == p) {
                out.push(*p);
            }
        }
        out
    }
}

#[inline]
fn eps_for(bound: f64) -> f64 {
    EPS_GEOM * bound.abs().max(1.0)
}

#[inline]
fn lerp4(a: &Bary4, b: &Bary4, t: f64) -> Bary4 {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
        a[3] + t * (b[3] - a[3]),
    ]
}

#[inline]
fn dot4(a: &[f64; 4], b: &Bary4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Point on segment `in → out` where the linear form crosses zero.
#[inline]
fn crossing(pin: &Bary4, sin: f64, pout: &Bary4, sout: f64) -> Bary4 {
    let sin = sin.max(0.0);
    let t = sin / (sin - sout);
    lerp4(pin, pout, t)
}

/// Clips each sub-tetrahedron in `src` by `a·λ ≥ −eps`, appending the kept
/// pieces to `dst`.
pub(crate) fn clip_subtets(src: &[SubTet], a: &[f64; 4], eps: f64, dst: &mut Vec<SubTet>) {
    for tet in src {
        let s = tet.map(|p| dot4(a, &p));
        let mut ins = [0usize; 4];
        let mut outs = [0usize; 4];
        let (mut ni, mut no) = (0, 0);
        for i in 0..4 {
            if s[i] >= -eps {
                ins[ni] = i;
                ni += 1;
            } else {
                outs[no] = i;
                no += 1;
            }
        }
        match ni {
            4 => dst.push(*tet),
            0 => {}
            1 => {
                let i = ins[0];
                let p = |o: usize| crossing(&tet[i], s[i], &tet[o], s[o]);
                dst.push([tet[i], p(outs[0]), p(outs[1]), p(outs[2])]);
            }
            3 => {
                let o = outs[0];
                let (a0, b0, c0) = (ins[0], ins[1], ins[2]);
                let p = |i: usize| crossing(&tet[i], s[i], &tet[o], s[o]);
                let (a1, b1, c1) = (p(a0), p(b0), p(c0));
                let (a0, b0, c0) = (tet[a0], tet[b0], tet[c0]);
                dst.push([a0, b0, c0, a1]);
                dst.push([b0, c0, a1, b1]);
                dst.push([c0, a1, b1, c1]);
            }
            2 => {
                let (i1, i2) = (ins[0], ins[1]);
                let (o1, o2) = (outs[0], outs[1]);
                let p = |i: usize, o: usize| crossing(&tet[i], s[i], &tet[o], s[o]);
                let (a, a1, a2) = (tet[i1], p(i1, o1), p(i1, o2));
                let (b, b1, b2) = (tet[i2], p(i2, o1), p(i2, o2));
                dst.push([a, a1, a2, b]);
                dst.push([a1, a2, b, b1]);
                dst.push([a2, b, b1, b2]);
            }
            _ => unreachable!(),
        }
    }
}

/// Reusable buffers for the hot clipping loop.
#[derive(Default)]
pub(crate) struct ClipScratch {
    cur: Vec<SubTet>,
    next: Vec<SubTet>,
}

impl ClipScratch {
    pub(crate) fn current(&self) -> &[SubTet] {
        &self.cur
    }
}

const IDENTITY: SubTet = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

/// Clips a tetrahedron with per-field vertex `values` against the closed box
/// `intervals`. Returns `None` when empty or when the fragment lies entirely
/// on a shared lower edge (it then belongs to the bin below). On success the
/// surviving sub-tetrahedra are left in `scratch.cur`.
pub(crate) fn clip_tet_box(
    values: &[[f64; 4]],
    intervals: &[(f64, f64)],
    lower_shared: &[bool],
    scratch: &mut ClipScratch,
) -> Option<()> {
    scratch.cur.clear();
    scratch.cur.push(IDENTITY);
    for (f, &(lo, hi)) in values.iter().zip(intervals) {
        let fmin = f.iter().copied().fold(f64::INFINITY, f64::min);
        let fmax = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if fmin < lo {
            let a = f.map(|v| v - lo);
            scratch.next.clear();
            clip_subtets(&scratch.cur, &a, eps_for(lo), &mut scratch.next);
            std::mem::swap(&mut scratch.cur, &mut scratch.next);
        }
        if fmax > hi {
            let a = f.map(|v| hi - v);
            scratch.next.clear();
            clip_subtets(&scratch.cur, &a, eps_for(hi), &mut scratch.next);
            std::mem::swap(&mut scratch.cur, &mut scratch.next);
        }
        if scratch.cur.is_empty() {
            return None;
        }
    }
    for ((f, &(lo, _)), &shared) in values.iter().zip(intervals).zip(lower_shared) {
        if !shared {
            continue;
        }
        let top = scratch
            .cur
            .iter()
            .flatten()
            .map(|p| dot4(f, p))
            .fold(f64::NEG_INFINITY, f64::max);
        if top <= lo + eps_for(lo) {
            return None;
        }
    }
    Some(())
}

pub(crate) fn subtets_volume(subtets: &[SubTet], pos: &[[f64; 3]; 4]) -> f64 {
    subtets
        .iter()
        .map(|st| signed_volume(&st.map(|l| to_world(&l, pos))).abs())
        .sum()
}

#[inline]
fn to_world(l: &Bary4, pos: &[[f64; 3]; 4]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (w, p) in l.iter().zip(pos) {
        for a in 0..3 {
            out[a] += w * p[a];
        }
    }
    out
}

/// The part of `tet` whose field values fall in `bin`, or `None` if empty.
pub fn clip_tet_by_bin(
    tet: &Tetrahedron,
    tet_id: usize,
    bin: &BinIndex,
    quant: &RangeQuantization,
) -> Option<FragmentCell> {
    assert_eq!(tet.values.len(), quant.arity(), "tet arity differs from quantization");
    let intervals = quant.bin_box(bin);
    let shared: Vec<bool> = bin
        .0
        .iter()
        .enumerate()
        .map(|(k, &j)| quant.lower_edge_shared(k, j))
        .collect();
    let mut scratch = ClipScratch::default();
    clip_tet_box(&tet.values, &intervals, &shared, &mut scratch)?;
    let pieces: Vec<[[f64; 3]; 4]> = scratch
        .cur
        .iter()
        .map(|st| st.map(|l| to_world(&l, &tet.positions)))
        .collect();
    let volume = subtets_volume(&scratch.cur, &tet.positions);
    Some(FragmentCell {
        tet: tet_id,
        bin: bin.clone(),
        pieces,
        volume,
    })
}

#[inline]
fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn clip_polygon(poly: &[[f64; 3]], a: &[f64; 3], eps: f64, out: &mut Vec<[f64; 3]>) {
    out.clear();
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = dot3(a, &p);
        let sq = dot3(a, &q);
        let pin = sp >= -eps;
        let qin = sq >= -eps;
        if pin {
            out.push(p);
        }
        if pin != qin {
            let (pi, si, po, so) = if pin { (p, sp, q, sq) } else { (q, sq, p, sp) };
            let si = si.max(0.0);
            let t = si / (si - so);
            out.push([
                pi[0] + t * (po[0] - pi[0]),
                pi[1] + t * (po[1] - pi[1]),
                pi[2] + t * (po[2] - pi[2]),
            ]);
        }
    }
}

/// Whether the closed bin box meets a triangle with per-field vertex values.
pub(crate) fn triangle_meets_box(values: &[[f64; 3]], intervals: &[(f64, f64)]) -> bool {
    let mut poly = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut next = Vec::with_capacity(8);
    for (f, &(lo, hi)) in values.iter().zip(intervals) {
        let fmin = f.iter().copied().fold(f64::INFINITY, f64::min);
        let fmax = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if fmax < lo - eps_for(lo) || fmin > hi + eps_for(hi) {
            return false;
        }
        if fmin < lo {
            clip_polygon(&poly, &f.map(|v| v - lo), eps_for(lo), &mut next);
            std::mem::swap(&mut poly, &mut next);
        }
        if fmax > hi {
            clip_polygon(&poly, &f.map(|v| hi - v), eps_for(hi), &mut next);
            std::mem::swap(&mut poly, &mut next);
        }
        if poly.is_empty() {
            return false;
        }
    }
    true
}

/// Whether the part of a shared facet whose values lie in the closed box of
/// `bin` is non-empty. `values[k]` holds field `k` at the three corners.
pub fn facet_feasible(values: &[[f64; 3]], bin: &BinIndex, quant: &RangeQuantization) -> bool {
    triangle_meets_box(values, &quant.bin_box(bin))
}
