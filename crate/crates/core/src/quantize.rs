//! Range-space quantization: per-field bin edges and the discrete spectrum.
//!
//! Bins are half-open `[e_j, e_{j+1})` with the last bin closed. Geometric
//! clipping evaluates the closed interval, and anything lying exactly on a
//! shared edge is credited to the lower bin (see [`RangeQuantization::bins_touching`]).

use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::{FrameSeries, MultifieldFrame};

/// A point of the discrete spectrum: one 0-based bin per field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinIndex(pub Vec<usize>);

impl BinIndex {
    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<usize>> for BinIndex {
    fn from(v: Vec<usize>) -> Self {
        BinIndex(v)
    }
}

/// How to partition each field's range.
#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    SlabWidths(Vec<f64>),
    BinCounts(Vec<usize>),
}

impl Binning {
    pub fn arity(&self) -> usize {
        match self {
            Binning::SlabWidths(w) => w.len(),
            Binning::BinCounts(c) => c.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeQuantization {
    edges: Vec<Vec<f64>>,
    strides: Vec<usize>,
}

impl RangeQuantization {
    pub fn new(edges: Vec<Vec<f64>>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidQuantization("no fields".into()));
        }
        for (k, e) in edges.iter().enumerate() {
            if e.len() < 2 {
                return Err(Error::InvalidQuantization(format!(
                    "field {k} needs at least one bin"
                )));
            }
            if e.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidQuantization(format!("field {k} has non-finite edges")));
            }
            if e.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidQuantization(format!(
                    "field {k} edges are not strictly increasing"
                )));
            }
        }
        let mut strides = Vec::with_capacity(edges.len());
        let mut s = 1usize;
        for e in &edges {
            strides.push(s);
            s = s
                .checked_mul(e.len() - 1)
                .ok_or_else(|| Error::InvalidQuantization("spectrum size overflows".into()))?;
        }
        Ok(Self { edges, strides })
    }

    /// Uniform bins of width `width` anchored at `min`, covering `max`.
    pub fn uniform_edges(min: f64, max: f64, width: f64) -> Result<Vec<f64>> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidParameter(format!("slab width must be > 0, got {width}")));
        }
        if max <= min {
            log::warn!("degenerate field range [{min}, {max}]; using a single bin of width {width}");
            return Ok(vec![min, min + width]);
        }
        let mut m = (((max - min) / width).ceil() as usize).max(1);
        while min + m as f64 * width < max {
            m += 1;
        }
        Ok((0..=m).map(|j| min + j as f64 * width).collect())
    }

    /// `count` equal bins spanning exactly `[min, max]`.
    pub fn counted_edges(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::InvalidParameter("bin count must be ≥ 1".into()));
        }
        if max <= min {
            log::warn!("degenerate field range [{min}, {max}]; using a single unit bin");
            return Ok(vec![min, min + 1.0]);
        }
        let w = (max - min) / count as f64;
        let mut e: Vec<f64> = (0..=count).map(|j| min + j as f64 * w).collect();
        e[count] = max;
        Ok(e)
    }

    /// Builds edges over explicit per-field ranges.
    pub fn from_ranges(ranges: &[(f64, f64)], binning: &Binning) -> Result<Self> {
        if binning.arity() != ranges.len() {
            return Err(Error::InvalidParameter(format!(
                "binning given for {} fields, data has {}",
                binning.arity(),
                ranges.len()
            )));
        }
        let edges = ranges
            .iter()
            .enumerate()
            .map(|(k, &(lo, hi))| match binning {
                Binning::SlabWidths(w) => Self::uniform_edges(lo, hi, w[k]),
                Binning::BinCounts(c) => Self::counted_edges(lo, hi, c[k]),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(edges)
    }

    /// One quantization over the union of a frame's ranges.
    pub fn for_frame(frame: &MultifieldFrame, binning: &Binning) -> Result<Self> {
        Self::from_ranges(&frame.range_box(), binning)
    }

    pub fn arity(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self, k: usize) -> &[f64] {
        &self.edges[k]
    }

    pub fn all_edges(&self) -> &[Vec<f64>] {
        &self.edges
    }

    pub fn bins_per_field(&self, k: usize) -> usize {
        self.edges[k].len() - 1
    }

    pub fn shape(&self) -> Vec<usize> {
        (0..self.arity()).map(|k| self.bins_per_field(k)).collect()
    }

    pub fn total_bins(&self) -> usize {
        self.shape().iter().product()
    }

    #[inline]
    pub fn interval(&self, k: usize, j: usize) -> (f64, f64) {
        (self.edges[k][j], self.edges[k][j + 1])
    }

    /// Closed box of a bin.
    pub fn bin_box(&self, bin: &BinIndex) -> Vec<(f64, f64)> {
        bin.0
            .iter()
            .enumerate()
            .map(|(k, &j)| self.interval(k, j))
            .collect()
    }

    pub fn is_valid(&self, bin: &BinIndex) -> bool {
        bin.arity() == self.arity()
            && bin.0.iter().enumerate().all(|(k, &j)| j < self.bins_per_field(k))
    }

    #[inline]
    pub fn flat_index(&self, bin: &BinIndex) -> usize {
        bin.0
            .iter()
            .zip(&self.strides)
            .map(|(&j, &s)| j * s)
            .sum()
    }

    #[inline]
    pub fn unflatten(&self, mut flat: usize) -> BinIndex {
        let shape = self.shape();
        let mut out = Vec::with_capacity(shape.len());
        for m in shape {
            out.push(flat % m);
            flat /= m;
        }
        BinIndex(out)
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Half-open bin lookup for a single value; the last bin is closed.
    pub fn bin_of_value(&self, k: usize, v: f64) -> Option<usize> {
        let e = &self.edges[k];
        let m = e.len() - 1;
        if v < e[0] || v > e[m] {
            return None;
        }
        if v == e[m] {
            return Some(m - 1);
        }
        Some(e.partition_point(|&x| x <= v) - 1)
    }

    pub fn bin_of_point(&self, values: &[f64]) -> Option<BinIndex> {
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| self.bin_of_value(k, v))
            .collect::<Option<Vec<_>>>()
            .map(BinIndex)
    }

    /// Bins of field `k` whose closed interval meets `[lo, hi]`, except that
    /// a range touching a bin only at its shared lower edge belongs to the
    /// bin below.
    pub fn bins_touching(&self, k: usize, lo: f64, hi: f64) -> Range<usize> {
        let e = &self.edges[k];
        let m = e.len() - 1;
        let start = e[1..].partition_point(|&x| x < lo);
        let mut end = e[..m].partition_point(|&x| x < hi);
        if end == 0 && hi >= e[0] {
            end = 1;
        }
        start..end.max(start)
    }

    /// Whether the edge under bin `j` of field `k` is shared with a lower bin.
    #[inline]
    pub fn lower_edge_shared(&self, _k: usize, j: usize) -> bool {
        j > 0
    }

    /// Checks that every field of `frame` lies inside the edges.
    pub fn check_covers(&self, frame: &MultifieldFrame) -> Result<()> {
        if frame.arity() != self.arity() {
            return Err(Error::InvalidQuantization(format!(
                "quantization has {} fields, frame has {}",
                self.arity(),
                frame.arity()
            )));
        }
        for (k, (min, max)) in frame.range_box().into_iter().enumerate() {
            let e = &self.edges[k];
            let (first, last) = (e[0], e[e.len() - 1]);
            if min < first || max > last {
                return Err(Error::Uncovered {
                    field: k,
                    min,
                    max,
                    first,
                    last,
                });
            }
        }
        Ok(())
    }

    /// Uniform width of field `k`, if its edges are evenly spaced.
    pub fn uniform_width(&self, k: usize) -> Option<f64> {
        let e = &self.edges[k];
        let w = (e[e.len() - 1] - e[0]) / (e.len() - 1) as f64;
        let tol = 1e-9 * w.abs().max(e[0].abs()).max(1.0);
        e.windows(2)
            .all(|p| ((p[1] - p[0]) - w).abs() <= tol)
            .then_some(w)
    }
}

/// One shared quantization for the whole series: per-field edges cover the
/// union of all frame ranges, anchored at the global minimum.
pub fn build_quantization(series: &FrameSeries, binning: &Binning) -> Result<RangeQuantization> {
    RangeQuantization::from_ranges(&series.range_union(), binning)
}
