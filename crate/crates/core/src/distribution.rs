//! Probability mass functions over the dense bin spectrum.

use crate::error::{Error, Result};
use crate::extract::FiberComponentHistogram;
use crate::quantize::{BinIndex, RangeQuantization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PmfMode {
    /// Component counts per bin.
    #[default]
    Count,
    /// Fragment volume per bin.
    Measure,
}

impl std::str::FromStr for PmfMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Self::Count),
            "measure" => Ok(Self::Measure),
            _ => Err(Error::InvalidParameter(format!(
                "mode must be `count` or `measure`, got `{s}`"
            ))),
        }
    }
}

/// A pmf defined on every bin of its quantization, with singular flags.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberDistribution {
    quantization: RangeQuantization,
    pmf: Vec<f64>,
    singular: Vec<bool>,
    mode: PmfMode,
}

impl FiberDistribution {
    /// Normalizes `weights` (dense, flat-indexed) into a pmf.
    pub fn from_weights(
        quantization: RangeQuantization,
        weights: Vec<f64>,
        singular: Vec<bool>,
        mode: PmfMode,
    ) -> Result<Self> {
        let m = quantization.total_bins();
        if weights.len() != m || singular.len() != m {
            return Err(Error::InvalidParameter(format!(
                "expected {m} bins, got {} weights and {} flags",
                weights.len(),
                singular.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidParameter(format!("bad bin weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let pmf = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            quantization,
            pmf,
            singular,
            mode,
        })
    }

    pub fn quantization(&self) -> &RangeQuantization {
        &self.quantization
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn singular(&self) -> &[bool] {
        &self.singular
    }

    pub fn mode(&self) -> PmfMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    pub fn prob(&self, bin: &BinIndex) -> f64 {
        self.pmf[self.quantization.flat_index(bin)]
    }

    /// Same pmf with different singular flags.
    pub fn with_singular(mut self, singular: Vec<bool>) -> Result<Self> {
        if singular.len() != self.pmf.len() {
            return Err(Error::InvalidParameter("singular flag count mismatch".into()));
        }
        self.singular = singular;
        Ok(self)
    }

    pub fn same_spectrum(&self, other: &Self) -> bool {
        self.quantization == other.quantization
    }
}

pub fn to_distribution(hist: &FiberComponentHistogram, mode: PmfMode) -> Result<FiberDistribution> {
    let q = hist.quantization().clone();
    let m = q.total_bins();
    let mut weights = vec![0.0; m];
    let mut singular = vec![false; m];
    for (&flat, s) in hist.occupied_flat() {
        weights[flat] = match mode {
            PmfMode::Count => s.count as f64,
            PmfMode::Measure => s.measure,
        };
        singular[flat] = s.singular;
    }
    FiberDistribution::from_weights(q, weights, singular, mode)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale
}

/// Union edge sequence of one field, or an error when bins do not coincide.
fn union_edges(a: &[f64], b: &[f64], k: usize) -> Result<Vec<f64>> {
    if a == b {
        return Ok(a.to_vec());
    }
    let width = |e: &[f64]| {
        let w = e[1] - e[0];
        e.windows(2).all(|p| close(p[1] - p[0], w, w)).then_some(w)
    };
    let (Some(wa), Some(wb)) = (width(a), width(b)) else {
        return Err(Error::IncompatibleSpectra(format!(
            "field {k}: non-uniform edges differ"
        )));
    };
    if !close(wa, wb, wa) {
        return Err(Error::IncompatibleSpectra(format!(
            "field {k}: bin widths {wa} and {wb} differ"
        )));
    }
    let shift = (b[0] - a[0]) / wa;
    if !close(shift, shift.round(), 1.0) {
        return Err(Error::IncompatibleSpectra(format!(
            "field {k}: edges offset by a non-integer number of bins"
        )));
    }
    // keep original edge values; fill gaps between disjoint ranges
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for e in all {
        match out.last() {
            Some(&last) if close(e, last, wa) => {}
            Some(&last) => {
                let steps = ((e - last) / wa).round() as usize;
                for s in 1..steps {
                    out.push(last + s as f64 * wa);
                }
                out.push(e);
            }
            None => out.push(e),
        }
    }
    Ok(out)
}

fn offset_in(union: &[f64], first: f64) -> usize {
    let w = union[1] - union[0];
    union
        .iter()
        .position(|&e| close(e, first, w))
        .expect("edge present in union")
}

fn reindex(d: &FiberDistribution, target: &RangeQuantization, offsets: &[usize]) -> FiberDistribution {
    let m = target.total_bins();
    let mut pmf = vec![0.0; m];
    let mut singular = vec![false; m];
    for flat in 0..d.pmf.len() {
        let BinIndex(mut idx) = d.quantization.unflatten(flat);
        for (j, o) in idx.iter_mut().zip(offsets) {
            *j += o;
        }
        let to = target.flat_index(&BinIndex(idx));
        pmf[to] = d.pmf[flat];
        singular[to] = d.singular[flat];
    }
    FiberDistribution {
        quantization: target.clone(),
        pmf,
        singular,
        mode: d.mode,
    }
}

/// Re-indexes both distributions onto the union spectrum, zero-padding.
pub fn align_distributions(
    a: &FiberDistribution,
    b: &FiberDistribution,
) -> Result<(FiberDistribution, FiberDistribution)> {
    if a.same_spectrum(b) {
        return Ok((a.clone(), b.clone()));
    }
    let (qa, qb) = (&a.quantization, &b.quantization);
    if qa.arity() != qb.arity() {
        return Err(Error::IncompatibleSpectra(format!(
            "arity {} vs {}",
            qa.arity(),
            qb.arity()
        )));
    }
    let edges = (0..qa.arity())
        .map(|k| union_edges(qa.edges(k), qb.edges(k), k))
        .collect::<Result<Vec<_>>>()?;
    let offs = |q: &RangeQuantization| -> Vec<usize> {
        (0..q.arity()).map(|k| offset_in(&edges[k], q.edges(k)[0])).collect()
    };
    let (oa, ob) = (offs(qa), offs(qb));
    let target = RangeQuantization::new(edges)?;
    Ok((reindex(a, &target, &oa), reindex(b, &target, &ob)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(edges: Vec<f64>, w: Vec<f64>) -> FiberDistribution {
        let q = RangeQuantization::new(vec![edges]).unwrap();
        let n = w.len();
        FiberDistribution::from_weights(q, w, vec![false; n], PmfMode::Count).unwrap()
    }

    #[test]
    fn equal_counts_give_halves() {
        let d = dist(vec![0.0, 1.0, 2.0], vec![2.0, 2.0]);
        assert_eq!(d.pmf(), &[0.5, 0.5]);
    }

    #[test]
    fn zero_total_is_error() {
        let q = RangeQuantization::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            FiberDistribution::from_weights(q, vec![0.0], vec![false], PmfMode::Count),
            Err(Error::EmptyDistribution)
        ));
    }

    #[test]
    fn scale_free() {
        let a = dist(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 3.0, 5.0]);
        let b = dist(vec![0.0, 1.0, 2.0, 3.0], vec![2.0, 6.0, 10.0]);
        assert_eq!(a.pmf(), b.pmf());
    }

    #[test]
    fn align_overlapping_ranges() {
        let e = |lo: i32, hi: i32| (lo..=hi).map(f64::from).collect::<Vec<_>>();
        let a = dist(e(0, 5), vec![1.0; 5]);
        let b = dist(e(2, 7), vec![1.0, 0.0, 0.0, 0.0, 1.0]);
        let (a2, b2) = align_distributions(&a, &b).unwrap();
        assert_eq!(a2.quantization().edges(0), e(0, 7).as_slice());
        assert_eq!(a2.pmf(), &[0.2, 0.2, 0.2, 0.2, 0.2, 0.0, 0.0]);
        assert_eq!(b2.pmf(), &[0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5]);
        let (a3, b3) = align_distributions(&a2, &b2).unwrap();
        assert_eq!((a3, b3), (a2, b2));
    }

    #[test]
    fn align_fills_gap_between_disjoint_ranges() {
        let a = dist(vec![0.0, 1.0], vec![1.0]);
        let b = dist(vec![3.0, 4.0], vec![1.0]);
        let (a2, b2) = align_distributions(&a, &b).unwrap();
        assert_eq!(a2.quantization().edges(0), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(b2.pmf(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn misaligned_offsets_rejected() {
        let a = dist(vec![0.0, 1.0, 2.0], vec![1.0, 1.0]);
        let b = dist(vec![0.5, 1.5, 2.5], vec![1.0, 1.0]);
        assert!(matches!(
            align_distributions(&a, &b),
            Err(Error::IncompatibleSpectra(_))
        ));
        let c = dist(vec![0.0, 2.0, 4.0], vec![1.0, 1.0]);
        assert!(align_distributions(&a, &c).is_err());
    }
}
