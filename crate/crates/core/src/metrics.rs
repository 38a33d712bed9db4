//! Distances between fiber-component distributions, and the field-space RMS
//! baseline.
//!
//! All distribution metrics require both inputs on the same spectrum (see
//! [`align_distributions`](crate::distribution::align_distributions)). The
//! order `q` is an `f64`; `f64::INFINITY` selects the supremum norm.

use crate::distribution::FiberDistribution;
use crate::error::{Error, Result};
use crate::jacobi::SingularBinSet;
use crate::model::MultifieldFrame;

/// Largest number of bins on which a quadratic-form similarity is evaluated.
pub const QUADRATIC_BIN_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceConfig {
    pub q: f64,
    pub omega: f64,
    pub kl_epsilon: f64,
    pub sigma_a: f64,
    /// Order of the reported Minkowski distance.
    pub minkowski_r: f64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            q: 1.0,
            omega: 13.0,
            kl_epsilon: 1e-9,
            sigma_a: 1.0,
            minkowski_r: 3.0,
        }
    }
}

impl DistanceConfig {
    pub fn validate(&self) -> Result<()> {
        check_order(self.q)?;
        check_order(self.minkowski_r)?;
        check_omega(self.omega)?;
        if !(self.kl_epsilon > 0.0 && self.kl_epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kl epsilon must be > 0, got {}",
                self.kl_epsilon
            )));
        }
        if !(self.sigma_a > 0.0 && self.sigma_a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_A must be > 0, got {}",
                self.sigma_a
            )));
        }
        Ok(())
    }
}

fn check_order(q: f64) -> Result<()> {
    if q >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("order must be ≥ 1, got {q}")))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega >= 1.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("ω must be ≥ 1, got {omega}")))
    }
}

fn check_aligned(a: &FiberDistribution, b: &FiberDistribution) -> Result<()> {
    if a.same_spectrum(b) {
        Ok(())
    } else {
        Err(Error::IncompatibleSpectra(
            "distributions are not on a common spectrum".into(),
        ))
    }
}

/// `(Σ w_x |p_x − p'_x|^q)^{1/q}` with `w_x = omega` where `mask` is set.
fn weighted_lq(pa: &[f64], pb: &[f64], mask: Option<&[bool]>, q: f64, omega: f64) -> f64 {
    if q.is_infinite() {
        return pa
            .iter()
            .zip(pb)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
    }
    let w = |i: usize| match mask {
        Some(m) if m[i] => omega,
        _ => 1.0,
    };
    let terms = pa.iter().zip(pb).enumerate().map(|(i, (x, y))| (i, (x - y).abs()));
    if q == 1.0 {
        terms.map(|(i, d)| w(i) * d).sum()
    } else {
        terms.map(|(i, d)| w(i) * d.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Pointwise `l_q` distance between the pmfs.
pub fn dq(a: &FiberDistribution, b: &FiberDistribution, q: f64) -> Result<f64> {
    check_aligned(a, b)?;
    check_order(q)?;
    Ok(weighted_lq(a.pmf(), b.pmf(), None, q, 1.0))
}

/// Bins flagged singular in either distribution.
pub fn singular_union(a: &FiberDistribution, b: &FiberDistribution) -> Result<SingularBinSet> {
    check_aligned(a, b)?;
    let q = a.quantization();
    let bins = a
        .singular()
        .iter()
        .zip(b.singular())
        .enumerate()
        .filter(|(_, (x, y))| **x || **y)
        .map(|(i, _)| q.unflatten(i));
    SingularBinSet::from_bins(q, bins)
}

/// `l_q` distance with the terms of bins in `s` weighted by `omega`.
///
/// For `q = ∞` the weight has no effect: the limit of the weighted sum
/// as `q → ∞` is the plain supremum.
pub fn dq_singular(
    a: &FiberDistribution,
    b: &FiberDistribution,
    s: &SingularBinSet,
    q: f64,
    omega: f64,
) -> Result<f64> {
    check_aligned(a, b)?;
    check_order(q)?;
    check_omega(omega)?;
    if s.shape() != a.quantization().shape() {
        return Err(Error::IncompatibleSpectra(
            "singular set built for another spectrum".into(),
        ));
    }
    let mask: Vec<bool> = (0..a.len()).map(|i| s.contains_flat(i)).collect();
    Ok(weighted_lq(a.pmf(), b.pmf(), Some(&mask), q, omega))
}

/// `dq_singular` with `S` the union of both distributions' singular flags.
pub fn dq_singular_union(
    a: &FiberDistribution,
    b: &FiberDistribution,
    q: f64,
    omega: f64,
) -> Result<f64> {
    check_aligned(a, b)?;
    check_order(q)?;
    check_omega(omega)?;
    let mask: Vec<bool> = a.singular().iter().zip(b.singular()).map(|(x, y)| *x || *y).collect();
    Ok(weighted_lq(a.pmf(), b.pmf(), Some(&mask), q, omega))
}

pub fn minkowski(a: &FiberDistribution, b: &FiberDistribution, r: f64) -> Result<f64> {
    dq(a, b, r)
}

/// `1 − Σ min(h_i, k_i) / Σ k_i`.
pub fn hist_intersection(a: &FiberDistribution, b: &FiberDistribution) -> Result<f64> {
    check_aligned(a, b)?;
    let common: f64 = a.pmf().iter().zip(b.pmf()).map(|(x, y)| x.min(*y)).sum();
    let total: f64 = b.pmf().iter().sum();
    Ok((1.0 - common / total).max(0.0))
}

/// `Σ h_i log(h_i / k_i)` after replacing each pmf `p` by `(p + ε)/(1 + ε m)`.
pub fn kl_divergence(a: &FiberDistribution, b: &FiberDistribution, epsilon: f64) -> Result<f64> {
    check_aligned(a, b)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kl epsilon must be > 0, got {epsilon}"
        )));
    }
    let norm = 1.0 + epsilon * a.len() as f64;
    let kl: f64 = a
        .pmf()
        .iter()
        .zip(b.pmf())
        .map(|(x, y)| {
            let (h, k) = ((x + epsilon) / norm, (y + epsilon) / norm);
            h * (h / k).ln()
        })
        .sum();
    Ok(kl.max(0.0))
}

/// Symmetric bin-similarity matrix with unit diagonal and entries in `[0, 1]`.
///
/// Entries are produced on demand, so only the bins that enter a distance
/// are ever evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum SimilarityMatrix {
    Identity,
    /// `exp(−‖i − j‖² / σ²)` on multi-index distance.
    Gaussian { sigma: f64 },
    /// Explicit dense matrix over flat bin indices.
    Dense { size: usize, entries: Vec<f64> },
}

impl SimilarityMatrix {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self::Gaussian { sigma })
        } else {
            Err(Error::InvalidParameter(format!("σ_A must be > 0, got {sigma}")))
        }
    }

    pub fn dense(size: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::InvalidParameter("similarity matrix is not square".into()));
        }
        for i in 0..size {
            if entries[i * size + i] != 1.0 {
                return Err(Error::InvalidParameter("similarity diagonal must be 1".into()));
            }
            for j in 0..size {
                let v = entries[i * size + j];
                if !(0.0..=1.0).contains(&v) || v != entries[j * size + i] {
                    return Err(Error::InvalidParameter(
                        "similarity must be symmetric with entries in [0, 1]".into(),
                    ));
                }
            }
        }
        Ok(Self::Dense { size, entries })
    }

    fn entry(&self, a: &FiberDistribution, i: usize, j: usize) -> f64 {
        match self {
            Self::Identity => f64::from(u8::from(i == j)),
            Self::Gaussian { sigma } => {
                let q = a.quantization();
                let (bi, bj) = (q.unflatten(i), q.unflatten(j));
                let d2: f64 = bi
                    .0
                    .iter()
                    .zip(&bj.0)
                    .map(|(x, y)| (*x as f64 - *y as f64).powi(2))
                    .sum();
                (-d2 / (sigma * sigma)).exp()
            }
            Self::Dense { size, entries } => entries[i * size + j],
        }
    }
}

/// `√((h − k)ᵀ A (h − k))`.
///
/// Only bins where the pmfs differ contribute; more than
/// [`QUADRATIC_BIN_LIMIT`] such bins is an error for non-identity `A`.
pub fn quadratic_form(
    a: &FiberDistribution,
    b: &FiberDistribution,
    sim: &SimilarityMatrix,
) -> Result<f64> {
    check_aligned(a, b)?;
    if let SimilarityMatrix::Dense { size, .. } = sim {
        if *size != a.len() {
            return Err(Error::IncompatibleSpectra(format!(
                "similarity matrix is {size}×{size}, spectrum has {} bins",
                a.len()
            )));
        }
    }
    let diff: Vec<(usize, f64)> = a
        .pmf()
        .iter()
        .zip(b.pmf())
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, (x, y))| (i, x - y))
        .collect();
    if matches!(sim, SimilarityMatrix::Identity) {
        return Ok(diff.iter().map(|(_, d)| d * d).sum::<f64>().sqrt());
    }
    if diff.len() > QUADRATIC_BIN_LIMIT {
        return Err(Error::SpectrumTooLarge {
            bins: diff.len(),
            limit: QUADRATIC_BIN_LIMIT,
        });
    }
    let mut s = 0.0;
    for (ii, &(i, di)) in diff.iter().enumerate() {
        s += di * di;
        for &(j, dj) in &diff[ii + 1..] {
            s += 2.0 * di * sim.entry(a, i, j) * dj;
        }
    }
    Ok(s.max(0.0).sqrt())
}

/// Root mean square over vertices of the summed squared field differences.
pub fn rms_multifield(fa: &MultifieldFrame, fb: &MultifieldFrame) -> Result<f64> {
    if fa.grid().dims() != fb.grid().dims() || fa.arity() != fb.arity() {
        return Err(Error::SeriesMismatch(format!(
            "frames differ in shape: {:?}×{} vs {:?}×{}",
            fa.grid().dims(),
            fa.arity(),
            fb.grid().dims(),
            fb.arity()
        )));
    }
    let m = fa.grid().vertex_count() as f64;
    let sum: f64 = fa
        .fields()
        .iter()
        .zip(fb.fields())
        .map(|(f, g)| {
            f.values()
                .iter()
                .zip(g.values())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum();
    Ok((sum / m).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    NonNegativity,
    Identity,
    Symmetry,
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomMetric {
    Dq,
    DqSingular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub triple: usize,
    pub metric: AxiomMetric,
    pub kind: AxiomKind,
    /// How far past the tolerance the check failed.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomReport {
    pub triples: usize,
    pub violations: Vec<AxiomViolation>,
    /// Largest `d(a,c) − d(a,b) − d(b,c)` seen; ≤ 0 when the triangle holds.
    pub worst_triangle_margin: f64,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const TRIANGLE_TOLERANCE: f64 = 1e-12;
pub const IDENTITY_TOLERANCE: f64 = 1e-15;

/// Checks the metric axioms of `d_q` and of `d_q^S` at weight `omega` on each
/// triple. For `d_q^S` the singular set is fixed per triple as the union of
/// the three distributions' flags.
pub fn check_metric_axioms(
    samples: &[[FiberDistribution; 3]],
    q: f64,
    omega: f64,
) -> Result<AxiomReport> {
    check_order(q)?;
    check_omega(omega)?;
    let mut report = AxiomReport {
        triples: samples.len(),
        worst_triangle_margin: f64::NEG_INFINITY,
        ..Default::default()
    };
    for (t, triple) in samples.iter().enumerate() {
        check_aligned(&triple[0], &triple[1])?;
        check_aligned(&triple[1], &triple[2])?;
        let mask: Vec<bool> = (0..triple[0].len())
            .map(|i| triple.iter().any(|d| d.singular()[i]))
            .collect();
        for metric in [AxiomMetric::Dq, AxiomMetric::DqSingular] {
            let d = |x: usize, y: usize| {
                let m = (metric == AxiomMetric::DqSingular).then_some(mask.as_slice());
                weighted_lq(triple[x].pmf(), triple[y].pmf(), m, q, omega)
            };
            let mut flag = |kind, margin| {
                report.violations.push(AxiomViolation {
                    triple: t,
                    metric,
                    kind,
                    margin,
                })
            };
            for x in 0..3 {
                let self_d = d(x, x);
                if self_d != 0.0 {
                    flag(AxiomKind::Identity, self_d);
                }
                for y in 0..3 {
                    if x == y {
                        continue;
                    }
                    let (dxy, dyx) = (d(x, y), d(y, x));
                    if dxy < 0.0 || dxy.is_nan() {
                        flag(AxiomKind::NonNegativity, -dxy);
                    }
                    if dxy.to_bits() != dyx.to_bits() {
                        flag(AxiomKind::Symmetry, (dxy - dyx).abs());
                    }
                    let max_diff = triple[x]
                        .pmf()
                        .iter()
                        .zip(triple[y].pmf())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if (max_diff > IDENTITY_TOLERANCE) != (dxy > IDENTITY_TOLERANCE) {
                        flag(AxiomKind::Identity, (max_diff - dxy).abs());
                    }
                    let z = 3 - x - y;
                    let margin = dxy - d(x, z) - d(z, y);
                    report.worst_triangle_margin = report.worst_triangle_margin.max(margin);
                    if margin > TRIANGLE_TOLERANCE {
                        flag(AxiomKind::Triangle, margin);
                    }
                }
            }
        }
    }
    Ok(report)
}
