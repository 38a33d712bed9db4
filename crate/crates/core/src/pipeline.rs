//! End-to-end series processing: quantize, extract, mark singular bins,
//! normalize, and compare consecutive frames.

use rayon::prelude::*;

use crate::distribution::{to_distribution, FiberDistribution, PmfMode};
use crate::error::{Error, Result};
use crate::extract::{extract_components, FiberComponentHistogram};
use crate::jacobi::{
    annotate_singular_components, apply_singular_bins, mark_singular_elements_on,
    project_singular_bins_on, JacobiElementSet, SingularBinSet, DEFAULT_TAU,
};
use crate::mesh::TetMesh;
use crate::metrics::{
    dq, dq_singular_union, hist_intersection, kl_divergence, minkowski, quadratic_form,
    rms_multifield, DistanceConfig, SimilarityMatrix,
};
use crate::model::{FrameSeries, MultifieldFrame};
use crate::quantize::{build_quantization, Binning, RangeQuantization};

/// Metrics in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    D1,
    D2,
    Dinf,
    DqS,
    Minkowski,
    Intersection,
    Kl,
    Quadratic,
    Rms,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::D1,
        Metric::D2,
        Metric::Dinf,
        Metric::DqS,
        Metric::Minkowski,
        Metric::Intersection,
        Metric::Kl,
        Metric::Quadratic,
        Metric::Rms,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Metric::D1 => "d1",
            Metric::D2 => "d2",
            Metric::Dinf => "dinf",
            Metric::DqS => "dqS",
            Metric::Minkowski => "minkowski_r",
            Metric::Intersection => "intersection",
            Metric::Kl => "kl",
            Metric::Quadratic => "quadratic",
            Metric::Rms => "rms",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }

    /// Parses `all` or a comma list of column names (`minkowski` is accepted
    /// for `minkowski_r`). The result is sorted and deduplicated.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>> {
        if s.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        let mut out = s
            .split(',')
            .map(|name| {
                let name = name.trim();
                Self::ALL
                    .iter()
                    .copied()
                    .find(|m| m.column() == name || (name == "minkowski" && *m == Metric::Minkowski))
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown metric `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidParameter("empty metric list".into()));
        }
        Ok(out)
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.column())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub binning: Binning,
    pub distance: DistanceConfig,
    pub tau: f64,
    pub mode: PmfMode,
    pub metrics: Vec<Metric>,
}

impl PipelineConfig {
    pub fn new(binning: Binning) -> Self {
        Self {
            binning,
            distance: DistanceConfig::default(),
            tau: DEFAULT_TAU,
            mode: PmfMode::Count,
            metrics: Metric::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distance.validate()?;
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!("τ must be > 0, got {}", self.tau)));
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidParameter("no metrics enabled".into()));
        }
        Ok(())
    }
}

/// Everything computed for one frame.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    /// Histogram with singular flags and per-bin singular component counts.
    pub histogram: FiberComponentHistogram,
    pub jacobi: JacobiElementSet,
    pub singular_bins: SingularBinSet,
    pub distribution: FiberDistribution,
}

pub fn analyze_frame(
    frame: &MultifieldFrame,
    quant: &RangeQuantization,
    mesh: &TetMesh,
    tau: f64,
    mode: PmfMode,
) -> Result<FrameAnalysis> {
    let mut labeling = extract_components(frame, quant, mesh)?;
    let jacobi = mark_singular_elements_on(frame, mesh, tau)?;
    let singular_bins = project_singular_bins_on(&jacobi, frame, mesh, quant)?;
    apply_singular_bins(&mut labeling.histogram, &singular_bins)?;
    annotate_singular_components(&mut labeling, &jacobi, frame, mesh);
    let mut distribution = to_distribution(&labeling.histogram, mode)?;
    // singular bins the histogram leaves empty still weight the distance
    let flags = (0..quant.total_bins())
        .map(|i| singular_bins.contains_flat(i))
        .collect();
    distribution = distribution.with_singular(flags)?;
    Ok(FrameAnalysis {
        histogram: labeling.histogram,
        jacobi,
        singular_bins,
        distribution,
    })
}

/// Series-wide quantization and per-frame analyses, in frame order.
pub fn analyze_series(
    series: &FrameSeries,
    config: &PipelineConfig,
) -> Result<(RangeQuantization, Vec<FrameAnalysis>)> {
    config.validate()?;
    let quant = build_quantization(series, &config.binning)?;
    let mesh = TetMesh::new(series.frames()[0].grid());
    let analyses = series
        .frames()
        .par_iter()
        .map(|f| analyze_frame(f, &quant, &mesh, config.tau, config.mode))
        .collect::<Result<Vec<_>>>()?;
    Ok((quant, analyses))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub pair: usize,
    pub site_a: String,
    pub site_b: String,
    values: [Option<f64>; 9],
}

impl DistanceRow {
    pub fn get(&self, m: Metric) -> Option<f64> {
        self.values[m.slot()]
    }
}

/// One row per consecutive frame pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSeries {
    pub metrics: Vec<Metric>,
    pub rows: Vec<DistanceRow>,
}

impl DistanceSeries {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of `m` in pair order; `None` if the metric is disabled.
    pub fn values(&self, m: Metric) -> Option<Vec<f64>> {
        self.metrics
            .contains(&m)
            .then(|| self.rows.iter().map(|r| r.get(m).expect("enabled")).collect())
    }

    /// First pair index attaining the maximum of `m`.
    pub fn argmax(&self, m: Metric) -> Option<usize> {
        let v = self.values(m)?;
        let mut best = 0;
        for (i, x) in v.iter().enumerate() {
            if *x > v[best] {
                best = i;
            }
        }
        Some(best)
    }
}

/// Distances between consecutive analyses.
pub fn distances_from_analyses(
    series: &FrameSeries,
    analyses: &[FrameAnalysis],
    config: &PipelineConfig,
) -> Result<DistanceSeries> {
    config.validate()?;
    if analyses.len() != series.len() {
        return Err(Error::SeriesMismatch(format!(
            "{} analyses for {} frames",
            analyses.len(),
            series.len()
        )));
    }
    let dc = &config.distance;
    let sim = SimilarityMatrix::gaussian(dc.sigma_a)?;
    let rows = (0..series.len() - 1)
        .into_par_iter()
        .map(|p| {
            let (a, b) = (&analyses[p].distribution, &analyses[p + 1].distribution);
            let mut values = [None; 9];
            for &m in &config.metrics {
                let v = match m {
                    Metric::D1 => dq(a, b, 1.0)?,
                    Metric::D2 => dq(a, b, 2.0)?,
                    Metric::Dinf => dq(a, b, f64::INFINITY)?,
                    Metric::DqS => dq_singular_union(a, b, dc.q, dc.omega)?,
                    Metric::Minkowski => minkowski(a, b, dc.minkowski_r)?,
                    Metric::Intersection => hist_intersection(a, b)?,
                    Metric::Kl => kl_divergence(a, b, dc.kl_epsilon)?,
                    Metric::Quadratic => quadratic_form(a, b, &sim)?,
                    Metric::Rms => rms_multifield(&series.frames()[p], &series.frames()[p + 1])?,
                };
                values[m.slot()] = Some(v);
            }
            Ok(DistanceRow {
                pair: p,
                site_a: series.label(p),
                site_b: series.label(p + 1),
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut metrics = config.metrics.clone();
    metrics.sort();
    metrics.dedup();
    Ok(DistanceSeries { metrics, rows })
}

/// Full pipeline on a series.
pub fn compute_distance_series(series: &FrameSeries, config: &PipelineConfig) -> Result<DistanceSeries> {
    let (_, analyses) = analyze_series(series, config)?;
    distances_from_analyses(series, &analyses, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GridDomain, ScalarField};

    fn frame(t: i64, shift: f64) -> MultifieldFrame {
        let g = GridDomain::spanning([6, 6, 6], [-1.0; 3], [1.0; 3]).unwrap();
        let a = ScalarField::from_fn("a", &g, |p| p[0] * p[0] + p[1] + shift).unwrap();
        let b = ScalarField::from_fn("b", &g, |p| p[2] - p[1]).unwrap();
        MultifieldFrame::new(g, vec![a, b], t).unwrap()
    }

    #[test]
    fn metric_lists() {
        assert_eq!(Metric::parse_list("all").unwrap().len(), 9);
        assert_eq!(
            Metric::parse_list("dqS,d1,dqS").unwrap(),
            vec![Metric::D1, Metric::DqS]
        );
        assert!(Metric::parse_list("d3").is_err());
    }

    #[test]
    fn identical_frames_give_zero_distances() {
        let s = FrameSeries::new(vec![frame(0, 0.0), frame(1, 0.0)], None).unwrap();
        let cfg = PipelineConfig::new(Binning::BinCounts(vec![4, 4]));
        let d = compute_distance_series(&s, &cfg).unwrap();
        assert_eq!(d.len(), 1);
        for m in Metric::ALL {
            assert_eq!(d.rows[0].get(m), Some(0.0), "{m}");
        }
    }

    #[test]
    fn deterministic_rows() {
        let s = FrameSeries::new(vec![frame(0, 0.0), frame(1, 0.3), frame(2, 0.5)], None).unwrap();
        let mut cfg = PipelineConfig::new(Binning::SlabWidths(vec![0.25, 0.25]));
        cfg.mode = PmfMode::Measure;
        let a = compute_distance_series(&s, &cfg).unwrap();
        let b = compute_distance_series(&s, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a.values(Metric::D1).unwrap().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn disabled_metrics_absent() {
        let s = FrameSeries::new(vec![frame(0, 0.0), frame(1, 0.3)], None).unwrap();
        let mut cfg = PipelineConfig::new(Binning::BinCounts(vec![3, 3]));
        cfg.metrics = vec![Metric::Rms];
        let d = compute_distance_series(&s, &cfg).unwrap();
        assert!(d.rows[0].get(Metric::D1).is_none());
        assert!(d.values(Metric::D1).is_none());
        assert!(d.rows[0].get(Metric::Rms).is_some());
    }
}
