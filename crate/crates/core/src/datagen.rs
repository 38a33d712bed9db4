//! Deterministic synthetic series.
//!
//! * Translated paraboloid: a fixed pair of fields `(z, x² + y² − z)` sampled
//!   on a box that slides by `step` along all three axes per site.
//! * Separating blobs: two unit Gaussians moving apart, paired with the height
//!   field, with a known first site at which the blob splits.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{FrameSeries, GridDomain, MultifieldFrame, ScalarField};

/// Isovalue whose superlevel set defines the blob split.
pub const SPLIT_ISOVALUE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ParaboloidParams {
    /// Lower corner of the site-0 box on every axis.
    pub box_lo: f64,
    /// Edge length of the cubic box.
    pub box_size: f64,
}

impl Default for ParaboloidParams {
    fn default() -> Self {
        Self {
            box_lo: -5.5,
            box_size: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobParams {
    /// Blob centers at the first site.
    pub centers_start: [[f64; 3]; 2],
    /// Blob centers at the last site.
    pub centers_end: [[f64; 3]; 2],
    pub sigma: f64,
    /// Cubic domain `[lo, hi]³`.
    pub domain: (f64, f64),
}

impl Default for BlobParams {
    fn default() -> Self {
        Self {
            centers_start: [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            centers_end: [[-1.8, 0.0, 0.0], [1.8, 0.0, 0.0]],
            sigma: 1.2,
            domain: (-4.5, 4.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticKind {
    TranslatedParaboloid(ParaboloidParams),
    SeparatingBlobs(BlobParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub dims: [usize; 3],
    /// Per-site translation (paraboloid only).
    pub step: f64,
    pub n_sites: usize,
}

impl SyntheticSpec {
    pub fn translated_paraboloid() -> Self {
        Self {
            kind: SyntheticKind::TranslatedParaboloid(ParaboloidParams::default()),
            dims: [20; 3],
            step: 0.05,
            n_sites: 21,
        }
    }

    pub fn separating_blobs() -> Self {
        Self {
            kind: SyntheticKind::SeparatingBlobs(BlobParams::default()),
            dims: [16; 3],
            step: 0.05,
            n_sites: 21,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!("n_sites must be ≥ 2, got {}", self.n_sites)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidSpec(format!("step must be > 0, got {}", self.step)));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidSpec(format!("dims must be ≥ 2, got {:?}", self.dims)));
        }
        match &self.kind {
            SyntheticKind::TranslatedParaboloid(p) => {
                if !(p.box_size > 0.0 && p.box_size.is_finite() && p.box_lo.is_finite()) {
                    return Err(Error::InvalidSpec("paraboloid box must be finite and non-empty".into()));
                }
            }
            SyntheticKind::SeparatingBlobs(b) => {
                if !(b.sigma > 0.0 && b.sigma.is_finite()) {
                    return Err(Error::InvalidSpec(format!("σ must be > 0, got {}", b.sigma)));
                }
                if !(b.domain.0 < b.domain.1) {
                    return Err(Error::InvalidSpec("blob domain must satisfy lo < hi".into()));
                }
                if b.centers_start == b.centers_end && b.centers_start[0] == b.centers_start[1] {
                    return Err(Error::InvalidSpec(
                        "blob centers coincide at every site; no split can occur".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A generated series plus, for blobs, the first site whose superlevel set
/// `{field 1 ≥ 0.5}` has two components.
#[derive(Debug, Clone)]
pub struct SyntheticSeries {
    pub series: FrameSeries,
    pub split_site: Option<usize>,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticSeries> {
    match spec.kind {
        SyntheticKind::TranslatedParaboloid(_) => Ok(SyntheticSeries {
            series: gen_translated_paraboloid(spec)?,
            split_site: None,
        }),
        SyntheticKind::SeparatingBlobs(_) => gen_separating_blobs(spec),
    }
}

fn labels(n: usize) -> Option<Vec<String>> {
    Some((0..n).map(|k| k.to_string()).collect())
}

/// Site `k` samples `[lo + k·step, lo + size + k·step]³` with vertices on the
/// box corners. Fields: `z` and `x² + y² − z`.
pub fn gen_translated_paraboloid(spec: &SyntheticSpec) -> Result<FrameSeries> {
    spec.validate()?;
    let SyntheticKind::TranslatedParaboloid(p) = &spec.kind else {
        return Err(Error::InvalidSpec("expected a translated-paraboloid spec".into()));
    };
    let spacing = [0, 1, 2].map(|a| p.box_size / (spec.dims[a] - 1) as f64);
    let frames = (0..spec.n_sites)
        .map(|k| {
            let lo = p.box_lo + k as f64 * spec.step;
            let grid = GridDomain::new(spec.dims, [lo; 3], spacing)?;
            let f1 = ScalarField::from_fn("z", &grid, |x| x[2])?;
            let f2 = ScalarField::from_fn("paraboloid", &grid, |x| x[0] * x[0] + x[1] * x[1] - x[2])?;
            MultifieldFrame::new(grid, vec![f1, f2], k as i64)
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSeries::new(frames, labels(spec.n_sites))
}

fn blob_value(x: [f64; 3], centers: &[[f64; 3]; 2], sigma: f64) -> f64 {
    centers
        .iter()
        .map(|c| {
            let d2: f64 = (0..3).map(|a| (x[a] - c[a]).powi(2)).sum();
            (-d2 / (sigma * sigma)).exp()
        })
        .sum()
}

fn centers_at(b: &BlobParams, t: f64) -> [[f64; 3]; 2] {
    [0, 1].map(|i| [0, 1, 2].map(|a| b.centers_start[i][a] + t * (b.centers_end[i][a] - b.centers_start[i][a])))
}

/// Fields: the blob sum `blobs` and the height `z`.
pub fn gen_separating_blobs(spec: &SyntheticSpec) -> Result<SyntheticSeries> {
    spec.validate()?;
    let SyntheticKind::SeparatingBlobs(b) = &spec.kind else {
        return Err(Error::InvalidSpec("expected a separating-blobs spec".into()));
    };
    let grid = GridDomain::spanning(spec.dims, [b.domain.0; 3], [b.domain.1; 3])?;
    let mut split_site = None;
    let frames = (0..spec.n_sites)
        .map(|k| {
            let t = k as f64 / (spec.n_sites - 1) as f64;
            let c = centers_at(b, t);
            let f1 = ScalarField::from_fn("blobs", &grid, |x| blob_value(x, &c, b.sigma))?;
            if split_site.is_none()
                && superlevel_components(&grid, f1.values(), SPLIT_ISOVALUE) == 2
            {
                split_site = Some(k);
            }
            let f2 = ScalarField::from_fn("z", &grid, |x| x[2])?;
            MultifieldFrame::new(grid.clone(), vec![f1, f2], k as i64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticSeries {
        series: FrameSeries::new(frames, labels(spec.n_sites))?,
        split_site,
    })
}

/// Components of `{v ≥ iso}` under 6-connected vertex adjacency.
pub fn superlevel_components(grid: &GridDomain, values: &[f64], iso: f64) -> usize {
    let [nx, ny, nz] = grid.dims();
    let mut seen = vec![false; values.len()];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..values.len() {
        if seen[start] || values[start] < iso {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let [i, j, k] = grid.coords(v);
            let mut visit = |i: usize, j: usize, k: usize| {
                let w = grid.index(i, j, k);
                if !seen[w] && values[w] >= iso {
                    seen[w] = true;
                    queue.push_back(w);
                }
            };
            if i > 0 {
                visit(i - 1, j, k);
            }
            if i + 1 < nx {
                visit(i + 1, j, k);
            }
            if j > 0 {
                visit(i, j - 1, k);
            }
            if j + 1 < ny {
                visit(i, j + 1, k);
            }
            if k > 0 {
                visit(i, j, k - 1);
            }
            if k + 1 < nz {
                visit(i, j, k + 1);
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paraboloid_boxes() {
        let s = gen_translated_paraboloid(&SyntheticSpec::translated_paraboloid()).unwrap();
        assert_eq!(s.len(), 21);
        let lo_hi = |t: usize| {
            let g = s.frames()[t].grid();
            (g.origin()[0], g.position(19, 19, 19)[0])
        };
        assert_eq!(lo_hi(0).0, -5.5);
        assert!((lo_hi(0).1 - 4.5).abs() < 1e-12);
        assert!((lo_hi(10).0 + 5.0).abs() < 1e-12);
        assert!((lo_hi(10).1 - 5.0).abs() < 1e-12);
        assert!((lo_hi(20).1 - 5.5).abs() < 1e-12);
    }

    #[test]
    fn height_field_is_exact() {
        let s = gen_translated_paraboloid(&SyntheticSpec::translated_paraboloid()).unwrap();
        let f = &s.frames()[3];
        let g = f.grid();
        let v = f.field(0).values()[g.index(2, 5, 7)];
        assert_eq!(v, g.origin()[2] + 7.0 * g.spacing()[2]);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&SyntheticSpec::separating_blobs()).unwrap();
        let b = generate(&SyntheticSpec::separating_blobs()).unwrap();
        assert_eq!(a.split_site, b.split_site);
        for (x, y) in a.series.frames().iter().zip(b.series.frames()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn coincident_blobs_peak_at_two() {
        let mut spec = SyntheticSpec::separating_blobs();
        spec.dims = [17; 3];
        if let SyntheticKind::SeparatingBlobs(b) = &mut spec.kind {
            b.centers_start = [[0.0; 3]; 2];
        }
        let s = gen_separating_blobs(&spec).unwrap();
        assert_eq!(s.series.frames()[0].field(0).min_max().1, 2.0);
    }

    #[test]
    fn far_blobs_are_two_components() {
        let sigma = 1.0;
        let grid = GridDomain::spanning([25, 9, 9], [-8.0, -2.0, -2.0], [8.0, 2.0, 2.0]).unwrap();
        let c = [[-5.0, 0.0, 0.0], [5.0, 0.0, 0.0]];
        let v = ScalarField::from_fn("b", &grid, |x| blob_value(x, &c, sigma)).unwrap();
        assert_eq!(superlevel_components(&grid, v.values(), 0.5), 2);
    }

    #[test]
    fn split_site_found() {
        let s = gen_separating_blobs(&SyntheticSpec::separating_blobs()).unwrap();
        assert_eq!(s.split_site, Some(10));
    }

    #[test]
    fn degenerate_specs_rejected() {
        let mut s = SyntheticSpec::separating_blobs();
        if let SyntheticKind::SeparatingBlobs(b) = &mut s.kind {
            b.centers_start = [[0.3, 0.0, 0.0]; 2];
            b.centers_end = b.centers_start;
        }
        assert!(matches!(generate(&s), Err(Error::InvalidSpec(_))));
        let mut p = SyntheticSpec::translated_paraboloid();
        p.n_sites = 1;
        assert!(generate(&p).is_err());
        p.n_sites = 3;
        p.step = 0.0;
        assert!(generate(&p).is_err());
    }
}
