//! Grid, field, frame and series data model.
//!
//! Vertex arrays are stored x-fastest, then y, then z. All types are
//! immutable once constructed and validated.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A regular 3-D vertex lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    dims: [usize; 3],
    origin: [f64; 3],
    spacing: [f64; 3],
}

impl GridDomain {
    pub fn new(dims: [usize; 3], origin: [f64; 3], spacing: [f64; 3]) -> Result<Self> {
        if dims.iter().any(|&n| n < 2) {
            return Err(Error::InvalidGrid(format!(
                "every dimension needs at least 2 vertices, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be finite and positive, got {spacing:?}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite origin {origin:?}")));
        }
        Ok(Self {
            dims,
            origin,
            spacing,
        })
    }

    /// Grid whose corner vertices sit exactly on the box `[lo, hi]`.
    pub fn spanning(dims: [usize; 3], lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        let mut spacing = [0.0; 3];
        for a in 0..3 {
            if dims[a] < 2 {
                return Err(Error::InvalidGrid(format!(
                    "every dimension needs at least 2 vertices, got {dims:?}"
                )));
            }
            spacing[a] = (hi[a] - lo[a]) / (dims[a] - 1) as f64;
        }
        Self::new(dims, lo, spacing)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn vertex_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn cell_count(&self) -> usize {
        (self.dims[0] - 1) * (self.dims[1] - 1) * (self.dims[2] - 1)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let i = index % self.dims[0];
        let rest = index / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
            self.origin[2] + k as f64 * self.spacing[2],
        ]
    }

    #[inline]
    pub fn vertex_position(&self, index: usize) -> [f64; 3] {
        let [i, j, k] = self.coords(index);
        self.position(i, j, k)
    }

    /// Upper corner of the sampled box.
    pub fn extent(&self) -> [f64; 3] {
        let [nx, ny, nz] = self.dims;
        self.position(nx - 1, ny - 1, nz - 1)
    }

    /// Volume of the sampled box.
    pub fn volume(&self) -> f64 {
        (0..3)
            .map(|a| (self.dims[a] - 1) as f64 * self.spacing[a])
            .product()
    }

    /// Same lattice shape (dims and spacing); origins may differ.
    pub fn same_shape(&self, other: &GridDomain) -> bool {
        self.dims == other.dims && self.spacing == other.spacing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    name: String,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidField {
                name,
                reason: "empty name".into(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: name, index });
        }
        Ok(Self { name, values })
    }

    /// Samples `f` at every vertex of `grid`.
    pub fn from_fn(
        name: impl Into<String>,
        grid: &GridDomain,
        f: impl Fn([f64; 3]) -> f64,
    ) -> Result<Self> {
        let values = (0..grid.vertex_count())
            .map(|v| f(grid.vertex_position(v)))
            .collect();
        Self::new(name, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// `r` scalar fields on one shared grid at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct MultifieldFrame {
    grid: GridDomain,
    fields: Vec<ScalarField>,
    time_index: i64,
}

impl MultifieldFrame {
    pub fn new(grid: GridDomain, fields: Vec<ScalarField>, time_index: i64) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidFrame("a frame needs at least one field".into()));
        }
        let n = grid.vertex_count();
        let mut seen = HashSet::new();
        for f in &fields {
            if f.values.len() != n {
                return Err(Error::InvalidField {
                    name: f.name.clone(),
                    reason: format!("{} values for a grid of {} vertices", f.values.len(), n),
                });
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidFrame(format!("duplicate field name `{}`", f.name)));
            }
        }
        Ok(Self {
            grid,
            fields,
            time_index,
        })
    }

    pub fn grid(&self) -> &GridDomain {
        &self.grid
    }

    pub fn fields(&self) -> &[ScalarField] {
        &self.fields
    }

    pub fn field(&self, k: usize) -> &ScalarField {
        &self.fields[k]
    }

    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn time_index(&self) -> i64 {
        self.time_index
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.name()).collect()
    }

    /// Per-field exact `(min, max)` over the vertex samples.
    pub fn range_box(&self) -> Vec<(f64, f64)> {
        self.fields.iter().map(ScalarField::min_max).collect()
    }

    /// A frame restricted to the named fields, in the given order.
    pub fn select_fields<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidFrame("empty field selection".into()));
        }
        let fields = names
            .iter()
            .map(|n| {
                self.fields
                    .iter()
                    .find(|f| f.name == n.as_ref())
                    .cloned()
                    .ok_or_else(|| {
                        Error::InvalidFrame(format!("no field named `{}`", n.as_ref()))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.grid.clone(), fields, self.time_index)
    }
}

/// Free-function form of [`MultifieldFrame::range_box`].
pub fn field_range_box(frame: &MultifieldFrame) -> Vec<(f64, f64)> {
    frame.range_box()
}

/// An ordered time series of frames sharing field layout and lattice shape.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    frames: Vec<MultifieldFrame>,
    site_labels: Option<Vec<String>>,
}

impl FrameSeries {
    pub fn new(frames: Vec<MultifieldFrame>, site_labels: Option<Vec<String>>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::TooFewFrames(frames.len()));
        }
        let first = &frames[0];
        let names = first.field_names();
        for (t, f) in frames.iter().enumerate().skip(1) {
            if f.arity() != first.arity() {
                return Err(Error::SeriesMismatch(format!(
                    "frame {t} has {} fields, frame 0 has {}",
                    f.arity(),
                    first.arity()
                )));
            }
            if f.field_names() != names {
                return Err(Error::SeriesMismatch(format!(
                    "frame {t} field order {:?} differs from {:?}",
                    f.field_names(),
                    names
                )));
            }
            if !f.grid.same_shape(&first.grid) {
                return Err(Error::SeriesMismatch(format!(
                    "frame {t} grid dims/spacing differ from frame 0"
                )));
            }
        }
        if let Some(labels) = &site_labels {
            if labels.len() != frames.len() {
                return Err(Error::SeriesMismatch(format!(
                    "{} site labels for {} frames",
                    labels.len(),
                    frames.len()
                )));
            }
        }
        Ok(Self {
            frames,
            site_labels,
        })
    }

    pub fn frames(&self) -> &[MultifieldFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.frames[0].arity()
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.frames[0].field_names()
    }

    pub fn site_labels(&self) -> Option<&[String]> {
        self.site_labels.as_deref()
    }

    /// Label of frame `t`: the explicit label if present, else its time index.
    pub fn label(&self, t: usize) -> String {
        match &self.site_labels {
            Some(l) => l[t].clone(),
            None => self.frames[t].time_index().to_string(),
        }
    }

    pub fn select_fields<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let frames = self
            .frames
            .iter()
            .map(|f| f.select_fields(names))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, self.site_labels.clone())
    }

    /// Per-field union of the frame ranges.
    pub fn range_union(&self) -> Vec<(f64, f64)> {
        let mut acc = vec![(f64::INFINITY, f64::NEG_INFINITY); self.arity()];
        for f in &self.frames {
            for (a, (lo, hi)) in acc.iter_mut().zip(f.range_box()) {
                a.0 = a.0.min(lo);
                a.1 = a.1.max(hi);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridDomain {
        GridDomain::spanning([4, 3, 2], [0.0; 3], [3.0, 2.0, 1.0]).unwrap()
    }

    #[test]
    fn index_roundtrip_is_x_fastest() {
        let g = grid();
        assert_eq!(g.index(1, 0, 0), 1);
        assert_eq!(g.index(0, 1, 0), 4);
        assert_eq!(g.index(0, 0, 1), 12);
        for v in 0..g.vertex_count() {
            let [i, j, k] = g.coords(v);
            assert_eq!(g.index(i, j, k), v);
        }
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridDomain::new([1, 2, 2], [0.0; 3], [1.0; 3]).is_err());
        assert!(GridDomain::new([2, 2, 2], [0.0; 3], [1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn constant_field_range() {
        let g = grid();
        let f = ScalarField::from_fn("c", &g, |_| 3.25).unwrap();
        let frame = MultifieldFrame::new(g, vec![f], 0).unwrap();
        assert_eq!(field_range_box(&frame), vec![(3.25, 3.25)]);
    }

    #[test]
    fn height_field_range_on_box() {
        let g = GridDomain::spanning([20; 3], [-5.5; 3], [4.5; 3]).unwrap();
        let f = ScalarField::from_fn("z", &g, |p| p[2]).unwrap();
        let frame = MultifieldFrame::new(g, vec![f], 0).unwrap();
        let (lo, hi) = frame.range_box()[0];
        assert_eq!(lo, -5.5);
        assert!((hi - 4.5).abs() < 1e-12);
    }

    #[test]
    fn frame_validation() {
        let g = grid();
        let a = ScalarField::from_fn("a", &g, |p| p[0]).unwrap();
        let short = ScalarField::new("b", vec![0.0; 3]).unwrap();
        assert!(MultifieldFrame::new(g.clone(), vec![a.clone(), short], 0).is_err());
        assert!(MultifieldFrame::new(g.clone(), vec![a.clone(), a.clone()], 0).is_err());
        assert!(MultifieldFrame::new(g, vec![], 0).is_err());
        assert!(ScalarField::new("n", vec![f64::NAN]).is_err());
    }

    #[test]
    fn series_needs_two_frames() {
        let g = grid();
        let a = ScalarField::from_fn("a", &g, |p| p[0]).unwrap();
        let f = MultifieldFrame::new(g, vec![a], 0).unwrap();
        let err = FrameSeries::new(vec![f], None).unwrap_err();
        assert!(err.to_string().contains("series needs ≥ 2 frames"));
    }
}
