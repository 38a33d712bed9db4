//! MFG series format: a JSON manifest plus one headerless raw file per
//! (frame, field), each holding exactly `nx·ny·nz` little-endian binary64
//! values in x-fastest order.
//!
//! ```json
//! { "dims": [nx, ny, nz], "spacing": [dx, dy, dz], "fields": ["f1", "f2"],
//!   "frames": [ { "site": 0, "origin": [x, y, z],
//!                 "data": { "f1": "rel/path.raw", "f2": "rel/path2.raw" } } ] }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::model::{FrameSeries, GridDomain, MultifieldFrame, ScalarField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub fields: Vec<String>,
    pub frames: Vec<ManifestFrame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFrame {
    pub site: i64,
    pub origin: [f64; 3],
    pub data: BTreeMap<String, String>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| Error::Manifest {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Loads and validates a whole series.
pub fn load_series(manifest_path: impl AsRef<Path>) -> Result<FrameSeries> {
    let manifest_path = manifest_path.as_ref();
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let frames = manifest
        .frames
        .iter()
        .enumerate()
        .map(|(t, mf)| load_manifest_frame(&manifest, base, t, mf))
        .collect::<Result<Vec<_>>>()?;
    let labels = manifest.frames.iter().map(|f| f.site.to_string()).collect();
    FrameSeries::new(frames, Some(labels))
}

/// Loads the single frame whose `site` equals `site`.
pub fn load_frame(manifest_path: impl AsRef<Path>, site: i64) -> Result<MultifieldFrame> {
    let manifest_path = manifest_path.as_ref();
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let (t, mf) = manifest
        .frames
        .iter()
        .enumerate()
        .find(|(_, f)| f.site == site)
        .ok_or_else(|| {
            Error::InvalidFrame(format!("site {site} not found in {}", manifest_path.display()))
        })?;
    load_manifest_frame(&manifest, base, t, mf)
}

fn load_manifest_frame(
    manifest: &Manifest,
    base: &Path,
    t: usize,
    mf: &ManifestFrame,
) -> Result<MultifieldFrame> {
    let grid = GridDomain::new(manifest.dims, mf.origin, manifest.spacing)?;
    let n = grid.vertex_count();
    let fields = manifest
        .fields
        .iter()
        .map(|name| {
            let rel = mf.data.get(name).ok_or_else(|| {
                Error::SeriesMismatch(format!("frame {t} (site {}) lacks field `{name}`", mf.site))
            })?;
            let values = read_raw(&base.join(rel), n)?;
            ScalarField::new(name.clone(), values)
        })
        .collect::<Result<Vec<_>>>()?;
    if mf.data.len() != manifest.fields.len() {
        return Err(Error::SeriesMismatch(format!(
            "frame {t} (site {}) lists {} fields, manifest declares {}",
            mf.site,
            mf.data.len(),
            manifest.fields.len()
        )));
    }
    MultifieldFrame::new(grid, fields, mf.site)
}

/// Reads exactly `count` little-endian binary64 values.
pub fn read_raw(path: &Path, count: usize) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let expected = count * 8;
    if bytes.len() != expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected,
            found: bytes.len(),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

pub fn write_raw(path: &Path, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes `series` into `dir` as `series.json` plus raw files, returning the
/// manifest path. Sites come from the frames' time indices.
pub fn save_series(series: &FrameSeries, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let first = &series.frames()[0];
    let names: Vec<String> = series.field_names().iter().map(|s| s.to_string()).collect();
    let mut frames = Vec::with_capacity(series.len());
    for (t, frame) in series.frames().iter().enumerate() {
        let mut data = BTreeMap::new();
        for field in frame.fields() {
            let rel = format!("frame{t:04}_{}.raw", field.name());
            write_raw(&dir.join(&rel), field.values())?;
            data.insert(field.name().to_string(), rel);
        }
        frames.push(ManifestFrame {
            site: frame.time_index(),
            origin: frame.grid().origin(),
            data,
        });
    }
    let manifest = Manifest {
        dims: first.grid().dims(),
        spacing: first.grid().spacing(),
        fields: names,
        frames,
    };
    let path = dir.join("series.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|source| Error::Manifest {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(path)
}

/// Splits a `manifest#site` reference.
pub fn parse_frame_ref(s: &str) -> Result<(PathBuf, i64)> {
    let (path, site) = s
        .rsplit_once('#')
        .ok_or_else(|| Error::InvalidParameter(format!("expected <manifest>#<site>, got `{s}`")))?;
    let site = site
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("site `{site}` is not an integer")))?;
    Ok((PathBuf::from(path), site))
}
