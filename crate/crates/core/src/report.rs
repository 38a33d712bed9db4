//! CSV emission. Reals use 17 significant digits in scientific notation so
//! every value round-trips; lines end in `\n`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_err, Result};
use crate::extract::FiberComponentHistogram;
use crate::jacobi::{JacobiElementSet, SingularBinSet};
use crate::pipeline::{DistanceSeries, Metric};
use crate::quantize::RangeQuantization;

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub const DISTANCE_HEADER: &str =
    "pair,site_a,site_b,d1,d2,dinf,dqS,minkowski_r,intersection,kl,quadratic,rms";

/// One row per pair; disabled metrics are empty cells.
pub fn distances_csv(series: &DistanceSeries) -> String {
    let mut out = String::from(DISTANCE_HEADER);
    out.push('\n');
    for row in &series.rows {
        write!(out, "{},{},{}", row.pair, row.site_a, row.site_b).unwrap();
        for m in Metric::ALL {
            out.push(',');
            if let Some(v) = row.get(m) {
                out.push_str(&fmt_real(v));
            }
        }
        out.push('\n');
    }
    out
}

/// Occupied bins: `i1..ir, lo1..lor, count, measure, singular`.
pub fn histogram_csv(hist: &FiberComponentHistogram) -> String {
    let q = hist.quantization();
    let r = q.arity();
    let mut cols: Vec<String> = (1..=r).map(|k| format!("i{k}")).collect();
    cols.extend((1..=r).map(|k| format!("lo{k}")));
    cols.extend(["count", "measure", "singular"].map(String::from));
    let mut out = cols.join(",");
    out.push('\n');
    for (bin, s) in hist.occupied() {
        let lows = bin.0.iter().enumerate().map(|(k, &j)| fmt_real(q.interval(k, j).0));
        let cells: Vec<String> = bin
            .0
            .iter()
            .map(|j| j.to_string())
            .chain(lows)
            .chain([
                s.count.to_string(),
                fmt_real(s.measure),
                u8::from(s.singular).to_string(),
            ])
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `kind,id,i1..ir`: singular tets and boundary triangles carry their id,
/// singular bins their multi-index.
pub fn jacobi_csv(jset: &JacobiElementSet, bins: &SingularBinSet, quant: &RangeQuantization) -> String {
    let r = quant.arity();
    let pad = ",".repeat(r);
    let mut out = String::from("kind,id");
    for k in 1..=r {
        write!(out, ",i{k}").unwrap();
    }
    out.push('\n');
    for t in &jset.tets {
        writeln!(out, "tet,{t}{pad}").unwrap();
    }
    for t in &jset.triangles {
        writeln!(out, "tri,{t}{pad}").unwrap();
    }
    for (n, b) in bins.bins(quant).enumerate() {
        let idx: Vec<String> = b.0.iter().map(|j| j.to_string()).collect();
        writeln!(out, "bin,{n},{}", idx.join(",")).unwrap();
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }
}
