//! CSV writers. Comma separated, LF line endings, dot decimals; floats are
//! written in scientific notation with 17 significant digits so a value
//! read back is the value written.

use std::io::{self, Write};

use crate::economy::{AvalancheRecord, IndexSample};
use crate::stats::Histogram;

pub const INDEX_HEADER: &str = "step,U_t,alpha_mean";
pub const AVALANCHE_HEADER: &str = "trigger_step,size_s,node_count_r,edges_removed";

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_index_csv<W: Write>(out: &mut W, samples: &[IndexSample]) -> io::Result<()> {
    writeln!(out, "{INDEX_HEADER}")?;
    for s in samples {
        writeln!(out, "{},{},{}", s.step, format_float(s.value), format_float(s.alpha_mean))?;
    }
    Ok(())
}

pub fn write_avalanches_csv<W: Write>(out: &mut W, records: &[AvalancheRecord]) -> io::Result<()> {
    writeln!(out, "{AVALANCHE_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.trigger_step, r.size_s, r.node_count_r, r.edges_removed
        )?;
    }
    Ok(())
}

/// Two-column table such as a CCDF.
pub fn write_xy_csv<W: Write>(
    out: &mut W,
    header: (&str, &str),
    points: &[(f64, f64)],
) -> io::Result<()> {
    writeln!(out, "{},{}", header.0, header.1)?;
    for &(x, y) in points {
        writeln!(out, "{},{}", format_float(x), format_float(y))?;
    }
    Ok(())
}

/// Histogram as `bin_center,density`.
pub fn write_histogram_csv<W: Write>(out: &mut W, histogram: &Histogram) -> io::Result<()> {
    write_xy_csv(out, ("bin_center", "density"), &histogram.density())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_csv_layout() {
        let samples = [
            IndexSample { step: 5, value: 1.5, alpha_mean: 1.0 },
            IndexSample { step: 10, value: 0.1, alpha_mean: 0.98 },
        ];
        let mut buf = Vec::new();
        write_index_csv(&mut buf, &samples).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], INDEX_HEADER);
        assert_eq!(lines[1], "5,1.5000000000000000e0,1.0000000000000000e0");
        assert_eq!(lines.len(), 4);
        assert!(!text.contains('\r'));
        let back: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn empty_avalanche_csv_is_header_only() {
        let mut buf = Vec::new();
        write_avalanches_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{AVALANCHE_HEADER}\n"));
    }

    #[test]
    fn avalanche_rows() {
        let r = AvalancheRecord { trigger_step: 42, size_s: 3, node_count_r: 7, edges_removed: 9 };
        let mut buf = Vec::new();
        write_avalanches_csv(&mut buf, &[r]).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("42,3,7,9\n"));
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, -7.25e12, f64::MAX] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
