//! Sample files. CSV and JSON both carry shortest round-trip decimals, so
//! every `f64` reads back bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rmlab_core::{MatrixParams, SpectralSample};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = ["rep", "lambda1", "lambda2", "est1", "est2", "lambda1_centered", "sum_sq_dev"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    params: &'a MatrixParams,
    samples: &'a [SpectralSample],
}

#[derive(Deserialize)]
struct Document {
    params: MatrixParams,
    samples: Vec<SpectralSample>,
}

pub fn write_csv<W: Write>(out: W, samples: &[SpectralSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in samples {
        // `Display` for f64 is the shortest decimal that parses back exactly
        w.write_record([
            s.rep_index.to_string(),
            s.lambda1.to_string(),
            s.lambda2.to_string(),
            s.est1.to_string(),
            s.est2.to_string(),
            s.lambda1_centered.to_string(),
            s.sum_sq_dev.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Format(format!("csv: {e}")))?;
    Ok(())
}

pub fn write_json<W: Write>(out: W, params: &MatrixParams, samples: &[SpectralSample]) -> Result<()> {
    serde_json::to_writer_pretty(out, &DocumentRef { params, samples })?;
    Ok(())
}

pub fn write_samples<W: Write>(mut out: W, params: &MatrixParams, samples: &[SpectralSample], format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, samples),
        Format::Json => {
            write_json(&mut out, params, samples)?;
            out.write_all(b"\n").map_err(|e| Error::Format(e.to_string()))
        }
    }
}

pub fn write_samples_to_path(path: &Path, params: &MatrixParams, samples: &[SpectralSample], format: Format) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    write_samples(&mut out, params, samples, format)?;
    out.flush().map_err(io_err)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SpectralSample>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Format(format!("csv: unexpected header {}", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_json<R: Read>(input: R) -> Result<(MatrixParams, Vec<SpectralSample>)> {
    let doc: Document = serde_json::from_reader(input)?;
    Ok((doc.params, doc.samples))
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn write_report<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degenerate() -> SpectralSample {
        SpectralSample { rep_index: 0, lambda1: 12.0, lambda2: 0.0, est1: 12.0, est2: 12.0, lambda1_centered: 0.0, sum_sq_dev: 0.0 }
    }

    fn awkward(rep: u64) -> SpectralSample {
        SpectralSample {
            rep_index: rep,
            lambda1: 257.123_456_789_012_3,
            lambda2: 0.1 + 0.2,
            est1: f64::MIN_POSITIVE,
            est2: 1e300,
            lambda1_centered: std::f64::consts::PI,
            sum_sq_dev: 5e-324,
        }
    }

    #[test]
    fn degenerate_row() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[degenerate()]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "rep,lambda1,lambda2,est1,est2,lambda1_centered,sum_sq_dev\n0,12,0,12,12,0,0\n");
    }

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(buf, b"rep,lambda1,lambda2,est1,est2,lambda1_centered,sum_sq_dev\n");
        assert!(read_csv(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let samples = vec![degenerate(), awkward(1), awkward(2)];
        let mut buf = Vec::new();
        write_csv(&mut buf, &samples).unwrap();
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), samples.len());
        for (a, b) in back.iter().zip(&samples) {
            assert_eq!(a.lambda1.to_bits(), b.lambda1.to_bits());
            assert_eq!(a.lambda2.to_bits(), b.lambda2.to_bits());
            assert_eq!(a.est1.to_bits(), b.est1.to_bits());
            assert_eq!(a.est2.to_bits(), b.est2.to_bits());
            assert_eq!(a.sum_sq_dev.to_bits(), b.sum_sq_dev.to_bits());
        }
        assert_eq!(back, samples);
    }

    #[test]
    fn json_round_trip_matches_csv() {
        let params = MatrixParams::new(3, 5, 2.0, 0.0, 9).unwrap();
        let samples = vec![awkward(0), degenerate()];
        let mut buf = Vec::new();
        write_samples(&mut buf, &params, &samples, Format::Json).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"rep\": 0"));
        let (p, back) = read_json(&buf[..]).unwrap();
        assert_eq!(p, params);
        assert_eq!(back, samples);
    }

    #[test]
    fn json_floats_are_bit_exact() {
        let params = MatrixParams::new(1, 1, 0.0, 1.0, 0).unwrap();
        let mut stream = rmlab_core::matgen::derive_stream(5, 0);
        let samples: Vec<SpectralSample> = (0..2000)
            .map(|i| {
                let mut v = || stream.next_normal() * 10f64.powi((stream.next_u64() % 40) as i32 - 20);
                SpectralSample { rep_index: i, lambda1: v(), lambda2: v(), est1: v(), est2: v(), lambda1_centered: v(), sum_sq_dev: v() }
            })
            .collect();
        let mut buf = Vec::new();
        write_json(&mut buf, &params, &samples).unwrap();
        let (_, back) = read_json(&buf[..]).unwrap();
        let bits = |s: &SpectralSample| [s.lambda1, s.lambda2, s.est1, s.est2, s.lambda1_centered, s.sum_sq_dev].map(f64::to_bits);
        assert!(back.iter().zip(&samples).all(|(a, b)| bits(a) == bits(b)));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(matches!(read_csv(&b"rep,x\n1,2\n"[..]), Err(Error::Format(_))));
    }

    #[test]
    fn unwritable_path_is_io() {
        let params = MatrixParams::new(1, 1, 0.0, 1.0, 0).unwrap();
        let e = write_samples_to_path(Path::new("/nonexistent-dir/x.csv"), &params, &[], Format::Csv).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
