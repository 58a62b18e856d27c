//! Headered CSV for sweeps (`freq_hz,s21_db`), field maps
//! (`b_tesla,freq_hz,s21_db`, rows in any order) and coupling-vs-temperature
//! points (`temperature_k,gc_hz`).

use std::collections::HashMap;
use std::fmt::Write as _;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::{FieldMap, MapMeta};
use crate::error::{ParseError, Result};
use crate::spectral::Spectrum;

/// Rows of the named numeric columns, tagged with their 1-based line.
fn read_columns(bytes: &[u8], names: &[&str]) -> Result<Vec<(usize, Vec<f64>)>, ParseError> {
    let mut reader = ReaderBuilder::new().trim(Trim::All).from_reader(bytes);
    let header = reader.headers().map_err(|e| csv_error(&e, 1))?.clone();
    let idx = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h.eq_ignore_ascii_case(n))
                .ok_or_else(|| ParseError::MissingColumn {
                    name: n.to_string(),
                })
        })
        .collect::<Result<Vec<usize>, _>>()?;
    let mut rows = Vec::new();
    let mut record = StringRecord::new();
    loop {
        let more = reader
            .read_record(&mut record)
            .map_err(|e| csv_error(&e, 0))?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut values = Vec::with_capacity(idx.len());
        for &i in &idx {
            let token = record.get(i).unwrap_or("");
            let v: f64 = token.parse().map_err(|_| ParseError::InvalidNumber {
                line,
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(ParseError::NonFiniteValue { line });
            }
            values.push(v);
        }
        rows.push((line, values));
    }
    Ok(rows)
}

fn csv_error(e: &csv::Error, fallback_line: usize) -> ParseError {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "input is not valid UTF-8".into(),
        _ => e.to_string(),
    };
    ParseError::Csv { line, message }
}

/// Parse a `freq_hz,s21_db` sweep. Rows may come in any order; repeated
/// frequencies are rejected.
pub fn parse_sweep_csv(bytes: &[u8]) -> Result<Spectrum> {
    let mut rows = read_columns(bytes, &["freq_hz", "s21_db"])?;
    if rows.len() < Spectrum::MIN_POINTS {
        return Err(ParseError::TooFewPoints {
            needed: Spectrum::MIN_POINTS,
            found: rows.len(),
        }
        .into());
    }
    rows.sort_by(|a, b| a.1[0].total_cmp(&b.1[0]));
    for w in rows.windows(2) {
        if w[1].1[0] <= w[0].1[0] {
            return Err(ParseError::NonMonotonicFrequency {
                line: w[0].0.max(w[1].0),
            }
            .into());
        }
    }
    if let Some((line, _)) = rows.iter().find(|r| r.1[0] <= 0.0) {
        return Err(ParseError::NonMonotonicFrequency { line: *line }.into());
    }
    let (f, s): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|(_, v)| (v[0], v[1])).unzip();
    Spectrum::new(f, s)
}

/// Parse a `b_tesla,freq_hz,s21_db` map. Rows are regrouped by field; every
/// field must carry the same frequency grid.
pub fn parse_map_csv(bytes: &[u8]) -> Result<FieldMap> {
    let mut rows = read_columns(bytes, &["b_tesla", "freq_hz", "s21_db"])?;
    if rows.is_empty() {
        return Err(ParseError::TooFewPoints {
            needed: Spectrum::MIN_POINTS,
            found: 0,
        }
        .into());
    }
    rows.sort_by(|a, b| a.1[0].total_cmp(&b.1[0]).then(a.1[1].total_cmp(&b.1[1])));

    // (field, frequency grid, values)
    let mut groups: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut prev: Option<&(usize, Vec<f64>)> = None;
    for row in &rows {
        let (b, f, s) = (row.1[0], row.1[1], row.1[2]);
        if let Some(p) = prev {
            if p.1[0] == b && p.1[1] == f {
                return Err(ParseError::Csv {
                    line: p.0.max(row.0),
                    message: format!("duplicate point at b_tesla = {b}, freq_hz = {f}"),
                }
                .into());
            }
        }
        if f <= 0.0 {
            return Err(ParseError::NonMonotonicFrequency { line: row.0 }.into());
        }
        match groups.last_mut() {
            Some(g) if g.0 == b => {
                g.1.push(f);
                g.2.push(s);
            }
            _ => groups.push((b, vec![f], vec![s])),
        }
        prev = Some(row);
    }

    // The grid shared by most fields is the reference; ties go to the
    // lowest field.
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    for g in &groups {
        *counts.entry(bits(&g.1)).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    let reference = groups
        .iter()
        .find(|g| counts[&bits(&g.1)] == best)
        .map(|g| g.1.clone())
        .unwrap_or_default();
    if let Some(g) = groups.iter().find(|g| g.1 != reference) {
        return Err(ParseError::RaggedGrid { field: g.0 }.into());
    }
    if reference.len() < Spectrum::MIN_POINTS {
        return Err(ParseError::TooFewPoints {
            needed: Spectrum::MIN_POINTS,
            found: reference.len(),
        }
        .into());
    }
    let fields = groups.iter().map(|g| g.0).collect();
    let values = groups.into_iter().flat_map(|g| g.2).collect();
    FieldMap::new(fields, reference, values, MapMeta::default())
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Parse `temperature_k,gc_hz` points, in file order.
pub fn parse_gc_points_csv(bytes: &[u8]) -> Result<Vec<(f64, f64)>> {
    let rows = read_columns(bytes, &["temperature_k", "gc_hz"])?;
    Ok(rows.into_iter().map(|(_, v)| (v[0], v[1])).collect())
}

pub fn write_sweep_csv(spec: &Spectrum) -> String {
    let mut out = String::from("freq_hz,s21_db\n");
    for (f, s) in spec.freqs().iter().zip(spec.s21_db()) {
        let _ = writeln!(out, "{f:e},{s:e}");
    }
    out
}

/// One row per (field, frequency) pair, field-major.
pub fn write_map_csv(map: &FieldMap) -> String {
    let mut out = String::from("b_tesla,freq_hz,s21_db\n");
    for (i, b) in map.fields().iter().enumerate() {
        for (f, s) in map.freqs().iter().zip(map.row(i)) {
            let _ = writeln!(out, "{b:e},{f:e},{s:e}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn kind(r: Result<impl std::fmt::Debug>) -> &'static str {
        r.unwrap_err().kind()
    }

    #[test]
    fn sweep_round_trip_and_order() {
        let text = "freq_hz,s21_db\n3e9,-3\n1e9,-1\n2e9,-2\n";
        let s = parse_sweep_csv(text.as_bytes()).unwrap();
        assert_eq!(s.freqs(), &[1e9, 2e9, 3e9]);
        assert_eq!(s.s21_db(), &[-1.0, -2.0, -3.0]);
        assert_eq!(parse_sweep_csv(write_sweep_csv(&s).as_bytes()).unwrap(), s);
    }

    #[test]
    fn sweep_columns_any_order_and_crlf() {
        let text = "s21_db , freq_hz\r\n-1,1e9\r\n-2,2e9\r\n-3,3e9\r\n";
        let s = parse_sweep_csv(text.as_bytes()).unwrap();
        assert_eq!(s.s21_db(), &[-1.0, -2.0, -3.0]);
    }

    #[test]
    fn map_two_by_three() {
        let text = "b_tesla,freq_hz,s21_db\n0.2,3,6\n0.1,1,1\n0.1,2,2\n0.2,1,4\n0.1,3,3\n0.2,2,5\n";
        let m = parse_map_csv(text.as_bytes()).unwrap();
        assert_eq!(m.fields(), &[0.1, 0.2]);
        assert_eq!(m.freqs(), &[1.0, 2.0, 3.0]);
        assert_eq!(m.s21_db(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(parse_map_csv(write_map_csv(&m).as_bytes()).unwrap(), m);
    }

    #[test]
    fn ragged_grid_names_field() {
        let text = "b_tesla,freq_hz,s21_db\n0.1,1,0\n0.1,2,0\n0.1,3,0\n0.2,1,0\n0.2,2.5,0\n0.2,3,0\n0.3,1,0\n0.3,2,0\n0.3,3,0\n";
        assert_eq!(
            parse_map_csv(text.as_bytes()).unwrap_err(),
            Error::Parse(ParseError::RaggedGrid { field: 0.2 })
        );
    }

    #[test]
    fn typed_errors() {
        assert_eq!(
            kind(parse_sweep_csv(b"freq,s21_db\n1,2\n")),
            "MissingColumn"
        );
        assert_eq!(
            kind(parse_sweep_csv(b"freq_hz,s21_db\n1,2\n2,x\n3,3\n")),
            "InvalidNumber"
        );
        assert_eq!(
            kind(parse_sweep_csv(b"freq_hz,s21_db\n1,2\n2,inf\n3,3\n")),
            "NonFiniteValue"
        );
        assert_eq!(
            kind(parse_sweep_csv(b"freq_hz,s21_db\n1,2\n1,2\n3,3\n")),
            "NonMonotonicFrequency"
        );
        assert_eq!(
            kind(parse_sweep_csv(b"freq_hz,s21_db\n1,2\n")),
            "TooFewPoints"
        );
        assert_eq!(
            kind(parse_sweep_csv(b"freq_hz,s21_db\n1,2\n2,3,4\n")),
            "Csv"
        );
        assert_eq!(
            kind(parse_map_csv(b"b_tesla,freq_hz\n0.1,1\n")),
            "MissingColumn"
        );
        assert_eq!(
            kind(parse_map_csv(
                b"b_tesla,freq_hz,s21_db\n0.1,1,0\n0.1,1,0\n0.1,2,0\n"
            )),
            "Csv"
        );
    }

    #[test]
    fn error_lines() {
        let err = parse_sweep_csv(b"freq_hz,s21_db\n1,2\n2,3\n3,nan\n").unwrap_err();
        match err {
            Error::Parse(p) => assert_eq!(p.line(), Some(4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gc_points() {
        let p = parse_gc_points_csv(b"temperature_k,gc_hz\n2,39e6\n40,9e6\n").unwrap();
        assert_eq!(p, vec![(2.0, 39e6), (40.0, 9e6)]);
    }
}
