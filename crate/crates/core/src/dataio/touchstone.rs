//! Touchstone version 1 two-port (`.s2p`) reader and writer.
//!
//! Only the strict option line `# <HZ|KHZ|MHZ|GHZ> S <DB|MA|RI> R <z>` is
//! accepted (keywords case-insensitive). Data rows hold the frequency and
//! the four complex parameters in S11 S21 S12 S22 order.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{ParseError, Result};
use crate::spectral::{Spectrum, SpectrumMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            FreqUnit::Hz => "HZ",
            FreqUnit::KHz => "KHZ",
            FreqUnit::MHz => "MHZ",
            FreqUnit::GHz => "GHZ",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HZ" => Some(FreqUnit::Hz),
            "KHZ" => Some(FreqUnit::KHz),
            "MHZ" => Some(FreqUnit::MHz),
            "GHZ" => Some(FreqUnit::GHz),
            _ => None,
        }
    }
}

/// Encoding of each complex parameter as a pair of numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// dB magnitude, angle in degrees.
    Db,
    /// Linear magnitude, angle in degrees.
    Ma,
    /// Real, imaginary.
    Ri,
}

impl DataFormat {
    fn keyword(self) -> &'static str {
        match self {
            DataFormat::Db => "DB",
            DataFormat::Ma => "MA",
            DataFormat::Ri => "RI",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DB" => Some(DataFormat::Db),
            "MA" => Some(DataFormat::Ma),
            "RI" => Some(DataFormat::Ri),
            _ => None,
        }
    }

    /// Transmission in dB from one encoded pair.
    fn to_db(self, a: f64, b: f64) -> f64 {
        match self {
            DataFormat::Db => a,
            DataFormat::Ma => 20.0 * a.log10(),
            DataFormat::Ri => 10.0 * (a * a + b * b).log10(),
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            DataFormat::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
            DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
            DataFormat::Ri => (z.re, z.im),
        }
    }
}

/// One frequency point of a two-port network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortPoint {
    pub freq_hz: f64,
    /// S11, S21, S12, S22.
    pub s: [Complex64; 4],
}

struct Options {
    unit: FreqUnit,
    format: DataFormat,
    impedance: f64,
}

fn parse_option_line(text: &str, line: usize) -> Result<Options, ParseError> {
    let bad = |reason: &str| ParseError::MalformedOptionLine {
        line,
        reason: reason.to_string(),
    };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 6 || tokens[0] != "#" {
        return Err(bad("expected `# <unit> S <format> R <impedance>`"));
    }
    let unit = FreqUnit::parse(tokens[1]).ok_or_else(|| bad("unit must be HZ, KHZ, MHZ or GHZ"))?;
    if !tokens[2].eq_ignore_ascii_case("S") {
        return Err(bad("only S parameters are supported"));
    }
    let format = DataFormat::parse(tokens[3]).ok_or_else(|| bad("format must be DB, MA or RI"))?;
    if !tokens[4].eq_ignore_ascii_case("R") {
        return Err(bad("expected `R` before the reference impedance"));
    }
    let impedance: f64 = tokens[5]
        .parse()
        .map_err(|_| bad("reference impedance is not a number"))?;
    if !(impedance.is_finite() && impedance > 0.0) {
        return Err(bad("reference impedance must be positive"));
    }
    Ok(Options {
        unit,
        format,
        impedance,
    })
}

fn parse_number(token: &str, line: usize) -> Result<f64, ParseError> {
    let v: f64 = token.parse().map_err(|_| ParseError::InvalidNumber {
        line,
        token: token.to_string(),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParseError::NonFiniteValue { line })
    }
}

/// Parse a two-port Touchstone v1 file and return its S21 trace in dB.
/// The reference impedance is stored in the spectrum metadata.
pub fn parse_touchstone(bytes: &[u8]) -> Result<Spectrum> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Csv {
        line: 1 + bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        message: "input is not valid UTF-8".into(),
    })?;
    let mut options: Option<Options> = None;
    let mut freqs = Vec::new();
    let mut s21 = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            return Err(ParseError::UnsupportedVersion { line }.into());
        }
        if content.starts_with('#') {
            // Only the first option line counts; later ones are ignored.
            if options.is_none() {
                options = Some(parse_option_line(content, line)?);
            }
            continue;
        }
        let opts = options.as_ref().ok_or(ParseError::MissingOptionLine)?;
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 9 {
            return Err(ParseError::WrongPortCount {
                line,
                found: tokens.len(),
            }
            .into());
        }
        let f = parse_number(tokens[0], line)? * opts.unit.scale();
        let values = tokens[1..]
            .iter()
            .map(|t| parse_number(t, line))
            .collect::<Result<Vec<f64>, ParseError>>()?;
        if f <= 0.0 {
            return Err(ParseError::NonMonotonicFrequency { line }.into());
        }
        if freqs.last().is_some_and(|&prev| f <= prev) {
            return Err(ParseError::NonMonotonicFrequency { line }.into());
        }
        let db = opts.format.to_db(values[2], values[3]);
        if !db.is_finite() {
            return Err(ParseError::NonFiniteValue { line }.into());
        }
        freqs.push(f);
        s21.push(db);
    }
    let opts = options.ok_or(ParseError::MissingOptionLine)?;
    if freqs.len() < Spectrum::MIN_POINTS {
        return Err(ParseError::TooFewPoints {
            needed: Spectrum::MIN_POINTS,
            found: freqs.len(),
        }
        .into());
    }
    let meta = SpectrumMeta {
        impedance_ohm: Some(opts.impedance),
        ..Default::default()
    };
    Spectrum::with_meta(freqs, s21, meta)
}

/// Serialize a two-port network as Touchstone v1.
pub fn write_touchstone(
    points: &[TwoPortPoint],
    unit: FreqUnit,
    format: DataFormat,
    impedance: f64,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "! two-port network, {} points", points.len());
    let _ = writeln!(
        out,
        "# {} S {} R {}",
        unit.keyword(),
        format.keyword(),
        impedance
    );
    for p in points {
        let _ = write!(out, "{:e}", p.freq_hz / unit.scale());
        for z in p.s {
            let (a, b) = format.encode(z);
            let _ = write!(out, " {a:e} {b:e}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn kind(text: &str) -> &'static str {
        parse_touchstone(text.as_bytes()).unwrap_err().kind()
    }

    const MINIMAL: &str = "! minimal\n# GHZ S DB R 50\n\
        7.7 -1 0 -30 10 -30 10 -1 0\n\
        7.8 -1 0 -20 20 -20 20 -1 0\n\
        7.9 -1 0 -35 30 -35 30 -1 0\n";

    #[test]
    fn minimal_db_file() {
        let s = parse_touchstone(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.freqs(), &[7.7e9, 7.8e9, 7.9e9]);
        assert_eq!(s.s21_db(), &[-30.0, -20.0, -35.0]);
        assert_eq!(s.meta().impedance_ohm, Some(50.0));
    }

    #[test]
    fn keywords_case_insensitive_and_inline_comments() {
        let text = "# ghz s db r 75 ! options\n7.7 0 0 -3 0 0 0 0 0 ! a\n7.8 0 0 -2 0 0 0 0 0\n7.9 0 0 -1 0 0 0 0 0\n";
        let s = parse_touchstone(text.as_bytes()).unwrap();
        assert_eq!(s.meta().impedance_ohm, Some(75.0));
        assert_eq!(s.s21_db(), &[-3.0, -2.0, -1.0]);
    }

    #[test]
    fn formats_agree() {
        let pts: Vec<TwoPortPoint> = (0..50)
            .map(|i| {
                let f = 7.70e9 + i as f64 * 1e6;
                let z =
                    Complex64::from_polar(10f64.powf(-1.0 - 0.03 * i as f64), 0.1 * i as f64 - 2.0);
                TwoPortPoint {
                    freq_hz: f,
                    s: [Complex64::new(0.5, 0.1), z, z, Complex64::new(0.4, -0.2)],
                }
            })
            .collect();
        let parse = |fmt| {
            parse_touchstone(write_touchstone(&pts, FreqUnit::Hz, fmt, 50.0).as_bytes()).unwrap()
        };
        let (db, ma, ri) = (
            parse(DataFormat::Db),
            parse(DataFormat::Ma),
            parse(DataFormat::Ri),
        );
        for i in 0..pts.len() {
            assert!((db.s21_db()[i] - ma.s21_db()[i]).abs() < 1e-9);
            assert!((db.s21_db()[i] - ri.s21_db()[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn typed_errors() {
        assert_eq!(kind("7.7 0 0 0 0 0 0 0 0\n"), "MissingOptionLine");
        assert_eq!(kind("# GHZ Y DB R 50\n"), "MalformedOptionLine");
        assert_eq!(kind("# THZ S DB R 50\n"), "MalformedOptionLine");
        assert_eq!(kind("# GHZ S DB 50\n"), "MalformedOptionLine");
        assert_eq!(
            kind("[Version] 2.0\n# GHZ S DB R 50\n"),
            "UnsupportedVersion"
        );
        assert_eq!(kind("# GHZ S DB R 50\n7.7 0 0 0\n"), "WrongPortCount");
        assert_eq!(
            kind("# GHZ S DB R 50\n7.7 0 0 x 0 0 0 0 0\n"),
            "InvalidNumber"
        );
        assert_eq!(
            kind("# GHZ S DB R 50\n7.7 0 0 nan 0 0 0 0 0\n"),
            "NonFiniteValue"
        );
        assert_eq!(
            kind("# GHZ S MA R 50\n7.7 0 0 0 0 0 0 0 0\n"),
            "NonFiniteValue"
        );
        assert_eq!(
            kind("# GHZ S DB R 50\n7.7 0 0 0 0 0 0 0 0\n7.7 0 0 0 0 0 0 0 0\n"),
            "NonMonotonicFrequency"
        );
        assert_eq!(
            kind("# GHZ S DB R 50\n7.7 0 0 0 0 0 0 0 0\n"),
            "TooFewPoints"
        );
    }

    #[test]
    fn error_carries_line() {
        let err =
            parse_touchstone(b"! c\n# GHZ S DB R 50\n7.7 0 0 0 0 0 0 0 0\n7.6 0 0 0 0 0 0 0 0\n")
                .unwrap_err();
        match err {
            Error::Parse(p) => assert_eq!(p.line(), Some(4)),
            other => panic!("{other:?}"),
        }
    }
}
