//! Flag value grammars.

/// `<float>[hz|khz|mhz|ghz]`, case-insensitive; a bare number is Hz.
pub fn parse_freq(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let (num, scale) = [("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)]
        .iter()
        .find_map(|&(suffix, scale)| {
            lower
                .strip_suffix(suffix)
                .map(|n| (n.trim_end().to_string(), scale))
        })
        .unwrap_or((lower.clone(), 1.0));
    let v: f64 = num
        .parse()
        .map_err(|_| format!("`{t}` is not a frequency; expected <float>[hz|khz|mhz|ghz]"))?;
    if !v.is_finite() {
        return Err(format!("`{t}` is not a finite frequency"));
    }
    Ok(v * scale)
}

/// A finite float.
pub fn parse_finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

/// Linear sweep `START:STOP:POINTS`, endpoints in the frequency grammar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.start + k as f64 * step)
            .collect()
    }
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, points] = parts.as_slice() else {
        return Err(format!("`{s}` is not a sweep; expected START:STOP:POINTS"));
    };
    let points: usize = points
        .trim()
        .parse()
        .map_err(|_| format!("`{points}` is not a point count"))?;
    if points == 0 {
        return Err("a sweep needs at least one point".into());
    }
    Ok(Sweep {
        start: parse_freq(start)?,
        stop: parse_freq(stop)?,
        points,
    })
}
