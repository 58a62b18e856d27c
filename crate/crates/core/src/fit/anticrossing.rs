use nalgebra::DMatrix;

use super::lm::{nlls_minimize, LmOptions, ResidualModel};
use super::FitResult;
use crate::constants::{to_angular, PhysicalConstants};
use crate::dataio::FieldMap;
use crate::error::{check, Error, Result};
use crate::params::SpinSpecies;
use crate::peaks::find_peaks;

const NAMES: [&str; 3] = ["gc_hz", "bres_t", "f0_hz"];
const NAMES_FIXED_F0: [&str; 2] = ["gc_hz", "bres_t"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Lower => -1.0,
            Branch::Upper => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }
}

/// One peak position on a branch of the avoided crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    /// Field, T.
    pub b: f64,
    /// Peak frequency, Hz.
    pub f_peak: f64,
    pub branch: Branch,
    /// Least-squares weight; 1 for ordinary points, 0.5 for each half of a tie.
    pub weight: f64,
}

impl BranchPoint {
    pub fn new(b: f64, f_peak: f64, branch: Branch) -> Self {
        Self {
            b,
            f_peak,
            branch,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnticrossingData {
    points: Vec<BranchPoint>,
}

impl AnticrossingData {
    pub fn new(points: Vec<BranchPoint>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::InsufficientData {
                needed: 4,
                found: points.len(),
            });
        }
        for p in &points {
            check(p.b.is_finite(), "b", p.b, "finite field")?;
            check(p.f_peak > 0.0, "f_peak", p.f_peak, "f_peak > 0 Hz")?;
            check(p.weight > 0.0, "weight", p.weight, "weight > 0")?;
        }
        let has = |br| points.iter().any(|p| p.branch == br);
        if !has(Branch::Lower) || !has(Branch::Upper) {
            return Err(Error::InsufficientSpan(
                "points must lie on both branches".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[BranchPoint] {
        &self.points
    }
}

/// Weighted residuals `sqrt(w) (f_peak - f_branch(B))` in Hz against the
/// undamped two-mode branch formula. Parameters are `[g_c/2pi, B_res, f0]`,
/// or `[g_c/2pi, B_res]` when `f0` is held fixed.
pub struct AnticrossingResiduals<'a> {
    pub points: &'a [BranchPoint],
    /// Zeeman slope `g mu_B / h`, Hz/T.
    pub slope_hz_per_t: f64,
    pub f0_fixed: Option<f64>,
}

impl AnticrossingResiduals<'_> {
    fn f0(&self, p: &[f64]) -> f64 {
        self.f0_fixed.unwrap_or_else(|| p[2])
    }

    /// Branch frequency, Hz.
    pub fn branch_hz(&self, p: &[f64], b: f64, branch: Branch) -> f64 {
        let delta = self.slope_hz_per_t * (b - p[1]);
        let s = delta.hypot(2.0 * p[0]);
        self.f0(p) + 0.5 * delta + branch.sign() * 0.5 * s
    }
}

impl ResidualModel for AnticrossingResiduals<'_> {
    fn n_residuals(&self) -> usize {
        self.points.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (o, pt) in out.iter_mut().zip(self.points) {
            *o = pt.weight.sqrt() * (pt.f_peak - self.branch_hz(p, pt.b, pt.branch));
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) -> bool {
        let k = self.slope_hz_per_t;
        for (i, pt) in self.points.iter().enumerate() {
            let sw = pt.weight.sqrt();
            let sign = pt.branch.sign();
            let delta = k * (pt.b - p[1]);
            let s = delta.hypot(2.0 * p[0]);
            let (d_gc, d_half) = if s > 0.0 {
                (2.0 * p[0] / s, delta / (2.0 * s))
            } else {
                (0.0, 0.0)
            };
            jac[(i, 0)] = -sw * sign * d_gc;
            jac[(i, 1)] = sw * k * (0.5 + sign * d_half);
            if self.f0_fixed.is_none() {
                jac[(i, 2)] = -sw;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnticrossingFit {
    /// Collective coupling, rad/s.
    pub g_collective: f64,
    /// Resonance field, T.
    pub b_res: f64,
    /// Cavity frequency, Hz (the fixed value when it was not fitted).
    pub f0: f64,
    pub fit: FitResult,
}

/// Fit branch positions with the undamped two-mode formula.
///
/// Starting point: `B_res` at the field of smallest branch separation (or
/// where single-peak labels switch from upper to lower), `g_c` as half that
/// separation, and `f0` as the median of the cavity-like points farthest
/// from the crossing.
pub fn fit_anticrossing(
    data: &AnticrossingData,
    species: &SpinSpecies,
    f0_fixed: Option<f64>,
    consts: &PhysicalConstants,
    opts: &LmOptions,
) -> Result<AnticrossingFit> {
    if let Some(f0) = f0_fixed {
        check(f0 > 0.0, "f0_fixed", f0, "f0 > 0 Hz")?;
    }
    let points = data.points();
    let (b_min, b_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.b), hi.max(p.b))
        });
    if b_min == b_max {
        return Err(Error::InsufficientSpan(format!(
            "all points share the field {b_min} T"
        )));
    }
    let slope = species.g_factor() * consts.mu_b / consts.h;
    let b_res0 = initial_b_res(points)?;
    if !(b_min < b_res0 && b_res0 < b_max) {
        return Err(Error::InsufficientSpan(
            "points do not lie on both sides of the crossing".into(),
        ));
    }
    let f0_init = f0_fixed.unwrap_or_else(|| initial_f0(points, b_res0));
    let gc0 = initial_gc(points, b_res0, f0_init, slope, b_max - b_min);

    let model = AnticrossingResiduals {
        points,
        slope_hz_per_t: slope,
        f0_fixed,
    };
    let mut fit = match f0_fixed {
        Some(_) => nlls_minimize(&model, &[gc0, b_res0], &NAMES_FIXED_F0, opts)?,
        None => nlls_minimize(&model, &[gc0, b_res0, f0_init], &NAMES, opts)?,
    };
    fit.residual_unit = "hz";
    // The model depends on g_c only through its square.
    fit.params[0] = fit.params[0].abs();
    let b_res = fit.params[1];
    if !(b_min < b_res && b_res < b_max) {
        return Err(Error::InsufficientSpan(format!(
            "fitted resonance field {b_res} T lies outside the data span [{b_min}, {b_max}] T"
        )));
    }
    Ok(AnticrossingFit {
        g_collective: to_angular(fit.params[0]),
        b_res,
        f0: f0_fixed.unwrap_or(fit.params.get(2).copied().unwrap_or(f0_init)),
        fit,
    })
}

/// Fields that carry both branches, with their separations.
fn separations(points: &[BranchPoint]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for up in points.iter().filter(|p| p.branch == Branch::Upper) {
        let lows = points
            .iter()
            .filter(|p| p.branch == Branch::Lower && p.b == up.b);
        for lo in lows {
            out.push((up.b, up.f_peak - lo.f_peak));
        }
    }
    out
}

fn initial_b_res(points: &[BranchPoint]) -> Result<f64> {
    let seps = separations(points);
    if let Some(&(b, _)) = seps
        .iter()
        .filter(|(_, s)| *s >= 0.0)
        .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.total_cmp(&y.0)))
    {
        return Ok(b);
    }
    // Single-peak rows: cavity-like branch is upper below the crossing and
    // lower above it.
    let last_upper = points
        .iter()
        .filter(|p| p.branch == Branch::Upper)
        .map(|p| p.b)
        .fold(f64::NEG_INFINITY, f64::max);
    let first_lower_after = points
        .iter()
        .filter(|p| p.branch == Branch::Lower && p.b > last_upper)
        .map(|p| p.b)
        .fold(f64::INFINITY, f64::min);
    if first_lower_after.is_finite() {
        return Ok(0.5 * (last_upper + first_lower_after));
    }
    let first_lower = points
        .iter()
        .filter(|p| p.branch == Branch::Lower)
        .map(|p| p.b)
        .fold(f64::INFINITY, f64::min);
    Ok(0.5 * (last_upper + first_lower))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn is_cavity_like(p: &BranchPoint, b_res: f64) -> bool {
    (p.b < b_res && p.branch == Branch::Upper) || (p.b > b_res && p.branch == Branch::Lower)
}

fn initial_f0(points: &[BranchPoint], b_res: f64) -> f64 {
    let mut cavity: Vec<&BranchPoint> =
        points.iter().filter(|p| is_cavity_like(p, b_res)).collect();
    if cavity.is_empty() {
        return median(points.iter().map(|p| p.f_peak).collect());
    }
    cavity.sort_by(|a, b| (b.b - b_res).abs().total_cmp(&(a.b - b_res).abs()));
    let take = cavity.len().div_ceil(4).max(1);
    // Balance the two sides so their opposite pulls cancel.
    let (below, above): (Vec<&&BranchPoint>, Vec<&&BranchPoint>) =
        cavity.iter().partition(|p| p.b < b_res);
    if !below.is_empty() && !above.is_empty() {
        let half = take.div_ceil(2);
        let lo = median(below.iter().take(half).map(|p| p.f_peak).collect());
        let hi = median(above.iter().take(half).map(|p| p.f_peak).collect());
        return 0.5 * (lo + hi);
    }
    median(cavity.iter().take(take).map(|p| p.f_peak).collect())
}

fn initial_gc(points: &[BranchPoint], b_res: f64, f0: f64, slope: f64, field_span: f64) -> f64 {
    let seps = separations(points);
    if let Some(&(_, s)) = seps
        .iter()
        .filter(|(_, s)| *s > 0.0)
        .min_by(|x, y| x.1.total_cmp(&y.1))
    {
        return 0.5 * s;
    }
    // From the cavity-like point nearest the crossing: its pull away from f0
    // fixes g_c^2 = (f - f0)^2 - (f - f0) delta.
    let nearest = points
        .iter()
        .filter(|p| is_cavity_like(p, b_res))
        .min_by(|a, b| (a.b - b_res).abs().total_cmp(&(b.b - b_res).abs()));
    if let Some(p) = nearest {
        let delta = slope * (p.b - b_res);
        let shift = p.f_peak - f0;
        let g2 = shift * shift - shift * delta;
        if g2 > 0.0 {
            return g2.sqrt();
        }
    }
    1e-3 * slope * field_span
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Minimum peak prominence, dB.
    pub min_prominence_db: f64,
    /// Bare cavity frequency used to label single peaks. When absent it is
    /// estimated from the single peaks of the first and last rows.
    pub f0_ref: Option<f64>,
    /// Single peaks within this distance of `f0_ref` count as ties, Hz.
    pub tie_tolerance_hz: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            min_prominence_db: 3.0,
            f0_ref: None,
            tie_tolerance_hz: 1.0,
        }
    }
}

/// A map row that produced no usable peaks.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    pub row: usize,
    pub field: f64,
    pub n_peaks: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchExtraction {
    pub points: Vec<BranchPoint>,
    pub skipped: Vec<SkippedRow>,
    /// Reference frequency used for single-peak labels, Hz.
    pub f0_ref: f64,
}

impl BranchExtraction {
    pub fn into_data(self) -> Result<AnticrossingData> {
        AnticrossingData::new(self.points)
    }
}

/// Peak positions of every map row, labelled by branch.
///
/// Two peaks are labelled lower/upper by frequency. A single peak is
/// labelled by its side of `f0_ref`; one sitting on `f0_ref` goes to both
/// branches with half weight. Rows with no peak or more than two are
/// returned in `skipped`.
pub fn extract_branch_peaks(map: &FieldMap, opts: &ExtractOptions) -> Result<BranchExtraction> {
    check(
        opts.min_prominence_db >= 0.0,
        "min_prominence_db",
        opts.min_prominence_db,
        "min_prominence_db >= 0 dB",
    )?;
    check(
        opts.tie_tolerance_hz >= 0.0,
        "tie_tolerance_hz",
        opts.tie_tolerance_hz,
        "tie_tolerance_hz >= 0 Hz",
    )?;
    let freqs = map.freqs();
    let rows: Vec<Vec<f64>> = (0..map.n_rows())
        .map(|i| {
            find_peaks(freqs, map.row(i), opts.min_prominence_db)
                .into_iter()
                .map(|p| p.x)
                .collect()
        })
        .collect();

    let f0_ref = match opts.f0_ref {
        Some(f) => {
            check(f > 0.0, "f0_ref", f, "f0_ref > 0 Hz")?;
            f
        }
        None => estimate_f0_ref(&rows).ok_or(Error::InsufficientData {
            needed: 1,
            found: 0,
        })?,
    };

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (i, peaks) in rows.iter().enumerate() {
        let b = map.fields()[i];
        match peaks.as_slice() {
            [lo, hi] => {
                points.push(BranchPoint::new(b, *lo, Branch::Lower));
                points.push(BranchPoint::new(b, *hi, Branch::Upper));
            }
            [f] if (f - f0_ref).abs() <= opts.tie_tolerance_hz => {
                for branch in [Branch::Lower, Branch::Upper] {
                    points.push(BranchPoint {
                        b,
                        f_peak: *f,
                        branch,
                        weight: 0.5,
                    });
                }
            }
            [f] => {
                let branch = if *f > f0_ref {
                    Branch::Upper
                } else {
                    Branch::Lower
                };
                points.push(BranchPoint::new(b, *f, branch));
            }
            other => skipped.push(SkippedRow {
                row: i,
                field: b,
                n_peaks: other.len(),
                reason: if other.is_empty() {
                    "no peak above the prominence threshold".into()
                } else {
                    format!("{} peaks, expected 1 or 2", other.len())
                },
            }),
        }
    }
    Ok(BranchExtraction {
        points,
        skipped,
        f0_ref,
    })
}

/// Mean of the single peaks in the outermost rows that have exactly one.
fn estimate_f0_ref(rows: &[Vec<f64>]) -> Option<f64> {
    let first = rows.iter().find(|r| r.len() == 1).map(|r| r[0]);
    let last = rows.iter().rev().find(|r| r.len() == 1).map(|r| r[0]);
    match (first, last) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        _ => {
            let all: Vec<f64> = rows.iter().flatten().copied().collect();
            (!all.is_empty()).then(|| median(all))
        }
    }
}
