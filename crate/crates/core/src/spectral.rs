//! Transmission forward models.
//!
//! * [`lorentzian_s21`] - bare resonator transmission in dB.
//! * [`rabi_branches`] - undamped normal-mode frequencies of the coupled
//!   cavity and spin ensemble.
//! * [`coupled_s21`] - damped input-output lineshape of the coupled system.
//! * [`spectrum_from_model`] - seeded synthetic sweeps for round-trip tests.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::constants::PhysicalConstants;
use crate::error::{check, Error, Result};
use crate::params::{detuning, FieldPoint, ResonatorParams, SpinSpecies};

/// Optional acquisition metadata attached to a sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpectrumMeta {
    pub power_dbm: Option<f64>,
    pub temperature_k: Option<f64>,
    pub field_t: Option<f64>,
    pub impedance_ohm: Option<f64>,
}

/// A one-dimensional S21 sweep: strictly increasing frequencies (Hz) and
/// finite transmission values (dB), at least three points.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    freqs: Vec<f64>,
    s21_db: Vec<f64>,
    meta: SpectrumMeta,
}

impl Spectrum {
    pub const MIN_POINTS: usize = 3;

    pub fn new(freqs: Vec<f64>, s21_db: Vec<f64>) -> Result<Self> {
        Self::with_meta(freqs, s21_db, SpectrumMeta::default())
    }

    pub fn with_meta(freqs: Vec<f64>, s21_db: Vec<f64>, meta: SpectrumMeta) -> Result<Self> {
        if freqs.len() != s21_db.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} frequencies but {} values",
                freqs.len(),
                s21_db.len()
            )));
        }
        if freqs.len() < Self::MIN_POINTS {
            return Err(Error::InvalidSpectrum(format!(
                "need at least {} points, got {}",
                Self::MIN_POINTS,
                freqs.len()
            )));
        }
        validate_grid(&freqs)?;
        if let Some(i) = s21_db.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "non-finite S21 at index {i}"
            )));
        }
        Ok(Self {
            freqs,
            s21_db,
            meta,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn s21_db(&self) -> &[f64] {
        &self.s21_db
    }

    pub fn meta(&self) -> &SpectrumMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut SpectrumMeta {
        &mut self.meta
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Index of the largest transmission value (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.s21_db.iter().enumerate() {
            if v > self.s21_db[best] {
                best = i;
            }
        }
        best
    }
}

pub(crate) fn validate_grid(freqs: &[f64]) -> Result<()> {
    if let Some(i) = freqs.iter().position(|f| !f.is_finite() || *f <= 0.0) {
        return Err(Error::InvalidSpectrum(format!(
            "frequency at index {i} is not a positive finite number"
        )));
    }
    if let Some(i) = freqs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpectrum(format!(
            "frequencies not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Uniform grid of `points` frequencies from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    check(points >= 2, "points", points as f64, "points >= 2")?;
    check(start > 0.0, "start", start, "start > 0 Hz")?;
    check(stop > start, "stop", stop, "stop > start")?;
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

/// Resonator loaded with a spin ensemble at one field point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledSystem {
    res: ResonatorParams,
    g_collective: f64,
    gamma_spin: f64,
    fp: FieldPoint,
    species: SpinSpecies,
}

impl CoupledSystem {
    /// * `g_collective` - collective coupling, rad/s
    /// * `gamma_spin` - spin half-width linewidth, rad/s
    pub fn new(
        res: ResonatorParams,
        g_collective: f64,
        gamma_spin: f64,
        fp: FieldPoint,
        species: SpinSpecies,
    ) -> Result<Self> {
        check(
            g_collective >= 0.0,
            "g_collective",
            g_collective,
            "g_collective >= 0 rad/s",
        )?;
        check(
            gamma_spin >= 0.0,
            "gamma_spin",
            gamma_spin,
            "gamma_spin >= 0 rad/s",
        )?;
        Ok(Self {
            res,
            g_collective,
            gamma_spin,
            fp,
            species,
        })
    }

    pub fn resonator(&self) -> &ResonatorParams {
        &self.res
    }

    pub fn g_collective(&self) -> f64 {
        self.g_collective
    }

    pub fn gamma_spin(&self) -> f64 {
        self.gamma_spin
    }

    pub fn field_point(&self) -> &FieldPoint {
        &self.fp
    }

    pub fn species(&self) -> &SpinSpecies {
        &self.species
    }

    pub fn with_field(self, b: f64) -> Result<Self> {
        Ok(Self {
            fp: self.fp.with_b(b)?,
            ..self
        })
    }

    pub fn with_coupling(self, g_collective: f64, gamma_spin: f64) -> Result<Self> {
        Self::new(self.res, g_collective, gamma_spin, self.fp, self.species)
    }

    pub fn detuning(&self, consts: &PhysicalConstants) -> f64 {
        detuning(&self.fp, &self.species, consts)
    }
}

/// Bare resonator transmission, dB:
/// `-IL - 10 log10[1 + Q^2 (f/f0 - f0/f)^2]`.
pub fn lorentzian_s21(res: &ResonatorParams, f: f64) -> Result<f64> {
    check(f > 0.0, "f", f, "f > 0 Hz")?;
    let f0 = res.f0();
    // (f/f0 - f0/f) without cancellation near f0
    let x = (f - f0) * (f + f0) / (f * f0);
    let q = res.q_loaded();
    Ok(-res.il_db() - 10.0 * (q * q * x * x).ln_1p() / LN_10)
}

/// Normal-mode frequencies `(omega_minus, omega_plus)` for cavity frequency
/// `omega0`, detuning `delta` and collective coupling `g_c`, all rad/s.
pub fn rabi_branches_at(omega0: f64, delta: f64, g_c: f64) -> (f64, f64) {
    let half_split = 0.5 * delta.hypot(2.0 * g_c);
    let center = omega0 + 0.5 * delta;
    (center - half_split, center + half_split)
}

/// Undamped branch frequencies of the coupled system, rad/s.
pub fn rabi_branches(sys: &CoupledSystem, consts: &PhysicalConstants) -> (f64, f64) {
    rabi_branches_at(sys.res.omega0(), sys.detuning(consts), sys.g_collective)
}

/// Complex transmission amplitude normalized to unit peak for the bare
/// cavity.
///
/// The cavity detuning is written in the frequency-symmetric form
/// `(omega0/2) (f/f0 - f0/f)`, so the `g_c = 0` limit coincides with
/// [`lorentzian_s21`]. The spin term carries the weight
/// `rho = (f + f0) / 2f`, the ratio of that form to `omega - omega0`; with
/// it the undamped poles satisfy `(omega - omega0)(omega - omega_s) = g_c^2`
/// exactly, i.e. they sit on [`rabi_branches`].
pub fn coupled_amplitude(
    sys: &CoupledSystem,
    f: f64,
    consts: &PhysicalConstants,
) -> Result<Complex64> {
    check(f > 0.0, "f", f, "f > 0 Hz")?;
    let res = &sys.res;
    let f0 = res.f0();
    let half_kappa = 0.5 * res.kappa();
    let cavity_detuning = PI * (f - f0) * (f + f0) / f;
    let mut denom = Complex64::new(half_kappa, cavity_detuning);
    let g2 = sys.g_collective * sys.g_collective;
    if g2 > 0.0 {
        let spin_detuning = 2.0 * PI * (f - f0) - sys.detuning(consts);
        let rho = (f + f0) / (2.0 * f);
        denom += g2 * rho / Complex64::new(sys.gamma_spin, spin_detuning);
    }
    Ok(Complex64::new(half_kappa, 0.0) / denom)
}

/// Transmission of the coupled system, dB, with the bare peak at `-IL`.
pub fn coupled_s21(sys: &CoupledSystem, f: f64, consts: &PhysicalConstants) -> Result<f64> {
    let t = coupled_amplitude(sys, f, consts)?;
    Ok(-sys.res.il_db() + 10.0 * t.norm_sqr().log10())
}

/// Model selector for synthetic sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralModel {
    Bare(ResonatorParams),
    Coupled(CoupledSystem),
}

impl SpectralModel {
    pub fn s21_db(&self, f: f64, consts: &PhysicalConstants) -> Result<f64> {
        match self {
            SpectralModel::Bare(res) => lorentzian_s21(res, f),
            SpectralModel::Coupled(sys) => coupled_s21(sys, f, consts),
        }
    }
}

impl From<ResonatorParams> for SpectralModel {
    fn from(r: ResonatorParams) -> Self {
        SpectralModel::Bare(r)
    }
}

impl From<CoupledSystem> for SpectralModel {
    fn from(s: CoupledSystem) -> Self {
        SpectralModel::Coupled(s)
    }
}

/// Seeded additive Gaussian noise in dB. A zero sigma leaves `values`
/// untouched.
pub fn add_noise_db(values: &mut [f64], sigma_db: f64, rng: &mut ChaCha8Rng) -> Result<()> {
    check(
        sigma_db >= 0.0,
        "noise_sigma_db",
        sigma_db,
        "noise_sigma_db >= 0 dB",
    )?;
    if sigma_db == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma_db).expect("sigma checked above");
    for v in values.iter_mut() {
        *v += normal.sample(rng);
    }
    Ok(())
}

/// Evaluate `model` on `grid` and add seeded Gaussian noise.
pub fn spectrum_from_model(
    model: &SpectralModel,
    grid: &[f64],
    noise_sigma_db: f64,
    seed: u64,
    consts: &PhysicalConstants,
) -> Result<Spectrum> {
    if grid.is_empty() {
        return Err(Error::InvalidSpectrum("empty frequency grid".into()));
    }
    check(
        noise_sigma_db >= 0.0,
        "noise_sigma_db",
        noise_sigma_db,
        "noise_sigma_db >= 0 dB",
    )?;
    let mut values = grid
        .iter()
        .map(|&f| model.s21_db(f, consts))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_noise_db(&mut values, noise_sigma_db, &mut rng)?;
    Spectrum::new(grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{to_angular, to_hz};
    use crate::peaks::find_peaks;

    const C: PhysicalConstants = PhysicalConstants::CODATA2018;

    fn fig1_res() -> ResonatorParams {
        ResonatorParams::bare(7.7553e9, 20000.0, 16.5).unwrap()
    }

    fn system(g_hz: f64, gamma_hz: f64, kappa_q: f64, b: f64) -> CoupledSystem {
        let res = ResonatorParams::bare(7.7522e9, kappa_q, 33.5).unwrap();
        CoupledSystem::new(
            res,
            to_angular(g_hz),
            to_angular(gamma_hz),
            FieldPoint::new(b, 0.276).unwrap(),
            SpinSpecies::dpph(),
        )
        .unwrap()
    }

    #[test]
    fn lorentzian_peak_value() {
        let r = fig1_res();
        assert_eq!(lorentzian_s21(&r, r.f0()).unwrap(), -16.5);
    }

    #[test]
    fn lorentzian_half_power_point() {
        let r = fig1_res();
        // Exact upper half-power root of Q (f/f0 - f0/f) = 1.
        let e = 1.0 / (2.0 * r.q_loaded());
        let root = r.f0() * (e + (1.0 + e * e).sqrt());
        let at_root = lorentzian_s21(&r, root).unwrap();
        assert!((at_root + 16.5 + 10.0 * 2f64.log10()).abs() < 1e-9);
        let approx = lorentzian_s21(&r, r.f0() + r.f0() / (2.0 * r.q_loaded())).unwrap();
        assert!((approx + 19.5103).abs() < 1e-3, "{approx}");
    }

    #[test]
    fn lorentzian_at_half_frequency() {
        let r = fig1_res();
        let v = lorentzian_s21(&r, r.f0() / 2.0).unwrap();
        let q = r.q_loaded();
        let closed = -16.5 - 10.0 * (1.0 + 2.25 * q * q).log10();
        assert!((v - closed).abs() < 1e-9);
    }

    #[test]
    fn lorentzian_rejects_nonpositive_frequency() {
        assert!(lorentzian_s21(&fig1_res(), 0.0).is_err());
        assert!(lorentzian_s21(&fig1_res(), -1.0).is_err());
    }

    #[test]
    fn lorentzian_inversion_symmetry() {
        let r = fig1_res();
        for k in 1..50 {
            let f = r.f0() * (0.9 + 0.004 * k as f64);
            let a = lorentzian_s21(&r, f).unwrap();
            let b = lorentzian_s21(&r, r.f0() * r.f0() / f).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn branches_on_resonance() {
        let sys = system(39e6, 14e6, 16000.0, 0.276);
        let (lo, hi) = rabi_branches(&sys, &C);
        let f0 = 7.7522e9;
        assert!((to_hz(lo) - (f0 - 39e6)).abs() < 1e-3);
        assert!((to_hz(hi) - (f0 + 39e6)).abs() < 1e-3);
    }

    #[test]
    fn branches_decoupled() {
        let d = to_angular(50e6);
        let (lo, hi) = rabi_branches_at(1e10, d, 0.0);
        assert_eq!(lo, 1e10);
        assert!((hi - (1e10 + d)).abs() <= 1e-15 * hi);
    }

    #[test]
    fn branches_detuned_example() {
        let w0 = to_angular(7.7522e9);
        let (lo, hi) = rabi_branches_at(w0, to_angular(30e6), to_angular(39e6));
        let sep = (30e6f64.powi(2) + 4.0 * 39e6f64.powi(2)).sqrt();
        assert!((to_hz(hi - lo) - sep).abs() < 1e-3);
        assert!((sep - 83.570e6).abs() < 1e3);
        assert!(
            (to_hz(lo - w0) + 26.785e6).abs() < 1e3,
            "{}",
            to_hz(lo - w0)
        );
        assert!((to_hz(hi - w0) - 56.785e6).abs() < 1e3);
    }

    #[test]
    fn coupled_reduces_to_lorentzian() {
        let sys = system(0.0, 14e6, 16000.0, 0.28);
        let res = *sys.resonator();
        let grid = linear_grid(7.70e9, 7.80e9, 2001).unwrap();
        for f in grid {
            let a = coupled_s21(&sys, f, &C).unwrap();
            let b = lorentzian_s21(&res, f).unwrap();
            assert!((a - b).abs() < 1e-9, "{f}: {a} vs {b}");
        }
    }

    fn maxima_hz(sys: &CoupledSystem, half_span: f64, step: f64) -> Vec<f64> {
        let f0 = sys.resonator().f0();
        let n = (2.0 * half_span / step).round() as usize + 1;
        let grid: Vec<f64> = (0..n).map(|i| f0 - half_span + i as f64 * step).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&f| coupled_s21(sys, f, &C).unwrap())
            .collect();
        find_peaks(&grid, &vals, 1e-6)
            .into_iter()
            .map(|p| p.x)
            .collect()
    }

    /// Maxima of |t|^2 for the linear-detuning lineshape at zero detuning:
    /// delta^2 = -gamma^2 + sqrt((C + gamma^2)^2 - s^2 gamma^2) with
    /// C = g^2 + a gamma and s = a + gamma, a = kappa/2.
    fn analytic_half_separation(g: f64, gamma: f64, a: f64) -> f64 {
        let c = g * g + a * gamma;
        let s = a + gamma;
        (-gamma * gamma + ((c + gamma * gamma).powi(2) - s * s * gamma * gamma).sqrt()).sqrt()
    }

    #[test]
    fn strong_coupling_two_maxima() {
        let sys = system(39e6, 14e6, 16000.0, 0.276);
        let m = maxima_hz(&sys, 100e6, 1e3);
        assert_eq!(m.len(), 2, "{m:?}");
        let sep = m[1] - m[0];
        let kappa_hz = 7.7522e9 / 16000.0;
        let expect = 2.0 * analytic_half_separation(39e6, 14e6, kappa_hz / 2.0);
        // The symmetric cavity term tilts |t|^2 by ~(f - f0)/f0, moving each maximum by kHz.
        assert!((sep - expect).abs() < 2e3, "{sep} vs {expect}");
        // Damping pulls the maxima inward: separation slightly below 2 g_c.
        assert!(sep < 78e6 && sep > 77.5e6, "{sep}");
    }

    #[test]
    fn weak_coupling_single_maximum() {
        let sys = system(1e3, 14e6, 16000.0, 0.276);
        let m = maxima_hz(&sys, 100e6, 1e3);
        assert_eq!(m.len(), 1, "{m:?}");
    }

    #[test]
    fn maxima_converge_to_branches() {
        let g = 39e6;
        let mut last_err = f64::INFINITY;
        for scale in [10.0, 100.0, 1000.0] {
            let sys = system(g, 14e6 / scale, 16000.0 * scale, 0.276);
            let m = maxima_hz(&sys, 60e6, 1.0e3);
            let f0 = 7.7522e9;
            let err = ((m[0] - (f0 - g)).abs()).max((m[1] - (f0 + g)).abs());
            assert!(err < last_err, "{err} !< {last_err}");
            last_err = err;
        }
        assert!(last_err < 0.1e6);
    }

    #[test]
    fn noiseless_spectrum_is_exact() {
        let r = fig1_res();
        let grid = linear_grid(7.75e9, 7.76e9, 101).unwrap();
        let s = spectrum_from_model(&r.into(), &grid, 0.0, 3, &C).unwrap();
        for (f, v) in s.freqs().iter().zip(s.s21_db()) {
            assert_eq!(*v, lorentzian_s21(&r, *f).unwrap());
        }
    }

    #[test]
    fn seeded_spectrum_is_deterministic() {
        let r = fig1_res();
        let grid = linear_grid(7.75e9, 7.76e9, 101).unwrap();
        let a = spectrum_from_model(&r.into(), &grid, 0.1, 42, &C).unwrap();
        let b = spectrum_from_model(&r.into(), &grid, 0.1, 42, &C).unwrap();
        let bits = |s: &Spectrum| s.s21_db().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = spectrum_from_model(&r.into(), &grid, 0.1, 43, &C).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn noise_has_requested_sigma() {
        let r = fig1_res();
        let grid = linear_grid(7.75e9, 7.76e9, 10_000).unwrap();
        let s = spectrum_from_model(&r.into(), &grid, 0.1, 9, &C).unwrap();
        let d: Vec<f64> = s
            .freqs()
            .iter()
            .zip(s.s21_db())
            .map(|(f, v)| v - lorentzian_s21(&r, *f).unwrap())
            .collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
        let sd = var.sqrt();
        assert!((0.09..=0.11).contains(&sd), "{sd}");
    }

    #[test]
    fn empty_grid_rejected() {
        let r = fig1_res();
        assert!(spectrum_from_model(&r.into(), &[], 0.0, 1, &C).is_err());
        assert!(spectrum_from_model(&r.into(), &[7e9, 8e9, 9e9], -0.1, 1, &C).is_err());
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0, 2.0], vec![0.0; 3]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0, 3.0], vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0, 3.0], vec![0.0; 2]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]).is_ok());
    }
}
