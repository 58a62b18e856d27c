use nalgebra::DMatrix;

use super::lm::ResidualModel;
use super::FitResult;
use crate::constants::{to_hz, PhysicalConstants};
use crate::ensemble::polarized_fraction;
use crate::error::{check, Error, Result};

/// Residuals `g_c - A sqrt(tanh(h f / 2 k_B T))` over `(T, g_c)` pairs.
/// Units of `A` follow those of the `g_c` values.
pub struct TemperatureResiduals<'a> {
    pub points: &'a [(f64, f64)],
    pub f: f64,
    pub consts: &'a PhysicalConstants,
}

impl TemperatureResiduals<'_> {
    fn basis(&self, t: f64) -> f64 {
        polarized_fraction(self.f, t, self.consts).map_or(f64::NAN, f64::sqrt)
    }
}

impl ResidualModel for TemperatureResiduals<'_> {
    fn n_residuals(&self) -> usize {
        self.points.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (o, &(t, g)) in out.iter_mut().zip(self.points) {
            *o = g - p[0] * self.basis(t);
        }
    }

    fn jacobian(&self, _p: &[f64], jac: &mut DMatrix<f64>) -> bool {
        for (i, &(t, _)) in self.points.iter().enumerate() {
            jac[(i, 0)] = -self.basis(t);
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureFit {
    /// Zero-temperature collective coupling, rad/s.
    pub prefactor: f64,
    /// `prefactor / sqrt(n_total)`, rad/s, when a spin count was supplied.
    pub g_single: Option<f64>,
    pub fit: FitResult,
}

/// Unweighted one-parameter fit of `g_c(T) = A sqrt(tanh(h f / 2 k_B T))`.
///
/// `points` are `(T [K], g_c [rad/s])`. The model is linear in `A`, so the
/// solution is closed form: `A = sum(y x) / sum(x^2)` with `x = sqrt(tanh)`.
pub fn fit_temperature_scaling(
    points: &[(f64, f64)],
    f: f64,
    n_total: Option<f64>,
    consts: &PhysicalConstants,
) -> Result<TemperatureFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: points.len(),
        });
    }
    check(f > 0.0, "f", f, "f > 0 Hz")?;
    if let Some(n) = n_total {
        check(n > 0.0, "n_total", n, "n_total > 0")?;
    }
    let mut xs = Vec::with_capacity(points.len());
    for &(t, g) in points {
        check(t > 0.0, "temperature_k", t, "T > 0 K")?;
        check(g.is_finite(), "g_c", g, "finite coupling")?;
        xs.push(polarized_fraction(f, t, consts)?.sqrt());
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, &(_, y))| x * y).sum();
    let a = sxy / sxx;
    let ssr: f64 = xs
        .iter()
        .zip(points)
        .map(|(x, &(_, y))| (y - a * x).powi(2))
        .sum();
    let m = points.len();
    let se = (ssr / (m - 1) as f64).sqrt() / sxx.sqrt();
    let g_single = n_total.map(|n| a / n.sqrt());

    let mut names = vec!["prefactor_hz".to_string()];
    let mut params = vec![to_hz(a)];
    let mut std_errs = vec![to_hz(se)];
    if let Some(gs) = g_single {
        names.push("g_single_hz".into());
        params.push(to_hz(gs));
        std_errs.push(to_hz(se / n_total.unwrap().sqrt()));
    }
    Ok(TemperatureFit {
        prefactor: a,
        g_single,
        fit: FitResult {
            names,
            params,
            std_errs,
            residual_rms: to_hz((ssr / m as f64).sqrt()),
            residual_unit: "hz",
            iterations: 0,
            converged: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::to_angular;
    use crate::fit::lm::finite_difference_jacobian;
    use crate::fit::lm::{nlls_minimize, LmOptions};

    const C: PhysicalConstants = PhysicalConstants::CODATA2018;
    const F: f64 = 7.7522e9;

    fn curve(prefactor_hz: f64, temps: &[f64]) -> Vec<(f64, f64)> {
        temps
            .iter()
            .map(|&t| {
                (
                    t,
                    to_angular(prefactor_hz) * polarized_fraction(F, t, &C).unwrap().sqrt(),
                )
            })
            .collect()
    }

    #[test]
    fn exact_curve_recovery() {
        let pts = curve(134e6, &[2.0, 5.0, 10.0, 20.0, 40.0]);
        let fit = fit_temperature_scaling(&pts, F, None, &C).unwrap();
        assert!((to_hz(fit.prefactor) / 134e6 - 1.0).abs() < 1e-10);
        assert!(fit.fit.std_errs[0] < 1e-6 * 134e6);
    }

    #[test]
    fn endpoint_values_bracket() {
        let pts = [(2.0, to_angular(39e6)), (40.0, to_angular(9e6))];
        let fit = fit_temperature_scaling(&pts, F, None, &C).unwrap();
        let a = to_hz(fit.prefactor);
        assert!((128e6..=136e6).contains(&a), "{a}");
    }

    #[test]
    fn single_spin_coupling() {
        let pts = curve(134e6, &[2.0, 40.0]);
        let fit = fit_temperature_scaling(&pts, F, Some(6e16), &C).unwrap();
        let gs = to_hz(fit.g_single.unwrap());
        assert!((gs - 0.547).abs() < 0.001, "{gs}");
        assert_eq!(fit.fit.get("g_single_hz"), Some(gs));
    }

    #[test]
    fn scaling_equivariance() {
        let pts = [(2.0, 2.4e8), (5.0, 1.9e8), (10.0, 1.3e8), (40.0, 0.6e8)];
        let base = fit_temperature_scaling(&pts, F, None, &C)
            .unwrap()
            .prefactor;
        let scaled: Vec<_> = pts.iter().map(|&(t, g)| (t, 4.0 * g)).collect();
        assert_eq!(
            fit_temperature_scaling(&scaled, F, None, &C)
                .unwrap()
                .prefactor,
            4.0 * base
        );
    }

    #[test]
    fn matches_iterative_minimizer() {
        let pts = [(2.0, 2.4e8), (5.0, 1.9e8), (10.0, 1.3e8), (40.0, 0.6e8)];
        let closed = fit_temperature_scaling(&pts, F, None, &C).unwrap();
        let model = TemperatureResiduals {
            points: &pts,
            f: F,
            consts: &C,
        };
        let it = nlls_minimize(&model, &[1e8], &["a"], &LmOptions::default()).unwrap();
        assert!((it.params[0] / closed.prefactor - 1.0).abs() < 1e-10);
        assert!((to_hz(it.std_errs[0]) / closed.fit.std_errs[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn analytic_jacobian_matches_central_differences() {
        let pts = [(2.0, 2.4e8), (7.0, 1.6e8), (40.0, 0.6e8)];
        let model = TemperatureResiduals {
            points: &pts,
            f: F,
            consts: &C,
        };
        let mut a = DMatrix::zeros(3, 1);
        model.jacobian(&[8e8], &mut a);
        let n = finite_difference_jacobian(&model, &[8e8], 1e-6);
        for i in 0..3 {
            assert!((a[(i, 0)] - n[(i, 0)]).abs() <= 1e-6 * a[(i, 0)].abs());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            fit_temperature_scaling(&[(2.0, 1.0)], F, None, &C),
            Err(Error::InsufficientData { .. })
        ));
        assert!(fit_temperature_scaling(&[(2.0, 1.0), (0.0, 1.0)], F, None, &C).is_err());
    }
}
