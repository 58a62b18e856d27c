//! Damped Gauss-Newton (Levenberg-Marquardt) minimizer for sums of squared
//! residuals.
//!
//! Columns of the Jacobian are normalized before every solve, so parameters
//! of very different magnitude (a 7.7 GHz center frequency next to a 16 dB
//! insertion loss) are handled without user-supplied scales.

use nalgebra::{DMatrix, DVector};

use super::FitResult;
use crate::error::{Error, Result};

/// A vector of residuals as a function of a parameter vector.
pub trait ResidualModel {
    fn n_residuals(&self) -> usize;

    fn residuals(&self, params: &[f64], out: &mut [f64]);

    /// Write the analytic Jacobian `d r_i / d p_j` into `jac` (one row per
    /// residual). Return `false` to fall back to central differences.
    fn jacobian(&self, _params: &[f64], _jac: &mut DMatrix<f64>) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    /// Analytic when the model provides one, otherwise central differences.
    Auto,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Converged when every `|step_j| / |p_j|` falls below this.
    pub step_tolerance: f64,
    /// Converged when the gradient norm falls below this times its initial value.
    pub gradient_tolerance: f64,
    pub initial_damping: f64,
    /// Relative step for central differences.
    pub fd_step: f64,
    pub jacobian: JacobianMode,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-10,
            gradient_tolerance: 1e-12,
            initial_damping: 1e-6,
            fd_step: 1e-6,
            jacobian: JacobianMode::Auto,
        }
    }
}

const MAX_DAMPING: f64 = 1e30;

/// Central-difference Jacobian. Parameter `j` is stepped by
/// `rel_step * |p_j|`, or `rel_step^2` when it is zero.
pub fn finite_difference_jacobian<M: ResidualModel + ?Sized>(
    model: &M,
    params: &[f64],
    rel_step: f64,
) -> DMatrix<f64> {
    let steps: Vec<f64> = params
        .iter()
        .map(|p| rel_step * p.abs().max(rel_step))
        .collect();
    finite_difference_jacobian_with_steps(model, params, &steps)
}

/// Central-difference Jacobian with an explicit absolute step per parameter.
pub fn finite_difference_jacobian_with_steps<M: ResidualModel + ?Sized>(
    model: &M,
    params: &[f64],
    steps: &[f64],
) -> DMatrix<f64> {
    let m = model.n_residuals();
    let n = params.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut p = params.to_vec();
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for j in 0..n {
        let h = steps[j];
        p[j] = params[j] + h;
        model.residuals(&p, &mut plus);
        p[j] = params[j] - h;
        model.residuals(&p, &mut minus);
        p[j] = params[j];
        // Use the actually representable step width.
        let width = (params[j] + h) - (params[j] - h);
        for i in 0..m {
            jac[(i, j)] = (plus[i] - minus[i]) / width;
        }
    }
    jac
}

fn evaluate_jacobian<M: ResidualModel + ?Sized>(
    model: &M,
    p: &[f64],
    opts: &LmOptions,
    jac: &mut DMatrix<f64>,
) {
    if opts.jacobian == JacobianMode::Auto && model.jacobian(p, jac) {
        return;
    }
    *jac = finite_difference_jacobian(model, p, opts.fd_step);
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimize `sum r_i(p)^2` from `init`. `names` label the parameters in the
/// returned [`FitResult`].
pub fn nlls_minimize<M: ResidualModel + ?Sized>(
    model: &M,
    init: &[f64],
    names: &[&str],
    opts: &LmOptions,
) -> Result<FitResult> {
    assert_eq!(init.len(), names.len(), "one name per parameter");
    let m = model.n_residuals();
    let n = init.len();

    let mut p = init.to_vec();
    let mut r = vec![0.0; m];
    model.residuals(&p, &mut r);
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(Error::NonFiniteResidual { params: p });
    }

    let mut jac = DMatrix::zeros(m, n);
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; m];
    let mut lambda = opts.initial_damping;
    let mut initial_gradient = None;
    let mut converged = cost == 0.0;
    let mut iterations = 0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        evaluate_jacobian(model, &p, opts, &mut jac);

        let scale: Vec<f64> = (0..n)
            .map(|j| {
                let s = jac.column(j).norm();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        let mut js = jac.clone();
        for (j, s) in scale.iter().enumerate() {
            js.column_mut(j).scale_mut(1.0 / s);
        }
        let rv = DVector::from_column_slice(&r);
        let gradient = js.tr_mul(&rv);
        let gnorm = gradient.norm();
        let g0 = *initial_gradient.get_or_insert(gnorm);
        if gnorm == 0.0 || gnorm <= opts.gradient_tolerance * g0 && iterations > 1 {
            converged = true;
            break;
        }
        let normal = js.tr_mul(&js);

        loop {
            let mut damped = normal.clone();
            for j in 0..n {
                damped[(j, j)] += lambda;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                if lambda > MAX_DAMPING {
                    return Err(Error::NotConverged { iterations });
                }
                continue;
            };
            let step_scaled = chol.solve(&(-&gradient));
            let mut small_step = true;
            for j in 0..n {
                let step = step_scaled[j] / scale[j];
                trial[j] = p[j] + step;
                if step.abs() >= opts.step_tolerance * p[j].abs().max(1e-12) {
                    small_step = false;
                }
            }
            model.residuals(&trial, &mut r_trial);
            let trial_cost = sum_sq(&r_trial);
            if trial_cost.is_finite() && trial_cost < cost {
                p.copy_from_slice(&trial);
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-15);
                converged = small_step || cost == 0.0;
                break;
            }
            if small_step {
                // No representable improvement left along the damped direction.
                converged = true;
                break;
            }
            lambda *= 10.0;
            if lambda > MAX_DAMPING {
                return Err(Error::NotConverged { iterations });
            }
        }
    }

    if !converged {
        return Err(Error::NotConverged { iterations });
    }

    evaluate_jacobian(model, &p, opts, &mut jac);
    let std_errs = standard_errors(&jac, cost, m, n);
    Ok(FitResult {
        names: names.iter().map(|s| s.to_string()).collect(),
        params: p,
        std_errs,
        residual_rms: (cost / m.max(1) as f64).sqrt(),
        residual_unit: "",
        iterations,
        converged,
    })
}

/// Standard errors from `s^2 (J^T J)^-1` with `s^2 = SSR / (m - n)`.
pub(crate) fn standard_errors(jac: &DMatrix<f64>, ssr: f64, m: usize, n: usize) -> Vec<f64> {
    let dof = m.saturating_sub(n).max(1) as f64;
    let s2 = ssr / dof;
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = jac.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let mut js = jac.clone();
    for (j, s) in scale.iter().enumerate() {
        js.column_mut(j).scale_mut(1.0 / s);
    }
    let normal = js.tr_mul(&js);
    let inv = match normal.clone().try_inverse() {
        Some(inv) => inv,
        None => match normal.pseudo_inverse(1e-14) {
            Ok(inv) => inv,
            Err(_) => return vec![f64::NAN; n],
        },
    };
    (0..n)
        .map(|j| (s2 * inv[(j, j)].max(0.0)).sqrt() / scale[j])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic;

    impl ResidualModel for Quadratic {
        fn n_residuals(&self) -> usize {
            1
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            out[0] = 3.0 * (p[0] - 2.5);
        }
    }

    struct Rosenbrock;

    impl ResidualModel for Rosenbrock {
        fn n_residuals(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            out[0] = 10.0 * (p[1] - p[0] * p[0]);
            out[1] = 1.0 - p[0];
        }
        fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) -> bool {
            jac[(0, 0)] = -20.0 * p[0];
            jac[(0, 1)] = 10.0;
            jac[(1, 0)] = -1.0;
            jac[(1, 1)] = 0.0;
            true
        }
    }

    struct Blowup;

    impl ResidualModel for Blowup {
        fn n_residuals(&self) -> usize {
            1
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            out[0] = 1.0 / p[0];
        }
    }

    #[test]
    fn quadratic_in_few_iterations() {
        let fit = nlls_minimize(&Quadratic, &[0.0], &["x"], &LmOptions::default()).unwrap();
        assert!(fit.iterations <= 3, "{}", fit.iterations);
        assert!((fit.params[0] - 2.5).abs() < 1e-15);
        assert!(fit.converged);
    }

    #[test]
    fn rosenbrock_from_standard_start() {
        for mode in [JacobianMode::Auto, JacobianMode::FiniteDifference] {
            let opts = LmOptions {
                jacobian: mode,
                ..Default::default()
            };
            let fit = nlls_minimize(&Rosenbrock, &[-1.2, 1.0], &["x", "y"], &opts).unwrap();
            assert!((fit.params[0] - 1.0).abs() < 1e-8, "{:?}", fit.params);
            assert!((fit.params[1] - 1.0).abs() < 1e-8, "{:?}", fit.params);
        }
    }

    #[test]
    fn analytic_and_numeric_jacobian_agree() {
        let p = [0.3, -0.7];
        let mut a = DMatrix::zeros(2, 2);
        assert!(Rosenbrock.jacobian(&p, &mut a));
        let f = finite_difference_jacobian(&Rosenbrock, &p, 1e-6);
        for (x, y) in a.iter().zip(f.iter()) {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-3));
        }
    }

    #[test]
    fn non_finite_start_is_reported() {
        let err = nlls_minimize(&Blowup, &[0.0], &["x"], &LmOptions::default()).unwrap_err();
        assert_eq!(err, Error::NonFiniteResidual { params: vec![0.0] });
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let opts = LmOptions {
            max_iterations: 2,
            ..Default::default()
        };
        let err = nlls_minimize(&Rosenbrock, &[-1.2, 1.0], &["x", "y"], &opts).unwrap_err();
        assert_eq!(err, Error::NotConverged { iterations: 2 });
    }

    #[test]
    fn deterministic() {
        let a = nlls_minimize(
            &Rosenbrock,
            &[-1.2, 1.0],
            &["x", "y"],
            &LmOptions::default(),
        )
        .unwrap();
        let b = nlls_minimize(
            &Rosenbrock,
            &[-1.2, 1.0],
            &["x", "y"],
            &LmOptions::default(),
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
