use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping and differencing controls of [`train_newton`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 50,
            fd_step: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonResult {
    pub theta: Vec<f64>,
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

fn fd_steps(theta: &[f64], rel: f64) -> Vec<f64> {
    theta.iter().map(|t| rel * t.abs().max(1.0)).collect()
}

/// Central-difference gradient and Hessian of `f(theta, anchor)` in `theta` at `anchor`.
pub fn finite_difference_derivatives(
    f: &impl Fn(&[f64], &[f64]) -> Result<f64>,
    anchor: &[f64],
    rel_step: f64,
) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
    let n = anchor.len();
    let h = fd_steps(anchor, rel_step);
    let eval = |shift: &[(usize, f64)]| -> Result<f64> {
        let mut x = anchor.to_vec();
        for &(i, s) in shift {
            x[i] += s;
        }
        let v = f(&x, anchor)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective)
        }
    };
    let f0 = eval(&[])?;
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = eval(&[(i, h[i])])?;
        let fm = eval(&[(i, -h[i])])?;
        grad[i] = (fp - fm) / (2.0 * h[i]);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&[(i, h[i]), (j, h[j])])?;
            let fpm = eval(&[(i, h[i]), (j, -h[j])])?;
            let fmp = eval(&[(i, -h[i]), (j, h[j])])?;
            let fmm = eval(&[(i, -h[i]), (j, -h[j])])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((f0, grad, hess))
}

/// Damped Newton minimization with finite-difference derivatives.
///
/// `objective(theta, anchor)` is differentiated in `theta` around
/// `theta == anchor`; objectives without gradient cuts ignore `anchor`.
/// Levenberg damping is added whenever the Hessian is not positive definite
/// and a step that increases the objective is halved until it does not.
pub fn train_newton(
    objective: impl Fn(&[f64], &[f64]) -> Result<f64>,
    theta_init: &[f64],
    options: NewtonOptions,
) -> Result<NewtonResult> {
    let n = theta_init.len();
    if n == 0 {
        return Err(Error::InvalidArgument("nothing to optimize".into()));
    }
    let mut theta = theta_init.to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for iteration in 0..options.max_iterations {
        let (f0, grad, hess) = finite_difference_derivatives(&objective, &theta, options.fd_step)?;
        if best.as_ref().is_none_or(|(b, _)| f0 <= *b) {
            best = Some((f0, theta.clone()));
        }
        let gnorm = grad.norm();
        if gnorm < options.tolerance {
            return Ok(NewtonResult { theta, objective: f0, gradient_norm: gnorm, iterations: iteration });
        }
        let step = damped_step(&hess, &grad);
        let mut scale = 1.0;
        let mut candidate;
        loop {
            candidate = theta.iter().zip(step.iter()).map(|(t, s)| t - scale * s).collect::<Vec<_>>();
            match objective(&candidate, &candidate) {
                Ok(v) if v.is_finite() && v <= f0 + 1e-15 * f0.abs() => break,
                _ if scale < 1e-8 => break,
                _ => scale *= 0.5,
            }
        }
        let step_norm = scale * step.norm();
        theta = candidate;
        if step_norm < options.tolerance {
            let value = objective(&theta, &theta)?;
            if !value.is_finite() {
                return Err(Error::NonFiniteObjective);
            }
            return Ok(NewtonResult { theta, objective: value, gradient_norm: gnorm, iterations: iteration + 1 });
        }
    }
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        best: best.map(|(_, t)| t).unwrap_or(theta),
    })
}

/// Solves `(H + mu I) s = g`, raising `mu` until the matrix is positive definite.
fn damped_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let n = grad.len();
    let scale = hess.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12);
    let mut mu = 0.0;
    loop {
        let damped = hess + DMatrix::identity(n, n) * mu;
        if let Some(chol) = damped.cholesky() {
            return chol.solve(grad);
        }
        mu = if mu == 0.0 { 1e-8 * scale } else { mu * 10.0 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_converges_quickly() {
        let target = [0.3, -1.2, 2.5];
        let f = |t: &[f64], _: &[f64]| -> Result<f64> { Ok(t.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum()) };
        let res = train_newton(f, &[0.0, 0.0, 0.0], NewtonOptions::default()).unwrap();
        assert!(res.iterations <= 3, "{res:?}");
        for (a, b) in res.theta.iter().zip(&target) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn rosenbrock_with_damping() {
        let f = |t: &[f64], _: &[f64]| -> Result<f64> { Ok((1.0 - t[0]).powi(2) + 100.0 * (t[1] - t[0] * t[0]).powi(2)) };
        let res = train_newton(f, &[-1.2, 1.0], NewtonOptions { max_iterations: 200, ..Default::default() }).unwrap();
        assert!((res.theta[0] - 1.0).abs() < 1e-5 && (res.theta[1] - 1.0).abs() < 1e-5, "{res:?}");
    }

    #[test]
    fn gradient_matches_closed_form() {
        let f = |t: &[f64], _: &[f64]| -> Result<f64> { Ok(3.0 * t[0] * t[0] + 2.0 * t[0] * t[1] + t[1] * t[1] - t[1]) };
        let (_, g, h) = finite_difference_derivatives(&f, &[0.5, -0.25], 1e-6).unwrap();
        assert!((g[0] - 2.5).abs() < 1e-6 && (g[1] + 0.5).abs() < 1e-6);
        assert!((h[(0, 0)] - 6.0).abs() < 1e-3 && (h[(0, 1)] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let f = |_: &[f64], _: &[f64]| -> Result<f64> { Ok(f64::NAN) };
        assert_eq!(train_newton(f, &[1.0], NewtonOptions::default()), Err(Error::NonFiniteObjective));
    }

    #[test]
    fn reports_best_iterate_when_out_of_budget() {
        let f = |t: &[f64], _: &[f64]| -> Result<f64> { Ok(t[0].powi(4) + t[0].abs().powf(1.5)) };
        match train_newton(f, &[3.0], NewtonOptions { max_iterations: 2, ..Default::default() }) {
            Err(Error::NotConverged { iterations, best }) => {
                assert_eq!(iterations, 2);
                assert!(best[0].abs() < 3.0);
            }
            other => panic!("{other:?}"),
        }
    }
}
