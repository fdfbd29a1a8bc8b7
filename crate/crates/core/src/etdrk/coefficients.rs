use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-mode ETDRK coefficient functions of `z = L dt`, not yet scaled by `dt`.
///
/// Arrays not needed by the requested order are left empty.
#[derive(Clone, Debug, PartialEq)]
pub struct EtdrkCoefficients {
    pub order: u8,
    /// `exp(z)`
    pub exp: Vec<Complex64>,
    /// `exp(z/2)`
    pub exp_half: Vec<Complex64>,
    /// `(exp(z) - 1) / z`
    pub g1: Vec<Complex64>,
    /// `(exp(z/2) - 1) / z`
    pub g_half: Vec<Complex64>,
    /// `(exp(z) - 1 - z) / z^2`
    pub g2: Vec<Complex64>,
    /// `(-4 - z + exp(z)(4 - 3z + z^2)) / z^3`
    pub g_a: Vec<Complex64>,
    /// `(2 + z + exp(z)(-2 + z)) / z^3`
    pub g_b: Vec<Complex64>,
    /// `(-4 - 3z - z^2 + exp(z)(4 - z)) / z^3`
    pub g_c: Vec<Complex64>,
}

type Formula = fn(Complex64) -> Complex64;

fn f_g1(z: Complex64) -> Complex64 {
    (z.exp() - 1.0) / z
}

fn f_g_half(z: Complex64) -> Complex64 {
    ((z / 2.0).exp() - 1.0) / z
}

fn f_g2(z: Complex64) -> Complex64 {
    (z.exp() - 1.0 - z) / (z * z)
}

fn f_g_a(z: Complex64) -> Complex64 {
    (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / (z * z * z)
}

fn f_g_b(z: Complex64) -> Complex64 {
    (2.0 + z + z.exp() * (z - 2.0)) / (z * z * z)
}

fn f_g_c(z: Complex64) -> Complex64 {
    (-4.0 - 3.0 * z - z * z + z.exp() * (4.0 - z)) / (z * z * z)
}

fn contour_mean(z: &[Complex64], offsets: &[Complex64], f: Formula) -> Vec<Complex64> {
    let scale = 1.0 / offsets.len() as f64;
    z.iter()
        .map(|&zi| {
            let sum: Complex64 = offsets.iter().map(|&o| f(zi + o)).sum();
            // real inputs have real coefficients; drop the roundoff imaginary part
            if zi.im == 0.0 {
                Complex64::new(sum.re * scale, 0.0)
            } else {
                sum * scale
            }
        })
        .collect()
}

/// Evaluates the coefficient functions needed by ETDRK of `order` by
/// averaging the direct formulas over `contour_points` points on the circle
/// of radius `contour_radius` around every `z`.
pub fn phi_coefficients(
    z: &[Complex64],
    order: u8,
    contour_radius: f64,
    contour_points: usize,
) -> Result<EtdrkCoefficients> {
    if order > 4 {
        return Err(Error::InvalidArgument(format!("ETDRK order must be 0..=4, got {order}")));
    }
    if contour_points < 8 {
        return Err(Error::InvalidArgument(format!(
            "at least 8 contour points required, got {contour_points}"
        )));
    }
    if !(contour_radius.is_finite() && contour_radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "contour radius must be positive, got {contour_radius}"
        )));
    }
    let offsets: Vec<Complex64> = (1..=contour_points)
        .map(|j| {
            let theta = 2.0 * PI * (j as f64 - 0.5) / contour_points as f64;
            Complex64::from_polar(contour_radius, theta)
        })
        .collect();
    let eval = |needed: bool, f: Formula| {
        if needed {
            contour_mean(z, &offsets, f)
        } else {
            Vec::new()
        }
    };
    let high = order >= 3;
    Ok(EtdrkCoefficients {
        order,
        exp: z.iter().map(|v| v.exp()).collect(),
        exp_half: if high {
            z.iter().map(|v| (v / 2.0).exp()).collect()
        } else {
            Vec::new()
        },
        g1: eval(order >= 1, f_g1),
        g_half: eval(high, f_g_half),
        g2: eval(order == 2, f_g2),
        g_a: eval(high, f_g_a),
        g_b: eval(high, f_g_b),
        g_c: eval(high, f_g_c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(z: f64, order: u8) -> EtdrkCoefficients {
        phi_coefficients(&[Complex64::new(z, 0.0)], order, 1.0, 16).unwrap()
    }

    #[test]
    fn g1_at_one() {
        let c = single(1.0, 1);
        assert!((c.g1[0].re - (1f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn g1_near_zero_matches_series() {
        let z = 1e-8;
        let c = single(z, 1);
        let series = 1.0 + z / 2.0 + z * z / 6.0;
        assert!((c.g1[0].re - series).abs() < 1e-10);
        assert!((c.g1[0].re - 1.000000005).abs() < 1e-10);
    }

    #[test]
    fn limits_at_zero() {
        let c = single(0.0, 4);
        assert!((c.exp[0].re - 1.0).abs() < 1e-15);
        assert!((c.g1[0].re - 1.0).abs() < 1e-12);
        assert!((c.g_half[0].re - 0.5).abs() < 1e-12);
        for g in [c.g_a[0], c.g_b[0], c.g_c[0]] {
            assert!((g.re - 1.0 / 6.0).abs() < 1e-12, "{g}");
        }
        let c2 = single(0.0, 2);
        assert!((c2.g2[0].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_z_taylor_oracles() {
        // Taylor expansions around zero
        for &z in &[1e-3, -2e-3, 5e-6] {
            let c = single(z, 4);
            let g_a = 1.0 / 6.0 + z / 6.0 + 3.0 * z * z / 40.0;
            let g_b = 1.0 / 6.0 + z / 12.0 + z * z / 40.0;
            let g_c = 1.0 / 6.0 - z * z / 120.0;
            assert!((c.g_a[0].re - g_a).abs() < 1e-9);
            assert!((c.g_b[0].re - g_b).abs() < 1e-9);
            assert!((c.g_c[0].re - g_c).abs() < 1e-9);
            let c2 = single(z, 2);
            assert!((c2.g2[0].re - (0.5 + z / 6.0 + z * z / 24.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn matches_direct_formula_away_from_zero() {
        let zs = [Complex64::new(-3.0, 0.0), Complex64::new(-50.0, 7.0), Complex64::new(0.0, 12.0)];
        let c = phi_coefficients(&zs, 4, 1.0, 16).unwrap();
        for (i, &z) in zs.iter().enumerate() {
            assert!((c.g1[i] - f_g1(z)).norm() < 1e-12 * f_g1(z).norm().max(1.0));
            assert!((c.g_a[i] - f_g_a(z)).norm() < 1e-12);
            assert!((c.g_c[i] - f_g_c(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn strongly_damped_modes_stay_finite() {
        let c = single(-1e7, 4);
        assert!(c.exp[0].re == 0.0);
        for g in [c.g1[0], c.g_half[0], c.g_a[0], c.g_b[0], c.g_c[0]] {
            assert!(g.re.is_finite() && g.re.abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_invalid_arguments() {
        let z = [Complex64::new(0.0, 0.0)];
        assert!(phi_coefficients(&z, 5, 1.0, 16).is_err());
        assert!(phi_coefficients(&z, 2, 1.0, 4).is_err());
        assert!(phi_coefficients(&z, 2, 0.0, 16).is_err());
    }
}
