//! Closed-form displays checked against the chart data. Each function returns
//! a normalized residual; the verifier attaches tolerances.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::complex::{del_delbar, hermitian_to_real};
use crate::jet::Jet;
use crate::tensor::{wedge, FormValue};

fn rel(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Taub-NUT metric in Cartesian coordinates `x1 + i y1 = v e^{iθ1}`,
/// `x2 + i y2 = u e^{iθ2}`, times M, as displayed. Order: `(x1, y1, x2, y2)`.
pub fn taub_nut_cartesian_display(k: f64, point: &[f64]) -> DMatrix<f64> {
    let (u, v, t1, t2) = (point[0], point[1], point[2], point[3]);
    let (x1, y1, x2, y2) = (v * t1.cos(), v * t1.sin(), u * t2.cos(), u * t2.sin());
    let u2 = u * u;
    let v2 = v * v;
    let a1 = 1.0 + (1.0 + k) * u2;
    let a2 = 1.0 + (1.0 - k) * v2;
    let dn = 1.0 + (1.0 + k) * u2 + (1.0 - k) * v2;
    let s = 2.0 + (1.0 - k * k) * (u2 + v2);
    let kp = (1.0 + k) * (1.0 + k);
    let km = (1.0 - k) * (1.0 - k);
    let mut g = DMatrix::zeros(4, 4);
    g[(0, 0)] = 2.0 * a1 + 2.0 * (1.0 - k) * x1 * x1 + 2.0 * ((k - 1.0) * y1 * y1 * a1 + y1 * y1 * kp * u2) / dn;
    g[(0, 1)] = 2.0 * (1.0 - k) * x1 * y1 - 2.0 * kp * u2 * x1 * y1 / dn + 2.0 * a1 * (1.0 - k) * x1 * y1 / dn;
    g[(1, 1)] = 2.0 * a1 + 2.0 * (1.0 - k) * y1 * y1 + 2.0 * ((k - 1.0) * x1 * x1 * a1 + x1 * x1 * kp * u2) / dn;
    g[(0, 2)] = 2.0 * y1 * y2 * s / dn;
    g[(0, 3)] = -2.0 * y1 * x2 * s / dn;
    g[(1, 2)] = -2.0 * x1 * y2 * s / dn;
    g[(1, 3)] = 2.0 * x1 * x2 * s / dn;
    g[(2, 2)] = 2.0 * a2 + 2.0 * (1.0 + k) * x2 * x2 + 2.0 * (-(k + 1.0) * y2 * y2 * a2 + y2 * y2 * km * v2) / dn;
    g[(2, 3)] = 2.0 * (1.0 + k) * x2 * y2 - 2.0 * km * v2 * x2 * y2 / dn + 2.0 * a2 * (1.0 + k) * x2 * y2 / dn;
    g[(3, 3)] = 2.0 * a2 + 2.0 * (1.0 + k) * y2 * y2 + 2.0 * (-(k + 1.0) * x2 * x2 * a2 + x2 * x2 * km * v2) / dn;
    for i in 0..4 {
        for j in 0..i {
            g[(i, j)] = g[(j, i)];
        }
    }
    g
}

/// Compare `M·g` of the polar chart `(u, v, θ1, θ2)`, pushed to Cartesian
/// coordinates, with [`taub_nut_cartesian_display`].
pub fn taub_nut_cartesian_residual(k: f64, m: f64, point: &[f64], g_polar: &DMatrix<f64>) -> f64 {
    let (u, v, t1, t2) = (point[0], point[1], point[2], point[3]);
    let (c1, s1, c2, s2) = (t1.cos(), t1.sin(), t2.cos(), t2.sin());
    // columns: ∂x1, ∂y1, ∂x2, ∂y2 in the (u, v, θ1, θ2) basis
    let push = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, c2, s2, //
            c1, s1, 0.0, 0.0, //
            -s1 / v, c1 / v, 0.0, 0.0, //
            0.0, 0.0, -s2 / u, c2 / u,
        ],
    );
    let cart = push.transpose() * g_polar * &push * m;
    let display = taub_nut_cartesian_display(k, point);
    rel(max_abs(&(cart - &display)), max_abs(&display))
}

/// The four displayed columns `I∂u, I∂v, I∂θ1, I∂θ2` of the exceptional
/// Taub-NUT structure (θ1 column in its consistent form).
pub fn exceptional_i_display(point: &[f64]) -> DMatrix<f64> {
    let (u, v) = (point[0], point[1]);
    let r2 = std::f64::consts::SQRT_2;
    let b = 1.0 + 2.0 * u * u;
    let mut i = DMatrix::zeros(4, 4);
    i[(3, 0)] = -r2 * b / u;
    i[(3, 1)] = -2.0 * r2 * v;
    i[(2, 1)] = r2 / v;
    i[(0, 2)] = r2 * u * v * v / b;
    i[(1, 2)] = -r2 / 2.0 * v;
    i[(0, 3)] = u / (r2 * b);
    i
}

/// Displayed half-plane structure, columns `I∂x, I∂y, I∂θ1, I∂θ2`.
pub fn half_plane_i_display(point: &[f64]) -> DMatrix<f64> {
    let (x, y) = (point[0], point[1]);
    let b = 1.0 + x * x;
    let mut i = DMatrix::zeros(4, 4);
    i[(2, 0)] = b / x;
    i[(3, 1)] = -1.0;
    i[(2, 1)] = 2.0 * y;
    i[(0, 2)] = -x / b;
    i[(0, 3)] = -2.0 * x * y / b;
    i[(1, 3)] = 1.0;
    i
}

/// `‖display − I‖ / (1 + ‖I‖)` entrywise.
pub fn endo_display_residual(display: &DMatrix<f64>, i: &DMatrix<f64>) -> f64 {
    rel(max_abs(&(display - i)), max_abs(i))
}

/// `‖D² + Id‖` for a displayed endomorphism.
pub fn display_square_residual(display: &DMatrix<f64>) -> f64 {
    let n = display.nrows();
    let sq = display * display + DMatrix::identity(n, n);
    rel(max_abs(&sq), max_abs(display).powi(2))
}

/// `½(ω_J + ω_I)` against `(2v/√2)(1+2u²) dv∧dθ1`.
pub fn exceptional_phi_residual(point: &[f64], omega_j: &DMatrix<f64>, omega_i: &DMatrix<f64>) -> f64 {
    let (u, v) = (point[0], point[1]);
    let half = (omega_j + omega_i) * 0.5;
    let mut display = DMatrix::zeros(4, 4);
    let c = 2.0 * v / std::f64::consts::SQRT_2 * (1.0 + 2.0 * u * u);
    display[(1, 2)] = c;
    display[(2, 1)] = -c;
    rel(max_abs(&(half - &display)), max_abs(&display))
}

/// `dω_I − (4x/(1+x²)) dx∧ω_I` on the half-plane, relative to `‖dω_I‖`.
pub fn half_plane_domega_residual(x: f64, omega_i: &FormValue, d_omega_i: &FormValue) -> Result<f64, crate::tensor::TensorError> {
    let base = omega_i.truncate(0);
    let proto = base.coeffs()[0];
    let dx = FormValue::one_form(vec![proto.lift(4.0 * x / (1.0 + x * x)), proto.lift(0.0), proto.lift(0.0), proto.lift(0.0)]);
    let rhs = wedge(&dx, &base)?;
    let lhs = d_omega_i.truncate(0);
    Ok(rel(lhs.sub(&rhs)?.norm(), lhs.norm()))
}

/// Displayed Burns coefficients of `∂∂̄Φ` on
/// `[[dz∧dz̄, dz∧dū], [du∧dz̄, du∧dū]]` at `(x1, y1, x2, y2)`.
pub fn burns_omega_display(m: f64, point: &[f64]) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(point[0], point[1]);
    let u = Complex64::new(point[2], point[3]);
    let uu = u.norm_sqr();
    [
        [Complex64::new(1.0 + uu, 0.0), z.conj() * u],
        [z * u.conj(), Complex64::new(z.norm_sqr() + m / (1.0 + uu).powi(2), 0.0)],
    ]
}

/// `∂∂̄Φ` from jets against the display, complex coefficients.
pub fn burns_ddbar_residual(m: f64, point: &[f64], phi: &Jet) -> Result<f64, crate::complex::ComplexError> {
    let h = del_delbar(phi)?;
    let d = burns_omega_display(m, point);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..2 {
        for k in 0..2 {
            diff = diff.max((h[j][k] - d[j][k]).norm());
            scale = scale.max(d[j][k].norm());
        }
    }
    Ok(rel(diff, scale))
}

/// Real form of the display against the chart's `omega_J`.
pub fn burns_omega_form_residual(m: f64, point: &[f64], omega_j: &DMatrix<f64>) -> f64 {
    let w = hermitian_to_real(&burns_omega_display(m, point));
    rel(max_abs(&(w - omega_j)), max_abs(omega_j))
}

fn top(f: &FormValue) -> f64 {
    f.coeffs()[0].value()
}

/// `ω²` in units of `dz∧dz̄∧du∧dū` against `2(|z|² + m/(1+|u|²))`.
/// With `dz∧dz̄ = −2i dx∧dy` this unit is `−4 dx1∧dy1∧dx2∧dy2`, and the
/// real form is `i` times the displayed one, so the coefficient is the real top coefficient over 4.
pub fn burns_omega_squared_residual(m: f64, point: &[f64], omega: &FormValue) -> Result<f64, crate::tensor::TensorError> {
    let w = omega.truncate(0);
    let sq = top(&wedge(&w, &w)?) / 4.0;
    let zz = point[0] * point[0] + point[1] * point[1];
    let uu = point[2] * point[2] + point[3] * point[3];
    let expected = 2.0 * (zz + m / (1.0 + uu));
    Ok(rel((sq - expected).abs(), expected.abs()))
}

/// `|ω∧ρ| / (‖ω‖‖ρ‖)`.
pub fn burns_omega_wedge_rho(omega: &FormValue, rho: &FormValue) -> Result<f64, crate::tensor::TensorError> {
    let w = omega.truncate(0);
    let r = rho.truncate(0);
    let scale = w.norm() * r.norm();
    Ok(top(&wedge(&w, &r)?).abs() / scale.max(f64::MIN_POSITIVE))
}

/// `ρ∧ρ = −2(m/N²)² vol` with `vol = ω²/2`.
pub fn burns_rho_wedge_rho(m: f64, point: &[f64], omega: &FormValue, rho: &FormValue) -> Result<f64, crate::tensor::TensorError> {
    let w = omega.truncate(0);
    let r = rho.truncate(0);
    let zz = point[0] * point[0] + point[1] * point[1];
    let uu = point[2] * point[2] + point[3] * point[3];
    let c = m / (zz * (1.0 + uu) + m).powi(2);
    let vol = top(&wedge(&w, &w)?) / 2.0;
    let expected = -2.0 * c * c * vol;
    let got = top(&wedge(&r, &r)?);
    Ok((got - expected).abs() / expected.abs().max(f64::MIN_POSITIVE))
}

/// `i∂∂̄ ln det h` in real form against the chart's `rho`.
pub fn burns_rho_ddbar_residual(log_det: &Jet, rho: &DMatrix<f64>) -> Result<f64, crate::complex::ComplexError> {
    let w = hermitian_to_real(&del_delbar(log_det)?);
    Ok(rel(max_abs(&(w - rho)), max_abs(rho)))
}

/// Pipeline Ricci form `ric(J·,·)` against minus the closed-form `rho`.
pub fn burns_rho_pipeline_residual(pipeline: &DMatrix<f64>, rho: &DMatrix<f64>) -> f64 {
    rel(max_abs(&(pipeline + rho)), max_abs(rho))
}

