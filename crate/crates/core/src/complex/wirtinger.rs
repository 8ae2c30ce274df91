//! Wirtinger layer over real coordinates `(x1, y1, x2, y2)` paired as
//! `z = x1 + i y1`, `u = x2 + i y2`.

use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexError;
use crate::jet::Jet;
use crate::tensor::FormValue;

/// Second derivatives `(Re, Im)` of `∂²f/∂z_j∂z̄_k` as jets, two orders below `f`.
fn mixed_hessian(f: &Jet) -> Result<([[Jet; 2]; 2], [[Jet; 2]; 2]), ComplexError> {
    if f.nvars() != 4 || f.order() < 2 {
        return Err(ComplexError::Degenerate("ddbar needs a 4-variable jet of order >= 2".into()));
    }
    let d = |a: usize, b: usize| -> Result<Jet, ComplexError> { Ok(f.derivative(a)?.derivative(b)?) };
    let zero = f.truncate(f.order() - 2).zero_like();
    let mut re = [[zero; 2]; 2];
    let mut im = [[zero; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            re[j][k] = (d(xj, xk)? + d(yj, yk)?) * 0.25;
            im[j][k] = (d(xj, yk)? - d(yj, xk)?) * 0.25;
        }
    }
    Ok((re, im))
}

/// `∂²f/∂z_j∂z̄_k`, the coefficients of `∂∂̄f` on
/// `[[dz∧dz̄, dz∧dū], [du∧dz̄, du∧dū]]`.
pub fn del_delbar(f: &Jet) -> Result<[[Complex64; 2]; 2], ComplexError> {
    let (re, im) = mixed_hessian(f)?;
    let mut h = [[Complex64::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            h[j][k] = Complex64::new(re[j][k].value(), im[j][k].value());
        }
    }
    Ok(h)
}

/// Real antisymmetric coefficients of `i Σ h_jk dz_j∧dz̄_k`.
fn real_form<T>(re: &[[T; 2]; 2], im: &[[T; 2]; 2], zero: T) -> [[T; 4]; 4]
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Neg<Output = T>,
{
    let mut w = [[zero; 4]; 4];
    let mut put = |a: usize, b: usize, c: T| {
        if a != b {
            w[a][b] = w[a][b] + c;
            w[b][a] = w[b][a] - c;
        }
    };
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            // i·dz_j∧dz̄_k = i dx∧dx + dx∧dy − dy∧dx + i dy∧dy
            put(xj, xk, -im[j][k]);
            put(xj, yk, re[j][k]);
            put(yj, xk, -re[j][k]);
            put(yj, yk, -im[j][k]);
        }
    }
    w
}

/// Real 2-form of `i Σ h_jk dz_j∧dz̄_k` for a Hermitian `h`.
pub fn hermitian_to_real(h: &[[Complex64; 2]; 2]) -> DMatrix<f64> {
    let re = [[h[0][0].re, h[0][1].re], [h[1][0].re, h[1][1].re]];
    let im = [[h[0][0].im, h[0][1].im], [h[1][0].im, h[1][1].im]];
    let w = real_form(&re, &im, 0.0);
    DMatrix::from_fn(4, 4, |a, b| w[a][b])
}

/// `i∂∂̄f` as a real 2-form with jet coefficients (two orders below `f`).
pub fn i_ddbar_form(f: &Jet) -> Result<FormValue, ComplexError> {
    let (re, im) = mixed_hessian(f)?;
    let w = real_form(&re, &im, re[0][0].zero_like());
    Ok(FormValue::two_form(4, |a, b| w[a][b]))
}
