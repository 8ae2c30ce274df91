use nalgebra::{DMatrix, DVector};

use super::{calabi_combination, ComplexError};
use crate::dsl::CalabiSign;
use crate::tensor::{exterior_derivative, wedge, FormValue};

/// Least-squares solution of `dψ = c·φ∧ψ` for a 1-form φ.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSolve {
    /// Minimum-norm solution coefficients.
    pub phi: Vec<f64>,
    /// `‖c·φ∧ψ − dψ‖ / (1 + ‖dψ‖)`.
    pub residual: f64,
    /// The wedge map `φ ↦ φ∧ψ` has a kernel at this point.
    pub rank_deficient: bool,
    /// ψ itself vanishes (relative 1e-10).
    pub degenerate: bool,
}

/// Columns: value parts of `dx^k ∧ psi`.
fn wedge_matrix(psi: &FormValue) -> Result<DMatrix<f64>, ComplexError> {
    let n = psi.dim();
    let base = psi.truncate(0);
    let proto = base.coeffs()[0];
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let dx = FormValue::one_form((0..n).map(|i| proto.lift(if i == k { 1.0 } else { 0.0 })).collect());
        cols.push(wedge(&dx, &base)?.values());
    }
    Ok(DMatrix::from_fn(cols[0].len(), n, |r, k| cols[k][r]))
}

fn solve(psi: &FormValue, factor: f64, scale: f64) -> Result<FormSolve, ComplexError> {
    let dpsi = exterior_derivative(psi)?;
    let b = DVector::from_vec(dpsi.values());
    let a = wedge_matrix(psi)? * factor;
    let degenerate = !(psi.norm() > 1e-10 * (1.0 + scale));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (1e-10 * smax).max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let phi = svd.solve(&b, eps).map_err(|e| ComplexError::Degenerate(e.to_string()))?;
    let residual = (&a * &phi - &b).norm() / (1.0 + b.norm());
    Ok(FormSolve { phi: phi.iter().copied().collect(), residual, rank_deficient: rank < psi.dim(), degenerate })
}

/// Lee form θ of a Hermitian form: `dω = 2θ∧ω`.
pub fn lee_form_solve(omega: &FormValue) -> Result<FormSolve, ComplexError> {
    solve(omega, 2.0, omega.norm())
}

/// φ with `d(ω_J ± ω_I) = φ∧(ω_J ± ω_I)`.
pub fn calabi_residual(omega_j: &FormValue, omega_i: &FormValue, sign: CalabiSign) -> Result<FormSolve, ComplexError> {
    let psi = calabi_combination(omega_j, omega_i, sign)?;
    solve(&psi, 1.0, omega_j.norm())
}

/// `‖(φ − target)∧ψ‖ / (1 + ‖target∧ψ‖)`: compares 1-forms modulo the
/// kernel of the wedge map.
pub fn one_form_wedge_mismatch(phi: &[f64], target: &[f64], psi: &FormValue) -> Result<f64, ComplexError> {
    let a = wedge_matrix(psi)?;
    let diff = DVector::from_iterator(phi.len(), phi.iter().zip(target).map(|(p, t)| p - t));
    let t = DVector::from_column_slice(target);
    Ok((&a * diff).norm() / (1.0 + (&a * t).norm()))
}
