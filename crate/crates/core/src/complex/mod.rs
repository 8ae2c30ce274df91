//! Almost-complex and Hermitian structures on top of the tensor layer.
//!
//! A 2-form and its endomorphism are related by `w(X, Y) = g(JX, Y)`,
//! i.e. `J = -g⁻¹w`.

mod hermitian;
mod solve;
mod wirtinger;

use nalgebra::DMatrix;
use thiserror::Error;

pub use hermitian::{
    gray2_residual, holomorphic_sectional_curvature, opposite_structure, qch_residual, ricci_form,
    ricci_form_checks, Distribution2, RicciFormReport,
};
pub use solve::{calabi_residual, lee_form_solve, one_form_wedge_mismatch, FormSolve};
pub use wirtinger::{del_delbar, hermitian_to_real, i_ddbar_form};

use crate::dsl::CalabiSign;
use crate::jet::Jet;
use crate::tensor::{FormValue, JetMatrix, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("distribution is not J-invariant (residual {0:e})")]
    NotInvariant(f64),
    #[error("zero vector")]
    ZeroVector,
}

impl From<crate::jet::JetError> for ComplexError {
    fn from(e: crate::jet::JetError) -> Self {
        ComplexError::Tensor(e.into())
    }
}

/// Endomorphism field `J^i_j` as jets at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Endo {
    pub m: JetMatrix,
}

impl Endo {
    /// `J = -g⁻¹w`.
    pub fn from_form(g_inv: &JetMatrix, omega: &FormValue) -> Result<Endo, ComplexError> {
        let n = g_inv.dim();
        if omega.degree() != 2 || omega.dim() != n {
            return Err(ComplexError::Degenerate("expected a 2-form of matching dimension".into()));
        }
        let wm = omega.matrix();
        if wm.determinant().abs() <= 1e-12 * wm.norm().powi(n as i32).max(f64::MIN_POSITIVE) {
            return Err(ComplexError::Degenerate("2-form is degenerate".into()));
        }
        let order = g_inv.order().min(omega.order());
        let gi = g_inv.truncate(order);
        let w = JetMatrix::from_fn(n, |k, j| omega.component(&[k, j]).truncate(order));
        Ok(Endo { m: gi.mul(&w).map(|x| -*x) })
    }

    /// `-g⁻¹w` rescaled by `(-tr(J²)/n)^(-1/2)`, for forms that are a
    /// positive multiple of a Hermitian form.
    pub fn from_form_normalized(g_inv: &JetMatrix, omega: &FormValue) -> Result<Endo, ComplexError> {
        let raw = Endo::from_form(g_inv, omega)?;
        let n = raw.dim();
        let sq = raw.m.mul(&raw.m);
        let mut tr = sq[(0, 0)];
        for i in 1..n {
            tr += sq[(i, i)];
        }
        let lambda2 = tr * (-1.0 / n as f64);
        if !(lambda2.value() > 0.0) {
            return Err(ComplexError::Degenerate("form is not a multiple of a Hermitian form".into()));
        }
        let inv = lambda2.sqrt()?.recip()?;
        Ok(Endo { m: raw.m.map(|x| *x * inv) })
    }

    pub fn from_values(m: &DMatrix<f64>, nvars: usize) -> Result<Endo, ComplexError> {
        let n = m.nrows();
        let proto = Jet::constant(0.0, nvars, 0)?;
        Ok(Endo { m: JetMatrix::from_fn(n, |i, j| proto.lift(m[(i, j)])) })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn values(&self) -> DMatrix<f64> {
        self.m.values()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let j = self.values();
        (0..self.dim()).map(|i| (0..self.dim()).map(|k| j[(i, k)] * v[k]).sum()).collect()
    }

    /// `J v` with jet components (orders truncated to the lower one).
    pub fn apply_jets(&self, v: &[Jet]) -> Vec<Jet> {
        let n = self.dim();
        let order = self.m.order().min(v[0].order());
        (0..n)
            .map(|i| {
                let mut acc = self.m[(i, 0)].truncate(order) * v[0].truncate(order);
                for k in 1..n {
                    acc += self.m[(i, k)].truncate(order) * v[k].truncate(order);
                }
                acc
            })
            .collect()
    }

    /// `‖J² + Id‖ / (1 + ‖J‖²)`.
    pub fn almost_complex_residual(&self) -> f64 {
        let j = self.values();
        let n = self.dim();
        (&j * &j + DMatrix::identity(n, n)).norm() / (1.0 + j.norm_squared())
    }

    /// `‖JᵀgJ − g‖ / (1 + ‖g‖)`.
    pub fn compatibility_residual(&self, g: &DMatrix<f64>) -> f64 {
        let j = self.values();
        (j.transpose() * g * &j - g).norm() / (1.0 + g.norm())
    }

    /// `w(X, Y) = g(JX, Y)` as a 2-form with jet coefficients.
    pub fn kahler_form(&self, g: &JetMatrix) -> FormValue {
        let n = self.dim();
        let order = self.m.order().min(g.order());
        FormValue::two_form(n, |a, b| {
            let mut acc = self.m[(0, a)].truncate(order) * g[(0, b)].truncate(order);
            for c in 1..n {
                acc += self.m[(c, a)].truncate(order) * g[(c, b)].truncate(order);
            }
            acc
        })
    }

    /// Sign of the Pfaffian of the associated form, i.e. whether the
    /// orientation induced by J agrees with the coordinate orientation.
    pub fn orientation(&self, g: &DMatrix<f64>) -> f64 {
        let w = self.values().transpose() * g;
        if self.dim() == 4 {
            (w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]).signum()
        } else {
            w[(0, 1)].signum()
        }
    }
}

/// Normalized Nijenhuis tensor: max over coordinate pairs of
/// `|N(∂_i, ∂_j)|` divided by `1 + ‖J‖·‖∂J‖`.
pub fn nijenhuis_residual(j: &Endo) -> Result<f64, ComplexError> {
    let n = j.dim();
    if j.m.order() == 0 {
        return Err(TensorError::Order.into());
    }
    let v = j.values();
    let dj = |l: usize, k: usize, i: usize| j.m[(k, i)].d1(l);
    let mut djn = 0.0;
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                djn += dj(l, k, i).powi(2);
            }
        }
    }
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in (a + 1)..n {
            let mut s = 0.0;
            for k in 0..n {
                let mut nk = 0.0;
                for l in 0..n {
                    nk += v[(l, a)] * dj(l, k, b) - v[(l, b)] * dj(l, k, a) - v[(k, l)] * (dj(a, l, b) - dj(b, l, a));
                }
                s += nk * nk;
            }
            worst = worst.max(s.sqrt());
        }
    }
    Ok(worst / (1.0 + v.norm() * djn.sqrt()))
}

/// `(L_X J)^i_j = X^k ∂_k J^i_j − J^k_j ∂_k X^i + J^i_k ∂_j X^k`.
pub fn lie_derivative_endo(j: &Endo, x: &[Jet]) -> Result<DMatrix<f64>, ComplexError> {
    let n = j.dim();
    if j.m.order() == 0 || x.iter().any(|c| c.order() == 0) {
        return Err(TensorError::Order.into());
    }
    Ok(DMatrix::from_fn(n, n, |i, jj| {
        let mut s = 0.0;
        for k in 0..n {
            s += x[k].value() * j.m[(i, jj)].d1(k) - j.m[(k, jj)].value() * x[i].d1(k)
                + j.m[(i, k)].value() * x[k].d1(jj);
        }
        s
    }))
}

/// `ω_J ± ω_I`.
pub fn calabi_combination(omega_j: &FormValue, omega_i: &FormValue, sign: CalabiSign) -> Result<FormValue, ComplexError> {
    Ok(match sign {
        CalabiSign::Plus => omega_j.add(omega_i)?,
        CalabiSign::Minus => omega_j.sub(omega_i)?,
    })
}
