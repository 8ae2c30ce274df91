//! Isometry dictionary between the linear orthotoric family and the
//! generalized Taub-NUT family, with the volumetric coordinates `(x, y)`.

use super::{CatalogError, OrthotoricParams};
use crate::jet::Jet;

/// Taub-NUT constants attached to `F = aξ + b`, `G = cη + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dictionary {
    pub k: f64,
    pub m: f64,
    pub alpha: f64,
    pub e: f64,
    pub gamma: f64,
}

impl Dictionary {
    /// `|2αM(ke + γ) + 1|`, zero for a consistent dictionary.
    pub fn consistency_residual(&self) -> f64 {
        (2.0 * self.alpha * self.m * (self.k * self.e + self.gamma) + 1.0).abs()
    }
}

fn linear_guard(a: f64, b: f64, c: f64, d: f64) -> Result<(), CatalogError> {
    if !(a > 0.0 && c > 0.0 && d * a - b * c > 0.0) {
        return Err(CatalogError::Params(format!("need a, c > 0 and da - bc > 0, got a={a} b={b} c={c} d={d}")));
    }
    Ok(())
}

pub fn parameter_dictionary(a: f64, b: f64, c: f64, d: f64) -> Result<Dictionary, CatalogError> {
    linear_guard(a, b, c, d)?;
    let det = d * a - b * c;
    Ok(Dictionary {
        k: (a - c) / (a + c),
        m: (c + a) * a * a * c * c / (4.0 * det * det),
        alpha: 2.0 * det / (a * a * c * c),
        e: c * b / (2.0 * a) + a * d / (2.0 * c),
        gamma: (b * c * c - d * a * a) / (2.0 * a * c),
    })
}

fn linear(p: &OrthotoricParams) -> Result<Dictionary, CatalogError> {
    if p.a2 != 0.0 {
        return Err(CatalogError::Params("the dictionary needs the linear family (A = 0)".into()));
    }
    parameter_dictionary(p.a, p.b, p.c, p.d)
}

/// Volumetric coordinates and the residuals of their two algebraic identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Volumetric {
    pub x: f64,
    pub y: f64,
    /// `|√(x²+y²) − ((c/2)ξ − (a/2)η + γ)|`, relative.
    pub radius_residual: f64,
    /// `|c²F − a²G − 2ac√(x²+y²)|`, relative.
    pub difference_residual: f64,
}

pub fn volumetric_map(p: &OrthotoricParams, xi: f64, eta: f64) -> Result<Volumetric, CatalogError> {
    let dict = linear(p)?;
    let (f, g) = (p.a * xi + p.b, p.c * eta + p.d);
    if !(-f * g >= 0.0) {
        return Err(CatalogError::Params(format!("-F*G = {} is negative", -f * g)));
    }
    let x = (-f * g).sqrt();
    let y = p.c / 2.0 * xi + p.a / 2.0 * eta + dict.e;
    let r = x.hypot(y);
    let rad = p.c / 2.0 * xi - p.a / 2.0 * eta + dict.gamma;
    let diff = p.c * p.c * f - p.a * p.a * g;
    Ok(Volumetric {
        x,
        y,
        radius_residual: (r - rad).abs() / (1.0 + r),
        difference_residual: (diff - 2.0 * p.a * p.c * r).abs() / (1.0 + diff.abs()),
    })
}

/// `|LHS − RHS| / (1 + |LHS|)` for
/// `4(ξ−η)/(c²F − a²G) = α(1 + 2αM(ky + √(x²+y²)))/√(x²+y²)`.
/// `m_scale` multiplies M (1 for the identity itself).
pub fn conformal_factor_residual(p: &OrthotoricParams, xi: f64, eta: f64, m_scale: f64) -> Result<f64, CatalogError> {
    let dict = linear(p)?;
    let vol = volumetric_map(p, xi, eta)?;
    let (f, g) = (p.a * xi + p.b, p.c * eta + p.d);
    let r = vol.x.hypot(vol.y);
    let m = dict.m * m_scale;
    let lhs = 4.0 * (xi - eta) / (p.c * p.c * f - p.a * p.a * g);
    let rhs = dict.alpha * (1.0 + 2.0 * dict.alpha * m * (dict.k * vol.y + r)) / r;
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs()))
}

/// Cauchy-Riemann residual of `y + i x` in the isothermal coordinates
/// `x̃ = 2√F/a`, `ỹ = 2√(−G)/c`, computed through jets.
pub fn holomorphy_residual(p: &OrthotoricParams, xi: f64, eta: f64) -> Result<f64, CatalogError> {
    let dict = linear(p)?;
    let (f, g) = (p.a * xi + p.b, p.c * eta + p.d);
    if !(f > 0.0 && g < 0.0) {
        return Err(CatalogError::Params("point outside F > 0 > G".into()));
    }
    let xt = Jet::variable(2.0 * f.sqrt() / p.a, 0, 2, 1)?;
    let yt = Jet::variable(2.0 * (-g).sqrt() / p.c, 1, 2, 1)?;
    // ξ = a x̃²/4 − b/a, η = −(c² ỹ²/4 + d)/c
    let xi_j = xt * xt * (p.a / 4.0) - p.b / p.a;
    let eta_j = -(yt * yt * (p.c * p.c / 4.0) + p.d) * (1.0 / p.c);
    let fj = xi_j * p.a + p.b;
    let gj = eta_j * p.c + p.d;
    let x = (-(fj * gj)).sqrt()?;
    let y = xi_j * (p.c / 2.0) + eta_j * (p.a / 2.0) + dict.e;
    let r1 = y.d1(0) - x.d1(1);
    let r2 = y.d1(1) + x.d1(0);
    let scale = 1.0 + x.gradient().iter().chain(y.gradient().iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(r1.hypot(r2) / scale)
}
