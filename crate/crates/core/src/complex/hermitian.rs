use nalgebra::DMatrix;
use rand::Rng;

use super::{ComplexError, Endo};
use crate::jet::Jet;
use crate::tensor::{CurvaturePack, JetMatrix, Tensor4};

fn ip(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let n = g.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += u[i] * g[(i, j)] * v[j];
        }
    }
    s
}

fn r4(r: &Tensor4, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let n = r.dim();
    let mut s = 0.0;
    for a in 0..n {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..n {
            if y[b] == 0.0 {
                continue;
            }
            for c in 0..n {
                if z[c] == 0.0 {
                    continue;
                }
                for d in 0..n {
                    s += x[a] * y[b] * z[c] * w[d] * r.get(a, b, c, d);
                }
            }
        }
    }
    s
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| m[(i, k)] * v[k]).sum()).collect()
}

/// `R(X, JX, JX, X) / g(X, X)²` (sectional curvature of the J-plane of X).
pub fn holomorphic_sectional_curvature(pack: &CurvaturePack, j: &DMatrix<f64>, x: &[f64]) -> Result<f64, ComplexError> {
    let n2 = ip(&pack.g, x, x);
    if !(n2 > 0.0) {
        return Err(ComplexError::ZeroVector);
    }
    let jx = mat_vec(j, x);
    // stored convention: R(X,Y,X,Y) is the sectional numerator
    Ok(r4(&pack.riemann_low, x, &jx, x, &jx) / (n2 * n2))
}

/// Two spanning vector fields of a rank-2 distribution, as jets at a point.
#[derive(Debug, Clone)]
pub struct Distribution2 {
    pub v1: Vec<Jet>,
    pub v2: Vec<Jet>,
}

impl Distribution2 {
    pub fn new(v1: Vec<Jet>, v2: Vec<Jet>) -> Self {
        Distribution2 { v1, v2 }
    }

    /// `span{v, Jv}`.
    pub fn j_span(j: &Endo, v: Vec<Jet>) -> Self {
        let jv = j.apply_jets(&v);
        let order = jv[0].order();
        Distribution2 { v1: v.iter().map(|c| c.truncate(order)).collect(), v2: jv }
    }

    pub fn values(&self) -> (Vec<f64>, Vec<f64>) {
        (self.v1.iter().map(Jet::value).collect(), self.v2.iter().map(Jet::value).collect())
    }

    /// Gram determinant of the normalized spanning pair.
    pub fn independence(&self, g: &DMatrix<f64>) -> f64 {
        let (a, b) = self.values();
        let (aa, bb, ab) = (ip(g, &a, &a), ip(g, &b, &b), ip(g, &a, &b));
        if aa <= 0.0 || bb <= 0.0 {
            return 0.0;
        }
        1.0 - ab * ab / (aa * bb)
    }

    /// g-orthonormal basis of the span.
    fn span_basis(&self, g: &DMatrix<f64>) -> [Vec<f64>; 2] {
        let (a, b) = self.values();
        let na = ip(g, &a, &a).sqrt();
        let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
        let c = ip(g, &b, &e1);
        let mut e2: Vec<f64> = b.iter().zip(&e1).map(|(x, y)| x - c * y).collect();
        let n2 = ip(g, &e2, &e2).sqrt();
        e2.iter_mut().for_each(|x| *x /= n2);
        [e1, e2]
    }

    /// Largest relative component of `J v_i` orthogonal to the span.
    pub fn invariance_residual(&self, g: &DMatrix<f64>, j: &DMatrix<f64>) -> f64 {
        let [e1, e2] = self.span_basis(g);
        let mut worst = 0.0f64;
        for e in [&e1, &e2] {
            let je = mat_vec(j, e);
            let (c1, c2) = (ip(g, &je, &e1), ip(g, &je, &e2));
            let r: Vec<f64> = (0..je.len()).map(|i| je[i] - c1 * e1[i] - c2 * e2[i]).collect();
            worst = worst.max(ip(g, &r, &r).sqrt() / ip(g, &je, &je).sqrt().max(f64::MIN_POSITIVE));
        }
        worst
    }

    /// Ensure the span is 2-dimensional and J-invariant (1e-10).
    pub fn validate(&self, g: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<(), ComplexError> {
        if g.nrows() != 4 {
            return Err(ComplexError::Degenerate("distributions need a 4-dimensional chart".into()));
        }
        if !(self.independence(g) > 1e-10) {
            return Err(ComplexError::Degenerate("spanning vectors are dependent".into()));
        }
        let r = self.invariance_residual(g, j);
        if !(r <= 1e-10) {
            return Err(ComplexError::NotInvariant(r));
        }
        Ok(())
    }

    /// Orthonormal bases `(e1, Je1)` of the span and `(e3, Je3)` of its complement.
    pub fn frames(&self, g: &DMatrix<f64>, j: &DMatrix<f64>) -> ([Vec<f64>; 2], [Vec<f64>; 2]) {
        let [e1, _] = self.span_basis(g);
        let e2 = mat_vec(j, &e1);
        let n = g.nrows();
        let project = |v: &[f64]| -> Vec<f64> {
            let (c1, c2) = (ip(g, v, &e1), ip(g, v, &e2));
            (0..n).map(|i| v[i] - c1 * e1[i] - c2 * e2[i]).collect()
        };
        // coordinate vector with the largest component off the span
        let e3 = (0..n)
            .map(|k| {
                let mut v = vec![0.0; n];
                v[k] = 1.0;
                project(&v)
            })
            .max_by(|a, b| ip(g, a, a).total_cmp(&ip(g, b, b)))
            .expect("n > 0");
        let m = ip(g, &e3, &e3).sqrt();
        let e3: Vec<f64> = e3.iter().map(|x| x / m).collect();
        let e4 = mat_vec(j, &e3);
        ([e1, e2], [e3, e4])
    }

    /// g-orthogonal projector onto the span, as jets.
    pub fn projector(&self, g: &JetMatrix) -> Result<JetMatrix, ComplexError> {
        let n = g.dim();
        let order = g.order().min(self.v1[0].order()).min(self.v2[0].order());
        let g = g.truncate(order);
        let v = [
            self.v1.iter().map(|c| c.truncate(order)).collect::<Vec<_>>(),
            self.v2.iter().map(|c| c.truncate(order)).collect::<Vec<_>>(),
        ];
        // g v_b as covectors
        let gv: Vec<Vec<Jet>> = v
            .iter()
            .map(|vb| {
                (0..n)
                    .map(|j| {
                        let mut acc = g[(j, 0)] * vb[0];
                        for i in 1..n {
                            acc += g[(j, i)] * vb[i];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let dot = |a: usize, b: usize| {
            let mut acc = v[a][0] * gv[b][0];
            for i in 1..n {
                acc += v[a][i] * gv[b][i];
            }
            acc
        };
        let (g11, g12, g22) = (dot(0, 0), dot(0, 1), dot(1, 1));
        let det = g11 * g22 - g12 * g12;
        if !(det.value().abs() > 1e-14 * (g11.value() * g22.value()).abs()) {
            return Err(ComplexError::Degenerate("spanning vectors are dependent".into()));
        }
        let r = det.recip()?;
        let inv = [[g22 * r, -(g12 * r)], [-(g12 * r), g11 * r]];
        Ok(JetMatrix::from_fn(n, |i, j| {
            let mut acc = g[(0, 0)].zero_like();
            for a in 0..2 {
                for b in 0..2 {
                    acc += v[a][i] * inv[a][b] * gv[b][j];
                }
            }
            acc
        }))
    }
}

/// `I = J` on D and `−J` on D⊥, i.e. `I = J(2P − Id)` with P the g-orthogonal projector onto D.
pub fn opposite_structure(j: &Endo, d: &Distribution2, g: &JetMatrix) -> Result<Endo, ComplexError> {
    let p = d.projector(g)?;
    let n = g.dim();
    let order = p.order().min(j.m.order());
    let p = p.truncate(order);
    let reflect = JetMatrix::from_fn(n, |a, b| p[(a, b)] * 2.0 - if a == b { 1.0 } else { 0.0 });
    Ok(Endo { m: j.m.truncate(order).mul(&reflect) })
}

/// Largest `|K(X) − K(X')| / (1 + max|K|)` over pairs of unit vectors with
/// equal `|X_D|`, built by independent rotations inside D and D⊥.
pub fn qch_residual<R: Rng>(
    pack: &CurvaturePack,
    j: &DMatrix<f64>,
    d: &Distribution2,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64, ComplexError> {
    d.validate(&pack.g, j)?;
    let ([e1, e2], [e3, e4]) = d.frames(&pack.g, j);
    let tau = std::f64::consts::TAU;
    let vec_at = |c: f64, a: f64, b: f64| -> Vec<f64> {
        let s = (1.0 - c * c).max(0.0).sqrt();
        (0..e1.len()).map(|i| c * (a.cos() * e1[i] + a.sin() * e2[i]) + s * (b.cos() * e3[i] + b.sin() * e4[i])).collect()
    };
    let mut worst = 0.0f64;
    let mut kmax = 0.0f64;
    for _ in 0..n_samples {
        let c: f64 = rng.random();
        let x = vec_at(c, rng.random::<f64>() * tau, rng.random::<f64>() * tau);
        let y = vec_at(c, rng.random::<f64>() * tau, rng.random::<f64>() * tau);
        let kx = holomorphic_sectional_curvature(pack, j, &x)?;
        let ky = holomorphic_sectional_curvature(pack, j, &y)?;
        worst = worst.max((kx - ky).abs());
        kmax = kmax.max(kx.abs()).max(ky.abs());
    }
    Ok(worst / (1.0 + kmax))
}

/// Largest violation of
/// `R(X,Y,Z,W) − R(IX,IY,Z,W) = R(IX,Y,IZ,W) + R(IX,Y,Z,IW)`
/// over random unit 4-tuples, divided by `1 + ‖Rm‖_g`.
pub fn gray2_residual<R: Rng>(pack: &CurvaturePack, i: &DMatrix<f64>, n_frames: usize, rng: &mut R) -> f64 {
    let n = pack.dim();
    let r = &pack.riemann_low;
    let unit = |rng: &mut R| -> Vec<f64> {
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|k| (0..n).map(|a| c[a] * pack.frame[(a, k)]).sum()).collect();
        let m = ip(&pack.g, &v, &v).sqrt().max(f64::MIN_POSITIVE);
        v.iter().map(|x| x / m).collect()
    };
    let mut worst = 0.0f64;
    for _ in 0..n_frames {
        let (x, y, z, w) = (unit(rng), unit(rng), unit(rng), unit(rng));
        let (ix, iy, iz, iw) = (mat_vec(i, &x), mat_vec(i, &y), mat_vec(i, &z), mat_vec(i, &w));
        let lhs = r4(r, &x, &y, &z, &w) - r4(r, &ix, &iy, &z, &w);
        let rhs = r4(r, &ix, &y, &iz, &w) + r4(r, &ix, &y, &z, &iw);
        worst = worst.max((lhs - rhs).abs());
    }
    worst / (1.0 + pack.riemann_norm)
}

/// `ρ(X, Y) = ric(JX, Y)`, i.e. `ρ_ab = J^c_a ric_cb`.
pub fn ricci_form(pack: &CurvaturePack, j: &DMatrix<f64>) -> DMatrix<f64> {
    j.transpose() * &pack.ricci
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciFormReport {
    /// `‖ρ(I·, I·) − ρ‖ / (1 + ‖ρ‖)`.
    pub inv_residual: f64,
    /// `min_λ ‖ρ − λ ω_I‖ / (1 + ‖ρ‖)`.
    pub prop_residual: f64,
    pub lambda: f64,
    /// Ricci-flat point: both checks hold trivially.
    pub vacuous: bool,
}

/// I-invariance of the Ricci form and its proportionality to `omega_i`.
pub fn ricci_form_checks(
    pack: &CurvaturePack,
    j: &DMatrix<f64>,
    i: &DMatrix<f64>,
    omega_i: &DMatrix<f64>,
) -> RicciFormReport {
    let rho = ricci_form(pack, j);
    let scale = 1.0 + rho.norm();
    let inv = (i.transpose() * &rho * i - &rho).norm() / scale;
    let ww = omega_i.norm_squared();
    let lambda = if ww > 0.0 { rho.dot(omega_i) / ww } else { 0.0 };
    let prop = (&rho - omega_i * lambda).norm() / scale;
    RicciFormReport { inv_residual: inv, prop_residual: prop, lambda, vacuous: pack.ricci_norm < 1e-9 }
}
