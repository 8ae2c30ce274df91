//! Pointwise Riemannian geometry over jets.
//!
//! Curvature sign: `riemann_low[a,b,c,d] = g_ae R^e_bcd` with
//! `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`, so the
//! sectional curvature of the plane spanned by X, Y is
//! `R(X,Y,X,Y) / |X∧Y|²` and the round sphere is positive.

mod forms;
mod matrix;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use thiserror::Error;

pub use forms::{exterior_derivative, index_tuples, sort_sign, wedge, FormValue};
pub use matrix::{invert_jet_matrix, JetMatrix};

use crate::dsl::{ChartSpec, EvalError, FormSpec, PointEval};
use crate::jet::{Jet, JetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("metric is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("singular matrix (pivot {0:e})")]
    Singular(f64),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("operation needs jets of order at least 1")]
    Order,
}

/// Metric components as jets at an in-domain point.
pub fn metric_jets(chart: &ChartSpec, point: &[f64], order: usize) -> Result<JetMatrix, TensorError> {
    metric_from_eval(&chart.at(point, order)?)
}

pub fn metric_from_eval(ev: &PointEval) -> Result<JetMatrix, TensorError> {
    let chart = ev.chart();
    let n = chart.dim();
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            upper.push(ev.eval(chart.metric_entry(i, j))?);
        }
    }
    let g = JetMatrix::from_fn(n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        upper[a * n - a * (a + 1) / 2 + b]
    });
    let min = SymmetricEigen::new(g.values()).eigenvalues.min();
    if !(min > 0.0) {
        return Err(TensorError::NotPositiveDefinite(min));
    }
    Ok(g)
}

/// A declared 2-form as jets at the evaluator's point.
pub fn form_from_eval(ev: &PointEval, form: &FormSpec) -> Result<FormValue, TensorError> {
    let n = ev.chart().dim();
    let zero = ev.constant(0.0);
    let mut m = vec![vec![zero; n]; n];
    for ((a, b), e) in &form.entries {
        let v = ev.eval(e)?;
        m[*a][*b] = v;
        m[*b][*a] = -v;
    }
    Ok(FormValue::two_form(n, |a, b| m[a][b]))
}

/// Rank-4 array of values, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Components in a frame whose rows are the frame vectors.
    pub fn in_frame(&self, e: &DMatrix<f64>) -> Tensor4 {
        let n = self.n;
        let mut cur = self.clone();
        // contract one slot at a time; each pass moves the new index to the back
        for _ in 0..4 {
            let mut next = Tensor4::zeros(n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for f in 0..n {
                            let mut s = 0.0;
                            for i in 0..n {
                                s += e[(f, i)] * cur.get(i, a, b, c);
                            }
                            next.set(a, b, c, f, s);
                        }
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

/// Connection data at a point: metric and inverse as jets, Christoffel
/// symbols one order lower.
#[derive(Debug, Clone)]
pub struct Connection {
    pub g: JetMatrix,
    pub g_inv: JetMatrix,
    /// `Γ^k_ij` at index `(k*n + i)*n + j`.
    pub gamma: Vec<Jet>,
}

impl Connection {
    pub fn new(g: JetMatrix) -> Result<Self, TensorError> {
        let g_inv = invert_jet_matrix(&g)?;
        let gamma = christoffel(&g, &g_inv)?;
        Ok(Connection { g, g_inv, gamma })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Jet {
        let n = self.dim();
        &self.gamma[(k * n + i) * n + j]
    }

    pub fn gamma_values(&self) -> Vec<f64> {
        self.gamma.iter().map(Jet::value).collect()
    }
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` as jets one order lower.
pub fn christoffel(g: &JetMatrix, g_inv: &JetMatrix) -> Result<Vec<Jet>, TensorError> {
    let n = g.dim();
    if g.order() == 0 {
        return Err(TensorError::Order);
    }
    let dg = (0..n).map(|l| g.derivative(l)).collect::<Result<Vec<_>, _>>()?;
    let ginv = g_inv.truncate(g.order() - 1);
    // first kind: [ij,l]
    let mut first = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                first.push((dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]) * 0.5);
            }
        }
    }
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = ginv[(k, 0)] * first[(i * n + j) * n];
                for l in 1..n {
                    acc += ginv[(k, l)] * first[(i * n + j) * n + l];
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// `R^a_bcd` as jets two orders below the metric, at index `((a*n+b)*n+c)*n+d`.
pub fn riemann_up(conn: &Connection) -> Result<Vec<Jet>, TensorError> {
    let n = conn.dim();
    let go = conn.gamma[0].order();
    if go == 0 {
        return Err(TensorError::Order);
    }
    let low: Vec<Jet> = conn.gamma.iter().map(|j| j.truncate(go - 1)).collect();
    let gl = |k: usize, i: usize, j: usize| low[(k * n + i) * n + j];
    let mut out = Vec::with_capacity(n * n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut r = conn.gamma(a, d, b).derivative(c)? - conn.gamma(a, c, b).derivative(d)?;
                    for e in 0..n {
                        r += gl(a, c, e) * gl(e, d, b) - gl(a, d, e) * gl(e, c, b);
                    }
                    out.push(r);
                }
            }
        }
    }
    Ok(out)
}

/// Full pointwise curvature data.
#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `Γ^k_ij` at `(k*n + i)*n + j`.
    pub gamma: Vec<f64>,
    pub riemann_low: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub weyl_low: Tensor4,
    /// Rows are a g-orthonormal frame from Gram-Schmidt in coordinate order.
    pub frame: DMatrix<f64>,
    /// Weyl operator on self-dual / anti-self-dual 2-forms of the coordinate
    /// orientation (4-dim only), eigenvalues ascending.
    pub sd_eigenvalues: Option<[f64; 3]>,
    pub asd_eigenvalues: Option<[f64; 3]>,
    pub riemann_norm: f64,
    pub ricci_norm: f64,
    pub weyl_norm: f64,
    /// Ricci tensor as jets (order = metric order − 2), for derivative checks.
    pub ricci_jets: JetMatrix,
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim();
        self.gamma[(k * n + i) * n + j]
    }

    /// Max violation of the pair symmetries and first Bianchi identity,
    /// relative to `1 + max|R|`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim();
        let r = &self.riemann_low;
        let scale = 1.0 + r.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = r.get(a, b, c, d);
                        worst = worst
                            .max((v + r.get(b, a, c, d)).abs())
                            .max((v + r.get(a, b, d, c)).abs())
                            .max((v - r.get(c, d, a, b)).abs())
                            .max((v + r.get(a, c, d, b) + r.get(a, d, b, c)).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Max |g^{ac} W_abcd| relative to `1 + max|W|`.
    pub fn weyl_trace_residual(&self) -> f64 {
        let n = self.dim();
        let w = &self.weyl_low;
        let scale = 1.0 + w.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0f64;
        for b in 0..n {
            for d in 0..n {
                let mut t = 0.0;
                for a in 0..n {
                    for c in 0..n {
                        t += self.g_inv[(a, c)] * w.get(a, b, c, d);
                    }
                }
                worst = worst.max(t.abs());
            }
        }
        worst / scale
    }
}

/// Rows: g-orthonormal frame by Gram-Schmidt over coordinate vectors in order.
pub fn gram_schmidt_frame(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let ip = |u: &[f64], v: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * g[(i, j)] * v[j];
            }
        }
        s
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for e in &rows {
            let c = ip(&v, e);
            for i in 0..n {
                v[i] -= c * e[i];
            }
        }
        let norm = ip(&v, &v).sqrt();
        rows.push(v.iter().map(|x| x / norm).collect());
    }
    DMatrix::from_fn(n, n, |a, i| rows[a][i])
}

/// Orthonormal-frame bases of Λ⁺ and Λ⁻ as antisymmetric 4×4 matrices.
pub fn self_dual_bases() -> ([[[f64; 4]; 4]; 3], [[[f64; 4]; 4]; 3]) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pairs = [((0, 1), (2, 3)), ((0, 2), (3, 1)), ((0, 3), (1, 2))];
    let mut sd = [[[0.0; 4]; 4]; 3];
    let mut asd = [[[0.0; 4]; 4]; 3];
    for (k, ((a, b), (c, d))) in pairs.into_iter().enumerate() {
        for (m, sign) in [(&mut sd[k], 1.0), (&mut asd[k], -1.0)] {
            m[a][b] = s;
            m[b][a] = -s;
            m[c][d] = sign * s;
            m[d][c] = -sign * s;
        }
    }
    (sd, asd)
}

/// `M_AB = ½ A_ij W_ijkl B_kl` on a 3-dim block, frame components.
fn weyl_block(w: &Tensor4, basis: &[[[f64; 4]; 4]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|p, q| {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if basis[p][i][j] == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    for l in 0..4 {
                        s += basis[p][i][j] * w.get(i, j, k, l) * basis[q][k][l];
                    }
                }
            }
        }
        0.5 * s
    })
}

fn sorted_eigs(m: Matrix3<f64>) -> [f64; 3] {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    [e[0], e[1], e[2]]
}

impl CurvaturePack {
    pub fn from_connection(conn: &Connection) -> Result<Self, TensorError> {
        let n = conn.dim();
        let rup = riemann_up(conn)?;
        let ro = rup[0].order();
        let g = conn.g.values();
        let g_inv = conn.g_inv.values();
        let mut riemann_low = Tensor4::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = 0.0;
                        for e in 0..n {
                            s += g[(a, e)] * rup[((e * n + b) * n + c) * n + d].value();
                        }
                        riemann_low.set(a, b, c, d, s);
                    }
                }
            }
        }
        let ricci_jets = JetMatrix::from_fn(n, |b, d| {
            let mut acc = rup[b * n * n + d];
            for a in 1..n {
                acc += rup[((a * n + b) * n + a) * n + d];
            }
            acc.truncate(ro)
        });
        let ricci = ricci_jets.values();
        let ricci = (&ricci + ricci.transpose()) * 0.5;
        let scalar = (&g_inv * &ricci).trace();

        let mut weyl_low = riemann_low.clone();
        if n > 2 {
            let nf = n as f64;
            let p = (&ricci - &g * (scalar / (2.0 * (nf - 1.0)))) / (nf - 2.0);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let kn = p[(a, c)] * g[(b, d)] + p[(b, d)] * g[(a, c)]
                                - p[(a, d)] * g[(b, c)]
                                - p[(b, c)] * g[(a, d)];
                            weyl_low.set(a, b, c, d, riemann_low.get(a, b, c, d) - kn);
                        }
                    }
                }
            }
        } else {
            weyl_low = Tensor4::zeros(n);
        }

        let frame = gram_schmidt_frame(&g);
        let rf = riemann_low.in_frame(&frame);
        let wf = weyl_low.in_frame(&frame);
        let ricf = &frame * &ricci * frame.transpose();
        let (sd_eigenvalues, asd_eigenvalues) = if n == 4 {
            let (sd, asd) = self_dual_bases();
            (Some(sorted_eigs(weyl_block(&wf, &sd))), Some(sorted_eigs(weyl_block(&wf, &asd))))
        } else {
            (None, None)
        };
        Ok(CurvaturePack {
            gamma: conn.gamma_values(),
            riemann_norm: rf.frobenius(),
            ricci_norm: ricf.norm(),
            weyl_norm: wf.frobenius(),
            g,
            g_inv,
            riemann_low,
            ricci,
            scalar,
            weyl_low,
            frame,
            sd_eigenvalues,
            asd_eigenvalues,
            ricci_jets,
        })
    }
}

/// Curvature of `chart` at `point` (order ≥ 2).
pub fn curvature_pack(chart: &ChartSpec, point: &[f64], order: usize) -> Result<CurvaturePack, TensorError> {
    let conn = Connection::new(metric_jets(chart, point, order.max(2))?)?;
    CurvaturePack::from_connection(&conn)
}

/// `(L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k`.
pub fn lie_derivative_metric(g: &JetMatrix, x: &[Jet]) -> Result<DMatrix<f64>, TensorError> {
    let n = g.dim();
    if g.order() == 0 || x.iter().any(|c| c.order() == 0) {
        return Err(TensorError::Order);
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            s += x[k].value() * g[(i, j)].d1(k)
                + g[(k, j)].value() * x[k].d1(i)
                + g[(i, k)].value() * x[k].d1(j);
        }
        s
    }))
}

/// `∇_k J^i_j = ∂_k J^i_j + Γ^i_kl J^l_j − Γ^l_kj J^i_l`, stored at `(k*n + i)*n + j`.
pub fn covariant_derivative_endomorphism(j: &JetMatrix, gamma: &[f64]) -> Result<Vec<f64>, TensorError> {
    let n = j.dim();
    if j.order() == 0 {
        return Err(TensorError::Order);
    }
    let gm = |k: usize, i: usize, l: usize| gamma[(k * n + i) * n + l];
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                let mut s = j[(i, jj)].d1(k);
                for l in 0..n {
                    s += gm(i, k, l) * j[(l, jj)].value() - gm(l, k, jj) * j[(i, l)].value();
                }
                out.push(s);
            }
        }
    }
    Ok(out)
}
