use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use super::TensorError;
use crate::jet::Jet;

/// Square matrix of jets sharing one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMatrix {
    n: usize,
    e: Vec<Jet>,
}

impl JetMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                e.push(f(i, j));
            }
        }
        JetMatrix { n, e }
    }

    pub fn identity_like(n: usize, proto: &Jet) -> Self {
        Self::from_fn(n, |i, j| proto.lift(if i == j { 1.0 } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.e[0].order()
    }

    pub fn values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].value())
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> Self {
        JetMatrix { n: self.n, e: self.e.iter().map(f).collect() }
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    /// Entry-wise partial derivative (one order lower).
    pub fn derivative(&self, var: usize) -> Result<Self, TensorError> {
        let e = self.e.iter().map(|j| j.derivative(var)).collect::<Result<Vec<_>, _>>()?;
        Ok(JetMatrix { n: self.n, e })
    }

    pub fn mul(&self, rhs: &JetMatrix) -> JetMatrix {
        let n = self.n;
        Self::from_fn(n, |i, k| {
            let mut acc = self[(i, 0)] * rhs[(0, k)];
            for j in 1..n {
                acc += self[(i, j)] * rhs[(j, k)];
            }
            acc
        })
    }

    pub fn transpose(&self) -> JetMatrix {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }
}

impl Index<(usize, usize)> for JetMatrix {
    type Output = Jet;
    fn index(&self, (i, j): (usize, usize)) -> &Jet {
        &self.e[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for JetMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Jet {
        &mut self.e[i * self.n + j]
    }
}

/// Gauss-Jordan inversion with partial pivoting on the value part.
pub fn invert_jet_matrix(m: &JetMatrix) -> Result<JetMatrix, TensorError> {
    let n = m.dim();
    let scale = m.values().amax().max(f64::MIN_POSITIVE);
    let mut a = m.clone();
    let mut inv = JetMatrix::identity_like(n, &m[(0, 0)]);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[(r, col)].value().abs().total_cmp(&a[(s, col)].value().abs()))
            .expect("non-empty range");
        let pv = a[(piv, col)].value();
        if !(pv.abs() > 1e-14 * scale) {
            return Err(TensorError::Singular(pv));
        }
        if piv != col {
            for j in 0..n {
                a.e.swap(piv * n + j, col * n + j);
                inv.e.swap(piv * n + j, col * n + j);
            }
        }
        let r = a[(col, col)].recip()?;
        for j in 0..n {
            a[(col, j)] = a[(col, j)] * r;
            inv[(col, j)] = inv[(col, j)] * r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[(row, col)];
            for j in 0..n {
                let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                a[(row, j)] -= f * ac;
                inv[(row, j)] -= f * ic;
            }
        }
    }
    Ok(inv)
}
