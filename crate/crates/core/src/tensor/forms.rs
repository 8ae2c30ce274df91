use super::TensorError;
use crate::jet::Jet;

/// Strictly increasing index tuples of length `p` in `0..n`, lexicographic.
pub fn index_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, p, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, 0, &mut Vec::new(), &mut out);
    out
}

/// Sign of the permutation sorting `idx`, or 0 on a repeated index.
pub fn sort_sign(idx: &[usize]) -> (i32, Vec<usize>) {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return (0, v);
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return (0, v);
    }
    (sign, v)
}

/// Differential p-form with jet coefficients on increasing index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    dim: usize,
    degree: usize,
    coeffs: Vec<Jet>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize, proto: &Jet) -> Self {
        let len = index_tuples(dim, degree).len();
        FormValue { dim, degree, coeffs: vec![proto.zero_like(); len] }
    }

    /// Build from coefficients listed in `index_tuples(dim, degree)` order.
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<Jet>) -> Result<Self, TensorError> {
        let len = index_tuples(dim, degree).len();
        if coeffs.len() != len || degree > dim {
            return Err(TensorError::Degree(format!("{} coefficients for a {degree}-form in dimension {dim}", coeffs.len())));
        }
        Ok(FormValue { dim, degree, coeffs })
    }

    /// 0-form.
    pub fn function(dim: usize, f: Jet) -> Self {
        FormValue { dim, degree: 0, coeffs: vec![f] }
    }

    /// 1-form `Σ a_i dx^i`.
    pub fn one_form(a: Vec<Jet>) -> Self {
        FormValue { dim: a.len(), degree: 1, coeffs: a }
    }

    /// 2-form from the upper triangle of an antisymmetric matrix `w(i, j)`, i < j.
    pub fn two_form(dim: usize, w: impl Fn(usize, usize) -> Jet) -> Self {
        let coeffs = index_tuples(dim, 2).iter().map(|t| w(t[0], t[1])).collect();
        FormValue { dim, degree: 2, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Jet] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.first().map_or(0, Jet::order)
    }

    fn position(&self, sorted: &[usize]) -> usize {
        index_tuples(self.dim, self.degree).iter().position(|t| t == sorted).expect("valid tuple")
    }

    /// Coefficient on an arbitrary index tuple, with antisymmetry applied.
    pub fn component(&self, idx: &[usize]) -> Jet {
        let (s, sorted) = sort_sign(idx);
        let proto = self.coeffs[0];
        if s == 0 {
            return proto.zero_like();
        }
        let c = self.coeffs[self.position(&sorted)];
        if s > 0 {
            c
        } else {
            -c
        }
    }

    /// Value-level antisymmetric matrix of a 2-form.
    pub fn matrix(&self) -> nalgebra::DMatrix<f64> {
        assert_eq!(self.degree, 2, "matrix() needs a 2-form");
        let n = self.dim;
        nalgebra::DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { self.component(&[i, j]).value() })
    }

    pub fn values(&self) -> Vec<f64> {
        self.coeffs.iter().map(Jet::value).collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        FormValue { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.truncate(order)).collect() }
    }

    pub fn scale(&self, f: &Jet) -> Self {
        let order = self.order().min(f.order());
        let f = f.truncate(order);
        FormValue { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.truncate(order) * f).collect() }
    }

    pub fn add(&self, other: &FormValue) -> Result<Self, TensorError> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &FormValue) -> Result<Self, TensorError> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &FormValue, s: f64) -> Result<Self, TensorError> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(TensorError::Degree("adding forms of different shape".into()));
        }
        let order = self.order().min(other.order());
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.truncate(order) + b.truncate(order) * s).collect();
        Ok(FormValue { dim: self.dim, degree: self.degree, coeffs })
    }

    /// Frobenius norm of the value part.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.value().powi(2)).sum::<f64>().sqrt()
    }
}

/// `(dω)_{i0..ip} = Σ_k (-1)^k ∂_{i_k} ω_{i0..î_k..ip}`; result is one order lower.
pub fn exterior_derivative(f: &FormValue) -> Result<FormValue, TensorError> {
    if f.order() == 0 {
        return Err(TensorError::Order);
    }
    if f.degree >= f.dim {
        return Err(TensorError::Degree(format!("d of a {}-form in dimension {}", f.degree, f.dim)));
    }
    let src = index_tuples(f.dim, f.degree);
    let mut coeffs = Vec::new();
    for t in index_tuples(f.dim, f.degree + 1) {
        let mut acc = f.coeffs[0].truncate(f.order() - 1).zero_like();
        for k in 0..t.len() {
            let mut rest = t.clone();
            let var = rest.remove(k);
            let pos = src.iter().position(|s| *s == rest).expect("sub-tuple");
            let d = f.coeffs[pos].derivative(var)?;
            if k % 2 == 0 {
                acc += d;
            } else {
                acc -= d;
            }
        }
        coeffs.push(acc);
    }
    Ok(FormValue { dim: f.dim, degree: f.degree + 1, coeffs })
}

/// Shuffle product; coefficients truncated to the lower of the two orders.
pub fn wedge(f: &FormValue, h: &FormValue) -> Result<FormValue, TensorError> {
    if f.dim != h.dim {
        return Err(TensorError::Degree("wedge of forms in different dimensions".into()));
    }
    let p = f.degree + h.degree;
    if p > f.dim {
        return Err(TensorError::Degree(format!("{}-form ∧ {}-form exceeds dimension {}", f.degree, h.degree, f.dim)));
    }
    let order = f.order().min(h.order());
    let ftup = index_tuples(f.dim, f.degree);
    let htup = index_tuples(f.dim, h.degree);
    let mut out = FormValue::zero(f.dim, p, &f.coeffs[0].truncate(order));
    let otup = index_tuples(f.dim, p);
    for (a, fa) in ftup.iter().zip(&f.coeffs) {
        for (b, hb) in htup.iter().zip(&h.coeffs) {
            let joined: Vec<usize> = a.iter().chain(b).copied().collect();
            let (s, sorted) = sort_sign(&joined);
            if s == 0 {
                continue;
            }
            let pos = otup.iter().position(|t| *t == sorted).expect("sorted tuple");
            let term = fa.truncate(order) * hb.truncate(order);
            if s > 0 {
                out.coeffs[pos] += term;
            } else {
                out.coeffs[pos] -= term;
            }
        }
    }
    Ok(out)
}
