use std::fmt;

/// Elementary functions callable from chart expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Ln,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sqrt" => Some(Func::Sqrt),
            "ln" => Some(Func::Ln),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }
}

/// Expression tree. References are resolved indices into the owning chart.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Param(usize),
    /// A previously declared `scalar`.
    Scalar(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    PowInt(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Does the tree mention any coordinate (directly or through a scalar)?
    pub fn depends_on_coords(&self, scalars: &[Scalar]) -> bool {
        match self {
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Coord(_) => true,
            Expr::Scalar(i) => scalars[*i].expr.depends_on_coords(scalars),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on_coords(scalars) || b.depends_on_coords(scalars)
            }
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Call(_, a) => a.depends_on_coords(scalars),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scalar {
    pub name: String,
    pub expr: Expr,
}

/// A 2-form, stored by its strictly increasing index pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSpec {
    pub name: String,
    pub entries: Vec<((usize, usize), Expr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpec {
    pub name: String,
    pub components: Vec<Expr>,
}

/// Second spanning vector of a distribution: another field, or `J` of the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanVector {
    Field(usize),
    JOf(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionSpec {
    pub name: String,
    pub first: usize,
    pub second: SpanVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KillingSpec {
    pub vector: usize,
    pub potential: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CalabiSign {
    Plus,
    Minus,
}

impl fmt::Display for CalabiSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalabiSign::Plus => "+",
            CalabiSign::Minus => "-",
        })
    }
}

/// Expected Calabi 1-form `d(potential)` for `d(w_J ± w_I) = phi ∧ (w_J ± w_I)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalabiSpec {
    pub sign: CalabiSign,
    pub potential: usize,
}

/// Expected Lee form `d(potential)` of a named Hermitian form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeeSpec {
    pub form: usize,
    pub potential: usize,
}

/// How sample points are drawn for some coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleRule {
    /// Uniform in `(lo, hi)`.
    Interval { coord: usize, lo: Expr, hi: Expr },
    /// `(x, y) = r (cos t, sin t)` with r uniform in `(lo, hi)` and t uniform.
    Polar { x: usize, y: usize, lo: Expr, hi: Expr },
}

impl SampleRule {
    pub fn coords(&self) -> Vec<usize> {
        match self {
            SampleRule::Interval { coord, .. } => vec![*coord],
            SampleRule::Polar { x, y, .. } => vec![*x, *y],
        }
    }
}

/// Parsed coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub name: String,
    pub coords: Vec<String>,
    pub params: Vec<(String, f64)>,
    /// Strict inequalities `expr > 0`.
    pub domain: Vec<Expr>,
    /// Sampling box rules (parameter expressions only).
    pub sample: Vec<SampleRule>,
    /// Upper triangle, row-major: (0,0), (0,1), …, (1,1), …
    pub metric: Vec<Expr>,
    pub forms: Vec<FormSpec>,
    pub vectors: Vec<VectorSpec>,
    pub scalars: Vec<Scalar>,
    pub distributions: Vec<DistributionSpec>,
    pub killing: Vec<KillingSpec>,
    pub lee: Vec<LeeSpec>,
    pub calabi: Vec<CalabiSpec>,
}

impl ChartSpec {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub(crate) fn tri_index(dim: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * dim - i * (i + 1) / 2 + j
    }

    /// Metric component `g_ij`; symmetric by construction.
    pub fn metric_entry(&self, i: usize, j: usize) -> &Expr {
        &self.metric[Self::tri_index(self.dim(), i, j)]
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn form_index(&self, name: &str) -> Option<usize> {
        self.forms.iter().position(|f| f.name == name)
    }

    pub fn form(&self, name: &str) -> Option<&FormSpec> {
        self.forms.iter().find(|f| f.name == name)
    }

    pub fn vector_index(&self, name: &str) -> Option<usize> {
        self.vectors.iter().position(|v| v.name == name)
    }

    pub fn scalar_index(&self, name: &str) -> Option<usize> {
        self.scalars.iter().position(|s| s.name == name)
    }

    /// Replace parameter values in place (names must exist).
    pub fn with_params(mut self, values: &[(&str, f64)]) -> Option<Self> {
        for (name, v) in values {
            let slot = self.params.iter_mut().find(|(n, _)| n == name)?;
            slot.1 = *v;
        }
        Some(self)
    }

    /// Plain floating-point evaluation (no derivatives).
    pub fn eval_f64(&self, expr: &Expr, point: &[f64]) -> f64 {
        match expr {
            Expr::Const(c) => *c,
            Expr::Coord(i) => point.get(*i).copied().unwrap_or(f64::NAN),
            Expr::Param(i) => self.params[*i].1,
            Expr::Scalar(i) => self.eval_f64(&self.scalars[*i].expr, point),
            Expr::Add(a, b) => self.eval_f64(a, point) + self.eval_f64(b, point),
            Expr::Sub(a, b) => self.eval_f64(a, point) - self.eval_f64(b, point),
            Expr::Mul(a, b) => self.eval_f64(a, point) * self.eval_f64(b, point),
            Expr::Div(a, b) => self.eval_f64(a, point) / self.eval_f64(b, point),
            Expr::Neg(a) => -self.eval_f64(a, point),
            Expr::PowInt(a, n) => self.eval_f64(a, point).powi(*n),
            Expr::Call(f, a) => {
                let x = self.eval_f64(a, point);
                match f {
                    Func::Sqrt => x.sqrt(),
                    Func::Ln => x.ln(),
                    Func::Exp => x.exp(),
                }
            }
        }
    }
}
