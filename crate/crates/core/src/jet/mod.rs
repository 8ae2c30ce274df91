//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients of a real function of up to
//! [`MAX_VARS`] variables at a point, truncated at total degree `order`
//! (at most [`MAX_ORDER`]). Coefficients are laid out densely in
//! graded-lexicographic order of their multi-index; the coefficient of
//! `x^α` is `∂^α f / α!`.
//!
//! Products are exact polynomial products truncated at `order`, so every
//! partial derivative up to `order` is exact up to floating point rounding.
//! Elementary functions are applied by composing their univariate Taylor
//! series with the nilpotent part of the argument.

mod layout;
pub mod oracle;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

use layout::Layout;

pub use oracle::{finite_difference_oracle, DerivativeTable};

/// Largest supported number of independent variables.
pub const MAX_VARS: usize = 4;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 3;
/// Dense coefficient count for `MAX_VARS` variables at `MAX_ORDER`.
pub const MAX_COEFFS: usize = 35;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndex { index: usize, nvars: usize },
    #[error("unsupported number of variables {0} (expected 1..={MAX_VARS})")]
    NVars(usize),
    #[error("unsupported jet order {0}")]
    Order(usize),
    #[error("jets disagree in shape: ({0} vars, order {1}) vs ({2} vars, order {3})")]
    Mismatch(usize, usize, usize, usize),
    #[error("singular evaluation: division by a jet with value {0:e}")]
    Singular(f64),
    #[error("domain error: {func} of {value:e}")]
    Domain { func: &'static str, value: f64 },
    #[error("cannot differentiate an order-0 jet")]
    Exhausted,
}

/// Binary arithmetic selector for [`Jet::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary function selector for [`Jet::func`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElemFn {
    Sqrt,
    Ln,
    Exp,
    /// Real power with a fixed exponent.
    Pow(f64),
}

/// Truncated Taylor expansion of a scalar at a point.
#[derive(Clone, Copy)]
pub struct Jet {
    nvars: u8,
    order: u8,
    c: [f64; MAX_COEFFS],
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.order == other.order && self.coeffs() == other.coeffs()
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

fn check_shape(nvars: usize, order: usize) -> Result<(), JetError> {
    if nvars == 0 || nvars > MAX_VARS {
        return Err(JetError::NVars(nvars));
    }
    if order > MAX_ORDER {
        return Err(JetError::Order(order));
    }
    Ok(())
}

impl Jet {
    /// Constant jet (all derivatives zero).
    pub fn constant(value: f64, nvars: usize, order: usize) -> Result<Self, JetError> {
        check_shape(nvars, order)?;
        let mut c = [0.0; MAX_COEFFS];
        c[0] = value;
        Ok(Self { nvars: nvars as u8, order: order as u8, c })
    }

    /// Jet of the coordinate function `x_var` at `value`.
    pub fn variable(value: f64, var: usize, nvars: usize, order: usize) -> Result<Self, JetError> {
        if order == 0 {
            return Err(JetError::Order(order));
        }
        check_shape(nvars, order)?;
        if var >= nvars {
            return Err(JetError::VarIndex { index: var, nvars });
        }
        let mut j = Self::constant(value, nvars, order)?;
        j.c[1 + var] = 1.0;
        Ok(j)
    }

    /// Constant with the same shape as `self`.
    pub fn lift(&self, value: f64) -> Self {
        let mut c = [0.0; MAX_COEFFS];
        c[0] = value;
        Self { nvars: self.nvars, order: self.order, c }
    }

    pub fn zero_like(&self) -> Self {
        self.lift(0.0)
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    fn layout(&self) -> &'static Layout {
        Layout::get(self.nvars(), self.order())
    }

    /// Number of stored coefficients, `C(nvars + order, order)`.
    pub fn len(&self) -> usize {
        self.layout().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dense coefficients in graded-lexicographic order.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.len()]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of the monomial with exponents `alpha`.
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        self.layout().index_of(alpha).map_or(0.0, |i| self.c[i])
    }

    /// Partial derivative `∂^alpha f` (coefficient times `alpha!`).
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let fact: f64 = alpha.iter().map(|&a| factorial(a as usize)).product();
        self.coeff(alpha) * fact
    }

    /// First partial derivative along `var`.
    pub fn d1(&self, var: usize) -> f64 {
        if self.order == 0 || var >= self.nvars() {
            0.0
        } else {
            self.c[1 + var]
        }
    }

    /// Second partial derivative `∂_i ∂_j`.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut alpha = [0u8; MAX_VARS];
        alpha[i] += 1;
        alpha[j] += 1;
        self.partial(&alpha[..self.nvars()])
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.nvars()).map(|v| self.d1(v)).collect()
    }

    /// Jet of `∂f/∂x_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::Exhausted);
        }
        if var >= self.nvars() {
            return Err(JetError::VarIndex { index: var, nvars: self.nvars() });
        }
        let mut out = [0.0; MAX_COEFFS];
        for (dst, &(src, factor)) in self.layout().lift_map(var).iter().enumerate() {
            out[dst] = self.c[src] * factor;
        }
        Ok(Self { nvars: self.nvars, order: self.order - 1, c: out })
    }

    /// Drop every coefficient above total degree `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return *self;
        }
        let keep = Layout::get(self.nvars(), order).len();
        let mut c = [0.0; MAX_COEFFS];
        c[..keep].copy_from_slice(&self.c[..keep]);
        Self { nvars: self.nvars, order: order as u8, c }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.nvars, other.nvars, "jets over different variable counts");
        let order = self.order.min(other.order) as usize;
        (self.truncate(order), other.truncate(order))
    }

    /// Checked binary arithmetic; shapes must agree exactly.
    pub fn arith(op: ArithOp, a: &Jet, b: &Jet) -> Result<Jet, JetError> {
        if a.nvars != b.nvars || a.order != b.order {
            return Err(JetError::Mismatch(a.nvars(), a.order(), b.nvars(), b.order()));
        }
        Ok(match op {
            ArithOp::Add => *a + *b,
            ArithOp::Sub => *a - *b,
            ArithOp::Mul => *a * *b,
            ArithOp::Div => a.checked_div(b)?,
        })
    }

    /// Multiplicative inverse by the truncated geometric series of the
    /// nilpotent part.
    pub fn recip(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(JetError::Singular(a));
        }
        let mut series = [0.0; MAX_ORDER + 1];
        let mut term = 1.0 / a;
        for s in series.iter_mut().take(self.order() + 1) {
            *s = term;
            term *= -1.0 / a;
        }
        Ok(self.compose(&series))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, JetError> {
        let (a, b) = self.common(rhs);
        Ok(a * b.recip()?)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        if self.value() <= 0.0 {
            return Err(JetError::Domain { func: "sqrt", value: self.value() });
        }
        Ok(self.binomial(0.5))
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a <= 0.0 {
            return Err(JetError::Domain { func: "ln", value: a });
        }
        let mut series = [0.0; MAX_ORDER + 1];
        series[0] = a.ln();
        for (n, s) in series.iter_mut().enumerate().skip(1).take(self.order()) {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            *s = sign / (n as f64 * a.powi(n as i32));
        }
        Ok(self.compose(&series))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let mut series = [0.0; MAX_ORDER + 1];
        for (n, s) in series.iter_mut().enumerate().take(self.order() + 1) {
            *s = e / factorial(n);
        }
        self.compose(&series)
    }

    /// Real power; the base must be positive.
    pub fn powf(&self, p: f64) -> Result<Self, JetError> {
        if self.value() <= 0.0 {
            return Err(JetError::Domain { func: "pow", value: self.value() });
        }
        Ok(self.binomial(p))
    }

    /// Integer power by repeated multiplication (negative powers invert first).
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut acc = self.lift(1.0);
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        Ok(acc)
    }

    pub fn func(&self, f: ElemFn) -> Result<Self, JetError> {
        match f {
            ElemFn::Sqrt => self.sqrt(),
            ElemFn::Ln => self.ln(),
            ElemFn::Exp => Ok(self.exp()),
            ElemFn::Pow(p) => self.powf(p),
        }
    }

    fn binomial(&self, p: f64) -> Self {
        let a = self.value();
        let mut series = [0.0; MAX_ORDER + 1];
        let mut coef = 1.0;
        for (n, s) in series.iter_mut().enumerate().take(self.order() + 1) {
            *s = coef * a.powf(p - n as f64);
            coef *= (p - n as f64) / (n as f64 + 1.0);
        }
        self.compose(&series)
    }

    /// `Σ series[n] h^n` where `h` is `self` minus its value.
    fn compose(&self, series: &[f64]) -> Self {
        let mut h = *self;
        h.c[0] = 0.0;
        let mut out = self.lift(series[0]);
        let mut power = self.lift(1.0);
        for &s in series.iter().take(self.order() + 1).skip(1) {
            power = power * h;
            out += power * s;
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let (mut a, b) = self.common(&rhs);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x += y;
        }
        a
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let (mut a, b) = self.common(&rhs);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x -= y;
        }
        a
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = self.common(&rhs);
        let mut c = [0.0; MAX_COEFFS];
        for &(i, j, k) in a.layout().products() {
            c[k as usize] += a.c[i as usize] * b.c[j as usize];
        }
        Jet { nvars: a.nvars, order: a.order, c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for x in self.c.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for x in self.c.iter_mut() {
            *x *= rhs;
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        *self = *self * rhs;
    }
}
