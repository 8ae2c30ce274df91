use std::cell::OnceCell;

use super::ast::*;
use super::EvalError;
use crate::jet::Jet;

/// Jet evaluator for one chart at one point. Scalars are evaluated lazily
/// and cached, so an unused scalar never raises a domain error.
pub struct PointEval<'a> {
    chart: &'a ChartSpec,
    point: Vec<f64>,
    order: usize,
    coords: Vec<Jet>,
    scalars: Vec<OnceCell<Result<Jet, EvalError>>>,
}

impl ChartSpec {
    /// Every domain constraint must exceed `margin` at `point`.
    pub fn check_domain(&self, point: &[f64], margin: f64) -> Result<(), EvalError> {
        if point.len() != self.dim() {
            return Err(EvalError::Dimension { expected: self.dim(), got: point.len() });
        }
        for (i, e) in self.domain.iter().enumerate() {
            let v = self.eval_f64(e, point);
            if v.is_nan() || v <= margin {
                return Err(EvalError::Domain { constraint: i, value: v });
            }
        }
        Ok(())
    }

    /// Seed coordinate jets at an in-domain point.
    pub fn at(&self, point: &[f64], order: usize) -> Result<PointEval<'_>, EvalError> {
        self.check_domain(point, 0.0)?;
        let n = self.dim();
        let coords = point
            .iter()
            .enumerate()
            .map(|(i, &x)| if order == 0 { Jet::constant(x, n, 0) } else { Jet::variable(x, i, n, order) })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PointEval {
            chart: self,
            point: point.to_vec(),
            order,
            coords,
            scalars: (0..self.scalars.len()).map(|_| OnceCell::new()).collect(),
        })
    }
}

impl<'a> PointEval<'a> {
    pub fn chart(&self) -> &'a ChartSpec {
        self.chart
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn constant(&self, v: f64) -> Jet {
        self.coords[0].lift(v)
    }

    pub fn scalar(&self, i: usize) -> Result<Jet, EvalError> {
        self.scalars[i].get_or_init(|| self.eval(&self.chart.scalars[i].expr)).clone()
    }

    pub fn eval(&self, e: &Expr) -> Result<Jet, EvalError> {
        Ok(match e {
            Expr::Const(c) => self.constant(*c),
            Expr::Coord(i) => self.coords[*i],
            Expr::Param(i) => self.constant(self.chart.params[*i].1),
            Expr::Scalar(i) => self.scalar(*i)?,
            Expr::Add(a, b) => self.eval(a)? + self.eval(b)?,
            Expr::Sub(a, b) => self.eval(a)? - self.eval(b)?,
            Expr::Mul(a, b) => self.eval(a)? * self.eval(b)?,
            Expr::Div(a, b) => self.eval(a)?.checked_div(&self.eval(b)?)?,
            Expr::Neg(a) => -self.eval(a)?,
            Expr::PowInt(a, n) => self.eval(a)?.powi(*n)?,
            Expr::Call(f, a) => {
                let x = self.eval(a)?;
                match f {
                    Func::Sqrt => x.sqrt()?,
                    Func::Ln => x.ln()?,
                    Func::Exp => x.exp(),
                }
            }
        })
    }
}

/// Evaluate one expression of `chart` as a jet at `point`.
pub fn eval_expr(expr: &Expr, chart: &ChartSpec, point: &[f64], order: usize) -> Result<Jet, EvalError> {
    chart.at(point, order)?.eval(expr)
}
