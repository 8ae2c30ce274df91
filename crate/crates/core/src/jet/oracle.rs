//! Central finite differences, used as an independent check on jets.

use super::JetError;

/// Value, gradient and Hessian estimated by central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTable {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
}

/// Second-order central-difference table of `f` at `point`.
///
/// Any stencil evaluation that fails (the stencil left the domain of `f`)
/// is reported as a domain error.
pub fn finite_difference_oracle<F, E>(f: F, point: &[f64], h: f64) -> Result<DerivativeTable, JetError>
where
    F: Fn(&[f64]) -> Result<f64, E>,
{
    let n = point.len();
    let eval = |offsets: &[(usize, f64)]| -> Result<f64, JetError> {
        let mut p = point.to_vec();
        for &(i, d) in offsets {
            p[i] += d;
        }
        f(&p).map_err(|_| JetError::Domain { func: "finite-difference stencil", value: h })
    };
    let value = eval(&[])?;
    let mut gradient = vec![0.0; n];
    let mut hessian = vec![vec![0.0; n]; n];
    for i in 0..n {
        let fp = eval(&[(i, h)])?;
        let fm = eval(&[(i, -h)])?;
        gradient[i] = (fp - fm) / (2.0 * h);
        hessian[i][i] = (fp - 2.0 * value + fm) / (h * h);
        for j in 0..i {
            let pp = eval(&[(i, h), (j, h)])?;
            let pm = eval(&[(i, h), (j, -h)])?;
            let mp = eval(&[(i, -h), (j, h)])?;
            let mm = eval(&[(i, -h), (j, -h)])?;
            let d = (pp - pm - mp + mm) / (4.0 * h * h);
            hessian[i][j] = d;
            hessian[j][i] = d;
        }
    }
    Ok(DerivativeTable { value, gradient, hessian })
}
