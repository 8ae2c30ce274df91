use qch_core::jet::{finite_difference_oracle, JetError};

type R = Result<f64, ()>;

#[test]
fn square_gradient() {
    let t = finite_difference_oracle(|p: &[f64]| -> R { Ok(p[0] * p[0]) }, &[3.0], 1e-4).unwrap();
    assert!((t.gradient[0] - 6.0).abs() < 1e-6);
    assert!((t.hessian[0][0] - 2.0).abs() < 1e-6);
}

#[test]
fn constant_has_no_derivatives() {
    let t = finite_difference_oracle(|_: &[f64]| -> R { Ok(7.5) }, &[1.0, -2.0], 1e-4).unwrap();
    assert!(t.gradient.iter().all(|g| g.abs() < 1e-12));
    assert!(t.hessian.iter().flatten().all(|g| g.abs() < 1e-12));
}

#[test]
fn radius_gradient() {
    let t = finite_difference_oracle(|p: &[f64]| -> R { Ok(p[0].hypot(p[1])) }, &[3.0, 4.0], 1e-4).unwrap();
    assert!((t.gradient[0] - 0.6).abs() < 1e-6);
    assert!((t.gradient[1] - 0.8).abs() < 1e-6);
}

#[test]
fn stencil_outside_domain() {
    let f = |p: &[f64]| if p[0] > 0.0 { Ok(p[0].sqrt()) } else { Err(()) };
    assert!(matches!(finite_difference_oracle(f, &[5e-5], 1e-4), Err(JetError::Domain { .. })));
}
