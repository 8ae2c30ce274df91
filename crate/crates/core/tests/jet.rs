use qch_core::jet::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn seed_variable_layout() {
    let x = Jet::variable(2.0, 0, 1, 2).unwrap();
    assert_eq!(x.coeffs(), &[2.0, 1.0, 0.0]);
    let y = Jet::variable(0.0, 1, 2, 1).unwrap();
    assert_eq!(y.coeffs(), &[0.0, 0.0, 1.0]);
}

#[test]
fn seed_variable_rejects_bad_shapes() {
    assert_eq!(Jet::variable(1.0, 0, 1, 4), Err(JetError::Order(4)));
    assert_eq!(Jet::variable(1.0, 0, 1, 0), Err(JetError::Order(0)));
    assert!(matches!(Jet::variable(1.0, 2, 2, 2), Err(JetError::VarIndex { .. })));
    assert_eq!(Jet::variable(1.0, 0, 5, 2), Err(JetError::NVars(5)));
}

#[test]
fn coefficient_counts() {
    for nvars in 1..=4usize {
        for order in 0..=3usize {
            let j = Jet::constant(0.0, nvars, order).unwrap();
            let expected = (1..=order).fold(1usize, |acc, k| acc * (nvars + k) / k);
            assert_eq!(j.len(), expected, "nvars {nvars} order {order}");
        }
    }
    assert_eq!(Jet::constant(0.0, 4, 2).unwrap().len(), 15);
    assert_eq!(Jet::constant(0.0, 4, 3).unwrap().len(), 35);
}

#[test]
fn square_at_three() {
    let x = Jet::variable(3.0, 0, 1, 2).unwrap();
    assert_eq!((x * x).coeffs(), &[9.0, 6.0, 1.0]);
}

#[test]
fn self_division_is_one() {
    let x = Jet::variable(1.7, 0, 2, 3).unwrap();
    let y = Jet::variable(-0.4, 1, 2, 3).unwrap();
    let a = x * y + x.exp();
    let q = a.checked_div(&a).unwrap();
    assert!(close(q.value(), 1.0, 1e-15));
    assert!(q.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
}

#[test]
fn division_on_diagonal_is_singular() {
    let xi = Jet::variable(1.0, 0, 2, 2).unwrap();
    let eta = Jet::variable(1.0, 1, 2, 2).unwrap();
    let one = xi.lift(1.0);
    assert_eq!(one.checked_div(&(xi - eta)), Err(JetError::Singular(0.0)));
}

#[test]
fn elementary_functions() {
    let x = Jet::variable(4.0, 0, 1, 2).unwrap();
    let s = x.sqrt().unwrap();
    assert!(close(s.coeffs()[0], 2.0, 1e-15));
    assert!(close(s.coeffs()[1], 0.25, 1e-15));
    assert!(close(s.coeffs()[2], -1.0 / 64.0, 1e-15));

    let one = Jet::variable(1.0, 0, 1, 2).unwrap();
    let l = one.ln().unwrap();
    assert_eq!(l.coeffs(), &[0.0, 1.0, -0.5]);

    let zero = Jet::variable(0.0, 0, 1, 2).unwrap();
    assert!(matches!(zero.sqrt(), Err(JetError::Domain { func: "sqrt", .. })));
    assert!(matches!(zero.ln(), Err(JetError::Domain { func: "ln", .. })));
}

#[test]
fn powers_agree_with_products() {
    let x = Jet::variable(1.3, 0, 3, 3).unwrap();
    let y = Jet::variable(0.6, 2, 3, 3).unwrap();
    let a = x * y + 2.0;
    let cube = a * a * a;
    let p = a.powi(3).unwrap();
    let q = a.powf(3.0).unwrap();
    for ((c, pc), qc) in cube.coeffs().iter().zip(p.coeffs()).zip(q.coeffs()) {
        assert!(close(*pc, *c, 1e-14));
        assert!(close(*qc, *c, 1e-13));
    }
    let inv = a.powi(-2).unwrap() * a * a;
    assert!(close(inv.value(), 1.0, 1e-15));
    assert!(inv.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
}

#[test]
fn derivative_lowers_order() {
    // f = x^2 y at (2, 3): ∂x f = 2xy, ∂y f = x^2
    let x = Jet::variable(2.0, 0, 2, 2).unwrap();
    let y = Jet::variable(3.0, 1, 2, 2).unwrap();
    let f = x * x * y;
    let fx = f.derivative(0).unwrap();
    assert_eq!(fx.order(), 1);
    assert!(close(fx.value(), 12.0, 1e-15));
    assert!(close(fx.d1(0), 6.0, 1e-15));
    assert!(close(fx.d1(1), 4.0, 1e-15));
    assert!(close(f.d2(0, 1), 4.0, 1e-15));
    assert!(close(f.d2(0, 0), 6.0, 1e-15));
    let c = Jet::constant(1.0, 2, 0).unwrap();
    assert_eq!(c.derivative(0), Err(JetError::Exhausted));
}

#[test]
fn checked_arith_rejects_mismatch() {
    let a = Jet::variable(1.0, 0, 2, 2).unwrap();
    let b = Jet::variable(1.0, 0, 2, 1).unwrap();
    assert!(matches!(Jet::arith(ArithOp::Add, &a, &b), Err(JetError::Mismatch(..))));
    let c = Jet::arith(ArithOp::Mul, &a, &a).unwrap();
    assert_eq!(c.value(), 1.0);
    // operators truncate to the common order instead
    assert_eq!((a + b).order(), 1);
}
