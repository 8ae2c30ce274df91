use num_complex::Complex64;
use qch_core::complex::{del_delbar, hermitian_to_real, i_ddbar_form};
use qch_core::jet::Jet;

fn coords(p: [f64; 4]) -> [Jet; 4] {
    std::array::from_fn(|i| Jet::variable(p[i], i, 4, 2).unwrap())
}

#[test]
fn norm_squared_of_z() {
    let [x, y, _, _] = coords([0.4, -1.1, 0.3, 0.7]);
    let h = del_delbar(&(x * x + y * y)).unwrap();
    assert_eq!(h[0][0], Complex64::new(1.0, 0.0));
    assert_eq!(h[0][1], Complex64::new(0.0, 0.0));
    assert_eq!(h[1][1], Complex64::new(0.0, 0.0));
    // standard form: i dz∧dz̄ = 2 dx∧dy
    let w = hermitian_to_real(&h);
    assert_eq!(w[(0, 1)], 2.0);
}

#[test]
fn fubini_study_line() {
    let p = [0.4, -1.1, 0.3, 0.7];
    let [_, _, a, b] = coords(p);
    let f = (a * a + b * b + 1.0).ln().unwrap();
    let h = del_delbar(&f).unwrap();
    let r2 = p[2] * p[2] + p[3] * p[3];
    assert!((h[1][1].re - 1.0 / (1.0 + r2).powi(2)).abs() < 1e-15);
    assert!(h[1][1].im.abs() < 1e-15);
}

#[test]
fn mixed_terms_are_conjugate() {
    let [x1, y1, x2, y2] = coords([0.4, -1.1, 0.3, 0.7]);
    // |z|²|u|² + Re(z ū)·x1
    let f = (x1 * x1 + y1 * y1) * (x2 * x2 + y2 * y2) + (x1 * x2 + y1 * y2) * x1;
    let h = del_delbar(&f).unwrap();
    assert!((h[1][0] - h[0][1].conj()).norm() < 1e-14);
    let w = i_ddbar_form(&f).unwrap().matrix();
    assert!((w - hermitian_to_real(&h)).norm() < 1e-14);
}
