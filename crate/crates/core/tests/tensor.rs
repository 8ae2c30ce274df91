use nalgebra::DMatrix;
use qch_core::dsl::{parse_chart, ChartSpec};
use qch_core::jet::Jet;
use qch_core::tensor::*;

fn chart(text: &str) -> ChartSpec {
    parse_chart(text).unwrap()
}

#[test]
fn flat_is_flat() {
    let c = chart("chart f\ncoords a b c d\nmetric\n g[0,0]=1\n g[1,1]=1\n g[2,2]=1\n g[3,3]=1\nend");
    let p = curvature_pack(&c, &[0.3, 0.1, -2.0, 5.0], 2).unwrap();
    assert_eq!(p.g, DMatrix::identity(4, 4));
    assert!(p.gamma.iter().all(|x| *x == 0.0));
    assert_eq!(p.riemann_norm, 0.0);
    assert_eq!(p.scalar, 0.0);
    assert_eq!(p.asd_eigenvalues, Some([0.0; 3]));
}

#[test]
fn inverse_of_diagonal() {
    let proto = Jet::constant(0.0, 4, 2).unwrap();
    let m = JetMatrix::from_fn(4, |i, j| proto.lift(if i == j { (i + 2) as f64 } else { 0.0 }));
    let inv = invert_jet_matrix(&m).unwrap();
    for i in 0..4 {
        assert!((inv[(i, i)].value() - 1.0 / (i + 2) as f64).abs() < 1e-16);
    }
    let z = JetMatrix::from_fn(2, |_, _| Jet::constant(1.0, 2, 1).unwrap());
    assert!(matches!(invert_jet_matrix(&z), Err(TensorError::Singular(_))));
}

#[test]
fn polar_plane_christoffel() {
    let c = chart("chart polar\ncoords r th\ndomain r\nmetric\n g[0,0]=1\n g[1,1]=r^2\nend");
    let p = curvature_pack(&c, &[2.0, 0.4], 2).unwrap();
    assert!((p.gamma(0, 1, 1) + 2.0).abs() < 1e-14);
    assert!((p.gamma(1, 0, 1) - 0.5).abs() < 1e-14);
    assert!(p.riemann_norm < 1e-14);
}

#[test]
fn sphere_christoffel_and_curvature() {
    let th = std::f64::consts::FRAC_PI_3;
    // sin has no DSL primitive; its cubic Taylor polynomial has the same 3-jet at th
    let s = th.sin();
    let co = th.cos();
    let text = format!(
        "chart s2\ncoords th ph\nparams s={s:?} c={co:?} t0={th:?}\nscalar h = th - t0\nscalar sn = s + c*h - s*h^2/2 - c*h^3/6\nmetric\n g[0,0]=1\n g[1,1]=sn^2\nend"
    );
    let c = chart(&text);
    let p = curvature_pack(&c, &[th, 0.0], 2).unwrap();
    assert!((p.gamma(0, 1, 1) + 3f64.sqrt() / 4.0).abs() < 1e-14);
    assert!((p.scalar - 2.0).abs() < 1e-12);
}

#[test]
fn product_of_spheres() {
    // local Taylor model of S²(1) × S²(2) around th1 = th2 = 1
    let (s, c) = (1f64.sin(), 1f64.cos());
    let text = format!(
        "chart s2s2\ncoords a p b q\nparams s={s:?} c={c:?}\n\
         scalar h = a - 1\nscalar k = b - 1\n\
         scalar sa = s + c*h - s*h^2/2 - c*h^3/6\nscalar sb = s + c*k - s*k^2/2 - c*k^3/6\n\
         metric\n g[0,0]=1\n g[1,1]=sa^2\n g[2,2]=4\n g[3,3]=4*sb^2\nend"
    );
    let ch = chart(&text);
    let p = curvature_pack(&ch, &[1.0, 0.2, 1.0, -0.3], 2).unwrap();
    assert!((p.scalar - 2.5).abs() < 1e-12, "{}", p.scalar);
    assert!(p.symmetry_residual() < 1e-12);
    assert!(p.weyl_trace_residual() < 1e-12);
    let asd = p.asd_eigenvalues.unwrap();
    assert!((asd.iter().sum::<f64>()).abs() < 1e-12);
}

#[test]
fn forms_basics() {
    let x = Jet::variable(0.7, 0, 2, 2).unwrap();
    let y = Jet::variable(-0.2, 1, 2, 2).unwrap();
    let one = x.lift(1.0);
    let zero = x.lift(0.0);
    let w = FormValue::one_form(vec![zero, x]);
    let dw = exterior_derivative(&w).unwrap();
    assert_eq!(dw.coeffs()[0].value(), 1.0);
    let a = FormValue::one_form(vec![one, y]);
    assert_eq!(wedge(&a, &a).unwrap().norm(), 0.0);
    let p = Jet::constant(1.0, 4, 1).unwrap();
    let o = p.zero_like();
    let dxdy = FormValue::two_form(4, |i, j| if (i, j) == (0, 1) { p } else { o });
    let dzdw = FormValue::two_form(4, |i, j| if (i, j) == (2, 3) { p } else { o });
    let v = wedge(&dxdy, &dzdw).unwrap();
    assert_eq!(v.coeffs()[0].value(), 1.0);
    assert!(matches!(wedge(&v, &dxdy), Err(TensorError::Degree(_))));
}

#[test]
fn killing_rotation_on_plane() {
    let c = chart("chart pl\ncoords x y\nmetric\n g[0,0]=1\n g[1,1]=1\nvector R = (-y, x)\nend");
    let ev = c.at(&[0.4, 1.3], 2).unwrap();
    let g = metric_from_eval(&ev).unwrap();
    let x: Vec<Jet> = c.vectors[0].components.iter().map(|e| ev.eval(e).unwrap()).collect();
    assert!(lie_derivative_metric(&g, &x).unwrap().norm() < 1e-15);
}
