use qch_core::dsl::*;

const ORTHO: &str = "\
chart ortho
coords xi eta t z
params a=1 b=0 c=1 d=1
scalar F = a*xi + b
scalar G = c*eta + d
domain xi - eta ; F ; -G
metric
  g[0,0] = (xi - eta)/F
  g[1,1] = -(xi - eta)/G
  g[2,2] = (F - G)/(xi - eta)
  g[2,3] = (eta*F - xi*G)/(xi - eta)
  g[3,3] = (eta^2*F - xi^2*G)/(xi - eta)
form omega_J
  w[0,2] = 1
  w[0,3] = eta
  w[1,2] = 1
  w[1,3] = xi
vector X1 = (0, 0, 1, 0)
scalar x = sqrt(-F*G)
end
";

#[test]
fn flat_chart() {
    let c = parse_chart("chart flat\ncoords a b c d\nmetric\n g[0,0]=1\n g[1,1]=1\n g[2,2]=1\n g[3,3]=1\nend\n").unwrap();
    assert_eq!(c.dim(), 4);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(c.eval_f64(c.metric_entry(i, j), &[0.0; 4]), if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn orthotoric_template() {
    let c = parse_chart(ORTHO).unwrap();
    let p = [1.0, -2.0, 0.0, 0.0];
    let e = eval_expr(c.metric_entry(0, 0), &c, &p, 2).unwrap();
    assert!((e.value() - 3.0).abs() < 1e-15);
    assert!((e.d1(0) - (1.0 - 3.0) / 1.0).abs() < 1e-14);
    assert_eq!(c.metric_entry(3, 2), c.metric_entry(2, 3));
    let x = eval_expr(&c.scalars[c.scalar_index("x").unwrap()].expr, &c, &p, 1).unwrap();
    assert!((x.value() - 1.0).abs() < 1e-15);
    let tt = eval_expr(c.metric_entry(2, 2), &c, &p, 0).unwrap();
    assert!((tt.value() - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn sum_gradient() {
    let c = parse_chart("chart p\ncoords xi eta\nmetric\n g[0,0]=1\n g[1,1]=1\nscalar s = xi + eta\nend").unwrap();
    let j = eval_expr(&c.scalars[0].expr, &c, &[1.0, -2.0], 1).unwrap();
    assert_eq!(j.value(), -1.0);
    assert_eq!(j.gradient(), vec![1.0, 1.0]);
}

#[test]
fn domain_violation() {
    let c = parse_chart(ORTHO).unwrap();
    let err = eval_expr(c.metric_entry(0, 0), &c, &[1.0, 1.0, 0.0, 0.0], 1).unwrap_err();
    assert!(matches!(err, EvalError::Domain { constraint: 0, .. }));
}

#[test]
fn unknown_identifier() {
    let err = parse_chart("chart p\ncoords x y z t\nmetric\n  g[0,0] = w + 1\nend").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
    assert_eq!((err.line, err.col), (4, 12));
}

#[test]
fn errors_carry_positions() {
    let e = parse_chart("chart p\ncoords x y\nmetric\n  g[0,2] = 1\nend").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Dimension(_)));
    let e = parse_chart("chart p\ncoords x y\nmetric\n  g[0,0] = 1\n  g[0,0] = 2\nend").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Duplicate(_)));
    let e = parse_chart("chart p\ncoords x y\nmetric\n  g[0,0] = (1 + x\nend").unwrap_err();
    assert_eq!((e.line, e.col), (4, 18));
    let e = parse_chart("chart p\ncoords x y\nmetric\n  g[0,0] = x^1.5\nend").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    let e = parse_chart("chart p\ncoords x y\nvector V = (1, 0, 0)\nmetric\nend").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Dimension(_)));
    let e = parse_chart("chart p\ncoords x y\nparams x=1\nmetric\nend").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Duplicate(_)));
}

#[test]
fn round_trip_and_precedence() {
    let c = parse_chart(ORTHO).unwrap();
    let text = print_chart(&c);
    let c2 = parse_chart(&text).unwrap();
    assert_eq!(c, c2);
    assert_eq!(print_chart(&c2), text);
    let c = parse_chart("chart p\ncoords x y\nmetric\n g[0,0] = -x^2 - (1 - y) / (2*x) ^ 3\nend").unwrap();
    let printed = print_expr(c.metric_entry(0, 0), &c);
    assert_eq!(printed, "-x^2 - (1 - y)/(2*x)^3");
    assert_eq!(c.eval_f64(c.metric_entry(0, 0), &[1.0, 0.0]), -1.0 - 1.0 / 8.0);
}

#[test]
fn form_lower_triangle_negates() {
    let c = parse_chart("chart p\ncoords x y\nmetric\n g[0,0]=1\nform w\n w[1,0] = x\nend").unwrap();
    assert_eq!(c.forms[0].entries[0].0, (0, 1));
    assert_eq!(c.eval_f64(&c.forms[0].entries[0].1, &[2.0, 0.0]), -2.0);
}
