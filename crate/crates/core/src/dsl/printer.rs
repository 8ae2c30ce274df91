use std::fmt::Write;

use super::ast::*;

fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// Binding strength used to decide parenthesization.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Const(c) if *c < 0.0 => 3,
        Expr::PowInt(..) => 4,
        _ => 5,
    }
}

/// Canonical infix form of an expression, using names from `chart`.
pub fn print_expr(e: &Expr, chart: &ChartSpec) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, chart);
    s
}

fn wrap(out: &mut String, e: &Expr, chart: &ChartSpec, paren: bool) {
    if paren {
        out.push('(');
        write_expr(out, e, chart);
        out.push(')');
    } else {
        write_expr(out, e, chart);
    }
}

fn write_expr(out: &mut String, e: &Expr, chart: &ChartSpec) {
    match e {
        Expr::Const(c) if *c < 0.0 => {
            out.push('-');
            out.push_str(&number(-c));
        }
        Expr::Const(c) => out.push_str(&number(*c)),
        Expr::Coord(i) => out.push_str(&chart.coords[*i]),
        Expr::Param(i) => out.push_str(&chart.params[*i].0),
        Expr::Scalar(i) => out.push_str(&chart.scalars[*i].name),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            let (op, lv) = match e {
                Expr::Add(..) => (" + ", 1),
                Expr::Sub(..) => (" - ", 1),
                Expr::Mul(..) => ("*", 2),
                _ => ("/", 2),
            };
            // left-associative: a right operand of equal level needs parentheses
            wrap(out, a, chart, level(a) < lv);
            out.push_str(op);
            wrap(out, b, chart, level(b) <= lv);
        }
        Expr::Neg(a) => {
            out.push('-');
            wrap(out, a, chart, level(a) < 3);
        }
        Expr::PowInt(a, n) => {
            wrap(out, a, chart, level(a) < 5);
            let _ = write!(out, "^{n}");
        }
        Expr::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a, chart);
            out.push(')');
        }
    }
}

/// Canonical chart text. Declarations are ordered so every reference
/// resolves on re-parse.
pub fn print_chart(c: &ChartSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "chart {}", c.name);
    let _ = writeln!(s, "coords {}", c.coords.join(" "));
    if !c.params.is_empty() {
        let ps: Vec<String> = c.params.iter().map(|(n, v)| format!("{n}={}", print_expr(&Expr::Const(*v), c))).collect();
        let _ = writeln!(s, "params {}", ps.join(" "));
    }
    for sc in &c.scalars {
        let _ = writeln!(s, "scalar {} = {}", sc.name, print_expr(&sc.expr, c));
    }
    if !c.domain.is_empty() {
        let ds: Vec<String> = c.domain.iter().map(|e| print_expr(e, c)).collect();
        let _ = writeln!(s, "domain {}", ds.join(" ; "));
    }
    for rule in &c.sample {
        match rule {
            SampleRule::Interval { coord, lo, hi } => {
                let _ = writeln!(s, "sample {} = ({}, {})", c.coords[*coord], print_expr(lo, c), print_expr(hi, c));
            }
            SampleRule::Polar { x, y, lo, hi } => {
                let (x, y) = (&c.coords[*x], &c.coords[*y]);
                let _ = writeln!(s, "sample polar {x} {y} = ({}, {})", print_expr(lo, c), print_expr(hi, c));
            }
        }
    }
    s.push_str("metric\n");
    let n = c.dim();
    for i in 0..n {
        for j in i..n {
            let e = c.metric_entry(i, j);
            if !e.is_zero() {
                let _ = writeln!(s, "  g[{i},{j}] = {}", print_expr(e, c));
            }
        }
    }
    for f in &c.forms {
        let _ = writeln!(s, "form {}", f.name);
        for ((i, j), e) in &f.entries {
            let _ = writeln!(s, "  w[{i},{j}] = {}", print_expr(e, c));
        }
    }
    for v in &c.vectors {
        let cs: Vec<String> = v.components.iter().map(|e| print_expr(e, c)).collect();
        let _ = writeln!(s, "vector {} = ({})", v.name, cs.join(", "));
    }
    for d in &c.distributions {
        let second = match d.second {
            SpanVector::Field(i) => c.vectors[i].name.clone(),
            SpanVector::JOf(i) => format!("J {}", c.vectors[i].name),
        };
        let _ = writeln!(s, "distribution {} = {}, {}", d.name, c.vectors[d.first].name, second);
    }
    for k in &c.killing {
        match k.potential {
            Some(p) => {
                let _ = writeln!(s, "killing {} {}", c.vectors[k.vector].name, c.scalars[p].name);
            }
            None => {
                let _ = writeln!(s, "killing {}", c.vectors[k.vector].name);
            }
        }
    }
    for l in &c.lee {
        let _ = writeln!(s, "lee {} {}", c.forms[l.form].name, c.scalars[l.potential].name);
    }
    for cal in &c.calabi {
        let _ = writeln!(s, "calabi {} {}", cal.sign, c.scalars[cal.potential].name);
    }
    s.push_str("end\n");
    s
}
