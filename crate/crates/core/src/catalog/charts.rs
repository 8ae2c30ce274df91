//! DSL text for every built-in chart. Each builder formats a chart file and
//! the registry parses it, so the catalog exercises the same path as user files.

use super::{OrthotoricParams, TaubNutParams};

const TAU: &str = "6.283185307179586";

fn num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// Sampling box for `(xi, eta)`; `None` uses the polytope-corner box
/// `xi ∈ (xi0 + 0.1, xi0 + 5)`, `eta ∈ (eta0 − 5, eta0 − 0.1)` of the linear family.
pub type OrthotoricBox = Option<[(f64, f64); 2]>;

/// Orthotoric chart `(xi, eta, t, z)`. `cubic` adds `cubic·xi³` to F (negative control).
pub fn orthotoric_text(p: &OrthotoricParams, sample_box: OrthotoricBox, cubic: f64) -> String {
    let cubic_term = if cubic != 0.0 { format!(" + {}*xi^3", num(cubic)) } else { String::new() };
    // the linear family's polytope collapses at da - bc = 0
    let polytope = if p.a2 == 0.0 { " ; d*a - b*c" } else { "" };
    let samples = match sample_box {
        Some([(xl, xh), (el, eh)]) => format!(
            "sample xi = ({}, {})\nsample eta = ({}, {})\n",
            num(xl),
            num(xh),
            num(el),
            num(eh)
        ),
        None => "sample xi = (-b/a + 0.1, -b/a + 5)\nsample eta = (-d/c - 5, -d/c - 0.1)\n".to_string(),
    };
    format!(
        "\
chart orthotoric
coords xi eta t z
params A={A} a={a} b={b} c={c} d={d}
scalar F = A*xi^2 + a*xi + b{cubic_term}
scalar G = A*eta^2 + c*eta + d
scalar phi1 = xi + eta
scalar phi2 = xi*eta
domain xi - eta ; F ; -G{polytope}
{samples}sample t = (0, {TAU})
sample z = (0, {TAU})
metric
  g[xi,xi] = (xi - eta)/F
  g[eta,eta] = -(xi - eta)/G
  g[t,t] = (F - G)/(xi - eta)
  g[t,z] = (eta*F - xi*G)/(xi - eta)
  g[z,z] = (eta^2*F - xi^2*G)/(xi - eta)
form omega_J
  w[xi,t] = 1
  w[xi,z] = eta
  w[eta,t] = 1
  w[eta,z] = xi
form omega_I
  w[xi,t] = 1
  w[xi,z] = eta
  w[eta,t] = -1
  w[eta,z] = -xi
vector X1 = (0, 0, 1, 0)
vector X2 = (0, 0, 0, 1)
vector E = (1, 0, 0, 0)
distribution D = E, J E
killing X1 phi1
killing X2 phi2
end
",
        A = num(p.a2),
        a = num(p.a),
        b = num(p.b),
        c = num(p.c),
        d = num(p.d),
    )
}

/// Generalized Taub-NUT chart `(u, v, th1, th2)` for `k ∈ (−1, 1)`.
pub fn taub_nut_text(p: &TaubNutParams) -> String {
    format!(
        "\
chart taub-nut
coords u v th1 th2
params k={k} M={m}
scalar A1 = 1 + (1 + k)*u^2
scalar A2 = 1 + (1 - k)*v^2
scalar Dn = 1 + (1 + k)*u^2 + (1 - k)*v^2
scalar phi1 = v^2*A1/M
scalar phi2 = u^2*A2/M
domain u ; v
sample u = (0.1, 3)
sample v = (0.1, 3)
sample th1 = (0, {TAU})
sample th2 = (0, {TAU})
metric
  g[u,u] = 2*Dn/M
  g[v,v] = 2*Dn/M
  g[th1,th1] = 2*v^2*(A1^2 + (1 + k)^2*u^2*v^2)/(M*Dn)
  g[th1,th2] = 2*u^2*v^2*(2 + (1 - k^2)*(u^2 + v^2))/(M*Dn)
  g[th2,th2] = 2*u^2*(A2^2 + (1 - k)^2*u^2*v^2)/(M*Dn)
form omega_J
  w[v,th1] = 2*A1*v/M
  w[u,th2] = 2*A2*u/M
  w[u,th1] = 2*(1 + k)*u*v^2/M
  w[v,th2] = 2*(1 - k)*v*u^2/M
form omega_I
  w[v,th1] = 2*A1*v/M
  w[u,th2] = -2*A2*u/M
  w[u,th1] = -2*(1 + k)*u*v^2/M
  w[v,th2] = 2*(1 - k)*v*u^2/M
vector X1 = (0, 0, 1, 0)
vector X2 = (0, 0, 0, 1)
vector V = (0, 1, 0, 0)
distribution D = V, J V
killing X1 phi1
killing X2 phi2
end
",
        k = num(p.k),
        m = num(p.m),
    )
}

/// Exceptional Taub-NUT chart (`k = 1`), θ coordinates after the `1/√2` rescaling.
pub fn exceptional_taub_nut_text() -> String {
    format!(
        "\
chart taub-nut-exceptional
coords u v th1 th2
scalar s2 = sqrt(2)
scalar B = 1 + 2*u^2
scalar phi1 = v^2*B/s2
scalar phi2 = u^2/s2
scalar calabi_potential = ln(B)
domain u ; v
sample u = (0.1, 3)
sample v = (0.1, 3)
sample th1 = (0, {TAU})
sample th2 = (0, {TAU})
metric
  g[u,u] = 2*B
  g[v,v] = 2*B
  g[th1,th1] = v^2*(B^2 + 4*u^2*v^2)/B
  g[th1,th2] = 2*u^2*v^2/B
  g[th2,th2] = u^2/B
form omega_J
  w[v,th1] = 2*v*B/s2
  w[u,th1] = 4*u*v^2/s2
  w[u,th2] = 2*u/s2
form omega_I
  w[v,th1] = 2*v*B/s2
  w[u,th1] = -4*u*v^2/s2
  w[u,th2] = -2*u/s2
vector X1 = (0, 0, 1, 0)
vector X2 = (0, 0, 0, 1)
vector V = (0, 1, 0, 0)
distribution D = V, J V
killing X1 phi1
killing X2 phi2
calabi + calabi_potential
end
"
    )
}

/// Exceptional half-plane chart `(x, y, th1, th2)`, `x > 0`.
pub fn half_plane_text() -> String {
    format!(
        "\
chart half-plane
coords x y th1 th2
scalar B = 1 + x^2
scalar phi1 = x^2/2
scalar phi2 = y*B
scalar lee_potential = ln(B)
domain x
sample x = (0.1, 5)
sample y = (-3, 3)
sample th1 = (0, {TAU})
sample th2 = (0, {TAU})
metric
  g[x,x] = B
  g[y,y] = B
  g[th1,th1] = x^2/B
  g[th1,th2] = 2*x^2*y/B
  g[th2,th2] = (B^2 + 4*x^2*y^2)/B
form omega_J
  w[x,th1] = x
  w[y,th2] = B
  w[x,th2] = 2*x*y
form omega_I
  w[x,th1] = x
  w[y,th2] = -B
  w[x,th2] = 2*x*y
vector Y1 = (0, 0, 1, 0)
vector Y2 = (0, 0, 0, 1)
vector V = (1, 0, 0, 0)
distribution D = V, J V
killing Y1 phi1
killing Y2 phi2
lee omega_I lee_potential
end
"
    )
}

/// Burns chart in real coordinates `z = x1 + i y1`, `u = x2 + i y2`.
pub fn burns_text(m: f64) -> String {
    format!(
        "\
chart burns
coords x1 y1 x2 y2
params m={m}
scalar zz = x1^2 + y1^2
scalar uu = x2^2 + y2^2
scalar P = x1*x2 + y1*y2
scalar Q = x1*y2 - y1*x2
scalar N = zz*(1 + uu) + m
scalar huu = zz + m/(1 + uu)^2
scalar br = (N*(uu - 1) - m*uu)/(1 + uu)^2
scalar rc = m/N^2
scalar deth = zz + m/(1 + uu)
scalar Phi = zz*(1 + uu) + m*ln(zz*(1 + uu))
scalar calabi_potential = ln(N)
domain zz
sample polar x1 y1 = (0.2, 3)
sample polar x2 y2 = (0.2, 3)
metric
  g[x1,x1] = 2*(1 + uu)
  g[y1,y1] = 2*(1 + uu)
  g[x2,x2] = 2*huu
  g[y2,y2] = 2*huu
  g[x1,x2] = 2*P
  g[x1,y2] = 2*Q
  g[y1,x2] = -2*Q
  g[y1,y2] = 2*P
form omega_J
  w[x1,y1] = 2*(1 + uu)
  w[x2,y2] = 2*huu
  w[x1,x2] = -2*Q
  w[x1,y2] = 2*P
  w[y1,x2] = -2*P
  w[y1,y2] = -2*Q
form omega_I
  w[x1,y1] = 2*(1 + uu)
  w[x2,y2] = 2*br
  w[x1,x2] = -2*Q
  w[x1,y2] = 2*P
  w[y1,x2] = -2*P
  w[y1,y2] = -2*Q
form rho
  w[x1,y1] = 2*rc*(1 + uu)
  w[x2,y2] = 2*rc*br
  w[x1,x2] = -2*rc*Q
  w[x1,y2] = 2*rc*P
  w[y1,x2] = -2*rc*P
  w[y1,y2] = -2*rc*Q
vector R1 = (-y1, x1, 0, 0)
vector R2 = (0, 0, -y2, x2)
vector E = (1, 0, 0, 0)
distribution D = E, J E
killing R1
killing R2
calabi - calabi_potential
end
",
        m = num(m)
    )
}
