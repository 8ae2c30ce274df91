mod common;

use std::f64::consts::SQRT_2;

use common::{close, At};
use qch_core::catalog::{self, displays, *};
use qch_core::complex::{calabi_residual, lee_form_solve, nijenhuis_residual, one_form_wedge_mismatch, calabi_combination};
use qch_core::dsl::{parse_chart, print_chart, CalabiSign};
use qch_core::tensor::{covariant_derivative_endomorphism, curvature_pack, exterior_derivative, lie_derivative_metric, wedge};
use qch_core::verify::{identity_suite, sample_points};

fn linear(a: f64, b: f64, c: f64, d: f64) -> OrthotoricParams {
    OrthotoricParams::linear(a, b, c, d)
}

#[test]
fn orthotoric_metric_entries_at_reference_point() {
    let c = orthotoric_chart(&linear(1.0, 0.0, 1.0, 1.0)).unwrap();
    let at = At::new(&c, &[1.0, -2.0, 0.3, 1.1], 1);
    let g = at.g.values();
    // F = 1, G = -1, xi - eta = 3
    assert!(close(g[(2, 2)], 2.0 / 3.0, 1e-15));
    assert!(close(g[(2, 3)], -1.0 / 3.0, 1e-15));
    assert!(close(g[(0, 0)], 3.0, 1e-15));
    assert!(close(g[(1, 1)], 3.0, 1e-15));
}

#[test]
fn orthotoric_rejects_bad_parameters() {
    assert!(matches!(orthotoric_chart(&linear(0.0, 0.0, 1.0, 1.0)), Err(CatalogError::Params(_))));
    assert!(matches!(orthotoric_chart(&linear(1.0, 0.0, -1.0, 1.0)), Err(CatalogError::Params(_))));
    assert!(matches!(orthotoric_chart(&linear(1.0, 1.0, 1.0, 1.0)), Err(CatalogError::Params(_))));
    assert!(taubnut_chart(&TaubNutParams { k: 1.0, m: 0.5 }).is_err());
    assert!(taubnut_chart(&TaubNutParams { k: 0.0, m: 0.0 }).is_err());
    assert!(burns_chart(0.0).is_err());
}

/// Dictionary constants evaluated straight from their defining formulas.
fn dictionary_oracle(a: f64, b: f64, c: f64, d: f64) -> [f64; 5] {
    let det = d * a - b * c;
    [
        (a - c) / (a + c),
        (c + a) * a * a * c * c / (4.0 * det * det),
        2.0 * det / (a * a * c * c),
        c * b / (2.0 * a) + a * d / (2.0 * c),
        (b * c * c - d * a * a) / (2.0 * a * c),
    ]
}

#[test]
fn dictionary_reference_values() {
    for (params, hand) in [
        ((1.0, 0.0, 1.0, 1.0), [0.0, 0.5, 2.0, 0.5, -0.5]),
        ((2.0, 0.0, 1.0, 1.0), [1.0 / 3.0, 0.75, 1.0, 1.0, -1.0]),
    ] {
        let (a, b, c, d) = params;
        let dict = parameter_dictionary(a, b, c, d).unwrap();
        let got = [dict.k, dict.m, dict.alpha, dict.e, dict.gamma];
        let oracle = dictionary_oracle(a, b, c, d);
        for i in 0..5 {
            assert!(close(got[i], hand[i], 1e-15), "{params:?} #{i}: {} vs {}", got[i], hand[i]);
            assert!(close(got[i], oracle[i], 1e-15));
        }
        assert!(dict.consistency_residual() < 1e-12);
        assert!(close(2.0 * dict.alpha * dict.m * (dict.k * dict.e + dict.gamma), -1.0, 1e-14));
    }
    assert_eq!(parameter_dictionary(3.0, 1.0, 3.0, 5.0).unwrap().k, 0.0);
    assert!(parameter_dictionary(1.0, 1.0, 1.0, 1.0).is_err());
    assert!(parameter_dictionary(-1.0, 0.0, 1.0, 1.0).is_err());
}

#[test]
fn volumetric_reference_point_and_corner() {
    let p = linear(1.0, 0.0, 1.0, 1.0);
    let v = volumetric_map(&p, 1.0, -2.0).unwrap();
    assert!(close(v.x, 1.0, 1e-15) && v.y.abs() < 1e-15, "{v:?}");
    assert!(v.radius_residual < 1e-12 && v.difference_residual < 1e-12);
    // c²F − a²G = 2 = 2ac·√(x²+y²)
    let (f, g) = (1.0, -1.0);
    assert!(close(f - g, 2.0 * v.x.hypot(v.y), 1e-15));
    let corner = volumetric_map(&p, 0.0, -1.0).unwrap();
    assert!(corner.x.abs() < 1e-15 && corner.y.abs() < 1e-15, "{corner:?}");
    assert!(volumetric_map(&p, 1.0, 2.0).is_err());
}

#[test]
fn conformal_factor_at_reference_point() {
    let p = linear(1.0, 0.0, 1.0, 1.0);
    // LHS = 4·3/2 = 6, RHS = 2(1 + 2·0.5·1)/1 = 6 with M = 0.5: residual exactly 0
    assert_eq!(conformal_factor_residual(&p, 1.0, -2.0, 1.0).unwrap(), 0.0);
    assert!(conformal_factor_residual(&p, 1.0, -2.0, 1.01).unwrap() > 1e-3);
    assert!(holomorphy_residual(&p, 1.0, -2.0).unwrap() < 1e-8);
}

#[test]
fn quadratic_orthotoric_is_scalar_flat() {
    let p = OrthotoricParams { a2: 1.0, a: 1.0, b: 0.0, c: 1.0, d: 0.0 };
    let c = orthotoric_chart_in_box(&p, [(0.1, 5.0), (-0.9, -0.1)]).unwrap();
    let pack = curvature_pack(&c, &[1.0, -0.5, 0.2, 0.4], 2).unwrap();
    assert!(pack.scalar.abs() < 1e-8, "{}", pack.scalar);
    // the quadratic form needs an explicit box
    assert!(orthotoric_chart(&p).is_err());
}

#[test]
fn orthotoric_killing_fields() {
    let c = catalog::chart("orthotoric").unwrap();
    let at = At::new(&c, &[1.3, -2.2, 0.1, 0.2], 2);
    let ev = c.at(&at.point, 2).unwrap();
    let x1: Vec<_> = c.vectors[0].components.iter().map(|e| ev.eval(e).unwrap()).collect();
    assert!(lie_derivative_metric(&at.g, &x1).unwrap().norm() < 1e-12);
    let xi = ev.eval(&qch_core::dsl::Expr::Coord(0)).unwrap();
    let zero = ev.constant(0.0);
    let radial = vec![xi, zero, zero, zero];
    assert!(lie_derivative_metric(&at.g, &radial).unwrap().norm() > 1e-3);
}

#[test]
fn orthotoric_j_is_parallel_and_not_calabi() {
    let c = catalog::chart("orthotoric-shifted").unwrap();
    let pts = sample_points(&c, 5, 11, 1e-6).unwrap();
    let mut worst = [0.0f64; 2];
    for p in &pts {
        let at = At::new(&c, p, 2);
        let pack = curvature_pack(&c, p, 2).unwrap();
        let nab = covariant_derivative_endomorphism(&at.j().m, &pack.gamma).unwrap();
        assert!(nab.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-9);
        for (k, sign) in [CalabiSign::Plus, CalabiSign::Minus].into_iter().enumerate() {
            let r = calabi_residual(&at.form("omega_J"), &at.form("omega_I"), sign).unwrap();
            worst[k] = worst[k].max(r.residual);
        }
    }
    assert!(worst[0] > 1e-3 && worst[1] > 1e-3, "{worst:?}");
}

#[test]
fn taub_nut_reference_values() {
    let c = taubnut_chart(&TaubNutParams { k: 0.0, m: 0.5 }).unwrap();
    let at = At::new(&c, &[1.0, 1.0, 0.0, 0.0], 1);
    // M·G¹² = 2·1·1·(2 + 2)/(1 + 1 + 1)
    assert!(close(0.5 * at.g.values()[(2, 3)], 8.0 / 3.0, 1e-15));
    let dw = exterior_derivative(&at.form("omega_J")).unwrap();
    assert!(dw.norm() < 1e-10);
    let pack = curvature_pack(&c, &[0.7, 1.9, 0.0, 0.0], 2).unwrap();
    assert!(pack.ricci_norm < 1e-8);

    let c = taubnut_chart(&TaubNutParams { k: 0.5, m: 0.5 }).unwrap();
    let pack = curvature_pack(&c, &[0.7, 1.9, 0.0, 0.0], 2).unwrap();
    assert!(pack.scalar.abs() < 1e-8);
    assert!(pack.ricci_norm > 1e-3);
    let g = at.g.values();
    assert!(displays::taub_nut_cartesian_residual(0.0, 0.5, &at.point, &g) < 1e-10);
}

#[test]
fn exceptional_taub_nut_displays() {
    let c = exceptional_taubnut_chart();
    let p = [1.0, 1.0, 0.4, 2.0];
    let at = At::new(&c, &p, 2);
    // φ = ½(ω_J + ω_I) = 3√2 dv∧dθ1 at u = v = 1
    let half = (at.form("omega_J").matrix() + at.form("omega_I").matrix()) * 0.5;
    assert!(close(half[(1, 2)], 3.0 * SQRT_2, 1e-15));
    assert!(displays::exceptional_phi_residual(&p, &at.form("omega_J").matrix(), &at.form("omega_I").matrix()) < 1e-12);

    // I² ∂u = −∂u from the displayed columns
    let disp = displays::exceptional_i_display(&p);
    let e_u = nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let twice = &disp * (&disp * &e_u);
    assert!((twice + &e_u).norm() < 1e-12);
    assert!(displays::endo_display_residual(&disp, &at.i().values()) < 1e-12);

    let sol = calabi_residual(&at.form("omega_J"), &at.form("omega_I"), CalabiSign::Plus).unwrap();
    assert!(sol.residual < 1e-8);
    // d ln(1 + 2u²) = 4u/(1 + 2u²) du
    let target = [4.0 / 3.0, 0.0, 0.0, 0.0];
    let psi = calabi_combination(&at.form("omega_J"), &at.form("omega_I"), CalabiSign::Plus).unwrap();
    assert!(one_form_wedge_mismatch(&sol.phi, &target, &psi).unwrap() < 1e-8);

    let pack = curvature_pack(&c, &p, 2).unwrap();
    let nab = covariant_derivative_endomorphism(&at.i().m, &pack.gamma).unwrap();
    assert!(nab.iter().map(|v| v * v).sum::<f64>().sqrt() > 1e-3);
}

#[test]
fn half_plane_structure_and_lee_form() {
    let c = half_plane_chart();
    let x = 1.0;
    let at = At::new(&c, &[x, 0.6, 0.0, 0.0], 2);
    let i = at.i();
    // I ∂θ1 = −x/(1 + x²) ∂x
    let col = i.apply(&[0.0, 0.0, 1.0, 0.0]);
    assert!(close(col[0], -x / (1.0 + x * x), 1e-15));
    assert!(col[1..].iter().all(|v| v.abs() < 1e-15));
    assert!(nijenhuis_residual(&i).unwrap() < 1e-9);
    let lee = lee_form_solve(&at.form("omega_I")).unwrap();
    assert!(close(lee.phi[0], 1.0, 1e-12), "{:?}", lee.phi);
    assert!(lee.phi[1..].iter().all(|v| v.abs() < 1e-12));
    let pack = curvature_pack(&c, &[2.2, -1.0, 0.0, 0.0], 2).unwrap();
    assert!(pack.scalar.abs() < 1e-8);
}

#[test]
fn burns_reference_values() {
    let c = burns_chart(1.0).unwrap();
    // (z, u) = (1, 0): ω² = 2(|z|² + m/(1+|u|²)) = 4 in units of dz∧dz̄∧du∧dū
    let at = At::new(&c, &[1.0, 0.0, 0.0, 0.0], 2);
    let w = at.form("omega_J");
    let top = wedge(&w, &w).unwrap().coeffs()[0].value() / 4.0;
    assert!(close(top, 4.0, 1e-14), "{top}");
    let rho = at.form("rho");
    assert!(wedge(&w, &rho).unwrap().coeffs()[0].value().abs() < 1e-10);
    // (z, u) = (1, 1)
    let p = [1.0, 0.0, 1.0, 0.0];
    let at = At::new(&c, &p, 2);
    let h = qch_core::complex::del_delbar(&at.scalar("Phi")).unwrap();
    let d = displays::burns_omega_display(1.0, &p);
    // (1+|u|², z̄u; zū, |z|² + m/(1+|u|²)²) = (2, 1; 1, 1.25)
    assert!((d[0][0].re - 2.0).abs() < 1e-15 && (d[1][1].re - 1.25).abs() < 1e-15);
    for j in 0..2 {
        for k in 0..2 {
            assert!((h[j][k] - d[j][k]).norm() < 1e-10, "{j}{k}: {} vs {}", h[j][k], d[j][k]);
        }
    }
}

#[test]
fn identity_suite_composition() {
    let ids = |name: &str| identity_suite(name).unwrap().into_iter().map(|c| c.id).collect::<Vec<_>>();
    assert!(ids("orthotoric").iter().any(|i| i == "orthotoric.conformal_factor"));
    assert!(ids("burns").iter().any(|i| i == "burns.omega_wedge_rho"));
    assert!(ids("taub-nut-exceptional").iter().any(|i| i == "calabi.target[+]"));
    assert!(identity_suite("nonexistent").is_err());
}

#[test]
fn catalog_charts_round_trip_through_text() {
    for e in ENTRIES {
        let c = e.chart().unwrap();
        let text = print_chart(&c);
        let again = parse_chart(&text).unwrap();
        assert_eq!(again, c, "{}", e.name);
        assert_eq!(print_chart(&again), text);
        assert_eq!(Family::from_chart_name(&c.name), Some(e.family));
    }
    assert!(matches!(catalog::chart("nope"), Err(CatalogError::UnknownChart(_))));
}

#[test]
fn catalog_metrics_are_positive_definite() {
    for e in ENTRIES {
        let c = e.chart().unwrap();
        for p in sample_points(&c, 100, 5, 1e-6).unwrap() {
            let at = At::new(&c, &p, 0);
            let min = at.g.values().symmetric_eigen().eigenvalues.min();
            assert!(min > 0.0, "{} at {p:?}: {min}", e.name);
        }
    }
}
