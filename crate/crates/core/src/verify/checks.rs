//! Check catalogue: what each suite contains for a given chart, and how each
//! check is evaluated at a point.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::context::PointContext;
use super::{Expect, Scope, VerifyError};
use crate::catalog::{self, displays, Family, OrthotoricParams};
use crate::complex::{
    calabi_combination, calabi_residual, gray2_residual, lee_form_solve, lie_derivative_endo, nijenhuis_residual,
    opposite_structure, qch_residual, ricci_form, ricci_form_checks, Distribution2, Endo,
};
use crate::dsl::{parse_chart, print_chart, CalabiSign, ChartSpec, SpanVector};
use crate::jet::Jet;
use crate::tensor::{
    covariant_derivative_endomorphism, exterior_derivative, lie_derivative_metric, wedge, Connection, CurvaturePack,
    FormValue, JetMatrix,
};

pub const SUITES: &[(&str, &str)] = &[
    ("curvature", "curvature symmetries, Weyl traces, scalar-flatness"),
    ("kahler", "J from omega_J: almost complex, compatible, closed, integrable, parallel; Killing fields and potentials"),
    ("hermitian", "opposite structure from omega_I: orientation, integrability, distribution, Lee and Calabi forms"),
    ("qch", "holomorphic sectional curvature vs |X_D|, Gray G2, Ricci form, W- degeneracy"),
    ("identities", "family closed forms: dictionary, volumetric map, displayed structures and forms"),
    ("complex-forms", "Burns forms: ddbar potential, omega^2, omega^rho, rho^rho, Ricci form, Calabi"),
    ("full", "every applicable check"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Which {
    J,
    I,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Kind {
    Symmetries,
    WeylTrace,
    SpectrumTrace,
    ScalarFlat,
    AlmostComplex(Which),
    Compatible(Which),
    Closed,
    Nijenhuis(Which),
    Parallel(Which),
    LeeKahler,
    KillingIsometry(usize),
    KillingHolomorphic(usize),
    KillingPotential(usize),
    Orientation,
    DistributionInvariant(usize),
    OppositeMatches(usize),
    LeeSolve(usize),
    LeeTarget(usize),
    CalabiSolve(usize),
    CalabiTarget(usize),
    Qch(usize),
    Gray2,
    RicciInvariant,
    RicciProportional,
    WeylDegenerate,
    OrthoNorms,
    OrthoConformal,
    OrthoVolumetric,
    OrthoHolomorphic,
    OrthoDictionary,
    DictionarySweep,
    TnRicciFlat,
    TnRicciNonzero,
    TnCartesian,
    ExcIDisplay,
    ExcISquared,
    ExcPhi,
    ExcNablaI,
    HpIDisplay,
    HpDOmega,
    BurnsDdbar,
    BurnsOmegaForm,
    BurnsOmegaSquared,
    BurnsOmegaRho,
    BurnsRhoRho,
    BurnsRhoDdbar,
    BurnsRhoPipeline,
    CtrlCubic,
    CtrlConformalM,
    CtrlNotKilling,
    CtrlCalabi(CalabiSign),
    CtrlSkewQch,
    CtrlSkewGray2,
    CtrlNijenhuis,
}

/// One planned check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckDef {
    pub id: String,
    pub tolerance: f64,
    pub expect: Expect,
    pub scope: Scope,
    pub(crate) kind: Kind,
}

fn def(id: impl Into<String>, tolerance: f64, kind: Kind) -> CheckDef {
    CheckDef { id: id.into(), tolerance, expect: Expect::AtMost, scope: Scope::PerPoint, kind }
}

fn somewhere(id: impl Into<String>, tolerance: f64, kind: Kind) -> CheckDef {
    CheckDef { id: id.into(), tolerance, expect: Expect::Exceeds, scope: Scope::Aggregate, kind }
}

fn global(id: impl Into<String>, tolerance: f64, kind: Kind) -> CheckDef {
    CheckDef { id: id.into(), tolerance, expect: Expect::AtMost, scope: Scope::Global, kind }
}

fn linear_orthotoric(chart: &ChartSpec) -> Option<OrthotoricParams> {
    let p = OrthotoricParams::from_chart(chart)?;
    (p.a2 == 0.0 && p.validate().is_ok()).then_some(p)
}

fn curvature_checks(chart: &ChartSpec) -> Vec<CheckDef> {
    let mut v = vec![
        def("curvature.symmetries", 1e-10, Kind::Symmetries),
        def("curvature.weyl_trace", 1e-10, Kind::WeylTrace),
        def("curvature.scalar_flat", 1e-8, Kind::ScalarFlat),
    ];
    if chart.dim() == 4 {
        v.push(def("curvature.weyl_spectrum_trace", 1e-10, Kind::SpectrumTrace));
    }
    v
}

fn kahler_checks(chart: &ChartSpec) -> Vec<CheckDef> {
    if chart.form_index("omega_J").is_none() {
        return Vec::new();
    }
    let mut v = vec![
        def("kahler.almost_complex", 1e-10, Kind::AlmostComplex(Which::J)),
        def("kahler.compatible", 1e-10, Kind::Compatible(Which::J)),
        def("kahler.closed", 1e-10, Kind::Closed),
        def("kahler.nijenhuis", 1e-9, Kind::Nijenhuis(Which::J)),
        def("kahler.parallel", 1e-9, Kind::Parallel(Which::J)),
        def("kahler.lee", 1e-10, Kind::LeeKahler),
    ];
    for (n, k) in chart.killing.iter().enumerate() {
        let name = &chart.vectors[k.vector].name;
        v.push(def(format!("killing.isometry[{name}]"), 1e-10, Kind::KillingIsometry(n)));
        v.push(def(format!("killing.holomorphic[{name}]"), 1e-10, Kind::KillingHolomorphic(n)));
        if k.potential.is_some() {
            v.push(def(format!("killing.potential[{name}]"), 1e-9, Kind::KillingPotential(n)));
        }
    }
    v
}

fn hermitian_checks(chart: &ChartSpec) -> Vec<CheckDef> {
    if chart.form_index("omega_J").is_none() || chart.form_index("omega_I").is_none() {
        return Vec::new();
    }
    let mut v = vec![
        def("hermitian.almost_complex", 1e-10, Kind::AlmostComplex(Which::I)),
        def("hermitian.compatible", 1e-10, Kind::Compatible(Which::I)),
        def("hermitian.orientation", 1e-10, Kind::Orientation),
        def("hermitian.integrable", 1e-9, Kind::Nijenhuis(Which::I)),
    ];
    for (n, d) in chart.distributions.iter().enumerate() {
        v.push(def(format!("distribution.invariant[{}]", d.name), 1e-10, Kind::DistributionInvariant(n)));
        v.push(def(format!("hermitian.opposite[{}]", d.name), 1e-10, Kind::OppositeMatches(n)));
    }
    let wi = chart.form_index("omega_I").unwrap_or(0);
    v.push(def("lee.solve[omega_I]", 1e-8, Kind::LeeSolve(wi)));
    for (n, l) in chart.lee.iter().enumerate() {
        let form = &chart.forms[l.form].name;
        if l.form != wi {
            v.push(def(format!("lee.solve[{form}]"), 1e-8, Kind::LeeSolve(l.form)));
        }
        v.push(def(format!("lee.target[{form}]"), 1e-8, Kind::LeeTarget(n)));
    }
    for (n, c) in chart.calabi.iter().enumerate() {
        v.push(def(format!("calabi.solve[{}]", c.sign), 1e-8, Kind::CalabiSolve(n)));
        v.push(def(format!("calabi.target[{}]", c.sign), 1e-8, Kind::CalabiTarget(n)));
    }
    v
}

fn qch_checks(chart: &ChartSpec) -> Vec<CheckDef> {
    if chart.form_index("omega_J").is_none() || chart.dim() != 4 {
        return Vec::new();
    }
    let mut v: Vec<CheckDef> = chart
        .distributions
        .iter()
        .enumerate()
        .map(|(n, d)| def(format!("qch[{}]", d.name), 1e-7, Kind::Qch(n)))
        .collect();
    if chart.form_index("omega_I").is_some() {
        v.push(def("gray2", 1e-7, Kind::Gray2));
        v.push(def("ricci.i_invariant", 1e-8, Kind::RicciInvariant));
        v.push(def("ricci.proportional", 1e-8, Kind::RicciProportional));
    }
    v.push(def("weyl.asd_degenerate", 1e-6, Kind::WeylDegenerate));
    v
}

fn family_checks(chart: &ChartSpec) -> Vec<CheckDef> {
    let Some(family) = Family::from_chart_name(&chart.name) else {
        return Vec::new();
    };
    match family {
        Family::Orthotoric => {
            let mut v = vec![def("orthotoric.hermitian_norms", 1e-12, Kind::OrthoNorms)];
            if linear_orthotoric(chart).is_some() {
                v.extend([
                    def("orthotoric.conformal_factor", 1e-10, Kind::OrthoConformal),
                    def("orthotoric.volumetric", 1e-12, Kind::OrthoVolumetric),
                    def("orthotoric.holomorphic_coordinate", 1e-8, Kind::OrthoHolomorphic),
                    global("orthotoric.dictionary", 1e-12, Kind::OrthoDictionary),
                    global("orthotoric.dictionary_sweep", 1e-11, Kind::DictionarySweep),
                ]);
            }
            v
        }
        Family::TaubNut => {
            let mut v = vec![def("taub_nut.cartesian", 1e-10, Kind::TnCartesian)];
            match chart.param("k") {
                Some(0.0) => v.push(def("taub_nut.ricci_flat", 1e-8, Kind::TnRicciFlat)),
                _ => v.push(somewhere("taub_nut.ricci_nonzero", 1e-3, Kind::TnRicciNonzero)),
            }
            v
        }
        Family::ExceptionalTaubNut => vec![
            def("exceptional.i_display", 1e-10, Kind::ExcIDisplay),
            def("exceptional.i_display_squared", 1e-12, Kind::ExcISquared),
            def("exceptional.phi_display", 1e-10, Kind::ExcPhi),
            CheckDef {
                id: "exceptional.i_not_parallel".into(),
                tolerance: 1e-3,
                expect: Expect::Exceeds,
                scope: Scope::PerPoint,
                kind: Kind::ExcNablaI,
            },
        ],
        Family::HalfPlane => vec![
            def("half_plane.i_display", 1e-10, Kind::HpIDisplay),
            def("half_plane.d_omega_i", 1e-10, Kind::HpDOmega),
        ],
        Family::Burns => burns_checks(),
    }
}

fn burns_checks() -> Vec<CheckDef> {
    vec![
        def("burns.ddbar_potential", 1e-10, Kind::BurnsDdbar),
        def("burns.omega_display", 1e-10, Kind::BurnsOmegaForm),
        def("burns.omega_squared", 1e-9, Kind::BurnsOmegaSquared),
        def("burns.omega_wedge_rho", 1e-10, Kind::BurnsOmegaRho),
        def("burns.rho_wedge_rho", 1e-9, Kind::BurnsRhoRho),
        def("burns.rho_ddbar", 1e-10, Kind::BurnsRhoDdbar),
        def("burns.rho_pipeline", 1e-7, Kind::BurnsRhoPipeline),
    ]
}

fn control_checks(chart: &ChartSpec) -> Vec<CheckDef> {
    let mut v = Vec::new();
    if chart.form_index("omega_J").is_some() {
        v.push(somewhere("control.perturbed_j_nijenhuis", 1e-4, Kind::CtrlNijenhuis));
    }
    if Family::from_chart_name(&chart.name) == Some(Family::Orthotoric) && chart.dim() == 4 {
        v.push(somewhere("control.cubic_scalar_flat", 1e-3, Kind::CtrlCubic));
        v.push(somewhere("control.not_killing", 1e-3, Kind::CtrlNotKilling));
        if chart.form_index("omega_J").is_some() {
            v.push(somewhere("control.skew_qch", 1e-3, Kind::CtrlSkewQch));
            v.push(somewhere("control.skew_gray2", 1e-3, Kind::CtrlSkewGray2));
            if chart.form_index("omega_I").is_some() {
                v.push(somewhere("control.calabi[+]", 1e-3, Kind::CtrlCalabi(CalabiSign::Plus)));
                v.push(somewhere("control.calabi[-]", 1e-3, Kind::CtrlCalabi(CalabiSign::Minus)));
            }
        }
        if linear_orthotoric(chart).is_some() {
            v.push(somewhere("control.perturbed_mass", 1e-3, Kind::CtrlConformalM));
        }
    }
    v
}

/// Checks of `suite` that apply to `chart`.
pub fn plan(chart: &ChartSpec, suite: &str, controls: bool) -> Result<Vec<CheckDef>, VerifyError> {
    let mut v = match suite {
        "curvature" => curvature_checks(chart),
        "kahler" => kahler_checks(chart),
        "hermitian" => hermitian_checks(chart),
        "qch" => qch_checks(chart),
        "identities" => family_checks(chart),
        "complex-forms" => {
            if Family::from_chart_name(&chart.name) != Some(Family::Burns) {
                return Err(VerifyError::NotApplicable { suite: suite.into(), chart: chart.name.clone() });
            }
            let mut v = burns_checks();
            v.extend(hermitian_checks(chart).into_iter().filter(|c| c.id.starts_with("calabi.")));
            v.extend(qch_checks(chart).into_iter().filter(|c| c.id == "ricci.proportional"));
            v
        }
        "full" => {
            let mut v = curvature_checks(chart);
            v.extend(kahler_checks(chart));
            v.extend(hermitian_checks(chart));
            v.extend(qch_checks(chart));
            v.extend(family_checks(chart));
            v
        }
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    };
    if controls {
        v.extend(control_checks(chart));
    }
    if v.is_empty() {
        return Err(VerifyError::NotApplicable { suite: suite.into(), chart: chart.name.clone() });
    }
    v.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(v)
}

/// Identity checks bound to a catalog chart (by entry or family name).
pub fn identity_suite(chart_name: &str) -> Result<Vec<CheckDef>, VerifyError> {
    let chart = match catalog::chart(chart_name) {
        Ok(c) => c,
        Err(_) => {
            let family = Family::from_chart_name(chart_name)
                .ok_or_else(|| VerifyError::Catalog(catalog::CatalogError::UnknownChart(chart_name.into())))?;
            catalog::chart(family.name())?
        }
    };
    plan(&chart, "full", false)
}

/// Residual plus an optional remark (e.g. a vacuous check).
pub(crate) struct Outcome {
    pub residual: f64,
    pub note: Option<String>,
}

impl From<f64> for Outcome {
    fn from(residual: f64) -> Self {
        Outcome { residual, note: None }
    }
}

/// Data computed once per run and shared by all points.
pub(crate) struct Shared {
    pub cubic: Option<ChartSpec>,
}

impl Shared {
    pub fn new(chart: &ChartSpec, plan: &[CheckDef]) -> Result<Shared, VerifyError> {
        let cubic = if plan.iter().any(|c| c.kind == Kind::CtrlCubic) { Some(cubic_variant(chart)?) } else { None };
        Ok(Shared { cubic })
    }
}

/// Re-parse the printed chart with `0.1*xi^3` appended to `F`.
fn cubic_variant(chart: &ChartSpec) -> Result<ChartSpec, VerifyError> {
    let text = print_chart(chart);
    let mut found = false;
    let edited: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with("scalar F = ") {
                found = true;
                format!("{l} + 0.1*xi^3")
            } else {
                l.to_string()
            }
        })
        .collect();
    if !found {
        return Err(VerifyError::NotApplicable { suite: "control.cubic_scalar_flat".into(), chart: chart.name.clone() });
    }
    Ok(parse_chart(&edited.join("\n"))?)
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn rng_for(ctx: &PointContext, id: &str) -> ChaCha8Rng {
    let mix = ctx.seed ^ fnv1a(id) ^ (ctx.index as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15);
    ChaCha8Rng::seed_from_u64(mix)
}

fn d_norm(m: &JetMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..m[(i, j)].nvars() {
                s += m[(i, j)].d1(k).powi(2);
            }
        }
    }
    s.sqrt()
}

fn vec_d_norm(x: &[Jet]) -> f64 {
    x.iter().flat_map(|c| c.gradient()).map(|v| v * v).sum::<f64>().sqrt()
}

fn vec_norm(x: &[Jet]) -> f64 {
    x.iter().map(|c| c.value().powi(2)).sum::<f64>().sqrt()
}

fn g_norm(g: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += v[a] * g[(a, b)] * v[b];
        }
    }
    s.max(0.0).sqrt()
}

fn gamma_norm(pack: &CurvaturePack) -> f64 {
    pack.gamma.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖∇J‖ / (1 + ‖∂J‖ + ‖J‖‖Γ‖)`.
fn parallel_residual(j: &Endo, pack: &CurvaturePack) -> Result<f64, String> {
    let nab = covariant_derivative_endomorphism(&j.m, &pack.gamma).map_err(|e| e.to_string())?;
    let norm = nab.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(norm / (1.0 + d_norm(&j.m) + j.values().norm() * gamma_norm(pack)))
}

fn distribution(ctx: &PointContext, j: &Endo, n: usize) -> Result<Distribution2, String> {
    let d = &ctx.chart.distributions[n];
    let first = ctx.vector(d.first)?;
    Ok(match d.second {
        SpanVector::JOf(_) => Distribution2::j_span(j, first),
        SpanVector::Field(k) => Distribution2::new(first, ctx.vector(k)?),
    })
}

fn top(f: &FormValue) -> f64 {
    f.coeffs()[0].value()
}

fn structure<'c>(ctx: &'c PointContext, w: Which) -> Result<&'c Endo, String> {
    match w {
        Which::J => ctx.j(),
        Which::I => ctx.i(),
    }
}

fn lie_metric_residual(g: &JetMatrix, x: &[Jet]) -> Result<f64, String> {
    let l = lie_derivative_metric(g, x).map_err(|e| e.to_string())?;
    Ok(l.norm() / (1.0 + vec_norm(x) * d_norm(g) + g.values().norm() * vec_d_norm(x)))
}

fn calabi_target(ctx: &PointContext, n: usize) -> Result<f64, String> {
    let spec = &ctx.chart.calabi[n];
    let (wj, wi) = (ctx.form_named("omega_J")?, ctx.form_named("omega_I")?);
    let sol = calabi_residual(wj, wi, spec.sign).map_err(|e| e.to_string())?;
    let target = ctx.scalar(spec.potential)?.gradient();
    let psi = calabi_combination(wj, wi, spec.sign).map_err(|e| e.to_string())?;
    crate::complex::one_form_wedge_mismatch(&sol.phi, &target, &psi).map_err(|e| e.to_string())
}

/// Orthotoric `F`, `G` values at the point from the chart parameters.
fn orthotoric_fg(p: &OrthotoricParams, xi: f64, eta: f64) -> (f64, f64) {
    (p.a2 * xi * xi + p.a * xi + p.b, p.a2 * eta * eta + p.c * eta + p.d)
}

fn skew_distribution(ctx: &PointContext, j: &Endo) -> Distribution2 {
    let v: Vec<Jet> = [1.0, 0.7, 0.0, 0.0].iter().map(|c| ctx.constant(*c)).collect();
    Distribution2::j_span(j, v)
}

/// Evaluate one per-point (or aggregated) check.
pub(crate) fn evaluate(kind: &Kind, id: &str, ctx: &PointContext, shared: &Shared) -> Result<Outcome, String> {
    let chart = ctx.chart;
    let p = ctx.point;
    Ok(match kind {
        Kind::Symmetries => ctx.pack()?.symmetry_residual().into(),
        Kind::WeylTrace => ctx.pack()?.weyl_trace_residual().into(),
        Kind::SpectrumTrace => {
            let pack = ctx.pack()?;
            let sum = |e: Option<[f64; 3]>| e.map(|l| (l[0] + l[1] + l[2]).abs()).unwrap_or(0.0);
            (sum(pack.sd_eigenvalues).max(sum(pack.asd_eigenvalues)) / (1.0 + pack.weyl_norm)).into()
        }
        Kind::ScalarFlat => {
            let pack = ctx.pack()?;
            (pack.scalar.abs() / (1.0 + pack.riemann_norm)).into()
        }
        Kind::AlmostComplex(w) => structure(ctx, *w)?.almost_complex_residual().into(),
        Kind::Compatible(w) => structure(ctx, *w)?.compatibility_residual(&ctx.g()?.values()).into(),
        Kind::Closed => {
            let w = ctx.form_named("omega_J")?;
            let dw = exterior_derivative(w).map_err(|e| e.to_string())?;
            (dw.norm() / (1.0 + w.norm())).into()
        }
        Kind::Nijenhuis(w) => nijenhuis_residual(structure(ctx, *w)?).map_err(|e| e.to_string())?.into(),
        Kind::Parallel(w) => parallel_residual(structure(ctx, *w)?, ctx.pack()?)?.into(),
        Kind::LeeKahler => {
            let sol = lee_form_solve(ctx.form_named("omega_J")?).map_err(|e| e.to_string())?;
            sol.phi.iter().map(|v| v * v).sum::<f64>().sqrt().max(sol.residual).into()
        }
        Kind::KillingIsometry(n) => {
            let x = ctx.vector(chart.killing[*n].vector)?;
            lie_metric_residual(ctx.g()?, &x)?.into()
        }
        Kind::KillingHolomorphic(n) => {
            let x = ctx.vector(chart.killing[*n].vector)?;
            let j = ctx.j()?;
            let l = lie_derivative_endo(j, &x).map_err(|e| e.to_string())?;
            (l.norm() / (1.0 + vec_norm(&x) * d_norm(&j.m) + j.values().norm() * vec_d_norm(&x))).into()
        }
        Kind::KillingPotential(n) => {
            let k = &chart.killing[*n];
            let x: Vec<f64> = ctx.vector(k.vector)?.iter().map(|c| c.value()).collect();
            let phi = ctx.scalar(k.potential.ok_or("no potential")?)?;
            let pack_g = ctx.g()?.values();
            let gi = ctx.g_inv()?.values();
            let dphi = phi.gradient();
            let grad: Vec<f64> = (0..x.len()).map(|a| (0..x.len()).map(|b| gi[(a, b)] * dphi[b]).sum()).collect();
            let jg = ctx.j()?.apply(&grad);
            let diff: Vec<f64> = x.iter().zip(&jg).map(|(a, b)| a - b).collect();
            (g_norm(&pack_g, &diff) / (1.0 + g_norm(&pack_g, &x))).into()
        }
        Kind::Orientation => {
            let g = ctx.g()?;
            let wj = ctx.form_named("omega_J")?.truncate(0);
            let wi = ctx.i()?.kahler_form(g).truncate(0);
            let jj = top(&wedge(&wj, &wj).map_err(|e| e.to_string())?);
            let ii = top(&wedge(&wi, &wi).map_err(|e| e.to_string())?);
            ((jj + ii).abs() / jj.abs().max(f64::MIN_POSITIVE)).into()
        }
        Kind::DistributionInvariant(n) => {
            let j = ctx.j()?;
            let d = distribution(ctx, j, *n)?;
            let g = ctx.g()?.values();
            let indep = d.independence(&g);
            if !(indep > 1e-10) {
                return Err(format!("spanning vectors are dependent (Gram {indep:e})"));
            }
            d.invariance_residual(&g, &j.values()).into()
        }
        Kind::OppositeMatches(n) => {
            let j = ctx.j()?;
            let d = distribution(ctx, j, *n)?;
            let op = opposite_structure(j, &d, ctx.g()?).map_err(|e| e.to_string())?;
            let i = ctx.i()?.values();
            ((op.values() - &i).norm() / (1.0 + i.norm())).into()
        }
        Kind::LeeSolve(f) => {
            let sol = lee_form_solve(ctx.form(*f)?).map_err(|e| e.to_string())?;
            let note = sol.rank_deficient.then(|| "rank-deficient wedge map".to_string());
            Outcome { residual: sol.residual, note }
        }
        Kind::LeeTarget(n) => {
            let spec = &chart.lee[*n];
            let sol = lee_form_solve(ctx.form(spec.form)?).map_err(|e| e.to_string())?;
            let target = ctx.scalar(spec.potential)?.gradient();
            let diff = sol.phi.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale = target.iter().map(|v| v * v).sum::<f64>().sqrt();
            (diff / (1.0 + scale)).into()
        }
        Kind::CalabiSolve(n) => {
            let sign = chart.calabi[*n].sign;
            let sol = calabi_residual(ctx.form_named("omega_J")?, ctx.form_named("omega_I")?, sign).map_err(|e| e.to_string())?;
            if sol.degenerate {
                return Err("omega_J ± omega_I vanishes".into());
            }
            sol.residual.into()
        }
        Kind::CalabiTarget(n) => calabi_target(ctx, *n)?.into(),
        Kind::Qch(n) => {
            let j = ctx.j()?;
            let d = distribution(ctx, j, *n)?;
            let mut rng = rng_for(ctx, id);
            qch_residual(ctx.pack()?, &j.values(), &d, 50, &mut rng).map_err(|e| e.to_string())?.into()
        }
        Kind::Gray2 => {
            let mut rng = rng_for(ctx, id);
            gray2_residual(ctx.pack()?, &ctx.i()?.values(), 50, &mut rng).into()
        }
        Kind::RicciInvariant | Kind::RicciProportional => {
            let pack = ctx.pack()?;
            let wi = ctx.form_named("omega_I")?.matrix();
            let r = ricci_form_checks(pack, &ctx.j()?.values(), &ctx.i()?.values(), &wi);
            let residual = if *kind == Kind::RicciInvariant { r.inv_residual } else { r.prop_residual };
            let note = if r.vacuous {
                Some(format!("vacuous: |ric| = {:.3e} < 1e-9", pack.ricci_norm))
            } else if *kind == Kind::RicciProportional {
                Some(format!("lambda = {:.6e}", r.lambda))
            } else {
                None
            };
            Outcome { residual, note }
        }
        Kind::WeylDegenerate => {
            let pack = ctx.pack()?;
            let j = ctx.j()?;
            let block = if j.orientation(&pack.g) > 0.0 { pack.asd_eigenvalues } else { pack.sd_eigenvalues };
            let l = block.ok_or("no 4-dimensional Weyl spectrum")?;
            let scale = l.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale < 1e-8 {
                Outcome { residual: 0.0, note: Some(format!("vacuous: |W-| = {scale:.3e} < 1e-8")) }
            } else {
                ((l[1] - l[0]).min(l[2] - l[1]) / scale).into()
            }
        }
        Kind::OrthoNorms => {
            let op = OrthotoricParams::from_chart(chart).ok_or("chart lacks A, a, b, c, d")?;
            let (xi, eta) = (p[0], p[1]);
            let (f, g) = orthotoric_fg(&op, xi, eta);
            let gm = ctx.g()?.values();
            let r = xi - eta;
            let expected = [(f - g) / r, (eta * f - xi * g) / r, (eta * eta * f - xi * xi * g) / r];
            let got = [gm[(2, 2)], gm[(2, 3)], gm[(3, 3)]];
            let diff = expected.iter().zip(&got).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let scale = expected.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            (diff / (1.0 + scale)).into()
        }
        Kind::OrthoConformal => {
            let op = linear_orthotoric(chart).ok_or("not a linear orthotoric chart")?;
            catalog::conformal_factor_residual(&op, p[0], p[1], 1.0).map_err(|e| e.to_string())?.into()
        }
        Kind::OrthoVolumetric => {
            let op = linear_orthotoric(chart).ok_or("not a linear orthotoric chart")?;
            let v = catalog::volumetric_map(&op, p[0], p[1]).map_err(|e| e.to_string())?;
            v.radius_residual.max(v.difference_residual).into()
        }
        Kind::OrthoHolomorphic => {
            let op = linear_orthotoric(chart).ok_or("not a linear orthotoric chart")?;
            catalog::holomorphy_residual(&op, p[0], p[1]).map_err(|e| e.to_string())?.into()
        }
        Kind::TnRicciFlat | Kind::TnRicciNonzero => {
            let pack = ctx.pack()?;
            (pack.ricci_norm / (1.0 + pack.riemann_norm)).into()
        }
        Kind::TnCartesian => {
            let k = chart.param("k").ok_or("chart lacks k")?;
            let m = chart.param("M").ok_or("chart lacks M")?;
            displays::taub_nut_cartesian_residual(k, m, p, &ctx.g()?.values()).into()
        }
        Kind::ExcIDisplay => displays::endo_display_residual(&displays::exceptional_i_display(p), &ctx.i()?.values()).into(),
        Kind::ExcISquared => displays::display_square_residual(&displays::exceptional_i_display(p)).into(),
        Kind::ExcPhi => {
            let wj = ctx.form_named("omega_J")?.matrix();
            let wi = ctx.form_named("omega_I")?.matrix();
            displays::exceptional_phi_residual(p, &wj, &wi).into()
        }
        Kind::ExcNablaI => parallel_residual(ctx.i()?, ctx.pack()?)?.into(),
        Kind::HpIDisplay => displays::endo_display_residual(&displays::half_plane_i_display(p), &ctx.i()?.values()).into(),
        Kind::HpDOmega => {
            let wi = ctx.form_named("omega_I")?;
            let dwi = exterior_derivative(wi).map_err(|e| e.to_string())?;
            displays::half_plane_domega_residual(p[0], wi, &dwi).map_err(|e| e.to_string())?.into()
        }
        Kind::BurnsDdbar => {
            let m = chart.param("m").ok_or("chart lacks m")?;
            displays::burns_ddbar_residual(m, p, &ctx.scalar_named("Phi")?).map_err(|e| e.to_string())?.into()
        }
        Kind::BurnsOmegaForm => {
            let m = chart.param("m").ok_or("chart lacks m")?;
            displays::burns_omega_form_residual(m, p, &ctx.form_named("omega_J")?.matrix()).into()
        }
        Kind::BurnsOmegaSquared => {
            let m = chart.param("m").ok_or("chart lacks m")?;
            displays::burns_omega_squared_residual(m, p, ctx.form_named("omega_J")?).map_err(|e| e.to_string())?.into()
        }
        Kind::BurnsOmegaRho => {
            displays::burns_omega_wedge_rho(ctx.form_named("omega_J")?, ctx.form_named("rho")?).map_err(|e| e.to_string())?.into()
        }
        Kind::BurnsRhoRho => {
            let m = chart.param("m").ok_or("chart lacks m")?;
            displays::burns_rho_wedge_rho(m, p, ctx.form_named("omega_J")?, ctx.form_named("rho")?)
                .map_err(|e| e.to_string())?
                .into()
        }
        Kind::BurnsRhoDdbar => {
            let log_det = ctx.scalar_named("deth")?.ln().map_err(|e| e.to_string())?;
            displays::burns_rho_ddbar_residual(&log_det, &ctx.form_named("rho")?.matrix()).map_err(|e| e.to_string())?.into()
        }
        Kind::BurnsRhoPipeline => {
            let pipeline = ricci_form(ctx.pack()?, &ctx.j()?.values());
            displays::burns_rho_pipeline_residual(&pipeline, &ctx.form_named("rho")?.matrix()).into()
        }
        Kind::CtrlCubic => {
            let cubic = shared.cubic.as_ref().ok_or("cubic variant missing")?;
            let g = crate::tensor::metric_jets(cubic, p, 2).map_err(|e| e.to_string())?;
            let pack = CurvaturePack::from_connection(&Connection::new(g).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            (pack.scalar.abs() / (1.0 + pack.riemann_norm)).into()
        }
        Kind::CtrlConformalM => {
            let op = linear_orthotoric(chart).ok_or("not a linear orthotoric chart")?;
            catalog::conformal_factor_residual(&op, p[0], p[1], 1.01).map_err(|e| e.to_string())?.into()
        }
        Kind::CtrlNotKilling => {
            let x: Vec<Jet> = (0..chart.dim())
                .map(|a| if a == 0 { ctx.eval(&crate::dsl::Expr::Coord(0)) } else { Ok(ctx.constant(0.0)) })
                .collect::<Result<_, _>>()?;
            lie_metric_residual(ctx.g()?, &x)?.into()
        }
        Kind::CtrlCalabi(sign) => {
            calabi_residual(ctx.form_named("omega_J")?, ctx.form_named("omega_I")?, *sign)
                .map_err(|e| e.to_string())?
                .residual
                .into()
        }
        Kind::CtrlSkewQch => {
            let j = ctx.j()?;
            let d = skew_distribution(ctx, j);
            let g = ctx.g()?.values();
            let inv = d.invariance_residual(&g, &j.values());
            if inv > 1e-10 {
                return Err(format!("skewed span is not J-invariant ({inv:e})"));
            }
            let mut rng = rng_for(ctx, id);
            qch_residual(ctx.pack()?, &j.values(), &d, 50, &mut rng).map_err(|e| e.to_string())?.into()
        }
        Kind::CtrlSkewGray2 => {
            let j = ctx.j()?;
            let d = skew_distribution(ctx, j);
            let i = opposite_structure(j, &d, ctx.g()?).map_err(|e| e.to_string())?;
            let mut rng = rng_for(ctx, id);
            gray2_residual(ctx.pack()?, &i.values(), 50, &mut rng).into()
        }
        Kind::CtrlNijenhuis => {
            let j = ctx.j()?;
            let x0 = ctx.eval(&crate::dsl::Expr::Coord(0))?.truncate(j.m.order());
            let n = j.dim();
            let m = JetMatrix::from_fn(n, |a, b| if (a, b) == (0, 1) { j.m[(a, b)] + x0 * 0.01 } else { j.m[(a, b)] });
            nijenhuis_residual(&Endo { m }).map_err(|e| e.to_string())?.into()
        }
        Kind::OrthoDictionary | Kind::DictionarySweep => return Err("global check evaluated per point".into()),
    })
}

/// Evaluate a global (point-free) check.
pub(crate) fn evaluate_global(kind: &Kind, chart: &ChartSpec, seed: u64) -> Result<f64, String> {
    match kind {
        Kind::OrthoDictionary => {
            let op = linear_orthotoric(chart).ok_or("not a linear orthotoric chart")?;
            let d = catalog::parameter_dictionary(op.a, op.b, op.c, op.d).map_err(|e| e.to_string())?;
            Ok(d.consistency_residual())
        }
        Kind::DictionarySweep => {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a("orthotoric.dictionary_sweep"));
            let mut worst = 0.0f64;
            let mut drawn = 0;
            while drawn < 1000 {
                let a = rng.random_range(0.1..10.0);
                let c = rng.random_range(0.1..10.0);
                let b = rng.random_range(-10.0..10.0);
                let d = rng.random_range(-10.0..10.0);
                if d * a - b * c <= 0.1 {
                    continue;
                }
                drawn += 1;
                let dict = catalog::parameter_dictionary(a, b, c, d).map_err(|e| e.to_string())?;
                worst = worst.max(dict.consistency_residual());
            }
            Ok(worst)
        }
        _ => Err("per-point check evaluated globally".into()),
    }
}
