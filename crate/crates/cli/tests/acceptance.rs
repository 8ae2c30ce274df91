//! Acceptance criteria 1-10. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any failure.

use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use qch_core::catalog::{orthotoric_chart_in_box, orthotoric_text, parameter_dictionary, OrthotoricParams, ENTRIES};
use qch_core::dsl::{parse_chart, ChartSpec};
use qch_core::tensor::{curvature_pack, metric_jets, riemann_up, Connection};
use qch_core::verify::{run_suite, ChartSource, CheckReport, RunOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn run(chart: ChartSource, suite: &str, n_points: usize, seed: u64) -> Result<CheckReport, String> {
    let opts = RunOptions { suite: suite.into(), n_points, seed, ..RunOptions::default() };
    run_suite(&chart, &opts).map_err(|e| e.to_string())
}

fn catalog_run(name: &str, suite: &str, n_points: usize, seed: u64) -> Result<CheckReport, String> {
    run(ChartSource::catalog(name).map_err(|e| e.to_string())?, suite, n_points, seed)
}

/// Max residual of `id` over entries, requiring the entries to exist.
fn max_of(r: &CheckReport, id: &str) -> Result<f64, String> {
    let mut seen = false;
    let mut max = 0.0f64;
    for e in r.entries.iter().filter(|e| e.check_id == id) {
        seen = true;
        max = max.max(e.residual.ok_or_else(|| format!("{id} on {}: {}", r.chart, e.note.clone().unwrap_or_default()))?);
    }
    if !seen {
        return Err(format!("{id} missing on {}", r.chart));
    }
    Ok(max)
}

fn below(r: &CheckReport, id: &str, tol: f64) -> Result<f64, String> {
    let m = max_of(r, id)?;
    if m < tol {
        Ok(m)
    } else {
        Err(format!("{id} on {}: {m:.3e} >= {tol:.0e}", r.chart))
    }
}

fn above(r: &CheckReport, id: &str, tol: f64) -> Result<f64, String> {
    let m = max_of(r, id)?;
    if m > tol {
        Ok(m)
    } else {
        Err(format!("{id} on {}: {m:.3e} <= {tol:.0e}", r.chart))
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // disjoint ranges keep samples off the singular diagonal xi = eta
    let sample_box = [(0.5, 5.0), (-5.0, -0.5)];
    let (mut sets, mut worst, mut control_min) = (0, 0.0f64, f64::INFINITY);
    let mut draws = 0;
    while sets < 5 {
        draws += 1;
        if draws > 200 {
            return Err(format!("only {sets} usable parameter sets in 200 draws"));
        }
        let p = OrthotoricParams {
            a2: rng.random_range(-1.0..1.0),
            a: rng.random_range(-2.0..2.0),
            b: rng.random_range(-2.0..2.0),
            c: rng.random_range(-2.0..2.0),
            d: rng.random_range(-2.0..2.0),
        };
        let Ok(chart) = orthotoric_chart_in_box(&p, sample_box) else { continue };
        let report = match run(ChartSource::from_chart("orthotoric", chart), "curvature", 200, 7 + sets) {
            Ok(r) => r,
            Err(e) if e.contains("accepted") => continue,
            Err(e) => return Err(e),
        };
        worst = worst.max(below(&report, "curvature.scalar_flat", 1e-8)?);
        let cubic = parse_chart(&orthotoric_text(&p, Some(sample_box), 0.1)).map_err(|e| e.to_string())?;
        let control = run(ChartSource::from_chart("orthotoric-cubic", cubic), "curvature", 200, 7 + sets)?;
        control_min = control_min.min(above(&control, "curvature.scalar_flat", 1e-3)?);
        sets += 1;
    }
    Ok(format!("5 sets x 200 points: max |scal| {worst:.2e}; cubic control min-over-sets max {control_min:.2e}"))
}

fn criterion_2() -> Outcome {
    let (mut conf, mut vol) = (0.0f64, 0.0f64);
    for name in ["orthotoric", "orthotoric-asym", "orthotoric-shifted"] {
        let r = catalog_run(name, "identities", 200, 11)?;
        conf = conf.max(below(&r, "orthotoric.conformal_factor", 1e-10)?);
        vol = vol.max(below(&r, "orthotoric.volumetric", 1e-12)?);
        below(&r, "orthotoric.dictionary_sweep", 1e-11)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut dict = 0.0f64;
    for _ in 0..1000 {
        let a = rng.random_range(0.1..5.0);
        let c = rng.random_range(0.1..5.0);
        let b = rng.random_range(-5.0..5.0);
        let gap = rng.random_range(0.1..5.0);
        let d = (gap + b * c) / a;
        let dc = parameter_dictionary(a, b, c, d).map_err(|e| e.to_string())?;
        dict = dict.max(dc.consistency_residual());
    }
    if dict >= 1e-11 {
        return Err(format!("dictionary residual {dict:.3e}"));
    }
    Ok(format!("conformal {conf:.2e}, dictionary (1000 draws) {dict:.2e}, volumetric {vol:.2e}"))
}

fn criterion_3() -> Outcome {
    let flat = catalog_run("taub-nut", "full", 50, 3)?;
    let ric0 = below(&flat, "taub_nut.ricci_flat", 1e-8)?;
    let mut closed = below(&flat, "kahler.closed", 1e-10)?;
    let mut parts = vec![format!("k=0 |ric| {ric0:.2e}")];
    for name in ["taub-nut-k0.5", "taub-nut-k-0.9"] {
        let r = catalog_run(name, "full", 50, 3)?;
        let scal = below(&r, "curvature.scalar_flat", 1e-8)?;
        let ric = above(&r, "taub_nut.ricci_nonzero", 1e-3)?;
        closed = closed.max(below(&r, "kahler.closed", 1e-10)?);
        parts.push(format!("{name} |scal| {scal:.2e}, max |ric| {ric:.2e}"));
    }
    parts.push(format!("d omega_J {closed:.2e}"));
    Ok(parts.join("; "))
}

fn criterion_4() -> Outcome {
    let r = catalog_run("taub-nut-exceptional", "full", 50, 4)?;
    let solve = below(&r, "calabi.solve[+]", 1e-8)?;
    let target = below(&r, "calabi.target[+]", 1e-8)?.max(below(&r, "exceptional.phi_display", 1e-8)?);
    let sq = below(&r, "hermitian.almost_complex", 1e-12)?.max(below(&r, "exceptional.i_display_squared", 1e-12)?);
    Ok(format!("Calabi(+) {solve:.2e}, phi vs d ln(1+2u^2) {target:.2e}, I^2+1 {sq:.2e}"))
}

fn criterion_5() -> Outcome {
    let r = catalog_run("half-plane", "full", 50, 5)?;
    let n = below(&r, "hermitian.integrable", 1e-9)?;
    let lee = below(&r, "lee.target[omega_I]", 1e-8)?;
    let d = below(&r, "half_plane.d_omega_i", 1e-10)?;
    Ok(format!("N_I {n:.2e}, Lee vs d ln(1+x^2) {lee:.2e}, d omega_I display {d:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    for name in ["burns-m0.5", "burns", "burns-m4"] {
        let r = catalog_run(name, "complex-forms", 50, 6)?;
        let ddbar = below(&r, "burns.ddbar_potential", 1e-10)?.max(below(&r, "burns.omega_display", 1e-10)?);
        let sq = below(&r, "burns.omega_squared", 1e-9)?.max(below(&r, "burns.rho_wedge_rho", 1e-9)?);
        let wr = below(&r, "burns.omega_wedge_rho", 1e-10)?;
        let cal = below(&r, "calabi.solve[-]", 1e-8)?.max(below(&r, "calabi.target[-]", 1e-8)?);
        let rho = below(&r, "burns.rho_pipeline", 1e-7)?;
        parts.push(format!("{name}: ddbar {ddbar:.1e} sq {sq:.1e} w^r {wr:.1e} calabi {cal:.1e} rho {rho:.1e}"));
    }
    Ok(parts.join("; "))
}

fn criterion_7() -> Outcome {
    let (mut q, mut g2, mut inv, mut vacuous) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    let charts = ENTRIES.iter().filter(|e| {
        e.name.starts_with("orthotoric") || (e.name.starts_with("taub-nut") && e.name != "taub-nut-exceptional")
    });
    let mut count = 0;
    for e in charts {
        let r = catalog_run(e.name, "qch", 20, 8)?;
        for id in r.check_ids().into_iter().filter(|id| id.starts_with("qch[")) {
            q = q.max(below(&r, id, 1e-7)?);
        }
        g2 = g2.max(below(&r, "gray2", 1e-7)?);
        inv = inv.max(below(&r, "ricci.i_invariant", 1e-8)?);
        vacuous += r
            .entries
            .iter()
            .filter(|x| x.check_id == "ricci.i_invariant" && x.note.as_deref().is_some_and(|n| n.starts_with("vacuous")))
            .count();
        count += 1;
    }
    Ok(format!(
        "{count} charts x 20 points x 50 pairs: qch {q:.2e}, G2 {g2:.2e}, rho I-invariance {inv:.2e} ({vacuous} vacuous points)"
    ))
}

fn criterion_8() -> Outcome {
    let (mut prop, mut wminus, mut charts) = (0.0f64, 0.0f64, Vec::new());
    for e in ENTRIES {
        let r = catalog_run(e.name, "qch", 20, 9)?;
        let flat = r
            .entries
            .iter()
            .filter(|x| x.check_id == "ricci.proportional")
            .all(|x| x.note.as_deref().is_some_and(|n| n.starts_with("vacuous")));
        if flat {
            continue;
        }
        prop = prop.max(below(&r, "ricci.proportional", 1e-8)?);
        wminus = wminus.max(below(&r, "weyl.asd_degenerate", 1e-6)?);
        charts.push(e.name);
    }
    Ok(format!("{} non-Ricci-flat charts: rho ~ omega_I {prop:.2e}, W- eigenvalue gap {wminus:.2e}", charts.len()))
}

fn fd_metric(chart: &ChartSpec, p: &[f64]) -> DMatrix<f64> {
    let n = chart.dim();
    DMatrix::from_fn(n, n, |i, j| chart.eval_f64(chart.metric_entry(i.min(j), i.max(j)), p))
}

/// Christoffel symbols `Γ^k_ij` at `(k*n+i)*n+j` from central differences of g.
fn fd_gamma(chart: &ChartSpec, p: &[f64], h: f64) -> Vec<f64> {
    let n = chart.dim();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|l| {
            let (mut a, mut b) = (p.to_vec(), p.to_vec());
            a[l] += h;
            b[l] -= h;
            (fd_metric(chart, &a) - fd_metric(chart, &b)) / (2.0 * h)
        })
        .collect();
    let gi = fd_metric(chart, p).try_inverse().expect("metric invertible");
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[(k * n + i) * n + j] =
                    0.5 * (0..n).map(|l| gi[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])).sum::<f64>();
            }
        }
    }
    out
}

/// `(Γ error, R error)` of the jet pipeline against nested central differences, relative.
fn engine_vs_fd(chart: &ChartSpec, p: &[f64]) -> Result<(f64, f64), String> {
    let n = chart.dim();
    let h = 1e-4;
    let conn = Connection::new(metric_jets(chart, p, 2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let jet_r: Vec<f64> = riemann_up(&conn).map_err(|e| e.to_string())?.iter().map(|j| j.value()).collect();
    let jet_g = conn.gamma_values();
    let g0 = fd_gamma(chart, p, h);
    let dgam: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let (mut a, mut b) = (p.to_vec(), p.to_vec());
            a[c] += h;
            b[c] -= h;
            let (ga, gb) = (fd_gamma(chart, &a, h), fd_gamma(chart, &b, h));
            ga.iter().zip(&gb).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        })
        .collect();
    let gm = |k: usize, i: usize, j: usize| g0[(k * n + i) * n + j];
    let mut r_err = 0.0f64;
    let mut r_max = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut r = dgam[c][(a * n + d) * n + b] - dgam[d][(a * n + c) * n + b];
                    for e in 0..n {
                        r += gm(a, c, e) * gm(e, d, b) - gm(a, d, e) * gm(e, c, b);
                    }
                    let jet = jet_r[((a * n + b) * n + c) * n + d];
                    r_err = r_err.max((jet - r).abs());
                    r_max = r_max.max(jet.abs());
                }
            }
        }
    }
    let g_err = jet_g.iter().zip(&g0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let g_max = jet_g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok((g_err / (1.0 + g_max), r_err / (1.0 + r_max)))
}

fn sphere_product(r1: f64, r2: f64) -> String {
    format!(
        "chart s2xs2\ncoords x y u v\nparams r1={r1:?} r2={r2:?}\n\
         scalar p = 4*r1^2/(1 + x^2 + y^2)^2\nscalar q = 4*r2^2/(1 + u^2 + v^2)^2\n\
         metric\n g[0,0] = p\n g[1,1] = p\n g[2,2] = q\n g[3,3] = q\nend\n"
    )
}

fn random_polynomial_metric(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = ["x0", "x1", "x2", "x3"];
    let mut entries = String::new();
    for i in 0..4 {
        for j in i..4 {
            let mut terms = vec![if i == j { "2".to_string() } else { "0".to_string() }];
            for a in 0..4 {
                terms.push(format!("{:?}*{}", rng.random_range(-0.2..0.2), vars[a]));
                for b in a..4 {
                    terms.push(format!("{:?}*{}*{}", rng.random_range(-0.1..0.1), vars[a], vars[b]));
                }
            }
            entries.push_str(&format!(" g[{i},{j}] = {}\n", terms.join(" + ")));
        }
    }
    format!("chart poly\ncoords x0 x1 x2 x3\nmetric\n{entries}end\n")
}

fn criterion_9() -> Outcome {
    let polar = "chart polar\ncoords r th\ndomain r\nmetric\n g[0,0] = 1\n g[1,1] = r^2\nend\n";
    let cases: Vec<(&str, String, Vec<Vec<f64>>)> = vec![
        ("polar plane", polar.to_string(), vec![vec![2.0, 0.4], vec![0.7, -1.1]]),
        ("S2xS2", sphere_product(1.0, 2.0), vec![vec![0.3, -0.2, 0.5, 0.1], vec![-0.8, 0.4, 0.0, 1.2]]),
        ("random polynomial", random_polynomial_metric(17), vec![vec![0.1, -0.2, 0.3, 0.05], vec![-0.3, 0.2, 0.1, -0.1]]),
    ];
    let (mut ge, mut re) = (0.0f64, 0.0f64);
    for (name, text, points) in &cases {
        let chart = parse_chart(text).map_err(|e| e.to_string())?;
        for p in points {
            let (g, r) = engine_vs_fd(&chart, p)?;
            if !(g < 1e-5 && r < 1e-5) {
                return Err(format!("{name} at {p:?}: Christoffel {g:.2e}, Riemann {r:.2e}"));
            }
            ge = ge.max(g);
            re = re.max(r);
        }
    }
    let mut scal = 0.0f64;
    for (r1, r2) in [(1.0, 2.0), (0.7, 1.3)] {
        let chart = parse_chart(&sphere_product(r1, r2)).map_err(|e| e.to_string())?;
        for p in [[0.3, -0.2, 0.5, 0.1], [1.5, 0.9, -2.0, 0.4]] {
            let pack = curvature_pack(&chart, &p, 2).map_err(|e| e.to_string())?;
            let expect = 2.0 / (r1 * r1) + 2.0 / (r2 * r2);
            let err = (pack.scalar - expect).abs();
            if err >= 1e-8 {
                return Err(format!("S2({r1})xS2({r2}) scalar {} vs {expect}", pack.scalar));
            }
            scal = scal.max(err);
        }
    }
    Ok(format!("Christoffel {ge:.2e}, Riemann {re:.2e} vs finite differences; S2xS2 scalar error {scal:.2e}"))
}

fn qch(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qch"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .expect("qch runs")
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for format in ["json", "csv", "markdown"] {
        let mut bytes = Vec::new();
        for run in ["a", "b"] {
            let path = dir.path().join(format!("{run}.{format}"));
            let path = path.to_str().unwrap();
            let out = qch(&["verify", "orthotoric-asym", "--controls", "--seed", "5", "--format", format, "--out", path]);
            if out.status.code() != Some(0) {
                return Err(format!("qch exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
            }
            bytes.push(std::fs::read(path).map_err(|e| e.to_string())?);
        }
        if bytes[0] != bytes[1] {
            return Err(format!("{format} reports differ between identical runs"));
        }
    }
    let start = Instant::now();
    for e in ENTRIES {
        let out = qch(&["verify", e.name, "--suite", "full", "--order", "2"]);
        if out.status.code() != Some(0) {
            return Err(format!("full suite on {} exited {:?}", e.name, out.status.code()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("full suite over the catalog took {secs:.1} s"));
    }
    Ok(format!("json/csv/markdown byte-identical; full suite over {} charts in {secs:.1} s on one thread", ENTRIES.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "scalar-flatness", criterion_1),
        (2, "orthotoric / Taub-NUT isometry", criterion_2),
        (3, "Taub-NUT charts", criterion_3),
        (4, "exceptional Taub-NUT", criterion_4),
        (5, "exceptional half-plane", criterion_5),
        (6, "Burns", criterion_6),
        (7, "QCH property", criterion_7),
        (8, "W- structure", criterion_8),
        (9, "engine oracles", criterion_9),
        (10, "determinism and runtime", criterion_10),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:2} PASS  {name}: {detail} [{t:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:2} FAIL  {name}: {detail} [{t:.2} s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
