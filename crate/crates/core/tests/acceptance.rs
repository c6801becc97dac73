//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use quasimin::families::{
    chart_pde_residuals, frenet_apparatus, make_e42, make_s42_hyp, make_s42_trig, prop32_chart,
    CurveCausality, E42Kind, SpaceCurve, SpacelikeCircle, TimelikeCircle,
};
use quasimin::immersion::{fundamental_data, Rect};
use quasimin::numerics::{cumulative_integral, scalar_fn, solve_lode2, Expr, GridSpec, ScalarFn, Wave};
use quasimin::verify::{
    certify_positive_relative_nullity, certify_quasi_minimal, certify_surface, convergence_study, ode_order,
    Check, OdeProblem, ODE_COARSE_STEP,
};
use quasimin::{Condition, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{config, config_path, CLASSIFIED};

type Verdict = (bool, String);

fn ac1() -> Verdict {
    let mut worst_time: f64 = 0.0;
    let mut failures = Vec::new();
    let mut points = 0;
    for name in CLASSIFIED {
        let cfg = config(name);
        let start = Instant::now();
        let surface = cfg.build().unwrap();
        let r = certify_surface(&surface, cfg.grid, &cfg.tolerances);
        let elapsed = start.elapsed().as_secs_f64();
        worst_time = worst_time.max(elapsed);
        points += r.points.len();
        let ok = cfg.grid.ns == 20
            && cfg.grid.nt == 20
            && [
                Check::QuasiMinimal,
                Check::PositiveRelativeNullity,
                Check::LemmaFrame,
            ]
            .iter()
            .all(|&c| r.property(c).is_some_and(|p| p.pass))
            && r.nullity.is_some_and(|n| n.exactly_one)
            && cfg.tolerances.lightlike <= 1e-6
            && cfg.tolerances.nonzero >= 1e-6
            && cfg.tolerances.frame <= 1e-6
            && elapsed < 10.0;
        if !ok {
            failures.push(name);
        }
    }
    let tags: std::collections::BTreeSet<_> = CLASSIFIED.iter().map(|n| config(n).family.label()).collect();
    let ok = failures.is_empty() && tags.len() == 6;
    (
        ok,
        format!("12 configs, 6 tags, {points} points, slowest {worst_time:.2} s, failing {failures:?}"),
    )
}

fn ac2() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let (mut with_order, mut floor, mut min_order) = (0, 0, f64::INFINITY);
    for name in CLASSIFIED {
        let cfg = config(name);
        let surface = cfg.build().unwrap();
        let r = certify_surface(&surface, cfg.grid, &cfg.tolerances);
        let curv = r.property(Check::CurvatureEquations).unwrap();
        worst = worst.max(curv.max_residual.unwrap_or(f64::INFINITY));
        let all_sampled = r
            .points
            .iter()
            .all(|p| p.curvature.is_some_and(|c| c.max() <= 1e-4));
        let f = &surface.immersion;
        let probes: Vec<[f64; 2]> = cfg
            .grid
            .probe_nodes(&cfg.domain)
            .into_iter()
            .filter(|&[s, t]| f.singular_reason(s, t, cfg.tolerances.singular_margin).is_none())
            .collect();
        let study = convergence_study(f, &OdeProblem::reference(), &probes).unwrap();
        for e in &study.residuals {
            match e.order {
                Some(p) => {
                    with_order += 1;
                    min_order = min_order.min(p);
                }
                None => floor += 1,
            }
        }
        if !(curv.pass && all_sampled && study.pass) {
            failures.push(name);
        }
    }
    (
        failures.is_empty(),
        format!(
            "max residual {worst:.2e}; halving: {with_order} residuals with min ratio {:.1}x, {floor} at roundoff floor; failing {failures:?}",
            2f64.powf(min_order)
        ),
    )
}

fn trig_poly(rng: &mut ChaCha8Rng, scale: f64) -> Expr {
    let mut terms = vec![Expr::Const(rng.random_range(-scale..scale))];
    for k in 1..=3 {
        let amp = rng.random_range(-scale..scale) / k as f64;
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        terms.push(Expr::Sin(Wave {
            amp,
            freq: k as f64,
            phase,
        }));
    }
    Expr::Sum(terms)
}

fn ac3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for (c, eps, srange) in [
        (0, 1.0, [1.0, 2.0]),
        (1, 1.0, [-0.7, 0.7]),
        (1, -1.0, [-1.0, 1.0]),
    ] {
        for _ in 0..20 {
            let m = trig_poly(&mut rng, 0.15).into_fn();
            let gamma0 = trig_poly(&mut rng, 1.0).into_fn();
            let chart = prop32_chart(c, eps, Expr::Const(1.0).into_fn(), m, gamma0).unwrap();
            for i in 0..50 {
                for j in 0..50 {
                    let s = srange[0] + (srange[1] - srange[0]) * i as f64 / 49.0;
                    let t = -1.0 + 2.0 * j as f64 / 49.0;
                    worst = worst.max(chart_pde_residuals(&chart, s, t).max());
                }
            }
        }
    }
    (
        worst <= 1e-6,
        format!("3 blocks x 20 draws x 50x50, sup residual {worst:.2e}"),
    )
}

fn rel(got: f64, want: f64, scale: f64) -> f64 {
    (got - want).abs() / scale
}

fn ac4() -> Verdict {
    let domain = Rect::new([0.5, 2.0], [-1.0, 1.0]).unwrap();
    let e42 = make_e42(
        E42Kind::I,
        Expr::Const(0.0).into_fn(),
        Expr::Const(1.0).into_fn(),
        (-1.0, 0.0),
        None,
        domain,
    )
    .unwrap();
    let mut worst_e42: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let s = 0.5 + 1.5 * (i as f64 + 0.5) / 10.0;
            let t = -1.0 + 2.0 * (j as f64 + 0.5) / 10.0;
            let d = fundamental_data(&e42.immersion, s, t).unwrap();
            let g = d.metric;
            let a = d.alpha[2].coords().to_vec();
            let h = d.mean_curvature.coords().to_vec();
            let hm = 1.0 / (2.0 * s);
            let errs = [
                rel(g[0][0], 1.0, 1.0),
                rel(g[0][1], 0.0, 1.0),
                rel(g[1][1], -s * s, s * s),
                rel(a[0], s, s),
                rel(a[1], 0.0, s),
                rel(a[2], 0.0, s),
                rel(a[3], s, s),
                rel(h[0], -hm, hm),
                rel(h[1], 0.0, hm),
                rel(h[2], 0.0, hm),
                rel(h[3], -hm, hm),
            ];
            worst_e42 = errs.into_iter().fold(worst_e42, f64::max);
        }
    }
    let trig = make_s42_trig(
        Expr::poly(&[0.0, 1.0]).into_fn(),
        Rect::new([-1.0, 1.0], [0.5, 1.5]).unwrap(),
    )
    .unwrap();
    let mut worst_trig: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let s = -1.0 + 2.0 * (i as f64 + 0.5) / 10.0;
            let t = 0.5 + (j as f64 + 0.5) / 10.0;
            let h = fundamental_data(&trig.immersion, s, t).unwrap().mean_curvature;
            let c = h.coords();
            let want = t.abs() / (2.0 * s.cos().abs());
            let errs = [
                rel(c[0].abs(), want, want),
                rel(c[4], c[0], want),
                rel(c[1], 0.0, want),
                rel(c[2], 0.0, want),
                rel(c[3], 0.0, want),
            ];
            worst_trig = errs.into_iter().fold(worst_trig, f64::max);
        }
    }
    (
        worst_e42 <= 1e-7 && worst_trig <= 1e-5,
        format!(
            "E42 analytic rel err {worst_e42:.2e} (100 pts), trig b=t rel err {worst_trig:.2e} (100 pts)"
        ),
    )
}

fn exit_code(args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_quasimin"))
        .args(args)
        .output()
        .unwrap();
    (o.status.code(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn ac5() -> Verdict {
    let mut notes = Vec::new();
    let cfg = config("control-flat-plane");
    let plane = cfg.build().unwrap();
    let r = certify_quasi_minimal(&plane.immersion, cfg.grid, &cfg.tolerances);
    let plane_ok = !r.pass
        && r.points
            .iter()
            .all(|p| p.failures.iter().any(|f| f.reason == "H = 0"));
    notes.push(format!("flat plane H=0 {}", if plane_ok { "ok" } else { "NO" }));

    let span = Rect::new([-1.0, 1.0], [0.0, 1.0]).unwrap();
    let trig = matches!(
        make_s42_trig(Expr::named("exp").unwrap().into_fn(), span),
        Err(Error::InadmissibleFamily {
            condition: Condition::TrigAdmissible,
            ..
        })
    );
    let hyp = matches!(
        make_s42_hyp(Expr::named("sin").unwrap().into_fn(), span),
        Err(Error::InadmissibleFamily {
            condition: Condition::HypAdmissible,
            ..
        })
    );
    notes.push(format!("trig e^t rejected {trig}, hyp sin rejected {hyp}"));

    let cfg = config("control-graph");
    let graph = cfg.build().unwrap();
    let r = certify_positive_relative_nullity(&graph.immersion, cfg.grid, &cfg.tolerances);
    let graph_ok = !r.pass && r.nullity.is_some_and(|n| n.max == 0);
    notes.push(format!("graph nullity 0 {graph_ok}"));

    let dir = tempfile::TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let report = report.to_str().unwrap();
    let mut codes = Vec::new();
    let mut exits_ok = true;
    for (name, want, text) in [
        ("control-flat-plane", 1, ""),
        ("control-graph", 1, ""),
        ("inadmissible-trig-exp", 2, "b''-b != 0"),
        ("inadmissible-hyp-sin", 2, "b''+b != 0"),
    ] {
        let path = config_path(name);
        let (code, stderr) = exit_code(&["certify", "--config", path.to_str().unwrap(), "--report", report]);
        exits_ok &= code == Some(want) && stderr.contains(text);
        codes.push(code.unwrap_or(-1));
    }
    notes.push(format!("exit codes {codes:?}"));
    (plane_ok && trig && hyp && graph_ok && exits_ok, notes.join("; "))
}

fn ac6() -> Verdict {
    // sqrt(1 - a^2)/a and sqrt(a^2 - 1)/a, evaluated by hand.
    let cases: [(Arc<dyn SpaceCurve>, CurveCausality, f64); 4] = [
        (
            Arc::new(TimelikeCircle::new(0.6).unwrap()),
            CurveCausality::Timelike,
            4.0 / 3.0,
        ),
        (
            Arc::new(TimelikeCircle::new(0.8).unwrap()),
            CurveCausality::Timelike,
            0.75,
        ),
        (
            Arc::new(SpacelikeCircle::new(1.25).unwrap()),
            CurveCausality::Spacelike,
            0.6,
        ),
        (
            Arc::new(SpacelikeCircle::new(2.0).unwrap()),
            CurveCausality::Spacelike,
            0.866_025_403_784_438_6,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (curve, causal, kappa) in cases {
        let c = frenet_apparatus(curve, causal, [-1.0, 1.0], 41).unwrap();
        for k in 0..=20 {
            worst = worst.max((c.kappa(-1.0 + k as f64 / 10.0) - kappa).abs());
        }
    }
    let great = [
        frenet_apparatus(
            Arc::new(TimelikeCircle::new(1.0).unwrap()),
            CurveCausality::Timelike,
            [-1.0, 1.0],
            11,
        ),
        frenet_apparatus(
            Arc::new(SpacelikeCircle::new(1.0).unwrap()),
            CurveCausality::Spacelike,
            [-1.0, 1.0],
            11,
        ),
    ]
    .iter()
    .all(|r| matches!(r, Err(Error::VanishingCurvature { .. })));
    (
        worst <= 1e-7 && great,
        format!("kappa error {worst:.2e}; great circles raise VanishingCurvature: {great}"),
    )
}

fn ac7() -> Verdict {
    let grid = GridSpec::new(0.0, 1.0, 1e-3).unwrap();
    let sol = solve_lode2(1.0, scalar_fn(|_| 0.0), 0.0, 1.0, 1.0, grid).unwrap();
    let ode_err = (0..=1000)
        .map(|k| k as f64 / 1000.0)
        .map(|t| (sol.value(t) - t.exp()).abs())
        .fold(0.0, f64::max);
    let order = ode_order(&OdeProblem::reference(), ODE_COARSE_STEP).unwrap();
    let pi = std::f64::consts::PI;
    let q = cumulative_integral(scalar_fn(f64::cos), 0.0, GridSpec::new(0.0, pi, 1e-3).unwrap()).unwrap();
    let q_err = (0..=997)
        .map(|k| pi * k as f64 / 997.0)
        .map(|t| (q.value(t) - t.sin()).abs())
        .fold(0.0, f64::max);
    let p = order.order.unwrap_or(0.0);
    (
        ode_err <= 1e-8 && p >= 3.0 && q_err <= 1e-10,
        format!("e^t error {ode_err:.2e}, observed order {p:.2}, sin t quadrature error {q_err:.2e}"),
    )
}

fn payload(path: &std::path::Path, drop_csv: bool) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    if drop_csv {
        v["payload"]["csv"] = serde_json::Value::Null;
    }
    serde_json::to_string(&v["payload"]).unwrap()
}

fn ac8() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let mut identical = true;
    for name in ["e42-ii-drift", "s42-curve-timelike-cos"] {
        let cfg = config_path(name);
        let cfg = cfg.to_str().unwrap();
        let mut runs = Vec::new();
        for k in 0..2 {
            let csv = dir.path().join(format!("{name}-{k}.csv"));
            let report = dir.path().join(format!("{name}-{k}-report.json"));
            let (a, _) = exit_code(&["generate", "--config", cfg, "--out", csv.to_str().unwrap()]);
            let (b, _) = exit_code(&["certify", "--config", cfg, "--report", report.to_str().unwrap()]);
            identical &= a == Some(0) && b == Some(0);
            runs.push((
                std::fs::read(&csv).unwrap(),
                payload(&csv.with_extension("json"), true),
                payload(&report, false),
            ));
        }
        identical &= runs[0] == runs[1];
    }
    (
        identical,
        "generate and certify payloads byte-identical over two runs of two configs".into(),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("AC1 classified-family certification", ac1),
        ("AC2 curvature-equation suite", ac2),
        ("AC3 intrinsic PDE suite", ac3),
        ("AC4 analytic-instance exactness", ac4),
        ("AC5 negative controls", ac5),
        ("AC6 Frenet suite", ac6),
        ("AC7 numerics suite", ac7),
        ("AC8 determinism", ac8),
    ];
    let mut all = true;
    for (name, check) in criteria {
        let (ok, detail) = check();
        all &= ok;
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    if !all {
        std::process::exit(1);
    }
}
