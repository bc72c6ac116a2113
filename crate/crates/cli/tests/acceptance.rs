//! Acceptance criteria 1-10. Each prints one PASS/FAIL line with the
//! measured quantities; the process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use spiralemb::chain::{check_nesting, compute_constants, plan_family, plan_kh, FMap, DEFAULT_PROBES};
use spiralemb::double_spiral::{DoubleSpiral, DoubleSpiralConfig};
use spiralemb::geometry::{BallRegion, PlanarPoint, Point4, RectRegion};
use spiralemb::maps::{Orientation, PlanarEmbedding, SQRT_PI};
use spiralemb::spiral::SpiralParams;
use spiralemb::torus_strip::{flow_jacobian, flow_time1, CutoffProfile};
use spiralemb::verifier::{
    check_avoids, check_contained, check_fd_agreement, check_symplectic, check_symplectic_r4, estimate_area,
    fd_jacobian4, min_cross_distance, SampleGrid, FD_STEP,
};
use spiralemb::Execution;

// Pinned tolerances and sizes.
const DET_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-4;
const SYMPLECTIC_GRID: usize = 100;
const SYMPLECTIC_BUDGET: Duration = Duration::from_secs(10);
const PRINTED_DET_TOL: f64 = 1e-10;
const CONTAIN_GRID: usize = 300;
const CONTAIN_TOL: f64 = 1e-9;
const CROSS_MIN: f64 = 1e-9;
const CUTOFF_SAMPLES: usize = 10_000;
const FLOW_STATES: usize = 1_000;
const FLOW_STEPS: usize = 1_000;
const FLOW_TOL: f64 = 1e-6;
const FLOW_DEFECT_TOL: f64 = 1e-10;
const CHAIN_SAMPLES: usize = 1_000_000;
const CHAIN_BUDGET: Duration = Duration::from_secs(60);
const C_AT_TENTH: f64 = 11.994050;
const PLAN_IDENTITY_TOL: f64 = 1e-12;
const PLAN_VALUE_TOL: f64 = 1e-6;
const AREA_SAMPLES: usize = 1_000_000;
const AREA_TOL: f64 = 0.02;
const FIGURE_TOL: f64 = 0.01;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn exec() -> Execution {
    Execution::default()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// The five spiral records: the vertical-spiral record at eps = 0.1, the
/// glued-spiral record at eps = 0.1 and 0.05, and two generic ones.
fn spiral_records() -> Vec<(&'static str, SpiralParams)> {
    let fundamental = |eps| DoubleSpiralConfig::with_default_m(1.0, eps).unwrap().spiral(0.0);
    vec![
        ("step1", SpiralParams::new(2.0 * SQRT_PI, SQRT_PI, 0.1, 0.0, 0.0).unwrap()),
        ("fundamental_0.1", fundamental(0.1)),
        ("fundamental_0.05", fundamental(0.05)),
        ("unit_gapless", SpiralParams::new(1.0, 1.0, 0.05, 0.0, 0.0).unwrap()),
        ("unit_gapped", SpiralParams::new(1.0, 1.0, 0.05, 0.25, 0.1).unwrap()),
    ]
}

fn glued(eps: f64) -> DoubleSpiral {
    DoubleSpiral::new(DoubleSpiralConfig::with_default_m(1.0, eps).unwrap()).unwrap()
}

fn symplecticity() -> Outcome {
    let start = Instant::now();
    let ds = glued(0.1);
    let f = FMap::new(0.1).unwrap();
    let mut maps: Vec<(String, Box<dyn PlanarEmbedding>, RectRegion)> = spiral_records()
        .into_iter()
        .map(|(name, s)| (format!("spiral:{name}"), Box::new(s) as Box<dyn PlanarEmbedding>, s.domain()))
        .collect();
    maps.push(("F".into(), Box::new(f), f.domain()));
    maps.push(("beta1".into(), Box::new(ds.beta1), ds.domain.r1));
    maps.push(("beta2".into(), Box::new(ds.beta2), ds.domain.r2));
    maps.push(("tuck".into(), Box::new(ds.tuck), ds.domain.w));

    let mut worst_det = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut failed = Vec::new();
    for (name, map, region) in &maps {
        let grid = SampleGrid::square(*region, SYMPLECTIC_GRID);
        let s = check_symplectic(map.as_ref(), &grid, DET_TOL, exec()).map_err(|e| e.to_string())?;
        let d = check_fd_agreement(map.as_ref(), &grid, FD_TOL, exec()).map_err(|e| e.to_string())?;
        worst_det = worst_det.max(s.extremum("max_abs_det_minus_one").unwrap());
        worst_fd = worst_fd.max(d.extremum("max_abs_fd_gap").unwrap());
        if !s.passed || !d.passed {
            failed.push(name.clone());
        }
    }

    let profile = CutoffProfile::new(1.0, 0.1).unwrap();
    let n: usize = 10;
    let states: Vec<Point4> = (0..n * n * n * n)
        .map(|i| {
            let c = |k: usize| ((i / n.pow(k as u32)) % n) as f64 / (n - 1) as f64;
            Point4::new(-1.3 + 2.6 * c(0), -1.0 + 2.0 * c(1), -SQRT_PI + 2.0 * SQRT_PI * c(2), c(3))
        })
        .collect();
    let flow = check_symplectic_r4("flow", &states, |q| Ok(flow_jacobian(&profile, q)), DET_TOL, exec())
        .map_err(|e| e.to_string())?;
    let flow_fd = states
        .iter()
        .map(|&q| fd_jacobian4(|p| flow_time1(&profile, p), q, FD_STEP).max_abs_diff(&flow_jacobian(&profile, q)))
        .fold(0.0, f64::max);
    worst_det = worst_det.max(flow.extremum("max_abs_det_minus_one").unwrap());
    worst_fd = worst_fd.max(flow_fd);
    if !flow.passed || flow_fd > FD_TOL {
        failed.push("flow".into());
    }
    let elapsed = start.elapsed();
    ensure(
        failed.is_empty() && elapsed < SYMPLECTIC_BUDGET,
        format!(
            "{} maps x 10^4 points, max |det-1| = {worst_det:.3e}, max FD gap = {worst_fd:.3e}, {:.2}s, failed: {failed:?}",
            maps.len() + 1,
            elapsed.as_secs_f64()
        ),
    )
}

fn printed_orientation() -> Outcome {
    let s = SpiralParams::new(1.0, 1.0, 0.05, 0.0, 0.0)
        .unwrap()
        .with_orientation(Orientation::Printed);
    let grid = SampleGrid::square(s.domain(), SYMPLECTIC_GRID);
    let r = check_symplectic(&s, &grid, DET_TOL, exec()).map_err(|e| e.to_string())?;
    let (lo, hi) = (r.extremum("min_det").unwrap(), r.extremum("max_det").unwrap());
    ensure(
        !r.passed && r.violations == r.samples && (lo + 1.0).abs() <= PRINTED_DET_TOL && (hi + 1.0).abs() <= PRINTED_DET_TOL,
        format!(
            "printed spiral fails at {}/{} samples, det in [{lo:.12}, {hi:.12}]",
            r.violations, r.samples
        ),
    )
}

fn containment() -> Outcome {
    let mut runs = 0;
    let mut bad = Vec::new();
    for (name, s) in spiral_records() {
        for frac in [0.25, 0.5, 1.0] {
            let l = frac * s.a;
            let region = RectRegion::origin(l, s.b).unwrap();
            let ball = BallRegion::planar(s.radius_bound(l).unwrap()).unwrap();
            let r = check_contained(&s, &SampleGrid::square(region, CONTAIN_GRID), &ball, CONTAIN_TOL, exec())
                .map_err(|e| e.to_string())?;
            runs += 1;
            if !r.passed {
                bad.push(format!("{name}@L={l}: {} violations", r.violations));
            }
        }
    }
    ensure(bad.is_empty(), format!("{runs} runs of 300x300, failures: {bad:?}"))
}

fn avoidance() -> Outcome {
    let ds = glued(0.1);
    let inner = BallRegion::planar_closed(ds.config.inner_radius()).unwrap();
    let mut bad = Vec::new();
    for (name, map, region) in [("beta1", ds.beta1, ds.domain.r1), ("beta2", ds.beta2, ds.domain.r2)] {
        let r = check_avoids(&map, &SampleGrid::square(region, CONTAIN_GRID), &inner, exec()).map_err(|e| e.to_string())?;
        if !r.passed {
            bad.push(format!("{name} r=M eps: {}", r.violations));
        }
    }
    let s = SpiralParams::new(1.0, 1.0, 0.05, 0.05, PI).unwrap();
    let r = check_avoids(
        &s,
        &SampleGrid::square(s.domain(), CONTAIN_GRID),
        &BallRegion::planar_closed(s.inner_avoid_radius()).unwrap(),
        exec(),
    )
    .map_err(|e| e.to_string())?;
    if !r.passed {
        bad.push(format!("spiral r=pi: {}", r.violations));
    }

    let images = |map: &dyn PlanarEmbedding, region: &RectRegion| -> Vec<PlanarPoint> {
        SampleGrid::square(*region, CONTAIN_GRID)
            .points()
            .into_iter()
            .map(|p| map.eval(p).unwrap())
            .collect()
    };
    let b1 = images(&ds.beta1, &ds.domain.r1);
    let b2 = images(&ds.beta2, &ds.domain.r2);
    let tk = images(&ds.tuck, &ds.domain.w);
    let mut dists = Vec::new();
    for (name, a, b) in [("beta1/beta2", &b1, &b2), ("beta1/tuck", &b1, &tk), ("beta2/tuck", &b2, &tk)] {
        let d = min_cross_distance(a, b, exec()).unwrap().distance;
        if d.is_nan() || d <= CROSS_MIN {
            bad.push(format!("{name} distance {d:e}"));
        }
        dists.push(format!("{name}={d:.3e}"));
    }
    ensure(bad.is_empty(), format!("avoid r in {{M eps, pi}}; cross distances {}; failures: {bad:?}", dists.join(", ")))
}

fn cutoff() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for eps in [0.2, 0.1, 0.05] {
        let c = CutoffProfile::with_eps0(1.0, eps, 0.2).map_err(|e| e.to_string())?;
        let r = c.verify(CUTOFF_SAMPLES);
        ok &= r.passed();
        parts.push(format!(
            "eps={eps}: slope {:.4}/{:.4}, tent dev {:.4}, pass={}",
            r.max_abs_slope,
            r.slope_cap,
            r.max_tent_deviation,
            r.passed()
        ));
    }
    ensure(ok, parts.join("; "))
}

fn cli(args: &[&str], threads: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spiralemb"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("SPIRALEMB_THREADS", t);
    }
    let out = cmd.output().expect("run spiralemb");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn flow_suite(dir: &Path) -> Outcome {
    let out = dir.join("flow.json");
    let (code, _) = cli(
        &[
            "flow",
            "--epsilon",
            "0.1",
            "--samples",
            &FLOW_STATES.to_string(),
            "--steps",
            &FLOW_STEPS.to_string(),
            "--tol",
            &FLOW_TOL.to_string(),
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    let r = read_json(&out);
    let err = r["max_rk4_error"].as_f64().unwrap();
    let defect = r["max_symplectic_defect"].as_f64().unwrap();
    let kept = r["positions_preserved"].as_bool().unwrap();
    ensure(
        code == 0 && err <= FLOW_TOL && kept && defect <= FLOW_DEFECT_TOL,
        format!("{FLOW_STATES} states, RK4({FLOW_STEPS}) max error {err:.3e}, x1/x2 exact={kept}, defect {defect:.3e}, exit {code}"),
    )
}

fn main_bound(dir: &Path) -> Outcome {
    let mut sups = Vec::new();
    let mut parts = Vec::new();
    let mut ok = true;
    for eps in [0.1, 0.05, 0.02] {
        let out = dir.join(format!("chain_{eps}.json"));
        let start = Instant::now();
        let (code, _) = cli(
            &[
                "chain-verify",
                "--epsilon",
                &eps.to_string(),
                "--samples",
                &CHAIN_SAMPLES.to_string(),
                "--out",
                out.to_str().unwrap(),
            ],
            None,
        );
        let elapsed = start.elapsed();
        let r = read_json(&out);
        let sup = r["sup_norm"].as_f64().unwrap();
        let bound = r["bound"].as_f64().unwrap();
        let samples = r["samples"].as_u64().unwrap() as usize;
        let clean = r["checks"].as_object().unwrap().values().all(|c| c["violations"].as_u64() == Some(0))
            && r["evaluation_errors"].as_u64() == Some(0);
        ok &= code == 0 && sup <= bound && clean && samples >= CHAIN_SAMPLES && elapsed < CHAIN_BUDGET;
        sups.push(sup);
        parts.push(format!("eps={eps}: sup {sup:.6} <= {bound:.6} ({samples} samples, {:.1}s)", elapsed.as_secs_f64()));
    }
    let c = compute_constants(0.1, 1.0, 8.0).c;
    let monotone = sups.windows(2).all(|w| w[1] <= w[0]);
    ok &= monotone && (c - C_AT_TENTH).abs() < 1e-6;
    ensure(ok, format!("{}; c(0.1) = {c:.6}; sup nonincreasing={monotone}", parts.join("; ")))
}

fn planners(dir: &Path) -> Outcome {
    let mut worst = 0.0f64;
    let mut all_in = true;
    for i in 0..20 {
        for j in 0..20 {
            let eps = 0.001 + (0.1 - 0.001) * i as f64 / 19.0;
            let t = 0.34 + (50.0 - 0.34) * j as f64 / 19.0;
            let p = plan_kh(eps, t).map_err(|e| e.to_string())?;
            worst = worst.max((p.target_radius - p.inner_radius).abs() / p.inner_radius);
            all_in &= p.in_domain;
        }
    }
    let out = dir.join("family.json");
    let (code, _) = cli(&["plan", "--mode", "family", "--epsilon", "0.1", "--out", out.to_str().unwrap()], None);
    let fam = read_json(&out);
    let (s, r) = (fam["S"].as_f64().unwrap(), fam["R"].as_f64().unwrap());
    let family_ok = code == 0
        && fam["in_domain"].as_bool() == Some(true)
        && (s - 11.111111).abs() <= PLAN_VALUE_TOL
        && (r - 1.9245009).abs() <= PLAN_VALUE_TOL
        && plan_family(0.1).map(|f| f.in_domain).unwrap_or(false);
    let nest = check_nesting(&[0.1, 0.05, 0.02, 0.01], &DEFAULT_PROBES).map_err(|e| e.to_string())?;
    ensure(
        worst <= PLAN_IDENTITY_TOL && all_in && family_ok && nest.passed,
        format!("kh identity max rel gap {worst:.2e} over 20x20, S={s:.7}, R={r:.7}, nesting passed={}", nest.passed),
    )
}

fn area() -> Outcome {
    let s = SpiralParams::new(1.0, 1.0, 0.05, 0.0, 0.3).unwrap();
    let f = FMap::new(0.1).unwrap();
    let ds = glued(0.1);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, map, region) in [
        ("spiral", &s as &dyn PlanarEmbedding, s.domain()),
        ("F", &f, f.domain()),
        ("tuck", &ds.tuck, ds.domain.w),
    ] {
        let e = estimate_area(map, &region, AREA_SAMPLES, 7, exec()).map_err(|e| e.to_string())?;
        ok &= e.relative_error <= AREA_TOL;
        parts.push(format!("{name}: {:.5} vs {:.5} ({:.3}%)", e.area, e.domain_area, 100.0 * e.relative_error));
    }
    ensure(ok, parts.join("; "))
}

fn figures(dir: &Path) -> Outcome {
    let svg = dir.join("ball.svg");
    let (code, stdout) = cli(&["figure", "--name", "square-to-ball", "--out", svg.to_str().unwrap()], None);
    let summary: Value = serde_json::from_str(stdout.trim()).map_err(|e| e.to_string())?;
    let outer = summary["outer_radius"].as_f64().unwrap();
    let target = 1.0 / PI.sqrt();
    let radius_ok = code == 0 && (outer / target - 1.0).abs() <= FIGURE_TOL;

    let mut identical = true;
    let mut files = 0;
    for name in ["spiral", "square-to-ball", "double-spiral", "domain-model"] {
        let mut first: Option<Vec<u8>> = None;
        for (k, threads) in [Some("1"), Some("4"), None].into_iter().enumerate() {
            let csv = dir.join(format!("{name}_{k}.csv"));
            let svg = dir.join(format!("{name}_{k}.svg"));
            let (c, _) = cli(
                &["figure", "--name", name, "--out", svg.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
                threads,
            );
            let bytes = std::fs::read(&csv).unwrap();
            identical &= c == 0 && first.as_ref().is_none_or(|f| *f == bytes);
            first.get_or_insert(bytes);
            files += 1;
        }
    }
    for threads in ["1", "3"] {
        let csv = dir.join(format!("pts_{threads}.csv"));
        cli(&["spiral", "--grid", "200", "--out", csv.to_str().unwrap()], Some(threads));
    }
    identical &= std::fs::read(dir.join("pts_1.csv")).unwrap() == std::fs::read(dir.join("pts_3.csv")).unwrap();
    ensure(
        radius_ok && identical,
        format!(
            "outer radius {outer:.6} vs 1/sqrt(pi) = {target:.6} ({:.3}%), {files} figure CSVs byte-identical={identical}",
            100.0 * (outer / target - 1.0)
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("symplecticity suite", Box::new(symplecticity)),
        ("printed orientation fails", Box::new(printed_orientation)),
        ("containment in B(r_L)", Box::new(containment)),
        ("avoidance and disjointness", Box::new(avoidance)),
        ("cutoff constraints", Box::new(cutoff)),
        ("flow suite", Box::new(|| flow_suite(dir.path()))),
        ("main bound", Box::new(|| main_bound(dir.path()))),
        ("planner identities", Box::new(|| planners(dir.path()))),
        ("area preservation", Box::new(area)),
        ("figure reproduction", Box::new(|| figures(dir.path()))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} [{:.1}s]: {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
