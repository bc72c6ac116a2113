//! One function per subcommand. Each returns whether the run passed; the
//! artifact is written either way.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use spiralemb::chain::{
    check_nesting, plan_family, plan_kh, verify_chain, ChainConfig, ChainSampling, FMap, DEFAULT_PROBES,
};
use spiralemb::double_spiral::{DoubleSpiral, DoubleSpiralConfig};
use spiralemb::exec::map_indexed;
use spiralemb::geometry::{BallRegion, PlanarPoint, Point4, RectRegion};
use spiralemb::maps::{Orientation, PlanarEmbedding, PlanarMap, SQRT_PI};
use spiralemb::spiral::SpiralParams;
use spiralemb::torus_strip::{flow_jacobian, flow_rk4, flow_time1, hamiltonian, CutoffProfile, DomainSampling};
use spiralemb::verifier::{
    check_avoids, check_contained, check_fd_agreement, check_injective, check_symplectic, check_symplectic_r4,
    estimate_area, SampleGrid, VerificationReport, ANALYTIC_TOL, FD_TOL, RNG_NAME,
};
use spiralemb::Execution;

use crate::args::*;
use crate::output::{emit, to_csv, to_json};
use crate::CliError;

pub type Passed = bool;

fn write(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    emit(out, bytes).map_err(|e| CliError::Io(out.map_or("<stdout>".into(), |p| p.display().to_string()), e))
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    write(out, &to_json(value)?)
}

pub fn spiral_params(f: &SpiralFlags) -> Result<SpiralParams, CliError> {
    let orientation = match f.orientation {
        OrientationArg::Symplectic => Orientation::Symplectic,
        OrientationArg::Printed => Orientation::Printed,
    };
    Ok(SpiralParams::new(f.a, f.b, f.lambda, f.delta, f.r)?
        .with_theta_offset(f.theta_offset)?
        .with_orientation(orientation))
}

/// Evaluates `map` on `points`, in order.
fn image_rows(map: &dyn PlanarEmbedding, points: &[PlanarPoint]) -> Result<Vec<(PlanarPoint, PlanarPoint)>, CliError> {
    let images = map_indexed(Execution::default(), points.len(), |i| map.eval(points[i]));
    points
        .iter()
        .zip(images)
        .map(|(p, q)| Ok((*p, q?)))
        .collect()
}

fn grid_resolution(n: usize) -> Result<usize, CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("--grid must be at least 2, got {n}")));
    }
    Ok(n)
}

fn render_rows(
    rows: &[(PlanarPoint, PlanarPoint)],
    format: Format,
    out: Option<&Path>,
    summary: impl Serialize,
) -> Result<(), CliError> {
    match format {
        Format::Csv => write(out, to_csv(rows).as_bytes()),
        Format::Json => write_json(out, &summary),
        Format::Svg => Err(CliError::Usage("use the figure subcommand for SVG output".into())),
    }
}

#[derive(Serialize)]
struct PointSet {
    map: String,
    params: BTreeMap<String, f64>,
    samples: usize,
    max_image_radius: f64,
    rows: Vec<[f64; 4]>,
}

fn point_set(map: &dyn PlanarEmbedding, rows: &[(PlanarPoint, PlanarPoint)]) -> PointSet {
    PointSet {
        map: map.label(),
        params: map.params(),
        samples: rows.len(),
        max_image_radius: rows.iter().map(|(_, q)| q.norm()).fold(0.0, f64::max),
        rows: rows.iter().map(|(p, q)| [p.x, p.y, q.x, q.y]).collect(),
    }
}

pub fn spiral(a: &SpiralArgs) -> Result<Passed, CliError> {
    let s = spiral_params(&a.spiral)?;
    let n = grid_resolution(a.grid)?;
    let rows = image_rows(&s, &s.domain().grid(n, n))?;
    render_rows(&rows, a.format, a.out.as_deref(), point_set(&s, &rows))?;
    Ok(true)
}

fn double_config(a: f64, eps: f64, m: Option<f64>) -> Result<DoubleSpiralConfig, CliError> {
    Ok(match m {
        Some(m) => DoubleSpiralConfig::new(a, eps, m)?,
        None => DoubleSpiralConfig::with_default_m(a, eps)?,
    })
}

fn domain_sampling(s: SamplingArg) -> DomainSampling {
    match s {
        SamplingArg::Rectangles => DomainSampling::Rectangles,
        SamplingArg::Strands => DomainSampling::Strands { rows: 4 },
    }
}

pub fn double_spiral(a: &DoubleSpiralArgs) -> Result<Passed, CliError> {
    let ds = DoubleSpiral::new(double_config(a.a, a.epsilon, a.m)?)?;
    let n = grid_resolution(a.grid)?;
    let tagged = ds.domain.sample(n, domain_sampling(a.sampling))?;
    let points: Vec<PlanarPoint> = tagged.iter().map(|t| t.p).collect();
    let images = map_indexed(Execution::default(), tagged.len(), |i| ds.eval(&tagged[i]));
    let rows: Vec<(PlanarPoint, PlanarPoint)> = points
        .into_iter()
        .zip(images)
        .map(|(p, q)| q.map(|q| (p, q)))
        .collect::<Result<_, _>>()?;
    render_rows(&rows, a.format, a.out.as_deref(), point_set(&ds, &rows))?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct FlowReport {
    eps: f64,
    #[serde(rename = "A")]
    a: f64,
    steps: usize,
    samples: usize,
    max_rk4_error: f64,
    positions_preserved: bool,
    energy_preserved: bool,
    max_symplectic_defect: f64,
    tol: f64,
    rng: &'static str,
    seed: u64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct FlowPoint {
    input: [f64; 4],
    output: [f64; 4],
    hamiltonian: f64,
}

/// Random state for the flow comparison: `x1` across the cutoff support,
/// the other coordinates over `[-sqrt(pi), sqrt(pi)]`.
fn flow_state(c: &CutoffProfile, seed: u64, i: usize) -> Point4 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let s = 1.2 * c.support();
    Point4::new(
        rng.gen_range(-s..s),
        rng.gen_range(-SQRT_PI..SQRT_PI),
        rng.gen_range(-SQRT_PI..SQRT_PI),
        rng.gen_range(-SQRT_PI..SQRT_PI),
    )
}

pub fn flow(a: &FlowArgs) -> Result<Passed, CliError> {
    let c = CutoffProfile::new(a.a, a.epsilon)?;
    if let Some(p) = &a.point {
        if p.len() != 4 {
            return Err(CliError::Usage(format!("--point needs 4 coordinates, got {}", p.len())));
        }
        let q = Point4::new(p[0], p[1], p[2], p[3]);
        let out = flow_time1(&c, q);
        write_json(
            a.out.as_deref(),
            &FlowPoint {
                input: q.to_array(),
                output: out.to_array(),
                hamiltonian: hamiltonian(&c, q),
            },
        )?;
        return Ok(true);
    }
    if a.samples == 0 || a.steps == 0 {
        return Err(CliError::Usage("--samples and --steps must be positive".into()));
    }
    let exec = Execution::default();
    let states: Vec<Point4> = (0..a.samples).map(|i| flow_state(&c, a.seed, i)).collect();
    let per = map_indexed(exec, states.len(), |i| {
        let q = states[i];
        let exact = flow_time1(&c, q);
        let rk = flow_rk4(&c, q, a.steps);
        let err = exact
            .to_array()
            .iter()
            .zip(rk.to_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let kept = exact.x1 == q.x1 && exact.x2 == q.x2;
        let energy = hamiltonian(&c, exact) == hamiltonian(&c, q);
        (err, kept, energy)
    });
    let sym = check_symplectic_r4("flow", &states, |q| Ok(flow_jacobian(&c, q)), ANALYTIC_TOL, exec)?;
    let max_err = per.iter().map(|t| t.0).fold(0.0, f64::max);
    let kept = per.iter().all(|t| t.1);
    let energy = per.iter().all(|t| t.2);
    let report = FlowReport {
        eps: a.epsilon,
        a: a.a,
        steps: a.steps,
        samples: a.samples,
        max_rk4_error: max_err,
        positions_preserved: kept,
        energy_preserved: energy,
        max_symplectic_defect: sym.extremum("max_symplectic_defect").unwrap_or(f64::NAN),
        tol: a.tol,
        rng: RNG_NAME,
        seed: a.seed,
        passed: max_err <= a.tol && kept && energy && sym.passed,
    };
    write_json(a.out.as_deref(), &report)?;
    Ok(report.passed)
}

pub fn chain_sampling(n: usize, seed: u64, s: SamplingArg) -> ChainSampling {
    let mut sampling = ChainSampling::for_target(n, seed);
    if s == SamplingArg::Rectangles {
        // Two rectangles of res^2 points each.
        let res = 60;
        let rest = n.saturating_sub(sampling.random) as f64;
        sampling.domain = DomainSampling::Rectangles;
        sampling.p1_resolution = res;
        sampling.b_resolution = ((rest / (2 * res * res) as f64).sqrt().ceil() as usize).max(2);
    }
    sampling
}

pub fn chain_verify(a: &ChainArgs) -> Result<Passed, CliError> {
    let config = match a.m {
        Some(m) => ChainConfig::new(a.epsilon, a.a, m)?,
        None => ChainConfig::with_default_m(a.epsilon, a.a)?,
    };
    let sampling = chain_sampling(a.samples, a.seed, a.sampling);
    let report = verify_chain(config, &sampling, Execution::default())?;
    write_json(a.out.as_deref(), &report)?;
    Ok(report.passed)
}

/// A map together with its natural domain and its default radii.
struct Subject {
    map: Box<dyn PlanarEmbedding>,
    region: RectRegion,
    outer: Option<f64>,
    inner: Option<f64>,
}

fn subject(a: &VerifyArgs) -> Result<Subject, CliError> {
    let ds = || -> Result<DoubleSpiral, CliError> {
        Ok(DoubleSpiral::new(double_config(a.spiral.a, a.epsilon, a.m)?)?)
    };
    Ok(match a.map {
        MapName::Identity => Subject {
            map: Box::new(PlanarMap::identity()),
            region: RectRegion::origin(a.spiral.a, a.spiral.b)?,
            outer: None,
            inner: None,
        },
        MapName::Spiral => {
            let s = spiral_params(&a.spiral)?;
            let l = a.l.unwrap_or(s.a);
            Subject {
                region: RectRegion::origin(l, s.b)?,
                outer: Some(s.radius_bound(l)?),
                inner: Some(s.inner_avoid_radius()),
                map: Box::new(s),
            }
        }
        MapName::F => {
            let f = FMap::new(a.epsilon)?;
            Subject {
                region: f.domain(),
                outer: Some(f.spiral.radius_bound(f.spiral.a)?),
                inner: None,
                map: Box::new(f),
            }
        }
        MapName::Beta1 | MapName::Beta2 => {
            let ds = ds()?;
            let (beta, region) = if a.map == MapName::Beta1 {
                (ds.beta1, ds.domain.r1)
            } else {
                (ds.beta2, ds.domain.r2)
            };
            Subject {
                region,
                outer: Some(ds.outer_radius()),
                inner: Some(ds.config.inner_radius()),
                map: Box::new(beta),
            }
        }
        MapName::Tuck => {
            let ds = ds()?;
            Subject {
                region: ds.domain.w,
                outer: Some(ds.tuck.target_radius),
                inner: None,
                map: Box::new(ds.tuck),
            }
        }
    })
}

fn area_report(map: &dyn PlanarEmbedding, region: &RectRegion, a: &VerifyArgs) -> Result<VerificationReport, CliError> {
    let tol = a.tol.unwrap_or(0.02);
    let est = estimate_area(map, region, a.samples, a.seed, Execution::default())?;
    let mut r = VerificationReport::new("area", &map.label());
    r.params = map.params();
    r.params.insert("tol".into(), tol);
    r.samples = est.cells;
    r.passed = est.relative_error <= tol;
    r.violations = usize::from(!r.passed);
    for (k, v) in [
        ("area", est.area),
        ("domain_area", est.domain_area),
        ("relative_error", est.relative_error),
        ("cell_size", est.cell_size),
    ] {
        r.extrema.insert(k.into(), v);
    }
    r.rng = Some(RNG_NAME.into());
    r.seed = Some(est.seed);
    Ok(r)
}

pub fn verify(a: &VerifyArgs) -> Result<Passed, CliError> {
    let s = subject(a)?;
    let map = s.map.as_ref();
    let n = grid_resolution(a.grid)?;
    let mut grid = SampleGrid::square(s.region, n);
    if a.random > 0 {
        grid = grid.with_random(a.seed, a.random);
    }
    let exec = Execution::default();
    let need = |r: Option<f64>, what: &str| {
        a.radius
            .or(r)
            .ok_or_else(|| CliError::Usage(format!("--radius is required for {what} on this map")))
    };
    let report = match a.check {
        CheckName::Symplectic => check_symplectic(map, &grid, a.tol.unwrap_or(ANALYTIC_TOL), exec)?,
        CheckName::Fd => check_fd_agreement(map, &grid, a.tol.unwrap_or(FD_TOL), exec)?,
        CheckName::Injective => check_injective(map, &grid, a.tol.unwrap_or(1e-9), a.domain_sep, exec)?,
        CheckName::Contained => {
            let ball = BallRegion::planar(need(s.outer, "contained")?)?;
            check_contained(map, &grid, &ball, a.tol.unwrap_or(1e-9), exec)?
        }
        CheckName::Avoids => {
            let ball = BallRegion::planar_closed(need(s.inner, "avoids")?)?;
            check_avoids(map, &grid, &ball, exec)?
        }
        CheckName::Area => area_report(map, &s.region, a)?,
    };
    write_json(a.out.as_deref(), &report)?;
    Ok(report.passed)
}

pub fn plan(a: &PlanArgs) -> Result<Passed, CliError> {
    let out = a.out.as_deref();
    match a.mode {
        PlanMode::Kh => {
            let p = plan_kh(a.epsilon, a.t)?;
            write_json(out, &p)?;
            Ok(p.in_domain)
        }
        PlanMode::Family => {
            let p = plan_family(a.epsilon)?;
            write_json(out, &p)?;
            Ok(p.in_domain)
        }
        PlanMode::Nesting => {
            let r = check_nesting(&a.eps_list, &DEFAULT_PROBES)?;
            write_json(out, &r)?;
            Ok(r.passed)
        }
    }
}
