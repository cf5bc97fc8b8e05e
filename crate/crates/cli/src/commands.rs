use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use camel_lab_core::camel::{
    camel_bound_check, camel_radius_bound, capacity_oracle, capacity_table, displacement_demo, find_camel_points,
    maximize_mode, min_enclosing_ball, mode_witness_cloud, reduce_points, verify_algebra, AlgebraOptions, BaseShape,
    CamelSearch, CoisotropicCylinder, ModeBase, ModeSearch, ModelShape, MonotoneProfile,
};
use camel_lab_core::galerkin::{approx_error_curve, envelope_constant, epsilon_curve, BallSampler};
use camel_lab_core::integrators::{flow, flow_generic, FlowConfig, GenericHamiltonianSystem, GrowthCertificate};
use camel_lab_core::linear::apply_exp_tja;
use camel_lab_core::nonlinearity::total_energy;
use camel_lab_core::phase_space::min_grid_size;
use camel_lab_core::{NonlinearitySpec, PhaseVector, Scheme, Trajectory};

use crate::config::{FileConfig, Provenance, RunDir};
use crate::Failure;

pub struct Context {
    pub seed: u64,
    pub out: PathBuf,
    pub file: FileConfig,
}

impl Context {
    fn run_dir<P: Serialize>(&self, command: &str, params: &P) -> Result<RunDir, Failure> {
        let dir = RunDir::create(&self.out, Provenance::new(command, self.seed, params))?;
        println!("{}", dir.path.display());
        Ok(dir)
    }
}

fn grid_or_default(m: usize, n: usize) -> usize {
    if m == 0 {
        min_grid_size(n)
    } else {
        m
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Invalid(msg.into()))
    }
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Nonlinearity: `sine-gordon` or `zero`.
    #[arg(long)]
    spec: Option<String>,
    /// Galerkin index.
    #[arg(long)]
    n: Option<usize>,
    /// Grid size; 0 picks the smallest admissible one.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    t: Option<f64>,
    /// `strang`, `lie` or `picard`.
    #[arg(long)]
    scheme: Option<String>,
    /// E-norm radius of the random initial state.
    #[arg(long)]
    radius: Option<f64>,
    /// Initial state CSV (`j,a_j,b_j`); overrides the random draw.
    #[arg(long)]
    state: Option<String>,
    /// Keep every `every`-th state in the trajectory file.
    #[arg(long)]
    every: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Simulate {
    spec: String,
    n: usize,
    m: usize,
    dt: f64,
    t: f64,
    scheme: String,
    radius: f64,
    state: Option<String>,
    every: usize,
}

impl Default for Simulate {
    fn default() -> Self {
        Self {
            spec: "sine-gordon".into(),
            n: 8,
            m: 0,
            dt: 0.01,
            t: 1.0,
            scheme: "strang".into(),
            radius: 1.0,
            state: None,
            every: 1,
        }
    }
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    steps: usize,
    final_time: f64,
    initial_e_norm: f64,
    final_e_norm: f64,
    energy_initial: f64,
    energy_final: f64,
    energy_drift: f64,
    /// Distance to the exact linear flow; only for the zero nonlinearity.
    linear_flow_gap: Option<f64>,
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<(), Failure> {
    let p: Simulate = ctx.file.resolve("simulate", args)?;
    require(p.every >= 1, "`every` must be at least 1")?;
    require(p.radius >= 0.0 && p.radius.is_finite(), "radius must be non-negative")?;
    let spec = NonlinearitySpec::from_name(&p.spec)?;
    let scheme: Scheme = p.scheme.parse()?;
    let u0 = match &p.state {
        Some(path) => PhaseVector::read_csv(path)?,
        None => BallSampler::new(p.n, p.radius).sample(&mut ChaCha8Rng::seed_from_u64(ctx.seed)),
    };
    let m = grid_or_default(p.m, p.n);
    let cfg = FlowConfig {
        scheme,
        m,
        ..FlowConfig::strang(p.n, p.dt, p.t)
    };
    cfg.validate(u0.order())?;

    let dir = ctx.run_dir("simulate", &p)?;
    let traj = flow(&u0, &cfg, &spec)?;
    let last = traj.last().clone();
    let e0 = total_energy(&spec, 0.0, &u0, p.n, m)?;
    let e1 = total_energy(&spec, p.t, &last, p.n, m)?;
    let keep: Vec<usize> = (0..traj.len())
        .filter(|i| i % p.every == 0 || *i + 1 == traj.len())
        .collect();
    let thinned = Trajectory {
        times: keep.iter().map(|&i| traj.times[i]).collect(),
        states: keep.iter().map(|&i| traj.states[i].clone()).collect(),
    };
    dir.write_csv("trajectory.csv", &thinned.to_csv(&[]))?;
    dir.write_csv("initial_state.csv", &u0.to_csv())?;
    dir.write_csv("final_state.csv", &last.to_csv())?;
    let summary = SimulateSummary {
        steps: traj.len() - 1,
        final_time: *traj.times.last().expect("non-empty"),
        initial_e_norm: u0.e_norm(),
        final_e_norm: last.e_norm(),
        energy_initial: e0,
        energy_final: e1,
        energy_drift: e1 - e0,
        linear_flow_gap: spec.is_zero().then(|| (&last - &apply_exp_tja(&u0, p.t)).e_norm()),
    };
    dir.write_json("summary.json", &summary)
}

// ---------------------------------------------------------------- converge

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ConvergeArgs {
    #[arg(long)]
    spec: Option<String>,
    /// Radius of the sampled ball.
    #[arg(long, alias = "R")]
    radius: Option<f64>,
    /// Time horizon.
    #[arg(long, alias = "T")]
    horizon: Option<f64>,
    /// Comma-separated Galerkin indices.
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    /// Reference truncation for the error curve.
    #[arg(long)]
    n_probe: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Samples for the interaction-picture errors; 0 skips them.
    #[arg(long)]
    approx_samples: Option<usize>,
    /// Strang step for the interaction-picture errors.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Converge {
    spec: String,
    radius: f64,
    horizon: f64,
    n_values: Vec<usize>,
    samples: usize,
    n_probe: usize,
    m: usize,
    approx_samples: usize,
    dt: f64,
}

impl Default for Converge {
    fn default() -> Self {
        Self {
            spec: "sine-gordon".into(),
            radius: 2.0,
            horizon: 1.0,
            n_values: vec![4, 8, 16, 32, 64],
            samples: 200,
            n_probe: 128,
            m: 0,
            approx_samples: 16,
            dt: 0.01,
        }
    }
}

#[derive(Debug, Serialize)]
struct ConvergeSummary {
    n_values: Vec<usize>,
    raw_errors: Vec<f64>,
    isotonic_errors: Vec<f64>,
    strictly_decreasing: bool,
    approx_errors: Option<Vec<f64>>,
    envelope_constant: Option<f64>,
}

pub fn converge(ctx: &Context, args: &ConvergeArgs) -> Result<(), Failure> {
    let p: Converge = ctx.file.resolve("converge", args)?;
    let spec = NonlinearitySpec::from_name(&p.spec)?;
    let m = grid_or_default(p.m, p.n_probe).max(min_grid_size(p.n_probe));
    let dir = ctx.run_dir("converge", &p)?;
    let rep = epsilon_curve(
        &spec,
        p.radius,
        p.horizon,
        &p.n_values,
        p.samples,
        ctx.seed,
        p.n_probe,
        m,
    )?;
    dir.write_csv("epsilon.csv", &rep.to_csv(&[]))?;
    let approx = if p.approx_samples > 0 {
        let cfg = FlowConfig {
            m,
            ..FlowConfig::strang(p.n_probe, p.dt, p.horizon)
        };
        let a = approx_error_curve(
            &spec,
            p.horizon,
            &p.n_values,
            p.n_probe,
            p.radius,
            p.approx_samples,
            ctx.seed.wrapping_add(1),
            &cfg,
        )?;
        let mut body = String::from("n,approx_error,epsilon\n");
        for ((n, a), e) in p.n_values.iter().zip(&a).zip(&rep.isotonic_errors) {
            let _ = writeln!(body, "{n},{a:.16e},{e:.16e}");
        }
        dir.write_csv("approx.csv", &body)?;
        Some(a)
    } else {
        None
    };
    let summary = ConvergeSummary {
        n_values: p.n_values.clone(),
        raw_errors: rep.raw_errors.clone(),
        isotonic_errors: rep.isotonic_errors.clone(),
        strictly_decreasing: rep.is_strictly_decreasing(),
        envelope_constant: approx.as_ref().map(|a| envelope_constant(a, &rep.isotonic_errors)),
        approx_errors: approx,
    };
    dir.write_json("summary.json", &summary)?;
    if !summary.strictly_decreasing {
        return Err(Failure::Violation("error curve is not strictly decreasing".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------- camel

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct CamelArgs {
    /// Built-in 2-dof system: `coupled` or `shear`.
    #[arg(long)]
    system: Option<String>,
    /// Base ball radius.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Fiber half-width; defaults to 1.1 times the a priori bound.
    #[arg(long)]
    fiber_box: Option<f64>,
    /// Relative slack on the bound.
    #[arg(long)]
    slack: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Camel {
    system: String,
    r: f64,
    t: f64,
    dt: f64,
    starts: usize,
    tol: f64,
    fiber_box: Option<f64>,
    slack: f64,
}

impl Default for Camel {
    fn default() -> Self {
        Self {
            system: "coupled".into(),
            r: 1.0,
            t: 0.2,
            dt: 1e-3,
            starts: 64,
            tol: 1e-8,
            fiber_box: None,
            slack: 0.01,
        }
    }
}

fn camel_system(name: &str) -> Result<GenericHamiltonianSystem, Failure> {
    let sys = match name {
        // H = p2^2/2 + q1 q2/2 + sin(q2) cos(p1)/2.
        "coupled" => GenericHamiltonianSystem::new(4, |_, z| {
            let (q1, p1, q2, p2) = (z[0], z[1], z[2], z[3]);
            vec![
                0.5 * q2,
                -0.5 * q2.sin() * p1.sin(),
                0.5 * q1 + 0.5 * q2.cos() * p1.cos(),
                p2,
            ]
        })?
        .with_value(|_, z| 0.5 * z[3] * z[3] + 0.5 * z[0] * z[2] + 0.5 * z[2].sin() * z[1].cos())
        .with_growth(GrowthCertificate { a: 0.5, b: 1.0 })?,
        // H = 0.3 q1 p2 + 0.1 sin(q2).
        "shear" => GenericHamiltonianSystem::new(4, |_, z| vec![0.3 * z[3], 0.0, 0.1 * z[2].cos(), 0.3 * z[0]])?
            .with_value(|_, z| 0.3 * z[0] * z[3] + 0.1 * z[2].sin())
            .with_growth(GrowthCertificate { a: 0.1, b: 0.3 })?,
        other => {
            return Err(Failure::Invalid(format!(
                "unknown system `{other}` (expected `coupled` or `shear`)"
            )))
        }
    };
    Ok(sys)
}

#[derive(Debug, Serialize)]
struct CamelSummary {
    fiber_box: f64,
    points: usize,
    bound: f64,
    time_limit: f64,
    in_regime: bool,
    max_norm: f64,
    violations: usize,
    envelope_violations: usize,
    max_envelope_ratio: f64,
    reduced_enclosing_radius: Option<f64>,
    passed: bool,
}

pub fn camel(ctx: &Context, args: &CamelArgs) -> Result<(), Failure> {
    let p: Camel = ctx.file.resolve("camel", args)?;
    let sys = camel_system(&p.system)?;
    require(p.r > 0.0 && p.r.is_finite(), "base radius must be positive")?;
    let bound = camel_radius_bound(p.r, sys.growth().expect("built-in systems are certified"), p.t);
    let fiber_box = match p.fiber_box {
        Some(l) => l,
        None if bound.is_finite() => 1.1 * bound,
        None => {
            return Err(Failure::Invalid(
                "bound is infinite at this time; pass --fiber-box".into(),
            ))
        }
    };
    let cyl = CoisotropicCylinder::new(2, 1, BaseShape::Ball { r: p.r }, fiber_box)?;
    let dir = ctx.run_dir("camel", &p)?;
    let (t, dt) = (p.t, p.dt);
    let flow_map = |z: &[f64]| flow_generic(z, 0.0, t, dt, &sys);
    let search = CamelSearch {
        starts: p.starts,
        tol: p.tol,
        seed: ctx.seed,
        ..Default::default()
    };
    let pts = find_camel_points(flow_map, &cyl, p.t, &search)?;
    let rep = camel_bound_check(&sys, p.r, p.t, &pts, p.dt, p.slack)?;
    dir.write_csv("camel_points.csv", &pts.to_csv(&[]))?;
    let reduced = reduce_points(&pts, 1);
    let mut body = String::from("x,y\n");
    for z in &reduced {
        let _ = writeln!(body, "{:.16e},{:.16e}", z[0], z[1]);
    }
    dir.write_csv("reduced.csv", &body)?;
    let summary = CamelSummary {
        fiber_box,
        points: pts.len(),
        bound: rep.bound,
        time_limit: rep.time_limit,
        in_regime: rep.in_regime,
        max_norm: rep.max_norm,
        violations: rep.violations.len(),
        envelope_violations: rep.envelope_violations,
        max_envelope_ratio: rep.max_envelope_ratio,
        reduced_enclosing_radius: if reduced.is_empty() {
            None
        } else {
            Some(min_enclosing_ball(&reduced)?.radius)
        },
        passed: rep.passed(),
    };
    dir.write_json("summary.json", &summary)?;
    if !summary.passed {
        return Err(Failure::Violation(format!(
            "{} camel points above the bound, {} envelope breaches",
            summary.violations, summary.envelope_violations
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- modes

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ModesArgs {
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Mode whose amplitude is pushed.
    #[arg(long)]
    l: Option<i64>,
    /// Split index of the low modes.
    #[arg(long)]
    k: Option<usize>,
    /// `disk` (mode l only) or `ball` (all low modes).
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    evals: Option<usize>,
    #[arg(long)]
    plus_box: Option<f64>,
    /// Directions of the witness cloud; 0 maximizes the amplitude only.
    #[arg(long)]
    directions: Option<usize>,
    /// Radius below which the run fails; defaults to 0.9 r.
    #[arg(long)]
    min_radius: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Modes {
    spec: String,
    n: usize,
    l: i64,
    k: usize,
    base: String,
    r: f64,
    t: f64,
    dt: f64,
    starts: usize,
    evals: usize,
    plus_box: f64,
    directions: usize,
    min_radius: Option<f64>,
}

impl Default for Modes {
    fn default() -> Self {
        Self {
            spec: "sine-gordon".into(),
            n: 16,
            l: 1,
            k: 1,
            base: "disk".into(),
            r: 1.0,
            t: 1.0,
            dt: 0.02,
            starts: 16,
            evals: 120,
            plus_box: 1.0,
            directions: 16,
            min_radius: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct ModesSummary {
    witnesses: usize,
    best_amplitude: f64,
    enclosing_radius: Option<f64>,
    enclosing_center: Option<Vec<f64>>,
    min_radius: f64,
    evals: usize,
    passed: bool,
}

pub fn modes(ctx: &Context, args: &ModesArgs) -> Result<(), Failure> {
    let p: Modes = ctx.file.resolve("modes", args)?;
    let spec = NonlinearitySpec::from_name(&p.spec)?;
    let base = match p.base.as_str() {
        "disk" => ModeBase::Disk { l: p.l, r: p.r },
        "ball" => ModeBase::Ball { r: p.r },
        other => {
            return Err(Failure::Invalid(format!(
                "unknown base `{other}` (expected `disk` or `ball`)"
            )))
        }
    };
    let cfg = FlowConfig::strang(p.n, p.dt, p.t);
    let search = ModeSearch {
        starts: p.starts,
        evals_per_start: p.evals,
        plus_box: p.plus_box,
        seed: ctx.seed,
    };
    let min_radius = p.min_radius.unwrap_or(0.9 * p.r);
    let dir = ctx.run_dir("modes", &p)?;
    let amp = |w: &PhaseVector| w.a(p.l).hypot(w.b(p.l));
    let summary = if p.directions == 0 {
        let w = maximize_mode(&spec, p.l, p.k, &base, &cfg, &search)?;
        dir.write_csv("witness_state.csv", &w.state.to_csv())?;
        let best = amp(&w.image);
        ModesSummary {
            witnesses: 1,
            best_amplitude: best,
            enclosing_radius: None,
            enclosing_center: None,
            min_radius,
            evals: w.evals,
            passed: best >= min_radius,
        }
    } else {
        let cloud = mode_witness_cloud(&spec, p.l, p.k, &base, &cfg, p.directions, &search)?;
        let mut body = String::from("direction,a_l,b_l,value,start\n");
        for (i, (pt, w)) in cloud.points.iter().zip(&cloud.witnesses).enumerate() {
            let _ = writeln!(body, "{i},{:.16e},{:.16e},{:.16e},{}", pt[0], pt[1], w.value, w.start);
        }
        dir.write_csv("witnesses.csv", &body)?;
        ModesSummary {
            witnesses: cloud.points.len(),
            best_amplitude: cloud.witnesses.iter().map(|w| amp(&w.image)).fold(0.0, f64::max),
            enclosing_radius: Some(cloud.radius),
            enclosing_center: Some(cloud.center.clone()),
            min_radius,
            evals: cloud.witnesses.iter().map(|w| w.evals).sum(),
            passed: cloud.radius >= min_radius,
        }
    };
    dir.write_json("summary.json", &summary)?;
    if !summary.passed {
        return Err(Failure::Violation(format!("witness size below {min_radius}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- capacity

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct CapacityArgs {
    /// `ball`, `cylinder`, `torus` or `coisotropic`.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    /// Complex dimension (torus: number of circles).
    #[arg(long)]
    n: Option<usize>,
    /// Complex factors of a coisotropic subspace.
    #[arg(long)]
    k: Option<usize>,
    /// Write the whole oracle table instead.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    table: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Capacity {
    shape: String,
    r: f64,
    n: usize,
    k: usize,
    table: bool,
}

impl Default for Capacity {
    fn default() -> Self {
        Self {
            shape: "ball".into(),
            r: 1.0,
            n: 1,
            k: 0,
            table: false,
        }
    }
}

pub fn capacity(ctx: &Context, args: &CapacityArgs) -> Result<(), Failure> {
    let p: Capacity = ctx.file.resolve("capacity", args)?;
    if p.table {
        let dir = RunDir::create(&ctx.out, Provenance::new("capacity", ctx.seed, &p))?;
        let mut body = String::from("shape,params,c,gamma\n");
        let table = capacity_table();
        for e in &table {
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                body,
                "{},{},{:.16e},{:.16e}",
                e.shape.tag(),
                params.join(";"),
                e.c_value,
                e.gamma_value
            );
        }
        dir.write_csv("capacity_table.csv", &body)?;
        println!("{}", dir.path.display());
        return Ok(());
    }
    let shape = match p.shape.as_str() {
        "ball" => ModelShape::Ball { r: p.r, n: p.n },
        "cylinder" => ModelShape::SymplecticCylinder { r: p.r, n: p.n },
        "torus" => ModelShape::LagrangianTorus { r: p.r, m: p.n },
        "coisotropic" => ModelShape::CoisotropicSubspace { k: p.k, n: p.n },
        other => return Err(Failure::Invalid(format!("unknown shape `{other}`"))),
    };
    let entry = capacity_oracle(shape)?;
    let dir = RunDir::create(&ctx.out, Provenance::new("capacity", ctx.seed, &p))?;
    dir.write_json("capacity.json", &entry)?;
    println!("{}", entry.c_value);
    Ok(())
}

// ---------------------------------------------------------------- displace

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct DisplaceArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Half-width of the sampled `q_n` range.
    #[arg(long)]
    q_range: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Displace {
    n: usize,
    samples: usize,
    q_range: f64,
}

impl Default for Displace {
    fn default() -> Self {
        Self {
            n: 2,
            samples: 100_000,
            q_range: 50.0,
        }
    }
}

pub fn displace(ctx: &Context, args: &DisplaceArgs) -> Result<(), Failure> {
    let p: Displace = ctx.file.resolve("displace", args)?;
    let profile = MonotoneProfile::arctan();
    let dir = ctx.run_dir("displace", &p)?;
    let rep = displacement_demo(&profile, p.n, p.samples, ctx.seed, p.q_range)?;
    dir.write_json("summary.json", &rep)?;
    if !rep.passed() {
        return Err(Failure::Violation(format!("{} samples not displaced", rep.violations)));
    }
    Ok(())
}

// ---------------------------------------------------------------- algebra

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct AlgebraArgs {
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Largest accepted pointwise error.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    inner_dt: Option<f64>,
    #[arg(long)]
    fd_step: Option<f64>,
    /// Points are drawn from `[-box, box]^2`.
    #[arg(long = "box")]
    box_size: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Algebra {
    points: usize,
    t: f64,
    dt: f64,
    tol: f64,
    inner_dt: f64,
    fd_step: f64,
    box_size: f64,
}

impl Default for Algebra {
    fn default() -> Self {
        let o = AlgebraOptions::default();
        Self {
            points: 50,
            t: 1.0,
            dt: 1e-3,
            tol: 1e-6,
            inner_dt: o.inner_dt,
            fd_step: o.fd_step,
            box_size: 2.0,
        }
    }
}

pub fn algebra(ctx: &Context, args: &AlgebraArgs) -> Result<(), Failure> {
    let p: Algebra = ctx.file.resolve("algebra", args)?;
    require(p.box_size > 0.0 && p.box_size.is_finite(), "box must be positive")?;
    // H = cos q + sin(p)/2 + t sin(q)/5,  K = sin(q) cos(p)/2.
    let h = GenericHamiltonianSystem::new(2, |t, z| vec![-z[0].sin() + 0.2 * t * z[0].cos(), 0.5 * z[1].cos()])?;
    let k = GenericHamiltonianSystem::new(2, |_, z| {
        vec![0.5 * z[0].cos() * z[1].cos(), -0.5 * z[0].sin() * z[1].sin()]
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let pts: Vec<Vec<f64>> = (0..p.points)
        .map(|_| (0..2).map(|_| rng.random_range(-p.box_size..=p.box_size)).collect())
        .collect();
    let dir = ctx.run_dir("algebra", &p)?;
    let opts = AlgebraOptions {
        inner_dt: p.inner_dt,
        fd_step: p.fd_step,
    };
    let rep = verify_algebra(&h, &k, &pts, p.t, p.dt, &opts)?;
    dir.write_json("summary.json", &rep)?;
    if rep.composition_error > p.tol || rep.inverse_error > p.tol {
        return Err(Failure::Violation(format!(
            "composition error {:.3e}, inverse error {:.3e} above {:.1e}",
            rep.composition_error, rep.inverse_error, p.tol
        )));
    }
    Ok(())
}
