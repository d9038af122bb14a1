//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any gating criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socnav_core::assistance::{haptic_force, haptic_force_unclamped};
use socnav_core::metrics::{count_intrusions, mean_disagreement};
use socnav_core::robot::{step, twist_to_planar_velocity};
use socnav_core::rvo::{
    build_cones, filter_static, in_any_cone, optimal_velocity, sample_controls, RvoContext, SamplingGrid,
};
use socnav_core::{
    build_scenario, run_trial, Condition, Layout, OperatorPolicy, PedConfig, PedestrianState, Pose2, ProxemicZones,
    RobotState, RvoWeights, ScenarioConfig, Segment2, StickInput, TickRecord, Twist, TwistLimits, Vec2,
};
use socnav_gateway::{run_batch, BatchSpec, PolicySpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn vec_in(rng: &mut ChaCha8Rng, half: f64) -> Vec2 {
    Vec2::new(uniform(rng, -half, half), uniform(rng, -half, half))
}

fn robot_with(rng: &mut ChaCha8Rng) -> RobotState {
    let mut r = RobotState::new(
        Pose2::new(uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0), uniform(rng, -PI, PI)),
        uniform(rng, 0.2, 0.4),
    );
    r.twist = Twist::new(uniform(rng, 0.0, 1.0), uniform(rng, -1.5, 1.5));
    r
}

fn pedestrian_near(rng: &mut ChaCha8Rng, id: u32, around: Vec2, spread: f64) -> PedestrianState {
    let pos = around + vec_in(rng, spread);
    let mut p = PedestrianState::new(id, pos, pos + vec_in(rng, 5.0));
    p.velocity = vec_in(rng, 1.2);
    p.body_radius = uniform(rng, 0.15, 0.3);
    p.personal_radius = p.body_radius + uniform(rng, 0.0, 1.0);
    p
}

/// Sphere-traced march along `origin + t·dir`, t ≥ 0: step by the distance to
/// the disc until touching it (hit) or moving past the closest approach (miss).
fn march_hits_disc(origin: Vec2, dir: Vec2, center: Vec2, radius: f64, eps: f64) -> bool {
    let speed = dir.norm();
    let gap = |t: f64| (origin + dir * t - center).norm() - radius;
    if gap(0.0) <= eps {
        return true;
    }
    if speed == 0.0 {
        return false;
    }
    let t_closest = (center - origin).dot(dir) / (speed * speed);
    let mut t = 0.0;
    while t <= t_closest {
        let g = gap(t);
        if g <= eps {
            return true;
        }
        t += g / speed;
    }
    false
}

/// Distance from `center` to the ray `origin + t·dir`, t ≥ 0.
fn ray_distance(origin: Vec2, dir: Vec2, center: Vec2) -> f64 {
    let s = dir.norm_squared();
    let t = if s == 0.0 { 0.0 } else { ((center - origin).dot(dir) / s).max(0.0) };
    (origin + dir * t - center).norm()
}

fn cone_membership() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    let band = 1e-6;
    let (mut checked, mut in_band, mut disagreements) = (0, 0, 0);
    for _ in 0..10_000 {
        let robot = robot_with(&mut rng);
        let ped = pedestrian_near(&mut rng, 0, robot.position(), 4.0);
        let robot_v = vec_in(&mut rng, 1.0);
        let alpha = uniform(&mut rng, 0.0, 1.0);
        let cones = build_cones(&robot, robot_v, std::slice::from_ref(&ped), alpha, 100.0);
        let v = vec_in(&mut rng, 2.0);
        let apex = robot_v * (1.0 - alpha) + ped.velocity * alpha;
        let dir = v - apex;
        let radius = robot.radius + ped.personal_radius;
        if (ray_distance(robot.position(), dir, ped.position) - radius).abs() <= band {
            in_band += 1;
            continue;
        }
        checked += 1;
        let oracle = march_hits_disc(robot.position(), dir, ped.position, radius, band / 2.0);
        if oracle != in_any_cone(v, &cones) {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!("{checked} cases, {disagreements} disagreements, {in_band} inside the boundary band"),
    )
}

/// Random world for the selection oracles: samples after the static filter,
/// cones, and an objective context.
struct World {
    robot: RobotState,
    samples: Vec<Twist>,
    cones: Vec<socnav_core::VelocityCone>,
    ctx: RvoContext,
}

fn random_world(rng: &mut ChaCha8Rng) -> World {
    let limits = TwistLimits::default();
    let robot = robot_with(rng);
    let n_peds = rng.random_range(0..8);
    let peds: Vec<_> = (0..n_peds).map(|i| pedestrian_near(rng, i, robot.position(), 3.0)).collect();
    let walls: Vec<Segment2> = (0..rng.random_range(0..3))
        .filter_map(|_| {
            let a = robot.position() + vec_in(rng, 2.5);
            Segment2::new(a, a + vec_in(rng, 3.0))
        })
        .collect();
    // Operator command sometimes on the grid, so exact ties occur.
    let operator = if rng.random_bool(0.3) {
        Twist::new(0.1 * rng.random_range(0..=10) as f64, 0.15 * rng.random_range(-10..=10) as f64)
    } else {
        Twist::new(uniform(rng, -0.2, 1.2), uniform(rng, -2.0, 2.0))
    };
    let samples = sample_controls(&limits, &SamplingGrid::default(), Some(operator)).unwrap();
    let samples = filter_static(&samples, &robot, &walls, 1.5, 0.1, 0.05);
    let robot_v = twist_to_planar_velocity(&robot, robot.twist, 0.5);
    let cones = build_cones(&robot, robot_v, &peds, uniform(rng, 0.0, 1.0), 8.0);
    let ctx = RvoContext {
        v_pref: twist_to_planar_velocity(&robot, operator.clamp(&limits), 0.5),
        v_prev_opt: if rng.random_bool(0.2) { Vec2::ZERO } else { vec_in(rng, 1.0) },
        v_goal: Vec2::from_angle(uniform(rng, -PI, PI)),
        alpha: 0.5,
        v_max: 1.0,
    };
    World { robot, samples, cones, ctx }
}

fn sq(a: Vec2, b: Vec2) -> f64 {
    let (dx, dy) = (a.x - b.x, a.y - b.y);
    dx * dx + dy * dy
}

/// Exhaustive selection written out independently of the library.
fn brute_force_select(w: &World, weights: &RvoWeights) -> (usize, bool) {
    let planar: Vec<Vec2> = w.samples.iter().map(|s| twist_to_planar_velocity(&w.robot, *s, 0.5)).collect();
    let feasible: Vec<bool> = planar.iter().map(|v| !in_any_cone(*v, &w.cones)).collect();
    let score = |v: Vec2| {
        weights.intent * sq(v, w.ctx.v_pref) + weights.smoothness * sq(v, w.ctx.v_prev_opt) + weights.goal * sq(v, w.ctx.v_goal)
    };
    let mut best: Option<(usize, f64)> = None;
    for i in 0..planar.len() {
        if feasible[i] {
            let g = score(planar[i]);
            match best {
                Some((_, b)) if g >= b => {}
                _ => best = Some((i, g)),
            }
        }
    }
    if let Some((i, _)) = best {
        return (i, false);
    }
    let ttc = |v: Vec2| w.cones.iter().map(|c| c.time_to_collision(v)).fold(f64::INFINITY, f64::min);
    let mut idx = 0;
    for i in 1..planar.len() {
        let (a, b) = (ttc(planar[i]), ttc(planar[idx]));
        if a > b || (a == b && planar[i].norm() < planar[idx].norm()) {
            idx = i;
        }
    }
    (idx, true)
}

fn same_bits(a: Vec2, b: Vec2) -> bool {
    a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits()
}

fn argmin_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11);
    let (mut mismatches, mut infeasible) = (0, 0);
    for _ in 0..1000 {
        let w = random_world(&mut rng);
        let weights = match rng.random_range(0..4) {
            0 => RvoWeights::new(1.0, 0.0, 0.0),
            1 => RvoWeights::default(),
            _ => RvoWeights::new(uniform(&mut rng, 0.0, 2.0), uniform(&mut rng, 0.0, 2.0), uniform(&mut rng, 0.01, 2.0)),
        };
        let sel = optimal_velocity(&w.samples, &w.robot, &w.cones, &w.ctx, &weights, 0.5).unwrap();
        let (idx, inf) = brute_force_select(&w, &weights);
        let expected_planar = twist_to_planar_velocity(&w.robot, w.samples[idx], 0.5);
        infeasible += usize::from(inf);
        if sel.index != idx
            || sel.infeasible != inf
            || sel.twist != w.samples[idx]
            || !same_bits(sel.planar, expected_planar)
        {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 worlds ({infeasible} fully blocked), {mismatches} mismatches"))
}

fn goal_only_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x601);
    let weights = RvoWeights::new(0.0, 0.0, 1.0);
    let (mut compared, mut blocked, mut mismatches) = (0, 0, 0);
    for _ in 0..1000 {
        let w = random_world(&mut rng);
        let sel = optimal_velocity(&w.samples, &w.robot, &w.cones, &w.ctx, &weights, 0.5).unwrap();
        // Nearest feasible planar velocity to the goal velocity, first one on ties.
        let mut nearest: Option<(usize, f64)> = None;
        for (i, s) in w.samples.iter().enumerate() {
            let v = twist_to_planar_velocity(&w.robot, *s, 0.5);
            if in_any_cone(v, &w.cones) {
                continue;
            }
            let d = sq(v, w.ctx.v_goal);
            if nearest.is_none_or(|(_, b)| d < b) {
                nearest = Some((i, d));
            }
        }
        match nearest {
            None => {
                blocked += 1;
                if !sel.infeasible {
                    mismatches += 1;
                }
            }
            Some((i, _)) => {
                compared += 1;
                let v = twist_to_planar_velocity(&w.robot, w.samples[i], 0.5);
                if sel.index != i || sel.infeasible || !same_bits(sel.planar, v) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{compared} cases compared, {blocked} fully blocked, {mismatches} mismatches"),
    )
}

fn haptics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4A7);
    let (mut iff_failures, mut linear_failures) = (0, 0);
    for k in 0..1000 {
        let gain = uniform(&mut rng, 0.0, 3.0);
        let pref = Twist::new(uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.5, 1.5));
        let opt = if k % 2 == 0 {
            pref
        } else {
            Twist::new(uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.5, 1.5))
        };
        let equal = (opt.linear - pref.linear).abs() <= 1e-12 && (opt.angular - pref.angular).abs() <= 1e-12;
        let f = haptic_force(opt, pref, gain);
        let zero = f == Vec2::ZERO;
        if equal != zero && gain > 0.0 {
            iff_failures += 1;
        }
        let delta = (opt.linear - pref.linear, opt.angular - pref.angular);
        let one = haptic_force_unclamped(Twist::new(pref.linear + delta.0, pref.angular + delta.1), pref, gain);
        let two = haptic_force_unclamped(Twist::new(pref.linear + 2.0 * delta.0, pref.angular + 2.0 * delta.1), pref, gain);
        if (two.x - 2.0 * one.x).abs() > 1e-12 || (two.y - 2.0 * one.y).abs() > 1e-12 {
            linear_failures += 1;
        }
    }
    outcome(
        iff_failures == 0 && linear_failures == 0,
        format!("1000 pairs, {iff_failures} zero-iff-equal failures, {linear_failures} linearity failures"),
    )
}

fn closed_loop_safety() -> Outcome {
    let (mut clean, mut unexplained) = (0, 0);
    let mut failures = Vec::new();
    for seed in 0..50 {
        let mut cfg = ScenarioConfig::new(Layout::HallA, PedConfig::Crossing, seed);
        cfg.ped_count = 6;
        cfg.rvo.weights = RvoWeights::new(1.0, 0.0, 0.0);
        let world = build_scenario(&cfg).unwrap();
        assert!(world.peds.iter().all(|p| (p.personal_radius - p.body_radius - 0.45).abs() < 1e-12));
        let out = run_trial(&cfg, OperatorPolicy::Compliant, Condition::H).unwrap();
        if out.metrics.intimate_intrusions == 0 {
            clean += 1;
            continue;
        }
        failures.push(seed);
        let zones = cfg.zones;
        for r in &out.log {
            let intruded = r.peds.iter().any(|p| socnav_core::metrics::clearance(&r.robot, p, zones.mode) < zones.intimate);
            if intruded && !r.infeasible {
                unexplained += 1;
            }
        }
    }
    outcome(
        clean >= 48 && unexplained == 0,
        format!("{clean}/50 trials without intimate intrusions, failing seeds {failures:?}, {unexplained} intrusion ticks not flagged infeasible"),
    )
}

fn intent_preservation() -> Outcome {
    let (mut ticks, mut kept) = (0, 0);
    for layout in [Layout::HallA, Layout::HallB] {
        let mut cfg = ScenarioConfig::new(layout, PedConfig::Crossing, 1);
        cfg.ped_count = 0;
        cfg.rvo.weights = RvoWeights::new(1.0, 0.0, 0.0);
        let out = run_trial(&cfg, OperatorPolicy::GoalSeek, Condition::HvT).unwrap();
        for r in &out.log {
            ticks += 1;
            if r.v_opt == Some(r.v_pref.clamp(&cfg.limits)) {
                kept += 1;
            }
        }
    }
    outcome(ticks > 0 && kept == ticks, format!("{kept}/{ticks} ticks select the operator's own command"))
}

fn batch_spec(out: &Path) -> BatchSpec {
    BatchSpec {
        scenario: PedConfig::Random,
        layout: Layout::HallB,
        condition: Condition::HvT,
        policy: PolicySpec::Noisy,
        seed: 9,
        repeat: 1,
        out: out.to_path_buf(),
        max_duration: Some(20.0),
        ped_count: None,
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ra = run_batch(&batch_spec(&a)).unwrap();
    let rb = run_batch(&batch_spec(&b)).unwrap();
    let in_process = std::fs::read(&ra.logs[0]).unwrap() == std::fs::read(&rb.logs[0]).unwrap();

    let cli = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_socnav"))
            .args(["run", "--scenario", "random", "--layout", "b", "--condition", "hvt", "--policy", "noisy"])
            .args(["--seed", "9", "--max-duration", "20", "--out"])
            .arg(out)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(out.join(ra.logs[0].file_name().unwrap())).unwrap()
    };
    let (pa, pb) = (cli(&dir.path().join("pa")), cli(&dir.path().join("pb")));
    let across_processes = pa == pb;
    let matches_library = pa == std::fs::read(&ra.logs[0]).unwrap();
    outcome(
        in_process && across_processes && matches_library,
        format!("in-process identical: {in_process}, two processes identical: {across_processes}, CLI equals library: {matches_library}"),
    )
}

/// Independent run-length scan: number of maximal runs of `true`.
fn runs(flags: impl Iterator<Item = bool>) -> u32 {
    let mut count = 0;
    let mut prev = false;
    for f in flags {
        if f && !prev {
            count += 1;
        }
        prev = f;
    }
    count
}

fn trace_log(traces: &[Vec<f64>]) -> Vec<TickRecord> {
    let robot = RobotState::new(Pose2::new(0.0, 0.0, 0.0), 0.28);
    (0..traces[0].len())
        .map(|k| TickRecord {
            tick: k as u64,
            t: k as f64 * 0.05,
            robot,
            peds: traces
                .iter()
                .enumerate()
                .map(|(id, tr)| {
                    // Pedestrian `id` placed along its own bearing at the traced clearance.
                    let dir = Vec2::from_angle(id as f64);
                    PedestrianState::new(id as u32, dir * (tr[k] + 0.28 + 0.25), Vec2::ZERO)
                })
                .collect(),
            input: StickInput::default(),
            v_pref: Twist::ZERO,
            v_pref_planar: Vec2::ZERO,
            v_opt: None,
            v_opt_planar: None,
            condition: Condition::Mc,
            infeasible: false,
        })
        .collect()
}

fn metrics_oracles() -> Outcome {
    let zones = ProxemicZones::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3E7);
    let mut failures = 0;

    let worked = count_intrusions(&trace_log(&[vec![1.3, 1.0, 0.4, 1.0, 1.3]]), &zones);
    let worked_ok = (worked.intimate, worked.personal) == (1, 1);

    for _ in 0..100 {
        let n_peds = rng.random_range(1..4);
        let len = rng.random_range(5..200);
        let traces: Vec<Vec<f64>> = (0..n_peds)
            .map(|_| {
                // Piecewise-constant segments so runs of several ticks occur.
                let mut tr = Vec::with_capacity(len);
                while tr.len() < len {
                    let mut c = uniform(&mut rng, 0.0, 2.0);
                    if (c - 0.45).abs() < 1e-6 || (c - 1.2).abs() < 1e-6 {
                        c += 0.01;
                    }
                    let hold = rng.random_range(1..12);
                    tr.extend(std::iter::repeat_n(c, hold));
                }
                tr.truncate(len);
                tr
            })
            .collect();
        let got = count_intrusions(&trace_log(&traces), &zones);
        let intimate: u32 = traces.iter().map(|tr| runs(tr.iter().map(|&c| c < 0.45))).sum();
        let personal: u32 = traces.iter().map(|tr| runs(tr.iter().map(|&c| c < 1.2))).sum();
        if (got.intimate, got.personal) != (intimate, personal) {
            failures += 1;
        }
    }

    let mut dis_err: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..300);
        let mut log = trace_log(&[vec![5.0; n]]);
        let mut direct = 0.0;
        for r in &mut log {
            let (p, o) = (vec_in(&mut rng, 1.0), vec_in(&mut rng, 1.0));
            r.v_pref_planar = p;
            r.v_opt_planar = Some(o);
            direct += ((p.x - o.x).powi(2) + (p.y - o.y).powi(2)).sqrt();
        }
        dis_err = dis_err.max((mean_disagreement(&log).unwrap() - direct / n as f64).abs());
    }
    outcome(
        worked_ok && failures == 0 && dis_err <= 1e-12,
        format!(
            "worked trace (1.3, 1.0, 0.4, 1.0, 1.3) gives {:?}, {failures}/100 trace mismatches, max disagreement error {dis_err:.1e}",
            (worked.intimate, worked.personal)
        ),
    )
}

fn kinematics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x515);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let cmd = Twist::new(uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.5, 1.5));
        let horizon = uniform(&mut rng, 0.1, 3.0);
        let start = RobotState::new(Pose2::new(0.0, 0.0, uniform(&mut rng, -PI, PI)), 0.28);
        let exact = step(&start, cmd, horizon).pose.position;
        let h = 1e-5;
        let n = (horizon / h).round() as usize;
        let h = horizon / n as f64;
        let (mut x, mut y, mut th) = (0.0, 0.0, start.pose.heading);
        for _ in 0..n {
            x += cmd.linear * th.cos() * h;
            y += cmd.linear * th.sin() * h;
            th += cmd.angular * h;
        }
        worst = worst.max(exact.distance(Vec2::new(x, y)));
    }
    let q = step(&RobotState::new(Pose2::new(0.0, 0.0, 0.0), 0.28), Twist::new(1.0, 1.0), FRAC_PI_2).pose;
    let quarter = q.position.distance(Vec2::new(1.0, 1.0)) < 1e-12 && (q.heading - FRAC_PI_2).abs() < 1e-12;
    outcome(
        worst < 1e-3 && quarter,
        format!("max endpoint error {worst:.2e} m over 100 triples, quarter circle exact: {quarter}"),
    )
}

fn plausibility() -> Outcome {
    let times: Vec<f64> = (0..10)
        .map(|seed| {
            let cfg = ScenarioConfig::new(Layout::HallA, PedConfig::Crossing, seed);
            run_trial(&cfg, OperatorPolicy::GoalSeek, Condition::Mc).unwrap().metrics.trial_time
        })
        .collect();
    let inside = times.iter().filter(|t| (20.0..=120.0).contains(*t)).count();
    let (lo, hi) = times.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &t| (l.min(t), h.max(t)));
    outcome(
        inside == times.len(),
        format!("{inside}/{} goal-seeking trial times in [20, 120] s, range {lo:.2}..{hi:.2} s", times.len()),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>, bool);
    let criteria: [Criterion; 10] = [
        ("cone membership vs ray march", cone_membership, Some(Duration::from_secs(5)), true),
        ("weighted argmin vs exhaustive search", argmin_oracle, Some(Duration::from_secs(10)), true),
        ("goal-only weights reduce to nearest goal velocity", goal_only_reduction, None, true),
        ("haptic force zero iff equal, linear", haptics, None, true),
        ("closed-loop safety, compliant crossing", closed_loop_safety, Some(Duration::from_secs(120)), true),
        ("intent preservation in an empty hall", intent_preservation, None, true),
        ("determinism across runs and processes", determinism, None, true),
        ("metrics vs run-length and direct oracles", metrics_oracles, None, true),
        ("unicycle closed form vs dense Euler", kinematics, None, true),
        ("plausibility anchor (non-gating)", plausibility, None, false),
    ];
    let mut failed = 0;
    for (name, run, budget, gating) in criteria {
        let t0 = Instant::now();
        let mut o = run();
        let elapsed = t0.elapsed();
        if let Some(b) = budget {
            if elapsed > b {
                o.pass = false;
                o.detail.push_str(&format!("; over the {:.0} s budget", b.as_secs_f64()));
            }
        }
        let tag = match (o.pass, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        println!("{tag} {name}: {} ({:.2} s)", o.detail, elapsed.as_secs_f64());
        if !o.pass && gating {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
