//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ibvs-dock --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ibvs_docking::control::{
    inner_control, solve_care, synthesize_gains, to_channel_references, update_integrator,
    ChannelSignals, DesiredCameraVelocity, IntegratorState,
};
use ibvs_docking::dynamics::{
    gust_forcing, step_receiver_disturbed, ReceiverState, TurbulenceLevel,
};
use ibvs_docking::sim::{run_batch, run_scenario, ControllerKind, GainTable, ScenarioConfig};
use ibvs_docking::vision::{image_error_rate, interaction_matrix, ImagePoint};
use ibvs_docking::{LqrWeights, PlantModel, Vec3};
use nalgebra::{DMatrix, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let took = start.elapsed();
    v.detail = format!("{}; {:.2} s", v.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            v.pass = false;
            v.detail
                .push_str(&format!(" exceeds {} s", limit.as_secs_f64()));
        }
    }
    v
}

fn interaction_matrix_closed_form() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x, y, z): (f64, f64, f64) = (
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(1e-3..100.0),
        );
        let l = interaction_matrix(&ImagePoint::new(x, y), z).unwrap();
        let want = [
            [-1.0 / z, 0.0, x / z, x * y, -(1.0 + x * x), y],
            [0.0, -1.0 / z, y / z, 1.0 + y * y, -x * y, -x],
        ];
        for (r, row) in want.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                let got = l.entries[(r, c)];
                let rel = if w == 0.0 {
                    got.abs()
                } else {
                    ((got - w) / w).abs()
                };
                worst = worst.max(rel);
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("1000 samples, worst relative error {worst:.1e}"),
    )
}

fn decomposition_consistency() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    for _ in 0..1000 {
        let (x, y, z): (f64, f64, f64) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.05..50.0),
        );
        let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
        let l = interaction_matrix(&ImagePoint::new(x, y), z).unwrap();
        // x channel keeps v_x, v_z and w_y; y channel keeps v_y, v_z and w_x
        let vx = Vector6::new(v[0], 0.0, v[2], 0.0, v[4], 0.0);
        let vy = Vector6::new(0.0, v[1], v[2], v[3], 0.0, 0.0);
        let (rate_x, _) = image_error_rate(&l, &vx);
        let (_, rate_y) = image_error_rate(&l, &vy);
        let tx = [-v[0] / z, x * v[2] / z, -(1.0 + x * x) * v[4]];
        let ty = [-v[1] / z, y * v[2] / z, (1.0 + y * y) * v[3]];
        let close = |got: f64, terms: &[f64; 3]| {
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            (got - terms.iter().sum::<f64>()).abs()
                <= 4.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
        };
        bad += usize::from(!close(rate_x, &tx)) + usize::from(!close(rate_y, &ty));
    }
    verdict(
        bad == 0,
        format!("1000 samples, {bad} mismatches beyond rounding"),
    )
}

fn decay_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let axis = case % 2;
        let e0 = rng.random_range(0.01..0.8) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let gain: f64 = rng.random_range(0.5..4.0);
        let v_z: f64 = rng.random_range(-1.0..0.3);
        let depth: f64 = rng.random_range(1.0..30.0);
        let lambda = (gain - v_z) / depth;
        let rate = |e: f64| {
            let (x, y) = if axis == 0 { (e, 0.0) } else { (0.0, e) };
            let l = interaction_matrix(&ImagePoint::new(x, y), depth).unwrap();
            let mut vel = Vector6::zeros();
            vel[axis] = gain * e;
            vel[2] = v_z;
            let (rx, ry) = image_error_rate(&l, &vel);
            if axis == 0 {
                rx
            } else {
                ry
            }
        };
        let steps = 250;
        let h = 5.0 / lambda / steps as f64;
        let mut e = e0;
        for k in 1..=steps {
            let k1 = rate(e);
            let k2 = rate(e + 0.5 * h * k1);
            let k3 = rate(e + 0.5 * h * k2);
            let k4 = rate(e + h * k3);
            e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let want = e0.abs() * (-lambda * h * k as f64).exp();
            worst = worst.max((e.abs() / want - 1.0).abs());
        }
    }
    verdict(
        worst < 0.02,
        format!(
            "100 cases over 5 time constants, e_x and e_y, worst relative deviation {worst:.1e}"
        ),
    )
}

fn riccati_quality() -> Verdict {
    let plant = PlantModel::default_transport();
    let weights = LqrWeights::default_for(&plant);
    let syn = match synthesize_gains(&plant, &weights) {
        Ok(s) => s,
        Err(e) => return verdict(false, format!("synthesis failed: {e}")),
    };
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, ch) in [("lon", &syn.lon), ("lat", &syn.lat)] {
        let bound = 1e-8 * (1.0 + ch.p.norm());
        let max_re = ch
            .closed_loop_eigenvalues
            .iter()
            .map(|&(re, _)| re)
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= ch.residual < bound && max_re < 0.0;
        notes.push(format!(
            "{name} residual {:.1e} (bound {bound:.1e}) max Re {max_re:.3}",
            ch.residual
        ));
    }
    let mut scaled = weights.clone();
    for alpha in [0.01, 7.0, 100.0] {
        scaled.q_lon = &weights.q_lon * alpha;
        scaled.r_lon = &weights.r_lon * alpha;
        scaled.q_lat = &weights.q_lat * alpha;
        scaled.r_lat = &weights.r_lat * alpha;
        let s = synthesize_gains(&plant, &scaled).unwrap();
        let dk = (&s.lon.k - &syn.lon.k)
            .norm()
            .max((&s.lat.k - &syn.lat.k).norm());
        let scale = 1.0 + syn.lon.k.norm().max(syn.lat.k.norm());
        pass &= dk < 1e-8 * scale;
        if alpha == 100.0 {
            notes.push(format!("scaling drift {dk:.1e}"));
        }
    }
    let one = DMatrix::from_element(1, 1, 1.0);
    let scalar = solve_care(&DMatrix::from_element(1, 1, -1.0), &one, &one, &one).unwrap();
    let dp = (scalar.p[(0, 0)] - (2f64.sqrt() - 1.0)).abs();
    pass &= dp < 1e-10;
    notes.push(format!("scalar P error {dp:.1e}"));
    verdict(pass, notes.join(", "))
}

fn disturbance_rejection() -> Verdict {
    let plant = PlantModel::default_transport();
    let gains = synthesize_gains(&plant, &LqrWeights::default_for(&plant))
        .unwrap()
        .gains;
    let dt = 0.01;
    // constant drift of the drogue seen through the outer loop as a biased velocity
    // command, plus a steady crosswind and updraft acting on the airframe
    let bias = DesiredCameraVelocity::new(0.3, -0.2, -0.5);
    let (lon_ref, lat_ref) = to_channel_references(&bias);
    let desired = ChannelSignals {
        lon: nalgebra::DVector::from_column_slice(lon_ref.as_slice()),
        lat: nalgebra::DVector::from_element(1, lat_ref),
    };
    let (w_lon, w_lat) = gust_forcing(&plant, &Vec3::new(0.0, 1.0, -0.8));
    let mut x = ReceiverState::zeros(&plant);
    let mut q = IntegratorState::zeros(&plant);
    let mut worst_late = 0.0f64;
    let mut saturated_steps = 0;
    for k in 0..(40.0 / dt) as usize {
        let (u, sat) = inner_control(&x, &q, &gains).saturate(&plant.limits);
        saturated_steps += usize::from(sat);
        let measured = ChannelSignals::measured(&plant, &x);
        q = update_integrator(&q, &measured, &desired, dt, sat);
        x = match step_receiver_disturbed(&x, &u, &plant, &w_lon, &w_lat, dt) {
            Ok(next) => next,
            Err(e) => return verdict(false, format!("integration diverged: {e}")),
        };
        if (k + 1) as f64 * dt >= 20.0 {
            let m = ChannelSignals::measured(&plant, &x);
            let err = ((&m.lon - &desired.lon).norm_squared()
                + (&m.lat - &desired.lat).norm_squared())
            .sqrt();
            worst_late = worst_late.max(err);
        }
    }
    verdict(
        worst_late < 1e-3,
        format!("max tracking error over 20..40 s {worst_late:.1e} m/s, {saturated_steps} saturated steps"),
    )
}

fn nominal_docking() -> Verdict {
    let cfg = ScenarioConfig::nominal();
    let out = match run_scenario(&cfg) {
        Ok(r) => r.outcome,
        Err(e) => return verdict(false, format!("run failed: {e}")),
    };
    let closing_floor = cfg.gains.a.abs() - 0.1;
    verdict(
        out.success && out.miss_distance < cfg.capture_radius && out.closing_speed >= closing_floor,
        format!(
            "docked {}, miss {:.4} m (capture {}), closing {:.3} m/s (floor {closing_floor:.1})",
            out.success, out.miss_distance, cfg.capture_radius, out.closing_speed
        ),
    )
}

fn turbulence_robustness() -> Verdict {
    let seeds: Vec<u64> = (0..20).collect();
    let mut pass = true;
    let mut notes = Vec::new();
    for (level, need) in [
        (TurbulenceLevel::LevelI, 0.9),
        (TurbulenceLevel::LevelII, 0.8),
    ] {
        let mut cfg = ScenarioConfig::nominal();
        cfg.set_turbulence(level);
        match run_batch(&cfg, &seeds) {
            Ok(b) => {
                let rate = b.summary.successes as f64 / b.summary.runs as f64;
                pass &= rate >= need;
                notes.push(format!(
                    "{level:?} {}/{} (need {need})",
                    b.summary.successes, b.summary.runs
                ));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{level:?} batch failed: {e}"));
            }
        }
    }
    verdict(pass, notes.join(", "))
}

fn bow_wave() -> Verdict {
    let nominal = run_scenario(&ScenarioConfig::nominal()).unwrap();
    let mut plain = ScenarioConfig::nominal();
    plain.set_gain_table(GainTable::Table2);
    let mut pushed = plain.clone();
    pushed.enable_bow_wave();
    let without = run_scenario(&plain).unwrap();
    let with = run_scenario(&pushed).unwrap();
    let (peak, base) = (with.log.peak_image_error(), nominal.log.peak_image_error());
    verdict(
        with.outcome.success && peak > base,
        format!(
            "docked {}, miss {:.4} m, peak {peak:.3} vs nominal {base:.3} (table 2 without bow wave {:.3})",
            with.outcome.success,
            with.outcome.miss_distance,
            without.log.peak_image_error()
        ),
    )
}

fn pose_error_comparison() -> Verdict {
    let run = |controller| {
        let mut cfg = ScenarioConfig::nominal();
        cfg.set_controller(controller);
        cfg.set_pose_error(Vec3::new(1.0, 0.0, -0.5));
        (run_scenario(&cfg).unwrap().outcome, cfg.capture_radius)
    };
    let (ibvs, capture) = run(ControllerKind::Ibvs);
    let (pbvs, _) = run(ControllerKind::Pbvs);
    verdict(
        ibvs.success
            && ibvs.miss_distance < capture
            && !pbvs.success
            && pbvs.miss_distance > capture,
        format!(
            "IBVS docked {} miss {:.4} m, PBVS docked {} miss {:.4} m (capture {capture})",
            ibvs.success, ibvs.miss_distance, pbvs.success, pbvs.miss_distance
        ),
    )
}

fn cli_determinism() -> Verdict {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut csvs = Vec::new();
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_ibvs-dock"))
            .args([
                "run",
                "--turbulence",
                "2",
                "--bow-wave",
                "--seed",
                "5",
                "--out",
            ])
            .arg(d.path())
            .output()
            .unwrap()
            .status;
        match std::fs::read(d.path().join("nominal-5.csv")) {
            Ok(bytes) => csvs.push(bytes),
            Err(e) => return verdict(false, format!("no CSV (exit {status}): {e}")),
        }
    }
    verdict(
        csvs[0] == csvs[1],
        format!(
            "two runs, {} bytes each, identical {}",
            csvs[0].len(),
            csvs[0] == csvs[1]
        ),
    )
}

fn main() -> ExitCode {
    let second = |s| Some(Duration::from_secs(s));
    let criteria: [(&str, Option<Duration>, fn() -> Verdict); 10] = [
        (
            "interaction matrix closed form",
            second(1),
            interaction_matrix_closed_form,
        ),
        ("decomposition consistency", None, decomposition_consistency),
        ("outer-loop decay oracle", second(1), decay_oracle),
        ("riccati quality", None, riccati_quality),
        (
            "constant-disturbance rejection",
            None,
            disturbance_rejection,
        ),
        ("nominal docking", second(5), nominal_docking),
        ("turbulence robustness", second(120), turbulence_robustness),
        ("bow wave", None, bow_wave),
        ("pose-error comparison", None, pose_error_comparison),
        ("cli determinism", None, cli_determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let v = timed(limit, check);
        failed += usize::from(!v.pass);
        println!(
            "{} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
