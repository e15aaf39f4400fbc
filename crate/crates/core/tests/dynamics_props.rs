use ibvs_docking::dynamics::{
    camera_velocity, rk4_linear, step_receiver, BowWave, ControlInput, DrogueModel, KinematicsForm,
    PlantModel, ReceiverState, TurbulenceLevel, TurbulenceModel,
};
use ibvs_docking::vision::{frame_rotation, CameraInstallation};
use nalgebra::{DMatrix, DVector, Vector3};
use proptest::prelude::*;

fn state(x: &[f64; 9]) -> ReceiverState<f64> {
    ReceiverState {
        lon: DVector::from_column_slice(&x[..4]),
        lat: DVector::from_column_slice(&x[4..]),
    }
}

fn input(u: &[f64; 4]) -> ControlInput<f64> {
    ControlInput {
        elevator: u[0],
        throttle: u[1],
        aileron: u[2],
        rudder: u[3],
    }
}

proptest! {
    #[test]
    fn plant_step_superposes(
        x in prop::array::uniform9(-0.2f64..0.2), u in prop::array::uniform4(-0.2f64..0.2), dt in 0.001f64..0.05,
    ) {
        let plant = PlantModel::default_transport();
        let zero_x = ReceiverState::zeros(&plant);
        let both = step_receiver(&state(&x), &input(&u), &plant, dt).unwrap();
        let free = step_receiver(&state(&x), &ControlInput::zero(), &plant, dt).unwrap();
        let forced = step_receiver(&zero_x, &input(&u), &plant, dt).unwrap();
        prop_assert!((&both.lon - &free.lon - &forced.lon).norm() < 1e-10);
        prop_assert!((&both.lat - &free.lat - &forced.lat).norm() < 1e-10);
    }

    #[test]
    fn zero_offset_camera_moves_with_the_body(
        v in -5.0f64..5.0, alpha in -0.3f64..0.3, beta in -0.3f64..0.3,
        rates in prop::array::uniform3(-0.5f64..0.5),
    ) {
        let mut s = state(&[0.0; 9]);
        s.lon[1] = v;
        s.lon[2] = alpha;
        s.lon[3] = rates[1];
        s.lat[2] = beta;
        s.lat[3] = rates[0];
        s.lat[4] = rates[2];
        let got = camera_velocity(&s, &CameraInstallation::new(Vector3::zeros()), KinematicsForm::Exact);
        // body-axis velocity (x fwd, y right, z down) from airspeed and aerodynamic angles
        let body = Vector3::new(v * alpha.cos() * beta.cos(), v * beta.sin(), v * alpha.sin() * beta.cos());
        prop_assert!((got - frame_rotation::<f64>() * body).norm() < 1e-14);
    }

    #[test]
    fn bow_wave_is_monotone_and_bounded(
        d1 in 0.0f64..8.0, d2 in 0.0f64..8.0, strength in 0.0f64..2.0, radius in 0.5f64..6.0, exponent in 0.3f64..3.0,
        speed in 0.5f64..1.5,
    ) {
        let bw = BowWave { activation_radius: radius, strength, decay_exponent: exponent, ..BowWave::default() };
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(bw.magnitude(near, speed) >= bw.magnitude(far, speed));
        prop_assert!(bw.magnitude(near, speed) <= strength * speed);
        if far >= radius {
            prop_assert_eq!(bw.magnitude(far, speed), 0.0);
        }
    }

    #[test]
    fn bow_wave_fades_continuously_at_the_edge(radius in 0.5f64..6.0, exponent in 0.3f64..3.0) {
        let bw = BowWave { activation_radius: radius, strength: 0.6, decay_exponent: exponent, ..BowWave::default() };
        let mut prev = f64::INFINITY;
        for eps in [1e-3, 1e-6, 1e-9, 1e-12] {
            let inside = bw.magnitude(radius * (1.0 - eps), 1.0);
            let expected = 0.6 * eps.powf(exponent);
            prop_assert!((inside - expected).abs() <= 1e-3 * expected, "{inside} vs {expected}");
            prop_assert!(inside < prev);
            prev = inside;
        }
        prop_assert_eq!(bw.magnitude(radius, 1.0), 0.0);
    }

    #[test]
    fn drogue_velocity_vanishes_outside_the_radius(
        gap in 4.0f64..30.0, lateral in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let mut d = DrogueModel::new(Vector3::zeros(), 120.0);
        d.bow_wave = Some(BowWave::default());
        d.probe_offset = Vector3::new(8.0, 0.0, -1.2);
        let probe = Vector3::new(8.0, 0.0, -1.2);
        let drogue = probe + Vector3::new(gap, lateral[0], lateral[1]);
        prop_assume!((drogue - probe).norm() >= 4.0);
        prop_assert_eq!(d.drogue_velocity(&probe, &drogue, &Vector3::zeros(), 120.0), Vector3::zeros());
    }
}

#[test]
fn rk4_reproduces_exponential_decay() {
    let a = DMatrix::from_element(1, 1, -1.0);
    let b = DMatrix::zeros(1, 1);
    let mut x = DVector::from_element(1, 1.0);
    let zero = DVector::zeros(1);
    for _ in 0..100 {
        x = rk4_linear(&a, &b, &x, &zero, &zero, 0.01);
    }
    assert!((x[0] - (-1.0f64).exp()).abs() < 1e-9);
}

#[test]
fn rk4_local_error_is_fifth_order() {
    let plant = PlantModel::default_transport();
    let x = state(&[0.02, 1.0, 0.01, -0.02, 0.01, 0.02, -0.01, 0.03, 0.01]);
    let u = input(&[0.01, 0.05, -0.02, 0.01]);
    let gap = |h: f64| {
        let one = step_receiver(&x, &u, &plant, h).unwrap();
        let half = step_receiver(
            &step_receiver(&x, &u, &plant, h / 2.0).unwrap(),
            &u,
            &plant,
            h / 2.0,
        )
        .unwrap();
        (&one.lon - &half.lon).norm() + (&one.lat - &half.lat).norm()
    };
    // halving the step should cut the one-step discrepancy by about 2^5
    let ratio = gap(0.2) / gap(0.1);
    assert!((20.0..45.0).contains(&ratio), "ratio {ratio}");
}

fn gust_series(level: TurbulenceLevel, seed: u64, seconds: f64) -> Vec<Vector3<f64>> {
    let mut t = TurbulenceModel::new(level, seed, 120.0);
    (0..(seconds / 0.01).round() as usize)
        .map(|_| t.sample_gust(0.01))
        .collect()
}

#[test]
fn gusts_are_reproducible_per_seed() {
    assert_eq!(
        gust_series(TurbulenceLevel::LevelII, 11, 5.0),
        gust_series(TurbulenceLevel::LevelII, 11, 5.0)
    );
    assert_ne!(
        gust_series(TurbulenceLevel::LevelII, 11, 5.0),
        gust_series(TurbulenceLevel::LevelII, 12, 5.0)
    );
    assert!(gust_series(TurbulenceLevel::Off, 3, 5.0)
        .iter()
        .all(|g| *g == Vector3::zeros()));
}

#[test]
fn gust_peaks_track_the_level() {
    for (level, peak) in [
        (TurbulenceLevel::LevelI, 1.52),
        (TurbulenceLevel::LevelII, 2.13),
    ] {
        for seed in 0..25 {
            let max = gust_series(level, seed, 60.0)
                .iter()
                .map(|g| g.norm())
                .fold(0.0, f64::max);
            assert!(
                (0.5 * peak..=2.0 * peak).contains(&max),
                "{level:?} seed {seed}: {max}"
            );
        }
    }
}

#[test]
fn gust_rms_is_stationary_across_windows() {
    let rms = |w: &[Vector3<f64>]| {
        (w.iter().map(|g| g.norm_squared()).sum::<f64>() / w.len() as f64).sqrt()
    };
    for seed in 0..5 {
        let series = gust_series(TurbulenceLevel::LevelI, seed, 240.0);
        let windows: Vec<f64> = series.chunks(6000).map(rms).collect();
        let mean = windows.iter().sum::<f64>() / windows.len() as f64;
        for w in &windows {
            assert!((w / mean - 1.0).abs() < 0.25, "seed {seed}: {windows:?}");
        }
    }
}
