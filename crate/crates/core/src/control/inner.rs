//! Integral-augmented LQR inner loop.
//!
//! Each channel is augmented with the integral of its velocity tracking
//! error, `q' = C x - v_des`, and an LQR gain on `[x; q]` is synthesized
//! from the continuous Riccati equation. The law is `u = -K_x x - K_e q`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::riccati::{solve_care_with, CareOptions};
use crate::dynamics::{Channel, ControlInput, PlantModel, ReceiverState};
use crate::error::SynthesisError;
use crate::linalg;
use crate::num::Real;

/// `x_aug' = A_aug x_aug + B_aug u + E_aug v_des`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPlant<T: Real> {
    pub channel: Channel,
    pub a_aug: DMatrix<T>,
    pub b_aug: DMatrix<T>,
    pub e_aug: DMatrix<T>,
    /// Plant states; the integrators follow them.
    pub states: usize,
    pub outputs: usize,
}

/// Builds `[[A, 0], [C, 0]]`, `[[B], [0]]` and `[[0], [-I]]` for one channel
/// and checks that the augmented pair is stabilizable.
pub fn augment<T: Real>(
    plant: &PlantModel<T>,
    channel: Channel,
) -> Result<AugmentedPlant<T>, SynthesisError> {
    let ch = plant.channel(channel);
    let (n, m_in, m_out) = (ch.states(), ch.inputs(), ch.outputs());
    if ch.b.nrows() != n || ch.c.ncols() != n {
        return Err(SynthesisError::Dimension(format!(
            "{channel:?}: A {n}x{n}, B {}x{}, C {}x{}",
            ch.b.nrows(),
            ch.b.ncols(),
            ch.c.nrows(),
            ch.c.ncols()
        )));
    }
    let size = n + m_out;
    let mut a_aug = DMatrix::zeros(size, size);
    a_aug.view_mut((0, 0), (n, n)).copy_from(&ch.a);
    a_aug.view_mut((n, 0), (m_out, n)).copy_from(&ch.c);
    let mut b_aug = DMatrix::zeros(size, m_in);
    b_aug.view_mut((0, 0), (n, m_in)).copy_from(&ch.b);
    let mut e_aug = DMatrix::zeros(size, m_out);
    e_aug
        .view_mut((n, 0), (m_out, m_out))
        .copy_from(&(-DMatrix::<T>::identity(m_out, m_out)));
    if let Some(mode) = linalg::uncontrollable_mode(&a_aug, &b_aug, T::lit(1e-9)) {
        return Err(SynthesisError::Unstabilizable {
            re: mode.re.to_f64_lossy(),
            im: mode.im.to_f64_lossy(),
        });
    }
    Ok(AugmentedPlant {
        channel,
        a_aug,
        b_aug,
        e_aug,
        states: n,
        outputs: m_out,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqrWeights<T: Real> {
    pub q_lon: DMatrix<T>,
    pub r_lon: DMatrix<T>,
    pub q_lat: DMatrix<T>,
    pub r_lat: DMatrix<T>,
}

impl<T: Real> LqrWeights<T> {
    /// Unit weight on every state that reaches the measured velocity, 10 on
    /// each integrator, identity input weight.
    pub fn default_for(plant: &PlantModel<T>) -> Self {
        let q = |channel: Channel| {
            let ch = plant.channel(channel);
            let (n, m) = (ch.states(), ch.outputs());
            let mut diag = DVector::zeros(n + m);
            for j in 0..n {
                if ch.c.column(j).iter().any(|v| *v != T::zero()) {
                    diag[j] = T::one();
                }
            }
            for i in n..n + m {
                diag[i] = T::lit(10.0);
            }
            DMatrix::from_diagonal(&diag)
        };
        Self {
            q_lon: q(Channel::Longitudinal),
            r_lon: DMatrix::identity(plant.lon.inputs(), plant.lon.inputs()),
            q_lat: q(Channel::Lateral),
            r_lat: DMatrix::identity(plant.lat.inputs(), plant.lat.inputs()),
        }
    }

    pub fn for_channel(&self, channel: Channel) -> (&DMatrix<T>, &DMatrix<T>) {
        match channel {
            Channel::Longitudinal => (&self.q_lon, &self.r_lon),
            Channel::Lateral => (&self.q_lat, &self.r_lat),
        }
    }

    /// Shape and definiteness checks against a plant.
    pub fn validate(&self, plant: &PlantModel<T>) -> Result<(), SynthesisError> {
        for (channel, qn, rn) in [
            (Channel::Longitudinal, "Q_lon", "R_lon"),
            (Channel::Lateral, "Q_lat", "R_lat"),
        ] {
            let ch = plant.channel(channel);
            let (q, r) = self.for_channel(channel);
            let size = ch.states() + ch.outputs();
            if q.shape() != (size, size) {
                return Err(SynthesisError::InvalidWeight {
                    name: qn,
                    requirement: "sized to the augmented state",
                    detail: format!("expected {size}x{size}, got {}x{}", q.nrows(), q.ncols()),
                });
            }
            if r.shape() != (ch.inputs(), ch.inputs()) {
                return Err(SynthesisError::InvalidWeight {
                    name: rn,
                    requirement: "sized to the channel inputs",
                    detail: format!(
                        "expected {0}x{0}, got {1}x{2}",
                        ch.inputs(),
                        r.nrows(),
                        r.ncols()
                    ),
                });
            }
            linalg::check_definite(q, qn, false)?;
            linalg::check_definite(r, rn, true)?;
        }
        Ok(())
    }
}

/// Partitioned feedback gains for both channels.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet<T: Real> {
    pub k_x1: DMatrix<T>,
    pub k_e1: DMatrix<T>,
    pub k_x2: DMatrix<T>,
    pub k_e2: DMatrix<T>,
}

/// Full result for one channel, kept for reporting.
#[derive(Debug, Clone)]
pub struct ChannelSynthesis<T: Real> {
    pub channel: Channel,
    pub p: DMatrix<T>,
    pub k: DMatrix<T>,
    pub k_x: DMatrix<T>,
    pub k_e: DMatrix<T>,
    pub residual: T,
    /// Residual acceptance bound `1e-8 (1 + ||P||_F)`.
    pub residual_bound: T,
    pub iterations: usize,
    pub closed_loop_eigenvalues: Vec<(f64, f64)>,
}

pub fn synthesize_channel<T: Real>(
    aug: &AugmentedPlant<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
) -> Result<ChannelSynthesis<T>, SynthesisError> {
    let opts = CareOptions::default();
    let sol = solve_care_with(&aug.a_aug, &aug.b_aug, q, r, &opts)?;
    let closed = &aug.a_aug - &aug.b_aug * &sol.k;
    let mut eigs = linalg::eigenvalues_f64(&closed);
    eigs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let bad: Vec<(f64, f64)> = eigs
        .iter()
        .copied()
        .filter(|(re, _)| !(*re < 0.0))
        .collect();
    if !bad.is_empty() {
        return Err(SynthesisError::NotHurwitz { eigenvalues: bad });
    }
    let n = aug.states;
    let m_in = aug.b_aug.ncols();
    Ok(ChannelSynthesis {
        channel: aug.channel,
        k_x: sol.k.view((0, 0), (m_in, n)).clone_owned(),
        k_e: sol.k.view((0, n), (m_in, aug.outputs)).clone_owned(),
        residual_bound: opts.tolerance * (T::one() + sol.p.norm()),
        p: sol.p,
        k: sol.k,
        residual: sol.residual,
        iterations: sol.iterations,
        closed_loop_eigenvalues: eigs,
    })
}

#[derive(Debug, Clone)]
pub struct Synthesis<T: Real> {
    pub gains: GainSet<T>,
    pub lon: ChannelSynthesis<T>,
    pub lat: ChannelSynthesis<T>,
}

pub fn synthesize_gains<T: Real>(
    plant: &PlantModel<T>,
    weights: &LqrWeights<T>,
) -> Result<Synthesis<T>, SynthesisError> {
    weights.validate(plant)?;
    let lon = synthesize_channel(
        &augment(plant, Channel::Longitudinal)?,
        &weights.q_lon,
        &weights.r_lon,
    )?;
    let lat = synthesize_channel(
        &augment(plant, Channel::Lateral)?,
        &weights.q_lat,
        &weights.r_lat,
    )?;
    Ok(Synthesis {
        gains: GainSet {
            k_x1: lon.k_x.clone(),
            k_e1: lon.k_e.clone(),
            k_x2: lat.k_x.clone(),
            k_e2: lat.k_e.clone(),
        },
        lon,
        lat,
    })
}

fn write_matrix<T: Real>(f: &mut fmt::Formatter<'_>, name: &str, m: &DMatrix<T>) -> fmt::Result {
    writeln!(f, "{name} ({}x{}):", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:>14.6e}", m[(i, j)].to_f64_lossy()))
            .collect();
        writeln!(f, "  [{} ]", row.join(""))?;
    }
    Ok(())
}

impl<T: Real> fmt::Display for ChannelSynthesis<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, kx, ke) = match self.channel {
            Channel::Longitudinal => ("longitudinal", "K_x1", "K_e1"),
            Channel::Lateral => ("lateral", "K_x2", "K_e2"),
        };
        writeln!(f, "[{name}]")?;
        write_matrix(f, kx, &self.k_x)?;
        write_matrix(f, ke, &self.k_e)?;
        writeln!(
            f,
            "riccati residual: {:.3e} (bound {:.3e}, {} Newton iterations)",
            self.residual.to_f64_lossy(),
            self.residual_bound.to_f64_lossy(),
            self.iterations
        )?;
        writeln!(
            f,
            "closed-loop eigenvalues ({}):",
            self.closed_loop_eigenvalues.len()
        )?;
        for (re, im) in &self.closed_loop_eigenvalues {
            writeln!(f, "  {re:>12.6} {im:>+12.6}i")?;
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Synthesis<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lon)?;
        writeln!(f)?;
        write!(f, "{}", self.lat)
    }
}

/// Integrals of the velocity tracking errors [m].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorState<T: Real> {
    pub q_rlon: DVector<T>,
    pub q_rlat: DVector<T>,
}

impl<T: Real> IntegratorState<T> {
    pub fn zeros(plant: &PlantModel<T>) -> Self {
        Self {
            q_rlon: DVector::zeros(plant.lon.outputs()),
            q_rlat: DVector::zeros(plant.lat.outputs()),
        }
    }
}

/// Measured or desired velocities split by channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSignals<T: Real> {
    pub lon: DVector<T>,
    pub lat: DVector<T>,
}

impl<T: Real> ChannelSignals<T> {
    /// Output `C x` of both channels.
    pub fn measured(plant: &PlantModel<T>, state: &ReceiverState<T>) -> Self {
        Self {
            lon: &plant.lon.c * &state.lon,
            lat: &plant.lat.c * &state.lat,
        }
    }
}

/// Forward-Euler step of `q' = measured - desired`, frozen while saturated.
pub fn update_integrator<T: Real>(
    state: &IntegratorState<T>,
    measured: &ChannelSignals<T>,
    desired: &ChannelSignals<T>,
    dt: T,
    saturated: bool,
) -> IntegratorState<T> {
    assert!(dt > T::zero(), "dt must be positive");
    if saturated {
        return state.clone();
    }
    IntegratorState {
        q_rlon: &state.q_rlon + (&measured.lon - &desired.lon) * dt,
        q_rlat: &state.q_rlat + (&measured.lat - &desired.lat) * dt,
    }
}

/// Unsaturated inner-loop command.
pub fn inner_control<T: Real>(
    state: &ReceiverState<T>,
    integ: &IntegratorState<T>,
    gains: &GainSet<T>,
) -> ControlInput<T> {
    let lon = -(&gains.k_x1 * &state.lon) - &gains.k_e1 * &integ.q_rlon;
    let lat = -(&gains.k_x2 * &state.lat) - &gains.k_e2 * &integ.q_rlat;
    ControlInput::from_channels(&lon, &lat)
}
