//! Docking detection from a finished log.

use std::fmt;

use super::log::SimLog;
use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailureReason {
    /// Depth never reached zero.
    Timeout,
    /// Depth crossed zero outside the capture radius.
    Overshoot,
    /// The drogue left the field of view and was not reacquired in time.
    VisualLoss,
    /// The plant state became non-finite.
    Diverged,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Timeout => "timeout",
            Self::Overshoot => "overshoot",
            Self::VisualLoss => "visual_loss",
            Self::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DockingOutcome {
    pub success: bool,
    /// Lateral probe-drogue distance at the depth-zero crossing, or at the
    /// last record when there was no crossing [m].
    pub miss_distance: f64,
    /// Closing speed at the crossing, or the last depth rate otherwise [m/s].
    pub closing_speed: f64,
    pub time_of_contact: Option<f64>,
    pub failure_reason: Option<FailureReason>,
}

impl DockingOutcome {
    pub(crate) fn failed_at_end(log: &SimLog, reason: FailureReason) -> Self {
        let n = log.records.len();
        let last = &log.records[n - 1];
        let closing_speed = if n >= 2 {
            let prev = &log.records[n - 2];
            (prev.depth - last.depth) / (last.time - prev.time)
        } else {
            0.0
        };
        Self {
            success: false,
            miss_distance: last.lateral_distance(),
            closing_speed,
            time_of_contact: None,
            failure_reason: Some(reason),
        }
    }
}

impl fmt::Display for DockingOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "result: {}",
            if self.success { "docked" } else { "failed" }
        )?;
        match self.failure_reason {
            Some(r) => writeln!(f, "failure_reason: {r}")?,
            None => writeln!(f, "failure_reason: none")?,
        }
        writeln!(f, "miss_distance_m: {:.6}", self.miss_distance)?;
        writeln!(f, "closing_speed_mps: {:.6}", self.closing_speed)?;
        match self.time_of_contact {
            Some(t) => writeln!(f, "time_of_contact_s: {t:.6}"),
            None => writeln!(f, "time_of_contact_s: none"),
        }
    }
}

/// Finds the first positive-to-non-positive depth crossing and interpolates
/// miss distance, closing speed and contact time linearly between the two
/// bracketing records.
pub fn detect_docking(log: &SimLog, capture_radius: f64) -> Result<DockingOutcome, SimError> {
    let recs = &log.records;
    if recs.is_empty() {
        return Err(SimError::EmptyLog);
    }
    if recs[0].depth <= 0.0 {
        let r = &recs[0];
        let miss = r.lateral_distance();
        let success = miss < capture_radius;
        return Ok(DockingOutcome {
            success,
            miss_distance: miss,
            closing_speed: 0.0,
            time_of_contact: Some(r.time),
            failure_reason: (!success).then_some(FailureReason::Overshoot),
        });
    }
    let Some(k) = recs
        .windows(2)
        .position(|w| w[0].depth > 0.0 && w[1].depth <= 0.0)
    else {
        return Ok(DockingOutcome::failed_at_end(log, FailureReason::Timeout));
    };
    let (a, b) = (&recs[k], &recs[k + 1]);
    let s = a.depth / (a.depth - b.depth);
    let lerp = |x: f64, y: f64| x + s * (y - x);
    let miss = lerp(a.rel_x, b.rel_x).hypot(lerp(a.rel_y, b.rel_y));
    let success = miss < capture_radius;
    Ok(DockingOutcome {
        success,
        miss_distance: miss,
        closing_speed: (a.depth - b.depth) / (b.time - a.time),
        time_of_contact: Some(lerp(a.time, b.time)),
        failure_reason: (!success).then_some(FailureReason::Overshoot),
    })
}
