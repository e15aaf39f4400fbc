//! Per-step simulation records and their CSV form.

use std::io::{self, Write};

/// First line of every CSV log.
pub const CSV_SCHEMA: &str = "ibvs-docking-log/1";

pub const CSV_COLUMNS: [&str; 41] = [
    "time",
    "theta",
    "v",
    "alpha",
    "q",
    "psi",
    "phi",
    "beta",
    "p",
    "r",
    "elevator_cmd",
    "throttle_cmd",
    "aileron_cmd",
    "rudder_cmd",
    "elevator",
    "throttle",
    "aileron",
    "rudder",
    "saturated",
    "visible",
    "e_x",
    "e_y",
    "depth",
    "rel_x",
    "rel_y",
    "v_des_x",
    "v_des_y",
    "v_des_z",
    "v_meas_x",
    "v_meas_y",
    "v_meas_z",
    "q_lon_y",
    "q_lon_z",
    "q_lat_x",
    "gust_u",
    "gust_v",
    "gust_w",
    "drogue_x",
    "drogue_y",
    "drogue_z",
    "bow_wave",
];

/// State of the loop at the start of one step, with the commands computed from it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    /// `[theta, v, alpha, q]`
    pub lon: [f64; 4],
    /// `[psi, phi, beta, p, r]`
    pub lat: [f64; 5],
    /// `[elevator, throttle, aileron, rudder]` before saturation.
    pub input_cmd: [f64; 4],
    /// Same after saturation; this is what the plant receives.
    pub input: [f64; 4],
    pub saturated: bool,
    /// Whether the drogue was inside the camera's field of view.
    pub visible: bool,
    /// Image error of the true projection, or zero when not visible.
    pub e_x: f64,
    pub e_y: f64,
    /// True docking depth [m].
    pub depth: f64,
    /// True camera-frame lateral offsets of the drogue [m].
    pub rel_x: f64,
    pub rel_y: f64,
    pub v_des: [f64; 3],
    /// Measured camera velocity `[x, y, z]` from the output matrices.
    pub v_meas: [f64; 3],
    pub q_lon: [f64; 2],
    pub q_lat: f64,
    pub gust: [f64; 3],
    /// Drogue displacement from its nominal position, tanker axes [m].
    pub drogue: [f64; 3],
    /// Bow-wave induced drogue speed [m/s].
    pub bow_wave: f64,
}

impl StepRecord {
    pub fn image_error_norm(&self) -> f64 {
        self.e_x.hypot(self.e_y)
    }

    pub fn lateral_distance(&self) -> f64 {
        self.rel_x.hypot(self.rel_y)
    }

    fn write_row<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write!(w, "{:.6}", self.time)?;
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let values = self
            .lon
            .iter()
            .chain(&self.lat)
            .chain(&self.input_cmd)
            .chain(&self.input)
            .copied()
            .chain([flag(self.saturated), flag(self.visible)])
            .chain([self.e_x, self.e_y, self.depth, self.rel_x, self.rel_y])
            .chain(self.v_des)
            .chain(self.v_meas)
            .chain(self.q_lon)
            .chain([self.q_lat])
            .chain(self.gust)
            .chain(self.drogue)
            .chain([self.bow_wave]);
        for v in values {
            // shortest round-trip representation; -0 is printed as 0
            let v = if v == 0.0 { 0.0 } else { v };
            write!(w, ",{v}")?;
        }
        writeln!(w)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimLog {
    pub dt: f64,
    pub records: Vec<StepRecord>,
}

impl SimLog {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Fraction of steps with at least one actuator at its limit.
    pub fn saturation_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.saturated).count() as f64 / self.records.len() as f64
    }

    pub fn peak_image_error(&self) -> f64 {
        self.peak_image_error_beyond(f64::NEG_INFINITY)
    }

    /// Peak image-error norm over visible records with depth at least `min_depth`.
    /// Near contact the normalized error grows like 1/depth, so a floor keeps
    /// the comparison about the approach rather than the last centimetres.
    pub fn peak_image_error_beyond(&self, min_depth: f64) -> f64 {
        self.records
            .iter()
            .filter(|r| r.visible && r.depth >= min_depth)
            .map(StepRecord::image_error_norm)
            .fold(0.0, f64::max)
    }

    /// Schema line, `# key: value` provenance lines, header, one row per step.
    pub fn write_csv<W: Write>(
        &self,
        w: &mut W,
        provenance: &[(String, String)],
    ) -> io::Result<()> {
        writeln!(w, "# {CSV_SCHEMA}")?;
        for (k, v) in provenance {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", CSV_COLUMNS.join(","))?;
        for r in &self.records {
            r.write_row(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self, provenance: &[(String, String)]) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, provenance)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[cfg(test)]
pub(crate) fn blank_record(time: f64) -> StepRecord {
    StepRecord {
        time,
        lon: [0.0; 4],
        lat: [0.0; 5],
        input_cmd: [0.0; 4],
        input: [0.0; 4],
        saturated: false,
        visible: true,
        e_x: 0.0,
        e_y: 0.0,
        depth: 1.0,
        rel_x: 0.0,
        rel_y: 0.0,
        v_des: [0.0; 3],
        v_meas: [0.0; 3],
        q_lon: [0.0; 2],
        q_lat: 0.0,
        gust: [0.0; 3],
        drogue: [0.0; 3],
        bow_wave: 0.0,
    }
}
