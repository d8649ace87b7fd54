use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Envelope applied to both g and g′ within a segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum PulseShape {
    /// Instantaneous switching.
    Rectangular,
    /// sin² rise over `ramp_time`, flat top, mirrored fall.
    SinSquaredRamp { ramp_time: f64 },
}

impl PulseShape {
    /// Envelope value in [0, 1] at `t` ns into a segment of `duration` ns.
    pub fn envelope(&self, t: f64, duration: f64) -> f64 {
        match *self {
            PulseShape::Rectangular => 1.0,
            PulseShape::SinSquaredRamp { ramp_time } => {
                if ramp_time <= 0.0 {
                    return 1.0;
                }
                let edge = t.min(duration - t).max(0.0);
                if edge >= ramp_time {
                    1.0
                } else {
                    (0.5 * PI * edge / ramp_time).sin().powi(2)
                }
            }
        }
    }

    /// ∫₀^duration envelope(t) dt by piecewise Gauss–Legendre quadrature.
    pub fn integral(&self, duration: f64) -> f64 {
        match *self {
            PulseShape::Rectangular => duration,
            PulseShape::SinSquaredRamp { ramp_time } => {
                let r = ramp_time.min(duration / 2.0).max(0.0);
                let breaks = [0.0, r, duration - r, duration];
                breaks
                    .windows(2)
                    .map(|w| gauss_legendre(|t| self.envelope(t, duration), w[0], w[1]))
                    .sum()
            }
        }
    }

    fn ramp_time(&self) -> f64 {
        match *self {
            PulseShape::Rectangular => 0.0,
            PulseShape::SinSquaredRamp { ramp_time } => ramp_time,
        }
    }
}

// 8-point Gauss–Legendre nodes and weights on [−1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // split into a few panels so the ramp's half-period cosine is resolved
    const PANELS: usize = 4;
    let h = (b - a) / PANELS as f64;
    let half = 0.5 * h;
    let mut sum = 0.0;
    for k in 0..PANELS {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * (f(mid - half * x) + f(mid + half * x));
        }
    }
    sum * half
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PulseSegment {
    pub duration: f64,
    /// Peak JC coupling g in rad/ns.
    pub g: f64,
    /// Peak non-JC coupling g′ in rad/ns.
    pub g_prime: f64,
    /// Interaction-picture phase frequency E(φ_c) in rad/ns.
    pub phase_freq: f64,
    pub shape: PulseShape,
}

impl PulseSegment {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "duration {} must be > 0",
                self.duration
            )));
        }
        let r = self.shape.ramp_time();
        if r < 0.0 || r > self.duration / 2.0 + 1e-15 {
            return Err(Error::InvalidPulse(format!(
                "ramp time {r} must lie in [0, duration/2 = {}]",
                self.duration / 2.0
            )));
        }
        Ok(())
    }

    /// (g(t), g′(t)) at `t` ns into the segment.
    pub fn couplings_at(&self, t: f64) -> (f64, f64) {
        let s = self.shape.envelope(t, self.duration);
        (s * self.g, s * self.g_prime)
    }

    /// ∫ g(t) dt over the segment.
    pub fn area(&self) -> f64 {
        self.g * self.shape.integral(self.duration)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PulseSchedule {
    pub segments: Vec<PulseSegment>,
    pub sample_period: f64,
}

impl PulseSchedule {
    pub fn new(segments: Vec<PulseSegment>, sample_period: f64) -> Result<Self> {
        let s = Self {
            segments,
            sample_period,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn single(segment: PulseSegment, sample_period: f64) -> Result<Self> {
        Self::new(vec![segment], sample_period)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidPulse("schedule has no segments".into()));
        }
        if !(self.sample_period > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "sample period {} must be > 0",
                self.sample_period
            )));
        }
        self.segments.iter().try_for_each(PulseSegment::validate)
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment start times.
    pub fn starts(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |acc, s| {
                let start = *acc;
                *acc += s.duration;
                Some(start)
            })
            .collect()
    }
}

/// Segment duration whose shaped coupling integrates to `area`.
///
/// Closed form for rectangular pulses; for sin² ramps the duration is found
/// by bisection on the quadrature of the envelope.
pub fn pulse_duration_for_area(area: f64, g: f64, shape: PulseShape) -> Result<f64> {
    if area == 0.0 {
        return Ok(0.0);
    }
    if g == 0.0 || area.signum() != g.signum() {
        return Err(Error::SignMismatch { area, g });
    }
    let flat = area / g;
    match shape {
        PulseShape::Rectangular => Ok(flat),
        PulseShape::SinSquaredRamp { ramp_time } => {
            if ramp_time < 0.0 {
                return Err(Error::InvalidPulse(format!(
                    "negative ramp time {ramp_time}"
                )));
            }
            if ramp_time > flat {
                return Err(Error::InvalidPulse(format!(
                    "ramp time {ramp_time} ns exceeds the flat-pulse duration {flat} ns"
                )));
            }
            let residual = |d: f64| g * shape.integral(d) - area;
            let (mut lo, mut hi) = (2.0 * ramp_time, flat + 2.0 * ramp_time);
            // residual is monotone in d with the sign of g
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let r = residual(mid);
                if r.abs() < 1e-13 {
                    return Ok(mid);
                }
                if (r > 0.0) == (g > 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}
