//! Smoothed evasion scenarios: sensor tracks moving in a fenced disk.
//!
//! Points are stored as `[f64; 2]`; one-dimensional scenarios keep `y = 0`
//! and serialize only the first coordinate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{EvasionError, Result};

pub type Point = [f64; 2];

/// The time base. `Interval` is `[0, 1]`; `Circle` is `[0, 1)` with `1 ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeBase {
    Interval,
    Circle,
}

impl TimeBase {
    pub fn start(&self) -> f64 {
        0.0
    }

    pub fn end(&self) -> f64 {
        1.0
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, TimeBase::Circle)
    }

    /// Maps a time onto the base. Circle times wrap; interval times must lie in `[0, 1]`.
    pub fn normalize(&self, t: f64) -> Result<f64> {
        match self {
            TimeBase::Interval => {
                if (0.0..=1.0).contains(&t) {
                    Ok(t)
                } else {
                    Err(EvasionError::TimeOutOfRange { t })
                }
            }
            TimeBase::Circle => {
                if !t.is_finite() {
                    return Err(EvasionError::TimeOutOfRange { t });
                }
                let w = t.rem_euclid(1.0);
                // rem_euclid can round up to exactly 1.0 for tiny negative inputs
                Ok(if w >= 1.0 { 0.0 } else { w })
            }
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            TimeBase::Interval => "interval",
            TimeBase::Circle => "circle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub t: f64,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorTrack {
    pub waypoints: Vec<Waypoint>,
}

impl SensorTrack {
    pub fn new(waypoints: Vec<(f64, Point)>) -> Self {
        SensorTrack {
            waypoints: waypoints
                .into_iter()
                .map(|(t, position)| Waypoint { t, position })
                .collect(),
        }
    }

    pub fn stationary(p: Point) -> Self {
        SensorTrack::new(vec![(0.0, p), (1.0, p)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dimension: usize,
    pub domain: Domain,
    pub sensing_radius: f64,
    pub fence_width: f64,
    pub time_base: TimeBase,
    pub tracks: Vec<SensorTrack>,
}

/// Piecewise-linear position of a sensor. On a circular base times wrap.
pub fn sensor_position(track: &SensorTrack, time_base: TimeBase, t: f64) -> Result<Point> {
    let t = time_base.normalize(t)?;
    let wps = &track.waypoints;
    if wps.is_empty() {
        return Err(EvasionError::Precondition("track has no waypoints".into()));
    }
    if t <= wps[0].t {
        return Ok(wps[0].position);
    }
    // first waypoint with time >= t
    let k = wps.partition_point(|w| w.t < t);
    if k >= wps.len() {
        return Ok(wps[wps.len() - 1].position);
    }
    let (a, b) = (wps[k - 1], wps[k]);
    if b.t == t {
        return Ok(b.position);
    }
    let u = (t - a.t) / (b.t - a.t);
    Ok([
        a.position[0] + u * (b.position[0] - a.position[0]),
        a.position[1] + u * (b.position[1] - a.position[1]),
    ])
}

impl Scenario {
    pub fn positions_at(&self, t: f64) -> Result<Vec<Point>> {
        self.tracks
            .iter()
            .map(|tr| sensor_position(tr, self.time_base, t))
            .collect()
    }

    /// Radius of the region that is not fenced off.
    pub fn inner_radius(&self) -> f64 {
        self.domain.radius - self.fence_width
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(EvasionError::invalid("dimension", "must be 1 or 2"));
        }
        if !(self.domain.radius > 0.0 && self.domain.radius.is_finite()) {
            return Err(EvasionError::invalid("domain.radius", "must be positive"));
        }
        if self.dimension == 1 && self.domain.center[1] != 0.0 {
            return Err(EvasionError::invalid(
                "domain.center",
                "expected one coordinate",
            ));
        }
        if !(self.sensing_radius > 0.0 && self.sensing_radius.is_finite()) {
            return Err(EvasionError::invalid("sensing_radius", "must be positive"));
        }
        if !(self.fence_width > 0.0) {
            return Err(EvasionError::invalid("fence_width", "must be positive"));
        }
        if self.fence_width >= self.domain.radius {
            return Err(EvasionError::invalid(
                "fence_width",
                "must be smaller than the domain radius",
            ));
        }
        for (i, track) in self.tracks.iter().enumerate() {
            let wps = &track.waypoints;
            let path = format!("tracks[{i}]");
            if wps.len() < 2 {
                return Err(EvasionError::invalid(path, "needs at least two waypoints"));
            }
            if wps[0].t != self.time_base.start() {
                return Err(EvasionError::invalid(
                    format!("{path}[0]"),
                    "first waypoint time must equal the time-base start",
                ));
            }
            if wps[wps.len() - 1].t != self.time_base.end() {
                return Err(EvasionError::invalid(
                    format!("{path}[{}]", wps.len() - 1),
                    "last waypoint time must equal the time-base end",
                ));
            }
            for (k, w) in wps.iter().enumerate() {
                if k > 0 && !(w.t > wps[k - 1].t) {
                    return Err(EvasionError::invalid(
                        format!("{path}[{k}]"),
                        "waypoint times must be strictly increasing",
                    ));
                }
                if self.dimension == 1 && w.position[1] != 0.0 {
                    return Err(EvasionError::invalid(
                        format!("{path}[{k}]"),
                        "expected one coordinate",
                    ));
                }
                let dx = w.position[0] - self.domain.center[0];
                let dy = w.position[1] - self.domain.center[1];
                if !(dx.hypot(dy) <= self.domain.radius) {
                    return Err(EvasionError::invalid(
                        format!("{path}[{k}]"),
                        "position outside domain",
                    ));
                }
            }
            if self.time_base.is_circle() && wps[0].position != wps[wps.len() - 1].position {
                return Err(EvasionError::invalid(
                    path,
                    "circular time base requires equal first and last positions",
                ));
            }
        }
        Ok(())
    }

    fn point_json(&self, p: Point) -> Value {
        if self.dimension == 1 {
            json!([p[0]])
        } else {
            json!([p[0], p[1]])
        }
    }

    pub fn to_json_value(&self) -> Value {
        let tracks: Vec<Value> = self
            .tracks
            .iter()
            .map(|tr| {
                Value::Array(
                    tr.waypoints
                        .iter()
                        .map(|w| json!([w.t, self.point_json(w.position)]))
                        .collect(),
                )
            })
            .collect();
        json!({
            "dimension": self.dimension,
            "domain": { "center": self.point_json(self.domain.center), "radius": self.domain.radius },
            "sensing_radius": self.sensing_radius,
            "fence_width": self.fence_width,
            "time_base": self.time_base.as_str(),
            "tracks": tracks,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    dimension: usize,
    domain: RawDomain,
    sensing_radius: f64,
    fence_width: f64,
    time_base: String,
    tracks: Vec<Vec<(f64, Vec<f64>)>>,
}

fn to_point(v: &[f64], dimension: usize, path: &str) -> Result<Point> {
    if v.len() != dimension {
        return Err(EvasionError::invalid(
            path,
            format!("expected {dimension} coordinate(s), found {}", v.len()),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(EvasionError::invalid(path, "non-finite coordinate"));
    }
    Ok([v[0], if dimension == 2 { v[1] } else { 0.0 }])
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| EvasionError::Malformed(e.to_string()))?;
    let dimension = raw.dimension;
    if dimension != 1 && dimension != 2 {
        return Err(EvasionError::invalid("dimension", "must be 1 or 2"));
    }
    let time_base = match raw.time_base.as_str() {
        "interval" => TimeBase::Interval,
        "circle" => TimeBase::Circle,
        other => {
            return Err(EvasionError::invalid(
                "time_base",
                format!("expected \"interval\" or \"circle\", found {other:?}"),
            ))
        }
    };
    let center = to_point(&raw.domain.center, dimension, "domain.center")?;
    let mut tracks = Vec::with_capacity(raw.tracks.len());
    for (i, raw_track) in raw.tracks.iter().enumerate() {
        let mut waypoints = Vec::with_capacity(raw_track.len());
        for (k, (t, p)) in raw_track.iter().enumerate() {
            let position = to_point(p, dimension, &format!("tracks[{i}][{k}]"))?;
            waypoints.push(Waypoint { t: *t, position });
        }
        tracks.push(SensorTrack { waypoints });
    }
    let s = Scenario {
        dimension,
        domain: Domain {
            center,
            radius: raw.domain.radius,
        },
        sensing_radius: raw.sensing_radius,
        fence_width: raw.fence_width,
        time_base,
        tracks,
    };
    s.validate()?;
    Ok(s)
}

/// Canonical document: sorted keys, shortest round-trip decimals, trailing newline.
pub fn save_scenario(s: &Scenario) -> String {
    let mut out = serde_json::to_string(&s.to_json_value()).expect("scenario serializes");
    out.push('\n');
    out
}

pub const BUILTIN_NAMES: &[&str] = &[
    "split", "close", "annuli", "empty", "full", "random", "random1d",
];

/// Deterministic builtin scenarios. `seed` only affects `random` and `random1d`.
pub fn builtin_scenario(name: &str, seed: u64) -> Result<Scenario> {
    let s = match name {
        "split" => split(),
        "close" => close(),
        "annuli" => annuli(),
        "empty" => disk2(0.1, 0.1, vec![]),
        "full" => disk2(1.0, 0.1, vec![SensorTrack::stationary([0.0, 0.0])]),
        "random" => random_planar(seed),
        "random1d" => random_line(seed),
        other => return Err(EvasionError::UnknownScenario(other.to_string())),
    };
    debug_assert!(s.validate().is_ok(), "builtin {name} is invalid");
    Ok(s)
}

fn disk2(sensing_radius: f64, fence_width: f64, tracks: Vec<SensorTrack>) -> Scenario {
    Scenario {
        dimension: 2,
        domain: Domain {
            center: [0.0, 0.0],
            radius: 1.0,
        },
        sensing_radius,
        fence_width,
        time_base: TimeBase::Interval,
        tracks,
    }
}

// Two arms push in from the fence and pinch the pocket in half.
fn split() -> Scenario {
    let arm = |sign: f64| {
        SensorTrack::new(vec![
            (0.0, [0.0, sign * 0.95]),
            (0.3, [0.0, sign * 0.95]),
            (0.8, [0.0, sign * 0.22]),
            (1.0, [0.0, sign * 0.22]),
        ])
    };
    disk2(0.3, 0.5, vec![arm(1.0), arm(-1.0)])
}

// A large sensor sweeps across the pocket, covering it over a middle stretch.
fn close() -> Scenario {
    let sweep = SensorTrack::new(vec![
        (0.0, [-0.95, 0.0]),
        (0.2, [-0.95, 0.0]),
        (0.45, [0.0, 0.0]),
        (0.55, [0.0, 0.0]),
        (0.8, [0.95, 0.0]),
        (1.0, [0.95, 0.0]),
    ]);
    disk2(0.5, 0.6, vec![sweep])
}

// An annulus around a static island; a second island detaches from the fence,
// then two sensor chains cut the region into two annuli.
fn annuli() -> Scenario {
    let mut tracks = vec![
        SensorTrack::stationary([-0.45, 0.0]),
        SensorTrack::new(vec![
            (0.0, [0.7, 0.0]),
            (0.3, [0.45, 0.0]),
            (1.0, [0.45, 0.0]),
        ]),
    ];
    for sign in [1.0, -1.0] {
        tracks.push(SensorTrack::stationary([0.0, sign * 0.7]));
        for reach in [0.42, 0.15] {
            tracks.push(SensorTrack::new(vec![
                (0.0, [0.0, sign * 0.7]),
                (0.4, [0.0, sign * 0.7]),
                (0.9, [0.0, sign * reach]),
                (1.0, [0.0, sign * reach]),
            ]));
        }
    }
    disk2(0.18, 0.2, tracks)
}

fn random_point_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Point {
    loop {
        let p = [
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
        ];
        if p[0].hypot(p[1]) <= radius {
            return p;
        }
    }
}

fn random_planar(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..=10);
    let r = rng.gen_range(0.3..0.6);
    let mut tracks = Vec::with_capacity(n);
    for _ in 0..n {
        let times = [0.0, rng.gen_range(0.2..0.45), rng.gen_range(0.55..0.8), 1.0];
        let mut p = random_point_in_disk(&mut rng, 0.85);
        let mut wps = vec![(times[0], p)];
        for &t in &times[1..] {
            loop {
                let step = random_point_in_disk(&mut rng, 0.35);
                let q = [p[0] + step[0], p[1] + step[1]];
                if q[0].hypot(q[1]) <= 0.9 {
                    p = q;
                    break;
                }
            }
            wps.push((t, p));
        }
        tracks.push(SensorTrack::new(wps));
    }
    disk2(r, 0.15, tracks)
}

fn random_line(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let mut ends: [Vec<f64>; 2] = Default::default();
    for _ in 0..n {
        ends[0].push(rng.gen_range(-0.85..0.85));
        ends[1].push(rng.gen_range(-0.85..0.85));
    }
    // sorted ends keep the sensors in order, so no gap opens and later closes
    for e in &mut ends {
        e.sort_by(f64::total_cmp);
    }
    let tracks = (0..n)
        .map(|k| SensorTrack::new(vec![(0.0, [ends[0][k], 0.0]), (1.0, [ends[1][k], 0.0])]))
        .collect();
    Scenario {
        dimension: 1,
        domain: Domain {
            center: [0.0, 0.0],
            radius: 1.0,
        },
        sensing_radius: 0.08,
        fence_width: 0.1,
        time_base: TimeBase::Interval,
        tracks,
    }
}
