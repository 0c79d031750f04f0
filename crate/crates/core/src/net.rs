//! Sensor field, line-of-sight link budget and the transit-cost matrix.
//!
//! Everything in here is in linear SI units. Decibel quantities only exist
//! at the file boundary (see [`crate::scenario_file`]).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AoiError, Result};

/// Converts a power ratio in dB to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

fn require_positive(field: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(AoiError::domain(
            field,
            format!("must be finite and strictly positive, got {value}"),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Radio and flight parameters shared by every node in a scenario.
///
/// `ref_gain` is the linear channel power gain at 1 m; the LOS gain at
/// altitude `h` is `ref_gain / h^2` and is never stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadioParams {
    bandwidth_hz: f64,
    ref_gain: f64,
    altitude_m: f64,
    noise_power_w: f64,
    speed_mps: f64,
}

impl RadioParams {
    pub fn new(
        bandwidth_hz: f64,
        ref_gain: f64,
        altitude_m: f64,
        noise_power_w: f64,
        speed_mps: f64,
    ) -> Result<Self> {
        require_positive("bandwidth_hz", bandwidth_hz)?;
        require_positive("ref_gain", ref_gain)?;
        require_positive("altitude_m", altitude_m)?;
        require_positive("noise_power_w", noise_power_w)?;
        require_positive("speed_mps", speed_mps)?;
        Ok(RadioParams {
            bandwidth_hz,
            ref_gain,
            altitude_m,
            noise_power_w,
            speed_mps,
        })
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn ref_gain(&self) -> f64 {
        self.ref_gain
    }

    pub fn altitude_m(&self) -> f64 {
        self.altitude_m
    }

    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    pub fn speed_mps(&self) -> f64 {
        self.speed_mps
    }

    /// Received SNR for a node transmitting at `tx_power_w`.
    ///
    /// Evaluated as `(beta / (h^2 sigma^2)) * P`.
    pub fn snr(&self, tx_power_w: f64) -> f64 {
        self.ref_gain / (self.altitude_m * self.altitude_m * self.noise_power_w) * tx_power_w
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorNode {
    pub id: usize,
    pub position: Point,
    pub tx_power_w: f64,
    pub packet_bits: f64,
}

/// A validated problem instance: a data center, `M >= 1` sensor nodes with
/// ids `1..=M` in order, and the shared radio parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    data_center: Point,
    nodes: Vec<SensorNode>,
    radio: RadioParams,
}

impl Scenario {
    pub fn new(data_center: Point, nodes: Vec<SensorNode>, radio: RadioParams) -> Result<Self> {
        if nodes.is_empty() {
            return Err(AoiError::domain("nodes", "a scenario needs at least one node"));
        }
        for (k, node) in nodes.iter().enumerate() {
            if node.id != k + 1 {
                return Err(AoiError::domain(
                    "nodes",
                    format!("ids must run 1..=M in order; position {} holds id {}", k + 1, node.id),
                ));
            }
            require_positive(&format!("node {} tx_power_w", node.id), node.tx_power_w)?;
            require_positive(&format!("node {} packet_bits", node.id), node.packet_bits)?;
            if !(node.position.x.is_finite() && node.position.y.is_finite()) {
                return Err(AoiError::domain(
                    format!("node {} position", node.id),
                    "coordinates must be finite",
                ));
            }
        }
        let scenario = Scenario {
            data_center,
            nodes,
            radio,
        };
        if let Some((a, b)) = scenario.first_coincident_pair() {
            let p = scenario.position(a);
            return Err(AoiError::CoincidentPositions { a, b, x: p.x, y: p.y });
        }
        Ok(scenario)
    }

    /// Number of sensor nodes `M`.
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn data_center(&self) -> Point {
        self.data_center
    }

    pub fn nodes(&self) -> &[SensorNode] {
        &self.nodes
    }

    pub fn radio(&self) -> &RadioParams {
        &self.radio
    }

    /// Position of vertex `index`, where 0 is the data center.
    pub fn position(&self, index: usize) -> Point {
        if index == 0 {
            self.data_center
        } else {
            self.nodes[index - 1].position
        }
    }

    fn first_coincident_pair(&self) -> Option<(usize, usize)> {
        let n = self.nodes.len() + 1;
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .find(|&(a, b)| self.position(a) == self.position(b))
    }
}

/// `eta[i][j]` for every ordered pair of distinct vertices `0..=M`.
///
/// Row `i >= 1` is node `i`'s upload time plus the flight time to `j`;
/// row 0 is pure flight time. The diagonal is never read.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitCostMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl TransitCostMatrix {
    /// Builds a matrix from explicit rows. Diagonal values are ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(AoiError::domain(
                "eta",
                "need the data center row plus at least one node row",
            ));
        }
        let mut entries = vec![f64::NAN; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(AoiError::domain(
                    "eta",
                    format!("row {i} has {} entries, expected {n}", row.len()),
                ));
            }
            for (j, &value) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                require_positive(&format!("eta[{i}][{j}]"), value)?;
                entries[i * n + j] = value;
            }
        }
        Ok(TransitCostMatrix { m: n - 1, entries })
    }

    /// Number of sensor nodes `M`; the matrix is `(M+1) x (M+1)`.
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j, "diagonal entry eta[{i}][{i}] is undefined");
        self.entries[i * (self.m + 1) + j]
    }

    /// All rows, with `NaN` on the diagonal.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.m + 1).map(<[f64]>::to_vec).collect()
    }

    /// Every off-diagonal entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        require_positive("factor", factor)?;
        Ok(TransitCostMatrix {
            m: self.m,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        })
    }
}

/// Shannon rate of the LOS uplink in bit/s.
pub fn uplink_rate(radio: &RadioParams, tx_power_w: f64) -> Result<f64> {
    require_positive("tx_power_w", tx_power_w)?;
    Ok(radio.bandwidth_hz * (1.0 + radio.snr(tx_power_w)).log2())
}

/// Seconds needed to upload `packet_bits` at `rate` bit/s.
pub fn upload_time(packet_bits: f64, rate: f64) -> Result<f64> {
    require_positive("packet_bits", packet_bits)?;
    require_positive("rate", rate)?;
    Ok(packet_bits / rate)
}

pub fn transit_matrix(scenario: &Scenario) -> Result<TransitCostMatrix> {
    let m = scenario.m();
    let n = m + 1;
    let speed = scenario.radio.speed_mps;

    let mut upload = vec![0.0; n];
    for node in &scenario.nodes {
        let rate = uplink_rate(&scenario.radio, node.tx_power_w)?;
        upload[node.id] = upload_time(node.packet_bits, rate)?;
    }

    let mut entries = vec![f64::NAN; n * n];
    for i in 0..n {
        let from = scenario.position(i);
        for j in (0..n).filter(|&j| j != i) {
            let d = from.distance(&scenario.position(j));
            if d <= 0.0 {
                let (a, b) = (i.min(j), i.max(j));
                return Err(AoiError::CoincidentPositions {
                    a,
                    b,
                    x: from.x,
                    y: from.y,
                });
            }
            entries[i * n + j] = upload[i] + d / speed;
        }
    }
    Ok(TransitCostMatrix { m, entries })
}

/// Uniform (by area) sample from the disk of radius `radius` around the origin.
pub fn sample_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Draws the data center and `m` nodes uniformly over a disk.
///
/// Uses ChaCha8 seeded from `seed`, so a given seed yields the same
/// scenario on every platform. A point that lands exactly on an earlier
/// one is redrawn.
pub fn random_scenario(
    m: usize,
    radius_m: f64,
    radio: RadioParams,
    tx_power_w: f64,
    packet_bits: f64,
    seed: u64,
) -> Result<Scenario> {
    if m == 0 {
        return Err(AoiError::domain("m", "must be at least 1"));
    }
    require_positive("radius_m", radius_m)?;
    require_positive("tx_power_w", tx_power_w)?;
    require_positive("packet_bits", packet_bits)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = Vec::with_capacity(m + 1);
    while points.len() < m + 1 {
        let p = sample_disk(&mut rng, radius_m);
        if !points.contains(&p) {
            points.push(p);
        }
    }

    let data_center = points[0];
    let nodes = points[1..]
        .iter()
        .enumerate()
        .map(|(k, &position)| SensorNode {
            id: k + 1,
            position,
            tx_power_w,
            packet_bits,
        })
        .collect();
    Scenario::new(data_center, nodes, radio)
}
