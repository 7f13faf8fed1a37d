//! Error-rate, throughput, latency and power figures of merit.

use serde::{Deserialize, Serialize};

use crate::bits::BitBlock;
use crate::error::{Error, Result};
use crate::scheduler::CodewordRecord;

/// Behavioral model of one decoder core.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardwareProfile {
    pub clock_hz: f64,
    pub alpha: u32,
    /// Dynamic power of one continuously active decoder, in watts.
    pub p_dec: f64,
}

impl HardwareProfile {
    /// 746 MHz, 4 queries per cycle, 86.1 mW per decoder.
    pub const D1: HardwareProfile = HardwareProfile {
        clock_hz: 746e6,
        alpha: 4,
        p_dec: 86.1e-3,
    };

    pub fn validate(&self) -> Result<()> {
        if self.clock_hz > 0.0 && self.alpha > 0 && self.p_dec > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("hardware profile values must be positive: {self:?}")))
        }
    }
}

impl Default for HardwareProfile {
    fn default() -> Self {
        Self::D1
    }
}

/// Fraction of records whose first `k` decoded bits differ from the
/// transmitted information word.
pub fn bler(records: &[CodewordRecord], transmitted: &[BitBlock]) -> Result<f64> {
    let decoded: Vec<&BitBlock> = records.iter().map(|r| &r.decoded).collect();
    Ok(error_count(&decoded, transmitted)? as f64 / records.len().max(1) as f64)
}

/// Number of decoded words whose information bits differ from the reference.
pub fn error_count(decoded: &[&BitBlock], transmitted: &[BitBlock]) -> Result<u64> {
    if decoded.len() != transmitted.len() {
        return Err(Error::LengthMismatch {
            expected: transmitted.len(),
            actual: decoded.len(),
        });
    }
    let mut errors = 0;
    for (d, t) in decoded.iter().zip(transmitted) {
        if d.len() < t.len() {
            return Err(Error::LengthMismatch {
                expected: t.len(),
                actual: d.len(),
            });
        }
        if &d.prefix(t.len()) != t {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Normal-approximation 95% interval for an error proportion, clamped to [0, 1].
pub fn bler_confidence(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let p = errors as f64 / trials as f64;
    let half = 1.96 * standard_error(errors, trials);
    ((p - half).max(0.0), (p + half).min(1.0))
}

/// `sqrt(p (1 - p) / trials)`.
pub fn standard_error(errors: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = errors as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub errors: u64,
}

impl BlerPoint {
    pub fn bler(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }
}

/// BLER measurements on an increasing `Eb/N0` grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlerCurve {
    points: Vec<BlerPoint>,
}

impl BlerCurve {
    pub fn new(mut points: Vec<BlerPoint>) -> Result<Self> {
        points.sort_by(|a, b| a.ebn0_db.total_cmp(&b.ebn0_db));
        for w in points.windows(2) {
            if w[0].ebn0_db == w[1].ebn0_db {
                return Err(Error::Config(format!("duplicate Eb/N0 point {} dB", w[0].ebn0_db)));
            }
        }
        if points.iter().any(|p| p.trials == 0) {
            return Err(Error::Config("every BLER point needs at least one trial".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[BlerPoint] {
        &self.points
    }

    /// Adds or replaces points, keeping the grid sorted.
    pub fn merge(&mut self, more: impl IntoIterator<Item = BlerPoint>) {
        for p in more {
            match self.points.iter_mut().find(|q| q.ebn0_db == p.ebn0_db) {
                Some(q) => *q = p,
                None => self.points.push(p),
            }
        }
        self.points.sort_by(|a, b| a.ebn0_db.total_cmp(&b.ebn0_db));
    }

    pub fn shifted(&self, delta_db: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| BlerPoint {
                    ebn0_db: p.ebn0_db + delta_db,
                    ..*p
                })
                .collect(),
        }
    }
}

/// Smallest `Eb/N0` at which the curve reaches `target`, interpolating
/// linearly in `log10(BLER)` between the bracketing points.
///
/// The curve is scanned from the low end; the first pair with
/// `bler(a) > target >= bler(b)` is used. A point that sits exactly on the
/// target is returned as-is.
pub fn operating_point(curve: &BlerCurve, target: f64) -> Result<f64> {
    let pts = curve.points();
    if pts.is_empty() || !(target > 0.0 && target < 1.0) {
        return Err(Error::Config(format!("cannot locate BLER {target} on this curve")));
    }
    if pts[0].bler() <= target {
        if pts[0].bler() == target {
            return Ok(pts[0].ebn0_db);
        }
        return Err(Error::OutOfRange {
            target,
            nearest_db: pts[0].ebn0_db,
        });
    }
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (pa, pb) = (a.bler(), b.bler());
        if pa > target && pb <= target {
            if pb == target {
                return Ok(b.ebn0_db);
            }
            // a zero-error point is treated as half an error for the log scale
            let pb = if pb > 0.0 { pb } else { 0.5 / b.trials as f64 };
            let (la, lb, lt) = (pa.log10(), pb.log10(), target.log10());
            return Ok(a.ebn0_db + (lt - la) / (lb - la) * (b.ebn0_db - a.ebn0_db));
        }
    }
    Err(Error::OutOfRange {
        target,
        nearest_db: pts[pts.len() - 1].ebn0_db,
    })
}

/// Loss of a constrained operating point relative to the unconstrained one.
pub fn ebn0_loss(constrained_db: f64, unconstrained_db: f64) -> f64 {
    constrained_db - unconstrained_db
}

/// Constant throughput `k f / I` in bit/s.
pub fn throughput(k: usize, clock_hz: f64, interval: u64) -> f64 {
    k as f64 * clock_hz / interval as f64
}

/// Average throughput `alpha k f / beta` in bit/s.
pub fn avg_throughput(alpha: u32, k: usize, clock_hz: f64, beta: f64) -> f64 {
    f64::from(alpha) * k as f64 * clock_hz / beta
}

/// Input-output latency `P I / f` in seconds.
pub fn latency(parallelism: u64, interval: u64, clock_hz: f64) -> f64 {
    (parallelism * interval) as f64 / clock_hz
}

/// Activity factor: active decoder cycles over the `P I + I (N - 1)` cycles
/// needed to process `N` codewords.
pub fn activity_factor(active_cycles_total: u64, parallelism: u64, interval: u64, codewords: u64) -> f64 {
    let denom = parallelism * interval + interval * codewords.saturating_sub(1);
    active_cycles_total as f64 / denom as f64
}

/// Dynamic decoding power `eta_act * p_dec` in watts.
pub fn dynamic_power(active_cycles_total: u64, parallelism: u64, interval: u64, codewords: u64, p_dec: f64) -> f64 {
    activity_factor(active_cycles_total, parallelism, interval, codewords) * p_dec
}
