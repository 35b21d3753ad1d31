//! WCET budget arithmetic.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::timed_net::WcetConfig;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WcetError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

/// Message sizes and line parameters of the shared bus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusModel {
    pub token_msg_bytes: u64,
    pub result_msg_bytes: u64,
    pub synch_msg_bytes: u64,
    pub nodes: u64,
    /// Data bits plus start and stop framing.
    pub bits_per_byte_on_wire: u64,
    pub baud: u64,
}

/// Token frame: CSMA byte, length byte, payload.
pub const fn token_bytes(csma: u64, length: u64, data: u64) -> u64 {
    csma + length + data
}

impl BusModel {
    /// Four-node CSMA bus at 4800 baud with 64-byte token payloads.
    pub const REFERENCE: BusModel = BusModel {
        token_msg_bytes: token_bytes(1, 1, 64),
        result_msg_bytes: 4,
        synch_msg_bytes: 1,
        nodes: 4,
        bits_per_byte_on_wire: 10,
        baud: 4800,
    };

    pub fn validate(&self) -> Result<(), WcetError> {
        if self.nodes == 0 {
            return Err(WcetError::NonPositive("nodes"));
        }
        if self.bits_per_byte_on_wire == 0 {
            return Err(WcetError::NonPositive("bits_per_byte_on_wire"));
        }
        if self.baud == 0 {
            return Err(WcetError::NonPositive("baud"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommWcet {
    pub total_bytes: u64,
    pub total_bits: u64,
    pub seconds: f64,
    /// `seconds` rounded half-even to 3 decimals.
    pub seconds_rounded: f64,
}

pub fn round_half_even(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round_ties_even() / scale
}

/// Worst-case bus time for one protocol cycle.
pub fn comm_wcet(b: &BusModel) -> CommWcet {
    let total_bytes = b.synch_msg_bytes + b.nodes * b.token_msg_bytes + b.nodes * b.result_msg_bytes;
    let total_bits = total_bytes * b.bits_per_byte_on_wire;
    let seconds = total_bits as f64 / b.baud as f64;
    CommWcet { total_bytes, total_bits, seconds, seconds_rounded: round_half_even(seconds, 3) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingFrequency {
    pub period: i64,
    /// Samples per time unit.
    pub frequency: f64,
}

pub fn sampling_frequency(cfg: &WcetConfig) -> Result<SamplingFrequency, NetError> {
    cfg.validate_budget()?;
    let period = cfg.period();
    Ok(SamplingFrequency { period, frequency: 1.0 / period as f64 })
}

/// Time taken by `cycles` ticks of a timer clocked at `clock_hz / prescaler`.
pub fn cycles_to_seconds(cycles: u64, clock_hz: u64, prescaler: u64) -> Result<f64, WcetError> {
    if clock_hz == 0 {
        return Err(WcetError::NonPositive("clock_hz"));
    }
    if prescaler == 0 {
        return Err(WcetError::NonPositive("prescaler"));
    }
    Ok(cycles as f64 * prescaler as f64 / clock_hz as f64)
}

/// Three-column report: property, value, description.
pub fn comm_report(b: &BusModel) -> String {
    let w = comm_wcet(b);
    let rows: [(&str, String, String); 8] = [
        ("token msg", format!("{} bytes", b.token_msg_bytes), "max length of one token message".into()),
        ("result msg", format!("{} bytes", b.result_msg_bytes), "length of one result message".into()),
        ("synch msg", format!("{} bytes", b.synch_msg_bytes), "length of the synchronization message".into()),
        ("nodes", b.nodes.to_string(), "components on the bus".into()),
        (
            "total bytes",
            format!("{} bytes", w.total_bytes),
            format!("synch + {n}*token + {n}*result", n = b.nodes),
        ),
        (
            "total bits",
            format!("{} bits", w.total_bits),
            format!("{} bits per byte on the wire", b.bits_per_byte_on_wire),
        ),
        ("baud", format!("{} bit/s", b.baud), "line rate".into()),
        (
            "worst case comm",
            format!("{:.3} sec", w.seconds_rounded),
            format!("total bits / baud = {:.5} sec", w.seconds),
        ),
    ];
    let mut out = String::new();
    let _ = writeln!(out, "{:<16} {:<14} description", "property", "value");
    for (p, v, d) in rows {
        let _ = writeln!(out, "{p:<16} {v:<14} {d}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_bus() {
        assert_eq!(BusModel::REFERENCE.token_msg_bytes, 66);
        let w = comm_wcet(&BusModel::REFERENCE);
        assert_eq!(w.total_bytes, 281);
        assert_eq!(w.total_bits, 2810);
        assert_eq!(w.seconds_rounded, 0.585);
        assert!((w.seconds - 2810.0 / 4800.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_bus() {
        let b = BusModel { token_msg_bytes: 1, result_msg_bytes: 1, synch_msg_bytes: 0, nodes: 1, bits_per_byte_on_wire: 10, baud: 10 };
        let w = comm_wcet(&b);
        assert_eq!((w.total_bytes, w.total_bits, w.seconds), (2, 20, 2.0));
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(0.0625, 3), 0.062);
        assert_eq!(round_half_even(2.5, 0), 2.0);
        assert_eq!(round_half_even(3.5, 0), 4.0);
    }

    #[test]
    fn periods() {
        let base = WcetConfig { wcet_l: 10, wcet_e: 5, wcet_m: 32, wcet_r: 2, wcet_v: 1, wcet_t: 10, fault_t: 0, n: 4 };
        assert_eq!(sampling_frequency(&base).unwrap().period, 72);
        assert_eq!(sampling_frequency(&WcetConfig { n: 5, fault_t: 1, ..base }).unwrap().period, 88);
        let ones = WcetConfig { fault_t: 1, ..WcetConfig::default() };
        let sf = sampling_frequency(&ones).unwrap();
        assert_eq!(sf.period, 8);
        assert_eq!(sf.frequency, 0.125);
        assert!(sampling_frequency(&WcetConfig { wcet_m: 0, ..base }).is_err());
    }

    #[test]
    fn cycle_conversion() {
        assert!((cycles_to_seconds(65415, 16_000_000, 8).unwrap() - 0.0327075).abs() < 1e-12);
        assert_eq!(cycles_to_seconds(2_000_000, 16_000_000, 8).unwrap(), 1.0);
        assert_eq!(cycles_to_seconds(1, 1, 1).unwrap(), 1.0);
        assert!(cycles_to_seconds(1, 0, 1).is_err());
    }

    #[test]
    fn report_contains_totals() {
        let r = comm_report(&BusModel::REFERENCE);
        assert!(r.contains("281 bytes"));
        assert!(r.contains("2810 bits"));
        assert!(r.contains("0.585 sec"));
    }
}
