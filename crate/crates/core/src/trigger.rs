//! Trigger threshold `a(1-b)^k` and the actuator-delay description.

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of the periodic event trigger: the Lyapunov value is compared
/// against `a(1-b)^k` at every sampling instant `j*delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriggerConfig {
    a: f64,
    b: f64,
    delta: usize,
}

impl TriggerConfig {
    pub fn new(a: f64, b: f64, delta: usize) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Config(format!(
                "threshold scale a must be positive and finite, got {a}"
            )));
        }
        if !b.is_finite() || b <= 0.0 || b >= 1.0 {
            return Err(Error::Config(format!(
                "threshold decay rate b must lie in the open interval (0, 1), got {b}"
            )));
        }
        if delta < 1 {
            return Err(Error::Config(
                "sampling period delta must be at least 1".into(),
            ));
        }
        Ok(Self { a, b, delta })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> usize {
        self.delta
    }
}

/// Actuator delay in time steps, optionally split into sensor-to-controller
/// and controller-to-actuator components that sum to the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DelaySpec {
    gamma: usize,
    split: Option<(usize, usize)>,
}

impl DelaySpec {
    pub fn new(gamma: usize) -> Self {
        Self { gamma, split: None }
    }

    pub fn with_split(gamma1: usize, gamma2: usize) -> Self {
        Self {
            gamma: gamma1 + gamma2,
            split: Some((gamma1, gamma2)),
        }
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }
}

/// Threshold value `a(1-b)^k`, evaluated directly.
pub fn threshold(cfg: &TriggerConfig, k: usize) -> f64 {
    cfg.a * (1.0 - cfg.b).powi(k as i32)
}

/// Log-domain threshold `ln(a) + k*ln(1-b)`, immune to underflow for the
/// horizons where the direct form degrades to subnormals or zero.
pub fn ln_threshold(cfg: &TriggerConfig, k: usize) -> f64 {
    cfg.a.ln() + k as f64 * (-cfg.b).ln_1p()
}

/// Strict trigger comparison `V > a(1-b)^k`. Positive values are compared in
/// the log domain; `V = 0` can never exceed the positive threshold.
pub fn exceeds_threshold(v: f64, cfg: &TriggerConfig, k: usize) -> bool {
    v > 0.0 && v.ln() > ln_threshold(cfg, k)
}
