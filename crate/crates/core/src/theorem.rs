//! Closed-form certificate mathematics: the sufficient stability condition,
//! the threshold crossing time, the pointwise decay envelope, and the
//! stability radius.

use serde::Serialize;

use crate::cert::LyapunovCertificate;
use crate::error::{Error, Result};
use crate::trigger::{DelaySpec, TriggerConfig};

/// Outcome of the sufficient stability condition
/// `rho * c^delta / (1-b)^(delta+gamma+1) <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    pub lhs: f64,
    pub satisfied: bool,
    pub margin: f64,
}

/// Crossing time, envelope gain, and stability radius bundled for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    pub t_star: f64,
    pub envelope_gain: f64,
    pub sigma: f64,
}

/// Evaluates the sufficient stability condition. Accepts raw constants so
/// exploratory certificates (c < 1) can still be scored; the certificate
/// types enforce their own admissibility.
pub fn check_stability_condition(
    rho: f64,
    c: f64,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
) -> ConditionReport {
    let exponent = (cfg.delta() + delay.gamma() + 1) as i32;
    let lhs = rho * c.powi(cfg.delta() as i32) / (1.0 - cfg.b()).powi(exponent);
    ConditionReport {
        lhs,
        satisfied: lhs <= 1.0,
        margin: 1.0 - lhs,
    }
}

/// Unique real t with `V0 * c^t = a * (1-b)^t`, i.e. the time at which
/// worst-case free growth meets the decaying threshold.
///
/// `V0 = a` returns 0 exactly; `V0 > a` is a domain error (the initial state
/// lies outside the guaranteed ball); `V0 = 0` returns positive infinity
/// (the zero trajectory never crosses).
pub fn crossing_time(v0: f64, cfg: &TriggerConfig, c: f64) -> Result<f64> {
    if !v0.is_finite() || v0 < 0.0 {
        return Err(Error::Numeric(format!(
            "crossing time needs a finite non-negative initial Lyapunov value, got {v0}"
        )));
    }
    if v0 == 0.0 {
        return Ok(f64::INFINITY);
    }
    if v0 == cfg.a() {
        return Ok(0.0);
    }
    if v0 > cfg.a() {
        return Err(Error::Numeric(format!(
            "initial Lyapunov value {v0} is not below the threshold scale a = {}; \
             the initial state lies outside the guaranteed ball",
            cfg.a()
        )));
    }
    let base = c / (1.0 - cfg.b());
    if base <= 1.0 {
        return Err(Error::Numeric(format!(
            "crossing time requires c/(1-b) > 1, got {base}"
        )));
    }
    Ok((cfg.a() / v0).ln() / base.ln())
}

/// Largest integer at or below a finite crossing time.
pub fn t_star_floor(t_star: f64) -> Option<u64> {
    t_star.is_finite().then(|| t_star.floor() as u64)
}

/// Smallest integer at or above a finite crossing time.
pub fn t_star_ceil(t_star: f64) -> Option<u64> {
    t_star.is_finite().then(|| t_star.ceil() as u64)
}

/// Gain factor `(c/(1-b))^(gamma+delta)` of the pointwise decay envelope.
pub fn envelope_gain(cfg: &TriggerConfig, delay: &DelaySpec, c: f64) -> f64 {
    (c / (1.0 - cfg.b())).powi((delay.gamma() + cfg.delta()) as i32)
}

/// Pointwise decay envelope `(c/(1-b))^(gamma+delta) * a * (1-b)^k`.
pub fn decay_envelope(cfg: &TriggerConfig, delay: &DelaySpec, c: f64, k: usize) -> f64 {
    envelope_gain(cfg, delay, c) * cfg.a() * (1.0 - cfg.b()).powi(k as i32)
}

/// Log-domain envelope for underflow-safe pointwise comparisons.
pub fn ln_decay_envelope(cfg: &TriggerConfig, delay: &DelaySpec, c: f64, k: usize) -> f64 {
    (envelope_gain(cfg, delay, c) * cfg.a()).ln() + k as f64 * (-cfg.b()).ln_1p()
}

/// Radius sigma such that starting inside the ball of radius
/// `min(sigma, beta^-1(a))` keeps the state norm below epsilon.
pub fn stability_radius(
    epsilon: f64,
    cert: &LyapunovCertificate,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
) -> Result<f64> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Numeric(format!(
            "stability radius needs a positive epsilon, got {epsilon}"
        )));
    }
    let alpha_eps = cert.alpha().eval(epsilon);
    if !alpha_eps.is_finite() || alpha_eps <= 0.0 {
        return Err(Error::Numeric(format!(
            "alpha(epsilon) = {alpha_eps} is outside the representable range"
        )));
    }
    let gain = envelope_gain(cfg, delay, cert.c());
    let base = cfg.a() * gain / alpha_eps;
    let exponent = (cert.c() / (1.0 - cfg.b())).ln() / (-cfg.b()).ln_1p();
    let inner = cfg.a() * base.powf(exponent);
    if !inner.is_finite() || inner <= 0.0 {
        return Err(Error::Numeric(format!(
            "stability-radius power argument left the representable range ({inner})"
        )));
    }
    let sigma = cert.beta().eval_inv(inner);
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::Numeric(format!(
            "beta inverse returned a non-positive or non-finite radius ({sigma})"
        )));
    }
    Ok(sigma)
}

/// Convenience bundle of crossing time, envelope gain, and stability radius.
pub fn envelope_report(
    v0: f64,
    epsilon: f64,
    cert: &LyapunovCertificate,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
) -> Result<EnvelopeReport> {
    Ok(EnvelopeReport {
        t_star: crossing_time(v0, cfg, cert.c())?,
        envelope_gain: envelope_gain(cfg, delay, cert.c()),
        sigma: stability_radius(epsilon, cert, cfg, delay)?,
    })
}
