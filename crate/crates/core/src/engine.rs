//! Closed-loop simulation under the periodic event trigger with delayed
//! impulses, plus trajectory-level verifiers for the guarantees the
//! stability condition promises.
//!
//! Timing model: the trigger is examined at sampling instants jΔ (j ≥ 1).
//! An event at k_i stores the measurement x(k_i); the impulse fires Γ steps
//! later, replacing the transition at k_i+Γ with
//! x(k_i+Γ+1) = f(x(k_i+Γ), 𝐤(x(k_i))). Sampling instants inside
//! (k_i, k_i+Γ] are skipped outright, so at most one impulse is ever
//! pending. Every other transition is the free step x(k+1) = g(x(k)).

use std::io::Write;

use nalgebra::DVector;

use crate::cert::StateFunctional;
use crate::error::{Error, Result};
use crate::system::{DiscreteSystem, FeedbackLaw};
use crate::theorem::{envelope_gain, ln_decay_envelope};
use crate::trigger::{exceeds_threshold, ln_threshold, threshold, DelaySpec, TriggerConfig};

/// Simulation aborts once the state norm passes this bound.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Relative slack (in the log domain) granted when checking recorded
/// trajectories against theoretical bounds, absorbing float noise without
/// masking real violations.
const VERIFY_LN_SLACK: f64 = 1e-12;

/// Per-step markers mirroring the CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepFlags {
    /// k is a sampling instant jΔ with j ≥ 1.
    pub is_sample: bool,
    /// The trigger fired at k.
    pub is_event: bool,
    /// The impulse input is applied at k (driving the step to k+1).
    pub is_impulse: bool,
}

/// Complete, immutable record of one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRecord {
    /// Final time step T; states run from 0 to T inclusive.
    pub horizon: usize,
    pub states: Vec<DVector<f64>>,
    /// Input applied at each step k = 0..T-1 (zero except at impulses).
    pub inputs: Vec<DVector<f64>>,
    /// Trigger firing times; strictly increasing multiples of Δ.
    pub event_times: Vec<usize>,
    /// Actuated impulse instants, event_times[i] + Γ for each actuated
    /// event. A trailing event whose impulse would land beyond the horizon
    /// contributes no entry here.
    pub impulse_times: Vec<usize>,
    pub v_series: Vec<f64>,
    pub threshold_series: Vec<f64>,
    pub flags: Vec<StepFlags>,
    /// The run started outside the nominal initial ball (override in use).
    pub exploratory: bool,
    /// Final event whose impulse was scheduled beyond the horizon and
    /// therefore never applied.
    pub unactuated_trailing_event: Option<usize>,
}

/// Knobs that relax the nominal admissibility checks.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Accept initial states with V(x0) ≥ a and mark the run exploratory.
    pub allow_v0_above_a: bool,
}

fn check_dimensions(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    x0: &DVector<f64>,
    horizon: usize,
) -> Result<()> {
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    if x0.len() != sys.state_dim() {
        return Err(Error::Config(format!(
            "initial state has dimension {}, system expects {}",
            x0.len(),
            sys.state_dim()
        )));
    }
    if law.state_dim() != sys.state_dim() || law.input_dim() != sys.input_dim() {
        return Err(Error::Config(format!(
            "feedback law maps dimension {} to {}, system expects {} to {}",
            law.state_dim(),
            law.input_dim(),
            sys.state_dim(),
            sys.input_dim()
        )));
    }
    Ok(())
}

fn check_state(x: &DVector<f64>, step: usize) -> Result<()> {
    let norm = x.norm();
    if !norm.is_finite() || norm > DIVERGENCE_LIMIT {
        return Err(Error::Divergence {
            step,
            limit: DIVERGENCE_LIMIT,
        });
    }
    Ok(())
}

fn check_initial_level(v0: f64, cfg: &TriggerConfig, opts: &SimOptions) -> Result<bool> {
    if !v0.is_finite() {
        return Err(Error::Numeric(format!(
            "V(x0) evaluated to {v0}; the candidate function must be finite"
        )));
    }
    if v0 >= cfg.a() {
        if !opts.allow_v0_above_a {
            return Err(Error::Config(format!(
                "V(x0) = {v0} is not below the threshold level a = {}; the initial state \
                 must lie inside the ball of radius beta^-1(a), or set allow_v0_above_a \
                 for an exploratory run",
                cfg.a()
            )));
        }
        return Ok(true);
    }
    Ok(false)
}

/// Runs the closed loop with default options (initial ball enforced).
pub fn simulate(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    v: &StateFunctional,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
    x0: &DVector<f64>,
    horizon: usize,
) -> Result<SimulationRecord> {
    simulate_with(sys, law, v, cfg, delay, x0, horizon, &SimOptions::default())
}

/// Runs the closed loop, tracking the next trigger candidate arithmetically
/// so non-candidate steps never touch the trigger logic.
#[allow(clippy::too_many_arguments)]
pub fn simulate_with(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    v: &StateFunctional,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
    x0: &DVector<f64>,
    horizon: usize,
    opts: &SimOptions,
) -> Result<SimulationRecord> {
    check_dimensions(sys, law, x0, horizon)?;
    let delta = cfg.delta();
    let gamma = delay.gamma();

    let mut states = Vec::with_capacity(horizon + 1);
    let mut inputs = vec![DVector::zeros(sys.input_dim()); horizon];
    let mut v_series = Vec::with_capacity(horizon + 1);
    let mut threshold_series = Vec::with_capacity(horizon + 1);
    let mut flags = vec![StepFlags::default(); horizon + 1];
    let mut event_times = Vec::new();
    let mut impulse_times = Vec::new();
    let mut unactuated_trailing_event = None;

    let mut x = x0.clone();
    check_state(&x, 0)?;
    let exploratory = check_initial_level(v(&x), cfg, opts)?;

    // (application step k_i + Γ, stored measurement x(k_i))
    let mut pending: Option<(usize, DVector<f64>)> = None;
    let mut next_candidate = delta;

    for k in 0..=horizon {
        check_state(&x, k)?;
        let vk = v(&x);
        if !vk.is_finite() {
            return Err(Error::Numeric(format!(
                "V returned {vk} at step {k}; the candidate function must stay finite"
            )));
        }
        v_series.push(vk);
        threshold_series.push(threshold(cfg, k));
        flags[k].is_sample = k >= delta && k % delta == 0;

        if k == next_candidate {
            if exceeds_threshold(vk, cfg, k) {
                flags[k].is_event = true;
                event_times.push(k);
                if k + gamma < horizon {
                    pending = Some((k + gamma, x.clone()));
                    impulse_times.push(k + gamma);
                } else {
                    unactuated_trailing_event = Some(k);
                }
                next_candidate = ((k + gamma) / delta + 1) * delta;
            } else {
                next_candidate += delta;
            }
        }

        states.push(x.clone());
        if k < horizon {
            x = match pending.take() {
                Some((apply_at, measurement)) if apply_at == k => {
                    let u = law.eval(&measurement);
                    flags[k].is_impulse = true;
                    inputs[k] = u.clone();
                    sys.step_controlled(&x, &u)
                }
                other => {
                    pending = other;
                    sys.step_free(&x)
                }
            };
        }
    }

    Ok(SimulationRecord {
        horizon,
        states,
        inputs,
        event_times,
        impulse_times,
        v_series,
        threshold_series,
        flags,
        exploratory,
        unactuated_trailing_event,
    })
}

/// Independent oracle for `simulate`: walks every single time step and
/// re-evaluates the trigger definition literally (divisibility by Δ, the
/// jΔ > k_i + Γ guard, the threshold comparison) instead of tracking the
/// next candidate. Returns the event times.
pub fn brute_force_events(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    v: &StateFunctional,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
    x0: &DVector<f64>,
    horizon: usize,
) -> Result<Vec<usize>> {
    check_dimensions(sys, law, x0, horizon)?;
    let mut x = x0.clone();
    check_state(&x, 0)?;
    check_initial_level(v(&x), cfg, &SimOptions::default())?;

    let mut events = Vec::new();
    let mut last_event: Option<usize> = None;
    let mut pending: Option<(usize, DVector<f64>)> = None;
    for k in 0..=horizon {
        check_state(&x, k)?;
        let vk = v(&x);
        if !vk.is_finite() {
            return Err(Error::Numeric(format!(
                "V returned {vk} at step {k}; the candidate function must stay finite"
            )));
        }
        let is_sampling_instant = k % cfg.delta() == 0 && k / cfg.delta() >= 1;
        let outside_pending_window = match last_event {
            Some(ki) => k > ki + delay.gamma(),
            None => true,
        };
        if is_sampling_instant && outside_pending_window && exceeds_threshold(vk, cfg, k) {
            events.push(k);
            last_event = Some(k);
            pending = Some((k + delay.gamma(), x.clone()));
        }
        if k < horizon {
            x = match &pending {
                Some((apply_at, measurement)) if *apply_at == k => {
                    let u = law.eval(measurement);
                    let next = sys.step_controlled(&x, &u);
                    pending = None;
                    next
                }
                _ => sys.step_free(&x),
            };
        }
    }
    Ok(events)
}

/// Checks V(x(k_i+Γ+1)) ≤ a(1-b)^{k_i+Γ+1} for every event whose
/// post-impulse step lies inside the horizon. Returns the verdict and the
/// index (into event_times) of the first violating event.
pub fn verify_post_impulse_subthreshold(
    rec: &SimulationRecord,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
) -> (bool, Option<usize>) {
    for (i, &ki) in rec.event_times.iter().enumerate() {
        let t = ki + delay.gamma() + 1;
        if t > rec.horizon {
            continue;
        }
        let v = rec.v_series[t];
        let ok = v <= 0.0 || v.ln() <= ln_threshold(cfg, t) + VERIFY_LN_SLACK;
        if !ok {
            return (false, Some(i));
        }
    }
    (true, None)
}

/// Minimum gap between consecutive events; none with fewer than two.
pub fn min_inter_event(rec: &SimulationRecord) -> Option<usize> {
    rec.event_times
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
}

/// Checks the whole trajectory against the attractivity envelope
/// (c/(1-b))^{Γ+Δ} · a(1-b)^k and reports the largest ratio
/// V(x(k)) / envelope(k) encountered.
pub fn verify_envelope(
    rec: &SimulationRecord,
    cfg: &TriggerConfig,
    delay: &DelaySpec,
    c: f64,
) -> (bool, f64) {
    let gain = envelope_gain(cfg, delay, c);
    let mut ok = true;
    let mut max_ratio = 0.0f64;
    for (k, &v) in rec.v_series.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        if v.ln() > ln_decay_envelope(cfg, delay, c, k) + VERIFY_LN_SLACK {
            ok = false;
        }
        let ratio = v / (gain * threshold(cfg, k));
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    (ok, max_ratio)
}

/// One row per time step: `k,x_1..x_n,u_1..u_m,V,threshold,is_sample,
/// is_event,is_impulse`. Floats carry 17 significant digits; booleans are
/// 0/1. The final row has no applied input and writes zeros there.
pub fn write_csv<W: Write>(rec: &SimulationRecord, out: &mut W) -> Result<()> {
    let n = rec.states.first().map_or(0, |x| x.len());
    let m = rec.inputs.first().map_or(0, |u| u.len());
    write!(out, "k")?;
    for i in 1..=n {
        write!(out, ",x_{i}")?;
    }
    for i in 1..=m {
        write!(out, ",u_{i}")?;
    }
    writeln!(out, ",V,threshold,is_sample,is_event,is_impulse")?;
    let zero_input = DVector::zeros(m);
    for k in 0..=rec.horizon {
        write!(out, "{k}")?;
        for value in rec.states[k].iter() {
            write!(out, ",{value:.16e}")?;
        }
        let u = rec.inputs.get(k).unwrap_or(&zero_input);
        for value in u.iter() {
            write!(out, ",{value:.16e}")?;
        }
        let f = rec.flags[k];
        writeln!(
            out,
            ",{:.16e},{:.16e},{},{},{}",
            rec.v_series[k],
            rec.threshold_series[k],
            f.is_sample as u8,
            f.is_event as u8,
            f.is_impulse as u8
        )?;
    }
    Ok(())
}

impl SimulationRecord {
    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        write_csv(self, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}
