//! Typed report trees and row schemas for the command-line front end.
//! Struct fields serialize in declaration order and floats use either
//! serde_json's shortest round-trip form (reports) or the fixed `{:.16e}`
//! form (CSV rows), so outputs are byte-stable for a fixed configuration.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub inputs: InputsBlock,
    pub certificate: CertificateBlock,
    pub condition: ConditionBlock,
    pub events: EventsBlock,
    pub verification: VerificationBlock,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputsBlock {
    pub model: String,
    pub family: String,
    pub trigger: TriggerEcho,
    pub delay: DelayEcho,
    pub x0: Vec<f64>,
    pub horizon: usize,
    pub allow_v0_above_a: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TriggerEcho {
    pub a: f64,
    pub b: f64,
    pub delta: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DelayEcho {
    pub gamma: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertificateBlock {
    pub c: f64,
    pub rho: f64,
    pub exploratory: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionBlock {
    pub lhs: f64,
    pub satisfied: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EventsBlock {
    pub count: usize,
    pub first_event_time: Option<usize>,
    pub min_inter_event_gap: Option<usize>,
    pub impulse_count: usize,
    pub unactuated_trailing_event: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationBlock {
    pub post_impulse_subthreshold: bool,
    pub post_impulse_first_violation: Option<usize>,
    pub envelope_ok: bool,
    pub max_envelope_ratio: f64,
    pub envelope_gain: f64,
    pub t_star: Option<f64>,
    pub final_v: f64,
    pub exploratory_run: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub inputs: CertifyInputsBlock,
    pub certificate: CertifyCertificateBlock,
    pub condition: ConditionBlock,
    pub gain: GainBlock,
    pub stability: StabilityBlock,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyInputsBlock {
    pub model: String,
    pub family: String,
    pub trigger: TriggerEcho,
    pub delay: DelayEcho,
    pub x0: Vec<f64>,
    pub horizon: usize,
    pub epsilon: f64,
    pub region_radius: f64,
    pub sample_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyCertificateBlock {
    pub c: f64,
    pub rho: f64,
    pub exploratory: bool,
    pub sampled: SampledBlock,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledBlock {
    pub c_hat: f64,
    pub rho_hat: f64,
    pub sample_count: usize,
    pub region_radius: f64,
    pub worst_c_witness: Vec<f64>,
    pub worst_rho_witness: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainBlock {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarGainBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearGainBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkGainBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarGainBlock {
    pub interval: Option<GainInterval>,
    pub supplied: f64,
    pub supplied_is_admissible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GainInterval {
    pub lo_exclusive: f64,
    pub hi_inclusive: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearGainBlock {
    pub supplied_rho: f64,
    pub designed: Vec<Vec<f64>>,
    pub designed_rho: f64,
    pub design_meets_target: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NetworkGainBlock {
    pub rho_min: f64,
    pub schur_boundary: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityBlock {
    pub epsilon: f64,
    pub sigma: f64,
    pub envelope_gain: f64,
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub variant: String,
    pub k_gain: f64,
    pub delta: usize,
    pub gamma: usize,
    pub horizon: usize,
    pub cells: Vec<Table1Cell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Cell {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub events: usize,
    pub reference: usize,
    pub relative_deviation: f64,
}

/// Pretty JSON with a trailing newline.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Numeric(format!("report serialization failed: {e}")))
}

pub const SWEEP_HEADER: &str =
    "a,b,delta,gamma,k_gain,lhs,satisfied,events,min_gap,max_envelope_ratio,final_v,error";

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub a: f64,
    pub b: f64,
    pub delta: usize,
    pub gamma: usize,
    pub k_gain: f64,
    pub metrics: Option<SweepMetrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepMetrics {
    pub lhs: f64,
    pub satisfied: bool,
    pub events: usize,
    pub min_gap: Option<usize>,
    pub max_envelope_ratio: f64,
    pub final_v: f64,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let params = format!(
            "{:.16e},{:.16e},{},{},{:.16e}",
            self.a, self.b, self.delta, self.gamma, self.k_gain
        );
        match (&self.metrics, &self.error) {
            (Some(m), _) => {
                let min_gap = m.min_gap.map(|g| g.to_string()).unwrap_or_default();
                format!(
                    "{params},{:.16e},{},{},{min_gap},{:.16e},{:.16e},",
                    m.lhs,
                    u8::from(m.satisfied),
                    m.events,
                    m.max_envelope_ratio,
                    m.final_v
                )
            }
            (None, Some(err)) => {
                let tag: String = err
                    .chars()
                    .map(|ch| match ch {
                        ',' => ';',
                        '\n' => ' ',
                        other => other,
                    })
                    .collect();
                format!("{params},,,,,,,{tag}")
            }
            (None, None) => format!("{params},,,,,,,unspecified error"),
        }
    }
}

/// Renders the six-cell table with reference counts and signed deviations.
pub fn render_table1(report: &Table1Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "event counts, variant {} (K = {}, delta = {}, gamma = {}, horizon = {})\n",
        report.variant, report.k_gain, report.delta, report.gamma, report.horizon
    ));
    out.push_str(&format!(
        "{:>6} {:>6} {:>5} {:>8} {:>10} {:>11}\n",
        "a", "b", "x0", "events", "reference", "deviation"
    ));
    for cell in &report.cells {
        out.push_str(&format!(
            "{:>6} {:>6} {:>5} {:>8} {:>10} {:>10.2}%\n",
            cell.a,
            cell.b,
            cell.x0,
            cell.events,
            cell.reference,
            100.0 * cell.relative_deviation
        ));
    }
    out
}

pub fn render_run_summary(report: &RunReport) -> String {
    let v = &report.verification;
    let events = &report.events;
    format!(
        "model {} | events {} | first event {} | min gap {} | lhs {:.6e} ({}) | \
         envelope {} (max ratio {:.3e}) | post-impulse {} | final V {:.6e}\n",
        report.inputs.model,
        events.count,
        events
            .first_event_time
            .map(|k| k.to_string())
            .unwrap_or_else(|| "-".into()),
        events
            .min_inter_event_gap
            .map(|g| g.to_string())
            .unwrap_or_else(|| "-".into()),
        report.condition.lhs,
        if report.condition.satisfied {
            "satisfied"
        } else {
            "not satisfied"
        },
        if v.envelope_ok { "pass" } else { "FAIL" },
        v.max_envelope_ratio,
        if v.post_impulse_subthreshold {
            "pass"
        } else {
            "FAIL"
        },
        v.final_v
    )
}

pub fn render_certify_summary(report: &CertifyReport) -> String {
    let mut out = format!(
        "model {} | c {:.6e} (sampled {:.6e}) | rho {:.6e} (sampled {:.6e}) | \
         lhs {:.6e} ({}) | sigma({}) = {:.6e}\n",
        report.inputs.model,
        report.certificate.c,
        report.certificate.sampled.c_hat,
        report.certificate.rho,
        report.certificate.sampled.rho_hat,
        report.condition.lhs,
        if report.condition.satisfied {
            "satisfied"
        } else {
            "not satisfied"
        },
        report.stability.epsilon,
        report.stability.sigma
    );
    if let Some(s) = &report.gain.scalar {
        match &s.interval {
            Some(iv) => out.push_str(&format!(
                "admissible gains: ({}, {}] | supplied {} ({})\n",
                iv.lo_exclusive,
                iv.hi_inclusive,
                s.supplied,
                match s.supplied_is_admissible {
                    Some(true) => "inside",
                    Some(false) => "outside",
                    None => "unchecked",
                }
            )),
            None => out.push_str("admissible gain interval: empty\n"),
        }
        if let Some(note) = &s.note {
            out.push_str(&format!("note: {note}\n"));
        }
    }
    if let Some(l) = &report.gain.linear {
        out.push_str(&format!(
            "supplied rho {:.6e} | designed rho {:.6e} (meets target: {})\n",
            l.supplied_rho, l.designed_rho, l.design_meets_target
        ));
    }
    if let Some(n) = &report.gain.network {
        out.push_str(&format!(
            "rho_min {:.6e} | Schur boundary {:.6e}\n",
            n.rho_min, n.schur_boundary
        ));
    }
    if let Some(flag) = &report.gain.flag {
        out.push_str(&format!("flag: {flag}\n"));
    }
    out
}
