//! Executes resolved configurations end to end: single runs scored by the
//! three trajectory verifiers, the six-cell event-count table, grid sweeps
//! whose failing cells become tagged rows instead of aborts, and
//! certificate reports with family-specific gain diagnostics.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::analysis::{
    bisect_schur_boundary, design_linear_gain, estimate_constants, scalar_gain_interval,
};
use crate::cert::StateFunctional;
use crate::config::{ResolvedRun, ResolvedSweep, RunConfig, SweepCell, SweepConfig};
use crate::engine::{self, SimOptions, SimulationRecord};
use crate::error::{Error, Result};
use crate::models::{self, ModelInstance};
use crate::report::{
    to_json, CertificateBlock, CertifyCertificateBlock, CertifyInputsBlock, CertifyReport,
    ConditionBlock, DelayEcho, EventsBlock, GainBlock, GainInterval, InputsBlock,
    LinearGainBlock, NetworkGainBlock, RunReport, SampledBlock, ScalarGainBlock,
    StabilityBlock, SweepMetrics, SweepRow, Table1Cell, Table1Report, TriggerEcho,
    VerificationBlock, SWEEP_HEADER,
};
use crate::theorem::{
    check_stability_condition, crossing_time, envelope_gain, stability_radius, ConditionReport,
};
use crate::trigger::{DelaySpec, TriggerConfig};

pub const TABLE1_CELLS: [(f64, f64, f64); 6] = [
    (5.0, 0.04, 0.1),
    (5.0, 0.04, 3.0),
    (5.0, 0.07, 0.1),
    (5.0, 0.07, 3.0),
    (24.0, 0.07, 0.1),
    (24.0, 0.07, 3.0),
];

/// Reference event counts for the six cells, in `TABLE1_CELLS` order.
pub const TABLE1_REFERENCE: [usize; 6] = [592, 595, 716, 719, 713, 715];

pub const TABLE1_VARIANTS: [&str; 2] = ["c103", "a2of0.1"];

fn v_functional(run: &ResolvedRun) -> StateFunctional {
    let cert = run.bundle.certificate.clone();
    Arc::new(move |x| cert.v(x))
}

fn trigger_echo(t: &TriggerConfig) -> TriggerEcho {
    TriggerEcho {
        a: t.a(),
        b: t.b(),
        delta: t.delta(),
    }
}

fn condition_block(c: &ConditionReport) -> ConditionBlock {
    ConditionBlock {
        lhs: c.lhs,
        satisfied: c.satisfied,
        margin: c.margin,
    }
}

fn write_text(out_dir: &Path, rel: &str, text: &str) -> Result<PathBuf> {
    let path = if Path::new(rel).is_absolute() {
        PathBuf::from(rel)
    } else {
        out_dir.join(rel)
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&path, text)?;
    Ok(path)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub record: SimulationRecord,
    pub trajectory_csv: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

/// Simulates a resolved run and assembles its report.
pub fn execute_run(run: &ResolvedRun) -> Result<(SimulationRecord, RunReport)> {
    let v = v_functional(run);
    let opts = SimOptions {
        allow_v0_above_a: run.allow_v0_above_a,
    };
    let record = engine::simulate_with(
        &run.bundle.system,
        &run.bundle.law,
        &v,
        &run.trigger,
        &run.delay,
        &run.x0,
        run.horizon,
        &opts,
    )?;
    let cert = &run.bundle.certificate;
    let cond = check_stability_condition(cert.rho(), cert.c(), &run.trigger, &run.delay);
    let (post_ok, first_violation) =
        engine::verify_post_impulse_subthreshold(&record, &run.trigger, &run.delay);
    let (env_ok, max_ratio) = engine::verify_envelope(&record, &run.trigger, &run.delay, cert.c());
    let t_star = crossing_time(record.v_series[0], &run.trigger, cert.c())
        .ok()
        .filter(|t| t.is_finite());
    let report = RunReport {
        inputs: InputsBlock {
            model: run.label.clone(),
            family: run.instance.family().into(),
            trigger: trigger_echo(&run.trigger),
            delay: DelayEcho {
                gamma: run.delay.gamma(),
            },
            x0: run.x0.iter().cloned().collect(),
            horizon: run.horizon,
            allow_v0_above_a: run.allow_v0_above_a,
        },
        certificate: CertificateBlock {
            c: cert.c(),
            rho: cert.rho(),
            exploratory: cert.is_exploratory(),
        },
        condition: condition_block(&cond),
        events: EventsBlock {
            count: record.event_times.len(),
            first_event_time: record.event_times.first().copied(),
            min_inter_event_gap: engine::min_inter_event(&record),
            impulse_count: record.impulse_times.len(),
            unactuated_trailing_event: record.unactuated_trailing_event,
        },
        verification: VerificationBlock {
            post_impulse_subthreshold: post_ok,
            post_impulse_first_violation: first_violation,
            envelope_ok: env_ok,
            max_envelope_ratio: max_ratio,
            envelope_gain: envelope_gain(&run.trigger, &run.delay, cert.c()),
            t_star,
            final_v: *record.v_series.last().expect("horizon is at least 1"),
            exploratory_run: record.exploratory,
        },
    };
    Ok((record, report))
}

pub fn run_config(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let run = cfg.resolve()?;
    let (record, report) = execute_run(&run)?;
    let trajectory_csv = match &run.outputs.trajectory_csv {
        Some(rel) => Some(write_text(out_dir, rel, &record.csv_string())?),
        None => None,
    };
    let report_path = match &run.outputs.report {
        Some(rel) => Some(write_text(out_dir, rel, &to_json(&report)?)?),
        None => None,
    };
    Ok(RunOutcome {
        report,
        record,
        trajectory_csv,
        report_path,
    })
}

pub fn table1_a2(variant: &str) -> Result<f64> {
    match variant {
        "c103" => Ok(0.01),
        "a2of0.1" => Ok(0.10),
        other => Err(Error::Config(format!(
            "unknown table variant '{other}'; available: c103, a2of0.1"
        ))),
    }
}

/// Runs the six reference cells (K = −0.45, Δ = 2, Γ = 1, horizon 3000)
/// under the requested scalar variant and scores each count against the
/// reference value.
pub fn run_table1(variant: &str) -> Result<Table1Report> {
    let a2 = table1_a2(variant)?;
    let delay = DelaySpec::new(1);
    let bundle = models::make_scalar(&models::ex1_params(a2, -0.45), &delay)?;
    let cert = bundle.certificate.clone();
    let v: StateFunctional = Arc::new(move |x| cert.v(x));
    let mut cells = Vec::with_capacity(TABLE1_CELLS.len());
    for (i, &(a, b, x0)) in TABLE1_CELLS.iter().enumerate() {
        let trigger = TriggerConfig::new(a, b, 2)?;
        let record = engine::simulate(
            &bundle.system,
            &bundle.law,
            &v,
            &trigger,
            &delay,
            &DVector::from_vec(vec![x0]),
            3000,
        )?;
        let events = record.event_times.len();
        let reference = TABLE1_REFERENCE[i];
        cells.push(Table1Cell {
            a,
            b,
            x0,
            events,
            reference,
            relative_deviation: (events as f64 - reference as f64) / reference as f64,
        });
    }
    Ok(Table1Report {
        variant: variant.into(),
        k_gain: -0.45,
        delta: 2,
        gamma: 1,
        horizon: 3000,
        cells,
    })
}

fn sweep_cell_metrics(sweep: &ResolvedSweep, cell: &SweepCell) -> Result<SweepMetrics> {
    let delay = DelaySpec::new(cell.gamma);
    let mut instance = sweep.spec.instantiate(&delay)?;
    if let Some(kg) = cell.k_gain {
        instance = instance.with_gain(kg);
    }
    let bundle = instance.build(&delay)?;
    let trigger = TriggerConfig::new(cell.a, cell.b, cell.delta)?;
    if sweep.x0.len() != bundle.system.state_dim() {
        return Err(Error::Config(format!(
            "x0 has {} entries but the model has {} states",
            sweep.x0.len(),
            bundle.system.state_dim()
        )));
    }
    let x0 = DVector::from_vec(sweep.x0.clone());
    let cert = bundle.certificate.clone();
    let v: StateFunctional = Arc::new(move |x| cert.v(x));
    let opts = SimOptions {
        allow_v0_above_a: sweep.allow_v0_above_a,
    };
    let record = engine::simulate_with(
        &bundle.system,
        &bundle.law,
        &v,
        &trigger,
        &delay,
        &x0,
        sweep.horizon,
        &opts,
    )?;
    let cond = check_stability_condition(
        bundle.certificate.rho(),
        bundle.certificate.c(),
        &trigger,
        &delay,
    );
    let (_, max_ratio) = engine::verify_envelope(&record, &trigger, &delay, bundle.certificate.c());
    Ok(SweepMetrics {
        lhs: cond.lhs,
        satisfied: cond.satisfied,
        events: record.event_times.len(),
        min_gap: engine::min_inter_event(&record),
        max_envelope_ratio: max_ratio,
        final_v: *record.v_series.last().expect("horizon is at least 1"),
    })
}

fn sweep_row(sweep: &ResolvedSweep, cell: &SweepCell) -> SweepRow {
    let (metrics, error) = match sweep_cell_metrics(sweep, cell) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    SweepRow {
        a: cell.a,
        b: cell.b,
        delta: cell.delta,
        gamma: cell.gamma,
        k_gain: cell.knob,
        metrics,
        error,
    }
}

/// Sequential cell evaluation, always available for cross-checking the
/// parallel path.
pub fn sweep_rows_seq(sweep: &ResolvedSweep) -> Vec<SweepRow> {
    sweep.cells.iter().map(|c| sweep_row(sweep, c)).collect()
}

#[cfg(feature = "parallel")]
pub fn sweep_rows(sweep: &ResolvedSweep) -> Vec<SweepRow> {
    sweep.cells.par_iter().map(|c| sweep_row(sweep, c)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn sweep_rows(sweep: &ResolvedSweep) -> Vec<SweepRow> {
    sweep_rows_seq(sweep)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv: String,
    pub csv_path: Option<PathBuf>,
}

pub fn run_sweep(cfg: &SweepConfig, out_dir: &Path) -> Result<SweepOutcome> {
    let sweep = cfg.resolve()?;
    let rows = sweep_rows(&sweep);
    finish_sweep(&sweep, rows, out_dir)
}

pub fn run_sweep_seq(cfg: &SweepConfig, out_dir: &Path) -> Result<SweepOutcome> {
    let sweep = cfg.resolve()?;
    let rows = sweep_rows_seq(&sweep);
    finish_sweep(&sweep, rows, out_dir)
}

fn finish_sweep(
    sweep: &ResolvedSweep,
    rows: Vec<SweepRow>,
    out_dir: &Path,
) -> Result<SweepOutcome> {
    let csv = sweep_csv(&rows);
    let csv_path = match &sweep.output_csv {
        Some(rel) => Some(write_text(out_dir, rel, &csv)?),
        None => None,
    };
    Ok(SweepOutcome {
        rows,
        csv,
        csv_path,
    })
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn gain_block(run: &ResolvedRun, condition: &ConditionBlock) -> Result<GainBlock> {
    let flag = (!condition.satisfied)
        .then(|| "supplied gain fails the sufficient condition; see documentation".to_string());
    Ok(match &run.instance {
        ModelInstance::Scalar(p) => {
            let (interval, inside, note) = if run.delay.gamma() == 1 {
                match scalar_gain_interval(p.a1, p.a2, p.b_in, &run.trigger) {
                    Ok(Some((lo, hi))) => (
                        Some(GainInterval {
                            lo_exclusive: lo,
                            hi_inclusive: hi,
                        }),
                        Some(p.k_gain > lo && p.k_gain <= hi),
                        None,
                    ),
                    Ok(None) => (None, Some(false), None),
                    Err(e) => (None, None, Some(e.to_string())),
                }
            } else {
                (
                    None,
                    None,
                    Some(format!(
                        "the closed-form gain interval is derived for a one-step actuation \
                         delay; gamma = {}",
                        run.delay.gamma()
                    )),
                )
            };
            GainBlock {
                family: "scalar".into(),
                scalar: Some(ScalarGainBlock {
                    interval,
                    supplied: p.k_gain,
                    supplied_is_admissible: inside,
                    note,
                }),
                linear: None,
                network: None,
                flag,
            }
        }
        ModelInstance::Linear(p) => {
            let design = design_linear_gain(&p.a, &p.b, &run.delay, 1e-10)?;
            GainBlock {
                family: "linear".into(),
                scalar: None,
                linear: Some(LinearGainBlock {
                    supplied_rho: run.bundle.certificate.rho(),
                    designed: matrix_rows(&design.gain),
                    designed_rho: design.achieved_rho,
                    design_meets_target: design.meets_target,
                }),
                network: None,
                flag,
            }
        }
        ModelInstance::Network(p) => {
            let boundary = bisect_schur_boundary(&p.c_diag, &p.a, &p.b, &p.k, &p.l_diag)?;
            GainBlock {
                family: "network".into(),
                scalar: None,
                linear: None,
                network: Some(NetworkGainBlock {
                    rho_min: run.bundle.certificate.rho(),
                    schur_boundary: boundary,
                }),
                flag,
            }
        }
    })
}

#[derive(Debug)]
pub struct CertifyOutcome {
    pub report: CertifyReport,
    pub report_path: Option<PathBuf>,
}

/// Scores the model's certificate analytically and by region sampling,
/// evaluates the sufficient condition, derives family-specific gain
/// diagnostics, and computes the stability radius for the configured
/// epsilon.
pub fn run_certify(cfg: &RunConfig, seed: u64, out_dir: &Path) -> Result<CertifyOutcome> {
    let run = cfg.resolve()?;
    let cert = &run.bundle.certificate;
    let v = v_functional(&run);
    let est = estimate_constants(
        &run.bundle.system,
        &run.bundle.law,
        &v,
        &run.delay,
        run.certify.region_radius,
        run.certify.sample_count,
        seed,
    )?;
    let cond = check_stability_condition(cert.rho(), cert.c(), &run.trigger, &run.delay);
    let condition = condition_block(&cond);
    let gain = gain_block(&run, &condition)?;
    let sigma = stability_radius(run.certify.epsilon, cert, &run.trigger, &run.delay)?;
    let t_star = crossing_time(cert.v(&run.x0), &run.trigger, cert.c())
        .ok()
        .filter(|t| t.is_finite());
    let report = CertifyReport {
        inputs: CertifyInputsBlock {
            model: run.label.clone(),
            family: run.instance.family().into(),
            trigger: trigger_echo(&run.trigger),
            delay: DelayEcho {
                gamma: run.delay.gamma(),
            },
            x0: run.x0.iter().cloned().collect(),
            horizon: run.horizon,
            epsilon: run.certify.epsilon,
            region_radius: run.certify.region_radius,
            sample_count: run.certify.sample_count,
            seed,
        },
        certificate: CertifyCertificateBlock {
            c: cert.c(),
            rho: cert.rho(),
            exploratory: cert.is_exploratory(),
            sampled: SampledBlock {
                c_hat: est.c_hat,
                rho_hat: est.rho_hat,
                sample_count: est.sample_count,
                region_radius: est.region_radius,
                worst_c_witness: est.worst_c_witness.iter().cloned().collect(),
                worst_rho_witness: est.worst_rho_witness.iter().cloned().collect(),
            },
        },
        condition,
        gain,
        stability: StabilityBlock {
            epsilon: run.certify.epsilon,
            sigma,
            envelope_gain: envelope_gain(&run.trigger, &run.delay, cert.c()),
            t_star,
        },
    };
    let report_path = match &run.outputs.report {
        Some(rel) => Some(write_text(out_dir, rel, &to_json(&report)?)?),
        None => None,
    };
    Ok(CertifyOutcome {
        report,
        report_path,
    })
}
