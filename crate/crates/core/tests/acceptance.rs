//! Acceptance gate. One test per headline guarantee; each prints a single
//! [PASS]/[FAIL] line and pins its tolerances as named constants.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use etic_core::analysis::{
    bisect_schur_boundary, design_linear_gain, linear_constants, network_constants,
    scalar_gain_interval,
};
use etic_core::cert::StateFunctional;
use etic_core::engine::{
    brute_force_events, min_inter_event, simulate, verify_envelope,
    verify_post_impulse_subthreshold,
};
use etic_core::linalg::{matrix_power, spectral_norm};
use etic_core::models::{
    ex1_params, ex2_fixed_gain, ex2_matrices, ex3_params, make_linear, make_network,
    make_scalar, LinearParams, ModelBundle, ScalarParams,
};
use etic_core::runner::{run_table1, TABLE1_REFERENCE};
use etic_core::theorem::{check_stability_condition, crossing_time};
use etic_core::trigger::{ln_threshold, threshold};
use etic_core::{DelaySpec, TriggerConfig};

const TABLE1_CELL_TOL: f64 = 0.05;
const TABLE1_SECONDS_PER_CELL: f64 = 1.0;
const GAIN_HI_TOL: f64 = 1e-3;
const DESIGN_RHO_CEILING: f64 = 1e-10;
const FIXED_GAIN_RHO_TOL: f64 = 1e-3;
const FIXED_GAIN_BOUND_TOL: f64 = 1e-3;
const SCHUR_BOUNDARY_TOL: f64 = 1e-8;
const COLLAPSE_REL_TOL: f64 = 1e-12;
const SPECTRAL_REL_TOL: f64 = 1e-10;
const THRESHOLD_REL_TOL: f64 = 1e-9;
const CROSSING_REL_TOL: f64 = 1e-9;

/// Event counts both table variants must reproduce exactly, frozen from an
/// independent step-by-step reimplementation of the trigger definition.
const C103_ORACLE: [usize; 6] = [205, 209, 300, 303, 298, 301];
const A2OF01_ORACLE: [usize; 6] = [592, 595, 717, 720, 713, 715];

fn verdict(tag: &str, pass: bool, detail: &str) -> bool {
    let mark = if pass { "PASS" } else { "FAIL" };
    println!("[{mark}] {tag}: {detail}");
    pass
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn functional(bundle: &ModelBundle) -> StateFunctional {
    let cert = bundle.certificate.clone();
    Arc::new(move |x| cert.v(x))
}

#[test]
fn event_count_table_reproduction() {
    let start = Instant::now();
    let rep_c103 = run_table1("c103").expect("c103 table");
    let rep_a2 = run_table1("a2of0.1").expect("a2of0.1 table");
    let per_cell = start.elapsed().as_secs_f64() / 12.0;

    let counts_c103: Vec<usize> = rep_c103.cells.iter().map(|c| c.events).collect();
    let counts_a2: Vec<usize> = rep_a2.cells.iter().map(|c| c.events).collect();
    let max_dev = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .zip(TABLE1_REFERENCE)
            .map(|(&got, want)| rel(got as f64, want as f64))
            .fold(0.0, f64::max)
    };
    let dev_c103 = max_dev(&counts_c103);
    let dev_a2 = max_dev(&counts_a2);

    let oracle_ok = counts_c103 == C103_ORACLE && counts_a2 == A2OF01_ORACLE;
    let better_within_tol = dev_a2 < dev_c103 && dev_a2 <= TABLE1_CELL_TOL;
    let fast_enough = per_cell < TABLE1_SECONDS_PER_CELL;

    let pass = oracle_ok && better_within_tol && fast_enough;
    let detail = format!(
        "A2 = 0.1 counts {counts_a2:?} match the reference {TABLE1_REFERENCE:?} within \
         ±{:.0}% per cell (max dev {:.2}%); A2 = 0.01 counts {counts_c103:?} match their \
         independent oracle exactly but deviate up to {:.1}% from the reference, so the \
         reference table is consistent with the A2 = 0.1 dynamics; {per_cell:.3} s/cell",
        TABLE1_CELL_TOL * 100.0,
        dev_a2 * 100.0,
        dev_c103 * 100.0,
    );
    assert!(verdict("table-1 event counts", pass, &detail), "{detail}");
}

const DELTAS: [usize; 4] = [1, 2, 3, 5];

struct Drawn {
    bundle: ModelBundle,
    cfg: TriggerConfig,
    delay: DelaySpec,
    x0: DVector<f64>,
    satisfied: bool,
}

fn draw_trigger(rng: &mut ChaCha8Rng) -> (f64, f64, usize, usize) {
    let a = 10f64.powf(rng.random_range(-0.3..1.7));
    let b = rng.random_range(0.01..=0.3);
    let delta = DELTAS[rng.random_range(0..DELTAS.len())];
    let gamma = rng.random_range(0..=3usize);
    (a, b, delta, gamma)
}

fn condition_bound(b: f64, delta: usize, gamma: usize, c: f64) -> f64 {
    (1.0 - b).powi((delta + gamma + 1) as i32) / c.powi(delta as i32)
}

/// Scalar instance whose contraction factor lands at a chosen point of the
/// admissible window (or beyond it for the mixed regime), solved for the
/// gain and re-validated through the public constructors.
fn draw_scalar(rng: &mut ChaCha8Rng, admissible_only: bool) -> Drawn {
    for _ in 0..10_000 {
        let (a, b, delta, gamma) = draw_trigger(rng);
        let a1 = rng.random_range(1.0..=1.1);
        let a2 = rng.random_range(0.0..=0.04);
        let b_in = rng.random_range(0.5..=2.0);
        let c = a1 + a2;
        let eta = condition_bound(b, delta, gamma, c);
        let lo = (c.powi(gamma as i32 + 1) - a1).max(0.0);
        let cap = if admissible_only {
            0.98 * eta
        } else {
            (2.0 * eta).max(lo + 1.0)
        };
        if cap - lo < 1e-6 {
            continue;
        }
        let rho_t = lo + (cap - lo) * rng.random_range(0.02..=1.0);
        if !admissible_only && (rho_t / eta - 1.0).abs() < 0.02 {
            continue;
        }
        let k_gain = (rho_t - c.powi(gamma as i32 + 1)) / b_in;
        let delay = DelaySpec::new(gamma);
        let Ok(bundle) = make_scalar(&ScalarParams { a1, a2, b_in, k_gain }, &delay) else {
            continue;
        };
        let cfg = TriggerConfig::new(a, b, delta).expect("trigger");
        let cond = check_stability_condition(
            bundle.certificate.rho(),
            bundle.certificate.c(),
            &cfg,
            &delay,
        );
        if admissible_only && !cond.satisfied {
            continue;
        }
        let sign = if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 };
        let x0 = DVector::from_element(1, sign * a * rng.random_range(1e-6..=0.999));
        return Drawn { bundle, cfg, delay, x0, satisfied: cond.satisfied };
    }
    panic!("no feasible scalar configuration found");
}

/// Two-state linear instance with an expanding free map; the impulse matrix
/// is placed exactly through K = B⁻¹(T − A^{Γ+1}) so its norm sits at a
/// chosen fraction of the admissible bound.
fn draw_linear(rng: &mut ChaCha8Rng, admissible_only: bool) -> Drawn {
    for _ in 0..10_000 {
        let (a, b, delta, gamma) = draw_trigger(rng);
        let target_c = rng.random_range(1.0..=1.6);
        let raw = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        let Ok(n_raw) = spectral_norm(&raw) else { continue };
        if n_raw < 1e-3 {
            continue;
        }
        let a_m = raw * (target_c / n_raw);
        let b_m: DMatrix<f64> = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-2.0..2.0));
        if (b_m[(0, 0)] * b_m[(1, 1)] - b_m[(0, 1)] * b_m[(1, 0)]).abs() < 0.25 {
            continue;
        }
        let eta = condition_bound(b, delta, gamma, target_c);
        let cap = if admissible_only { 0.95 * eta } else { 1.8 * eta };
        let rho_t = cap * rng.random_range(0.05..=1.0);
        if !admissible_only && (rho_t / eta - 1.0).abs() < 0.02 {
            continue;
        }
        let pulse_dir = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        let Ok(n_dir) = spectral_norm(&pulse_dir) else { continue };
        if n_dir < 1e-3 {
            continue;
        }
        let target = pulse_dir * (rho_t / n_dir);
        let Some(b_inv) = b_m.clone().try_inverse() else { continue };
        let k_m = b_inv * (target - matrix_power(&a_m, gamma + 1));
        let delay = DelaySpec::new(gamma);
        let Ok(bundle) = make_linear(&LinearParams { a: a_m, b: b_m, k: k_m }, &delay)
        else {
            continue;
        };
        let cfg = TriggerConfig::new(a, b, delta).expect("trigger");
        let cond = check_stability_condition(
            bundle.certificate.rho(),
            bundle.certificate.c(),
            &cfg,
            &delay,
        );
        if admissible_only && !cond.satisfied {
            continue;
        }
        let dir = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
        let norm = dir.norm();
        if norm < 1e-3 {
            continue;
        }
        let x0 = dir * (a * rng.random_range(1e-6..=0.999) / norm);
        return Drawn { bundle, cfg, delay, x0, satisfied: cond.satisfied };
    }
    panic!("no feasible linear configuration found");
}

fn draw(rng: &mut ChaCha8Rng, index: usize, admissible_only: bool) -> Drawn {
    if index % 2 == 0 {
        draw_scalar(rng, admissible_only)
    } else {
        draw_linear(rng, admissible_only)
    }
}

#[test]
fn trigger_guarantee_property_suite() {
    const TOTAL: usize = 1000;
    const HORIZON: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(0xE71C_0002);
    let mut gap_ok = 0usize;
    let mut post_ok = 0usize;
    let mut env_ok = 0usize;
    let mut gamma_seen = [false; 4];
    let mut delta_seen = [false; 4];
    let mut failures: Vec<String> = Vec::new();

    for i in 0..TOTAL {
        let d = draw(&mut rng, i, true);
        assert!(d.satisfied, "config {i} must satisfy the stability condition");
        gamma_seen[d.delay.gamma()] = true;
        delta_seen[DELTAS.iter().position(|&dl| dl == d.cfg.delta()).unwrap()] = true;

        let v = functional(&d.bundle);
        let rec = simulate(
            &d.bundle.system,
            &d.bundle.law,
            &v,
            &d.cfg,
            &d.delay,
            &d.x0,
            HORIZON,
        )
        .unwrap_or_else(|e| panic!("config {i} failed to simulate: {e}"));

        let gap = min_inter_event(&rec).is_none_or(|g| g >= d.delay.gamma() + 2);
        let (post, _) = verify_post_impulse_subthreshold(&rec, &d.cfg, &d.delay);
        let (env, _) = verify_envelope(&rec, &d.cfg, &d.delay, d.bundle.certificate.c());
        gap_ok += usize::from(gap);
        post_ok += usize::from(post);
        env_ok += usize::from(env);
        if !(gap && post && env) && failures.len() < 5 {
            failures.push(format!(
                "config {i}: gap={gap} post={post} env={env} (a={}, b={}, delta={}, gamma={})",
                d.cfg.a(),
                d.cfg.b(),
                d.cfg.delta(),
                d.delay.gamma()
            ));
        }
    }

    let coverage = gamma_seen.iter().all(|&s| s) && delta_seen.iter().all(|&s| s);
    let pass = gap_ok == TOTAL && post_ok == TOTAL && env_ok == TOTAL && coverage;
    let detail = format!(
        "{gap_ok}/{TOTAL} inter-event gaps ≥ Γ+2, {post_ok}/{TOTAL} post-impulse \
         subthreshold, {env_ok}/{TOTAL} decay envelopes hold over horizon {HORIZON}; \
         all Γ ∈ {{0,1,2,3}} and Δ ∈ {{1,2,3,5}} covered: {coverage}"
    );
    assert!(
        verdict("trigger guarantees", pass, &detail),
        "{detail}\n{}",
        failures.join("\n")
    );
}

#[test]
fn dual_simulator_equivalence() {
    const TOTAL: usize = 200;
    const HORIZON: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(0xE71C_0003);
    let mut admissible = 0usize;
    let mut inadmissible = 0usize;
    let mut diverged = 0usize;

    for i in 0..TOTAL {
        let d = draw(&mut rng, i, false);
        if d.satisfied {
            admissible += 1;
        } else {
            inadmissible += 1;
        }
        let v = functional(&d.bundle);
        let fast = simulate(
            &d.bundle.system,
            &d.bundle.law,
            &v,
            &d.cfg,
            &d.delay,
            &d.x0,
            HORIZON,
        );
        let slow = brute_force_events(
            &d.bundle.system,
            &d.bundle.law,
            &v,
            &d.cfg,
            &d.delay,
            &d.x0,
            HORIZON,
        );
        match (&fast, &slow) {
            (Ok(rec), Ok(events)) => {
                assert_eq!(rec.event_times, *events, "config {i}: event times differ");
            }
            (Err(e1), Err(e2)) => {
                diverged += 1;
                assert_eq!(
                    format!("{e1:?}"),
                    format!("{e2:?}"),
                    "config {i}: error outcomes differ"
                );
            }
            _ => panic!("config {i}: one simulator erred, the other did not"),
        }
    }

    let pass = admissible >= 30 && inadmissible >= 30;
    let detail = format!(
        "{TOTAL}/{TOTAL} configs agree between the candidate-tracking simulator and the \
         literal step-by-step oracle ({admissible} satisfying the condition, \
         {inadmissible} violating it, {diverged} diverging identically)"
    );
    assert!(verdict("dual-simulator agreement", pass, &detail), "{detail}");
}

#[test]
fn scalar_example_analytics() {
    let cfg = TriggerConfig::new(5.0, 0.07, 2).expect("trigger");
    let (lo, hi) = scalar_gain_interval(1.02, 0.01, 1.5, &cfg)
        .expect("interval computation")
        .expect("nonempty interval");

    let hi_ok = (hi - (-0.23715)).abs() <= GAIN_HI_TOL;
    let lo_ok = (lo - (-0.68)).abs() <= 1e-12;
    let inside = lo < -0.45 && -0.45 <= hi;

    let delay = DelaySpec::new(1);
    let bundle = make_scalar(&ex1_params(0.01, -0.45), &delay).expect("bundle");
    let v = functional(&bundle);
    let x0 = DVector::from_element(1, 0.1);
    let rec = simulate(&bundle.system, &bundle.law, &v, &cfg, &delay, &x0, 200)
        .expect("simulation");
    let oracle = brute_force_events(&bundle.system, &bundle.law, &v, &cfg, &delay, &x0, 200)
        .expect("oracle");
    let events_match = rec.event_times == oracle;
    let first_is_40 = rec.event_times.first() == Some(&40);

    let pass = hi_ok && lo_ok && inside && events_match && first_is_40;
    let detail = format!(
        "admissible gain interval ({lo:.6}, {hi:.6}]: upper end within {GAIN_HI_TOL:e} of \
         -0.23715, K = -0.45 inside; first event at k = {:?} (expected 40), full event \
         sequence matches the step-by-step oracle: {events_match}",
        rec.event_times.first()
    );
    assert!(verdict("scalar gain interval and first event", pass, &detail), "{detail}");
}

#[test]
fn linear_example_gain_design() {
    let (a_m, b_m) = ex2_matrices();
    let cfg = TriggerConfig::new(5.0, 0.05, 1).expect("trigger");
    let x0 = DVector::from_vec(vec![1.0, 1.0]);
    let mut designed_ok = true;
    let mut worst_rho = 0.0f64;

    for gamma in [0usize, 1, 2] {
        let delay = DelaySpec::new(gamma);
        let design = design_linear_gain(&a_m, &b_m, &delay, DESIGN_RHO_CEILING)
            .expect("gain design");
        worst_rho = worst_rho.max(design.achieved_rho);
        let bundle = make_linear(
            &LinearParams { a: a_m.clone(), b: b_m.clone(), k: design.gain.clone() },
            &delay,
        )
        .expect("bundle");
        let cond = check_stability_condition(
            bundle.certificate.rho(),
            bundle.certificate.c(),
            &cfg,
            &delay,
        );
        let v = functional(&bundle);
        let rec = simulate(&bundle.system, &bundle.law, &v, &cfg, &delay, &x0, 500)
            .expect("designed-gain run");
        let gap = min_inter_event(&rec).is_none_or(|g| g >= gamma + 2);
        let (post, _) = verify_post_impulse_subthreshold(&rec, &cfg, &delay);
        let (env, _) = verify_envelope(&rec, &cfg, &delay, bundle.certificate.c());
        designed_ok &= design.meets_target
            && design.achieved_rho <= DESIGN_RHO_CEILING
            && cond.satisfied
            && gap
            && post
            && env;
    }

    let delay0 = DelaySpec::new(0);
    let k_fixed = ex2_fixed_gain();
    let (c, rho) = linear_constants(&a_m, &b_m, &k_fixed, &delay0).expect("constants");
    let eta = condition_bound(0.05, 1, 0, c);
    let cond = check_stability_condition(rho, c, &cfg, &delay0);
    let fixed_numbers_ok = (rho - 1.2054).abs() <= FIXED_GAIN_RHO_TOL
        && (eta - 0.565).abs() <= FIXED_GAIN_BOUND_TOL
        && !cond.satisfied
        && cond.margin < 0.0;
    let bundle = make_linear(
        &LinearParams { a: a_m.clone(), b: b_m.clone(), k: k_fixed },
        &delay0,
    )
    .expect("fixed-gain bundle");
    let v = functional(&bundle);
    let fixed_run = simulate(&bundle.system, &bundle.law, &v, &cfg, &delay0, &x0, 500);
    let fixed_runs = fixed_run.is_ok();
    let fixed_events = fixed_run.as_ref().map(|r| r.event_times.len()).unwrap_or(0);

    let pass = designed_ok && fixed_numbers_ok && fixed_runs;
    let detail = format!(
        "designed gains reach ρ ≤ {DESIGN_RHO_CEILING:e} (worst {worst_rho:.2e}) and pass \
         gap/post-impulse/envelope checks for Γ ∈ {{0,1,2}}; supplied gain has ρ = {rho:.6} \
         vs admissible bound {eta:.6} (margin {:.4} < 0) within ±{FIXED_GAIN_RHO_TOL:e}, \
         and its exploratory run still completes with {fixed_events} events",
        cond.margin
    );
    assert!(verdict("linear gain design", pass, &detail), "{detail}");
}

#[test]
fn network_example_certificates() {
    let p = ex3_params();
    let (c, rho_min) =
        network_constants(&p.c_diag, &p.a, &p.b, &p.k, &p.l_diag).expect("constants");
    let c_expected = 2.0 * (0.91f64 * 0.91 + 0.15 * 0.15);
    let c_ok = rel(c, c_expected) <= COLLAPSE_REL_TOL;

    let boundary =
        bisect_schur_boundary(&p.c_diag, &p.a, &p.b, &p.k, &p.l_diag).expect("bisection");
    let boundary_ok = (boundary - rho_min).abs() <= SCHUR_BOUNDARY_TOL;

    let k_cancel = -DMatrix::from_diagonal(&p.c_diag);
    let (_, rho_collapse) =
        network_constants(&p.c_diag, &p.a, &p.b, &k_cancel, &p.l_diag).expect("collapse");
    let collapse_expected = 2.0 * 0.15f64 * 0.15;
    let collapse_ok = rel(rho_collapse, collapse_expected) <= COLLAPSE_REL_TOL;

    let delay = DelaySpec::new(0);
    let cfg = TriggerConfig::new(5.0, 0.05, 1).expect("trigger");
    let bundle = make_network(&p, &delay).expect("bundle");
    let v = functional(&bundle);
    let x0 = DVector::from_vec(vec![0.5, -0.4, 0.3, 0.2]);
    let rec = simulate(&bundle.system, &bundle.law, &v, &cfg, &delay, &x0, 800)
        .expect("reference run");
    let gap = min_inter_event(&rec).is_none_or(|g| g >= 2);
    let (post, _) = verify_post_impulse_subthreshold(&rec, &cfg, &delay);
    let (env, _) = verify_envelope(&rec, &cfg, &delay, bundle.certificate.c());
    let final_norm = rec.states.last().expect("states").norm();
    let run_ok = gap
        && post
        && env
        && rec.event_times.len() == 41
        && rec.event_times[..6] == [26, 49, 70, 90, 109, 129]
        && min_inter_event(&rec) == Some(18)
        && final_norm < 1e-6;

    let pass = c_ok && boundary_ok && collapse_ok && run_ok;
    let detail = format!(
        "closed-form ρ_min = {rho_min:.12} matches the Schur-feasibility bisection \
         boundary within {SCHUR_BOUNDARY_TOL:e}; cancelling gain collapses ρ_min to \
         2·|A|²·max lᵢ² = {collapse_expected} within {COLLAPSE_REL_TOL:e} relative; \
         reference run: {} events starting at {:?}, min gap {:?}, final state norm \
         {final_norm:.3e}, all three trigger guarantees hold",
        rec.event_times.len(),
        &rec.event_times[..3],
        min_inter_event(&rec)
    );
    assert!(verdict("network certificates", pass, &detail), "{detail}");
}

#[test]
fn numeric_kernel_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE71C_0007);

    let mut spectral_worst = 0.0f64;
    for _ in 0..100 {
        let m = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-10.0..10.0));
        let frob_sq = m.iter().map(|e| e * e).sum::<f64>();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = (frob_sq * frob_sq - 4.0 * det * det).max(0.0);
        let closed_form = ((frob_sq + disc.sqrt()) / 2.0).sqrt();
        let got = spectral_norm(&m).expect("spectral norm");
        spectral_worst = spectral_worst.max(rel(got, closed_form));
    }
    let spectral_ok = spectral_worst <= SPECTRAL_REL_TOL;

    let mut threshold_worst = 0.0f64;
    let mut threshold_checked = 0usize;
    for &a in &[0.5, 5.0, 24.0] {
        for &b in &[0.01, 0.07, 0.3, 0.9] {
            let cfg = TriggerConfig::new(a, b, 1).expect("trigger");
            for k in (0..=2000).step_by(37) {
                let direct = threshold(&cfg, k);
                if !direct.is_normal() {
                    continue;
                }
                threshold_checked += 1;
                threshold_worst = threshold_worst.max(rel(ln_threshold(&cfg, k).exp(), direct));
            }
        }
    }
    let threshold_ok = threshold_worst <= THRESHOLD_REL_TOL && threshold_checked > 100;

    let mut crossing_worst = 0.0f64;
    let check_crossing = |v0: f64, a: f64, b: f64, c: f64| {
        let cfg = TriggerConfig::new(a, b, 1).expect("trigger");
        let t = crossing_time(v0, &cfg, c).expect("crossing time");
        let grown = v0 * c.powf(t);
        let decayed = a * (1.0 - b).powf(t);
        rel(grown, decayed)
    };
    for _ in 0..50 {
        let a = rng.random_range(0.5..=30.0);
        let b = rng.random_range(0.01..=0.5);
        let c = rng.random_range(1.05..=3.0);
        let v0 = a * rng.random_range(1e-4..=1.0);
        crossing_worst = crossing_worst.max(check_crossing(v0, a, b, c));
    }
    crossing_worst = crossing_worst.max(check_crossing(0.1, 5.0, 0.07, 1.03));
    let anchor_cfg = TriggerConfig::new(5.0, 0.07, 2).expect("trigger");
    let anchor = crossing_time(0.1, &anchor_cfg, 1.03).expect("anchor");
    let anchor_ok = rel(anchor, 38.304536828488722) <= 1e-12;
    let exact_zero = crossing_time(5.0, &anchor_cfg, 1.03).expect("boundary") == 0.0;
    let crossing_ok = crossing_worst <= CROSSING_REL_TOL && anchor_ok && exact_zero;

    let pass = spectral_ok && threshold_ok && crossing_ok;
    let detail = format!(
        "spectral norm vs 2x2 closed form: worst rel {spectral_worst:.2e} \
         (tol {SPECTRAL_REL_TOL:e}); direct vs log-domain threshold on {threshold_checked} \
         representable points: worst rel {threshold_worst:.2e} (tol {THRESHOLD_REL_TOL:e}); \
         threshold-crossing time satisfies its defining equation: worst rel \
         {crossing_worst:.2e} (tol {CROSSING_REL_TOL:e}), boundary case V(0) = a maps to \
         t = 0 exactly"
    );
    assert!(verdict("numeric kernels", pass, &detail), "{detail}");
}
