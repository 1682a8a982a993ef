//! Certificate construction and verification: sampled estimation of the
//! growth/contraction constants for black-box systems, closed-form
//! constants and gain design for scalar and linear families, and the
//! diagonal-network certificate algebra with its Schur-complement test.

use nalgebra::{DMatrix, DVector};

use crate::cert::StateFunctional;
use crate::error::{Error, Result};
pub use crate::linalg::spectral_norm;
use crate::linalg::{matrix_power, max_eigenvalue_sym, min_eigenvalue_sym};
use crate::sample::BallSampler;
use crate::system::{DiscreteSystem, FeedbackLaw};
use crate::trigger::{DelaySpec, TriggerConfig};

/// Minimum eigenvalue at or above this counts as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

const BISECT_TOL: f64 = 1e-9;

/// Sampled upper-bound estimates of the free-step growth constant and the
/// impulse contraction constant on a ball, with the states achieving them.
#[derive(Debug, Clone)]
pub struct CertificateEstimate {
    pub c_hat: f64,
    pub rho_hat: f64,
    pub sample_count: usize,
    pub region_radius: f64,
    pub worst_c_witness: DVector<f64>,
    pub worst_rho_witness: DVector<f64>,
}

fn check_estimate_inputs(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    sample_count: usize,
) -> Result<()> {
    if sample_count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
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

/// Ratios V(g(x))/V(x) and V(f(g^Γ(x), 𝐤(x)))/V(x) at one sample point.
/// The delayed-impulse ratio composes the free map Γ times literally.
fn ratios_at(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    v: &StateFunctional,
    gamma: usize,
    sampler: &BallSampler,
    i: usize,
) -> Result<(f64, f64)> {
    let x = sampler.get(i);
    let vx = v(&x);
    if !vx.is_finite() || vx <= 0.0 {
        return Err(Error::Certificate(format!(
            "V must be positive on the sampling region; V = {vx} at |x| = {:.3e}",
            x.norm()
        )));
    }
    let v_free = v(&sys.step_free(&x));
    let mut drifted = x.clone();
    for _ in 0..gamma {
        drifted = sys.step_free(&drifted);
    }
    let v_pulse = v(&sys.step_controlled(&drifted, &law.eval(&x)));
    if !v_free.is_finite() || !v_pulse.is_finite() {
        return Err(Error::Numeric(format!(
            "V left the representable range at sample {i} (free {v_free}, impulse {v_pulse})"
        )));
    }
    Ok((v_free / vx, v_pulse / vx))
}

fn finish_estimate(
    rows: Vec<(f64, f64)>,
    sampler: &BallSampler,
    region_radius: f64,
) -> CertificateEstimate {
    let mut best_c = (f64::NEG_INFINITY, 0usize);
    let mut best_rho = (f64::NEG_INFINITY, 0usize);
    for (i, &(rc, rr)) in rows.iter().enumerate() {
        if rc > best_c.0 {
            best_c = (rc, i);
        }
        if rr > best_rho.0 {
            best_rho = (rr, i);
        }
    }
    CertificateEstimate {
        c_hat: best_c.0,
        rho_hat: best_rho.0,
        sample_count: rows.len(),
        region_radius,
        worst_c_witness: sampler.get(best_c.1),
        worst_rho_witness: sampler.get(best_rho.1),
    }
}

/// Estimates the certificate constants by seeded low-discrepancy sampling;
/// data-parallel when the `parallel` feature is on. Results are identical
/// to [`estimate_constants_seq`] bit for bit: ratios are collected in
/// sample order and reduced by one sequential scan either way.
pub fn estimate_constants(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    v: &StateFunctional,
    delay: &DelaySpec,
    region_radius: f64,
    sample_count: usize,
    seed: u64,
) -> Result<CertificateEstimate> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        check_estimate_inputs(sys, law, sample_count)?;
        let sampler = BallSampler::new(sys.state_dim(), region_radius, seed)?;
        let rows = (0..sample_count)
            .into_par_iter()
            .map(|i| ratios_at(sys, law, v, delay.gamma(), &sampler, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(finish_estimate(rows, &sampler, region_radius))
    }
    #[cfg(not(feature = "parallel"))]
    {
        estimate_constants_seq(sys, law, v, delay, region_radius, sample_count, seed)
    }
}

/// Single-threaded reference path for [`estimate_constants`].
pub fn estimate_constants_seq(
    sys: &DiscreteSystem,
    law: &FeedbackLaw,
    v: &StateFunctional,
    delay: &DelaySpec,
    region_radius: f64,
    sample_count: usize,
    seed: u64,
) -> Result<CertificateEstimate> {
    check_estimate_inputs(sys, law, sample_count)?;
    let sampler = BallSampler::new(sys.state_dim(), region_radius, seed)?;
    let rows = (0..sample_count)
        .map(|i| ratios_at(sys, law, v, delay.gamma(), &sampler, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_estimate(rows, &sampler, region_radius))
}

/// Admissible scalar gains (K_lo, K_hi] for the positive scalar family:
/// K_lo = -A1/B keeps the closed loop positive, K_hi makes the stability
/// condition hold with c = A1+A2 and ρ = c² + BK under Γ = 1. Returns
/// `None` when the interval is empty.
pub fn scalar_gain_interval(
    a1: f64,
    a2: f64,
    b_in: f64,
    cfg: &TriggerConfig,
) -> Result<Option<(f64, f64)>> {
    if !b_in.is_finite() || b_in <= 0.0 {
        return Err(Error::Config(format!(
            "input coefficient B must be positive, got {b_in}"
        )));
    }
    let c = a1 + a2;
    if !c.is_finite() || c < 1.0 {
        return Err(Error::Config(format!(
            "scalar gain design assumes A1 + A2 >= 1, got {c}"
        )));
    }
    let k_lo = -a1 / b_in;
    let k_hi = ((1.0 - cfg.b()).powi(cfg.delta() as i32 + 2) / c.powi(cfg.delta() as i32)
        - c * c)
        / b_in;
    if k_hi <= k_lo {
        return Ok(None);
    }
    Ok(Some((k_lo, k_hi)))
}

/// Growth and contraction constants for the linear family: c = |A|,
/// ρ = |A^{Γ+1} + BK| in the spectral norm.
pub fn linear_constants(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<f64>,
    delay: &DelaySpec,
) -> Result<(f64, f64)> {
    check_linear_dims(a, b, k)?;
    let c = spectral_norm(a)?;
    let pulse = matrix_power(a, delay.gamma() + 1) + b * k;
    let rho = spectral_norm(&pulse)?;
    Ok((c, rho))
}

fn check_linear_dims(a: &DMatrix<f64>, b: &DMatrix<f64>, k: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Config(format!(
            "state matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.nrows() != n || k.ncols() != n || k.nrows() != b.ncols() {
        return Err(Error::Config(format!(
            "incompatible shapes: A is {n}x{n}, B is {}x{}, K is {}x{}",
            b.nrows(),
            b.ncols(),
            k.nrows(),
            k.ncols()
        )));
    }
    Ok(())
}

/// Least-squares impulse gain K = -B⁺ A^{Γ+1} with the norm it achieves.
#[derive(Debug, Clone)]
pub struct GainDesign {
    pub gain: DMatrix<f64>,
    pub achieved_rho: f64,
    pub meets_target: bool,
}

/// Designs a gain minimizing |A^{Γ+1} + BK|. Exact cancellation
/// (achieved ρ = 0 up to rounding) whenever B is square and invertible;
/// otherwise the least-squares best effort is returned and `meets_target`
/// reports whether it reaches `target_rho`.
pub fn design_linear_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    delay: &DelaySpec,
    target_rho: f64,
) -> Result<GainDesign> {
    if !target_rho.is_finite() || target_rho < 0.0 {
        return Err(Error::Config(format!(
            "target rho must be nonnegative, got {target_rho}"
        )));
    }
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::Config(format!(
            "incompatible shapes: A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let pinv = b
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|msg| Error::Numeric(format!("pseudo-inverse failed: {msg}")))?;
    let drift = matrix_power(a, delay.gamma() + 1);
    let gain = -(&pinv * &drift);
    let achieved_rho = spectral_norm(&(&drift + b * &gain))?;
    Ok(GainDesign {
        gain,
        achieved_rho,
        meets_target: achieved_rho <= target_rho,
    })
}

fn check_network_inputs(
    c_diag: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<f64>,
    l_diag: &DVector<f64>,
) -> Result<()> {
    let n = c_diag.len();
    for (i, &ci) in c_diag.iter().enumerate() {
        if !ci.is_finite() || ci == 0.0 || ci.abs() >= 1.0 {
            return Err(Error::Config(format!(
                "diagonal state coefficients must satisfy 0 < |c_i| < 1; c_{i} = {ci}"
            )));
        }
    }
    for (i, &li) in l_diag.iter().enumerate() {
        if !li.is_finite() || li <= 0.0 {
            return Err(Error::Config(format!(
                "Lipschitz constants must be positive; l_{i} = {li}"
            )));
        }
    }
    if l_diag.len() != n || a.nrows() != n || a.ncols() != n || b.nrows() != n
        || k.ncols() != n || k.nrows() != b.ncols()
    {
        return Err(Error::Config(format!(
            "incompatible network shapes: n = {n}, A is {}x{}, B is {}x{}, K is {}x{}, \
             L has {} entries",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            k.nrows(),
            k.ncols(),
            l_diag.len()
        )));
    }
    Ok(())
}

/// Certificate constants for the diagonal Lipschitz network under
/// V = xᵀx: c = 2(max c_i² + |A|²·max l_i²) and the smallest contraction
/// factor ρ_min = 2·λ_max((C+BK)ᵀ(C+BK) + |A|²L²).
pub fn network_constants(
    c_diag: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<f64>,
    l_diag: &DVector<f64>,
) -> Result<(f64, f64)> {
    check_network_inputs(c_diag, a, b, k, l_diag)?;
    let a_norm = spectral_norm(a)?;
    let max_c2 = c_diag.iter().map(|ci| ci * ci).fold(0.0, f64::max);
    let max_l2 = l_diag.iter().map(|li| li * li).fold(0.0, f64::max);
    let c = 2.0 * (max_c2 + a_norm * a_norm * max_l2);

    let e = DMatrix::from_diagonal(c_diag) + b * k;
    let mut m = e.transpose() * &e;
    for i in 0..l_diag.len() {
        m[(i, i)] += a_norm * a_norm * l_diag[i] * l_diag[i];
    }
    let rho_min = 2.0 * max_eigenvalue_sym(&m)?;
    Ok((c, rho_min))
}

/// Feasibility of the Schur-complement block
/// [[I, C+BK], [(C+BK)ᵀ, ρ/2·I − |A|²L²]] ⪰ 0, which certifies ρ as a
/// valid contraction factor for the network family.
pub fn schur_feasible(
    c_diag: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<f64>,
    l_diag: &DVector<f64>,
    rho: f64,
) -> Result<bool> {
    check_network_inputs(c_diag, a, b, k, l_diag)?;
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Config(format!(
            "contraction factor rho must be nonnegative, got {rho}"
        )));
    }
    let n = c_diag.len();
    let a_norm = spectral_norm(a)?;
    let e = DMatrix::from_diagonal(c_diag) + b * k;
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        block[(i, i)] = 1.0;
        block[(n + i, n + i)] = 0.5 * rho - a_norm * a_norm * l_diag[i] * l_diag[i];
    }
    for r in 0..n {
        for c in 0..n {
            block[(r, n + c)] = e[(r, c)];
            block[(n + c, r)] = e[(r, c)];
        }
    }
    Ok(min_eigenvalue_sym(&block)? >= PSD_TOL)
}

/// Locates the smallest feasible ρ for [`schur_feasible`] by bisection;
/// agrees with the closed-form ρ_min from [`network_constants`] to within
/// the bisection tolerance.
pub fn bisect_schur_boundary(
    c_diag: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<f64>,
    l_diag: &DVector<f64>,
) -> Result<f64> {
    let (_, rho_min) = network_constants(c_diag, a, b, k, l_diag)?;
    let mut hi = (4.0 * rho_min).max(1e-6);
    while !schur_feasible(c_diag, a, b, k, l_diag, hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numeric(
                "no feasible contraction factor found below 1e12".into(),
            ));
        }
    }
    let mut lo = 0.0;
    if schur_feasible(c_diag, a, b, k, l_diag, lo)? {
        return Ok(0.0);
    }
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if schur_feasible(c_diag, a, b, k, l_diag, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
