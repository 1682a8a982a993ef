//! Ready-made benchmark systems: a positive scalar family, a linear
//! family, and a diagonal Lipschitz network family, each bundled with the
//! analytic Lyapunov certificate its structure provides. A small name
//! registry exposes reference instances with their customary trigger
//! parameters.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::analysis::{design_linear_gain, linear_constants, network_constants};
use crate::cert::{ClassK, LyapunovCertificate};
use crate::error::{Error, Result};
use crate::system::{DiscreteSystem, FeedbackLaw};
use crate::trigger::DelaySpec;

const POSITIVITY_MARGIN: f64 = 1e-12;
const LIPSCHITZ_PAIRS: usize = 24;

/// System, feedback law, and certificate assembled for one model instance.
#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub system: DiscreteSystem,
    pub law: FeedbackLaw,
    pub certificate: LyapunovCertificate,
}

/// Positive scalar family x(k+1) = A1·x + A2·tanh(x) + B·u.
#[derive(Debug, Clone, Copy)]
pub struct ScalarParams {
    pub a1: f64,
    pub a2: f64,
    pub b_in: f64,
    pub k_gain: f64,
}

/// Linear family x(k+1) = A·x + B·u.
#[derive(Debug, Clone)]
pub struct LinearParams {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

/// Diagonal Lipschitz network x(k+1) = C·x + A·act(x) + B·u with the
/// activation applied coordinate-wise.
#[derive(Debug, Clone)]
pub struct NetworkParams {
    pub c_diag: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub l_diag: DVector<f64>,
}

/// Scalar bundle with V = |x|, c = A1+A2, ρ = c^{Γ+1} + B·K. The closed
/// loop must preserve positivity: both A1 + B·K and A1^{Γ+1} + B·K stay
/// positive, the latter accounting for the free drift before a delayed
/// impulse lands.
pub fn make_scalar(params: &ScalarParams, delay: &DelaySpec) -> Result<ModelBundle> {
    let ScalarParams {
        a1,
        a2,
        b_in,
        k_gain,
    } = *params;
    if !a1.is_finite() || a1 <= 0.0 {
        return Err(Error::Config(format!(
            "scalar drift coefficient A1 must be positive, got {a1}"
        )));
    }
    if !a2.is_finite() || a2 < 0.0 {
        return Err(Error::Config(format!(
            "scalar saturation coefficient A2 must be nonnegative, got {a2}"
        )));
    }
    if !b_in.is_finite() || b_in == 0.0 {
        return Err(Error::Config(format!(
            "scalar input coefficient B must be nonzero, got {b_in}"
        )));
    }
    let gamma = delay.gamma();
    let bk = b_in * k_gain;
    if a1 + bk <= POSITIVITY_MARGIN || a1.powi(gamma as i32 + 1) + bk <= POSITIVITY_MARGIN {
        return Err(Error::Config(format!(
            "gain destroys positivity of the closed loop: admissible gains must satisfy \
             K > {} (and A1^(gamma+1) + B*K > 0), got K = {k_gain}",
            -a1 / b_in
        )));
    }
    let system = DiscreteSystem::from_controlled(
        1,
        1,
        Arc::new(move |x, u| DVector::from_vec(vec![a1 * x[0] + a2 * x[0].tanh() + b_in * u[0]])),
    )?;
    let law = FeedbackLaw::linear(DMatrix::from_element(1, 1, k_gain))?;
    let c = a1 + a2;
    let rho = c.powi(gamma as i32 + 1) + bk;
    let certificate = LyapunovCertificate::new(
        1,
        Arc::new(|x: &DVector<f64>| x[0].abs()),
        ClassK::identity(),
        ClassK::identity(),
        c,
        rho,
    )?;
    Ok(ModelBundle {
        system,
        law,
        certificate,
    })
}

/// Linear bundle with V = |x| (Euclidean norm), c = |A|,
/// ρ = |A^{Γ+1} + BK|.
pub fn make_linear(params: &LinearParams, delay: &DelaySpec) -> Result<ModelBundle> {
    let (c, rho) = linear_constants(&params.a, &params.b, &params.k, delay)?;
    let (a, b) = (params.a.clone(), params.b.clone());
    let system = DiscreteSystem::from_controlled(
        a.nrows(),
        b.ncols(),
        Arc::new(move |x, u| &a * x + &b * u),
    )?;
    let law = FeedbackLaw::linear(params.k.clone())?;
    let certificate = LyapunovCertificate::new(
        params.a.nrows(),
        Arc::new(|x: &DVector<f64>| x.norm()),
        ClassK::identity(),
        ClassK::identity(),
        c,
        rho,
    )?;
    Ok(ModelBundle {
        system,
        law,
        certificate,
    })
}

/// Network bundle with the default tanh activation (Lipschitz constant 1
/// per coordinate).
pub fn make_network(params: &NetworkParams, delay: &DelaySpec) -> Result<ModelBundle> {
    make_network_with(params, delay, Arc::new(f64::tanh))
}

/// Network bundle with a custom coordinate-wise activation. V = xᵀx with
/// square class-K bounds, constants from the network certificate algebra.
/// The contraction constant is derived for impulses landing immediately,
/// so a positive actuation delay has no certificate here.
pub fn make_network_with(
    params: &NetworkParams,
    delay: &DelaySpec,
    activation: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
) -> Result<ModelBundle> {
    if delay.gamma() != 0 {
        return Err(Error::Certificate(format!(
            "the network certificate requires zero actuation delay; got gamma = {}",
            delay.gamma()
        )));
    }
    let at_zero = activation(0.0);
    if at_zero.abs() > POSITIVITY_MARGIN {
        return Err(Error::Config(format!(
            "activation must vanish at zero; act(0) = {at_zero}"
        )));
    }
    check_lipschitz(&activation, &params.l_diag)?;
    let (c, rho_min) = network_constants(
        &params.c_diag,
        &params.a,
        &params.b,
        &params.k,
        &params.l_diag,
    )?;
    let n = params.c_diag.len();
    let (c_diag, a, b) = (params.c_diag.clone(), params.a.clone(), params.b.clone());
    let act = Arc::clone(&activation);
    let system = DiscreteSystem::from_controlled(
        n,
        params.b.ncols(),
        Arc::new(move |x, u| {
            let fx = x.map(|z| act(z));
            c_diag.component_mul(x) + &a * fx + &b * u
        }),
    )?;
    let law = FeedbackLaw::linear(params.k.clone())?;
    let certificate = LyapunovCertificate::new(
        n,
        Arc::new(|x: &DVector<f64>| x.dot(x)),
        ClassK::square(),
        ClassK::square(),
        c,
        rho_min,
    )?;
    Ok(ModelBundle {
        system,
        law,
        certificate,
    })
}

fn check_lipschitz(
    activation: &Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    l_diag: &DVector<f64>,
) -> Result<()> {
    let l_min = l_diag.iter().cloned().fold(f64::INFINITY, f64::min);
    for p in 0..LIPSCHITZ_PAIRS {
        let y = -3.0 + 6.0 * (p as f64 / (LIPSCHITZ_PAIRS - 1) as f64);
        let z = 3.0 - 5.0 * (p as f64 / (LIPSCHITZ_PAIRS - 1) as f64).powi(2);
        let lhs = (activation(y) - activation(z)).abs();
        let bound = l_min * (y - z).abs();
        if lhs > bound * (1.0 + 1e-9) + 1e-15 {
            return Err(Error::Config(format!(
                "activation violates the Lipschitz bound {l_min} on the probe pair \
                 ({y:.3}, {z:.3}): |act(y) - act(z)| = {lhs:.6e}"
            )));
        }
    }
    Ok(())
}

/// A fully specified instance of one of the three families. Keeping the
/// raw coefficients alongside the bundle lets reporting code recover
/// family-specific quantities (gain intervals, Schur boundaries) that the
/// type-erased bundle no longer exposes.
#[derive(Debug, Clone)]
pub enum ModelInstance {
    Scalar(ScalarParams),
    Linear(LinearParams),
    Network(NetworkParams),
}

impl ModelInstance {
    pub fn family(&self) -> &'static str {
        match self {
            ModelInstance::Scalar(_) => "scalar",
            ModelInstance::Linear(_) => "linear",
            ModelInstance::Network(_) => "network",
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            ModelInstance::Scalar(_) => 1,
            ModelInstance::Linear(p) => p.a.nrows(),
            ModelInstance::Network(p) => p.c_diag.len(),
        }
    }

    pub fn build(&self, delay: &DelaySpec) -> Result<ModelBundle> {
        match self {
            ModelInstance::Scalar(p) => make_scalar(p, delay),
            ModelInstance::Linear(p) => make_linear(p, delay),
            ModelInstance::Network(p) => make_network(p, delay),
        }
    }

    /// Applies a gain knob: the value replaces a scalar gain and scales a
    /// matrix gain, so sweeping it is meaningful for every family.
    pub fn with_gain(&self, k_gain: f64) -> ModelInstance {
        match self {
            ModelInstance::Scalar(p) => ModelInstance::Scalar(ScalarParams { k_gain, ..*p }),
            ModelInstance::Linear(p) => ModelInstance::Linear(LinearParams {
                k: k_gain * p.k.clone(),
                ..p.clone()
            }),
            ModelInstance::Network(p) => ModelInstance::Network(NetworkParams {
                k: k_gain * p.k.clone(),
                ..p.clone()
            }),
        }
    }

    /// The natural value of the gain knob before any override.
    pub fn gain_knob(&self) -> f64 {
        match self {
            ModelInstance::Scalar(p) => p.k_gain,
            _ => 1.0,
        }
    }
}

/// Trigger, delay, initial state, and horizon customarily used with a
/// named reference instance.
#[derive(Debug, Clone)]
pub struct ModelDefaults {
    pub a: f64,
    pub b: f64,
    pub delta: usize,
    pub gamma: usize,
    pub x0: Vec<f64>,
    pub horizon: usize,
}

pub const MODEL_NAMES: [&str; 5] = [
    "ex1-c103",
    "ex1-a2of0.1",
    "ex2-fixed",
    "ex2-designed",
    "ex3-reference",
];

fn unknown_model(name: &str) -> Error {
    Error::Config(format!(
        "unknown model '{name}'; available: {}",
        MODEL_NAMES.join(", ")
    ))
}

/// Customary parameters for a named instance.
pub fn defaults(name: &str) -> Result<ModelDefaults> {
    match name {
        "ex1-c103" | "ex1-a2of0.1" => Ok(ModelDefaults {
            a: 5.0,
            b: 0.07,
            delta: 2,
            gamma: 1,
            x0: vec![0.1],
            horizon: 3000,
        }),
        "ex2-fixed" | "ex2-designed" => Ok(ModelDefaults {
            a: 5.0,
            b: 0.05,
            delta: 1,
            gamma: 0,
            x0: vec![1.0, 1.0],
            horizon: 500,
        }),
        "ex3-reference" => Ok(ModelDefaults {
            a: 5.0,
            b: 0.05,
            delta: 1,
            gamma: 0,
            x0: vec![0.5, -0.4, 0.3, 0.2],
            horizon: 800,
        }),
        other => Err(unknown_model(other)),
    }
}

/// The scalar benchmark coefficients shared by both ex1 variants.
pub fn ex1_params(a2: f64, k_gain: f64) -> ScalarParams {
    ScalarParams {
        a1: 1.02,
        a2,
        b_in: 1.5,
        k_gain,
    }
}

/// The 2-state benchmark matrices shared by both ex2 variants.
pub fn ex2_matrices() -> (DMatrix<f64>, DMatrix<f64>) {
    (
        DMatrix::from_row_slice(2, 2, &[0.1, 1.2, 0.007, 1.05]),
        DMatrix::from_row_slice(2, 2, &[300.0, 200.0, 0.5, 0.001]),
    )
}

/// The fixed gain customarily paired with the ex2 matrices. Note that it
/// does not satisfy the sufficient stability condition (its ρ exceeds the
/// admissible bound); it is kept for qualitative comparison runs.
pub fn ex2_fixed_gain() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 0.0, 3.0])
}

/// The frozen 4-neuron reference network.
pub fn ex3_params() -> NetworkParams {
    let c_diag = DVector::from_vec(vec![0.9, 0.89, 0.91, 0.9]);
    let h = DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 1.0, 1.0, 1.0, //
            1.0, -1.0, 1.0, -1.0, //
            1.0, 1.0, -1.0, -1.0, //
            1.0, -1.0, -1.0, 1.0,
        ],
    );
    let e = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.10, 0.05, 0.0, 0.0, //
            0.0, 0.08, 0.0, 0.0, //
            0.0, 0.0, 0.06, 0.02, //
            0.0, 0.0, 0.0, 0.04,
        ],
    );
    let k = e - DMatrix::from_diagonal(&c_diag);
    NetworkParams {
        c_diag,
        a: 0.075 * h,
        b: DMatrix::identity(4, 4),
        k,
        l_diag: DVector::from_vec(vec![1.0; 4]),
    }
}

/// Coefficients behind a registry name. The ex2-designed gain is
/// recomputed for the requested Γ so its ρ stays at the least-squares
/// optimum; `k_gain` applies the gain knob (see [`ModelInstance::with_gain`]).
pub fn named_instance(
    name: &str,
    delay: &DelaySpec,
    k_gain: Option<f64>,
) -> Result<ModelInstance> {
    let base = match name {
        "ex1-c103" => ModelInstance::Scalar(ex1_params(0.01, -0.45)),
        "ex1-a2of0.1" => ModelInstance::Scalar(ex1_params(0.10, -0.45)),
        "ex2-fixed" => {
            let (a, b) = ex2_matrices();
            ModelInstance::Linear(LinearParams {
                a,
                b,
                k: ex2_fixed_gain(),
            })
        }
        "ex2-designed" => {
            let (a, b) = ex2_matrices();
            let design = design_linear_gain(&a, &b, delay, 1e-10)?;
            ModelInstance::Linear(LinearParams {
                a,
                b,
                k: design.gain,
            })
        }
        "ex3-reference" => ModelInstance::Network(ex3_params()),
        other => return Err(unknown_model(other)),
    };
    Ok(match k_gain {
        Some(kg) => base.with_gain(kg),
        None => base,
    })
}

/// Builds a named instance under the given delay.
pub fn build(name: &str, delay: &DelaySpec) -> Result<ModelBundle> {
    named_instance(name, delay, None)?.build(delay)
}
