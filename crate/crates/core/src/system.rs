//! Controlled and free dynamics wrappers. Construction spot-checks the
//! invariants later stages rely on: the origin is an equilibrium of the
//! controlled map, and the free map agrees with the controlled map under
//! zero input.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::sample::BallSampler;

pub type StateMap = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type ControlMap = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync>;

const EQUILIBRIUM_TOL: f64 = 1e-12;
const AGREEMENT_REL_TOL: f64 = 1e-9;
const AGREEMENT_SAMPLES: usize = 16;

/// Discrete-time plant with state dimension `n` and input dimension `m`.
/// `f` advances one step under an input; `g` advances one step with the
/// actuator idle.
#[derive(Clone)]
pub struct DiscreteSystem {
    n: usize,
    m: usize,
    f: ControlMap,
    g: StateMap,
}

impl fmt::Debug for DiscreteSystem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("DiscreteSystem")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl DiscreteSystem {
    pub fn new(n: usize, m: usize, f: ControlMap, g: StateMap) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("state dimension must be positive".into()));
        }
        let zero_x = DVector::zeros(n);
        let zero_u = DVector::zeros(m);
        let at_origin = f(&zero_x, &zero_u);
        if at_origin.len() != n {
            return Err(Error::Config(format!(
                "controlled map returns dimension {}, expected {n}",
                at_origin.len()
            )));
        }
        if at_origin.norm() > EQUILIBRIUM_TOL {
            return Err(Error::Config(format!(
                "the origin must be an equilibrium of the controlled map; |f(0,0)| = {:.3e}",
                at_origin.norm()
            )));
        }
        let sampler = BallSampler::new(n, 1.0, 0xD15C_7E5Bu64)?;
        for i in 0..AGREEMENT_SAMPLES {
            let x = sampler.get(i);
            let via_f = f(&x, &zero_u);
            let via_g = g(&x);
            if via_g.len() != n {
                return Err(Error::Config(format!(
                    "free map returns dimension {}, expected {n}",
                    via_g.len()
                )));
            }
            let scale = via_f.norm().max(via_g.norm()).max(1.0);
            if (&via_f - &via_g).norm() > AGREEMENT_REL_TOL * scale {
                return Err(Error::Config(
                    "free map must coincide with the controlled map under zero input".into(),
                ));
            }
        }
        Ok(Self { n, m, f, g })
    }

    /// Builds the free map by closing the controlled map over a zero input.
    pub fn from_controlled(n: usize, m: usize, f: ControlMap) -> Result<Self> {
        let g_f = Arc::clone(&f);
        let g: StateMap = Arc::new(move |x| g_f(x, &DVector::zeros(m)));
        Self::new(n, m, f, g)
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn step_controlled(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        (self.f)(x, u)
    }

    pub fn step_free(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.g)(x)
    }
}

/// State-feedback law u = k(x). Vanishes at the origin so the closed loop
/// keeps the equilibrium.
#[derive(Clone)]
pub struct FeedbackLaw {
    n: usize,
    m: usize,
    k: ControlMapFromState,
}

pub type ControlMapFromState = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

impl fmt::Debug for FeedbackLaw {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("FeedbackLaw")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl FeedbackLaw {
    pub fn new(n: usize, m: usize, k: ControlMapFromState) -> Result<Self> {
        let at_origin = k(&DVector::zeros(n));
        if at_origin.len() != m {
            return Err(Error::Config(format!(
                "feedback law returns dimension {}, expected {m}",
                at_origin.len()
            )));
        }
        if at_origin.norm() > EQUILIBRIUM_TOL {
            return Err(Error::Config(format!(
                "feedback law must vanish at the origin; |k(0)| = {:.3e}",
                at_origin.norm()
            )));
        }
        Ok(Self { n, m, k })
    }

    /// u = K x for a fixed gain matrix.
    pub fn linear(gain: nalgebra::DMatrix<f64>) -> Result<Self> {
        let (m, n) = (gain.nrows(), gain.ncols());
        let k: ControlMapFromState = Arc::new(move |x| &gain * x);
        Self::new(n, m, k)
    }

    /// The identically-zero input, for open-loop baselines.
    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            k: Arc::new(move |_| DVector::zeros(m)),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.k)(x)
    }
}
