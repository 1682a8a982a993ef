//! Lyapunov certificates: a candidate function V together with class-K
//! bounds and the growth/contraction constants the stability condition
//! consumes. Construction runs sampled sanity checks so that downstream
//! arithmetic never operates on a certificate that is visibly wrong.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::sample::BallSampler;

pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type StateFunctional = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

const CLASS_K_POINTS: usize = 20;
const CLASS_K_LO: f64 = 1e-6;
const CLASS_K_HI: f64 = 1e3;
const ROUNDTRIP_REL_TOL: f64 = 1e-6;
const ORIGIN_TOL: f64 = 1e-12;
const SANDWICH_REL_TOL: f64 = 1e-9;
const SANDWICH_SAMPLES: usize = 32;

/// Strictly increasing function with f(0) = 0, stored with its inverse.
/// Validated on log-spaced probe points instead of symbolically.
#[derive(Clone)]
pub struct ClassK {
    name: String,
    fwd: ScalarMap,
    inv: ScalarMap,
}

impl fmt::Debug for ClassK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassK").field("name", &self.name).finish()
    }
}

impl ClassK {
    pub fn new(name: impl Into<String>, fwd: ScalarMap, inv: ScalarMap) -> Result<Self> {
        let name = name.into();
        let at_zero = fwd(0.0);
        if !(at_zero.abs() <= ORIGIN_TOL) {
            return Err(Error::Certificate(format!(
                "class-K function '{name}' must vanish at zero; f(0) = {at_zero}"
            )));
        }
        let mut prev = 0.0f64;
        for i in 0..CLASS_K_POINTS {
            let t = i as f64 / (CLASS_K_POINTS - 1) as f64;
            let s = CLASS_K_LO * (CLASS_K_HI / CLASS_K_LO).powf(t);
            let y = fwd(s);
            if !y.is_finite() || y <= prev {
                return Err(Error::Certificate(format!(
                    "class-K function '{name}' must be strictly increasing and finite; \
                     f({s:.3e}) = {y}"
                )));
            }
            let back = inv(y);
            if !back.is_finite() || (back - s).abs() > ROUNDTRIP_REL_TOL * s {
                return Err(Error::Certificate(format!(
                    "inverse of class-K function '{name}' fails the roundtrip check at \
                     s = {s:.3e}: inv(f(s)) = {back}"
                )));
            }
            prev = y;
        }
        Ok(Self { name, fwd, inv })
    }

    pub fn identity() -> Self {
        Self::new("identity", Arc::new(|s| s), Arc::new(|y| y))
            .expect("the identity satisfies the class-K probes")
    }

    pub fn square() -> Self {
        Self::new("square", Arc::new(|s: f64| s * s), Arc::new(|y: f64| y.sqrt()))
            .expect("s^2 satisfies the class-K probes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.fwd)(s)
    }

    pub fn eval_inv(&self, y: f64) -> f64 {
        (self.inv)(y)
    }
}

/// Candidate Lyapunov function with sandwich bounds
/// alpha(|x|) <= V(x) <= beta(|x|), free-step growth rate `c`, and impulse
/// contraction factor `rho`. A rate below one means the free dynamics
/// already decay; such certificates are accepted but flagged exploratory
/// because the triggering analysis is tuned for expansive free dynamics.
#[derive(Clone)]
pub struct LyapunovCertificate {
    dim: usize,
    v: StateFunctional,
    alpha: ClassK,
    beta: ClassK,
    c: f64,
    rho: f64,
    exploratory: bool,
}

impl fmt::Debug for LyapunovCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LyapunovCertificate")
            .field("dim", &self.dim)
            .field("alpha", &self.alpha.name)
            .field("beta", &self.beta.name)
            .field("c", &self.c)
            .field("rho", &self.rho)
            .field("exploratory", &self.exploratory)
            .finish()
    }
}

impl LyapunovCertificate {
    pub fn new(
        dim: usize,
        v: StateFunctional,
        alpha: ClassK,
        beta: ClassK,
        c: f64,
        rho: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Certificate(
                "certificate dimension must be positive".into(),
            ));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Certificate(format!(
                "growth rate c must be positive and finite, got {c}"
            )));
        }
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::Certificate(format!(
                "impulse factor rho must be nonnegative and finite, got {rho}"
            )));
        }
        let at_origin = v(&DVector::zeros(dim));
        if !(at_origin.abs() <= ORIGIN_TOL) {
            return Err(Error::Certificate(format!(
                "V must vanish at the origin; V(0) = {at_origin}"
            )));
        }
        let sampler = BallSampler::new(dim, 1.0, 0xCE27_1F1Cu64)?;
        for i in 0..SANDWICH_SAMPLES {
            let x = sampler.get(i);
            let value = v(&x);
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Certificate(format!(
                    "V must be positive away from the origin; V(x) = {value} at |x| = {:.3e}",
                    x.norm()
                )));
            }
            let norm = x.norm();
            let lo = alpha.eval(norm);
            let hi = beta.eval(norm);
            if lo > value * (1.0 + SANDWICH_REL_TOL) {
                return Err(Error::Certificate(format!(
                    "lower bound violated: alpha(|x|) = {lo:.6e} exceeds V(x) = {value:.6e} \
                     at |x| = {norm:.3e}"
                )));
            }
            if value > hi * (1.0 + SANDWICH_REL_TOL) {
                return Err(Error::Certificate(format!(
                    "upper bound violated: V(x) = {value:.6e} exceeds beta(|x|) = {hi:.6e} \
                     at |x| = {norm:.3e}"
                )));
            }
        }
        Ok(Self {
            dim,
            v,
            alpha,
            beta,
            c,
            rho,
            exploratory: c < 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn v(&self, x: &DVector<f64>) -> f64 {
        (self.v)(x)
    }

    pub fn alpha(&self) -> &ClassK {
        &self.alpha
    }

    pub fn beta(&self) -> &ClassK {
        &self.beta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn is_exploratory(&self) -> bool {
        self.exploratory
    }

    /// Same certificate with the constants replaced; revalidates nothing
    /// about V because V is unchanged.
    pub fn with_constants(&self, c: f64, rho: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Certificate(format!(
                "growth rate c must be positive and finite, got {c}"
            )));
        }
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::Certificate(format!(
                "impulse factor rho must be nonnegative and finite, got {rho}"
            )));
        }
        Ok(Self {
            c,
            rho,
            exploratory: c < 1.0,
            ..self.clone()
        })
    }
}
