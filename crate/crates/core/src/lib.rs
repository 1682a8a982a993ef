//! Simulation and verification toolkit for periodic event-triggered
//! impulsive stabilization of discrete-time systems with actuator delay.
//!
//! The crate is organized in layers:
//!
//! * [`trigger`], [`theorem`] — threshold arithmetic and the closed-form
//!   stability condition with its envelope consequences.
//! * [`system`], [`cert`] — plant/feedback wrappers and Lyapunov
//!   certificates with sampled validity checks.
//! * [`engine`] — the event-triggered impulsive simulator and its
//!   trajectory-level verifiers.
//! * [`analysis`] — constant estimation, gain design, and the
//!   network-certificate algebra.
//! * [`models`] — ready-made benchmark systems.
//! * [`config`], [`report`], [`runner`] — JSON-driven batch entry points
//!   shared by the command-line interface and the test suite.

pub mod analysis;
pub mod cert;
pub mod config;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod models;
pub mod report;
pub mod runner;
pub mod sample;
pub mod system;
pub mod theorem;
pub mod trigger;

pub use cert::{ClassK, LyapunovCertificate};
pub use engine::{SimOptions, SimulationRecord, StepFlags};
pub use error::{Error, Result};
pub use system::{DiscreteSystem, FeedbackLaw};
pub use theorem::{ConditionReport, EnvelopeReport};
pub use trigger::{DelaySpec, TriggerConfig};
