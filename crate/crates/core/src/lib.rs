//! Downlink delay and capacity of Poisson cellular networks under ARQ.
//!
//! The crate samples Poisson deployments, simulates the typical user's
//! retransmission delay under several basestation strategies, and evaluates
//! the analytic lower and upper bounds on the expected delay.
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the precision to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arq_sim;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod stats;
pub mod strategies;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type NetworkConfig = geometry::NetworkConfig<f64>;
pub type NetworkRealization = geometry::NetworkRealization<f64>;
pub type Strategy = strategies::Strategy<f64>;
pub type StrategyKind = strategies::StrategyKind<f64>;
pub type SimScenario = arq_sim::SimScenario<f64>;
pub type DelayStats = arq_sim::DelayStats<f64>;
pub type BoundParams = bounds::BoundParams<f64>;
pub type BoundCurve = bounds::BoundCurve<f64>;
pub type Estimate = channel::Estimate<f64>;
