//! Covert uplink from a ground station to a GEO satellite watched by
//! co-orbital wardens: link budgets, Rician MIMO channels, detection
//! analysis under noise uncertainty, SDP-based beamforming with optional
//! antenna-orientation search, Monte Carlo validation and figure-style
//! experiment sweeps.
//!
//! ```
//! use covertlink::channel::{sample_channel_seeded, ArrayConfig};
//! use covertlink::optimizer::{solve_ob_perfect, Channels, OptimizerOptions};
//! use covertlink::scenario::Scenario;
//!
//! let mut sc = Scenario::default();
//! sc.alice_array = ArrayConfig::new(2, 2, 0.5).unwrap();
//! let links = sc.links().unwrap();
//! assert!((links.bob.budget.distance - 3.6e7).abs() < 1e-6);
//!
//! let h = sample_channel_seeded(&sc.bob_rician(&links), 1, 0).h;
//! let opts = OptimizerOptions::default();
//! let sol = solve_ob_perfect(&sc, &links, &Channels::new(&links, h), &opts).unwrap();
//! assert!(sol.rate > 0.0 && sol.p_a <= sc.p_max_w);
//! ```

pub mod channel;
pub mod covert_analysis;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linkbudget;
pub mod rng;
pub mod optimizer;
pub mod scenario;
pub mod sdp_engine;
pub mod simkit;

pub use error::{Error, Result};
