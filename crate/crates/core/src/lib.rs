//! Auto-tuning of a zero-order Takagi-Sugeno fuzzy controller by a hybrid
//! particle-swarm / tabu-search optimizer, with fitness scored by closed-loop
//! simulation of an inverted pendulum.
//!
//! The search space is the 9-vector of controller shape parameters: the modal
//! values of the two input membership triangles plus the three output
//! singletons, all confined to `[-1, 1]`. Everything downstream of a seed is
//! deterministic, including parallel runs (see [`rng`] and [`exec`]).

pub mod exec;
pub mod fuzzy;
pub mod hybrid;
pub mod params_file;
pub mod plant;
pub mod pso;
pub mod rng;
pub mod sim;
pub mod tabu;

/// Number of tuned parameters: two membership triples plus three singletons.
pub const DIM: usize = 9;

/// A point (or velocity) in the `[-1, 1]^9` search box.
pub type Vec9 = [f64; DIM];
