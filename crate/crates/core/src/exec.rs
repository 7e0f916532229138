//! Batch fitness evaluation, data-parallel when the `parallel` feature is on
//! (the default). Results are always collected in input order, so the
//! parallel and sequential paths return bit-identical vectors and everything
//! downstream is schedule-independent.

use crate::Vec9;

/// Sequential reference path; always available.
pub fn map_fitness_seq<F>(positions: &[Vec9], f: F) -> Vec<f64>
where
    F: Fn(&Vec9) -> f64,
{
    positions.iter().map(f).collect()
}

/// Evaluates a batch across the rayon pool, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_fitness<F>(positions: &[Vec9], f: F) -> Vec<f64>
where
    F: Fn(&Vec9) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    positions.par_iter().map(f).collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn map_fitness<F>(positions: &[Vec9], f: F) -> Vec<f64>
where
    F: Fn(&Vec9) -> f64 + Sync + Send,
{
    map_fitness_seq(positions, f)
}
