//! Particle swarm core: seeded initialization, inertia-weighted velocity
//! updates with symmetric magnitude clamping, and strict-improvement
//! personal/global best tracking.

use rand::Rng;

use crate::fuzzy::repair;
use crate::rng::{stream, DOMAIN_INIT};
use crate::{Vec9, DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub swarm_size: usize,
    /// Inertia factor on the previous velocity.
    pub w: f64,
    /// Pull toward the personal best.
    pub c1: f64,
    /// Pull toward the global best.
    pub c2: f64,
    /// Per-component velocity bound.
    pub vmax: f64,
    pub pmin: f64,
    pub pmax: f64,
    /// Master seed; all streams are derived from it.
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 20,
            w: 0.729,
            c1: 1.49445,
            c2: 1.49445,
            vmax: 0.4,
            pmin: -1.0,
            pmax: 1.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Vec9,
    pub velocity: Vec9,
    pub pbest_position: Vec9,
    /// +inf until the particle's first evaluation.
    pub pbest_fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalBest {
    pub position: Vec9,
    pub fitness: f64,
}

impl GlobalBest {
    /// Sentinel used before the first evaluation batch.
    pub fn unset() -> Self {
        GlobalBest {
            position: [0.0; DIM],
            fitness: f64::INFINITY,
        }
    }
}

/// Seeded swarm: positions uniform in the box and then repaired, velocities
/// uniform in [-vmax, vmax]. Each particle draws from its own derived stream,
/// so growing the swarm only appends particles.
pub fn init_swarm(cfg: &PsoConfig) -> Vec<Particle> {
    (0..cfg.swarm_size)
        .map(|i| {
            let mut rng = stream(cfg.seed, DOMAIN_INIT, i as u64);
            let mut position = [0.0; DIM];
            for c in &mut position {
                *c = rng.random_range(cfg.pmin..=cfg.pmax);
            }
            let position = repair(position);
            let mut velocity = [0.0; DIM];
            for c in &mut velocity {
                *c = rng.random_range(-cfg.vmax..=cfg.vmax);
            }
            Particle {
                position,
                velocity,
                pbest_position: position,
                pbest_fitness: f64::INFINITY,
            }
        })
        .collect()
}

/// Symmetric magnitude clamp: sign(v) * min(|v|, bound).
pub fn clamp_magnitude(v: f64, bound: f64) -> f64 {
    if v > bound {
        bound
    } else if v < -bound {
        -bound
    } else {
        v
    }
}

/// The scalar velocity rule: inertia plus the two stochastic pulls, then the
/// magnitude clamp. Keeps one argument per term so call sites read like the
/// update rule itself.
#[allow(clippy::too_many_arguments)]
pub fn velocity_update_scalar(
    v: f64,
    w: f64,
    c1: f64,
    r1: f64,
    to_pbest: f64,
    c2: f64,
    r2: f64,
    to_gbest: f64,
    vmax: f64,
) -> f64 {
    clamp_magnitude(w * v + c1 * r1 * to_pbest + c2 * r2 * to_gbest, vmax)
}

/// New velocity for one particle, drawing two fresh uniforms per component
/// from the particle's own stream.
pub fn update_velocity<R: Rng>(
    p: &Particle,
    gbest: &GlobalBest,
    cfg: &PsoConfig,
    rng: &mut R,
) -> Vec9 {
    let mut v = [0.0; DIM];
    for (i, slot) in v.iter_mut().enumerate() {
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        *slot = velocity_update_scalar(
            p.velocity[i],
            cfg.w,
            cfg.c1,
            r1,
            p.pbest_position[i] - p.position[i],
            cfg.c2,
            r2,
            gbest.position[i] - p.position[i],
            cfg.vmax,
        );
    }
    v
}

/// Position step: add the already-clamped velocity, then confine the result's
/// magnitude to pmax.
pub fn update_position(p: &Particle, cfg: &PsoConfig) -> Vec9 {
    let mut out = [0.0; DIM];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = clamp_magnitude(p.position[i] + p.velocity[i], cfg.pmax);
    }
    out
}

/// Strict-improvement refresh of every pbest and of gbest; ties keep the
/// incumbent, so re-evaluations never churn the records.
pub fn update_bests(swarm: &mut [Particle], fitnesses: &[f64], gbest: &mut GlobalBest) {
    assert_eq!(swarm.len(), fitnesses.len());
    for (p, &f) in swarm.iter_mut().zip(fitnesses) {
        if f < p.pbest_fitness {
            p.pbest_fitness = f;
            p.pbest_position = p.position;
        }
    }
    for p in swarm.iter() {
        if p.pbest_fitness < gbest.fitness {
            gbest.fitness = p.pbest_fitness;
            gbest.position = p.pbest_position;
        }
    }
}
