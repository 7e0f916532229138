//! The hybrid loop: per generation, evaluate the swarm, refresh the bests,
//! move the particles, then refine with tabu search. A history row is logged
//! after every evaluation batch and every tabu iteration, so the fitness
//! curve can be reconstructed exactly.

use std::io;

use crate::exec::map_fitness;
use crate::fuzzy::{decode, repair, ControllerParams, Gains};
use crate::plant::PlantParams;
use crate::pso::{init_swarm, update_bests, update_position, update_velocity, GlobalBest, PsoConfig};
use crate::rng::{child_seed, stream, DOMAIN_TABU, DOMAIN_VELOCITY};
use crate::sim::{evaluate, SimConfig};
use crate::tabu::{tabu_search_with, TabuConfig};
use crate::Vec9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsScope {
    /// Refine only the global best each generation; an improvement replaces
    /// the gbest record but teleports no particle, preserving diversity.
    GbestOnly,
    /// Refine every particle, replacing its position and pbest on
    /// improvement; much more expensive.
    AllParticles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    pub generations: usize,
    pub ts_scope: TsScope,
    pub pso: PsoConfig,
    pub tabu: TabuConfig,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            generations: 2,
            ts_scope: TsScope::GbestOnly,
            pso: PsoConfig::default(),
            tabu: TabuConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Pso,
    Ts,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Pso => "pso",
            Phase::Ts => "ts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    pub phase: Phase,
    /// 1-based generation, both phases.
    pub generation: usize,
    /// 0 for evaluation batches, the 1-based tabu iteration otherwise.
    pub iteration: usize,
    /// Cumulative evaluation count when the record was taken.
    pub evaluations: usize,
    pub best_fitness: f64,
    pub best_position: Vec9,
}

/// Log of best fitness against evaluation count; `best_fitness` is monotone
/// non-increasing and `evaluations` strictly increasing along the records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizationHistory {
    pub records: Vec<HistoryRecord>,
}

impl OptimizationHistory {
    /// History CSV: `phase,generation,iteration,evaluations,best_mse`.
    pub fn write_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "phase,generation,iteration,evaluations,best_mse")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{:.17e}",
                r.phase.as_str(),
                r.generation,
                r.iteration,
                r.evaluations,
                r.best_fitness
            )?;
        }
        Ok(())
    }
}

/// Exact number of fitness evaluations a config implies.
pub fn total_evaluations(h: &HybridConfig) -> usize {
    let per_search = h.tabu.iterations * h.tabu.neighborhood_size;
    let searches_per_generation = match h.ts_scope {
        TsScope::GbestOnly => 1,
        TsScope::AllParticles => h.pso.swarm_size,
    };
    h.pso.swarm_size * h.generations + h.generations * per_search * searches_per_generation
}

/// Runs the full hybrid optimization and returns the decoded best controller,
/// its fitness, and the history. Same config and seed give bit-identical
/// results, with or without the `parallel` feature.
pub fn optimize(
    h: &HybridConfig,
    plant: &PlantParams,
    sim: &SimConfig,
    gains: Gains,
) -> (ControllerParams, f64, OptimizationHistory) {
    let eval = |pos: &Vec9| evaluate(pos, plant, sim, gains);
    let mut swarm = init_swarm(&h.pso);
    let mut velocity_rngs: Vec<_> = (0..swarm.len())
        .map(|i| stream(h.pso.seed, DOMAIN_VELOCITY, i as u64))
        .collect();
    let mut gbest = GlobalBest::unset();
    let mut history = OptimizationHistory::default();
    let mut evaluations = 0usize;

    for g in 1..=h.generations {
        let positions: Vec<Vec9> = swarm.iter().map(|p| p.position).collect();
        let fitnesses = map_fitness(&positions, eval);
        evaluations += fitnesses.len();
        update_bests(&mut swarm, &fitnesses, &mut gbest);
        history.records.push(HistoryRecord {
            phase: Phase::Pso,
            generation: g,
            iteration: 0,
            evaluations,
            best_fitness: gbest.fitness,
            best_position: gbest.position,
        });

        for (particle, rng) in swarm.iter_mut().zip(&mut velocity_rngs) {
            particle.velocity = update_velocity(particle, &gbest, &h.pso, rng);
            particle.position = update_position(particle, &h.pso);
        }

        match h.ts_scope {
            TsScope::GbestOnly => {
                let tcfg = tabu_config_for(h, g as u64);
                let base = evaluations;
                let (pos, fit, used) = tabu_search_with(
                    &gbest.position,
                    gbest.fitness,
                    eval,
                    &tcfg,
                    |iteration, best_pos, best_fit, spent| {
                        history.records.push(HistoryRecord {
                            phase: Phase::Ts,
                            generation: g,
                            iteration,
                            evaluations: base + spent,
                            best_fitness: best_fit,
                            best_position: *best_pos,
                        });
                    },
                );
                evaluations = base + used;
                if fit < gbest.fitness {
                    gbest = GlobalBest {
                        position: pos,
                        fitness: fit,
                    };
                }
            }
            TsScope::AllParticles => {
                for (i, particle) in swarm.iter_mut().enumerate() {
                    // One derived stream per (generation, particle) pair.
                    let tcfg = tabu_config_for(h, ((g as u64) << 32) | i as u64);
                    let base = evaluations;
                    let start = particle.position;
                    let start_fitness = particle.pbest_fitness;
                    let gbest_now = gbest;
                    let (pos, fit, used) = tabu_search_with(
                        &start,
                        start_fitness,
                        eval,
                        &tcfg,
                        |iteration, best_pos, best_fit, spent| {
                            let (bf, bp) = if best_fit < gbest_now.fitness {
                                (best_fit, *best_pos)
                            } else {
                                (gbest_now.fitness, gbest_now.position)
                            };
                            history.records.push(HistoryRecord {
                                phase: Phase::Ts,
                                generation: g,
                                iteration,
                                evaluations: base + spent,
                                best_fitness: bf,
                                best_position: bp,
                            });
                        },
                    );
                    evaluations = base + used;
                    if fit < particle.pbest_fitness {
                        particle.position = pos;
                        particle.pbest_position = pos;
                        particle.pbest_fitness = fit;
                    }
                    if fit < gbest.fitness {
                        gbest = GlobalBest {
                            position: pos,
                            fitness: fit,
                        };
                    }
                }
            }
        }
    }

    (decode(&repair(gbest.position), gains), gbest.fitness, history)
}

fn tabu_config_for(h: &HybridConfig, index: u64) -> TabuConfig {
    TabuConfig {
        pmin: h.pso.pmin,
        pmax: h.pso.pmax,
        seed: child_seed(h.pso.seed, DOMAIN_TABU, index),
        ..h.tabu.clone()
    }
}
