//! Tabu-search refinement: Gaussian neighborhoods, a FIFO list of quantized
//! position keys, an aspiration override, and best-admissible moves that are
//! allowed to go uphill.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Vec9, DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct TabuConfig {
    pub iterations: usize,
    pub neighborhood_size: usize,
    /// Per-component Gaussian perturbation scale.
    pub sigma: f64,
    pub list_capacity: usize,
    /// Key resolution; positions are remembered at this granularity because
    /// a continuous search never revisits a point exactly.
    pub quantum: f64,
    pub pmin: f64,
    pub pmax: f64,
    /// Stream seed for this invocation; the hybrid loop derives a fresh one
    /// per call.
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        TabuConfig {
            iterations: 5,
            neighborhood_size: 10,
            sigma: 0.05,
            list_capacity: 7,
            quantum: 0.01,
            pmin: -1.0,
            pmax: 1.0,
            seed: 0,
        }
    }
}

pub type TabuKey = [i64; DIM];

/// Bounded FIFO memory of recently visited cells.
#[derive(Debug, Clone, Default)]
pub struct TabuList {
    queue: VecDeque<TabuKey>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        TabuList {
            queue: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn contains(&self, key: &TabuKey) -> bool {
        self.queue.contains(key)
    }

    /// Remembers a key, evicting the oldest once at capacity.
    pub fn push(&mut self, key: TabuKey) {
        if self.capacity == 0 {
            return;
        }
        if self.queue.len() == self.capacity {
            self.queue.pop_front();
        }
        self.queue.push_back(key);
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Cell key of a position: each component rounded to the nearest multiple of
/// `quantum`.
pub fn quantize_key(pos: &Vec9, quantum: f64) -> TabuKey {
    let mut key = [0i64; DIM];
    for (k, x) in key.iter_mut().zip(pos) {
        *k = (x / quantum).round() as i64;
    }
    key
}

/// Gaussian candidates around `center`, clamped to the box. Deterministic
/// given the stream state.
pub fn neighbors<R: Rng>(center: &Vec9, cfg: &TabuConfig, rng: &mut R) -> Vec<Vec9> {
    let normal = Normal::new(0.0, cfg.sigma).expect("sigma must be finite and non-negative");
    (0..cfg.neighborhood_size)
        .map(|_| {
            let mut c = *center;
            for x in &mut c {
                *x = (*x + normal.sample(rng)).clamp(cfg.pmin, cfg.pmax);
            }
            c
        })
        .collect()
}

/// Runs `iterations` rounds of best-admissible moves from `start`, where a
/// candidate is admissible unless its key is tabu, with one override: a
/// candidate beating the best fitness seen so far is always admissible
/// (aspiration). The chosen move may be worse than the current point; that is
/// what lets the search leave local minima. If the whole neighborhood is tabu
/// and nothing aspirates, the least-bad tabu candidate is taken. Returns the
/// best point seen (never worse than the start), its fitness, and the number
/// of evaluations spent.
pub fn tabu_search<F>(
    start: &Vec9,
    start_fitness: f64,
    evaluate: F,
    cfg: &TabuConfig,
) -> (Vec9, f64, usize)
where
    F: Fn(&Vec9) -> f64 + Sync,
{
    tabu_search_with(start, start_fitness, evaluate, cfg, |_, _, _, _| {})
}

/// As [`tabu_search`], additionally invoking `on_iteration(iteration,
/// best_position, best_fitness, evaluations_so_far)` after each round.
pub fn tabu_search_with<F, H>(
    start: &Vec9,
    start_fitness: f64,
    evaluate: F,
    cfg: &TabuConfig,
    mut on_iteration: H,
) -> (Vec9, f64, usize)
where
    F: Fn(&Vec9) -> f64 + Sync,
    H: FnMut(usize, &Vec9, f64, usize),
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut list = TabuList::new(cfg.list_capacity);
    let mut current = *start;
    let mut best = *start;
    let mut best_fitness = start_fitness;
    let mut evaluations = 0;
    // The incumbent's cell is tabu from the outset so the first move cannot
    // stand still.
    list.push(quantize_key(&current, cfg.quantum));
    for iteration in 1..=cfg.iterations {
        let candidates = neighbors(&current, cfg, &mut rng);
        if candidates.is_empty() {
            on_iteration(iteration, &best, best_fitness, evaluations);
            continue;
        }
        let fitnesses = crate::exec::map_fitness(&candidates, &evaluate);
        evaluations += candidates.len();
        let mut chosen: Option<usize> = None;
        let mut fallback = 0usize;
        for i in 0..candidates.len() {
            if fitnesses[i] < fitnesses[fallback] {
                fallback = i;
            }
            let tabu = list.contains(&quantize_key(&candidates[i], cfg.quantum));
            if (!tabu || fitnesses[i] < best_fitness)
                && chosen.is_none_or(|j| fitnesses[i] < fitnesses[j])
            {
                chosen = Some(i);
            }
        }
        let idx = chosen.unwrap_or(fallback);
        current = candidates[idx];
        list.push(quantize_key(&current, cfg.quantum));
        if fitnesses[idx] < best_fitness {
            best_fitness = fitnesses[idx];
            best = current;
        }
        on_iteration(iteration, &best, best_fitness, evaluations);
    }
    (best, best_fitness, evaluations)
}
