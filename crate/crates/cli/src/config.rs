//! Flat `key = value` run configuration. One file covers every tunable of
//! the optimizer, the simulation, and the plant; missing keys take the
//! library defaults, unknown or repeated keys are rejected with their line
//! number. Floats are rendered with the shortest round-tripping form, so
//! `parse(normalized(c)) == c` exactly.

use std::fmt::Write as _;

use fuzzy_pendulum::fuzzy::Gains;
use fuzzy_pendulum::hybrid::{HybridConfig, TsScope};
use fuzzy_pendulum::plant::{PlantForm, PlantParams};
use fuzzy_pendulum::pso::PsoConfig;
use fuzzy_pendulum::sim::SimConfig;
use fuzzy_pendulum::tabu::TabuConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub swarm_size: usize,
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub vmax: f64,
    pub pmin: f64,
    pub pmax: f64,
    pub generations: usize,
    pub ts_scope: TsScope,
    pub ts_iterations: usize,
    pub ts_neighborhood: usize,
    pub ts_sigma: f64,
    pub ts_capacity: usize,
    pub ts_quantum: f64,
    pub period: f64,
    pub horizon: f64,
    pub theta0: f64,
    pub theta_dot0: f64,
    pub reference: f64,
    pub abort_angle: f64,
    pub plant_form: PlantForm,
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub pole_length: f64,
    pub gravity: f64,
    pub b: f64,
    pub ge: f64,
    pub gde: f64,
    pub gu: f64,
    pub out_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pso = PsoConfig::default();
        let tabu = TabuConfig::default();
        let hybrid = HybridConfig::default();
        let sim = SimConfig::default();
        let plant = PlantParams::default();
        let gains = Gains::default();
        RunConfig {
            seed: pso.seed,
            swarm_size: pso.swarm_size,
            w: pso.w,
            c1: pso.c1,
            c2: pso.c2,
            vmax: pso.vmax,
            pmin: pso.pmin,
            pmax: pso.pmax,
            generations: hybrid.generations,
            ts_scope: hybrid.ts_scope,
            ts_iterations: tabu.iterations,
            ts_neighborhood: tabu.neighborhood_size,
            ts_sigma: tabu.sigma,
            ts_capacity: tabu.list_capacity,
            ts_quantum: tabu.quantum,
            period: sim.period,
            horizon: sim.horizon,
            theta0: sim.theta0,
            theta_dot0: sim.theta_dot0,
            reference: sim.reference,
            abort_angle: sim.abort_angle,
            plant_form: plant.form,
            cart_mass: plant.cart_mass,
            pole_mass: plant.pole_mass,
            pole_length: plant.length,
            gravity: plant.gravity,
            b: plant.b,
            ge: gains.ge,
            gde: gains.gde,
            gu: gains.gu,
            out_dir: None,
        }
    }
}

fn scope_name(s: TsScope) -> &'static str {
    match s {
        TsScope::GbestOnly => "gbest",
        TsScope::AllParticles => "all",
    }
}

fn form_name(f: PlantForm) -> &'static str {
    match f {
        PlantForm::StandardCartPole => "standard",
        PlantForm::PaperVerbatim => "paper",
    }
}

impl RunConfig {
    /// Parses config text. The second value reports whether the file set the
    /// seed explicitly, which `run_meta.txt` records.
    pub fn parse(text: &str) -> Result<(RunConfig, bool), CliError> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut explicit_seed = false;

        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| CliError::Input(format!("line {lineno}: {msg}"));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();

            macro_rules! num {
                ($ty:ty) => {
                    value.parse::<$ty>().map_err(|e| {
                        bad(format!("invalid value for `{key}`: {e}"))
                    })?
                };
            }

            match key {
                "seed" => {
                    cfg.seed = num!(u64);
                    explicit_seed = true;
                }
                "swarm_size" => cfg.swarm_size = num!(usize),
                "w" => cfg.w = num!(f64),
                "c1" => cfg.c1 = num!(f64),
                "c2" => cfg.c2 = num!(f64),
                "vmax" => cfg.vmax = num!(f64),
                "pmin" => cfg.pmin = num!(f64),
                "pmax" => cfg.pmax = num!(f64),
                "generations" => cfg.generations = num!(usize),
                "ts_scope" => {
                    cfg.ts_scope = match value {
                        "gbest" => TsScope::GbestOnly,
                        "all" => TsScope::AllParticles,
                        other => {
                            return Err(bad(format!(
                                "invalid value for `ts_scope`: `{other}` (expected gbest or all)"
                            )))
                        }
                    }
                }
                "ts_iterations" => cfg.ts_iterations = num!(usize),
                "ts_neighborhood" => cfg.ts_neighborhood = num!(usize),
                "ts_sigma" => cfg.ts_sigma = num!(f64),
                "ts_capacity" => cfg.ts_capacity = num!(usize),
                "ts_quantum" => cfg.ts_quantum = num!(f64),
                "period" => cfg.period = num!(f64),
                "horizon" => cfg.horizon = num!(f64),
                "theta0" => cfg.theta0 = num!(f64),
                "theta_dot0" => cfg.theta_dot0 = num!(f64),
                "reference" => cfg.reference = num!(f64),
                "abort_angle" => cfg.abort_angle = num!(f64),
                "plant_form" => {
                    cfg.plant_form = match value {
                        "standard" => PlantForm::StandardCartPole,
                        "paper" => PlantForm::PaperVerbatim,
                        other => {
                            return Err(bad(format!(
                                "invalid value for `plant_form`: `{other}` (expected standard or paper)"
                            )))
                        }
                    }
                }
                "cart_mass" => cfg.cart_mass = num!(f64),
                "pole_mass" => cfg.pole_mass = num!(f64),
                "pole_length" => cfg.pole_length = num!(f64),
                "gravity" => cfg.gravity = num!(f64),
                "b" => cfg.b = num!(f64),
                "ge" => cfg.ge = num!(f64),
                "gde" => cfg.gde = num!(f64),
                "gu" => cfg.gu = num!(f64),
                "out_dir" => cfg.out_dir = Some(value.to_string()),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }

            if seen.contains(&key) {
                return Err(bad(format!("duplicate key `{key}`")));
            }
            // Borrow trick: the key is a slice of `text`, valid for the loop.
            seen.push(match KEY_ORDER.iter().find(|k| **k == key) {
                Some(k) => k,
                None => unreachable!("matched key missing from KEY_ORDER"),
            });
        }

        cfg.validate()?;
        Ok((cfg, explicit_seed))
    }

    /// Canonical serialization: every key, fixed order, shortest
    /// round-tripping float form. Parsing this text reproduces `self`.
    pub fn normalized(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "swarm_size = {}", self.swarm_size);
        let _ = writeln!(s, "w = {}", self.w);
        let _ = writeln!(s, "c1 = {}", self.c1);
        let _ = writeln!(s, "c2 = {}", self.c2);
        let _ = writeln!(s, "vmax = {}", self.vmax);
        let _ = writeln!(s, "pmin = {}", self.pmin);
        let _ = writeln!(s, "pmax = {}", self.pmax);
        let _ = writeln!(s, "generations = {}", self.generations);
        let _ = writeln!(s, "ts_scope = {}", scope_name(self.ts_scope));
        let _ = writeln!(s, "ts_iterations = {}", self.ts_iterations);
        let _ = writeln!(s, "ts_neighborhood = {}", self.ts_neighborhood);
        let _ = writeln!(s, "ts_sigma = {}", self.ts_sigma);
        let _ = writeln!(s, "ts_capacity = {}", self.ts_capacity);
        let _ = writeln!(s, "ts_quantum = {}", self.ts_quantum);
        let _ = writeln!(s, "period = {}", self.period);
        let _ = writeln!(s, "horizon = {}", self.horizon);
        let _ = writeln!(s, "theta0 = {}", self.theta0);
        let _ = writeln!(s, "theta_dot0 = {}", self.theta_dot0);
        let _ = writeln!(s, "reference = {}", self.reference);
        let _ = writeln!(s, "abort_angle = {}", self.abort_angle);
        let _ = writeln!(s, "plant_form = {}", form_name(self.plant_form));
        let _ = writeln!(s, "cart_mass = {}", self.cart_mass);
        let _ = writeln!(s, "pole_mass = {}", self.pole_mass);
        let _ = writeln!(s, "pole_length = {}", self.pole_length);
        let _ = writeln!(s, "gravity = {}", self.gravity);
        let _ = writeln!(s, "b = {}", self.b);
        let _ = writeln!(s, "ge = {}", self.ge);
        let _ = writeln!(s, "gde = {}", self.gde);
        let _ = writeln!(s, "gu = {}", self.gu);
        if let Some(dir) = &self.out_dir {
            let _ = writeln!(s, "out_dir = {dir}");
        }
        s
    }

    // Negated comparisons are deliberate: they also reject NaN values.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<(), CliError> {
        let err = |msg: String| Err(CliError::Input(msg));
        if self.swarm_size == 0 {
            return err("`swarm_size` must be at least 1".into());
        }
        if self.generations == 0 {
            return err("`generations` must be at least 1".into());
        }
        if !(self.w >= 0.0 && self.w <= 1.0) {
            return err(format!("`w` must lie in [0, 1], got {}", self.w));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return err(format!("`{name}` must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.vmax > 0.0 && self.vmax.is_finite()) {
            return err(format!("`vmax` must be positive, got {}", self.vmax));
        }
        if !(self.pmin < self.pmax) || !self.pmin.is_finite() || !self.pmax.is_finite() {
            return err(format!(
                "`pmin` must be below `pmax`, got {} and {}",
                self.pmin, self.pmax
            ));
        }
        if !(self.ts_sigma > 0.0 && self.ts_sigma.is_finite()) {
            return err(format!("`ts_sigma` must be positive, got {}", self.ts_sigma));
        }
        if !(self.ts_quantum > 0.0 && self.ts_quantum.is_finite()) {
            return err(format!(
                "`ts_quantum` must be positive, got {}",
                self.ts_quantum
            ));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return err(format!("`period` must be positive, got {}", self.period));
        }
        if !(self.horizon >= self.period && self.horizon.is_finite()) {
            return err(format!(
                "`horizon` must be at least one `period`, got {}",
                self.horizon
            ));
        }
        if !(self.abort_angle > 0.0) {
            return err(format!(
                "`abort_angle` must be positive, got {}",
                self.abort_angle
            ));
        }
        for (name, v) in [
            ("theta0", self.theta0),
            ("theta_dot0", self.theta_dot0),
            ("reference", self.reference),
            ("b", self.b),
        ] {
            if !v.is_finite() {
                return err(format!("`{name}` must be finite, got {v}"));
            }
        }
        for (name, v) in [
            ("cart_mass", self.cart_mass),
            ("pole_mass", self.pole_mass),
            ("pole_length", self.pole_length),
            ("gravity", self.gravity),
            ("ge", self.ge),
            ("gde", self.gde),
            ("gu", self.gu),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return err(format!("`{name}` must be positive, got {v}"));
            }
        }
        Ok(())
    }

    pub fn hybrid(&self) -> HybridConfig {
        HybridConfig {
            generations: self.generations,
            ts_scope: self.ts_scope,
            pso: PsoConfig {
                swarm_size: self.swarm_size,
                w: self.w,
                c1: self.c1,
                c2: self.c2,
                vmax: self.vmax,
                pmin: self.pmin,
                pmax: self.pmax,
                seed: self.seed,
            },
            tabu: TabuConfig {
                iterations: self.ts_iterations,
                neighborhood_size: self.ts_neighborhood,
                sigma: self.ts_sigma,
                list_capacity: self.ts_capacity,
                quantum: self.ts_quantum,
                pmin: self.pmin,
                pmax: self.pmax,
                // The hybrid derives each search's seed from the master.
                seed: 0,
            },
        }
    }

    pub fn plant(&self) -> PlantParams {
        PlantParams {
            cart_mass: self.cart_mass,
            pole_mass: self.pole_mass,
            length: self.pole_length,
            gravity: self.gravity,
            b: self.b,
            form: self.plant_form,
        }
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            period: self.period,
            horizon: self.horizon,
            theta0: self.theta0,
            theta_dot0: self.theta_dot0,
            reference: self.reference,
            abort_angle: self.abort_angle,
        }
    }

    pub fn gains(&self) -> Gains {
        Gains {
            ge: self.ge,
            gde: self.gde,
            gu: self.gu,
        }
    }
}

const KEY_ORDER: [&str; 31] = [
    "seed",
    "swarm_size",
    "w",
    "c1",
    "c2",
    "vmax",
    "pmin",
    "pmax",
    "generations",
    "ts_scope",
    "ts_iterations",
    "ts_neighborhood",
    "ts_sigma",
    "ts_capacity",
    "ts_quantum",
    "period",
    "horizon",
    "theta0",
    "theta_dot0",
    "reference",
    "abort_angle",
    "plant_form",
    "cart_mass",
    "pole_mass",
    "pole_length",
    "gravity",
    "b",
    "ge",
    "gde",
    "gu",
    "out_dir",
];
