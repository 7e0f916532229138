//! Closed-loop runner: fixed-period sampling, trace recording, mean-square
//! error fitness, the settling metric, and the position-to-fitness map used
//! by both optimizers.

use std::io;

use crate::fuzzy::{control, decode, repair, ControllerParams, Gains};
use crate::plant::{step_rk4, PlantParams, PlantState};
use crate::Vec9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Sampling period of the controller; also the integrator step.
    pub period: f64,
    /// Total simulated time.
    pub horizon: f64,
    pub theta0: f64,
    pub theta_dot0: f64,
    pub reference: f64,
    /// |theta| beyond this aborts the run; the dynamics stop being meaningful
    /// near the horizontal.
    pub abort_angle: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            period: 0.01,
            horizon: 5.0,
            theta0: 0.22,
            theta_dot0: 0.0,
            reference: 0.0,
            abort_angle: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl SimConfig {
    /// Number of samples on the grid; a trace never holds more.
    pub fn n_samples(&self) -> usize {
        (self.horizon / self.period).round() as usize
    }
}

/// Error charged for every sample lost to an abort. Keeps the objective
/// finite and monotone in time-to-failure.
pub const ABORT_PENALTY_ERROR: f64 = std::f64::consts::PI;

/// One post-step sample: the state at t = k*period together with the input
/// that was held over the step producing it and the resulting error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub u: f64,
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples: Vec<Sample>,
    pub aborted: bool,
    /// Index of the step whose result violated the abort bound; that sample
    /// is not recorded.
    pub abort_step: Option<usize>,
}

/// Runs the loop: at each step the error and its backward difference feed the
/// controller, and the plant advances one RK4 step under the held input.
/// Aborts (angle bound or non-finite state) end recording early and are
/// flagged on the trace rather than returned as errors.
pub fn simulate(cp: &ControllerParams, plant: &PlantParams, sim: &SimConfig) -> Trace {
    let n = sim.n_samples();
    let mut samples = Vec::with_capacity(n);
    let mut state = PlantState::new(sim.theta0, sim.theta_dot0);
    // e(-1) = e(0), so the first derivative sample is zero.
    let mut e_prev = sim.reference - sim.theta0;
    for k in 0..n {
        let e = sim.reference - state.theta;
        let de = (e - e_prev) / sim.period;
        let u = control(e, de, cp);
        match step_rk4(&state, u, sim.period, plant) {
            Ok(next) if next.theta.abs() <= sim.abort_angle => {
                samples.push(Sample {
                    t: (k + 1) as f64 * sim.period,
                    theta: next.theta,
                    theta_dot: next.theta_dot,
                    u,
                    e: sim.reference - next.theta,
                });
                e_prev = e;
                state = next;
            }
            _ => {
                return Trace {
                    samples,
                    aborted: true,
                    abort_step: Some(k),
                }
            }
        }
    }
    Trace {
        samples,
        aborted: false,
        abort_step: None,
    }
}

/// Mean square error over the full n-sample grid, `(1/(n*period)) * sum e^2`;
/// samples missing from an aborted trace count as [`ABORT_PENALTY_ERROR`]
/// each.
pub fn mse(trace: &Trace, n: usize, period: f64) -> f64 {
    let mut sum = 0.0;
    for s in &trace.samples {
        sum += s.e * s.e;
    }
    let missing = n.saturating_sub(trace.samples.len());
    sum += missing as f64 * (ABORT_PENALTY_ERROR * ABORT_PENALTY_ERROR);
    sum / (n as f64 * period)
}

/// First trace time from which |theta| stays within `band`: zero when the
/// whole trace is in band, `None` when the trace aborted or its last sample
/// is still outside.
pub fn settling_time(trace: &Trace, band: f64) -> Option<f64> {
    if trace.aborted {
        return None;
    }
    match trace.samples.iter().rposition(|s| s.theta.abs() > band) {
        None => Some(0.0),
        Some(i) if i + 1 == trace.samples.len() => None,
        Some(i) => Some(trace.samples[i + 1].t),
    }
}

/// Settling band for a given initial offset: 5% of it, floored at 0.01 rad so
/// small starts are not held to a microscopic band.
pub fn settling_band(theta0: f64) -> f64 {
    (0.05 * theta0.abs()).max(0.01)
}

/// Fitness of a raw search position: repair, decode, simulate, score.
/// Pure and deterministic; equal inputs give bit-equal fitness.
pub fn evaluate(position: &Vec9, plant: &PlantParams, sim: &SimConfig, gains: Gains) -> f64 {
    let cp = decode(&repair(*position), gains);
    mse(&simulate(&cp, plant, sim), sim.n_samples(), sim.period)
}

/// Trace CSV: header `t,theta,theta_dot,u,e`, one row per sample, LF endings.
pub fn write_trace_csv<W: io::Write>(w: &mut W, trace: &Trace) -> io::Result<()> {
    writeln!(w, "t,theta,theta_dot,u,e")?;
    for s in &trace.samples {
        writeln!(
            w,
            "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
            s.t, s.theta, s.theta_dot, s.u, s.e
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::MembershipTriple;
    use std::f64::consts::PI;

    fn sym_controller(gains: Gains) -> ControllerParams {
        let t = MembershipTriple {
            a1: -0.5,
            a2: 0.0,
            a3: 0.5,
        };
        ControllerParams {
            e_mf: t,
            de_mf: t,
            singletons: [-1.0, 0.0, 1.0],
            gains,
        }
    }

    #[test]
    fn equilibrium_start_records_all_zero_trace() {
        let cp = sym_controller(Gains::default());
        let sim = SimConfig {
            theta0: 0.0,
            ..SimConfig::default()
        };
        let trace = simulate(&cp, &PlantParams::default(), &sim);
        assert!(!trace.aborted);
        assert_eq!(trace.samples.len(), 500);
        assert!(trace.samples.iter().all(|s| s.theta == 0.0 && s.u == 0.0 && s.e == 0.0));
        assert_eq!(mse(&trace, 500, 0.01), 0.0);
        assert_eq!(settling_time(&trace, 0.01), Some(0.0));
    }

    #[test]
    fn zero_gain_controller_lets_the_pendulum_fall() {
        let cp = sym_controller(Gains {
            gu: 0.0,
            ..Gains::default()
        });
        let trace = simulate(&cp, &PlantParams::default(), &SimConfig::default());
        assert!(trace.aborted);
        assert!(trace.samples.len() < 500);
        // the fall from 0.22 rad takes well under a second
        assert!((trace.samples.len() as f64) * 0.01 < 1.0);
    }

    #[test]
    fn trace_timestamps_step_by_the_period_and_end_at_the_horizon() {
        let cp = sym_controller(Gains::default());
        let sim = SimConfig {
            theta0: 0.0,
            ..SimConfig::default()
        };
        let trace = simulate(&cp, &PlantParams::default(), &sim);
        assert_eq!(trace.samples[0].t, 0.01);
        assert_eq!(trace.samples.last().unwrap().t, 5.0);
        for w in trace.samples.windows(2) {
            assert!((w[1].t - w[0].t - 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn mse_of_unit_errors_is_exactly_one_hundred() {
        let samples = (0..4)
            .map(|k| Sample {
                t: (k + 1) as f64 * 0.01,
                theta: -1.0,
                theta_dot: 0.0,
                u: 0.0,
                e: 1.0,
            })
            .collect();
        let trace = Trace {
            samples,
            aborted: false,
            abort_step: None,
        };
        assert_eq!(mse(&trace, 4, 0.01), 100.0);
    }

    #[test]
    fn mse_charges_the_full_penalty_for_an_immediate_abort() {
        let trace = Trace {
            samples: vec![],
            aborted: true,
            abort_step: Some(0),
        };
        assert_eq!(mse(&trace, 100, 0.01), 100.0 * (PI * PI) / (100.0 * 0.01));
    }

    #[test]
    fn settling_time_is_the_first_time_the_band_holds_forever() {
        // |theta| decays through the band between t = 0.49 and t = 0.50
        let samples: Vec<Sample> = (1..=100)
            .map(|k| {
                let t = k as f64 * 0.01;
                let theta = if t < 0.5 { 0.2 } else { 0.005 };
                Sample {
                    t,
                    theta,
                    theta_dot: 0.0,
                    u: 0.0,
                    e: -theta,
                }
            })
            .collect();
        let trace = Trace {
            samples,
            aborted: false,
            abort_step: None,
        };
        assert_eq!(settling_time(&trace, 0.01), Some(0.5));
    }

    #[test]
    fn settling_time_is_none_for_aborted_traces() {
        let trace = Trace {
            samples: vec![],
            aborted: true,
            abort_step: Some(3),
        };
        assert_eq!(settling_time(&trace, 0.01), None);
    }

    #[test]
    fn settling_time_is_none_when_the_last_sample_is_outside() {
        let samples = vec![Sample {
            t: 0.01,
            theta: 0.5,
            theta_dot: 0.0,
            u: 0.0,
            e: -0.5,
        }];
        let trace = Trace {
            samples,
            aborted: false,
            abort_step: None,
        };
        assert_eq!(settling_time(&trace, 0.01), None);
    }

    #[test]
    fn settling_band_has_an_absolute_floor() {
        assert!((settling_band(0.22) - 0.011).abs() < 1e-15);
        assert_eq!(settling_band(0.1), 0.01);
        assert!((settling_band(-0.8) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn evaluate_is_bitwise_deterministic() {
        let pos: Vec9 = [-0.3, 0.1, 0.6, -0.8, -0.2, 0.4, -0.9, 0.0, 0.7];
        let plant = PlantParams::default();
        let sim = SimConfig::default();
        let a = evaluate(&pos, &plant, &sim, Gains::default());
        let b = evaluate(&pos, &plant, &sim, Gains::default());
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn evaluate_with_zero_output_gain_equals_the_uncontrolled_penalty() {
        let pos: Vec9 = [-0.5, 0.0, 0.5, -0.5, 0.0, 0.5, -1.0, 0.0, 1.0];
        let plant = PlantParams::default();
        let sim = SimConfig::default();
        let gains = Gains {
            gu: 0.0,
            ..Gains::default()
        };
        let got = evaluate(&pos, &plant, &sim, gains);
        let cp = sym_controller(gains);
        let expect = mse(&simulate(&cp, &plant, &sim), 500, 0.01);
        assert_eq!(got.to_bits(), expect.to_bits());
    }

    #[test]
    fn evaluate_ignores_order_within_triples() {
        let a: Vec9 = [0.6, -0.3, 0.1, -0.8, 0.4, -0.2, 0.7, -0.9, 0.0];
        let b: Vec9 = [-0.3, 0.1, 0.6, -0.8, -0.2, 0.4, -0.9, 0.0, 0.7];
        let plant = PlantParams::default();
        let sim = SimConfig::default();
        let fa = evaluate(&a, &plant, &sim, Gains::default());
        let fb = evaluate(&b, &plant, &sim, Gains::default());
        assert_eq!(fa.to_bits(), fb.to_bits());
    }

    #[test]
    fn trace_csv_has_the_documented_header_and_width() {
        let cp = sym_controller(Gains::default());
        let sim = SimConfig {
            horizon: 0.05,
            ..SimConfig::default()
        };
        let trace = simulate(&cp, &PlantParams::default(), &sim);
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,theta,theta_dot,u,e"));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 5);
        assert_eq!(text.lines().count(), 1 + trace.samples.len());
    }
}
