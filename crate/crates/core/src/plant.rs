//! Inverted-pendulum dynamics in two selectable forms plus a fixed-step
//! classical RK4 integrator with zero-order-hold input. Cart states are
//! carried passively (no cart acceleration) so the velocity coupling term has
//! a home; with `b = 0` they are inert.

use thiserror::Error;

/// Denominators smaller than this in magnitude are rejected as degenerate.
pub const EPS_DENOM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantForm {
    /// As-transcribed variant in which gravity enters as a restoring torque
    /// (the upright point is stable at u = 0). Selectable for literal
    /// reproduction; not the default.
    PaperVerbatim,
    /// The standard frictionless cart-pole pendulum equation; gravity
    /// destabilizes the upright point. Positive `u` produces positive angular
    /// acceleration at upright, so the sign convention composes into a
    /// negative-feedback loop with an error defined as reference minus angle.
    StandardCartPole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub length: f64,
    pub gravity: f64,
    /// Cart-velocity coupling coefficient; 0 leaves the cart out of the
    /// angular dynamics entirely.
    pub b: f64,
    pub form: PlantForm,
}

impl Default for PlantParams {
    fn default() -> Self {
        PlantParams {
            cart_mass: 1.0,
            pole_mass: 0.1,
            length: 0.5,
            gravity: 9.8,
            b: 0.0,
            form: PlantForm::StandardCartPole,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub theta: f64,
    pub theta_dot: f64,
    pub x: f64,
    pub x_dot: f64,
}

impl PlantState {
    /// Pole at the given angle/rate with the cart at rest at the origin.
    pub fn new(theta: f64, theta_dot: f64) -> Self {
        PlantState {
            theta,
            theta_dot,
            x: 0.0,
            x_dot: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite()
            && self.theta_dot.is_finite()
            && self.x.is_finite()
            && self.x_dot.is_finite()
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum PlantError {
    #[error("dynamics denominator is within {EPS_DENOM} of zero")]
    DegenerateDynamics,
    #[error("state left the finite range")]
    NonFinite,
}

/// Angular acceleration of the pole under input `u` held at this instant.
pub fn angular_accel(s: &PlantState, u: f64, p: &PlantParams) -> Result<f64, PlantError> {
    let (sin_t, cos_t) = s.theta.sin_cos();
    let total_mass = p.cart_mass + p.pole_mass;
    let (num, den) = match p.form {
        PlantForm::PaperVerbatim => (
            -u * cos_t + p.b * cos_t * s.x_dot
                - p.pole_mass * p.length * s.theta_dot * s.theta_dot * sin_t
                - total_mass * p.gravity * sin_t,
            p.length * (4.0 / (3.0 * total_mass) - p.pole_mass * cos_t * cos_t),
        ),
        PlantForm::StandardCartPole => (
            p.gravity * sin_t
                + cos_t * (u - p.pole_mass * p.length * s.theta_dot * s.theta_dot * sin_t)
                    / total_mass,
            p.length * (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass),
        ),
    };
    if den.abs() < EPS_DENOM {
        return Err(PlantError::DegenerateDynamics);
    }
    Ok(num / den)
}

// State derivative: (theta', theta_dot', x', x_dot'); the cart does not
// accelerate.
fn deriv(s: &PlantState, u: f64, p: &PlantParams) -> Result<[f64; 4], PlantError> {
    Ok([s.theta_dot, angular_accel(s, u, p)?, s.x_dot, 0.0])
}

/// One classical RK4 step of length `dt` with `u` held constant.
pub fn step_rk4(s: &PlantState, u: f64, dt: f64, p: &PlantParams) -> Result<PlantState, PlantError> {
    let at = |k: &[f64; 4], h: f64| PlantState {
        theta: s.theta + h * k[0],
        theta_dot: s.theta_dot + h * k[1],
        x: s.x + h * k[2],
        x_dot: s.x_dot + h * k[3],
    };
    let k1 = deriv(s, u, p)?;
    let k2 = deriv(&at(&k1, dt / 2.0), u, p)?;
    let k3 = deriv(&at(&k2, dt / 2.0), u, p)?;
    let k4 = deriv(&at(&k3, dt), u, p)?;
    let w = dt / 6.0;
    let out = PlantState {
        theta: s.theta + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        theta_dot: s.theta_dot + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        x: s.x + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        x_dot: s.x_dot + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    };
    if !out.is_finite() {
        return Err(PlantError::NonFinite);
    }
    Ok(out)
}
