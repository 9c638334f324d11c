//! Physical design parameters of the jumper and their derived quantities.

use crate::error::Error;

/// Leg (rod + foot) mass [kg].
pub const LEG_MASS: f64 = 0.175;
/// Actuator (moving body) mass [kg].
pub const ACTUATOR_MASS: f64 = 1.003;
/// Nominal linear spring coefficient [N/m].
pub const ALPHA_NOMINAL: f64 = 5760.0;
/// Cubic spring coefficient [N/m^3], fixed hardware property.
pub const BETA: f64 = 1e8;
/// Nominal damping ratio of the narrow design space.
pub const ZETA_NOMINAL_NARROW: f64 = 1e-2;
/// Nominal damping ratio of the broad design space.
pub const ZETA_NOMINAL_BROAD: f64 = 7.5e-2;
/// Actuator stroke length [m].
pub const STROKE_MAX: f64 = 0.008;
/// Actuator speed limit [m/s].
pub const VEL_MAX: f64 = 1.0;
/// Actuator acceleration limit [m/s^2].
pub const ACCEL_MAX: f64 = 10.0;
/// Spring compression travel before the rigid stop engages [m].
pub const COMPRESSION_LIMIT: f64 = 0.008;
/// Gravitational acceleration [m/s^2].
pub const GRAVITY: f64 = 9.81;

/// Full parameter set of one candidate design.
///
/// `alpha` and `zeta` are the two co-designed quantities; everything else is
/// fixed hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignParams {
    /// Leg mass [kg].
    pub leg_mass: f64,
    /// Actuator mass [kg].
    pub actuator_mass: f64,
    /// Linear spring coefficient alpha [N/m].
    pub alpha: f64,
    /// Cubic spring coefficient beta [N/m^3].
    pub beta: f64,
    /// Damping ratio zeta (dimensionless).
    pub zeta: f64,
    /// Gravitational acceleration [m/s^2].
    pub gravity: f64,
    /// Actuator stroke length [m].
    pub stroke_max: f64,
    /// Actuator speed limit [m/s].
    pub vel_max: f64,
    /// Actuator acceleration limit [m/s^2].
    pub accel_max: f64,
    /// Spring travel below rest height before the hard stop [m].
    pub compression_limit: f64,
}

impl DesignParams {
    /// Nominal hardware with the given damping ratio.
    pub fn nominal(zeta: f64) -> Self {
        DesignParams {
            leg_mass: LEG_MASS,
            actuator_mass: ACTUATOR_MASS,
            alpha: ALPHA_NOMINAL,
            beta: BETA,
            zeta,
            gravity: GRAVITY,
            stroke_max: STROKE_MAX,
            vel_max: VEL_MAX,
            accel_max: ACCEL_MAX,
            compression_limit: COMPRESSION_LIMIT,
        }
    }

    /// Same hardware, different spring/damping design.
    pub fn with_design(&self, alpha: f64, zeta: f64) -> Self {
        DesignParams { alpha, zeta, ..*self }
    }

    /// Combined mass carried by the spring [kg].
    pub fn total_mass(&self) -> f64 {
        self.leg_mass + self.actuator_mass
    }

    /// Undamped natural frequency of the linearized spring-mass pair [rad/s].
    pub fn natural_frequency(&self) -> f64 {
        libm::sqrt(self.alpha / self.total_mass())
    }

    /// Viscous damping coefficient c = 2 zeta sqrt(alpha m_t) [N s/m].
    pub fn damping_coefficient(&self) -> f64 {
        2.0 * self.zeta * libm::sqrt(self.alpha * self.total_mass())
    }

    /// Check the physical invariants (positive masses/limits, nonnegative damping).
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            (self.leg_mass, "leg_mass must be positive"),
            (self.actuator_mass, "actuator_mass must be positive"),
            (self.alpha, "alpha must be positive"),
            (self.beta, "beta must be positive"),
            (self.gravity, "gravity must be positive"),
            (self.stroke_max, "stroke_max must be positive"),
            (self.vel_max, "vel_max must be positive"),
            (self.accel_max, "accel_max must be positive"),
            (self.compression_limit, "compression_limit must be positive"),
        ];
        for (value, why) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidConfig(why));
            }
        }
        if !(self.zeta >= 0.0) || !self.zeta.is_finite() {
            return Err(Error::InvalidConfig("zeta must be finite and nonnegative"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_mass_matches_hardware() {
        let p = DesignParams::nominal(ZETA_NOMINAL_NARROW);
        assert_eq!(p.total_mass(), 1.178);
    }

    #[test]
    fn damping_coefficient_zero_for_undamped() {
        let p = DesignParams::nominal(0.0);
        assert_eq!(p.damping_coefficient(), 0.0);
    }

    #[test]
    fn damping_coefficient_nominal_values() {
        let narrow = DesignParams::nominal(ZETA_NOMINAL_NARROW);
        assert!((narrow.damping_coefficient() - 1.6474562209661292).abs() < 1e-12);
        let broad = DesignParams::nominal(ZETA_NOMINAL_BROAD);
        assert!((broad.damping_coefficient() - 12.355921657245968).abs() < 1e-12);
    }

    #[test]
    fn natural_frequency_nominal() {
        let p = DesignParams::nominal(ZETA_NOMINAL_NARROW);
        assert!((p.natural_frequency() - 69.9259856097678).abs() < 1e-10);
    }

    #[test]
    fn validate_rejects_nonpositive_mass() {
        let mut p = DesignParams::nominal(ZETA_NOMINAL_NARROW);
        p.leg_mass = 0.0;
        assert!(matches!(p.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn validate_rejects_negative_zeta() {
        let p = DesignParams::nominal(-0.1);
        assert!(matches!(p.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn validate_accepts_nominal() {
        assert!(DesignParams::nominal(ZETA_NOMINAL_BROAD).validate().is_ok());
    }
}
