//! Unit-tagged scalar quantities.
//!
//! Each quantity is a thin newtype over `f64` so that watt-hours, kilowatt-hours
//! and kilograms of CO2e cannot be mixed up. Only the conversions that the
//! estimation model needs are implemented as operators.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            pub fn value(self) -> f64 {
                self.0
            }

            pub fn is_valid(self) -> bool {
                self.0.is_finite() && self.0 >= 0.0
            }
        }

        impl Add for $name {
            type Output = Self;

            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                iter.fold(Self::ZERO, Add::add)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", self.0, $unit)
            }
        }
    };
}

quantity!(
    /// Aggregated number of canonical interactions (N).
    UnitCount,
    "units"
);
quantity!(
    /// Energy per single canonical interaction, as measured (Wh).
    WattHours,
    "Wh"
);
quantity!(
    /// Energy in kilowatt-hours (E).
    EnergyKWh,
    "kWh"
);
quantity!(
    /// Mass of CO2-equivalent in kilograms (C).
    CarbonKg,
    "kgCO2e"
);

/// Grid carbon intensity in kgCO2e per kWh.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CarbonIntensity(pub f64);

impl CarbonIntensity {
    /// Global average grid intensity.
    pub const GLOBAL_AVERAGE: Self = Self(0.481);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for CarbonIntensity {
    fn default() -> Self {
        Self::GLOBAL_AVERAGE
    }
}

/// Per-unit energy in kWh, obtained from a [`WattHours`] constant without
/// a floating-point division (see [`PerUnitKWh::from_wh_decimal`]).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PerUnitKWh(pub f64);

impl PerUnitKWh {
    /// Converts a decimal Wh literal to kWh by shifting its exponent by three,
    /// so the result is the nearest `f64` to the exact decimal quotient.
    pub fn from_wh_decimal(literal: &str) -> Option<Self> {
        let trimmed = literal.trim();
        let (mantissa, exp) = match trimmed.find(['e', 'E']) {
            Some(pos) => (&trimmed[..pos], trimmed[pos + 1..].parse::<i32>().ok()?),
            None => (trimmed, 0),
        };
        mantissa.parse::<f64>().ok()?;
        let value = format!("{mantissa}e{}", exp - 3).parse::<f64>().ok()?;
        Some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Mul<UnitCount> for PerUnitKWh {
    type Output = EnergyKWh;

    fn mul(self, rhs: UnitCount) -> EnergyKWh {
        EnergyKWh(rhs.0 * self.0)
    }
}

impl Mul<CarbonIntensity> for EnergyKWh {
    type Output = CarbonKg;

    fn mul(self, rhs: CarbonIntensity) -> CarbonKg {
        CarbonKg(rhs.0 * self.0)
    }
}
