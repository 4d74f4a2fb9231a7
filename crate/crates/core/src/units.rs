//! Physical constants and the unit tags accepted by scenario files.
//!
//! Everything inside the simulator is SI. Polarizabilities are stored as
//! polarizability *volumes* (m³); multiply by [`FOUR_PI_EPS0`] to obtain the
//! SI polarizability in C·m²/V. Display units (Å³, u, nm, kV) exist only at
//! the edges: scenario parsing, reports and CSV output.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m (CODATA 2018).
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// 4πε₀, converts a polarizability volume (m³) into C·m²/V.
pub const FOUR_PI_EPS0: f64 = 4.0 * std::f64::consts::PI * EPS0;
/// Atomic mass constant, kg (CODATA 2018).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// One debye in C·m.
pub const DEBYE: f64 = 3.335_640_952e-30;
/// Å³ → m³.
pub const ANGSTROM3: f64 = 1e-30;
/// Mean atomic mass of natural carbon, u.
pub const CARBON_MASS_U: f64 = 12.011;

/// Physical dimension of a quantity, used to validate config values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Velocity,
    Voltage,
    Mass,
    Volume,
    FieldFactor,
    Calibration,
    Angle,
    Temperature,
    DipoleMoment,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Length => "length",
            Dimension::Velocity => "velocity",
            Dimension::Voltage => "voltage",
            Dimension::Mass => "mass",
            Dimension::Volume => "polarizability volume",
            Dimension::FieldFactor => "field factor",
            Dimension::Calibration => "field calibration",
            Dimension::Angle => "angle",
            Dimension::Temperature => "temperature",
            Dimension::DipoleMoment => "dipole moment",
        };
        f.write_str(s)
    }
}

/// A recognized unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Meter,
    Centimeter,
    Millimeter,
    Micrometer,
    Nanometer,
    Angstrom,
    MeterPerSecond,
    Volt,
    Kilovolt,
    Dalton,
    Kilogram,
    CubicAngstrom,
    CubicNanometer,
    CubicMeter,
    /// V²/m³, the (E∇)E_x field factor.
    VoltSquaredPerCubicMeter,
    /// V²/m³ per V², i.e. m⁻³.
    PerCubicMeter,
    Radian,
    Milliradian,
    Microradian,
    Kelvin,
    Debye,
    CoulombMeter,
}

impl Unit {
    /// Multiplicative factor from this unit to SI.
    pub fn factor(self) -> f64 {
        match self {
            Unit::Meter => 1.0,
            Unit::Centimeter => 1e-2,
            Unit::Millimeter => 1e-3,
            Unit::Micrometer => 1e-6,
            Unit::Nanometer => 1e-9,
            Unit::Angstrom => 1e-10,
            Unit::MeterPerSecond => 1.0,
            Unit::Volt => 1.0,
            Unit::Kilovolt => 1e3,
            Unit::Dalton => AMU,
            Unit::Kilogram => 1.0,
            Unit::CubicAngstrom => ANGSTROM3,
            Unit::CubicNanometer => 1e-27,
            Unit::CubicMeter => 1.0,
            Unit::VoltSquaredPerCubicMeter => 1.0,
            Unit::PerCubicMeter => 1.0,
            Unit::Radian => 1.0,
            Unit::Milliradian => 1e-3,
            Unit::Microradian => 1e-6,
            Unit::Kelvin => 1.0,
            Unit::Debye => DEBYE,
            Unit::CoulombMeter => 1.0,
        }
    }

    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Meter | Centimeter | Millimeter | Micrometer | Nanometer | Angstrom => {
                Dimension::Length
            }
            MeterPerSecond => Dimension::Velocity,
            Volt | Kilovolt => Dimension::Voltage,
            Dalton | Kilogram => Dimension::Mass,
            CubicAngstrom | CubicNanometer | CubicMeter => Dimension::Volume,
            VoltSquaredPerCubicMeter => Dimension::FieldFactor,
            PerCubicMeter => Dimension::Calibration,
            Radian | Milliradian | Microradian => Dimension::Angle,
            Kelvin => Dimension::Temperature,
            Debye | CoulombMeter => Dimension::DipoleMoment,
        }
    }

    pub fn tag(self) -> &'static str {
        use Unit::*;
        match self {
            Meter => "m",
            Centimeter => "cm",
            Millimeter => "mm",
            Micrometer => "um",
            Nanometer => "nm",
            Angstrom => "A",
            MeterPerSecond => "m/s",
            Volt => "V",
            Kilovolt => "kV",
            Dalton => "u",
            Kilogram => "kg",
            CubicAngstrom => "A3",
            CubicNanometer => "nm3",
            CubicMeter => "m3",
            VoltSquaredPerCubicMeter => "V2/m3",
            PerCubicMeter => "m-3",
            Radian => "rad",
            Milliradian => "mrad",
            Microradian => "urad",
            Kelvin => "K",
            Debye => "D",
            CoulombMeter => "Cm",
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Unit::*;
        let unit = match s {
            "m" => Meter,
            "cm" => Centimeter,
            "mm" => Millimeter,
            "um" | "µm" | "μm" => Micrometer,
            "nm" => Nanometer,
            "A" | "Å" => Angstrom,
            "m/s" => MeterPerSecond,
            "V" => Volt,
            "kV" => Kilovolt,
            "u" | "amu" | "Da" => Dalton,
            "kg" => Kilogram,
            "A3" | "Å3" | "Å³" => CubicAngstrom,
            "nm3" => CubicNanometer,
            "m3" => CubicMeter,
            "V2/m3" => VoltSquaredPerCubicMeter,
            "m-3" | "1/m3" | "V2/m3/V2" => PerCubicMeter,
            "rad" => Radian,
            "mrad" => Milliradian,
            "urad" | "µrad" => Microradian,
            "K" => Kelvin,
            "D" => Debye,
            "Cm" | "C*m" => CoulombMeter,
            other => return Err(Error::Config(format!("unknown unit tag `{other}`"))),
        };
        Ok(unit)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Converts `value` expressed in the unit `tag` to SI.
pub fn to_si(value: f64, tag: &str) -> Result<f64> {
    Ok(value * tag.parse::<Unit>()?.factor())
}

/// Converts an SI value to the display unit `unit`.
pub fn from_si(value: f64, unit: Unit) -> f64 {
    value / unit.factor()
}

/// A number with a unit, as written in a scenario file (`990 nm`, `7.5kV`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn si(&self) -> f64 {
        self.value * self.unit.factor()
    }

    /// SI value, checking the dimension first.
    pub fn si_as(&self, dim: Dimension) -> Result<f64> {
        if self.unit.dimension() != dim {
            return Err(Error::Config(format!(
                "expected a {dim}, got unit `{}` ({})",
                self.unit,
                self.unit.dimension()
            )));
        }
        Ok(self.si())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_digit()
                    || c == '.'
                    || c == '+'
                    || c == '-'
                    || ((c == 'e' || c == 'E')
                        && s[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')))
            })
            .map(|(i, _)| i)
            .unwrap_or(s.len());
        let (num, tag) = s.split_at(split);
        let tag = tag.trim();
        if tag.is_empty() {
            return Err(Error::Config(format!("`{s}` is missing a unit suffix")));
        }
        let value: f64 = num
            .parse()
            .map_err(|_| Error::Config(format!("`{num}` is not a number")))?;
        Ok(Quantity {
            value,
            unit: tag.parse()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [Unit; 22] = [
        Unit::Meter,
        Unit::Centimeter,
        Unit::Millimeter,
        Unit::Micrometer,
        Unit::Nanometer,
        Unit::Angstrom,
        Unit::MeterPerSecond,
        Unit::Volt,
        Unit::Kilovolt,
        Unit::Dalton,
        Unit::Kilogram,
        Unit::CubicAngstrom,
        Unit::CubicNanometer,
        Unit::CubicMeter,
        Unit::VoltSquaredPerCubicMeter,
        Unit::PerCubicMeter,
        Unit::Radian,
        Unit::Milliradian,
        Unit::Microradian,
        Unit::Kelvin,
        Unit::Debye,
        Unit::CoulombMeter,
    ];

    #[test]
    fn cubic_angstrom_is_exactly_1e_minus_30() {
        assert_eq!(to_si(1.0, "A3").unwrap(), 1e-30);
    }

    #[test]
    fn fullerene_mass_in_kg() {
        let kg = to_si(720.0, "u").unwrap();
        // 720 x 1.66054e-27 = 1.19559e-24
        assert!((kg - 1.1955e-24).abs() / 1.1955e-24 < 1e-4);
    }

    #[test]
    fn zero_in_any_unit_is_zero() {
        for u in ALL {
            assert_eq!(to_si(0.0, u.tag()).unwrap(), 0.0);
        }
    }

    #[test]
    fn unknown_tag_is_config_error() {
        assert!(matches!(to_si(1.0, "furlong"), Err(Error::Config(_))));
    }

    #[test]
    fn every_tag_parses_back() {
        for u in ALL {
            assert_eq!(u.tag().parse::<Unit>().unwrap(), u);
        }
    }

    #[test]
    fn quantity_parsing() {
        let q: Quantity = "990 nm".parse().unwrap();
        assert_eq!(q.unit, Unit::Nanometer);
        assert!((q.si() - 990e-9).abs() < 1e-20);
        let q: Quantity = "1.05e13 V2/m3".parse().unwrap();
        assert_eq!(q.value, 1.05e13);
        let q: Quantity = "7.5kV".parse().unwrap();
        assert_eq!(q.si(), 7500.0);
        let q: Quantity = "-3e-2 m".parse().unwrap();
        assert_eq!(q.si(), -0.03);
        assert!("42".parse::<Quantity>().is_err());
        assert!("4.2 parsec".parse::<Quantity>().is_err());
        assert!(q.si_as(Dimension::Velocity).is_err());
    }

    #[test]
    fn four_pi_eps0_value() {
        assert!((FOUR_PI_EPS0 - 1.112_650_056e-10).abs() < 1e-19);
    }

    proptest! {
        #[test]
        fn display_round_trip_within_one_ulp(v in -1e6f64..1e6, idx in 0usize..22) {
            let u = ALL[idx];
            let back = from_si(v * u.factor(), u);
            let ulp = f64::EPSILON * v.abs();
            prop_assert!((back - v).abs() <= ulp, "{v} {u:?} -> {back}");
        }
    }
}
