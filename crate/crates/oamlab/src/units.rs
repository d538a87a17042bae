//! Physical quantities written as `"<number> <unit>"` strings.
//!
//! Each dimension has a canonical unit that values are converted to on
//! parse and written back in on serialize.

use std::f64::consts::PI;
use std::fmt;

use oamlab_core::fields::FS_IN_AU;

const HARTREE_IN_EV: f64 = 27.211_386_245_988;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// µm
    Length,
    /// µm⁻¹
    InverseLength,
    /// µm²
    Area,
    /// fs
    Time,
    /// rad
    Angle,
    /// hartree
    Energy,
    /// atomic units of momentum (inverse bohr)
    Momentum,
}

impl Dimension {
    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Length => "um",
            Dimension::InverseLength => "per_um",
            Dimension::Area => "um2",
            Dimension::Time => "fs",
            Dimension::Angle => "rad",
            Dimension::Energy => "hartree",
            Dimension::Momentum => "per_bohr",
        }
    }

    /// Accepted units and their factor to the canonical unit.
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[("um", 1.0), ("nm", 1e-3)],
            Dimension::InverseLength => &[("per_um", 1.0), ("per_nm", 1e3)],
            Dimension::Area => &[("um2", 1.0), ("nm2", 1e-6)],
            Dimension::Time => &[("fs", 1.0), ("au_time", 1.0 / FS_IN_AU)],
            Dimension::Angle => &[("rad", 1.0), ("deg", PI / 180.0), ("pi_rad", PI)],
            Dimension::Energy => &[("hartree", 1.0), ("eV", 1.0 / HARTREE_IN_EV)],
            Dimension::Momentum => &[("per_bohr", 1.0)],
        }
    }

    fn of_unit(unit: &str) -> Option<Dimension> {
        use Dimension::*;
        [Length, InverseLength, Area, Time, Angle, Energy, Momentum]
            .into_iter()
            .find(|d| d.units().iter().any(|(u, _)| *u == unit))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Length => "length",
            Dimension::InverseLength => "inverse length",
            Dimension::Area => "area",
            Dimension::Time => "time",
            Dimension::Angle => "angle",
            Dimension::Energy => "energy",
            Dimension::Momentum => "momentum",
        };
        f.write_str(name)
    }
}

/// Parses `"15 per_um"` into the canonical unit of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let mut parts = text.split_whitespace();
    let (Some(number), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("expected \"<number> <unit>\", got \"{text}\""));
    };
    let value: f64 = number.parse().map_err(|_| format!("\"{number}\" is not a number"))?;
    if !value.is_finite() {
        return Err(format!("\"{number}\" is not finite"));
    }
    match dim.units().iter().find(|(u, _)| *u == unit) {
        Some((_, factor)) => Ok(value * factor),
        None => match Dimension::of_unit(unit) {
            Some(other) => Err(format!("unit \"{unit}\" is a {other}, expected a {dim}")),
            None => {
                let known: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
                Err(format!("unknown unit \"{unit}\" (use one of {})", known.join(", ")))
            }
        },
    }
}

/// Canonical text form; parsing it returns exactly `value`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value:?} {}", dim.canonical_unit())
}
