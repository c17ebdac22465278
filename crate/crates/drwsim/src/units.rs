//! Unit-suffixed quantities for config files: every length is written
//! `"<value> <um|mm|cm>"` and every frequency `"<value> GHz"`. The suffix
//! discipline is strict — a bare number is rejected — because silent µm/mm
//! mix-ups are the classic failure mode at these dimensions.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthUnit {
    Um,
    Mm,
    Cm,
}

impl LengthUnit {
    pub fn meters_per_unit(self) -> f64 {
        match self {
            LengthUnit::Um => 1e-6,
            LengthUnit::Mm => 1e-3,
            LengthUnit::Cm => 1e-2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            LengthUnit::Um => "um",
            LengthUnit::Mm => "mm",
            LengthUnit::Cm => "cm",
        }
    }
}

/// A positive length, stored as the magnitude/unit pair it was written as
/// (so configs round-trip exactly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Length {
    pub value: f64,
    pub unit: LengthUnit,
}

impl Length {
    pub fn meters(&self) -> f64 {
        self.value * self.unit.meters_per_unit()
    }

    pub fn micrometers(&self) -> f64 {
        self.meters() / 1e-6
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.suffix())
    }
}

impl FromStr for Length {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (value, unit) = split_quantity(s, "a length", "\"160 um\"")?;
        let unit = match unit {
            "um" => LengthUnit::Um,
            "mm" => LengthUnit::Mm,
            "cm" => LengthUnit::Cm,
            other => {
                return Err(format!(
                    "unsupported length unit \"{other}\" in \"{s}\" (use um, mm, or cm)"
                ))
            }
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(format!("length must be a positive finite number, got \"{s}\""));
        }
        Ok(Length { value, unit })
    }
}

/// A positive frequency, written in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub ghz: f64,
}

impl Frequency {
    pub fn hz(&self) -> f64 {
        self.ghz * 1e9
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.ghz)
    }
}

impl FromStr for Frequency {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (value, unit) = split_quantity(s, "a frequency", "\"90 GHz\"")?;
        if unit != "GHz" {
            return Err(format!(
                "unsupported frequency unit \"{unit}\" in \"{s}\" (frequencies are written in GHz)"
            ));
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err(format!(
                "frequency must be a positive finite number, got \"{s}\""
            ));
        }
        Ok(Frequency { ghz: value })
    }
}

/// Splits `"<number> <unit>"`; rejects missing units with a pointed message.
fn split_quantity<'s>(
    s: &'s str,
    what: &str,
    example: &str,
) -> Result<(f64, &'s str), String> {
    let t = s.trim();
    let mut parts = t.split_whitespace();
    let (num, unit) = match (parts.next(), parts.next(), parts.next()) {
        (Some(num), Some(unit), None) => (num, unit),
        (Some(_), None, _) => {
            return Err(format!(
                "{what} needs a unit suffix: got \"{t}\", expected e.g. {example}"
            ))
        }
        _ => {
            return Err(format!(
                "could not parse {what} from \"{t}\", expected e.g. {example}"
            ))
        }
    };
    let value: f64 = num
        .parse()
        .map_err(|_| format!("invalid number \"{num}\" in {what} \"{t}\""))?;
    Ok((value, unit))
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(D::Error::custom)
    }
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(D::Error::custom)
    }
}
