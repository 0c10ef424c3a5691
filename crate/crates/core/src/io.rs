//! Text formats shared by the command-line tool.
//!
//! Floats in CSV output carry 17 significant digits so that values survive a
//! write/read round trip unchanged; JSON output uses serde_json's shortest
//! round-trip representation.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laser::{CountDistribution, PhasePosterior};
use crate::spin::BlochDensity;

/// `x` with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Input(format!("unknown format {other:?}"))),
        }
    }
}

pub fn write_json(mut writer: impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writeln!(writer)?;
    Ok(())
}

/// `phi,density` rows.
pub fn write_phase_posterior_csv(mut writer: impl Write, posterior: &PhasePosterior) -> Result<()> {
    writeln!(writer, "phi,density")?;
    for (phi, d) in posterior.iter() {
        writeln!(writer, "{},{}", format_float(phi), format_float(d))?;
    }
    Ok(())
}

/// `n,probability` rows followed by a `tail` row holding the tail bound.
pub fn write_count_distribution_csv(mut writer: impl Write, dist: &CountDistribution) -> Result<()> {
    writeln!(writer, "n,probability")?;
    for (n, p) in dist.probabilities.iter().enumerate() {
        writeln!(writer, "{n},{}", format_float(*p))?;
    }
    writeln!(writer, "tail,{}", format_float(dist.tail_bound))?;
    Ok(())
}

/// `x,y,z,mass,density` rows.
pub fn write_bloch_density_csv(mut writer: impl Write, density: &BlochDensity) -> Result<()> {
    writeln!(writer, "x,y,z,mass,density")?;
    for c in &density.cells {
        writeln!(
            writer,
            "{},{},{},{},{}",
            format_float(c.point.x),
            format_float(c.point.y),
            format_float(c.point.z),
            format_float(c.mass),
            format_float(c.density)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [2.0 / 3.0, 1e-300, -123.456, std::f64::consts::PI] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
        assert_eq!(format_float(0.0), "0");
    }
}
