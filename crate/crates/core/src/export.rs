//! Artifact writers. Every file embeds the effective run configuration: JSON
//! artifacts carry a "config" object, CSV files a leading `# config=...`
//! comment line ahead of the header row. Floats are written with 17
//! significant digits so outputs round-trip bit-exactly.

use std::io::Write;

use serde_json::json;

use crate::config::RunConfig;
use crate::error::Result;
use crate::measure::MeasureRepresentation;
use crate::verify::VerificationReport;

/// 17 significant digits, scientific.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coords {
    Reduced,
    Original,
}

impl Coords {
    fn name(self) -> &'static str {
        match self {
            Coords::Reduced => "reduced",
            Coords::Original => "original",
        }
    }
}

fn selected_atoms(m: &MeasureRepresentation, coords: Coords) -> Vec<(f64, f64)> {
    match coords {
        Coords::Reduced => m.atoms.clone(),
        Coords::Original => m.atoms_original(),
    }
}

fn selected_density(m: &MeasureRepresentation, coords: Coords) -> Vec<(f64, f64)> {
    match coords {
        Coords::Reduced => m.density.clone(),
        Coords::Original => m.density_original(),
    }
}

pub fn write_atoms_csv<W: Write>(
    w: &mut W,
    m: &MeasureRepresentation,
    coords: Coords,
    config: &RunConfig,
) -> Result<()> {
    writeln!(w, "# config={}", serde_json::to_string(config)?)?;
    writeln!(w, "s,weight")?;
    for (s, weight) in selected_atoms(m, coords) {
        writeln!(w, "{},{}", fmt_f64(s), fmt_f64(weight))?;
    }
    Ok(())
}

pub fn write_density_csv<W: Write>(
    w: &mut W,
    m: &MeasureRepresentation,
    coords: Coords,
    config: &RunConfig,
) -> Result<()> {
    writeln!(w, "# config={}", serde_json::to_string(config)?)?;
    writeln!(w, "s,w")?;
    for (s, wv) in selected_density(m, coords) {
        writeln!(w, "{},{}", fmt_f64(s), fmt_f64(wv))?;
    }
    Ok(())
}

pub fn measure_json(
    m: &MeasureRepresentation,
    coords: Coords,
    config: &RunConfig,
) -> serde_json::Value {
    let off = match coords {
        Coords::Reduced => 0.0,
        Coords::Original => m.shift,
    };
    json!({
        "config": config,
        "coords": coords.name(),
        "atoms": selected_atoms(m, coords)
            .iter()
            .map(|&(s, w)| json!({"s": s, "weight": w}))
            .collect::<Vec<_>>(),
        "support": [m.support.0 - off, m.support.1 - off],
        "density": selected_density(m, coords)
            .iter()
            .map(|&(s, w)| json!({"s": s, "w": w}))
            .collect::<Vec<_>>(),
        "shift": m.shift,
    })
}

pub fn report_json(report: &VerificationReport, config: &RunConfig) -> serde_json::Value {
    json!({
        "config": config,
        "report": report,
    })
}
