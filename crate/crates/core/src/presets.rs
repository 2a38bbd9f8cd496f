//! Parameter sets for the figure regimes. `omega_e` is always the band
//! midpoint.

use crate::config::{BandSelector, Command, OmegaE, RunConfig};
use crate::error::{Error, Result};
use crate::scattering::InputKind;

pub const PRESET_NAMES: [&str; 6] = ["fig2a", "fig2c", "fig2d", "fig3a", "fig3b", "fig4"];

/// One curve of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub config: RunConfig,
}

fn base(command: Command, band: usize, g: f64, rabi: f64, detuning: f64, name: &str) -> RunConfig {
    RunConfig {
        band: BandSelector::Index(band),
        omega_e: OmegaE::Mid,
        g,
        rabi,
        detuning,
        omega_points: 2001,
        preset: Some(name.to_string()),
        ..RunConfig::new(command)
    }
}

fn input_series(cfg: RunConfig, inputs: &[InputKind]) -> Vec<Series> {
    inputs
        .iter()
        .map(|kind| Series {
            label: kind.to_string().replace(':', ""),
            config: RunConfig {
                input: kind.clone(),
                ..cfg.clone()
            },
        })
        .collect()
}

/// Resolves a preset name into its series.
pub fn preset(name: &str) -> Result<Vec<Series>> {
    let series = match name {
        "fig2a" => {
            let cfg = RunConfig {
                rabi_range: [0.0, 2.0],
                detuning_range: [-2.0, 2.0],
                rabi_points: 50,
                detuning_points: 50,
                ..base(Command::PhaseMap, 1, 0.1, 0.0, 0.0, name)
            };
            vec![Series {
                label: "phase-map".into(),
                config: cfg,
            }]
        }
        "fig2c" => [(2.0, 0.1), (0.0, 0.1), (0.0, 0.2)]
            .iter()
            .map(|&(delta, g)| Series {
                label: format!("delta{delta}_g{g}"),
                config: base(Command::Spectrum, 1, g, 1.0, delta, name),
            })
            .collect(),
        "fig2d" => [0.0, 1.0, 1.5, 2.0]
            .iter()
            .map(|&rabi| Series {
                label: format!("rabi{rabi}"),
                config: base(Command::Spectrum, 1, 0.1, rabi, 0.5, name),
            })
            .collect(),
        "fig3a" => input_series(
            base(Command::Spectrum, 2, 0.1, 0.5, 0.0, name),
            &[
                InputKind::Scss,
                InputKind::SingleMode(1),
                InputKind::SingleMode(2),
                InputKind::Equal,
                InputKind::Dark,
            ],
        ),
        "fig3b" => input_series(
            base(Command::Spectrum, 3, 0.05, 0.5, 0.0, name),
            &[
                InputKind::Scss,
                InputKind::SingleMode(1),
                InputKind::SingleMode(2),
                InputKind::SingleMode(3),
                InputKind::Equal,
                InputKind::Dark,
            ],
        ),
        "fig4" => input_series(
            base(Command::Spectrum, 2, 0.1, 0.5, 0.0, name),
            &[InputKind::Scss, InputKind::SingleMode(1), InputKind::SingleMode(2)],
        ),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown preset {other:?} (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(series)
}
