//! Browser bindings. Every export returns a JSON string; errors come back
//! as a thrown string on the JavaScript side.

use serde_json::json;
use wasm_bindgen::prelude::*;
use waveqed::analysis::{find_crp, linspace, phase_map as scan_phase_map, spectrum as scan_spectrum, FrequencyGrid};
use waveqed::waveguide::enumerate_coupled_modes;
use waveqed::{dressed_states, Band, CrpInput, InputKind, ScanConfig, SystemParams, WaveguideGeometry};

/// Coarser than the library default; the demo recomputes on every slider move.
const DEMO_SCAN: ScanConfig = ScanConfig {
    samples: 1200,
    edge_offset: 1e-7,
    root_tol: 1e-10,
    max_bisections: 200,
};

fn setup(band: usize, rabi: f64, detuning: f64, g: f64) -> Result<(Band, SystemParams), String> {
    let geom = WaveguideGeometry::default();
    let band = Band::of(band, &geom).map_err(|e| e.to_string())?;
    let params = SystemParams {
        omega_e: band.midpoint(),
        rabi,
        detuning,
        g,
        geom,
        ..SystemParams::default()
    };
    params.validate().map_err(|e| e.to_string())?;
    Ok((band, params))
}

fn crp_input(band: &Band) -> CrpInput {
    if band.j_max == 1 {
        CrpInput::SingleModeRegime
    } else {
        CrpInput::Scss
    }
}

/// Coupled TM modes with cutoff at or below `omega_max`.
#[wasm_bindgen]
pub fn modes(omega_max: f64) -> String {
    let rows: Vec<_> = enumerate_coupled_modes(&WaveguideGeometry::default(), omega_max)
        .iter()
        .map(|m| json!({"label": m.label(), "cutoff": m.cutoff}))
        .collect();
    json!(rows).to_string()
}

/// Reflectance and transmittance across a band, plus the located peaks.
#[wasm_bindgen]
pub fn spectrum(band: usize, input: &str, rabi: f64, detuning: f64, g: f64, points: usize) -> Result<String, String> {
    let (band, params) = setup(band, rabi, detuning, g)?;
    let kind: InputKind = input.parse().map_err(|e: waveqed::Error| e.to_string())?;
    let grid = FrequencyGrid::new(band.lo, band.hi, points, &params).map_err(|e| e.to_string())?;
    let rows = scan_spectrum(&grid.omegas, &kind, &params);
    if let Some(err) = rows.iter().find_map(|r| r.error.clone()) {
        return Err(err);
    }
    let peaks = find_crp(&band, crp_input(&band), &params, &DEMO_SCAN).map_err(|e| e.to_string())?;
    Ok(json!({
        "omega_e": params.omega_e,
        "lo": band.lo,
        "hi": band.hi,
        "omega": grid.omegas,
        "reflectance": rows.iter().map(|r| r.total_reflectance).collect::<Vec<_>>(),
        "transmittance": rows.iter().map(|r| r.total_transmittance).collect::<Vec<_>>(),
        "crp": peaks.crp.iter().map(|c| c.omega).collect::<Vec<_>>(),
        "ctp": peaks.ctp,
    })
    .to_string())
}

/// Counts of reflection and transmission peaks over a Rabi-detuning grid.
#[wasm_bindgen]
pub fn phase_map(band: usize, g: f64, rabi_max: f64, rabi_points: usize, detuning_points: usize) -> Result<String, String> {
    let (band, params) = setup(band, 0.0, 0.0, g)?;
    let rabi = linspace(0.0, rabi_max, rabi_points);
    let detuning = linspace(-2.0, 2.0, detuning_points);
    let map = scan_phase_map(&band, &rabi, &detuning, &params, &DEMO_SCAN).map_err(|e| e.to_string())?;
    let (lo, hi) = band.eit_window(params.omega_e);
    Ok(json!({
        "rabi": map.rabi,
        "detuning": map.detuning,
        "crp": map.cells.iter().map(|row| row.iter().map(|c| c.crp).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "ctp": map.cells.iter().map(|row| row.iter().map(|c| c.ctp).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "eit_window": [lo, hi],
    })
    .to_string())
}

/// Dressed levels next to the exact reflection peaks.
#[wasm_bindgen]
pub fn dressed(band: usize, rabi: f64, detuning: f64, g: f64) -> Result<String, String> {
    let (band, params) = setup(band, rabi, detuning, g)?;
    let states = dressed_states(&params).map_err(|e| e.to_string())?;
    let peaks = find_crp(&band, crp_input(&band), &params, &DEMO_SCAN).map_err(|e| e.to_string())?;
    Ok(json!({
        "levels": states,
        "crp": peaks.crp.iter().map(|c| c.omega).collect::<Vec<_>>(),
        "regime": peaks.regime_label(),
    })
    .to_string())
}
