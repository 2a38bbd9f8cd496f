//! Rendering of each command's results as CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;

use anyhow::anyhow;
use serde::Serialize;
use serde_json::{json, Map, Value};
use waveqed::analysis::{self, dressed_states, find_crp, lamb_convergence, Band, CrpInput, SpectrumRow};
use waveqed::config::{OutputFormat, RunConfig};
use waveqed::scattering::SystemParams;
use waveqed::selfenergy::self_energy_total;
use waveqed::validation::{self, Fault, ValidationOptions};
use waveqed::waveguide::enumerate_coupled_modes;

use crate::{Failure, Outcome};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn metadata(cfg: &RunConfig, extra: Map<String, Value>) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("tool".into(), json!("waveqed"));
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("config".into(), serde_json::to_value(cfg).expect("config serialises"));
    meta.extend(extra);
    meta
}

fn csv_header(meta: &Map<String, Value>) -> String {
    let mut out = String::new();
    for (key, value) in meta {
        let _ = writeln!(out, "# {key} {value}");
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output serialises");
    text.push('\n');
    text
}

fn band_json(band: &Band) -> Value {
    json!({"j_max": band.j_max, "lo": band.lo, "hi": band.hi})
}

fn resolved(params: &SystemParams, band: Option<&Band>) -> Value {
    json!({
        "omega_e": params.omega_e,
        "band": band.map(band_json),
        "eit_frequency": params.eit_frequency(),
    })
}

/// Mode set, per-mode self-energy and Lamb-shift partial sums at `omega`.
fn truncation_report(omega: f64, params: &SystemParams) -> Value {
    let se = match self_energy_total(omega, params) {
        Ok(se) => se,
        Err(e) => return json!({"policy": params.truncation, "error": e.to_string()}),
    };
    let modes: Vec<Value> = se
        .per_mode
        .iter()
        .map(|m| {
            json!({
                "j": m.index,
                "mode": m.mode.label(),
                "cutoff": m.mode.cutoff,
                "lamb_shift": m.lamb_shift,
                "decay": m.decay,
            })
        })
        .collect();
    let more = lamb_convergence(omega, se.per_mode.len() + 3, params)
        .map(|sums| sums.into_iter().map(|(n, d)| json!([n, d])).collect::<Vec<_>>())
        .unwrap_or_default();
    json!({
        "policy": params.truncation,
        "evaluated_at": omega,
        "lamb_shift": se.lamb_shift,
        "modes": modes,
        "lamb_shift_vs_mode_count": more,
    })
}

pub fn modes(cfg: &RunConfig, stderr: &mut dyn Write) -> Outcome<String> {
    let geom = cfg.geometry()?;
    let modes = enumerate_coupled_modes(&geom, cfg.modes_max);
    if modes.is_empty() {
        let _ = writeln!(stderr, "warning: no coupled mode has a cutoff at or below {}", cfg.modes_max);
    }
    let meta = metadata(cfg, Map::new());
    Ok(match cfg.format {
        OutputFormat::Csv => {
            let mut out = csv_header(&meta);
            out.push_str("j,m,n,cutoff\n");
            for (i, m) in modes.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", i + 1, m.m, m.n, num(m.cutoff));
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = modes
                .iter()
                .enumerate()
                .map(|(i, m)| json!({"j": i + 1, "m": m.m, "n": m.n, "cutoff": m.cutoff}))
                .collect();
            to_json(&json!({"metadata": meta, "modes": rows}))
        }
    })
}

fn spectrum_csv(meta: &Map<String, Value>, rows: &[SpectrumRow]) -> String {
    let channels = rows.iter().map(|r| r.reflectance.len()).max().unwrap_or(0);
    let mut out = csv_header(meta);
    out.push_str("omega,R_total,T_total,ReG,ImG");
    for j in 1..=channels {
        let _ = write!(out, ",R_{j}");
    }
    for j in 1..=channels {
        let _ = write!(out, ",T_{j}");
    }
    out.push('\n');
    for row in rows {
        let (re, im) = match row.resolvent {
            Some(g) => (g.re, g.im),
            None => (f64::INFINITY, f64::INFINITY),
        };
        let _ = write!(
            out,
            "{},{},{},{},{}",
            num(row.omega),
            num(row.total_reflectance),
            num(row.total_transmittance),
            num(re),
            num(im)
        );
        let failed = row.error.is_some();
        for values in [&row.reflectance, &row.transmittance] {
            for j in 0..channels {
                let v = if failed { f64::NAN } else { values.get(j).copied().unwrap_or(0.0) };
                let _ = write!(out, ",{}", num(v));
            }
        }
        out.push('\n');
    }
    out
}

fn spectrum_json(meta: Map<String, Value>, rows: &[SpectrumRow]) -> String {
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                "omega": row.omega,
                "R_total": row.total_reflectance,
                "T_total": row.total_transmittance,
                "G": row.resolvent.map(|g| [g.re, g.im]),
                "pole": row.resolvent.is_none(),
                "R": row.reflectance,
                "T": row.transmittance,
                "error": row.error,
            })
        })
        .collect();
    to_json(&json!({"metadata": meta, "rows": rows}))
}

pub fn spectrum(cfg: &RunConfig) -> Outcome<String> {
    let params = cfg.system_params()?;
    let grid = cfg.omega_grid(&params)?;
    let band = cfg.resolve_band().ok();
    let rows = analysis::spectrum(&grid.omegas, &cfg.input, &params);
    if let Some(first) = rows.first().filter(|_| rows.iter().all(|r| r.error.is_some())) {
        return Err(Failure::domain(anyhow!(
            "input {} cannot be scattered anywhere on the grid: {}",
            cfg.input,
            first.error.as_deref().unwrap_or("")
        )));
    }
    let probe = band
        .map(|b| b.midpoint())
        .unwrap_or(grid.omegas[grid.omegas.len() / 2]);
    let mut extra = Map::new();
    extra.insert("resolved".into(), resolved(&params, band.as_ref()));
    extra.insert("truncation".into(), truncation_report(probe, &params));
    extra.insert("ctp".into(), json!(grid.ctp.into_iter().collect::<Vec<_>>()));
    extra.insert("nudged".into(), json!(grid.nudged));
    let meta = metadata(cfg, extra);
    Ok(match cfg.format {
        OutputFormat::Csv => spectrum_csv(&meta, &rows),
        OutputFormat::Json => spectrum_json(meta, &rows),
    })
}

pub fn phase_map(cfg: &RunConfig) -> Outcome<String> {
    let params = cfg.system_params()?;
    let band = cfg.resolve_band()?;
    let rabi = cfg.rabi_axis()?;
    let detuning = cfg.detuning_axis()?;
    let map = analysis::phase_map(&band, &rabi, &detuning, &params, &cfg.scan)?;
    let mut extra = Map::new();
    extra.insert("resolved".into(), resolved(&params, Some(&band)));
    extra.insert("eit_window".into(), json!(band.eit_window(params.omega_e)));
    extra.insert("truncation".into(), truncation_report(band.midpoint(), &params));
    let failed = map.cells.iter().flatten().filter(|c| c.failed()).count();
    extra.insert("failed_cells".into(), json!(failed));
    let meta = metadata(cfg, extra);
    Ok(match cfg.format {
        OutputFormat::Csv => {
            let mut out = csv_header(&meta);
            out.push_str("rabi,detuning,ctp,crp,predicted_crp\n");
            for (omega, row) in map.rabi.iter().zip(&map.cells) {
                for (delta, cell) in map.detuning.iter().zip(row) {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        num(*omega),
                        num(*delta),
                        cell.ctp,
                        cell.crp,
                        cell.predicted_crp
                    );
                }
            }
            out
        }
        OutputFormat::Json => to_json(&json!({
            "metadata": meta,
            "rabi": map.rabi,
            "detuning": map.detuning,
            "cells": map.cells,
        })),
    })
}

pub fn dressed(cfg: &RunConfig) -> Outcome<String> {
    let params = cfg.system_params()?;
    let band = cfg.resolve_band()?;
    let states = dressed_states(&params)?;
    let input = if band.j_max == 1 {
        CrpInput::SingleModeRegime
    } else {
        CrpInput::Scss
    };
    let report = find_crp(&band, input, &params, &cfg.scan)?;
    let mut extra = Map::new();
    extra.insert("resolved".into(), resolved(&params, Some(&band)));
    let meta = metadata(cfg, extra);
    Ok(match cfg.format {
        OutputFormat::Csv => {
            let mut out = csv_header(&meta);
            out.push_str("quantity,value\n");
            for (name, value) in [
                ("nu_plus", states.nu_plus),
                ("nu_minus", states.nu_minus),
                ("theta", states.theta),
                ("nu_tilde_plus", states.nu_tilde_plus),
                ("nu_tilde_minus", states.nu_tilde_minus),
                ("lamb_shift_at_omega_e", states.lamb_shift),
            ] {
                let _ = writeln!(out, "{name},{}", num(value));
            }
            for (i, peak) in report.crp.iter().enumerate() {
                let _ = writeln!(out, "crp_{},{}", i + 1, num(peak.omega));
            }
            for omega in &report.ctp {
                let _ = writeln!(out, "ctp,{}", num(*omega));
            }
            out
        }
        OutputFormat::Json => to_json(&json!({
            "metadata": meta,
            "dressed": states,
            "peaks": report,
            "regime": report.regime_label(),
        })),
    })
}

pub fn validate(cfg: &RunConfig, fault: Option<Fault>) -> Outcome<(String, bool)> {
    if cfg.samples == 0 {
        return Err(Failure::config(anyhow!("samples must be positive")));
    }
    let opts = ValidationOptions {
        seed: cfg.seed,
        samples: cfg.samples,
        quad: cfg.quad,
        fault,
        ..ValidationOptions::default()
    };
    let report = validation::run(&opts);
    let passed = report.all_passed();
    let summary = json!({
        "passed": passed,
        "report": report,
        "config": cfg,
    });
    let text = match cfg.format {
        OutputFormat::Json => to_json(&summary),
        OutputFormat::Csv => {
            let mut out = String::new();
            for check in &report.checks {
                let _ = writeln!(
                    out,
                    "{} {} ({} samples): {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.samples,
                    check.detail
                );
            }
            let _ = writeln!(out, "{}", if passed { "all checks passed" } else { "validation FAILED" });
            let _ = writeln!(out, "summary {summary}");
            out
        }
    };
    Ok((text, passed))
}
